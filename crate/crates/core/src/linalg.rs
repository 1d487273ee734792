//! Eigenvalues of small Hermitian matrices by cyclic Jacobi iteration.
//!
//! A Hermitian H = A + iB embeds into the real symmetric [[A, -B], [B, A]],
//! whose spectrum is that of H with every eigenvalue doubled. All matrices
//! here are at most 12x12, so the embedding costs nothing and keeps the
//! rotation arithmetic real.

use ndarray::Array2;
use num_complex::Complex64;

/// Off-diagonal Frobenius-norm threshold for convergence.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &Array2<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "matrix must be square");
    let mut m = vec![vec![0.0f64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            m[i][j] = z.re;
            m[i + n][j + n] = z.re;
            m[i][j + n] = -z.im;
            m[i + n][j] = z.im;
        }
    }
    let mut eig = symmetric_jacobi_eigenvalues(&mut m);
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // collapse the doubled spectrum, averaging each pair
    (0..n)
        .map(|i| (eig[2 * i] + eig[2 * i + 1]) / 2.0)
        .collect()
}

/// Cyclic Jacobi sweeps on a real symmetric matrix (consumed in place).
fn symmetric_jacobi_eigenvalues(m: &mut [Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if (2.0 * off).sqrt() < JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() < JACOBI_TOL / (n as f64 * n as f64) {
                    continue;
                }
                let app = m[p][p];
                let aqq = m[q][q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn diagonal_matrix() {
        let h = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]
        ];
        let e = hermitian_eigenvalues(&h);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_y_spectrum() {
        let h = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]
        ];
        let e = hermitian_eigenvalues(&h);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_4x4_spectrum() {
        // partial transpose of the Bell projector: eigenvalues 1/2 (x3), -1/2
        let z = Complex64::new(0.0, 0.0);
        let h = Complex64::new(0.5, 0.0);
        let m = array![[h, z, z, z], [z, z, h, z], [z, h, z, z], [z, z, z, h]];
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] + 0.5).abs() < 1e-12);
        for v in &e[1..] {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hermitian_trace_preserved() {
        // deterministic pseudo-random entries
        let n = 7;
        let mut h = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        let mut seed = 88172645463325252u64;
        let mut rnd = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) - 0.5
        };
        for i in 0..n {
            for j in i..n {
                let re = rnd();
                let im = if i == j { 0.0 } else { rnd() };
                h[(i, j)] = Complex64::new(re, im);
                h[(j, i)] = Complex64::new(re, -im);
            }
        }
        let e = hermitian_eigenvalues(&h);
        let trace: f64 = (0..n).map(|i| h[(i, i)].re).sum();
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-9);
        // eigenvalues of H^2 are squares
        let h2 = h.dot(&h);
        let e2 = hermitian_eigenvalues(&h2);
        let mut sq: Vec<f64> = e.iter().map(|x| x * x).collect();
        sq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in e2.iter().zip(&sq) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}
