//! Noisy-state steering: white-noise mixtures, conditioning on one party's
//! outcome, negativity of the remaining bipartite state, and the maximal
//! steered entanglement over the steering party's pure states.

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::linalg::hermitian_eigenvalues;
use crate::qstate::{build_phi322, ghz_state, DensityMatrix, PureState};

/// White-noise fraction in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
            return Err(Error::InvalidNoiseLevel(lambda));
        }
        Ok(NoiseLevel(lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Densified states stay small; anything bigger needs a sparse treatment.
pub const DENSE_DIM_CAP: usize = 64;

/// (1 - lambda) |psi><psi| + lambda I/dim on the state's total dimension.
pub fn noisy_state(psi: &PureState, lambda: NoiseLevel) -> Result<DensityMatrix> {
    noisy_state_weighted(psi, 1.0, lambda)
}

/// Weighted white-noise mixture, normalized to unit trace:
///
///   rho = ((1 - lambda) w |psi><psi| + lambda I/D) / ((1 - lambda) w + lambda)
///
/// The steering curves use w = branch count of the superposition, which gives
/// each ket one unit of projector weight (the convention the reference curves
/// follow); w = 1 recovers the plain mixture.
pub fn noisy_state_weighted(
    psi: &PureState,
    weight: f64,
    lambda: NoiseLevel,
) -> Result<DensityMatrix> {
    let dim = psi.shape().total_dim();
    if dim > DENSE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DENSE_DIM_CAP,
        });
    }
    if weight <= 0.0 || !weight.is_finite() {
        return Err(Error::ValidationFailed(format!(
            "bad projector weight {weight}"
        )));
    }
    let lam = lambda.value();
    let v = psi.to_dense();
    let norm = (1.0 - lam) * weight + lam;
    let pure_coef = (1.0 - lam) * weight / norm;
    let noise_coef = lam / norm / dim as f64;
    let mut rho = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for i in 0..dim {
        for j in 0..dim {
            rho[(i, j)] = pure_coef * v[i] * v[j].conj();
        }
        rho[(i, i)] += noise_coef;
    }
    DensityMatrix::new(psi.shape().parts().to_vec(), rho)
}

/// Collapse the first subsystem onto the unit vector `alice`, returning the
/// normalized remaining state and the outcome probability.
pub fn condition_on_first(
    rho: &DensityMatrix,
    alice: &[Complex64],
) -> Result<(DensityMatrix, f64)> {
    condition_on_part(rho, 0, alice)
}

/// Collapse subsystem `part` onto the unit vector `outcome`.
pub fn condition_on_part(
    rho: &DensityMatrix,
    part: usize,
    outcome: &[Complex64],
) -> Result<(DensityMatrix, f64)> {
    let dims = rho.dims();
    if part >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: part,
            n: dims.len(),
        });
    }
    if dims.len() < 2 {
        return Err(Error::ShapeMismatch(
            "conditioning needs at least two parts".into(),
        ));
    }
    let dx = dims[part] as usize;
    if outcome.len() != dx {
        return Err(Error::ShapeMismatch(format!(
            "outcome vector has length {}, subsystem has dimension {dx}",
            outcome.len()
        )));
    }
    let norm_sq: f64 = outcome.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm_sq));
    }
    let pre: usize = dims[..part].iter().map(|&d| d as usize).product();
    let post: usize = dims[part + 1..].iter().map(|&d| d as usize).product();
    let rest = pre * post;
    let flat = |r: usize, x: usize| -> usize {
        let (ip, io) = (r / post, r % post);
        (ip * dx + x) * post + io
    };
    let mut sigma = Array2::from_elem((rest, rest), Complex64::new(0.0, 0.0));
    for r in 0..rest {
        for rp in 0..rest {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, ax) in outcome.iter().enumerate() {
                for (xp, axp) in outcome.iter().enumerate() {
                    acc += ax.conj() * rho.entries()[(flat(r, x), flat(rp, xp))] * axp;
                }
            }
            sigma[(r, rp)] = acc;
        }
    }
    let prob: f64 = (0..rest).map(|i| sigma[(i, i)].re).sum();
    if prob < 1e-14 {
        return Err(Error::ZeroProbabilityOutcome);
    }
    sigma.mapv_inplace(|z| z / prob);
    let rem_dims: Vec<u32> = dims
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != part)
        .map(|(_, &d)| d)
        .collect();
    Ok((DensityMatrix::new(rem_dims, sigma)?, prob))
}

/// Negativity: partial-transpose the named part (0 or 1) of a bipartite
/// matrix and sum the absolute values of the negative eigenvalues.
pub fn negativity(rho: &DensityMatrix, transpose_part: usize) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::NotBipartite { parts: dims.len() });
    }
    if transpose_part >= 2 {
        return Err(Error::IndexOutOfRange {
            index: transpose_part,
            n: 2,
        });
    }
    let (da, db) = (dims[0] as usize, dims[1] as usize);
    let mut pt = Array2::from_elem((da * db, da * db), Complex64::new(0.0, 0.0));
    for a in 0..da {
        for b in 0..db {
            for ap in 0..da {
                for bp in 0..db {
                    let (src_row, src_col) = if transpose_part == 0 {
                        (ap * db + b, a * db + bp)
                    } else {
                        (a * db + bp, ap * db + b)
                    };
                    pt[(a * db + b, ap * db + bp)] = rho.entries()[(src_row, src_col)];
                }
            }
        }
    }
    Ok(hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&e| e < 0.0)
        .map(f64::abs)
        .sum())
}

const STARTS: usize = 64;
const CONVERGENCE: f64 = 1e-8;
const MAX_CYCLES: usize = 60;
const GOLDEN_X_TOL: f64 = 1e-9;

/// Hyperspherical parameterization of a unit vector modulo global phase:
/// 2(d-1) real parameters, angles then phases.
fn alice_vector(params: &[f64], d: usize) -> Vec<Complex64> {
    let thetas = &params[..d - 1];
    let phis = &params[d - 1..];
    let mut v = Vec::with_capacity(d);
    let mut sin_prod = 1.0f64;
    for m in 0..d {
        let modulus = if m < d - 1 {
            let x = sin_prod * thetas[m].cos();
            sin_prod *= thetas[m].sin();
            x
        } else {
            sin_prod
        };
        let phase = if m == 0 { 0.0 } else { phis[m - 1] };
        v.push(Complex64::from_polar(modulus, phase));
    }
    v
}

fn param_ranges(d: usize) -> Vec<(f64, f64)> {
    let mut r = vec![(0.0, std::f64::consts::FRAC_PI_2); d - 1];
    r.extend(vec![(0.0, 2.0 * std::f64::consts::PI); d - 1]);
    r
}

/// Radical-inverse (Halton) low-discrepancy point, deterministic.
fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn golden_section_max(mut lo: f64, mut hi: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - gr * (hi - lo);
    let mut d = lo + gr * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > GOLDEN_X_TOL {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    let x = (lo + hi) / 2.0;
    let fx = f(x);
    (x, fx)
}

/// Maximize the negativity of the Bob-Charlie state over Alice's conditioning
/// vector: 64 deterministic low-discrepancy starts, coordinate-wise
/// golden-section refinement, stop when a full cycle improves the value by
/// less than 1e-8. Zero-probability outcomes score zero.
pub fn max_steered_entanglement(
    rho: &DensityMatrix,
    alice_dim: usize,
) -> Result<(f64, Vec<Complex64>)> {
    let dims = rho.dims();
    if dims.len() != 3 || dims[0] as usize != alice_dim || dims[1] != 2 || dims[2] != 2 {
        return Err(Error::ShapeMismatch(format!(
            "expected dims [{alice_dim}, 2, 2], got {dims:?}"
        )));
    }
    let eval = |params: &[f64]| -> f64 {
        let psi_a = alice_vector(params, alice_dim);
        match condition_on_first(rho, &psi_a) {
            Ok((sigma, _prob)) => negativity(&sigma, 1).unwrap_or(0.0),
            Err(_) => 0.0,
        }
    };
    let ranges = param_ranges(alice_dim);
    let np = ranges.len();
    let bases = [2usize, 3, 5, 7, 11, 13, 17, 19];

    let mut best_e = f64::NEG_INFINITY;
    let mut best_p = vec![0.0; np];
    for s in 0..STARTS {
        let mut p: Vec<f64> = (0..np)
            .map(|j| {
                let (lo, hi) = ranges[j];
                lo + halton(s + 1, bases[j % bases.len()]) * (hi - lo)
            })
            .collect();
        let mut e = eval(&p);
        for _ in 0..MAX_CYCLES {
            let prev = e;
            for j in 0..np {
                let (lo, hi) = ranges[j];
                let mut slice = |x: f64| {
                    let mut q = p.clone();
                    q[j] = x;
                    eval(&q)
                };
                let (x, fx) = golden_section_max(lo, hi, &mut slice);
                if fx > e {
                    p[j] = x;
                    e = fx;
                }
            }
            if (e - prev).abs() < CONVERGENCE {
                break;
            }
        }
        if e > best_e {
            best_e = e;
            best_p = p;
        }
    }
    Ok((best_e, alice_vector(&best_p, alice_dim)))
}

/// The two reference tripartite states of the steering comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringState {
    /// Three qubits in the GHZ state (2 superposition branches).
    Ghz3,
    /// One qutrit and two qubits in the signed six-branch state.
    Phi322,
}

impl SteeringState {
    pub fn state(self) -> PureState {
        match self {
            SteeringState::Ghz3 => ghz_state(3, 2),
            SteeringState::Phi322 => build_phi322(),
        }
    }

    pub fn branch_weight(self) -> f64 {
        match self {
            SteeringState::Ghz3 => 2.0,
            SteeringState::Phi322 => 6.0,
        }
    }

    pub fn alice_dim(self) -> usize {
        match self {
            SteeringState::Ghz3 => 2,
            SteeringState::Phi322 => 3,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            SteeringState::Ghz3 => "ghz3",
            SteeringState::Phi322 => "phi322",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub lambda: f64,
    pub e_max: f64,
    pub alice: Vec<Complex64>,
}

/// Maximal steered entanglement along a noise grid, Bob vs Charlie negativity.
#[derive(Debug, Clone)]
pub struct SteeringCurve {
    pub state: SteeringState,
    pub bipartition: &'static str,
    pub points: Vec<CurvePoint>,
}

/// Inclusive grid from lambda_min to lambda_max in the given step.
pub fn lambda_grid(lambda_min: f64, lambda_max: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut i = 0usize;
    loop {
        let l = lambda_min + i as f64 * step;
        if l > lambda_max + 1e-12 {
            break;
        }
        grid.push(l.min(lambda_max));
        i += 1;
    }
    grid
}

fn curve_point(state: SteeringState, lambda: f64) -> Result<CurvePoint> {
    let psi = state.state();
    let rho = noisy_state_weighted(&psi, state.branch_weight(), NoiseLevel::new(lambda)?)?;
    let (e_max, alice) = max_steered_entanglement(&rho, state.alice_dim())?;
    Ok(CurvePoint {
        lambda,
        e_max,
        alice,
    })
}

/// Evaluate the curve, one independent optimization per grid point.
/// Parallelizes over the grid; each point is deterministic.
pub fn steering_curve(state: SteeringState, lambdas: &[f64]) -> Result<SteeringCurve> {
    let points = curve_points(state, lambdas, false)?;
    Ok(SteeringCurve {
        state,
        bipartition: "bob-charlie",
        points,
    })
}

pub fn steering_curve_seq(state: SteeringState, lambdas: &[f64]) -> Result<SteeringCurve> {
    let points = curve_points(state, lambdas, true)?;
    Ok(SteeringCurve {
        state,
        bipartition: "bob-charlie",
        points,
    })
}

#[cfg(feature = "parallel")]
fn curve_points(
    state: SteeringState,
    lambdas: &[f64],
    sequential: bool,
) -> Result<Vec<CurvePoint>> {
    use rayon::prelude::*;
    if sequential {
        lambdas.iter().map(|&l| curve_point(state, l)).collect()
    } else {
        lambdas.par_iter().map(|&l| curve_point(state, l)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn curve_points(
    state: SteeringState,
    lambdas: &[f64],
    _sequential: bool,
) -> Result<Vec<CurvePoint>> {
    lambdas.iter().map(|&l| curve_point(state, l)).collect()
}

/// Single-curve CSV: `lambda,emax`.
pub fn write_curve_csv(curve: &SteeringCurve, out: &mut impl Write) -> Result<()> {
    writeln!(out, "lambda,emax")?;
    for p in &curve.points {
        writeln!(out, "{},{}", sig12(p.lambda), sig12(p.e_max))?;
    }
    Ok(())
}

/// Paired CSV over one grid: `lambda,emax_het,emax_hom,gap`.
pub fn write_paired_csv(
    het: &SteeringCurve,
    hom: &SteeringCurve,
    out: &mut impl Write,
) -> Result<()> {
    writeln!(out, "lambda,emax_het,emax_hom,gap")?;
    for (h, g) in het.points.iter().zip(&hom.points) {
        writeln!(
            out,
            "{},{},{},{}",
            sig12(h.lambda),
            sig12(h.e_max),
            sig12(g.e_max),
            sig12(h.e_max - g.e_max)
        )?;
    }
    Ok(())
}
