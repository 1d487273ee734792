//! Pure states of heterogeneous qudit systems built from mixed orthogonal
//! arrays: sparse amplitudes over mixed-radix basis tuples, partial traces,
//! k-uniformity verification, the existence bound, the GHZ-form assembly and
//! phase repair for redundant arrays.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use ndarray::Array2;
use num_bigint::BigUint;
use num_complex::Complex64;

use crate::construct::prime_factors;
use crate::designs::DifferenceScheme;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::moa::{canonical_column_order, MixedArray};
use crate::subsets::{k_subsets, map_reduce, map_reduce_seq};

/// Default tolerance for exact-arithmetic-backed checks; amplitudes are
/// roots of unity over sqrt(r), so deviations are pure rounding.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Ordered list of local dimensions, one per subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemShape {
    parts: Vec<u32>,
}

impl SystemShape {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::ShapeMismatch("shape needs at least one part".into()));
        }
        if parts.iter().any(|&d| d < 2) {
            return Err(Error::ShapeMismatch(
                "local dimensions must be at least 2".into(),
            ));
        }
        Ok(SystemShape { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|&d| d as usize).product()
    }

    /// The (d_i, n_i) grouping with d_1 > d_2 > ... > d_l.
    pub fn grouping(&self) -> Vec<(u32, usize)> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &d in &self.parts {
            *counts.entry(d).or_insert(0) += 1;
        }
        counts.into_iter().rev().collect()
    }
}

/// Sparse pure state: a map from basis tuples to complex amplitudes.
/// Subsystem 1 is the most significant position in the mixed-radix index,
/// matching the left-to-right reading of a ket.
#[derive(Debug, Clone)]
pub struct PureState {
    shape: SystemShape,
    terms: BTreeMap<Vec<u32>, Complex64>,
    normalized: bool,
}

impl PureState {
    pub fn from_terms(shape: SystemShape, terms: Vec<(Vec<u32>, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, (ket, amp)) in terms.into_iter().enumerate() {
            if ket.len() != shape.len() {
                return Err(Error::ShapeMismatch(format!(
                    "ket {i} has {} symbols, shape has {} parts",
                    ket.len(),
                    shape.len()
                )));
            }
            for (pos, (&sym, &dim)) in ket.iter().zip(shape.parts()).enumerate() {
                if sym >= dim {
                    return Err(Error::ValidationFailed(format!(
                        "symbol {sym} at position {pos} exceeds dimension {dim}"
                    )));
                }
            }
            if map.insert(ket, amp).is_some() {
                return Err(Error::DuplicateRow(i));
            }
        }
        let norm_sq: f64 = map.values().map(|a| a.norm_sqr()).sum();
        let normalized = (norm_sq - 1.0).abs() <= DEFAULT_TOLERANCE;
        Ok(PureState {
            shape,
            terms: map,
            normalized,
        })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Dense statevector in mixed-radix order.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.shape.total_dim()];
        for (ket, amp) in &self.terms {
            v[self.index_of(ket)] = *amp;
        }
        v
    }

    fn index_of(&self, ket: &[u32]) -> usize {
        ket.iter()
            .zip(self.shape.parts())
            .fold(0usize, |acc, (&sym, &dim)| {
                acc * dim as usize + sym as usize
            })
    }

    /// |<self|other>|, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(
                "states live on different shapes".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (ket, amp) in &self.terms {
            if let Some(b) = other.terms.get(ket) {
                acc += amp.conj() * b;
            }
        }
        Ok(acc.norm())
    }
}

/// Dense Hermitian matrix with its subsystem dimension list.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Vec<u32>,
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<u32>, entries: Array2<Complex64>) -> Result<Self> {
        let dim: usize = dims.iter().map(|&d| d as usize).product();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, dims give {dim}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(DensityMatrix { dims, entries })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// Hermiticity and unit trace within 1e-12, eigenvalues above -1e-10.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let asym = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                if asym > 1e-12 {
                    return Err(Error::ValidationFailed(format!(
                        "not Hermitian at ({i},{j}): {asym:e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::ValidationFailed(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = hermitian_eigenvalues(&self.entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::ValidationFailed(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Max-norm distance from the maximally mixed state of the same size.
    pub fn deviation_from_maximally_mixed(&self) -> f64 {
        let n = self.dim();
        let target = 1.0 / n as f64;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { target } else { 0.0 };
                worst = worst.max((self.entries[(i, j)] - want).norm());
            }
        }
        worst
    }
}

/// One term per array row with amplitude e^{i phase} / sqrt(r).
pub fn state_from_array(a: &MixedArray, phases: Option<&[f64]>) -> Result<PureState> {
    if let Some(ph) = phases {
        if ph.len() != a.rows() {
            return Err(Error::PhaseLengthMismatch {
                expected: a.rows(),
                got: ph.len(),
            });
        }
    }
    let shape = SystemShape::new(a.alphabets().to_vec())?;
    let amp0 = 1.0 / (a.rows() as f64).sqrt();
    let terms = a
        .cells()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let angle = phases.map(|p| p[i]).unwrap_or(0.0);
            (row.clone(), Complex64::from_polar(amp0, angle))
        })
        .collect();
    PureState::from_terms(shape, terms)
}

/// Partial trace onto `subset`, computed sparsely: terms agreeing on the
/// complement contribute a*conj(b) at their subset indices. The global
/// density matrix is never materialized.
pub fn reduced_density(psi: &PureState, subset: &[usize]) -> Result<DensityMatrix> {
    let n = psi.shape.len();
    let mut keep: Vec<usize> = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::EmptySubset);
    }
    if keep.len() >= n {
        return Err(Error::FullSubset);
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let rest: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let dims: Vec<u32> = keep.iter().map(|&i| psi.shape.parts()[i]).collect();
    let dim: usize = dims.iter().map(|&d| d as usize).product();

    let sub_index = |ket: &[u32]| -> usize {
        keep.iter().zip(&dims).fold(0usize, |acc, (&pos, &d)| {
            acc * d as usize + ket[pos] as usize
        })
    };

    let mut groups: HashMap<Vec<u32>, Vec<(usize, Complex64)>> = HashMap::new();
    for (ket, amp) in &psi.terms {
        let key: Vec<u32> = rest.iter().map(|&i| ket[i]).collect();
        groups.entry(key).or_default().push((sub_index(ket), *amp));
    }
    let mut rho = Array2::from_elem((dim, dim), Complex64::new(0.0, 0.0));
    for members in groups.values() {
        for &(ia, a) in members {
            for &(ib, b) in members {
                rho[(ia, ib)] += a * b.conj();
            }
        }
    }
    DensityMatrix::new(dims, rho)
}

/// Per-reduction diagnostics and the aggregate over all k-subsets.
#[derive(Debug, Clone)]
pub struct UniformityReport {
    pub k: usize,
    pub ok: bool,
    /// Max over subsets of the max-norm distance from I/dim.
    pub worst_deviation: f64,
    /// First subset whose deviation exceeds the tolerance, if any.
    pub failing_subset: Option<Vec<usize>>,
    /// Largest off-diagonal magnitude seen (diagonality diagnostic).
    pub worst_offdiagonal: f64,
    /// Largest diagonal distance from 1/dim (uniform-diagonal diagnostic).
    pub worst_diagonal_deviation: f64,
}

#[derive(Clone, Copy)]
struct SubsetStats {
    dev: f64,
    offdiag: f64,
    diagdev: f64,
    worst_idx: usize,
    fail_idx: Option<usize>,
}

fn merge_stats(a: SubsetStats, b: SubsetStats) -> SubsetStats {
    // larger deviation wins; exact ties go to the lower subset index
    let (dev, worst_idx) = if b.dev > a.dev {
        (b.dev, b.worst_idx)
    } else if b.dev < a.dev {
        (a.dev, a.worst_idx)
    } else {
        (a.dev, a.worst_idx.min(b.worst_idx))
    };
    SubsetStats {
        dev,
        offdiag: a.offdiag.max(b.offdiag),
        diagdev: a.diagdev.max(b.diagdev),
        worst_idx,
        fail_idx: match (a.fail_idx, b.fail_idx) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
    }
}

/// Check every k-party reduction against I/dim. Parallelizes over subsets
/// with a deterministic reduction (max deviation, first failing subset).
pub fn verify_k_uniform(psi: &PureState, k: usize, tolerance: f64) -> Result<UniformityReport> {
    k_uniform_impl(psi, k, tolerance, false)
}

pub fn verify_k_uniform_seq(psi: &PureState, k: usize, tolerance: f64) -> Result<UniformityReport> {
    k_uniform_impl(psi, k, tolerance, true)
}

fn k_uniform_impl(
    psi: &PureState,
    k: usize,
    tolerance: f64,
    sequential: bool,
) -> Result<UniformityReport> {
    let n = psi.shape.len();
    if k < 1 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    let subsets = k_subsets(n, k);
    let eval = |idx: usize, subset: &Vec<usize>| -> SubsetStats {
        let rho = reduced_density(psi, subset).expect("valid subset");
        let dim = rho.dim();
        let target = 1.0 / dim as f64;
        let mut dev = 0.0f64;
        let mut offdiag = 0.0f64;
        let mut diagdev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let z = rho.entries()[(i, j)];
                if i == j {
                    diagdev = diagdev.max((z - target).norm());
                    dev = dev.max((z - target).norm());
                } else {
                    offdiag = offdiag.max(z.norm());
                    dev = dev.max(z.norm());
                }
            }
        }
        SubsetStats {
            dev,
            offdiag,
            diagdev,
            worst_idx: idx,
            fail_idx: (dev > tolerance).then_some(idx),
        }
    };
    let stats = if sequential {
        map_reduce_seq(&subsets, eval, merge_stats)
    } else {
        map_reduce(&subsets, eval, merge_stats)
    }
    .expect("at least one subset");
    Ok(UniformityReport {
        k,
        ok: stats.fail_idx.is_none(),
        worst_deviation: stats.dev,
        failing_subset: stats.fail_idx.map(|i| subsets[i].clone()),
        worst_offdiagonal: stats.offdiag,
        worst_diagonal_deviation: stats.diagdev,
    })
}

/// Exact integer evaluation of the existence bound: with the grouping in
/// decreasing-dimension order and n'_i = min(n_i, max(k - sum_{j<i} n_j, 0)),
/// a k-uniform state requires (prod d_i^{n'_i})^2 <= prod d_i^{n_i}.
pub fn uniformity_bound(shape: &SystemShape, k: usize) -> bool {
    let grouping = shape.grouping();
    let mut lhs = BigUint::from(1u32);
    let mut used = 0usize;
    for &(d, n) in &grouping {
        let quota = k.saturating_sub(used).min(n);
        lhs *= BigUint::from(d).pow(quota as u32);
        used += n;
    }
    let lhs = lhs.clone() * lhs;
    let mut rhs = BigUint::from(1u32);
    for &(d, n) in &grouping {
        rhs *= BigUint::from(d).pow(n as u32);
    }
    lhs <= rhs
}

/// The cyclic shift underlying the GHZ form: (j + power) mod d.
pub fn shift_apply(j: u32, d: u32, power: i64) -> u32 {
    (j as i64 + power).rem_euclid(d as i64) as u32
}

/// GHZ state of `parts` subsystems with d levels each.
pub fn ghz_state(parts: usize, d: u32) -> PureState {
    let shape = SystemShape::new(vec![d; parts]).expect("valid shape");
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let terms = (0..d).map(|m| (vec![m; parts], amp)).collect();
    PureState::from_terms(shape, terms).expect("distinct kets")
}

/// Assemble the state of a scheme's construction through its GHZ grouping:
/// branch j collects the d field-shifted copies of scheme row j, with the
/// congruence symbols of each copy's global row index appended. Must equal
/// state_from_array over the construction up to global phase; the array
/// construction is authoritative and the agreement is the test.
pub fn ghz_decomposition(ds: &DifferenceScheme) -> Result<PureState> {
    let d = ds.symbols();
    let s = ds.rows();
    let field = ds.field();
    let r = d as usize * s;
    let mut primes: Vec<u32> = prime_factors(r as u64).iter().map(|&p| p as u32).collect();
    primes.sort_unstable_by(|a, b| b.cmp(a));
    let mut alphabets = vec![d; ds.cols()];
    alphabets.extend(primes.iter().copied());
    let order = canonical_column_order(&alphabets);
    let shape = SystemShape::new(order.iter().map(|&c| alphabets[c]).collect())?;
    let amp = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);

    let mut terms = Vec::with_capacity(r);
    for j in 0..s {
        for g in 0..d {
            let global = (g as usize * s + j) as u32;
            let mut sym: Vec<u32> = ds.cells()[j]
                .iter()
                .map(|&c| field.add_unchecked(c, g))
                .collect();
            for &p in &primes {
                sym.push(global % p);
            }
            let ket: Vec<u32> = order.iter().map(|&c| sym[c]).collect();
            terms.push((ket, amp));
        }
    }
    PureState::from_terms(shape, terms)
}

/// The 1-uniform state of one qutrit and two qubits that no irredundant
/// array produces: |000>+|011>+|101>+|110>+|200>-|211>, normalized.
pub fn build_phi322() -> PureState {
    let shape = SystemShape::new(vec![3, 2, 2]).expect("valid shape");
    let amp = 1.0 / 6.0f64.sqrt();
    let kets: [(&[u32; 3], f64); 6] = [
        (&[0, 0, 0], amp),
        (&[0, 1, 1], amp),
        (&[1, 0, 1], amp),
        (&[1, 1, 0], amp),
        (&[2, 0, 0], amp),
        (&[2, 1, 1], -amp),
    ];
    let terms = kets
        .iter()
        .map(|(k, a)| (k.to_vec(), Complex64::new(*a, 0.0)))
        .collect();
    PureState::from_terms(shape, terms).expect("distinct kets")
}

pub const DEFAULT_PHASE_CAP: u128 = 1 << 20;

/// Search phase vectors over the given roots of unity (order 2 means signs),
/// first phase fixed to zero, for one that makes the array's state
/// k-uniform. Vectors are tried in counting order with the last row's phase
/// moving fastest, so the all-zero vector comes first.
pub fn phase_repair(
    a: &MixedArray,
    k: usize,
    root_order: u32,
    cap: u128,
) -> Result<Option<Vec<f64>>> {
    if root_order < 1 {
        return Err(Error::ValidationFailed(
            "root order must be positive".into(),
        ));
    }
    if !crate::moa::verify_strength(a, k)?.ok {
        return Err(Error::ValidationFailed(format!(
            "phase repair needs strength {k}; uniform diagonals come from it"
        )));
    }
    let r = a.rows();
    let space = (root_order as u128)
        .checked_pow(r as u32 - 1)
        .ok_or(Error::SearchSpaceCap {
            requested: u128::MAX,
            cap,
        })?;
    if space > cap {
        return Err(Error::SearchSpaceCap {
            requested: space,
            cap,
        });
    }
    let step = 2.0 * std::f64::consts::PI / root_order as f64;
    for idx in 0..space {
        let mut phases = vec![0.0f64; r];
        let mut rem = idx;
        for i in (1..r).rev() {
            phases[i] = (rem % root_order as u128) as f64 * step;
            rem /= root_order as u128;
        }
        let psi = state_from_array(a, Some(&phases))?;
        if verify_k_uniform(&psi, k, DEFAULT_TOLERANCE)?.ok {
            return Ok(Some(phases));
        }
    }
    Ok(None)
}

/// State text format: line 1 the part count, line 2 the dimensions, then one
/// term per line as `i_1 ... i_N re im`.
pub fn format_state(psi: &PureState) -> String {
    use crate::fmt::sig12;
    let mut out = format!("{}\n", psi.shape.len());
    let dims: Vec<String> = psi.shape.parts().iter().map(|d| d.to_string()).collect();
    out.push_str(&dims.join(" "));
    out.push('\n');
    for (ket, amp) in &psi.terms {
        let syms: Vec<String> = ket.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!(
            "{} {} {}\n",
            syms.join(" "),
            sig12(amp.re),
            sig12(amp.im)
        ));
    }
    out
}

pub fn save_state(psi: &PureState, path: &Path) -> Result<()> {
    std::fs::write(path, format_state(psi))?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<PureState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty state file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad part count".into()))?;
    let dims: Vec<u32> = lines
        .next()
        .ok_or_else(|| Error::Parse("missing dimension line".into()))?
        .split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad dimension '{t}'")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != n {
        return Err(Error::Parse(
            "dimension count differs from part count".into(),
        ));
    }
    let shape = SystemShape::new(dims)?;
    let mut terms = Vec::new();
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != n + 2 {
            return Err(Error::Parse(format!("term line needs {} fields", n + 2)));
        }
        let ket: Vec<u32> = tok[..n]
            .iter()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad symbol '{t}'")))
            })
            .collect::<Result<_>>()?;
        let re: f64 = tok[n]
            .parse()
            .map_err(|_| Error::Parse("bad amplitude".into()))?;
        let im: f64 = tok[n + 1]
            .parse()
            .map_err(|_| Error::Parse("bad amplitude".into()))?;
        terms.push((ket, Complex64::new(re, im)));
    }
    PureState::from_terms(shape, terms)
}
