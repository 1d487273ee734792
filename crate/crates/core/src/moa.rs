//! Mixed orthogonal arrays: the data model, strength and irredundancy
//! verifiers, column removal and the endurance computation.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::subsets::{find_first_map, find_first_map_seq, k_subsets, k_subsets_of};

/// An r x N integer matrix with per-column alphabet sizes. Columns are kept
/// in canonical order: sorted by decreasing alphabet size, stable within ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedArray {
    r: usize,
    n: usize,
    alphabets: Vec<u32>,
    cells: Vec<Vec<u32>>,
}

/// Why a strength check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrengthFailure {
    /// r is not divisible by the tuple-space size of this column subset.
    NonDivisible {
        columns: Vec<usize>,
        tuple_space: usize,
    },
    /// Some tuple appears the wrong number of times.
    Unbalanced {
        columns: Vec<usize>,
        tuple: Vec<u32>,
        count: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrengthReport {
    pub ok: bool,
    pub failure: Option<StrengthFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrredundancyReport {
    pub ok: bool,
    /// First column subset with a repeated projected row, and the two rows.
    pub failure: Option<(Vec<usize>, usize, usize)>,
}

/// Endurance of k-uniformity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnduranceReport {
    pub k: usize,
    /// Maximal number of largest-alphabet columns removable while keeping
    /// strength k and irredundancy at k (existence semantics).
    pub mu: usize,
    /// Lexicographically first maximal removable subset.
    pub witness: Vec<usize>,
    /// All removable subsets of size mu, when requested.
    pub all_witnesses: Option<Vec<Vec<usize>>>,
    /// Largest t such that *every* t-subset of largest-alphabet columns is
    /// removable, when requested (the stricter for-all reading).
    pub mu_forall: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnduranceOptions {
    pub collect_all_witnesses: bool,
    pub forall: bool,
}

impl MixedArray {
    /// Build an array from rows and per-column alphabet sizes. Columns are
    /// re-sorted into the canonical decreasing-alphabet order.
    pub fn new(cells: Vec<Vec<u32>>, alphabets: Vec<u32>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::ShapeMismatch("array needs at least one row".into()));
        }
        let n = alphabets.len();
        if n == 0 {
            return Err(Error::ShapeMismatch(
                "array needs at least one column".into(),
            ));
        }
        if cells.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        if alphabets.iter().any(|&c| c < 2) {
            return Err(Error::ShapeMismatch(
                "alphabet sizes must be at least 2".into(),
            ));
        }
        let order = canonical_column_order(&alphabets);
        let cells = cells
            .into_iter()
            .map(|row| {
                let sorted: Vec<u32> = order.iter().map(|&j| row[j]).collect();
                sorted
            })
            .collect::<Vec<_>>();
        let alphabets: Vec<u32> = order.iter().map(|&j| alphabets[j]).collect();
        for row in &cells {
            for (j, &v) in row.iter().enumerate() {
                if v >= alphabets[j] {
                    return Err(Error::ValidationFailed(format!(
                        "cell value {v} out of range for alphabet {}",
                        alphabets[j]
                    )));
                }
            }
        }
        Ok(MixedArray {
            r: cells.len(),
            n,
            alphabets,
            cells,
        })
    }

    pub fn rows(&self) -> usize {
        self.r
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn alphabets(&self) -> &[u32] {
        &self.alphabets
    }

    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    /// The (d_i, n_i) grouping recoverable from the sorted alphabets.
    pub fn grouping(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &c in &self.alphabets {
            match out.last_mut() {
                Some((d, n)) if *d == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }
}

impl fmt::Display for MixedArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_array(self))
    }
}

/// Stable permutation putting columns in decreasing-alphabet order.
pub(crate) fn canonical_column_order(alphabets: &[u32]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..alphabets.len()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(alphabets[j]));
    order
}

/// Strength-k check: every k-column subarray holds every symbol tuple
/// equally often. Parallelizes over column subsets; the reported failure is
/// the lexicographically first.
pub fn verify_strength(a: &MixedArray, k: usize) -> Result<StrengthReport> {
    strength_impl(a, k, false)
}

pub fn verify_strength_seq(a: &MixedArray, k: usize) -> Result<StrengthReport> {
    strength_impl(a, k, true)
}

fn strength_impl(a: &MixedArray, k: usize, sequential: bool) -> Result<StrengthReport> {
    if k < 1 || k > a.n {
        return Err(Error::KOutOfRange { k, n: a.n });
    }
    let subsets = k_subsets(a.n, k);
    let check = |cols: &Vec<usize>| check_subset_strength(a, cols);
    let failure = if sequential {
        find_first_map_seq(&subsets, check)
    } else {
        find_first_map(&subsets, check)
    };
    Ok(StrengthReport {
        ok: failure.is_none(),
        failure,
    })
}

fn check_subset_strength(a: &MixedArray, cols: &[usize]) -> Option<StrengthFailure> {
    let tuple_space: usize = cols.iter().map(|&j| a.alphabets[j] as usize).product();
    if a.r % tuple_space != 0 {
        return Some(StrengthFailure::NonDivisible {
            columns: cols.to_vec(),
            tuple_space,
        });
    }
    let expected = a.r / tuple_space;
    let mut counts = vec![0usize; tuple_space];
    for row in &a.cells {
        let mut idx = 0usize;
        for &j in cols {
            idx = idx * a.alphabets[j] as usize + row[j] as usize;
        }
        counts[idx] += 1;
    }
    counts.iter().position(|&c| c != expected).map(|idx| {
        // decode the offending tuple from its mixed-radix index
        let mut tuple = vec![0u32; cols.len()];
        let mut rem = idx;
        for (slot, &j) in cols.iter().enumerate().rev() {
            let base = a.alphabets[j] as usize;
            tuple[slot] = (rem % base) as u32;
            rem /= base;
        }
        StrengthFailure::Unbalanced {
            columns: cols.to_vec(),
            tuple,
            count: counts[idx],
            expected,
        }
    })
}

/// Irredundancy at k: every (N-k)-column projection has pairwise distinct rows.
pub fn verify_irredundant(a: &MixedArray, k: usize) -> Result<IrredundancyReport> {
    irredundant_impl(a, k, false)
}

pub fn verify_irredundant_seq(a: &MixedArray, k: usize) -> Result<IrredundancyReport> {
    irredundant_impl(a, k, true)
}

fn irredundant_impl(a: &MixedArray, k: usize, sequential: bool) -> Result<IrredundancyReport> {
    if k < 1 || k >= a.n {
        return Err(Error::KOutOfRange { k, n: a.n });
    }
    let subsets = k_subsets(a.n, a.n - k);
    let check = |cols: &Vec<usize>| -> Option<(Vec<usize>, usize, usize)> {
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::with_capacity(a.r);
        for (i, row) in a.cells.iter().enumerate() {
            let proj: Vec<u32> = cols.iter().map(|&j| row[j]).collect();
            if let Some(&first) = seen.get(&proj) {
                return Some((cols.clone(), first, i));
            }
            seen.insert(proj, i);
        }
        None
    };
    let failure = if sequential {
        find_first_map_seq(&subsets, check)
    } else {
        find_first_map(&subsets, check)
    };
    Ok(IrredundancyReport {
        ok: failure.is_none(),
        failure,
    })
}

/// Project away the given columns (0-based), re-sorting the remainder into
/// canonical order.
pub fn remove_columns(a: &MixedArray, idxs: &[usize]) -> Result<MixedArray> {
    for &j in idxs {
        if j >= a.n {
            return Err(Error::IndexOutOfRange { index: j, n: a.n });
        }
    }
    let keep: Vec<usize> = (0..a.n).filter(|j| !idxs.contains(j)).collect();
    if keep.is_empty() {
        return Err(Error::ShapeMismatch("cannot remove every column".into()));
    }
    let cells = a
        .cells
        .iter()
        .map(|row| keep.iter().map(|&j| row[j]).collect())
        .collect();
    let alphabets = keep.iter().map(|&j| a.alphabets[j]).collect();
    MixedArray::new(cells, alphabets)
}

/// Endurance of k-uniformity: the maximal number of d_1-alphabet columns
/// removable so the remainder still passes both verifiers at strength k.
///
/// Subsets are enumerated by increasing size; a size with no removable subset
/// ends the search (removability is monotone downward: strength never breaks
/// under column deletion and any sub-removal of an irredundancy-preserving
/// removal preserves irredundancy). The witness is the lexicographically
/// first subset at the maximal size.
pub fn endurance(a: &MixedArray, k: usize) -> Result<EnduranceReport> {
    endurance_with(a, k, EnduranceOptions::default())
}

pub fn endurance_with(a: &MixedArray, k: usize, opts: EnduranceOptions) -> Result<EnduranceReport> {
    if !verify_strength(a, k)?.ok {
        return Err(Error::NotIrredundantInput(format!("strength {k} fails")));
    }
    if !verify_irredundant(a, k)?.ok {
        return Err(Error::NotIrredundantInput(format!(
            "irredundancy at {k} fails"
        )));
    }
    let d1 = *a.alphabets.iter().max().expect("nonempty");
    let big_cols: Vec<usize> = (0..a.n).filter(|&j| a.alphabets[j] == d1).collect();

    // the per-subset checks use the sequential verifiers: endurance itself
    // parallelizes over same-size subsets
    let removable = |subset: &Vec<usize>| -> bool {
        let sub = remove_columns(a, subset).expect("indices in range");
        verify_strength_seq(&sub, k).map(|r| r.ok).unwrap_or(false)
            && verify_irredundant_seq(&sub, k)
                .map(|r| r.ok)
                .unwrap_or(false)
    };

    let mut mu = 0;
    let mut witness: Vec<usize> = Vec::new();
    let mut level_witnesses: Vec<Vec<usize>> = Vec::new();
    let mut mu_forall = 0;
    let mut forall_alive = true;
    let mut t = 1;
    loop {
        // irredundancy needs at least k+1 remaining columns
        if t > big_cols.len() || a.n - t < k + 1 {
            break;
        }
        let subsets = k_subsets_of(&big_cols, t);
        let hits: Vec<Vec<usize>> = crate::subsets::filter_ordered(&subsets, removable);
        if hits.is_empty() {
            break;
        }
        mu = t;
        witness = hits[0].clone();
        if opts.collect_all_witnesses {
            level_witnesses = hits.clone();
        }
        if opts.forall && forall_alive {
            if hits.len() == subsets.len() {
                mu_forall = t;
            } else {
                forall_alive = false;
            }
        }
        t += 1;
    }
    Ok(EnduranceReport {
        k,
        mu,
        witness,
        all_witnesses: opts.collect_all_witnesses.then_some(level_witnesses),
        mu_forall: opts.forall.then_some(mu_forall),
    })
}

/// Array text format: line 1 `r N`, line 2 the alphabet sizes, then rows.
pub fn format_array(a: &MixedArray) -> String {
    let mut out = format!("{} {}\n", a.r, a.n);
    let alpha: Vec<String> = a.alphabets.iter().map(|c| c.to_string()).collect();
    out.push_str(&alpha.join(" "));
    out.push('\n');
    for row in &a.cells {
        let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn save_array(a: &MixedArray, path: &Path) -> Result<()> {
    std::fs::write(path, format_array(a))?;
    Ok(())
}

pub fn load_array(path: &Path) -> Result<MixedArray> {
    parse_array(&std::fs::read_to_string(path)?)
}

pub fn parse_array(text: &str) -> Result<MixedArray> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty array file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let r: usize = head[0]
        .parse()
        .map_err(|_| Error::Parse("bad row count".into()))?;
    let n: usize = head[1]
        .parse()
        .map_err(|_| Error::Parse("bad column count".into()))?;
    let parse_line = |line: &str, what: &str| -> Result<Vec<u32>> {
        line.split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad {what} '{t}'")))
            })
            .collect()
    };
    let alphabets = parse_line(
        lines
            .next()
            .ok_or_else(|| Error::Parse("missing alphabet line".into()))?,
        "alphabet",
    )?;
    if alphabets.len() != n {
        return Err(Error::Parse(
            "alphabet count differs from column count".into(),
        ));
    }
    let mut cells = Vec::with_capacity(r);
    for _ in 0..r {
        let row = parse_line(
            lines
                .next()
                .ok_or_else(|| Error::Parse("missing rows".into()))?,
            "cell",
        )?;
        if row.len() != n {
            return Err(Error::Parse("row length differs from column count".into()));
        }
        cells.push(row);
    }
    MixedArray::new(cells, alphabets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn irmoa_6_3421() -> MixedArray {
        let rows = vec![
            vec![0, 0, 0, 0, 0],
            vec![0, 1, 2, 1, 1],
            vec![1, 1, 1, 2, 0],
            vec![1, 2, 0, 0, 1],
            vec![2, 2, 2, 1, 0],
            vec![2, 0, 1, 2, 1],
        ];
        MixedArray::new(rows, vec![3, 3, 3, 3, 2]).unwrap()
    }

    fn iroa_9_34() -> MixedArray {
        // the 9 rows of the strength-2 reference array
        let rows = vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 2, 1],
            vec![0, 2, 1, 2],
            vec![1, 1, 1, 0],
            vec![1, 2, 0, 1],
            vec![1, 0, 2, 2],
            vec![2, 2, 2, 0],
            vec![2, 0, 1, 1],
            vec![2, 1, 0, 2],
        ];
        MixedArray::new(rows, vec![3, 3, 3, 3]).unwrap()
    }

    #[test]
    fn canonical_order_is_stable_decreasing() {
        let a = MixedArray::new(vec![vec![0, 1, 0], vec![1, 0, 2]], vec![2, 2, 3]).unwrap();
        assert_eq!(a.alphabets(), &[3, 2, 2]);
        assert_eq!(a.cells(), &[vec![0, 0, 1], vec![2, 1, 0]]);
        assert_eq!(a.grouping(), vec![(3, 1), (2, 2)]);
    }

    #[test]
    fn strength_examples() {
        assert!(verify_strength(&irmoa_6_3421(), 1).unwrap().ok);
        assert!(verify_strength(&iroa_9_34(), 2).unwrap().ok);
        let rep = verify_strength(&irmoa_6_3421(), 2).unwrap();
        assert!(!rep.ok);
        match rep.failure.unwrap() {
            StrengthFailure::NonDivisible {
                columns,
                tuple_space,
            } => {
                assert_eq!(columns, vec![0, 1]);
                assert_eq!(tuple_space, 9);
            }
            other => panic!("unexpected failure {other:?}"),
        }
        assert_eq!(
            verify_strength_seq(&irmoa_6_3421(), 2).unwrap(),
            verify_strength(&irmoa_6_3421(), 2).unwrap()
        );
        assert!(matches!(
            verify_strength(&irmoa_6_3421(), 0),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn irredundancy_examples() {
        let bell = MixedArray::new(vec![vec![0, 0], vec![1, 1]], vec![2, 2]).unwrap();
        assert!(verify_irredundant(&bell, 1).unwrap().ok);
        let eq9 = MixedArray::new(
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1]],
            vec![2, 2, 2],
        )
        .unwrap();
        assert!(verify_irredundant(&eq9, 1).unwrap().ok);
        let dup = MixedArray::new(vec![vec![0, 0], vec![0, 0]], vec![2, 2]).unwrap();
        let rep = verify_irredundant(&dup, 1).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.failure.unwrap().1, 0);
        assert!(matches!(
            verify_irredundant_seq(&eq9, 3),
            Err(Error::KOutOfRange { k: 3, n: 3 })
        ));
    }

    #[test]
    fn remove_columns_examples() {
        // removing the 2nd and 3rd columns leaves the phi_{3^2 2^1} kets
        let a = remove_columns(&irmoa_6_3421(), &[1, 2]).unwrap();
        assert_eq!(a.alphabets(), &[3, 3, 2]);
        assert_eq!(
            a.cells(),
            &[
                vec![0, 0, 0],
                vec![0, 1, 1],
                vec![1, 2, 0],
                vec![1, 0, 1],
                vec![2, 1, 0],
                vec![2, 2, 1]
            ]
        );
        let bell = MixedArray::new(vec![vec![0, 0], vec![1, 1]], vec![2, 2]).unwrap();
        let single = remove_columns(&bell, &[0]).unwrap();
        assert_eq!(single.cells(), &[vec![0], vec![1]]);
        let same = remove_columns(&irmoa_6_3421(), &[]).unwrap();
        assert_eq!(same, irmoa_6_3421());
        assert!(matches!(
            remove_columns(&bell, &[5]),
            Err(Error::IndexOutOfRange { index: 5, n: 2 })
        ));
    }

    #[test]
    fn endurance_of_ghz_arrays() {
        for n in [3usize, 4, 5] {
            let a = MixedArray::new(vec![vec![0; n], vec![1; n]], vec![2; n]).unwrap();
            let rep = endurance(&a, 1).unwrap();
            assert_eq!(rep.mu, n - 2, "GHZ array on {n} columns");
        }
    }

    #[test]
    fn endurance_of_eq10_is_two() {
        let rep = endurance(&irmoa_6_3421(), 1).unwrap();
        assert_eq!(rep.mu, 2);
        assert_eq!(rep.witness, vec![0, 2]);
        let full = endurance_with(
            &irmoa_6_3421(),
            1,
            EnduranceOptions {
                collect_all_witnesses: true,
                forall: true,
            },
        )
        .unwrap();
        assert_eq!(full.mu, 2);
        // not every pair works: the for-all reading stops at 1
        assert_eq!(full.mu_forall, Some(1));
        let all = full.all_witnesses.unwrap();
        assert!(all.contains(&vec![0, 2]));
        assert!(!all.contains(&vec![0, 1]));
    }

    #[test]
    fn endurance_rejects_bad_input() {
        let dup = MixedArray::new(vec![vec![0, 0, 0], vec![0, 0, 1]], vec![2, 2, 2]).unwrap();
        assert!(matches!(
            endurance(&dup, 1),
            Err(Error::NotIrredundantInput(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let a = irmoa_6_3421();
        let back = parse_array(&format_array(&a)).unwrap();
        assert_eq!(back, a);
        assert!(matches!(parse_array("oops"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_array("2 2\n2 2\n0 0\n0 3\n"),
            Err(Error::ValidationFailed(_))
        ));
    }

    #[test]
    fn strength_downward_closure_on_eq13() {
        for k in 1..=2 {
            assert!(verify_strength(&iroa_9_34(), k).unwrap().ok);
        }
        assert!(verify_irredundant(&iroa_9_34(), 2).unwrap().ok);
        assert!(verify_irredundant(&iroa_9_34(), 1).unwrap().ok);
    }
}
