//! Difference schemes D(s,N,d): representation, verification, the canonical
//! generators (two-row, multiplication-table, tensored Fourier), backtracking
//! search and the text catalog format.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gfield::{factor_prime_power, is_prime, make_field, Field, GfElem};
use crate::subsets::{find_first_map, find_first_map_seq, k_subsets};

/// Where a scheme came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Builtin,
    Fourier,
    MultTable,
    Searched,
    Loaded,
}

/// An s x N matrix over GF(d) whose pairwise row differences are balanced:
/// every difference vector contains each of the d symbols exactly N/d times.
#[derive(Debug, Clone)]
pub struct DifferenceScheme {
    s: usize,
    n: usize,
    d: u32,
    cells: Vec<Vec<GfElem>>,
    field: Field,
    provenance: Provenance,
}

/// Outcome of a balance check; `violation` names the first offending row pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeReport {
    pub ok: bool,
    pub violation: Option<(usize, usize)>,
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000_000;
pub const DEFAULT_FOURIER_CAP: u32 = 256;

impl DifferenceScheme {
    /// Wrap raw cells, checking shape, labels and the balance property.
    pub fn new(cells: Vec<Vec<GfElem>>, d: u32, provenance: Provenance) -> Result<Self> {
        let field = make_field(d)?;
        Self::with_field(cells, field, provenance)
    }

    fn with_field(cells: Vec<Vec<GfElem>>, field: Field, provenance: Provenance) -> Result<Self> {
        let s = cells.len();
        if s < 2 {
            return Err(Error::ShapeMismatch("scheme needs at least 2 rows".into()));
        }
        let n = cells[0].len();
        if n == 0 {
            return Err(Error::ShapeMismatch(
                "scheme needs at least 1 column".into(),
            ));
        }
        if cells.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let d = field.order();
        for row in &cells {
            for &c in row {
                field.check(c)?;
            }
        }
        if n % d as usize != 0 {
            return Err(Error::DivisibilityViolation { d, n });
        }
        let scheme = DifferenceScheme {
            s,
            n,
            d,
            cells,
            field,
            provenance,
        };
        let report = verify_difference_scheme(&scheme)?;
        if !report.ok {
            let (u, v) = report.violation.unwrap();
            return Err(Error::ValidationFailed(format!(
                "rows {u} and {v} have an unbalanced difference"
            )));
        }
        Ok(scheme)
    }

    pub fn rows(&self) -> usize {
        self.s
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn symbols(&self) -> u32 {
        self.d
    }

    pub fn cells(&self) -> &[Vec<GfElem>] {
        &self.cells
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

impl fmt::Display for DifferenceScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scheme(self))
    }
}

/// Check the pairwise balance property. Parallelizes over row pairs; the
/// reported violation is always the lexicographically first pair.
pub fn verify_difference_scheme(ds: &DifferenceScheme) -> Result<SchemeReport> {
    verify_scheme_cells(&ds.field, &ds.cells, ds.n, false)
}

/// Sequential variant of [`verify_difference_scheme`].
pub fn verify_difference_scheme_seq(ds: &DifferenceScheme) -> Result<SchemeReport> {
    verify_scheme_cells(&ds.field, &ds.cells, ds.n, true)
}

fn verify_scheme_cells(
    field: &Field,
    cells: &[Vec<GfElem>],
    n: usize,
    sequential: bool,
) -> Result<SchemeReport> {
    let d = field.order();
    let lambda = n / d as usize;
    let pairs = k_subsets(cells.len(), 2);
    let check = |pair: &Vec<usize>| -> Option<(usize, usize)> {
        let (u, v) = (pair[0], pair[1]);
        let mut counts = vec![0usize; d as usize];
        for j in 0..n {
            counts[field.sub_unchecked(cells[u][j], cells[v][j]) as usize] += 1;
        }
        if counts.iter().any(|&c| c != lambda) {
            Some((u, v))
        } else {
            None
        }
    };
    let violation = if sequential {
        find_first_map_seq(&pairs, check)
    } else {
        find_first_map(&pairs, check)
    };
    Ok(SchemeReport {
        ok: violation.is_none(),
        violation,
    })
}

/// D(2,N,N) = {0,0,...,0; 0,1,...,N-1}. N must be a prime power so the
/// balance test is taken in GF(N); other N are rejected.
pub fn canonical_two_row_scheme(n: u32) -> Result<DifferenceScheme> {
    let field = make_field(n)?;
    let cells = vec![vec![0; n as usize], (0..n).collect()];
    DifferenceScheme::with_field(cells, field, Provenance::Builtin)
}

/// The multiplication table of GF(q): cells[j][k] = j * k, a valid D(q,q,q).
pub fn mult_table_scheme(q: u32) -> Result<DifferenceScheme> {
    let field = make_field(q)?;
    let cells = (0..q)
        .map(|j| (0..q).map(|k| field.mul_unchecked(j, k)).collect())
        .collect();
    DifferenceScheme::with_field(cells, field, Provenance::MultTable)
}

/// D(p^m, p^m, p) from the exponents of a tensor power of Fourier matrices:
/// cells[j][k] = sum_i j_i * k_i mod p over base-p digits.
pub fn tensor_fourier_scheme(p: u32, m: u32) -> Result<DifferenceScheme> {
    if !is_prime(p) {
        return Err(Error::NotPrimePower(p));
    }
    let size = p
        .checked_pow(m)
        .filter(|&s| s <= DEFAULT_FOURIER_CAP)
        .ok_or(Error::CapExceeded {
            requested: (p as u64).pow(m),
            cap: DEFAULT_FOURIER_CAP as u64,
        })?;
    let field = make_field(p)?;
    let digits = |mut x: u32| -> Vec<u32> {
        (0..m)
            .map(|_| {
                let r = x % p;
                x /= p;
                r
            })
            .collect()
    };
    let cells = (0..size)
        .map(|j| {
            let dj = digits(j);
            (0..size)
                .map(|k| {
                    let dk = digits(k);
                    dj.iter().zip(&dk).map(|(a, b)| a * b % p).sum::<u32>() % p
                })
                .collect()
        })
        .collect();
    DifferenceScheme::with_field(cells, field, Provenance::Fourier)
}

/// The catalog D(6,6,3) behind the 18-row reference construction (its rows
/// generate the reference 2-uniform state of seven qutrits and a qubit).
pub fn builtin_d663() -> DifferenceScheme {
    let cells = vec![
        vec![0, 0, 0, 0, 0, 0],
        vec![0, 0, 1, 1, 2, 2],
        vec![0, 1, 0, 2, 2, 1],
        vec![0, 1, 2, 0, 1, 2],
        vec![0, 2, 1, 2, 1, 0],
        vec![0, 2, 2, 1, 0, 1],
    ];
    DifferenceScheme::new(cells, 3, Provenance::Builtin).expect("builtin scheme is valid")
}

/// Look up a named builtin scheme by its D(s,N,d) signature.
pub fn builtin_scheme(s: usize, n: usize, d: u32) -> Result<DifferenceScheme> {
    if (s, n, d) == (6, 6, 3) {
        return Ok(builtin_d663());
    }
    if s == 2 && n == d as usize {
        return canonical_two_row_scheme(d);
    }
    if s == n && n == d as usize {
        return mult_table_scheme(d);
    }
    if s == n && is_prime(d) {
        // s = p^m with symbol count p
        let (p, m) = factor_prime_power(s as u32)?;
        if p == d {
            return tensor_fourier_scheme(p, m);
        }
    }
    Err(Error::Parse(format!("no builtin scheme D({s},{n},{d})")))
}

/// Deterministic depth-first search for a D(s,N,d), cells in row-major order.
///
/// Symmetry breaking: row 0 is all zeros, column 0 is all zeros and rows are
/// lexicographically increasing, so the first scheme found is the lex-least
/// canonical representative. Partial difference counts exceeding N/d prune.
/// `budget` caps the number of cell assignments tried.
pub fn search_scheme(s: usize, n: usize, d: u32, budget: u64) -> Result<DifferenceScheme> {
    let field = make_field(d)?;
    if n == 0 || n % d as usize != 0 {
        return Err(Error::DivisibilityViolation { d, n });
    }
    if s < 2 {
        return Err(Error::ShapeMismatch("scheme needs at least 2 rows".into()));
    }
    let lambda = n / d as usize;
    let mut cells = vec![vec![0u32; n]; s];
    let mut nodes: u64 = 0;

    struct Dfs<'a> {
        field: &'a Field,
        s: usize,
        n: usize,
        d: u32,
        lambda: usize,
        budget: u64,
    }

    impl Dfs<'_> {
        /// Counts are per-row scratch: counts[u][sym] tracks the partial
        /// difference of the row under construction against row u, seeded
        /// with the column-0 zeros. Each row depth owns its own matrix so
        /// backtracking across rows needs no restore.
        fn start_row(
            &self,
            cells: &mut Vec<Vec<u32>>,
            row: usize,
            nodes: &mut u64,
        ) -> Result<bool> {
            if row == self.s {
                return Ok(true);
            }
            let mut counts = vec![vec![0usize; self.d as usize]; row];
            for c in counts.iter_mut() {
                c[0] = 1;
            }
            self.fill(cells, &mut counts, row, 1, true, nodes)
        }

        fn fill(
            &self,
            cells: &mut Vec<Vec<u32>>,
            counts: &mut [Vec<usize>],
            row: usize,
            col: usize,
            tied: bool,
            nodes: &mut u64,
        ) -> Result<bool> {
            if col == self.n {
                // every pair count reached exactly N/d: the row is in
                return self.start_row(cells, row + 1, nodes);
            }
            let lo = if tied { cells[row - 1][col] } else { 0 };
            for v in lo..self.d {
                *nodes += 1;
                if *nodes > self.budget {
                    return Err(Error::NotFoundWithinBudget { nodes: self.budget });
                }
                let mut ok = true;
                let mut touched = 0;
                for u in 0..row {
                    let sym = self.field.sub_unchecked(v, cells[u][col]) as usize;
                    counts[u][sym] += 1;
                    touched = u + 1;
                    if counts[u][sym] > self.lambda {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    cells[row][col] = v;
                    // a row equal to its predecessor has an all-zero
                    // difference, which the zero-symbol count prunes
                    let next_tied = tied && v == cells[row - 1][col];
                    if self.fill(cells, counts, row, col + 1, next_tied, nodes)? {
                        return Ok(true);
                    }
                }
                for u in 0..touched {
                    let sym = self.field.sub_unchecked(v, cells[u][col]) as usize;
                    counts[u][sym] -= 1;
                }
            }
            Ok(false)
        }
    }

    let dfs = Dfs {
        field: &field,
        s,
        n,
        d,
        lambda,
        budget,
    };
    // row 0 is all zeros and every later row starts with 0 in column 0
    let found = dfs.start_row(&mut cells, 1, &mut nodes)?;
    if !found {
        return Err(Error::NotFoundWithinBudget { nodes });
    }
    let scheme = DifferenceScheme::with_field(cells, field, Provenance::Searched)?;
    Ok(scheme)
}

/// Write the text format: line 1 `s N d`, then one line of labels per row.
pub fn save_scheme(ds: &DifferenceScheme, path: &Path) -> Result<()> {
    std::fs::write(path, format_scheme(ds))?;
    Ok(())
}

pub fn format_scheme(ds: &DifferenceScheme) -> String {
    let mut out = format!("{} {} {}\n", ds.s, ds.n, ds.d);
    for row in &ds.cells {
        let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parse and validate the text format; records provenance `Loaded`.
pub fn load_scheme(path: &Path) -> Result<DifferenceScheme> {
    let text = std::fs::read_to_string(path)?;
    parse_scheme(&text)
}

pub fn parse_scheme(text: &str) -> Result<DifferenceScheme> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty scheme file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let s: usize = head[0]
        .parse()
        .map_err(|_| Error::Parse("bad row count".into()))?;
    let n: usize = head[1]
        .parse()
        .map_err(|_| Error::Parse("bad column count".into()))?;
    let d: u32 = head[2]
        .parse()
        .map_err(|_| Error::Parse("bad symbol count".into()))?;
    let mut cells = Vec::with_capacity(s);
    for _ in 0..s {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing rows".into()))?;
        let row: Vec<u32> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad label '{t}'")))
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} labels, got {}",
                row.len()
            )));
        }
        if let Some(&label) = row.iter().find(|&&c| c >= d) {
            return Err(Error::Parse(format!(
                "label {label} out of range for d={d}"
            )));
        }
        cells.push(row);
    }
    DifferenceScheme::new(cells, d, Provenance::Loaded)
}

/// Catalog file name for D(s,N,d) inside a catalog directory.
pub fn catalog_path(dir: &Path, s: usize, n: usize, d: u32) -> std::path::PathBuf {
    dir.join(format!("D_{s}_{n}_{d}.txt"))
}

/// Load D(s,N,d) from the catalog, or search for it and persist the result.
pub fn find_or_search(
    dir: &Path,
    s: usize,
    n: usize,
    d: u32,
    budget: u64,
) -> Result<DifferenceScheme> {
    let path = catalog_path(dir, s, n, d);
    if path.exists() {
        return load_scheme(&path);
    }
    let scheme = search_scheme(s, n, d, budget)?;
    std::fs::create_dir_all(dir)?;
    save_scheme(&scheme, &path)?;
    Ok(scheme)
}
