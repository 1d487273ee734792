//! Constructions turning difference schemes into irredundant mixed
//! orthogonal arrays: stack the d field-shifted copies of the scheme, then
//! append one congruence column per distinct prime factor of the row count.

use crate::designs::DifferenceScheme;
use crate::error::{Error, Result};
use crate::moa::MixedArray;

/// Distinct prime factors of n, increasing.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Stack D+g for every field element g in label order 0..d-1. "Increase by g"
/// is field addition, which is what keeps strength 2 alive for prime-power d.
pub fn juxtapose(ds: &DifferenceScheme) -> Result<MixedArray> {
    let d = ds.symbols();
    let field = ds.field();
    let mut rows = Vec::with_capacity(d as usize * ds.rows());
    for g in 0..d {
        for row in ds.cells() {
            rows.push(row.iter().map(|&c| field.add_unchecked(c, g)).collect());
        }
    }
    MixedArray::new(rows, vec![d; ds.cols()])
}

/// Congruence columns: entry j of the column for prime p is j mod p, with
/// the row index j running 0..rows-1. The reference arrays fix zero-based
/// indexing even though the recipe is usually quoted one-based.
pub fn congruence_columns(rows: usize, primes: &[u32]) -> Result<Vec<Vec<u32>>> {
    for &p in primes {
        if !crate::gfield::is_prime(p) {
            return Err(Error::NonPrimeFactor(p));
        }
    }
    if primes.len()
        != primes
            .iter()
            .collect::<std::collections::HashSet<_>>()
            .len()
    {
        return Err(Error::ValidationFailed(
            "congruence primes must be distinct".into(),
        ));
    }
    Ok(primes
        .iter()
        .map(|&p| (0..rows as u32).map(|j| j % p).collect())
        .collect())
}

fn assemble(ds: &DifferenceScheme) -> Result<MixedArray> {
    let body = juxtapose(ds)?;
    let r = body.rows();
    // larger primes first so the stable canonical sort interleaves a
    // d-alphabet congruence column right after the scheme block
    let mut primes: Vec<u32> = prime_factors(r as u64).iter().map(|&p| p as u32).collect();
    primes.sort_unstable_by(|a, b| b.cmp(a));
    let cols = congruence_columns(r, &primes)?;
    let mut rows: Vec<Vec<u32>> = body.cells().to_vec();
    for (i, row) in rows.iter_mut().enumerate() {
        for col in &cols {
            row.push(col[i]);
        }
    }
    let mut alphabets = body.alphabets().to_vec();
    alphabets.extend(primes.iter().copied());
    MixedArray::new(rows, alphabets)
}

/// Construction 1: any difference scheme D(s,N,d) yields an irredundant
/// mixed array of strength 1 on ds rows.
pub fn construction1(ds: &DifferenceScheme) -> Result<MixedArray> {
    assemble(ds)
}

/// Construction 2: a square scheme D(N,N,d) with N > 2 and d a prime power
/// yields an irredundant mixed array of strength 2. The assembly is the same
/// as Construction 1; the strength comes from the scheme's shape.
pub fn construction2(ds: &DifferenceScheme) -> Result<MixedArray> {
    if ds.rows() != ds.cols() {
        return Err(Error::ShapeNotSquare {
            s: ds.rows(),
            n: ds.cols(),
        });
    }
    if ds.cols() == 2 {
        return Err(Error::NEquals2Rejected);
    }
    assemble(ds)
}
