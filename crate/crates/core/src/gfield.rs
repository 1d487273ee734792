//! Exact arithmetic in GF(q) for prime and prime-power q.
//!
//! Elements are canonical integer labels in `0..q` encoding the polynomial
//! a_0 + a_1 X + ... with base-p digits, a_0 least significant. Label 0 is the
//! additive identity and label 1 the multiplicative one, so for GF(4) the
//! labels 0, 1, 2, 3 stand for 0, 1, X, 1+X.
//!
//! Fields of order up to 32 carry a built-in irreducible modulus; larger
//! extension fields need an explicit modulus via [`Field::with_modulus`].

use crate::error::{Error, Result};

/// Canonical element label in `0..q`.
pub type GfElem = u32;

/// Default irreducible moduli, coefficient lists over GF(p), constant term
/// first, for every composite prime power up to 32. GF(4) uses X^2 + X + 1,
/// the unique degree-2 irreducible over GF(2).
const DEFAULT_MODULI: &[(u32, &[u32])] = &[
    (4, &[1, 1, 1]),
    (8, &[1, 1, 0, 1]),
    (9, &[1, 0, 1]),
    (16, &[1, 1, 0, 0, 1]),
    (25, &[2, 0, 1]),
    (27, &[1, 2, 0, 1]),
    (32, &[1, 0, 1, 0, 0, 1]),
];

const DEFAULT_ORDER_CAP: u32 = 32;

/// A finite field GF(q) = GF(p^m) with precomputed operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    q: u32,
    p: u32,
    m: u32,
    /// Irreducible modulus (degree m, monic), present only when m > 1.
    modulus: Option<Vec<u32>>,
    add: Vec<u32>,
    sub: Vec<u32>,
    mul: Vec<u32>,
}

impl Field {
    /// Build GF(q) with the built-in modulus table. Prime q gives plain
    /// modular arithmetic; prime powers up to 32 use the fixed moduli above.
    pub fn new(q: u32) -> Result<Self> {
        let (p, m) = factor_prime_power(q)?;
        if m == 1 {
            return Ok(Self::from_modulus_unchecked(q, p, 1, None));
        }
        if q > DEFAULT_ORDER_CAP {
            return Err(Error::UnsupportedOrder(q));
        }
        let coeffs = DEFAULT_MODULI
            .iter()
            .find(|(order, _)| *order == q)
            .map(|(_, c)| c.to_vec())
            .ok_or(Error::UnsupportedOrder(q))?;
        Self::with_modulus(p, m, &coeffs)
    }

    /// Build GF(p^m) from an explicit monic modulus (constant term first,
    /// length m+1). The modulus is checked irreducible by trial division
    /// against all monic polynomials of degree up to m/2.
    pub fn with_modulus(p: u32, m: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrimePower(p));
        }
        if modulus.len() != m as usize + 1 || modulus[m as usize] % p != 1 {
            return Err(Error::ShapeMismatch(format!(
                "modulus must be monic of degree {m}"
            )));
        }
        let modulus: Vec<u32> = modulus.iter().map(|&c| c % p).collect();
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus { p });
        }
        let q = p.checked_pow(m).ok_or(Error::UnsupportedOrder(p))?;
        Ok(Self::from_modulus_unchecked(q, p, m, Some(modulus)))
    }

    fn from_modulus_unchecked(q: u32, p: u32, m: u32, modulus: Option<Vec<u32>>) -> Self {
        let n = q as usize;
        let mut add = vec![0u32; n * n];
        let mut sub = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a in 0..q {
            for b in 0..q {
                let i = (a * q + b) as usize;
                match &modulus {
                    None => {
                        add[i] = (a + b) % q;
                        sub[i] = (a + q - b) % q;
                        mul[i] = (a as u64 * b as u64 % q as u64) as u32;
                    }
                    Some(md) => {
                        let pa = to_poly(a, p, m);
                        let pb = to_poly(b, p, m);
                        add[i] = from_poly(&poly_add(&pa, &pb, p), p);
                        sub[i] = from_poly(&poly_sub(&pa, &pb, p), p);
                        mul[i] = from_poly(&poly_mulmod(&pa, &pb, md, p), p);
                    }
                }
            }
        }
        Field {
            q,
            p,
            m,
            modulus,
            add,
            sub,
            mul,
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// The modulus coefficients (constant first), when this is an extension field.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn check(&self, a: GfElem) -> Result<GfElem> {
        if a < self.q {
            Ok(a)
        } else {
            Err(Error::LabelOutOfRange {
                label: a,
                q: self.q,
            })
        }
    }

    pub fn add(&self, a: GfElem, b: GfElem) -> Result<GfElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    /// a + (-b); equals `add` in characteristic 2.
    pub fn sub(&self, a: GfElem, b: GfElem) -> Result<GfElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub_unchecked(a, b))
    }

    pub fn mul(&self, a: GfElem, b: GfElem) -> Result<GfElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn add_unchecked(&self, a: GfElem, b: GfElem) -> GfElem {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub(crate) fn sub_unchecked(&self, a: GfElem, b: GfElem) -> GfElem {
        self.sub[(a * self.q + b) as usize]
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, a: GfElem, b: GfElem) -> GfElem {
        self.mul[(a * self.q + b) as usize]
    }
}

/// q = p^m with p prime, or NotPrimePower.
pub fn factor_prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let p = smallest_prime_factor(q);
    let mut m = 0;
    let mut t = q;
    while t > 1 {
        if t % p != 0 {
            return Err(Error::NotPrimePower(q));
        }
        t /= p;
        m += 1;
    }
    Ok((p, m))
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

fn smallest_prime_factor(n: u32) -> u32 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

// -- small polynomial arithmetic over GF(p), dense coefficient vectors --

fn to_poly(x: u32, p: u32, m: u32) -> Vec<u32> {
    let mut c = vec![0u32; m as usize];
    let mut x = x;
    for digit in c.iter_mut() {
        *digit = x % p;
        x /= p;
    }
    c
}

fn from_poly(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn poly_add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + p - y) % p).collect()
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // modulus is monic, so each leading coefficient reduces directly
    for d in (m..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            prod[d] = 0;
            for k in 0..m {
                let t = c * modulus[k] % p;
                prod[d - m + k] = (prod[d - m + k] + p - t) % p;
            }
        }
    }
    prod.truncate(m);
    prod
}

/// Remainder of a by b over GF(p); b need not be monic but must be nonzero.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let deg = |c: &[u32]| c.iter().rposition(|&x| x != 0);
    let db = deg(b).expect("divisor must be nonzero");
    let inv_lead = mod_inverse(b[db], p);
    let mut r = a.to_vec();
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let factor = r[dr] * inv_lead % p;
        for k in 0..=db {
            r[dr - db + k] = (r[dr - db + k] + factor * (p - b[k]) % p) % p;
        }
    }
    r
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is a small prime; brute force is fine
    (1..p).find(|&x| a * x % p == 1).expect("nonzero element")
}

/// Trial division against all monic polynomials of degree 1..=m/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = modulus.len() - 1;
    for d in 1..=m / 2 {
        let count = p.pow(d as u32);
        for tail in 0..count {
            let mut div = to_poly(tail, p, d as u32);
            div.push(1); // monic of degree d
            let rem = poly_rem(modulus, &div, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Construct the field for a given order, as used by scheme operations.
pub fn make_field(q: u32) -> Result<Field> {
    Field::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIME_POWERS_TO_32: &[u32] = &[
        2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32,
    ];

    #[test]
    fn make_field_cases() {
        let f3 = make_field(3).unwrap();
        assert_eq!((f3.characteristic(), f3.degree()), (3, 1));
        let f4 = make_field(4).unwrap();
        assert_eq!((f4.characteristic(), f4.degree()), (2, 2));
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));
        assert!(matches!(make_field(6), Err(Error::NotPrimePower(6))));
        assert!(matches!(make_field(1), Err(Error::NotPrimePower(1))));
        assert!(matches!(make_field(64), Err(Error::UnsupportedOrder(64))));
    }

    #[test]
    fn gf4_addition_matches_reference_table() {
        // label map 0,1,X,1+X -> 0,1,2,3
        let f = make_field(4).unwrap();
        let expected = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.add(a, b).unwrap(), expected[a as usize][b as usize]);
            }
        }
    }

    #[test]
    fn add_sub_mul_examples() {
        let f4 = make_field(4).unwrap();
        assert_eq!(f4.add(2, 3).unwrap(), 1);
        assert_eq!(f4.sub(3, 2).unwrap(), 1);
        assert_eq!(f4.mul(2, 2).unwrap(), 3); // X^2 = X + 1
        assert_eq!(f4.mul(2, 3).unwrap(), 1);
        assert_eq!(f4.mul(3, 3).unwrap(), 2);

        let f3 = make_field(3).unwrap();
        assert_eq!(f3.add(2, 2).unwrap(), 1);
        assert_eq!(f3.sub(0, 1).unwrap(), 2);

        let f5 = make_field(5).unwrap();
        assert_eq!(f5.mul(3, 4).unwrap(), 2);
    }

    #[test]
    fn label_out_of_range() {
        let f3 = make_field(3).unwrap();
        assert!(matches!(
            f3.add(3, 0),
            Err(Error::LabelOutOfRange { label: 3, q: 3 })
        ));
        assert!(f3.mul(0, 7).is_err());
    }

    #[test]
    fn with_modulus_rejects_reducible() {
        // X^2 + 1 = (X+1)^2 over GF(2)
        assert!(matches!(
            Field::with_modulus(2, 2, &[1, 0, 1]),
            Err(Error::ReducibleModulus { p: 2 })
        ));
        // alternative GF(9) modulus X^2 + X + 2 is irreducible
        let f = Field::with_modulus(3, 2, &[2, 1, 1]).unwrap();
        assert_eq!(f.order(), 9);
    }

    #[test]
    fn field_axioms_all_orders() {
        for &q in PRIME_POWERS_TO_32 {
            let f = make_field(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add_unchecked(a, 0), a);
                assert_eq!(f.mul_unchecked(a, 1), a);
                assert_eq!(f.sub_unchecked(a, a), 0);
                for b in 0..q {
                    assert_eq!(f.add_unchecked(a, b), f.add_unchecked(b, a));
                    assert_eq!(f.mul_unchecked(a, b), f.mul_unchecked(b, a));
                    // sub is the inverse of add
                    assert_eq!(f.sub_unchecked(f.add_unchecked(a, b), b), a);
                }
            }
            // associativity and distributivity, exhaustive
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        assert_eq!(
                            f.add_unchecked(f.add_unchecked(a, b), c),
                            f.add_unchecked(a, f.add_unchecked(b, c))
                        );
                        assert_eq!(
                            f.mul_unchecked(f.mul_unchecked(a, b), c),
                            f.mul_unchecked(a, f.mul_unchecked(b, c))
                        );
                        assert_eq!(
                            f.mul_unchecked(a, f.add_unchecked(b, c)),
                            f.add_unchecked(f.mul_unchecked(a, b), f.mul_unchecked(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for &q in PRIME_POWERS_TO_32 {
            let f = make_field(q).unwrap();
            let order_of = |g: u32| {
                let mut x = g;
                let mut n = 1;
                while x != 1 {
                    x = f.mul_unchecked(x, g);
                    n += 1;
                    assert!(n <= q, "element order overflow in GF({q})");
                }
                n
            };
            let has_generator = (1..q).any(|g| order_of(g) == q - 1);
            assert!(has_generator, "GF({q}) multiplicative group not cyclic");
        }
    }

    #[test]
    fn char2_sub_equals_add() {
        for &q in &[2u32, 4, 8, 16, 32] {
            let f = make_field(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.sub_unchecked(a, b), f.add_unchecked(a, b));
                }
            }
        }
    }
}
