//! Irredundant (mixed) orthogonal arrays and maximally entangled states of
//! heterogeneous qudit systems.
//!
//! The crate covers the full pipeline: exact GF(q) arithmetic ([`gfield`]),
//! difference schemes with verification and search ([`designs`]), the mixed
//! orthogonal array model with strength, irredundancy and endurance
//! ([`moa`]), the two scheme-to-array constructions ([`construct`]),
//! sparse heterogeneous pure states with partial traces, k-uniformity
//! checks, the existence bound and the GHZ-form assembly ([`qstate`]), and
//! noisy-state steering with negativity curves ([`steering`]).
//!
//! Verifiers and curve evaluation are data-parallel via rayon when the
//! default `parallel` feature is on; every operation also has a sequential
//! entry point (`*_seq`), which is what the feature falls back to. Results
//! are identical either way: parallel reductions use order-independent
//! merges with deterministic tie-breaks.
//!
//! ```
//! use irmoa::designs::canonical_two_row_scheme;
//! use irmoa::construct::construction1;
//! use irmoa::qstate::{state_from_array, verify_k_uniform, DEFAULT_TOLERANCE};
//!
//! let scheme = canonical_two_row_scheme(3).unwrap();
//! let array = construction1(&scheme).unwrap();
//! let state = state_from_array(&array, None).unwrap();
//! assert!(verify_k_uniform(&state, 1, DEFAULT_TOLERANCE).unwrap().ok);
//! ```

pub mod construct;
pub mod designs;
pub mod error;
pub mod gfield;
pub mod linalg;
pub mod moa;
pub mod qstate;
pub mod steering;
pub mod subsets;

pub use error::{Error, Result};

pub mod fmt {
    //! Deterministic numeric formatting: 12 significant digits, `.` decimal
    //! separator, plain notation in a wide exponent window.

    pub fn sig12(x: f64) -> String {
        if x == 0.0 {
            return "0".into();
        }
        if !x.is_finite() {
            return format!("{x}");
        }
        let mag = x.abs().log10().floor() as i32;
        if !(-4..=11).contains(&mag) {
            return format!("{:.11e}", x);
        }
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }

    #[cfg(test)]
    mod tests {
        use super::sig12;

        #[test]
        fn formatting() {
            assert_eq!(sig12(0.0), "0");
            assert_eq!(sig12(0.5), "0.5");
            assert_eq!(sig12(1.0), "1");
            assert_eq!(sig12(-0.125), "-0.125");
            assert_eq!(sig12(0.13), "0.13");
            assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
            assert_eq!(sig12(1e-7), "1.00000000000e-7");
            assert_eq!(sig12(0.447860962567), "0.447860962567");
        }
    }
}
