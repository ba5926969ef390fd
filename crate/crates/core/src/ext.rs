//! Points of the extended half-line `[0, ∞]` and the extended line `[-∞, ∞]`.
//!
//! Both types are thin wrappers over `f64` that rule out NaN, so ordering is
//! total. Arithmetic is intentionally not provided; algorithms work on raw
//! `f64` and cross back at API boundaries. The only structure the wrappers add
//! is the pair of conventions used throughout the crate: `recip` swaps 0 and
//! ∞, and `ln`/`exp` are mutually inverse bijections between the two types.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("value {0} is negative; expected a point of [0, ∞]")]
    Negative(f64),
    #[error("NaN is not a point of the extended line")]
    NaN,
}

/// A point of `[0, ∞]`. `f64::INFINITY` is the point at infinity.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

/// A point of `[-∞, ∞]`.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtSigned(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    pub fn new(v: f64) -> Result<Self, DomainError> {
        if v.is_nan() {
            Err(DomainError::NaN)
        } else if v < 0.0 {
            Err(DomainError::Negative(v))
        } else {
            Ok(ExtReal(v))
        }
    }

    /// Construction from a trusted computation. Panics on NaN or negatives.
    pub fn of(v: f64) -> Self {
        Self::new(v).expect("value outside [0, ∞]")
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// Reciprocal with the conventions `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(self) -> ExtReal {
        if self.0 == 0.0 {
            ExtReal::INFINITY
        } else if self.0.is_infinite() {
            ExtReal::ZERO
        } else {
            ExtReal(1.0 / self.0)
        }
    }

    /// Natural log onto `[-∞, ∞]`: `ln 0 = -∞`, `ln ∞ = ∞`.
    pub fn ln(self) -> ExtSigned {
        ExtSigned(self.0.ln())
    }
}

impl ExtSigned {
    pub const ZERO: ExtSigned = ExtSigned(0.0);
    pub const NEG_INFINITY: ExtSigned = ExtSigned(f64::NEG_INFINITY);
    pub const INFINITY: ExtSigned = ExtSigned(f64::INFINITY);

    pub fn new(v: f64) -> Result<Self, DomainError> {
        if v.is_nan() {
            Err(DomainError::NaN)
        } else {
            Ok(ExtSigned(v))
        }
    }

    pub fn of(v: f64) -> Self {
        Self::new(v).expect("NaN is not a point of the extended line")
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Exponential onto `[0, ∞]`: `exp(-∞) = 0`, `exp(∞) = ∞`.
    pub fn exp(self) -> ExtReal {
        ExtReal(self.0.exp())
    }

    /// Whether the point lies in `[0, ∞]`.
    pub fn is_nonnegative(self) -> bool {
        self.0 >= 0.0
    }

    pub fn to_nonnegative(self) -> Result<ExtReal, DomainError> {
        ExtReal::new(self.0)
    }
}

impl From<ExtReal> for ExtSigned {
    fn from(v: ExtReal) -> Self {
        ExtSigned(v.0)
    }
}

impl Eq for ExtReal {}
impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
impl Eq for ExtSigned {}
impl Ord for ExtSigned {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
impl fmt::Debug for ExtSigned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl fmt::Display for ExtSigned {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Serializes a plain `f64` report field that may legitimately be infinite
/// (or, after degenerate arithmetic, NaN). JSON numbers cannot carry these,
/// so they become the strings `"inf"`, `"-inf"`, `"nan"`, matching the
/// [`ExtReal`] convention. Use with `#[serde(serialize_with = ...)]`.
pub fn serialize_extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_nan() {
        s.serialize_str("nan")
    } else if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else if *v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// [`serialize_extended`] for `Option<f64>` fields (pair it with
/// `skip_serializing_if = "Option::is_none"` so `None` never reaches here).
pub fn serialize_extended_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_extended(x, s),
        None => s.serialize_none(),
    }
}

// Infinities are not representable as JSON numbers; emit them as strings.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}
impl Serialize for ExtSigned {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_bad_points() {
        assert_eq!(ExtReal::new(-1.0), Err(DomainError::Negative(-1.0)));
        assert_eq!(ExtReal::new(f64::NAN), Err(DomainError::NaN));
        assert!(ExtReal::new(f64::INFINITY).is_ok());
        assert_eq!(ExtSigned::new(f64::NAN), Err(DomainError::NaN));
        assert!(ExtSigned::new(f64::NEG_INFINITY).is_ok());
    }

    #[test]
    fn order_is_total_with_infinity_on_top() {
        let pts = [ExtReal::ZERO, ExtReal::ONE, ExtReal::INFINITY];
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(ExtSigned::NEG_INFINITY < ExtSigned::ZERO);
        assert!(ExtSigned::ZERO < ExtSigned::INFINITY);
    }

    #[test]
    fn recip_swaps_zero_and_infinity() {
        assert_eq!(ExtReal::ZERO.recip(), ExtReal::INFINITY);
        assert_eq!(ExtReal::INFINITY.recip(), ExtReal::ZERO);
        assert_eq!(ExtReal::of(4.0).recip(), ExtReal::of(0.25));
        // recip is an involution.
        for v in [0.0, 0.5, 1.0, 3.0, f64::INFINITY] {
            let x = ExtReal::of(v);
            assert_eq!(x.recip().recip(), x);
        }
    }

    #[test]
    fn ln_and_exp_are_mutually_inverse() {
        assert_eq!(ExtReal::ZERO.ln(), ExtSigned::NEG_INFINITY);
        assert_eq!(ExtReal::INFINITY.ln(), ExtSigned::INFINITY);
        assert_eq!(ExtSigned::NEG_INFINITY.exp(), ExtReal::ZERO);
        assert_eq!(ExtSigned::INFINITY.exp(), ExtReal::INFINITY);
        for v in [0.0, 1e-12, 0.3, 1.0, 7.0, 1e12, f64::INFINITY] {
            let x = ExtReal::of(v);
            let back = x.ln().exp();
            if v == 0.0 || v.is_infinite() {
                assert_eq!(back, x);
            } else {
                assert!((back.get() - v).abs() <= 1e-12 * v);
            }
        }
    }
}
