//! Monotone calculus on the extended half-line and divergence tests built on it.
//!
//! The crate has three layers:
//!
//! * [`ext`] and [`monotone`]: points of `[0, ∞]` / `[-∞, ∞]` and monotone
//!   functions between them, with exact generalized inverses, composition,
//!   constancy analysis and convexity checks.
//! * [`quad`]: proper quadrature plus a truncation-ladder classifier that
//!   certifies improper integrals as convergent, divergent or inconclusive.
//! * [`conditions`], [`geometry`], [`bounds`]: the six equivalent divergence
//!   tests for a convex gauge, spherical means of scalar fields over the unit
//!   n-ball, and the lower bound tying the mass of `Φ(Q)` to divergence of the
//!   radial integral `∫ dr / (r q(r))`.
//!
//! [`expr`] supplies the small expression language used by the CLI and by test
//! fixtures to describe gauges `Φ(t)` and fields `Q(x1, ..., xn)`.

pub mod bounds;
pub mod conditions;
pub mod expr;
pub mod ext;
pub mod geometry;
pub mod monotone;
pub mod quad;

pub use ext::{ExtReal, ExtSigned};
pub use monotone::{Direction, MonotoneFn};
pub use quad::{IntegralVerdict, VerdictKind};
