//! Scalar abstraction over the real and complex coefficient fields.
//!
//! Real-only algorithms (sign enumeration, Pietsch weights, rearrangements)
//! take the concrete `f64` carrier types; code that works over either field
//! is generic over [`Scalar`].

use num_complex::{Complex64, ComplexFloat};
use serde::{de::DeserializeOwned, Serialize};

/// Tag describing which coefficient field a carrier uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Coefficient field of vectors, grid functions, tensors, and operators.
///
/// Implemented by `f64` and [`Complex64`]. `abs` always returns the modulus
/// as `f64`, so norm code is field-agnostic.
pub trait Scalar:
    ComplexFloat<Real = f64>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::fmt::Debug
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    const KIND: ScalarKind;

    fn from_f64(x: f64) -> Self;

    /// Unit scalar u with `u * self = |self|`; returns 1 for zero input.
    fn norming_phase(self) -> Self;

    /// Uniform sample from [−1,1] (plus i·[−1,1] for the complex field);
    /// used for randomized starting points.
    fn sample_symmetric<R: rand::RngExt + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn norming_phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    fn sample_symmetric<R: rand::RngExt + ?Sized>(rng: &mut R) -> Self {
        rng.random_range(-1.0..1.0)
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    #[inline]
    fn norming_phase(self) -> Self {
        let a = ComplexFloat::abs(self);
        if a == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.conj() / a
        }
    }

    fn sample_symmetric<R: rand::RngExt + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
}

/// Modulus of a scalar as `f64`.
#[inline]
pub fn modulus<S: Scalar>(s: S) -> f64 {
    ComplexFloat::abs(s)
}
