//! Finite-dimensional normed sequence spaces and grid-discretized function
//! spaces on [0,1].
//!
//! Sequence spaces are ℓ_p^n (1 ≤ p ≤ ∞) and finite sup-norm truncations of
//! c_0. Function spaces are carried by uniform grids: a [`GridFunction`] holds
//! samples at the nodes j/(m−1) and is interpreted as the piecewise-linear
//! interpolant on [0,1]. Every integral and norm on grid functions is exact
//! for that interpretation, so interpolation is the only discretization error.

mod fourier;
mod lorentz;

pub use fourier::{fourier_coeff, fourier_weights, max_frequency};
pub use lorentz::lorentz21_norm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{modulus, Scalar, ScalarKind};

/// A Hölder exponent p ∈ [1, ∞].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::invalid(format!("exponent must satisfy p >= 1, got {p}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Conjugate exponent p' with 1/p + 1/p' = 1.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<T: serde::Serializer>(&self, s: T) -> std::result::Result<T::Ok, T::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "a number >= 1 or the string \"inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::new(v as f64).map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::new(v as f64).map_err(E::custom)
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "Inf" | "infinity" => Ok(Exponent::INF),
                    other => other
                        .parse::<f64>()
                        .map_err(E::custom)
                        .and_then(|p| Exponent::new(p).map_err(E::custom)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Norm semantics of a coordinate vector or grid function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    /// ℓ_p^n.
    Lp { dim: usize, p: Exponent },
    /// Finite truncation of c_0 under the sup norm.
    SupSeq { dim: usize },
    /// C[0,1] sampled at `points` uniform nodes.
    GridC { points: usize },
    /// L_p[0,1] sampled at `points` uniform nodes.
    GridLp { points: usize, p: Exponent },
    /// Lorentz space L_{2,1}[0,1] sampled at `points` uniform nodes.
    GridLorentz21 { points: usize },
}

impl SpaceDescriptor {
    pub fn lp(dim: usize, p: Exponent) -> Self {
        SpaceDescriptor::Lp { dim, p }
    }
    pub fn l1(dim: usize) -> Self {
        Self::lp(dim, Exponent::ONE)
    }
    pub fn l2(dim: usize) -> Self {
        Self::lp(dim, Exponent::TWO)
    }
    pub fn linf(dim: usize) -> Self {
        Self::lp(dim, Exponent::INF)
    }
    pub fn sup_seq(dim: usize) -> Self {
        SpaceDescriptor::SupSeq { dim }
    }
    pub fn grid_c(points: usize) -> Self {
        SpaceDescriptor::GridC { points }
    }
    pub fn grid_lp(points: usize, p: Exponent) -> Self {
        SpaceDescriptor::GridLp { points, p }
    }
    pub fn grid_l2(points: usize) -> Self {
        Self::grid_lp(points, Exponent::TWO)
    }
    pub fn grid_lorentz21(points: usize) -> Self {
        SpaceDescriptor::GridLorentz21 { points }
    }

    /// Coordinate dimension: n for sequence spaces, grid point count otherwise.
    pub fn dim(&self) -> usize {
        match *self {
            SpaceDescriptor::Lp { dim, .. } | SpaceDescriptor::SupSeq { dim } => dim,
            SpaceDescriptor::GridC { points }
            | SpaceDescriptor::GridLp { points, .. }
            | SpaceDescriptor::GridLorentz21 { points } => points,
        }
    }

    pub fn is_sequence(&self) -> bool {
        matches!(self, SpaceDescriptor::Lp { .. } | SpaceDescriptor::SupSeq { .. })
    }

    pub fn is_grid(&self) -> bool {
        !self.is_sequence()
    }

    /// Sup-normed sequence space (ℓ_∞ or a c_0 truncation).
    pub fn is_sup_sequence(&self) -> bool {
        match self {
            SpaceDescriptor::SupSeq { .. } => true,
            SpaceDescriptor::Lp { p, .. } => p.is_infinite(),
            _ => false,
        }
    }

    /// Sequence-space exponent, treating SupSeq as ℓ_∞.
    pub fn sequence_exponent(&self) -> Option<Exponent> {
        match self {
            SpaceDescriptor::Lp { p, .. } => Some(*p),
            SpaceDescriptor::SupSeq { .. } => Some(Exponent::INF),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpaceDescriptor::Lp { dim, .. } | SpaceDescriptor::SupSeq { dim } => {
                if dim == 0 {
                    return Err(Error::invalid("sequence space dimension must be >= 1"));
                }
            }
            SpaceDescriptor::GridC { points }
            | SpaceDescriptor::GridLp { points, .. }
            | SpaceDescriptor::GridLorentz21 { points } => {
                if points < 2 {
                    return Err(Error::invalid("grid spaces need at least 2 points"));
                }
            }
        }
        Ok(())
    }

    /// Two descriptors carry the same norm on the same coordinates.
    /// ℓ_∞^n and the c_0 truncation of the same dimension are identified.
    pub fn norm_equivalent(&self, other: &SpaceDescriptor) -> bool {
        if self == other {
            return true;
        }
        self.dim() == other.dim() && self.is_sup_sequence() && other.is_sup_sequence()
    }

    /// Norm of raw coordinates under this descriptor's semantics.
    pub fn norm_of<S: Scalar>(&self, coords: &[S]) -> Result<f64> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "norm_of",
                expected: self.dim(),
                got: coords.len(),
            });
        }
        match self {
            SpaceDescriptor::Lp { p, .. } => Ok(lp_norm(coords, *p)),
            SpaceDescriptor::SupSeq { .. } | SpaceDescriptor::GridC { .. } => Ok(sup_norm(coords)),
            SpaceDescriptor::GridLp { p, .. } => grid_lp_norm_raw(coords, *p),
            SpaceDescriptor::GridLorentz21 { .. } => {
                if S::KIND == ScalarKind::Complex {
                    return Err(Error::ComplexUnsupported("lorentz21_norm"));
                }
                let real: Vec<f64> = coords.iter().map(|s| s.re()).collect();
                Ok(lorentz::lorentz21_from_samples(&real))
            }
        }
    }
}

/// ℓ_p norm of raw coordinates.
pub fn lp_norm<S: Scalar>(coords: &[S], p: Exponent) -> f64 {
    let pv = p.get();
    if p.is_infinite() {
        sup_norm(coords)
    } else if pv == 1.0 {
        coords.iter().map(|&c| modulus(c)).sum()
    } else if pv == 2.0 {
        coords.iter().map(|&c| modulus(c).powi(2)).sum::<f64>().sqrt()
    } else {
        coords
            .iter()
            .map(|&c| modulus(c).powf(pv))
            .sum::<f64>()
            .powf(1.0 / pv)
    }
}

/// max_i |c_i|.
pub fn sup_norm<S: Scalar>(coords: &[S]) -> f64 {
    coords.iter().map(|&c| modulus(c)).fold(0.0, f64::max)
}

/// Bilinear pairing Σ a_i b_i.
pub fn pairing<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

/// A coordinate vector tagged with a sequence-space descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector<S = f64> {
    coords: Vec<S>,
    space: SpaceDescriptor,
}

impl<S: Scalar> Vector<S> {
    pub fn new(coords: Vec<S>, space: SpaceDescriptor) -> Result<Self> {
        space.validate()?;
        if !space.is_sequence() {
            return Err(Error::unsupported(
                "Vector::new",
                "vectors live in Lp/SupSeq families; use GridFunction for grid spaces",
            ));
        }
        if coords.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "Vector::new",
                expected: space.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("Vector::new"));
        }
        Ok(Vector { coords, space })
    }

    pub fn zero_in(space: SpaceDescriptor) -> Result<Self> {
        let n = space.dim();
        Vector::new(vec![S::zero(); n], space)
    }

    /// Standard basis vector e_j.
    pub fn basis(space: SpaceDescriptor, j: usize) -> Result<Self> {
        let n = space.dim();
        if j >= n {
            return Err(Error::invalid(format!("basis index {j} out of range for dim {n}")));
        }
        let mut coords = vec![S::zero(); n];
        coords[j] = S::one();
        Vector::new(coords, space)
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Norm in the vector's own space.
    pub fn norm(&self) -> f64 {
        self.space
            .norm_of(&self.coords)
            .expect("sequence families are always normable")
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let coords = self.coords.iter().map(|&x| x * S::from_f64(c)).collect();
        Vector {
            coords,
            space: self.space.clone(),
        }
    }
}

/// Norm of a vector in its own space.
pub fn vector_norm<S: Scalar>(v: &Vector<S>) -> f64 {
    v.norm()
}

/// Norm of `v` acting as a linear functional on `space` (the ℓ_{p'} norm).
pub fn dual_norm<S: Scalar>(v: &Vector<S>, space: &SpaceDescriptor) -> Result<f64> {
    let p = space.sequence_exponent().ok_or_else(|| {
        Error::unsupported("dual_norm", "functional norms are computed on Lp/SupSeq spaces")
    })?;
    if v.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            context: "dual_norm",
            expected: space.dim(),
            got: v.dim(),
        });
    }
    Ok(lp_norm(v.coords(), p.conjugate()))
}

/// Functional w on the space of `v` with ‖w‖_dual ≤ 1 and Σ v_i w_i = ‖v‖.
pub fn norming_functional<S: Scalar>(v: &Vector<S>) -> Vector<S> {
    let p = v
        .space()
        .sequence_exponent()
        .expect("vectors live in sequence spaces");
    let coords = norming_coords(v.coords(), p);
    Vector {
        coords,
        space: v.space.clone(),
    }
}

/// Coordinates of the norming functional for the ℓ_p norm.
pub(crate) fn norming_coords<S: Scalar>(coords: &[S], p: Exponent) -> Vec<S> {
    let n = coords.len();
    let mut w = vec![S::zero(); n];
    if coords.iter().all(|c| c.is_zero()) {
        return w;
    }
    let pv = p.get();
    if p.is_infinite() {
        let (jmax, _) = coords
            .iter()
            .enumerate()
            .max_by(|a, b| modulus(*a.1).total_cmp(&modulus(*b.1)))
            .unwrap();
        w[jmax] = coords[jmax].norming_phase();
    } else if pv == 1.0 {
        for (wi, &c) in w.iter_mut().zip(coords) {
            if !c.is_zero() {
                *wi = c.norming_phase();
            }
        }
    } else {
        let nv = lp_norm(coords, p);
        for (wi, &c) in w.iter_mut().zip(coords) {
            let a = modulus(c);
            if a > 0.0 {
                *wi = c.norming_phase() * S::from_f64((a / nv).powf(pv - 1.0));
            }
        }
    }
    w
}

// ---------------------------------------------------------------------------
// GridFunction
// ---------------------------------------------------------------------------

/// Samples of a function at the uniform nodes j/(m−1), j = 0..m−1,
/// interpreted as the piecewise-linear interpolant on [0,1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction<S = f64> {
    samples: Vec<S>,
    space: SpaceDescriptor,
}

impl<S: Scalar> GridFunction<S> {
    pub fn new(samples: Vec<S>, space: SpaceDescriptor) -> Result<Self> {
        space.validate()?;
        if !space.is_grid() {
            return Err(Error::unsupported(
                "GridFunction::new",
                "grid functions live in GridC/GridLp/GridLorentz21 families",
            ));
        }
        if samples.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "GridFunction::new",
                expected: space.dim(),
                got: samples.len(),
            });
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("GridFunction::new"));
        }
        if matches!(space, SpaceDescriptor::GridLorentz21 { .. }) && S::KIND == ScalarKind::Complex {
            return Err(Error::ComplexUnsupported("GridLorentz21 carrier"));
        }
        Ok(GridFunction { samples, space })
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn points(&self) -> usize {
        self.samples.len()
    }

    /// Grid step 1/(m−1).
    pub fn step(&self) -> f64 {
        1.0 / (self.points() - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / (self.points() - 1) as f64
    }

    /// Value of the piecewise-linear interpolant at t ∈ [0,1].
    pub fn eval(&self, t: f64) -> S {
        let m = self.points();
        let x = t.clamp(0.0, 1.0) * (m - 1) as f64;
        let j = (x.floor() as usize).min(m - 2);
        let frac = x - j as f64;
        self.samples[j] * S::from_f64(1.0 - frac) + self.samples[j + 1] * S::from_f64(frac)
    }

    /// Exact ∫₀¹ f(t) dt of the interpolant (trapezoid rule).
    pub fn integrate(&self) -> S {
        let h = self.step();
        let m = self.points();
        let mut acc = (self.samples[0] + self.samples[m - 1]) * S::from_f64(0.5);
        for s in &self.samples[1..m - 1] {
            acc += *s;
        }
        acc * S::from_f64(h)
    }

    /// sup_t |f(t)|; attained at grid nodes for the interpolant.
    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.samples)
    }

    /// Exact L_p norm of the interpolant. Complex carriers support p ∈ {2, ∞}.
    pub fn lp_norm(&self, p: Exponent) -> Result<f64> {
        grid_lp_norm_raw(&self.samples, p)
    }

    /// Norm in the function's own space.
    pub fn norm(&self) -> Result<f64> {
        self.space.norm_of(&self.samples)
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            samples: self.samples.iter().map(|&s| s * S::from_f64(c)).collect(),
            space: self.space.clone(),
        }
    }

    pub fn retagged(&self, space: SpaceDescriptor) -> Result<GridFunction<S>> {
        GridFunction::new(self.samples.clone(), space)
    }
}

impl GridFunction<f64> {
    /// Sample a closed-form function on the nodes of `space`.
    pub fn from_fn(space: SpaceDescriptor, f: impl Fn(f64) -> f64) -> Result<Self> {
        let m = space.dim();
        let samples = (0..m).map(|j| f(j as f64 / (m - 1) as f64)).collect();
        GridFunction::new(samples, space)
    }
}

/// Exact integral over [0,1] of the piecewise-linear interpolant.
pub fn grid_integrate<S: Scalar>(f: &GridFunction<S>) -> S {
    f.integrate()
}

/// Exact ∫₀¹ f·g dt for two interpolants on the same grid (bilinear).
pub fn grid_product_integral<S: Scalar>(f: &GridFunction<S>, g: &GridFunction<S>) -> Result<S> {
    grid_product_integral_raw(f.samples(), g.samples())
}

/// Exact ∫ f·g for raw sample slices on a shared uniform grid.
pub fn grid_product_integral_raw<S: Scalar>(f: &[S], g: &[S]) -> Result<S> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            context: "grid_product_integral",
            expected: f.len(),
            got: g.len(),
        });
    }
    if f.len() < 2 {
        return Err(Error::invalid("grids need at least 2 points"));
    }
    let h = 1.0 / (f.len() - 1) as f64;
    let sixth = S::from_f64(h / 6.0);
    let two = S::from_f64(2.0);
    let mut acc = S::zero();
    for j in 0..f.len() - 1 {
        let (a1, a2) = (f[j], f[j + 1]);
        let (b1, b2) = (g[j], g[j + 1]);
        acc += (a1 * b1 * two + a1 * b2 + a2 * b1 + a2 * b2 * two) * sixth;
    }
    Ok(acc)
}

/// Exact L_p norm of raw samples interpreted as a piecewise-linear function.
pub(crate) fn grid_lp_norm_raw<S: Scalar>(samples: &[S], p: Exponent) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::invalid("grids need at least 2 points"));
    }
    if p.is_infinite() {
        // |f(t)| is convex on each cell (affine for real, sqrt of an upward
        // parabola for complex), so the max sits on a node.
        return Ok(sup_norm(samples));
    }
    let h = 1.0 / (samples.len() - 1) as f64;
    let pv = p.get();
    match S::KIND {
        ScalarKind::Real => {
            let mut acc = 0.0;
            for j in 0..samples.len() - 1 {
                acc += cell_abs_pow_integral(samples[j].re(), samples[j + 1].re(), pv, h);
            }
            Ok(acc.powf(1.0 / pv))
        }
        ScalarKind::Complex => {
            if pv == 2.0 {
                let mut acc = 0.0;
                for j in 0..samples.len() - 1 {
                    let a = samples[j];
                    let b = samples[j + 1];
                    let aa = modulus(a).powi(2);
                    let bb = modulus(b).powi(2);
                    let ab = (a.conj() * b).re();
                    acc += h * (aa + ab + bb) / 3.0;
                }
                Ok(acc.sqrt())
            } else {
                Err(Error::unsupported(
                    "grid_lp_norm",
                    "complex grid functions support exact L_p norms only for p in {2, inf}",
                ))
            }
        }
    }
}

/// sign(x)·|x|^q, the antiderivative kernel used for exact |f|^p integrals.
fn sgn_pow(x: f64, q: f64) -> f64 {
    x.signum() * x.abs().powf(q)
}

/// Exact ∫₀ʰ |a + (b−a)u/h|^p du for a real affine cell.
pub(crate) fn cell_abs_pow_integral(a: f64, b: f64, p: f64, h: f64) -> f64 {
    let d = b - a;
    let scale = a.abs() + b.abs();
    if scale == 0.0 {
        return 0.0;
    }
    if d.abs() <= 1e-7 * scale {
        // Near-flat cell: second-order expansion around the midpoint keeps
        // full precision where the closed form would cancel.
        let m = 0.5 * (a + b);
        let dm = 0.5 * d / m;
        return h * m.abs().powf(p) * (1.0 + p * (p - 1.0) / 6.0 * dm * dm);
    }
    h * (sgn_pow(b, p + 1.0) - sgn_pow(a, p + 1.0)) / (d * (p + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn v(coords: &[f64], space: SpaceDescriptor) -> Vector {
        Vector::new(coords.to_vec(), space).unwrap()
    }

    #[test]
    fn vector_norm_examples() {
        assert_eq!(v(&[3.0, 4.0], SpaceDescriptor::l2(2)).norm(), 5.0);
        assert_eq!(v(&[1.0, 1.0, 1.0], SpaceDescriptor::linf(3)).norm(), 1.0);
        assert_eq!(v(&[1.0, -2.0, 2.0], SpaceDescriptor::l1(3)).norm(), 5.0);
    }

    #[test]
    fn dual_norm_examples() {
        let l2 = SpaceDescriptor::l2(2);
        assert_eq!(dual_norm(&v(&[3.0, 4.0], l2.clone()), &l2).unwrap(), 5.0);
        let linf = SpaceDescriptor::linf(2);
        assert_eq!(dual_norm(&v(&[1.0, 1.0], linf.clone()), &linf).unwrap(), 2.0);
        let l1 = SpaceDescriptor::l1(2);
        assert_eq!(dual_norm(&v(&[2.0, -1.0], l1.clone()), &l1).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        assert!(Vector::new(vec![1.0, 2.0], SpaceDescriptor::l2(3)).is_err());
        let w = v(&[1.0, 2.0], SpaceDescriptor::l2(2));
        assert!(dual_norm(&w, &SpaceDescriptor::l2(3)).is_err());
    }

    #[test]
    fn grid_integrate_examples() {
        for m in [2, 17, 101] {
            let one = GridFunction::from_fn(SpaceDescriptor::grid_c(m), |_| 1.0).unwrap();
            assert!((one.integrate() - 1.0).abs() < 1e-15);
        }
        let t = GridFunction::from_fn(SpaceDescriptor::grid_c(101), |t| t).unwrap();
        assert!((t.integrate() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tent_moments_are_exact_on_aligned_grids() {
        // Tent of height 1 with support [0, 1/4], apex at 1/8; m−1 = 64 cells.
        let m = 65;
        let tent = GridFunction::from_fn(SpaceDescriptor::grid_c(m), |t| {
            let l = 0.25;
            if t <= 0.0 || t >= l {
                0.0
            } else if t <= l / 2.0 {
                2.0 * t / l
            } else {
                2.0 * (l - t) / l
            }
        })
        .unwrap();
        assert!((tent.integrate() - 0.125).abs() < 1e-15);
        let sq = grid_product_integral(&tent, &tent).unwrap();
        assert!((sq - 0.25 / 3.0).abs() < 1e-15, "got {sq}");
    }

    #[test]
    fn exact_lp_norm_matches_quadrature() {
        let f = GridFunction::from_fn(SpaceDescriptor::grid_c(33), |t| (t - 0.37) * 3.0).unwrap();
        for p in [1.0, 4.0 / 3.0, 2.0, 3.5] {
            let exact = f.lp_norm(Exponent::new(p).unwrap()).unwrap();
            // Dense midpoint quadrature on the interpolant as an oracle.
            let n = 400_000;
            let mut acc = 0.0;
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                acc += f.eval(t).abs().powf(p) / n as f64;
            }
            let oracle = acc.powf(1.0 / p);
            assert!(
                (exact - oracle).abs() < 2e-6 * exact.max(1.0),
                "p={p}: exact {exact} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn norming_functional_attains_the_norm() {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let space = SpaceDescriptor::lp(4, Exponent::new(p).unwrap_or(Exponent::INF));
            let space = if p.is_infinite() { SpaceDescriptor::linf(4) } else { space };
            let x = v(&[0.3, -1.2, 0.0, 2.4], space.clone());
            let w = norming_functional(&x);
            let paired = pairing(x.coords(), w.coords());
            assert!((paired - x.norm()).abs() <= 1e-12 * x.norm());
            assert!(dual_norm(&w, &space).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn complex_l2_norm_is_exact() {
        let m = 257;
        let space = SpaceDescriptor::grid_lp(m, Exponent::TWO);
        let samples: Vec<Complex64> = (0..m)
            .map(|j| {
                let t = j as f64 / (m - 1) as f64;
                Complex64::new(t, 1.0 - t)
            })
            .collect();
        let f = GridFunction::new(samples, space).unwrap();
        // |f(t)|² = t² + (1−t)² is exactly quadratic; ∫ = 2/3.
        let norm = f.lp_norm(Exponent::TWO).unwrap();
        assert!((norm - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn complex_lorentz_carrier_is_rejected() {
        let space = SpaceDescriptor::grid_lorentz21(8);
        let samples = vec![Complex64::new(1.0, 1.0); 8];
        assert!(GridFunction::new(samples, space).is_err());
    }

    #[test]
    fn descriptor_serde_round_trip() {
        for d in [
            SpaceDescriptor::lp(3, Exponent::new(1.5).unwrap()),
            SpaceDescriptor::linf(7),
            SpaceDescriptor::sup_seq(4),
            SpaceDescriptor::grid_c(33),
            SpaceDescriptor::grid_l2(65),
            SpaceDescriptor::grid_lorentz21(9),
        ] {
            let s = serde_json::to_string(&d).unwrap();
            let back: SpaceDescriptor = serde_json::from_str(&s).unwrap();
            assert_eq!(d, back, "{s}");
        }
    }
}
