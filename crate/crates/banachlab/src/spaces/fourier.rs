//! Exact Fourier coefficients of piecewise-linear grid functions.
//!
//! f̂(k) = ∫₀¹ f(t) e^{−2πikt} dt, integrated in closed form on each grid
//! cell (affine × exponential). The e^{−2πikt} sign convention makes the
//! diagonal identity T_λ(ε_i ⊗ e_i) = λ_i e_i hold literally for
//! ε_i(t) = e^{2πiit}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::GridFunction;

/// Largest |k| for which coefficients of an m-point grid are meaningful
/// (Nyquist-style cutoff).
pub fn max_frequency(points: usize) -> i64 {
    ((points - 1) / 2) as i64
}

/// f̂(k) = ∫₀¹ f(t) e^{−2πikt} dt, exact for the interpolant.
pub fn fourier_coeff<S: Scalar>(f: &GridFunction<S>, k: i64) -> Result<Complex64> {
    let m = f.points();
    if k.abs() > max_frequency(m) {
        return Err(Error::invalid(format!(
            "frequency {k} exceeds the cutoff {} for a {m}-point grid",
            max_frequency(m)
        )));
    }
    let h = 1.0 / (m - 1) as f64;
    let theta = -2.0 * std::f64::consts::PI * k as f64 * h;
    let i0 = cell_i0(theta);
    let i1 = cell_i1(theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m - 1 {
        let a = to_c(f.samples()[j]);
        let b = to_c(f.samples()[j + 1]);
        let phase = Complex64::from_polar(1.0, theta * j as f64);
        acc += phase * (a * i0 + (b - a) * i1);
    }
    Ok(acc * h)
}

/// Quadrature weights w_j(k) with f̂(k) = Σ_j w_j(k) f_j; exact and linear in
/// the samples. Used to assemble operators whose action involves Fourier
/// coefficients.
pub fn fourier_weights(points: usize, k: i64) -> Result<Vec<Complex64>> {
    if k.abs() > max_frequency(points) {
        return Err(Error::invalid(format!(
            "frequency {k} exceeds the cutoff {} for a {points}-point grid",
            max_frequency(points)
        )));
    }
    let h = 1.0 / (points - 1) as f64;
    let theta = -2.0 * std::f64::consts::PI * k as f64 * h;
    let i0 = cell_i0(theta);
    let i1 = cell_i1(theta);
    let mut w = vec![Complex64::new(0.0, 0.0); points];
    for j in 0..points - 1 {
        let phase = Complex64::from_polar(1.0, theta * j as f64) * h;
        w[j] += phase * (i0 - i1);
        w[j + 1] += phase * i1;
    }
    Ok(w)
}

fn to_c<S: Scalar>(s: S) -> Complex64 {
    Complex64::new(s.re(), s.im())
}

/// ∫₀¹ e^{iθv} dv = e^{iθ/2}·sin(θ/2)/(θ/2).
fn cell_i0(theta: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let half = 0.5 * theta;
    Complex64::from_polar(1.0, half) * (half.sin() / half)
}

/// ∫₀¹ v·e^{iθv} dv; series for small |θ|, closed form otherwise.
fn cell_i1(theta: f64) -> Complex64 {
    if theta.abs() < 1e-4 {
        // Σ (iθ)^n / (n!(n+2)); truncation error < |θ|⁵/840.
        let s = Complex64::new(0.0, theta);
        let mut term = Complex64::new(0.5, 0.0);
        let mut acc = term;
        for n in 1..=4 {
            term = term * s * ((n as f64 + 1.0) / (n as f64 * (n as f64 + 2.0)));
            acc += term;
        }
        return acc;
    }
    let s = Complex64::new(0.0, theta);
    let e = Complex64::from_polar(1.0, theta);
    (e * (s - 1.0) + 1.0) / (s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceDescriptor;

    fn trig(m: usize, freq: i64) -> GridFunction<Complex64> {
        let space = SpaceDescriptor::grid_c(m);
        let samples = (0..m)
            .map(|j| {
                let t = j as f64 / (m - 1) as f64;
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * freq as f64 * t)
            })
            .collect();
        GridFunction::new(samples, space).unwrap()
    }

    #[test]
    fn constant_has_unit_zero_coefficient() {
        let f = GridFunction::from_fn(SpaceDescriptor::grid_c(33), |_| 1.0).unwrap();
        let c = fourier_coeff(&f, 0).unwrap();
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn near_orthonormality_of_sampled_exponentials() {
        // Oracle: continuum orthonormality of ε_j; sampling contributes
        // O((2πj·h)²) attenuation on the diagonal and only rounding off it.
        let m = 4096;
        for j in [1i64, 5, 16] {
            let f = trig(m, j);
            let diag = fourier_coeff(&f, j).unwrap();
            assert!(
                (diag - Complex64::new(1.0, 0.0)).norm() < 1e-3,
                "diag({j}) = {diag}"
            );
            for k in [j - 1, j + 1, j + 3] {
                let off = fourier_coeff(&f, k).unwrap();
                assert!(off.norm() < 1e-3, "off({j},{k}) = {off}");
            }
        }
    }

    #[test]
    fn coefficients_are_additive() {
        let m = 257;
        let f = GridFunction::from_fn(SpaceDescriptor::grid_c(m), |t| (t * 3.0).sin()).unwrap();
        let g = GridFunction::from_fn(SpaceDescriptor::grid_c(m), |t| t * t - 0.3).unwrap();
        let sum = GridFunction::new(
            f.samples()
                .iter()
                .zip(g.samples())
                .map(|(a, b)| a + b)
                .collect(),
            SpaceDescriptor::grid_c(m),
        )
        .unwrap();
        for k in [-3i64, 0, 7] {
            let lhs = fourier_coeff(&sum, k).unwrap();
            let rhs = fourier_coeff(&f, k).unwrap() + fourier_coeff(&g, k).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn weights_reproduce_the_integral() {
        let m = 129;
        let f = GridFunction::from_fn(SpaceDescriptor::grid_c(m), |t| t.powi(2) - 0.4 * t).unwrap();
        for k in [0i64, 1, -9, 30] {
            let w = fourier_weights(m, k).unwrap();
            let via_weights: Complex64 = f
                .samples()
                .iter()
                .zip(&w)
                .map(|(s, wk)| wk * s)
                .sum();
            let direct = fourier_coeff(&f, k).unwrap();
            assert!((via_weights - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_form_cell_integrals_match_quadrature() {
        for theta in [0.0, 1e-6, 1e-3, 0.1, 2.0, -3.1] {
            let n = 200_000;
            let mut q0 = Complex64::new(0.0, 0.0);
            let mut q1 = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let v = (k as f64 + 0.5) / n as f64;
                let e = Complex64::from_polar(1.0, theta * v);
                q0 += e / n as f64;
                q1 += e * (v / n as f64);
            }
            assert!((cell_i0(theta) - q0).norm() < 1e-9, "theta={theta}");
            assert!((cell_i1(theta) - q1).norm() < 1e-9, "theta={theta}");
        }
    }

    #[test]
    fn cutoff_is_enforced() {
        let f = GridFunction::from_fn(SpaceDescriptor::grid_c(16), |_| 1.0).unwrap();
        assert!(fourier_coeff(&f, 8).is_err());
        assert!(fourier_coeff(&f, 7).is_ok());
    }
}
