//! The Lorentz-embedding family: shifted copies of the truncated inverse
//! square root have L_{2,1} norms near 2 + ln n while their weak-ℓ2 norm
//! over the sup-norm dual ball stays far smaller, so the strong/weak ratio
//! grows with n. Slices of the induced operator on C([0,1], ℓ_1) are
//! diagonal with entries given by sampled Lorentz-feasible functionals,
//! making op_norm(T^#f) = ‖Rf‖_∞ an exact identity.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentReport, ParamValue, Table};
use crate::operators::op_norm;
use crate::spaces::{lorentz21_norm, GridFunction, SpaceDescriptor};
use crate::tensor::{hash_operator, TensorMap, TensorSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMode {
    /// Shifts 1/i as displayed in the construction; concentrates the
    /// singularities near t = 0.
    PaperShifts,
    /// Uniform lattice shifts i/n; spreads the singularities evenly.
    UniformShifts,
}

impl ShiftMode {
    pub fn label(self) -> &'static str {
        match self {
            ShiftMode::PaperShifts => "paper_shifts",
            ShiftMode::UniformShifts => "uniform_shifts",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Thm12Config {
    /// Cap parameter n (number of shifted functions).
    pub n: usize,
    /// Grid points; must be at least 64·n.
    pub grid: usize,
    pub shift_mode: ShiftMode,
    pub seed: u64,
    /// Sweep points for the growth table.
    pub sweep: Vec<usize>,
}

impl Default for Thm12Config {
    fn default() -> Self {
        Thm12Config {
            n: 64,
            grid: 4096,
            shift_mode: ShiftMode::UniformShifts,
            seed: 0,
            sweep: vec![4, 16, 64, 256, 1024],
        }
    }
}

/// f(t) = 1/√t truncated at height √n.
fn profile(n: usize, u: f64) -> f64 {
    let cut = 1.0 / n as f64;
    if u >= cut {
        1.0 / u.sqrt()
    } else {
        (n as f64).sqrt()
    }
}

fn shift_of(mode: ShiftMode, i: usize, n: usize) -> f64 {
    match mode {
        ShiftMode::PaperShifts => 1.0 / i as f64,
        ShiftMode::UniformShifts => i as f64 / n as f64,
    }
}

fn shifted_samples(m: usize, n: usize, shift: f64) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let t = j as f64 / (m - 1) as f64;
            let mut u = t + shift;
            while u >= 1.0 {
                u -= 1.0;
            }
            profile(n, u)
        })
        .collect()
}

struct ModeStats {
    weak: f64,
    strong: f64,
    lorentz_max_rel_err: f64,
}

fn mode_stats(n: usize, m: usize, mode: ShiftMode) -> Result<ModeStats> {
    // Weak ℓ2 norm over the dual ball of C[0,1]: extreme points are signed
    // node evaluations and Σ e_i(t)² is convex on each cell, so the node
    // maximum is exact.
    let mut sumsq = vec![0.0f64; m];
    for i in 1..=n {
        let s = shifted_samples(m, n, shift_of(mode, i, n));
        for (acc, v) in sumsq.iter_mut().zip(&s) {
            *acc += v * v;
        }
    }
    let weak = sumsq.iter().cloned().fold(0.0, f64::max).sqrt();

    let target = 2.0 + (n as f64).ln();
    let lorentz: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let s = shifted_samples(m, n, shift_of(mode, i, n));
            let f = GridFunction::new(s, SpaceDescriptor::grid_lorentz21(m))
                .expect("valid grid function");
            lorentz21_norm(&f)
        })
        .collect();
    let strong = lorentz.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lorentz_max_rel_err = lorentz
        .iter()
        .map(|v| (v - target).abs() / target)
        .fold(0.0, f64::max);
    Ok(ModeStats {
        weak,
        strong,
        lorentz_max_rel_err,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (k * sxy - sx * sy) / (k * sxx - sx * sx).max(1e-300)
}

/// Quadrature weights for ∫_a^b of a piecewise-linear interpolant.
fn interval_weights(m: usize, a: f64, b: f64) -> Vec<f64> {
    let h = 1.0 / (m - 1) as f64;
    let mut w = vec![0.0f64; m];
    for j in 0..m - 1 {
        let t0 = j as f64 * h;
        let t1 = t0 + h;
        let lo = a.max(t0);
        let hi = b.min(t1);
        if hi <= lo {
            continue;
        }
        let u0 = (lo - t0) / h;
        let u1 = (hi - t0) / h;
        let width = hi - lo;
        let mean_u = 0.5 * (u0 + u1);
        w[j] += width * (1.0 - mean_u);
        w[j + 1] += width * mean_u;
    }
    w
}

pub fn run_thm12(cfg: &Thm12Config) -> Result<ExperimentReport> {
    if cfg.n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if cfg.grid < 64 * cfg.n {
        return Err(Error::invalid(format!(
            "insufficient grid: need at least 64*n = {} points, got {}",
            64 * cfg.n,
            cfg.grid
        )));
    }
    let mut report = ExperimentReport::new("thm12", cfg.seed, cfg.grid, 0);
    report.param("n", ParamValue::Int(cfg.n as i64));
    report.param("grid", ParamValue::Int(cfg.grid as i64));
    report.param("shift_mode", ParamValue::Text(cfg.shift_mode.label().into()));
    report.tolerance("lorentz_rel", 0.01);
    report.tolerance("diag_identity_rel", 1e-9);

    // (a)-(b) at the configured point.
    let stats = mode_stats(cfg.n, cfg.grid, cfg.shift_mode)?;
    let target = 2.0 + (cfg.n as f64).ln();
    report.quantity("lorentz_target", target);
    report.quantity("lorentz_max_rel_err", stats.lorentz_max_rel_err);
    report.check(
        "lorentz_matches_2_plus_ln_n",
        stats.lorentz_max_rel_err <= 0.01,
        format!("max rel err {}", stats.lorentz_max_rel_err),
    );
    report.quantity("weak_l2", stats.weak);
    report.quantity("strong_lorentz_l2", stats.strong);
    report.quantity("strong_over_weak", stats.strong / stats.weak);

    // (c) Growth table over the sweep, both shift modes.
    let sweep: Vec<usize> = cfg.sweep.iter().cloned().filter(|&x| x >= 2).collect();
    let mut rows = Vec::new();
    for &np in &sweep {
        let mp = 64 * np;
        let paper = mode_stats(np, mp, ShiftMode::PaperShifts)?;
        let uniform = mode_stats(np, mp, ShiftMode::UniformShifts)?;
        let sq = (np as f64).sqrt();
        rows.push(vec![
            np as f64,
            paper.weak,
            paper.strong,
            paper.strong / paper.weak,
            paper.strong / sq,
            uniform.weak,
            uniform.strong,
            uniform.strong / uniform.weak,
            uniform.strong / sq,
        ]);
    }
    report.table = Table::new(
        vec![
            "n".into(),
            "weak_paper".into(),
            "strong_paper".into(),
            "ratio_paper".into(),
            "strong_per_sqrt_n_paper".into(),
            "weak_uniform".into(),
            "strong_uniform".into(),
            "ratio_uniform".into(),
            "strong_per_sqrt_n_uniform".into(),
        ],
        rows.clone(),
    );

    // Measured growth exponents (log-log slopes across the sweep).
    if rows.len() >= 2 {
        let pts = |col: usize| -> Vec<(f64, f64)> {
            rows.iter()
                .map(|r| (r[0].ln(), r[col].max(1e-300).ln()))
                .collect()
        };
        report.quantity("weak_growth_exponent_paper", least_squares_slope(&pts(1)));
        report.quantity("weak_growth_exponent_uniform", least_squares_slope(&pts(5)));
        report.quantity("strong_growth_exponent_paper", least_squares_slope(&pts(2)));
        report.quantity(
            "strong_growth_exponent_uniform",
            least_squares_slope(&pts(6)),
        );
        report.note(
            "paper shifts concentrate the singularities at t = 0, giving polynomial weak growth; \
             uniform shifts keep the weak norm near sqrt(n log n)",
        );
    }
    let find_ratio = |target_n: f64| -> Option<f64> {
        rows.iter().find(|r| r[0] == target_n).map(|r| r[7])
    };
    match (find_ratio(16.0), find_ratio(1024.0)) {
        (Some(r16), Some(r1024)) => {
            report.check(
                "ratio_uniform_grows_16_to_1024",
                r1024 > r16,
                format!("ratio(1024) = {r1024} vs ratio(16) = {r16}"),
            );
        }
        _ => report.note("sweep does not include both n = 16 and n = 1024; growth check skipped"),
    }

    // (d) Diagonal identity through the slice machinery, at a size where
    // the dense tensor operator is comfortable.
    let nd = cfg.n.min(32);
    let md = 64 * nd;
    let space = TensorSpace::new(SpaceDescriptor::grid_c(md), SpaceDescriptor::l1(nd))?;
    let mut t12 = TensorMap::<f64>::zeros(space, SpaceDescriptor::l2(nd))?;
    let scale = (nd as f64).sqrt();
    let mut bump_weights = Vec::with_capacity(nd);
    for k in 0..nd {
        let a = k as f64 / nd as f64;
        let b = (k + 1) as f64 / nd as f64;
        let w = interval_weights(md, a, b);
        for (i, &wi) in w.iter().enumerate() {
            *t12.entry_mut(k, i, k) = scale * wi;
        }
        bump_weights.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x12D5);
    let mut worst_rel = 0.0f64;
    for _ in 0..8 {
        let mut f = vec![0.0f64; md];
        for deg in 0..=6i64 {
            let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for (j, v) in f.iter_mut().enumerate() {
                let t = j as f64 / (md - 1) as f64;
                let ang = 2.0 * std::f64::consts::PI * deg as f64 * t;
                *v += a * ang.cos() + b * ang.sin();
            }
        }
        let hash = hash_operator(&t12, &f)?;
        let norm = op_norm(&hash)?;
        let rf_sup = bump_weights
            .iter()
            .map(|w| {
                let integral: f64 = w.iter().zip(&f).map(|(wi, fi)| wi * fi).sum();
                (scale * integral).abs()
            })
            .fold(0.0, f64::max);
        let rel = (norm.value - rf_sup).abs() / rf_sup.max(1e-300);
        worst_rel = worst_rel.max(rel);
    }
    report.quantity("diag_identity_max_rel_err", worst_rel);
    report.check(
        "diag_identity_opnorm_equals_sup",
        worst_rel <= 1e-9,
        format!("max rel err {worst_rel} at n = {nd}"),
    );
    report.note(format!(
        "diagonal identity exercised at n = {nd}, grid = {md}; bump functionals have unit Lorentz-dual norm"
    ));

    Ok(report)
}
