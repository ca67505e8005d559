//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured quantity and runtime.

use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use banachlab::experiments::{
    run_thm10, run_thm11, run_thm12, run_thm8, LambdaMode, ShiftMode, Thm10Config, Thm11Config,
    Thm12Config,
};
use banachlab::operators::{op_norm, LinearMap};
use banachlab::spaces::{fourier_coeff, Exponent, GridFunction, SpaceDescriptor};
use banachlab::summing::{
    pi2_hilbert_schmidt, pi2_pietsch_linf, pi_pq_lower_search, verify_pietsch_certificate,
};
use banachlab::tensor::{eps_norm3_assoc, Tensor3};

fn report(criterion: &str, passed: bool, detail: &str, elapsed: std::time::Duration) {
    println!(
        "acceptance {criterion}: {} ({detail}; {:.2}s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(passed, "{criterion}: {detail}");
}

#[test]
fn criterion_01_hilbert_schmidt_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = 0.0f64;
    for trial in 0..50 {
        let n = 2 + (trial % 7); // n ≤ 8
        let alpha: Vec<f64> = (0..n)
            .map(|_| {
                let v: f64 = rng.random_range(-2.0..2.0);
                if v.abs() < 0.05 {
                    0.5
                } else {
                    v
                }
            })
            .collect();
        let want = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        let t = LinearMap::diagonal(&alpha, SpaceDescriptor::l2(n), SpaceDescriptor::l2(n))
            .unwrap();

        let est = pi_pq_lower_search(&t, Exponent::TWO, Exponent::TWO, 60, trial as u64).unwrap();
        worst_lower = worst_lower.min(est.lower / want);

        let hs = pi2_hilbert_schmidt(&t).unwrap();
        worst_upper = worst_upper.max((hs.upper.unwrap() - want).abs());
        let viol = verify_pietsch_certificate(&t, &hs, 100, trial as u64).unwrap();
        assert!(viol <= 1e-9, "certificate violation {viol}");
    }
    let elapsed = start.elapsed();
    let passed = worst_lower >= 0.98 && worst_upper <= 1e-6 && elapsed.as_secs_f64() < 10.0;
    report(
        "criterion 1 (Hilbert-Schmidt identity)",
        passed,
        &format!("worst lower ratio {worst_lower:.6}, worst upper err {worst_upper:.2e}"),
        elapsed,
    );
}

#[test]
fn criterion_02_pietsch_exactness() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let id = LinearMap::from_rows(rows, SpaceDescriptor::linf(n), SpaceDescriptor::l2(n))
            .unwrap();
        let est = pi2_pietsch_linf(&id).unwrap();
        worst = worst.max((est.value() - (n as f64).sqrt()).abs());
    }
    let n = 10;
    let diag: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let t = LinearMap::diagonal(&diag, SpaceDescriptor::sup_seq(n), SpaceDescriptor::l2(n))
        .unwrap();
    let est = pi2_pietsch_linf(&t).unwrap();
    let want: f64 = (1..=n).map(|k| 1.0 / (k * k) as f64).sum::<f64>().sqrt();
    worst = worst.max((est.value() - want).abs());
    let elapsed = start.elapsed();
    let passed = worst <= 1e-6 && elapsed.as_secs_f64() < 5.0;
    report(
        "criterion 2 (Pietsch exactness)",
        passed,
        &format!("worst abs err {worst:.2e}"),
        elapsed,
    );
}

#[test]
fn criterion_03_eps_associativity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let coeffs: Vec<f64> = (0..27).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = Tensor3::from_flat(
            coeffs,
            [
                SpaceDescriptor::linf(3),
                SpaceDescriptor::linf(3),
                SpaceDescriptor::linf(3),
            ],
        )
        .unwrap();
        let a = eps_norm3_assoc(&w).unwrap();
        assert!(a.exact, "expected the exact enumeration regime");
        worst = worst.max((a.left - a.right).abs() / a.left.max(1e-300));
    }
    let elapsed = start.elapsed();
    let passed = worst <= 1e-9 && elapsed.as_secs_f64() < 30.0;
    report(
        "criterion 3 (epsilon associativity)",
        passed,
        &format!("worst relative disagreement {worst:.2e}"),
        elapsed,
    );
}

#[test]
fn criterion_04_thm11_constants() {
    let start = Instant::now();
    let third = (1.0f64 / 3.0).sqrt();
    let mut detail = String::new();
    let mut passed = true;
    for n in [2usize, 3, 4] {
        let r = run_thm11(&Thm11Config {
            n_block: n,
            grid: 4096,
            seed: 40 + n as u64,
            budget: 200,
        })
        .unwrap();
        let eps = r.get_quantity("y_star_eps_norm").unwrap();
        let pi = r.get_quantity("y_star_pi_dual_norm").unwrap();
        let z_low = r.get_quantity("z_lower").unwrap();
        let z_up = r.get_quantity("z_upper").unwrap();
        let sup = r.get_quantity("sup_lambda").unwrap();
        let ok = (eps - 0.5).abs() <= 1e-12
            && pi <= third + 1e-9
            && z_low >= sup / 3.0f64.sqrt() - 1e-3
            && z_up <= sup + 1e-9
            && r.failed_checks().is_empty();
        if !ok {
            passed = false;
            detail = format!("N={n}: eps {eps}, pi {pi}, z [{z_low}, {z_up}], sup {sup}");
        }
    }
    let elapsed = start.elapsed();
    passed = passed && elapsed.as_secs_f64() < 60.0;
    if detail.is_empty() {
        detail = "y* = 1/2 exact, pi-dual <= 1/sqrt(3), z bracket within tolerance".into();
    }
    report("criterion 4 (tent-family constants)", passed, &detail, elapsed);
}

#[test]
fn criterion_05_thm10_identities() {
    let start = Instant::now();
    // Ones mode at the full window and grid.
    let ones = run_thm10(&Thm10Config {
        p: 2.0,
        n_freq: 16,
        grid: 4096,
        lambda_mode: LambdaMode::Ones,
        seed: 55,
    })
    .unwrap();
    // Paper weights at p = 3/2 (r = 6 > s = 2).
    let weighted = run_thm10(&Thm10Config {
        p: 1.5,
        n_freq: 16,
        grid: 4096,
        lambda_mode: LambdaMode::PaperWeights,
        seed: 56,
    })
    .unwrap();
    let mut passed = true;
    let mut detail = String::new();
    for (label, r) in [("ones", &ones), ("paper", &weighted)] {
        let iso = r.get_quantity("u_isometry_max_err").unwrap();
        let ident = r.get_quantity("t_lambda_identity_max_err").unwrap();
        let pi2e = r.get_quantity("pi2_formula_max_err").unwrap();
        let diverging = r.table.column_flag("pi_s_lower") == Some(true);
        let ok = iso <= 1e-3
            && ident <= 1e-3
            && pi2e <= 1e-6
            && diverging
            && r.failed_checks().is_empty();
        if !ok {
            passed = false;
            detail = format!(
                "{label}: iso {iso:.2e}, ident {ident:.2e}, pi2 {pi2e:.2e}, diverging {diverging}"
            );
        }
    }
    // The divergence table spans N = 2^4 .. 2^12.
    passed = passed
        && ones.table.rows.first().map(|r| r[0]) == Some(16.0)
        && ones.table.rows.last().map(|r| r[0]) == Some(4096.0);
    let elapsed = start.elapsed();
    if detail.is_empty() {
        detail = "isometry, diagonal identity, pi2 formula, and divergence all within tolerance".into();
    }
    report("criterion 5 (Fourier multiplier identities)", passed, &detail, elapsed);
}

#[test]
fn criterion_06_thm8_gap() {
    let start = Instant::now();
    let r = run_thm8(16).unwrap();
    let h16: f64 = (1..=16).map(|k| 1.0 / k as f64).sum();
    let pi1 = r.get_quantity("pi1_lower").unwrap();
    let mut passed = pi1 >= 0.999 * h16;
    // π₂ stays below the Basel bound at every table row and the gap widens.
    for row in &r.table.rows {
        passed = passed && row[2] <= 1.2825;
    }
    passed = passed
        && r.table.column_flag("gap_ratio") == Some(true)
        && r.failed_checks().is_empty();
    let elapsed = start.elapsed();
    let passed = passed && elapsed.as_secs_f64() < 10.0;
    report(
        "criterion 6 (diagonal gap)",
        passed,
        &format!("pi1 {pi1:.4} vs 0.999*H_16 {:.4}", 0.999 * h16),
        elapsed,
    );
}

#[test]
fn criterion_07_thm12_lorentz_and_growth() {
    let start = Instant::now();
    let r = run_thm12(&Thm12Config {
        n: 1024,
        grid: 64 * 1024,
        shift_mode: ShiftMode::UniformShifts,
        seed: 77,
        sweep: vec![4, 16, 64, 256, 1024],
    })
    .unwrap();
    let lorentz_err = r.get_quantity("lorentz_max_rel_err").unwrap();
    let diag_err = r.get_quantity("diag_identity_max_rel_err").unwrap();
    let ratio = |n: f64| {
        r.table
            .rows
            .iter()
            .find(|row| row[0] == n)
            .map(|row| row[7])
            .unwrap()
    };
    let exponents_published = r.get_quantity("weak_growth_exponent_paper").is_some()
        && r.get_quantity("weak_growth_exponent_uniform").is_some();
    let passed = lorentz_err <= 0.01
        && diag_err <= 1e-9
        && ratio(1024.0) > ratio(16.0)
        && exponents_published
        && r.failed_checks().is_empty();
    report(
        "criterion 7 (Lorentz embedding growth)",
        passed,
        &format!(
            "lorentz err {lorentz_err:.4}, diag err {diag_err:.2e}, ratio 16→1024: {:.3}→{:.3}",
            ratio(16.0),
            ratio(1024.0)
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_08_little_grothendieck() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let t = LinearMap::from_rows(rows, SpaceDescriptor::linf(5), SpaceDescriptor::l2(5))
            .unwrap();
        let est = pi2_pietsch_linf(&t).unwrap();
        let norm = op_norm(&t).unwrap().value;
        worst = worst.max(est.value() / norm);
    }
    let elapsed = start.elapsed();
    let passed = worst <= 1.26 && elapsed.as_secs_f64() < 20.0;
    report(
        "criterion 8 (little Grothendieck ratio)",
        passed,
        &format!("max pi2/opnorm = {worst:.4}"),
        elapsed,
    );
}

#[test]
fn criterion_09_hausdorff_young() {
    let start = Instant::now();
    let m = 2048usize;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst_slack = f64::INFINITY;
    for trial in 0..100 {
        let deg = 1 + (trial * 7) % (m / 8);
        let mut samples = vec![0.0f64; m];
        // A handful of random frequencies up to the degree keeps each trial
        // cheap while exercising the full range.
        let mut freqs = vec![0i64, deg as i64];
        for _ in 0..6 {
            freqs.push(rng.random_range(0..=deg as i64));
        }
        freqs.dedup();
        let mut amps = Vec::new();
        for &f in &freqs {
            let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            amps.push((f, a, b));
        }
        for (j, s) in samples.iter_mut().enumerate() {
            let t = j as f64 / (m - 1) as f64;
            for &(f, a, b) in &amps {
                let ang = 2.0 * std::f64::consts::PI * f as f64 * t;
                *s += a * ang.cos() + b * ang.sin();
            }
        }
        let f = GridFunction::new(samples, SpaceDescriptor::grid_c(m)).unwrap();
        let window: Vec<i64> = {
            let mut w: Vec<i64> = amps.iter().flat_map(|&(fr, _, _)| [fr, -fr]).collect();
            w.sort_unstable();
            w.dedup();
            w
        };
        for p in [1.0, 4.0 / 3.0, 2.0] {
            let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
            let coeffs: Vec<f64> = window
                .iter()
                .map(|&k| fourier_coeff(&f, k).unwrap().norm())
                .collect();
            let lhs = if q.is_infinite() {
                coeffs.iter().cloned().fold(0.0, f64::max)
            } else {
                coeffs.iter().map(|c| c.powf(q)).sum::<f64>().powf(1.0 / q)
            };
            let rhs = f.lp_norm(Exponent::new(p).unwrap()).unwrap();
            worst_slack = worst_slack.min(rhs - lhs);
        }
    }
    let passed = worst_slack >= -1e-6;
    report(
        "criterion 9 (Hausdorff-Young)",
        passed,
        &format!("min slack {worst_slack:.2e}"),
        start.elapsed(),
    );
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    let runs = || -> Vec<String> {
        vec![
            run_thm8(5).unwrap().to_json_string(),
            run_thm10(&Thm10Config {
                p: 1.5,
                n_freq: 4,
                grid: 512,
                lambda_mode: LambdaMode::PaperWeights,
                seed: 5,
            })
            .unwrap()
            .to_json_string(),
            run_thm11(&Thm11Config {
                n_block: 2,
                grid: 512,
                seed: 6,
                budget: 50,
            })
            .unwrap()
            .to_json_string(),
            run_thm12(&Thm12Config {
                n: 8,
                grid: 512,
                shift_mode: ShiftMode::PaperShifts,
                seed: 7,
                sweep: vec![4, 8],
            })
            .unwrap()
            .to_json_string(),
        ]
    };
    let a = runs();
    let b = runs();
    let passed = a == b;
    report(
        "criterion 10 (byte-identical reports)",
        passed,
        &format!("{} experiment reports compared", a.len()),
        start.elapsed(),
    );
}
