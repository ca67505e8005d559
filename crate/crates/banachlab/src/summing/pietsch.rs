//! π₂ computation with Pietsch domination certificates.
//!
//! Domain dispatch:
//! - ℓ_∞/SupSeq → ℓ_2: π₂(T) = min over probability weights w of
//!   ‖T·diag(w^{−1/2})‖. The dual problem max{tr(TᵀT·G) : G ⪰ 0, G_jj ≤ 1}
//!   is solved by a projected-gradient ascent on the factor G = XᵀX (the
//!   rows of X are a witness family); weights recovered from the factor are
//!   polished by multiplicative updates and coordinate line searches. Any
//!   feasible w certifies an upper bound, any feasible X a lower bound.
//! - ℓ_2 → ℓ_2: the Hilbert–Schmidt identity π₂ = Frobenius norm; the
//!   certificate weights sit on the right singular directions.
//! - ℓ_1 → ℓ_2 (n ≤ 16): the same dual SDP with the constraint
//!   max_s sᵀGs ≤ 1 checked by enumeration over the 2^n dual sign vectors;
//!   the upper bound searches sign-supported Pietsch measures.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operators::{gram, op_norm, to_dmatrix, LinearMap};
use crate::spaces::{Exponent, SpaceDescriptor};
use crate::summing::{Certificate, SummingEstimate, WeakFamily};

const STALL_WINDOW: usize = 50;
const STALL_REL: f64 = 1e-10;

fn require_l2_codomain(t: &LinearMap<f64>, op: &'static str) -> Result<()> {
    match t.codomain().sequence_exponent() {
        Some(q) if q.get() == 2.0 => Ok(()),
        _ => Err(Error::unsupported(op, "codomain must be an l2 sequence space")),
    }
}

/// π₂ with domain-dependent strategy (see module docs).
pub fn pi2(t: &LinearMap<f64>) -> Result<SummingEstimate> {
    let p = t
        .domain()
        .sequence_exponent()
        .ok_or_else(|| Error::unsupported("pi2", "domain must be a sequence space"))?;
    if p.is_infinite() {
        pi2_pietsch_linf(t)
    } else if p.get() == 2.0 {
        pi2_hilbert_schmidt(t)
    } else if p.get() == 1.0 {
        pi2_l1(t)
    } else {
        Err(Error::unsupported(
            "pi2",
            "exact pi2 is implemented for l1, l2 and l_inf/sup-seq domains",
        ))
    }
}

// ---------------------------------------------------------------------------
// ℓ_∞ domain
// ---------------------------------------------------------------------------

/// Exact π₂ on an ℓ_∞/SupSeq domain with a weight certificate and a witness
/// family reproducing the value from below.
pub fn pi2_pietsch_linf(t: &LinearMap<f64>) -> Result<SummingEstimate> {
    if !t.domain().is_sup_sequence() {
        return Err(Error::unsupported(
            "pi2_pietsch_linf",
            format!("domain must be l_inf/sup-seq, got {:?}", t.domain()),
        ));
    }
    require_l2_codomain(t, "pi2_pietsch_linf")?;
    let n = t.cols();

    if t.is_zero() {
        let witness = WeakFamily::standard_basis(t.domain().clone(), Exponent::TWO)?;
        return SummingEstimate::new(
            Exponent::TWO,
            Exponent::TWO,
            0.0,
            witness,
            Some(0.0),
            Some(Certificate::PietschWeights {
                weights: vec![1.0 / n as f64; n],
                directions: None,
            }),
        );
    }

    let a = gram(t);
    let x = bm_column_ascent(&a);
    let g = x.transpose() * &x;
    let lower = ((&x * &a).component_mul(&x)).sum().max(0.0).sqrt();

    let max_diag = (0..n).map(|j| a[(j, j)]).fold(0.0f64, f64::max);
    let support: Vec<usize> = (0..n).filter(|&j| a[(j, j)] > 1e-13 * max_diag).collect();

    // Weight candidates: recovered multipliers, the diagonal of the Gram
    // matrix (exact for diagonal operators), and uniform.
    let ag = &a * &g;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    candidates.push(normalize_weights(
        &support.iter().map(|&j| ag[(j, j)].max(0.0)).collect::<Vec<_>>(),
    ));
    candidates.push(normalize_weights(
        &support.iter().map(|&j| a[(j, j)]).collect::<Vec<_>>(),
    ));
    candidates.push(vec![1.0 / support.len() as f64; support.len()]);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for w in candidates {
        let (f, _) = pietsch_value(&a, &support, &w);
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, w));
        }
    }
    let (mut best_f, mut best_w) = best.unwrap();

    // Multiplicative / blended updates driven by the current maximizer.
    let mut stall = 0usize;
    for _ in 0..200 {
        let (_, xstar) = pietsch_value(&a, &support, &best_w);
        let d = normalize_weights(&xstar.iter().map(|x| x * x).collect::<Vec<_>>());
        let mut improved = false;
        for &tstep in &[1.0, 0.5, 0.25, 0.1, 0.03] {
            let blend: Vec<f64> = best_w
                .iter()
                .zip(&d)
                .map(|(&w, &dj)| (1.0 - tstep) * w + tstep * dj)
                .collect();
            let mult: Vec<f64> = best_w
                .iter()
                .zip(&d)
                .map(|(&w, &dj)| w * (dj + 1e-18).powf(tstep))
                .collect();
            for cand in [normalize_weights(&blend), normalize_weights(&mult)] {
                let (f, _) = pietsch_value(&a, &support, &cand);
                if f < best_f * (1.0 - 1e-14) {
                    best_f = f;
                    best_w = cand;
                    improved = true;
                }
            }
        }
        if improved {
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_WINDOW {
                break;
            }
        }
        if best_f <= lower * (1.0 + 1e-11) {
            break;
        }
    }

    // Coordinate line searches close any remaining gap.
    if best_f > lower * (1.0 + 1e-9) && support.len() <= 64 {
        coordinate_polish(&a, &support, &mut best_w, &mut best_f);
    }

    let upper = best_f.max(lower);
    let mut weights = vec![0.0; n];
    for (slot, &j) in support.iter().enumerate() {
        weights[j] = best_w[slot];
    }

    let members: Vec<Vec<f64>> = (0..x.nrows())
        .map(|i| x.row(i).iter().cloned().collect())
        .filter(|row: &Vec<f64>| row.iter().any(|v| v.abs() > 1e-14))
        .collect();
    let witness = if members.is_empty() {
        WeakFamily::standard_basis(t.domain().clone(), Exponent::TWO)?
    } else {
        WeakFamily::new(members, t.domain().clone(), Exponent::TWO)?
    };

    SummingEstimate::new(
        Exponent::TWO,
        Exponent::TWO,
        lower,
        witness,
        Some(upper),
        Some(Certificate::PietschWeights {
            weights,
            directions: None,
        }),
    )
}

/// λ_max(D_w^{−1/2} A D_w^{−1/2}) on the support, padded by 1e−12 relative
/// so the returned value is a sound upper bound; also returns the ratio
/// maximizer x* (in x-coordinates, scaled to ⟨w, x*²⟩ = 1).
fn pietsch_value(a: &DMatrix<f64>, support: &[usize], w: &[f64]) -> (f64, Vec<f64>) {
    let k = support.len();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (u, &ju) in support.iter().enumerate() {
        for (v, &jv) in support.iter().enumerate() {
            m[(u, v)] = a[(ju, jv)] / (w[u] * w[v]).sqrt();
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut lmax = 0.0f64;
    let mut idx = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > lmax {
            lmax = l;
            idx = i;
        }
    }
    let v = eig.eigenvectors.column(idx);
    let mut xstar = vec![0.0; k];
    let mut scale = 0.0;
    for u in 0..k {
        xstar[u] = v[u] / w[u].sqrt();
        scale += w[u] * xstar[u] * xstar[u];
    }
    let scale = scale.sqrt().max(1e-300);
    for xs in &mut xstar {
        *xs /= scale;
    }
    (lmax.max(0.0).sqrt() * (1.0 + 1e-12), xstar)
}

fn coordinate_polish(a: &DMatrix<f64>, support: &[usize], w: &mut Vec<f64>, f: &mut f64) {
    let k = support.len();
    for _pass in 0..12 {
        let mut improved = false;
        for j in 0..k {
            let base = w.clone();
            for &t in &[-0.5, -0.2, -0.05, 0.05, 0.2, 0.5, 1.0] {
                let delta = t * base[j].max(1e-6);
                if base[j] + delta <= 1e-12 {
                    continue;
                }
                let mut cand = base.clone();
                cand[j] += delta;
                let cand = normalize_weights(&cand);
                let (fc, _) = pietsch_value(a, support, &cand);
                if fc < *f * (1.0 - 1e-13) {
                    *f = fc;
                    *w = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

fn normalize_weights(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().map(|x| x.max(0.0)).sum();
    if total <= 0.0 {
        return vec![1.0 / w.len() as f64; w.len()];
    }
    w.iter().map(|x| x.max(1e-300) / total).collect()
}

/// Projected-gradient ascent for max tr(XAXᵀ) subject to each column of X
/// having ℓ_2 norm ≤ 1 (the dual SDP in factored form; rows of X are a
/// witness family with weak-ℓ_2 norm ≤ 1).
fn bm_column_ascent(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9137_44D0_21C6_5EE3);
    let obj = |x: &DMatrix<f64>| ((x * a).component_mul(x)).sum();
    let project = |x: &mut DMatrix<f64>| {
        for j in 0..n {
            let nc = x.column(j).norm();
            if nc > 1.0 {
                let mut col = x.column_mut(j);
                col /= nc;
            }
        }
    };
    let mut best_x = DMatrix::<f64>::identity(n, n);
    let mut best_obj = obj(&best_x);
    let a_scale = a.norm().max(1e-300);
    for restart in 0..3 {
        let mut x = match restart {
            0 => DMatrix::<f64>::identity(n, n),
            _ => {
                let mut m = DMatrix::<f64>::zeros(n, n);
                for v in m.iter_mut() {
                    *v = rng.random_range(-1.0..1.0) / (n as f64).sqrt();
                }
                m
            }
        };
        project(&mut x);
        let mut cur = obj(&x);
        let mut eta = 1.0 / a_scale;
        let mut stall = 0usize;
        for _ in 0..4000 {
            let grad = &x * a * 2.0;
            let mut xn = &x + grad * eta;
            project(&mut xn);
            let no = obj(&xn);
            if no > cur * (1.0 + 1e-15) + 1e-300 {
                let rel = (no - cur) / no.max(1e-300);
                x = xn;
                cur = no;
                if rel < STALL_REL {
                    stall += 1;
                    if stall >= STALL_WINDOW {
                        break;
                    }
                } else {
                    stall = 0;
                }
            } else {
                eta *= 0.5;
                if eta < 1e-16 / a_scale {
                    break;
                }
            }
        }
        if cur > best_obj {
            best_obj = cur;
            best_x = x;
        }
    }
    best_x
}

// ---------------------------------------------------------------------------
// ℓ_2 domain: Hilbert–Schmidt identity
// ---------------------------------------------------------------------------

/// π₂ of an ℓ_2 → ℓ_2 operator: the Frobenius norm, certified from below by
/// the orthonormal-basis family and from above by weights on the right
/// singular directions.
pub fn pi2_hilbert_schmidt(t: &LinearMap<f64>) -> Result<SummingEstimate> {
    require_l2_codomain(t, "pi2_hilbert")?;
    let value = t.frobenius_norm();
    let witness = WeakFamily::standard_basis(t.domain().clone(), Exponent::TWO)?;
    if value == 0.0 {
        return SummingEstimate::new(
            Exponent::TWO,
            Exponent::TWO,
            0.0,
            witness,
            Some(0.0),
            Some(Certificate::PietschWeights {
                weights: vec![1.0 / t.cols() as f64; t.cols()],
                directions: None,
            }),
        );
    }
    let svd = to_dmatrix(t).svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let mut weights = Vec::new();
    let mut directions = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if s * s > 1e-300 {
            weights.push(s * s / total);
            directions.push(vt.row(k).iter().cloned().collect());
        }
    }
    SummingEstimate::new(
        Exponent::TWO,
        Exponent::TWO,
        value,
        witness,
        Some(value),
        Some(Certificate::PietschWeights {
            weights,
            directions: Some(directions),
        }),
    )
}

// ---------------------------------------------------------------------------
// ℓ_1 domain
// ---------------------------------------------------------------------------

/// π₂ on an ℓ_1 domain (n ≤ 16): the dual SDP with its feasibility checked
/// by enumeration over the 2^n dual sign vectors. The certified value is the
/// lower bound; the sign-measure upper bound brackets it.
pub fn pi2_l1(t: &LinearMap<f64>) -> Result<SummingEstimate> {
    match t.domain().sequence_exponent() {
        Some(p) if p.get() == 1.0 => {}
        _ => {
            return Err(Error::unsupported(
                "pi2_l1",
                format!("domain must be l1, got {:?}", t.domain()),
            ))
        }
    }
    require_l2_codomain(t, "pi2_l1")?;
    let n = t.cols();
    if n > 16 {
        return Err(Error::unsupported(
            "pi2_l1",
            "sign-vector enumeration is capped at dimension 16",
        ));
    }
    let witness_basis = WeakFamily::standard_basis(t.domain().clone(), Exponent::TWO)?;
    if t.is_zero() {
        return SummingEstimate::new(
            Exponent::TWO,
            Exponent::TWO,
            0.0,
            witness_basis,
            Some(0.0),
            Some(Certificate::PietschWeights {
                weights: vec![1.0 / n as f64; n],
                directions: None,
            }),
        );
    }
    let a = gram(t);

    // Lower: ascent on X with radial projection by the exact sign maximum.
    let mut rng = ChaCha8Rng::seed_from_u64(0x51D2_BA11_7E60_0A3C);
    let obj = |x: &DMatrix<f64>| ((x * &a).component_mul(x)).sum();
    let mut best_x = DMatrix::<f64>::identity(n, n);
    let mut best_obj = 0.0f64;
    for restart in 0..3 {
        let mut x = match restart {
            0 => DMatrix::<f64>::identity(n, n),
            _ => {
                let mut m = DMatrix::<f64>::zeros(n, n);
                for v in m.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                }
                m
            }
        };
        radial_sign_project(&mut x);
        let mut cur = obj(&x);
        let mut eta = 1.0 / a.norm().max(1e-300);
        for _ in 0..600 {
            let grad = &x * &a * 2.0;
            let mut xn = &x + grad * eta;
            radial_sign_project(&mut xn);
            let no = obj(&xn);
            if no > cur * (1.0 + 1e-15) + 1e-300 {
                x = xn;
                cur = no;
            } else {
                eta *= 0.5;
                if eta * a.norm() < 1e-15 {
                    break;
                }
            }
        }
        if cur > best_obj {
            best_obj = cur;
            best_x = x;
        }
    }
    radial_sign_project(&mut best_x);
    let mut lower = obj(&best_x).max(0.0).sqrt();

    // Coordinate corners G = e_j e_jᵀ are always feasible and exact for
    // rank-one operators; the radial projection can stall the ascent on a
    // suboptimal ray, so the corners are compared explicitly.
    let mut corner: Option<usize> = None;
    for j in 0..n {
        let v = a[(j, j)].max(0.0).sqrt();
        if v > lower {
            lower = v;
            corner = Some(j);
        }
    }

    // Upper: Pietsch measures supported on sign vectors (plus the uniform
    // sign measure, whose second moment is the identity).
    let upper = sign_measure_upper(&a, lower);

    let members: Vec<Vec<f64>> = match corner {
        Some(j) => {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            vec![e]
        }
        None => (0..n)
            .map(|i| best_x.row(i).iter().cloned().collect())
            .filter(|row: &Vec<f64>| row.iter().any(|v| v.abs() > 1e-14))
            .collect(),
    };
    let witness = if members.is_empty() {
        witness_basis
    } else {
        WeakFamily::new(members, t.domain().clone(), Exponent::TWO)?
    };

    let mut directions: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    // The uniform sign measure (second moment I) expands exactly into the
    // 32 rows of a Sylvester–Hadamard matrix restricted to n ≤ 16 columns:
    // Σ_k (1/32)·h_k h_kᵀ = I because distinct columns are orthogonal.
    if upper.1[0] > 0.0 {
        for k in 0..32u32 {
            let row: Vec<f64> = (0..n)
                .map(|j| {
                    if (k & j as u32).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            directions.push(row);
            weights.push(upper.1[0] / 32.0);
        }
    }
    for (s, &w) in upper.2.iter().zip(upper.1.iter().skip(1)) {
        directions.push(s.clone());
        weights.push(w);
    }

    SummingEstimate::new(
        Exponent::TWO,
        Exponent::TWO,
        lower,
        witness,
        Some(upper.0.max(lower)),
        Some(Certificate::PietschWeights {
            weights,
            directions: Some(directions),
        }),
    )
}

/// max_s ‖Xs‖ over sign vectors, by Gray-code enumeration.
fn max_over_signs(x: &DMatrix<f64>) -> f64 {
    let n = x.ncols();
    let k = x.nrows();
    let mut s = vec![1.0f64; n];
    let mut y: Vec<f64> = (0..k).map(|i| x.row(i).sum()).collect();
    let norm2 = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>();
    let mut best = norm2(&y);
    let total: u64 = 1u64 << n;
    for code in 1..total {
        let b = code.trailing_zeros() as usize;
        s[b] = -s[b];
        let delta = 2.0 * s[b];
        for i in 0..k {
            y[i] += delta * x[(i, b)];
        }
        if code % 4096 == 0 {
            for i in 0..k {
                y[i] = x.row(i).iter().zip(&s).map(|(a, b)| a * b).sum();
            }
        }
        best = best.max(norm2(&y));
    }
    best.sqrt()
}

fn radial_sign_project(x: &mut DMatrix<f64>) {
    let c = max_over_signs(x);
    if c > 0.0 {
        *x /= c;
    }
}

/// Fully-corrective Frank–Wolfe over sign-supported Pietsch measures:
/// returns (best upper value, atom weights with the uniform measure first,
/// sign atoms).
fn sign_measure_upper(a: &DMatrix<f64>, target_lower: f64) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let n = a.nrows();
    let mut atoms: Vec<Vec<f64>> = Vec::new();

    // Seed atoms: signs of the top eigenvectors of A and the all-ones sign.
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    for &i in order.iter().take(3) {
        let s: Vec<f64> = eig
            .eigenvectors
            .column(i)
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        push_unique(&mut atoms, s);
    }
    push_unique(&mut atoms, vec![1.0; n]);

    let mut beta = vec![1.0; 1 + atoms.len()];
    normalize_simplex(&mut beta);
    let mut best = (f64::INFINITY, beta.clone(), atoms.clone());

    for _outer in 0..12 {
        // Inner multiplicative reweighting on the current atom set.
        for _inner in 0..60 {
            let w = mix_measure(n, &beta, &atoms);
            let Some((f, xstar)) = generalized_top(a, &w) else {
                break;
            };
            if f < best.0 {
                best = (f, beta.clone(), atoms.clone());
                if f <= target_lower * (1.0 + 1e-9) {
                    return best;
                }
            }
            // Push mass toward atoms the maximizer "sees".
            let denom = quad_form(&w, &xstar).max(1e-300);
            let mut scores = Vec::with_capacity(beta.len());
            scores.push(xstar.iter().map(|v| v * v).sum::<f64>() / denom);
            for s in &atoms {
                let dot: f64 = s.iter().zip(&xstar).map(|(a, b)| a * b).sum();
                scores.push(dot * dot / denom);
            }
            for (b, sc) in beta.iter_mut().zip(&scores) {
                *b *= (0.35 * sc).exp();
            }
            normalize_simplex(&mut beta);
        }
        // Oracle step: add the sign of the current maximizer as a new atom.
        let w = mix_measure(n, &beta, &atoms);
        let Some((_, xstar)) = generalized_top(a, &w) else {
            break;
        };
        let s: Vec<f64> = xstar
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        if !push_unique(&mut atoms, s) {
            break;
        }
        beta.push(0.05);
        normalize_simplex(&mut beta);
    }
    if !best.0.is_finite() {
        // Crude but valid fallback: π₂(Σ_j col_j ⊗ e_j*) ≤ Σ_j ‖col_j‖₂.
        let crude: f64 = (0..n).map(|j| a[(j, j)].max(0.0).sqrt()).sum();
        best = (crude, vec![1.0], Vec::new());
    }
    best
}

fn push_unique(atoms: &mut Vec<Vec<f64>>, s: Vec<f64>) -> bool {
    let neg: Vec<f64> = s.iter().map(|v| -v).collect();
    if atoms.iter().any(|a| *a == s || *a == neg) {
        return false;
    }
    atoms.push(s);
    true
}

fn normalize_simplex(b: &mut [f64]) {
    let total: f64 = b.iter().map(|x| x.max(0.0)).sum();
    if total <= 0.0 {
        let u = 1.0 / b.len() as f64;
        b.iter_mut().for_each(|x| *x = u);
    } else {
        b.iter_mut().for_each(|x| *x = x.max(1e-300) / total);
    }
}

/// Second-moment matrix of the measure: β₀·I (uniform signs) + Σ β_k s_k s_kᵀ.
fn mix_measure(n: usize, beta: &[f64], atoms: &[Vec<f64>]) -> DMatrix<f64> {
    let mut w = DMatrix::<f64>::identity(n, n) * beta[0];
    for (s, &b) in atoms.iter().zip(beta.iter().skip(1)) {
        if b <= 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] += b * s[i] * s[j];
            }
        }
    }
    w
}

fn quad_form(w: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * w[(i, j)] * x[j];
        }
    }
    acc
}

/// Top generalized eigenvalue/vector of (A, W): value is a sound upper
/// candidate λ with maximizer x*. Returns None on a singular W.
fn generalized_top(a: &DMatrix<f64>, w: &DMatrix<f64>) -> Option<(f64, Vec<f64>)> {
    let n = a.nrows();
    // Mass-preserving regularization keeps the value a valid measure bound.
    let eps = 1e-12;
    let w_reg = (w + DMatrix::<f64>::identity(n, n) * eps) / (1.0 + eps);
    let chol = w_reg.clone().cholesky()?;
    let l = chol.l();
    let y = l.solve_lower_triangular(a)?;
    let m_t = l.solve_lower_triangular(&y.transpose())?;
    let m = (&m_t + m_t.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut lmax = 0.0f64;
    let mut idx = 0;
    for (i, &lv) in eig.eigenvalues.iter().enumerate() {
        if lv > lmax {
            lmax = lv;
            idx = i;
        }
    }
    let u = eig.eigenvectors.column(idx).into_owned();
    // x* = L^{-T} u.
    let x = l.transpose().solve_upper_triangular(&u)?;
    let value = (lmax.max(0.0) * (1.0 + eps)).sqrt() * (1.0 + 1e-12);
    Some((value, x.iter().cloned().collect()))
}

// ---------------------------------------------------------------------------
// Grid inclusion and the ratio operation
// ---------------------------------------------------------------------------

/// π₂ of the natural inclusion J: C[0,1] → L₂[0,1] at grid resolution:
/// equals 1, certified by the trapezoid (Lebesgue) weights above and the
/// constant function below. The domination ∫f² ≤ Σ w_j f_j² follows from
/// (a² + ab + b²)/3 ≤ (a² + b²)/2 per cell.
pub fn pi2_grid_inclusion(points: usize) -> Result<SummingEstimate> {
    if points < 2 {
        return Err(Error::invalid("grids need at least 2 points"));
    }
    let h = 1.0 / (points - 1) as f64;
    let mut weights = vec![h; points];
    weights[0] = h / 2.0;
    weights[points - 1] = h / 2.0;

    let witness = WeakFamily::new(
        vec![vec![1.0; points]],
        SpaceDescriptor::grid_c(points),
        Exponent::TWO,
    )?;
    SummingEstimate::new(
        Exponent::TWO,
        Exponent::TWO,
        1.0,
        witness,
        Some(1.0 + 1e-12),
        Some(Certificate::PietschWeights {
            weights,
            directions: None,
        }),
    )
}

/// π₂(T)/‖T‖ for C(K)- or ℓ_1-style domains; 0 for the zero map.
pub fn pi2_vs_opnorm(t: &LinearMap<f64>) -> Result<f64> {
    if t.is_zero() {
        return Ok(0.0);
    }
    let est = if t.domain().is_sup_sequence() {
        pi2_pietsch_linf(t)?
    } else {
        match t.domain().sequence_exponent() {
            Some(p) if p.get() == 1.0 => pi2_l1(t)?,
            _ => {
                return Err(Error::unsupported(
                    "pi2_vs_opnorm",
                    "domain must be l_inf/sup-seq or l1",
                ))
            }
        }
    };
    // l_inf domains report the certified upper (tight); l1 domains the
    // certified enumeration lower (the sign-measure upper is a bracket).
    let value = if t.domain().is_sup_sequence() {
        est.value()
    } else {
        est.lower
    };
    let norm = op_norm(t)?.value;
    Ok(value / norm)
}

/// Max relative violation of the Pietsch domination over `samples` seeded
/// random inputs; soundness means the result stays ≤ ~1e−9.
pub fn verify_pietsch_certificate(
    t: &LinearMap<f64>,
    est: &SummingEstimate,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let Some(Certificate::PietschWeights { weights, directions }) = &est.upper_certificate else {
        return Err(Error::invalid("estimate carries no Pietsch weight certificate"));
    };
    let c = est.upper.ok_or_else(|| Error::invalid("certificate without upper value"))?;
    let n = t.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let img = t.apply_slice(&x);
        let lhs: f64 = img.iter().map(|v| v * v).sum();
        let rhs = match directions {
            None => weights.iter().zip(&x).map(|(&w, &xi)| w * xi * xi).sum::<f64>(),
            Some(dirs) => dirs
                .iter()
                .zip(weights)
                .map(|(d, &w)| {
                    let dot: f64 = d.iter().zip(&x).map(|(a, b)| a * b).sum();
                    w * dot * dot
                })
                .sum(),
        };
        let viol = (lhs - c * c * rhs) / (lhs.abs() + c * c * rhs.abs()).max(1e-300);
        worst = worst.max(viol);
    }
    Ok(worst)
}
