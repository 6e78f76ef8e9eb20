//! Independent reference computations used by the test suites.
//!
//! Nothing here calls the library's arithmetic: energies are recomputed from
//! the displayed formulas with explicit loops, gradients come from central
//! finite differences, and AUC-PR from enumerating every threshold.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sme_core::{
    BilinearParams, EmbeddingTable, Form, LinearParams, Matrix, Model, Params, Tensor3, Triple,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random model with `n` symbols (the last one a relation type) and
/// non-zero biases.
pub fn random_model(form: Form, n: usize, d: usize, p: usize, seed: u64) -> Model {
    let mut r = rng(seed);
    let mut flags = vec![false; n];
    flags[n - 1] = true;
    let emb = EmbeddingTable::from_matrix(
        Matrix::from_vec(n, d, uniform_vec(&mut r, n * d)).unwrap(),
        flags,
    )
    .unwrap();
    let params = match form {
        Form::Linear => Params::Linear(LinearParams {
            w_l1: Matrix::from_vec(p, d, uniform_vec(&mut r, p * d)).unwrap(),
            w_l2: Matrix::from_vec(p, d, uniform_vec(&mut r, p * d)).unwrap(),
            w_r1: Matrix::from_vec(p, d, uniform_vec(&mut r, p * d)).unwrap(),
            w_r2: Matrix::from_vec(p, d, uniform_vec(&mut r, p * d)).unwrap(),
            b_l: uniform_vec(&mut r, p),
            b_r: uniform_vec(&mut r, p),
        }),
        Form::Bilinear => Params::Bilinear(BilinearParams {
            w_l: Tensor3::from_vec((p, d, d), uniform_vec(&mut r, p * d * d)).unwrap(),
            w_r: Tensor3::from_vec((p, d, d), uniform_vec(&mut r, p * d * d)).unwrap(),
            b_l: uniform_vec(&mut r, p),
            b_r: uniform_vec(&mut r, p),
        }),
    };
    Model::new(emb, params).unwrap()
}

// ---------------------------------------------------------------------------
// Tensor and energy formulas
// ---------------------------------------------------------------------------

/// `M[i][j] = Σ_k t[i,j,k] v[k]` by a plain triple loop.
pub fn contract_triple_loop(t: &Tensor3, v: &[f64]) -> Vec<Vec<f64>> {
    let (n1, n2, n3) = t.shape();
    let mut m = vec![vec![0.0; n2]; n1];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..n3 {
                *cell += t.get(i, j, k) * v[k];
            }
        }
    }
    m
}

fn mat_times(m: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..m.cols() {
                s += m.get(i, j) * v[j];
            }
            s
        })
        .collect()
}

/// `−(W_l1 e_lhs + W_l2 e_rel + b_l)ᵀ (W_r1 e_rhs + W_r2 e_rel + b_r)`.
pub fn linear_energy_formula(e_lhs: &[f64], e_rel: &[f64], e_rhs: &[f64], w: &LinearParams) -> f64 {
    let a1 = mat_times(&w.w_l1, e_lhs);
    let a2 = mat_times(&w.w_l2, e_rel);
    let c1 = mat_times(&w.w_r1, e_rhs);
    let c2 = mat_times(&w.w_r2, e_rel);
    let mut e = 0.0;
    for i in 0..a1.len() {
        e -= (a1[i] + a2[i] + w.b_l[i]) * (c1[i] + c2[i] + w.b_r[i]);
    }
    e
}

/// `−((W_l ×̄₃ e_rel) e_lhs + b_l)ᵀ ((W_r ×̄₃ e_rel) e_rhs + b_r)` with all
/// contractions written out as sums over `(j, k)`.
pub fn bilinear_energy_formula(
    e_lhs: &[f64],
    e_rel: &[f64],
    e_rhs: &[f64],
    w: &BilinearParams,
) -> f64 {
    let (p, d, _) = w.w_l.shape();
    let mut e = 0.0;
    for i in 0..p {
        let mut left = w.b_l[i];
        let mut right = w.b_r[i];
        for j in 0..d {
            for k in 0..d {
                left += w.w_l.get(i, j, k) * e_lhs[j] * e_rel[k];
                right += w.w_r.get(i, j, k) * e_rhs[j] * e_rel[k];
            }
        }
        e -= left * right;
    }
    e
}

pub fn energy_formula(model: &Model, t: Triple) -> f64 {
    let emb = &model.embeddings;
    let (l, r, h) = (
        emb.row(t.lhs).unwrap(),
        emb.row(t.rel).unwrap(),
        emb.row(t.rhs).unwrap(),
    );
    match &model.params {
        Params::Linear(w) => linear_energy_formula(l, r, h, w),
        Params::Bilinear(w) => bilinear_energy_formula(l, r, h, w),
    }
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

pub const FD_STEP: f64 = 1e-5;

/// Central difference of `f` along the coordinate that `nudge` shifts.
fn central_difference(
    model: &Model,
    nudge: impl Fn(&mut Model, f64),
    f: &impl Fn(&Model) -> f64,
) -> f64 {
    let mut plus = model.clone();
    nudge(&mut plus, FD_STEP);
    let mut minus = model.clone();
    nudge(&mut minus, -FD_STEP);
    (f(&plus) - f(&minus)) / (2.0 * FD_STEP)
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Numeric gradients of `f` with respect to every parameter coordinate, in
/// `Params::blocks` order.
pub fn fd_param_gradient(model: &Model, f: impl Fn(&Model) -> f64) -> Vec<Vec<f64>> {
    let sizes: Vec<usize> = model.params.blocks().iter().map(|b| b.len()).collect();
    sizes
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            (0..n)
                .map(|i| central_difference(model, |m, h| m.params.blocks_mut()[b][i] += h, &f))
                .collect()
        })
        .collect()
}

/// Numeric gradient of `f` with respect to one embedding row.
pub fn fd_row_gradient(model: &Model, id: usize, f: impl Fn(&Model) -> f64) -> Vec<f64> {
    (0..model.embeddings.dim())
        .map(|j| central_difference(model, |m, h| m.embeddings.row_mut(id).unwrap()[j] += h, &f))
        .collect()
}

/// Largest relative error between analytic energy gradients of `t` and
/// central differences of the formula oracle, over every parameter and
/// embedding coordinate.
pub fn max_gradient_error(model: &Model, t: Triple) -> f64 {
    let analytic = model.energy_gradients(t).unwrap();
    let f = |m: &Model| energy_formula(m, t);
    let mut worst: f64 = 0.0;
    for (a_block, n_block) in analytic
        .params
        .blocks()
        .iter()
        .zip(fd_param_gradient(model, f))
    {
        for (a, n) in a_block.iter().zip(n_block) {
            worst = worst.max(relative_error(*a, n));
        }
    }
    // Sum slot gradients per distinct row so shared ids are handled.
    let d = model.embeddings.dim();
    let mut per_row: Vec<(usize, Vec<f64>)> = Vec::new();
    for (id, g) in [
        (t.lhs, &analytic.lhs),
        (t.rel, &analytic.rel),
        (t.rhs, &analytic.rhs),
    ] {
        match per_row.iter_mut().find(|(i, _)| *i == id) {
            Some((_, acc)) => (0..d).for_each(|j| acc[j] += g[j]),
            None => per_row.push((id, g.clone())),
        }
    }
    for (id, a_row) in per_row {
        for (a, n) in a_row.iter().zip(fd_row_gradient(model, id, f)) {
            worst = worst.max(relative_error(*a, n));
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// AUC-PR
// ---------------------------------------------------------------------------

/// AUC-PR by enumerating every distinct score as a threshold (highest
/// first), computing precision and recall of "score ≥ threshold" from
/// scratch, prepending `(0, 1)` and integrating with trapezoids.
pub fn auc_by_thresholds(scores: &[f64], labels: &[bool]) -> f64 {
    let total_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut thresholds: Vec<f64> = Vec::new();
    for &s in scores {
        if !thresholds.contains(&s) {
            thresholds.push(s);
        }
    }
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut points = vec![(0.0, 1.0)];
    for &t in &thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (&s, &l) in scores.iter().zip(labels) {
            if s >= t {
                if l {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        points.push((tp as f64 / total_pos, tp as f64 / (tp + fp) as f64));
    }
    let mut area = 0.0;
    for w in points.windows(2) {
        area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
    }
    area
}

/// Random score/label set with `n ≤ 50`, at least one label of each kind,
/// and scores drawn from a small pool on odd seeds so ties are frequent.
pub fn random_scored(seed: u64) -> (Vec<f64>, Vec<bool>) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=50);
    let tie_heavy = seed % 2 == 1;
    let scores: Vec<f64> = (0..n)
        .map(|_| {
            if tie_heavy {
                f64::from(r.gen_range(0..4)) * 0.5
            } else {
                r.gen_range(-3.0..3.0)
            }
        })
        .collect();
    let mut labels: Vec<bool> = (0..n).map(|_| r.gen_bool(0.4)).collect();
    labels[0] = true;
    labels[1] = false;
    (scores, labels)
}
