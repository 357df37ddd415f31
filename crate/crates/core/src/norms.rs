//! Norms of truncated block matrices and symbols.
//!
//! Operator norms are exact (Jacobi SVD of the `dN x dN` flattening) up to
//! [`EXACT_SVD_LIMIT`] and power-iteration estimates beyond. Schur multiplier
//! norms are a supremum over all bounded matrices and are only ever reported
//! as sampled lower bounds with the matrix that achieved them.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{HPolynomial, OperatorSymbol};
use crate::error::{Error, Result};
use crate::hilbert::{top_singular_triple, BlockVector, OperatorBlock, C64};
use crate::kernels::{modulation_mask, ScalarSymbol};
use crate::matrices::BlockMatrix;
use crate::quadrature::circle_grid;
use crate::random::{sub_seed, Sampler};

/// Largest `dN` handled by the exact SVD path of [`op_norm`].
pub const EXACT_SVD_LIMIT: usize = 512;
/// Largest `dN` for which a stalled power iteration falls back to the SVD.
pub const SVD_FALLBACK_LIMIT: usize = 2048;
pub const POWER_TOLERANCE: f64 = 1e-8;
pub const POWER_MAX_ITERATIONS: usize = 10_000;
pub const POWER_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    ExactSvd,
    PowerIteration,
    SampledLowerBound,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// Unit input vector at which the norm is (nearly) attained.
    Vector(BlockVector),
    /// Trial matrix achieving a multiplier lower bound.
    Matrix(BlockMatrix),
    /// Test polynomial achieving a pairing-operator lower bound.
    Polynomial(HPolynomial),
}

#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    pub certificate: Option<Certificate>,
    /// Iterations (power method) or trials (sampling).
    pub iterations: usize,
    /// Human-readable description of the certificate.
    pub witness: Option<String>,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl NormEstimate {
    fn new(value: f64, kind: NormKind, iterations: usize) -> Self {
        NormEstimate {
            value,
            kind,
            certificate: None,
            iterations,
            witness: None,
            params: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "value": self.value,
            "iterations": self.iterations,
            "witness": self.witness,
            "params": self.params,
        })
    }
}

// ── operator norm ───────────────────────────────────────────────────

pub fn op_norm(a: &BlockMatrix) -> Result<NormEstimate> {
    let n = a.dim() * a.size();
    if n <= EXACT_SVD_LIMIT {
        return op_norm_svd(a);
    }
    match power_iteration(a, POWER_TOLERANCE, POWER_MAX_ITERATIONS, POWER_SEED) {
        Err(Error::NoConvergence { .. }) if n <= SVD_FALLBACK_LIMIT => op_norm_svd(a),
        other => other,
    }
}

/// Shorthand for `op_norm(a)?.value`.
pub fn op_norm_value(a: &BlockMatrix) -> Result<f64> {
    Ok(op_norm(a)?.value)
}

pub fn op_norm_svd(a: &BlockMatrix) -> Result<NormEstimate> {
    let t = top_singular_triple(&a.to_cmatrix())?;
    let mut est = NormEstimate::new(t.value, NormKind::ExactSvd, 1);
    est.certificate = Some(Certificate::Vector(BlockVector::from_flat(a.dim(), t.right)?));
    est.witness = Some("top right singular vector".into());
    Ok(est)
}

/// Power iteration on `A^* A` using only block applications.
///
/// Stops when the relative residual `||A^*A v - lambda v|| / lambda` drops
/// to `tol`; the returned value `||A v||` is always attained by `v`.
pub fn power_iteration(
    a: &BlockMatrix,
    tol: f64,
    max_iterations: usize,
    seed: u64,
) -> Result<NormEstimate> {
    let mut v = Sampler::new(seed).unit_block_vector(a.dim(), a.size());
    for it in 1..=max_iterations {
        let w = a.apply(&v)?;
        let lambda = w.norm().powi(2);
        if lambda == 0.0 {
            let mut est = NormEstimate::new(0.0, NormKind::PowerIteration, it);
            est.certificate = Some(Certificate::Vector(v));
            return Ok(est);
        }
        let z = a.apply_adjoint(&w)?;
        let residual = z.sub(&v.scale(C64::new(lambda, 0.0)))?.norm() / lambda;
        if residual <= tol {
            let mut est = NormEstimate::new(lambda.sqrt(), NormKind::PowerIteration, it);
            est.certificate = Some(Certificate::Vector(v));
            est.witness = Some("power iterate".into());
            est.params.insert("tolerance".into(), json!(tol));
            est.params.insert("seed".into(), json!(seed));
            return Ok(est);
        }
        v = z.normalized();
    }
    Err(Error::NoConvergence {
        cap: max_iterations,
    })
}

// ── Wiener norm ─────────────────────────────────────────────────────

/// `sum_l sup_k ||T_{k,k+l}||` over the stored diagonals.
pub fn wiener_norm(a: &BlockMatrix) -> f64 {
    a.offsets()
        .into_iter()
        .map(|l| {
            a.diagonal(l)
                .expect("stored offsets are in range")
                .iter()
                .map(OperatorBlock::op_norm)
                .fold(0.0, f64::max)
        })
        .sum()
}

// ── symbol sup norms ────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridNorm {
    pub value: f64,
    pub grid_points: usize,
    /// Angle at which `value` was attained.
    pub argmax: f64,
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `max_t ||g(t)||` over a uniform grid of `grid_points` angles, polished by
/// a golden-section search around the best few nodes. Every reported value
/// is an actual evaluation, so the result never exceeds the true supremum.
pub fn symbol_sup_norm(g: &OperatorSymbol, grid_points: usize) -> Result<GridNorm> {
    let need = 4 * (g.degree() + 1);
    if grid_points < need {
        return Err(Error::invalid(
            "grid_points",
            format!("{grid_points} < 4 * (degree + 1) = {need}"),
        ));
    }
    let f = |t: f64| g.eval(t).op_norm();
    let mut samples: Vec<(f64, f64)> = circle_grid(grid_points).map(|t| (t, f(t))).collect();
    samples.sort_by(|a, b| b.1.total_cmp(&a.1));
    let h = 2.0 * PI / grid_points as f64;
    let mut best = samples[0];
    for &(t, _) in samples.iter().take(4) {
        let cand = golden_max(&f, t - h, t + h, 60);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(GridNorm {
        value: best.1,
        grid_points,
        argmax: best.0,
    })
}

/// [`symbol_sup_norm`] with the grid doubled until the value changes by
/// less than `tol`.
pub fn symbol_sup_norm_refined(g: &OperatorSymbol, tol: f64) -> Result<GridNorm> {
    let mut points = 4 * (g.degree() + 1);
    let mut prev = symbol_sup_norm(g, points)?;
    loop {
        points *= 2;
        let next = symbol_sup_norm(g, points)?;
        if (next.value - prev.value).abs() < tol || points >= 1 << 20 {
            return Ok(if next.value >= prev.value {
                next
            } else {
                GridNorm {
                    grid_points: next.grid_points,
                    ..prev
                }
            });
        }
        prev = next;
    }
}

// ── Schur multipliers ───────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `B * A` for bounded `B`.
    Right,
    /// `A * B` for bounded `B`.
    Left,
}

fn trial_matrix(a: &BlockMatrix, index: usize, seed: u64) -> Result<(BlockMatrix, String)> {
    let (d, n) = (a.dim(), a.size());
    if index == 0 {
        return Ok((BlockMatrix::identity(d, n)?, "identity".into()));
    }
    let mut s = Sampler::new(sub_seed(seed, index as u64));
    Ok(match index % 3 {
        1 => {
            let t = s.angle();
            (modulation_mask(t, d, n)?, format!("modulation t={t:.6}"))
        }
        2 => (s.dense(d, n), format!("random dense #{index}")),
        _ => {
            let x = s.block_vector(d, n);
            let y = s.block_vector(d, n);
            (BlockMatrix::rank_one(&x, &y)?, format!("random rank-one #{index}"))
        }
    })
}

/// `max ||B * A|| / ||B||` (right) or `max ||A * B|| / ||B||` (left) over
/// `trials` bounded matrices `B`: the identity, then modulation masks
/// `M_t`, random dense and random rank-one matrices in turn. Trial `i`
/// draws from its own sub-seed, so the result depends on `(seed, trials)`
/// only.
pub fn multiplier_lower_bound(
    a: &BlockMatrix,
    side: Side,
    trials: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let mut best = (0.0f64, None, String::new());
    for i in 0..trials {
        let (b, label) = trial_matrix(a, i, seed)?;
        let nb = op_norm_value(&b)?;
        if nb == 0.0 {
            continue;
        }
        let prod = match side {
            Side::Right => b.schur_product(a)?,
            Side::Left => a.schur_product(&b)?,
        };
        let ratio = op_norm_value(&prod)? / nb;
        if ratio > best.0 || best.1.is_none() {
            best = (ratio, Some(b), label);
        }
    }
    let mut est = NormEstimate::new(best.0, NormKind::SampledLowerBound, trials);
    est.certificate = best.1.map(Certificate::Matrix);
    est.witness = Some(best.2);
    est.params.insert("side".into(), json!(side));
    est.params.insert("seed".into(), json!(seed));
    Ok(est)
}

/// `||M_f||_{M} * ||T||` with `||M_f||_M = ||f||_{L^1}`: the analytic upper
/// bound for the multiplier norm of a scalar Toeplitz mask tensored with `T`.
pub fn scalar_mask_multiplier_bound(
    sym: &ScalarSymbol,
    t: &OperatorBlock,
    quad_points: usize,
) -> f64 {
    sym.l1_norm(quad_points) * t.op_norm()
}

/// Sampled `sup_z sup_k (sum_j ||T_kj z_j||^2)^{1/2}` over unit `z`: the
/// quantity bounded by the right multiplier norm. Reported, never judged.
pub fn row_action_sample(a: &BlockMatrix, samples: usize, seed: u64) -> Result<f64> {
    let (d, n) = (a.dim(), a.size());
    let mut best = 0.0f64;
    for i in 0..samples {
        let z = Sampler::new(sub_seed(seed, i as u64)).unit_block_vector(d, n);
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                if let Some(b) = a.block_at(k, j) {
                    acc += crate::hilbert::norm(&b.apply(z.block(j))?).powi(2);
                }
            }
            best = best.max(acc.sqrt());
        }
    }
    Ok(best)
}
