//! The matrix/function dictionary: `f_A(t)`, symbols of Toeplitz matrices,
//! the pairing `Phi_A`, the analytic extension `F_A(z)` and the smoothing
//! diagnostics.
//!
//! A finite truncation can never prove that the infinite matrix is a
//! continuous element (`sigma_n(A) -> A` in norm). What is reported is a
//! [`Verdict`] with the explicit tolerance, the index it was reached from and
//! the truncation size, read off the recorded distances
//! `||sigma_n(A^(N)) - A^(N)||`.
//!
//! The scalar-polynomial map `sum a_l phi_l -> sum a_l T_l` is not exposed on
//! its own: it is [`phi_eval`] with `x_l = a_l x`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::hilbert::{norm, top_singular_triple, OperatorBlock, C64};
use crate::kernels::{fejer, modulation_mask, poisson, smooth, SummabilityKernel};
use crate::matrices::{BlockMatrix, Structure};
use crate::norms::{op_norm_value, Certificate, NormEstimate, NormKind};
use crate::quadrature::circle_grid;
use crate::random::{sub_seed, Sampler};
use crate::format_sig;

/// Default relative tolerance of a convergence verdict, times `||A||`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-3;

// ── symbols and polynomials ─────────────────────────────────────────

/// `g(t) = sum_l G_l e^{ilt}` with finitely many operator coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSymbol {
    dim: usize,
    coeffs: BTreeMap<isize, OperatorBlock>,
}

impl OperatorSymbol {
    pub fn new(dim: usize, coeffs: BTreeMap<isize, OperatorBlock>) -> Result<Self> {
        if let Some(b) = coeffs.values().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: b.dim(),
            });
        }
        Ok(OperatorSymbol { dim, coeffs })
    }

    pub fn constant(t: OperatorBlock) -> Self {
        OperatorSymbol {
            dim: t.dim(),
            coeffs: BTreeMap::from([(0, t)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<isize, OperatorBlock> {
        &self.coeffs
    }

    pub fn coeff(&self, l: isize) -> OperatorBlock {
        self.coeffs
            .get(&l)
            .cloned()
            .unwrap_or_else(|| OperatorBlock::zeros(self.dim))
    }

    /// Largest `|l|` with a stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> OperatorBlock {
        let mut out = OperatorBlock::zeros(self.dim);
        for (&l, b) in &self.coeffs {
            out.add_scaled_in_place(C64::from_polar(1.0, l as f64 * t), b);
        }
        out
    }
}

/// `p(t) = sum_l x_l e^{ilt}` with vector coefficients in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolynomial {
    dim: usize,
    coeffs: BTreeMap<isize, Vec<C64>>,
}

impl HPolynomial {
    pub fn new(dim: usize, coeffs: BTreeMap<isize, Vec<C64>>) -> Result<Self> {
        if let Some(x) = coeffs.values().find(|x| x.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: x.len(),
            });
        }
        Ok(HPolynomial { dim, coeffs })
    }

    /// `x e^{ilt}`.
    pub fn monomial(x: Vec<C64>, l: isize) -> Self {
        HPolynomial {
            dim: x.len(),
            coeffs: BTreeMap::from([(l, x)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<isize, Vec<C64>> {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (&l, x) in &self.coeffs {
            let e = C64::from_polar(1.0, l as f64 * t);
            for (o, xi) in out.iter_mut().zip(x) {
                *o += e * xi;
            }
        }
        out
    }

    /// `max ||p(t)||` over `points` equispaced angles.
    pub fn grid_sup(&self, points: usize) -> f64 {
        circle_grid(points)
            .map(|t| norm(&self.eval(t)))
            .fold(0.0, f64::max)
    }

    /// Grid size used wherever a sup norm of `p` is needed.
    pub fn default_grid(&self) -> usize {
        (64 * (self.degree() + 1)).max(1024)
    }
}

// ── convergence profiles ────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    /// Every recorded distance from `at_index` on is `<= tolerance`.
    Converges { tolerance: f64, at_index: f64 },
    Stalls { floor: f64 },
}

impl Verdict {
    pub fn converges(&self) -> bool {
        matches!(self, Verdict::Converges { .. })
    }

    /// Decide from a recorded sequence: find the first position from which
    /// every distance is `<= tolerance`; the sequence converges when that
    /// tail covers at least the last third of the record.
    pub fn decide(indices: &[f64], distances: &[f64], tolerance: f64) -> Verdict {
        let len = distances.len();
        let start = distances
            .iter()
            .rposition(|&d| d > tolerance)
            .map_or(0, |p| p + 1);
        if len > 0 && start < len && len - start >= len.div_ceil(3) {
            Verdict::Converges {
                tolerance,
                at_index: indices[start],
            }
        } else {
            Verdict::Stalls {
                floor: distances.iter().copied().fold(f64::INFINITY, f64::min),
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceProfile {
    pub label: String,
    /// Name of the index column: `n` for kernel families, `r` for radii.
    pub parameter: String,
    pub indices: Vec<f64>,
    pub distances: Vec<f64>,
    /// `||A^(N)||`, the scale of the tolerance.
    pub reference_norm: f64,
    pub size: usize,
    pub dim: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl ConvergenceProfile {
    fn build(
        label: String,
        parameter: &str,
        a: &BlockMatrix,
        indices: Vec<f64>,
        distances: Vec<f64>,
        reference_norm: f64,
        relative_tolerance: f64,
    ) -> Self {
        let tolerance = relative_tolerance * reference_norm;
        let verdict = Verdict::decide(&indices, &distances, tolerance);
        ConvergenceProfile {
            label,
            parameter: parameter.into(),
            indices,
            distances,
            reference_norm,
            size: a.size(),
            dim: a.dim(),
            tolerance,
            verdict,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},distance\n", self.parameter);
        for (i, d) in self.indices.iter().zip(&self.distances) {
            let _ = writeln!(out, "{},{}", format_sig(*i), format_sig(*d));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("profile fields are plain data")
    }
}

fn check_indices<T: PartialOrd>(indices: &[T]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::invalid("indices", "must be nonempty"));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("indices", "must be strictly increasing"));
    }
    Ok(())
}

/// `d_n = ||smooth(a, k_n) - a||` for each `n`, tolerance `1e-3 ||a||`.
pub fn sigma_profile(
    a: &BlockMatrix,
    kernel: SummabilityKernel,
    indices: &[usize],
) -> Result<ConvergenceProfile> {
    sigma_profile_with_tolerance(a, kernel, indices, DEFAULT_RELATIVE_TOLERANCE)
}

pub fn sigma_profile_with_tolerance(
    a: &BlockMatrix,
    kernel: SummabilityKernel,
    indices: &[usize],
    relative_tolerance: f64,
) -> Result<ConvergenceProfile> {
    check_indices(indices)?;
    let reference = op_norm_value(a)?;
    let distances = indices
        .iter()
        .map(|&n| op_norm_value(&smooth(a, &kernel.member(n))?.sub(a)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceProfile::build(
        kernel.name().into(),
        "n",
        a,
        indices.iter().map(|&n| n as f64).collect(),
        distances,
        reference,
        relative_tolerance,
    ))
}

/// `||P_r * a - a||` over the radii in `r_list`.
pub fn poisson_profile(
    a: &BlockMatrix,
    r_list: &[f64],
    relative_tolerance: f64,
) -> Result<ConvergenceProfile> {
    check_indices(r_list)?;
    let reference = op_norm_value(a)?;
    let distances = r_list
        .iter()
        .map(|&r| op_norm_value(&smooth(a, &poisson(r)?)?.sub(a)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceProfile::build(
        "poisson".into(),
        "r",
        a,
        r_list.to_vec(),
        distances,
        reference,
        relative_tolerance,
    ))
}

// ── modulation ──────────────────────────────────────────────────────

/// `f_A(t) = M_t * A = (e^{i(j-k)t} T_kj)`; keeps the structure of `a`.
pub fn f_eval(a: &BlockMatrix, t: f64) -> Result<BlockMatrix> {
    modulation_mask(t, a.dim(), a.size())?.schur_product(a)
}

/// `U(t) = diag(e^{ikt} Id)`, `k = 1..N`.
pub fn modulation_unitary(t: f64, dim: usize, size: usize) -> Result<BlockMatrix> {
    let diag = (0..size)
        .map(|k| OperatorBlock::scalar(dim, C64::from_polar(1.0, (k + 1) as f64 * t)))
        .collect();
    BlockMatrix::banded(dim, size, BTreeMap::from([(0, diag)]))
}

/// The `N x N` section of `T_{k,2k} = Id` (1-based), zero elsewhere.
///
/// The infinite matrix is a contraction whose modulation `t -> f_A(t)` is not
/// strongly measurable; each section only keeps the rows with `2k <= N`.
pub fn dilation_example(size: usize, dim: usize) -> Result<BlockMatrix> {
    if size < 2 {
        return Err(Error::invalid("N", "must be at least 2"));
    }
    BlockMatrix::from_fn(dim, size, |k, j| {
        if j + 1 == 2 * (k + 1) {
            OperatorBlock::identity(dim)
        } else {
            OperatorBlock::zeros(dim)
        }
    })
}

// ── Toeplitz matrices and symbols ───────────────────────────────────

/// Toeplitz section with `T_l = g_l` for `|l| <= N - 1`.
pub fn toeplitz_from_symbol(g: &OperatorSymbol, size: usize) -> Result<BlockMatrix> {
    let coeffs = g
        .coeffs
        .iter()
        .filter(|(l, _)| l.unsigned_abs() < size)
        .map(|(&l, b)| (l, b.clone()))
        .collect();
    BlockMatrix::toeplitz(g.dim, size, coeffs)
}

pub fn symbol_from_toeplitz(a: &BlockMatrix) -> Result<OperatorSymbol> {
    let coeffs = a.toeplitz_coefficients().ok_or(Error::NotToeplitz)?;
    OperatorSymbol::new(a.dim(), coeffs.clone())
}

// ── the pairing Phi_A ───────────────────────────────────────────────

fn toeplitz_of(a: &BlockMatrix) -> Result<&BTreeMap<isize, OperatorBlock>> {
    if a.structure() != Structure::Toeplitz {
        return Err(Error::NotToeplitz);
    }
    Ok(a.toeplitz_coefficients().expect("Toeplitz-tagged"))
}

/// `Phi_A(sum_l x_l phi_l) = sum_l T_l x_l`. Coefficients of `p` outside
/// `|l| <= N - 1` are an error rather than silently dropped.
pub fn phi_eval(a: &BlockMatrix, p: &HPolynomial) -> Result<Vec<C64>> {
    let coeffs = toeplitz_of(a)?;
    if p.dim != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: p.dim,
        });
    }
    let hi = a.size() as isize - 1;
    let mut out = vec![C64::new(0.0, 0.0); a.dim()];
    for (&l, x) in &p.coeffs {
        if l.abs() > hi {
            return Err(Error::OutOfRange { index: l, lo: -hi, hi });
        }
        if let Some(t) = coeffs.get(&l) {
            t.apply_add(x, &mut out);
        }
    }
    Ok(out)
}

/// Fourier coefficients of a unimodular step function taking the value
/// `e^{i theta_j}` on `[a_j, a_{j+1})`, for `|l| <= m`.
fn step_coefficients(breaks: &[f64], phases: &[f64], m: isize) -> BTreeMap<isize, C64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    (-m..=m)
        .map(|l| {
            let mut c = C64::new(0.0, 0.0);
            for (w, &theta) in breaks.windows(2).zip(phases) {
                let v = C64::from_polar(1.0, theta);
                let part = if l == 0 {
                    C64::new((w[1] - w[0]) / two_pi, 0.0)
                } else {
                    let lf = l as f64;
                    (C64::from_polar(1.0, -lf * w[1]) - C64::from_polar(1.0, -lf * w[0]))
                        / C64::new(0.0, -two_pi * lf)
                };
                c += v * part;
            }
            (l, c)
        })
        .collect()
}

/// Test polynomial number `index` of the search in [`phi_norm_estimate`],
/// with the name of its family.
pub fn test_polynomial(
    d: usize,
    index: usize,
    max_degree: usize,
    seed: u64,
) -> Result<(HPolynomial, &'static str)> {
    let mut s = Sampler::new(sub_seed(seed, index as u64));
    let deg = s.index(0, max_degree) as isize;
    Ok(match index % 4 {
        0 => {
            let coeffs = (-deg..=deg).map(|l| (l, s.cvec(d))).collect();
            (HPolynomial::new(d, coeffs)?, "random-coefficients")
        }
        1 => {
            let l = s.index(0, 2 * deg as usize) as isize - deg;
            (HPolynomial::monomial(s.unit_cvec(d), l), "single-frequency")
        }
        2 => {
            // x times the Fejér mean of a unimodular step function: sup <= ||x||
            let m = max_degree as isize;
            let pieces = s.index(1, 2 * max_degree + 2);
            let mut breaks: Vec<f64> = (0..pieces - 1).map(|_| s.angle()).collect();
            breaks.push(-std::f64::consts::PI);
            breaks.push(std::f64::consts::PI);
            breaks.sort_by(f64::total_cmp);
            let phases: Vec<f64> = (0..pieces).map(|_| s.angle()).collect();
            let fej = fejer(max_degree);
            let x = s.unit_cvec(d);
            let coeffs = step_coefficients(&breaks, &phases, m)
                .into_iter()
                .map(|(l, c)| {
                    let w = c * fej.coeff(l);
                    (l, x.iter().map(|xi| w * xi).collect())
                })
                .collect();
            (HPolynomial::new(d, coeffs)?, "fejer-unimodular")
        }
        _ => {
            // x_l = S_l x0 for a random operator polynomial sum S_l e^{ilt}
            let x0 = s.unit_cvec(d);
            let coeffs = (-deg..=deg)
                .map(|l| Ok((l, s.block(d).apply(&x0)?)))
                .collect::<Result<_>>()?;
            (HPolynomial::new(d, coeffs)?, "rank-one-reduction")
        }
    })
}

/// Sampled lower bound of `sup ||Phi_A(p)|| / sup_t ||p(t)||` over
/// polynomials of degree `<= max_degree` (capped at `N - 1`).
///
/// Besides `samples` random polynomials drawn in turn from four families
/// (random coefficients, single frequencies, Fejér means of unimodular step
/// functions times a vector, and `x_l = S_l x_0`), every stored `T_l` is
/// tried with `p = v e^{ilt}` for its top right singular vector `v`.
pub fn phi_norm_estimate(
    a: &BlockMatrix,
    samples: usize,
    max_degree: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let coeffs = toeplitz_of(a)?;
    let max_degree = max_degree.min(a.size() - 1);
    let mut candidates = Vec::new();
    for (&l, t) in coeffs {
        if l.unsigned_abs() <= max_degree {
            let v = top_singular_triple(&t.to_cmatrix())?.right;
            candidates.push((HPolynomial::monomial(v, l), format!("top-singular-vector l={l}")));
        }
    }
    for i in 0..samples {
        let (p, family) = test_polynomial(a.dim(), i, max_degree, seed)?;
        candidates.push((p, format!("{family} #{i}")));
    }
    let mut best: Option<(f64, HPolynomial, String)> = None;
    for (p, label) in candidates {
        let sup = p.grid_sup(p.default_grid());
        if sup <= 1e-300 {
            continue;
        }
        let ratio = norm(&phi_eval(a, &p)?) / sup;
        if best.as_ref().is_none_or(|b| ratio > b.0) {
            best = Some((ratio, p, label));
        }
    }
    let (value, p, label) = best.unwrap_or((0.0, HPolynomial::monomial(vec![C64::new(0.0, 0.0); a.dim()], 0), "none".into()));
    let mut est = NormEstimate {
        value,
        kind: NormKind::SampledLowerBound,
        certificate: Some(Certificate::Polynomial(p)),
        iterations: samples,
        witness: Some(label),
        params: BTreeMap::new(),
    };
    est.params.insert("seed".into(), json!(seed));
    est.params.insert("max_degree".into(), json!(max_degree));
    Ok(est)
}

// ── analytic extension ──────────────────────────────────────────────

fn check_disc(z: C64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::invalid("z", format!("|z| = {} is not below 1", z.norm())));
    }
    Ok(())
}

/// `F_A(z) = (z^{j-k} T_kj)` for upper-triangular `a` and `|z| < 1`.
pub fn analytic_eval(a: &BlockMatrix, z: C64) -> Result<BlockMatrix> {
    check_disc(z)?;
    if !a.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    // stored lower blocks of an upper-triangular matrix are zero
    Ok(a.scale_diagonals(|l| if l < 0 { C64::new(0.0, 0.0) } else { z.powi(l as i32) }))
}

/// `F_A(r e^{it}) = M_{P_r} * f_A(t)`, the second way of computing
/// [`analytic_eval`].
pub fn analytic_eval_via_poisson(a: &BlockMatrix, z: C64) -> Result<BlockMatrix> {
    check_disc(z)?;
    if !a.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    smooth(&f_eval(a, z.arg())?, &poisson(z.norm())?)
}

/// `sum_{l >= 0} T_l z^l` for an upper-triangular Toeplitz `a`.
pub fn tilde_analytic_eval(a: &BlockMatrix, z: C64) -> Result<OperatorBlock> {
    check_disc(z)?;
    let coeffs = toeplitz_of(a)?;
    if !a.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    let mut out = OperatorBlock::zeros(a.dim());
    for (&l, t) in coeffs {
        out.add_scaled_in_place(z.powi(l as i32), t);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HinfProfile {
    pub r: Vec<f64>,
    /// `max_t ||F_A(r e^{it})||` over the angle grid, per radius.
    pub sup_values: Vec<f64>,
    pub t_grid: usize,
    /// `||P_r * A - A||` per radius, with the default verdict.
    pub poisson: ConvergenceProfile,
}

impl HinfProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,sup_norm,poisson_distance\n");
        for ((r, s), d) in self.r.iter().zip(&self.sup_values).zip(&self.poisson.distances) {
            let _ = writeln!(out, "{},{},{}", format_sig(*r), format_sig(*s), format_sig(*d));
        }
        out
    }
}

pub fn hinf_profile(a: &BlockMatrix, r_list: &[f64], t_grid: usize) -> Result<HinfProfile> {
    if !a.is_upper_triangular() {
        return Err(Error::NotUpperTriangular);
    }
    if t_grid == 0 {
        return Err(Error::invalid("t_grid", "must be at least 1"));
    }
    if let Some(r) = r_list.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::invalid("r_list", format!("{r} is outside [0, 1)")));
    }
    let poisson = poisson_profile(a, r_list, DEFAULT_RELATIVE_TOLERANCE)?;
    let mut sup_values = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let mut best = 0.0f64;
        for t in circle_grid(t_grid) {
            best = best.max(op_norm_value(&analytic_eval(a, C64::from_polar(r, t))?)?);
        }
        sup_values.push(best);
    }
    Ok(HinfProfile {
        r: r_list.to_vec(),
        sup_values,
        t_grid,
        poisson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::singular_values;
    use crate::kernels::mask;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn shift(dim: usize, size: usize) -> BlockMatrix {
        BlockMatrix::toeplitz(dim, size, BTreeMap::from([(1, OperatorBlock::identity(dim))]))
            .unwrap()
    }

    #[test]
    fn f_eval_at_zero_is_identity_map() {
        let a = Sampler::new(1).dense(2, 5);
        assert_eq!(a.max_entry_diff(&f_eval(&a, 0.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn f_eval_keeps_structure_and_scales_toeplitz_coefficients() {
        let mut s = Sampler::new(2);
        let a = s.toeplitz(2, 6, -2, 3);
        let t = 0.7;
        let f = f_eval(&a, t).unwrap();
        assert_eq!(f.structure(), Structure::Toeplitz);
        for (l, b) in a.toeplitz_coefficients().unwrap() {
            let want = b.scale(C64::from_polar(1.0, *l as f64 * t));
            assert!(f.toeplitz_coefficients().unwrap()[l].max_abs_diff(&want) < 1e-15);
        }
        assert_eq!(f_eval(&s.banded(2, 6, 0, 1), t).unwrap().structure(), Structure::Banded);
    }

    #[test]
    fn modulation_is_a_unitary_similarity() {
        let mut s = Sampler::new(3);
        for _ in 0..5 {
            let a = s.dense(2, 6);
            let t = s.angle();
            let u = modulation_unitary(t, 2, 6).unwrap();
            // (U^* A U)_{kj} = e^{-ikt} T_kj e^{ijt} = e^{i(j-k)t} T_kj
            let conj = u.adjoint().to_cmatrix().matmul(&a.to_cmatrix()).unwrap();
            let conj = conj.matmul(&u.to_cmatrix()).unwrap();
            let f = f_eval(&a, t).unwrap();
            assert!(f.to_cmatrix().max_abs_diff(&conj) < 1e-12);
            let sa = singular_values(&a.to_cmatrix()).unwrap();
            let sf = singular_values(&f.to_cmatrix()).unwrap();
            for (x, y) in sa.iter().zip(&sf) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn modulation_is_strongly_continuous_on_banded_matrices() {
        // ||(f(t) - f(s)) x|| <= |t - s| sum_l |l| ||D_l|| ||x||
        let mut s = Sampler::new(4);
        let a = s.banded(2, 12, -2, 3);
        let x = s.unit_block_vector(2, 12);
        let lip: f64 = a
            .offsets()
            .into_iter()
            .map(|l| {
                l.unsigned_abs() as f64
                    * a.diagonal(l).unwrap().iter().map(|b| b.op_norm()).fold(0.0, f64::max)
            })
            .sum();
        let s0 = 0.4;
        let fs = f_eval(&a, s0).unwrap().apply(&x).unwrap();
        for h in [1e-1, 1e-2, 1e-3, 1e-4] {
            let ft = f_eval(&a, s0 + h).unwrap().apply(&x).unwrap();
            assert!(ft.sub(&fs).unwrap().norm() <= h * lip + 1e-14);
        }
    }

    #[test]
    fn smoothing_commutes_with_modulation() {
        let mut s = Sampler::new(5);
        let a = s.dense(2, 7);
        for k in [fejer(3), poisson(0.6).unwrap()] {
            let lhs = smooth(&f_eval(&a, 1.1).unwrap(), &k).unwrap();
            let rhs = f_eval(&smooth(&a, &k).unwrap(), 1.1).unwrap();
            assert!(lhs.max_entry_diff(&rhs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn verdict_rule() {
        let idx = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let v = Verdict::decide(&idx, &[5.0, 4.0, 3.0, 0.1, 0.01, 0.001], 0.5);
        assert_eq!(v, Verdict::Converges { tolerance: 0.5, at_index: 4.0 });
        // a late excursion above tolerance resets the tail
        let v = Verdict::decide(&idx, &[5.0, 0.1, 0.1, 0.1, 0.1, 0.9], 0.5);
        assert_eq!(v, Verdict::Stalls { floor: 0.1 });
        // a tail shorter than a third of the record is not enough
        let v = Verdict::decide(&idx, &[5.0, 4.0, 3.0, 2.0, 1.0, 0.1], 0.5);
        assert!(!v.converges());
    }

    #[test]
    fn banded_profile_converges_within_the_derived_bound() {
        let mut s = Sampler::new(6);
        let a = s.banded(2, 24, -2, 2);
        let idx = [2, 8, 32, 128, 512, 2048, 8192, 32768];
        let p = sigma_profile(&a, SummabilityKernel::Fejer, &idx).unwrap();
        let sum: f64 = a
            .offsets()
            .into_iter()
            .map(|l| a.diagonal(l).unwrap().iter().map(|b| b.op_norm()).fold(0.0, f64::max))
            .sum();
        for (&n, d) in idx.iter().zip(&p.distances) {
            assert!(*d <= 2.0 / (n as f64 + 1.0) * sum + 1e-12);
        }
        assert!(p.verdict.converges());
    }

    #[test]
    fn dilation_example_norms() {
        let a = dilation_example(64, 2).unwrap();
        assert!((op_norm_value(&a).unwrap() - 1.0).abs() < 1e-12);
        let delta = std::f64::consts::PI / 32.0;
        let diff = f_eval(&a, delta).unwrap().sub(&a).unwrap();
        assert!((op_norm_value(&diff).unwrap() - 2.0).abs() < 1e-9);
        let idx: Vec<usize> = (1..=32).collect();
        let p = sigma_profile(&a, SummabilityKernel::Fejer, &idx).unwrap();
        match p.verdict {
            Verdict::Stalls { floor } => assert!(floor >= 0.5),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn toeplitz_symbol_round_trip() {
        let mut s = Sampler::new(7);
        let g = OperatorSymbol::new(2, (-3..=3).map(|l| (l, s.block(2))).collect()).unwrap();
        let a = toeplitz_from_symbol(&g, 8).unwrap();
        assert_eq!(symbol_from_toeplitz(&a).unwrap(), g);
        let cut = toeplitz_from_symbol(&g, 3).unwrap();
        assert_eq!(symbol_from_toeplitz(&cut).unwrap().degree(), 2);
        assert!(matches!(symbol_from_toeplitz(&s.dense(2, 3)), Err(Error::NotToeplitz)));
    }

    #[test]
    fn schur_product_acts_on_symbol_coefficients() {
        let mut s = Sampler::new(8);
        let a = s.toeplitz(2, 6, -2, 2);
        let b = s.toeplitz(2, 6, -1, 3);
        let g = symbol_from_toeplitz(&a.schur_product(&b).unwrap()).unwrap();
        let (ga, gb) = (symbol_from_toeplitz(&a).unwrap(), symbol_from_toeplitz(&b).unwrap());
        for l in -5..=5 {
            let want = ga.coeff(l).compose(&gb.coeff(l)).unwrap();
            assert!(g.coeff(l).max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn phi_eval_extracts_coefficients() {
        let mut s = Sampler::new(9);
        let a = s.toeplitz(2, 5, -3, 3);
        let x = s.cvec(2);
        for l in -3..=3 {
            let got = phi_eval(&a, &HPolynomial::monomial(x.clone(), l)).unwrap();
            let want = a.toeplitz_coefficients().unwrap()[&l].apply(&x).unwrap();
            assert_eq!(got, want);
        }
        let far = HPolynomial::monomial(x.clone(), 5);
        assert!(matches!(phi_eval(&a, &far), Err(Error::OutOfRange { index: 5, .. })));
        assert!(matches!(phi_eval(&s.dense(2, 3), &far), Err(Error::NotToeplitz)));
    }

    #[test]
    fn phi_eval_on_fejer_coefficients() {
        let mut s = Sampler::new(10);
        let t = s.block(2);
        let a = mask(&fejer(2), 2, 6).unwrap();
        let a = BlockMatrix::toeplitz(
            2,
            6,
            a.toeplitz_coefficients()
                .unwrap()
                .iter()
                .map(|(l, b)| (*l, b.compose(&t).unwrap()))
                .collect(),
        )
        .unwrap();
        let p = HPolynomial::new(2, (-4..=4).map(|l| (l, s.cvec(2))).collect()).unwrap();
        let mut sum = vec![c(0.0); 2];
        for (l, x) in p.coeffs() {
            let w = fejer(2).coeff(*l);
            for (o, xi) in sum.iter_mut().zip(x) {
                *o += w * xi;
            }
        }
        let want = t.apply(&sum).unwrap();
        let got = phi_eval(&a, &p).unwrap();
        assert!(got.iter().zip(&want).all(|(g, w)| (g - w).norm() < 1e-13));
    }

    #[test]
    fn phi_estimate_simple_cases() {
        let id = BlockMatrix::identity(2, 6).unwrap();
        let e = phi_norm_estimate(&id, 20, 4, 1).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let t = Sampler::new(11).block(2);
        let a = BlockMatrix::toeplitz(2, 6, BTreeMap::from([(1, t.clone())])).unwrap();
        let e = phi_norm_estimate(&a, 20, 4, 1).unwrap();
        assert!((e.value - t.op_norm()).abs() < 1e-10);
    }

    #[test]
    fn analytic_eval_paths_agree() {
        let mut s = Sampler::new(12);
        let a = s.banded(2, 8, 0, 4);
        let z = C64::from_polar(0.7, 0.3);
        let direct = analytic_eval(&a, z).unwrap();
        let via = analytic_eval_via_poisson(&a, z).unwrap();
        assert!(direct.max_entry_diff(&via).unwrap() < 1e-12);
        let at0 = analytic_eval(&a, c(0.0)).unwrap();
        let dense_at0 = analytic_eval(&a.to_dense(), c(0.0)).unwrap();
        assert!(dense_at0.max_entry_diff(&at0).unwrap() == 0.0);
        assert!(at0.max_entry_diff(&a.only_diagonal(0).unwrap()).unwrap() < 1e-15);
        assert!(analytic_eval(&a, c(1.0)).is_err());
        assert!(matches!(analytic_eval(&s.dense(2, 3), c(0.1)), Err(Error::NotUpperTriangular)));
    }

    #[test]
    fn shift_sup_is_the_radius() {
        let h = hinf_profile(&shift(2, 8), &[0.0, 0.3, 0.9], 8).unwrap();
        for (r, v) in h.r.iter().zip(&h.sup_values) {
            assert!((r - v).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_symbol_closed_form() {
        let coeffs = (0..40)
            .map(|l| (l as isize, OperatorBlock::scalar(2, c(0.5f64.powi(l)))))
            .collect();
        let a = BlockMatrix::toeplitz(2, 40, coeffs).unwrap();
        for z in [C64::from_polar(0.5, 1.0), C64::from_polar(0.9, -2.0)] {
            let got = tilde_analytic_eval(&a, z).unwrap();
            let want = OperatorBlock::scalar(2, c(1.0) / (c(1.0) - z / 2.0));
            assert!(got.max_abs_diff(&want) < 1e-10);
        }
    }

    #[test]
    fn csv_and_json() {
        let a = Sampler::new(13).banded(1, 4, 0, 1);
        let p = sigma_profile(&a, SummabilityKernel::Poisson, &[1, 10]).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("n,distance\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(p.to_json()["verdict"]["verdict"].is_string());
    }
}
