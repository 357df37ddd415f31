//! Linear algebra over `H = C^d`.
//!
//! [`OperatorBlock`] is a single entry `T_kj`, [`BlockVector`] an element of the
//! truncated `l^2(H)`, and [`CMatrix`] a plain dense complex matrix used for
//! flattenings. [`singular_values`] and [`top_singular_triple`] are the
//! one-sided Jacobi SVD that every operator norm in the crate is built on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Sweep cap for the one-sided Jacobi SVD.
pub const JACOBI_MAX_SWEEPS: usize = 80;

/// `<a, b>`, linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn check_finite(data: &[C64]) -> Result<()> {
    if data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidData("non-finite entry".into()))
    }
}

// ── dense complex matrices ──────────────────────────────────────────

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                left: format!("{rows}x{cols}"),
                right: format!("{} entries", data.len()),
            });
        }
        check_finite(&data)?;
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(singular_values(self)?.first().copied().unwrap_or(0.0))
    }
}

// ── singular value decomposition ────────────────────────────────────

/// Columns of `w` (column-major, each of length `m`) after orthogonalisation.
struct JacobiColumns {
    m: usize,
    n: usize,
    cols: Vec<C64>,
    transposed: bool,
}

impl JacobiColumns {
    fn col(&self, j: usize) -> &[C64] {
        &self.cols[j * self.m..(j + 1) * self.m]
    }
}

/// One-sided (Hestenes) Jacobi: orthogonalise the columns of `W`, where
/// `W = A` if `A` is tall and `W = A^H` otherwise. On return the column norms
/// are the singular values.
fn jacobi_orthogonalize(a: &CMatrix) -> Result<JacobiColumns> {
    let transposed = a.rows < a.cols;
    let (m, n) = if transposed {
        (a.cols, a.rows)
    } else {
        (a.rows, a.cols)
    };
    let mut cols = vec![C64::new(0.0, 0.0); m * n];
    for j in 0..n {
        for i in 0..m {
            cols[j * m + i] = if transposed {
                a.get(j, i).conj()
            } else {
                a.get(i, j)
            };
        }
    }
    let tol = f64::EPSILON * (m.max(1) as f64);
    // columns below this squared norm are numerically zero; rotating them
    // only stirs rounding noise and can keep the sweep from terminating
    let negligible = (f64::EPSILON * norm(&cols)).powi(2);
    let mut sq = vec![0.0f64; n];

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        for (j, s) in sq.iter_mut().enumerate() {
            *s = cols[j * m..(j + 1) * m].iter().map(|z| z.norm_sqr()).sum();
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (sq[p], sq[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let (head, tail) = cols.split_at_mut(q * m);
                let cp = &mut head[p * m..(p + 1) * m];
                let cq = &mut tail[..m];
                let gamma: C64 = cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let xv = *x;
                    let yv = *y * phase_conj;
                    *x = xv * c - yv * s;
                    *y = xv * s + yv * c;
                }
                sq[p] = alpha - t * g;
                sq[q] = beta + t * g;
            }
        }
        if !rotated {
            return Ok(JacobiColumns {
                m,
                n,
                cols,
                transposed,
            });
        }
    }
    Err(Error::NoConvergence {
        cap: JACOBI_MAX_SWEEPS,
    })
}

/// Full singular spectrum in descending order; length is `min(rows, cols)`.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    if a.rows == 0 || a.cols == 0 {
        return Ok(Vec::new());
    }
    let w = jacobi_orthogonalize(a)?;
    let mut s: Vec<f64> = (0..w.n).map(|j| norm(w.col(j))).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Largest singular value with unit singular vectors, `a * right = value * left`.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub value: f64,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
}

pub fn top_singular_triple(a: &CMatrix) -> Result<SingularTriple> {
    let w = jacobi_orthogonalize(a)?;
    let (best, value) = (0..w.n)
        .map(|j| (j, norm(w.col(j))))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let value = value.max(0.0);
    if value == 0.0 {
        let mut right = vec![C64::new(0.0, 0.0); a.cols];
        if let Some(r) = right.first_mut() {
            *r = C64::new(1.0, 0.0);
        }
        return Ok(SingularTriple {
            value,
            left: vec![C64::new(0.0, 0.0); a.rows],
            right,
        });
    }
    let u: Vec<C64> = w.col(best).iter().map(|z| z / value).collect();
    let right = if w.transposed {
        u
    } else {
        // A v = sigma u  =>  v = A^H u / sigma
        let v = a.adjoint().mul_vec(&u);
        let nv = norm(&v);
        v.into_iter().map(|z| z / nv).collect()
    };
    let left = a.mul_vec(&right);
    let nl = norm(&left);
    let left = left.into_iter().map(|z| z / nl).collect();
    Ok(SingularTriple {
        value,
        left,
        right,
    })
}

// ── operator blocks ─────────────────────────────────────────────────

/// One entry `T_kj` in `B(C^d)`, stored as a row-major `d x d` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockRepr", into = "BlockRepr")]
pub struct OperatorBlock {
    dim: usize,
    data: Vec<C64>,
}

/// Wire form: row-major list of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct BlockRepr(Vec<[f64; 2]>);

impl TryFrom<BlockRepr> for OperatorBlock {
    type Error = Error;
    fn try_from(r: BlockRepr) -> Result<Self> {
        let len = r.0.len();
        let dim = (len as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != len {
            return Err(Error::InvalidData(format!(
                "block has {len} entries, not a positive square"
            )));
        }
        OperatorBlock::from_vec(dim, r.0.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<OperatorBlock> for BlockRepr {
    fn from(b: OperatorBlock) -> Self {
        BlockRepr(b.data.into_iter().map(|z| [z.re, z.im]).collect())
    }
}

impl OperatorBlock {
    pub fn zeros(dim: usize) -> Self {
        OperatorBlock {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, C64::new(1.0, 0.0))
    }

    /// `c * Id`.
    pub fn scalar(dim: usize, c: C64) -> Self {
        let mut b = Self::zeros(dim);
        for i in 0..dim {
            b.data[i * dim + i] = c;
        }
        b
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                left: format!("{dim}x{dim} block"),
                right: format!("{} entries", data.len()),
            });
        }
        check_finite(&data)?;
        Ok(OperatorBlock { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        OperatorBlock { dim, data }
    }

    /// The rank-one operator `x ⊗ y : z ↦ <z, x> y`, i.e. the matrix `y x^H`.
    pub fn rank_one(x: &[C64], y: &[C64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let d = x.len();
        if d == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        Ok(Self::from_fn(d, |i, j| y[i] * x[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Row `i`, column `j`, both 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn check_dim(&self, other: &OperatorBlock) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// `self ∘ other`: the block that maps `z` to `self(other(z))`.
    pub fn compose(&self, other: &OperatorBlock) -> Result<OperatorBlock> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = OperatorBlock::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> OperatorBlock {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: C64) -> OperatorBlock {
        OperatorBlock {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &OperatorBlock) -> Result<OperatorBlock> {
        self.check_dim(other)?;
        Ok(OperatorBlock {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &OperatorBlock) -> Result<OperatorBlock> {
        self.check_dim(other)?;
        Ok(OperatorBlock {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self += c * other`; dimensions must agree.
    pub(crate) fn add_scaled_in_place(&mut self, c: C64, other: &OperatorBlock) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_add(x, &mut y);
        Ok(y)
    }

    /// `y += self * x` without checks.
    #[inline]
    pub(crate) fn apply_add(&self, x: &[C64], y: &mut [C64]) {
        let d = self.dim;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * d..(i + 1) * d];
            *yi += row.iter().zip(x).map(|(a, b)| a * b).sum::<C64>();
        }
    }

    /// `y += self^H * x` without checks.
    #[inline]
    pub(crate) fn apply_adjoint_add(&self, x: &[C64], y: &mut [C64]) {
        let d = self.dim;
        for (i, xi) in x.iter().enumerate() {
            let row = &self.data[i * d..(i + 1) * d];
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += a.conj() * xi;
            }
        }
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    /// Operator norm on `C^d` (largest singular value).
    pub fn op_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Jacobi converges for every finite matrix; blocks are finite by construction.
        singular_values(&self.to_cmatrix()).expect("Jacobi SVD on a finite block")[0]
    }

    pub fn max_abs_diff(&self, other: &OperatorBlock) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

// ── block vectors ───────────────────────────────────────────────────

/// `x = (x_0, ..., x_{N-1})` with `x_j` in `C^d`; stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    dim: usize,
    data: Vec<C64>,
}

impl BlockVector {
    pub fn zeros(dim: usize, n: usize) -> Self {
        BlockVector {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * n],
        }
    }

    pub fn from_blocks(dim: usize, blocks: Vec<Vec<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        let mut data = Vec::with_capacity(dim * blocks.len());
        for b in blocks {
            if b.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: b.len(),
                });
            }
            data.extend(b);
        }
        check_finite(&data)?;
        Ok(BlockVector { dim, data })
    }

    pub fn from_flat(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::ShapeMismatch {
                left: format!("blocks of length {dim}"),
                right: format!("{} entries", data.len()),
            });
        }
        check_finite(&data)?;
        Ok(BlockVector { dim, data })
    }

    /// `x e_j`: the vector with `x` in slot `j` (0-based) and zeros elsewhere.
    pub fn basis(x: &[C64], j: usize, n: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::OutOfRange {
                index: j as isize,
                lo: 0,
                hi: n as isize - 1,
            });
        }
        let mut v = Self::zeros(x.len(), n);
        v.data[j * x.len()..(j + 1) * x.len()].copy_from_slice(x);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of blocks `N`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Block `j`, 0-based.
    pub fn block(&self, j: usize) -> &[C64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub(crate) fn block_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    /// `<<self, other>> = sum_j <self_j, other_j>`.
    pub fn inner(&self, other: &BlockVector) -> Result<C64> {
        self.check_shape(other)?;
        Ok(inner(&self.data, &other.data))
    }

    pub fn scale(&self, c: C64) -> BlockVector {
        BlockVector {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sub(&self, other: &BlockVector) -> Result<BlockVector> {
        self.check_shape(other)?;
        Ok(BlockVector {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn normalized(&self) -> BlockVector {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(C64::new(1.0 / n, 0.0))
        }
    }

    fn check_shape(&self, other: &BlockVector) -> Result<()> {
        if self.dim != other.dim || self.data.len() != other.data.len() {
            return Err(Error::ShapeMismatch {
                left: format!("{} blocks of C^{}", self.len(), self.dim),
                right: format!("{} blocks of C^{}", other.len(), other.dim),
            });
        }
        Ok(())
    }
}
