//! Structured `N x N` block matrices and the Schur algebra on them.
//!
//! A [`BlockMatrix`] is the truncation `A^(N)` of an infinite matrix
//! `A = (T_kj)`. Storage is one of
//!
//! * dense: all `N^2` blocks, row-major;
//! * Toeplitz: one block `T_l` per stored offset, with `entry(k, j) = T_{j-k}`;
//! * banded: the diagonals `D_l = (T_{k,k+l})_k` for the stored offsets.
//!
//! Offsets that are not stored are zero. The tag only affects storage and
//! speed; two matrices are semantically equal when their entries agree, see
//! [`BlockMatrix::max_entry_diff`].
//!
//! Every accessor is 0-based: `entry(k, j)` is `T_{k+1, j+1}` of the infinite
//! matrix and `diagonal(l)` lists `T_{k, k+l}` for increasing `k`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BlockVector, CMatrix, OperatorBlock, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Dense,
    Toeplitz,
    Banded,
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<OperatorBlock>),
    Toeplitz(BTreeMap<isize, OperatorBlock>),
    Banded(BTreeMap<isize, Vec<OperatorBlock>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    dim: usize,
    size: usize,
    storage: Storage,
}

fn diag_len(n: usize, l: isize) -> usize {
    n.saturating_sub(l.unsigned_abs())
}

/// Position of `T_{k,k+l}` inside the stored diagonal `D_l`.
#[inline]
fn diag_index(k: usize, j: usize) -> usize {
    k.min(j)
}

impl BlockMatrix {
    // ── construction ────────────────────────────────────────────────

    fn check_params(dim: usize, size: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        if size == 0 {
            return Err(Error::invalid("N", "must be at least 1"));
        }
        Ok(())
    }

    fn check_block(dim: usize, b: &OperatorBlock) -> Result<()> {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: b.dim(),
            });
        }
        Ok(())
    }

    /// Dense matrix from `N^2` blocks in row-major order.
    pub fn dense(dim: usize, size: usize, blocks: Vec<OperatorBlock>) -> Result<Self> {
        Self::check_params(dim, size)?;
        if blocks.len() != size * size {
            return Err(Error::ShapeMismatch {
                left: format!("{size}x{size} blocks"),
                right: format!("{} blocks", blocks.len()),
            });
        }
        for b in &blocks {
            Self::check_block(dim, b)?;
        }
        Ok(BlockMatrix {
            dim,
            size,
            storage: Storage::Dense(blocks),
        })
    }

    /// Dense matrix with `entry(k, j) = f(k, j)`.
    pub fn from_fn(
        dim: usize,
        size: usize,
        mut f: impl FnMut(usize, usize) -> OperatorBlock,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(size * size);
        for k in 0..size {
            for j in 0..size {
                blocks.push(f(k, j));
            }
        }
        Self::dense(dim, size, blocks)
    }

    /// Toeplitz matrix `entry(k, j) = T_{j-k}`; offsets must satisfy `|l| < N`.
    pub fn toeplitz(
        dim: usize,
        size: usize,
        coeffs: BTreeMap<isize, OperatorBlock>,
    ) -> Result<Self> {
        Self::check_params(dim, size)?;
        for (&l, b) in &coeffs {
            if l.unsigned_abs() >= size {
                return Err(Error::OutOfRange {
                    index: l,
                    lo: 1 - size as isize,
                    hi: size as isize - 1,
                });
            }
            Self::check_block(dim, b)?;
        }
        Ok(BlockMatrix {
            dim,
            size,
            storage: Storage::Toeplitz(coeffs),
        })
    }

    /// Banded matrix from its stored diagonals; `D_l` must hold `N - |l|` blocks.
    pub fn banded(
        dim: usize,
        size: usize,
        diags: BTreeMap<isize, Vec<OperatorBlock>>,
    ) -> Result<Self> {
        Self::check_params(dim, size)?;
        for (&l, d) in &diags {
            if l.unsigned_abs() >= size {
                return Err(Error::OutOfRange {
                    index: l,
                    lo: 1 - size as isize,
                    hi: size as isize - 1,
                });
            }
            if d.len() != diag_len(size, l) {
                return Err(Error::ShapeMismatch {
                    left: format!("diagonal {l} of length {}", diag_len(size, l)),
                    right: format!("{} blocks", d.len()),
                });
            }
            for b in d {
                Self::check_block(dim, b)?;
            }
        }
        Ok(BlockMatrix {
            dim,
            size,
            storage: Storage::Banded(diags),
        })
    }

    /// Block identity, stored as Toeplitz with `T_0 = Id`.
    pub fn identity(dim: usize, size: usize) -> Result<Self> {
        Self::toeplitz(
            dim,
            size,
            BTreeMap::from([(0, OperatorBlock::identity(dim))]),
        )
    }

    /// The zero matrix (banded with no stored diagonals).
    pub fn zeros(dim: usize, size: usize) -> Result<Self> {
        Self::banded(dim, size, BTreeMap::new())
    }

    /// `x ⊗ y`: the dense matrix with `entry(k, j) = x_j ⊗ y_k`, which acts
    /// as `z ↦ <<z, x>> y`.
    pub fn rank_one(x: &BlockVector, y: &BlockVector) -> Result<Self> {
        if x.dim() != y.dim() || x.len() != y.len() {
            return Err(Error::ShapeMismatch {
                left: format!("{} blocks of C^{}", x.len(), x.dim()),
                right: format!("{} blocks of C^{}", y.len(), y.dim()),
            });
        }
        let n = x.len();
        let mut blocks = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                blocks.push(OperatorBlock::rank_one(x.block(j), y.block(k))?);
            }
        }
        Self::dense(x.dim(), n, blocks)
    }

    /// `(a_kj T)`: a scalar matrix tensored with one operator.
    pub fn tensor_scalar(a: &CMatrix, t: &OperatorBlock) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::ShapeMismatch {
                left: "square scalar matrix".into(),
                right: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        Self::from_fn(t.dim(), n, |k, j| t.scale(a.get(k, j)))
    }

    // ── accessors ───────────────────────────────────────────────────

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of block rows `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn structure(&self) -> Structure {
        match self.storage {
            Storage::Dense(_) => Structure::Dense,
            Storage::Toeplitz(_) => Structure::Toeplitz,
            Storage::Banded(_) => Structure::Banded,
        }
    }

    /// Stored block at `(k, j)` (0-based), or `None` when the entry is
    /// structurally zero.
    pub fn block_at(&self, k: usize, j: usize) -> Option<&OperatorBlock> {
        assert!(k < self.size && j < self.size, "index ({k}, {j}) out of range");
        let l = j as isize - k as isize;
        match &self.storage {
            Storage::Dense(b) => Some(&b[k * self.size + j]),
            Storage::Toeplitz(c) => c.get(&l),
            Storage::Banded(d) => d.get(&l).map(|v| &v[diag_index(k, j)]),
        }
    }

    /// `T_kj` with 0-based `(k, j)`.
    pub fn entry(&self, k: usize, j: usize) -> OperatorBlock {
        self.block_at(k, j)
            .cloned()
            .unwrap_or_else(|| OperatorBlock::zeros(self.dim))
    }

    /// Offsets whose diagonals may be nonzero.
    pub fn offsets(&self) -> Vec<isize> {
        match &self.storage {
            Storage::Dense(_) => {
                let n = self.size as isize;
                (1 - n..n).collect()
            }
            Storage::Toeplitz(c) => c.keys().copied().collect(),
            Storage::Banded(d) => d.keys().copied().collect(),
        }
    }

    /// Toeplitz coefficients `T_l`, if Toeplitz-tagged.
    pub fn toeplitz_coefficients(&self) -> Option<&BTreeMap<isize, OperatorBlock>> {
        match &self.storage {
            Storage::Toeplitz(c) => Some(c),
            _ => None,
        }
    }

    /// `D_l = (T_{k,k+l})_k`, `N - |l|` blocks.
    pub fn diagonal(&self, l: isize) -> Result<Vec<OperatorBlock>> {
        if l.unsigned_abs() >= self.size {
            return Err(Error::EmptyDiagonal {
                offset: l,
                size: self.size,
            });
        }
        let len = diag_len(self.size, l);
        let start_k = if l < 0 { l.unsigned_abs() } else { 0 };
        Ok((0..len)
            .map(|i| {
                let k = start_k + i;
                self.entry(k, (k as isize + l) as usize)
            })
            .collect())
    }

    /// Nonzero offsets `(lowest, highest)`, or `None` for the zero matrix.
    pub fn band_bounds(&self) -> Option<(isize, isize)> {
        let nz: Vec<isize> = self
            .offsets()
            .into_iter()
            .filter(|&l| !self.diagonal_is_zero(l))
            .collect();
        Some((*nz.first()?, *nz.last()?))
    }

    fn diagonal_is_zero(&self, l: isize) -> bool {
        let len = diag_len(self.size, l);
        let start_k = if l < 0 { l.unsigned_abs() } else { 0 };
        (0..len).all(|i| {
            let k = start_k + i;
            self.block_at(k, (k as isize + l) as usize)
                .is_none_or(|b| b.is_zero())
        })
    }

    /// True when `entry(k, j) = 0` for all `j < k`.
    pub fn is_upper_triangular(&self) -> bool {
        self.band_bounds().is_none_or(|(lo, _)| lo >= 0)
    }

    /// `sup_{k,j} ||T_kj||`.
    pub fn sup_block_norm(&self) -> f64 {
        self.stored_blocks().map(|b| b.op_norm()).fold(0.0, f64::max)
    }

    fn stored_blocks(&self) -> Box<dyn Iterator<Item = &OperatorBlock> + '_> {
        match &self.storage {
            Storage::Dense(b) => Box::new(b.iter()),
            Storage::Toeplitz(c) => Box::new(c.values()),
            Storage::Banded(d) => Box::new(d.values().flatten()),
        }
    }

    // ── conversions ─────────────────────────────────────────────────

    /// Same entries, dense storage.
    pub fn to_dense(&self) -> BlockMatrix {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            _ => BlockMatrix {
                dim: self.dim,
                size: self.size,
                storage: Storage::Dense(
                    (0..self.size * self.size)
                        .map(|i| self.entry(i / self.size, i % self.size))
                        .collect(),
                ),
            },
        }
    }

    /// Same entries, banded storage over the currently stored offsets.
    pub fn to_banded(&self) -> BlockMatrix {
        let diags = self
            .offsets()
            .into_iter()
            .map(|l| (l, self.diagonal(l).expect("stored offsets are in range")))
            .collect();
        BlockMatrix {
            dim: self.dim,
            size: self.size,
            storage: Storage::Banded(diags),
        }
    }

    /// The `dN x dN` scalar matrix acting on the flattened `C^{dN}`.
    pub fn to_cmatrix(&self) -> CMatrix {
        let (d, n) = (self.dim, self.size);
        let mut m = CMatrix::zeros(d * n, d * n);
        for k in 0..n {
            for j in 0..n {
                if let Some(b) = self.block_at(k, j) {
                    for r in 0..d {
                        for c in 0..d {
                            m.set(k * d + r, j * d + c, b.get(r, c));
                        }
                    }
                }
            }
        }
        m
    }

    /// Largest entrywise block deviation, ignoring storage tags.
    pub fn max_entry_diff(&self, other: &BlockMatrix) -> Result<f64> {
        self.check_shape(other)?;
        let zero = OperatorBlock::zeros(self.dim);
        let mut worst = 0.0f64;
        for k in 0..self.size {
            for j in 0..self.size {
                let a = self.block_at(k, j).unwrap_or(&zero);
                let b = other.block_at(k, j).unwrap_or(&zero);
                worst = worst.max(a.max_abs_diff(b));
            }
        }
        Ok(worst)
    }

    // ── algebra ─────────────────────────────────────────────────────

    fn check_shape(&self, other: &BlockMatrix) -> Result<()> {
        if self.dim != other.dim || self.size != other.size {
            return Err(Error::ShapeMismatch {
                left: format!("N={} d={}", self.size, self.dim),
                right: format!("N={} d={}", other.size, other.dim),
            });
        }
        Ok(())
    }

    /// Offsets that can be nonzero in an entrywise product; `None` means all.
    fn offset_set(&self) -> Option<BTreeSet<isize>> {
        match &self.storage {
            Storage::Dense(_) => None,
            _ => Some(self.offsets().into_iter().collect()),
        }
    }

    /// Entrywise operation over the offsets `keys` (or everything when `None`),
    /// returning the tightest structure implied by the operands.
    fn combine(
        &self,
        other: &BlockMatrix,
        keys: Option<BTreeSet<isize>>,
        op: impl Fn(Option<&OperatorBlock>, Option<&OperatorBlock>) -> Result<OperatorBlock>,
    ) -> Result<BlockMatrix> {
        self.check_shape(other)?;
        let (d, n) = (self.dim, self.size);
        if let (Storage::Toeplitz(a), Storage::Toeplitz(b)) = (&self.storage, &other.storage) {
            let keys = keys.unwrap_or_else(|| a.keys().chain(b.keys()).copied().collect());
            let coeffs = keys
                .into_iter()
                .map(|l| Ok((l, op(a.get(&l), b.get(&l))?)))
                .collect::<Result<_>>()?;
            return Self::toeplitz(d, n, coeffs);
        }
        let full = (2 * n - 1) as usize;
        let any_banded = matches!(self.storage, Storage::Banded(_))
            || matches!(other.storage, Storage::Banded(_));
        match keys {
            Some(keys) if any_banded || keys.len() < full => {
                let diags = keys
                    .into_iter()
                    .map(|l| {
                        let start_k = if l < 0 { l.unsigned_abs() } else { 0 };
                        let blocks = (0..diag_len(n, l))
                            .map(|i| {
                                let k = start_k + i;
                                let j = (k as isize + l) as usize;
                                op(self.block_at(k, j), other.block_at(k, j))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((l, blocks))
                    })
                    .collect::<Result<_>>()?;
                Self::banded(d, n, diags)
            }
            _ => {
                let mut blocks = Vec::with_capacity(n * n);
                for k in 0..n {
                    for j in 0..n {
                        blocks.push(op(self.block_at(k, j), other.block_at(k, j))?);
                    }
                }
                Self::dense(d, n, blocks)
            }
        }
    }

    /// Schur product `A * B = (T_kj S_kj)`, with `T_kj S_kj` the composition
    /// `T_kj ∘ S_kj`. Not commutative for `d > 1`.
    pub fn schur_product(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        let keys = match (self.offset_set(), other.offset_set()) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(a.intersection(&b).copied().collect()),
        };
        let d = self.dim;
        self.combine(other, keys, |a, b| match (a, b) {
            (Some(a), Some(b)) => a.compose(b),
            _ => Ok(OperatorBlock::zeros(d)),
        })
    }

    fn union_keys(&self, other: &BlockMatrix) -> Option<BTreeSet<isize>> {
        match (self.offset_set(), other.offset_set()) {
            (Some(a), Some(b)) => Some(a.union(&b).copied().collect()),
            _ => None,
        }
    }

    pub fn add(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        let d = self.dim;
        self.combine(other, self.union_keys(other), |a, b| match (a, b) {
            (Some(a), Some(b)) => a.add(b),
            (Some(a), None) => Ok(a.clone()),
            (None, Some(b)) => Ok(b.clone()),
            (None, None) => Ok(OperatorBlock::zeros(d)),
        })
    }

    pub fn sub(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        let d = self.dim;
        self.combine(other, self.union_keys(other), |a, b| match (a, b) {
            (Some(a), Some(b)) => a.sub(b),
            (Some(a), None) => Ok(a.clone()),
            (None, Some(b)) => Ok(b.scale(C64::new(-1.0, 0.0))),
            (None, None) => Ok(OperatorBlock::zeros(d)),
        })
    }

    pub fn scale(&self, c: C64) -> BlockMatrix {
        let storage = match &self.storage {
            Storage::Dense(b) => Storage::Dense(b.iter().map(|x| x.scale(c)).collect()),
            Storage::Toeplitz(t) => Storage::Toeplitz(t.iter().map(|(&l, x)| (l, x.scale(c))).collect()),
            Storage::Banded(dg) => Storage::Banded(
                dg.iter()
                    .map(|(&l, v)| (l, v.iter().map(|x| x.scale(c)).collect()))
                    .collect(),
            ),
        };
        BlockMatrix {
            dim: self.dim,
            size: self.size,
            storage,
        }
    }

    /// Multiply diagonal `l` by `weight(l)`; the storage tag is kept.
    pub fn scale_diagonals(&self, weight: impl Fn(isize) -> C64) -> BlockMatrix {
        let n = self.size;
        let storage = match &self.storage {
            Storage::Dense(b) => Storage::Dense(
                b.iter()
                    .enumerate()
                    .map(|(i, x)| x.scale(weight((i % n) as isize - (i / n) as isize)))
                    .collect(),
            ),
            Storage::Toeplitz(t) => {
                Storage::Toeplitz(t.iter().map(|(&l, x)| (l, x.scale(weight(l)))).collect())
            }
            Storage::Banded(dg) => Storage::Banded(
                dg.iter()
                    .map(|(&l, v)| {
                        let w = weight(l);
                        (l, v.iter().map(|x| x.scale(w)).collect())
                    })
                    .collect(),
            ),
        };
        BlockMatrix {
            dim: self.dim,
            size: self.size,
            storage,
        }
    }

    /// Conjugate transpose: `entry(k, j) = T_jk^*`. Toeplitz stays Toeplitz
    /// with `T_l ↦ T_{-l}^*`.
    pub fn adjoint(&self) -> BlockMatrix {
        let n = self.size;
        let storage = match &self.storage {
            Storage::Dense(b) => Storage::Dense(
                (0..n * n)
                    .map(|i| b[(i % n) * n + i / n].adjoint())
                    .collect(),
            ),
            Storage::Toeplitz(t) => Storage::Toeplitz(t.iter().map(|(&l, x)| (-l, x.adjoint())).collect()),
            // D_l of the adjoint is the entrywise adjoint of D_{-l}, same order.
            Storage::Banded(dg) => Storage::Banded(
                dg.iter()
                    .map(|(&l, v)| (-l, v.iter().map(|x| x.adjoint()).collect()))
                    .collect(),
            ),
        };
        BlockMatrix {
            dim: self.dim,
            size: self.size,
            storage,
        }
    }

    fn check_vector(&self, x: &BlockVector) -> Result<()> {
        if x.dim() != self.dim || x.len() != self.size {
            return Err(Error::ShapeMismatch {
                left: format!("N={} d={}", self.size, self.dim),
                right: format!("vector of {} blocks of C^{}", x.len(), x.dim()),
            });
        }
        Ok(())
    }

    /// `y_k = sum_j T_kj(x_j)`; only stored diagonals are visited.
    pub fn apply(&self, x: &BlockVector) -> Result<BlockVector> {
        self.check_vector(x)?;
        let n = self.size;
        let mut y = BlockVector::zeros(self.dim, n);
        for l in self.offsets() {
            let start_k = if l < 0 { l.unsigned_abs() } else { 0 };
            for i in 0..diag_len(n, l) {
                let k = start_k + i;
                let j = (k as isize + l) as usize;
                if let Some(b) = self.block_at(k, j) {
                    b.apply_add(x.block(j), y.block_mut(k));
                }
            }
        }
        Ok(y)
    }

    /// `A^* x` without materialising the adjoint.
    pub fn apply_adjoint(&self, x: &BlockVector) -> Result<BlockVector> {
        self.check_vector(x)?;
        let n = self.size;
        let mut y = BlockVector::zeros(self.dim, n);
        for l in self.offsets() {
            let start_k = if l < 0 { l.unsigned_abs() } else { 0 };
            for i in 0..diag_len(n, l) {
                let k = start_k + i;
                let j = (k as isize + l) as usize;
                if let Some(b) = self.block_at(k, j) {
                    b.apply_adjoint_add(x.block(k), y.block_mut(j));
                }
            }
        }
        Ok(y)
    }

    /// The matrix keeping only `D_l`.
    pub fn only_diagonal(&self, l: isize) -> Result<BlockMatrix> {
        let d = self.diagonal(l)?;
        Self::banded(self.dim, self.size, BTreeMap::from([(l, d)]))
    }

    /// Row `k` (0-based), all other rows zero.
    pub fn only_row(&self, k: usize) -> Result<BlockMatrix> {
        let n = self.size;
        Self::from_fn(self.dim, n, |r, j| {
            if r == k {
                self.entry(r, j)
            } else {
                OperatorBlock::zeros(self.dim)
            }
        })
    }

    /// Column `j` (0-based), all other columns zero.
    pub fn only_column(&self, j: usize) -> Result<BlockMatrix> {
        let n = self.size;
        Self::from_fn(self.dim, n, |k, c| {
            if c == j {
                self.entry(k, c)
            } else {
                OperatorBlock::zeros(self.dim)
            }
        })
    }

    /// Leading `m x m` principal block submatrix; Toeplitz stays Toeplitz.
    pub fn truncate(&self, m: usize) -> Result<BlockMatrix> {
        if m == 0 || m > self.size {
            return Err(Error::invalid("m", format!("must lie in 1..={}", self.size)));
        }
        match &self.storage {
            Storage::Toeplitz(t) => Self::toeplitz(
                self.dim,
                m,
                t.iter()
                    .filter(|(l, _)| l.unsigned_abs() < m)
                    .map(|(&l, b)| (l, b.clone()))
                    .collect(),
            ),
            _ => Self::from_fn(self.dim, m, |k, j| self.entry(k, j)),
        }
    }

    // ── JSON interchange ────────────────────────────────────────────

    pub fn to_json(&self) -> String {
        let data = match &self.storage {
            Storage::Dense(b) => serde_json::to_value(b),
            Storage::Toeplitz(t) => serde_json::to_value(
                t.iter()
                    .map(|(&offset, block)| ToeplitzEntry {
                        offset,
                        block: block.clone(),
                    })
                    .collect::<Vec<_>>(),
            ),
            Storage::Banded(dg) => serde_json::to_value(
                dg.iter()
                    .map(|(&offset, blocks)| BandedEntry {
                        offset,
                        blocks: blocks.clone(),
                    })
                    .collect::<Vec<_>>(),
            ),
        }
        .expect("finite blocks serialise");
        let repr = MatrixRepr {
            d: self.dim,
            n: self.size,
            structure: self.structure(),
            upper_triangular: self.is_upper_triangular(),
            data,
        };
        let mut s = serde_json::to_string(&repr).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<BlockMatrix> {
        let repr: MatrixRepr = serde_json::from_str(text)?;
        let field = |what: &str, e: serde_json::Error| Error::InvalidData(format!("field `data`{what}: {e}"));
        let m = match repr.structure {
            Structure::Dense => {
                let blocks: Vec<OperatorBlock> =
                    serde_json::from_value(repr.data).map_err(|e| field("", e))?;
                Self::dense(repr.d, repr.n, blocks)
            }
            Structure::Toeplitz => {
                let entries: Vec<ToeplitzEntry> =
                    serde_json::from_value(repr.data).map_err(|e| field("", e))?;
                let mut coeffs = BTreeMap::new();
                for e in entries {
                    if coeffs.insert(e.offset, e.block).is_some() {
                        return Err(Error::InvalidData(format!(
                            "field `data`: offset {} repeated",
                            e.offset
                        )));
                    }
                }
                Self::toeplitz(repr.d, repr.n, coeffs)
            }
            Structure::Banded => {
                let entries: Vec<BandedEntry> =
                    serde_json::from_value(repr.data).map_err(|e| field("", e))?;
                let mut diags = BTreeMap::new();
                for e in entries {
                    if diags.insert(e.offset, e.blocks).is_some() {
                        return Err(Error::InvalidData(format!(
                            "field `data`: offset {} repeated",
                            e.offset
                        )));
                    }
                }
                Self::banded(repr.d, repr.n, diags)
            }
        }
        .map_err(|e| Error::InvalidData(format!("field `data`: {e}")))?;
        if m.is_upper_triangular() != repr.upper_triangular {
            return Err(Error::InvalidData(format!(
                "field `upper_triangular` is {} but the entries say {}",
                repr.upper_triangular,
                m.is_upper_triangular()
            )));
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    structure: Structure,
    upper_triangular: bool,
    data: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToeplitzEntry {
    offset: isize,
    block: OperatorBlock,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandedEntry {
    offset: isize,
    blocks: Vec<OperatorBlock>,
}
