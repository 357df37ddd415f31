//! Seeded random instances. Entries are complex Gaussians with
//! `E|z|^2 = 1`; every generator is deterministic given its seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{BlockVector, CMatrix, OperatorBlock, C64};
use crate::matrices::BlockMatrix;

/// Derive an independent seed for trial `index` of a run seeded with `seed`
/// (splitmix64 finaliser).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    /// Angle uniform in `[-pi, pi)`.
    pub fn angle(&mut self) -> f64 {
        self.uniform(-std::f64::consts::PI, std::f64::consts::PI)
    }

    pub fn complex(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }

    pub fn cvec(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn unit_cvec(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v = self.cvec(n);
            let nv = crate::hilbert::norm(&v);
            if nv > 1e-12 {
                return v.into_iter().map(|z| z / nv).collect();
            }
        }
    }

    pub fn cmatrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn block(&mut self, dim: usize) -> OperatorBlock {
        OperatorBlock::from_fn(dim, |_, _| self.complex())
    }

    pub fn block_vector(&mut self, dim: usize, n: usize) -> BlockVector {
        BlockVector::from_flat(dim, self.cvec(dim * n)).expect("finite Gaussian entries")
    }

    pub fn unit_block_vector(&mut self, dim: usize, n: usize) -> BlockVector {
        BlockVector::from_flat(dim, self.unit_cvec(dim * n)).expect("finite Gaussian entries")
    }

    pub fn dense(&mut self, dim: usize, n: usize) -> BlockMatrix {
        let blocks = (0..n * n).map(|_| self.block(dim)).collect();
        BlockMatrix::dense(dim, n, blocks).expect("consistent shape")
    }

    /// Banded matrix with every diagonal `lo <= l <= hi` filled.
    pub fn banded(&mut self, dim: usize, n: usize, lo: isize, hi: isize) -> BlockMatrix {
        let mut diags = BTreeMap::new();
        for l in lo..=hi {
            if l.unsigned_abs() < n {
                let len = n - l.unsigned_abs();
                diags.insert(l, (0..len).map(|_| self.block(dim)).collect());
            }
        }
        BlockMatrix::banded(dim, n, diags).expect("consistent shape")
    }

    /// Toeplitz matrix with random `T_l` for `lo <= l <= hi`.
    pub fn toeplitz(&mut self, dim: usize, n: usize, lo: isize, hi: isize) -> BlockMatrix {
        let coeffs = (lo..=hi)
            .filter(|l| l.unsigned_abs() < n)
            .map(|l| (l, self.block(dim)))
            .collect();
        BlockMatrix::toeplitz(dim, n, coeffs).expect("consistent shape")
    }
}
