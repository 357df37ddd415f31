//! Scalar symbols on the circle, summability kernels and the Toeplitz masks
//! `M_eta = (eta^(j-k) Id)` used to smooth block matrices.
//!
//! `smooth(a, k)` is the Schur product `M_k * a`; with the Fejér kernel
//! `K_n` it is the Cesàro mean `sigma_n(a)`, with the Poisson kernel `P_r`
//! the Abel mean `P_r(a)`. Masks are materialised for offsets `|l| <= N - 1`
//! only, which is exact for `sigma_n` whenever `n <= N - 1` and for every
//! truncated matrix in general since the other diagonals do not exist.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{OperatorBlock, C64};
use crate::matrices::BlockMatrix;
use crate::quadrature::{circle_mean, trapezoid};

/// A scalar function on the circle, `f(t) = sum_l coeff(l) e^{ilt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarSymbol {
    /// Finitely supported Fourier coefficients.
    TrigPoly {
        #[serde(with = "coeff_pairs")]
        coeffs: BTreeMap<isize, C64>,
    },
    /// `K_n(t) = sum_{|k|<=n} (1 - |k|/(n+1)) e^{ikt}`.
    Fejer { n: usize },
    /// `P_r(t) = sum_k r^|k| e^{ikt}`, `0 <= r < 1`.
    Poisson { r: f64 },
    /// `D_n(t) = sum_{|k|<=n} e^{ikt}`; not a summability kernel.
    Dirichlet { n: usize },
}

pub fn fejer(n: usize) -> ScalarSymbol {
    ScalarSymbol::Fejer { n }
}

pub fn poisson(r: f64) -> Result<ScalarSymbol> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::invalid("r", format!("{r} is not in [0, 1)")));
    }
    Ok(ScalarSymbol::Poisson { r })
}

pub fn dirichlet(n: usize) -> ScalarSymbol {
    ScalarSymbol::Dirichlet { n }
}

pub fn trig_poly(coeffs: BTreeMap<isize, C64>) -> ScalarSymbol {
    ScalarSymbol::TrigPoly { coeffs }
}

/// Coefficient maps travel as `[[l, [re, im]], ...]`: JSON object keys are
/// strings, which an internally tagged enum cannot turn back into integers.
mod coeff_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::hilbert::C64;

    pub fn serialize<S: Serializer>(m: &BTreeMap<isize, C64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<isize, C64>, D::Error> {
        let pairs = Vec::<(isize, C64)>::deserialize(d)?;
        let len = pairs.len();
        let m: BTreeMap<_, _> = pairs.into_iter().collect();
        if m.len() != len {
            return Err(serde::de::Error::custom("duplicate offset in coeffs"));
        }
        Ok(m)
    }
}

/// `e^{ilt}` for a single frequency `l`.
pub fn exponential(l: isize) -> ScalarSymbol {
    trig_poly(BTreeMap::from([(l, C64::new(1.0, 0.0))]))
}

impl ScalarSymbol {
    pub fn coeff(&self, l: isize) -> C64 {
        let k = l.unsigned_abs();
        let re = match self {
            ScalarSymbol::TrigPoly { coeffs } => {
                return coeffs.get(&l).copied().unwrap_or_default();
            }
            ScalarSymbol::Fejer { n } if k <= *n => 1.0 - k as f64 / (*n as f64 + 1.0),
            ScalarSymbol::Poisson { r } => {
                if k == 0 {
                    1.0
                } else {
                    r.powi(k.min(i32::MAX as usize) as i32)
                }
            }
            ScalarSymbol::Dirichlet { n } if k <= *n => 1.0,
            _ => 0.0,
        };
        C64::new(re, 0.0)
    }

    /// Largest `|l|` with a nonzero coefficient; `None` for infinite support.
    pub fn degree(&self) -> Option<usize> {
        match self {
            ScalarSymbol::TrigPoly { coeffs } => Some(
                coeffs
                    .iter()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(l, _)| l.unsigned_abs())
                    .max()
                    .unwrap_or(0),
            ),
            ScalarSymbol::Fejer { n } | ScalarSymbol::Dirichlet { n } => Some(*n),
            ScalarSymbol::Poisson { r } => (*r == 0.0).then_some(0),
        }
    }

    /// Offsets `l` with `|l| <= max_abs` and a possibly nonzero coefficient.
    fn support_within(&self, max_abs: usize) -> Vec<isize> {
        match self {
            ScalarSymbol::TrigPoly { coeffs } => coeffs
                .iter()
                .filter(|(l, c)| l.unsigned_abs() <= max_abs && c.norm() > 0.0)
                .map(|(l, _)| *l)
                .collect(),
            _ => {
                let m = self.degree().map_or(max_abs, |d| d.min(max_abs)) as isize;
                (-m..=m).collect()
            }
        }
    }

    /// `f(t)`; closed forms are used for the kernels.
    pub fn eval(&self, t: f64) -> C64 {
        let half = (0.5 * t).sin();
        match self {
            ScalarSymbol::TrigPoly { coeffs } => coeffs
                .iter()
                .map(|(&l, c)| c * C64::from_polar(1.0, l as f64 * t))
                .sum(),
            ScalarSymbol::Fejer { n } => {
                let m = *n as f64 + 1.0;
                let v = if half.abs() < 1e-9 {
                    m
                } else {
                    let q = (0.5 * m * t).sin() / half;
                    q * q / m
                };
                C64::new(v, 0.0)
            }
            ScalarSymbol::Poisson { r } => {
                C64::new((1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r), 0.0)
            }
            ScalarSymbol::Dirichlet { n } => {
                let v = if half.abs() < 1e-9 {
                    2.0 * *n as f64 + 1.0
                } else {
                    ((*n as f64 + 0.5) * t).sin() / half
                };
                C64::new(v, 0.0)
            }
        }
    }

    /// `sum_l |coeff(l)|`.
    pub fn l1_fourier_norm(&self) -> f64 {
        match self {
            ScalarSymbol::TrigPoly { coeffs } => coeffs.values().map(|c| c.norm()).sum(),
            ScalarSymbol::Fejer { n } => *n as f64 + 1.0,
            ScalarSymbol::Poisson { r } => (1.0 + r) / (1.0 - r),
            ScalarSymbol::Dirichlet { n } => 2.0 * *n as f64 + 1.0,
        }
    }

    /// `(1/2pi) ∫ |f|` by the circle trapezoid rule.
    pub fn l1_norm(&self, quad_points: usize) -> f64 {
        circle_mean(|t| self.eval(t).norm(), quad_points)
    }

    /// The symbol of `eta * f` (convolution on the circle), whose
    /// coefficients are the products `eta^(l) f^(l)`.
    pub fn convolve(&self, other: &ScalarSymbol) -> ScalarSymbol {
        if let (ScalarSymbol::Poisson { r: a }, ScalarSymbol::Poisson { r: b }) = (self, other) {
            return ScalarSymbol::Poisson { r: a * b };
        }
        let support = match (self.degree(), other.degree()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("only Poisson symbols have infinite support"),
        };
        let coeffs = self
            .support_within(support)
            .into_iter()
            .map(|l| (l, self.coeff(l) * other.coeff(l)))
            .filter(|(_, c)| c.norm() > 0.0)
            .collect();
        trig_poly(coeffs)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarSymbol::Poisson { r } => poisson(*r).map(|_| ()),
            ScalarSymbol::TrigPoly { coeffs } => {
                if coeffs.values().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidData("non-finite coefficient".into()))
                }
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: ScalarSymbol = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

/// `M_sym = (sym^(j-k) Id)` as an `N x N` Toeplitz block matrix.
pub fn mask(sym: &ScalarSymbol, dim: usize, size: usize) -> Result<BlockMatrix> {
    let max_abs = size.saturating_sub(1);
    let coeffs = sym
        .support_within(max_abs)
        .into_iter()
        .map(|l| (l, sym.coeff(l)))
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(l, c)| (l, OperatorBlock::scalar(dim, c)))
        .collect();
    BlockMatrix::toeplitz(dim, size, coeffs)
}

/// `M_t = (e^{i(j-k)t} Id)`.
pub fn modulation_mask(t: f64, dim: usize, size: usize) -> Result<BlockMatrix> {
    let n = size as isize;
    let coeffs = (1 - n..n)
        .map(|l| (l, OperatorBlock::scalar(dim, C64::from_polar(1.0, l as f64 * t))))
        .collect();
    BlockMatrix::toeplitz(dim, size, coeffs)
}

/// `M_sym * a`.
pub fn smooth(a: &BlockMatrix, sym: &ScalarSymbol) -> Result<BlockMatrix> {
    mask(sym, a.dim(), a.size())?.schur_product(a)
}

// ── summability kernels ─────────────────────────────────────────────

/// A one-parameter family `n ↦ k_n` of scalar symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummabilityKernel {
    Fejer,
    /// Indexed by `r_n = 1 - 1/n` (`r_0 = 0`).
    Poisson,
    /// Partial sums; fails the uniform `L^1` bound.
    Dirichlet,
}

impl SummabilityKernel {
    pub fn member(&self, n: usize) -> ScalarSymbol {
        match self {
            SummabilityKernel::Fejer => fejer(n),
            SummabilityKernel::Poisson => ScalarSymbol::Poisson {
                r: Self::poisson_radius(n),
            },
            SummabilityKernel::Dirichlet => dirichlet(n),
        }
    }

    pub fn poisson_radius(n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            1.0 - 1.0 / n as f64
        }
    }

    /// The uniform `L^1` bound `C` the family is known to satisfy.
    pub fn l1_norm_bound(&self) -> Option<f64> {
        match self {
            SummabilityKernel::Fejer | SummabilityKernel::Poisson => Some(1.0),
            SummabilityKernel::Dirichlet => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SummabilityKernel::Fejer => "fejer",
            SummabilityKernel::Poisson => "poisson",
            SummabilityKernel::Dirichlet => "dirichlet",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomRow {
    pub n: usize,
    /// `coeff(0)` of the member, which must be exactly one.
    pub zeroth_coeff: f64,
    /// `(1/2pi) ∫ k_n` by quadrature.
    pub mean: f64,
    /// `(1/2pi) ∫ |k_n|` by quadrature.
    pub l1_norm: f64,
    /// `(1/2pi) ∫_{delta <= |t| <= pi} k_n`, one per requested delta.
    pub tails: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub kernel: SummabilityKernel,
    pub deltas: Vec<f64>,
    pub quad_points: usize,
    pub rows: Vec<AxiomRow>,
    /// Bound used for the `L^1` test: the declared one, or the first row's
    /// norm when the family declares none.
    pub l1_bound: f64,
    pub mean_one: bool,
    pub uniform_l1: bool,
    pub tail_decay: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.mean_one && self.uniform_l1 && self.tail_decay
    }
}

pub const AXIOM_MEAN_TOL: f64 = 1e-8;
pub const AXIOM_L1_TOL: f64 = 1e-6;

/// Evaluate the three kernel axioms on the members `indices`.
///
/// Mean one: `coeff(0) == 1` and the quadrature mean within `1e-8` of one.
/// Uniform `L^1` bound: every `L^1` norm at most `C + 1e-6`. Mass
/// concentration: for each delta the tail at the last index does not
/// exceed the tail at the first.
pub fn kernel_axiom_check(
    kernel: SummabilityKernel,
    indices: &[usize],
    deltas: &[f64],
    quad_points: usize,
) -> Result<AxiomReport> {
    if quad_points < 1024 {
        return Err(Error::invalid("quad_points", "must be at least 1024"));
    }
    if indices.is_empty() {
        return Err(Error::invalid("indices", "must be nonempty"));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < PI)) {
        return Err(Error::invalid("delta", format!("{d} is not in (0, pi)")));
    }
    let rows: Vec<AxiomRow> = indices
        .iter()
        .map(|&n| {
            let k = kernel.member(n);
            let tails = deltas
                .iter()
                .map(|&delta| {
                    // even kernel: both arcs carry the same mass
                    2.0 * trapezoid(|t| k.eval(t).re, delta, PI, quad_points / 2) / (2.0 * PI)
                })
                .collect();
            AxiomRow {
                n,
                zeroth_coeff: k.coeff(0).re,
                mean: circle_mean(|t| k.eval(t).re, quad_points),
                l1_norm: k.l1_norm(quad_points),
                tails,
            }
        })
        .collect();
    let l1_bound = kernel.l1_norm_bound().unwrap_or(rows[0].l1_norm);
    let mean_one = rows
        .iter()
        .all(|r| r.zeroth_coeff == 1.0 && (r.mean - 1.0).abs() <= AXIOM_MEAN_TOL);
    let uniform_l1 = rows.iter().all(|r| r.l1_norm <= l1_bound + AXIOM_L1_TOL);
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let tail_decay = first
        .tails
        .iter()
        .zip(&last.tails)
        .all(|(a, b)| b.abs() <= a.abs());
    Ok(AxiomReport {
        kernel,
        deltas: deltas.to_vec(),
        quad_points,
        rows,
        l1_bound,
        mean_one,
        uniform_l1,
        tail_decay,
    })
}
