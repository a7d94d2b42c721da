//! Complete Nevanlinna-Pick tests on finite samples.
//!
//! A kernel normalized at a base point is a complete Nevanlinna-Pick kernel
//! exactly when `F = 1 - 1/K~` is positive semidefinite, and then a
//! factorization `F[i][j] = <b_i, b_j>` embeds the sample into the
//! Drury-Arveson ball. On a finite sample a non-PSD `F` refutes the
//! property; a PSD `F` is only consistent with it.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, NormalizedGram};
use crate::linalg::{self, HermitianMatrix};

/// Relative tolerance for floating-point ratio comparisons.
pub const RATIO_REL_TOL: f64 = 1e-12;

/// `F[i][j] = 1 - 1/gram_tilde[i][j]`; the base row and column are exactly
/// zero.
pub fn one_minus_inverse(ng: &NormalizedGram) -> Result<HermitianMatrix> {
    let kt = &ng.gram_tilde;
    let n = kt.dim();
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if kt.get(i, j) == zero {
                return Err(Error::Irreducible(format!(
                    "normalized kernel vanishes at ({i}, {j})"
                )));
            }
        }
    }
    let b = ng.base_index;
    HermitianMatrix::from_fn(n, |i, j| {
        if i == b || j == b {
            zero
        } else {
            Complex64::new(1.0, 0.0) - kt.get(i, j).inv()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CnpStatus {
    /// `F` is PSD on the sample. Necessary, not sufficient.
    Consistent,
    /// `F` has a negative eigenvalue beyond tolerance.
    CertifiedNotCnp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CnpVerdict {
    pub status: CnpStatus,
    pub min_eig: f64,
    pub tol_used: f64,
}

pub fn cnp_sample_check(g: &HermitianMatrix, base: usize, tol: f64) -> Result<CnpVerdict> {
    let f = one_minus_inverse(&kernels::normalize(g, base)?)?;
    let v = linalg::psd_check(&f, tol)?;
    Ok(CnpVerdict {
        status: if v.is_psd {
            CnpStatus::Consistent
        } else {
            CnpStatus::CertifiedNotCnp
        },
        min_eig: if f.dim() == 0 { 0.0 } else { v.min_eig },
        tol_used: tol,
    })
}

/// Sample points `b_i` of the Drury-Arveson ball of dimension `rank` with
/// `1 / (1 - <b_i, b_j>) = K~(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub rank: usize,
    pub b_points: Vec<Vec<Complex64>>,
    pub base_index: usize,
    /// `max |<b_i, b_j> - F[i][j]|`.
    pub residual: f64,
    /// `max |1 / (1 - <b_i, b_j>) - K~(i, j)|`.
    pub kernel_residual: f64,
    pub normalized: NormalizedGram,
}

pub fn agler_mccarthy_embed(g: &HermitianMatrix, base: usize, tol: f64) -> Result<EmbeddingResult> {
    let normalized = kernels::normalize(g, base)?;
    let f = one_minus_inverse(&normalized)?;
    let factor = match linalg::psd_factor(&f, tol) {
        Ok(x) => x,
        Err(Error::NotPsd { min_eig }) => return Err(Error::NotCnp { min_eig }),
        Err(e) => return Err(e),
    };
    let mut b_points = factor.rows;
    let rank = factor.rank;
    b_points[base] = vec![Complex64::new(0.0, 0.0); rank];

    for (index, b) in b_points.iter().enumerate() {
        let norm = linalg::norm(b);
        if norm >= 1.0 {
            return Err(Error::OutsideBall { index, norm });
        }
    }
    let n = b_points.len();
    let one = Complex64::new(1.0, 0.0);
    let mut residual: f64 = 0.0;
    let mut kernel_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ip = linalg::inner(&b_points[i], &b_points[j]);
            residual = residual.max((ip - f.get(i, j)).norm());
            kernel_residual =
                kernel_residual.max(((one - ip).inv() - normalized.gram_tilde.get(i, j)).norm());
        }
    }
    Ok(EmbeddingResult {
        rank,
        b_points,
        base_index: base,
        residual,
        kernel_residual,
        normalized,
    })
}

/// Power-series coefficients `a_0 = 1, a_1, ...`, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Coefficients {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Exact(v) => v.iter().map(ratio_to_f64).collect(),
            Self::Float(v) => v.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.len() < 3 {
            return Err(Error::Input(format!(
                "ratio tests need at least 3 coefficients, got {}",
                self.len()
            )));
        }
        let (a0_is_one, bad) = match self {
            Self::Exact(v) => (v[0].is_one(), v.iter().position(|a| !a.is_positive())),
            Self::Float(v) => (
                v[0] == 1.0,
                v.iter().position(|a| !(a.is_finite() && *a > 0.0)),
            ),
        };
        if let Some(n) = bad {
            return Err(Error::Input(format!(
                "coefficient a_{n} must be strictly positive"
            )));
        }
        if !a0_is_one {
            return Err(Error::Input("a_0 must equal 1".into()));
        }
        Ok(())
    }

    /// Sign of `a_n^2 - a_(n-1) a_(n+1)` for each `n >= 1`: `Greater` means
    /// the ratio `a_n / a_(n-1)` exceeds `a_(n+1) / a_n`.
    fn log_concavity(&self) -> Vec<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match self {
            Self::Exact(a) => (1..a.len() - 1)
                .map(|n| (&a[n] * &a[n]).cmp(&(&a[n - 1] * &a[n + 1])))
                .collect(),
            Self::Float(a) => (1..a.len() - 1)
                .map(|n| {
                    let lhs = a[n] * a[n];
                    let rhs = a[n - 1] * a[n + 1];
                    if (lhs - rhs).abs() <= RATIO_REL_TOL * lhs.max(rhs) {
                        Ordering::Equal
                    } else {
                        lhs.total_cmp(&rhs)
                    }
                })
                .collect(),
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Outcome of a single ratio test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatioCheck {
    pub ok: bool,
    pub first_violation: Option<usize>,
}

/// `a_n / a_(n-1) >= a_(n+1) / a_n` for all `n >= 1`: the condition for
/// `M_z` to be hyponormal on the weighted Hardy space.
pub fn ratio_hyponormal(coeffs: &Coefficients) -> Result<RatioCheck> {
    coeffs.validate()?;
    let first = coeffs
        .log_concavity()
        .iter()
        .position(|o| o.is_lt())
        .map(|k| k + 1);
    Ok(RatioCheck {
        ok: first.is_none(),
        first_violation: first,
    })
}

/// `a_n / a_(n-1) <= a_(n+1) / a_n` for all `n >= 1`: a sufficient (not
/// necessary) condition for the complete Nevanlinna-Pick property.
pub fn ratio_np(coeffs: &Coefficients) -> Result<RatioCheck> {
    coeffs.validate()?;
    let first = coeffs
        .log_concavity()
        .iter()
        .position(|o| o.is_gt())
        .map(|k| k + 1);
    Ok(RatioCheck {
        ok: first.is_none(),
        first_violation: first,
    })
}

/// Both ratio tests together. `geometric` holds when both pass, i.e. the
/// ratios `a_(n+1) / a_n` are constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatioReport {
    pub hyponormal_ok: bool,
    /// The sufficient condition for the complete Nevanlinna-Pick property.
    /// Failure does not mean the kernel lacks the property.
    pub np_ok: bool,
    pub geometric: bool,
    pub hyponormal_violation: Option<usize>,
    pub np_violation: Option<usize>,
}

pub fn ratio_report(coeffs: &Coefficients) -> Result<RatioReport> {
    let h = ratio_hyponormal(coeffs)?;
    let np = ratio_np(coeffs)?;
    Ok(RatioReport {
        hyponormal_ok: h.ok,
        np_ok: np.ok,
        geometric: h.ok && np.ok,
        hyponormal_violation: h.first_violation,
        np_violation: np.first_violation,
    })
}

/// A sequence of radii `|a_k|` in the disk, in one of three closed forms.
///
/// Tails are indexed from `k = 1`: geometric tails have `1 - r_k = c q^(k-1)`,
/// polynomial tails `1 - r_k = c k^(-p)`. An optional finite prefix of radii
/// comes before the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlaschkeFamily {
    FiniteList {
        radii: Vec<f64>,
    },
    GeometricTail {
        c: f64,
        q: f64,
        #[serde(default)]
        prefix: Vec<f64>,
    },
    PolynomialTail {
        c: f64,
        p: f64,
        #[serde(default)]
        prefix: Vec<f64>,
    },
}

/// Number of tail terms checked against the unit disk.
pub const TAIL_VALIDATION_TERMS: usize = 10_000;

impl BlaschkeFamily {
    pub fn validate(&self) -> Result<()> {
        let check = |r: f64, what: &str| -> Result<()> {
            if !(r.is_finite() && (0.0..1.0).contains(&r)) {
                return Err(Error::Input(format!("{what} radius {r} outside [0, 1)")));
            }
            Ok(())
        };
        let prefix = match self {
            Self::FiniteList { radii } => radii,
            Self::GeometricTail { prefix, .. } | Self::PolynomialTail { prefix, .. } => prefix,
        };
        for &r in prefix {
            check(r, "listed")?;
        }
        // Tails are checked through the gaps 1 - r_k, which stay accurate
        // where the radii round to 1.
        let check_gap = |gap: f64, k: usize| -> Result<()> {
            if !(gap.is_finite() && gap > 0.0 && gap <= 1.0) {
                return Err(Error::Input(format!(
                    "tail term {k} has 1 - |a| = {gap}, radius outside [0, 1)"
                )));
            }
            Ok(())
        };
        match *self {
            Self::FiniteList { .. } => {}
            Self::GeometricTail { c, q, .. } => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(Error::Input(format!("ratio q = {q} must lie in (0, 1)")));
                }
                let mut gap = c;
                for k in 1..=TAIL_VALIDATION_TERMS {
                    if gap == 0.0 && k > 1 {
                        break;
                    }
                    check_gap(gap, k)?;
                    gap *= q;
                }
            }
            Self::PolynomialTail { c, p, .. } => {
                if !p.is_finite() {
                    return Err(Error::Input(format!("exponent p = {p} must be finite")));
                }
                for k in 1..=TAIL_VALIDATION_TERMS {
                    check_gap(c * (k as f64).powf(-p), k)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BlaschkeSum {
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlaschkeClassification {
    pub sum: BlaschkeSum,
    pub is_uniqueness_set: bool,
}

/// Terms summed directly before the Euler-Maclaurin tail estimate.
const ZETA_DIRECT_TERMS: usize = 1000;

/// `sum_{k >= 1} k^(-p)` for `p > 1`: a direct sum over the first
/// [`ZETA_DIRECT_TERMS`] terms and an Euler-Maclaurin estimate of the
/// remainder, which lies between the integral bounds
/// `int_M^inf x^-p dx` and `M^-p + int_M^inf x^-p dx`.
fn zeta(p: f64) -> f64 {
    let m = ZETA_DIRECT_TERMS as f64;
    let head: f64 = (1..ZETA_DIRECT_TERMS)
        .rev()
        .map(|k| (k as f64).powf(-p))
        .sum();
    let integral = m.powf(1.0 - p) / (p - 1.0);
    let tail = integral + 0.5 * m.powf(-p) + p * m.powf(-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * m.powf(-p - 3.0) / 720.0;
    debug_assert!(tail >= integral && tail <= integral + m.powf(-p));
    head + tail
}

/// Sum of `1 - |a|` and whether it diverges (Blaschke condition fails, so the
/// set is a set of uniqueness for the Hardy space).
pub fn blaschke_classify(fam: &BlaschkeFamily) -> Result<BlaschkeClassification> {
    fam.validate()?;
    let prefix_sum = |radii: &[f64]| radii.iter().map(|r| 1.0 - r).sum::<f64>();
    let finite = |s: f64| BlaschkeClassification {
        sum: BlaschkeSum::Finite(s),
        is_uniqueness_set: false,
    };
    Ok(match fam {
        BlaschkeFamily::FiniteList { radii } => finite(prefix_sum(radii)),
        BlaschkeFamily::GeometricTail { c, q, prefix } => {
            finite(prefix_sum(prefix) + c / (1.0 - q))
        }
        BlaschkeFamily::PolynomialTail { c, p, prefix } => {
            if *p <= 1.0 {
                BlaschkeClassification {
                    sum: BlaschkeSum::Divergent,
                    is_uniqueness_set: true,
                }
            } else {
                finite(prefix_sum(prefix) + c * zeta(*p))
            }
        }
    })
}
