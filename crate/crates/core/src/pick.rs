//! Pick matrices and scalar interpolation feasibility.
//!
//! For kernels with the Nevanlinna-Pick property, positivity of the Pick
//! matrix at level `t` is equivalent to the existence of a multiplier of norm
//! at most `t` with the prescribed values. For other kernels (Bergman, for
//! instance) positivity is only necessary, so the verdicts here speak about
//! the matrix condition and nothing more.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{self, KernelSpec, PointSet};
use crate::linalg::{self, HermitianMatrix, PsdVerdict};

/// Relative PSD tolerance used inside the bisection of
/// [`minimal_interpolation_norm`].
pub const BISECTION_PSD_TOL: f64 = 1e-12;

/// Interpolation data `phi(z_i) = w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PickProblem {
    spec: KernelSpec,
    nodes: PointSet,
    targets: Vec<Complex64>,
    gram: HermitianMatrix,
}

impl PickProblem {
    pub fn new(spec: KernelSpec, nodes: PointSet, targets: Vec<Complex64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Input("at least one node is required".into()));
        }
        if nodes.len() != targets.len() {
            return Err(Error::Dimension {
                expected: nodes.len(),
                got: targets.len(),
            });
        }
        if targets
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::Input("targets must be finite".into()));
        }
        let gram = kernels::gram(&spec, &nodes)?;
        Ok(Self {
            spec,
            nodes,
            targets,
            gram,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    /// Same nodes, targets multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            targets: self.targets.iter().map(|w| w * c).collect(),
            ..self.clone()
        }
    }
}

/// `P[i][j] = (t^2 - w_i conj(w_j)) K(z_i, z_j)`.
pub fn pick_matrix(p: &PickProblem, t: f64) -> Result<HermitianMatrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Input(format!("level t must be positive, got {t}")));
    }
    let w = &p.targets;
    HermitianMatrix::from_fn(w.len(), |i, j| {
        (Complex64::new(t * t, 0.0) - w[i] * w[j].conj()) * p.gram.get(i, j)
    })
}

pub fn pick_feasible(p: &PickProblem, t: f64, tol: f64) -> Result<PsdVerdict> {
    linalg::psd_check(&pick_matrix(p, t)?, tol)
}

/// Smallest `t` with a PSD Pick matrix, to absolute accuracy `tol`.
///
/// Feasibility is upward closed in `t` since `t^2 G` grows in the PSD
/// order. The bracket starts at `[0, max |w_i|]` and the upper end doubles
/// until feasible; the midpoint of the final bracket is returned.
pub fn minimal_interpolation_norm(p: &PickProblem, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let g = linalg::psd_check(&p.gram, crate::DEFAULT_TOL)?;
    let scale = linalg::max_eigenvalue(&p.gram).max(1.0);
    if g.min_eig <= crate::DEFAULT_TOL * scale {
        return Err(Error::Conditioning { min_eig: g.min_eig });
    }
    let wmax = p.targets.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if wmax == 0.0 {
        return Ok(0.0);
    }
    let feasible = |t: f64| -> Result<bool> { Ok(pick_feasible(p, t, BISECTION_PSD_TOL)?.is_psd) };
    let mut lo = 0.0;
    let mut hi = wmax;
    while !feasible(hi)? {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Conditioning { min_eig: g.min_eig });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
