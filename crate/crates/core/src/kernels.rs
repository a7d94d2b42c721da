//! Kernel specifications, Gram assembly and normalization.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianMatrix};

/// A positive kernel, either in closed form or as a sampled Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `K(z, w) = sum_n a_n <z, w>^n` over the finite coefficient list.
    PowerSeries { coeffs: Vec<f64> },
    /// `k_d(z, w) = 1 / (1 - <z, w>)` on the unit ball of `C^d`.
    DruryArveson { dim: usize },
    /// Kernel known only on a finite labelled sample.
    SampledGram {
        labels: Vec<String>,
        gram: HermitianMatrix,
    },
}

impl KernelSpec {
    pub fn power_series(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.first() {
            None => return Err(Error::Input("coeffs must not be empty".into())),
            Some(&a0) if a0 != 1.0 => {
                return Err(Error::Input("a_0 must equal 1".into()));
            }
            _ => {}
        }
        if let Some((n, a)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a > 0.0))
        {
            return Err(Error::Input(format!(
                "coefficient a_{n} = {a} must be strictly positive"
            )));
        }
        Ok(Self::PowerSeries { coeffs })
    }

    /// Szego kernel `1 / (1 - z conj(w))`, truncated to `terms` coefficients.
    pub fn szego(terms: usize) -> Self {
        Self::PowerSeries {
            coeffs: vec![1.0; terms.max(1)],
        }
    }

    /// Bergman kernel `(1 - z conj(w))^-2`, truncated to `terms` coefficients.
    pub fn bergman(terms: usize) -> Self {
        Self::PowerSeries {
            coeffs: (0..terms.max(1)).map(|n| (n + 1) as f64).collect(),
        }
    }

    pub fn drury_arveson(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dim must be at least 1".into()));
        }
        Ok(Self::DruryArveson { dim })
    }

    pub fn sampled(labels: Vec<String>, gram: HermitianMatrix, tol: f64) -> Result<Self> {
        if labels.len() != gram.dim() {
            return Err(Error::Dimension {
                expected: gram.dim(),
                got: labels.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Input(format!("duplicate label `{l}`")));
            }
        }
        let verdict = linalg::psd_check(&gram, tol)?;
        if !verdict.is_psd {
            return Err(Error::NotPsd {
                min_eig: verdict.min_eig,
            });
        }
        Ok(Self::SampledGram { labels, gram })
    }

    /// Kernel value at two coordinate points.
    pub fn evaluate(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        match self {
            Self::PowerSeries { coeffs } => {
                if z.len() != w.len() {
                    return Err(Error::Dimension {
                        expected: z.len(),
                        got: w.len(),
                    });
                }
                let x = linalg::inner(z, w);
                if x.norm() >= 1.0 {
                    return Err(Error::Domain(x.norm()));
                }
                Ok(coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a))
            }
            Self::DruryArveson { dim } => {
                for p in [z, w] {
                    if p.len() != *dim {
                        return Err(Error::Dimension {
                            expected: *dim,
                            got: p.len(),
                        });
                    }
                }
                let x = linalg::inner(z, w);
                if x.norm() >= 1.0 {
                    return Err(Error::Domain(x.norm()));
                }
                Ok(Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - x))
            }
            Self::SampledGram { .. } => Err(Error::Input(
                "sampled kernels are evaluated at labels, not coordinates".into(),
            )),
        }
    }

    /// Kernel value at two stored labels of a sampled kernel.
    pub fn evaluate_labels(&self, a: &str, b: &str) -> Result<Complex64> {
        match self {
            Self::SampledGram { labels, gram } => {
                let i = label_index(labels, a)?;
                let j = label_index(labels, b)?;
                Ok(gram.get(i, j))
            }
            _ => Err(Error::Input(
                "only sampled kernels are evaluated at labels".into(),
            )),
        }
    }
}

fn label_index(labels: &[String], l: &str) -> Result<usize> {
    labels
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| Error::UnknownLabel(l.to_string()))
}

/// Finitely many points of the open unit ball of `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<Complex64>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<Complex64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("point dimension must be at least 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Input(format!(
                    "point {i} has non-finite coordinates"
                )));
            }
            let r = linalg::norm(p);
            if r >= 1.0 {
                return Err(Error::Input(format!(
                    "point {i} has norm {r} outside the open unit ball"
                )));
            }
        }
        Ok(Self { dim, points })
    }

    /// Points of the unit disk given by real coordinates.
    pub fn real_line(xs: &[f64]) -> Result<Self> {
        Self::new(
            1,
            xs.iter().map(|&x| vec![Complex64::new(x, 0.0)]).collect(),
        )
    }

    pub fn disk(zs: &[Complex64]) -> Result<Self> {
        Self::new(1, zs.iter().map(|&z| vec![z]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &[Complex64] {
        &self.points[i]
    }

    fn first_duplicate(&self) -> Option<(usize, usize)> {
        for i in 0..self.points.len() {
            for j in 0..i {
                if self.points[i] == self.points[j] {
                    return Some((j, i));
                }
            }
        }
        None
    }
}

/// Where a Gram matrix is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum Nodes {
    Points(PointSet),
    Labels(Vec<String>),
}

impl Nodes {
    pub fn len(&self) -> usize {
        match self {
            Self::Points(p) => p.len(),
            Self::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<PointSet> for Nodes {
    fn from(p: PointSet) -> Self {
        Self::Points(p)
    }
}

/// Gram matrix `G[i][j] = K(p_i, p_j)` at pairwise distinct points.
pub fn gram(spec: &KernelSpec, pts: &PointSet) -> Result<HermitianMatrix> {
    if let Some((i, j)) = pts.first_duplicate() {
        return Err(Error::Input(format!("points {i} and {j} coincide")));
    }
    let rows = pts
        .points()
        .iter()
        .map(|z| {
            pts.points()
                .iter()
                .map(|w| spec.evaluate(z, w))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    HermitianMatrix::from_rows(&rows)
}

/// Gram matrix at either coordinate points or labels of a sampled kernel.
pub fn gram_at(spec: &KernelSpec, nodes: &Nodes) -> Result<HermitianMatrix> {
    match nodes {
        Nodes::Points(p) => gram(spec, p),
        Nodes::Labels(ls) => {
            let KernelSpec::SampledGram { labels, gram } = spec else {
                return Err(Error::Input(
                    "labels can only be used with a sampled kernel".into(),
                ));
            };
            let mut idx = Vec::with_capacity(ls.len());
            for (i, l) in ls.iter().enumerate() {
                if ls[..i].contains(l) {
                    return Err(Error::Input(format!("duplicate label `{l}`")));
                }
                idx.push(label_index(labels, l)?);
            }
            Ok(gram.principal(&idx))
        }
    }
}

/// Kernel normalized at a base point, together with the rescaling `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGram {
    pub gram_tilde: HermitianMatrix,
    pub delta: Vec<Complex64>,
    pub base_index: usize,
}

impl NormalizedGram {
    /// `max |gram_tilde[i][j] delta_i conj(delta_j) - g[i][j]|`.
    pub fn reconstruction_error(&self, g: &HermitianMatrix) -> f64 {
        let n = g.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = self.gram_tilde.get(i, j) * self.delta[i] * self.delta[j].conj();
                err = err.max((v - g.get(i, j)).norm());
            }
        }
        err
    }
}

/// `delta_i = G[i][base] / sqrt(G[base][base])`,
/// `gram_tilde[i][j] = G[i][j] / (delta_i conj(delta_j))`.
pub fn normalize(g: &HermitianMatrix, base: usize) -> Result<NormalizedGram> {
    let n = g.dim();
    if base >= n {
        return Err(Error::Input(format!(
            "base index {base} out of range for {n} points"
        )));
    }
    let gbb = g.get(base, base).re;
    if gbb <= 0.0 {
        return Err(Error::Irreducible(format!(
            "K(base, base) = {gbb} is not positive"
        )));
    }
    let root = gbb.sqrt();
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        let k = g.get(i, base);
        if k == Complex64::new(0.0, 0.0) {
            return Err(Error::Irreducible(format!(
                "K({i}, base) vanishes; the kernel is not nowhere-zero"
            )));
        }
        delta.push(k / root);
    }
    delta[base] = Complex64::new(root, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let gram_tilde = HermitianMatrix::from_fn(n, |i, j| {
        if i == base || j == base {
            one
        } else {
            g.get(i, j) / (delta[i] * delta[j].conj())
        }
    })?;
    Ok(NormalizedGram {
        gram_tilde,
        delta,
        base_index: base,
    })
}

/// Connected components of the graph with an edge `i - j` whenever
/// `|G[i][j]| > tol`. Classes are sorted, and ordered by smallest member.
pub fn irreducible_partition(g: &HermitianMatrix, tol: f64) -> Vec<Vec<usize>> {
    let n = g.dim();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for i in 0..n {
        for j in (i + 1)..n {
            if g.get(i, j).norm() > tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[r]].push(i);
    }
    classes
}

/// Sample-level irreducibility: every entry is nonzero and no two rows are
/// proportional (some 2x2 minor of each row pair exceeds the tolerance).
pub fn check_irreducible_sample(g: &HermitianMatrix, tol: f64) -> bool {
    let n = g.dim();
    let scale = g.max_abs().max(1.0);
    if (0..n).any(|i| (0..n).any(|j| g.get(i, j).norm() <= tol * scale)) {
        return false;
    }
    let minor_tol = tol * scale * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            let independent = (0..n).any(|k| {
                ((k + 1)..n).any(|l| {
                    let m = g.get(i, k) * g.get(j, l) - g.get(i, l) * g.get(j, k);
                    m.norm() > minor_tol
                })
            });
            if !independent {
                return false;
            }
        }
    }
    true
}
