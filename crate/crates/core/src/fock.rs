//! Truncated Drury-Arveson space.
//!
//! Elements are polynomials in `d` variables with the inner product in which
//! the monomials are orthogonal and `||z^a||^2 = a! / |a|!`. Coefficients are
//! either exact Gaussian rationals ([`ExactComplex`]) or `Complex64`; every
//! polynomial operation is generic over [`Coeff`] so the two paths share one
//! implementation.
//!
//! Matrices over a [`TruncatedSpace`] are written in orthonormal coordinates
//! `u_a = c_a * ||z^a||`, so that [`Subspace`] values and the dense Hermitian
//! routines of [`crate::linalg`] apply unchanged.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernels::PointSet;
use crate::linalg::{self, HermitianMatrix, Subspace};

pub type ExactComplex = Complex<BigRational>;

/// Relative eigenvalue cutoff when building spans and nullspaces over a
/// truncated space (singular values below `1e-6` of the largest).
pub const SPAN_TOL: f64 = 1e-12;

/// Exponent vector of a monomial `z^a = z_1^a_1 ... z_d^a_d`.
///
/// Ordered graded-lexicographically: by total degree, then with larger
/// leading exponents first, so `1 < z_1 < z_2 < z_1^2 < z_1 z_2 < z_2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn minus(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `||z^a||^2 = a! / |a|!`, exactly.
pub fn monomial_norm_sq(alpha: &MultiIndex) -> BigRational {
    let num = alpha
        .exponents()
        .iter()
        .fold(BigInt::one(), |acc, &a| acc * factorial(a));
    BigRational::new(num, factorial(alpha.degree() as u32))
}

/// `a! / |a|!` as a running product of ratios, which stays in range for
/// large degrees.
fn monomial_norm_sq_f64(alpha: &MultiIndex) -> f64 {
    let mut w = 1.0;
    let mut t = 0u32;
    for &a in alpha.exponents() {
        for m in 1..=a {
            t += 1;
            w *= f64::from(m) / f64::from(t);
        }
    }
    w
}

/// Coefficient field of the engine.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conjugate(&self) -> Self;
    /// `a! / |a|!`.
    fn monomial_weight(alpha: &MultiIndex) -> Self;
    /// `|a|! / a!`.
    fn inverse_monomial_weight(alpha: &MultiIndex) -> Self;
    fn to_complex64(&self) -> Complex64;
    /// `|c|^2` as a float.
    fn abs_sq_f64(&self) -> f64 {
        self.to_complex64().norm_sqr()
    }
}

impl Coeff for Complex64 {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn monomial_weight(alpha: &MultiIndex) -> Self {
        Complex64::new(monomial_norm_sq_f64(alpha), 0.0)
    }

    fn inverse_monomial_weight(alpha: &MultiIndex) -> Self {
        Complex64::new(1.0 / monomial_norm_sq_f64(alpha), 0.0)
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

impl Coeff for ExactComplex {
    fn conjugate(&self) -> Self {
        self.conj()
    }

    fn monomial_weight(alpha: &MultiIndex) -> Self {
        Complex::new(monomial_norm_sq(alpha), BigRational::zero())
    }

    fn inverse_monomial_weight(alpha: &MultiIndex) -> Self {
        Complex::new(monomial_norm_sq(alpha).recip(), BigRational::zero())
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Exact Gaussian rational `re + i im` from integer ratios.
pub fn exact(re: (i64, i64), im: (i64, i64)) -> ExactComplex {
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}

/// Exact real rational `n / d`.
pub fn exact_real(n: i64, d: i64) -> ExactComplex {
    exact((n, d), (0, 1))
}

/// Polynomial in `dim` variables; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    pub fn monomial(alpha: MultiIndex, c: C) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `z_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), C::one())
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: alpha.dim(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&alpha);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Coefficient convolution. Products are never truncated.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.plus(b), x.clone() * y.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.dim);
        for _ in 0..n {
            out = out.multiply(self).expect("same dimension");
        }
        out
    }

    /// Components of degree at most `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() <= max_degree)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn evaluate(&self, z: &[C]) -> Result<C> {
        if z.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut total = C::zero();
        for (a, c) in &self.terms {
            let mut m = c.clone();
            for (zi, &e) in z.iter().zip(a.exponents()) {
                for _ in 0..e {
                    m = m * zi.clone();
                }
            }
            total = total + m;
        }
        Ok(total)
    }

    pub fn to_numeric(&self) -> Polynomial<Complex64> {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c.to_complex64()))
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .collect(),
        }
    }

    /// `||p||^2` as a float.
    pub fn norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.abs_sq_f64() * monomial_norm_sq_f64(a))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl Polynomial<ExactComplex> {
    /// `||p||^2` exactly.
    pub fn norm_sq_exact(&self) -> BigRational {
        self.terms
            .iter()
            .map(|(a, c)| (&c.re * &c.re + &c.im * &c.im) * monomial_norm_sq(a))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }
}

/// `<p, q> = sum_a p_a conj(q_a) a! / |a|!`.
pub fn inner_product<C: Coeff>(p: &Polynomial<C>, q: &Polynomial<C>) -> Result<C> {
    p.check_dim(q)?;
    let mut total = C::zero();
    for (a, x) in &p.terms {
        if let Some(y) = q.terms.get(a) {
            total = total + x.clone() * y.conjugate() * C::monomial_weight(a);
        }
    }
    Ok(total)
}

pub fn multiply<C: Coeff>(p: &Polynomial<C>, q: &Polynomial<C>) -> Result<Polynomial<C>> {
    p.multiply(q)
}

/// The degree-one multiplier `z -> <z, w> = sum_i conj(w_i) z_i`.
pub fn kerpart<C: Coeff>(w: &[C]) -> Polynomial<C> {
    let d = w.len();
    let mut p = Polynomial::zero(d);
    for (i, wi) in w.iter().enumerate() {
        p.add_term(MultiIndex::unit(d, i), wi.conjugate());
    }
    p
}

fn point_norm_sq<C: Coeff>(z: &[C]) -> f64 {
    z.iter().map(Coeff::abs_sq_f64).sum()
}

/// `K_N(., z) = sum_{n <= N} <., z>^n` with the bound
/// `||K(., z) - K_N(., z)||^2 <= ||z||^(2(N+1)) / (1 - ||z||^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedKernel<C> {
    pub poly: Polynomial<C>,
    pub tail_bound: f64,
}

pub fn truncated_kernel_fn<C: Coeff>(z: &[C], degree: usize) -> Result<TruncatedKernel<C>> {
    let r2 = point_norm_sq(z);
    if r2 >= 1.0 {
        return Err(Error::Input(format!(
            "point norm {} is not inside the unit ball",
            r2.sqrt()
        )));
    }
    let k = kerpart(z);
    let mut power = Polynomial::one(z.len());
    let mut poly = power.clone();
    for _ in 0..degree {
        power = power.multiply(&k)?;
        poly = poly.add(&power)?;
    }
    Ok(TruncatedKernel {
        poly,
        tail_bound: r2.powi(degree as i32 + 1) / (1.0 - r2),
    })
}

/// `g = M_phi^* f` on the degree window `N`: the unique `g` of degree at most
/// `N - deg phi` with `<g, h> = <f, phi h>` for every `h` of degree at most
/// `N - deg phi`. For homogeneous `phi` this is the untruncated adjoint.
pub fn mult_adjoint_apply<C: Coeff>(
    phi: &Polynomial<C>,
    f: &Polynomial<C>,
    window: usize,
) -> Result<Polynomial<C>> {
    phi.check_dim(f)?;
    for deg in [phi.degree(), f.degree()] {
        if deg > window {
            return Err(Error::Window {
                degree: deg,
                window,
            });
        }
    }
    let top = window - phi.degree();
    let mut g = Polynomial::zero(f.dim);
    for (alpha, fa) in &f.terms {
        for (gamma, pg) in &phi.terms {
            let Some(beta) = alpha.minus(gamma) else {
                continue;
            };
            if beta.degree() > top {
                continue;
            }
            let c = pg.conjugate()
                * fa.clone()
                * C::monomial_weight(alpha)
                * C::inverse_monomial_weight(&beta);
            g.add_term(beta, c);
        }
    }
    Ok(g)
}

/// Polynomials of degree at most `degree` in `dim` variables, with the
/// graded-lex monomial basis.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    dim: usize,
    degree: usize,
    basis: Vec<MultiIndex>,
    norms_sq: Vec<BigRational>,
    norms: Vec<f64>,
    index: HashMap<MultiIndex, usize>,
}

impl TruncatedSpace {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        let mut basis = Vec::new();
        let mut current = vec![0u32; dim];
        enumerate(&mut current, 0, degree as u32, &mut basis);
        basis.sort();
        let norms_sq: Vec<BigRational> = basis.iter().map(monomial_norm_sq).collect();
        let norms = basis
            .iter()
            .map(|a| monomial_norm_sq_f64(a).sqrt())
            .collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Ok(Self {
            dim,
            degree,
            basis,
            norms_sq,
            norms,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn norms_sq(&self) -> &[BigRational] {
        &self.norms_sq
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    /// Orthonormal coordinates of `p`; refuses polynomials above the window.
    pub fn coords(&self, p: &Polynomial<Complex64>) -> Result<DVector<Complex64>> {
        if p.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if p.degree() > self.degree {
            return Err(Error::Window {
                degree: p.degree(),
                window: self.degree,
            });
        }
        Ok(self.coords_truncated(p))
    }

    /// Orthonormal coordinates of the degree-`<= N` part of `p`, which is its
    /// orthogonal projection onto the truncated space.
    pub fn coords_truncated(&self, p: &Polynomial<Complex64>) -> DVector<Complex64> {
        let mut u = DVector::zeros(self.len());
        for (a, c) in p.terms() {
            if let Some(i) = self.position(a) {
                u[i] = c * self.norms[i];
            }
        }
        u
    }

    pub fn polynomial(&self, u: &DVector<Complex64>) -> Result<Polynomial<Complex64>> {
        if u.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: u.len(),
            });
        }
        Polynomial::from_terms(
            self.dim,
            self.basis
                .iter()
                .zip(u.iter())
                .zip(&self.norms)
                .map(|((a, x), n)| (a.clone(), x / n)),
        )
    }

    /// Coordinates of `K_N(., y)`.
    pub fn kernel_coords(&self, y: &[Complex64]) -> Result<DVector<Complex64>> {
        self.coords(&truncated_kernel_fn(y, self.degree)?.poly)
    }

    /// Point evaluation `p(y) = r_y . u` as a row in orthonormal coordinates.
    pub fn evaluation_row(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(self
            .basis
            .iter()
            .zip(&self.norms)
            .map(|(a, n)| {
                let m: Complex64 = y
                    .iter()
                    .zip(a.exponents())
                    .map(|(yi, &e)| yi.powu(e))
                    .product();
                m / n
            })
            .collect())
    }

    /// Orthonormal span of the given monomials.
    pub fn monomial_subspace(&self, monomials: &[MultiIndex]) -> Result<Subspace> {
        let mut cols = Vec::with_capacity(monomials.len());
        for a in monomials {
            let i = self.position(a).ok_or(Error::Window {
                degree: a.degree(),
                window: self.degree,
            })?;
            let mut e = DVector::zeros(self.len());
            e[i] = Complex64::new(1.0, 0.0);
            cols.push(e);
        }
        Subspace::new(if cols.is_empty() {
            DMatrix::zeros(self.len(), 0)
        } else {
            DMatrix::from_columns(&cols)
        })
    }

    /// Matrix of `P_F M_phi |_F` in the basis of `f`. Components of
    /// `phi * g` above the window are orthogonal to every subspace of the
    /// window, so dropping them is exactly the projection.
    pub fn compress_multiplier(
        &self,
        phi: &Polynomial<Complex64>,
        f: &Subspace,
    ) -> Result<DMatrix<Complex64>> {
        if f.ambient_dim() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: f.ambient_dim(),
            });
        }
        if phi.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: phi.dim(),
            });
        }
        let q = f.basis();
        let mut image = DMatrix::zeros(self.len(), q.ncols());
        for k in 0..q.ncols() {
            let g = self.polynomial(&q.column(k).into_owned())?;
            let u = self.coords_truncated(&phi.multiply(&g)?);
            image.set_column(k, &u);
        }
        Ok(q.adjoint() * image)
    }
}

fn enumerate(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<MultiIndex>) {
    if pos == current.len() {
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[pos] = e;
        enumerate(current, pos + 1, budget - e, out);
    }
    current[pos] = 0;
}

fn check_distinct(y: &PointSet) -> Result<()> {
    for i in 0..y.len() {
        for j in 0..i {
            if y.get(i) == y.get(j) {
                return Err(Error::Input(format!("points {j} and {i} coincide")));
            }
        }
    }
    Ok(())
}

/// `F_N = span { K_N(., y) : y in Y }` over `space`.
pub fn kernel_span(space: &TruncatedSpace, y: &PointSet) -> Result<Subspace> {
    if y.dim() != space.dim() {
        return Err(Error::Dimension {
            expected: space.dim(),
            got: y.dim(),
        });
    }
    check_distinct(y)?;
    let cols = y
        .points()
        .iter()
        .map(|p| space.kernel_coords(p))
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Ok(Subspace::zero(space.len()));
    }
    Subspace::from_spanning(&DMatrix::from_columns(&cols), SPAN_TOL)
}

/// The vanishing ideal `I_N` of `Y` in the truncated space and its
/// orthogonal complement `F_N`.
#[derive(Debug, Clone)]
pub struct VanishingSplit {
    pub space: TruncatedSpace,
    /// Nullspace of the point-evaluation map.
    pub ideal: Subspace,
    /// Span of the truncated kernel functions at `Y`.
    pub complement: Subspace,
    /// Largest of `|<i, f>|` over basis pairs and `|p(y)|` over ideal basis
    /// vectors and points of `Y`; infinite if the dimensions do not add up.
    pub agreement: f64,
}

pub fn vanishing_subspace(y: &PointSet, degree: usize) -> Result<VanishingSplit> {
    let space = TruncatedSpace::new(y.dim(), degree)?;
    if y.len() > space.len() {
        return Err(Error::Precondition(format!(
            "{} points exceed the {} monomials of degree <= {degree}",
            y.len(),
            space.len()
        )));
    }
    let complement = kernel_span(&space, y)?;

    let dim = space.len();
    let rows = y
        .points()
        .iter()
        .map(|p| space.evaluation_row(p))
        .collect::<Result<Vec<_>>>()?;
    let e = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let ideal = if rows.is_empty() {
        Subspace::full(dim)
    } else {
        let ehe = HermitianMatrix::new(e.adjoint() * &e)?;
        let (values, vectors) = linalg::eigh(&ehe);
        let rank = values.iter().filter(|&&v| v > SPAN_TOL * values[0]).count();
        Subspace::new(vectors.columns(rank, dim - rank).into_owned())?
    };

    let vanish = if ideal.dim() == 0 || rows.is_empty() {
        0.0
    } else {
        (&e * ideal.basis())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let agreement = if ideal.dim() + complement.dim() != dim {
        f64::INFINITY
    } else {
        ideal.overlap(&complement).max(vanish)
    };
    Ok(VanishingSplit {
        space,
        ideal,
        complement,
        agreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureMembership {
    pub member: bool,
    pub residual: f64,
}

/// Whether `K_N(., z)` lies in `F_N` for the finite set `Y`: the relative
/// distance from `K_N(., z)` to the kernel span of `Y`.
pub fn in_closure(
    z: &[Complex64],
    y: &PointSet,
    degree: usize,
    tol: f64,
) -> Result<ClosureMembership> {
    let space = TruncatedSpace::new(y.dim(), degree)?;
    let f = kernel_span(&space, y)?;
    let k = space.kernel_coords(z)?;
    let residual = (&k - f.project(&k)).norm() / k.norm();
    Ok(ClosureMembership {
        member: residual <= tol,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionDefect {
    /// Smallest eigenvalue of `T^H T - T T^H`, `T = P_F M_phi |_F`.
    pub defect: f64,
    /// `defect >= -tol`. On a finite model this is evidence only; a negative
    /// defect is a refutation witness.
    pub hyponormal: bool,
}

pub fn compression_defect(
    phi: &Polynomial<Complex64>,
    space: &TruncatedSpace,
    f: &Subspace,
    tol: f64,
) -> Result<CompressionDefect> {
    let t = space.compress_multiplier(phi, f)?;
    let defect = if t.nrows() == 0 {
        0.0
    } else {
        linalg::min_eigenvalue(&linalg::self_commutator(&t)?)
    };
    Ok(CompressionDefect {
        defect,
        hyponormal: defect >= -tol,
    })
}

/// `||M_{z1 z2} z1 z2||^2` and `||M_{z1 z2}^* z1 z2||^2`, exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ArvesonWitness {
    pub norm_sq_fwd: BigRational,
    pub norm_sq_adj: BigRational,
}

/// The multiplier `z1 z2` on two-variable Drury-Arveson space is not
/// hyponormal: at `f = z1 z2` the forward norm is strictly below the
/// adjoint norm.
pub fn arveson_example() -> ArvesonWitness {
    let phi: Polynomial<ExactComplex> =
        Polynomial::monomial(MultiIndex::new(vec![1, 1]), Complex::one());
    let f = phi.clone();
    let fwd = phi.multiply(&f).expect("same dimension");
    let adj = mult_adjoint_apply(&phi, &f, 2).expect("within window");
    let w = ArvesonWitness {
        norm_sq_fwd: fwd.norm_sq_exact(),
        norm_sq_adj: adj.norm_sq_exact(),
    };
    assert!(w.norm_sq_fwd < w.norm_sq_adj);
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma32Check {
    /// `||M^*_{<.,z>} f_N||^2`.
    pub lhs: f64,
    /// `||M_{<.,z>} f_N||^2`.
    pub rhs: f64,
    pub tail_bound: f64,
}

/// Norm identity for `f_N = K_N(., z) - 1` under the multiplier `<., z>`:
/// adjoint and forward norms agree up to the geometric tail
/// `3 ||z||^(2N+2) / (1 - ||z||^2)`.
pub fn lemma32_identity_check<C: Coeff>(z: &[C], degree: usize) -> Result<Lemma32Check> {
    let r2 = point_norm_sq(z);
    if r2 == 0.0 {
        return Err(Error::Input("z = 0 makes f vanish".into()));
    }
    let kernel = truncated_kernel_fn(z, degree)?;
    let f = kernel.poly.sub(&Polynomial::one(z.len()))?;
    let phi = kerpart(z);
    let adj = mult_adjoint_apply(&phi, &f, degree.max(1))?;
    let fwd = phi.multiply(&f)?;
    Ok(Lemma32Check {
        lhs: adj.norm_sq(),
        rhs: fwd.norm_sq(),
        tail_bound: 3.0 * r2.powi(degree as i32 + 1) / (1.0 - r2),
    })
}

/// `(||M^*_{<.,z>} <.,z>^(n-1)||, ||M_{<.,z>} <.,z>^(n-1)||)`; both equal
/// `||z||^n`.
pub fn kerpart_adjoint_norm_check<C: Coeff>(
    z: &[C],
    n: usize,
    degree: usize,
) -> Result<(f64, f64)> {
    let r2 = point_norm_sq(z);
    if !(r2 > 0.0 && r2 < 1.0) {
        return Err(Error::Input(format!(
            "need 0 < ||z|| < 1, got {}",
            r2.sqrt()
        )));
    }
    if n < 2 {
        return Err(Error::Input(format!("need n >= 2, got {n}")));
    }
    if n > degree {
        return Err(Error::Window {
            degree: n,
            window: degree,
        });
    }
    let phi = kerpart(z);
    let p = phi.pow(n as u32 - 1);
    let adj = mult_adjoint_apply(&phi, &p, degree)?;
    let fwd = phi.multiply(&p)?;
    Ok((adj.norm(), fwd.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn monomial_norms() {
        assert_eq!(monomial_norm_sq(&MultiIndex::new(vec![7])), r(1, 1));
        assert_eq!(monomial_norm_sq(&MultiIndex::new(vec![1, 1])), r(1, 2));
        assert_eq!(monomial_norm_sq(&MultiIndex::new(vec![2, 2])), r(1, 6));
        assert_abs_diff_eq!(
            monomial_norm_sq_f64(&MultiIndex::new(vec![2, 2])),
            1.0 / 6.0,
            epsilon = 1e-16
        );
    }

    #[test]
    fn graded_lex_order() {
        let s = TruncatedSpace::new(2, 2).unwrap();
        let e: Vec<Vec<u32>> = s.basis().iter().map(|a| a.exponents().to_vec()).collect();
        assert_eq!(
            e,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn inner_products() {
        let z1z2: Polynomial<ExactComplex> =
            Polynomial::monomial(MultiIndex::new(vec![1, 1]), Complex::one());
        assert_eq!(
            inner_product(&z1z2, &z1z2).unwrap(),
            Complex::new(r(1, 2), r(0, 1))
        );
        let z1: Polynomial<ExactComplex> = Polynomial::variable(2, 0);
        assert!(inner_product(&z1, &z1z2).unwrap().is_zero());
        let p: Polynomial<ExactComplex> = Polynomial::variable(3, 0);
        assert!(inner_product(&z1, &p).is_err());
    }

    #[test]
    fn kerpart_powers_are_orthogonal() {
        let z = [exact_real(1, 3), exact((1, 4), (-1, 5))];
        let k = kerpart(&z);
        for n in 0..5 {
            for m in 0..5 {
                let ip = inner_product(&k.pow(n), &k.pow(m)).unwrap();
                if n != m {
                    assert!(ip.is_zero(), "n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn kerpart_examples() {
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(kerpart(&e1), Polynomial::variable(2, 0));
        assert!(kerpart(&[Complex64::new(0.0, 0.0); 3]).is_zero());
        // ||z||^2 = 9/100 + 16/100 = 1/4: ||<., z>^3||^2 = 1/64
        let z = [exact_real(3, 10), exact((0, 1), (2, 5))];
        let k3 = kerpart(&z).pow(3);
        assert_eq!(k3.norm_sq_exact(), r(1, 64));
        assert_eq!(
            inner_product(&k3, &k3).unwrap(),
            Complex::new(r(1, 64), r(0, 1))
        );
    }

    #[test]
    fn truncated_kernel_examples() {
        let k = truncated_kernel_fn(&[Complex64::new(0.0, 0.0); 2], 6).unwrap();
        assert_eq!(k.poly, Polynomial::one(2));

        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let w = [c(0.1, -0.5), c(0.25, 0.2)];
        let exact_val =
            Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - linalg::inner(&w, &z));
        let mut last = f64::INFINITY;
        for n in [2, 5, 10, 20] {
            let k = truncated_kernel_fn(&z, n).unwrap();
            let err = (k.poly.evaluate(&w).unwrap() - exact_val).norm();
            // |K(w,z) - K_N(w,z)| <= ||K - K_N|| ||K_w|| by Cauchy-Schwarz
            let kw = (1.0 / (1.0 - linalg::norm(&w).powi(2))).sqrt();
            assert!(err <= k.tail_bound.sqrt() * kw + 1e-15);
            assert!(err < last);
            last = err;
        }

        let zq = [exact_real(1, 3), exact_real(1, 4)];
        let r2 = r(1, 9) + r(1, 16);
        let k = truncated_kernel_fn(&zq, 7).unwrap();
        let mut expected = r(0, 1);
        let mut p = r(1, 1);
        for _ in 0..=7 {
            expected += p.clone();
            p *= r2.clone();
        }
        assert_eq!(k.poly.norm_sq_exact(), expected);
        assert!(truncated_kernel_fn(&[exact_real(1, 1)], 3).is_err());
    }

    #[test]
    fn multiplication_examples() {
        let one: Polynomial<ExactComplex> = Polynomial::one(2);
        let z1 = Polynomial::variable(2, 0);
        let z2 = Polynomial::variable(2, 1);
        assert_eq!(z1.multiply(&one).unwrap(), z1);
        assert_eq!(
            z1.multiply(&z2).unwrap(),
            Polynomial::monomial(MultiIndex::new(vec![1, 1]), Complex::one())
        );
        let k = kerpart(&[exact_real(1, 2), exact((1, 3), (1, 5))]);
        let k2 = k.multiply(&k).unwrap();
        let k4 = k2.multiply(&k2).unwrap();
        assert_eq!(k.multiply(&k.pow(3)).unwrap(), k4);
        assert!(z1.multiply(&Polynomial::variable(3, 0)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let z1: Polynomial<ExactComplex> = Polynomial::variable(2, 0);
        let one = Polynomial::one(2);
        assert!(mult_adjoint_apply(&z1, &one, 4).unwrap().is_zero());
        assert_eq!(mult_adjoint_apply(&z1, &z1, 4).unwrap(), one);
        assert!(matches!(
            mult_adjoint_apply(&z1, &z1.pow(5), 4),
            Err(Error::Window { .. })
        ));
    }

    #[test]
    fn adjoint_of_kernel_function() {
        let z = [exact_real(1, 3), exact((1, 5), (-1, 4))];
        let n = 9;
        let f = truncated_kernel_fn(&z, n)
            .unwrap()
            .poly
            .sub(&Polynomial::one(2))
            .unwrap();
        let g = mult_adjoint_apply(&kerpart(&z), &f, n).unwrap();
        let r2 = Complex::new(r(1, 9) + r(1, 25) + r(1, 16), r(0, 1));
        let expected = truncated_kernel_fn(&z, n - 1).unwrap().poly.scale(&r2);
        assert_eq!(g, expected);
    }

    #[test]
    fn adjoint_unit_direction() {
        // w = (3/5, 4/5) has ||w|| = 1: M^* <.,w>^2 = <.,w>.
        let w = [exact_real(3, 5), exact_real(4, 5)];
        let k = kerpart(&w);
        assert_eq!(mult_adjoint_apply(&k, &k.pow(2), 6).unwrap(), k);
        assert_eq!(mult_adjoint_apply(&k, &k.pow(5), 6).unwrap(), k.pow(4));
    }

    #[test]
    fn vanishing_at_origin() {
        let y = PointSet::real_line(&[0.0]).unwrap();
        let split = vanishing_subspace(&y, 1).unwrap();
        assert_eq!(split.complement.dim(), 1);
        assert_eq!(split.ideal.dim(), 1);
        assert_abs_diff_eq!(
            split.complement.basis()[(0, 0)].norm(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(split.ideal.basis()[(1, 0)].norm(), 1.0, epsilon = 1e-14);
        assert!(split.agreement < 1e-12);

        let y = PointSet::new(3, vec![vec![c(0.0, 0.0); 3]]).unwrap();
        let split = vanishing_subspace(&y, 4).unwrap();
        assert_eq!(split.complement.dim(), 1);
        assert_abs_diff_eq!(
            split.complement.basis()[(0, 0)].norm(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn vanishing_generic_points() {
        let y = PointSet::new(
            2,
            vec![
                vec![c(0.1, 0.0), c(0.2, 0.1)],
                vec![c(-0.3, 0.2), c(0.0, 0.4)],
                vec![c(0.5, -0.1), c(0.1, 0.1)],
                vec![c(0.0, 0.0), c(-0.6, 0.0)],
            ],
        )
        .unwrap();
        let split = vanishing_subspace(&y, 5).unwrap();
        assert_eq!(split.complement.dim(), 4);
        assert_eq!(split.ideal.dim(), split.space.len() - 4);
        assert!(split.agreement < 1e-10, "{}", split.agreement);
    }

    #[test]
    fn closure_examples() {
        let y = PointSet::new(
            2,
            vec![vec![c(0.0, 0.0); 2], vec![c(0.5, 0.0), c(0.0, 0.0)]],
        )
        .unwrap();
        let on = in_closure(&[c(0.5, 0.0), c(0.0, 0.0)], &y, 8, 1e-8).unwrap();
        assert!(on.member && on.residual <= 1e-10);
        let off = in_closure(&[c(0.3, 0.0), c(0.0, 0.0)], &y, 8, 1e-8).unwrap();
        assert!(!off.member && off.residual > 0.01, "{}", off.residual);

        let y = PointSet::real_line(&[0.0]).unwrap();
        let off = in_closure(&[c(0.2, 0.0)], &y, 8, 1e-8).unwrap();
        assert!(!off.member && off.residual > 0.01);
    }

    #[test]
    fn closure_contains_line_through_sample() {
        // N + 1 distinct points on a line through 0 span every <., w>^n, n <= N.
        let n = 6;
        let dir = [c(0.6, 0.0), c(0.0, 0.8)];
        let pts = (0..=n)
            .map(|k| dir.iter().map(|x| x * (0.1 * k as f64)).collect())
            .collect();
        let y = PointSet::new(2, pts).unwrap();
        let v: Vec<Complex64> = dir.iter().map(|x| x * c(-0.35, 0.2)).collect();
        let on = in_closure(&v, &y, n, 1e-8).unwrap();
        assert!(on.member, "{}", on.residual);
        let off = in_closure(&[c(0.3, 0.0), c(0.0, 0.0)], &y, n, 1e-8).unwrap();
        assert!(!off.member);
    }

    #[test]
    fn defect_truncated_shift() {
        let space = TruncatedSpace::new(1, 6).unwrap();
        let z = Polynomial::variable(1, 0);
        let d = compression_defect(&z, &space, &Subspace::full(space.len()), 1e-9).unwrap();
        assert_abs_diff_eq!(d.defect, -1.0, epsilon = 1e-12);
        assert!(!d.hyponormal);
    }

    #[test]
    fn defect_constant() {
        let space = TruncatedSpace::new(2, 3).unwrap();
        let phi = Polynomial::constant(2, c(0.3, -1.2));
        let d = compression_defect(&phi, &space, &Subspace::full(space.len()), 1e-9).unwrap();
        assert_abs_diff_eq!(d.defect, 0.0, epsilon = 1e-12);
        assert!(d.hyponormal);
    }

    #[test]
    fn defect_z1z2_weighted_shift() {
        let top = 4u32;
        let space = TruncatedSpace::new(2, 2 * top as usize).unwrap();
        let mons: Vec<MultiIndex> = (0..=top).map(|k| MultiIndex::new(vec![k, k])).collect();
        let f = space.monomial_subspace(&mons).unwrap();
        let phi = Polynomial::monomial(MultiIndex::new(vec![1, 1]), c(1.0, 0.0));
        let d = compression_defect(&phi, &space, &f, 1e-9).unwrap();
        // weights (k + 1) / sqrt((2k + 1)(2k + 2)); diagonal self-commutator
        let w2: Vec<f64> = (0..top)
            .map(|k| {
                let k = k as f64;
                (k + 1.0).powi(2) / ((2.0 * k + 1.0) * (2.0 * k + 2.0))
            })
            .collect();
        for pair in w2.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        let mut diag = vec![w2[0]];
        for k in 1..top as usize {
            diag.push(w2[k] - w2[k - 1]);
        }
        diag.push(-w2[top as usize - 1]);
        let expected = diag.iter().copied().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(d.defect, expected, epsilon = 1e-12);
        assert!(d.defect < 0.0);
    }

    #[test]
    fn arveson_numbers() {
        let w = arveson_example();
        assert_eq!(w.norm_sq_fwd, r(1, 6));
        assert_eq!(w.norm_sq_adj, r(1, 4));
    }

    #[test]
    fn arveson_two_dimensional_compression() {
        let space = TruncatedSpace::new(2, 2).unwrap();
        let f = space
            .monomial_subspace(&[MultiIndex::zero(2), MultiIndex::new(vec![1, 1])])
            .unwrap();
        let phi = Polynomial::monomial(MultiIndex::new(vec![1, 1]), c(1.0, 0.0));
        let d = compression_defect(&phi, &space, &f, 1e-9).unwrap();
        // T = [[0, 0], [||z1 z2||, 0]], commutator diag(1/2, -1/2)
        assert_abs_diff_eq!(d.defect, -0.5, epsilon = 1e-14);
    }

    #[test]
    fn lemma32_examples() {
        let z = [c(0.5, 0.0)];
        let chk = lemma32_identity_check(&z, 20).unwrap();
        let oracle: f64 = (1..=20).map(|n| 4f64.powi(-(n + 1))).sum();
        assert_abs_diff_eq!(chk.lhs, oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(chk.rhs, oracle, epsilon = 1e-15);
        assert!((chk.lhs - chk.rhs).abs() <= chk.tail_bound);

        let s = 0.5f64.sqrt();
        let z = [c(0.6 * s, 0.0), c(0.0, 0.8 * s)];
        let chk = lemma32_identity_check(&z, 40).unwrap();
        let closed = 0.25 / 0.5;
        assert!((chk.lhs - closed).abs() <= chk.tail_bound);
        let oracle: f64 = (0..40).map(|n| 0.5f64.powi(n + 2)).sum();
        assert_abs_diff_eq!(chk.lhs, oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(chk.rhs, oracle, epsilon = 1e-10);

        assert!(lemma32_identity_check(&[c(0.0, 0.0)], 5).is_err());
    }

    #[test]
    fn lemma32_exact_path_agrees() {
        let zq = [exact_real(1, 3), exact((0, 1), (1, 4))];
        let zf: Vec<Complex64> = zq.iter().map(Coeff::to_complex64).collect();
        let a = lemma32_identity_check(&zq, 12).unwrap();
        let b = lemma32_identity_check(&zf, 12).unwrap();
        assert_abs_diff_eq!(a.lhs, b.lhs, epsilon = 1e-12);
        assert_abs_diff_eq!(a.rhs, b.rhs, epsilon = 1e-12);
        assert_abs_diff_eq!(a.lhs, a.rhs, epsilon = 1e-16);
        let phi = kerpart(&zq);
        let f = truncated_kernel_fn(&zq, 12)
            .unwrap()
            .poly
            .sub(&Polynomial::one(2))
            .unwrap();
        assert_eq!(
            mult_adjoint_apply(&phi, &f, 12).unwrap().norm_sq_exact(),
            phi.multiply(&f).unwrap().norm_sq_exact()
        );
    }

    #[test]
    fn kerpart_adjoint_norms() {
        let z = [c(0.5, 0.0)];
        let (adj, fwd) = kerpart_adjoint_norm_check(&z, 4, 8).unwrap();
        assert_abs_diff_eq!(adj, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fwd, 1.0 / 16.0, epsilon = 1e-15);

        let z = [c(0.3, 0.0), c(0.0, 0.4)];
        let (adj, fwd) = kerpart_adjoint_norm_check(&z, 2, 4).unwrap();
        assert_abs_diff_eq!(adj, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(fwd, 0.25, epsilon = 1e-15);

        assert!(kerpart_adjoint_norm_check(&z, 1, 4).is_err());
        assert!(matches!(
            kerpart_adjoint_norm_check(&z, 5, 4),
            Err(Error::Window { .. })
        ));
        assert!(kerpart_adjoint_norm_check(&[c(0.0, 0.0)], 2, 4).is_err());
    }

    #[test]
    fn coords_round_trip_and_window() {
        let space = TruncatedSpace::new(2, 3).unwrap();
        let p = Polynomial::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 1]), c(0.5, -1.0)),
                (MultiIndex::new(vec![0, 3]), c(2.0, 0.0)),
            ],
        )
        .unwrap();
        let u = space.coords(&p).unwrap();
        assert_abs_diff_eq!(u.norm_squared(), p.norm_sq(), epsilon = 1e-14);
        let back = space.polynomial(&u).unwrap();
        for (a, x) in p.terms() {
            assert_abs_diff_eq!((back.coeff(a) - x).norm(), 0.0, epsilon = 1e-14);
        }
        assert!(matches!(
            space.coords(&Polynomial::variable(2, 0).pow(4)),
            Err(Error::Window { .. })
        ));
    }
}
