//! Projective linear algebra over [`Scalar`].
//!
//! A [`ProjMap`] is an invertible `(n+1)×(n+1)` matrix standing for an element
//! of `PGL(n+1, ℝ)`; a [`ProjPoint`] is a nonzero vector of `ℝ^{n+1}` standing
//! for a point of `P(ℝ^{n+1})`. Both compare up to a nonzero scale through
//! [`ProjEquiv`].
//!
//! Float projective comparison divides both operands by the entry that has the
//! largest magnitude in the left operand, then compares entrywise.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::scalar::{Mode, Scalar, DEFAULT_TOL};

pub type Complex64 = Complex<f64>;

/// Float inversion refuses matrices whose ∞-norm condition estimate exceeds this.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Relative distance under which computed eigenvalues are merged into one cluster.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square ({rows} rows, row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("need at least a 2×2 matrix or 2 coordinates")]
    TooSmall,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is numerically singular (condition estimate {estimate:e})")]
    IllConditioned { estimate: f64 },
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    #[error("eigenanalysis is float-only; convert with to_float() first")]
    ExactEigen,
    #[error("eigenvalue iteration did not converge")]
    EigenFailure,
}

/// A point of `P(ℝ^{n+1})`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct ProjPoint {
    coords: Vec<Scalar>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self, ProjError> {
        if coords.len() < 2 {
            return Err(ProjError::TooSmall);
        }
        if coords.iter().all(Scalar::is_zero) {
            return Err(ProjError::ZeroVector);
        }
        Ok(ProjPoint { coords })
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self, ProjError> {
        Self::new(coords.iter().map(|&x| Scalar::Float(x)).collect())
    }

    /// `[x₁ : … : xₙ : 1]`.
    pub fn from_chart(x: &[Scalar]) -> Self {
        let mode = Scalar::max_mode(x);
        let mut coords = x.to_vec();
        coords.push(Scalar::one(mode));
        ProjPoint { coords }
    }

    pub fn from_chart_f64(x: &[f64]) -> Self {
        let mut coords: Vec<Scalar> = x.iter().map(|&v| Scalar::Float(v)).collect();
        coords.push(Scalar::Float(1.0));
        ProjPoint { coords }
    }

    /// Basis vector `e_i` (1-based, as in the usual matrix notation).
    pub fn basis(n: usize, i: usize, mode: Mode) -> Self {
        assert!((1..=n + 1).contains(&i), "basis index out of range");
        let coords = (1..=n + 1).map(|k| if k == i { Scalar::one(mode) } else { Scalar::zero(mode) }).collect();
        ProjPoint { coords }
    }

    /// Projective dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn mode(&self) -> Mode {
        Scalar::max_mode(&self.coords)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    /// Affine coordinates in the chart `x_{n+1} = 1`, or `None` off the chart.
    pub fn chart(&self) -> Option<Vec<Scalar>> {
        let last = self.coords.last()?;
        let inv = last.recip()?;
        Some(self.coords[..self.coords.len() - 1].iter().map(|c| c * &inv).collect())
    }

    pub fn chart_f64(&self) -> Option<Vec<f64>> {
        let v = self.to_f64();
        let last = *v.last()?;
        if last == 0.0 {
            return None;
        }
        Some(v[..v.len() - 1].iter().map(|c| c / last).collect())
    }

    fn rescaled(coords: Vec<Scalar>) -> Result<Self, ProjError> {
        if coords.iter().all(Scalar::is_zero) {
            return Err(ProjError::ZeroVector);
        }
        if Scalar::max_mode(&coords) == Mode::Float {
            let m = coords.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
            if m.is_finite() && m > 0.0 {
                return Ok(ProjPoint { coords: coords.into_iter().map(|c| Scalar::Float(c.to_f64() / m)).collect() });
            }
        }
        Ok(ProjPoint { coords })
    }
}

impl TryFrom<Vec<Scalar>> for ProjPoint {
    type Error = ProjError;
    fn try_from(v: Vec<Scalar>) -> Result<Self, ProjError> {
        ProjPoint::new(v)
    }
}

impl From<ProjPoint> for Vec<Scalar> {
    fn from(p: ProjPoint) -> Self {
        p.coords
    }
}

/// An element of `PGL(n+1, ℝ)`, stored as a representative matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Scalar>>", into = "Vec<Vec<Scalar>>")]
pub struct ProjMap {
    size: usize,
    entries: Vec<Scalar>,
}

impl ProjMap {
    /// Builds a map from rows, rejecting non-square and singular input.
    ///
    /// Float input is only rejected when its determinant is exactly zero;
    /// conditioning is checked when the map is inverted.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, ProjError> {
        let size = rows.len();
        if size < 2 {
            return Err(ProjError::TooSmall);
        }
        if let Some(r) = rows.iter().find(|r| r.len() != size) {
            return Err(ProjError::NotSquare { rows: size, cols: r.len() });
        }
        let m = ProjMap { size, entries: rows.into_iter().flatten().collect() };
        if m.determinant().is_zero() {
            return Err(ProjError::Singular);
        }
        Ok(m)
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self, ProjError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::Float(x)).collect()).collect())
    }

    /// Exact map from integer rows.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, ProjError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect())
    }

    /// Builds a matrix entry by entry (0-based indices). The caller guarantees
    /// invertibility.
    pub(crate) fn from_fn_unchecked(size: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                entries.push(f(r, c));
            }
        }
        ProjMap { size, entries }
    }

    pub fn identity(n: usize, mode: Mode) -> Self {
        Self::from_fn_unchecked(n + 1, |r, c| if r == c { Scalar::one(mode) } else { Scalar::zero(mode) })
    }

    pub fn diagonal(diag: &[Scalar]) -> Result<Self, ProjError> {
        if diag.len() < 2 {
            return Err(ProjError::TooSmall);
        }
        if diag.iter().any(Scalar::is_zero) {
            return Err(ProjError::Singular);
        }
        let mode = Scalar::max_mode(diag);
        Ok(Self::from_fn_unchecked(diag.len(), |r, c| if r == c { diag[r].clone() } else { Scalar::zero(mode) }))
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self, ProjError> {
        if m.nrows() != m.ncols() {
            return Err(ProjError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Self::from_rows((0..m.nrows()).map(|r| (0..m.ncols()).map(|c| Scalar::Float(m[(r, c)])).collect()).collect())
    }

    /// Projective dimension `n` (the matrix is `(n+1)×(n+1)`).
    pub fn dim(&self) -> usize {
        self.size - 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.size + col]
    }

    /// Entry at 1-based `(row, col)`, matching the usual matrix notation.
    pub fn at(&self, row: usize, col: usize) -> &Scalar {
        self.get(row - 1, col - 1)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn mode(&self) -> Mode {
        Scalar::max_mode(&self.entries)
    }

    pub fn to_float(&self) -> ProjMap {
        ProjMap { size: self.size, entries: self.entries.iter().map(Scalar::to_float).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.get(r, c).to_f64())
    }

    pub fn transpose(&self) -> ProjMap {
        Self::from_fn_unchecked(self.size, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, k: &Scalar) -> ProjMap {
        ProjMap { size: self.size, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `|a_ij - b_ij|`, without rescaling.
    pub fn max_diff(&self, other: &ProjMap) -> f64 {
        assert_eq!(self.size, other.size);
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }

    /// True when every entry of `self - other` is exactly zero.
    pub fn exactly_equals(&self, other: &ProjMap) -> bool {
        self.size == other.size && self.entries.iter().zip(&other.entries).all(|(a, b)| (a - b).is_zero())
    }

    pub fn determinant(&self) -> Scalar {
        let n = self.size;
        let mut a = self.entries.clone();
        let float = self.mode() == Mode::Float;
        let mut det = Scalar::one(self.mode());
        for col in 0..n {
            let pivot = pivot_row(&a, n, col, col, float);
            let Some(p) = pivot else {
                return Scalar::zero(self.mode());
            };
            if p != col {
                swap_rows(&mut a, n, p, col);
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det = &det * &pv;
            for r in col + 1..n {
                let f = &a[r * n + col] / &pv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = &a[r * n + c] - &(&f * &a[col * n + c]);
                    a[r * n + c] = v;
                }
            }
        }
        det
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.size).all(|r| (0..r).all(|c| self.get(r, c).to_f64().abs() <= tol))
    }

    /// Largest strictly-lower-triangular entry, relative to the largest entry.
    pub fn lower_residual(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for r in 0..self.size {
            for c in 0..r {
                worst = worst.max(self.get(r, c).to_f64().abs());
            }
        }
        worst / scale
    }

    /// Largest off-diagonal entry, relative to the largest entry.
    pub fn off_diagonal_residual(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for r in 0..self.size {
            for c in 0..self.size {
                if r != c {
                    worst = worst.max(self.get(r, c).to_f64().abs());
                }
            }
        }
        worst / scale
    }
}

impl TryFrom<Vec<Vec<Scalar>>> for ProjMap {
    type Error = ProjError;
    fn try_from(rows: Vec<Vec<Scalar>>) -> Result<Self, ProjError> {
        ProjMap::from_rows(rows)
    }
}

impl From<ProjMap> for Vec<Vec<Scalar>> {
    fn from(m: ProjMap) -> Self {
        m.rows()
    }
}

impl fmt::Display for ProjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.size) {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn pivot_row(a: &[Scalar], n: usize, col: usize, from: usize, float: bool) -> Option<usize> {
    if float {
        let (best, val) =
            (from..n)
                .map(|r| (r, a[r * n + col].to_f64().abs()))
                .fold((from, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        (val > 0.0).then_some(best)
    } else {
        (from..n).find(|&r| !a[r * n + col].is_zero())
    }
}

fn swap_rows(a: &mut [Scalar], n: usize, i: usize, j: usize) {
    for c in 0..n {
        a.swap(i * n + c, j * n + c);
    }
}

fn inf_norm(entries: &[Scalar], n: usize) -> f64 {
    entries.chunks(n).map(|r| r.iter().map(|e| e.to_f64().abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix product `a·b`.
pub fn compose(a: &ProjMap, b: &ProjMap) -> Result<ProjMap, ProjError> {
    if a.size != b.size {
        return Err(ProjError::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    let n = a.size;
    let mode = a.mode().join(b.mode());
    Ok(ProjMap::from_fn_unchecked(n, |r, c| {
        let mut acc = Scalar::zero(mode);
        for k in 0..n {
            let x = a.get(r, k);
            let y = b.get(k, c);
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc = acc + x * y;
        }
        acc
    }))
}

/// Composes a non-empty sequence left to right: `maps[0]·maps[1]·…`.
pub fn compose_all<'a>(maps: impl IntoIterator<Item = &'a ProjMap>) -> Result<ProjMap, ProjError> {
    let mut it = maps.into_iter();
    let first = it.next().ok_or(ProjError::TooSmall)?.clone();
    it.try_fold(first, |acc, m| compose(&acc, m))
}

/// Gauss–Jordan inverse. Exact input gives the exact inverse; float input uses
/// partial pivoting and is refused when the condition estimate exceeds
/// [`CONDITION_LIMIT`].
pub fn inverse(a: &ProjMap) -> Result<ProjMap, ProjError> {
    let n = a.size;
    let mode = a.mode();
    let float = mode == Mode::Float;
    let mut m = a.entries.clone();
    let mut inv = ProjMap::identity(a.dim(), mode).entries;
    for col in 0..n {
        let p = pivot_row(&m, n, col, col, float).ok_or(ProjError::Singular)?;
        if p != col {
            swap_rows(&mut m, n, p, col);
            swap_rows(&mut inv, n, p, col);
        }
        let pv = m[col * n + col].recip().ok_or(ProjError::Singular)?;
        for c in 0..n {
            m[col * n + c] = &m[col * n + c] * &pv;
            inv[col * n + c] = &inv[col * n + c] * &pv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                m[r * n + c] = &m[r * n + c] - &(&f * &m[col * n + c]);
                inv[r * n + c] = &inv[r * n + c] - &(&f * &inv[col * n + c]);
            }
        }
    }
    if float {
        let estimate = inf_norm(&a.entries, n) * inf_norm(&inv, n);
        if !estimate.is_finite() || estimate > CONDITION_LIMIT {
            return Err(ProjError::IllConditioned { estimate });
        }
    }
    Ok(ProjMap { size: n, entries: inv })
}

/// `c·g·c⁻¹`.
pub fn conjugate(c: &ProjMap, g: &ProjMap) -> Result<ProjMap, ProjError> {
    compose(&compose(c, g)?, &inverse(c)?)
}

/// Image of a point; float results are rescaled so the largest coordinate has
/// magnitude 1.
pub fn act(a: &ProjMap, p: &ProjPoint) -> Result<ProjPoint, ProjError> {
    if a.size != p.coords.len() {
        return Err(ProjError::DimensionMismatch { left: a.dim(), right: p.dim() });
    }
    let n = a.size;
    let mode = a.mode().join(p.mode());
    let coords = (0..n)
        .map(|r| {
            (0..n).fold(Scalar::zero(mode), |acc, k| {
                let x = a.get(r, k);
                let y = &p.coords[k];
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc + x * y
                }
            })
        })
        .collect();
    ProjPoint::rescaled(coords)
}

/// Equality up to a nonzero scale.
pub trait ProjEquiv {
    fn proj_equiv(&self, other: &Self, tol: f64) -> bool;
}

impl ProjEquiv for ProjMap {
    fn proj_equiv(&self, other: &Self, tol: f64) -> bool {
        self.size == other.size && proportional(&self.entries, &other.entries, tol)
    }
}

impl ProjEquiv for ProjPoint {
    fn proj_equiv(&self, other: &Self, tol: f64) -> bool {
        self.coords.len() == other.coords.len() && proportional(&self.coords, &other.coords, tol)
    }
}

pub fn proj_equiv<T: ProjEquiv>(a: &T, b: &T, tol: f64) -> bool {
    a.proj_equiv(b, tol)
}

/// Distance between `a` and `b` after both are scaled so that `a`'s
/// largest-magnitude entry becomes 1. Exact inputs give an exact 0 when
/// proportional. Returns `f64::INFINITY` when no common scale exists.
pub fn projective_residual(a: &[Scalar], b: &[Scalar]) -> f64 {
    assert_eq!(a.len(), b.len());
    let exact = Scalar::max_mode(a.iter().chain(b)) == Mode::Exact;
    if exact {
        let Some(p) = a.iter().position(|x| !x.is_zero()) else {
            return f64::INFINITY;
        };
        if b[p].is_zero() {
            return f64::INFINITY;
        }
        let r = &b[p] / &a[p];
        let na = &a[p];
        return a.iter().zip(b).map(|(x, y)| ((&(x * &r) - y) / (&r * na)).abs().to_f64()).fold(0.0, f64::max);
    }
    let af: Vec<f64> = a.iter().map(Scalar::to_f64).collect();
    let bf: Vec<f64> = b.iter().map(Scalar::to_f64).collect();
    let (p, amax) =
        af.iter().enumerate().map(|(i, x)| (i, x.abs())).fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let bmax = bf.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if amax <= 0.0 || bf[p].abs() < 0.5 * bmax || bf[p] == 0.0 {
        return f64::INFINITY;
    }
    let (ap, bp) = (af[p], bf[p]);
    af.iter().zip(&bf).map(|(x, y)| (x / ap - y / bp).abs()).fold(0.0, f64::max)
}

fn proportional(a: &[Scalar], b: &[Scalar], tol: f64) -> bool {
    let exact = Scalar::max_mode(a.iter().chain(b)) == Mode::Exact;
    let r = projective_residual(a, b);
    if exact {
        r == 0.0
    } else {
        r <= tol
    }
}

/// Projective equality of two maps at the default tolerance.
pub fn proj_eq_default(a: &ProjMap, b: &ProjMap) -> bool {
    a.proj_equiv(b, DEFAULT_TOL)
}

/// One eigenvalue cluster of a float matrix.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: Complex64,
    /// Unit eigenvector; its largest component is real and positive.
    pub vector: Vec<Complex64>,
    /// Algebraic multiplicity (size of the eigenvalue cluster).
    pub multiplicity: usize,
    /// `‖A v − λ v‖` for the reported pair.
    pub residual: f64,
}

impl Eigenpair {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }

    /// The eigenvector as a real projective point, when the eigenvalue is real.
    pub fn real_point(&self) -> Option<ProjPoint> {
        if !self.is_real() {
            return None;
        }
        ProjPoint::from_f64(&self.vector.iter().map(|z| z.re).collect::<Vec<_>>()).ok()
    }
}

/// Eigenvalues sorted by decreasing modulus, merged into clusters whose size
/// is the algebraic multiplicity, each with one unit eigenvector.
pub fn eigen(a: &ProjMap) -> Result<Vec<Eigenpair>, ProjError> {
    if a.mode() == Mode::Exact {
        return Err(ProjError::ExactEigen);
    }
    let m = a.to_dmatrix();
    let values = eigenvalues(&m)?;
    let mut pairs = Vec::new();
    for cluster in cluster_eigenvalues(&values) {
        let mut value = cluster.0;
        if value.im.abs() <= EIGEN_CLUSTER_TOL * value.norm().max(1.0) {
            value.im = 0.0;
        }
        let vector = if value.im == 0.0 {
            let shifted = &m - DMatrix::identity(m.nrows(), m.ncols()) * value.re;
            let (_, vecs) = right_singular_vectors(&shifted);
            vecs[0].iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>()
        } else {
            let mc = m.map(|x| Complex::new(x, 0.0));
            let shifted = &mc - DMatrix::<Complex64>::identity(m.nrows(), m.ncols()) * value;
            complex_null_vector(&shifted)?
        };
        let vector = normalize_phase(vector);
        let v = DVector::from_vec(vector.clone());
        let mc = m.map(|x| Complex::new(x, 0.0));
        let residual = (&mc * &v - &v * value).norm();
        pairs.push(Eigenpair { value, vector, multiplicity: cluster.1, residual });
    }
    Ok(pairs)
}

pub(crate) fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>, ProjError> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(ProjError::EigenFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Groups eigenvalues that lie within [`EIGEN_CLUSTER_TOL`] (relative) of each
/// other. Returns `(mean, count)` sorted by decreasing modulus.
pub(crate) fn cluster_eigenvalues(values: &[Complex64]) -> Vec<(Complex64, usize)> {
    cluster_eigenvalues_with(values, EIGEN_CLUSTER_TOL)
}

pub(crate) fn cluster_eigenvalues_with(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = values.to_vec();
    sort_by_modulus(&mut sorted);
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in sorted {
        let near = clusters.iter_mut().find(|c| {
            let rep = c[0];
            (rep - z).norm() <= tol * rep.norm().max(1.0)
        });
        match near {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let mut out: Vec<(Complex64, usize)> = clusters
        .into_iter()
        .map(|c| {
            let k = c.len();
            let sum: Complex64 = c.iter().sum();
            (sum / k as f64, k)
        })
        .collect();
    out.sort_by(|a, b| modulus_order(&a.0, &b.0));
    out
}

fn modulus_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im))
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(modulus_order);
}

/// Right singular vectors of a real square matrix, ordered by increasing
/// singular value, together with those singular values.
pub(crate) fn right_singular_vectors(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sigmas = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs = idx.iter().map(|&i| v_t.row(i).transpose()).collect();
    (sigmas, vecs)
}

fn complex_null_vector(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>, ProjError> {
    let svd = m.clone().try_svd(false, true, f64::EPSILON, 10_000).ok_or(ProjError::EigenFailure)?;
    let v_t = svd.v_t.ok_or(ProjError::EigenFailure)?;
    let i = (0..svd.singular_values.len())
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .ok_or(ProjError::EigenFailure)?;
    Ok(v_t.row(i).iter().map(|z| z.conj()).collect())
}

fn normalize_phase(v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(Complex::new(1.0, 0.0));
    let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex::new(1.0, 0.0) };
    v.into_iter().map(|z| z * phase / norm).collect()
}
