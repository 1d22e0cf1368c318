//! Model generalized cusps.
//!
//! For a parameter ψ in the closed dual Weyl chamber (ψ₁ ≥ … ≥ ψₙ ≥ 0) of
//! type `t` (the number of positive entries) with `t < n`, the model domain
//! Ω(ψ) ⊂ P(ℝ^{n+1}) is the union of the leaves
//!
//! ```text
//! c = x₁ + Σ_{k=1..t} ψ_k log x_{k+1} − ½ Σ_{j=t+2..n} x_j² ,   c ≥ 0,
//! ```
//!
//! taken in the affine chart `x_{n+1} = 1` with `x₂, …, x_{t+1} > 0`, and the
//! translation group H(ψ) consists of the block matrices
//!
//! ```text
//! ⎡ 1  0  ᵗv  σ ⎤
//! ⎢ 0  D   0  0 ⎥     σ = ½ Σ v_i² − Σ ψ_j log d_j .
//! ⎢ 0  0   I  v ⎥
//! ⎣ 0  0   0  1 ⎦
//! ```
//!
//! Coefficient ψ_k is paired with coordinate x_{k+1}, so a type-`t` parameter
//! contributes exactly `t` log terms (coordinates 2..t+1). Every element of
//! H(ψ) maps each leaf to itself.

use serde::{Deserialize, Serialize};

use crate::hilbert::{ConvexDomain, Location};
use crate::projlin::{compose, ProjError, ProjMap, ProjPoint};
use crate::scalar::{Mode, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("cusp parameter must be non-increasing and nonnegative (entry {index})")]
    NotInWeylChamber { index: usize },
    #[error("cusp parameter is empty")]
    EmptyParameter,
    #[error("declared dimension {declared} does not match {actual} entries")]
    DimensionField { declared: usize, actual: usize },
    #[error("expected {expected} {what}, got {actual}")]
    WrongLength { what: &'static str, expected: usize, actual: usize },
    #[error("diagonal entry d_{index} must be positive")]
    NonPositiveDiagonal { index: usize },
    #[error("exact mode needs d_{index} = 1 or a caller-supplied exact log")]
    TranscendentalLog { index: usize },
    #[error("cusp parameters differ")]
    ParameterMismatch,
    #[error("model domain needs type t < n (got t = {t}, n = {n})")]
    FullType { t: usize, n: usize },
    #[error("point is outside the affine chart x_(n+1) ≠ 0")]
    OutsideChart,
    #[error("log-coordinate x_{index} must be positive")]
    NonPositiveLogCoordinate { index: usize },
    #[error("leaf parameter must be nonnegative")]
    NegativeLeaf,
    #[error("coordinate index {index} out of range 2..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error(transparent)]
    Proj(#[from] ProjError),
}

/// A point ψ of the closed dual Weyl chamber.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CuspParameterJson", into = "CuspParameterJson")]
pub struct CuspParameter {
    psi: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct CuspParameterJson {
    n: usize,
    psi: Vec<Scalar>,
}

impl TryFrom<CuspParameterJson> for CuspParameter {
    type Error = ModelError;
    fn try_from(j: CuspParameterJson) -> Result<Self, ModelError> {
        if j.n != j.psi.len() {
            return Err(ModelError::DimensionField { declared: j.n, actual: j.psi.len() });
        }
        CuspParameter::new(j.psi)
    }
}

impl From<CuspParameter> for CuspParameterJson {
    fn from(p: CuspParameter) -> Self {
        CuspParameterJson { n: p.psi.len(), psi: p.psi }
    }
}

impl CuspParameter {
    pub fn new(psi: Vec<Scalar>) -> Result<Self, ModelError> {
        if psi.is_empty() {
            return Err(ModelError::EmptyParameter);
        }
        for (i, w) in psi.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(ModelError::NotInWeylChamber { index: i + 2 });
            }
        }
        if let Some(last) = psi.last() {
            if last.signum() < 0 || last.to_f64().is_nan() {
                return Err(ModelError::NotInWeylChamber { index: psi.len() });
            }
        }
        Ok(CuspParameter { psi })
    }

    pub fn from_f64(psi: &[f64]) -> Result<Self, ModelError> {
        Self::new(psi.iter().map(|&x| Scalar::Float(x)).collect())
    }

    /// Sorts nonnegative entries into non-increasing order first.
    pub fn from_unsorted(mut psi: Vec<Scalar>) -> Result<Self, ModelError> {
        psi.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self::new(psi)
    }

    pub fn zero(n: usize, mode: Mode) -> Self {
        CuspParameter { psi: vec![Scalar::zero(mode); n] }
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.psi
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.psi.iter().map(Scalar::to_f64).collect()
    }

    pub fn mode(&self) -> Mode {
        Scalar::max_mode(&self.psi)
    }

    /// `rψ` for `r > 0`.
    pub fn scaled(&self, r: &Scalar) -> Result<Self, ModelError> {
        CuspParameter::new(self.psi.iter().map(|x| x * r).collect())
    }

    /// Cusp type: the greatest index with a positive entry (0 if none).
    pub fn cusp_type(&self) -> usize {
        cusp_type(self)
    }
}

impl PartialEq for CuspParameter {
    fn eq(&self, other: &Self) -> bool {
        self.psi == other.psi
    }
}

pub fn cusp_type(psi: &CuspParameter) -> usize {
    psi.psi.iter().rposition(Scalar::is_positive).map_or(0, |i| i + 1)
}

/// An element of the type-t translation group H(ψ).
#[derive(Clone, Debug)]
pub struct CuspGroupElement {
    psi: CuspParameter,
    d: Vec<Scalar>,
    log_d: Vec<Scalar>,
    v: Vec<Scalar>,
    sigma: Scalar,
    matrix: ProjMap,
}

/// JSON form; σ and the matrix are always recomputed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuspGroupElementJson {
    pub d: Vec<Scalar>,
    pub v: Vec<Scalar>,
}

impl CuspGroupElement {
    pub fn psi(&self) -> &CuspParameter {
        &self.psi
    }

    pub fn d(&self) -> &[Scalar] {
        &self.d
    }

    pub fn log_d(&self) -> &[Scalar] {
        &self.log_d
    }

    pub fn v(&self) -> &[Scalar] {
        &self.v
    }

    pub fn sigma(&self) -> &Scalar {
        &self.sigma
    }

    pub fn matrix(&self) -> &ProjMap {
        &self.matrix
    }

    pub fn to_json(&self) -> CuspGroupElementJson {
        CuspGroupElementJson { d: self.d.clone(), v: self.v.clone() }
    }

    pub fn from_json(psi: &CuspParameter, j: &CuspGroupElementJson) -> Result<Self, ModelError> {
        h_element(psi, &j.d, &j.v)
    }
}

/// `½ Σ v_i² − Σ ψ_j log d_j`.
pub fn sigma(psi: &CuspParameter, log_d: &[Scalar], v: &[Scalar]) -> Scalar {
    let half = Scalar::ratio(1, 2);
    let quad: Scalar = v.iter().map(|x| x * x).sum();
    let logs: Scalar = psi.psi.iter().zip(log_d).map(|(p, l)| p * l).sum();
    &half * &quad - logs
}

/// Builds an element of H(ψ). Logs of `d` are taken in float mode; exact
/// input must have every `d_i = 1` (use [`h_element_with_logs`] otherwise).
pub fn h_element(psi: &CuspParameter, d: &[Scalar], v: &[Scalar]) -> Result<CuspGroupElement, ModelError> {
    if let Some(i) = d.iter().position(|x| x.is_exact() && !x.is_one()) {
        return Err(ModelError::TranscendentalLog { index: i + 1 });
    }
    let log_d: Vec<Scalar> = d.iter().map(Scalar::ln).collect();
    h_element_with_logs(psi, d, &log_d, v)
}

/// Builds an element of H(ψ) from `d` together with caller-supplied values
/// of `log d_i`, which lets exact arithmetic flow through σ.
pub fn h_element_with_logs(
    psi: &CuspParameter,
    d: &[Scalar],
    log_d: &[Scalar],
    v: &[Scalar],
) -> Result<CuspGroupElement, ModelError> {
    let n = psi.n();
    let t = psi.cusp_type();
    if t == n {
        return Err(ModelError::FullType { t, n });
    }
    check_len("diagonal entries", t, d.len())?;
    check_len("log entries", t, log_d.len())?;
    check_len("translation entries", n - 1 - t, v.len())?;
    if let Some(i) = d.iter().position(|x| !x.is_positive()) {
        return Err(ModelError::NonPositiveDiagonal { index: i + 1 });
    }
    let sigma = sigma(psi, log_d, v);
    let mode = Scalar::max_mode(d.iter().chain(v).chain(log_d).chain(psi.values()));
    let matrix = h_matrix(n, t, d, v, &sigma, mode);
    Ok(CuspGroupElement { psi: psi.clone(), d: d.to_vec(), log_d: log_d.to_vec(), v: v.to_vec(), sigma, matrix })
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<(), ModelError> {
    if expected != actual {
        return Err(ModelError::WrongLength { what, expected, actual });
    }
    Ok(())
}

fn h_matrix(n: usize, t: usize, d: &[Scalar], v: &[Scalar], sigma: &Scalar, mode: Mode) -> ProjMap {
    // 0-based: row/col 0 is x₁, 1..=t the D block, t+1..n-1 the I block, n the last.
    ProjMap::from_fn_unchecked(n + 1, |r, c| {
        let zero = || Scalar::zero(mode);
        if r == 0 {
            return if c == 0 {
                Scalar::one(mode)
            } else if c > t && c < n {
                v[c - t - 1].clone()
            } else if c == n {
                sigma.clone()
            } else {
                zero()
            };
        }
        if r <= t {
            return if c == r { d[r - 1].clone() } else { zero() };
        }
        if r < n {
            return if c == r {
                Scalar::one(mode)
            } else if c == n {
                v[r - t - 1].clone()
            } else {
                zero()
            };
        }
        if c == n {
            Scalar::one(mode)
        } else {
            zero()
        }
    })
}

/// Product in H(ψ): `(d·d′, v + v′)` with `σ″ = σ + σ′ + v·v′`.
pub fn h_product(a: &CuspGroupElement, b: &CuspGroupElement) -> Result<CuspGroupElement, ModelError> {
    if a.psi != b.psi {
        return Err(ModelError::ParameterMismatch);
    }
    let d: Vec<Scalar> = a.d.iter().zip(&b.d).map(|(x, y)| x * y).collect();
    let log_d: Vec<Scalar> = a.log_d.iter().zip(&b.log_d).map(|(x, y)| x + y).collect();
    let v: Vec<Scalar> = a.v.iter().zip(&b.v).map(|(x, y)| x + y).collect();
    let dot: Scalar = a.v.iter().zip(&b.v).map(|(x, y)| x * y).sum();
    let sigma = &(&a.sigma + &b.sigma) + &dot;
    let matrix = compose(&a.matrix, &b.matrix)?;
    Ok(CuspGroupElement { psi: a.psi.clone(), d, log_d, v, sigma, matrix })
}

/// Inverse in H(ψ): `(1/d, −v)`.
pub fn h_inverse(a: &CuspGroupElement) -> Result<CuspGroupElement, ModelError> {
    let d: Vec<Scalar> = a.d.iter().map(|x| x.recip().expect("positive")).collect();
    let log_d: Vec<Scalar> = a.log_d.iter().map(|x| -x).collect();
    let v: Vec<Scalar> = a.v.iter().map(|x| -x).collect();
    h_element_with_logs(&a.psi, &d, &log_d, &v)
}

/// The model domain Ω(ψ) for a parameter of type `t < n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CuspParameter", into = "CuspParameter")]
pub struct ModelDomain {
    psi: CuspParameter,
    t: usize,
}

impl TryFrom<CuspParameter> for ModelDomain {
    type Error = ModelError;
    fn try_from(psi: CuspParameter) -> Result<Self, ModelError> {
        ModelDomain::new(psi)
    }
}

impl From<ModelDomain> for CuspParameter {
    fn from(d: ModelDomain) -> Self {
        d.psi
    }
}

/// A leaf coordinate with its location relative to Ω(ψ).
#[derive(Clone, Debug)]
pub struct LeafCoordinate {
    pub value: Scalar,
    pub location: Location,
}

impl ModelDomain {
    pub fn new(psi: CuspParameter) -> Result<Self, ModelError> {
        let t = psi.cusp_type();
        if t >= psi.n() {
            return Err(ModelError::FullType { t, n: psi.n() });
        }
        Ok(ModelDomain { psi, t })
    }

    pub fn psi(&self) -> &CuspParameter {
        &self.psi
    }

    pub fn n(&self) -> usize {
        self.psi.n()
    }

    pub fn cusp_type(&self) -> usize {
        self.t
    }

    /// Leaf parameter `c` of a point, tagged by its sign (`|c| ≤ tol` counts as
    /// boundary for floats; exact values use their exact sign).
    pub fn leaf_coordinate(&self, p: &ProjPoint, tol: f64) -> Result<LeafCoordinate, ModelError> {
        self.check_dim(p)?;
        let x = p.chart().ok_or(ModelError::OutsideChart)?;
        let value = self.leaf_value(&x)?;
        let location = location_of(&value, tol);
        Ok(LeafCoordinate { value, location })
    }

    fn check_dim(&self, p: &ProjPoint) -> Result<(), ModelError> {
        if p.dim() != self.n() {
            return Err(ProjError::DimensionMismatch { left: self.n(), right: p.dim() }.into());
        }
        Ok(())
    }

    /// `c` for affine coordinates `x = (x₁, …, xₙ)`.
    fn leaf_value(&self, x: &[Scalar]) -> Result<Scalar, ModelError> {
        let (n, t) = (self.n(), self.t);
        let mut c = x[0].clone();
        for (k, xk) in x.iter().enumerate().take(t + 1).skip(1) {
            if !xk.is_positive() {
                return Err(ModelError::NonPositiveLogCoordinate { index: k + 1 });
            }
            c = c + &self.psi.psi[k - 1] * &xk.ln();
        }
        let half = Scalar::ratio(1, 2);
        let quad: Scalar = x[t + 1..n].iter().map(|y| y * y).sum();
        Ok(c - &half * &quad)
    }

    /// Float fast path used by the Hilbert-metric oracle.
    fn leaf_value_f64(&self, x: &[f64]) -> Option<f64> {
        let (n, t) = (self.n(), self.t);
        let psi = self.psi.to_f64();
        let mut c = x[0];
        for k in 1..=t {
            if x[k] <= 0.0 {
                return None;
            }
            c += psi[k - 1] * x[k].ln();
        }
        Some(c - 0.5 * x[t + 1..n].iter().map(|y| y * y).sum::<f64>())
    }

    /// Point `[c − Σ ψ_k log x_{k+1} + ½ Σ x_j², x₂, …, xₙ, 1]` on leaf `c`.
    /// `rest` holds `x₂, …, xₙ`.
    pub fn leaf_point(&self, c: &Scalar, rest: &[Scalar]) -> Result<ProjPoint, ModelError> {
        let (n, t) = (self.n(), self.t);
        check_len("coordinates x_2..x_n", n - 1, rest.len())?;
        if c.signum() < 0 {
            return Err(ModelError::NegativeLeaf);
        }
        let mut first = c.clone();
        for k in 1..=t {
            let xk = &rest[k - 1];
            if !xk.is_positive() {
                return Err(ModelError::NonPositiveLogCoordinate { index: k + 1 });
            }
            first = first - &self.psi.psi[k - 1] * &xk.ln();
        }
        let half = Scalar::ratio(1, 2);
        let quad: Scalar = rest[t..].iter().map(|y| y * y).sum();
        first = first + &half * &quad;
        let mut chart = vec![first];
        chart.extend_from_slice(rest);
        Ok(ProjPoint::from_chart(&chart))
    }

    /// Location of a point; off-chart points are tagged rather than rejected.
    pub fn locate(&self, p: &ProjPoint, tol: f64) -> Location {
        match self.leaf_coordinate(p, tol) {
            Ok(lc) => lc.location,
            Err(ModelError::OutsideChart) => Location::OutsideChart,
            Err(_) => Location::Exterior,
        }
    }
}

fn location_of(value: &Scalar, tol: f64) -> Location {
    let boundary = if value.is_exact() { value.is_zero() } else { value.to_f64().abs() <= tol };
    if boundary {
        Location::Boundary
    } else if value.is_positive() {
        Location::Interior
    } else {
        Location::Exterior
    }
}

impl ConvexDomain for ModelDomain {
    fn dim(&self) -> usize {
        self.n()
    }

    /// Strict membership `c > 0`.
    fn classify(&self, p: &ProjPoint) -> Location {
        self.locate(p, 0.0)
    }

    fn classify_chart(&self, x: &[f64]) -> Location {
        match self.leaf_value_f64(x) {
            None => Location::Exterior,
            Some(c) if c > 0.0 => Location::Interior,
            Some(0.0) => Location::Boundary,
            Some(_) => Location::Exterior,
        }
    }
}

/// The paraboloid model of hyperbolic n-space: the negative cone of
/// `Qₙ(x) = −2 x₁ x_{n+1} + Σ_{i=2..n} x_i²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParaboloidModel {
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct FormValue {
    pub value: Scalar,
    pub location: Location,
}

impl ParaboloidModel {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        ParaboloidModel { n }
    }

    /// The symmetric matrix of the form (exact).
    pub fn form(&self) -> ProjMap {
        let n = self.n;
        ProjMap::from_fn_unchecked(n + 1, |r, c| {
            if (r == 0 && c == n) || (r == n && c == 0) {
                Scalar::int(-1)
            } else if r == c && r != 0 && r != n {
                Scalar::int(1)
            } else {
                Scalar::int(0)
            }
        })
    }

    /// `ᵗx Qₙ x`, after rescaling float input so its largest coordinate is ±1.
    pub fn eval(&self, p: &ProjPoint, tol: f64) -> Result<FormValue, ModelError> {
        if p.dim() != self.n {
            return Err(ProjError::DimensionMismatch { left: self.n, right: p.dim() }.into());
        }
        let coords: Vec<Scalar> = if p.mode() == Mode::Float {
            let v = p.to_f64();
            let m = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
            v.iter().map(|x| Scalar::Float(x / m)).collect()
        } else {
            p.coords().to_vec()
        };
        let n = self.n;
        let quad: Scalar = coords[1..n].iter().map(|x| x * x).sum();
        let value = quad - &Scalar::int(2) * &(&coords[0] * &coords[n]);
        let location = location_of(&-&value, tol);
        Ok(FormValue { value, location })
    }

    /// The parabolic element of H(0) with translation `v` (length n−1).
    pub fn parabolic_element(&self, v: &[Scalar]) -> Result<ProjMap, ModelError> {
        let psi = CuspParameter::zero(self.n, Scalar::max_mode(v));
        Ok(h_element(&psi, &[], v)?.matrix)
    }
}

pub fn paraboloid_eval(m: &ParaboloidModel, p: &ProjPoint, tol: f64) -> Result<FormValue, ModelError> {
    m.eval(p, tol)
}

pub fn parabolic_element(m: &ParaboloidModel, v: &[Scalar]) -> Result<ProjMap, ModelError> {
    m.parabolic_element(v)
}

/// `diag(1, …, e^{tparam}, …, 1)` with the exponential at 1-based position `i`.
pub fn hyperplane_centralizer_element(i: usize, tparam: &Scalar, n: usize) -> Result<ProjMap, ModelError> {
    hyperplane_scaling(i, &tparam.exp(), n)
}

/// `diag(1, …, factor, …, 1)` with `factor` at 1-based position `i`; the
/// exact-arithmetic form of [`hyperplane_centralizer_element`].
pub fn hyperplane_scaling(i: usize, factor: &Scalar, n: usize) -> Result<ProjMap, ModelError> {
    if i < 2 || i > n {
        return Err(ModelError::IndexOutOfRange { index: i, n });
    }
    let mode = factor.mode();
    let diag: Vec<Scalar> = (1..=n + 1).map(|k| if k == i { factor.clone() } else { Scalar::one(mode) }).collect();
    Ok(ProjMap::diagonal(&diag)?)
}

/// The element of Z′(H): `λ` at (1,1), `k(λ−1)` at (n+1,1), identity elsewhere.
/// It fixes the hyperplane `x₁ = 0` pointwise and scales `e₁ + k·e_{n+1}` by λ.
pub fn zprime_element(lambda: &Scalar, k: &Scalar, n: usize) -> Result<ProjMap, ModelError> {
    if lambda.is_zero() {
        return Err(ModelError::ZeroLambda);
    }
    let mode = lambda.mode().join(k.mode());
    let low = k * &(lambda - &Scalar::one(mode));
    Ok(ProjMap::from_fn_unchecked(n + 1, |r, c| {
        if r == 0 && c == 0 {
            lambda.clone()
        } else if r == n && c == 0 {
            low.clone()
        } else if r == c {
            Scalar::one(mode)
        } else {
            Scalar::zero(mode)
        }
    }))
}
