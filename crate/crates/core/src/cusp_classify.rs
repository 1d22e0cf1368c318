//! Bent rectangular cusps and their classification.
//!
//! A rectangular cusp of a hyperbolic manifold has holonomy generated by
//! parabolics `ρ₀(γ_i)` translating along `e_{i−1}` by `b_i`, one for each
//! coordinate `i = 2, …, n`. Bending along the hyperplane `x_i = 0` by
//! `e^{s_i}` gives `ρ_S(γ_i) = diag(…, e^{s_i}, …)·ρ₀(γ_i)`. After conjugating
//! by the normalizing matrix `A` and reordering the bent coordinates, the
//! group lands in `H(ψ)` with `ψ` holding
//!
//! ```text
//! a_i = b_i² (e^{s_i} + 1) / (2 (e^{s_i} − 1) s_i)
//! ```
//!
//! for the bent coordinates and zero for the rest.
//!
//! Slots are indexed by coordinate (`2..=n`) in errors and by position
//! (`0..n−1`) in vectors.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::bending::{commute_check, BendError, BendingMove, MarkedRep, Word};
use crate::cusp_models::{
    h_element_with_logs, hyperplane_centralizer_element, hyperplane_scaling, CuspParameter, ModelDomain, ModelError,
    ParaboloidModel,
};
use crate::projlin::{
    act, cluster_eigenvalues_with, compose, eigenvalues, right_singular_vectors, ProjEquiv, ProjError, ProjMap,
};
use crate::scalar::{Mode, Scalar};

/// Smallest float bending parameter accepted without an explicit multiplier.
pub const MIN_FLOAT_BENDING: f64 = 1e-8;

/// Allowed gap between a supplied float multiplier and `e^s`.
const MULTIPLIER_TOL: f64 = 1e-12;

/// Seed used by [`diagonalizable_check`].
const DIAGONAL_SEED: u64 = 0x5eed_d1a9;

const DIAGONAL_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("{what} has length {actual}, expected {expected}")]
    WrongLength { what: &'static str, expected: usize, actual: usize },
    #[error("shape constant b_{index} must be positive")]
    NonPositiveShape { index: usize },
    #[error("bending parameter s_{index} must be non-negative")]
    NegativeBending { index: usize },
    #[error("multiplier mu_{index} must be positive")]
    NonPositiveMultiplier { index: usize },
    #[error("multiplier mu_{index} differs from exp(s_{index})")]
    MultiplierMismatch { index: usize },
    #[error(
        "bending parameter s_{index} = {value:e} is too small for float classification; supply the multiplier exactly"
    )]
    SmallBending { index: usize, value: f64 },
    #[error("conjugated generator {index} misses the expected pattern (residual {residual:e})")]
    PatternMismatch { index: usize, residual: f64 },
    #[error("generators {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },
    #[error("generator {index} is not a bent rectangular cusp generator")]
    NotRecognized { index: usize },
    #[error("generators must share one dimension")]
    MixedDimensions,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Bend(#[from] BendError),
}

/// Shape constants and bending parameters of a rectangular cusp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CuspDataJson", into = "CuspDataJson")]
pub struct RectangularCuspData {
    n: usize,
    b: Vec<Scalar>,
    s: Vec<Scalar>,
    mu: Option<Vec<Scalar>>,
}

#[derive(Serialize, Deserialize)]
struct CuspDataJson {
    n: usize,
    b: Vec<Scalar>,
    s: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<Vec<Scalar>>,
}

impl TryFrom<CuspDataJson> for RectangularCuspData {
    type Error = ClassifyError;
    fn try_from(j: CuspDataJson) -> Result<Self, ClassifyError> {
        match j.mu {
            Some(mu) => RectangularCuspData::with_multipliers(j.n, j.b, j.s, mu),
            None => RectangularCuspData::new(j.n, j.b, j.s),
        }
    }
}

impl From<RectangularCuspData> for CuspDataJson {
    fn from(d: RectangularCuspData) -> Self {
        CuspDataJson { n: d.n, b: d.b, s: d.s, mu: d.mu }
    }
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<(), ClassifyError> {
    if expected != actual {
        return Err(ClassifyError::WrongLength { what, expected, actual });
    }
    Ok(())
}

impl RectangularCuspData {
    pub fn new(n: usize, b: Vec<Scalar>, s: Vec<Scalar>) -> Result<Self, ClassifyError> {
        if n < 2 {
            return Err(ClassifyError::TooSmall(n));
        }
        check_len("b", n - 1, b.len())?;
        check_len("s", n - 1, s.len())?;
        for (k, (bk, sk)) in b.iter().zip(&s).enumerate() {
            if !bk.is_positive() {
                return Err(ClassifyError::NonPositiveShape { index: k + 2 });
            }
            if sk.signum() < 0 {
                return Err(ClassifyError::NegativeBending { index: k + 2 });
            }
        }
        Ok(RectangularCuspData { n, b, s, mu: None })
    }

    /// Data with multipliers `μ_i = e^{s_i}` given explicitly, typically as
    /// rationals so that the conjugation can run in exact arithmetic.
    pub fn with_multipliers(n: usize, b: Vec<Scalar>, s: Vec<Scalar>, mu: Vec<Scalar>) -> Result<Self, ClassifyError> {
        let mut data = Self::new(n, b, s)?;
        check_len("mu", n - 1, mu.len())?;
        for (k, (m, sk)) in mu.iter().zip(&data.s).enumerate() {
            if !m.is_positive() {
                return Err(ClassifyError::NonPositiveMultiplier { index: k + 2 });
            }
            let consistent = match (m.is_exact(), sk.is_zero()) {
                (true, true) => m.is_one(),
                (true, false) => !m.is_one() && agrees(m, sk),
                (false, _) => agrees(m, sk),
            };
            if !consistent {
                return Err(ClassifyError::MultiplierMismatch { index: k + 2 });
            }
        }
        data.mu = Some(mu);
        Ok(data)
    }

    /// Data from shape constants and multipliers; `s_i = log μ_i`.
    pub fn from_multipliers(n: usize, b: Vec<Scalar>, mu: Vec<Scalar>) -> Result<Self, ClassifyError> {
        let s =
            mu.iter().map(|m| if m.is_exact() && m.is_one() { Scalar::zero(Mode::Exact) } else { m.ln() }).collect();
        Self::with_multipliers(n, b, s, mu)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &[Scalar] {
        &self.b
    }

    pub fn s(&self) -> &[Scalar] {
        &self.s
    }

    pub fn mu(&self) -> Option<&[Scalar]> {
        self.mu.as_deref()
    }

    pub fn slots(&self) -> usize {
        self.n - 1
    }

    /// `μ_k`, exact when supplied.
    pub fn multiplier(&self, k: usize) -> Scalar {
        match &self.mu {
            Some(mu) => mu[k].clone(),
            None => self.s[k].exp(),
        }
    }

    /// `μ_k − 1`, using `expm1` when only `s_k` is known.
    fn multiplier_m1(&self, k: usize) -> Scalar {
        match &self.mu {
            Some(mu) => &mu[k] - &Scalar::one(mu[k].mode()),
            None => self.s[k].exp_m1(),
        }
    }

    pub fn is_bent(&self, k: usize) -> bool {
        !self.s[k].is_zero()
    }

    pub fn bent_slots(&self) -> Vec<usize> {
        (0..self.slots()).filter(|&k| self.is_bent(k)).collect()
    }

    /// Mode the generators are built in.
    pub fn mode(&self) -> Mode {
        (0..self.slots()).fold(Scalar::max_mode(&self.b), |m, k| m.join(self.multiplier(k).mode()))
    }

    fn check_classifiable(&self) -> Result<(), ClassifyError> {
        if self.mu.is_some() {
            return Ok(());
        }
        for (k, s) in self.s.iter().enumerate() {
            let v = s.to_f64();
            if !s.is_zero() && v.abs() < MIN_FLOAT_BENDING {
                return Err(ClassifyError::SmallBending { index: k + 2, value: v });
            }
        }
        Ok(())
    }

    /// `a_k` for a bent slot, `None` for an unbent one.
    pub fn cusp_coefficient(&self, k: usize) -> Option<Scalar> {
        if !self.is_bent(k) {
            return None;
        }
        let mu = self.multiplier(k);
        let one = Scalar::one(mu.mode());
        let b2 = &self.b[k] * &self.b[k];
        let den = &(&Scalar::int(2) * &self.multiplier_m1(k)) * &self.s[k];
        Some(&(&b2 * &(&mu + &one)) / &den)
    }

    /// `1/a_k`, zero for an unbent slot. Uses `2 s tanh(s/2) / b²`, which
    /// stays accurate as `s → 0`.
    pub fn inverse_coefficient(&self, k: usize) -> f64 {
        let s = self.s[k].to_f64();
        let b = self.b[k].to_f64();
        2.0 * s * (0.5 * s).tanh() / (b * b)
    }

    /// The `(1, n+1)` entry of the conjugated bent generator:
    /// `−b²(μ+1) / (2(μ−1))`.
    pub fn corner(&self, k: usize) -> Scalar {
        let mu = self.multiplier(k);
        let one = Scalar::one(mu.mode());
        let b2 = &self.b[k] * &self.b[k];
        -(&(&b2 * &(&mu + &one)) / &(&Scalar::int(2) * &self.multiplier_m1(k)))
    }
}

fn agrees(mu: &Scalar, s: &Scalar) -> bool {
    let e = s.to_f64().exp();
    (mu.to_f64() - e).abs() <= MULTIPLIER_TOL * e.max(1.0)
}

/// `ρ₀(γ_i)` for `i = 2..=n`: unipotent with `b_i` at `(1,i)` and `(i,n+1)`
/// and `b_i²/2` in the corner.
pub fn standard_cusp_generators(data: &RectangularCuspData) -> Result<Vec<ProjMap>, ClassifyError> {
    let model = ParaboloidModel::new(data.n);
    (0..data.slots())
        .map(|k| {
            let v: Vec<Scalar> = (0..data.slots())
                .map(|j| if j == k { data.b[k].clone() } else { Scalar::zero(data.b[k].mode()) })
                .collect();
            Ok(model.parabolic_element(&v)?)
        })
        .collect()
}

/// `ρ_S(γ_i) = diag(1, …, μ_i, …, 1)·ρ₀(γ_i)`.
pub fn bent_cusp_generators(data: &RectangularCuspData) -> Result<Vec<ProjMap>, ClassifyError> {
    let standard = standard_cusp_generators(data)?;
    standard
        .into_iter()
        .enumerate()
        .map(|(k, g)| {
            if !data.is_bent(k) {
                return Ok(g);
            }
            let d = hyperplane_scaling(k + 2, &data.multiplier(k), data.n)?;
            Ok(compose(&d, &g)?)
        })
        .collect()
}

fn generator_name(k: usize) -> String {
    format!("g{}", k + 2)
}

/// The standard cusp group as a marked representation with its commutator
/// relators; generators are named `g2, …, gn`.
pub fn standard_cusp_rep(data: &RectangularCuspData) -> Result<MarkedRep, ClassifyError> {
    let gens = standard_cusp_generators(data)?;
    let names: Vec<String> = (0..data.slots()).map(generator_name).collect();
    let mut relators = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            relators.push(Word::commutator(&names[i], &names[j]));
        }
    }
    let generators = names.into_iter().zip(gens).collect();
    Ok(MarkedRep::new(data.n, generators, relators, crate::DEFAULT_TOL)?)
}

/// One HNN move per bent slot: stable letter `γ_i`, the other generators as
/// base and edge group, centralizer `diag(…, e^{s_i}, …)`.
pub fn bending_moves(data: &RectangularCuspData) -> Result<Vec<BendingMove>, ClassifyError> {
    let names: Vec<String> = (0..data.slots()).map(generator_name).collect();
    data.bent_slots()
        .into_iter()
        .map(|k| {
            let base: Vec<&str> = names.iter().filter(|m| **m != names[k]).map(String::as_str).collect();
            let edges = base.iter().map(|m| Word::single(m)).collect();
            let c = match data.mu {
                Some(_) => hyperplane_scaling(k + 2, &data.multiplier(k), data.n)?,
                None => hyperplane_centralizer_element(k + 2, &data.s[k], data.n)?,
            };
            Ok(BendingMove::hnn(&base, &names[k], edges, c))
        })
        .collect()
}

/// The normalizing matrix
/// `A = I + Σ_bent (−α_j E_{1j} + β_j E_{j,n+1})` with `α = b/(μ−1)` and
/// `β = μb/(μ−1)`. It fixes `e₁`, sends the `μ_j`-eigenvector `e_j + α_j e₁`
/// of each bent generator to `e_j` and is the identity on unbent coordinates.
pub fn normalizing_matrix(data: &RectangularCuspData) -> Result<ProjMap, ClassifyError> {
    normalizing_pair(data).map(|(a, _)| a)
}

/// `A` together with its inverse. `A − I` is nilpotent of order three, so
/// `A⁻¹ = I − N + N²` exactly; this avoids a float inversion that is badly
/// conditioned for small bending parameters.
pub fn normalizing_pair(data: &RectangularCuspData) -> Result<(ProjMap, ProjMap), ClassifyError> {
    data.check_classifiable()?;
    let n = data.n;
    let mode = data.mode();
    let mut alpha = vec![Scalar::zero(mode); n + 1];
    let mut beta = vec![Scalar::zero(mode); n + 1];
    let mut ab = Scalar::zero(mode);
    for k in data.bent_slots() {
        let m1 = data.multiplier_m1(k);
        let a = &data.b[k] / &m1;
        let b = &(&data.multiplier(k) * &data.b[k]) / &m1;
        ab = &ab + &(&a * &b);
        alpha[k + 1] = a;
        beta[k + 1] = b;
    }
    let build = |sign: i64, corner: &Scalar| {
        let sign = Scalar::from_int(sign, mode);
        ProjMap::from_fn_unchecked(n + 1, |r, c| {
            if r == c {
                Scalar::one(mode)
            } else if r == 0 && c == n {
                corner.clone()
            } else if r == 0 {
                -(&sign * &alpha[c])
            } else if c == n {
                &sign * &beta[r]
            } else {
                Scalar::zero(mode)
            }
        })
    };
    let a = build(1, &Scalar::zero(mode));
    let a_inv = build(-1, &-ab);
    Ok((a, a_inv))
}

/// `A·ρ_S(γ_i)·A⁻¹` for every slot.
pub fn conjugated_generators(data: &RectangularCuspData) -> Result<Vec<ProjMap>, ClassifyError> {
    let (a, a_inv) = normalizing_pair(data)?;
    bent_cusp_generators(data)?.iter().map(|g| Ok(compose(&compose(&a, g)?, &a_inv)?)).collect()
}

/// Expected shape of each conjugated generator: for a bent slot the identity
/// with `μ_i` at `(i,i)` and [`RectangularCuspData::corner`] at `(1,n+1)`;
/// for an unbent slot `ρ₀(γ_i)` unchanged.
pub fn gamma_prime(data: &RectangularCuspData) -> Result<Vec<ProjMap>, ClassifyError> {
    let standard = standard_cusp_generators(data)?;
    let mode = data.mode();
    let n = data.n;
    Ok(standard
        .into_iter()
        .enumerate()
        .map(|(k, g)| {
            if !data.is_bent(k) {
                return g;
            }
            let mu = data.multiplier(k);
            let corner = data.corner(k);
            ProjMap::from_fn_unchecked(n + 1, |r, c| {
                if r == k + 1 && c == k + 1 {
                    mu.clone()
                } else if r == c {
                    Scalar::one(mode)
                } else if r == 0 && c == n {
                    corner.clone()
                } else {
                    Scalar::zero(mode)
                }
            })
        })
        .collect())
}

/// Result of classifying a bent rectangular cusp.
#[derive(Clone, Debug)]
pub struct ClassifiedCusp {
    pub psi: CuspParameter,
    pub cusp_type: usize,
    /// `C` with `C·ρ_S(γ)·C⁻¹ ∈ H(ψ)` for every generator.
    pub conjugator: ProjMap,
    pub residual: f64,
    /// `a_i` in coordinate order, `None` for unbent slots.
    pub coefficients: Vec<Option<Scalar>>,
}

impl Serialize for ClassifiedCusp {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("ClassifiedCusp", 4)?;
        st.serialize_field("psi", self.psi.values())?;
        st.serialize_field("type", &self.cusp_type)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("conjugator", &self.conjugator)?;
        st.end()
    }
}

fn relative_gap(a: &ProjMap, b: &ProjMap) -> f64 {
    if a.exactly_equals(b) {
        return 0.0;
    }
    a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

pub fn conjugate_and_match(data: &RectangularCuspData) -> Result<ClassifiedCusp, ClassifyError> {
    conjugate_and_match_with_tol(data, crate::DEFAULT_TOL)
}

/// Conjugates by `A`, checks the `γ′` pattern, reorders the bent coordinates
/// by decreasing `a_i` and checks that every generator is the predicted
/// element of `H(ψ)`.
pub fn conjugate_and_match_with_tol(data: &RectangularCuspData, tol: f64) -> Result<ClassifiedCusp, ClassifyError> {
    let (a, a_inv) = normalizing_pair(data)?;
    let conjugated: Vec<ProjMap> =
        bent_cusp_generators(data)?.iter().map(|g| compose(&compose(&a, g)?, &a_inv)).collect::<Result<_, _>>()?;
    let expected = gamma_prime(data)?;
    let mut residual: f64 = 0.0;
    for (k, (g, e)) in conjugated.iter().zip(&expected).enumerate() {
        let r = relative_gap(g, e);
        if r > tol {
            return Err(ClassifyError::PatternMismatch { index: k + 2, residual: r });
        }
        residual = residual.max(r);
    }

    let coefficients: Vec<Option<Scalar>> = (0..data.slots()).map(|k| data.cusp_coefficient(k)).collect();
    let mut order = data.bent_slots();
    order.sort_by(|&i, &j| {
        let (ai, aj) = (coefficients[i].as_ref().unwrap().to_f64(), coefficients[j].as_ref().unwrap().to_f64());
        aj.total_cmp(&ai).then(i.cmp(&j))
    });
    let t = order.len();
    order.extend((0..data.slots()).filter(|&k| !data.is_bent(k)));

    let zero = Scalar::zero(Mode::Exact);
    let mut psi_values: Vec<Scalar> = order[..t].iter().map(|&k| coefficients[k].clone().unwrap()).collect();
    psi_values.resize(data.n, zero.clone());
    let psi = CuspParameter::new(psi_values)?;

    // P sends coordinate k+2 to coordinate position(k)+2.
    let mode = data.mode();
    let mut target = vec![0; data.n + 1];
    target[data.n] = data.n;
    for (pos, &k) in order.iter().enumerate() {
        target[k + 1] = pos + 1;
    }
    let p = ProjMap::from_fn_unchecked(
        data.n + 1,
        |r, c| {
            if target[c] == r {
                Scalar::one(mode)
            } else {
                Scalar::zero(mode)
            }
        },
    );
    let p_t = p.transpose();

    for (pos, &k) in order.iter().enumerate() {
        let g = compose(&compose(&p, &conjugated[k])?, &p_t)?;
        let one = Scalar::one(mode);
        let mut d = vec![one.clone(); t];
        let mut log_d = vec![zero.clone(); t];
        let mut v = vec![zero.clone(); data.n - 1 - t];
        if pos < t {
            d[pos] = data.multiplier(k);
            log_d[pos] = data.s[k].clone();
        } else {
            v[pos - t] = data.b[k].clone();
        }
        let h = h_element_with_logs(&psi, &d, &log_d, &v)?;
        let r = relative_gap(&g, h.matrix());
        if r > tol {
            return Err(ClassifyError::PatternMismatch { index: k + 2, residual: r });
        }
        residual = residual.max(r);
    }

    Ok(ClassifiedCusp { psi, cusp_type: t, conjugator: compose(&p, &a)?, residual, coefficients })
}

/// The conjugated generators `C·ρ_S(γ_i)·C⁻¹` as elements of `H(ψ)`.
pub fn normalized_generators(
    data: &RectangularCuspData,
    classified: &ClassifiedCusp,
) -> Result<Vec<ProjMap>, ClassifyError> {
    let (_, a_inv) = normalizing_pair(data)?;
    let p = compose(&classified.conjugator, &a_inv)?;
    let c_inv = compose(&a_inv, &p.transpose())?;
    bent_cusp_generators(data)?.iter().map(|g| Ok(compose(&compose(&classified.conjugator, g)?, &c_inv)?)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeafReport {
    pub trials: usize,
    pub max_residual: f64,
    pub failures: usize,
    pub tol: f64,
}

impl LeafReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Tolerance on leaf drift used by [`leaf_invariance_check`].
pub const LEAF_TOL: f64 = 1e-9;

/// Checks that the classified generators preserve each leaf of `Ω(ψ)`.
pub fn leaf_invariance_check<R: Rng + ?Sized>(
    data: &RectangularCuspData,
    trials: usize,
    rng: &mut R,
) -> Result<LeafReport, ClassifyError> {
    let classified = conjugate_and_match(data)?;
    let gens = normalized_generators(data, &classified)?;
    let dom = ModelDomain::new(classified.psi.clone())?;
    leaf_drift(&dom, &gens, trials, rng)
}

/// Moves random points of random leaves by random generators and records
/// `|c(g·p) − c(p)|`, relative to the largest first chart coordinate
/// involved (the leaf coordinate is a difference of terms of that size).
pub fn leaf_drift<R: Rng + ?Sized>(
    dom: &ModelDomain,
    gens: &[ProjMap],
    trials: usize,
    rng: &mut R,
) -> Result<LeafReport, ClassifyError> {
    let n = dom.n();
    let t = dom.cusp_type();
    let gens: Vec<ProjMap> = gens.iter().map(ProjMap::to_float).collect();
    let mut report = LeafReport { trials, max_residual: 0.0, failures: 0, tol: LEAF_TOL };
    if gens.is_empty() {
        return Ok(report);
    }
    for _ in 0..trials {
        let c: f64 = rng.gen_range(0.0..3.0);
        let rest: Vec<Scalar> = (0..n - 1)
            .map(|j| {
                let x = if j < t { rng.gen_range(-1.0f64..1.0).exp() } else { rng.gen_range(-2.0..2.0) };
                Scalar::float(x)
            })
            .collect();
        let p = dom.leaf_point(&Scalar::float(c), &rest)?;
        let g = &gens[rng.gen_range(0..gens.len())];
        let q = act(g, &p)?;
        let scale = [&p, &q].iter().filter_map(|pt| pt.chart_f64()).fold(c.max(1.0), |m, x| m.max(x[0].abs()));
        let residual = match dom.leaf_coordinate(&q, LEAF_TOL) {
            Ok(lc) => (lc.value.to_f64() - c).abs() / scale,
            Err(_) => f64::INFINITY,
        };
        report.max_residual = report.max_residual.max(residual);
        if residual.is_nan() || residual > LEAF_TOL {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// `Some(r)` with `ψ′ = rψ` and `r > 0`, else `None`. Exact when both are
/// exact; float parameters are compared after normalizing to unit sum.
pub fn scaling_ratio(psi: &CuspParameter, psi2: &CuspParameter, tol: f64) -> Option<Scalar> {
    if psi.n() != psi2.n() {
        return None;
    }
    let (a, b) = (psi.values(), psi2.values());
    if psi.mode() == Mode::Exact && psi2.mode() == Mode::Exact {
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            return b.iter().all(Scalar::is_zero).then(|| Scalar::int(1));
        };
        let r = &b[k] / &a[k];
        if !r.is_positive() {
            return None;
        }
        return a.iter().zip(b).all(|(x, y)| &(&r * x) == y).then_some(r);
    }
    let (sa, sb): (f64, f64) = (a.iter().map(Scalar::to_f64).sum(), b.iter().map(Scalar::to_f64).sum());
    match (sa > 0.0, sb > 0.0) {
        (false, false) => return Some(Scalar::float(1.0)),
        (true, true) => {}
        _ => return None,
    }
    let close = a.iter().zip(b).all(|(x, y)| (x.to_f64() / sa - y.to_f64() / sb).abs() <= tol);
    close.then(|| Scalar::float(sb / sa))
}

pub fn equivalent_parameters(psi: &CuspParameter, psi2: &CuspParameter, tol: f64) -> bool {
    scaling_ratio(psi, psi2, tol).is_some()
}

/// Outcome of the common-flag search.
#[derive(Clone, Debug)]
pub enum Triangularization {
    /// `conjugator · g · conjugator⁻¹` is upper triangular for every `g`.
    Triangular { conjugator: ProjMap, residual: f64 },
    /// No common real eigenvector exists on the quotient of this dimension.
    NotTriangularizable { dim: usize },
    /// A candidate eigenvector sat between the null and non-null thresholds,
    /// or the assembled flag failed verification.
    Ambiguous { dim: usize, margin: f64 },
}

impl Triangularization {
    pub fn is_triangular(&self) -> bool {
        matches!(self, Triangularization::Triangular { .. })
    }
}

fn normalized_float(gens: &[ProjMap]) -> Result<Vec<DMatrix<f64>>, ClassifyError> {
    let Some(first) = gens.first() else { return Ok(Vec::new()) };
    if gens.iter().any(|g| g.dim() != first.dim()) {
        return Err(ClassifyError::MixedDimensions);
    }
    Ok(gens
        .iter()
        .map(|g| {
            let m = g.to_dmatrix();
            let s = m.amax();
            m / s
        })
        .collect())
}

/// Real eigenvalue candidates, clustered loosely so that perturbed Jordan
/// blocks collapse to one value, ordered by distance to `near`.
fn real_candidates(m: &DMatrix<f64>, near: f64) -> Result<Vec<f64>, ClassifyError> {
    const LOOSE: f64 = 1e-3;
    let values = eigenvalues(m)?;
    let mut out: Vec<f64> = cluster_eigenvalues_with(&values, LOOSE)
        .into_iter()
        .filter(|(z, _)| z.im.abs() <= LOOSE * z.norm().max(1.0))
        .map(|(z, _): (Complex64, usize)| z.re)
        .collect();
    out.sort_by(|a, b| (a - near).abs().total_cmp(&(b - near).abs()));
    Ok(out)
}

enum Search {
    Found(DMatrix<f64>),
    Missing { margin: Option<f64> },
}

/// Depth-first search for a common eigenspace: intersects the running
/// subspace with one eigenspace per generator.
fn common_eigenspace(gens: &[DMatrix<f64>], tol: f64) -> Result<Search, ClassifyError> {
    let m = gens[0].nrows();
    let mut margin = None;
    let found = dfs(gens, 0, DMatrix::identity(m, m), tol, &mut margin)?;
    Ok(match found {
        Some(b) => Search::Found(b),
        None => Search::Missing { margin },
    })
}

fn dfs(
    gens: &[DMatrix<f64>],
    idx: usize,
    basis: DMatrix<f64>,
    tol: f64,
    margin: &mut Option<f64>,
) -> Result<Option<DMatrix<f64>>, ClassifyError> {
    let Some(g) = gens.get(idx) else { return Ok(Some(basis)) };
    let m = g.nrows();
    let scale = g.norm().max(1.0);
    for lambda in real_candidates(g, g[(0, 0)])? {
        let shifted = (g - DMatrix::identity(m, m) * lambda) * &basis;
        let (sigmas, vecs) = right_singular_vectors(&shifted);
        let null: Vec<DVector<f64>> =
            sigmas.iter().zip(&vecs).filter(|(s, _)| **s <= tol * scale).map(|(_, v)| v.clone()).collect();
        for s in &sigmas {
            let rel = s / scale;
            if rel > tol && rel <= tol.sqrt() {
                *margin = Some(margin.map_or(rel, |m: f64| m.min(rel)));
            }
        }
        if null.is_empty() {
            continue;
        }
        let y = DMatrix::from_columns(&null);
        if let Some(b) = dfs(gens, idx + 1, &basis * y, tol, margin)? {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

/// Orthogonal `Q` with `Q e₁ = v` for a unit vector `v`.
fn householder_to(v: &DVector<f64>) -> DMatrix<f64> {
    let m = v.len();
    let mut u = v.clone();
    u[0] -= 1.0;
    let norm = u.norm();
    if norm < 1e-15 {
        return DMatrix::identity(m, m);
    }
    u /= norm;
    DMatrix::identity(m, m) - &u * u.transpose() * 2.0
}

enum FlagFailure {
    Missing { dim: usize, margin: Option<f64> },
}

fn flag_basis(gens: &[DMatrix<f64>], tol: f64) -> Result<Result<DMatrix<f64>, FlagFailure>, ClassifyError> {
    let m = gens[0].nrows();
    if m == 1 {
        return Ok(Ok(DMatrix::identity(1, 1)));
    }
    let space = match common_eigenspace(gens, tol)? {
        Search::Found(b) => b,
        Search::Missing { margin } => return Ok(Err(FlagFailure::Missing { dim: m, margin })),
    };
    // Prefer the vector of the common eigenspace closest to e₁.
    let proj = &space * space.row(0).transpose();
    let mut v = if proj.norm() > 1e-3 { proj } else { space.column(0).into_owned() };
    v /= v.norm();
    let big = v.iamax();
    if v[big] < 0.0 {
        v = -v;
    }
    let q1 = householder_to(&v);
    let quotient: Vec<DMatrix<f64>> =
        gens.iter().map(|g| (q1.transpose() * g * &q1).view((1, 1), (m - 1, m - 1)).into_owned()).collect();
    let q2 = match flag_basis(&quotient, tol)? {
        Ok(q) => q,
        Err(e) => return Ok(Err(e)),
    };
    let mut block = DMatrix::identity(m, m);
    block.view_mut((1, 1), (m - 1, m - 1)).copy_from(&q2);
    Ok(Ok(q1 * block))
}

fn lower_residual(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in c + 1..m.nrows() {
            worst = worst.max(m[(r, c)].abs());
        }
    }
    worst / scale
}

/// Searches for a common invariant flag: a common eigenvector, then the same
/// on the quotient, recursively.
pub fn upper_triangular_check(gens: &[ProjMap], tol: f64) -> Result<Triangularization, ClassifyError> {
    let mats = normalized_float(gens)?;
    let Some(first) = mats.first() else {
        return Ok(Triangularization::Triangular { conjugator: ProjMap::identity(0, Mode::Float), residual: 0.0 });
    };
    let m = first.nrows();
    let q = match flag_basis(&mats, tol)? {
        Ok(q) => q,
        Err(FlagFailure::Missing { dim, margin: Some(margin) }) => {
            return Ok(Triangularization::Ambiguous { dim, margin });
        }
        Err(FlagFailure::Missing { dim, margin: None }) => {
            return Ok(Triangularization::NotTriangularizable { dim });
        }
    };
    let c = q.transpose();
    let residual = mats.iter().map(|g| lower_residual(&(&c * g * &q))).fold(0.0, f64::max);
    if residual > tol.sqrt() {
        return Ok(Triangularization::Ambiguous { dim: m, margin: residual });
    }
    Ok(Triangularization::Triangular { conjugator: ProjMap::from_dmatrix(&c)?, residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalReport {
    pub diagonalizable: bool,
    /// `C` with `C·g·C⁻¹` diagonal, when found.
    pub conjugator: Option<ProjMap>,
    pub residual: f64,
    pub attempts: usize,
}

pub fn diagonalizable_check(gens: &[ProjMap], tol: f64) -> Result<DiagonalReport, ClassifyError> {
    diagonalizable_check_with(gens, tol, &mut ChaCha8Rng::seed_from_u64(DIAGONAL_SEED))
}

/// Simultaneous diagonalization over the reals through the eigenbasis of a
/// random combination of the generators, verified by explicit conjugation.
pub fn diagonalizable_check_with<R: Rng + ?Sized>(
    gens: &[ProjMap],
    tol: f64,
    rng: &mut R,
) -> Result<DiagonalReport, ClassifyError> {
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate().skip(i + 1) {
            if !commute_check(a, b, tol)? {
                return Err(ClassifyError::NonCommuting { first: i, second: j });
            }
        }
    }
    let mats = normalized_float(gens)?;
    let Some(first) = mats.first() else {
        return Ok(DiagonalReport { diagonalizable: true, conjugator: None, residual: 0.0, attempts: 0 });
    };
    let m = first.nrows();
    let mut best = f64::INFINITY;
    for attempt in 1..=DIAGONAL_ATTEMPTS {
        let combo = mats.iter().fold(DMatrix::zeros(m, m), |acc, g| acc + g * rng.gen_range(-1.0..1.0));
        let Some(p) = eigenbasis(&combo)? else { continue };
        let Some(p_inv) = p.clone().try_inverse() else { continue };
        let residual = mats.iter().map(|g| off_diagonal(&(&p_inv * g * &p))).fold(0.0, f64::max);
        best = best.min(residual);
        if residual <= tol {
            return Ok(DiagonalReport {
                diagonalizable: true,
                conjugator: Some(ProjMap::from_dmatrix(&p_inv)?),
                residual,
                attempts: attempt,
            });
        }
    }
    Ok(DiagonalReport { diagonalizable: false, conjugator: None, residual: best, attempts: DIAGONAL_ATTEMPTS })
}

/// Columns spanning every real eigenspace, when geometric and algebraic
/// multiplicities agree.
fn eigenbasis(m: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>, ClassifyError> {
    const REAL_TOL: f64 = 1e-6;
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for (z, mult) in cluster_eigenvalues_with(&eigenvalues(m)?, REAL_TOL) {
        if z.im.abs() > REAL_TOL * z.norm().max(1.0) {
            return Ok(None);
        }
        let shifted = m - DMatrix::identity(n, n) * z.re;
        let (sigmas, vecs) = right_singular_vectors(&shifted);
        let null: Vec<DVector<f64>> =
            sigmas.iter().zip(vecs).filter(|(s, _)| **s <= REAL_TOL * scale).map(|(_, v)| v).collect();
        if null.len() != mult {
            return Ok(None);
        }
        cols.extend(null);
    }
    Ok((cols.len() == n).then(|| DMatrix::from_columns(&cols)))
}

fn off_diagonal(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c {
                worst = worst.max(m[(r, c)].abs());
            }
        }
    }
    worst / scale
}

/// Reads shape constants and multipliers back from bent generators given in
/// coordinate order, up to projective scaling.
pub fn recognize_rectangular(gens: &[ProjMap], tol: f64) -> Result<RectangularCuspData, ClassifyError> {
    let first = gens.first().ok_or(ClassifyError::TooSmall(1))?;
    let n = first.dim();
    check_len("generators", n.saturating_sub(1), gens.len())?;
    if gens.iter().any(|g| g.dim() != n) {
        return Err(ClassifyError::MixedDimensions);
    }
    let mut b = Vec::with_capacity(n - 1);
    let mut mu = Vec::with_capacity(n - 1);
    for (k, g) in gens.iter().enumerate() {
        let lead = g.get(0, 0);
        if lead.is_zero() {
            return Err(ClassifyError::NotRecognized { index: k + 2 });
        }
        b.push(g.get(0, k + 1) / lead);
        mu.push(g.get(k + 1, k + 1) / lead);
    }
    let mu = mu
        .into_iter()
        .map(|m| match m {
            Scalar::Float(x) if (x - 1.0).abs() <= f64::EPSILON => Scalar::float(1.0),
            other => other,
        })
        .collect();
    let data = RectangularCuspData::from_multipliers(n, b, mu).map_err(|e| match e {
        ClassifyError::NonPositiveShape { index } | ClassifyError::NonPositiveMultiplier { index } => {
            ClassifyError::NotRecognized { index }
        }
        other => other,
    })?;
    for (k, (g, e)) in gens.iter().zip(bent_cusp_generators(&data)?).enumerate() {
        if !g.proj_equiv(&e, tol) {
            return Err(ClassifyError::NotRecognized { index: k + 2 });
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bending::iterated_bend;
    use crate::cusp_models::zprime_element;
    use crate::projlin::ProjPoint;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn exact_data(b: &[Scalar], mu: &[Scalar]) -> RectangularCuspData {
        RectangularCuspData::from_multipliers(b.len() + 1, b.to_vec(), mu.to_vec()).unwrap()
    }

    #[test]
    fn data_validation() {
        let one = Scalar::int(1);
        assert!(RectangularCuspData::new(3, vec![one.clone(), Scalar::int(0)], vec![one.clone(), one.clone()]).is_err());
        assert!(RectangularCuspData::new(3, vec![one.clone(); 2], vec![Scalar::int(-1), one.clone()]).is_err());
        assert!(RectangularCuspData::new(3, vec![one.clone(); 3], vec![one.clone(); 2]).is_err());
        let s = vec![Scalar::float(2f64.ln()), Scalar::zero(Mode::Exact)];
        let ok = RectangularCuspData::with_multipliers(
            3,
            vec![one.clone(); 2],
            s.clone(),
            vec![Scalar::int(2), one.clone()],
        );
        assert!(ok.is_ok());
        let bad = RectangularCuspData::with_multipliers(3, vec![one.clone(); 2], s, vec![Scalar::int(3), one.clone()]);
        assert_eq!(bad.unwrap_err(), ClassifyError::MultiplierMismatch { index: 2 });
    }

    #[test]
    fn standard_generators_example() {
        let data = exact_data(&[Scalar::int(1), Scalar::int(1)], &[Scalar::int(1), Scalar::int(1)]);
        let gens = standard_cusp_generators(&data).unwrap();
        let expected = ProjMap::from_rows(vec![
            vec![q(1, 1), q(1, 1), q(0, 1), q(1, 2)],
            vec![q(0, 1), q(1, 1), q(0, 1), q(1, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
        ])
        .unwrap();
        assert!(gens[0].exactly_equals(&expected));
        let ab = compose(&gens[0], &gens[1]).unwrap();
        let ba = compose(&gens[1], &gens[0]).unwrap();
        assert!(ab.exactly_equals(&ba));
    }

    #[test]
    fn unbent_data_is_trivial() {
        let data = exact_data(&[Scalar::int(2), Scalar::int(3)], &[Scalar::int(1), Scalar::int(1)]);
        let std = standard_cusp_generators(&data).unwrap();
        let bent = bent_cusp_generators(&data).unwrap();
        assert!(std.iter().zip(&bent).all(|(a, b)| a.exactly_equals(b)));
        let a = normalizing_matrix(&data).unwrap();
        assert!(a.exactly_equals(&ProjMap::identity(3, Mode::Exact)));
        let c = conjugate_and_match(&data).unwrap();
        assert_eq!(c.cusp_type, 0);
        assert!(c.psi.values().iter().all(Scalar::is_zero));
        assert!(c.conjugator.exactly_equals(&ProjMap::identity(3, Mode::Exact)));
    }

    #[test]
    fn normalizing_matrix_example() {
        let data = exact_data(&[Scalar::int(1), Scalar::int(1)], &[Scalar::int(2), Scalar::int(1)]);
        let (a, a_inv) = normalizing_pair(&data).unwrap();
        assert_eq!(*a.at(1, 2), Scalar::int(-1));
        assert_eq!(*a.at(2, 4), Scalar::int(2));
        assert!(compose(&a, &a_inv).unwrap().exactly_equals(&ProjMap::identity(3, Mode::Exact)));
        // the μ-eigenvector e₂ + α e₁ goes to e₂
        let eig = ProjPoint::new(vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let bent = &bent_cusp_generators(&data).unwrap()[0];
        let moved = act(bent, &eig).unwrap();
        assert!(moved.proj_equiv(&eig, 0.0));
        assert!(act(&a, &eig).unwrap().proj_equiv(&ProjPoint::basis(3, 2, Mode::Exact), 0.0));
        assert!(act(&a, &ProjPoint::basis(3, 1, Mode::Exact))
            .unwrap()
            .proj_equiv(&ProjPoint::basis(3, 1, Mode::Exact), 0.0));
    }

    #[test]
    fn bent_eigenvalues() {
        let data = RectangularCuspData::new(
            3,
            vec![Scalar::float(1.3), Scalar::float(0.7)],
            vec![Scalar::float(0.8), Scalar::float(0.0)],
        )
        .unwrap();
        let g = &bent_cusp_generators(&data).unwrap()[0];
        let vals: Vec<f64> = crate::projlin::eigen(g).unwrap().iter().map(|e| e.value.re).collect();
        assert!((vals[0] - 0.8f64.exp()).abs() < 1e-9);
        assert!(vals[1..].iter().all(|v| (v - 1.0).abs() < 1e-4));
    }

    #[test]
    fn exact_lemma_example() {
        let data = exact_data(&[Scalar::int(1), Scalar::int(1)], &[Scalar::int(2), Scalar::int(1)]);
        let conj = conjugated_generators(&data).unwrap();
        let expected = gamma_prime(&data).unwrap();
        assert!(conj[0].exactly_equals(&expected[0]));
        assert_eq!(*conj[0].at(1, 4), q(-3, 2));
        assert!(conj[1].exactly_equals(&standard_cusp_generators(&data).unwrap()[1]));
        let c = conjugate_and_match(&data).unwrap();
        assert_eq!(c.cusp_type, 1);
        let a = c.psi.values()[0].to_f64();
        assert!((a - 3.0 / (2.0 * 2f64.ln())).abs() < 1e-12);
        assert!((a - 2.164_043).abs() < 1e-6);
    }

    #[test]
    fn float_classification_sorts_slots() {
        let data = RectangularCuspData::new(
            4,
            vec![Scalar::float(0.5), Scalar::float(2.0), Scalar::float(1.0)],
            vec![Scalar::float(1.0), Scalar::float(0.0), Scalar::float(0.3)],
        )
        .unwrap();
        let c = conjugate_and_match(&data).unwrap();
        assert_eq!(c.cusp_type, 2);
        let psi = c.psi.to_f64();
        assert!(psi[0] >= psi[1] && psi[1] > 0.0 && psi[2] == 0.0 && psi[3] == 0.0);
        assert!((psi[0] - data.cusp_coefficient(2).unwrap().to_f64()).abs() < 1e-12);
        assert!(c.residual < 1e-12);
        let gens = normalized_generators(&data, &c).unwrap();
        for g in &gens {
            assert!(g.is_upper_triangular(1e-12));
        }
    }

    #[test]
    fn small_bending_needs_multiplier() {
        let data =
            RectangularCuspData::new(3, vec![Scalar::float(1.0); 2], vec![Scalar::float(1e-9), Scalar::float(0.0)])
                .unwrap();
        assert!(matches!(conjugate_and_match(&data), Err(ClassifyError::SmallBending { index: 2, .. })));
        let tiny =
            RectangularCuspData::new(3, vec![Scalar::float(1.0); 2], vec![Scalar::float(1e-6), Scalar::float(0.0)])
                .unwrap();
        let c = conjugate_and_match(&tiny).unwrap();
        assert_eq!(c.cusp_type, 1);
        assert!(tiny.inverse_coefficient(0) <= 1e-11);
        let a = c.psi.values()[0].to_f64();
        assert!((1.0 / a - tiny.inverse_coefficient(0)).abs() < 1e-20);
    }

    #[test]
    fn pipeline_matches_bending() {
        let data = RectangularCuspData::new(
            3,
            vec![Scalar::float(1.5), Scalar::float(0.5)],
            vec![Scalar::float(0.4), Scalar::float(1.1)],
        )
        .unwrap();
        let rep = standard_cusp_rep(&data).unwrap();
        let bent = iterated_bend(&rep, &bending_moves(&data).unwrap()).unwrap();
        for (k, g) in bent_cusp_generators(&data).unwrap().iter().enumerate() {
            assert!(g.proj_equiv(&bent.generators()[k], 1e-12));
        }
    }

    #[test]
    fn leaf_invariance_examples() {
        let data = RectangularCuspData::new(
            4,
            vec![Scalar::float(1.0), Scalar::float(0.6), Scalar::float(2.0)],
            vec![Scalar::float(0.9), Scalar::float(0.0), Scalar::float(0.2)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = leaf_invariance_check(&data, 200, &mut rng).unwrap();
        assert!(report.passed(), "{report:?}");
        let dom = ModelDomain::new(CuspParameter::from_f64(&[1.0, 0.0]).unwrap()).unwrap();
        let id = ProjMap::identity(2, Mode::Float);
        let r = leaf_drift(&dom, &[id], 20, &mut rng).unwrap();
        assert!(r.max_residual < 1e-14);
    }

    #[test]
    fn equivalence_examples() {
        let p = |v: &[i64]| CuspParameter::new(v.iter().map(|&x| Scalar::int(x)).collect()).unwrap();
        assert_eq!(scaling_ratio(&p(&[2, 1, 0]), &p(&[4, 2, 0]), 0.0), Some(Scalar::int(2)));
        assert_eq!(scaling_ratio(&p(&[2, 1, 0]), &p(&[2, 1, 0]), 0.0), Some(Scalar::int(1)));
        assert!(!equivalent_parameters(&p(&[2, 1, 0]), &p(&[2, 2, 0]), 1e-9));
        assert!(!equivalent_parameters(&p(&[2, 1, 0]), &p(&[0, 0, 0]), 1e-9));
        assert!(equivalent_parameters(&p(&[0, 0]), &p(&[0, 0]), 1e-9));
        let f = CuspParameter::from_f64(&[3.0, 1.5, 0.0]).unwrap();
        let r = scaling_ratio(&p(&[2, 1, 0]), &f, 1e-12).unwrap();
        assert!((r.to_f64() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn triangular_examples() {
        let psi = CuspParameter::from_f64(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let g1 = h_element_with_logs(
            &psi,
            &[Scalar::float(2.0)],
            &[Scalar::float(2f64.ln())],
            &[Scalar::float(0.3), Scalar::float(-1.0)],
        )
        .unwrap();
        let g2 = h_element_with_logs(
            &psi,
            &[Scalar::float(1.0)],
            &[Scalar::float(0.0)],
            &[Scalar::float(1.0), Scalar::float(0.5)],
        )
        .unwrap();
        let gens = vec![g1.matrix().clone(), g2.matrix().clone()];
        match upper_triangular_check(&gens, 1e-9).unwrap() {
            Triangularization::Triangular { conjugator, residual } => {
                assert!(residual <= 1e-12);
                assert!(conjugator.max_diff(&ProjMap::identity(4, Mode::Float)) < 1e-12);
            }
            other => panic!("{other:?}"),
        }

        let data = RectangularCuspData::new(
            3,
            vec![Scalar::float(1.0), Scalar::float(0.5)],
            vec![Scalar::float(0.7), Scalar::float(0.2)],
        )
        .unwrap();
        let bent = bent_cusp_generators(&data).unwrap();
        match upper_triangular_check(&bent, 1e-9).unwrap() {
            Triangularization::Triangular { conjugator, residual } => {
                assert!(residual <= 1e-9);
                for g in &bent {
                    let c = crate::projlin::conjugate(&conjugator, g).unwrap();
                    assert!(c.lower_residual() <= 1e-9);
                }
            }
            other => panic!("{other:?}"),
        }

        let (c, s) = (1f64.cos(), 1f64.sin());
        let rot_xy = ProjMap::from_f64_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let rot_yz = ProjMap::from_f64_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c, -s], vec![0.0, s, c]]).unwrap();
        assert!(matches!(
            upper_triangular_check(&[rot_xy, rot_yz], 1e-9).unwrap(),
            Triangularization::NotTriangularizable { dim: 3 }
        ));
    }

    #[test]
    fn diagonal_examples() {
        let d1 = ProjMap::diagonal(&[Scalar::float(1.0), Scalar::float(2.0), Scalar::float(3.0)]).unwrap();
        let d2 = ProjMap::diagonal(&[Scalar::float(5.0), Scalar::float(1.0), Scalar::float(1.0)]).unwrap();
        assert!(diagonalizable_check(&[d1, d2], 1e-9).unwrap().diagonalizable);

        let para = ParaboloidModel::new(2).parabolic_element(&[Scalar::float(1.0)]).unwrap();
        assert!(!diagonalizable_check(std::slice::from_ref(&para), 1e-9).unwrap().diagonalizable);

        let swap = ProjMap::from_f64_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(
            diagonalizable_check(&[para, swap], 1e-9),
            Err(ClassifyError::NonCommuting { first: 0, second: 1 })
        ));

        // a type-1 element in dimension 2 bent by Z′
        let psi = CuspParameter::from_f64(&[1.0, 0.0]).unwrap();
        let g = h_element_with_logs(&psi, &[Scalar::float(0.5)], &[Scalar::float(0.5f64.ln())], &[]).unwrap();
        let z = zprime_element(&Scalar::float(2.0), &Scalar::float(1.0), 2).unwrap();
        let bent = compose(&z, g.matrix()).unwrap();
        let r = diagonalizable_check(std::slice::from_ref(&bent), 1e-9).unwrap();
        assert!(r.diagonalizable && r.residual <= 1e-9);
        let c = r.conjugator.unwrap();
        let diag = crate::projlin::conjugate(&c, &bent).unwrap();
        assert!(diag.off_diagonal_residual() <= 1e-9);
        assert!(!diagonalizable_check(&[g.matrix().clone()], 1e-9).unwrap().diagonalizable);
    }

    #[test]
    fn recognize_round_trip() {
        let data = exact_data(&[q(1, 2), Scalar::int(3)], &[Scalar::int(5), Scalar::int(1)]);
        let gens: Vec<ProjMap> =
            bent_cusp_generators(&data).unwrap().iter().map(|g| g.scale(&Scalar::int(7))).collect();
        let back = recognize_rectangular(&gens, 0.0).unwrap();
        assert_eq!(back.b(), data.b());
        assert_eq!(back.mu(), data.mu());
        let c = conjugate_and_match(&back).unwrap();
        assert_eq!(c.cusp_type, 1);
        let wrong = vec![ProjMap::identity(3, Mode::Exact), ProjMap::identity(3, Mode::Exact)];
        assert!(recognize_rectangular(&wrong, 0.0).is_err());
    }

    #[test]
    fn json_shapes() {
        let data = exact_data(&[Scalar::int(1), Scalar::int(1)], &[Scalar::int(2), Scalar::int(1)]);
        let c = conjugate_and_match(&data).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["type"], 1);
        assert!(v["psi"].is_array() && v["conjugator"].is_array() && v["residual"].is_number());
        let round: RectangularCuspData = serde_json::from_str(&serde_json::to_string(&data).unwrap()).unwrap();
        assert_eq!(round, data);
        let parsed: RectangularCuspData = serde_json::from_str(r#"{"n":3,"b":[1,1],"s":[0.5,0]}"#).unwrap();
        assert_eq!(parsed.bent_slots(), vec![0]);
    }
}
