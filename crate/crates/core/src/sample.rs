//! Seeded random inputs shared by the test suites and the CLI verifier.

use indexmap::IndexMap;
use rand::Rng;

use crate::bending::{BendingMove, MarkedRep, Word};
use crate::cusp_classify::{ClassifyError, RectangularCuspData};
use crate::cusp_models::{h_element_with_logs, zprime_element, CuspGroupElement, CuspParameter, ModelError};
use crate::projlin::{ProjMap, ProjPoint};
use crate::scalar::Scalar;

/// Float parameter of type `t` in dimension `n`, entries in `[0.1, 5)`.
pub fn parameter<R: Rng + ?Sized>(rng: &mut R, n: usize, t: usize) -> CuspParameter {
    let mut v: Vec<f64> = (0..t).map(|_| rng.gen_range(0.1..5.0)).collect();
    v.resize(n, 0.0);
    CuspParameter::from_unsorted(v.into_iter().map(Scalar::float).collect()).expect("valid parameter")
}

/// Random element of `H(ψ)`; logs in `[−1, 1)`, translations in `[−2, 2)`.
pub fn h_element<R: Rng + ?Sized>(rng: &mut R, psi: &CuspParameter) -> Result<CuspGroupElement, ModelError> {
    let (n, t) = (psi.n(), psi.cusp_type());
    let log_d: Vec<Scalar> = (0..t).map(|_| Scalar::float(rng.gen_range(-1.0..1.0))).collect();
    let d: Vec<Scalar> = log_d.iter().map(Scalar::exp).collect();
    let v: Vec<Scalar> = (0..n - 1 - t).map(|_| Scalar::float(rng.gen_range(-2.0..2.0))).collect();
    h_element_with_logs(psi, &d, &log_d, &v)
}

/// Random point of the unit ball in the chart `x_{n+1} = 1`.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return x;
        }
    }
}

/// Random well-conditioned projective map: identity plus a perturbation.
pub fn proj_map<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProjMap {
    loop {
        let rows: Vec<Vec<f64>> = (0..=n)
            .map(|r| (0..=n).map(|c| if r == c { 1.0 } else { 0.0 } + rng.gen_range(-0.5..0.5)).collect())
            .collect();
        if let Ok(m) = ProjMap::from_f64_rows(&rows) {
            if m.determinant().to_f64().abs() > 0.05 {
                return m;
            }
        }
    }
}

/// Random point as homogeneous float coordinates.
pub fn proj_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProjPoint {
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    ProjPoint::from_chart_f64(&x)
}

/// Float cusp data; each slot is unbent with probability `1/3`, otherwise
/// `s ∈ [0.05, 2)`. Shapes lie in `[0.2, 3)`.
pub fn cusp_data<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RectangularCuspData {
    let b = (1..n).map(|_| Scalar::float(rng.gen_range(0.2..3.0))).collect();
    let s = (1..n)
        .map(|_| if rng.gen_bool(1.0 / 3.0) { Scalar::float(0.0) } else { Scalar::float(rng.gen_range(0.05..2.0)) })
        .collect();
    RectangularCuspData::new(n, b, s).expect("valid data")
}

/// The model type `n−1` cusp group in dimension `n` presented as an HNN
/// extension: base generators `h1, …` lie in the diagonal subgroup with
/// `ψ·log d = 0`, and the stable letter `g` has `σ > 0`.
#[derive(Clone, Debug)]
pub struct DiagonalModel {
    pub psi: CuspParameter,
    pub rep: MarkedRep,
}

impl DiagonalModel {
    /// `n ≥ 3`; `psi` holds the `n−1` positive entries.
    pub fn new(n: usize, psi: &[f64]) -> Result<Self, ClassifyError> {
        if n < 3 {
            return Err(ClassifyError::TooSmall(n));
        }
        if psi.len() != n - 1 || psi.iter().any(|&x| x <= 0.0) {
            return Err(ClassifyError::WrongLength {
                what: "positive parameter entries",
                expected: n - 1,
                actual: psi.len(),
            });
        }
        let mut full = psi.to_vec();
        full.push(0.0);
        let psi = CuspParameter::from_unsorted(full.into_iter().map(Scalar::float).collect())?;
        let p = psi.to_f64();
        let element = |log_d: Vec<f64>| {
            let logs: Vec<Scalar> = log_d.iter().map(|&x| Scalar::float(x)).collect();
            let d: Vec<Scalar> = log_d.iter().map(|&x| Scalar::float(x.exp())).collect();
            h_element_with_logs(&psi, &d, &logs, &[]).expect("type n−1 element").matrix().clone()
        };
        let mut gens = IndexMap::new();
        for j in 0..n - 2 {
            let mut l = vec![0.0; n - 1];
            l[j] = p[j + 1];
            l[j + 1] = -p[j];
            gens.insert(format!("h{}", j + 1), element(l));
        }
        let mut l = vec![0.0; n - 1];
        l[0] = -1.0;
        gens.insert("g".to_string(), element(l));
        let names: Vec<String> = gens.keys().cloned().collect();
        let mut relators = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                relators.push(Word::commutator(&names[i], &names[j]));
            }
        }
        let rep = MarkedRep::new(n, gens, relators, crate::DEFAULT_TOL)?;
        Ok(DiagonalModel { psi, rep })
    }

    pub fn base(&self) -> Vec<&str> {
        self.rep.generators().keys().filter(|k| *k != "g").map(String::as_str).collect()
    }

    /// Bending move along the base with centralizer `Z′(λ, k)`.
    pub fn zprime_move(&self, lambda: f64, k: f64) -> Result<BendingMove, ModelError> {
        let base = self.base();
        let edges = base.iter().map(|b| Word::single(b)).collect();
        let c = zprime_element(&Scalar::float(lambda), &Scalar::float(k), self.rep.n())?;
        Ok(BendingMove::hnn(&base, "g", edges, c))
    }
}

/// `(λ, k)` with `λ ∈ [0.3, 0.8] ∪ [1.25, 4]` and `|k| ∈ [0.1, 2]`, the sign
/// of `k` matching `λ − 1`. With the stable letter's `σ > 0` this keeps the
/// bent 2×2 block's eigenvalues real and distinct.
pub fn zprime_parameters<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let lambda = if rng.gen_bool(0.5) { rng.gen_range(0.3..=0.8) } else { rng.gen_range(1.25..=4.0) };
    let k: f64 = rng.gen_range(0.1..=2.0);
    (lambda, if lambda > 1.0 { k } else { -k })
}

/// Three parabolics of the rectangular cusp in dimension 4, `s = ρ₀(γ₂)`,
/// `a = ρ₀(γ₃)` and `b = ρ₀(γ₄)`, presented as the amalgam
/// `⟨a, s⟩ *_⟨s⟩ ⟨b, s⟩` with relators `[a, s]` and `[b, s]`.
#[derive(Clone, Debug)]
pub struct AmalgamModel {
    pub rep: MarkedRep,
}

impl AmalgamModel {
    pub fn new(shapes: [f64; 3]) -> Result<Self, ClassifyError> {
        let data = RectangularCuspData::new(
            4,
            shapes.iter().map(|&b| Scalar::float(b)).collect(),
            vec![Scalar::float(0.0); 3],
        )?;
        let g = crate::cusp_classify::standard_cusp_generators(&data)?;
        let mut gens = IndexMap::new();
        gens.insert("s".to_string(), g[0].clone());
        gens.insert("a".to_string(), g[1].clone());
        gens.insert("b".to_string(), g[2].clone());
        let relators = vec![Word::commutator("a", "s"), Word::commutator("b", "s")];
        Ok(AmalgamModel { rep: MarkedRep::new(4, gens, relators, crate::DEFAULT_TOL)? })
    }

    /// Conjugates `b` by a scaling of coordinate `i ∈ {3, 4}`, which
    /// centralizes `s`.
    pub fn scaling_move(&self, i: usize, mu: f64) -> Result<BendingMove, ModelError> {
        let c = crate::cusp_models::hyperplane_scaling(i, &Scalar::float(mu), 4)?;
        Ok(BendingMove::amalgam(&["a", "s"], &["b"], vec![Word::single("s")], c))
    }
}
