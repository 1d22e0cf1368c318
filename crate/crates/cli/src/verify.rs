//! Randomized property suites behind `cuspbend verify`.
//!
//! Each property draws its trials from a generator seeded by
//! `(seed, property name, trial index)`, so results do not depend on how
//! rayon schedules the trials.

use cuspbend::bending::{bend, iterated_bend, BendingMove, Word};
use cuspbend::cusp_classify::{
    bending_moves, bent_cusp_generators, conjugate_and_match, conjugated_generators, diagonalizable_check,
    equivalent_parameters, gamma_prime, leaf_drift, normalized_generators, standard_cusp_rep, RectangularCuspData,
};
use cuspbend::cusp_models::{h_product, hyperplane_scaling, CuspParameter, ModelDomain, ParaboloidModel};
use cuspbend::hilbert::{cross_ratio, hilbert_distance, klein_distance, UnitBall};
use cuspbend::projlin::{act, compose, inverse, projective_residual, ProjMap, ProjPoint};
use cuspbend::sample::{self, AmalgamModel, DiagonalModel};
use cuspbend::scalar::{Mode, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, RunConfig};

pub const SUITES: [&str; 5] = ["projlin", "cusp_models", "hilbert", "bending", "cusp_classify"];

/// Trials per randomized property.
pub const TRIALS: usize = 200;

/// Size of the noise added by the perturbation hook.
pub const PERTURBATION: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn run_verify(config: &RunConfig) -> Result<VerifyReport, CliError> {
    let selected: Vec<&str> = match config.suite.as_deref() {
        None => SUITES.to_vec(),
        Some(name) if SUITES.contains(&name) => vec![name],
        Some(name) => {
            return Err(CliError::Usage(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))));
        }
    };
    let max_n = config.n.unwrap_or(4);
    if !(3..=8).contains(&max_n) {
        return Err(CliError::Usage(format!("verify needs 3 <= --n <= 8, got {max_n}")));
    }
    let ctx = Ctx { seed: config.seed, max_n, perturb: config.perturb };
    let suites: Vec<SuiteResult> = selected
        .into_iter()
        .map(|name| {
            let properties = match name {
                "projlin" => projlin_suite(&ctx),
                "cusp_models" => cusp_models_suite(&ctx),
                "hilbert" => hilbert_suite(&ctx),
                "bending" => bending_suite(&ctx),
                _ => classify_suite(&ctx),
            };
            SuiteResult { name: name.to_string(), passed: properties.iter().all(|p| p.passed), properties }
        })
        .collect();
    Ok(VerifyReport { seed: config.seed, passed: suites.iter().all(|s| s.passed), suites })
}

struct Ctx {
    seed: u64,
    max_n: usize,
    perturb: bool,
}

impl Ctx {
    /// Runs `f` on independent generators and keeps the worst residual; an
    /// error or NaN counts as an infinite residual.
    fn property<F>(&self, name: &str, trials: usize, tol: f64, f: F) -> PropertyResult
    where
        F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync,
    {
        let tag = fnv1a(name.as_bytes());
        let worst = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, tag, i as u64));
                match f(&mut rng) {
                    Some(r) if !r.is_nan() => r,
                    _ => f64::INFINITY,
                }
            })
            .reduce(|| 0.0, f64::max);
        PropertyResult { name: name.to_string(), trials, max_residual: worst, tol, passed: worst <= tol }
    }

    fn dim<R: Rng>(&self, rng: &mut R, min: usize) -> usize {
        rng.gen_range(min..=self.max_n)
    }

    fn maybe_perturb<R: Rng>(&self, rng: &mut R, g: &ProjMap) -> ProjMap {
        if !self.perturb {
            return g.clone();
        }
        let rows: Vec<Vec<f64>> = g
            .to_float()
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64() + rng.gen_range(-PERTURBATION..PERTURBATION)).collect())
            .collect();
        ProjMap::from_f64_rows(&rows).unwrap_or_else(|_| g.clone())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn mix(a: u64, b: u64, c: u64) -> u64 {
    let mut z = a ^ b.rotate_left(21) ^ c.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rel(a: &ProjMap, b: &ProjMap) -> f64 {
    a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn projlin_suite(ctx: &Ctx) -> Vec<PropertyResult> {
    vec![
        ctx.property("inverse_round_trip", TRIALS, 1e-12, |rng| {
            let n = ctx.dim(rng, 1);
            let a = sample::proj_map(rng, n);
            let id = compose(&a, &inverse(&a).ok()?).ok()?;
            Some(projective_residual(ProjMap::identity(n, Mode::Float).entries(), id.entries()))
        }),
        ctx.property("exact_inverse", TRIALS, 0.0, |rng| {
            let n = ctx.dim(rng, 1);
            let rows: Vec<Vec<i64>> = (0..=n).map(|_| (0..=n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
            let Ok(a) = ProjMap::from_i64_rows(&rows) else { return Some(0.0) };
            let id = compose(&a, &inverse(&a).ok()?).ok()?;
            Some(if id.exactly_equals(&ProjMap::identity(n, Mode::Exact)) { 0.0 } else { 1.0 })
        }),
        ctx.property("action_composition", TRIALS, 1e-12, |rng| {
            let n = ctx.dim(rng, 1);
            let (a, b) = (sample::proj_map(rng, n), sample::proj_map(rng, n));
            let p = sample::proj_point(rng, n);
            let lhs = act(&compose(&a, &b).ok()?, &p).ok()?;
            let rhs = act(&a, &act(&b, &p).ok()?).ok()?;
            Some(projective_residual(lhs.coords(), rhs.coords()))
        }),
    ]
}

fn cusp_models_suite(ctx: &Ctx) -> Vec<PropertyResult> {
    vec![
        ctx.property("h_product_closure", TRIALS, 1e-12, |rng| {
            let n = ctx.dim(rng, 2);
            let t = rng.gen_range(0..n);
            let psi = sample::parameter(rng, n, t);
            let a = sample::h_element(rng, &psi).ok()?;
            let b = sample::h_element(rng, &psi).ok()?;
            let ab = h_product(&a, &b).ok()?;
            Some(rel(ab.matrix(), &compose(a.matrix(), b.matrix()).ok()?))
        }),
        ctx.property("leaf_invariance", TRIALS, 1e-9, |rng| {
            let n = ctx.dim(rng, 2);
            let t = rng.gen_range(0..n);
            let psi = sample::parameter(rng, n, t);
            let g = sample::h_element(rng, &psi).ok()?;
            let g = ctx.maybe_perturb(rng, g.matrix());
            let dom = ModelDomain::new(psi).ok()?;
            Some(leaf_drift(&dom, &[g], 1, rng).ok()?.max_residual)
        }),
        ctx.property("paraboloid_preserved", TRIALS, 0.0, |rng| {
            let n = ctx.dim(rng, 2);
            let m = ParaboloidModel::new(n);
            let v: Vec<Scalar> = (1..n).map(|_| Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
            let g = m.parabolic_element(&v).ok()?;
            let q = m.form();
            let pulled = compose(&compose(&g.transpose(), &q).ok()?, &g).ok()?;
            Some(if pulled.exactly_equals(&q) { 0.0 } else { 1.0 })
        }),
    ]
}

fn hilbert_suite(ctx: &Ctx) -> Vec<PropertyResult> {
    vec![
        ctx.property("klein_agreement", TRIALS, 1e-9, |rng| {
            let n = rng.gen_range(2..=3);
            let x = sample::ball_point(rng, n, 0.95);
            let y = sample::ball_point(rng, n, 0.95);
            let d = hilbert_distance(&UnitBall { n }, &ProjPoint::from_chart_f64(&x), &ProjPoint::from_chart_f64(&y))
                .ok()?;
            Some((d.value() - klein_distance(&x, &y).ok()?).abs())
        }),
        ctx.property("cross_ratio_invariance", TRIALS, 1e-10, |rng| {
            let n = ctx.dim(rng, 2);
            let (p, q) = (sample::proj_point(rng, n).to_f64(), sample::proj_point(rng, n).to_f64());
            let line = |t: f64| ProjPoint::from_f64(&p.iter().zip(&q).map(|(a, b)| a + t * b).collect::<Vec<_>>());
            let pts: Vec<ProjPoint> = [-1.5, 0.1, 0.7, 2.2].iter().map(|&t| line(t)).collect::<Result<_, _>>().ok()?;
            let g = sample::proj_map(rng, n);
            let moved: Vec<ProjPoint> = pts.iter().map(|x| act(&g, x)).collect::<Result<_, _>>().ok()?;
            let before = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).ok()?;
            let after = cross_ratio(&moved[0], &moved[1], &moved[2], &moved[3]).ok()?;
            Some((before - after).abs() / before.abs().max(1.0))
        }),
        ctx.property("triangle_inequality", TRIALS, 1e-9, |rng| {
            let dom = UnitBall { n: 2 };
            let pts: Vec<ProjPoint> =
                (0..3).map(|_| ProjPoint::from_chart_f64(&sample::ball_point(rng, 2, 0.9))).collect();
            let d = |a: &ProjPoint, b: &ProjPoint| hilbert_distance(&dom, a, b).map(|x| x.value());
            let excess = d(&pts[0], &pts[2]).ok()? - d(&pts[0], &pts[1]).ok()? - d(&pts[1], &pts[2]).ok()?;
            Some(excess.max(0.0))
        }),
    ]
}

fn slot_move(n: usize, slot: usize, mu: f64) -> Option<BendingMove> {
    let names: Vec<String> = (2..=n).map(|i| format!("g{i}")).collect();
    let stable = format!("g{slot}");
    let base: Vec<&str> = names.iter().filter(|m| **m != stable).map(String::as_str).collect();
    let edges = base.iter().map(|b| Word::single(b)).collect();
    let c = hyperplane_scaling(slot, &Scalar::float(mu), n).ok()?;
    Some(BendingMove::hnn(&base, &stable, edges, c))
}

fn unbent_data<R: Rng>(rng: &mut R, n: usize) -> Option<RectangularCuspData> {
    let b = (1..n).map(|_| Scalar::float(rng.gen_range(0.2..3.0))).collect();
    RectangularCuspData::new(n, b, vec![Scalar::float(0.0); n - 1]).ok()
}

fn bending_suite(ctx: &Ctx) -> Vec<PropertyResult> {
    vec![
        ctx.property("relators_after_bend", TRIALS, 1e-9, |rng| {
            let model =
                AmalgamModel::new([rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)]).ok()?;
            let mv = model.scaling_move(rng.gen_range(3..=4), rng.gen_range(0.2..5.0)).ok()?;
            let amalgam = bend(&model.rep, &mv).ok()?.relator_residual().ok()?;
            let n = ctx.dim(rng, 3);
            let rep = standard_cusp_rep(&unbent_data(rng, n)?).ok()?;
            let hnn = bend(&rep, &slot_move(n, rng.gen_range(2..=n), rng.gen_range(0.2..5.0))?).ok()?;
            Some(amalgam.max(hnn.relator_residual().ok()?))
        }),
        ctx.property("order_independence", TRIALS, 1e-12, |rng| {
            let n = ctx.dim(rng, 3);
            let i = rng.gen_range(2..=n);
            let j = loop {
                let j = rng.gen_range(2..=n);
                if j != i {
                    break j;
                }
            };
            let rep = standard_cusp_rep(&unbent_data(rng, n)?).ok()?;
            let m1 = slot_move(n, i, rng.gen_range(0.2..5.0))?;
            let m2 = slot_move(n, j, rng.gen_range(0.2..5.0))?;
            let fwd = iterated_bend(&rep, &[m1.clone(), m2.clone()]).ok()?;
            let rev = iterated_bend(&rep, &[m2, m1]).ok()?;
            fwd.generators()
                .iter()
                .map(|(k, g)| Some(projective_residual(g.entries(), rev.generators().get(k)?.entries())))
                .try_fold(0.0f64, |m, r| Some(m.max(r?)))
        }),
    ]
}

fn classify_suite(ctx: &Ctx) -> Vec<PropertyResult> {
    let b_menu = [Scalar::ratio(1, 2), Scalar::int(1), Scalar::int(3)];
    let mu_menu = [Scalar::int(2), Scalar::ratio(3, 2), Scalar::int(5)];
    vec![
        ctx.property("exact_lemma", 40, 0.0, |rng| {
            let n = ctx.dim(rng, 3).min(5);
            let t = rng.gen_range(1..n);
            let b: Vec<Scalar> = (1..n).map(|_| b_menu[rng.gen_range(0..3)].clone()).collect();
            let mu: Vec<Scalar> =
                (1..n).map(|k| if k <= t { mu_menu[rng.gen_range(0..3)].clone() } else { Scalar::int(1) }).collect();
            let data = RectangularCuspData::from_multipliers(n, b, mu).ok()?;
            let conj = conjugated_generators(&data).ok()?;
            let same = conj.iter().zip(gamma_prime(&data).ok()?).all(|(g, e)| g.exactly_equals(&e));
            Some(if same { 0.0 } else { 1.0 })
        }),
        ctx.property("type_law", TRIALS, 0.0, |rng| {
            let n = ctx.dim(rng, 2);
            let data = sample::cusp_data(rng, n);
            let c = conjugate_and_match(&data).ok()?;
            Some(if c.cusp_type == data.bent_slots().len() { 0.0 } else { 1.0 })
        }),
        ctx.property("pipeline_equivalence", TRIALS, 1e-12, |rng| {
            let n = ctx.dim(rng, 2);
            let data = sample::cusp_data(rng, n);
            let rep = standard_cusp_rep(&data).ok()?;
            let bent = iterated_bend(&rep, &bending_moves(&data).ok()?).ok()?;
            let direct = bent_cusp_generators(&data).ok()?;
            Some(
                direct
                    .iter()
                    .zip(bent.generators().values())
                    .map(|(g, h)| projective_residual(g.entries(), h.entries()))
                    .fold(0.0, f64::max),
            )
        }),
        ctx.property("leaf_invariance", TRIALS, 1e-9, |rng| {
            let n = ctx.dim(rng, 2);
            let data = sample::cusp_data(rng, n);
            let c = conjugate_and_match(&data).ok()?;
            let gens: Vec<ProjMap> =
                normalized_generators(&data, &c).ok()?.iter().map(|g| ctx.maybe_perturb(rng, g)).collect();
            let dom = ModelDomain::new(c.psi).ok()?;
            Some(leaf_drift(&dom, &gens, 4, rng).ok()?.max_residual)
        }),
        ctx.property("scaling_equivalence", TRIALS, 0.0, |rng| {
            let n = ctx.dim(rng, 2);
            let t = rng.gen_range(1..=n);
            let psi = sample::parameter(rng, n, t);
            let r = rng.gen_range(0.01..=10.0);
            let yes = equivalent_parameters(&psi, &psi.scaled(&Scalar::float(r)).ok()?, 1e-9);
            let mut other = psi.to_f64();
            other[0] *= 1.5;
            if psi.cusp_type() == 1 {
                other[1] = other[0] / 3.0;
            }
            let other = CuspParameter::from_f64(&other).ok()?;
            let no = equivalent_parameters(&psi, &other, 1e-9);
            Some(if yes && !no { 0.0 } else { 1.0 })
        }),
        ctx.property("diagonal_model", 50, 1e-9, |rng| {
            let n = ctx.dim(rng, 3);
            let psi: Vec<f64> = (1..n).map(|_| rng.gen_range(0.2..3.0)).collect();
            let model = DiagonalModel::new(n, &psi).ok()?;
            let (lambda, k) = sample::zprime_parameters(rng);
            let bent = bend(&model.rep, &model.zprime_move(lambda, k).ok()?).ok()?;
            let gens: Vec<ProjMap> = bent.generators().values().cloned().collect();
            let report = diagonalizable_check(&gens, 1e-9).ok()?;
            report.diagonalizable.then_some(report.residual)
        }),
        ctx.property("inverse_coefficient_small_s", 1, 1e-11, |_| {
            let data = RectangularCuspData::new(2, vec![Scalar::float(1.0)], vec![Scalar::float(1e-6)]).ok()?;
            let c = conjugate_and_match(&data).ok()?;
            Some(1.0 / c.psi.values()[0].to_f64())
        }),
    ]
}
