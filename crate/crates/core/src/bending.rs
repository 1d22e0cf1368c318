//! Bending of marked representations.
//!
//! A representation is given on a finite named generating set. A bending move
//! splits the generators along a decomposition of the group and deforms them
//! by an element `c` that centralizes the image of the edge subgroup:
//!
//! - amalgam `Γ₁ *_S Γ₂`: generators of `Γ₁` are kept, generators of `Γ₂`
//!   are conjugated to `c·g·c⁻¹`;
//! - HNN extension with base `Γ′` and stable letter `g`: the base is kept and
//!   `g` becomes `c·g`.
//!
//! Several moves whose centralizing elements pairwise commute can be applied
//! in any order with the same result ([`iterated_bend`]).
//!
//! The edge subgroup is carried as a list of words and is only used for the
//! centralizing check; nothing verifies that it generates the actual edge group.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::projlin::{compose, inverse, projective_residual, ProjEquiv, ProjError, ProjMap};
use crate::scalar::{Mode, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BendError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("generator {0:?} appears more than once in the decomposition")]
    DuplicateGenerator(String),
    #[error("generator {0:?} is not covered by the decomposition")]
    UncoveredGenerator(String),
    #[error("generator {name:?} has dimension {found}, expected {expected}")]
    GeneratorDimension { name: String, expected: usize, found: usize },
    #[error("cannot parse word letter {0:?}")]
    BadLetter(String),
    #[error("relator {index} does not evaluate to the identity (residual {residual:e})")]
    RelatorViolated { index: usize, residual: f64 },
    #[error("centralizer does not commute with the image of edge word {index}")]
    NotCentralizing { index: usize },
    #[error(
        "centralizers of moves {first} and {second} do not commute; iterated bending needs commuting centralizers"
    )]
    NonCommuting { first: usize, second: usize },
    #[error("bending in a different order changed generator {0:?}")]
    OrderDependent(String),
    #[error(transparent)]
    Proj(#[from] ProjError),
}

/// A generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub name: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(name: impl Into<String>) -> Self {
        Letter { name: name.into(), inverse: false }
    }

    pub fn inv(name: impl Into<String>) -> Self {
        Letter { name: name.into(), inverse: true }
    }
}

impl FromStr for Letter {
    type Err = BendError;

    /// `a`, `a^1` or `a^-1`.
    fn from_str(s: &str) -> Result<Self, BendError> {
        let bad = || BendError::BadLetter(s.to_string());
        let (name, inverse) = match s.split_once('^') {
            None => (s, false),
            Some((n, "-1")) => (n, true),
            Some((n, "1")) => (n, false),
            Some(_) => return Err(bad()),
        };
        if name.is_empty() {
            return Err(bad());
        }
        Ok(Letter { name: name.to_string(), inverse })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// A word in the generators, read left to right as a matrix product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn parse<S: AsRef<str>>(letters: &[S]) -> Result<Self, BendError> {
        letters.iter().map(|s| s.as_ref().parse()).collect::<Result<Vec<_>, _>>().map(Word)
    }

    pub fn single(name: &str) -> Self {
        Word(vec![Letter::new(name)])
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &str, b: &str) -> Self {
        Word(vec![Letter::new(a), Letter::new(b), Letter::inv(a), Letter::inv(b)])
    }
}

impl TryFrom<Vec<String>> for Word {
    type Error = BendError;
    fn try_from(v: Vec<String>) -> Result<Self, BendError> {
        Word::parse(&v)
    }
}

impl From<Word> for Vec<String> {
    fn from(w: Word) -> Self {
        w.0.iter().map(Letter::to_string).collect()
    }
}

/// A representation given on named generators, with optional relators.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MarkedRepJson", into = "MarkedRepJson")]
pub struct MarkedRep {
    n: usize,
    generators: IndexMap<String, ProjMap>,
    relators: Vec<Word>,
}

#[derive(Serialize, Deserialize)]
struct MarkedRepJson {
    n: usize,
    generators: IndexMap<String, ProjMap>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    relators: Vec<Word>,
}

impl TryFrom<MarkedRepJson> for MarkedRep {
    type Error = BendError;
    fn try_from(j: MarkedRepJson) -> Result<Self, BendError> {
        MarkedRep::new(j.n, j.generators, j.relators, DEFAULT_TOL)
    }
}

impl From<MarkedRep> for MarkedRepJson {
    fn from(r: MarkedRep) -> Self {
        MarkedRepJson { n: r.n, generators: r.generators, relators: r.relators }
    }
}

impl MarkedRep {
    /// Validates dimensions and that every relator maps to the identity (to
    /// `tol` for float data, exactly for exact data).
    pub fn new(
        n: usize,
        generators: IndexMap<String, ProjMap>,
        relators: Vec<Word>,
        tol: f64,
    ) -> Result<Self, BendError> {
        for (name, g) in &generators {
            if g.dim() != n {
                return Err(BendError::GeneratorDimension { name: name.clone(), expected: n, found: g.dim() });
            }
        }
        let rep = MarkedRep { n, generators, relators };
        rep.check_relators(tol)?;
        Ok(rep)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &IndexMap<String, ProjMap> {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&ProjMap, BendError> {
        self.generators.get(name).ok_or_else(|| BendError::UnknownGenerator(name.to_string()))
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn mode(&self) -> Mode {
        self.generators.values().fold(Mode::Exact, |m, g| m.join(g.mode()))
    }

    /// Image of a word; the empty word maps to the identity.
    pub fn evaluate(&self, word: &Word) -> Result<ProjMap, BendError> {
        let mut acc = ProjMap::identity(self.n, self.mode());
        for letter in &word.0 {
            let g = self.generator(&letter.name)?;
            let g = if letter.inverse { inverse(g)? } else { g.clone() };
            acc = compose(&acc, &g)?;
        }
        Ok(acc)
    }

    /// Largest projective distance from the identity over all relators.
    pub fn relator_residual(&self) -> Result<f64, BendError> {
        let id = ProjMap::identity(self.n, self.mode());
        let mut worst: f64 = 0.0;
        for w in &self.relators {
            let m = self.evaluate(w)?;
            worst = worst.max(projective_residual(id.entries(), m.entries()));
        }
        Ok(worst)
    }

    pub fn check_relators(&self, tol: f64) -> Result<(), BendError> {
        let id = ProjMap::identity(self.n, self.mode());
        for (index, w) in self.relators.iter().enumerate() {
            let m = self.evaluate(w)?;
            if !id.proj_equiv(&m, tol) {
                let residual = projective_residual(id.entries(), m.entries());
                return Err(BendError::RelatorViolated { index, residual });
            }
        }
        Ok(())
    }

    /// Same relators, new generator images (not re-validated).
    fn with_generators(&self, generators: IndexMap<String, ProjMap>) -> MarkedRep {
        MarkedRep { n: self.n, generators, relators: self.relators.clone() }
    }

    /// True when both reps have the same generator names and projectively
    /// equal images.
    pub fn proj_equiv(&self, other: &MarkedRep, tol: f64) -> bool {
        self.generators.len() == other.generators.len()
            && self.generators.iter().all(|(k, g)| other.generators.get(k).is_some_and(|h| g.proj_equiv(h, tol)))
    }
}

/// How the generating set splits for one bending move.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Decomposition {
    Amalgam {
        side1: Vec<String>,
        side2: Vec<String>,
        #[serde(default)]
        edge_words: Vec<Word>,
    },
    Hnn {
        base: Vec<String>,
        stable: String,
        #[serde(default)]
        edge_words: Vec<Word>,
    },
}

impl Decomposition {
    pub fn edge_words(&self) -> &[Word] {
        match self {
            Decomposition::Amalgam { edge_words, .. } | Decomposition::Hnn { edge_words, .. } => edge_words,
        }
    }

    /// Checks that the names partition the generators of `rep`.
    pub fn validate(&self, rep: &MarkedRep) -> Result<(), BendError> {
        let names: Vec<&String> = match self {
            Decomposition::Amalgam { side1, side2, .. } => side1.iter().chain(side2).collect(),
            Decomposition::Hnn { base, stable, .. } => base.iter().chain(std::iter::once(stable)).collect(),
        };
        let mut seen = std::collections::HashSet::new();
        for name in names {
            rep.generator(name)?;
            if !seen.insert(name.as_str()) {
                return Err(BendError::DuplicateGenerator(name.clone()));
            }
        }
        if let Some(missing) = rep.generators.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(BendError::UncoveredGenerator(missing.clone()));
        }
        for w in self.edge_words() {
            for l in &w.0 {
                rep.generator(&l.name)?;
            }
        }
        Ok(())
    }
}

/// A decomposition together with one element of the centralizer path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BendingMove {
    #[serde(flatten)]
    pub decomposition: Decomposition,
    pub centralizer: ProjMap,
}

impl BendingMove {
    pub fn amalgam(side1: &[&str], side2: &[&str], edge_words: Vec<Word>, centralizer: ProjMap) -> Self {
        BendingMove {
            decomposition: Decomposition::Amalgam {
                side1: side1.iter().map(|s| s.to_string()).collect(),
                side2: side2.iter().map(|s| s.to_string()).collect(),
                edge_words,
            },
            centralizer,
        }
    }

    pub fn hnn(base: &[&str], stable: &str, edge_words: Vec<Word>, centralizer: ProjMap) -> Self {
        BendingMove {
            decomposition: Decomposition::Hnn {
                base: base.iter().map(|s| s.to_string()).collect(),
                stable: stable.to_string(),
                edge_words,
            },
            centralizer,
        }
    }
}

/// True when `c` commutes projectively with the image of every word.
pub fn centralizes_check(c: &ProjMap, words: &[Word], rep: &MarkedRep, tol: f64) -> Result<bool, BendError> {
    Ok(first_non_centralized(c, words, rep, tol)?.is_none())
}

fn first_non_centralized(c: &ProjMap, words: &[Word], rep: &MarkedRep, tol: f64) -> Result<Option<usize>, BendError> {
    for (i, w) in words.iter().enumerate() {
        let g = rep.evaluate(w)?;
        if !commute_check(c, &g, tol)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// True when `cd` and `dc` agree projectively.
pub fn commute_check(c: &ProjMap, d: &ProjMap, tol: f64) -> Result<bool, BendError> {
    Ok(compose(c, d)?.proj_equiv(&compose(d, c)?, tol))
}

pub fn bend(rep: &MarkedRep, mv: &BendingMove) -> Result<MarkedRep, BendError> {
    bend_with_tol(rep, mv, DEFAULT_TOL)
}

pub fn bend_with_tol(rep: &MarkedRep, mv: &BendingMove, tol: f64) -> Result<MarkedRep, BendError> {
    mv.decomposition.validate(rep)?;
    if let Some(index) = first_non_centralized(&mv.centralizer, mv.decomposition.edge_words(), rep, tol)? {
        return Err(BendError::NotCentralizing { index });
    }
    let out = apply_move(rep, mv)?;
    out.check_relators(tol)?;
    Ok(out)
}

fn apply_move(rep: &MarkedRep, mv: &BendingMove) -> Result<MarkedRep, BendError> {
    let c = &mv.centralizer;
    if c.dim() != rep.n {
        return Err(ProjError::DimensionMismatch { left: rep.n, right: c.dim() }.into());
    }
    let mut gens = rep.generators.clone();
    match &mv.decomposition {
        Decomposition::Amalgam { side2, .. } => {
            let c_inv = inverse(c)?;
            for name in side2 {
                let g = &gens[name.as_str()];
                let bent = compose(&compose(c, g)?, &c_inv)?;
                gens[name.as_str()] = bent;
            }
        }
        Decomposition::Hnn { stable, .. } => {
            let bent = compose(c, &gens[stable.as_str()])?;
            gens[stable.as_str()] = bent;
        }
    }
    Ok(rep.with_generators(gens))
}

#[derive(Clone, Copy, Debug)]
pub struct IterateOptions {
    pub tol: f64,
    /// When set, the moves are also applied in a random order drawn from this
    /// seed and the two results are compared.
    pub verify_order_seed: Option<u64>,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions { tol: DEFAULT_TOL, verify_order_seed: None }
    }
}

pub fn iterated_bend(rep: &MarkedRep, moves: &[BendingMove]) -> Result<MarkedRep, BendError> {
    iterated_bend_with(rep, moves, &IterateOptions::default())
}

/// Applies every move in sequence. Refuses when two centralizers fail to
/// commute; every move is checked against the original representation.
pub fn iterated_bend_with(
    rep: &MarkedRep,
    moves: &[BendingMove],
    opts: &IterateOptions,
) -> Result<MarkedRep, BendError> {
    for (i, a) in moves.iter().enumerate() {
        for (j, b) in moves.iter().enumerate().skip(i + 1) {
            if !commute_check(&a.centralizer, &b.centralizer, opts.tol)? {
                return Err(BendError::NonCommuting { first: i, second: j });
            }
        }
    }
    for mv in moves {
        mv.decomposition.validate(rep)?;
        if let Some(index) = first_non_centralized(&mv.centralizer, mv.decomposition.edge_words(), rep, opts.tol)? {
            return Err(BendError::NotCentralizing { index });
        }
    }
    let out = apply_in_order(rep, moves, 0..moves.len())?;
    out.check_relators(opts.tol)?;
    if let Some(seed) = opts.verify_order_seed {
        let mut order: Vec<usize> = (0..moves.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let other = apply_in_order(rep, moves, order)?;
        for (name, g) in &out.generators {
            if !g.proj_equiv(&other.generators[name.as_str()], opts.tol) {
                return Err(BendError::OrderDependent(name.clone()));
            }
        }
    }
    Ok(out)
}

fn apply_in_order(
    rep: &MarkedRep,
    moves: &[BendingMove],
    order: impl IntoIterator<Item = usize>,
) -> Result<MarkedRep, BendError> {
    order.into_iter().try_fold(rep.clone(), |acc, i| apply_move(&acc, &moves[i]))
}
