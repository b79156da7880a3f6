//! The elimination engine: an exponent-free landing analysis over
//! association orders (phase 1), bounded probe derivations over concrete
//! exponents (phase 2), and the classification drivers that tie both to the
//! family list and the certificate checker.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;
use thiserror::Error;

use crate::certs::{verify_instance, CertificateBundle};
use crate::rewrite::{default_probes, probe_eliminate, BoundsError, ProbeLimits, ProbeVerdict};
use crate::typespace::{apply_symmetry, group, orbits, TypeTuple};
use crate::words::{instantiate_family, product_presentation, Family, Letter, Params, Word};

/// Multiplicity of a factor in an [`AbstractWord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mult {
    ExactlyOne,
    AtLeastOne,
}

/// A product of generator powers with unknown exponents: `x^1` or `x^+`
/// per factor, adjacent factors on distinct generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractWord(Vec<(u8, Mult)>);

impl AbstractWord {
    /// Builds the word, merging equal neighbours (a merged factor has
    /// multiplicity at least one).
    pub fn new(factors: impl IntoIterator<Item = (u8, Mult)>) -> AbstractWord {
        let mut w = AbstractWord(Vec::new());
        for (x, m) in factors {
            w.push(x, m);
        }
        w
    }

    pub fn from_word(w: &Word) -> AbstractWord {
        AbstractWord::new(w.as_bytes().iter().map(|&b| (b - b'a', Mult::ExactlyOne)))
    }

    fn push(&mut self, x: u8, m: Mult) {
        match self.0.last_mut() {
            Some(last) if last.0 == x => last.1 = Mult::AtLeastOne,
            _ => self.0.push((x, m)),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(u8, Mult)] {
        &self.0
    }

    /// All words obtained by rewriting the product at boundary `i` (between
    /// factors `i` and `i+1`) into a power of its landing generator.
    pub fn contract(&self, t: &TypeTuple, i: usize) -> Vec<AbstractWord> {
        let (x, mx) = self.0[i];
        let (y, my) = self.0[i + 1];
        let z = t.landing(x as usize, y as usize) as u8;
        let keep = |m: Mult| match m {
            Mult::ExactlyOne => vec![false],
            Mult::AtLeastOne => vec![false, true],
        };
        let mut out = Vec::new();
        for kx in keep(mx) {
            for ky in keep(my) {
                let mut w = AbstractWord(self.0[..i].to_vec());
                if kx {
                    w.push(x, Mult::AtLeastOne);
                }
                w.push(z, Mult::AtLeastOne);
                if ky {
                    w.push(y, Mult::AtLeastOne);
                }
                for &(c, m) in &self.0[i + 2..] {
                    w.push(c, m);
                }
                out.push(w);
            }
        }
        out
    }
}

impl fmt::Display for AbstractWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(x, m) in &self.0 {
            write!(f, "{}", (b'a' + x) as char)?;
            if m == Mult::AtLeastOne {
                f.write_str("+")?;
            }
        }
        Ok(())
    }
}

/// An association order for a product of `n` factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bracketing {
    Leaf,
    Node(Box<Bracketing>, Box<Bracketing>),
}

impl Bracketing {
    /// All binary bracketings of `n >= 1` factors (Catalan many), ordered
    /// by the size of the left part.
    pub fn all(n: usize) -> Vec<Bracketing> {
        assert!(n >= 1);
        if n == 1 {
            return vec![Bracketing::Leaf];
        }
        let mut out = Vec::new();
        for k in 1..n {
            for l in Bracketing::all(k) {
                for r in Bracketing::all(n - k) {
                    out.push(Bracketing::Node(Box::new(l.clone()), Box::new(r)));
                }
            }
        }
        out
    }

    pub fn leaves(&self) -> usize {
        match self {
            Bracketing::Leaf => 1,
            Bracketing::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Renders the bracketing over the letters of `w`, e.g. `(ab)c`.
    pub fn render(&self, w: &Word) -> String {
        fn go(b: &Bracketing, letters: &[u8], top: bool, out: &mut String) {
            match b {
                Bracketing::Leaf => out.push(letters[0] as char),
                Bracketing::Node(l, r) => {
                    if !top {
                        out.push('(');
                    }
                    let k = l.leaves();
                    go(l, &letters[..k], false, out);
                    go(r, &letters[k..], false, out);
                    if !top {
                        out.push(')');
                    }
                }
            }
        }
        assert_eq!(self.leaves(), w.len());
        let mut s = String::new();
        go(self, w.as_bytes(), true, &mut s);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LandingOutcome {
    pub outcomes: BTreeSet<Letter>,
    pub overflow: bool,
}

impl LandingOutcome {
    /// Usable as evidence: complete and non-empty.
    pub fn is_decisive(&self) -> bool {
        !self.overflow && !self.outcomes.is_empty()
    }
}

/// Generators a product of the given factors can land in. Contracts the
/// leftmost boundary repeatedly, exploring every multiplicity branch; a
/// branch with more than `cap` factors is abandoned and sets overflow.
fn reduce(t: &TypeTuple, start: AbstractWord, cap: usize) -> (BTreeSet<u8>, bool) {
    let mut outcomes = BTreeSet::new();
    let mut overflow = false;
    let mut seen = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(w) = queue.pop_front() {
        if w.len() == 1 {
            outcomes.insert(w.0[0].0);
            continue;
        }
        if w.len() > cap {
            overflow = true;
            continue;
        }
        for next in w.contract(t, 0) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    (outcomes, overflow)
}

/// Landing analysis of `probe` under the association order `strategy`:
/// each internal node multiplies the powers its two subtrees land in.
/// An empty outcome set is reported as overflow, since some branch then
/// never resolved.
pub fn landing_outcomes(t: &TypeTuple, probe: &Word, strategy: &Bracketing, cap: usize) -> LandingOutcome {
    fn eval(t: &TypeTuple, letters: &[u8], b: &Bracketing, cap: usize) -> (Vec<(u8, Mult)>, bool) {
        match b {
            Bracketing::Leaf => (vec![(letters[0] - b'a', Mult::ExactlyOne)], false),
            Bracketing::Node(l, r) => {
                let k = l.leaves();
                let (left, ol) = eval(t, &letters[..k], l, cap);
                let (right, or) = eval(t, &letters[k..], r, cap);
                let mut all = BTreeSet::new();
                let mut overflow = ol || or;
                for &x in &left {
                    for &y in &right {
                        let (o, of) = reduce(t, AbstractWord::new([x, y]), cap);
                        overflow |= of;
                        all.extend(o);
                    }
                }
                (all.into_iter().map(|z| (z, Mult::AtLeastOne)).collect(), overflow)
            }
        }
    }
    assert_eq!(strategy.leaves(), probe.len(), "strategy must fit the probe");
    let (res, overflow) = eval(t, probe.as_bytes(), strategy, cap);
    let outcomes: BTreeSet<Letter> = res.iter().map(|&(x, _)| Letter::nth(x as usize)).collect();
    LandingOutcome {
        overflow: overflow || outcomes.is_empty(),
        outcomes,
    }
}

/// One strategy's result, as carried in elimination evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyOutcome {
    pub strategy: String,
    pub outcomes: BTreeSet<Letter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Phase1Verdict {
    Eliminated {
        probe: Word,
        left: StrategyOutcome,
        right: StrategyOutcome,
    },
    Inconclusive,
}

impl Phase1Verdict {
    pub fn is_eliminated(&self) -> bool {
        matches!(self, Phase1Verdict::Eliminated { .. })
    }
}

/// Looks for a probe of length 3 or 4 with two association orders whose
/// complete outcome sets are disjoint.
pub fn phase1_eliminate(t: &TypeTuple, cap: usize) -> Phase1Verdict {
    let alphabet: Vec<Letter> = (0..t.gens()).map(Letter::nth).collect();
    let strategies = [Bracketing::all(3), Bracketing::all(4)];
    for probe in default_probes(&alphabet) {
        let results: Vec<(String, LandingOutcome)> = strategies[probe.len() - 3]
            .iter()
            .map(|s| (s.render(&probe), landing_outcomes(t, &probe, s, cap)))
            .filter(|(_, o)| o.is_decisive())
            .collect();
        for (i, (s1, o1)) in results.iter().enumerate() {
            for (s2, o2) in &results[i + 1..] {
                if o1.outcomes.is_disjoint(&o2.outcomes) {
                    return Phase1Verdict::Eliminated {
                        probe,
                        left: StrategyOutcome {
                            strategy: s1.clone(),
                            outcomes: o1.outcomes.clone(),
                        },
                        right: StrategyOutcome {
                            strategy: s2.clone(),
                            outcomes: o2.outcomes.clone(),
                        },
                    };
                }
            }
        }
    }
    Phase1Verdict::Inconclusive
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("copies must be 2 or 3, got {0}")]
    Copies(usize),
    #[error("exponent bound must be at least 1")]
    ZeroBound,
    #[error("probe search for exponents {assignment:?}: {source}")]
    Bounds { assignment: Vec<u32>, source: BoundsError },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// All exponent vectors in `1..=bound` for `n` pairs, lexicographic.
pub fn exponent_vectors(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let total = (bound as usize).pow(n as u32);
    (0..total)
        .map(|mut r| {
            let mut e = vec![1; n];
            for slot in e.iter_mut().rev() {
                *slot = (r % bound as usize) as u32 + 1;
                r /= bound as usize;
            }
            e
        })
        .collect()
}

/// Exponent vectors (in pair order) for which the bounded probe search
/// finds no derivation between distinct powers.
pub fn phase2_eliminate(t: &TypeTuple, bound: u32, limits: &ProbeLimits) -> Result<Vec<Vec<u32>>, ClassifyError> {
    if bound == 0 {
        return Err(ClassifyError::ZeroBound);
    }
    let gens = t.gens();
    let landing = t.landing_letters();
    let alphabet: Vec<Letter> = (0..gens).map(Letter::nth).collect();
    let probes = default_probes(&alphabet);
    let results: Vec<Result<Option<Vec<u32>>, ClassifyError>> = exponent_vectors(landing.len(), bound)
        .into_par_iter()
        .map(|e| {
            let p = product_presentation(gens, &landing, &e);
            match probe_eliminate(&p, &probes, limits) {
                Ok(ProbeVerdict::NoneFound) => Ok(Some(e)),
                Ok(ProbeVerdict::Contradiction { .. }) => Ok(None),
                Err(source) => Err(ClassifyError::Bounds { assignment: e, source }),
            }
        })
        .collect();
    results.into_iter().filter_map(Result::transpose).collect()
}

/// A family whose type lies in the orbit of `t`, with a symmetry carrying
/// `t` onto it; families are tried in their fixed order.
pub fn family_in_orbit(t: &TypeTuple) -> Option<(Family, TypeTuple)> {
    Family::for_copies(t.gens()).find_map(|f| {
        let ft = TypeTuple::parse(f.landing()).expect("family types parse");
        group(t.gens())
            .iter()
            .any(|g| apply_symmetry(g, t) == ft)
            .then_some((f, ft))
    })
}

/// Matches a concrete (type, exponents) against the families, trying every
/// symmetry that carries the type onto a family type.
pub fn match_family(t: &TypeTuple, exps: &[u32]) -> Option<(Family, Params)> {
    for f in Family::for_copies(t.gens()) {
        let ft = TypeTuple::parse(f.landing()).expect("family types parse");
        for g in group(t.gens()) {
            if apply_symmetry(&g, t) != ft {
                continue;
            }
            if let Some(params) = f.match_exponents(&g.permute_pairs(exps)) {
                return Some((f, params));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub exp_bound: u32,
    pub probe: ProbeLimits,
    /// Factor cap for the landing analysis.
    pub landing_cap: usize,
    /// Worker threads for phase 2 (`None`: rayon's default).
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exp_bound: 3,
            probe: ProbeLimits::default(),
            landing_cap: 8,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivorInstance {
    /// Exponents in the pair order of the canonical representative.
    pub exponents: Vec<u32>,
    pub params: Params,
    pub certificate: CertificateBundle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitStatus {
    EliminatedPhase1(Phase1Verdict),
    /// Every exponent assignment up to the bound led to a contradiction.
    EliminatedPhase2 { assignments: usize },
    Survivor {
        family: Family,
        family_type: TypeTuple,
        instances: Vec<SurvivorInstance>,
    },
    /// A family type whose constraint has no solution within the bound.
    Inconclusive { family: Family, family_type: TypeTuple },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub representative: TypeTuple,
    pub size: usize,
    #[serde(flatten)]
    pub status: OrbitStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum Issue {
    Unmatched { representative: TypeTuple, exponents: Vec<u32> },
    CertificationFailed { representative: TypeTuple, family: Family, params: Params, error: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub copies: usize,
    pub limits: Limits,
    pub orbits: Vec<OrbitReport>,
    pub issues: Vec<Issue>,
}

impl ClassificationReport {
    pub fn survivors(&self) -> impl Iterator<Item = &OrbitReport> {
        self.orbits
            .iter()
            .filter(|o| matches!(o.status, OrbitStatus::Survivor { .. } | OrbitStatus::Inconclusive { .. }))
    }

    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn classify(copies: usize, limits: &Limits) -> Result<ClassificationReport, ClassifyError> {
    if !(copies == 2 || copies == 3) {
        return Err(ClassifyError::Copies(copies));
    }
    if limits.exp_bound == 0 {
        return Err(ClassifyError::ZeroBound);
    }
    match limits.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ClassifyError::Pool(e.to_string()))?
            .install(|| classify_inner(copies, limits)),
        None => classify_inner(copies, limits),
    }
}

fn classify_inner(copies: usize, limits: &Limits) -> Result<ClassificationReport, ClassifyError> {
    let mut reports = Vec::new();
    let mut issues = Vec::new();
    for orbit in orbits(copies) {
        let rep = orbit.representative;
        let verdict = phase1_eliminate(&rep, limits.landing_cap);
        let status = if verdict.is_eliminated() {
            OrbitStatus::EliminatedPhase1(verdict)
        } else {
            let survivors = phase2_eliminate(&rep, limits.exp_bound, &limits.probe)?;
            match family_in_orbit(&rep) {
                None if survivors.is_empty() => OrbitStatus::EliminatedPhase2 {
                    assignments: (limits.exp_bound as usize).pow(rep.entries().len() as u32),
                },
                None => {
                    issues.extend(survivors.into_iter().map(|exponents| Issue::Unmatched {
                        representative: rep,
                        exponents,
                    }));
                    OrbitStatus::EliminatedPhase2 { assignments: 0 }
                }
                Some((family, family_type)) if survivors.is_empty() => OrbitStatus::Inconclusive { family, family_type },
                Some((family, family_type)) => {
                    let mut instances = Vec::new();
                    for exponents in survivors {
                        let Some((f, params)) = match_family(&rep, &exponents) else {
                            issues.push(Issue::Unmatched {
                                representative: rep,
                                exponents,
                            });
                            continue;
                        };
                        let cert = instantiate_family(f, &params)
                            .map_err(|e| e.to_string())
                            .and_then(|p| verify_instance(&p).map_err(|e| e.to_string()));
                        match cert {
                            Ok(certificate) => instances.push(SurvivorInstance {
                                exponents,
                                params,
                                certificate,
                            }),
                            Err(error) => issues.push(Issue::CertificationFailed {
                                representative: rep,
                                family: f,
                                params,
                                error,
                            }),
                        }
                    }
                    OrbitStatus::Survivor {
                        family,
                        family_type,
                        instances,
                    }
                }
            }
        };
        reports.push(OrbitReport {
            representative: rep,
            size: orbit.size,
            status,
        });
    }
    Ok(ClassificationReport {
        copies,
        limits: *limits,
        orbits: reports,
        issues,
    })
}
