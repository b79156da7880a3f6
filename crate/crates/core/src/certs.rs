//! Positive certificates that a presentation defines a disjoint union of
//! free monogenic semigroups: weight witnesses for infinite order, and
//! quotient tables, affix invariants or irreducibility for disjointness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rewrite::Orientation;
use crate::words::{Family, Letter, Params, Presentation, Word};

/// A weight: a non-negative integer, or the absorbing sink `⊥`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(u64),
    Sink,
}

impl Weight {
    pub fn plus(self, other: Weight) -> Weight {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Sink,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Weight::Finite(n) if n > 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(n) => write!(f, "{n}"),
            Weight::Sink => f.write_str("⊥"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Weight::Finite(n) => s.serialize_u64(*n),
            Weight::Sink => s.serialize_str("sink"),
        }
    }
}

/// An additive map from words to `N ∪ {0} ∪ {⊥}` given by letter weights.
/// If it is constant on both sides of every relation, each letter of
/// positive finite weight generates an infinite subsemigroup.
///
/// `targets` are the letters the witness is meant to certify; they must
/// keep a positive finite weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightWitness {
    weights: BTreeMap<Letter, Weight>,
    targets: BTreeSet<Letter>,
}

impl WeightWitness {
    /// Targets default to the letters of positive finite weight.
    pub fn new(weights: BTreeMap<Letter, Weight>) -> Self {
        let targets = weights
            .iter()
            .filter(|(_, w)| w.is_positive())
            .map(|(&l, _)| l)
            .collect();
        WeightWitness { weights, targets }
    }

    pub fn with_targets(mut self, targets: BTreeSet<Letter>) -> Self {
        self.targets = targets;
        self
    }

    pub fn from_pairs(pairs: &[(char, Weight)]) -> Self {
        WeightWitness::new(
            pairs
                .iter()
                .map(|&(c, w)| (Letter::new(c).expect("letter"), w))
                .collect(),
        )
    }

    pub fn weight(&self, l: Letter) -> Option<Weight> {
        self.weights.get(&l).copied()
    }

    pub fn weights(&self) -> &BTreeMap<Letter, Weight> {
        &self.weights
    }

    pub fn set(&mut self, l: Letter, w: Weight) {
        self.weights.insert(l, w);
    }

    pub fn targets(&self) -> &BTreeSet<Letter> {
        &self.targets
    }

    /// Letters of positive finite weight.
    pub fn certified(&self) -> BTreeSet<Letter> {
        self.weights
            .iter()
            .filter(|(_, w)| w.is_positive())
            .map(|(&l, _)| l)
            .collect()
    }

    pub fn evaluate(&self, w: &Word) -> Option<Weight> {
        w.letters()
            .map(|l| self.weight(l))
            .try_fold(Weight::Finite(0), |acc, x| Some(acc.plus(x?)))
    }
}

impl fmt::Display for WeightWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{w}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum WitnessFailure {
    #[error("relation {relation} is unbalanced: {lhs} != {rhs}")]
    Unbalanced { relation: usize, lhs: Weight, rhs: Weight },
    #[error("letter '{letter}' has no weight")]
    Unassigned { letter: Letter },
    #[error("target letter '{letter}' has weight {weight}, not a positive integer")]
    TargetNotPositive { letter: Letter, weight: Weight },
}

/// Checks the witness against every relation; on success returns the
/// letters it certifies as having infinite order.
pub fn validate_weight_witness(p: &Presentation, w: &WeightWitness) -> Result<BTreeSet<Letter>, WitnessFailure> {
    for &letter in p.alphabet() {
        if w.weight(letter).is_none() {
            return Err(WitnessFailure::Unassigned { letter });
        }
    }
    for &letter in w.targets() {
        match w.weight(letter) {
            Some(weight) if !weight.is_positive() => return Err(WitnessFailure::TargetNotPositive { letter, weight }),
            None => return Err(WitnessFailure::Unassigned { letter }),
            Some(_) => {}
        }
    }
    for (relation, r) in p.relations().iter().enumerate() {
        let lhs = w.evaluate(&r.lhs).expect("all letters weighted");
        let rhs = w.evaluate(&r.rhs).expect("all letters weighted");
        if lhs != rhs {
            return Err(WitnessFailure::Unbalanced { relation, lhs, rhs });
        }
    }
    Ok(w.certified())
}

/// Exhaustive search for a witness giving `target` positive weight.
///
/// Each other letter ranges over `0, 1, ..., maxweight, ⊥` (in that order),
/// the target over `1..=maxweight`; the first valid assignment in
/// lexicographic order over the alphabet is returned.
pub fn search_weight_witness(p: &Presentation, target: Letter, maxweight: u64) -> Option<WeightWitness> {
    let letters = p.alphabet();
    if !letters.contains(&target) || maxweight == 0 {
        return None;
    }
    let choices: Vec<Vec<Weight>> = letters
        .iter()
        .map(|&l| {
            if l == target {
                (1..=maxweight).map(Weight::Finite).collect()
            } else {
                (0..=maxweight).map(Weight::Finite).chain([Weight::Sink]).collect()
            }
        })
        .collect();
    let mut idx = vec![0usize; letters.len()];
    loop {
        let witness = WeightWitness::new(
            letters
                .iter()
                .zip(&idx)
                .zip(&choices)
                .map(|((&l, &i), c)| (l, c[i]))
                .collect(),
        );
        if validate_weight_witness(p, &witness).is_ok() {
            return Some(witness);
        }
        // odometer, last letter fastest
        let mut pos = letters.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// The weights used for each family: `a` gets 1 and `b`, `c` get the values
/// below (which may be 0 at boundary parameters).
pub fn family_weights(family: Family, params: &Params) -> WeightWitness {
    let p = |c| params.get(c).unwrap_or(1) as u64;
    let (b, c) = match family {
        Family::TwoI => (p('k') - 1, None),
        Family::TwoII => (1, None),
        Family::ThreeI | Family::ThreeII => (p('i') - 1, Some(p('j') - 1)),
        Family::ThreeIII => (p('i') - 1, Some(p('i') - 1)),
        Family::ThreeIV | Family::ThreeV => (p('i') - 1, Some(1)),
        Family::ThreeVI | Family::ThreeVII | Family::ThreeVIII => (1, Some(1)),
        Family::ThreeIX => (1, Some(p('i') - 1)),
    };
    let mut w = vec![('a', Weight::Finite(1)), ('b', Weight::Finite(b))];
    if let Some(c) = c {
        w.push(('c', Weight::Finite(c)));
    }
    WeightWitness::from_pairs(&w)
}

/// A finite semigroup given by its multiplication table, with an assignment
/// of presentation generators to elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    elements: Vec<String>,
    table: Vec<usize>,
    gen_map: BTreeMap<Letter, usize>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// A triple `(x, y, z)` with `(xy)z != x(yz)`.
#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
#[error("({x}{y}){z} != {x}({y}{z})")]
pub struct NonAssociative {
    pub x: String,
    pub y: String,
    pub z: String,
}

impl CayleyTable {
    pub fn new(elements: Vec<String>, rows: Vec<Vec<usize>>, gen_map: BTreeMap<Letter, usize>) -> Result<Self, TableError> {
        let n = elements.len();
        if n == 0 {
            return Err(TableError::Malformed("no elements".into()));
        }
        let distinct: BTreeSet<&String> = elements.iter().collect();
        if distinct.len() != n {
            return Err(TableError::Malformed("duplicate element names".into()));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(TableError::Malformed(format!("table must be {n}x{n}")));
        }
        if rows.iter().flatten().any(|&v| v >= n) || gen_map.values().any(|&v| v >= n) {
            return Err(TableError::Malformed("element index out of range".into()));
        }
        Ok(CayleyTable {
            elements,
            table: rows.concat(),
            gen_map,
        })
    }

    /// Parses `elements e1 e2 ...`, `map a=e1 b=e2 ...`, then one row of
    /// element names per element. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let bad = |m: &str| TableError::Malformed(m.to_string());
        let header = lines.next().ok_or_else(|| bad("missing 'elements' line"))?;
        let elements: Vec<String> = header
            .strip_prefix("elements")
            .ok_or_else(|| bad("first line must start with 'elements'"))?
            .split_whitespace()
            .map(String::from)
            .collect();
        let find = |name: &str| {
            elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| TableError::Malformed(format!("unknown element '{name}'")))
        };
        let map_line = lines.next().ok_or_else(|| bad("missing 'map' line"))?;
        let mut gen_map = BTreeMap::new();
        for item in map_line
            .strip_prefix("map")
            .ok_or_else(|| bad("second line must start with 'map'"))?
            .split_whitespace()
        {
            let (g, e) = item
                .split_once('=')
                .ok_or_else(|| TableError::Malformed(format!("bad map entry '{item}'")))?;
            let mut cs = g.chars();
            let letter = match (cs.next().and_then(Letter::new), cs.next()) {
                (Some(l), None) => l,
                _ => return Err(TableError::Malformed(format!("bad generator '{g}'"))),
            };
            gen_map.insert(letter, find(e)?);
        }
        let mut rows = Vec::new();
        for line in lines {
            rows.push(line.split_whitespace().map(find).collect::<Result<Vec<_>, _>>()?);
        }
        CayleyTable::new(elements, rows, gen_map)
    }

    pub fn render(&self) -> String {
        let mut s = format!("elements {}\nmap", self.elements.join(" "));
        for (l, &e) in &self.gen_map {
            s.push_str(&format!(" {l}={}", self.elements[e]));
        }
        s.push('\n');
        for x in 0..self.len() {
            let row: Vec<&str> = (0..self.len()).map(|y| self.elements[self.product(x, y)].as_str()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// The shipped table for a family, if that family is certified by one.
    pub fn fixture(family: Family) -> Option<CayleyTable> {
        let text = match family {
            Family::ThreeII => include_str!("../fixtures/table_ii.txt"),
            Family::ThreeIII => include_str!("../fixtures/table_iii.txt"),
            Family::ThreeIV => include_str!("../fixtures/table_iv.txt"),
            Family::ThreeV => include_str!("../fixtures/table_v.txt"),
            Family::ThreeVI => include_str!("../fixtures/table_vi.txt"),
            Family::ThreeIX => include_str!("../fixtures/table_ix.txt"),
            _ => return None,
        };
        Some(CayleyTable::parse(text).expect("shipped fixtures parse"))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn product(&self, x: usize, y: usize) -> usize {
        self.table[x * self.len() + y]
    }

    /// Overwrites one entry; used to build corrupted variants.
    pub fn set(&mut self, x: usize, y: usize, value: usize) -> Result<(), TableError> {
        let n = self.len();
        if x >= n || y >= n || value >= n {
            return Err(TableError::Malformed("element index out of range".into()));
        }
        self.table[x * n + y] = value;
        Ok(())
    }

    pub fn generator(&self, l: Letter) -> Option<usize> {
        self.gen_map.get(&l).copied()
    }

    /// Value of a word by folding from the left.
    pub fn evaluate(&self, w: &Word) -> Option<usize> {
        let mut it = w.letters();
        let first = self.generator(it.next()?)?;
        it.try_fold(first, |acc, l| Some(self.product(acc, self.generator(l)?)))
    }

    /// Value of a word by folding from the right.
    pub fn evaluate_right(&self, w: &Word) -> Option<usize> {
        let mut it = w.letters().rev();
        let last = self.generator(it.next()?)?;
        it.try_fold(last, |acc, l| Some(self.product(self.generator(l)?, acc)))
    }

    /// All powers of `e`, in order of first appearance.
    pub fn powers(&self, e: usize) -> Vec<usize> {
        let mut out = vec![e];
        let mut cur = e;
        for _ in 1..self.len() {
            cur = self.product(cur, e);
            if !out.contains(&cur) {
                out.push(cur);
            }
        }
        out
    }
}

/// All `n³` associativity checks.
pub fn validate_cayley_table(t: &CayleyTable) -> Result<(), NonAssociative> {
    let n = t.len();
    for x in 0..n {
        for y in 0..n {
            let xy = t.product(x, y);
            for z in 0..n {
                if t.product(xy, z) != t.product(x, t.product(y, z)) {
                    return Err(NonAssociative {
                        x: t.name(x).into(),
                        y: t.name(y).into(),
                        z: t.name(z).into(),
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum SeparationFailure {
    /// The relation does not hold in the table.
    RelationViolated { relation: usize, lhs: String, rhs: String },
    /// Two generators have a common power in the table.
    PowersOverlap { x: Letter, y: Letter, element: String },
}

impl fmt::Display for SeparationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeparationFailure::RelationViolated { relation, lhs, rhs } => {
                write!(f, "relation {relation} fails in the table: {lhs} != {rhs}")
            }
            SeparationFailure::PowersOverlap { x, y, element } => {
                write!(f, "powers of {x} and {y} meet at {element}")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SeparationError {
    #[error("table is not associative: {0}")]
    NotAssociative(NonAssociative),
    #[error("table does not map generator '{0}'")]
    Unmapped(Letter),
}

/// Checks that the table is a homomorphic image of the presentation (every
/// relation holds under the generator map) in which the powers of distinct
/// generators are disjoint.
pub fn check_quotient_separation(p: &Presentation, t: &CayleyTable) -> Result<Result<(), SeparationFailure>, SeparationError> {
    validate_cayley_table(t).map_err(SeparationError::NotAssociative)?;
    for &l in p.alphabet() {
        if t.generator(l).is_none() {
            return Err(SeparationError::Unmapped(l));
        }
    }
    for (relation, r) in p.relations().iter().enumerate() {
        let lhs = t.evaluate(&r.lhs).expect("mapped");
        let rhs = t.evaluate(&r.rhs).expect("mapped");
        if lhs != rhs {
            return Ok(Err(SeparationFailure::RelationViolated {
                relation,
                lhs: t.name(lhs).into(),
                rhs: t.name(rhs).into(),
            }));
        }
    }
    let powers: Vec<(Letter, BTreeSet<usize>)> = p
        .alphabet()
        .iter()
        .map(|&l| (l, t.powers(t.generator(l).expect("mapped")).into_iter().collect()))
        .collect();
    for (i, (x, px)) in powers.iter().enumerate() {
        for (y, py) in &powers[i + 1..] {
            if let Some(&e) = px.intersection(py).next() {
                return Ok(Err(SeparationFailure::PowersOverlap {
                    x: *x,
                    y: *y,
                    element: t.name(e).into(),
                }));
            }
        }
    }
    Ok(Ok(()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixSide {
    Suffix,
    Prefix,
}

/// A set of length-2 words; a word "has the invariant" when its last (or
/// first) two letters lie in the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffixInvariant {
    pub side: AffixSide,
    pub set: BTreeSet<Word>,
}

impl AffixInvariant {
    pub fn suffixes(items: &[&str]) -> Self {
        Self::build(AffixSide::Suffix, items)
    }

    pub fn prefixes(items: &[&str]) -> Self {
        Self::build(AffixSide::Prefix, items)
    }

    fn build(side: AffixSide, items: &[&str]) -> Self {
        let set = items
            .iter()
            .map(|s| {
                let w = Word::parse(s).expect("valid word");
                assert_eq!(w.len(), 2, "affixes have length 2");
                w
            })
            .collect();
        AffixInvariant { side, set }
    }

    /// Generators `x` with `xx` in the set while every other `yy` is not, or
    /// the other way round. For such `x`, the powers `x^n` (n >= 2) cannot
    /// equal any `y^m` (m >= 2) once the invariant is known to hold.
    pub fn separated_letters(&self, alphabet: &[Letter]) -> Vec<Letter> {
        let inside = |l: Letter| self.set.contains(&Word::power(l, 2));
        alphabet
            .iter()
            .copied()
            .filter(|&x| alphabet.iter().filter(|&&y| y != x).all(|&y| inside(y) != inside(x)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffixFailure {
    pub relation: usize,
    pub orientation: Orientation,
    /// Letter adjacent to the rewritten factor (`None` when the factor is at
    /// the end of the word).
    pub context: Option<Letter>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AffixError {
    #[error("relation {relation} has a side of length 1")]
    ShortSide { relation: usize },
}

fn last_two(w: &[u8]) -> Word {
    Word::from_bytes(&w[w.len() - 2..])
}

/// Checks that rewriting preserves "ends in the set" (or "starts with"):
/// for every side `u -> v` in either orientation and every `q` in
/// `{ε} ∪ alphabet`, the last two letters of `u·q` lie in the set only if
/// those of `v·q` do. Longer contexts leave the affix untouched.
pub fn check_suffix_invariant(p: &Presentation, inv: &AffixInvariant) -> Result<Result<(), AffixFailure>, AffixError> {
    let (pres, set) = match inv.side {
        AffixSide::Suffix => (p.clone(), inv.set.clone()),
        AffixSide::Prefix => (p.reversed(), inv.set.iter().map(Word::reversed).collect()),
    };
    for (relation, r) in pres.relations().iter().enumerate() {
        if r.lhs.len() < 2 || r.rhs.len() < 2 {
            return Err(AffixError::ShortSide { relation });
        }
    }
    for (relation, r) in pres.relations().iter().enumerate() {
        for (orientation, u, v) in [
            (Orientation::Forward, &r.lhs, &r.rhs),
            (Orientation::Backward, &r.rhs, &r.lhs),
        ] {
            let contexts = std::iter::once(None).chain(pres.alphabet().iter().copied().map(Some));
            for q in contexts {
                let extend = |w: &Word| {
                    let mut b = w.as_bytes().to_vec();
                    b.extend(q.map(Letter::byte));
                    last_two(&b)
                };
                if set.contains(&extend(u)) && !set.contains(&extend(v)) {
                    return Ok(Err(AffixFailure {
                        relation,
                        orientation,
                        context: q,
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// A relation side that is a power of the letter in question.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducibleSide {
    pub relation: usize,
    pub side: Word,
}

/// No relation side is a power of `x`, so no rewrite applies to any `x^n`
/// and each of them is alone in its class.
pub fn check_irreducible_generator(p: &Presentation, x: Letter) -> Result<(), ReducibleSide> {
    for (relation, r) in p.relations().iter().enumerate() {
        for side in [&r.lhs, &r.rhs] {
            if side.letters().all(|l| l == x) {
                return Err(ReducibleSide {
                    relation,
                    side: side.clone(),
                });
            }
        }
    }
    Ok(())
}

/// How a weight witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    FamilyWeights,
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfiniteEvidence {
    pub generators: Vec<Letter>,
    pub witness: WeightWitness,
    pub source: WitnessSource,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisjointnessEvidence {
    QuotientTable { table: String },
    Affix { invariant: AffixInvariant, separated: Vec<Letter> },
    Irreducible { generator: Letter },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateBundle {
    pub family: Family,
    pub params: Params,
    pub infinite: Vec<InfiniteEvidence>,
    pub disjoint: Vec<DisjointnessEvidence>,
}

impl CertificateBundle {
    pub fn witness_for(&self, l: Letter) -> Option<&WeightWitness> {
        self.infinite
            .iter()
            .find(|e| e.generators.contains(&l))
            .map(|e| &e.witness)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("presentation carries no family tag")]
    NoFamily,
    #[error("no weight witness for generator '{generator}' with weights up to {bound}")]
    CertificateNotFound { generator: Letter, bound: u64 },
    #[error("family weights fail: {0}")]
    FamilyWeights(WitnessFailure),
    #[error("quotient table fails: {0}")]
    Table(String),
    #[error("affix invariant fails at relation {} ({:?}, context {:?})", .0.relation, .0.orientation, .0.context)]
    Affix(AffixFailure),
    #[error("generator '{generator}' is not irreducible: relation {} has side {}", .side.relation, .side.side)]
    Irreducible { generator: Letter, side: ReducibleSide },
    #[error("no evidence separates <{x}> from <{y}>")]
    Uncovered { x: Letter, y: Letter },
}

impl CertError {
    /// True for failures of a certificate that was checked (as opposed to a
    /// missing input).
    pub fn is_negative(&self) -> bool {
        !matches!(self, CertError::NoFamily)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Largest finite weight tried by the witness search.
    pub maxweight: u64,
    /// Replaces the shipped quotient table.
    pub table: Option<CayleyTable>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            maxweight: 8,
            table: None,
        }
    }
}

pub fn verify_instance(p: &Presentation) -> Result<CertificateBundle, CertError> {
    verify_instance_with(p, &VerifyOptions::default())
}

/// Assembles and checks the certificate bundle for a family instance:
/// weight witnesses for every generator (the family weights first, then a
/// search for whatever they leave uncertified) and per-family disjointness
/// evidence covering every pair of generators.
pub fn verify_instance_with(p: &Presentation, opts: &VerifyOptions) -> Result<CertificateBundle, CertError> {
    let tag = p.family().ok_or(CertError::NoFamily)?;
    let (family, params) = (tag.family, tag.params.clone());

    let mut infinite = Vec::new();
    let seed = family_weights(family, &params);
    let mut certified = validate_weight_witness(p, &seed).map_err(CertError::FamilyWeights)?;
    infinite.push(InfiniteEvidence {
        generators: certified.iter().copied().collect(),
        witness: seed,
        source: WitnessSource::FamilyWeights,
    });
    for &l in p.alphabet() {
        if certified.contains(&l) {
            continue;
        }
        let w = search_weight_witness(p, l, opts.maxweight).ok_or(CertError::CertificateNotFound {
            generator: l,
            bound: opts.maxweight,
        })?;
        let got = validate_weight_witness(p, &w).expect("search returns valid witnesses");
        let new: Vec<Letter> = got.difference(&certified).copied().collect();
        certified.extend(new.iter().copied());
        infinite.push(InfiniteEvidence {
            generators: new,
            witness: w,
            source: WitnessSource::Search,
        });
    }

    let mut disjoint = Vec::new();
    let mut separated: BTreeSet<(Letter, Letter)> = BTreeSet::new();
    let all_pairs_with = |x: Letter, sep: &mut BTreeSet<(Letter, Letter)>| {
        for &y in p.alphabet() {
            if y != x {
                sep.insert((x.min(y), x.max(y)));
            }
        }
    };
    let letter = |c| Letter::new(c).expect("letter");
    let affixes: Vec<AffixInvariant> = match family {
        Family::TwoII => vec![AffixInvariant::prefixes(&["aa", "ab"])],
        Family::ThreeVII => vec![
            AffixInvariant::suffixes(&["aa", "cb", "ba"]),
            AffixInvariant::suffixes(&["ab", "ca", "bb"]),
        ],
        Family::ThreeVIII => vec![
            AffixInvariant::suffixes(&["ac", "bc", "cc"]),
            AffixInvariant::suffixes(&["ab", "bb"]),
        ],
        _ => Vec::new(),
    };
    let irreducible: Vec<Letter> = match family {
        Family::TwoI => vec![letter('b')],
        Family::ThreeI => vec![letter('b'), letter('c')],
        _ => Vec::new(),
    };
    for x in irreducible {
        check_irreducible_generator(p, x).map_err(|side| CertError::Irreducible { generator: x, side })?;
        all_pairs_with(x, &mut separated);
        disjoint.push(DisjointnessEvidence::Irreducible { generator: x });
    }
    for inv in affixes {
        check_suffix_invariant(p, &inv)
            .map_err(|e| CertError::Table(e.to_string()))?
            .map_err(CertError::Affix)?;
        let sep = inv.separated_letters(p.alphabet());
        for &x in &sep {
            all_pairs_with(x, &mut separated);
        }
        disjoint.push(DisjointnessEvidence::Affix {
            invariant: inv,
            separated: sep,
        });
    }
    if let Some(fixture) = CayleyTable::fixture(family) {
        let table = opts.table.clone().unwrap_or(fixture);
        match check_quotient_separation(p, &table) {
            Ok(Ok(())) => {}
            Ok(Err(f)) => return Err(CertError::Table(f.to_string())),
            Err(e) => return Err(CertError::Table(e.to_string())),
        }
        for &x in p.alphabet() {
            all_pairs_with(x, &mut separated);
        }
        disjoint.push(DisjointnessEvidence::QuotientTable {
            table: table.render(),
        });
    }
    for (i, &x) in p.alphabet().iter().enumerate() {
        for &y in &p.alphabet()[i + 1..] {
            if !separated.contains(&(x.min(y), x.max(y))) {
                return Err(CertError::Uncovered { x, y });
            }
        }
    }
    Ok(CertificateBundle {
        family,
        params,
        infinite,
        disjoint,
    })
}
