//! Elementary rewriting, bounded consequence search, congruence closure on a
//! ball of words, and probe-based contradiction search.
//!
//! Nothing here ever asserts that a relation is *not* a consequence: every
//! search is bounded and negative answers are reported as unknown.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::words::{Letter, Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// lhs replaced by rhs
    Forward,
    /// rhs replaced by lhs
    Backward,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

/// One elementary transition `p·u·q -> p·v·q` where `(u, v)` is relation
/// `relation` read in direction `orientation`. `position` is the 0-based
/// offset of the replaced factor in `source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub source: Word,
    pub target: Word,
    pub relation: usize,
    pub orientation: Orientation,
    pub position: usize,
}

impl RewriteStep {
    /// The same step read backwards.
    pub fn reversed(&self) -> RewriteStep {
        RewriteStep {
            source: self.target.clone(),
            target: self.source.clone(),
            relation: self.relation,
            orientation: self.orientation.flip(),
            position: self.position,
        }
    }

    /// Checks the step against the presentation's relations.
    pub fn is_valid(&self, p: &Presentation) -> bool {
        let Some(rel) = p.relations().get(self.relation) else {
            return false;
        };
        let (from, to) = match self.orientation {
            Orientation::Forward => (&rel.lhs, &rel.rhs),
            Orientation::Backward => (&rel.rhs, &rel.lhs),
        };
        let src = self.source.as_bytes();
        let end = self.position + from.len();
        if end > src.len() || &src[self.position..end] != from.as_bytes() {
            return false;
        }
        let mut expect = src[..self.position].to_vec();
        expect.extend_from_slice(to.as_bytes());
        expect.extend_from_slice(&src[end..]);
        expect == self.target.as_bytes()
    }
}

/// Checks that a path of steps is connected, starts at `from`, ends at `to`,
/// and every step is valid for `p`.
pub fn replay_path(p: &Presentation, from: &Word, to: &Word, path: &[RewriteStep]) -> bool {
    let mut cur = from;
    for step in path {
        if &step.source != cur || !step.is_valid(p) {
            return false;
        }
        cur = &step.target;
    }
    cur == to
}

#[derive(Clone, Debug)]
struct Rule {
    from: Vec<u8>,
    to: Vec<u8>,
    relation: usize,
    orientation: Orientation,
}

fn compile(p: &Presentation, forward_only: bool) -> Vec<Rule> {
    let mut rules = Vec::new();
    for (i, r) in p.relations().iter().enumerate() {
        rules.push(Rule {
            from: r.lhs.as_bytes().to_vec(),
            to: r.rhs.as_bytes().to_vec(),
            relation: i,
            orientation: Orientation::Forward,
        });
        if !forward_only && r.lhs != r.rhs {
            rules.push(Rule {
                from: r.rhs.as_bytes().to_vec(),
                to: r.lhs.as_bytes().to_vec(),
                relation: i,
                orientation: Orientation::Backward,
            });
        }
    }
    rules
}

/// Calls `f(rule, position)` for every occurrence of a rule's left side in
/// `w`, ordered by position then rule.
fn for_each_match(w: &[u8], rules: &[Rule], mut f: impl FnMut(&Rule, usize)) {
    for pos in 0..w.len() {
        for rule in rules {
            if w[pos..].starts_with(&rule.from) {
                f(rule, pos);
            }
        }
    }
}

fn apply(w: &[u8], rule: &Rule, pos: usize, out: &mut Vec<u8>) {
    out.clear();
    out.extend_from_slice(&w[..pos]);
    out.extend_from_slice(&rule.to);
    out.extend_from_slice(&w[pos + rule.from.len()..]);
}

/// Every elementary rewrite of `w`, in (position, relation, orientation)
/// order.
pub fn rewrite_steps(w: &Word, p: &Presentation) -> Vec<RewriteStep> {
    let rules = compile(p, false);
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for_each_match(w.as_bytes(), &rules, |rule, pos| {
        apply(w.as_bytes(), rule, pos, &mut buf);
        out.push(RewriteStep {
            source: w.clone(),
            target: Word::from_vec_unchecked(buf.clone()),
            relation: rule.relation,
            orientation: rule.orientation,
            position: pos,
        });
    });
    out
}

/// All words reachable from `w` by one elementary rewrite.
pub fn one_step_rewrites(w: &Word, p: &Presentation) -> BTreeSet<Word> {
    rewrite_steps(w, p).into_iter().map(|s| s.target).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("search bound '{0}' must be positive")]
    NonPositive(&'static str),
    #[error("word {0} is not over the presentation's alphabet")]
    ForeignWord(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Consequence {
    Derivable { path: Vec<RewriteStep> },
    /// `v` was not reached. `exhausted` is set when the search saw the whole
    /// connected component of `u` without pruning anything, which means the
    /// search space really was closed.
    UnknownWithinBounds { visited: usize, exhausted: bool },
}

impl Consequence {
    pub fn is_derivable(&self) -> bool {
        matches!(self, Consequence::Derivable { .. })
    }
}

#[derive(Clone, Copy)]
struct NodeLink {
    parent: u32,
    relation: u32,
    orientation: Orientation,
    position: u32,
}

/// Arena of BFS nodes with parent links for path reconstruction.
struct Tree {
    words: Vec<Vec<u8>>,
    links: Vec<Option<NodeLink>>,
    depth: Vec<u32>,
    index: FxHashMap<Vec<u8>, u32>,
}

impl Tree {
    fn new(root: &[u8]) -> Tree {
        let mut index = FxHashMap::default();
        index.insert(root.to_vec(), 0);
        Tree {
            words: vec![root.to_vec()],
            links: vec![None],
            depth: vec![0],
            index,
        }
    }

    fn len(&self) -> usize {
        self.words.len()
    }

    /// Inserts a node if it is new; returns its id when inserted.
    fn insert(&mut self, w: &[u8], link: NodeLink) -> Option<u32> {
        if self.index.contains_key(w) {
            return None;
        }
        let id = self.words.len() as u32;
        self.index.insert(w.to_vec(), id);
        self.words.push(w.to_vec());
        self.depth.push(self.depth[link.parent as usize] + 1);
        self.links.push(Some(link));
        Some(id)
    }

    /// Steps from the root to `node`.
    fn path_to(&self, mut node: u32) -> Vec<RewriteStep> {
        let mut out = Vec::new();
        while let Some(link) = self.links[node as usize] {
            out.push(RewriteStep {
                source: Word::from_vec_unchecked(self.words[link.parent as usize].clone()),
                target: Word::from_vec_unchecked(self.words[node as usize].clone()),
                relation: link.relation as usize,
                orientation: link.orientation,
                position: link.position as usize,
            });
            node = link.parent;
        }
        out.reverse();
        out
    }

    /// Steps from `a` to `b` through the root.
    fn path_between(&self, a: u32, b: u32) -> Vec<RewriteStep> {
        let mut out: Vec<RewriteStep> = self.path_to(a).iter().rev().map(RewriteStep::reversed).collect();
        out.extend(self.path_to(b));
        out
    }
}

/// Sorted, de-duplicated successors of `w` with the first rule producing
/// each one.
fn successors(w: &[u8], rules: &[Rule], maxlen: usize) -> Vec<(Vec<u8>, usize, usize)> {
    let mut out: Vec<(Vec<u8>, usize, usize)> = Vec::new();
    let mut buf = Vec::new();
    for_each_match(w, rules, |rule, pos| {
        if w.len() - rule.from.len() + rule.to.len() > maxlen {
            return;
        }
        apply(w, rule, pos, &mut buf);
        out.push((buf.clone(), rule_index(rules, rule), pos));
    });
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

fn rule_index(rules: &[Rule], rule: &Rule) -> usize {
    rules
        .iter()
        .position(|r| std::ptr::eq(r, rule))
        .expect("rule belongs to slice")
}

fn pruned_any(w: &[u8], rules: &[Rule], maxlen: usize) -> bool {
    let mut pruned = false;
    for_each_match(w, rules, |rule, _| {
        if w.len() - rule.from.len() + rule.to.len() > maxlen {
            pruned = true;
        }
    });
    pruned
}

/// Breadth-first search for a derivation `u = ... = v`, never expanding
/// words longer than `maxlen` and visiting at most `maxnodes` words.
/// Successors are expanded in lexicographic order, so paths are
/// reproducible.
pub fn is_consequence(
    u: &Word,
    v: &Word,
    p: &Presentation,
    maxlen: usize,
    maxnodes: usize,
) -> Result<Consequence, BoundsError> {
    if maxlen == 0 {
        return Err(BoundsError::NonPositive("maxlen"));
    }
    if maxnodes == 0 {
        return Err(BoundsError::NonPositive("maxnodes"));
    }
    for w in [u, v] {
        if !p.is_over_alphabet(w) {
            return Err(BoundsError::ForeignWord(w.to_string()));
        }
    }
    if u == v {
        return Ok(Consequence::Derivable { path: Vec::new() });
    }
    let rules = compile(p, false);
    let mut tree = Tree::new(u.as_bytes());
    let mut queue = VecDeque::from([0u32]);
    let mut exhausted = u.len() <= maxlen;
    while let Some(node) = queue.pop_front() {
        let w = tree.words[node as usize].clone();
        if pruned_any(&w, &rules, maxlen) {
            exhausted = false;
        }
        for (next, ri, pos) in successors(&w, &rules, maxlen) {
            if tree.len() >= maxnodes && !tree.index.contains_key(&next) {
                return Ok(Consequence::UnknownWithinBounds {
                    visited: tree.len(),
                    exhausted: false,
                });
            }
            let rule = &rules[ri];
            let link = NodeLink {
                parent: node,
                relation: rule.relation as u32,
                orientation: rule.orientation,
                position: pos as u32,
            };
            if let Some(id) = tree.insert(&next, link) {
                if next == v.as_bytes() {
                    return Ok(Consequence::Derivable { path: tree.path_to(id) });
                }
                queue.push_back(id);
            }
        }
    }
    Ok(Consequence::UnknownWithinBounds {
        visited: tree.len(),
        exhausted,
    })
}

/// A power word `x^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PowerWord {
    pub letter: Letter,
    pub exponent: u32,
}

impl PowerWord {
    pub fn word(self) -> Word {
        Word::power(self.letter, self.exponent)
    }
}

impl std::fmt::Display for PowerWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}", self.letter, self.exponent)
    }
}

/// Two distinct powers shown equal, with a derivation from `left` to `right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub left: PowerWord,
    pub right: PowerWord,
    pub witness: Vec<RewriteStep>,
}

impl Collision {
    /// True for `x^p ~ x^q`, false for `x^p ~ y^q` with `x != y`.
    pub fn same_letter(&self) -> bool {
        self.left.letter == self.right.letter
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MergeReport {
    pub collisions: Vec<Collision>,
}

impl MergeReport {
    pub fn is_empty(&self) -> bool {
        self.collisions.is_empty()
    }

    /// Whether `x^p ~ y^q` is among the reported (adjacent) collisions.
    pub fn contains(&self, x: Letter, p: u32, y: Letter, q: u32) -> bool {
        let a = PowerWord { letter: x, exponent: p };
        let b = PowerWord { letter: y, exponent: q };
        self.collisions
            .iter()
            .any(|c| (c.left == a && c.right == b) || (c.left == b && c.right == a))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BallError {
    #[error("ball length bound must be at least 1")]
    ZeroLength,
    #[error("ball of radius {length} has {words} words, above the cap of {cap}; lower the length")]
    TooLarge { length: usize, words: u128, cap: usize },
}

/// Default cap on the number of words in a ball.
pub const DEFAULT_BALL_CAP: usize = 20_000_000;

/// The congruence restricted to all words of length at most `max_len`.
///
/// Words are indexed densely in shortlex order (length, then lexicographic
/// in alphabet order); classes are numbered by their shortlex-least member.
#[derive(Clone, Debug)]
pub struct BallPartition {
    alphabet: Vec<Letter>,
    max_len: usize,
    offsets: Vec<usize>,
    class_of: Vec<u32>,
    class_count: usize,
    /// (source, target, relation, position); all forward steps.
    spanning: Vec<(u32, u32, u32, u32)>,
}

impl BallPartition {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn num_words(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_count
    }

    fn digit(&self, b: u8) -> Option<usize> {
        self.alphabet.iter().position(|l| l.byte() == b)
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() > self.max_len {
            return None;
        }
        let k = self.alphabet.len();
        let mut r = 0usize;
        for &b in w.as_bytes() {
            r = r * k + self.digit(b)?;
        }
        Some(self.offsets[w.len()] + r)
    }

    pub fn word_at(&self, idx: usize) -> Word {
        let len = (1..=self.max_len)
            .find(|&l| idx < self.offsets[l + 1])
            .expect("index inside ball");
        decode(&self.alphabet, len, idx - self.offsets[len])
    }

    pub fn class_of(&self, w: &Word) -> Option<usize> {
        self.index_of(w).map(|i| self.class_of[i] as usize)
    }

    pub fn same_class(&self, u: &Word, v: &Word) -> Option<bool> {
        Some(self.class_of(u)? == self.class_of(v)?)
    }

    /// All classes, each listed in shortlex order.
    pub fn classes(&self) -> Vec<Vec<Word>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(self.word_at(i));
        }
        out
    }

    pub fn class_members(&self, class: usize) -> Vec<Word> {
        self.class_of
            .iter()
            .enumerate()
            .filter(|(_, &c)| c as usize == class)
            .map(|(i, _)| self.word_at(i))
            .collect()
    }

    fn step(&self, e: &(u32, u32, u32, u32)) -> RewriteStep {
        RewriteStep {
            source: self.word_at(e.0 as usize),
            target: self.word_at(e.1 as usize),
            relation: e.2 as usize,
            orientation: Orientation::Forward,
            position: e.3 as usize,
        }
    }

    /// The merges that built the partition; together they form a spanning
    /// forest of every class.
    pub fn spanning_steps(&self) -> Vec<RewriteStep> {
        self.spanning.iter().map(|e| self.step(e)).collect()
    }

    /// A derivation from `u` to `v` along spanning steps, if they share a
    /// class.
    pub fn derivation(&self, u: &Word, v: &Word) -> Option<Vec<RewriteStep>> {
        let (iu, iv) = (self.index_of(u)?, self.index_of(v)?);
        if self.class_of[iu] != self.class_of[iv] {
            return None;
        }
        let class = self.class_of[iu];
        let mut adj: FxHashMap<u32, Vec<(u32, usize, bool)>> = FxHashMap::default();
        for (k, e) in self.spanning.iter().enumerate() {
            if self.class_of[e.0 as usize] == class {
                adj.entry(e.0).or_default().push((e.1, k, true));
                adj.entry(e.1).or_default().push((e.0, k, false));
            }
        }
        let mut prev: FxHashMap<u32, (u32, usize, bool)> = FxHashMap::default();
        let mut queue = VecDeque::from([iu as u32]);
        let mut seen = BTreeSet::from([iu as u32]);
        while let Some(x) = queue.pop_front() {
            if x == iv as u32 {
                break;
            }
            for &(y, k, fwd) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(y) {
                    prev.insert(y, (x, k, fwd));
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = iv as u32;
        while cur != iu as u32 {
            let (p, k, fwd) = prev[&cur];
            let s = self.step(&self.spanning[k]);
            path.push(if fwd { s } else { s.reversed() });
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

fn decode(alphabet: &[Letter], len: usize, mut r: usize) -> Word {
    let k = alphabet.len();
    let mut v = vec![0u8; len];
    for slot in v.iter_mut().rev() {
        *slot = alphabet[r % k].byte();
        r /= k;
    }
    Word::from_vec_unchecked(v)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

pub fn congruence_ball(p: &Presentation, max_len: usize) -> Result<(BallPartition, MergeReport), BallError> {
    congruence_ball_capped(p, max_len, DEFAULT_BALL_CAP)
}

/// Union-find closure over every word of length `<= max_len`: each word is
/// united with each of its in-ball one-step rewrites.
pub fn congruence_ball_capped(
    p: &Presentation,
    max_len: usize,
    cap: usize,
) -> Result<(BallPartition, MergeReport), BallError> {
    if max_len == 0 {
        return Err(BallError::ZeroLength);
    }
    let k = p.alphabet().len();
    let mut offsets = vec![0usize; max_len + 2];
    let mut total: u128 = 0;
    let mut layer: u128 = 1;
    for slot in offsets.iter_mut().take(max_len + 1).skip(1) {
        *slot = total as usize;
        layer *= k as u128;
        total += layer;
        if total > cap as u128 {
            return Err(BallError::TooLarge {
                length: max_len,
                words: total,
                cap,
            });
        }
    }
    offsets[max_len + 1] = total as usize;
    let n = total as usize;
    let alphabet = p.alphabet().to_vec();
    let mut digit = [usize::MAX; 256];
    for (i, l) in alphabet.iter().enumerate() {
        digit[l.byte() as usize] = i;
    }
    let rank = |w: &[u8]| -> usize {
        let mut r = 0usize;
        for &b in w {
            r = r * k + digit[b as usize];
        }
        offsets[w.len()] + r
    };

    // A forward step from every word covers every in-ball edge, since a
    // backward step from `w` is a forward step from its target.
    let rules = compile(p, true);
    let mut uf = UnionFind::new(n);
    let mut spanning = Vec::new();
    let mut buf = Vec::new();
    for len in 1..=max_len {
        let count = offsets[len + 1] - offsets[len];
        let mut word = decode(&alphabet, len, 0).as_bytes().to_vec();
        for r in 0..count {
            if r > 0 {
                // odometer increment in alphabet order
                let mut i = len;
                loop {
                    i -= 1;
                    let d = digit[word[i] as usize];
                    if d + 1 < k {
                        word[i] = alphabet[d + 1].byte();
                        break;
                    }
                    word[i] = alphabet[0].byte();
                }
            }
            let src = offsets[len] + r;
            for_each_match(&word, &rules, |rule, pos| {
                if len - rule.from.len() + rule.to.len() > max_len {
                    return;
                }
                apply(&word, rule, pos, &mut buf);
                let dst = rank(&buf);
                if uf.union(src as u32, dst as u32) {
                    spanning.push((src as u32, dst as u32, rule.relation as u32, pos as u32));
                }
            });
        }
    }

    let mut class_of = vec![u32::MAX; n];
    let mut root_class: FxHashMap<u32, u32> = FxHashMap::default();
    for (i, slot) in class_of.iter_mut().enumerate() {
        let r = uf.find(i as u32);
        let next = root_class.len() as u32;
        *slot = *root_class.entry(r).or_insert(next);
    }
    let partition = BallPartition {
        alphabet,
        max_len,
        offsets,
        class_of,
        class_count: root_class.len(),
        spanning,
    };

    let mut powers_by_class: BTreeMap<u32, Vec<(usize, PowerWord)>> = BTreeMap::new();
    for (li, &l) in partition.alphabet.iter().enumerate() {
        for e in 1..=max_len as u32 {
            let pw = PowerWord { letter: l, exponent: e };
            let idx = partition.index_of(&pw.word()).expect("in ball");
            powers_by_class
                .entry(partition.class_of[idx])
                .or_default()
                .push((li, pw));
        }
    }
    let mut report = MergeReport::default();
    for (_, mut members) in powers_by_class {
        if members.len() < 2 {
            continue;
        }
        members.sort();
        for pair in members.windows(2) {
            let (left, right) = (pair[0].1, pair[1].1);
            let witness = partition
                .derivation(&left.word(), &right.word())
                .expect("same class");
            report.collisions.push(Collision { left, right, witness });
        }
    }
    Ok((partition, report))
}

/// Bounds for [`probe_eliminate`].
///
/// Each probe is explored twice: first with forward steps only (relations
/// read left to right), bounded by `depth`, `forward_maxlen` and
/// `max_nodes`; then in both directions, bounded by `depth`, `maxlen` and
/// `max_nodes`. Forward-only neighbourhoods are small, so they can afford a
/// longer word bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeLimits {
    pub depth: usize,
    pub maxlen: usize,
    pub forward_maxlen: usize,
    pub max_nodes: usize,
}

impl Default for ProbeLimits {
    fn default() -> Self {
        ProbeLimits {
            depth: 24,
            maxlen: 10,
            forward_maxlen: 64,
            max_nodes: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// Two distinct powers were derived from `probe`; `path` runs from
    /// `collision.left` through the probe to `collision.right`.
    Contradiction {
        probe: Word,
        left: PowerWord,
        right: PowerWord,
        path: Vec<RewriteStep>,
    },
    NoneFound,
}

impl ProbeVerdict {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, ProbeVerdict::Contradiction { .. })
    }
}

/// All words of lengths 3 and 4 over the alphabet, shortlex ordered.
pub fn default_probes(alphabet: &[Letter]) -> Vec<Word> {
    let mut out = Vec::new();
    for len in [3usize, 4] {
        let k = alphabet.len();
        for r in 0..k.pow(len as u32) {
            out.push(decode(alphabet, len, r));
        }
    }
    out
}

fn power_of(w: &[u8]) -> Option<PowerWord> {
    let first = w[0];
    w.iter().all(|&b| b == first).then(|| PowerWord {
        letter: Letter::new(first as char).expect("ascii"),
        exponent: w.len() as u32,
    })
}

/// BFS from `probe`; returns node ids of two distinct powers if found.
fn explore(probe: &[u8], rules: &[Rule], depth: usize, maxlen: usize, max_nodes: usize) -> (Tree, Option<(u32, u32)>) {
    let mut tree = Tree::new(probe);
    let mut first_power: Option<(u32, PowerWord)> = power_of(probe).map(|pw| (0, pw));
    let mut queue = VecDeque::from([0u32]);
    while let Some(node) = queue.pop_front() {
        if tree.depth[node as usize] as usize >= depth {
            continue;
        }
        let w = tree.words[node as usize].clone();
        for (next, ri, pos) in successors(&w, rules, maxlen) {
            if tree.len() >= max_nodes {
                return (tree, None);
            }
            let rule = &rules[ri];
            let link = NodeLink {
                parent: node,
                relation: rule.relation as u32,
                orientation: rule.orientation,
                position: pos as u32,
            };
            if let Some(id) = tree.insert(&next, link) {
                if let Some(pw) = power_of(&next) {
                    match first_power {
                        None => first_power = Some((id, pw)),
                        Some((fid, fpw)) if fpw != pw => return (tree, Some((fid, id))),
                        Some(_) => {}
                    }
                }
                queue.push_back(id);
            }
        }
    }
    (tree, None)
}

/// Searches the bounded derivation neighbourhood of each probe for two
/// distinct power words. Any hit is a genuine derivation, hence a
/// contradiction for a presentation that is meant to be a disjoint union of
/// free monogenic semigroups.
pub fn probe_eliminate(p: &Presentation, probes: &[Word], limits: &ProbeLimits) -> Result<ProbeVerdict, BoundsError> {
    if limits.depth == 0 {
        return Err(BoundsError::NonPositive("depth"));
    }
    if limits.maxlen == 0 {
        return Err(BoundsError::NonPositive("maxlen"));
    }
    if limits.max_nodes == 0 {
        return Err(BoundsError::NonPositive("max_nodes"));
    }
    for w in probes {
        if !p.is_over_alphabet(w) {
            return Err(BoundsError::ForeignWord(w.to_string()));
        }
    }
    let passes = [
        (compile(p, true), limits.forward_maxlen.max(limits.maxlen)),
        (compile(p, false), limits.maxlen),
    ];
    for (rules, maxlen) in &passes {
        for probe in probes {
            let (tree, hit) = explore(probe.as_bytes(), rules, limits.depth, *maxlen, limits.max_nodes);
            if let Some((a, b)) = hit {
                let left = power_of(&tree.words[a as usize]).expect("power");
                let right = power_of(&tree.words[b as usize]).expect("power");
                return Ok(ProbeVerdict::Contradiction {
                    probe: probe.clone(),
                    left,
                    right,
                    path: tree.path_between(a, b),
                });
            }
        }
    }
    Ok(ProbeVerdict::NoneFound)
}

/// Bounds for [`check_generator_map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapBounds {
    pub maxlen: usize,
    pub maxnodes: usize,
}

impl Default for MapBounds {
    fn default() -> Self {
        MapBounds {
            maxlen: 10,
            maxnodes: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MapVerdict {
    Ok,
    /// The image of `relation` is provably not a consequence: the whole
    /// class of its left side was enumerated.
    Fail { relation: usize },
    UnknownWithinBounds { relation: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("generator map is undefined on '{0}'")]
    Undefined(Letter),
    #[error("generator map sends '{0}' outside the target alphabet")]
    OutsideTarget(Letter),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Checks that every relation of `src`, pushed through `gmap`, is a
/// consequence of `dst`'s relations.
pub fn check_generator_map(
    src: &Presentation,
    dst: &Presentation,
    gmap: &BTreeMap<Letter, Letter>,
    bounds: &MapBounds,
) -> Result<MapVerdict, MapError> {
    for &l in src.alphabet() {
        let img = *gmap.get(&l).ok_or(MapError::Undefined(l))?;
        if !dst.contains_letter(img) {
            return Err(MapError::OutsideTarget(l));
        }
    }
    let image = |w: &Word| -> Word {
        let v: Vec<Letter> = w.letters().map(|l| gmap[&l]).collect();
        Word::from_letters(&v).expect("non-empty")
    };
    for (i, r) in src.relations().iter().enumerate() {
        match is_consequence(&image(&r.lhs), &image(&r.rhs), dst, bounds.maxlen, bounds.maxnodes)? {
            Consequence::Derivable { .. } => {}
            Consequence::UnknownWithinBounds { exhausted: true, .. } => {
                return Ok(MapVerdict::Fail { relation: i })
            }
            Consequence::UnknownWithinBounds { .. } => {
                return Ok(MapVerdict::UnknownWithinBounds { relation: i })
            }
        }
    }
    Ok(MapVerdict::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{instantiate_family, parse_presentation, Family, Params};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    fn pres(s: &str) -> Presentation {
        parse_presentation(s).unwrap()
    }

    fn f3i(i: u32, j: u32, k: u32) -> Presentation {
        let params = Params::new().with('i', i).with('j', j).with('k', k);
        instantiate_family(Family::ThreeI, &params).unwrap()
    }

    /// Family 3-i shape without the constraint check.
    fn f3i_shape(i: u32, j: u32, k: u32) -> Presentation {
        pres(&format!(
            "letters a b c; ab=a^{i}; ba=a^{i}; ac=a^{j}; ca=a^{j}; bc=a^{k}; cb=a^{k}"
        ))
    }

    #[test]
    fn one_step_examples() {
        let p = pres("letters a b; ab=aa");
        assert_eq!(one_step_rewrites(&w("aab"), &p), set(&["aaa", "abb"]));
        let p = pres("letters a b; ab=a^2; ba=b^2");
        assert_eq!(one_step_rewrites(&w("bb"), &p), set(&["ba"]));
        assert!(one_step_rewrites(&w("a"), &p).is_empty());
        assert!(one_step_rewrites(&w("a"), &f3i(2, 2, 2)).is_empty());
    }

    #[test]
    fn steps_are_valid_and_positioned() {
        let p = pres("letters a b; ab=aa");
        let steps = rewrite_steps(&w("aab"), &p);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].position, 0);
        assert_eq!(steps[0].orientation, Orientation::Backward);
        assert_eq!(steps[1].position, 1);
        assert_eq!(steps[1].orientation, Orientation::Forward);
        assert!(steps.iter().all(|s| s.is_valid(&p) && s.reversed().is_valid(&p)));
    }

    #[test]
    fn consequence_examples() {
        let p = pres("letters a b; ab=a^2; ba=a^2");
        match is_consequence(&w("ab"), &w("ba"), &p, 8, 1000).unwrap() {
            Consequence::Derivable { path } => {
                assert_eq!(path.len(), 2);
                assert_eq!(path[0].target, w("aa"));
                assert!(replay_path(&p, &w("ab"), &w("ba"), &path));
            }
            other => panic!("{other:?}"),
        }
        let p = f3i(2, 2, 2);
        let c = is_consequence(&w("abca"), &w("a^4"), &p, 8, 10_000).unwrap();
        let Consequence::Derivable { path } = c else { panic!() };
        assert!(replay_path(&p, &w("abca"), &w("aaaa"), &path));
        // a(bc)a = a a^2 a in a single step
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn consequence_never_asserts_negative() {
        let p = pres("letters a b; ab=a^2; ba=b^2");
        for (maxlen, maxnodes) in [(2, 10), (6, 1000), (12, 100_000)] {
            let c = is_consequence(&w("bb"), &w("aa"), &p, maxlen, maxnodes).unwrap();
            assert!(matches!(c, Consequence::UnknownWithinBounds { .. }));
        }
        assert_eq!(
            is_consequence(&w("a"), &w("b"), &p, 0, 1),
            Err(BoundsError::NonPositive("maxlen"))
        );
    }

    #[test]
    fn ball_two_generator_example() {
        let p = pres("letters a b; ab=a^2; ba=b^2");
        let (ball, report) = congruence_ball(&p, 3).unwrap();
        assert_eq!(ball.num_words(), 14);
        assert_eq!(ball.num_classes(), 6);
        assert!(report.is_empty());
        let classes: BTreeSet<BTreeSet<Word>> = ball
            .classes()
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        let expect: BTreeSet<BTreeSet<Word>> = [
            set(&["a"]),
            set(&["b"]),
            set(&["aa", "ab"]),
            set(&["bb", "ba"]),
            set(&["aaa", "aab", "aba", "abb"]),
            set(&["bbb", "bba", "bab", "baa"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(classes, expect);
    }

    #[test]
    fn ball_family_3i() {
        let (ball, report) = congruence_ball(&f3i(2, 2, 2), 4).unwrap();
        assert_eq!(ball.num_classes(), 12);
        assert!(report.is_empty());
    }

    #[test]
    fn ball_detects_constraint_violation() {
        let p = f3i_shape(2, 2, 3);
        let (ball, report) = congruence_ball(&p, 5).unwrap();
        let a = Letter::nth(0);
        assert!(report.contains(a, 4, a, 5), "{report:?}");
        for c in &report.collisions {
            assert!(replay_path(&p, &c.left.word(), &c.right.word(), &c.witness));
        }
        assert_eq!(ball.same_class(&w("abca"), &w("a^4")), Some(true));
        assert_eq!(ball.same_class(&w("abca"), &w("a^5")), Some(true));
    }

    #[test]
    fn ball_errors() {
        let p = f3i(2, 2, 2);
        assert_eq!(congruence_ball(&p, 0).unwrap_err(), BallError::ZeroLength);
        assert!(matches!(
            congruence_ball_capped(&p, 12, 1000),
            Err(BallError::TooLarge { .. })
        ));
    }

    #[test]
    fn ball_indexing_round_trips() {
        let (ball, _) = congruence_ball(&f3i(2, 2, 2), 4).unwrap();
        for i in 0..ball.num_words() {
            assert_eq!(ball.index_of(&ball.word_at(i)), Some(i));
        }
        assert!(ball.spanning_steps().iter().all(|s| s.is_valid(&f3i(2, 2, 2))));
    }

    #[test]
    fn probe_examples() {
        let p = pres("letters a b; ab=a^2; ba=a^3");
        let v = probe_eliminate(&p, &[w("aba")], &ProbeLimits::default()).unwrap();
        let ProbeVerdict::Contradiction { left, right, path, .. } = v else { panic!() };
        let a = Letter::nth(0);
        assert_eq!((left, right), (PowerWord { letter: a, exponent: 3 }, PowerWord { letter: a, exponent: 4 }));
        assert!(replay_path(&p, &left.word(), &right.word(), &path));

        let p = instantiate_family(Family::TwoII, &Params::new()).unwrap();
        let probes: Vec<Word> = default_probes(p.alphabet())
            .into_iter()
            .filter(|x| x.len() == 3)
            .collect();
        assert_eq!(probes.len(), 8);
        assert_eq!(
            probe_eliminate(&p, &probes, &ProbeLimits::default()).unwrap(),
            ProbeVerdict::NoneFound
        );

        let p = f3i_shape(2, 2, 3);
        let v = probe_eliminate(&p, &[w("abca")], &ProbeLimits::default()).unwrap();
        let ProbeVerdict::Contradiction { left, right, path, .. } = v else { panic!() };
        let mut exps = [left.exponent, right.exponent];
        exps.sort();
        assert_eq!(exps, [4, 5]);
        assert!(replay_path(&p, &left.word(), &right.word(), &path));
    }

    #[test]
    fn default_probe_count() {
        let abc: Vec<Letter> = (0..3).map(Letter::nth).collect();
        assert_eq!(default_probes(&abc).len(), 108);
    }

    #[test]
    fn generator_map_examples() {
        let p = instantiate_family(Family::TwoI, &Params::new().with('k', 2)).unwrap();
        let id: BTreeMap<Letter, Letter> = p.alphabet().iter().map(|&l| (l, l)).collect();
        assert_eq!(check_generator_map(&p, &p, &id, &MapBounds::default()).unwrap(), MapVerdict::Ok);

        let (a, b) = (Letter::nth(0), Letter::nth(1));
        let swap = BTreeMap::from([(a, b), (b, a)]);
        let p = pres("letters a b; ab=a^2; ba=b^2");
        assert_eq!(check_generator_map(&p, &p, &swap, &MapBounds::default()).unwrap(), MapVerdict::Ok);

        let p = pres("letters a b; ab=a^2; ba=a^2");
        let v = check_generator_map(&p, &p, &swap, &MapBounds::default()).unwrap();
        assert!(matches!(v, MapVerdict::Fail { .. } | MapVerdict::UnknownWithinBounds { .. }), "{v:?}");
        assert_ne!(v, MapVerdict::Ok);

        let partial = BTreeMap::from([(a, a)]);
        assert_eq!(
            check_generator_map(&p, &p, &partial, &MapBounds::default()),
            Err(MapError::Undefined(b))
        );
    }
}
