//! Independent oracles and shared exhaustive checks for the integration
//! suites. Nothing here calls the library's search code: balls are rebuilt by
//! plain string replacement, symmetries act on presentations rather than on
//! tuples, and weights are summed letter by letter.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use monogenic::certs::{
    check_irreducible_generator, check_suffix_invariant, validate_weight_witness, verify_instance, AffixInvariant,
    AffixSide, DisjointnessEvidence, Weight, WeightWitness,
};
use monogenic::rewrite::{congruence_ball, one_step_rewrites, BallPartition};
use monogenic::typespace::{apply_symmetry, closed_pairs, group, TypeTuple};
use monogenic::{instantiate_family, Family, Letter, Params, Presentation, Word};

/// Every assignment of `1..=bound` to the family's parameters that meets its
/// constraint, in lexicographic order of the parameter values.
pub fn family_params(f: Family, bound: u32) -> Vec<Params> {
    let names = f.param_names();
    let mut out = Vec::new();
    let mut vals = vec![1u32; names.len()];
    loop {
        let p = names.iter().zip(&vals).fold(Params::new(), |acc, (&n, &v)| acc.with(n, v));
        if f.constraint_holds(&p) {
            out.push(p);
        }
        let mut i = names.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] <= bound {
                break;
            }
            vals[i] = 1;
        }
    }
}

/// All valid family instances with parameters up to `bound`.
pub fn family_instances(bound: u32) -> Vec<(Family, Params, Presentation)> {
    Family::ALL
        .iter()
        .flat_map(|&f| {
            family_params(f, bound)
                .into_iter()
                .map(move |p| (f, p.clone(), instantiate_family(f, &p).unwrap()))
        })
        .collect()
}

fn words_up_to(alphabet: &[char], len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |&c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The congruence on words of length `<= len`, closed under in-ball rewrites,
/// computed by substring replacement and a union-find. Maps each word to the
/// shortlex-least member of its class.
pub fn naive_ball(p: &Presentation, len: usize) -> HashMap<String, String> {
    let alphabet: Vec<char> = p.alphabet().iter().map(|l| l.as_char()).collect();
    let words = words_up_to(&alphabet, len);
    let index: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    let sides: Vec<(String, String)> = p
        .relations()
        .iter()
        .flat_map(|r| {
            let (l, rr) = (r.lhs.to_string(), r.rhs.to_string());
            [(l.clone(), rr.clone()), (rr, l)]
        })
        .collect();
    for (i, w) in words.iter().enumerate() {
        for (from, to) in &sides {
            // every occurrence, including overlapping ones
            for pos in (0..=w.len().saturating_sub(from.len())).filter(|&i| w[i..].starts_with(from.as_str())) {
                let next = format!("{}{}{}", &w[..pos], to, &w[pos + from.len()..]);
                if let Some(&j) = index.get(next.as_str()) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    let mut least: HashMap<usize, String> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let root = find(&mut parent, i);
        let e = least.entry(root).or_insert_with(|| w.clone());
        if (w.len(), w) < (e.len(), &*e) {
            *e = w.clone();
        }
    }
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let root = find(&mut parent, i);
            (w.clone(), least[&root].clone())
        })
        .collect()
}

/// Whether the library ball and the oracle induce the same partition.
pub fn ball_matches_oracle(p: &Presentation, len: usize) -> bool {
    let (ball, _) = congruence_ball(p, len).unwrap();
    let oracle = naive_ball(p, len);
    let mut lib_to_oracle: HashMap<usize, &String> = HashMap::new();
    let mut oracle_to_lib: HashMap<&String, usize> = HashMap::new();
    for (w, rep) in &oracle {
        let c = ball.class_of(&Word::parse(w).unwrap()).unwrap();
        if *lib_to_oracle.entry(c).or_insert(rep) != rep || *oracle_to_lib.entry(rep).or_insert(c) != c {
            return false;
        }
    }
    ball.num_words() == oracle.len()
}

/// Number of classes in the oracle ball.
pub fn naive_class_count(p: &Presentation, len: usize) -> usize {
    naive_ball(p, len).values().collect::<BTreeSet<_>>().len()
}

/// The presentation `xy = T(x,y)^1` of a type, as (lhs, landing) strings.
fn type_relations(t: &TypeTuple) -> Vec<(String, char)> {
    let s = t.to_string();
    let gens = t.gens();
    let mut pairs = Vec::new();
    for x in 0..gens {
        for y in x + 1..gens {
            pairs.push((x, y));
            pairs.push((y, x));
        }
    }
    pairs
        .iter()
        .zip(s.chars())
        .map(|(&(x, y), z)| (format!("{}{}", (b'a' + x as u8) as char, (b'a' + y as u8) as char), z))
        .collect()
}

/// Applies a relabelling (`perm[x]` = image of generator x) and optional
/// reversal to the presentation of a type, then reads the type back off.
pub fn oracle_transform(t: &TypeTuple, perm: &[u8], reversed: bool) -> TypeTuple {
    let map = |c: char| (b'a' + perm[(c as u8 - b'a') as usize]) as char;
    let mut landing: BTreeMap<String, char> = BTreeMap::new();
    for (lhs, z) in type_relations(t) {
        let mut l: String = lhs.chars().map(map).collect();
        if reversed {
            l = l.chars().rev().collect();
        }
        landing.insert(l, map(z));
    }
    let order: String = type_relations(t).iter().map(|(lhs, _)| landing[lhs]).collect();
    TypeTuple::parse(&order).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, (n - 1) as u8);
            out.push(q);
        }
    }
    out
}

/// The orbit of `t` under all relabellings and reversal, via presentations.
pub fn oracle_orbit(t: &TypeTuple) -> BTreeSet<TypeTuple> {
    let mut out = BTreeSet::new();
    for perm in permutations(t.gens()) {
        for rev in [false, true] {
            out.insert(oracle_transform(t, &perm, rev));
        }
    }
    out
}

pub fn oracle_orbit_count(gens: usize) -> usize {
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for t in TypeTuple::all(gens) {
        if seen.insert(t) {
            count += 1;
            seen.extend(oracle_orbit(&t));
        }
    }
    count
}

/// Closed pairs computed from the relation list.
pub fn oracle_has_closed_pair(t: &TypeTuple) -> bool {
    let rels: HashMap<String, char> = type_relations(t).into_iter().collect();
    let gens: Vec<char> = (0..t.gens()).map(|i| (b'a' + i as u8) as char).collect();
    gens.iter().enumerate().any(|(i, &x)| {
        gens[i + 1..].iter().any(|&y| {
            let ok = |z: char| z == x || z == y;
            ok(rels[&format!("{x}{y}")]) && ok(rels[&format!("{y}{x}")])
        })
    })
}

/// Weight of a word, summed letter by letter with an absorbing sink.
pub fn oracle_weight(w: &WeightWitness, word: &str) -> Option<u64> {
    let mut total = 0u64;
    for c in word.chars() {
        match w.weight(Letter::new(c).unwrap()).unwrap() {
            Weight::Finite(n) => total += n,
            Weight::Sink => return None,
        }
    }
    Some(total)
}

fn classes_of(ball: &BallPartition) -> Vec<Vec<String>> {
    ball.classes()
        .iter()
        .map(|c| c.iter().map(|w| w.to_string()).collect())
        .collect()
}

/// A named pass/fail check with a detail line on failure.
pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `v` is a one-step rewrite of `u` exactly when `u` is one of `v`, for
/// every word up to length `len` of every instance.
pub fn check_rewriting_symmetry(instances: &[(Family, Params, Presentation)], len: usize) -> Check {
    for (f, params, p) in instances {
        let alphabet: Vec<char> = p.alphabet().iter().map(|l| l.as_char()).collect();
        for w in words_up_to(&alphabet, len) {
            let u = Word::parse(&w).unwrap();
            for v in one_step_rewrites(&u, p) {
                ensure(one_step_rewrites(&v, p).contains(&u), || {
                    format!("{f} {params}: {u} -> {v} has no inverse step")
                })?;
            }
        }
    }
    Ok(())
}

/// Words equal in the ball of radius `l` stay equal at radius `l + 1`.
pub fn check_ball_monotonicity(p: &Presentation, max_len: usize) -> Check {
    for l in 1..max_len {
        let (small, _) = congruence_ball(p, l).unwrap();
        let (big, _) = congruence_ball(p, l + 1).unwrap();
        for class in classes_of(&small) {
            let first = Word::parse(&class[0]).unwrap();
            for w in &class[1..] {
                ensure(big.same_class(&first, &Word::parse(w).unwrap()) == Some(true), || {
                    format!("{first} ~ {w} at length {l} but not at {}", l + 1)
                })?;
            }
        }
    }
    Ok(())
}

/// Identity acts trivially and the action respects composition, for every
/// pair of group elements and every type.
pub fn check_group_action_laws(gens: usize) -> Check {
    let g = group(gens);
    for t in TypeTuple::all(gens) {
        for s in &g {
            for h in &g {
                let lhs = apply_symmetry(&s.compose(h), &t);
                let rhs = apply_symmetry(s, &apply_symmetry(h, &t));
                ensure(lhs == rhs, || format!("composition law fails for {t}"))?;
            }
            ensure(apply_symmetry(&s.inverse(), &apply_symmetry(s, &t)) == t, || {
                format!("inverse law fails for {t}")
            })?;
        }
        ensure(apply_symmetry(&g[0], &t) == t, || format!("identity moves {t}"))?;
    }
    Ok(())
}

/// The library orbit of each type agrees with the presentation-level oracle,
/// and closed pairs move with the relabelling.
pub fn check_orbit_equivariance(gens: usize) -> Check {
    for t in TypeTuple::all(gens) {
        let lib: BTreeSet<TypeTuple> = group(gens).iter().map(|g| apply_symmetry(g, &t)).collect();
        ensure(lib == oracle_orbit(&t), || format!("orbit of {t} differs from the oracle"))?;
        for g in group(gens) {
            let moved: BTreeSet<(usize, usize)> = closed_pairs(&t)
                .iter()
                .map(|&(x, y)| {
                    let (a, b) = (g.image(x), g.image(y));
                    (a.min(b), a.max(b))
                })
                .collect();
            let direct: BTreeSet<(usize, usize)> = closed_pairs(&apply_symmetry(&g, &t)).into_iter().collect();
            ensure(moved == direct, || format!("closed pairs of {t} not equivariant"))?;
        }
    }
    Ok(())
}

/// Every witness in every bundle is constant on the classes of the ball.
pub fn check_witness_soundness(instances: &[(Family, Params, Presentation)], len: usize) -> Check {
    for (f, params, p) in instances {
        let bundle = verify_instance(p).map_err(|e| format!("{f} {params}: {e}"))?;
        let (ball, _) = congruence_ball(p, len).unwrap();
        for ev in &bundle.infinite {
            ensure(validate_weight_witness(p, &ev.witness).is_ok(), || {
                format!("{f} {params}: witness {} rejected", ev.witness)
            })?;
            for class in classes_of(&ball) {
                let weights: BTreeSet<Option<u64>> = class.iter().map(|w| oracle_weight(&ev.witness, w)).collect();
                ensure(weights.len() == 1, || {
                    format!("{f} {params}: witness {} not constant on class of {}", ev.witness, class[0])
                })?;
            }
        }
    }
    Ok(())
}

fn affix_of(side: AffixSide, w: &str) -> String {
    match side {
        AffixSide::Suffix => w[w.len() - 2..].to_string(),
        AffixSide::Prefix => w[..2].to_string(),
    }
}

/// Every affix invariant that checks out splits each ball class cleanly.
pub fn check_affix_soundness(instances: &[(Family, Params, Presentation)], len: usize) -> Check {
    for (f, params, p) in instances {
        let bundle = verify_instance(p).map_err(|e| format!("{f} {params}: {e}"))?;
        let invariants: Vec<&AffixInvariant> = bundle
            .disjoint
            .iter()
            .filter_map(|d| match d {
                DisjointnessEvidence::Affix { invariant, .. } => Some(invariant),
                _ => None,
            })
            .collect();
        if invariants.is_empty() {
            continue;
        }
        let (ball, _) = congruence_ball(p, len).unwrap();
        for inv in invariants {
            ensure(check_suffix_invariant(p, inv) == Ok(Ok(())), || format!("{f}: invariant rejected"))?;
            let set: BTreeSet<String> = inv.set.iter().map(|w| w.to_string()).collect();
            for class in classes_of(&ball) {
                let flags: BTreeSet<bool> = class
                    .iter()
                    .filter(|w| w.len() >= 2)
                    .map(|w| set.contains(&affix_of(inv.side, w)))
                    .collect();
                ensure(flags.len() <= 1, || format!("{f} {params}: class of {} splits on {set:?}", class[0]))?;
            }
        }
    }
    Ok(())
}

/// If no relation side is a power of `x`, every `x^n` is alone in its class.
pub fn check_irreducibility_soundness(instances: &[(Family, Params, Presentation)], len: usize) -> Check {
    for (f, params, p) in instances {
        let (ball, _) = congruence_ball(p, len).unwrap();
        for &x in p.alphabet() {
            if check_irreducible_generator(p, x).is_err() {
                continue;
            }
            for n in 1..=len as u32 {
                let c = ball.class_of(&Word::power(x, n)).unwrap();
                ensure(ball.class_members(c).len() == 1, || {
                    format!("{f} {params}: {x}^{n} is irreducible but has company")
                })?;
            }
        }
    }
    Ok(())
}

/// Whether `w` is a positive rational multiple of `base` (sinks in the
/// same places, finite weights proportional).
pub fn is_proportional(w: &WeightWitness, base: &WeightWitness) -> bool {
    let finite = |x: &WeightWitness| -> u64 {
        x.weights()
            .values()
            .map(|v| match v {
                Weight::Finite(n) => *n,
                Weight::Sink => 0,
            })
            .sum()
    };
    let (sw, sb) = (finite(w), finite(base));
    sw > 0
        && sb > 0
        && base.weights().iter().all(|(l, b)| match (b, w.weight(*l)) {
            (Weight::Sink, Some(Weight::Sink)) => true,
            (Weight::Finite(x), Some(Weight::Finite(y))) => x * sw == y * sb,
            _ => false,
        })
}
