//! Type tuples, the symmetry group generated by relabelling generators and
//! reversing multiplication, and orbit enumeration under that group.
//!
//! The code handles both two generators (2 ordered pairs, group of order 4)
//! and three generators (6 ordered pairs, group of order 12).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::words::{generator_pairs, Letter};

/// Landing letter for each ordered pair of distinct generators, in the
/// fixed order (a,b),(b,a),(a,c),(c,a),(b,c),(c,b) (just (a,b),(b,a) for two
/// generators). Entries are generator indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTuple {
    gens: u8,
    entries: [u8; 6],
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("a type has 2 or 6 entries, got {0}")]
    BadLength(usize),
    #[error("'{0}' is not a generator of this type")]
    BadLetter(char),
}

/// Position of the ordered pair `(x, y)` in the fixed order.
pub fn pair_index(gens: usize, x: usize, y: usize) -> usize {
    generator_pairs(gens)
        .iter()
        .position(|&p| p == (x, y))
        .expect("distinct generators")
}

impl TypeTuple {
    pub fn new(gens: usize, entries: &[u8]) -> Result<TypeTuple, TypeError> {
        let n_pairs = gens * (gens - 1);
        if !(gens == 2 || gens == 3) || entries.len() != n_pairs {
            return Err(TypeError::BadLength(entries.len()));
        }
        let mut e = [0u8; 6];
        for (slot, &v) in e.iter_mut().zip(entries) {
            if v as usize >= gens {
                return Err(TypeError::BadLetter((b'a' + v) as char));
            }
            *slot = v;
        }
        Ok(TypeTuple {
            gens: gens as u8,
            entries: e,
        })
    }

    /// Parses `"aaaabb"` (three generators) or `"ab"` (two).
    pub fn parse(s: &str) -> Result<TypeTuple, TypeError> {
        let gens = match s.len() {
            2 => 2,
            6 => 3,
            n => return Err(TypeError::BadLength(n)),
        };
        let mut e = Vec::with_capacity(6);
        for c in s.chars() {
            if !c.is_ascii_lowercase() || (c as u8 - b'a') as usize >= gens {
                return Err(TypeError::BadLetter(c));
            }
            e.push(c as u8 - b'a');
        }
        TypeTuple::new(gens, &e)
    }

    /// All `gens^(#pairs)` tuples in lexicographic order.
    pub fn all(gens: usize) -> Vec<TypeTuple> {
        let n_pairs = gens * (gens - 1);
        let total = gens.pow(n_pairs as u32);
        (0..total)
            .map(|mut r| {
                let mut e = vec![0u8; n_pairs];
                for slot in e.iter_mut().rev() {
                    *slot = (r % gens) as u8;
                    r /= gens;
                }
                TypeTuple::new(gens, &e).expect("in range")
            })
            .collect()
    }

    pub fn gens(&self) -> usize {
        self.gens as usize
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries[..self.gens() * (self.gens() - 1)]
    }

    pub fn landing_letters(&self) -> Vec<Letter> {
        self.entries().iter().map(|&e| Letter::nth(e as usize)).collect()
    }

    /// Landing generator of `xy`, for distinct generator indices.
    pub fn landing(&self, x: usize, y: usize) -> usize {
        self.entries[pair_index(self.gens(), x, y)] as usize
    }
}

impl fmt::Display for TypeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in self.entries() {
            write!(f, "{}", (b'a' + e) as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TypeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeTuple({self})")
    }
}

impl Serialize for TypeTuple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A relabelling `perm` of the generators (`perm[x]` is the image of `x`)
/// combined with an optional reversal of multiplication.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symmetry {
    gens: u8,
    perm: [u8; 3],
    reversed: bool,
}

impl Symmetry {
    pub fn identity(gens: usize) -> Symmetry {
        Symmetry {
            gens: gens as u8,
            perm: [0, 1, 2],
            reversed: false,
        }
    }

    pub fn reversal(gens: usize) -> Symmetry {
        Symmetry {
            reversed: true,
            ..Symmetry::identity(gens)
        }
    }

    /// Relabelling given by images, e.g. `[2, 0, 1]` sends a to c, b to a,
    /// c to b. Returns `None` unless `images` is a permutation.
    pub fn relabel(images: &[u8]) -> Option<Symmetry> {
        let gens = images.len();
        if !(gens == 2 || gens == 3) {
            return None;
        }
        let seen: BTreeSet<u8> = images.iter().copied().collect();
        if seen.len() != gens || images.iter().any(|&i| i as usize >= gens) {
            return None;
        }
        let mut perm = [0, 1, 2];
        perm[..gens].copy_from_slice(images);
        Some(Symmetry {
            gens: gens as u8,
            perm,
            reversed: false,
        })
    }

    /// Parses cycle notation over generator letters, e.g. `(cba)` or
    /// `(ab)(c)`; `()` is the identity.
    pub fn from_cycles(gens: usize, s: &str) -> Option<Symmetry> {
        let mut images: Vec<u8> = (0..gens as u8).collect();
        let mut seen = BTreeSet::new();
        for cycle in s.split(')').map(|c| c.trim()).filter(|c| !c.is_empty()) {
            let body = cycle.strip_prefix('(')?;
            let letters: Vec<u8> = body.bytes().map(|b| b.wrapping_sub(b'a')).collect();
            if letters.iter().any(|&l| l as usize >= gens || !seen.insert(l)) {
                return None;
            }
            for (i, &l) in letters.iter().enumerate() {
                images[l as usize] = letters[(i + 1) % letters.len()];
            }
        }
        Symmetry::relabel(&images)
    }

    pub fn with_reversal(mut self, reversed: bool) -> Symmetry {
        self.reversed = reversed;
        self
    }

    pub fn gens(&self) -> usize {
        self.gens as usize
    }

    pub fn image(&self, x: usize) -> usize {
        self.perm[x] as usize
    }

    pub fn is_reversal(&self) -> bool {
        self.reversed
    }

    pub fn inverse(&self) -> Symmetry {
        let mut perm = [0, 1, 2];
        for x in 0..self.gens() {
            perm[self.perm[x] as usize] = x as u8;
        }
        Symmetry { perm, ..*self }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Symmetry) -> Symmetry {
        assert_eq!(self.gens, other.gens);
        let mut perm = [0, 1, 2];
        for (x, slot) in perm.iter_mut().enumerate().take(self.gens()) {
            *slot = self.perm[other.perm[x] as usize];
        }
        Symmetry {
            gens: self.gens,
            perm,
            reversed: self.reversed ^ other.reversed,
        }
    }

    /// Moves pair-indexed data: the value at `(x, y)` ends up at
    /// `(σx, σy)`, or at `(σy, σx)` when reversing.
    pub fn permute_pairs<T: Clone>(&self, data: &[T]) -> Vec<T> {
        let gens = self.gens();
        let pairs = generator_pairs(gens);
        assert_eq!(data.len(), pairs.len());
        let inv = self.inverse();
        pairs
            .iter()
            .map(|&(x, y)| {
                let (x, y) = if self.reversed { (y, x) } else { (x, y) };
                data[pair_index(gens, inv.image(x), inv.image(y))].clone()
            })
            .collect()
    }

    /// Displays the relabelling in cycle notation (fixed points omitted),
    /// with an `r` suffix for reversal.
    pub fn cycle_string(&self) -> String {
        let gens = self.gens();
        let mut seen = [false; 3];
        let mut s = String::new();
        for start in 0..gens {
            if seen[start] || self.image(start) == start {
                continue;
            }
            s.push('(');
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                s.push((b'a' + x as u8) as char);
                x = self.image(x);
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        if self.reversed {
            s.push('r');
        }
        s
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_string())
    }
}

impl fmt::Debug for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symmetry({self})")
    }
}

impl Serialize for Symmetry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All `gens! * 2` symmetries, relabellings in lexicographic order of
/// their image lists, identity first, then the same list with reversal.
pub fn group(gens: usize) -> Vec<Symmetry> {
    let perms: Vec<Vec<u8>> = match gens {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        _ => panic!("only two or three generators are supported"),
    };
    let mut out = Vec::new();
    for reversed in [false, true] {
        for p in &perms {
            out.push(Symmetry::relabel(p).expect("permutation").with_reversal(reversed));
        }
    }
    out
}

/// Relabels and/or reverses a type: `result(σx, σy) = σ(T(x, y))`, and
/// reversal swaps each pair `(x,y)` with `(y,x)`.
pub fn apply_symmetry(g: &Symmetry, t: &TypeTuple) -> TypeTuple {
    assert_eq!(g.gens(), t.gens());
    let moved = g.permute_pairs(t.entries());
    let relabelled: Vec<u8> = moved.iter().map(|&e| g.image(e as usize) as u8).collect();
    TypeTuple::new(t.gens(), &relabelled).expect("symmetry preserves shape")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub representative: TypeTuple,
    pub members: Vec<TypeTuple>,
    pub size: usize,
}

pub fn orbit_of(t: &TypeTuple) -> BTreeSet<TypeTuple> {
    group(t.gens()).iter().map(|g| apply_symmetry(g, t)).collect()
}

/// Lexicographically least member of the orbit of `t`.
pub fn canonical_rep(t: &TypeTuple) -> TypeTuple {
    *orbit_of(t).iter().next().expect("orbit contains t")
}

/// A symmetry carrying `t` to its canonical representative (the first in
/// group order).
pub fn to_canonical(t: &TypeTuple) -> Symmetry {
    let c = canonical_rep(t);
    *group(t.gens())
        .iter()
        .find(|g| apply_symmetry(g, t) == c)
        .expect("canonical rep lies in the orbit")
}

/// The orbits of all types, ordered by representative.
pub fn orbits(gens: usize) -> Vec<Orbit> {
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for t in TypeTuple::all(gens) {
        if done.contains(&t) {
            continue;
        }
        let members: Vec<TypeTuple> = orbit_of(&t).into_iter().collect();
        done.extend(members.iter().copied());
        out.push(Orbit {
            representative: members[0],
            size: members.len(),
            members,
        });
    }
    out.sort_by_key(|o| o.representative);
    out
}

/// Orbit count by Burnside's lemma, with the per-element fixed-point
/// counts in [`group`] order.
pub fn burnside_count(gens: usize) -> (usize, Vec<usize>) {
    let all = TypeTuple::all(gens);
    let g = group(gens);
    let fixed: Vec<usize> = g
        .iter()
        .map(|s| all.iter().filter(|t| apply_symmetry(s, t) == **t).count())
        .collect();
    let total: usize = fixed.iter().sum();
    assert_eq!(total % g.len(), 0, "Burnside sum divisible by group order");
    (total / g.len(), fixed)
}

/// Unordered generator pairs `{x, y}` (with `x < y`) whose two products
/// both land in `<x> ∪ <y>`.
pub fn closed_pairs(t: &TypeTuple) -> Vec<(usize, usize)> {
    let gens = t.gens();
    let mut out = Vec::new();
    for x in 0..gens {
        for y in x + 1..gens {
            let inside = |z: usize| z == x || z == y;
            if inside(t.landing(x, y)) && inside(t.landing(y, x)) {
                out.push((x, y));
            }
        }
    }
    out
}
