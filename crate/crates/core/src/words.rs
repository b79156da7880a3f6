//! Letters, words, relations and presentations, plus the parameterized
//! presentation families of the two- and three-copy classifications.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A single-character generator symbol (ASCII alphabetic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(c: char) -> Option<Letter> {
        if c.is_ascii_alphabetic() {
            Some(Letter(c as u8))
        } else {
            None
        }
    }

    /// The `i`-th lowercase generator: 0 is `a`, 1 is `b`, ...
    pub fn nth(i: usize) -> Letter {
        assert!(i < 26, "generator index out of range");
        Letter(b'a' + i as u8)
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }

    pub fn byte(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A non-empty word over some alphabet, stored flat.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn from_letters(letters: &[Letter]) -> Option<Word> {
        if letters.is_empty() {
            None
        } else {
            Some(Word(letters.iter().map(|l| l.0).collect()))
        }
    }

    /// Builds a word from raw ASCII letter bytes. Panics on empty input or
    /// non-alphabetic bytes.
    pub fn from_bytes(bytes: &[u8]) -> Word {
        assert!(!bytes.is_empty(), "words are non-empty");
        assert!(bytes.iter().all(u8::is_ascii_alphabetic));
        Word(bytes.to_vec())
    }

    pub(crate) fn from_vec_unchecked(bytes: Vec<u8>) -> Word {
        debug_assert!(!bytes.is_empty());
        Word(bytes)
    }

    pub fn power(letter: Letter, exponent: u32) -> Word {
        assert!(exponent >= 1, "exponents are positive");
        Word(vec![letter.0; exponent as usize])
    }

    /// Parses a flat word or power notation such as `a^2bc^3`.
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        let mut p = Parser::new(text);
        let w = p.word()?;
        p.skip_ws();
        if let Some((pos, c)) = p.peek() {
            return Err(ParseError::Syntax {
                position: pos,
                message: format!("unexpected character '{c}'"),
            });
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        self.0.iter().map(|&b| Letter(b))
    }

    pub fn first(&self) -> Letter {
        Letter(self.0[0])
    }

    pub fn last(&self) -> Letter {
        Letter(self.0[self.0.len() - 1])
    }

    /// Run-length view: maximal blocks of equal letters.
    pub fn runs(&self) -> Vec<(Letter, u32)> {
        let mut out: Vec<(Letter, u32)> = Vec::new();
        for &b in &self.0 {
            match out.last_mut() {
                Some((l, n)) if l.0 == b => *n += 1,
                _ => out.push((Letter(b), 1)),
            }
        }
        out
    }

    pub fn from_runs(runs: &[(Letter, u32)]) -> Option<Word> {
        let mut v = Vec::new();
        for &(l, n) in runs {
            v.extend(std::iter::repeat_n(l.0, n as usize));
        }
        if v.is_empty() {
            None
        } else {
            Some(Word(v))
        }
    }

    /// `Some((x, n))` when the word is `x^n`.
    pub fn as_power(&self) -> Option<(Letter, u32)> {
        let first = self.0[0];
        if self.0.iter().all(|&b| b == first) {
            Some((Letter(first), self.0.len() as u32))
        } else {
            None
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Power notation, e.g. `a^2bc`.
    pub fn to_power_string(&self) -> String {
        let mut s = String::new();
        for (l, n) in self.runs() {
            s.push(l.as_char());
            if n > 1 {
                s.push('^');
                s.push_str(&n.to_string());
            }
        }
        s
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Letters are ASCII by construction.
        f.write_str(std::str::from_utf8(&self.0).expect("ascii word"))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(lhs: Word, rhs: Word) -> Relation {
        Relation { lhs, rhs }
    }

    /// The pair with its sides in lexicographic order.
    pub fn normalized(&self) -> (&Word, &Word) {
        if self.lhs <= self.rhs {
            (&self.lhs, &self.rhs)
        } else {
            (&self.rhs, &self.lhs)
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.lhs.to_power_string(), self.rhs.to_power_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("empty relation side at byte {position}")]
    EmptySide { position: usize },
    #[error("letter '{letter}' is not declared in the alphabet")]
    UndeclaredLetter { letter: char },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("letter '{0}' declared twice")]
    DuplicateLetter(Letter),
    #[error("letter '{letter}' in relation {index} is not in the alphabet")]
    UndeclaredLetter { index: usize, letter: Letter },
    #[error("relation {index} ({relation}) duplicates an earlier relation")]
    DuplicateRelation { index: usize, relation: String },
}

/// A finite presentation `<A | R>`, optionally tagged with the family it
/// was instantiated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Vec<Letter>,
    relations: Vec<Relation>,
    family: Option<FamilyTag>,
}

impl Presentation {
    pub fn new(alphabet: Vec<Letter>, relations: Vec<Relation>) -> Result<Self, PresentationError> {
        if alphabet.is_empty() {
            return Err(PresentationError::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for &l in &alphabet {
            if !seen.insert(l) {
                return Err(PresentationError::DuplicateLetter(l));
            }
        }
        let mut pairs = BTreeSet::new();
        for (index, r) in relations.iter().enumerate() {
            for letter in r.lhs.letters().chain(r.rhs.letters()) {
                if !seen.contains(&letter) {
                    return Err(PresentationError::UndeclaredLetter { index, letter });
                }
            }
            let (u, v) = r.normalized();
            if !pairs.insert((u.clone(), v.clone())) {
                return Err(PresentationError::DuplicateRelation {
                    index,
                    relation: r.to_string(),
                });
            }
        }
        Ok(Presentation {
            alphabet,
            relations,
            family: None,
        })
    }

    pub fn with_family(mut self, tag: FamilyTag) -> Self {
        self.family = Some(tag);
        self
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.alphabet.contains(&l)
    }

    pub fn is_over_alphabet(&self, w: &Word) -> bool {
        w.letters().all(|l| self.contains_letter(l))
    }

    /// The anti-isomorphic presentation: every relation side reversed.
    pub fn reversed(&self) -> Presentation {
        Presentation {
            alphabet: self.alphabet.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation::new(r.lhs.reversed(), r.rhs.reversed()))
                .collect(),
            family: None,
        }
    }

    /// Renders in the text format accepted by [`parse_presentation`].
    pub fn render(&self) -> String {
        let mut s = String::from("letters");
        for l in &self.alphabet {
            s.push(' ');
            s.push(l.as_char());
        }
        for r in &self.relations {
            s.push_str("; ");
            s.push_str(&r.to_string());
        }
        s
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, l) in self.alphabet.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(" | ")?;
        for (i, r) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(">")
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, char)> {
        self.src[self.pos..].chars().next().map(|c| (self.pos, c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some((_, c)) = self.peek() {
            if c.is_whitespace() && c != '\n' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some((_, c)) = self.peek() {
            if c.is_ascii_digit() {
                self.bump();
            } else {
                break;
            }
        }
        let digits = &self.src[start..self.pos];
        match digits.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(n),
            Ok(_) => Err(ParseError::Syntax {
                position: start,
                message: "exponent must be a positive integer".into(),
            }),
            Err(_) => Err(ParseError::Syntax {
                position: start,
                message: "expected exponent after '^'".into(),
            }),
        }
    }

    /// Parses a (possibly empty) word up to a delimiter.
    fn word_opt(&mut self) -> Result<Vec<u8>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some((_, c)) if c.is_ascii_alphabetic() => {
                    self.bump();
                    self.skip_ws();
                    let n = if let Some((_, '^')) = self.peek() {
                        self.bump();
                        self.number()?
                    } else {
                        1
                    };
                    out.extend(std::iter::repeat_n(c as u8, n as usize));
                }
                Some((pos, '^')) => {
                    return Err(ParseError::Syntax {
                        position: pos,
                        message: "'^' must follow a letter".into(),
                    })
                }
                _ => return Ok(out),
            }
        }
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        let position = self.pos;
        let v = self.word_opt()?;
        if v.is_empty() {
            return Err(ParseError::EmptySide { position });
        }
        Ok(Word(v))
    }
}

/// Parses `letters a b c; ab=a^2; ...`. Statements are separated by `;` or
/// newlines; whitespace is insignificant.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut alphabet: Option<Vec<Letter>> = None;
    let mut relations = Vec::new();
    let mut offset = 0;
    for stmt in text.split([';', '\n']) {
        let base = offset;
        offset += stmt.len() + 1;
        let trimmed = stmt.trim_start();
        let lead = stmt.len() - trimmed.len();
        if trimmed.trim().is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("letters") {
            if alphabet.is_some() {
                return Err(ParseError::Syntax {
                    position: base + lead,
                    message: "duplicate 'letters' header".into(),
                });
            }
            let rest_base = base + lead + "letters".len();
            let mut letters = Vec::new();
            for (i, c) in rest.char_indices() {
                if c.is_whitespace() {
                    continue;
                }
                match Letter::new(c) {
                    Some(l) => letters.push(l),
                    None => {
                        return Err(ParseError::Syntax {
                            position: rest_base + i,
                            message: format!("'{c}' is not a valid letter"),
                        })
                    }
                }
            }
            alphabet = Some(letters);
            continue;
        }
        let Some(letters) = alphabet.as_ref() else {
            return Err(ParseError::Syntax {
                position: base + lead,
                message: "expected 'letters' header before relations".into(),
            });
        };
        let mut p = Parser::new(stmt);
        p.skip_ws();
        let lhs_pos = p.pos;
        let lhs = p.word_opt()?;
        p.skip_ws();
        match p.peek() {
            Some((_, '=')) => {
                p.bump();
            }
            Some((pos, c)) => {
                return Err(ParseError::Syntax {
                    position: base + pos,
                    message: format!("expected '=', found '{c}'"),
                })
            }
            None => {
                return Err(ParseError::Syntax {
                    position: base + p.pos,
                    message: "expected '='".into(),
                })
            }
        }
        p.skip_ws();
        let rhs_pos = p.pos;
        let rhs = p.word_opt()?;
        p.skip_ws();
        if let Some((pos, c)) = p.peek() {
            return Err(ParseError::Syntax {
                position: base + pos,
                message: format!("unexpected character '{c}'"),
            });
        }
        if lhs.is_empty() {
            return Err(ParseError::EmptySide { position: base + lhs_pos });
        }
        if rhs.is_empty() {
            return Err(ParseError::EmptySide { position: base + rhs_pos });
        }
        for &b in lhs.iter().chain(&rhs) {
            if !letters.contains(&Letter(b)) {
                return Err(ParseError::UndeclaredLetter { letter: b as char });
            }
        }
        relations.push(Relation::new(Word(lhs), Word(rhs)));
    }
    let alphabet = alphabet.ok_or(ParseError::Syntax {
        position: 0,
        message: "missing 'letters' header".into(),
    })?;
    Ok(Presentation::new(alphabet, relations)?)
}

/// Exponent assignment, keyed by parameter name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params(BTreeMap<char, u32>);

impl Params {
    pub fn new() -> Self {
        Params(BTreeMap::new())
    }

    pub fn with(mut self, name: char, value: u32) -> Self {
        self.0.insert(name, value);
        self
    }

    pub fn get(&self, name: char) -> Option<u32> {
        self.0.get(&name).copied()
    }

    pub fn insert(&mut self, name: char, value: u32) -> Option<u32> {
        self.0.insert(name, value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, u32)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `i=2,j=3,k=3`.
    pub fn parse(text: &str) -> Result<Params, String> {
        let mut out = Params::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got '{item}'"))?;
            let mut chars = k.trim().chars();
            let (Some(name), None) = (chars.next(), chars.next()) else {
                return Err(format!("parameter names are single characters, got '{k}'"));
            };
            let value: u32 = v
                .trim()
                .parse()
                .map_err(|_| format!("invalid value for {name}: '{v}'"))?;
            if out.insert(name, value).is_some() {
                return Err(format!("parameter {name} given twice"));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// An exponent in a family's relation template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exp {
    Param(char),
    Const(u32),
}

/// The eleven presentation families: two for two copies, nine for three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    TwoI,
    TwoII,
    ThreeI,
    ThreeII,
    ThreeIII,
    ThreeIV,
    ThreeV,
    ThreeVI,
    ThreeVII,
    ThreeVIII,
    ThreeIX,
}

use Exp::{Const as C, Param as P};

impl Family {
    pub const ALL: [Family; 11] = [
        Family::TwoI,
        Family::TwoII,
        Family::ThreeI,
        Family::ThreeII,
        Family::ThreeIII,
        Family::ThreeIV,
        Family::ThreeV,
        Family::ThreeVI,
        Family::ThreeVII,
        Family::ThreeVIII,
        Family::ThreeIX,
    ];

    pub fn for_copies(copies: usize) -> impl Iterator<Item = Family> {
        Family::ALL.into_iter().filter(move |f| f.copies() == copies)
    }

    pub fn copies(self) -> usize {
        match self {
            Family::TwoI | Family::TwoII => 2,
            _ => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::TwoI => "2-i",
            Family::TwoII => "2-ii",
            Family::ThreeI => "3-i",
            Family::ThreeII => "3-ii",
            Family::ThreeIII => "3-iii",
            Family::ThreeIV => "3-iv",
            Family::ThreeV => "3-v",
            Family::ThreeVI => "3-vi",
            Family::ThreeVII => "3-vii",
            Family::ThreeVIII => "3-viii",
            Family::ThreeIX => "3-ix",
        }
    }

    pub fn from_label(label: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.label() == label)
    }

    /// Landing letters of `xy` for the ordered pairs of distinct generators,
    /// in the order (a,b),(b,a),(a,c),(c,a),(b,c),(c,b).
    pub fn landing(self) -> &'static str {
        match self {
            Family::TwoI => "aa",
            Family::TwoII => "ab",
            Family::ThreeI => "aaaaaa",
            Family::ThreeII => "aaaabb",
            Family::ThreeIII => "aaaacb",
            Family::ThreeIV => "aacaca",
            Family::ThreeV => "aacacc",
            Family::ThreeVI => "bacacb",
            Family::ThreeVII => "bacbca",
            Family::ThreeVIII => "bacaca",
            Family::ThreeIX => "babaab",
        }
    }

    /// Exponent template matching [`Family::landing`].
    pub fn exponents(self) -> &'static [Exp] {
        match self {
            Family::TwoI => &[P('k'), P('k')],
            Family::TwoII => &[C(2), C(2)],
            Family::ThreeI | Family::ThreeII => &[P('i'), P('i'), P('j'), P('j'), P('k'), P('k')],
            Family::ThreeIII => &[P('i'), P('i'), P('i'), P('i'), C(2), C(2)],
            Family::ThreeIV | Family::ThreeV => &[P('i'), P('i'), C(2), C(2), P('i'), P('i')],
            Family::ThreeVI | Family::ThreeVII | Family::ThreeVIII => &[C(2); 6],
            Family::ThreeIX => &[C(2), C(2), P('i'), P('i'), P('i'), P('i')],
        }
    }

    pub fn param_names(self) -> Vec<char> {
        let mut names: Vec<char> = self
            .exponents()
            .iter()
            .filter_map(|e| match e {
                Exp::Param(c) => Some(*c),
                Exp::Const(_) => None,
            })
            .collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    pub fn constraint_text(self) -> &'static str {
        match self {
            Family::ThreeI => "i+j=k+2",
            Family::ThreeII => "i+j+k-ik=2",
            _ => "none",
        }
    }

    /// The arithmetic side condition on the parameters. Expects every
    /// parameter to be present.
    pub fn constraint_holds(self, params: &Params) -> bool {
        let g = |c| params.get(c).unwrap_or(0) as i64;
        match self {
            Family::ThreeI => g('i') + g('j') == g('k') + 2,
            Family::ThreeII => g('i') + g('j') + g('k') - g('i') * g('k') == 2,
            _ => true,
        }
    }

    /// Recovers the parameters from a concrete exponent vector, if it fits
    /// the template and the constraint.
    pub fn match_exponents(self, exps: &[u32]) -> Option<Params> {
        let template = self.exponents();
        if template.len() != exps.len() {
            return None;
        }
        let mut params = Params::new();
        for (t, &e) in template.iter().zip(exps) {
            match *t {
                Exp::Const(c) if c != e => return None,
                Exp::Const(_) => {}
                Exp::Param(name) => match params.get(name) {
                    Some(v) if v != e => return None,
                    Some(_) => {}
                    None => {
                        params.insert(name, e);
                    }
                },
            }
        }
        self.constraint_holds(&params).then_some(params)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Family plus the parameter values it was instantiated with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTag {
    pub family: Family,
    pub params: Params,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family {family} is missing parameter '{name}'")]
    MissingParameter { family: Family, name: char },
    #[error("family {family} has no parameter '{name}'")]
    UnknownParameter { family: Family, name: char },
    #[error("parameter '{name}' must be a positive exponent, got {value}")]
    NonPositive { name: char, value: u32 },
    #[error("family {family} requires {constraint}, violated by {params}")]
    ConstraintViolation {
        family: Family,
        constraint: &'static str,
        params: Params,
    },
}

/// The ordered pairs of distinct generators among the first `n` letters:
/// for each unordered pair in lexicographic order, `(x,y)` then `(y,x)`.
pub fn generator_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            out.push((x, y));
            out.push((y, x));
        }
    }
    out
}

/// `<a,b,(c) | xy = landing(x,y)^e(x,y)>` for the ordered pairs of
/// [`generator_pairs`].
pub fn product_presentation(n: usize, landing: &[Letter], exps: &[u32]) -> Presentation {
    let pairs = generator_pairs(n);
    assert_eq!(pairs.len(), landing.len());
    assert_eq!(pairs.len(), exps.len());
    let alphabet: Vec<Letter> = (0..n).map(Letter::nth).collect();
    let relations = pairs
        .iter()
        .zip(landing.iter().zip(exps))
        .map(|(&(x, y), (&z, &e))| {
            Relation::new(
                Word::from_letters(&[Letter::nth(x), Letter::nth(y)]).expect("non-empty"),
                Word::power(z, e),
            )
        })
        .collect();
    Presentation::new(alphabet, relations).expect("product presentations are well formed")
}

/// Substitutes the parameters into the family's template after checking the
/// family's arithmetic constraint.
pub fn instantiate_family(family: Family, params: &Params) -> Result<Presentation, FamilyError> {
    let names = family.param_names();
    for (name, value) in params.iter() {
        if !names.contains(&name) {
            return Err(FamilyError::UnknownParameter { family, name });
        }
        if value == 0 {
            return Err(FamilyError::NonPositive { name, value });
        }
    }
    for &name in &names {
        if params.get(name).is_none() {
            return Err(FamilyError::MissingParameter { family, name });
        }
    }
    if !family.constraint_holds(params) {
        return Err(FamilyError::ConstraintViolation {
            family,
            constraint: family.constraint_text(),
            params: params.clone(),
        });
    }
    let exps: Vec<u32> = family
        .exponents()
        .iter()
        .map(|e| match *e {
            Exp::Const(c) => c,
            Exp::Param(name) => params.get(name).expect("checked above"),
        })
        .collect();
    let landing: Vec<Letter> = family
        .landing()
        .chars()
        .map(|c| Letter::new(c).expect("ascii"))
        .collect();
    Ok(product_presentation(family.copies(), &landing, &exps).with_family(FamilyTag {
        family,
        params: params.clone(),
    }))
}
