//! Multilinear pseudo-Boolean polynomials over binary variables.
//!
//! Variables take values in `{0, 1}`, so `x^2 = x` and every monomial is a
//! duplicate-free set of variables. Polynomials are stored in a canonical
//! form: monomials sorted by variable order, no zero coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Base variable a duplicate can mirror. Duplicates of duplicates are not
/// needed: every copy resolves to the problem or auxiliary variable it
/// ultimately mirrors.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum OriginVar {
    Problem(u32),
    Auxiliary(u32),
}

impl OriginVar {
    pub fn var(self) -> VarId {
        match self {
            OriginVar::Problem(i) => VarId::Problem(i),
            OriginVar::Auxiliary(i) => VarId::Auxiliary(i),
        }
    }
}

/// Identifier of a binary variable.
///
/// The derived order is the canonical order used everywhere for tie-breaking
/// and serialization: problem variables sort before auxiliaries, which sort
/// before duplicates; within a kind, by index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VarId {
    /// An original problem variable `x_i`.
    Problem(u32),
    /// An auxiliary variable `y_i` introduced by quadratization.
    Auxiliary(u32),
    /// A copy `x'` of another variable, created when splitting shared chains.
    /// `copy` numbers multiple duplicates of the same origin, starting at 1.
    Duplicate { origin: OriginVar, copy: u32 },
}

impl VarId {
    pub fn problem(i: u32) -> Self {
        VarId::Problem(i)
    }

    pub fn aux(i: u32) -> Self {
        VarId::Auxiliary(i)
    }

    pub fn duplicate_of(v: VarId, copy: u32) -> Self {
        let origin = match v {
            VarId::Problem(i) => OriginVar::Problem(i),
            VarId::Auxiliary(i) => OriginVar::Auxiliary(i),
            VarId::Duplicate { origin, .. } => origin,
        };
        VarId::Duplicate { origin, copy }
    }

    pub fn is_problem(&self) -> bool {
        matches!(self, VarId::Problem(_))
    }

    pub fn is_auxiliary(&self) -> bool {
        matches!(self, VarId::Auxiliary(_))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Problem(i) => write!(f, "x{i}"),
            VarId::Auxiliary(i) => write!(f, "y{i}"),
            VarId::Duplicate { origin, copy } => {
                write!(f, "{}p", origin.var())?;
                if *copy > 1 {
                    write!(f, "{copy}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("invalid variable token `{0}`")]
pub struct VarParseError(pub String);

impl FromStr for VarId {
    type Err = VarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || VarParseError(s.to_string());
        let mut chars = s.chars();
        let kind = chars.next().ok_or_else(err)?;
        let rest: &str = chars.as_str();
        let digits_end = rest
            .char_indices()
            .find(|(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if digits_end == 0 {
            return Err(err());
        }
        let index: u32 = rest[..digits_end].parse().map_err(|_| err())?;
        let origin = match kind {
            'x' => OriginVar::Problem(index),
            'y' => OriginVar::Auxiliary(index),
            _ => return Err(err()),
        };
        let suffix = &rest[digits_end..];
        if suffix.is_empty() {
            return Ok(origin.var());
        }
        let copy_str = suffix.strip_prefix('p').ok_or_else(err)?;
        let copy: u32 = if copy_str.is_empty() {
            1
        } else {
            copy_str.parse().map_err(|_| err())?
        };
        if copy == 0 {
            return Err(err());
        }
        Ok(VarId::Duplicate { origin, copy })
    }
}

impl Serialize for VarId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// A product of distinct binary variables. The empty product is the
/// constant term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<VarId>);

impl Monomial {
    /// Builds a monomial, collapsing repeated variables (`x^2 = x`).
    pub fn new(mut vars: Vec<VarId>) -> Self {
        vars.sort();
        vars.dedup();
        Monomial(vars)
    }

    pub fn constant() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![v])
    }

    pub fn pair(a: VarId, b: VarId) -> Self {
        Monomial::new(vec![a, b])
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Replaces `{a, b}` by `{y}` if both factors are present.
    pub fn substitute_pair(&self, a: VarId, b: VarId, y: VarId) -> Monomial {
        if !(self.contains(a) && self.contains(b)) {
            return self.clone();
        }
        let vars = self
            .0
            .iter()
            .copied()
            .filter(|&v| v != a && v != b)
            .chain(std::iter::once(y))
            .collect();
        Monomial::new(vars)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PuboError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("assignment is missing variable {0}")]
    MissingVariable(VarId),
    #[error("penalty factor must be positive, got {0}")]
    NonPositivePenalty(f64),
    #[error("penalty variables must be pairwise distinct")]
    CoincidentVariables,
    #[error("auxiliary variable {0} already occurs in the polynomial")]
    AuxAlreadyPresent(VarId),
}

/// A multilinear pseudo-Boolean polynomial: a map from monomials to real
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::new();
        p.add_term(Monomial::constant(), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(terms: I) -> Self {
        let mut p = Self::new();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m`, merging with any existing term and pruning exact zeros.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::constant())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().copied())
            .collect()
    }

    /// Exact evaluation at a full 0/1 assignment.
    pub fn evaluate(&self, assignment: &BTreeMap<VarId, bool>) -> Result<f64, PuboError> {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut value = c;
            for &v in m.vars() {
                match assignment.get(&v) {
                    Some(true) => {}
                    Some(false) => {
                        value = 0.0;
                        break;
                    }
                    None => return Err(PuboError::MissingVariable(v)),
                }
            }
            total += value;
        }
        Ok(total)
    }

    pub fn scaled(&self, factor: f64) -> Polynomial {
        Polynomial::from_terms(self.terms().map(|(m, c)| (m.clone(), c * factor)))
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in rhs.terms() {
            self.add_term(m.clone(), c);
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        for (m, c) in rhs.terms() {
            self.add_term(m.clone(), -c);
        }
        self
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scaled(rhs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            let magnitude = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_constant() {
                write!(f, "{magnitude}")?;
            } else if magnitude == 1.0 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude} {m}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Number(f64),
    Var(VarId),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PuboError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '+' => {
                tokens.push((start, Token::Plus));
                i += 1;
            }
            '-' | '\u{2212}' => {
                tokens.push((start, Token::Minus));
                i += c.len_utf8();
            }
            '*' => {
                tokens.push((start, Token::Star));
                i += 1;
            }
            '0'..='9' | '.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        j = k;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let num: f64 = text[i..j].parse().map_err(|_| PuboError::Syntax {
                    position: start,
                    message: format!("invalid number `{}`", &text[i..j]),
                })?;
                tokens.push((start, Token::Number(num)));
                i = j;
            }
            'x' | 'y' => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_digit() || bytes[j] == b'p')
                {
                    j += 1;
                }
                let var: VarId = text[i..j].parse().map_err(|e: VarParseError| {
                    PuboError::Syntax {
                        position: start,
                        message: e.to_string(),
                    }
                })?;
                tokens.push((start, Token::Var(var)));
                i = j;
            }
            _ => {
                return Err(PuboError::Syntax {
                    position: start,
                    message: format!("unknown token starting with `{c}`"),
                })
            }
        }
    }
    Ok(tokens)
}

/// Parses the polynomial text grammar:
/// `poly := term (("+"|"-") term)*; term := [number "*"?]? var+ | number`.
///
/// Repeated variables within a term collapse (`x1 x1` is `x1`), and like
/// terms merge.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, PuboError> {
    let tokens = tokenize(text)?;
    let mut poly = Polynomial::new();
    let mut pos = 0;
    let end = text.len();
    if tokens.is_empty() {
        return Err(PuboError::Syntax {
            position: 0,
            message: "empty polynomial".into(),
        });
    }
    while pos < tokens.len() {
        // Optional sign (mandatory between terms, optional before the first).
        let mut sign = 1.0;
        if pos > 0 || matches!(tokens[pos].1, Token::Plus | Token::Minus) {
            match &tokens[pos].1 {
                Token::Plus => {}
                Token::Minus => sign = -1.0,
                _ => {
                    return Err(PuboError::Syntax {
                        position: tokens[pos].0,
                        message: "expected `+` or `-` between terms".into(),
                    })
                }
            }
            pos += 1;
        }
        let term_pos = tokens.get(pos).map(|t| t.0).unwrap_or(end);
        let mut coef = None;
        if let Some((_, Token::Number(n))) = tokens.get(pos) {
            coef = Some(*n);
            pos += 1;
            if let Some((_, Token::Star)) = tokens.get(pos) {
                pos += 1;
            }
        }
        let mut vars = Vec::new();
        while let Some((_, Token::Var(v))) = tokens.get(pos) {
            vars.push(*v);
            pos += 1;
        }
        if vars.is_empty() && coef.is_none() {
            return Err(PuboError::Syntax {
                position: term_pos,
                message: "expected a term".into(),
            });
        }
        poly.add_term(Monomial::new(vars), sign * coef.unwrap_or(1.0));
    }
    Ok(poly)
}

impl FromStr for Polynomial {
    type Err = PuboError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_polynomial(s)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: f64,
    vars: Vec<VarId>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<TermJson>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = PolyJson {
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    coef: c,
                    vars: m.vars().to_vec(),
                })
                .collect(),
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = PolyJson::deserialize(deserializer)?;
        Ok(Polynomial::from_terms(
            json.terms.into_iter().map(|t| (Monomial::new(t.vars), t.coef)),
        ))
    }
}

/// The penalty polynomial `c_P (ab - 2ay - 2by + 3y)`.
///
/// It vanishes exactly when `y = a*b` and is at least `c_P` otherwise, so a
/// sufficiently large factor makes violating the substitution constraint
/// unprofitable.
pub fn penalty_term(a: VarId, b: VarId, y: VarId, c_p: f64) -> Result<Polynomial, PuboError> {
    if c_p.is_nan() || c_p <= 0.0 {
        return Err(PuboError::NonPositivePenalty(c_p));
    }
    if a == b || y == a || y == b {
        return Err(PuboError::CoincidentVariables);
    }
    let mut p = Polynomial::new();
    p.add_term(Monomial::pair(a, b), c_p);
    p.add_term(Monomial::pair(a, y), -2.0 * c_p);
    p.add_term(Monomial::pair(b, y), -2.0 * c_p);
    p.add_term(Monomial::var(y), 3.0 * c_p);
    Ok(p)
}

/// The quadratic penalty enforcing `x = x'`: the binary expansion of
/// `c_P (x - x')^2`, namely `c_P (x + x' - 2 x x')`.
pub fn equality_penalty(x: VarId, xp: VarId, c_p: f64) -> Result<Polynomial, PuboError> {
    if c_p.is_nan() || c_p <= 0.0 {
        return Err(PuboError::NonPositivePenalty(c_p));
    }
    if x == xp {
        return Err(PuboError::CoincidentVariables);
    }
    let mut p = Polynomial::new();
    p.add_term(Monomial::var(x), c_p);
    p.add_term(Monomial::var(xp), c_p);
    p.add_term(Monomial::pair(x, xp), -2.0 * c_p);
    Ok(p)
}

/// Replaces every occurrence of the product `a*b` by `y`, without adding the
/// penalty term (the caller is responsible for that).
pub fn substitute_pair(
    poly: &Polynomial,
    a: VarId,
    b: VarId,
    y: VarId,
) -> Result<Polynomial, PuboError> {
    if poly.variables().contains(&y) {
        return Err(PuboError::AuxAlreadyPresent(y));
    }
    Ok(Polynomial::from_terms(
        poly.terms()
            .map(|(m, c)| (m.substitute_pair(a, b, y), c)),
    ))
}

/// Counts, over all terms of degree at least `min_degree`, how often each
/// unordered variable pair co-occurs in a term.
pub fn pair_frequencies(
    poly: &Polynomial,
    min_degree: usize,
) -> BTreeMap<(VarId, VarId), usize> {
    let mut counts = BTreeMap::new();
    for (m, _) in poly.terms() {
        if m.degree() < min_degree {
            continue;
        }
        let vars = m.vars();
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                *counts.entry((vars[i], vars[j])).or_insert(0) += 1;
            }
        }
    }
    counts
}
