//! Linear equations with positive integer coefficients and one-parameter
//! families of them.
//!
//! An equation is kept as two ordered sides of `(coefficient, slot)` terms.
//! Slots are numbered `1..=m` and each appears exactly once, so
//! `ax + by + cz = dw` and `ax + by = cz + dw` are different equations.
//! Either side may also carry a non-negative constant, which is how shift
//! equations such as `x + a = y` are written.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `coefficient * x_slot` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub coeff: i64,
    pub slot: usize,
}

/// A linear equation `sum(lhs) + lhs_const = sum(rhs) + rhs_const`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearEquation {
    lhs: Vec<Term>,
    rhs: Vec<Term>,
    lhs_const: i64,
    rhs_const: i64,
    arity: usize,
}

fn check_slots(sides: &[&[(i64, usize)]]) -> Result<usize> {
    let arity: usize = sides.iter().map(|s| s.len()).sum();
    let mut seen = vec![false; arity + 1];
    for side in sides {
        for &(coeff, slot) in side.iter() {
            if coeff == 0 {
                return Err(Error::ZeroCoefficient { slot });
            }
            if coeff < 0 {
                return Err(Error::Parse(format!("negative coefficient {coeff} on slot {slot}")));
            }
            if slot == 0 || slot > arity {
                return Err(Error::MissingSlot {
                    arity,
                    missing: (1..=arity).find(|&s| !seen[s]).unwrap_or(arity),
                });
            }
            if seen[slot] {
                return Err(Error::DuplicateSlot { slot });
            }
            seen[slot] = true;
        }
    }
    Ok(arity)
}

/// Builds an equation from `(coefficient, slot)` pairs on each side.
pub fn make_equation(lhs: &[(i64, usize)], rhs: &[(i64, usize)]) -> Result<LinearEquation> {
    LinearEquation::with_constants(lhs, 0, rhs, 0)
}

impl LinearEquation {
    pub fn new(lhs: &[(i64, usize)], rhs: &[(i64, usize)]) -> Result<Self> {
        make_equation(lhs, rhs)
    }

    pub fn with_constants(
        lhs: &[(i64, usize)],
        lhs_const: i64,
        rhs: &[(i64, usize)],
        rhs_const: i64,
    ) -> Result<Self> {
        if lhs.is_empty() {
            return Err(Error::EmptySide { side: "left" });
        }
        if rhs.is_empty() {
            return Err(Error::EmptySide { side: "right" });
        }
        if lhs_const < 0 || rhs_const < 0 {
            return Err(Error::Parse("constants must be non-negative".into()));
        }
        let arity = check_slots(&[lhs, rhs])?;
        let to_terms = |side: &[(i64, usize)]| {
            let mut terms: Vec<Term> = side.iter().map(|&(coeff, slot)| Term { coeff, slot }).collect();
            terms.sort_by_key(|t| t.slot);
            terms
        };
        Ok(Self {
            lhs: to_terms(lhs),
            rhs: to_terms(rhs),
            lhs_const,
            rhs_const,
            arity,
        })
    }

    /// `x_1 + ... + x_{m-2} + k x_{m-1} = l x_m`.
    pub fn e_mkl(m: usize, k: i64, l: i64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("E(m,k,l) needs m >= 2, got {m}")));
        }
        let mut lhs: Vec<(i64, usize)> = (1..=m - 2).map(|s| (1, s)).collect();
        lhs.push((k, m - 1));
        Self::new(&lhs, &[(l, m)])
    }

    /// `x_1 + ... + x_{n-1} = l x_n`.
    pub fn e1(n: usize, l: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("E1(n,l) needs n >= 2, got {n}")));
        }
        let lhs: Vec<(i64, usize)> = (1..n).map(|s| (1, s)).collect();
        Self::new(&lhs, &[(l, n)])
    }

    /// `a_1 x_1 + ... + a_{m-1} x_{m-1} = y_1 + ... + y_l`.
    pub fn e2(coeffs: &[i64], l: usize) -> Result<Self> {
        let lhs: Vec<(i64, usize)> = coeffs.iter().enumerate().map(|(i, &a)| (a, i + 1)).collect();
        let rhs: Vec<(i64, usize)> = (0..l).map(|j| (1, coeffs.len() + j + 1)).collect();
        Self::new(&lhs, &rhs)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn lhs(&self) -> &[Term] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Term] {
        &self.rhs
    }

    pub fn lhs_const(&self) -> i64 {
        self.lhs_const
    }

    pub fn rhs_const(&self) -> i64 {
        self.rhs_const
    }

    /// Coefficients indexed by `slot - 1`, positive on the left side and
    /// negative on the right, so a tuple is a solution iff
    /// `sum(c_i x_i) + constant() == 0`.
    pub fn signed_coeffs(&self) -> Vec<i64> {
        let mut out = vec![0; self.arity];
        for t in &self.lhs {
            out[t.slot - 1] = t.coeff;
        }
        for t in &self.rhs {
            out[t.slot - 1] = -t.coeff;
        }
        out
    }

    pub fn constant(&self) -> i64 {
        self.lhs_const - self.rhs_const
    }

    /// Exact check that `values` (indexed by slot - 1) solves the equation.
    pub fn is_solution(&self, values: &[u64]) -> Result<bool> {
        if values.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: values.len() });
        }
        let mut acc = i128::from(self.constant());
        for (c, &v) in self.signed_coeffs().iter().zip(values) {
            let term = i128::from(*c)
                .checked_mul(i128::from(v))
                .ok_or(Error::Overflow { context: "evaluating a tuple" })?;
            acc = acc.checked_add(term).ok_or(Error::Overflow { context: "evaluating a tuple" })?;
        }
        Ok(acc == 0)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

fn fmt_side(f: &mut fmt::Formatter<'_>, terms: &[Term], constant: i64) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        if t.coeff == 1 {
            write!(f, "x{}", t.slot)?;
        } else {
            write!(f, "{}*x{}", t.coeff, t.slot)?;
        }
    }
    if constant != 0 {
        write!(f, " + {constant}")?;
    }
    Ok(())
}

impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_side(f, &self.lhs, self.lhs_const)?;
        f.write_str(" = ")?;
        fmt_side(f, &self.rhs, self.rhs_const)
    }
}

impl std::str::FromStr for LinearEquation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed = parse_affine_equation(s, None)?;
        let lhs = parsed.lhs.iter().map(|(c, s)| (c.constant, *s)).collect::<Vec<_>>();
        let rhs = parsed.rhs.iter().map(|(c, s)| (c.constant, *s)).collect::<Vec<_>>();
        LinearEquation::with_constants(&lhs, parsed.lhs_const.constant, &rhs, parsed.rhs_const.constant)
    }
}

/// A coefficient `constant + per_k * k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AffineCoeff {
    pub constant: i64,
    pub per_k: i64,
}

impl AffineCoeff {
    pub const fn fixed(constant: i64) -> Self {
        Self { constant, per_k: 0 }
    }

    pub const fn new(constant: i64, per_k: i64) -> Self {
        Self { constant, per_k }
    }

    pub fn at(&self, k: i64) -> Result<i64> {
        self.per_k
            .checked_mul(k)
            .and_then(|v| v.checked_add(self.constant))
            .ok_or(Error::Overflow { context: "instantiating a coefficient" })
    }

    fn is_zero(&self) -> bool {
        self.constant == 0 && self.per_k == 0
    }

    fn is_one(&self) -> bool {
        self.constant == 1 && self.per_k == 0
    }

    /// Least `k >= 1` making the coefficient at least `min`, if any.
    fn threshold(&self, min: i64) -> Option<i64> {
        if self.per_k == 0 {
            return (self.constant >= min).then_some(1);
        }
        let need = min - self.constant;
        Some(num_integer::div_ceil(need, self.per_k).max(1))
    }
}

impl fmt::Display for AffineCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.constant, self.per_k) {
            (c, 0) => write!(f, "{c}"),
            (0, 1) => f.write_str("k"),
            (0, b) => write!(f, "{b}*k"),
            (c, 1) => write!(f, "k+{c}"),
            (c, b) => write!(f, "{b}*k+{c}"),
        }
    }
}

/// An equation whose coefficients are affine in a single integer parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquationFamily {
    lhs: Vec<(AffineCoeff, usize)>,
    rhs: Vec<(AffineCoeff, usize)>,
    lhs_const: AffineCoeff,
    rhs_const: AffineCoeff,
    parameter: String,
    validity: i64,
}

impl EquationFamily {
    pub fn new(
        lhs: Vec<(AffineCoeff, usize)>,
        lhs_const: AffineCoeff,
        rhs: Vec<(AffineCoeff, usize)>,
        rhs_const: AffineCoeff,
    ) -> Result<Self> {
        if lhs.is_empty() {
            return Err(Error::EmptySide { side: "left" });
        }
        if rhs.is_empty() {
            return Err(Error::EmptySide { side: "right" });
        }
        let mut validity = 1i64;
        for (c, slot) in lhs.iter().chain(&rhs) {
            if c.constant < 0 || c.per_k < 0 {
                return Err(Error::Parse(format!("coefficient {c} of slot {slot} has a negative part")));
            }
            match c.threshold(1) {
                Some(t) => validity = validity.max(t),
                None => return Err(Error::ZeroCoefficient { slot: *slot }),
            }
        }
        for c in [lhs_const, rhs_const] {
            if c.constant < 0 || c.per_k < 0 {
                return Err(Error::Parse("constants must be non-negative".into()));
            }
        }
        let lhs_pairs: Vec<(i64, usize)> = lhs.iter().map(|(_, s)| (1, *s)).collect();
        let rhs_pairs: Vec<(i64, usize)> = rhs.iter().map(|(_, s)| (1, *s)).collect();
        check_slots(&[&lhs_pairs, &rhs_pairs])?;
        let mut lhs = lhs;
        let mut rhs = rhs;
        lhs.sort_by_key(|t| t.1);
        rhs.sort_by_key(|t| t.1);
        Ok(Self { lhs, rhs, lhs_const, rhs_const, parameter: "k".into(), validity })
    }

    /// `x_1 + ... + x_{m-2} + k x_{m-1} = l x_m` with `l` itself affine in `k`.
    pub fn e_mkl(m: usize, l: AffineCoeff) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("E(m,k,l) needs m >= 2, got {m}")));
        }
        let mut lhs: Vec<(AffineCoeff, usize)> = (1..=m - 2).map(|s| (AffineCoeff::fixed(1), s)).collect();
        lhs.push((AffineCoeff::new(0, 1), m - 1));
        Self::new(lhs, AffineCoeff::default(), vec![(l, m)], AffineCoeff::default())
    }

    /// `x + y + z + k v = (k + j) w`.
    pub fn e5_shift(j: i64) -> Result<Self> {
        Self::e_mkl(5, AffineCoeff::new(j, 1))
    }

    /// The parameter-free family `x_1 + ... + x_{n-1} = l x_n`.
    pub fn e1(n: usize, l: i64) -> Result<Self> {
        Self::from_equation(&LinearEquation::e1(n, l)?)
    }

    /// `k x = y`.
    pub fn multiple() -> Result<Self> {
        Self::new(
            vec![(AffineCoeff::new(0, 1), 1)],
            AffineCoeff::default(),
            vec![(AffineCoeff::fixed(1), 2)],
            AffineCoeff::default(),
        )
    }

    /// `x + k = y`.
    pub fn shift() -> Result<Self> {
        Self::new(
            vec![(AffineCoeff::fixed(1), 1)],
            AffineCoeff::new(0, 1),
            vec![(AffineCoeff::fixed(1), 2)],
            AffineCoeff::default(),
        )
    }

    pub fn from_equation(eq: &LinearEquation) -> Result<Self> {
        let conv = |t: &[Term]| t.iter().map(|t| (AffineCoeff::fixed(t.coeff), t.slot)).collect();
        Self::new(
            conv(eq.lhs()),
            AffineCoeff::fixed(eq.lhs_const()),
            conv(eq.rhs()),
            AffineCoeff::fixed(eq.rhs_const()),
        )
    }

    pub fn validity(&self) -> i64 {
        self.validity
    }

    pub fn parameter_name(&self) -> &str {
        &self.parameter
    }

    pub fn arity(&self) -> usize {
        self.lhs.len() + self.rhs.len()
    }

    pub fn lhs(&self) -> &[(AffineCoeff, usize)] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[(AffineCoeff, usize)] {
        &self.rhs
    }

    pub fn lhs_const(&self) -> AffineCoeff {
        self.lhs_const
    }

    pub fn rhs_const(&self) -> AffineCoeff {
        self.rhs_const
    }

    /// True when no coefficient depends on the parameter.
    pub fn is_constant(&self) -> bool {
        self.lhs.iter().chain(&self.rhs).all(|(c, _)| c.per_k == 0)
            && self.lhs_const.per_k == 0
            && self.rhs_const.per_k == 0
    }

    pub fn instantiate(&self, k: i64) -> Result<LinearEquation> {
        if k < self.validity {
            return Err(Error::ParameterBelowValidity { k, validity: self.validity });
        }
        let side = |terms: &[(AffineCoeff, usize)]| -> Result<Vec<(i64, usize)>> {
            terms.iter().map(|(c, s)| Ok((c.at(k)?, *s))).collect()
        };
        LinearEquation::with_constants(
            &side(&self.lhs)?,
            self.lhs_const.at(k)?,
            &side(&self.rhs)?,
            self.rhs_const.at(k)?,
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

/// `instantiate_family` as a free function.
pub fn instantiate_family(family: &EquationFamily, k: i64) -> Result<LinearEquation> {
    family.instantiate(k)
}

fn fmt_family_side(f: &mut fmt::Formatter<'_>, terms: &[(AffineCoeff, usize)], constant: AffineCoeff) -> fmt::Result {
    for (i, (c, slot)) in terms.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        if c.is_one() {
            write!(f, "x{slot}")?;
        } else if c.per_k == 0 || (c.constant == 0 && c.per_k == 1) {
            write!(f, "{c}*x{slot}")?;
        } else {
            write!(f, "({c})*x{slot}")?;
        }
    }
    if !constant.is_zero() {
        write!(f, " + {constant}")?;
    }
    Ok(())
}

impl fmt::Display for EquationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_family_side(f, &self.lhs, self.lhs_const)?;
        f.write_str(" = ")?;
        fmt_family_side(f, &self.rhs, self.rhs_const)
    }
}

impl std::str::FromStr for EquationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed = parse_affine_equation(s, Some("k"))?;
        Self::new(parsed.lhs, parsed.lhs_const, parsed.rhs, parsed.rhs_const)
    }
}

struct ParsedEquation {
    lhs: Vec<(AffineCoeff, usize)>,
    rhs: Vec<(AffineCoeff, usize)>,
    lhs_const: AffineCoeff,
    rhs_const: AffineCoeff,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i64),
    Ident(String),
    Plus,
    Star,
    Open,
    Close,
    Equals,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            '=' => {
                out.push(Token::Equals);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse().map_err(|_| Error::Parse(format!("number {text} out of range")))?;
                out.push(Token::Num(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Recursive-descent parser for sides made of `coeff*var` terms and
/// constants, where a coefficient is a product of integers, the parameter
/// and parenthesised affine sums.
struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    param: Option<&'a str>,
}

enum Item {
    Var(AffineCoeff, String),
    Const(AffineCoeff),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn is_param(&self, name: &str) -> bool {
        self.param == Some(name)
    }

    fn mul(a: AffineCoeff, b: AffineCoeff) -> Result<AffineCoeff> {
        if a.per_k != 0 && b.per_k != 0 {
            return Err(Error::Parse("coefficient is quadratic in the parameter".into()));
        }
        let ovf = || Error::Parse("coefficient overflows".into());
        Ok(AffineCoeff {
            constant: a.constant.checked_mul(b.constant).ok_or_else(ovf)?,
            per_k: a
                .constant
                .checked_mul(b.per_k)
                .and_then(|x| b.constant.checked_mul(a.per_k).and_then(|y| x.checked_add(y)))
                .ok_or_else(ovf)?,
        })
    }

    fn add(a: AffineCoeff, b: AffineCoeff) -> Result<AffineCoeff> {
        Ok(AffineCoeff {
            constant: a.constant.checked_add(b.constant).ok_or(Error::Parse("overflow".into()))?,
            per_k: a.per_k.checked_add(b.per_k).ok_or(Error::Parse("overflow".into()))?,
        })
    }

    /// A pure coefficient expression: `(affine)`, integer or parameter.
    fn factor(&mut self) -> Result<AffineCoeff> {
        match self.bump() {
            Some(Token::Num(n)) => Ok(AffineCoeff::fixed(n)),
            Some(Token::Ident(name)) if self.is_param(&name) => Ok(AffineCoeff::new(0, 1)),
            Some(Token::Open) => {
                let mut acc = self.product()?;
                while self.peek() == Some(&Token::Plus) {
                    self.bump();
                    acc = Self::add(acc, self.product()?)?;
                }
                match self.bump() {
                    Some(Token::Close) => Ok(acc),
                    _ => Err(Error::Parse("expected ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("expected a coefficient, found {other:?}"))),
        }
    }

    fn product(&mut self) -> Result<AffineCoeff> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            if matches!(self.tokens.get(self.pos + 1), Some(Token::Ident(n)) if !self.is_param(n)) {
                break;
            }
            self.bump();
            acc = Self::mul(acc, self.factor()?)?;
        }
        Ok(acc)
    }

    fn item(&mut self) -> Result<Item> {
        if let Some(Token::Ident(name)) = self.peek().cloned() {
            if !self.is_param(&name) {
                self.bump();
                return Ok(Item::Var(AffineCoeff::fixed(1), name));
            }
        }
        let coeff = self.product()?;
        if self.peek() == Some(&Token::Star) {
            self.bump();
            match self.bump() {
                Some(Token::Ident(name)) if !self.is_param(&name) => Ok(Item::Var(coeff, name)),
                other => Err(Error::Parse(format!("expected a variable, found {other:?}"))),
            }
        } else {
            Ok(Item::Const(coeff))
        }
    }

    fn side(&mut self) -> Result<(Vec<(AffineCoeff, String)>, AffineCoeff)> {
        let mut vars = Vec::new();
        let mut constant = AffineCoeff::default();
        loop {
            match self.item()? {
                Item::Var(c, name) => vars.push((c, name)),
                Item::Const(c) => constant = Self::add(constant, c)?,
            }
            if self.peek() == Some(&Token::Plus) {
                self.bump();
            } else {
                break;
            }
        }
        Ok((vars, constant))
    }
}

fn slot_of(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn parse_affine_equation(s: &str, param: Option<&str>) -> Result<ParsedEquation> {
    let mut p = Parser { tokens: tokenize(s)?, pos: 0, param };
    let (lhs, lhs_const) = p.side()?;
    if p.bump() != Some(Token::Equals) {
        return Err(Error::Parse("expected '='".into()));
    }
    let (rhs, rhs_const) = p.side()?;
    if p.pos < p.tokens.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    // `x<digits>` names give slots directly; any other naming scheme is
    // numbered by first appearance.
    let numbered = lhs.iter().chain(&rhs).all(|(_, n)| slot_of(n).is_some());
    let mut slots: HashMap<String, usize> = HashMap::new();
    let mut resolve = |name: &str| -> Result<usize> {
        if numbered {
            return slot_of(name).ok_or_else(|| Error::Parse(format!("bad variable {name}")));
        }
        let next = slots.len() + 1;
        let slot = *slots.entry(name.to_string()).or_insert(next);
        if slot != next {
            return Err(Error::DuplicateSlot { slot });
        }
        Ok(slot)
    };
    let mut conv = |side: Vec<(AffineCoeff, String)>| -> Result<Vec<(AffineCoeff, usize)>> {
        side.into_iter().map(|(c, n)| Ok((c, resolve(&n)?))).collect()
    };
    let lhs = conv(lhs)?;
    let rhs = conv(rhs)?;
    Ok(ParsedEquation { lhs, rhs, lhs_const, rhs_const })
}
