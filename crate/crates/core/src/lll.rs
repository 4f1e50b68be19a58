//! Local-lemma calculator: the weighted condition on a dependence graph,
//! the solution-count bounds it is fed with, and the resulting lower-bound
//! expression for Rado numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::Hypothesis;

/// Relative tolerance of the floating check. A margin within this fraction
/// of the larger side counts as a failure.
pub const LLL_TOLERANCE: f64 = 1e-12;

fn validate_adjacency(adjacency: &[Vec<usize>], n: usize) -> Result<()> {
    if adjacency.len() != n {
        return Err(Error::InvalidEventSystem(format!("{} adjacency rows for {n} events", adjacency.len())));
    }
    for (i, row) in adjacency.iter().enumerate() {
        for (pos, &j) in row.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidEventSystem(format!("event {i} is joined to unknown event {j}")));
            }
            if j == i {
                return Err(Error::InvalidEventSystem(format!("event {i} is joined to itself")));
            }
            if row[..pos].contains(&j) {
                return Err(Error::InvalidEventSystem(format!("edge {{{i},{j}}} is listed twice")));
            }
            if !adjacency[j].contains(&i) {
                return Err(Error::InvalidEventSystem(format!("edge {{{i},{j}}} is not symmetric")));
            }
        }
    }
    Ok(())
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidEventSystem(format!("edge {{{a},{b}}} names an unknown event")));
        }
        if a == b {
            return Err(Error::InvalidEventSystem(format!("event {a} is joined to itself")));
        }
        if !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    Ok(adj)
}

#[derive(Deserialize)]
struct RawEventSystem {
    probabilities: Vec<f64>,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl TryFrom<RawEventSystem> for EventSystem {
    type Error = Error;
    fn try_from(raw: RawEventSystem) -> Result<Self> {
        EventSystem::from_edges(raw.probabilities, &raw.edges, raw.weights)
    }
}

/// Events with probabilities, a dependence graph and local-lemma weights.
///
/// Serialized as `{"probabilities": [..], "edges": [[i, j], ..], "weights": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEventSystem")]
pub struct EventSystem {
    probabilities: Vec<f64>,
    #[serde(serialize_with = "serialize_edges", rename = "edges")]
    adjacency: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

fn serialize_edges<S: serde::Serializer>(adj: &[Vec<usize>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let edges: Vec<(usize, usize)> =
        adj.iter().enumerate().flat_map(|(i, row)| row.iter().filter(move |&&j| i < j).map(move |&j| (i, j))).collect();
    edges.serialize(s)
}

impl EventSystem {
    /// `adjacency[i]` lists the neighbours of event `i`.
    pub fn new(probabilities: Vec<f64>, adjacency: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        let n = probabilities.len();
        if weights.len() != n {
            return Err(Error::InvalidEventSystem(format!("{} weights for {n} events", weights.len())));
        }
        if let Some(i) = probabilities.iter().position(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(Error::InvalidEventSystem(format!("probability of event {i} is not in (0,1)")));
        }
        if let Some(i) = weights.iter().position(|y| !(*y > 0.0 && y.is_finite())) {
            return Err(Error::InvalidEventSystem(format!("weight of event {i} is not positive")));
        }
        validate_adjacency(&adjacency, n)?;
        Ok(Self { probabilities, adjacency, weights })
    }

    /// Builds the symmetric adjacency from an undirected edge list.
    pub fn from_edges(probabilities: Vec<f64>, edges: &[(usize, usize)], weights: Vec<f64>) -> Result<Self> {
        let adj = adjacency_from_edges(probabilities.len(), edges)?;
        Self::new(probabilities, adj, weights)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Copy with one probability replaced; the result is re-validated.
    pub fn with_probability(&self, i: usize, p: f64) -> Result<Self> {
        let mut probabilities = self.probabilities.clone();
        probabilities[i] = p;
        Self::new(probabilities, self.adjacency.clone(), self.weights.clone())
    }
}

/// Both sides of the condition for one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LllMargin {
    /// `ln y_i`
    pub lhs: f64,
    /// `y_i Pr[A_i] + sum over neighbours j of y_j Pr[A_j]`
    pub rhs: f64,
    pub holds: bool,
}

impl LllMargin {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub fn lll_margins(sys: &EventSystem) -> Vec<LllMargin> {
    (0..sys.len())
        .map(|i| {
            let lhs = sys.weights[i].ln();
            let rhs = sys.weights[i] * sys.probabilities[i]
                + sys.adjacency[i].iter().map(|&j| sys.weights[j] * sys.probabilities[j]).sum::<f64>();
            let holds = lhs - rhs > LLL_TOLERANCE * lhs.abs().max(rhs);
            LllMargin { lhs, rhs, holds }
        })
        .collect()
}

/// True iff `ln y_i > y_i Pr[A_i] + sum_{j ~ i} y_j Pr[A_j]` for every
/// event, with the strict inequality taken at [`LLL_TOLERANCE`].
pub fn check_lll_condition(sys: &EventSystem) -> bool {
    lll_margins(sys).iter().all(|m| m.holds)
}

/// Event system with exact rational probabilities and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalEventSystem {
    probabilities: Vec<BigRational>,
    adjacency: Vec<Vec<usize>>,
    weights: Vec<BigRational>,
}

impl RationalEventSystem {
    pub fn new(probabilities: Vec<BigRational>, adjacency: Vec<Vec<usize>>, weights: Vec<BigRational>) -> Result<Self> {
        let n = probabilities.len();
        if weights.len() != n {
            return Err(Error::InvalidEventSystem(format!("{} weights for {n} events", weights.len())));
        }
        let one = BigRational::one();
        if let Some(i) = probabilities.iter().position(|p| !(p.is_positive() && *p < one)) {
            return Err(Error::InvalidEventSystem(format!("probability of event {i} is not in (0,1)")));
        }
        if let Some(i) = weights.iter().position(|y| !y.is_positive()) {
            return Err(Error::InvalidEventSystem(format!("weight of event {i} is not positive")));
        }
        validate_adjacency(&adjacency, n)?;
        Ok(Self { probabilities, adjacency, weights })
    }

    pub fn from_edges(probabilities: Vec<BigRational>, edges: &[(usize, usize)], weights: Vec<BigRational>) -> Result<Self> {
        let adj = adjacency_from_edges(probabilities.len(), edges)?;
        Self::new(probabilities, adj, weights)
    }

    /// Exact rational image of a floating system.
    pub fn from_floats(sys: &EventSystem) -> Self {
        let conv = |v: &f64| BigRational::from_float(*v).expect("validated values are finite");
        Self {
            probabilities: sys.probabilities.iter().map(conv).collect(),
            adjacency: sys.adjacency.clone(),
            weights: sys.weights.iter().map(conv).collect(),
        }
    }
}

fn dyadic_floor(v: &BigRational, bits: usize) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((v * BigRational::from_integer(scale.clone())).floor().to_integer(), scale)
}

fn dyadic_ceil(v: &BigRational, bits: usize) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((v * BigRational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

/// Rational `(lo, hi)` with `lo < exp(s) < hi` for `s > 0`, roughly `bits`
/// bits wide.
fn exp_bounds(s: &BigRational, bits: usize) -> (BigRational, BigRational) {
    // Halve until s / 2^j <= 1/2, bound the Taylor series there, square back.
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut x = s.clone();
    let mut j = 0usize;
    while x > half {
        x /= BigInt::from(2);
        j += 1;
    }
    let work = bits + j + 8;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << work);
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let mut i = 1u32;
    loop {
        term = dyadic_ceil(&(term * &x / BigInt::from(i)), work + 8);
        if term < eps {
            break;
        }
        sum += &term;
        i += 1;
    }
    // Tail after the last added term is below 2 * term since x <= 1/2.
    let mut lo = dyadic_floor(&(&sum - &eps), work);
    let mut hi = dyadic_ceil(&(sum + term * BigInt::from(2) + &eps), work);
    for _ in 0..j {
        lo = dyadic_floor(&(&lo * &lo), work);
        hi = dyadic_ceil(&(&hi * &hi), work);
    }
    (lo, hi)
}

/// `ln y > s` decided exactly. For rational `s > 0`, `exp(s)` is irrational,
/// so refining the bracket always terminates.
fn ln_exceeds(y: &BigRational, s: &BigRational) -> bool {
    if s.is_zero() {
        return *y > BigRational::one();
    }
    let mut bits = 64;
    loop {
        let (lo, hi) = exp_bounds(s, bits);
        if *y > hi {
            return true;
        }
        if *y < lo {
            return false;
        }
        bits *= 2;
    }
}

/// Per-event verdicts of the condition, compared exactly.
pub fn lll_verdicts_exact(sys: &RationalEventSystem) -> Vec<bool> {
    (0..sys.probabilities.len())
        .map(|i| {
            let mut rhs = &sys.weights[i] * &sys.probabilities[i];
            for &j in &sys.adjacency[i] {
                rhs += &sys.weights[j] * &sys.probabilities[j];
            }
            ln_exceeds(&sys.weights[i], &rhs)
        })
        .collect()
}

pub fn check_lll_condition_exact(sys: &RationalEventSystem) -> bool {
    lll_verdicts_exact(sys).into_iter().all(|b| b)
}

/// Counting bounds for one equation of arity `m` on `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountBounds {
    /// Solutions through a fixed element: `m n^(m-2)`.
    pub per_element: u128,
    /// Solutions sharing an element with a fixed solution: `m^2 n^(m-2)`.
    pub same_equation: u128,
}

fn power_term(factor: u128, n: u64, exp: u32) -> Result<u128> {
    u128::from(n).checked_pow(exp).and_then(|p| p.checked_mul(factor)).ok_or(Error::Overflow { context: "counting bound" })
}

pub fn solution_count_bound(m: u32, n: u64) -> Result<CountBounds> {
    if m < 3 {
        return Err(Error::ArityTooSmall { m });
    }
    if n == 0 {
        return Err(Error::Domain("range size must be positive".into()));
    }
    let m128 = u128::from(m);
    Ok(CountBounds { per_element: power_term(m128, n, m - 2)?, same_equation: power_term(m128 * m128, n, m - 2)? })
}

/// The three dependence-count bounds between equations of arities `m_i`
/// and `m_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBounds {
    /// `m_i^2 n^(m_i-2)`
    pub ii: u128,
    /// `m_i m_j n^(m_j-2)`
    pub ij: u128,
    /// `m_i m_j n^(m_i-2)`
    pub ji: u128,
}

pub fn pair_count_bounds(m_i: u32, m_j: u32, n: u64) -> Result<PairBounds> {
    let small = m_i.min(m_j);
    if small < 3 {
        return Err(Error::ArityTooSmall { m: small });
    }
    if n == 0 {
        return Err(Error::Domain("range size must be positive".into()));
    }
    let (a, b) = (u128::from(m_i), u128::from(m_j));
    Ok(PairBounds {
        ii: power_term(a * a, n, m_i - 2)?,
        ij: power_term(a * b, n, m_j - 2)?,
        ji: power_term(a * b, n, m_i - 2)?,
    })
}

/// Caller-chosen constants of the lower-bound expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LllConstants {
    pub c2: f64,
    pub c1: Option<f64>,
    pub c3: Option<f64>,
    /// Arity of the first equation, used by the `c3 - c1^m1 c2 > 0` check.
    pub m1: Option<u32>,
}

impl LllConstants {
    pub fn new(c2: f64) -> Self {
        Self { c2, c1: None, c3: None, m1: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LllBound {
    pub value: f64,
    pub m_r: u64,
    pub r: u32,
    pub constants: LllConstants,
    pub hypotheses: Vec<Hypothesis>,
}

/// `m_r (r-1) / (c2 (ln(m_r (r-1)) - ln c2))`.
///
/// Defined for `m_r (r-1) > e c2`; below that point the log factor drops
/// under 1, the expression stops growing with `m_r` and blows up as the log
/// approaches 0, so the whole stretch is rejected.
pub fn lll_lower_bound(m_r: u64, r: u32, c2: f64) -> Result<f64> {
    Ok(lll_lower_bound_with(m_r, r, LllConstants::new(c2))?.value)
}

pub fn lll_lower_bound_with(m_r: u64, r: u32, constants: LllConstants) -> Result<LllBound> {
    let c2 = constants.c2;
    if r < 2 {
        return Err(Error::Domain(format!("r={r} is below 2")));
    }
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::Domain(format!("c2={c2} is not positive")));
    }
    let mass = m_r as f64 * f64::from(r - 1);
    let log = mass.ln() - c2.ln();
    // also rejects NaN
    if log.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!("ln(m_r (r-1)) - ln c2 = {log} is not above 1")));
    }
    let mut hypotheses = Vec::new();
    if let (Some(c1), Some(c3)) = (constants.c1, constants.c3) {
        if let Some(m1) = constants.m1 {
            let lhs = c3 - c1.powi(m1.to_i32().unwrap_or(i32::MAX)) * c2;
            hypotheses.push(Hypothesis { condition: "c3 - c1^m1 c2 > 0".into(), holds: lhs > 0.0 });
        }
        let lhs = c3 - c1 * c2 + m_r as f64;
        hypotheses.push(Hypothesis { condition: "c3 - c1 c2 + m_r < 0".into(), holds: lhs < 0.0 });
    }
    Ok(LllBound { value: mass / (c2 * log), m_r, r, constants, hypotheses })
}
