//! Valid-coloring search, Rado numbers, certificates and CNF export.
//!
//! Every integer `t` becomes one boolean variable for two colors (true means
//! color 1) or `r` one-hot variables otherwise. For each color `c` and each
//! value set of a solution of `c`'s equation whose maximum is `t`, a clause
//! forbids coloring the whole set `c`. Clauses are added layer by layer as
//! `t` grows, so the same solver state serves every `n` of an incremental
//! Rado computation.
//!
//! The solver decides variables in increasing order with color 0 first and
//! never restarts, so the coloring it returns is the lexicographically least
//! valid one: the same coloring a plain depth-first search (integers in
//! increasing order, colors in increasing order, pruning on monochromatic
//! solutions inside the colored prefix) would reach first. Certificates are
//! therefore canonical and independent of how the work is split.

mod backtrack;
pub mod cdcl;
mod cnf;
pub mod patterns;
mod verify;

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::equation::LinearEquation;
use crate::error::{Error, Result};
use cdcl::{Lit, SolveStatus, Solver};
use patterns::PatternCache;

pub use backtrack::{enumerate_valid_colorings, first_valid_coloring_by_backtracking, DEFAULT_ENUMERATION_LIMIT};
pub use cnf::export_cnf;
pub use verify::{find_monochromatic_solution, verify_certificate, verify_periodic_certificate};

/// One equation per color: color `i` must avoid monochromatic solutions of
/// `equations[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorSystem {
    equations: Vec<LinearEquation>,
}

impl ColorSystem {
    pub fn new(equations: Vec<LinearEquation>) -> Result<Self> {
        if equations.is_empty() {
            return Err(Error::InvalidSystem("at least one color is required".into()));
        }
        if equations.len() > u8::MAX as usize {
            return Err(Error::InvalidSystem("too many colors".into()));
        }
        Ok(Self { equations })
    }

    /// The classical system: every color avoids the same equation.
    pub fn uniform(eq: LinearEquation, r: u8) -> Result<Self> {
        Self::new(vec![eq; r as usize])
    }

    /// Two colors: color 0 avoids `red`, color 1 avoids `blue`.
    pub fn pair(red: LinearEquation, blue: LinearEquation) -> Self {
        Self { equations: vec![red, blue] }
    }

    /// Red avoids `x + y = z`, blue avoids `k x = y`.
    pub fn schur_vs_multiple(k: i64) -> Result<Self> {
        Ok(Self::pair(
            LinearEquation::new(&[(1, 1), (1, 2)], &[(1, 3)])?,
            LinearEquation::new(&[(k, 1)], &[(1, 2)])?,
        ))
    }

    /// Red avoids `x + y = z`, blue avoids `x + a = y`.
    pub fn schur_vs_shift(a: i64) -> Result<Self> {
        Ok(Self::pair(
            LinearEquation::new(&[(1, 1), (1, 2)], &[(1, 3)])?,
            LinearEquation::with_constants(&[(1, 1)], a, &[(1, 2)], 0)?,
        ))
    }

    pub fn num_colors(&self) -> u8 {
        self.equations.len() as u8
    }

    pub fn equations(&self) -> &[LinearEquation] {
        &self.equations
    }

    pub fn equation(&self, color: u8) -> &LinearEquation {
        &self.equations[color as usize]
    }

    /// All colors avoid the same equation, so permuting colors maps valid
    /// colorings to valid colorings.
    pub fn is_symmetric(&self) -> bool {
        self.equations.windows(2).all(|w| w[0] == w[1])
    }

    /// Parses `eq1 | eq2 | ...`; a single equation with `r` colors is uniform.
    pub fn parse(text: &str, r: Option<u8>) -> Result<Self> {
        let eqs = text
            .split('|')
            .map(|s| s.trim().parse::<LinearEquation>())
            .collect::<Result<Vec<_>>>()?;
        match (eqs.len(), r) {
            (1, Some(r)) => Self::uniform(eqs.into_iter().next().expect("one equation"), r),
            (1, None) => Self::uniform(eqs.into_iter().next().expect("one equation"), 2),
            (len, Some(r)) if len != r as usize => {
                Err(Error::InvalidSystem(format!("{len} equations given for {r} colors")))
            }
            _ => Self::new(eqs),
        }
    }
}

impl fmt::Display for ColorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, eq) in self.equations.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{eq}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadoResult {
    /// The Rado number is `value`; `certificate` is the least valid coloring
    /// of `[1, value - 1]`.
    Found { value: u32, certificate: Coloring },
    /// Every `n <= searched_up_to` admits a valid coloring; `witness` is the
    /// least one for `n = searched_up_to`.
    Unresolved { searched_up_to: u32, witness: Coloring },
}

impl RadoResult {
    pub fn value(&self) -> Option<u32> {
        match self {
            RadoResult::Found { value, .. } => Some(*value),
            RadoResult::Unresolved { .. } => None,
        }
    }

    pub fn certificate(&self) -> &Coloring {
        match self {
            RadoResult::Found { certificate, .. } => certificate,
            RadoResult::Unresolved { witness, .. } => witness,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Worker threads for split searches; 1 means single-threaded.
    pub workers: usize,
    /// Number of leading integers whose colors are fixed per subtree when
    /// `workers > 1`.
    pub split_depth: usize,
    /// Wall-clock budget for one call.
    pub time_budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { workers: 1, split_depth: 4, time_budget: None }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: Duration) -> Self {
        Self { time_budget: Some(budget), ..Self::default() }
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        self.time_budget.map(|b| start + b)
    }
}

/// Incremental CNF view of `[1, n]` for a color system.
struct Encoder<'a> {
    sys: &'a ColorSystem,
    cache: &'a PatternCache,
    solver: Solver,
    r: u8,
    n: u32,
}

impl<'a> Encoder<'a> {
    fn new(sys: &'a ColorSystem, cache: &'a PatternCache) -> Self {
        Self { sys, cache, solver: Solver::new(), r: sys.num_colors(), n: 0 }
    }

    /// Literal meaning "`t` has color `c`".
    fn is_color(&self, t: u32, c: u8) -> Lit {
        let e = (t - 1) as usize;
        match self.r {
            1 => Lit::neg(e),
            2 => Lit::new(e, c == 1),
            r => Lit::pos(e * r as usize + c as usize),
        }
    }

    fn grow(&mut self) -> Result<()> {
        self.n += 1;
        let t = self.n;
        match self.r {
            1 | 2 => {
                self.solver.new_var(false);
            }
            r => {
                let vars: Vec<usize> = (0..r).map(|_| self.solver.new_var(true)).collect();
                let alo: Vec<Lit> = vars.iter().map(|&v| Lit::pos(v)).collect();
                self.solver.add_clause(&alo);
                for i in 0..vars.len() {
                    for j in i + 1..vars.len() {
                        self.solver.add_clause(&[Lit::neg(vars[i]), Lit::neg(vars[j])]);
                    }
                }
            }
        }
        if t == 1 && self.r > 1 && self.sys.is_symmetric() {
            let l = self.is_color(1, 0);
            self.solver.add_clause(&[l]);
        }
        let mut clause = Vec::new();
        for c in 0..self.r {
            let layer = self.cache.get(self.sys.equation(c), t)?;
            for set in layer.iter() {
                clause.clear();
                clause.extend(set.iter().map(|&e| !self.is_color(e, c)));
                self.solver.add_clause(&clause);
            }
        }
        Ok(())
    }

    fn grow_to(&mut self, n: u32) -> Result<()> {
        while self.n < n {
            self.grow()?;
        }
        Ok(())
    }

    fn fix(&mut self, t: u32, c: u8) {
        let l = self.is_color(t, c);
        self.solver.add_clause(&[l]);
    }

    fn model(&self) -> Coloring {
        let colors = (1..=self.n)
            .map(|t| {
                (0..self.r)
                    .find(|&c| self.solver.model_value(self.is_color(t, c).var()) == Some(!self.is_color(t, c).is_neg()))
                    .unwrap_or(0)
            })
            .collect();
        Coloring::new(colors, self.r).expect("model colors are in range")
    }

    fn solve(&mut self, deadline: Option<Instant>) -> Result<Option<Coloring>> {
        match self.solver.solve(deadline) {
            SolveStatus::Sat => Ok(Some(self.model())),
            SolveStatus::Unsat => Ok(None),
            SolveStatus::Unknown => Err(Error::BudgetExceeded),
        }
    }
}

fn check_deadline(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::BudgetExceeded),
        _ => Ok(()),
    }
}

/// Least valid coloring of `[1, n]`, or `None` when every coloring of
/// `[1, n]` has a monochromatic solution.
pub fn find_valid_coloring(sys: &ColorSystem, n: u32, cfg: &SearchConfig) -> Result<Option<Coloring>> {
    find_valid_coloring_with(sys, n, cfg, PatternCache::global())
}

pub fn find_valid_coloring_with(
    sys: &ColorSystem,
    n: u32,
    cfg: &SearchConfig,
    cache: &PatternCache,
) -> Result<Option<Coloring>> {
    let deadline = cfg.deadline(Instant::now());
    if n == 0 {
        return Ok(Some(Coloring::empty(sys.num_colors())));
    }
    let r = sys.num_colors();
    let first_free = if sys.is_symmetric() && r > 1 { 2 } else { 1 };
    let depth = if cfg.workers > 1 { cfg.split_depth.min((n + 1).saturating_sub(first_free) as usize) } else { 0 };
    if depth == 0 {
        let mut enc = Encoder::new(sys, cache);
        enc.grow_to(n)?;
        return enc.solve(deadline);
    }

    // Subtrees in lexicographic order of their fixed prefix; the answer is
    // the least coloring of the first satisfiable subtree.
    let total = (r as usize).pow(depth as u32);
    let prefixes: Vec<Vec<u8>> = (0..total)
        .map(|mut code| {
            let mut digits = vec![0u8; depth];
            for d in digits.iter_mut().rev() {
                *d = (code % r as usize) as u8;
                code /= r as usize;
            }
            digits
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidSystem(format!("thread pool: {e}")))?;
    let results: Vec<Result<Option<Coloring>>> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut enc = Encoder::new(sys, cache);
                enc.grow_to(n)?;
                for (i, &c) in prefix.iter().enumerate() {
                    enc.fix(first_free + i as u32, c);
                }
                enc.solve(deadline)
            })
            .collect()
    });
    for res in results {
        if let Some(c) = res? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Colors available to `t` given the colors of `[1, t - 1]`.
fn extension_color(sys: &ColorSystem, cache: &PatternCache, colors: &[u8], t: u32) -> Result<Option<u8>> {
    'colors: for c in 0..sys.num_colors() {
        if t == 1 && c > 0 && sys.is_symmetric() {
            break;
        }
        let layer = cache.get(sys.equation(c), t)?;
        for set in layer.iter() {
            if set.iter().all(|&e| e == t || colors[(e - 1) as usize] == c) {
                continue 'colors;
            }
        }
        return Ok(Some(c));
    }
    Ok(None)
}

/// Exact Rado number of `sys`, searching `n = 1, 2, ...` up to `n_max`.
///
/// A valid coloring of `[1, n]` restricts to one of `[1, n - 1]`, so the
/// clause set only ever grows: each step adds the layer of solutions whose
/// maximum is the new integer, and learned clauses stay valid. The previous
/// witness is first extended greedily; the solver runs only when that fails.
pub fn rado_number(sys: &ColorSystem, n_max: u32, cfg: &SearchConfig) -> Result<RadoResult> {
    rado_number_with(sys, n_max, cfg, PatternCache::global())
}

pub fn rado_number_with(sys: &ColorSystem, n_max: u32, cfg: &SearchConfig, cache: &PatternCache) -> Result<RadoResult> {
    let deadline = cfg.deadline(Instant::now());
    let mut enc = Encoder::new(sys, cache);
    let mut witness: Vec<u8> = Vec::new();
    for t in 1..=n_max {
        check_deadline(deadline)?;
        enc.grow()?;
        if let Some(c) = extension_color(sys, cache, &witness, t)? {
            witness.push(c);
            continue;
        }
        match enc.solve(deadline)? {
            Some(model) => witness = model.colors().to_vec(),
            None => {
                let cert = if t == 1 {
                    Coloring::empty(sys.num_colors())
                } else {
                    let mut prev = Encoder::new(sys, cache);
                    prev.grow_to(t - 1)?;
                    prev.solve(deadline)?.expect("[1, t-1] was shown colorable")
                };
                return Ok(RadoResult::Found { value: t, certificate: cert });
            }
        }
    }
    let witness = enc.solve(deadline)?.expect("witness exists for n_max");
    Ok(RadoResult::Unresolved { searched_up_to: n_max, witness })
}
