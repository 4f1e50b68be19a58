//! Solution enumeration inside `[1, n]`.
//!
//! Two views are offered. [`Solutions`] streams ordered tuples in
//! lexicographic order (slot 1 most significant). [`layer_patterns`] returns
//! the distinct value sets of the solutions whose largest entry is exactly
//! `t`; that is all the search needs, since a solution is monochromatic iff
//! its value set is.

use std::collections::HashSet;

use crate::coloring::Coloring;
use crate::equation::LinearEquation;
use crate::error::{Error, Result};

pub type SolutionTuple = Vec<u64>;

/// Normalised `sum(c_i x_i) + constant == 0` form with overflow-checked
/// bounds for values in `[1, n]`.
#[derive(Debug, Clone)]
struct Normalized {
    coeffs: Vec<i64>,
    constant: i64,
}

impl Normalized {
    fn new(eq: &LinearEquation, n: u64) -> Result<Self> {
        let ovf = Error::Overflow { context: "bounding solution sums" };
        let n = i64::try_from(n).map_err(|_| ovf.clone())?;
        let mut bound = eq.constant().checked_abs().ok_or(ovf.clone())?;
        for c in eq.signed_coeffs() {
            let term = c.checked_abs().and_then(|a| a.checked_mul(n)).ok_or(ovf.clone())?;
            bound = bound.checked_add(term).ok_or(ovf.clone())?;
        }
        Ok(Self { coeffs: eq.signed_coeffs(), constant: eq.constant() })
    }
}

/// `[min, max]` of `sum(c_j x_j)` over `x_j in [lo, hi]`.
fn term_range(c: i64, lo: i64, hi: i64) -> (i64, i64) {
    if c >= 0 {
        (c * lo, c * hi)
    } else {
        (c * hi, c * lo)
    }
}

/// Values `v in [lo, hi]` with `c * v in [a, b]`.
fn value_window(c: i64, a: i64, b: i64, lo: i64, hi: i64) -> (i64, i64) {
    use num_integer::{div_ceil, div_floor};
    let (vlo, vhi) = if c > 0 {
        (div_ceil(a, c), div_floor(b, c))
    } else {
        // c * v in [a, b] with c < 0  <=>  v in [b / c, a / c]
        (div_ceil(b, c), div_floor(a, c))
    };
    (vlo.max(lo), vhi.min(hi))
}

/// Lexicographic stream of the solutions of an equation inside `[1, n]`.
///
/// The first `m - 1` slots are enumerated with interval pruning and the last
/// slot is solved for exactly, so the cost is proportional to the number of
/// feasible prefixes rather than `n^m`.
#[derive(Debug, Clone)]
pub struct Solutions {
    coeffs: Vec<i64>,
    constant: i64,
    n: i64,
    // suffix[i] = range of sum over slots i.. with values in [1, n]
    suffix: Vec<(i64, i64)>,
    values: Vec<i64>,
    partial: Vec<i64>,
    hi: Vec<i64>,
    depth: usize,
    max_filter: Option<i64>,
    started: bool,
    done: bool,
}

impl Solutions {
    fn new(eq: &LinearEquation, n: u64, max_filter: Option<u64>) -> Result<Self> {
        let norm = Normalized::new(eq, n)?;
        let m = norm.coeffs.len();
        let n = n as i64;
        let mut suffix = vec![(0i64, 0i64); m + 1];
        for i in (0..m).rev() {
            let (a, b) = term_range(norm.coeffs[i], 1, n);
            suffix[i] = (suffix[i + 1].0 + a, suffix[i + 1].1 + b);
        }
        Ok(Self {
            coeffs: norm.coeffs,
            constant: norm.constant,
            n,
            suffix,
            values: vec![0; m],
            partial: vec![0; m + 1],
            hi: vec![0; m],
            depth: 0,
            max_filter: max_filter.map(|t| t as i64),
            started: false,
            done: n < 1,
        })
    }

    /// Opens the window for slot `i` given `partial[i]`; returns false when empty.
    fn open(&mut self, i: usize) -> bool {
        let target = -(self.partial[i] + self.constant);
        let (smin, smax) = self.suffix[i + 1];
        let (lo, hi) = value_window(self.coeffs[i], target - smax, target - smin, 1, self.n);
        if lo > hi {
            return false;
        }
        self.values[i] = lo;
        self.hi[i] = hi;
        true
    }

    fn emit(&self) -> Option<SolutionTuple> {
        let tuple: Vec<u64> = self.values.iter().map(|&v| v as u64).collect();
        if let Some(t) = self.max_filter {
            if tuple.iter().max().copied() != Some(t as u64) {
                return None;
            }
        }
        Some(tuple)
    }
}

impl Solutions {
    /// Steps the value at `depth`, climbing while a window is spent.
    fn bump(&mut self) -> bool {
        loop {
            let i = self.depth;
            if self.values[i] < self.hi[i] {
                self.values[i] += 1;
                return true;
            }
            if i == 0 {
                self.done = true;
                return false;
            }
            self.depth -= 1;
        }
    }
}

impl Iterator for Solutions {
    type Item = SolutionTuple;

    fn next(&mut self) -> Option<SolutionTuple> {
        let m = self.coeffs.len();
        loop {
            if self.done {
                return None;
            }
            if !self.started {
                self.started = true;
                self.depth = 0;
                if !self.open(0) {
                    self.done = true;
                    return None;
                }
            } else if !self.bump() {
                return None;
            }
            // the last slot is solved exactly, so its window holds at most one value
            while self.depth + 1 < m {
                let i = self.depth;
                self.partial[i + 1] = self.partial[i] + self.coeffs[i] * self.values[i];
                if self.open(i + 1) {
                    self.depth = i + 1;
                } else if !self.bump() {
                    return None;
                }
            }
            if let Some(t) = self.emit() {
                return Some(t);
            }
        }
    }
}

/// All solutions of `eq` inside `[1, n]`, in lexicographic order.
pub fn enumerate_solutions(eq: &LinearEquation, n: u64) -> Result<Solutions> {
    Solutions::new(eq, n, None)
}

/// Solutions of `eq` inside `[1, t]` whose maximum entry is exactly `t`.
pub fn enumerate_solutions_with_max(eq: &LinearEquation, t: u64) -> Result<Solutions> {
    Solutions::new(eq, t, Some(t))
}

/// Distinct value sets (sorted, deduplicated) of the solutions of `eq` whose
/// maximum entry is `t`, in lexicographic order of the sets.
///
/// Slots sharing a signed coefficient are interchangeable, so each such group
/// is enumerated as a non-decreasing run. The maximum is forced onto the top
/// element of one group at a time, which removes one free dimension.
pub fn layer_patterns(eq: &LinearEquation, t: u32) -> Result<Vec<Vec<u32>>> {
    let norm = Normalized::new(eq, u64::from(t))?;
    if t == 0 {
        return Ok(Vec::new());
    }
    // Groups of equal signed coefficients, largest magnitude first so the
    // cheap-to-bound slots are decided early; the slot solved for comes last.
    let mut groups: Vec<(i64, usize)> = Vec::new();
    for &c in &norm.coeffs {
        match groups.iter_mut().find(|(gc, _)| *gc == c) {
            Some(g) => g.1 += 1,
            None => groups.push((c, 1)),
        }
    }
    groups.sort_by_key(|&(c, _)| std::cmp::Reverse((c.abs(), c)));
    let mut slots: Vec<SlotSpec> = Vec::new();
    for (gi, &(c, size)) in groups.iter().enumerate() {
        for j in 0..size {
            slots.push(SlotSpec { coeff: c, group: gi, first_in_group: j == 0, last_in_group: j + 1 == size });
        }
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = Vec::new();
    let mut values = vec![0i64; slots.len()];
    for g in 0..groups.len() {
        let mut ctx = PatternCtx {
            slots: &slots,
            constant: norm.constant,
            t: i64::from(t),
            forced_group: g,
            values: &mut values,
            seen: &mut seen,
            out: &mut out,
        };
        ctx.run();
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct SlotSpec {
    coeff: i64,
    group: usize,
    first_in_group: bool,
    last_in_group: bool,
}

struct PatternCtx<'a> {
    slots: &'a [SlotSpec],
    constant: i64,
    t: i64,
    forced_group: usize,
    values: &'a mut Vec<i64>,
    seen: &'a mut HashSet<Vec<u32>>,
    out: &'a mut Vec<Vec<u32>>,
}

impl PatternCtx<'_> {
    fn bounds(&self, i: usize) -> (i64, i64) {
        let s = self.slots[i];
        let lo = if s.first_in_group { 1 } else { self.values[i - 1] };
        if s.group == self.forced_group && s.last_in_group {
            (self.t.max(lo), self.t)
        } else {
            (lo, self.t)
        }
    }

    fn run(&mut self) {
        let m = self.slots.len();
        let mut suffix = vec![(0i64, 0i64); m + 1];
        for i in (0..m).rev() {
            let (a, b) = term_range(self.slots[i].coeff, 1, self.t);
            suffix[i] = (suffix[i + 1].0 + a, suffix[i + 1].1 + b);
        }
        self.descend(0, self.constant, &suffix);
    }

    fn descend(&mut self, i: usize, partial: i64, suffix: &[(i64, i64)]) {
        let m = self.slots.len();
        let (lo, hi) = self.bounds(i);
        if lo > hi {
            return;
        }
        let target = -partial;
        let (smin, smax) = suffix[i + 1];
        let (vlo, vhi) = value_window(self.slots[i].coeff, target - smax, target - smin, lo, hi);
        if i + 1 == m {
            // exact solve: window has at most one point once the suffix is empty
            if vlo <= vhi && self.slots[i].coeff * vlo == target {
                self.values[i] = vlo;
                self.record();
            }
            return;
        }
        let c = self.slots[i].coeff;
        for v in vlo..=vhi {
            self.values[i] = v;
            self.descend(i + 1, partial + c * v, suffix);
        }
    }

    fn record(&mut self) {
        let mut set: Vec<u32> = self.values.iter().map(|&v| v as u32).collect();
        set.sort_unstable();
        set.dedup();
        if self.seen.insert(set.clone()) {
            self.out.push(set);
        }
    }
}

/// True iff every entry of the solution tuple `t` has the same color.
pub fn is_monochromatic(eq: &LinearEquation, coloring: &Coloring, t: &[u64]) -> Result<bool> {
    if t.len() != eq.arity() {
        return Err(Error::ArityMismatch { expected: eq.arity(), got: t.len() });
    }
    tuple_is_monochromatic(coloring.colors(), t)
}

/// Checks a raw color slice (`colors[v - 1]` is the color of `v`).
pub fn tuple_is_monochromatic(colors: &[u8], tuple: &[u64]) -> Result<bool> {
    let mut first = None;
    for &v in tuple {
        if v == 0 || v as usize > colors.len() {
            return Err(Error::OutOfRange { value: v, len: colors.len() });
        }
        let c = colors[v as usize - 1];
        match first {
            None => first = Some(c),
            Some(f) if f != c => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(eq: &LinearEquation, n: u64) -> Vec<Vec<u64>> {
        let m = eq.arity();
        let mut out = Vec::new();
        let mut cur = vec![1u64; m];
        loop {
            if eq.is_solution(&cur).unwrap() {
                out.push(cur.clone());
            }
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n {
                    cur[i] += 1;
                    for c in cur.iter_mut().skip(i + 1) {
                        *c = 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn schur_small_cases() {
        let eq: LinearEquation = "x+y=z".parse().unwrap();
        let sols: Vec<_> = enumerate_solutions(&eq, 2).unwrap().collect();
        assert_eq!(sols, vec![vec![1, 1, 2]]);
        assert_eq!(enumerate_solutions(&eq, 5).unwrap().count(), 10);
        assert_eq!(enumerate_solutions(&eq, 1).unwrap().count(), 0);
    }

    #[test]
    fn five_variable_tuple_present() {
        let eq: LinearEquation = "x1+x2+x3+3*x4=4*x5".parse().unwrap();
        let sols: Vec<_> = enumerate_solutions(&eq, 3).unwrap().collect();
        assert!(sols.contains(&vec![1, 1, 1, 3, 3]));
    }

    #[test]
    fn matches_brute_force() {
        for text in ["x+y=z", "x1+x2+3*x3=4*x4", "2*x1 = x2 + x3", "x1 + 3 = x2", "x1+x2 = 2*x3 + 1", "3*x1 = x2"] {
            let eq: LinearEquation = text.parse().unwrap();
            for n in 1..=9 {
                let got: Vec<_> = enumerate_solutions(&eq, n).unwrap().collect();
                assert_eq!(got, brute(&eq, n), "{text} n={n}");
            }
        }
    }

    #[test]
    fn layer_patterns_match_tuples() {
        for text in ["x+y=z", "x1+x2+5*x3=4*x4", "x1+x2+x3+2*x4=3*x5", "x1 + 2 = x2", "x1+x2=x3+x4"] {
            let eq: LinearEquation = text.parse().unwrap();
            for t in 1..=12u32 {
                let mut expected: Vec<Vec<u32>> = enumerate_solutions_with_max(&eq, u64::from(t))
                    .unwrap()
                    .map(|s| {
                        let mut v: Vec<u32> = s.iter().map(|&x| x as u32).collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    })
                    .collect();
                expected.sort();
                expected.dedup();
                assert_eq!(layer_patterns(&eq, t).unwrap(), expected, "{text} t={t}");
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let eq = LinearEquation::new(&[(i64::MAX / 2, 1)], &[(1, 2)]).unwrap();
        assert!(matches!(enumerate_solutions(&eq, 10), Err(Error::Overflow { .. })));
        assert!(matches!(layer_patterns(&eq, 10), Err(Error::Overflow { .. })));
    }

    #[test]
    fn monochromatic_check() {
        // r b b r
        let colors = [0, 1, 1, 0];
        assert!(!tuple_is_monochromatic(&colors, &[1, 1, 2]).unwrap());
        assert!(tuple_is_monochromatic(&[0; 5], &[1, 1, 2]).unwrap());
        assert!(tuple_is_monochromatic(&[0, 1, 1], &[2, 2, 3]).unwrap());
        assert!(tuple_is_monochromatic(&colors, &[1, 5]).is_err());
    }
}
