//! Symbolic bad-parameter analysis for one-parameter families.
//!
//! For a family whose coefficients are affine in `k`, a fixed tuple of
//! values turns the equation into `P + k Q = 0` with integers `P, Q` that do
//! not depend on `k`. Per color class we collect every reachable `(P, Q)`
//! pair with a small dynamic program over the slots; the coloring then fails
//! for every `k` if some pair is `(0, 0)`, and otherwise exactly at the
//! integral quotients `-P / Q` that are admissible parameters.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::equation::{AffineCoeff, EquationFamily};
use crate::error::{Error, Result};
use crate::search::DEFAULT_ENUMERATION_LIMIT;

/// Parameter values at which a fixed coloring stops being valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadKSet {
    /// Sorted; empty when `always_bad`.
    pub finite_bad: Vec<i64>,
    pub always_bad: bool,
    pub validity: i64,
}

impl BadKSet {
    pub fn contains(&self, k: i64) -> bool {
        k >= self.validity && (self.always_bad || self.finite_bad.binary_search(&k).is_ok())
    }

    /// Largest bad parameter, if the set is finite and non-empty.
    pub fn max_bad(&self) -> Option<i64> {
        if self.always_bad {
            None
        } else {
            self.finite_bad.last().copied()
        }
    }
}

fn pair_of(c: &AffineCoeff, sign: i64) -> (i64, i64) {
    (sign * c.constant, sign * c.per_k)
}

/// Reachable `(P, Q)` sums over tuples drawn from `class`.
fn reachable(slots: &[(i64, i64)], class: &[u64]) -> Result<HashSet<(i64, i64)>> {
    let mut cur: HashSet<(i64, i64)> = HashSet::from([(0, 0)]);
    for &(a, b) in slots {
        let mut next = HashSet::with_capacity(cur.len() * class.len());
        for &(p, q) in &cur {
            for &x in class {
                let x = i64::try_from(x).map_err(|_| Error::Overflow { context: "bad-k analysis" })?;
                let p2 = a.checked_mul(x).and_then(|v| v.checked_add(p));
                let q2 = b.checked_mul(x).and_then(|v| v.checked_add(q));
                match (p2, q2) {
                    (Some(p2), Some(q2)) => next.insert((p2, q2)),
                    _ => return Err(Error::Overflow { context: "bad-k analysis" }),
                };
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Exact set of `k >= validity` for which `c` has a monochromatic solution
/// of `family` instantiated at `k`.
pub fn bad_parameter_set(family: &EquationFamily, c: &Coloring) -> Result<BadKSet> {
    let mut slots = vec![(0i64, 0i64); family.arity()];
    for (coef, slot) in family.lhs() {
        slots[slot - 1] = pair_of(coef, 1);
    }
    for (coef, slot) in family.rhs() {
        slots[slot - 1] = pair_of(coef, -1);
    }
    let (lc, rc) = (family.lhs_const(), family.rhs_const());
    let (p0, q0) = (lc.constant - rc.constant, lc.per_k - rc.per_k);
    let validity = family.validity();

    let mut bad = BTreeSet::new();
    for color in 0..c.num_colors() {
        let class = c.class(color);
        if class.is_empty() {
            continue;
        }
        for (p, q) in reachable(&slots, &class)? {
            let (p, q) = (p + p0, q + q0);
            if q == 0 {
                if p == 0 {
                    return Ok(BadKSet { finite_bad: Vec::new(), always_bad: true, validity });
                }
                continue;
            }
            if p % q == 0 {
                let k = -p / q;
                if k >= validity {
                    bad.insert(k);
                }
            }
        }
    }
    Ok(BadKSet { finite_bad: bad.into_iter().collect(), always_bad: false, validity })
}

/// Every two-coloring of `[1, n]` with 1 colored 0 that is valid for all
/// but finitely many `k`, with its bad set, in lexicographic color order.
pub fn colorings_valid_cofinitely(family: &EquationFamily, n: u32) -> Result<Vec<(Coloring, BadKSet)>> {
    colorings_valid_cofinitely_with_limit(family, n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn colorings_valid_cofinitely_with_limit(
    family: &EquationFamily,
    n: u32,
    limit: u128,
) -> Result<Vec<(Coloring, BadKSet)>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let count = 1u128.checked_shl(n - 1).unwrap_or(u128::MAX);
    if count > limit {
        return Err(Error::EnumerationLimitExceeded { count, limit });
    }
    // A prefix that is always bad stays always bad, so prune on it.
    let mut out = Vec::new();
    let mut stack = vec![vec![0u8]];
    while let Some(colors) = stack.pop() {
        let c = Coloring::new(colors, 2)?;
        let set = bad_parameter_set(family, &c)?;
        if set.always_bad {
            continue;
        }
        if c.len() == n as usize {
            out.push((c, set));
            continue;
        }
        for next in [1u8, 0] {
            let mut v = c.colors().to_vec();
            v.push(next);
            stack.push(v);
        }
    }
    Ok(out)
}

/// Least `n <= n_cap` at which every cofinitely valid coloring of `[1, n]`
/// fails at parameter `k`; this is the Rado number of the family at `k`.
pub fn rado_from_bad_sets(family: &EquationFamily, k: i64, n_cap: u32) -> Result<u32> {
    if k < family.validity() {
        return Err(Error::ParameterBelowValidity { k, validity: family.validity() });
    }
    for n in 1..=n_cap {
        let rows = colorings_valid_cofinitely(family, n)?;
        if rows.iter().all(|(_, set)| set.contains(k)) {
            return Ok(n);
        }
    }
    Err(Error::CapExceeded { cap: n_cap })
}
