//! Certificate checks that share nothing with the search path.
//!
//! A finite certificate is checked class by class with a subset-sum style
//! dynamic program: for color `c` with class `S`, walk the slots of `c`'s
//! equation and keep the set of partial sums `sum a_i x_i` reachable with
//! every `x_i` in `S`. A monochromatic solution exists iff the negated
//! constant is reachable at the end, and a witness tuple is recovered by
//! walking the stored layers backwards.

use crate::coloring::{Coloring, PeriodicPattern};
use crate::error::{Error, Result};
use crate::solutions::enumerate_solutions;

use super::ColorSystem;

/// Largest sum range handled by the bitset program; wider ranges fall back
/// to solution enumeration.
const MAX_RANGE_BITS: u128 = 1 << 30;

#[derive(Clone)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// `self |= src << shift`, truncated to the length of `self`.
    fn or_shifted(&mut self, src: &Bits, shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        let n = self.words.len();
        for i in (ws..n).rev() {
            let j = i - ws;
            let mut w = src.words.get(j).copied().unwrap_or(0) << bs;
            if bs > 0 && j > 0 {
                w |= src.words.get(j - 1).copied().unwrap_or(0) >> (64 - bs);
            }
            self.words[i] |= w;
        }
    }
}

/// Monochromatic solution of `coeffs . x = target` with every `x_i` in
/// `class` (ascending), if one exists.
fn class_solution(coeffs: &[i64], target: i64, class: &[u64]) -> Result<Option<Vec<u64>>> {
    let (Some(&lo_v), Some(&hi_v)) = (class.first(), class.last()) else {
        return Ok(None);
    };
    // Substitute x_i = lo_v + d_i with d_i >= 0 so each step only adds
    // a_i * d_i; fold the lo_v parts into the target.
    let mut shifted_target = i128::from(target);
    let mut lo_sum: i128 = 0;
    let mut width: u128 = 0;
    for &a in coeffs {
        shifted_target -= i128::from(a) * i128::from(lo_v);
        let span = i128::from(a) * i128::from(hi_v - lo_v);
        lo_sum += span.min(0);
        width += span.unsigned_abs();
    }
    if width + 1 > MAX_RANGE_BITS {
        return Err(Error::Overflow { context: "sizing the certificate check" });
    }
    let len = width as usize + 1;
    let goal = shifted_target - lo_sum;
    if goal < 0 || goal > width as i128 {
        return Ok(None);
    }
    let deltas: Vec<u64> = class.iter().map(|&v| v - lo_v).collect();

    // layers[i] holds sums (offset by -lo_sum) reachable after i slots.
    let mut layers = Vec::with_capacity(coeffs.len() + 1);
    let mut start = Bits::new(len);
    start.set((-lo_sum) as usize);
    layers.push(start);
    for &a in coeffs {
        let prev = layers.last().expect("non-empty");
        let mut next = Bits::new(len);
        for &d in &deltas {
            let step = i128::from(a) * i128::from(d);
            if step >= 0 {
                next.or_shifted(prev, step as usize);
            } else {
                let s = (-step) as usize;
                for i in 0..len.saturating_sub(s) {
                    if prev.get(i + s) {
                        next.set(i);
                    }
                }
            }
        }
        layers.push(next);
    }
    let goal = goal as usize;
    if !layers[coeffs.len()].get(goal) {
        return Ok(None);
    }
    let mut tuple = vec![0u64; coeffs.len()];
    let mut cur = goal as i128;
    for i in (0..coeffs.len()).rev() {
        let a = i128::from(coeffs[i]);
        let d = deltas
            .iter()
            .copied()
            .find(|&d| {
                let before = cur - a * i128::from(d);
                before >= 0 && before < len as i128 && layers[i].get(before as usize)
            })
            .expect("reachable sum has a predecessor");
        cur -= a * i128::from(d);
        tuple[i] = lo_v + d;
    }
    Ok(Some(tuple))
}

/// First monochromatic solution found, as `(color, tuple)`.
pub fn find_monochromatic_solution(sys: &ColorSystem, c: &Coloring) -> Result<Option<(u8, Vec<u64>)>> {
    if c.num_colors() != sys.num_colors() {
        return Err(Error::InvalidSystem(format!(
            "coloring uses {} colors but the system has {}",
            c.num_colors(),
            sys.num_colors()
        )));
    }
    for color in 0..sys.num_colors() {
        let eq = sys.equation(color);
        let class = c.class(color);
        match class_solution(&eq.signed_coeffs(), -eq.constant(), &class) {
            Ok(Some(t)) => return Ok(Some((color, t))),
            Ok(None) => {}
            Err(Error::Overflow { .. }) => {
                for t in enumerate_solutions(eq, c.len() as u64)? {
                    if t.iter().all(|&v| c.colors()[v as usize - 1] == color) {
                        return Ok(Some((color, t)));
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// True iff no color class of `c` contains a solution of its equation.
pub fn verify_certificate(sys: &ColorSystem, c: &Coloring) -> Result<bool> {
    Ok(find_monochromatic_solution(sys, c)?.is_none())
}

/// True iff, for every color, no choice of residues from that color's
/// residue classes satisfies its equation modulo the period. Any integer
/// solution reduces to such a residue solution, so `true` proves that the
/// pattern colors all of the positive integers validly.
pub fn verify_periodic_certificate(sys: &ColorSystem, p: &PeriodicPattern) -> Result<bool> {
    if p.num_colors() != sys.num_colors() {
        return Err(Error::InvalidSystem(format!(
            "pattern uses {} colors but the system has {}",
            p.num_colors(),
            sys.num_colors()
        )));
    }
    let m = p.period() as i64;
    for color in 0..sys.num_colors() {
        let eq = sys.equation(color);
        let residues = p.residues(color);
        if residues.is_empty() {
            continue;
        }
        let mut reach = vec![false; m as usize];
        reach[0] = true;
        for a in eq.signed_coeffs() {
            let mut next = vec![false; m as usize];
            for (s, _) in reach.iter().enumerate().filter(|(_, &r)| r) {
                for &rho in &residues {
                    let v = (s as i64 + a.rem_euclid(m) * (rho as i64)).rem_euclid(m);
                    next[v as usize] = true;
                }
            }
            reach = next;
        }
        if reach[(-eq.constant()).rem_euclid(m) as usize] {
            return Ok(false);
        }
    }
    Ok(true)
}
