//! Plain depth-first search over colorings, used for full enumeration and as
//! a reference for the clause-learning engine.

use crate::coloring::Coloring;
use crate::error::{Error, Result};

use super::patterns::{Layer, PatternCache};
use super::ColorSystem;

/// Default guard on `r^n` for full enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 24;

struct Dfs<'a> {
    sys: &'a ColorSystem,
    layers: Vec<Vec<Layer>>,
    colors: Vec<u8>,
}

impl<'a> Dfs<'a> {
    fn new(sys: &'a ColorSystem, n: u32) -> Result<Self> {
        let cache = PatternCache::global();
        let layers = (1..=n)
            .map(|t| (0..sys.num_colors()).map(|c| cache.get(sys.equation(c), t)).collect())
            .collect::<Result<Vec<Vec<Layer>>>>()?;
        Ok(Self { sys, layers, colors: Vec::with_capacity(n as usize) })
    }

    /// Whether coloring the next integer `c` creates a monochromatic solution.
    fn admits(&self, c: u8) -> bool {
        let t = self.colors.len() as u32 + 1;
        self.layers[t as usize - 1][c as usize]
            .iter()
            .all(|set| !set.iter().all(|&e| e == t || self.colors[e as usize - 1] == c))
    }

    /// Visits valid colorings in lexicographic order; `visit` returns false
    /// to stop.
    fn run(&mut self, first_fixed: bool, visit: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        if self.colors.len() == self.layers.len() {
            return visit(&self.colors);
        }
        let top = if first_fixed && self.colors.is_empty() { 1 } else { self.sys.num_colors() };
        for c in 0..top {
            if self.admits(c) {
                self.colors.push(c);
                let go_on = self.run(first_fixed, visit);
                self.colors.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// All valid colorings of `[1, n]` in lexicographic order, with color(1)=0
/// when `fix_first_color` is set. Fails when the number of candidate
/// colorings exceeds `limit`.
pub fn enumerate_valid_colorings(sys: &ColorSystem, n: u32, fix_first_color: bool, limit: u128) -> Result<Vec<Coloring>> {
    let r = u128::from(sys.num_colors());
    let free = if fix_first_color { n.saturating_sub(1) } else { n };
    let count = r.checked_pow(free).unwrap_or(u128::MAX);
    if count > limit {
        return Err(Error::EnumerationLimitExceeded { count, limit });
    }
    let mut dfs = Dfs::new(sys, n)?;
    let mut out = Vec::new();
    dfs.run(fix_first_color, &mut |colors| {
        out.push(Coloring::new(colors.to_vec(), sys.num_colors()).expect("colors in range"));
        true
    });
    Ok(out)
}

/// The first valid coloring reached by plain depth-first search with the
/// engine's branching order (and its symmetry fixing).
pub fn first_valid_coloring_by_backtracking(sys: &ColorSystem, n: u32) -> Result<Option<Coloring>> {
    let mut dfs = Dfs::new(sys, n)?;
    let mut first = None;
    let fixed = sys.is_symmetric() && sys.num_colors() > 1;
    dfs.run(fixed, &mut |colors| {
        first = Some(Coloring::new(colors.to_vec(), sys.num_colors()).expect("colors in range"));
        false
    });
    Ok(first)
}
