//! Colorings of `[1, n]`, periodic patterns and their text forms.
//!
//! Two-colorings use the alphabet `r`/`b` (color 0 / color 1); larger
//! palettes use decimal digits. A coloring can also be written in run-length
//! form, `1-9:r,10-92:b,93:r`, which is how interval colorings are usually
//! stated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<u8>,
    r: u8,
}

fn label(color: u8, r: u8) -> char {
    if r <= 2 {
        if color == 0 {
            'r'
        } else {
            'b'
        }
    } else {
        char::from_digit(u32::from(color), 36).unwrap_or('?')
    }
}

fn unlabel(ch: char, r: u8) -> Result<u8> {
    let c = match ch {
        'r' | 'R' if r <= 2 => 0,
        'b' | 'B' if r <= 2 => 1,
        d => d
            .to_digit(36)
            .filter(|_| d.is_ascii_digit() || r > 10)
            .ok_or_else(|| Error::Parse(format!("unknown color label {d:?}")))? as u8,
    };
    if c >= r {
        return Err(Error::InvalidColor { color: c, colors: r });
    }
    Ok(c)
}

impl Coloring {
    pub fn new(colors: Vec<u8>, r: u8) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSystem("a coloring needs at least one color".into()));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= r) {
            return Err(Error::InvalidColor { color: c, colors: r });
        }
        Ok(Self { colors, r })
    }

    pub fn empty(r: u8) -> Self {
        Self { colors: Vec::new(), r }
    }

    pub fn uniform(n: usize, color: u8, r: u8) -> Result<Self> {
        Self::new(vec![color; n], r)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn num_colors(&self) -> u8 {
        self.r
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Color of the integer `t` (1-based).
    pub fn color(&self, t: u64) -> Result<u8> {
        if t == 0 || t as usize > self.colors.len() {
            return Err(Error::OutOfRange { value: t, len: self.colors.len() });
        }
        Ok(self.colors[t as usize - 1])
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self { colors: self.colors[..n.min(self.colors.len())].to_vec(), r: self.r }
    }

    pub fn push(&mut self, color: u8) -> Result<()> {
        if color >= self.r {
            return Err(Error::InvalidColor { color, colors: self.r });
        }
        self.colors.push(color);
        Ok(())
    }

    /// Applies a permutation of the palette (`perm[old] = new`).
    pub fn permuted(&self, perm: &[u8]) -> Result<Self> {
        Self::new(self.colors.iter().map(|&c| perm[c as usize]).collect(), self.r)
    }

    /// Members of color class `c`, ascending.
    pub fn class(&self, c: u8) -> Vec<u64> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == c)
            .map(|(i, _)| i as u64 + 1)
            .collect()
    }

    pub fn parse(text: &str, r: u8) -> Result<Self> {
        let text = text.trim();
        if text.contains(':') {
            return Self::parse_runs(text, r);
        }
        let colors = text.chars().map(|ch| unlabel(ch, r)).collect::<Result<Vec<_>>>()?;
        Self::new(colors, r)
    }

    /// Parses the run-length form; runs must tile `[1, n]` in order.
    pub fn parse_runs(text: &str, r: u8) -> Result<Self> {
        let mut colors = Vec::new();
        for run in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (range, col) = run
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("run {run:?} lacks ':'")))?;
            let (a, b) = match range.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (range.trim(), range.trim()),
            };
            let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
            let (a, b) = (parse(a)?, parse(b)?);
            if a != colors.len() + 1 || b < a {
                return Err(Error::Parse(format!("run {run:?} does not continue [1,{}]", colors.len())));
            }
            let mut chars = col.trim().chars();
            let c = match (chars.next(), chars.next()) {
                (Some(ch), None) => unlabel(ch, r)?,
                _ => return Err(Error::Parse(format!("bad color in run {run:?}"))),
            };
            colors.extend(std::iter::repeat_n(c, b - a + 1));
        }
        Self::new(colors, r)
    }

    pub fn to_runs(&self) -> String {
        let mut parts = Vec::new();
        let mut start = 0;
        while start < self.colors.len() {
            let c = self.colors[start];
            let mut end = start;
            while end + 1 < self.colors.len() && self.colors[end + 1] == c {
                end += 1;
            }
            if start == end {
                parts.push(format!("{}:{}", start + 1, label(c, self.r)));
            } else {
                parts.push(format!("{}-{}:{}", start + 1, end + 1, label(c, self.r)));
            }
            start = end + 1;
        }
        parts.join(",")
    }

    /// Certificate file body: a header line and the color string.
    pub fn to_certificate(&self) -> String {
        format!("n={} r={}\n{}\n", self.len(), self.r, self)
    }

    /// Reads a certificate file; the body may be a color string or runs.
    pub fn from_certificate(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty certificate".into()))?;
        let mut n = None;
        let mut r = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("r", v)) => r = v.parse::<u8>().ok(),
                _ => return Err(Error::Parse(format!("bad header field {field:?}"))),
            }
        }
        let (n, r) = match (n, r) {
            (Some(n), Some(r)) => (n, r),
            _ => return Err(Error::Parse("header must be `n=<N> r=<r>`".into())),
        };
        let body: String = lines.collect::<Vec<_>>().join("");
        let coloring = Self::parse(&body, r)?;
        if coloring.len() != n {
            return Err(Error::Parse(format!("header says n={n} but body colors {}", coloring.len())));
        }
        Ok(coloring)
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.colors {
            write!(f, "{}", label(c, self.r))?;
        }
        Ok(())
    }
}

/// Coloring of all positive integers by a repeating pattern: `t` gets
/// `pattern[(t - 1) mod p]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicPattern {
    pattern: Vec<u8>,
    r: u8,
}

impl PeriodicPattern {
    pub fn new(pattern: Vec<u8>, r: u8) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Parse("a periodic pattern needs period >= 1".into()));
        }
        Coloring::new(pattern.clone(), r)?;
        Ok(Self { pattern, r })
    }

    pub fn parse(text: &str, r: u8) -> Result<Self> {
        let c = Coloring::parse(text, r)?;
        Self::new(c.colors, r)
    }

    /// Odd integers color 0, even integers color 1.
    pub fn parity() -> Self {
        Self { pattern: vec![0, 1], r: 2 }
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn num_colors(&self) -> u8 {
        self.r
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn color_of(&self, t: u64) -> u8 {
        debug_assert!(t >= 1);
        self.pattern[((t - 1) % self.pattern.len() as u64) as usize]
    }

    /// Residues `t mod p` carried by color `c`.
    pub fn residues(&self, c: u8) -> Vec<u64> {
        let p = self.pattern.len() as u64;
        (0..p).filter(|&rho| self.color_of(if rho == 0 { p } else { rho }) == c).collect()
    }

    /// The first `n` colors as a finite coloring.
    pub fn unroll(&self, n: usize) -> Coloring {
        Coloring { colors: (1..=n as u64).map(|t| self.color_of(t)).collect(), r: self.r }
    }
}

impl fmt::Display for PeriodicPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.pattern {
            write!(f, "{}", label(c, self.r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_and_runs() {
        let c = Coloring::parse("rbbr", 2).unwrap();
        assert_eq!(c.colors(), &[0, 1, 1, 0]);
        assert_eq!(c.to_string(), "rbbr");
        assert_eq!(c.to_runs(), "1:r,2-3:b,4:r");
        assert_eq!(Coloring::parse(&c.to_runs(), 2).unwrap(), c);
    }

    #[test]
    fn interval_coloring_from_runs() {
        let c = Coloring::parse("1-9:r,10-92:b,93:r", 2).unwrap();
        assert_eq!(c.len(), 93);
        assert_eq!(c.color(9).unwrap(), 0);
        assert_eq!(c.color(10).unwrap(), 1);
        assert_eq!(c.color(93).unwrap(), 0);
        assert!(Coloring::parse("1-9:r,11-92:b", 2).is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let c = Coloring::parse("0120", 3).unwrap();
        let text = c.to_certificate();
        assert!(text.starts_with("n=4 r=3\n"));
        assert_eq!(Coloring::from_certificate(&text).unwrap(), c);
        let runs = "n=93 r=2\n1-9:r,10-92:b,93:r\n";
        assert_eq!(Coloring::from_certificate(runs).unwrap().len(), 93);
        assert!(Coloring::from_certificate("n=5 r=2\nrbb\n").is_err());
    }

    #[test]
    fn rejects_bad_colors() {
        assert!(Coloring::new(vec![0, 2], 2).is_err());
        assert!(Coloring::parse("rxb", 2).is_err());
        assert!(Coloring::parse("013", 3).is_err());
    }

    #[test]
    fn periodic_pattern_semantics() {
        let p = PeriodicPattern::parity();
        assert_eq!(p.color_of(1), 0);
        assert_eq!(p.color_of(2), 1);
        assert_eq!(p.color_of(7), 0);
        assert_eq!(p.residues(0), vec![1]);
        assert_eq!(p.residues(1), vec![0]);
        assert_eq!(p.unroll(5).to_string(), "rbrbr");
    }
}
