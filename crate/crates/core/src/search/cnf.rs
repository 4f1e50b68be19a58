use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::solutions::enumerate_solutions;

use super::ColorSystem;

/// DIMACS CNF whose models are the valid 2-colorings of `[1, n]`.
///
/// Variable `t` is true iff `t` has color 1. Every solution tuple of color
/// `c`'s equation inside `[1, n]` contributes one clause forbidding it from
/// being monochromatic in `c`; tuples that repeat a value give clauses with
/// repeated literals, which DIMACS allows.
pub fn export_cnf(sys: &ColorSystem, n: u32) -> Result<String> {
    if sys.num_colors() != 2 {
        return Err(Error::InvalidSystem("CNF export supports two colors only".into()));
    }
    let mut clauses = Vec::new();
    for c in 0..2u8 {
        for tuple in enumerate_solutions(sys.equation(c), u64::from(n))? {
            let lits: Vec<i64> = tuple.iter().map(|&v| if c == 0 { v as i64 } else { -(v as i64) }).collect();
            clauses.push(lits);
        }
    }
    let mut out = String::new();
    writeln!(out, "c valid 2-colorings of [1,{n}] for {sys}").expect("string write");
    writeln!(out, "p cnf {} {}", n, clauses.len()).expect("string write");
    for clause in clauses {
        for lit in clause {
            write!(out, "{lit} ").expect("string write");
        }
        out.push_str("0\n");
    }
    Ok(out)
}
