//! Exact computation and verification of Rado numbers.
//!
//! The crate is organised around the data flow of a computation: linear
//! equations and their one-parameter families ([`equation`]), solution
//! enumeration ([`solutions`]), colorings and certificates ([`coloring`]),
//! the search engine ([`search`]), closed-form values and bounds
//! ([`formulas`]), symbolic bad-parameter analysis ([`params`]) and the
//! local-lemma calculator ([`lll`]).

pub mod coloring;
pub mod equation;
pub mod error;
pub mod formulas;
pub mod lll;
pub mod params;
pub mod search;
pub mod solutions;

pub use coloring::{Coloring, PeriodicPattern};
pub use equation::{instantiate_family, make_equation, AffineCoeff, EquationFamily, LinearEquation, Term};
pub use error::{Error, Result};
pub use search::{ColorSystem, RadoResult, SearchConfig};
pub use solutions::{enumerate_solutions, enumerate_solutions_with_max, layer_patterns, SolutionTuple};

/// Version string recorded alongside cached results.
pub const ENGINE_VERSION: &str = concat!("rado-core ", env!("CARGO_PKG_VERSION"));
