use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rado_core::formulas::{
    bounds_e_mkl, exact_e_mkl, five_var_formula, four_var_formula, saracino_e1, two_system_formula, FormulaValue,
    TwoSystemKind,
};
use rado_core::lll::{
    check_lll_condition, lll_lower_bound_with, lll_margins, lll_verdicts_exact, pair_count_bounds, solution_count_bound,
    EventSystem, LllConstants, RationalEventSystem,
};
use rado_core::params::{bad_parameter_set, colorings_valid_cofinitely, rado_from_bad_sets};
use rado_core::search::{export_cnf, find_monochromatic_solution, rado_number, verify_periodic_certificate};
use rado_core::{
    enumerate_solutions, Coloring, ColorSystem, EquationFamily, Error as CoreError, LinearEquation, PeriodicPattern,
    RadoResult, SearchConfig,
};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::cache::{Cache, CacheRecord};
use crate::error::{CliError, Result};
use crate::reproduce::{reproduce, write_csv, ReproduceOptions, Scope};

#[derive(Debug, Parser)]
#[command(name = "rado", version, about = "Compute, verify and tabulate Rado numbers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rado number of an equation or a system of per-color equations.
    Compute(ComputeArgs),
    /// Check a coloring or a periodic pattern against a system.
    Verify(VerifyArgs),
    /// List the solutions of an equation inside [1, n].
    Enumerate(EnumerateArgs),
    /// Evaluate a closed-form value.
    Formula(FormulaArgs),
    /// Lower and upper bounds for E(m, k, l).
    Bounds(BoundsArgs),
    /// Parameter values at which a coloring stops being valid.
    BadK(BadKArgs),
    /// Colorings valid for all large parameters, as CSV.
    Table(TableArgs),
    /// Local-lemma checks and bounds.
    Lll {
        #[command(subcommand)]
        command: LllCommand,
    },
    /// DIMACS encoding of "a valid 2-coloring of [1, n] exists".
    ExportCnf(ExportCnfArgs),
    /// Formula-versus-search report.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Equation, e.g. `x1+x2+11*x3=4*x4`; repeat once per color for a system.
    #[arg(long = "eq")]
    pub eqs: Vec<String>,
    /// Whole system as `eq1 | eq2 | ...`.
    #[arg(long, conflicts_with = "eqs")]
    pub system: Option<String>,
    /// Number of colors for a single equation (default 2).
    #[arg(long)]
    pub colors: Option<u8>,
}

impl SystemArgs {
    pub fn build(&self) -> Result<ColorSystem> {
        if let Some(text) = &self.system {
            return Ok(ColorSystem::parse(text, self.colors)?);
        }
        let eqs = self.eqs.iter().map(|s| s.parse::<LinearEquation>()).collect::<rado_core::Result<Vec<_>>>()?;
        match eqs.len() {
            0 => Err(CliError::Input("give --eq or --system".into())),
            1 => Ok(ColorSystem::uniform(eqs.into_iter().next().expect("one equation"), self.colors.unwrap_or(2))?),
            len => {
                if self.colors.is_some_and(|r| r as usize != len) {
                    return Err(CliError::Input(format!("{len} equations given for {} colors", self.colors.unwrap_or(0))));
                }
                Ok(ColorSystem::new(eqs)?)
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Cache file (JSON lines); defaults to $RADO_CACHE.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
}

impl CacheArgs {
    fn open(&self) -> Result<Cache> {
        if self.no_cache {
            Ok(Cache::disabled())
        } else {
            Cache::open(self.cache.as_deref())
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1000)]
    pub max_n: u32,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["cert", "coloring", "periodic"])))]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Certificate file (`n=<N> r=<r>` header, then colors or runs).
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Coloring as a color string (`rbbr`) or runs (`1-9:r,10-92:b`).
    #[arg(long)]
    pub coloring: Option<String>,
    /// Repeating pattern, e.g. `rb`.
    #[arg(long)]
    pub periodic: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long = "eq")]
    pub eq: String,
    #[arg(long)]
    pub n: u64,
    /// Give up with an error past this many solutions.
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["four_var", "five_var", "e1", "exact", "multiple", "shift"])))]
pub struct FormulaArgs {
    /// x+y+kz=4w (needs --k).
    #[arg(long)]
    pub four_var: bool,
    /// x+y+z+kv=(k+j)w (needs --j, --k).
    #[arg(long)]
    pub five_var: bool,
    /// E1(n, l) (needs --n, --l).
    #[arg(long)]
    pub e1: bool,
    /// Exact special cases of E(m, k, l) (needs --m, --k, --l).
    #[arg(long)]
    pub exact: bool,
    /// x+y=z against kx=y (needs --k).
    #[arg(long)]
    pub multiple: bool,
    /// x+y=z against x+a=y (needs --a).
    #[arg(long)]
    pub shift: bool,
    #[arg(long)]
    pub k: Option<i64>,
    #[arg(long)]
    pub j: Option<i64>,
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub l: Option<i64>,
    #[arg(long)]
    pub m: Option<i64>,
    #[arg(long)]
    pub a: Option<i64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
}

#[derive(Debug, Args)]
pub struct BadKArgs {
    /// Family text, e.g. `x1+x2+x3+k*x4=(k+1)*x5`.
    #[arg(long)]
    pub family: String,
    #[arg(long, required_unless_present = "k")]
    pub coloring: Option<String>,
    /// Instead of a set, print the Rado number at this parameter.
    #[arg(long, conflicts_with = "coloring")]
    pub k: Option<i64>,
    /// Largest n tried with --k.
    #[arg(long, default_value_t = 16)]
    pub cap: u32,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub family: String,
    /// Length of the colorings; repeat for several rows.
    #[arg(long, required = true)]
    pub n: Vec<u32>,
}

#[derive(Debug, Subcommand)]
pub enum LllCommand {
    /// Check the condition for a JSON event system.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Decide with exact rationals; values may be strings like "1/10".
        #[arg(long)]
        exact: bool,
    },
    /// Evaluate the lower-bound expression.
    Bound {
        #[arg(long)]
        m_r: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c3: Option<f64>,
        #[arg(long)]
        m1: Option<u32>,
    },
    /// Solution-count bounds for arities m (and m_j) over [1, n].
    Counts {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m_j: Option<u32>,
    },
}

#[derive(Debug, Args)]
pub struct ExportCnfArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Scope name, or `all`; repeatable.
    #[arg(long, default_value = "all")]
    pub scope: Vec<String>,
    /// Per-instance budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub budget: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub cache: CacheArgs,
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| CliError::Input(format!("bad budget {s}")))
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out).map_err(|e| CliError::io("writing output", e))
}

pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Compute(a) => compute(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Enumerate(a) => enumerate(a, out),
        Command::Formula(a) => emit(out, &formula(&a)?),
        Command::Bounds(a) => emit(out, &bounds_e_mkl(a.m, a.k, a.l)?),
        Command::BadK(a) => bad_k(a, out),
        Command::Table(a) => table(a, out),
        Command::Lll { command } => lll(command, out),
        Command::ExportCnf(a) => {
            let text = export_cnf(&a.system.build()?, a.n)?;
            out.write_all(text.as_bytes()).map_err(|e| CliError::io("writing output", e))
        }
        Command::Reproduce(a) => reproduce_cmd(a, out),
    }
}

fn compute(a: ComputeArgs, out: &mut dyn Write) -> Result<()> {
    let sys = a.system.build()?;
    let mut cache = a.cache.open()?;
    let (res, secs, cached) = match cache.lookup(&sys, a.max_n) {
        Some((rec, res)) => (res.clone(), rec.seconds, true),
        None => {
            let cfg = SearchConfig {
                workers: a.workers.max(1),
                time_budget: a.budget.map(seconds).transpose()?,
                ..SearchConfig::default()
            };
            let start = Instant::now();
            match rado_number(&sys, a.max_n, &cfg) {
                Ok(res) => {
                    let secs = start.elapsed().as_secs_f64();
                    cache.store(&[CacheRecord::new(&sys, a.max_n, &res, secs)])?;
                    (res, secs, false)
                }
                Err(CoreError::BudgetExceeded) => {
                    let report = json!({
                        "system": sys.to_string(),
                        "status": "timeout",
                        "rado": Json::Null,
                        "seconds": start.elapsed().as_secs_f64(),
                        "cached": false,
                    });
                    return emit(out, &report);
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let (status, rado, searched) = match &res {
        RadoResult::Found { value, .. } => ("found", json!(value), Json::Null),
        RadoResult::Unresolved { searched_up_to, .. } => ("unresolved", Json::Null, json!(searched_up_to)),
    };
    let report = json!({
        "system": sys.to_string(),
        "status": status,
        "rado": rado,
        "searched_up_to": searched,
        "certificate": res.certificate().to_runs(),
        "seconds": secs,
        "cached": cached,
    });
    emit(out, &report)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let sys = a.system.build()?;
    let r = sys.num_colors();
    if let Some(p) = &a.periodic {
        let pat = PeriodicPattern::parse(p, r)?;
        let valid = verify_periodic_certificate(&sys, &pat)?;
        return emit(out, &json!({ "valid": valid, "period": pat.period(), "pattern": pat.to_string() }));
    }
    let coloring = match (&a.cert, &a.coloring) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            Coloring::from_certificate(&text).or_else(|_| Coloring::parse(&text, r))?
        }
        (None, Some(text)) => Coloring::parse(text, r)?,
        (None, None) => return Err(CliError::Input("give --cert, --coloring or --periodic".into())),
    };
    if coloring.num_colors() != r {
        return Err(CliError::Input(format!("coloring uses {} colors, system has {r}", coloring.num_colors())));
    }
    let witness = find_monochromatic_solution(&sys, &coloring)?;
    let witness = witness.map(|(c, tuple)| json!({ "color": c, "solution": tuple }));
    emit(out, &json!({ "valid": witness.is_none(), "n": coloring.len(), "witness": witness }))
}

fn enumerate(a: EnumerateArgs, out: &mut dyn Write) -> Result<()> {
    let eq: LinearEquation = a.eq.parse()?;
    let mut sols = Vec::new();
    for s in enumerate_solutions(&eq, a.n)? {
        if sols.len() as u64 >= a.limit {
            return Err(CoreError::EnumerationLimitExceeded { count: u128::from(a.limit) + 1, limit: u128::from(a.limit) }.into());
        }
        sols.push(s);
    }
    emit(out, &json!({ "equation": eq.to_string(), "n": a.n, "count": sols.len(), "solutions": sols }))
}

fn need(v: Option<i64>, flag: &str) -> Result<i64> {
    v.ok_or_else(|| CliError::Input(format!("this formula needs --{flag}")))
}

#[derive(Serialize)]
pub struct FormulaReport {
    pub input: String,
    #[serde(flatten)]
    pub value: FormulaValue,
}

pub fn formula(a: &FormulaArgs) -> Result<FormulaReport> {
    let (input, value) = if a.four_var {
        let k = need(a.k, "k")?;
        (format!("x+y+{k}z=4w"), four_var_formula(k)?)
    } else if a.five_var {
        let (j, k) = (need(a.j, "j")?, need(a.k, "k")?);
        (format!("x+y+z+{k}v={}w", k + j), five_var_formula(j, k)?)
    } else if a.e1 {
        let (n, l) = (need(a.n, "n")?, need(a.l, "l")?);
        (format!("E1(n={n},l={l})"), saracino_e1(n, l)?)
    } else if a.exact {
        let (m, k, l) = (need(a.m, "m")?, need(a.k, "k")?, need(a.l, "l")?);
        (format!("E({m},{k},{l})"), exact_e_mkl(m, k, l)?)
    } else if a.multiple {
        let k = need(a.k, "k")?;
        (format!("x+y=z | {k}x=y"), two_system_formula(TwoSystemKind::LinearMultiple, k)?)
    } else {
        let a_ = need(a.a, "a")?;
        (format!("x+y=z | x+{a_}=y"), two_system_formula(TwoSystemKind::Shift, a_)?)
    };
    Ok(FormulaReport { input, value })
}

fn bad_k(a: BadKArgs, out: &mut dyn Write) -> Result<()> {
    let fam = EquationFamily::parse(&a.family)?;
    if let Some(k) = a.k {
        let rr = rado_from_bad_sets(&fam, k, a.cap)?;
        return emit(out, &json!({ "family": fam.to_string(), "k": k, "rado": rr }));
    }
    let text = a.coloring.as_deref().unwrap_or_default();
    let set = bad_parameter_set(&fam, &Coloring::parse(text, 2)?)?;
    emit(out, &json!({ "family": fam.to_string(), "coloring": text, "bad": set }))
}

fn table(a: TableArgs, out: &mut dyn Write) -> Result<()> {
    let fam = EquationFamily::parse(&a.family)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "coloring", "bad_k"])?;
    for n in a.n {
        for (c, bad) in colorings_valid_cofinitely(&fam, n)? {
            let set = bad.finite_bad.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            w.write_record([n.to_string(), c.to_string(), set])?;
        }
    }
    w.flush().map_err(|e| CliError::io("writing output", e))
}

/// Accepts a JSON number, an integer, or a string `"p/q"` / `"0.05"`.
fn rational(v: &Json) -> Result<BigRational> {
    let bad = || CliError::Input(format!("not a rational value: {v}"));
    let text = match v {
        Json::Number(n) => n.to_string(),
        Json::String(s) => s.trim().to_string(),
        _ => return Err(bad()),
    };
    if let Some((int, frac)) = text.split_once('.') {
        if frac.contains(['e', 'E']) {
            let f: f64 = text.parse().map_err(|_| bad())?;
            return BigRational::from_float(f).ok_or_else(bad);
        }
        let digits = format!("{int}{frac}");
        let denom = format!("1{}", "0".repeat(frac.len()));
        return BigRational::from_str(&format!("{digits}/{denom}")).map_err(|_| bad());
    }
    if text.contains(['e', 'E']) {
        let f: f64 = text.parse().map_err(|_| bad())?;
        return BigRational::from_float(f).ok_or_else(bad);
    }
    BigRational::from_str(&text).map_err(|_| bad())
}

fn rational_system(doc: &Json) -> Result<RationalEventSystem> {
    let list = |key: &str| -> Result<Vec<BigRational>> {
        doc.get(key)
            .and_then(Json::as_array)
            .ok_or_else(|| CliError::Input(format!("missing array {key:?}")))?
            .iter()
            .map(rational)
            .collect()
    };
    let edges: Vec<(usize, usize)> = match doc.get("edges") {
        Some(e) => serde_json::from_value(e.clone())?,
        None => Vec::new(),
    };
    Ok(RationalEventSystem::from_edges(list("probabilities")?, &edges, list("weights")?)?)
}

fn lll(cmd: LllCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        LllCommand::Check { input, exact } => {
            let text = fs::read_to_string(&input).map_err(|e| CliError::io(format!("reading {}", input.display()), e))?;
            let doc: Json = serde_json::from_str(&text)?;
            if exact {
                let sys = rational_system(&doc)?;
                let verdicts = lll_verdicts_exact(&sys);
                emit(out, &json!({ "holds": verdicts.iter().all(|&v| v), "exact": true, "verdicts": verdicts }))
            } else {
                let sys: EventSystem = serde_json::from_value(doc)?;
                emit(out, &json!({ "holds": check_lll_condition(&sys), "exact": false, "margins": lll_margins(&sys) }))
            }
        }
        LllCommand::Bound { m_r, r, c2, c1, c3, m1 } => {
            emit(out, &lll_lower_bound_with(m_r, r, LllConstants { c2, c1, c3, m1 })?)
        }
        LllCommand::Counts { m, n, m_j } => {
            let single = solution_count_bound(m, n)?;
            let pair = pair_count_bounds(m, m_j.unwrap_or(m), n)?;
            // u128 values go out as strings so JSON readers do not round them
            emit(
                out,
                &json!({
                    "m": m,
                    "n": n,
                    "per_element": single.per_element.to_string(),
                    "same_equation": single.same_equation.to_string(),
                    "pair": { "ii": pair.ii.to_string(), "ij": pair.ij.to_string(), "ji": pair.ji.to_string() },
                }),
            )
        }
    }
}

fn reproduce_cmd(a: ReproduceArgs, out: &mut dyn Write) -> Result<()> {
    let mut scopes = Vec::new();
    for s in &a.scope {
        if s == "all" {
            scopes.extend(Scope::ALL);
        } else {
            scopes.push(s.parse::<Scope>()?);
        }
    }
    scopes.sort();
    scopes.dedup();
    let opts = ReproduceOptions { budget: seconds(a.budget)?, jobs: a.jobs };
    let mut cache = a.cache.open()?;
    let rows = reproduce(&scopes, &opts, &mut cache)?;
    match a.format {
        Format::Csv => write_csv(&rows, out),
        Format::Json => emit(out, &json!({ "schema": 1, "rows": rows })),
    }
}
