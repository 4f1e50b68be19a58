//! Formula-versus-search report over fixed instance lists.
//!
//! Rows come out in scope order and, within a scope, in instance order,
//! whatever order the searches finish in. Seconds are those recorded when
//! the search ran, so a run from a warm cache prints the same bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rado_core::formulas::{five_var_formula, four_var_formula, saracino_e1, two_system_formula, TwoSystemKind};
use rado_core::params::{bad_parameter_set, colorings_valid_cofinitely, rado_from_bad_sets};
use rado_core::search::{rado_number, verify_periodic_certificate};
use rado_core::{Coloring, ColorSystem, EquationFamily, LinearEquation, PeriodicPattern, RadoResult, SearchConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{Cache, CacheRecord};
use crate::error::{CliError, Result};

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Table2,
    ThmFourVar,
    FiveVar,
    TwoSystem,
    SaracinoSpots,
    Appendix2Tables,
}

impl Scope {
    pub const ALL: [Scope; 6] =
        [Scope::Table2, Scope::ThmFourVar, Scope::FiveVar, Scope::TwoSystem, Scope::SaracinoSpots, Scope::Appendix2Tables];

    pub fn name(self) -> &'static str {
        match self {
            Scope::Table2 => "table2",
            Scope::ThmFourVar => "thm-four-var",
            Scope::FiveVar => "five-var",
            Scope::TwoSystem => "two-system",
            Scope::SaracinoSpots => "saracino-spots",
            Scope::Appendix2Tables => "appendix2-tables",
        }
    }
}

impl FromStr for Scope {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        Scope::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown scope {s:?}")))
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Discrepancy,
    Timeout,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Discrepancy => "discrepancy",
            Status::Timeout => "timeout",
            Status::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub scope: String,
    pub instance: String,
    pub source: String,
    pub formula: String,
    pub search: String,
    pub status: Status,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub budget: Duration,
    /// Threads for independent instances; 0 picks the machine's count.
    pub jobs: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, jobs: 0 }
    }
}

/// What a search row is checked against.
#[derive(Debug, Clone)]
enum Expect {
    Value(u64),
    /// A closed form disagreeing with the published table.
    Disputed { formula: u64, table: u64 },
    /// No finite value; `periodic` says whether a periodic certificate checked.
    Infinite { periodic: bool },
}

#[derive(Debug, Clone)]
struct Task {
    instance: String,
    source: String,
    expect: Expect,
    sys: ColorSystem,
    n_max: u32,
}

enum Outcome {
    Done(RadoResult, f64, bool),
    Timeout,
}

fn uniform(eq: LinearEquation) -> Result<ColorSystem> {
    Ok(ColorSystem::uniform(eq, 2)?)
}

fn four_var_eq(k: i64) -> Result<LinearEquation> {
    Ok(LinearEquation::new(&[(1, 1), (1, 2), (k, 3)], &[(4, 4)])?)
}

fn finite(fv: &rado_core::formulas::FormulaValue) -> Result<u64> {
    fv.finite().ok_or_else(|| CliError::Input(format!("{} has no finite value", fv.source)))
}

fn table2_tasks() -> Result<Vec<Task>> {
    (6..=31i64)
        .filter(|&k| k != 16)
        .map(|k| {
            let fv = four_var_formula(k)?;
            Ok(Task {
                instance: format!("x+y+{k}z=4w"),
                source: "x+y+kz=4w value table".into(),
                expect: Expect::Value(finite(&fv)?),
                sys: uniform(four_var_eq(k)?)?,
                n_max: 2000,
            })
        })
        .collect()
}

fn four_var_tasks() -> Result<Vec<Task>> {
    let mut out = Vec::new();
    let fv = four_var_formula(15)?;
    let d = fv.discrepancy.clone().ok_or_else(|| CliError::Input("k=15 carries no discrepancy".into()))?;
    out.push(Task {
        instance: "x+y+15z=4w".into(),
        source: "x+y+kz=4w residue formula vs value table".into(),
        expect: Expect::Disputed { formula: d.formula_value, table: d.table_value },
        sys: uniform(four_var_eq(15)?)?,
        n_max: 2000,
    });
    for k in 32..=60i64 {
        let fv = four_var_formula(k)?;
        out.push(Task {
            instance: format!("x+y+{k}z=4w"),
            source: fv.source.clone(),
            expect: Expect::Value(finite(&fv)?),
            sys: uniform(four_var_eq(k)?)?,
            n_max: 2000,
        });
    }
    Ok(out)
}

/// `(j, largest k)` pairs covered by the five-variable scope.
pub const FIVE_VAR_RANGES: [(i64, i64); 5] = [(1, 25), (2, 20), (3, 20), (4, 20), (5, 35)];

fn five_var_tasks() -> Result<Vec<Task>> {
    let mut out = Vec::new();
    for (j, top) in FIVE_VAR_RANGES {
        let fam = EquationFamily::e5_shift(j)?;
        for k in 1..=top {
            let fv = five_var_formula(j, k)?;
            out.push(Task {
                instance: format!("x+y+z+{k}v={}w", k + j),
                source: fv.source.clone(),
                expect: Expect::Value(finite(&fv)?),
                sys: uniform(fam.instantiate(k)?)?,
                n_max: 40,
            });
        }
    }
    Ok(out)
}

fn two_system_tasks() -> Result<Vec<Task>> {
    let mut out = Vec::new();
    for k in 3..=12i64 {
        let fv = two_system_formula(TwoSystemKind::LinearMultiple, k)?;
        out.push(Task {
            instance: format!("x+y=z | {k}x=y"),
            source: fv.source.clone(),
            expect: Expect::Value(finite(&fv)?),
            sys: ColorSystem::schur_vs_multiple(k)?,
            n_max: 200,
        });
    }
    for a in 2..=20i64 {
        if a % 2 == 1 && a > 7 {
            continue;
        }
        let fv = two_system_formula(TwoSystemKind::Shift, a)?;
        let sys = ColorSystem::schur_vs_shift(a)?;
        let (expect, n_max) = match fv.finite() {
            Some(v) => (Expect::Value(v), 200),
            None => {
                let periodic = verify_periodic_certificate(&sys, &PeriodicPattern::parity())?;
                (Expect::Infinite { periodic }, 1000)
            }
        };
        out.push(Task { instance: format!("x+y=z | x+{a}=y"), source: fv.source.clone(), expect, sys, n_max });
    }
    Ok(out)
}

/// Window of `(n, l)` for the E1 spot checks: the listed spots plus every
/// covered pair with `3 <= l <= 12`, `n <= 14`.
pub fn saracino_window() -> Vec<(i64, i64)> {
    let mut pts: BTreeSet<(i64, i64)> = [(3, 3), (3, 4)].into_iter().collect();
    for l in 3..=8 {
        pts.insert((l + 1, l));
    }
    for l in 3..=12 {
        for n in 2..=14 {
            if saracino_e1(n, l).is_ok() {
                pts.insert((n, l));
            }
        }
    }
    let mut v: Vec<_> = pts.into_iter().collect();
    v.sort_by_key(|&(n, l)| (l, n));
    v
}

fn saracino_tasks() -> Result<Vec<Task>> {
    saracino_window()
        .into_iter()
        .map(|(n, l)| {
            let fv = saracino_e1(n, l)?;
            Ok(Task {
                instance: format!("E1(n={n},l={l})"),
                source: fv.source.clone(),
                expect: Expect::Value(finite(&fv)?),
                sys: uniform(LinearEquation::e1(n as usize, l)?)?,
                n_max: 60,
            })
        })
        .collect()
}

/// `n` and the colorings of `[1, n]` listed for it.
pub type TableRow = (u32, &'static [&'static str]);

/// Published valid colorings of `[1, n]` for `x+y+z+kv=(k+1)w`.
pub const SHIFT_ONE_ROWS: [TableRow; 8] = [
    (3, &["rbb", "rrb"]),
    (4, &["rbbr", "rbbb", "rrbb"]),
    (5, &["rbbbr", "rrbbb", "rbbrr", "rbbrb", "rbbbb"]),
    (6, &["rrbbbb", "rbbbrr", "rbbbbr"]),
    (7, &["rrbbbbr", "rbbbbrr", "rrbbbbb"]),
    (8, &["rrbbbbbb", "rrbbbbrr", "rrbbbbrb", "rrbbbbbr"]),
    (9, &["rrbbbbbbr", "rrbbbbbrr"]),
    (10, &["rrbbbbbbrr"]),
];

/// Published valid colorings of `[1, n]` for `x+y+z+kv=(k+5)w`.
pub const SHIFT_FIVE_ROWS: [TableRow; 4] = [(3, &["rbb"]), (5, &["rbbrr"]), (6, &["rbbrrr"]), (8, &["rbbrrrbb"])];

fn sorted(items: impl IntoIterator<Item = String>) -> String {
    let set: BTreeSet<String> = items.into_iter().collect();
    if set.is_empty() {
        "(none)".into()
    } else {
        set.into_iter().collect::<Vec<_>>().join(" ")
    }
}

fn table_rows(scope: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let row = |instance: String, source: &str, formula: String, search: String, status: Status| Row {
        scope: scope.into(),
        instance,
        source: source.into(),
        formula,
        search,
        status,
        seconds: None,
    };
    let tables: [(i64, &[TableRow]); 2] = [(1, &SHIFT_ONE_ROWS), (5, &SHIFT_FIVE_ROWS)];
    for (j, published) in tables {
        let fam = EquationFamily::e5_shift(j)?;
        for &(n, expect) in published {
            let got = colorings_valid_cofinitely(&fam, n)?;
            let want = sorted(expect.iter().map(|s| s.to_string()));
            let have = sorted(got.iter().map(|(c, _)| c.to_string()));
            let status = if want == have { Status::Pass } else { Status::Fail };
            rows.push(row(format!("{fam} n={n}"), "valid colorings table", want, have, status));
        }
        if j == 5 {
            let got = colorings_valid_cofinitely(&fam, 9)?;
            let have = sorted(got.iter().map(|(c, _)| c.to_string()));
            rows.push(row(format!("{fam} n=9"), "valid colorings table (row not listed)", "-".into(), have, Status::Info));
        }
    }
    let fam = EquationFamily::e5_shift(1)?;
    for (c, want) in [("rbb", "3 4 5 6"), ("rrb", "1 2 3 4")] {
        let set = bad_parameter_set(&fam, &Coloring::parse(c, 2)?)?;
        let have = set.finite_bad.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        let status = if have == want { Status::Pass } else { Status::Fail };
        rows.push(row(format!("{fam} {c}"), "bad parameter set", want.into(), have, status));
    }
    for (j, k, want) in [(1i64, 19i64, 10u32), (5, 20, 9)] {
        let fam = EquationFamily::e5_shift(j)?;
        let got = rado_from_bad_sets(&fam, k, 12)?;
        let status = if got == want { Status::Pass } else { Status::Fail };
        rows.push(row(format!("{fam} k={k}"), "Rado number from bad sets", want.to_string(), got.to_string(), status));
    }
    Ok(rows)
}

fn tasks_for(scope: Scope) -> Result<Vec<Task>> {
    match scope {
        Scope::Table2 => table2_tasks(),
        Scope::ThmFourVar => four_var_tasks(),
        Scope::FiveVar => five_var_tasks(),
        Scope::TwoSystem => two_system_tasks(),
        Scope::SaracinoSpots => saracino_tasks(),
        Scope::Appendix2Tables => Ok(Vec::new()),
    }
}

fn judge(task: &Task, outcome: &Outcome, budget: Duration) -> (String, String, String, Status, Option<f64>) {
    let formula = match &task.expect {
        Expect::Value(v) => v.to_string(),
        Expect::Disputed { formula, table } => format!("{formula} (table {table})"),
        Expect::Infinite { periodic } => {
            if *periodic {
                "infinite (periodic certificate verified)".into()
            } else {
                "infinite (periodic certificate rejected)".into()
            }
        }
    };
    let (res, secs) = match outcome {
        Outcome::Timeout => {
            return (task.source.clone(), formula, "-".into(), Status::Timeout, Some(budget.as_secs_f64()));
        }
        Outcome::Done(res, secs, _) => (res, *secs),
    };
    let search = match res {
        RadoResult::Found { value, .. } => value.to_string(),
        RadoResult::Unresolved { searched_up_to, .. } => format!(">{searched_up_to}"),
    };
    let value = res.value().map(u64::from);
    let (source, status) = match &task.expect {
        Expect::Value(v) => (task.source.clone(), if value == Some(*v) { Status::Pass } else { Status::Fail }),
        Expect::Disputed { formula, table } => {
            let verdict = match value {
                Some(v) if v == *table => "search agrees with the table",
                Some(v) if v == *formula => "search agrees with the formula",
                _ => "search agrees with neither",
            };
            (format!("{}; {verdict}", task.source), Status::Discrepancy)
        }
        Expect::Infinite { periodic } => {
            let ok = *periodic && value.is_none();
            (task.source.clone(), if ok { Status::Pass } else { Status::Fail })
        }
    };
    (source, formula, search, status, Some(secs))
}

fn run_task(task: &Task, cache: &Cache, budget: Duration) -> Outcome {
    if let Some((rec, res)) = cache.lookup(&task.sys, task.n_max) {
        return Outcome::Done(res.clone(), rec.seconds, true);
    }
    let start = Instant::now();
    match rado_number(&task.sys, task.n_max, &SearchConfig::with_budget(budget)) {
        Ok(res) => Outcome::Done(res, start.elapsed().as_secs_f64(), false),
        Err(_) => Outcome::Timeout,
    }
}

/// Runs every scope and returns the report rows; fresh results are added
/// to `cache`.
pub fn reproduce(scopes: &[Scope], opts: &ReproduceOptions, cache: &mut Cache) -> Result<Vec<Row>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let mut rows = Vec::new();
    for &scope in scopes {
        if scope == Scope::Appendix2Tables {
            rows.extend(table_rows(scope.name())?);
            continue;
        }
        let tasks = tasks_for(scope)?;
        let shared: &Cache = cache;
        let outcomes: Vec<Outcome> = pool.install(|| tasks.par_iter().map(|t| run_task(t, shared, opts.budget)).collect());
        let mut fresh = Vec::new();
        for (task, outcome) in tasks.iter().zip(&outcomes) {
            if let Outcome::Done(res, secs, false) = outcome {
                fresh.push(CacheRecord::new(&task.sys, task.n_max, res, *secs));
            }
            let (source, formula, search, status, seconds) = judge(task, outcome, opts.budget);
            rows.push(Row { scope: scope.name().into(), instance: task.instance.clone(), source, formula, search, status, seconds });
        }
        cache.store(&fresh)?;
    }
    Ok(rows)
}

/// CSV with columns `instance, source, formula, search, status, seconds`.
pub fn write_csv(rows: &[Row], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "source", "formula", "search", "status", "seconds"])?;
    for r in rows {
        let secs = r.seconds.map(|s| format!("{s:.3}")).unwrap_or_default();
        let status = r.status.to_string();
        w.write_record([r.instance.as_str(), &r.source, &r.formula, &r.search, &status, &secs])?;
    }
    w.flush().map_err(|e| CliError::io("writing report", e))?;
    Ok(())
}
