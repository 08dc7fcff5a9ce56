//! Command-line front end.
//!
//! Exit codes: 0 success, 1 infeasible instance, 2 no bound within `k <= n`,
//! 3 input or parse error, 4 invalid flags, 5 internal invariant violation
//! (including a soundness violation in an experiment report).

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{first_moment_bound, homogeneous_bound_certified, hypergeometric_first_moment_bound, BoundResult};
use crate::decomp::{
    decomposed_bound, independent_blocks_bound, make_decomposition, search_split, BlockDecomposition,
    DecompositionBound, Variant,
};
use crate::error::Error;
use crate::experiment::{fmt_sig9, run_experiment, MethodSelection, Plan};
use crate::gen::{BlockParams, GenSpec, Model};
use crate::matrix::{parse_matrix, serialize_matrix, BinaryMatrix, MatrixFormat};
use crate::refine::{
    bonferroni_bound_with_cap, bonferroni_condition, constant_density_refined_bound, truncated_series_root,
    DEFAULT_ROW_CAP, QUOTED_SERIES_CONSTANT,
};
use crate::solve::{exact_cover, greedy_cover, CoverSolution, DEFAULT_NODE_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_NO_BOUND: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_FLAGS: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

const SCHEMA: &str = crate::experiment::SCHEMA;

#[derive(Debug, Parser)]
#[command(name = "scpbound", version, about = "Upper bounds on the optimal size of a unit-cost set cover")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Union-bound style bounds on the optimal cover size.
    Bound(BoundArgs),
    /// Third-order Bonferroni bound and the truncated-series constant.
    Refine(RefineArgs),
    /// Two-block decomposition bound for a given or searched split.
    Decompose(DecomposeArgs),
    /// Greedy or exact cover.
    Solve(SolveArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run a batch of generated instances and report every method.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance file, or '-' for standard input.
    #[arg(short = 'i', long = "input", default_value = "-")]
    pub input: String,
    #[arg(short = 'f', long = "format", value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    FirstMoment,
    Hypergeometric,
    Homogeneous,
    Bonferroni,
    Decomposed,
    All,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Split after `r` rows and `c` columns, as "r,c".
    #[arg(long, value_parser = parse_split, conflicts_with = "search")]
    pub split: Option<(usize, usize)>,
    /// Search for a split instead of using a given one.
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 10_000)]
    pub effort: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(short = 'm', long, value_enum, default_value_t = MethodArg::All)]
    pub method: MethodArg,
    /// Row cap for the Bonferroni triple sum.
    #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
    pub row_cap: usize,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
    pub row_cap: usize,
    /// Only print the truncated-series constant; no instance is read.
    #[arg(long)]
    pub root_only: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Branch and bound (default).
    #[arg(long, conflicts_with = "greedy")]
    pub exact: bool,
    #[arg(long)]
    pub greedy: bool,
    /// Node budget for branch and bound.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// JSON generator spec; replaces the model flags.
    #[arg(long, conflicts_with_all = ["model", "m", "n", "delta", "d1", "d2", "d3", "d4", "mu", "nu"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long = "m")]
    pub m: Option<usize>,
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub d3: Option<f64>,
    #[arg(long)]
    pub d4: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Dense)]
    pub matrix_format: MatrixFormat,
    /// Output file (standard output when absent).
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON plan; replaces the sweep flags.
    #[arg(long, conflicts_with_all = ["model", "sizes", "delta", "seeds"])]
    pub plan: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Model::ConstantDensity)]
    pub model: Model,
    /// Comma-separated sizes "MxN", e.g. "8x10,12x16".
    #[arg(long, value_parser = parse_sizes, value_delimiter = ',', default_value = "8x10")]
    pub sizes: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    /// Seeds 0..N per size.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Also compute decomposition bounds.
    #[arg(long)]
    pub decomposed: bool,
    #[arg(long)]
    pub no_exact: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Format of the report on standard output.
    #[arg(short = 'f', long = "format", value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected r,c, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(r)?, num(c)?))
}

fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected MxN, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(m)?, num(n)?))
}

/// Failure of a subcommand: exit code plus one-line diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible { .. } => EXIT_INFEASIBLE,
            Error::Parse { .. } | Error::Io(_) => EXIT_INPUT,
            Error::InvalidArgument(_) | Error::OutOfRange(_) | Error::TooLarge { .. } => EXIT_FLAGS,
            Error::Internal(_) => EXIT_INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the subcommand,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FLAGS } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a, out),
        Command::Refine(a) => cmd_refine(a, out),
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Experiment(a) => cmd_experiment(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "scpbound: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &str) -> Result<BinaryMatrix, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{path}: {e}")))?
    };
    Ok(parse_matrix(&text)?)
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| fail(EXIT_INTERNAL, e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "none".into())
}

fn csv_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line of the `bound` table.
#[derive(Debug, Clone, Serialize)]
struct BoundRow {
    method: &'static str,
    k: Option<usize>,
    sound: bool,
    witness: Option<f64>,
    witness_prev: Option<f64>,
}

impl BoundRow {
    fn from_result(label: &'static str, b: &BoundResult<f64>) -> Self {
        BoundRow { method: label, k: b.k, sound: b.sound, witness: b.witness.at_k, witness_prev: b.witness.at_prev }
    }
}

fn decomposition_for(matrix: &BinaryMatrix, split: &SplitArgs) -> Result<(BlockDecomposition<f64>, Option<SearchInfo>), Failure> {
    match split.split {
        Some((r, c)) => Ok((make_decomposition(matrix, r, c)?, None)),
        None => {
            let s = search_split::<f64>(matrix, split.effort, split.seed)?;
            let info = SearchInfo {
                row_order: s.row_perm.iter().map(|i| i + 1).collect(),
                col_order: s.col_perm.iter().map(|j| j + 1).collect(),
                objective: s.objective,
            };
            Ok((s.decomposition, Some(info)))
        }
    }
}

/// Best feasible sound bound among the optimal-α and independent-blocks budgets.
fn best_sound(dec: &BlockDecomposition<f64>) -> Result<Option<DecompositionBound<f64>>, Failure> {
    let optimal = decomposed_bound(dec, Variant::Sound)?;
    let independent = independent_blocks_bound(dec, Variant::Sound)?;
    Ok([Some(optimal), independent].into_iter().flatten().filter(|b| b.feasible).min_by_key(|b| b.total))
}

fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> CmdResult {
    let matrix = read_input(&a.io.input)?;
    matrix.check_feasible()?;
    let profile = matrix.row_profile();
    let all = a.method == MethodArg::All;
    let mut rows = Vec::new();
    if all || a.method == MethodArg::FirstMoment {
        rows.push(BoundRow::from_result("first-moment", &first_moment_bound(&profile)?));
    }
    if all || a.method == MethodArg::Hypergeometric {
        rows.push(BoundRow::from_result("hypergeometric", &hypergeometric_first_moment_bound(&profile)?));
    }
    if all || a.method == MethodArg::Homogeneous {
        let h = homogeneous_bound_certified::<f64>(&profile)?;
        rows.push(BoundRow::from_result("homogeneous", &h.certified));
        rows.push(BoundRow::from_result("homogeneous-literal", &h.literal));
    }
    if all || a.method == MethodArg::Bonferroni {
        match bonferroni_bound_with_cap::<f64>(&matrix, a.row_cap) {
            Ok(b) => rows.push(BoundRow::from_result("bonferroni", &b)),
            // too many rows for the triple sum: skipped in the table
            Err(Error::TooLarge { .. }) if all => {}
            Err(e) => return Err(e.into()),
        }
    }
    let decomposable = matrix.rows() >= 3 && matrix.cols() >= 2;
    if a.method == MethodArg::Decomposed || (all && decomposable) {
        let (dec, _) = decomposition_for(&matrix, &a.split)?;
        let best = match best_sound(&dec) {
            Ok(b) => b,
            Err(_) if all => None,
            Err(e) => return Err(e),
        };
        rows.push(BoundRow {
            method: "decomposed",
            k: best.as_ref().map(|b| b.total),
            sound: true,
            witness: best.as_ref().map(|b| b.total_real()),
            witness_prev: None,
        });
    }

    match a.io.format {
        OutputFormat::Text => {
            for r in &rows {
                writeln!(
                    out,
                    "{}: k={} sound={} witness={} witness_prev={}",
                    r.method,
                    opt(r.k),
                    r.sound,
                    opt(r.witness),
                    opt(r.witness_prev)
                )?;
            }
        }
        OutputFormat::Json => write_json(
            out,
            &json!({"schema": SCHEMA, "command": "bound", "m": matrix.rows(), "n": matrix.cols(), "bounds": rows}),
        )?,
        OutputFormat::Csv => {
            writeln!(out, "method,k,sound,witness,witness_prev")?;
            for r in &rows {
                writeln!(out, "{},{},{},{},{}", r.method, csv_opt(r.k), r.sound, csv_opt(r.witness), csv_opt(r.witness_prev))?;
            }
        }
    }
    Ok(if rows.iter().any(|r| r.k.is_some()) { EXIT_OK } else { EXIT_NO_BOUND })
}

fn cmd_refine(a: &RefineArgs, out: &mut dyn Write) -> CmdResult {
    let root = truncated_series_root::<f64>();
    if a.root_only {
        match a.io.format {
            OutputFormat::Json => write_json(
                out,
                &json!({"schema": SCHEMA, "command": "refine", "root": root, "quoted": QUOTED_SERIES_CONSTANT}),
            )?,
            _ => writeln!(out, "root={root} quoted={QUOTED_SERIES_CONSTANT}")?,
        }
        return Ok(EXIT_OK);
    }
    let matrix = read_input(&a.io.input)?;
    matrix.check_feasible()?;
    let b = bonferroni_bound_with_cap::<f64>(&matrix, a.row_cap)?;
    let witness = match b.k {
        Some(k) => Some(bonferroni_condition::<f64>(&matrix, k)?),
        None => None,
    };
    let profile = matrix.row_profile();
    let mean = profile.mean_density::<f64>();
    let refined = constant_density_refined_bound(matrix.rows(), mean).ok();
    match a.io.format {
        OutputFormat::Text => {
            writeln!(out, "bonferroni: k={} witness={} witness_prev={}", opt(b.k), opt(b.witness.at_k), opt(b.witness.at_prev))?;
            if let Some(w) = &witness {
                writeln!(out, "ln_s1={} ln_s2={} ln_s3={} ln_choose={}", w.s1, w.s2, w.s3, w.rhs)?;
            }
            writeln!(out, "root={root} quoted={QUOTED_SERIES_CONSTANT}")?;
            writeln!(out, "mean_density={mean} refined_threshold={}", opt(refined))?;
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "refine",
                "bonferroni": BoundRow::from_result("bonferroni", &b),
                "sums": witness.map(|w| json!({"ln_s1": w.s1, "ln_s2": w.s2, "ln_s3": w.s3, "ln_choose": w.rhs})),
                "root": root,
                "quoted": QUOTED_SERIES_CONSTANT,
                "mean_density": mean,
                "refined_threshold": refined,
            }),
        )?,
        OutputFormat::Csv => return Err(fail(EXIT_FLAGS, "refine supports text and json output")),
    }
    Ok(if b.k.is_some() { EXIT_OK } else { EXIT_NO_BOUND })
}

#[derive(Debug, Clone, Serialize)]
struct SearchInfo {
    row_order: Vec<usize>,
    col_order: Vec<usize>,
    objective: i64,
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CmdResult {
    if a.split.split.is_none() && !a.split.search {
        return Err(fail(EXIT_FLAGS, "decompose needs --split r,c or --search"));
    }
    let matrix = read_input(&a.io.input)?;
    matrix.check_feasible()?;
    let (dec, search) = decomposition_for(&matrix, &a.split)?;
    let sound = decomposed_bound(&dec, Variant::Sound);
    let literal = decomposed_bound(&dec, Variant::Literal);
    let independent = independent_blocks_bound(&dec, Variant::Sound).transpose();
    let as_json = |b: &Option<Result<DecompositionBound<f64>, Error>>| match b {
        None => serde_json::Value::Null,
        Some(Ok(b)) => json!(b),
        Some(Err(e)) => json!({"error": e.to_string()}),
    };
    match a.io.format {
        OutputFormat::Text => {
            writeln!(out, "split: r={} c={} mu={} nu={} valid={}", dec.split_row, dec.split_col, dec.mu, dec.nu, dec.valid)?;
            let (lo, hi) = (dec.min_density, dec.max_density);
            writeln!(out, "min densities: {} {} {} {}", lo.d1, lo.d2, lo.d3, lo.d4)?;
            writeln!(out, "max densities: {} {} {} {}", hi.d1, hi.d2, hi.d3, hi.d4)?;
            let line = |out: &mut dyn Write, name: &str, b: &Option<Result<DecompositionBound<f64>, Error>>| match b {
                None => Ok(()),
                Some(Ok(b)) => writeln!(
                    out,
                    "{name}: k={} k1={} k2={} alpha={} k1_real={} k2_real={} feasible={}",
                    b.total, b.k1, b.k2, b.alpha, b.k1_real, b.k2_real, b.feasible
                ),
                Some(Err(e)) => writeln!(out, "{name}: not applicable ({e})"),
            };
            line(out, "sound", &Some(sound.clone()))?;
            line(out, "literal", &Some(literal.clone()))?;
            line(out, "independent", &independent)?;
            if let Some(s) = &search {
                let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
                writeln!(out, "row order: {}", join(&s.row_order))?;
                writeln!(out, "column order: {}", join(&s.col_order))?;
                writeln!(out, "objective: {}", s.objective)?;
            }
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "decompose",
                "decomposition": dec,
                "sound": as_json(&Some(sound.clone())),
                "literal": as_json(&Some(literal.clone())),
                "independent": as_json(&independent),
                "search": search,
            }),
        )?,
        OutputFormat::Csv => return Err(fail(EXIT_FLAGS, "decompose supports text and json output")),
    }
    let feasible = |b: &Result<DecompositionBound<f64>, Error>| b.as_ref().is_ok_and(|b| b.feasible);
    let found = feasible(&sound) || independent.as_ref().is_some_and(feasible);
    Ok(if found { EXIT_OK } else { EXIT_NO_BOUND })
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let matrix = read_input(&a.io.input)?;
    matrix.check_feasible()?;
    let sol: CoverSolution = if a.greedy { greedy_cover(&matrix) } else { exact_cover(&matrix, a.budget) };
    if !sol.feasible {
        return Err(fail(EXIT_INTERNAL, "solver returned an infeasible cover for a feasible instance"));
    }
    let cols = sol.one_based();
    match a.io.format {
        OutputFormat::Text => {
            let list = cols.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            writeln!(out, "columns {list}")?;
            writeln!(out, "size {}", sol.size())?;
            let status = serde_json::to_value(sol.status).map_err(|e| fail(EXIT_INTERNAL, e.to_string()))?;
            writeln!(out, "status {}", status.as_str().unwrap_or_default())?;
            writeln!(out, "nodes {}", sol.nodes)?;
        }
        OutputFormat::Json => write_json(
            out,
            &json!({
                "schema": SCHEMA,
                "command": "solve",
                "columns": cols,
                "size": sol.size(),
                "method": sol.method,
                "status": sol.status,
                "nodes": sol.nodes,
            }),
        )?,
        OutputFormat::Csv => {
            writeln!(out, "column")?;
            for c in cols {
                writeln!(out, "{c}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn gen_spec_from_flags(a: &GenArgs) -> Result<GenSpec, Failure> {
    if let Some(path) = &a.spec {
        let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        let mut spec: GenSpec =
            serde_json::from_str(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        if a.seed != 0 {
            spec.seed = a.seed;
        }
        return Ok(spec);
    }
    let model = a.model.ok_or_else(|| fail(EXIT_FLAGS, "gen needs --model or --spec"))?;
    let (m, n) = match (a.m, a.n) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(fail(EXIT_FLAGS, "gen needs --m and --n")),
    };
    let spec = match model {
        Model::ConstantDensity | Model::Karp => {
            let delta = a.delta.ok_or_else(|| fail(EXIT_FLAGS, "--delta is required for this model"))?;
            GenSpec { model, m, n, delta, blocks: None, seed: a.seed }
        }
        Model::Planted => {
            let need = |x: Option<f64>, name: &str| x.ok_or_else(|| fail(EXIT_FLAGS, format!("--{name} is required for the planted model")));
            let blocks = BlockParams {
                d1: need(a.d1, "d1")?,
                d2: need(a.d2, "d2")?,
                d3: need(a.d3, "d3")?,
                d4: need(a.d4, "d4")?,
                mu: a.mu,
                nu: a.nu,
            };
            GenSpec::planted(m, n, blocks, a.seed)
        }
    };
    Ok(spec)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CmdResult {
    let spec = gen_spec_from_flags(a)?;
    let generated = spec.generate()?;
    let mut text = String::new();
    if let Some((r, c)) = generated.split {
        text.push_str(&format!("# planted split r={r} c={c}\n"));
    }
    text.push_str(&serialize_matrix(&generated.matrix, a.matrix_format));
    match &a.output {
        Some(path) => std::fs::write(path, text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> CmdResult {
    let plan = match &a.plan {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            serde_json::from_str::<Plan>(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?
        }
        None => {
            if a.model == Model::Planted {
                return Err(fail(EXIT_FLAGS, "planted sweeps need a --plan file with block parameters"));
            }
            let mut methods = MethodSelection { decomposed: a.decomposed, ..Default::default() };
            methods.exact = !a.no_exact;
            Plan::sweep(a.model, &a.sizes, a.delta, a.seeds, methods)
        }
    };
    let report = run_experiment(&plan)?;
    report.write_files(a.csv.as_deref(), a.json.as_deref())?;
    match a.format {
        OutputFormat::Csv => out.write_all(report.to_csv().as_bytes())?,
        OutputFormat::Json => out.write_all(report.to_json().as_bytes())?,
        OutputFormat::Text => {
            for r in &report.records {
                writeln!(
                    out,
                    "#{} {} {}x{} first-moment={} bonferroni={} greedy={} exact={} ({}) ratio={}",
                    r.index,
                    r.model,
                    r.m,
                    r.n,
                    opt(r.first_moment),
                    opt(r.bonferroni),
                    opt(r.greedy),
                    opt(r.exact),
                    r.exact_status,
                    r.greedy_ratio.map(fmt_sig9).unwrap_or_else(|| "none".into())
                )?;
            }
        }
    }
    if let Some(v) = report.violations.first() {
        return Err(fail(
            EXIT_INTERNAL,
            format!(
                "{} soundness violation(s); first: instance {} {} bound {} < exact {}",
                report.violations.len(),
                v.index,
                v.method,
                v.bound,
                v.exact
            ),
        ));
    }
    Ok(EXIT_OK)
}
