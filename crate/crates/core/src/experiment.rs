//! Batch harness: generate instances, compute every bound and solver
//! result, and emit CSV / JSON reports.
//!
//! CSV columns, in order:
//!
//! ```text
//! index,model,m,n,delta,seed,min_density,max_density,mean_density,
//! first_moment,hypergeometric,homogeneous_certified,homogeneous_literal,
//! bonferroni,decomposed,decomposed_literal,decomposition_valid,
//! greedy,exact,exact_status,threshold,greedy_ratio,first_moment_ratio,error
//! ```
//!
//! Empty cells mean "not computed" or "no bound found". Reals are printed
//! with 9 significant digits. `threshold` is `log m / |log(1 - δ)|` with `δ`
//! the generator's target density (measured mean density for planted
//! instances); the ratios divide by it. The JSON report carries the same
//! fields, reals rounded the same way, under `"schema": "scpbound/1"`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{first_moment_bound, homogeneous_bound_certified, homogeneous_threshold, hypergeometric_first_moment_bound};
use crate::decomp::{decomposed_bound, independent_blocks_bound, make_decomposition, search_split, Variant};
use crate::error::{Error, Result};
use crate::gen::{GenSpec, Model};
use crate::refine::bonferroni_bound;
use crate::solve::{exact_cover, greedy_cover, SolveStatus, DEFAULT_NODE_BUDGET};

pub const SCHEMA: &str = "scpbound/1";

pub const CSV_HEADER: &str = "index,model,m,n,delta,seed,min_density,max_density,mean_density,\
first_moment,hypergeometric,homogeneous_certified,homogeneous_literal,bonferroni,decomposed,\
decomposed_literal,decomposition_valid,greedy,exact,exact_status,threshold,greedy_ratio,\
first_moment_ratio,error";

/// Which computations run per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodSelection {
    pub first_moment: bool,
    pub hypergeometric: bool,
    pub homogeneous: bool,
    pub bonferroni: bool,
    pub decomposed: bool,
    pub greedy: bool,
    pub exact: bool,
}

impl Default for MethodSelection {
    fn default() -> Self {
        MethodSelection {
            first_moment: true,
            hypergeometric: true,
            homogeneous: true,
            bonferroni: true,
            decomposed: false,
            greedy: true,
            exact: true,
        }
    }
}

impl MethodSelection {
    pub fn all() -> Self {
        MethodSelection { decomposed: true, ..Default::default() }
    }

    pub fn greedy_only() -> Self {
        MethodSelection {
            first_moment: false,
            hypergeometric: false,
            homogeneous: false,
            bonferroni: false,
            decomposed: false,
            greedy: true,
            exact: false,
        }
    }
}

fn default_exact_max_m() -> usize {
    16
}
fn default_exact_max_n() -> usize {
    20
}
fn default_node_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}
fn default_effort() -> usize {
    10_000
}

/// Instances plus options. Exact solving is skipped when `m > exact_max_m`
/// or `n > exact_max_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub instances: Vec<GenSpec>,
    #[serde(default)]
    pub methods: MethodSelection,
    #[serde(default = "default_exact_max_m")]
    pub exact_max_m: usize,
    #[serde(default = "default_exact_max_n")]
    pub exact_max_n: usize,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
    /// Split search effort for instances without a planted split.
    #[serde(default = "default_effort")]
    pub search_effort: usize,
}

impl Plan {
    pub fn new(instances: Vec<GenSpec>, methods: MethodSelection) -> Self {
        Plan {
            instances,
            methods,
            exact_max_m: default_exact_max_m(),
            exact_max_n: default_exact_max_n(),
            node_budget: default_node_budget(),
            search_effort: default_effort(),
        }
    }

    /// `seeds` instances of `model` at each size, seeds `0..seeds`.
    pub fn sweep(model: Model, sizes: &[(usize, usize)], delta: f64, seeds: u64, methods: MethodSelection) -> Self {
        let instances = sizes
            .iter()
            .flat_map(|&(m, n)| {
                (0..seeds).map(move |seed| GenSpec { model, m, n, delta, blocks: None, seed })
            })
            .collect();
        Plan::new(instances, methods)
    }
}

/// One report row. `None` cells are empty in CSV and `null` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    pub model: &'static str,
    pub m: usize,
    pub n: usize,
    #[serde(serialize_with = "sig9")]
    pub delta: f64,
    pub seed: u64,
    #[serde(serialize_with = "sig9_opt")]
    pub min_density: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub max_density: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub mean_density: Option<f64>,
    pub first_moment: Option<usize>,
    pub hypergeometric: Option<usize>,
    pub homogeneous_certified: Option<usize>,
    pub homogeneous_literal: Option<usize>,
    pub bonferroni: Option<usize>,
    pub decomposed: Option<usize>,
    pub decomposed_literal: Option<usize>,
    pub decomposition_valid: Option<bool>,
    pub greedy: Option<usize>,
    pub exact: Option<usize>,
    pub exact_status: &'static str,
    #[serde(serialize_with = "sig9_opt")]
    pub threshold: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub greedy_ratio: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub first_moment_ratio: Option<f64>,
    pub error: Option<String>,
}

impl Record {
    fn empty(index: usize, spec: &GenSpec) -> Self {
        Record {
            index,
            model: spec.model.name(),
            m: spec.m,
            n: spec.n,
            delta: spec.delta,
            seed: spec.seed,
            min_density: None,
            max_density: None,
            mean_density: None,
            first_moment: None,
            hypergeometric: None,
            homogeneous_certified: None,
            homogeneous_literal: None,
            bonferroni: None,
            decomposed: None,
            decomposed_literal: None,
            decomposition_valid: None,
            greedy: None,
            exact: None,
            exact_status: "skipped",
            threshold: None,
            greedy_ratio: None,
            first_moment_ratio: None,
            error: None,
        }
    }

    /// `(method, value)` for every sound bound present.
    pub fn sound_bounds(&self) -> Vec<(&'static str, usize)> {
        [
            ("first-moment", self.first_moment),
            ("hypergeometric", self.hypergeometric),
            ("homogeneous-certified", self.homogeneous_certified),
            ("bonferroni", self.bonferroni),
            ("decomposed", self.decomposed),
        ]
        .into_iter()
        .filter_map(|(name, k)| k.map(|k| (name, k)))
        .collect()
    }
}

/// A sound bound below a proved optimum. Must never happen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub method: &'static str,
    pub bound: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub records: Vec<Record>,
    pub violations: Vec<Violation>,
}

fn run_instance(index: usize, spec: &GenSpec, plan: &Plan) -> Record {
    let mut rec = Record::empty(index, spec);
    if let Err(e) = fill_record(&mut rec, spec, plan) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_record(rec: &mut Record, spec: &GenSpec, plan: &Plan) -> Result<()> {
    let generated = spec.generate()?;
    let matrix = &generated.matrix;
    let profile = matrix.row_profile();
    rec.min_density = Some(profile.min_density());
    rec.max_density = Some(profile.max_density());
    rec.mean_density = Some(profile.mean_density());

    let target = match spec.model {
        Model::Planted => profile.mean_density(),
        _ => spec.delta,
    };
    if target > 0.0 && target < 1.0 && spec.m >= 1 {
        rec.threshold = homogeneous_threshold(spec.m, target).ok();
    }

    let methods = plan.methods;
    if methods.greedy {
        let g = greedy_cover(matrix);
        if g.feasible {
            rec.greedy = Some(g.size());
        }
    }
    if methods.exact && spec.m <= plan.exact_max_m && spec.n <= plan.exact_max_n {
        let e = exact_cover(matrix, plan.node_budget);
        if e.feasible {
            rec.exact = Some(e.size());
            rec.exact_status = match e.status {
                SolveStatus::BudgetExhausted => "budget-exhausted",
                _ => "proved",
            };
        } else {
            rec.exact_status = "infeasible";
        }
    }

    // bounds reject infeasible instances; the error lands in the record
    matrix.check_feasible()?;
    if methods.first_moment {
        rec.first_moment = first_moment_bound::<f64>(&profile)?.k;
    }
    if methods.hypergeometric {
        rec.hypergeometric = hypergeometric_first_moment_bound::<f64>(&profile)?.k;
    }
    if methods.homogeneous {
        let h = homogeneous_bound_certified::<f64>(&profile)?;
        rec.homogeneous_certified = h.certified.k;
        rec.homogeneous_literal = h.literal.k;
    }
    if methods.bonferroni {
        rec.bonferroni = bonferroni_bound::<f64>(matrix)?.k;
    }
    if methods.decomposed && spec.m >= 3 && spec.n >= 2 {
        let dec = match generated.split {
            Some((r, c)) => make_decomposition::<f64>(matrix, r, c)?,
            None => search_split::<f64>(matrix, plan.search_effort, spec.seed)?.decomposition,
        };
        rec.decomposition_valid = Some(dec.valid);
        let feasible_total = |b: Result<crate::decomp::DecompositionBound<f64>>| match b {
            Ok(b) if b.feasible => Some(b.total),
            _ => None,
        };
        let optimal = feasible_total(decomposed_bound(&dec, Variant::Sound));
        let independent = independent_blocks_bound(&dec, Variant::Sound)
            .ok()
            .flatten()
            .filter(|b| b.feasible)
            .map(|b| b.total);
        rec.decomposed = match (optimal, independent) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        rec.decomposed_literal = feasible_total(decomposed_bound(&dec, Variant::Literal));
    }

    if let Some(t) = rec.threshold.filter(|&t| t > 0.0) {
        rec.greedy_ratio = rec.greedy.map(|g| g as f64 / t);
        rec.first_moment_ratio = rec.first_moment.map(|k| k as f64 / t);
    }
    Ok(())
}

fn thread_count() -> usize {
    std::env::var("SCPBOUND_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

/// Runs every instance of the plan. Per-instance failures are recorded in
/// the `error` column; records keep plan order regardless of threading.
/// Parallelism follows `SCPBOUND_THREADS` (unset or 0: sequential).
pub fn run_experiment(plan: &Plan) -> Result<Report> {
    run_experiment_with_threads(plan, thread_count())
}

pub fn run_experiment_with_threads(plan: &Plan, threads: usize) -> Result<Report> {
    let records: Vec<Record> = if threads <= 1 {
        plan.instances.iter().enumerate().map(|(i, s)| run_instance(i, s, plan)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| plan.instances.par_iter().enumerate().map(|(i, s)| run_instance(i, s, plan)).collect())
    };
    let violations = records
        .iter()
        .filter(|r| r.exact_status == "proved")
        .flat_map(|r| {
            let exact = r.exact.expect("proved implies a size");
            r.sound_bounds()
                .into_iter()
                .filter(move |&(_, k)| exact > k)
                .map(move |(method, bound)| Violation { index: r.index, method, bound, exact })
        })
        .collect();
    Ok(Report { schema: SCHEMA, records, violations })
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros dropped.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (8 - exp) as usize, x))
    }
}

fn sig9<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(fmt_sig9(*x).parse().unwrap_or(*x))
}

fn sig9_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig9(v, s),
        None => s.serialize_none(),
    }
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn real_cell(v: Option<f64>) -> String {
    v.map(fmt_sig9).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let fields = [
                r.index.to_string(),
                r.model.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                fmt_sig9(r.delta),
                r.seed.to_string(),
                real_cell(r.min_density),
                real_cell(r.max_density),
                real_cell(r.mean_density),
                cell(&r.first_moment),
                cell(&r.hypergeometric),
                cell(&r.homogeneous_certified),
                cell(&r.homogeneous_literal),
                cell(&r.bonferroni),
                cell(&r.decomposed),
                cell(&r.decomposed_literal),
                cell(&r.decomposition_valid),
                cell(&r.greedy),
                cell(&r.exact),
                r.exact_status.to_string(),
                real_cell(r.threshold),
                real_cell(r.greedy_ratio),
                real_cell(r.first_moment_ratio),
                r.error.as_deref().map(csv_text).unwrap_or_default(),
            ];
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn write_files(&self, csv: Option<&Path>, json: Option<&Path>) -> Result<()> {
        if let Some(p) = csv {
            std::fs::write(p, self.to_csv())?;
        }
        if let Some(p) = json {
            std::fs::write(p, self.to_json())?;
        }
        Ok(())
    }
}
