//! `run` and `sweep` drivers.

use std::path::{Path, PathBuf};

use hardy_core::classify::{
    classify, classify_pair, Agreement, ClassificationReport, ClassifyConfig, Grid, Property,
    Symbolic, Tolerances,
};
use hardy_core::operators::{section_norm_growth, NormEstimate, WeightedCompOp};
use hardy_core::{Complex64, WeightSequence};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{Check, ConfigError, Format, Loaded, RunConfig, SweepPoint};
use crate::output::{self, fmt_f64, opt_f64};
use crate::suite::{kernel_properties, PropertyResult};

pub const TOOL: &str = "hardy-op";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            out: PathBuf::from("."),
            seed: 0,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Disagreement,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Disagreement => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorResult {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_growth: Option<Vec<NormEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub first: usize,
    pub second: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub verdicts: usize,
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
    pub paradox_candidates: usize,
    pub errors: usize,
    pub kernel_property_failures: usize,
    pub exit_status: i32,
}

impl Summary {
    fn add(&mut self, r: &ClassificationReport) {
        for v in &r.verdicts {
            self.verdicts += 1;
            match v.agreement {
                Agreement::Agree => self.agree += 1,
                Agreement::Disagree => self.disagree += 1,
                Agreement::Inconclusive => self.inconclusive += 1,
                Agreement::ParadoxCandidate => self.paradox_candidates += 1,
            }
        }
    }

    fn status(&self) -> Status {
        if self.disagree + self.paradox_candidates + self.kernel_property_failures > 0 {
            Status::Disagreement
        } else {
            Status::Ok
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub space: WeightSequence,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub dims: Vec<usize>,
    pub grid: Grid,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub header: Header,
    pub operators: Vec<OperatorResult>,
    pub pairs: Vec<PairResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_props: Option<Vec<PropertyResult>>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub params: SweepPoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    #[serde(flatten)]
    pub header: Header,
    pub points: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_props: Option<Vec<PropertyResult>>,
    pub summary: Summary,
}

/// Files written by a run, relative to the output directory.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub files: Vec<PathBuf>,
}

fn header(cfg: &RunConfig, space: &WeightSequence, seed: u64) -> Header {
    Header {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        space: space.clone(),
        seed,
        checks: cfg.checks.clone(),
        dims: cfg.dims.clone(),
        grid: cfg.grid.clone(),
        tolerances: cfg.tolerances,
    }
}

fn classify_config(cfg: &RunConfig) -> ClassifyConfig {
    ClassifyConfig {
        tolerances: cfg.tolerances,
        dims: cfg.dims.clone(),
        grid: cfg.grid.clone(),
        properties: cfg.properties(),
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, RunError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().map_err(|e| RunError::Pool(e.to_string()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn kernel_props(cfg: &RunConfig, space: &WeightSequence, seed: u64) -> Option<Vec<PropertyResult>> {
    cfg.has(Check::KernelProps)
        .then(|| kernel_properties(space, &cfg.tolerances, seed))
}

fn count_kernel_failures(k: &Option<Vec<PropertyResult>>) -> usize {
    k.as_ref().map_or(0, |v| v.iter().filter(|p| !p.passed).count())
}

/// Classifies every operator (and pair) of a loaded configuration.
pub fn run_report(loaded: &Loaded, opts: &Options) -> Result<RunReport, RunError> {
    let cfg = &loaded.config;
    let w = &loaded.space;
    let ccfg = classify_config(cfg);
    let growth = cfg.has(Check::NormGrowth);
    let pool = pool(opts.jobs)?;
    let (operators, pairs) = pool.install(|| {
        let operators: Vec<OperatorResult> = loaded
            .operators
            .par_iter()
            .enumerate()
            .map(|(index, op)| operator_result(index, op, w, &ccfg, growth, &cfg.dims))
            .collect();
        let pairs: Vec<PairResult> = if cfg.has(Check::AdjointPair) {
            let mut c = ccfg.clone();
            c.properties = vec![Property::AdjointPair];
            cfg.pair_list(loaded.operators.len())
                .par_iter()
                .map(|&[i, j]| {
                    let r = classify_pair(&loaded.operators[i], &loaded.operators[j], w, &c);
                    PairResult {
                        first: i,
                        second: j,
                        error: r.as_ref().err().map(|e| e.to_string()),
                        report: r.ok(),
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        (operators, pairs)
    });
    let kernel_props = kernel_props(cfg, w, opts.seed);
    let mut summary = Summary::default();
    for r in operators.iter().filter_map(|o| o.report.as_ref()) {
        summary.add(r);
    }
    for r in pairs.iter().filter_map(|p| p.report.as_ref()) {
        summary.add(r);
    }
    summary.errors = operators.iter().filter(|o| o.error.is_some()).count()
        + pairs.iter().filter(|p| p.error.is_some()).count();
    summary.kernel_property_failures = count_kernel_failures(&kernel_props);
    summary.exit_status = summary.status().exit_code();
    Ok(RunReport {
        header: header(cfg, w, opts.seed),
        operators,
        pairs,
        kernel_props,
        summary,
    })
}

fn operator_result(
    index: usize,
    op: &WeightedCompOp,
    w: &WeightSequence,
    ccfg: &ClassifyConfig,
    growth: bool,
    dims: &[usize],
) -> OperatorResult {
    let (report, mut error) = if ccfg.properties.is_empty() {
        (None, None)
    } else {
        match classify(op, w, ccfg) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let norm_growth = if growth {
        match section_norm_growth(op, dims, w) {
            Ok(g) => Some(g),
            Err(e) => {
                error.get_or_insert(e.to_string());
                None
            }
        }
    } else {
        None
    };
    OperatorResult {
        index,
        report,
        norm_growth,
        error,
    }
}

/// Loads, classifies and writes reports; returns the exit status.
pub fn run(cfg: RunConfig, opts: &Options) -> Result<Outcome, RunError> {
    let wants_ops = cfg.checks.iter().any(|c| *c != Check::KernelProps);
    if wants_ops && cfg.operators.is_empty() {
        return Err(ConfigError::Invalid {
            field: "operators".into(),
            message: "must be nonempty for operator checks".into(),
        }
        .into());
    }
    let loaded = cfg.load()?;
    let report = run_report(&loaded, opts)?;
    let cfg = &loaded.config;
    std::fs::create_dir_all(&opts.out).map_err(io_err(&opts.out))?;
    let mut files = Vec::new();
    let name = cfg.output.report_name();
    let path = opts.out.join(&name);
    match cfg.output.format {
        Format::Json => output::write_json(&path, &report).map_err(io_err(&path))?,
        Format::Csv => {
            let (h, rows) = run_csv(&report);
            output::write_csv(&path, &h, &rows).map_err(io_err(&path))?
        }
    }
    files.push(PathBuf::from(name));
    if cfg.dims.len() > 1 {
        let path = opts.out.join("residuals.csv");
        let (h, rows) = residual_csv(&report);
        output::write_csv(&path, &h, &rows).map_err(io_err(&path))?;
        files.push(PathBuf::from("residuals.csv"));
    }
    Ok(Outcome {
        status: report.summary.status(),
        files,
    })
}

pub fn symbolic_label(s: &Symbolic) -> String {
    match s {
        Symbolic::True => "true".into(),
        Symbolic::False => "false".into(),
        Symbolic::ZeroOperatorPair => "zero_operator_pair".into(),
        Symbolic::NecessaryOnly { .. } => match s.conditions_hold() {
            Some(true) => "necessary_only(holds)".into(),
            _ => "necessary_only(fails)".into(),
        },
        Symbolic::NotApplicable => "not_applicable".into(),
        Symbolic::Inconclusive { .. } => "inconclusive".into(),
    }
}

fn agreement_label(a: Agreement) -> &'static str {
    match a {
        Agreement::Agree => "agree",
        Agreement::Disagree => "disagree",
        Agreement::Inconclusive => "inconclusive",
        Agreement::ParadoxCandidate => "paradox_candidate",
    }
}

fn run_csv(r: &RunReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = [
        "kind", "first", "second", "description", "property", "symbolic", "method", "dim", "residual",
        "agreement", "agree", "error",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::new();
    let mut push = |kind: &str, first: usize, second: Option<usize>, rep: &Option<ClassificationReport>, err: &Option<String>| {
        let second = second.map(|s| s.to_string()).unwrap_or_default();
        match rep {
            Some(rep) => {
                for v in &rep.verdicts {
                    rows.push(vec![
                        kind.to_string(),
                        first.to_string(),
                        second.clone(),
                        rep.description.clone(),
                        v.property.as_str().to_string(),
                        symbolic_label(&v.symbolic),
                        v.numeric.method.clone(),
                        v.numeric.dim.map(|d| d.to_string()).unwrap_or_default(),
                        opt_f64(v.numeric.residual),
                        agreement_label(v.agreement).to_string(),
                        v.agree.to_string(),
                        v.numeric.error.clone().unwrap_or_default(),
                    ]);
                }
            }
            None => {
                if let Some(e) = err {
                    let mut row = vec![String::new(); 12];
                    row[0] = kind.to_string();
                    row[1] = first.to_string();
                    row[2] = second;
                    row[11] = e.clone();
                    rows.push(row);
                }
            }
        }
    };
    for o in &r.operators {
        push("operator", o.index, None, &o.report, &o.error);
    }
    for p in &r.pairs {
        push("pair", p.first, Some(p.second), &p.report, &p.error);
    }
    (header, rows)
}

fn residual_csv(r: &RunReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["operator", "property", "method", "N", "residual"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    fn curves(rows: &mut Vec<Vec<String>>, label: String, rep: &ClassificationReport) {
        for c in &rep.residual_curves {
            for p in &c.points {
                rows.push(vec![
                    label.clone(),
                    c.property.as_str().to_string(),
                    c.method.clone(),
                    p.dim.to_string(),
                    opt_f64(p.residual),
                ]);
            }
        }
    }
    for o in &r.operators {
        if let Some(rep) = &o.report {
            curves(&mut rows, o.index.to_string(), rep);
        }
        if let Some(g) = &o.norm_growth {
            for e in g {
                rows.push(vec![
                    o.index.to_string(),
                    "norm_growth".into(),
                    "power_iteration".into(),
                    e.dim.to_string(),
                    fmt_f64(e.norm),
                ]);
            }
        }
    }
    for p in &r.pairs {
        if let Some(rep) = &p.report {
            curves(&mut rows, format!("{}-{}", p.first, p.second), rep);
        }
    }
    (header, rows)
}

/// Classifies every point of the configured sweep.
pub fn sweep_report(loaded: &Loaded, opts: &Options) -> Result<SweepReport, RunError> {
    let cfg = &loaded.config;
    let spec = cfg.sweep.as_ref().ok_or_else(|| ConfigError::Invalid {
        field: "sweep".into(),
        message: "missing sweep section".into(),
    })?;
    let w = &loaded.space;
    let points = spec.points()?;
    let ops = points
        .iter()
        .map(|p| spec.operator(p))
        .collect::<Result<Vec<_>, _>>()?;
    let ccfg = classify_config(cfg);
    let pool = pool(opts.jobs)?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .zip(ops.par_iter())
            .enumerate()
            .map(|(index, (p, op))| {
                let r = classify(op, w, &ccfg);
                SweepRow {
                    index,
                    params: *p,
                    error: r.as_ref().err().map(|e| e.to_string()),
                    report: r.ok(),
                }
            })
            .collect()
    });
    let kernel_props = kernel_props(cfg, w, opts.seed);
    let mut summary = Summary::default();
    for r in rows.iter().filter_map(|r| r.report.as_ref()) {
        summary.add(r);
    }
    summary.errors = rows.iter().filter(|r| r.error.is_some()).count();
    summary.kernel_property_failures = count_kernel_failures(&kernel_props);
    summary.exit_status = summary.status().exit_code();
    Ok(SweepReport {
        header: header(cfg, w, opts.seed),
        points: rows,
        kernel_props,
        summary,
    })
}

fn complex_cells(z: Complex64) -> [String; 2] {
    [fmt_f64(z.re), fmt_f64(z.im)]
}

fn sweep_csv(r: &SweepReport, properties: &[Property]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = ["index", "nu_re", "nu_im", "c_re", "c_im", "alpha_re", "alpha_im", "q_re", "q_im"]
        .map(String::from)
        .to_vec();
    for p in properties {
        for suffix in ["symbolic", "residual", "agree"] {
            header.push(format!("{}_{suffix}", p.as_str()));
        }
    }
    header.push("error".into());
    let rows = r
        .points
        .iter()
        .map(|row| {
            let mut cells = vec![row.index.to_string()];
            for z in [row.params.nu, row.params.c, row.params.alpha, row.params.q] {
                cells.extend(complex_cells(z));
            }
            for p in properties {
                match row.report.as_ref().and_then(|rep| rep.verdict(*p)) {
                    Some(v) => {
                        cells.push(symbolic_label(&v.symbolic));
                        cells.push(opt_f64(v.numeric.residual));
                        cells.push(v.agree.to_string());
                    }
                    None => cells.extend([String::new(), String::new(), String::new()]),
                }
            }
            cells.push(row.error.clone().unwrap_or_default());
            cells
        })
        .collect();
    (header, rows)
}

/// Runs a sweep and writes `sweep.csv` plus the JSON report.
pub fn sweep(cfg: RunConfig, opts: &Options) -> Result<Outcome, RunError> {
    let loaded = cfg.load()?;
    let report = sweep_report(&loaded, opts)?;
    let cfg = &loaded.config;
    std::fs::create_dir_all(&opts.out).map_err(io_err(&opts.out))?;
    let csv_path = opts.out.join("sweep.csv");
    let (h, rows) = sweep_csv(&report, &cfg.properties());
    output::write_csv(&csv_path, &h, &rows).map_err(io_err(&csv_path))?;
    let mut files = vec![PathBuf::from("sweep.csv")];
    if cfg.output.format == Format::Json {
        let name = cfg.output.report.clone().unwrap_or_else(|| "sweep.json".into());
        let path = opts.out.join(&name);
        output::write_json(&path, &report).map_err(io_err(&path))?;
        files.push(PathBuf::from(name));
    }
    Ok(Outcome {
        status: report.summary.status(),
        files,
    })
}
