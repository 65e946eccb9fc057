//! Command-line front end: argument parsing, configuration, dispatch and
//! structured output.
//!
//! Every invocation is first turned into a [`RunConfig`], which is plain
//! serializable data, so a run can be replayed from a JSON file with
//! `--config`. [`run`] evaluates a config into a [`Report`]; [`execute`]
//! wraps the whole thing and maps errors to exit codes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gauge::{brute_force_gauge, optimal_gauge, optimal_transverse_gauge, rayleigh_upper_bounds, MagneticField};
use crate::geometry::{scale_section, Point2, Section, SectionSpec};
use crate::model::{
    concentration_threshold, essential_spectrum_limit, halfspace_sigma, theta0_detail, truncated_domain_edges,
    HalfPlaneGrid,
};
use crate::reduced::{exact_reduced_spectrum, fd_halfline_spectrum, lambda_from_gauge, GridSpec};
use crate::robin::{robin_cone_upper_bound, robin_model_energy, robin_scaling_exponent, BoundaryProfile, RobinModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 20_140_917;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_ACCURACY: i32 = 4;

/// Where the section comes from: inline JSON or a file holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum SectionSource {
    Inline(SectionSpec),
    File(PathBuf),
}

impl SectionSource {
    /// A `--section` argument: JSON if it starts with `{`, a path otherwise.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            Ok(Self::Inline(serde_json::from_str(arg)?))
        } else {
            Ok(Self::File(PathBuf::from(arg)))
        }
    }

    pub fn load(&self) -> Result<Section> {
        match self {
            Self::Inline(spec) => spec.build(),
            Self::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let spec: SectionSpec = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                spec.build()
            }
        }
    }
}

/// Quantities a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "camelCase")]
pub enum SweepTarget {
    /// `e(B, εω)` and the bound ladder, over `--eps`.
    Bound,
    /// Moments of `εω`, over `--eps`.
    Moments,
    /// Optimal transverse gauge of `εω`, over `--eps`.
    Gauge,
    /// Robin cone bound of `εω`, over `--eps`.
    RobinCone,
    /// `σ(θ)`, over `--theta`.
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "camelCase", deny_unknown_fields)]
pub enum Command {
    Moments,
    Gauge,
    Bound,
    Spectrum1d,
    Theta0,
    Sigma,
    Ess,
    Concentrate,
    Edges,
    RobinWedge,
    RobinCone,
    RobinScaling,
    Sweep { target: SweepTarget },
}

/// Command parameters; each command reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub npoints: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A complete, replayable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<MagneticField>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub strict: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            section: None,
            field: None,
            params: Params::default(),
            output: OutputSpec::default(),
            strict: false,
            seed: DEFAULT_SEED,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        for list in [&p.eps, &p.theta].into_iter().flatten() {
            if list.is_empty() {
                return Err(Error::Usage("parameter lists must not be empty".into()));
            }
        }
        if let Some(eps) = &p.eps {
            if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
                return Err(Error::Domain("epsilon values must be strictly positive".into()));
            }
        }
        Ok(())
    }

    fn section(&self) -> Result<Section> {
        self.section
            .as_ref()
            .ok_or_else(|| Error::Usage("this command needs --section".into()))?
            .load()
    }

    fn field(&self) -> Result<MagneticField> {
        self.field.ok_or_else(|| Error::Usage("this command needs --field".into()))
    }

    fn eps(&self) -> Result<&[f64]> {
        self.params.eps.as_deref().ok_or_else(|| Error::Usage("this command needs --eps".into()))
    }

    fn c_floor(&self) -> f64 {
        self.params.c_floor.unwrap_or(0.5)
    }
}

/// A swept quantity: one row per parameter value, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub parameter: String,
    pub columns: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.parameter, self.columns.join(","));
        for (p, vals) in &self.rows {
            out.push_str(&p.to_string());
            for v in vals {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// The deterministic part of a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub input: Value,
    pub result: Value,
    /// Nature of each reported quantity: exact, quadrature, FD, upper-bound, lower-bound.
    pub provenance: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<Table>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Report plus the non-deterministic envelope.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Output {
    pub report: Report,
    pub envelope: Envelope,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Envelope {
    pub version: String,
    pub wall_time_seconds: f64,
}

fn tags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn command_name(c: Command) -> String {
    match serde_json::to_value(c).expect("command serializes") {
        Value::Object(m) => {
            let name = m["name"].as_str().unwrap_or_default().to_string();
            match m.get("target").and_then(Value::as_str) {
                Some(t) => format!("{name} {t}"),
                None => name,
            }
        }
        _ => String::new(),
    }
}

/// Evaluate a config. Warnings become an accuracy error under `strict`.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let mut table = None;
    let (result, provenance) = match cfg.command {
        Command::Moments => {
            let m = cfg.section()?.moments();
            (json!(m), tags(&[("moments", "exact")]))
        }
        Command::Gauge => {
            let section = cfg.section()?;
            let m = section.moments();
            let g = optimal_transverse_gauge(&m)?;
            let oracle = brute_force_gauge(&m)?;
            let mut r = json!({
                "gauge": g.matrix(),
                "oracle": oracle.matrix(),
                "curl": g.curl(),
                "transverseNormSq": g.norm_sq(&m),
            });
            if let Some(field) = cfg.field {
                let full = optimal_gauge(field, &m)?;
                r["fullGauge"] = json!(full.matrix);
                r["lambda"] = json!(full.norm_sq(&m) / m.area);
            }
            (r, tags(&[("gauge", "exact"), ("oracle", "exact"), ("transverseNormSq", "exact"), ("lambda", "exact")]))
        }
        Command::Bound => {
            let m = cfg.section()?.moments();
            let r = rayleigh_upper_bounds(cfg.field()?, &m, cfg.params.n.unwrap_or(1))?;
            (json!(r), tags(&[("e", "exact"), ("transverseNormSq", "exact"), ("bounds", "upper-bound")]))
        }
        Command::Spectrum1d => {
            let lambda = match cfg.params.lambda {
                Some(l) => l,
                None => {
                    let section = cfg.section()?;
                    let a = optimal_gauge(cfg.field()?, &section.moments())?;
                    lambda_from_gauge(&a, &section)?
                }
            };
            let n = cfg.params.n.unwrap_or(3) as usize;
            let mut grid = GridSpec::default_for(lambda);
            if let Some(x) = cfg.params.x_max {
                grid.x_max = x;
            }
            if let Some(p) = cfg.params.npoints {
                grid.n = p;
            }
            let fd = fd_halfline_spectrum(lambda, grid, n)?;
            warnings.extend(fd.warning.clone());
            let exact = exact_reduced_spectrum(lambda, n)?;
            (
                json!({ "lambda": lambda, "exact": exact, "fd": fd.values, "grid": fd.grid }),
                tags(&[("lambda", "exact"), ("exact", "exact"), ("fd", "FD")]),
            )
        }
        Command::Theta0 => {
            let r = theta0_detail()?;
            (json!({ "theta0": r.mu, "xiStar": r.xi }), tags(&[("theta0", "FD"), ("xiStar", "FD")]))
        }
        Command::Sigma => {
            let thetas = cfg.params.theta.clone().ok_or_else(|| Error::Usage("sigma needs --theta".into()))?;
            let rows = sigma_rows(&thetas, &mut warnings)?;
            let values: Vec<f64> = rows.iter().map(|r| r.1[0]).collect();
            table = Some(Table { parameter: "theta".into(), columns: vec!["sigma".into()], rows });
            let result = if values.len() == 1 { json!({ "sigma": values[0] }) } else { json!({ "sigma": values }) };
            (result, tags(&[("sigma", "FD")]))
        }
        Command::Ess => {
            let section = cfg.section()?;
            let field = cfg.field()?;
            let ladder = essential_spectrum_limit(field, &section, cfg.eps()?, cfg.c_floor())?;
            let cylinder = crate::model::cylinder_energy(field, &section, cfg.c_floor())?;
            table = Some(Table {
                parameter: "epsilon".into(),
                columns: vec!["estimate".into(), "lower".into(), "upper".into()],
                rows: ladder
                    .iter()
                    .map(|(e, est)| {
                        let (lo, hi) = est.interval();
                        (*e, vec![est.value, lo, hi])
                    })
                    .collect(),
            });
            (
                json!({ "ladder": ladder, "cylinder": cylinder }),
                tags(&[("ladder", "two-sided: upper-bound value, lower-bound floor"), ("cylinder", "two-sided: upper-bound value, lower-bound floor")]),
            )
        }
        Command::Concentrate => {
            let c = concentration_threshold(cfg.field()?, &cfg.section()?, cfg.c_floor())?;
            let mut r = json!({ "threshold": c });
            if let Some(eps) = &cfg.params.eps {
                r["verdicts"] = json!(eps.iter().map(|&e| c.verdict(e)).collect::<Vec<_>>());
            }
            if c.degenerate {
                warnings.push("e(B, omega) = 0: threshold is infinite".into());
            }
            (r, tags(&[("epsilonStar", "exact"), ("vertexBound", "upper-bound"), ("floorUsed", "lower-bound")]))
        }
        Command::Edges => {
            let eps = cfg.eps()?;
            let section = cfg.section()?;
            let edges = eps.iter().map(|&e| truncated_domain_edges(&section, e)).collect::<Result<Vec<_>>>()?;
            let mut r = json!({ "edges": edges, "beta0Max": edges.iter().map(|e| e.beta0_max()).collect::<Vec<_>>() });
            if let Some(b) = cfg.params.beta0 {
                r["certified"] = json!(edges.iter().map(|e| e.certifies(b)).collect::<Vec<_>>());
            }
            (r, tags(&[("edges", "exact")]))
        }
        Command::RobinWedge => {
            let alpha = cfg.params.alpha.ok_or_else(|| Error::Usage("robin wedge needs --alpha".into()))?;
            let e = robin_model_energy(RobinModel::Wedge { alpha })?;
            (json!({ "alpha": alpha, "energy": e }), tags(&[("energy", "exact")]))
        }
        Command::RobinCone => {
            let profile = BoundaryProfile::from_section(&cfg.section()?, cfg.params.axis)?;
            let b = robin_cone_upper_bound(&profile)?;
            (json!({ "bound": b, "profile": profile }), tags(&[("bound", "quadrature, upper-bound")]))
        }
        Command::RobinScaling => {
            let s = robin_scaling_exponent(&cfg.section()?, cfg.params.axis, cfg.eps()?)?;
            (json!({ "exponent": s }), tags(&[("exponent", "quadrature, regression")]))
        }
        Command::Sweep { target } => {
            let t = sweep(cfg, target, &mut warnings)?;
            let r = json!({ "rows": t.rows.len() });
            table = Some(t);
            (r, tags(&[("table", sweep_provenance(target))]))
        }
    };
    if cfg.strict && !warnings.is_empty() {
        return Err(Error::Accuracy(warnings.join("; ")));
    }
    Ok(Report {
        command: command_name(cfg.command),
        version: VERSION.to_string(),
        seed: cfg.seed,
        input: serde_json::to_value(cfg)?,
        result,
        provenance,
        table,
        warnings,
    })
}

fn sweep_provenance(target: SweepTarget) -> &'static str {
    match target {
        SweepTarget::Bound => "exact e, upper-bound ladder",
        SweepTarget::Moments | SweepTarget::Gauge => "exact",
        SweepTarget::RobinCone => "quadrature, upper-bound",
        SweepTarget::Sigma => "FD",
    }
}

fn sigma_rows(thetas: &[f64], warnings: &mut Vec<String>) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = HalfPlaneGrid::default();
    warnings.extend(thetas.iter().filter_map(|&t| grid.warning(t)));
    thetas
        .par_iter()
        .map(|&t| halfspace_sigma(t, grid).map(|s| (t, vec![s])))
        .collect()
}

fn sweep(cfg: &RunConfig, target: SweepTarget, warnings: &mut Vec<String>) -> Result<Table> {
    if target == SweepTarget::Sigma {
        let thetas = cfg.params.theta.as_deref().ok_or_else(|| Error::Usage("sigma sweep needs --theta".into()))?;
        let rows = sigma_rows(thetas, warnings)?;
        return Ok(Table { parameter: "theta".into(), columns: vec!["sigma".into()], rows });
    }
    let section = cfg.section()?;
    let eps = cfg.eps()?;
    let n = cfg.params.n.unwrap_or(1);
    let columns: Vec<String> = match target {
        SweepTarget::Bound => std::iter::once("e".to_string()).chain((1..=n).map(|k| format!("bound{k}"))).collect(),
        SweepTarget::Moments => ["area", "M0", "M1", "M2"].map(String::from).to_vec(),
        SweepTarget::Gauge => ["a", "b", "c", "d", "transverseNormSq"].map(String::from).to_vec(),
        SweepTarget::RobinCone => vec!["bound".into()],
        SweepTarget::Sigma => unreachable!(),
    };
    let field = if target == SweepTarget::Bound { Some(cfg.field()?) } else { None };
    let rows = eps
        .par_iter()
        .map(|&e| {
            let s = scale_section(&section, e)?;
            let m = s.moments();
            let vals = match target {
                SweepTarget::Bound => {
                    let r = rayleigh_upper_bounds(field.expect("checked"), &m, n)?;
                    std::iter::once(r.e_constant).chain(r.bounds.iter().map(|b| b.1)).collect()
                }
                SweepTarget::Moments => vec![m.area, m.raw0, m.raw1, m.raw2],
                SweepTarget::Gauge => {
                    let g = optimal_transverse_gauge(&m)?;
                    vec![g.a, g.b, g.c, g.d, g.norm_sq(&m)]
                }
                SweepTarget::RobinCone => {
                    let axis = cfg.params.axis.map(|a| [e * a[0], e * a[1]]);
                    vec![robin_cone_upper_bound(&BoundaryProfile::from_section(&s, axis)?)?]
                }
                SweepTarget::Sigma => unreachable!(),
            };
            Ok((e, vals))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { parameter: "epsilon".into(), columns, rows })
}

/// Two-column `(parameter, quantity)` CSV from a report's table.
pub fn emit_plot_data(report: &Report, quantity: &str) -> Result<String> {
    let table = report
        .table
        .as_ref()
        .filter(|t| !t.rows.is_empty())
        .ok_or_else(|| Error::Usage("report has no swept quantity".into()))?;
    let col = table
        .columns
        .iter()
        .position(|c| c == quantity)
        .ok_or_else(|| Error::Usage(format!("unknown quantity {quantity:?}; available: {}", table.columns.join(", "))))?;
    let mut out = format!("{},{}\n", table.parameter, quantity);
    for (p, vals) in &table.rows {
        out.push_str(&format!("{p},{}\n", vals[col]));
    }
    Ok(out)
}

/// Flat `quantity,value` CSV of a report's numeric results, or its table.
pub fn report_csv(report: &Report) -> String {
    if let Some(t) = &report.table {
        return t.to_csv();
    }
    let mut out = String::from("quantity,value\n");
    flatten(&report.result, String::new(), &mut out);
    out
}

fn flatten(v: &Value, prefix: String, out: &mut String) {
    match v {
        Value::Number(n) => out.push_str(&format!("{prefix},{n}\n")),
        Value::Bool(b) => out.push_str(&format!("{prefix},{b}\n")),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(item, format!("{prefix}[{i}]"), out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(item, key, out);
            }
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(name = "conebounds", version, about = "Ground-energy bounds for the magnetic Laplacian on sharp cones")]
pub struct Cli {
    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Treat accuracy warnings as errors (also CONEBOUNDS_STRICT=1).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Emit a two-column plot table of this swept quantity.
    #[arg(long, global = true)]
    pub plot: Option<String>,
    /// Seed recorded in the report.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Section: a JSON file, or inline JSON such as '{"disc":{"center":[0,0],"radius":1}}'.
    #[arg(long)]
    pub section: Option<String>,
    /// Magnetic field as bx,by,bz.
    #[arg(long, allow_hyphen_values = true)]
    pub field: Option<MagneticField>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Comma-separated scale factors.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Comma-separated angles in radians.
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub cfloor: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub npoints: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Axis point x,y in the section plane.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub axis: Option<Vec<f64>>,
    #[arg(long)]
    pub beta0: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Second moments of the section.
    Moments(Common),
    /// Optimal gauge (closed form and normal-equation oracle).
    Gauge(Common),
    /// e(B, omega) and the bounds (4n - 1) e.
    Bound(Common),
    /// Spectrum of the reduced half-line problem.
    Spectrum1d(Common),
    /// Model operators.
    Model {
        #[command(subcommand)]
        which: ModelCommand,
    },
    /// Essential-spectrum estimates along an epsilon ladder.
    Ess(Common),
    /// Corner-concentration threshold.
    Concentrate(Common),
    /// Edge openings of the truncated sharp cone.
    Edges(Common),
    /// Robin-Laplacian analogues.
    Robin {
        #[command(subcommand)]
        which: RobinCommand,
    },
    /// Evaluate a command over a parameter list.
    Sweep {
        target: SweepTarget,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a saved RunConfig.
    Run {
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    Theta0,
    Sigma(Common),
}

#[derive(Debug, Subcommand)]
pub enum RobinCommand {
    Wedge(Common),
    Cone(Common),
    Scaling(Common),
}

impl Cli {
    /// Build the run configuration; `env_strict` reflects CONEBOUNDS_STRICT.
    pub fn into_config(self, env_strict: bool) -> Result<RunConfig> {
        let (command, common) = match self.command {
            CliCommand::Moments(c) => (Command::Moments, c),
            CliCommand::Gauge(c) => (Command::Gauge, c),
            CliCommand::Bound(c) => (Command::Bound, c),
            CliCommand::Spectrum1d(c) => (Command::Spectrum1d, c),
            CliCommand::Model { which: ModelCommand::Theta0 } => (Command::Theta0, Common::default()),
            CliCommand::Model { which: ModelCommand::Sigma(c) } => (Command::Sigma, c),
            CliCommand::Ess(c) => (Command::Ess, c),
            CliCommand::Concentrate(c) => (Command::Concentrate, c),
            CliCommand::Edges(c) => (Command::Edges, c),
            CliCommand::Robin { which: RobinCommand::Wedge(c) } => (Command::RobinWedge, c),
            CliCommand::Robin { which: RobinCommand::Cone(c) } => (Command::RobinCone, c),
            CliCommand::Robin { which: RobinCommand::Scaling(c) } => (Command::RobinScaling, c),
            CliCommand::Sweep { target, common } => (Command::Sweep { target }, common),
            CliCommand::Run { config } => {
                let mut cfg = RunConfig::from_json(&std::fs::read_to_string(config)?)?;
                cfg.strict |= self.strict || env_strict;
                if self.csv {
                    cfg.output.format = OutputFormat::Csv;
                }
                if self.output.is_some() {
                    cfg.output.path = self.output;
                }
                return Ok(cfg);
            }
        };
        let section = common.section.as_deref().map(SectionSource::from_arg).transpose()?;
        let axis = common.axis.map(|v| [v[0], v[1]]);
        let cfg = RunConfig {
            command,
            section,
            field: common.field,
            params: Params {
                n: common.n,
                eps: common.eps,
                theta: common.theta,
                c_floor: common.cfloor,
                lambda: common.lambda,
                x_max: common.xmax,
                npoints: common.npoints,
                alpha: common.alpha,
                axis,
                beta0: common.beta0,
            },
            output: OutputSpec { format: if self.csv { OutputFormat::Csv } else { OutputFormat::Json }, path: self.output },
            strict: self.strict || env_strict,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Usage(_) | Error::Io(_) => EXIT_PARSE,
        Error::Domain(_) | Error::Geometry(_) | Error::Solver(_) => EXIT_DOMAIN,
        Error::Accuracy(_) => EXIT_ACCURACY,
    }
}

/// Machine-readable error object.
pub fn error_json(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse arguments, run, and render. Never panics on bad input.
pub fn execute<I, T>(args: I, env_strict: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() };
            }
            let err = Error::Parse(e.to_string());
            return Outcome { code: EXIT_PARSE, stdout: error_json(&err), stderr: e.to_string() };
        }
    };
    let plot = cli.plot.clone();
    let fail = |e: Error| Outcome { code: exit_code(&e), stdout: error_json(&e), stderr: e.to_string() };
    let cfg = match cli.into_config(env_strict) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let start = Instant::now();
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let rendered = match (&plot, cfg.output.format) {
        (Some(q), _) => match emit_plot_data(&report, q) {
            Ok(s) => s,
            Err(e) => return fail(e),
        },
        (None, OutputFormat::Csv) => report_csv(&report),
        (None, OutputFormat::Json) => {
            let out = Output {
                report,
                envelope: Envelope { version: VERSION.into(), wall_time_seconds: start.elapsed().as_secs_f64() },
            };
            serde_json::to_string_pretty(&out).expect("report serializes") + "\n"
        }
    };
    if let Some(path) = &cfg.output.path {
        if let Err(e) = std::fs::write(path, &rendered) {
            return fail(Error::Io(e));
        }
        return Outcome { code: EXIT_OK, stdout: String::new(), stderr: String::new() };
    }
    Outcome { code: EXIT_OK, stdout: rendered, stderr: String::new() }
}

/// Whether CONEBOUNDS_STRICT requests strict mode.
pub fn env_strict() -> bool {
    std::env::var("CONEBOUNDS_STRICT").map(|v| v == "1").unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISC: &str = r#"{"disc":{"center":[0,0],"radius":1}}"#;

    #[test]
    fn bound_command() {
        let out = execute(["conebounds", "bound", "--section", DISC, "--field", "0,0,1", "--n", "3"], false);
        assert_eq!(out.code, 0, "{}", out.stdout);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let e = v["report"]["result"]["e"].as_f64().unwrap();
        assert!((e - 0.353_553_390_593_273_8).abs() < 1e-15);
        let b = v["report"]["result"]["bounds"].as_array().unwrap();
        assert_eq!(b.len(), 3);
        assert!((b[2][1].as_f64().unwrap() - 11.0 * e).abs() < 1e-14);
        assert_eq!(v["report"]["provenance"]["bounds"], "upper-bound");
    }

    #[test]
    fn sweep_bound_csv_is_linear() {
        let out = execute(
            ["conebounds", "--csv", "sweep", "bound", "--section", DISC, "--field", "0,0,1", "--eps", "1,0.5,0.1"],
            false,
        );
        assert_eq!(out.code, 0, "{}", out.stdout);
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(lines.len(), 4);
        let e: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!((e[1] / e[0] - 0.5).abs() < 1e-14 && (e[2] / e[0] - 0.1).abs() < 1e-14);
    }

    #[test]
    fn malformed_section_is_parse_error() {
        let out = execute(["conebounds", "moments", "--section", r#"{"polygon": [[0,0],[1]]}"#], false);
        assert_eq!(out.code, EXIT_PARSE);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["error"]["kind"], "parse");
    }

    #[test]
    fn domain_error_exit_code() {
        let out = execute(["conebounds", "robin", "wedge", "--alpha", "7"], false);
        assert_eq!(out.code, EXIT_DOMAIN);
    }

    #[test]
    fn strict_escalates_warnings() {
        let args = ["conebounds", "spectrum1d", "--lambda", "1", "--xmax", "1", "--npoints", "16", "--n", "1"];
        assert_eq!(execute(args, false).code, 0);
        assert_eq!(execute(args, true).code, EXIT_ACCURACY);
        let mut with_flag = args.to_vec();
        with_flag.insert(1, "--strict");
        assert_eq!(execute(with_flag, false).code, EXIT_ACCURACY);
    }

    #[test]
    fn plot_data() {
        let out = execute(
            ["conebounds", "--plot", "e", "sweep", "bound", "--section", DISC, "--field", "0,0,1", "--eps", "2,1"],
            false,
        );
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.lines().next(), Some("epsilon,e"));
        let empty = Report {
            command: "x".into(),
            version: VERSION.into(),
            seed: 0,
            input: Value::Null,
            result: Value::Null,
            provenance: BTreeMap::new(),
            table: None,
            warnings: vec![],
        };
        assert!(matches!(emit_plot_data(&empty, "e"), Err(Error::Usage(_))));
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = RunConfig::new(Command::Sweep { target: SweepTarget::Bound });
        cfg.section = Some(SectionSource::Inline(SectionSpec::Disc { center: [0.1, 0.2], radius: 0.3 }));
        cfg.field = Some(MagneticField::new(0.1, -0.7, 1.0 / 3.0));
        cfg.params.eps = Some(vec![1.0, 0.1]);
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn deterministic_report() {
        let cfg = RunConfig {
            section: Some(SectionSource::Inline(SectionSpec::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))),
            field: Some(MagneticField::new(0.3, 0.2, 1.0)),
            ..RunConfig::new(Command::Bound)
        };
        let a = serde_json::to_string(&run(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
