//! `forge` command-line front end: argument parsing, report assembly and emission.
//!
//! Exit codes: 0 when no asserted check fails, 1 on a failed check, 2 on usage or input
//! errors.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use forge_core::cayley::{self, FiniteGroup, GeneratorSet};
use forge_core::cycles::{self, LosslessMode};
use forge_core::expansion::{self, ExpansionProfile};
use forge_core::graphs::{self, BipartiteGraph, Graph, GraphFile, Side, VertexSet};
use forge_core::pipelines::{self, Construction, DeskOptions, Mode, Overrides};
use forge_core::products;
use forge_core::report::{Check, Status};
use forge_core::sampling::{self, RngStream};
use forge_core::spectral;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {reason}")]
    Input { path: String, reason: String },
    #[error(transparent)]
    Core(#[from] forge_core::Error),
    #[error(transparent)]
    Pipeline(#[from] pipelines::PipelineError),
    #[error("i/o error: {0}")]
    Io(String),
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
from_core!(
    forge_core::GraphError,
    forge_core::ParseError,
    sampling::SamplingError,
    cayley::CayleyError,
    spectral::SpectralError,
    expansion::ExpansionError,
    cycles::CyclesError,
    products::ProductError
);

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "forge", version, about = "Build and certify unique-neighbor expanders")]
pub struct Cli {
    /// Master seed; FORGE_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report path (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit the report table as CSV with these comma-separated columns instead of JSON.
    #[arg(long, global = true, value_delimiter = ',')]
    pub csv: Option<Vec<String>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random graph.
    Gen(GenArgs),
    /// Search for a gadget with a prescribed profile floor.
    Gadget(GadgetArgs),
    /// Cayley graphs of cyclic groups, LPS generators or group table files.
    Cayley(CayleyArgs),
    /// Line and tripartite line products.
    Product(ProductArgs),
    /// Adjacency spectrum, non-backtracking radius, Bethe Hessian and Ihara-Bass.
    Spectral(SpectralArgs),
    /// Exact (or sampled) unique-neighbor expansion profile.
    Profile(ProfileArgs),
    /// Density, vertex-expansion, low-degree, subgraph-radius and average-degree checks.
    Check(CheckArgs),
    /// Girth, shortest cycle and bicycle, generalized Moore bound, small-set lossless check.
    Cycles(CyclesArgs),
    /// End-to-end constructions.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub model: GenModel,
    /// Where to write the graph.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenModel {
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    Biregular {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        /// Minimum girth (grown sampler).
        #[arg(long)]
        girth: Option<usize>,
        /// Keep parallel edges (raw configuration model).
        #[arg(long)]
        multi: bool,
    },
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    Er {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, conflicts_with = "m")]
        p: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Tripartite base with `(K1, D1)` and `(D2, K2)` biregular halves.
    Tripartite {
        #[arg(long)]
        n_middle: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        #[arg(long)]
        k2: usize,
    },
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    /// Left side size.
    #[arg(long = "D1")]
    pub big_d1: usize,
    /// Right side size.
    #[arg(long = "D2")]
    pub big_d2: usize,
    #[arg(long)]
    pub d1: usize,
    #[arg(long)]
    pub d2: usize,
    #[arg(long = "tmax", default_value_t = 3)]
    pub t_max: usize,
    /// Profile floor `scale * d1 * exp(-theta t / sqrt(D1 + D2))`.
    #[arg(long, default_value_t = 0.9)]
    pub scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = expansion::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Graph output; the profile goes to `<graph>.profile.json`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["group", "cyclic", "lps"])))]
pub struct CayleyArgs {
    /// Group table file.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Cyclic group of this order.
    #[arg(long)]
    pub cyclic: Option<usize>,
    /// LPS generators `p,q` (generators are implied).
    #[arg(long, value_delimiter = ',', conflicts_with = "gens")]
    pub lps: Option<Vec<u64>>,
    /// Generator element indices.
    #[arg(long, value_delimiter = ',')]
    pub gens: Vec<usize>,
    /// Trim the generators (inverse-closed) down to this many.
    #[arg(long)]
    pub trim: Option<usize>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProductKind {
    Line,
    Tripartite,
}

#[derive(Debug, Args)]
pub struct ProductArgs {
    pub kind: ProductKind,
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub gadget: PathBuf,
    /// One `L` or `R` per canonical base edge (bipartite gadgets).
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    pub input: PathBuf,
    /// Non-backtracking radius and Bethe Hessian duality.
    #[arg(long)]
    pub nb: bool,
    /// Bethe Hessian minimum-eigenvalue scan `a:b:step`.
    #[arg(long)]
    pub psd_grid: Option<String>,
    /// Ihara-Bass determinant residual.
    #[arg(long)]
    pub ihara_bass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    #[value(name = "both")]
    Whole,
    #[value(name = "L")]
    Left,
    #[value(name = "R")]
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Whole => Side::Whole,
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    pub input: PathBuf,
    #[arg(long = "tmax", default_value_t = 3)]
    pub t_max: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Whole)]
    pub side: SideArg,
    #[arg(long, default_value_t = expansion::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Exact enumeration (the default).
    #[arg(long, conflicts_with = "samples")]
    pub exact: bool,
    /// Random sets per size for a witness upper bound instead of the exact profile.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Assert `P(t) >= floor` for every `t`.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(subcommand)]
    pub check: CheckKind,
}

#[derive(Debug, Subcommand)]
pub enum CheckKind {
    /// With `--gamma`: exact search for a set with `2 e(S) > gamma |S|`. Otherwise sampled:
    /// the subgraph density bound on a biregular graph, the mixing bound on a regular one.
    Density {
        input: PathBuf,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Largest sampled set (`|S1| + |S2|` on biregular graphs).
        #[arg(long, default_value_t = 10)]
        max_size: usize,
        /// Mixing check: set sizes up to this fraction of `n`.
        #[arg(long, default_value_t = 0.25)]
        eps_frac: f64,
    },
    /// Sampled vertex-expansion corollary on left sets of a biregular graph.
    VertexExpansion {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        max_size: usize,
    },
    /// `2 e(F) <= 3 * (degree mass on vertices of degree <= 2 gamma)`.
    LowDegree {
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
    /// Spectral radius of an induced subgraph against the near-Ramanujan bound.
    Subgraph {
        input: PathBuf,
        /// Whole-graph vertex indices.
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 5.0)]
        c_eps: f64,
    },
    /// Average-degree bound of a bipartite graph.
    AvgDegree { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LosslessArg {
    Cycle,
    Bicycle,
}

#[derive(Debug, Args)]
pub struct CyclesArgs {
    pub input: PathBuf,
    /// Generalized Moore bound.
    #[arg(long)]
    pub moore: bool,
    /// Shortest bicycle.
    #[arg(long)]
    pub bicycle: bool,
    /// Small-set lossless expansion of the left side (bipartite input).
    #[arg(long, requires = "eps")]
    pub lossless: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = LosslessArg::Cycle)]
    pub mode: LosslessArg,
    #[arg(long, default_value_t = expansion::DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Main,
    Tripartite,
    Lossless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Faithful,
    Desk,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    pub construction: ConstructionArg,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub d1: usize,
    #[arg(long)]
    pub d2: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Desk)]
    pub mode: ModeArg,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub c_theta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Gadget floor factor (desk).
    #[arg(long)]
    pub gadget_scale: Option<f64>,
    #[arg(long)]
    pub base_size: Option<usize>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

/// Machine-readable outcome of one command.
#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub params: Value,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub results: Value,
    /// Rows for CSV projection.
    pub table: Vec<Map<String, Value>>,
    /// [`Report::digest`] at emission time.
    pub report_digest: String,
    /// Wall-clock data; excluded from [`Report::digest`].
    pub timing: Value,
}

impl Report {
    fn new(command: &str, seed: u64, params: Value) -> Self {
        Self {
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            seed,
            params,
            results: Value::Null,
            timing: Value::Null,
            ..Self::default()
        }
    }

    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    /// JSON without the `timing` and `report_digest` fields.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        let o = v.as_object_mut().expect("object");
        o.remove("timing");
        o.remove("report_digest");
        serde_json::to_string_pretty(&v).expect("serializable")
    }

    /// SHA-256 of [`Report::canonical_json`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    fn push(&mut self, name: &str, status: Status, payload: Value) {
        self.checks.push(Check::new(name, status, payload));
    }
}

/// CSV projection of the report table; a header-only document when the table is empty.
pub fn emit_csv(report: &Report, columns: &[String]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(|e| CliError::Io(e.to_string()))?;
    for row in &report.table {
        let mut rec = Vec::with_capacity(columns.len());
        for c in columns {
            let v = row.get(c).ok_or_else(|| CliError::Usage(format!("column `{c}` is not in the report")))?;
            rec.push(cell(v));
        }
        w.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input { path: path.display().to_string(), reason: e.to_string() })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn load(path: &Path, report: &mut Report) -> Result<GraphFile> {
    let digest = sha256_file(path)?;
    report.inputs.insert(path.display().to_string(), digest);
    graphs::read_graph(path).map_err(|e| CliError::Input { path: path.display().to_string(), reason: e.to_string() })
}

fn write_output(path: Option<&Path>, file: &GraphFile, report: &mut Report) -> Result<()> {
    let text = graphs::format_graph_file(file);
    if let Some(p) = path {
        std::fs::write(p, &text).map_err(|e| CliError::Io(e.to_string()))?;
    }
    report.outputs.insert("graph".into(), hex::encode(Sha256::digest(text.as_bytes())));
    Ok(())
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn profile_table(p: &ExpansionProfile) -> Vec<Map<String, Value>> {
    p.entries
        .iter()
        .map(|e| {
            let mut m = Map::new();
            m.insert("t".into(), json!(e.t));
            m.insert("min_ratio".into(), json!(e.min_ratio));
            m.insert("unique".into(), json!(e.unique));
            m.insert("size".into(), json!(e.size));
            m.insert("witness".into(), json!(e.argmin));
            m
        })
        .collect()
}

fn graph_summary(f: &GraphFile) -> Value {
    match f {
        GraphFile::Graph(g) => json!({ "kind": "graph", "n": g.n(), "m": g.m() }),
        GraphFile::Bipartite(b) => {
            json!({ "kind": "bipartite", "n_left": b.n_left(), "n_right": b.n_right(), "m": b.m(), "degrees": b.biregular_degrees() })
        }
        GraphFile::Tripartite(t) => json!({ "kind": "tripartite", "n_left": t.n_left(), "n_middle": t.n_middle(), "n_right": t.n_right() }),
    }
}

fn cmd_gen(a: &GenArgs, seed: u64) -> Result<Report> {
    let mut rng = RngStream::new(seed, 0).rng();
    let (name, params, file) = match &a.model {
        GenModel::Regular { n, d } => {
            ("gen regular", json!({ "n": n, "d": d }), GraphFile::Graph(sampling::sample_regular(*n, *d, &mut rng, None)?))
        }
        GenModel::Biregular { n1, n2, d1, d2, girth, multi } => {
            let b = match (girth, multi) {
                (Some(_), true) => return Err(CliError::Usage("--girth and --multi are exclusive".into())),
                (Some(g), false) => sampling::sample_biregular_girth(*n1, *n2, *d1, *d2, *g, &mut rng, 200)?,
                (None, true) => sampling::sample_biregular_multigraph(*n1, *n2, *d1, *d2, &mut rng)?,
                (None, false) => sampling::sample_biregular(*n1, *n2, *d1, *d2, &mut rng, None)?,
            };
            let params = json!({ "n1": n1, "n2": n2, "d1": d1, "d2": d2, "girth": girth, "multi": multi });
            ("gen biregular", params, GraphFile::Bipartite(b))
        }
        GenModel::Gnp { n, p } => ("gen gnp", json!({ "n": n, "p": p }), GraphFile::Graph(sampling::sample_gnp(*n, *p, &mut rng)?)),
        GenModel::Er { n1, n2, p, m } => {
            let b = match (p, m) {
                (Some(p), None) => sampling::sample_er_p(*n1, *n2, *p, &mut rng)?,
                (None, Some(m)) => sampling::sample_er_m(*n1, *n2, *m, &mut rng)?,
                _ => return Err(CliError::Usage("give exactly one of --p and --m".into())),
            };
            ("gen er", json!({ "n1": n1, "n2": n2, "p": p, "m": m }), GraphFile::Bipartite(b))
        }
        GenModel::Tripartite { n_middle, k1, d1, d2, k2 } => {
            let (nm, k1, d1, d2, k2) = (*n_middle, *k1, *d1, *d2, *k2);
            if k1 == 0 || k2 == 0 || (nm * d1) % k1 != 0 || (nm * d2) % k2 != 0 {
                return Err(CliError::Usage("n_middle * D must be divisible by K on both halves".into()));
            }
            let g1 = sampling::sample_biregular(nm * d1 / k1, nm, k1, d1, &mut rng, None)?;
            let g2 = sampling::sample_biregular(nm, nm * d2 / k2, d2, k2, &mut rng, None)?;
            let t = graphs::TripartiteBase::new(g1, g2, None)?;
            ("gen tripartite", json!({ "n_middle": nm, "k1": k1, "d1": d1, "d2": d2, "k2": k2 }), GraphFile::Tripartite(t))
        }
    };
    let mut r = Report::new(name, seed, params);
    write_output(a.graph.as_deref(), &file, &mut r)?;
    r.results = graph_summary(&file);
    Ok(r)
}

fn cmd_gadget(a: &GadgetArgs, seed: u64) -> Result<Report> {
    let params = json!({
        "D1": a.big_d1, "D2": a.big_d2, "d1": a.d1, "d2": a.d2, "t_max": a.t_max,
        "scale": a.scale, "theta": a.theta, "trials": a.trials, "budget": a.budget,
    });
    let mut r = Report::new("gadget", seed, params);
    let sq = ((a.big_d1 + a.big_d2) as f64).sqrt();
    let floor = |t: usize| a.scale * a.d1 as f64 * (-a.theta * t as f64 / sq).exp();
    let floors: Vec<f64> = (1..=a.t_max).map(floor).collect();
    match sampling::gadget_search(a.big_d1, a.big_d2, a.d1, a.d2, floor, a.t_max, seed, a.trials, a.budget) {
        Ok(g) => {
            let file = GraphFile::Bipartite(g.graph.clone());
            write_output(a.graph.as_deref(), &file, &mut r)?;
            let profile = to_value(&g.profile);
            if let Some(p) = &a.graph {
                let mut side = p.clone().into_os_string();
                side.push(".profile.json");
                let text = serde_json::to_string_pretty(&profile).expect("serializable") + "\n";
                std::fs::write(&side, &text).map_err(|e| CliError::Io(e.to_string()))?;
                r.outputs.insert("profile".into(), hex::encode(Sha256::digest(text.as_bytes())));
            }
            r.table = profile_table(&g.profile);
            r.results = json!({ "trial": g.trial, "floors": floors, "profile": profile });
            r.push("gadget_found", Status::Pass, json!({ "trial": g.trial }));
        }
        Err(sampling::SamplingError::SearchFailed { trials, best }) => {
            let best = best.as_ref().as_ref().map(|(_, p)| to_value(p));
            r.results = json!({ "floors": floors });
            r.push("gadget_found", Status::Fail, json!({ "trials": trials, "best_profile": best }));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn cmd_cayley(a: &CayleyArgs, seed: u64) -> Result<Report> {
    let mut r = Report::new("cayley", seed, Value::Null);
    let (group, gens, source) = if let Some(path) = &a.group {
        r.inputs.insert(path.display().to_string(), sha256_file(path)?);
        let g = cayley::read_group(path).map_err(|e| CliError::Input { path: path.display().to_string(), reason: e.to_string() })?;
        let set = GeneratorSet::new(&g, a.gens.clone())?;
        (g, set, json!({ "group": "table" }))
    } else if let Some(n) = a.cyclic {
        let g = FiniteGroup::cyclic(n);
        let set = GeneratorSet::new(&g, a.gens.clone())?;
        (g, set, json!({ "group": "cyclic", "n": n }))
    } else {
        let pq = a.lps.as_deref().unwrap_or_default();
        if pq.len() != 2 {
            return Err(CliError::Usage("--lps takes two values p,q".into()));
        }
        lps_group(pq[0], pq[1]).map(|(g, set)| (g, set, json!({ "group": "lps", "p": pq[0], "q": pq[1] })))?
    };
    let gens = match a.trim {
        Some(d) => cayley::trim_generators(&group, &gens, d)?,
        None => gens,
    };
    r.params = json!({ "source": source, "gens": a.gens, "trim": a.trim });
    let g = cayley::cayley_graph(&group, &gens)?;
    let file = GraphFile::Graph(g.clone());
    write_output(a.graph.as_deref(), &file, &mut r)?;
    r.results = json!({ "order": group.order(), "generators": gens.members, "degree": g.regular_degree() });
    Ok(r)
}

#[cfg(feature = "lps")]
fn lps_group(p: u64, q: u64) -> Result<(FiniteGroup, GeneratorSet)> {
    Ok(cayley::lps::lps_generators(p, q)?)
}

#[cfg(not(feature = "lps"))]
fn lps_group(_: u64, _: u64) -> Result<(FiniteGroup, GeneratorSet)> {
    Err(CliError::Usage("built without LPS support".into()))
}

fn read_phi(path: &Path, m: usize, report: &mut Report) -> Result<Vec<Side>> {
    report.inputs.insert(path.display().to_string(), sha256_file(path)?);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(e.to_string()))?;
    let err = |reason: String| CliError::Input { path: path.display().to_string(), reason };
    let sides: Vec<Side> = text
        .split_whitespace()
        .map(|t| match t {
            "L" | "l" => Ok(Side::Left),
            "R" | "r" => Ok(Side::Right),
            other => Err(err(format!("expected L or R, found `{other}`"))),
        })
        .collect::<Result<_>>()?;
    if sides.len() != m {
        return Err(err(format!("expected {m} sides, found {}", sides.len())));
    }
    Ok(sides)
}

fn cmd_product(a: &ProductArgs, seed: u64) -> Result<Report> {
    let name = match a.kind {
        ProductKind::Line => "product line",
        ProductKind::Tripartite => "product tripartite",
    };
    let mut r = Report::new(name, seed, Value::Null);
    let base = load(&a.base, &mut r)?;
    let gadget = load(&a.gadget, &mut r)?;
    let (file, merges) = match (a.kind, &base, &gadget) {
        (ProductKind::Line, GraphFile::Graph(g), GraphFile::Graph(h)) => {
            let p = products::line_product(g, h, None)?;
            (GraphFile::Graph(p.graph), p.merges)
        }
        (ProductKind::Line, GraphFile::Graph(g), GraphFile::Bipartite(h)) => {
            let phi = a.phi.as_ref().ok_or_else(|| CliError::Usage("a bipartite gadget needs --phi".into()))?;
            let split = read_phi(phi, g.m(), &mut r)?;
            let p = products::line_product_split(g, &split, h)?;
            (GraphFile::Bipartite(p.graph), p.merges)
        }
        (ProductKind::Tripartite, GraphFile::Tripartite(t), GraphFile::Bipartite(h)) => {
            let p = products::tripartite_line_product(t, h)?;
            (GraphFile::Bipartite(p.graph), p.merges)
        }
        _ => return Err(CliError::Usage(format!("unsupported inputs: {} base with {} gadget", base.kind(), gadget.kind()))),
    };
    write_output(a.graph.as_deref(), &file, &mut r)?;
    r.push("zero_merges", if merges == 0 { Status::Pass } else { Status::Flagged }, json!({ "merges": merges }));
    r.results = graph_summary(&file);
    Ok(r)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad grid `{s}`"))))
        .collect::<Result<_>>()?;
    let [a, b, step] = parts[..] else { return Err(CliError::Usage(format!("grid must be a:b:step, got `{s}`"))) };
    Ok(spectral::grid(a, b, step)?)
}

fn cmd_spectral(a: &SpectralArgs, seed: u64) -> Result<Report> {
    let all = !a.nb && !a.ihara_bass && a.psd_grid.is_none();
    let params = json!({ "nb": a.nb || all, "psd_grid": a.psd_grid, "ihara_bass": a.ihara_bass || all });
    let mut r = Report::new("spectral", seed, params);
    let file = load(&a.input, &mut r)?;
    let g = file.as_graph();
    let lambda2 = if g.n() >= 2 { Some(spectral::lambda2(&g)?) } else { None };
    let slack = match &file {
        GraphFile::Bipartite(b) => match b.biregular_degrees() {
            Some((c, d)) if c >= 1 && d >= 1 && b.n_left().min(b.n_right()) >= 2 => {
                Some(spectral::biregular_lambda2(b)? - spectral::ramanujan_value(c, d))
            }
            _ => None,
        },
        GraphFile::Graph(_) => match (g.regular_degree(), lambda2) {
            (Some(d), Some(l)) if d >= 1 => Some(l - 2.0 * ((d - 1) as f64).sqrt()),
            _ => None,
        },
        GraphFile::Tripartite(_) => None,
    };
    let needs_rho = a.nb || a.ihara_bass || all;
    let rho = if needs_rho { Some(spectral::nb_spectral_radius_checked(&g)?) } else { None };
    if let (Some(rho), true) = (rho, a.nb || all) {
        if rho.rho > 1.0 && g.n() <= spectral::DENSE_LIMIT {
            let below = spectral::is_positive_definite(&spectral::bethe_hessian(&g, 1.0 / rho.rho - 1e-4));
            let above = spectral::is_positive_definite(&spectral::bethe_hessian(&g, 1.0 / rho.rho + 1e-4));
            r.push("psd_duality", Status::from_bool(below && !above), json!({ "pd_below": below, "pd_above": above }));
        }
    }
    let mut ihara = None;
    if let (Some(rho), true) = (rho, a.ihara_bass || all) {
        let small = !g.is_multi() && g.n() <= spectral::IHARA_BASS_MAX_N && g.m() <= spectral::IHARA_BASS_MAX_M;
        if small {
            let res = spectral::ihara_bass_check(&g, &spectral::ihara_bass_samples(rho.rho))?;
            r.push("ihara_bass", Status::from_bool(res <= 1e-8), json!({ "residual": res, "tolerance": 1e-8 }));
            ihara = Some(res);
        } else if a.ihara_bass {
            r.push("ihara_bass", Status::NotApplicable, json!({ "reason": "graph too large for dense determinants" }));
        }
    }
    let scan = match &a.psd_grid {
        Some(s) => spectral::psd_scan(&g, &parse_grid(s)?),
        None => Vec::new(),
    };
    r.table = scan
        .iter()
        .map(|&(t, e)| {
            let mut m = Map::new();
            m.insert("t".into(), json!(t));
            m.insert("min_eig".into(), json!(e));
            m
        })
        .collect();
    let rep = spectral::SpectralReport { lambda2, rho_b: rho, ramanujan_slack: slack, psd_scan: scan, ihara_bass_residual: ihara };
    r.results = to_value(&rep);
    Ok(r)
}

fn cmd_profile(a: &ProfileArgs, seed: u64) -> Result<Report> {
    let side: Side = a.side.into();
    let params = json!({ "t_max": a.t_max, "side": side, "budget": a.budget, "samples": a.samples, "floor": a.floor });
    let mut r = Report::new("profile", seed, params);
    let file = load(&a.input, &mut r)?;
    let profile = match (&file, a.samples) {
        (GraphFile::Bipartite(b), None) => expansion::exact_profile_auto_bipartite(b, side, a.t_max, a.budget)?,
        (GraphFile::Bipartite(b), Some(s)) => {
            let (cands, off): (Vec<usize>, usize) = match side {
                Side::Left => ((0..b.n_left()).collect(), 0),
                Side::Right => ((b.n_left()..b.n()).collect(), b.n_left()),
                Side::Whole => ((0..b.n()).collect(), 0),
            };
            let mut rng = RngStream::new(seed, 0).rng();
            let mut p = expansion::sampled_profile_lower_witness(&b.to_graph(), &cands, side, a.t_max, s, &mut rng);
            p.entries.iter_mut().for_each(|e| e.argmin.iter_mut().for_each(|v| *v -= off));
            p
        }
        (other, samples) => {
            if side != Side::Whole {
                return Err(CliError::Usage("one-sided profiles need a bipartite graph".into()));
            }
            let g = other.as_graph();
            let cands: Vec<usize> = (0..g.n()).collect();
            match samples {
                None => expansion::exact_profile_auto(&g, &cands, side, a.t_max, a.budget)?,
                Some(s) => {
                    let mut rng = RngStream::new(seed, 0).rng();
                    expansion::sampled_profile_lower_witness(&g, &cands, side, a.t_max, s, &mut rng)
                }
            }
        }
    };
    if let Some(f) = a.floor {
        let worst = profile.entries.iter().map(|e| e.min_ratio).fold(f64::INFINITY, f64::min);
        let status = match profile.kind {
            expansion::ProfileKind::Exact => Status::from_bool(worst >= f - 1e-12),
            // A witness can refute the floor but never certify it.
            expansion::ProfileKind::WitnessUpperBound => {
                if worst < f - 1e-12 {
                    Status::Fail
                } else {
                    Status::NotApplicable
                }
            }
        };
        r.push("profile_floor", status, json!({ "floor": f, "min_ratio": worst }));
    }
    r.table = profile_table(&profile);
    r.results = to_value(&profile);
    Ok(r)
}

fn expect_graph(f: &GraphFile, path: &Path) -> Result<Graph> {
    match f {
        GraphFile::Graph(g) => Ok(g.clone()),
        GraphFile::Bipartite(b) => Ok(b.to_graph()),
        GraphFile::Tripartite(_) => Err(CliError::Input { path: path.display().to_string(), reason: "expected a graph".into() }),
    }
}

fn expect_bipartite(f: &GraphFile, path: &Path) -> Result<BipartiteGraph> {
    match f {
        GraphFile::Bipartite(b) => Ok(b.clone()),
        _ => Err(CliError::Input { path: path.display().to_string(), reason: "expected a bipartite graph".into() }),
    }
}

fn cmd_check(a: &CheckArgs, seed: u64) -> Result<Report> {
    match &a.check {
        CheckKind::Density { input, gamma, trials, eps, max_size, eps_frac } => {
            let params = json!({ "gamma": gamma, "trials": trials, "eps": eps, "max_size": max_size, "eps_frac": eps_frac });
            let mut r = Report::new("check density", seed, params);
            let file = load(input, &mut r)?;
            let mut rng = RngStream::new(seed, 0).rng();
            match (gamma, &file) {
                (Some(gamma), f) => {
                    let g = expect_graph(f, input)?;
                    let v = expansion::density_violation_flow(&g, *gamma);
                    let payload = match &v {
                        Some(s) => json!({ "violating_set": s, "two_e": 2 * expansion::edges_within(&g, s), "size": s.len() }),
                        None => json!({ "violating_set": null }),
                    };
                    r.push("density", Status::from_bool(v.is_none()), payload);
                }
                (None, GraphFile::Bipartite(b)) if b.biregular_degrees().is_some_and(|(c, d)| c >= 2 && d >= 2) => {
                    let (c, d) = b.biregular_degrees().expect("biregular");
                    let l2 = spectral::biregular_lambda2(b)?;
                    let gamma = expansion::gamma_from_lambda2(c, d, l2);
                    let k = expansion::DensityConstants::default();
                    let (mut asserted, mut flagged, mut worst) = (0usize, 0usize, None::<Value>);
                    for i in 0..*trials {
                        let (s1, s2) = expansion::random_local_pair(b, 2 + i % max_size.saturating_sub(1).max(1), &mut rng);
                        let rep = expansion::subgraph_density_check(b, &s1, &s2, *eps, gamma, k)?;
                        if !rep.in_regime {
                            flagged += 1;
                            continue;
                        }
                        asserted += 1;
                        if !rep.ok && worst.is_none() {
                            worst = Some(json!({ "s1": s1, "s2": s2, "report": to_value(&rep) }));
                        }
                    }
                    let status = if worst.is_some() {
                        Status::Fail
                    } else if asserted == 0 {
                        Status::Flagged
                    } else {
                        Status::Pass
                    };
                    let payload = json!({ "gamma": gamma, "lambda2": l2, "asserted": asserted, "out_of_regime": flagged, "violation": worst });
                    r.push("subgraph_density", status, payload);
                }
                (None, f) => {
                    let g = expect_graph(f, input)?;
                    let d = g.regular_degree().ok_or_else(|| CliError::Usage("sampled density needs a regular or biregular graph".into()))?;
                    let l2 = spectral::lambda2(&g)?;
                    let v = expansion::edge_density_check(&g, l2 / d as f64, *eps_frac, *trials, &mut rng)?;
                    let payload = json!({ "lambda2": l2, "violations": v.len(), "violating_set": v.first().map(|x| &x.set), "first": v.first() });
                    r.push("mixing", Status::from_bool(v.is_empty()), payload);
                }
            }
            Ok(r)
        }
        CheckKind::VertexExpansion { input, trials, eps, max_size } => {
            let mut r = Report::new("check vertex-expansion", seed, json!({ "trials": trials, "eps": eps, "max_size": max_size }));
            let b = expect_bipartite(&load(input, &mut r)?, input)?;
            let (c, d) = b.biregular_degrees().filter(|&(c, _)| c >= 2).ok_or_else(|| CliError::Usage("vertex-expansion needs a biregular graph with left degree >= 2".into()))?;
            let l2 = spectral::biregular_lambda2(&b)?;
            let gamma = expansion::gamma_from_lambda2(c, d, l2);
            let k = expansion::DensityConstants::default();
            let mut rng = RngStream::new(seed, 0).rng();
            let (mut asserted, mut worst) = (0usize, None::<Value>);
            for i in 0..*trials {
                let (s1, _) = expansion::random_local_pair(&b, 1 + i % (*max_size).max(1), &mut rng);
                let rep = expansion::vertex_expansion_corollary_check(&b, &s1, *eps, gamma, k)?;
                if rep.in_regime {
                    asserted += 1;
                    if !rep.ok && worst.is_none() {
                        worst = Some(json!({ "set": s1, "report": to_value(&rep) }));
                    }
                }
            }
            let status = if worst.is_some() {
                Status::Fail
            } else if asserted == 0 {
                Status::Flagged
            } else {
                Status::Pass
            };
            r.push("vertex_expansion", status, json!({ "gamma": gamma, "asserted": asserted, "violation": worst }));
            Ok(r)
        }
        CheckKind::LowDegree { input, gamma } => {
            let mut r = Report::new("check low-degree", seed, json!({ "gamma": gamma }));
            let g = expect_graph(&load(input, &mut r)?, input)?;
            let rep = expansion::low_degree_mass_check(&g, *gamma);
            let status = match rep.ok {
                Some(ok) => Status::from_bool(ok),
                None => Status::NotApplicable,
            };
            r.push("low_degree_mass", status, to_value(&rep));
            Ok(r)
        }
        CheckKind::Subgraph { input, set, eps, c_eps } => {
            let mut r = Report::new("check subgraph", seed, json!({ "set": set, "eps": eps, "c_eps": c_eps }));
            let b = expect_bipartite(&load(input, &mut r)?, input)?;
            let s = VertexSet::whole(set.clone(), b.n())?;
            let l2 = spectral::biregular_lambda2(&b)?;
            let rep = spectral::verify_subgraph_theorem(&b, &s, l2, *eps, *c_eps)?;
            r.push("subgraph_rho", rep.status, to_value(&rep));
            Ok(r)
        }
        CheckKind::AvgDegree { input } => {
            let mut r = Report::new("check avg-degree", seed, Value::Null);
            let b = expect_bipartite(&load(input, &mut r)?, input)?;
            let rep = spectral::avg_degree_bound_check(&b)?;
            r.push("avg_degree_bound", rep.status, to_value(&rep));
            Ok(r)
        }
    }
}

fn cmd_cycles(a: &CyclesArgs, seed: u64) -> Result<Report> {
    let all = !a.moore && !a.bicycle && !a.lossless;
    let mode = match a.mode {
        LosslessArg::Cycle => LosslessMode::Cycle,
        LosslessArg::Bicycle => LosslessMode::Bicycle,
    };
    let params = json!({
        "moore": a.moore || all, "bicycle": a.bicycle || all, "lossless": a.lossless,
        "eps": a.eps, "mode": mode, "budget": a.budget,
    });
    let mut r = Report::new("cycles", seed, params);
    let file = load(&a.input, &mut r)?;
    let g = file.as_graph();
    let mut results = json!({
        "girth": cycles::girth(&g),
        "excess": cycles::excess(&g),
        "shortest_cycle": cycles::shortest_cycle(&g),
    });
    if a.bicycle || all {
        results["shortest_bicycle"] = to_value(&cycles::shortest_bicycle(&g, None));
    }
    if a.moore || all {
        results["moore"] = match cycles::verify_moore_bound(&g) {
            Ok(m) => {
                r.push("moore_bound", m.status, json!({ "rho": m.rho, "cycle_bound": m.cycle_bound, "bicycle_bound": m.bicycle_bound }));
                to_value(&m)
            }
            Err(cycles::CyclesError::TheoremViolation { which, bound, rho }) => {
                r.push("moore_bound", Status::Fail, json!({ "missing": which, "bound": bound, "rho": rho }));
                Value::Null
            }
            Err(e) => return Err(e.into()),
        };
    }
    if a.lossless {
        let b = expect_bipartite(&file, &a.input)?;
        let eps = a.eps.expect("required by clap");
        let rep = cycles::small_set_lossless_check(&b, eps, mode, a.budget)?;
        let status = if rep.vacuous { Status::NotApplicable } else { rep.status };
        r.table = rep
            .min_neighborhood
            .iter()
            .zip(&rep.required)
            .enumerate()
            .map(|(i, (nb, req))| {
                let mut m = Map::new();
                m.insert("size".into(), json!(i + 1));
                m.insert("min_neighborhood".into(), json!(nb));
                m.insert("required".into(), json!(req));
                m
            })
            .collect();
        r.push("small_set_lossless", status, to_value(&rep));
    }
    r.results = results;
    Ok(r)
}

fn cmd_pipeline(a: &PipelineArgs, seed: u64) -> Result<Report> {
    let construction = match a.construction {
        ConstructionArg::Main => Construction::Main,
        ConstructionArg::Tripartite => Construction::Tripartite,
        ConstructionArg::Lossless => Construction::Lossless,
    };
    let name = match construction {
        Construction::Main => "pipeline main",
        Construction::Tripartite => "pipeline tripartite",
        Construction::Lossless => "pipeline lossless",
    };
    let o = Overrides { tau: a.tau, theta: a.theta, k1: a.k1, k2: a.k2, c_theta: a.c_theta, delta: a.delta, gadget_scale: a.gadget_scale };
    let eps = a.eps.or((construction != Construction::Main).then_some(0.5));
    let params = match a.mode {
        ModeArg::Faithful => match construction {
            Construction::Main => pipelines::params_thm_main(a.beta, a.d1, a.d2),
            Construction::Tripartite => pipelines::params_thm_tripartite(a.beta, eps.unwrap_or(0.5), a.d1, a.d2, a.c_theta),
            Construction::Lossless => pipelines::params_lossless(a.beta, eps.unwrap_or(0.5), a.d1, a.d2),
        },
        ModeArg::Desk => pipelines::params_desk(construction, a.beta, eps, a.d1, a.d2, o),
    };
    let mut r = Report::new(name, seed, json!({ "beta": a.beta, "eps": eps, "d1": a.d1, "d2": a.d2, "overrides": to_value(&o) }));
    let params = match params {
        Ok(p) => p,
        Err(pipelines::PipelineError::Constraints(errs)) => {
            r.push("constraints", Status::Fail, json!({ "violations": errs }));
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    r.results = json!({ "params": to_value(&params) });
    if params.mode == Mode::Faithful {
        r.push("constraints", Status::Pass, json!({ "violations": [] }));
        return Ok(r);
    }
    let mut opts = DeskOptions::defaults(construction, seed);
    if let Some(b) = a.base_size {
        opts.base_size = b;
    }
    if let Some(t) = a.t_max {
        opts.t_max = t;
    }
    match pipelines::run_desk(&params, &opts) {
        Ok(out) => {
            let file = GraphFile::Bipartite(out.graph);
            write_output(a.graph.as_deref(), &file, &mut r)?;
            r.checks.extend(out.report.checks);
            r.results = json!({ "params": to_value(&params), "options": to_value(&opts), "graph": graph_summary(&file) });
        }
        Err(pipelines::PipelineError::Gate { gate, report }) => {
            r.checks.extend(report.checks);
            r.results = json!({ "params": to_value(&params), "options": to_value(&opts), "aborted_at": gate });
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn run(cli: &Cli, seed: u64) -> Result<Report> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, seed),
        Command::Gadget(a) => cmd_gadget(a, seed),
        Command::Cayley(a) => cmd_cayley(a, seed),
        Command::Product(a) => cmd_product(a, seed),
        Command::Spectral(a) => cmd_spectral(a, seed),
        Command::Profile(a) => cmd_profile(a, seed),
        Command::Check(a) => cmd_check(a, seed),
        Command::Cycles(a) => cmd_cycles(a, seed),
        Command::Pipeline(a) => cmd_pipeline(a, seed),
    }
}

/// Seed from `FORGE_SEED` when set, else `--seed`.
pub fn effective_seed(cli_seed: u64) -> Result<u64> {
    match std::env::var("FORGE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("FORGE_SEED = `{s}` is not an integer"))),
        Err(_) => Ok(cli_seed),
    }
}

/// Parses `argv` (including the program name), runs the command and writes the report.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command; returns the exit code for a completed run.
pub fn execute(cli: &Cli) -> Result<i32> {
    let seed = effective_seed(cli.seed)?;
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let mut report = pool.install(|| run(cli, seed))?;
    report.timing = json!({ "wall_ms": start.elapsed().as_secs_f64() * 1e3, "threads": threads });
    let text = match &cli.csv {
        Some(cols) => emit_csv(&report, cols)?,
        None => {
            report.report_digest = report.digest();
            serde_json::to_string_pretty(&report).expect("serializable") + "\n"
        }
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(e.to_string()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(if report.status() == Status::Fail { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(pairs: &[(&str, Value)]) -> Map<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn empty_report_gives_header_only() {
        let r = Report::new("profile", 1, Value::Null);
        let cols = vec!["t".to_string(), "min_ratio".to_string()];
        assert_eq!(emit_csv(&r, &cols).unwrap(), "t,min_ratio\n");
    }

    #[test]
    fn missing_column_is_an_error() {
        let mut r = Report::new("profile", 1, Value::Null);
        r.table.push(row(&[("t", json!(1))]));
        assert!(matches!(emit_csv(&r, &["x".to_string()]), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = Report::new("profile", 1, Value::Null);
        r.table.push(row(&[("t", json!(1)), ("min_ratio", json!(2.5)), ("witness", json!([0, 3]))]));
        r.table.push(row(&[("t", json!(2)), ("min_ratio", json!(0.5)), ("witness", json!("a,\"b\""))]));
        let cols: Vec<String> = ["t", "min_ratio", "witness"].iter().map(|s| s.to_string()).collect();
        let text = emit_csv(&r, &cols).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let recs: Vec<Vec<String>> = rd.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
        assert_eq!(recs, vec![vec!["1", "2.5", "0 3"], vec!["2", "0.5", "a,\"b\""]]);
    }

    #[test]
    fn digest_ignores_timing() {
        let mut a = Report::new("x", 1, Value::Null);
        let d = a.digest();
        a.timing = json!({ "wall_ms": 12.0 });
        assert_eq!(a.digest(), d);
    }
}
