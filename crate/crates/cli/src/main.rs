use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ogw_core::bc_volume::{bc_volume_with, BcGraph, VolumeBackend};
use ogw_core::fixed_point::{component_contribution, enumerate_fp_graphs, graph_contribution};
use ogw_core::genus0::{enumerate_trees, ogw_genus0, ogw_genus0_traced, tree_amplitude};
use ogw_core::higher_genus::{enumerate_morphisms, ogw, ogw_compact_traced, EvalPath};
use ogw_core::psi_hodge::hodge_descendent_integral;
use ogw_core::spec_core::LabelSet;
use ogw_core::suites::{run_suite, Grid, SUITES};
use ogw_core::{DescendentProblem, Error, ModuliSpec, Sign, SpecComponent};

#[derive(Parser)]
#[command(name = "ogw", version, about = "Exact open Gromov-Witten invariants of (CP^1, RP^1)")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an invariant.
    Ogw {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Include the per-tree or per-morphism breakdown.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = PathArg::Compact)]
        path: PathArg,
    },
    /// List fixed-point graphs of each component of a specification.
    Graphs {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// List decorated trees of a disk target.
    Trees {
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        #[arg(long)]
        degree: String,
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// List morphism classes onto a connected specification.
    Morphisms {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Volume of a BC graph.
    Volume {
        #[arg(long)]
        bc: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Lasserre)]
        backend: BackendArg,
    },
    /// Intersection number of psi classes, optionally with one lambda class.
    Psi {
        g: u32,
        /// Comma-separated exponents.
        #[arg(value_delimiter = ',')]
        b: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        lambda: u32,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        max_d: u32,
        #[arg(long, default_value_t = 3)]
        max_labels: usize,
        #[arg(long)]
        max_a: Option<u32>,
    },
}

#[derive(Args)]
struct Target {
    /// Specification JSON file.
    #[arg(long, conflicts_with_all = ["labels", "degree"])]
    spec: Option<PathBuf>,
    /// Labels of a genus-0 disk target.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// Degree `d+,d-` of a genus-0 disk target.
    #[arg(long)]
    degree: Option<String>,
}

#[derive(Args)]
struct ProblemArgs {
    /// Exponents `label=a,...`.
    #[arg(long)]
    a: Option<String>,
    /// Constraints `label=+|-,...`.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Compact,
    Graphsum,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Lasserre,
    Triangulation,
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Input(msg.into()))
}

fn read(path: &Path, field: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{field}: cannot read {}: {e}", path.display())))
}

fn parse_degree(s: &str) -> CliResult<(u32, u32)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [p, m] => match (p.parse(), m.parse()) {
            (Ok(p), Ok(m)) => Ok((p, m)),
            _ => input(format!("degree: expected two non-negative integers, got {s:?}")),
        },
        _ => input(format!("degree: expected `d+,d-`, got {s:?}")),
    }
}

fn labels_of(v: &[String]) -> CliResult<LabelSet> {
    let mut out = LabelSet::new();
    for l in v.iter().map(|l| l.trim()).filter(|l| !l.is_empty()) {
        if !out.insert(l.to_string()) {
            return input(format!("labels: duplicate label {l:?}"));
        }
    }
    Ok(out)
}

fn key_values(s: &str, field: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let Some((k, v)) = item.split_once('=') else {
            return input(format!("{field}: expected `label=value`, got {item:?}"));
        };
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return input(format!("{field}: label {:?} given twice", k.trim()));
        }
    }
    Ok(out)
}

fn problem(args: &ProblemArgs, labels: &LabelSet) -> CliResult<DescendentProblem> {
    let a_raw = key_values(args.a.as_deref().unwrap_or(""), "a")?;
    let e_raw = key_values(args.eps.as_deref().unwrap_or(""), "eps")?;
    for (field, keys) in [("a", a_raw.keys()), ("eps", e_raw.keys())] {
        for k in keys {
            if !labels.contains(k) {
                return input(format!("{field}: label {k:?} is not a label of the target"));
            }
        }
    }
    let mut a = BTreeMap::new();
    let mut eps = BTreeMap::new();
    for l in labels {
        let Some(v) = a_raw.get(l) else { return input(format!("a: no exponent for label {l:?}")) };
        let v: i64 =
            v.parse().map_err(|_| Failure::Input(format!("a: exponent {v:?} of label {l:?} is not an integer")))?;
        let Some(e) = e_raw.get(l) else { return input(format!("eps: no constraint for label {l:?}")) };
        let e = Sign::parse(e).map_err(|err| Failure::Input(format!("eps: label {l:?}: {err}")))?;
        a.insert(l.clone(), v);
        eps.insert(l.clone(), e);
    }
    Ok(DescendentProblem::new(a, eps))
}

fn has_problem(args: &ProblemArgs) -> bool {
    args.a.is_some() || args.eps.is_some()
}

fn load_spec(path: &Path) -> CliResult<ModuliSpec> {
    Ok(ModuliSpec::from_json(&read(path, "spec")?)?)
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn emit_pretty(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_ogw(target: &Target, args: &ProblemArgs, trace: bool, path: PathArg) -> CliResult<()> {
    let path = match path {
        PathArg::Compact => EvalPath::Compact,
        PathArg::Graphsum => EvalPath::GraphSum,
    };
    if let Some(file) = &target.spec {
        let spec = load_spec(file)?;
        let p = problem(args, &spec.labels())?;
        if !trace {
            emit(&json!(ogw(&spec, &p, path)?));
            return Ok(());
        }
        if spec.components.len() != 1 || !matches!(path, EvalPath::Compact) {
            return input("trace: the breakdown is available for the compact path on connected targets");
        }
        let (v, terms) = ogw_compact_traced(&spec.components[0], &p)?;
        emit(&json!({ "value": v, "morphisms": terms }));
        return Ok(());
    }
    let Some(degree) = &target.degree else { return input("degree: required unless --spec is given") };
    let d = parse_degree(degree)?;
    let labels = labels_of(&target.labels)?;
    SpecComponent::disk(labels.clone(), d).validate()?;
    let p = problem(args, &labels)?;
    if !trace {
        emit(&json!(ogw_genus0(&labels, d, &p)?));
        return Ok(());
    }
    let (v, terms, exceptional) = ogw_genus0_traced(&labels, d, &p)?;
    let terms: Vec<Value> = terms
        .into_iter()
        .filter(|t| !t.amplitude.is_zero())
        .map(|t| json!({ "tree": t.tree, "aut": t.aut, "amplitude": t.amplitude }))
        .collect();
    emit(&json!({ "value": v, "exceptional": exceptional, "trees": terms }));
    Ok(())
}

fn cmd_graphs(spec: &Path, args: &ProblemArgs) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let p = if has_problem(args) { Some(problem(args, &spec.labels())?) } else { None };
    let mut comps = Vec::new();
    for c in &spec.components {
        let q = p.as_ref().map(|p| p.restrict(&c.labels));
        let mut graphs = Vec::new();
        for (g, aut) in enumerate_fp_graphs(c).iter() {
            let mut entry = json!({ "graph": g, "aut": aut, "covering_order": g.covering_order() });
            if let Some(q) = &q {
                entry["contribution"] = json!(graph_contribution(g, q)?);
            }
            graphs.push(entry);
        }
        let mut entry = json!({ "component": c, "graphs": graphs });
        if let Some(q) = &q {
            entry["contribution"] = json!(component_contribution(c, q)?);
        }
        comps.push(entry);
    }
    emit_pretty(&json!(comps));
    Ok(())
}

fn cmd_trees(labels: &[String], degree: &str, args: &ProblemArgs) -> CliResult<()> {
    let d = parse_degree(degree)?;
    let labels = labels_of(labels)?;
    SpecComponent::disk(labels.clone(), d).validate()?;
    let p = if has_problem(args) { Some(problem(args, &labels)?) } else { None };
    let mut out = Vec::new();
    for (t, aut) in enumerate_trees(&labels, d).iter() {
        let mut entry = json!({ "tree": t, "aut": aut });
        if let Some(p) = &p {
            entry["amplitude"] = json!(tree_amplitude(t, p)?);
        }
        out.push(entry);
    }
    emit_pretty(&json!(out));
    Ok(())
}

fn cmd_morphisms(spec: &Path) -> CliResult<()> {
    let spec = load_spec(spec)?;
    let classes = enumerate_morphisms(&spec)?;
    let out: Vec<Value> = classes
        .iter()
        .map(|c| {
            json!({
                "morphism": c.morphism,
                "aut": c.aut,
                "wavy_edges": c.morphism.wavy.wavy_count(),
                "contracted_boundaries": c.morphism.cb_count(),
            })
        })
        .collect();
    emit_pretty(&json!(out));
    Ok(())
}

fn cmd_volume(bc: &Path, backend: BackendArg) -> CliResult<()> {
    let g = BcGraph::from_json(&read(bc, "bc")?)?;
    let backend = match backend {
        BackendArg::Lasserre => VolumeBackend::Lasserre,
        BackendArg::Triangulation => VolumeBackend::Triangulation,
    };
    let order: Vec<usize> = (0..g.vertex_count()).collect();
    emit(&json!(bc_volume_with(&g, &order, backend)?.to_string()));
    Ok(())
}

fn cmd_verify(suite: &str, grid: Grid) -> CliResult<()> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    for name in names {
        let out = run_suite(name, grid)?;
        let v = json!({ "suite": out.suite, "checked": out.checked, "passed": out.passed(), "counterexample": out.counterexample });
        emit(&v);
        if !out.passed() {
            return Err(Failure::Verification);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return input("jobs: must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(format!("jobs: {e}")))?;
    }
    match &cli.cmd {
        Cmd::Ogw { target, problem, trace, path } => cmd_ogw(target, problem, *trace, *path),
        Cmd::Graphs { spec, problem } => cmd_graphs(spec, problem),
        Cmd::Trees { labels, degree, problem } => cmd_trees(labels, degree, problem),
        Cmd::Morphisms { spec } => cmd_morphisms(spec),
        Cmd::Volume { bc, backend } => cmd_volume(bc, *backend),
        Cmd::Psi { g, b, lambda } => {
            emit(&json!(hodge_descendent_integral(*g, b, *lambda)?.to_string()));
            Ok(())
        }
        Cmd::Verify { suite, max_d, max_labels, max_a } => {
            cmd_verify(suite, Grid { max_d: *max_d, max_labels: *max_labels, max_a: *max_a })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
