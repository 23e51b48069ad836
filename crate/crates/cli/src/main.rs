use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use mgopt::energy::{audit_optimality, solve_energy, OptimalityAudit};
use mgopt::graph::{validate, MetricGraph};
use mgopt::optimizer::{optimize, Functional, OptimizeError, ProblemSpec, SearchOptions};
use mgopt::report::{oracle_check, to_json, to_svg, Report};
use mgopt::spectral::lambda1;
use mgopt::topology::enumerate_topologies;

/// Finds the metric tree of given total length through a set of pinned
/// points that minimizes the torsion energy or the first Dirichlet eigenvalue.
#[derive(Debug, Parser)]
#[command(name = "mgopt", version)]
struct Cli {
    /// Problem file (JSON).
    problem: Option<PathBuf>,

    /// Override the functional named in the problem file.
    #[arg(long, value_enum)]
    functional: Option<FunctionalArg>,

    /// Override the total length.
    #[arg(long, value_name = "L")]
    length: Option<f64>,

    /// Compare with finite elements at N elements per edge.
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "128")]
    oracle_check: Option<usize>,

    /// Write a drawing of the optimum.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Write the full-precision JSON report.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print the candidate topologies for K pins and exit.
    #[arg(long, value_name = "K")]
    list_topologies: Option<usize>,

    /// Number of seeded starts per topology.
    #[arg(long, value_name = "N", default_value_t = 16)]
    seeds: u64,

    /// Search a single topology given by its code.
    #[arg(long, value_name = "CODE")]
    topology: Option<String>,

    /// Evaluate a graph file instead of optimizing.
    #[arg(long, value_name = "PATH", conflicts_with = "problem")]
    graph: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FunctionalArg {
    Energy,
    Lambda1,
}

impl From<FunctionalArg> for Functional {
    fn from(f: FunctionalArg) -> Self {
        match f {
            FunctionalArg::Energy => Functional::Energy,
            FunctionalArg::Lambda1 => Functional::Lambda1,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn list_topologies(k: usize, out: Option<&Path>) -> Result<()> {
    let all = enumerate_topologies(k)?;
    for t in &all {
        println!("{}\t{} vertices\t{} edges", t.code(), t.vertex_count(), t.edge_count());
    }
    if let Some(path) = out {
        write(path, &to_json(&all)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GraphSummary {
    energy: f64,
    lambda1: Option<f64>,
    audit: OptimalityAudit,
}

fn evaluate_graph(path: &Path, out: Option<&Path>) -> Result<()> {
    let g = MetricGraph::from_json(&read(path)?).with_context(|| format!("malformed graph file {}", path.display()))?;
    let diagnostics = validate(&g);
    if !diagnostics.is_ok() {
        bail!("invalid graph: {diagnostics:?}");
    }
    let sol = solve_energy(&g)?;
    let summary = GraphSummary {
        energy: sol.energy,
        lambda1: lambda1(&g).ok().map(|s| s.lambda1),
        audit: audit_optimality(&g, &sol),
    };
    println!("energy          {:.11e}", summary.energy);
    match summary.lambda1 {
        Some(l) => println!("lambda1         {l:.11e}"),
        None => println!("lambda1         unavailable"),
    }
    println!("optimality      {}", if summary.audit.all_pass() { "pass" } else { "fail" });
    if let Some(path) = out {
        write(path, &to_json(&summary)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(k) = cli.list_topologies {
        return list_topologies(k, cli.out.as_deref());
    }
    if let Some(path) = &cli.graph {
        return evaluate_graph(path, cli.out.as_deref());
    }
    let Some(path) = &cli.problem else {
        bail!("a problem file is required (see --help)");
    };
    let mut spec =
        ProblemSpec::from_json(&read(path)?).with_context(|| format!("malformed problem file {}", path.display()))?;
    if let Some(f) = cli.functional {
        spec.functional = f.into();
    }
    if let Some(l) = cli.length {
        spec.total_length = l;
    }
    let options = SearchOptions {
        seeds: cli.seeds,
        topology: cli.topology.clone(),
        ..SearchOptions::default()
    };

    let start = Instant::now();
    let optimum = optimize(&spec, &options)?;
    let oracle = cli.oracle_check.map(|n| oracle_check(&optimum, n)).transpose()?;
    let report = Report {
        spec,
        optimum,
        oracle,
        seconds: Some(start.elapsed().as_secs_f64()),
    };

    print!("{}", report.to_text());
    if let Some(path) = &cli.out {
        write(path, &report.to_json()?)?;
    }
    if let Some(path) = &cli.svg {
        write(path, &to_svg(&report.optimum))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e.downcast_ref::<OptimizeError>().is_some_and(OptimizeError::is_infeasible);
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
