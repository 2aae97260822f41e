//! Command-line runner: single scenarios, parameter sweeps, coalition
//! experiments, and closed-form analytic queries.
//!
//! Exit codes: 0 on success, 2 for invalid flags, grids, or out-of-domain
//! parameters, 1 for runtime failures such as unwritable output paths.

mod chart;
mod grid;
mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use countchain::analysis::{
    decision_probability, expected_attack_curve, expected_utilities, sybil_majority_probability,
    SybilSetting,
};
use countchain::csv::sweep_to_csv;
use countchain::sim::{run_sweep, run_sybil_experiment, SweepRow};

use crate::chart::{compact, line_chart, Series};
use crate::settings::ScenarioArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid flags, grids, or parameters: exit code 2.
    #[error("{0}")]
    Domain(String),
    /// Failure after validation, such as an unwritable path: exit code 1.
    #[error("{0}")]
    Runtime(String),
}

fn domain(err: impl std::fmt::Display) -> CliError {
    CliError::Domain(err.to_string())
}

#[derive(Parser)]
#[command(
    name = "countchain",
    version,
    about = "Counting-oracle protocol: simulate scenarios, sweep parameter grids, and query closed forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and emit its metrics row as CSV
    Simulate(SimulateArgs),
    /// Run an honesty x verifiers x nodes scenario grid
    Sweep(SweepArgs),
    /// Run a coalition experiment across corrupted-population fractions
    Sybil(SybilArgs),
    /// Closed-form analytic queries
    #[command(subcommand)]
    Analyze(Analyze),
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Write the CSV to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Honesty grid: start:stop:step, a comma list, or one value
    #[arg(long = "honesty-grid", default_value = "0:1:0.05")]
    honesty_grid: String,
    /// Committee-size grid
    #[arg(long = "verifier-grid", default_value = "1:20:1")]
    verifier_grid: String,
    /// Node-count grid [default: the resolved --nodes value]
    #[arg(long = "node-grid")]
    node_grid: Option<String>,
    /// Write the CSV to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit decided_true line charts (SVG) into this directory
    #[arg(long, value_name = "DIR")]
    chart: Option<PathBuf>,
    /// Cap on parallel grid workers
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SybilArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Corrupted-fraction grid
    #[arg(long = "corrupted-grid", default_value = "0:1:0.05")]
    corrupted_grid: String,
    /// Uncorrupted-node honesty rates, one curve each
    #[arg(long, default_value = "1.0,0.85")]
    unhr: String,
    /// Write the CSV to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit decided_true line charts (SVG) into this directory
    #[arg(long, value_name = "DIR")]
    chart: Option<PathBuf>,
    /// Cap on parallel grid workers
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Analyze {
    /// Expected utilities of the three verifier strategies
    Utilities {
        /// Fraction of propositions that are true
        #[arg(long)]
        pt: f64,
        /// Cost of one proof search, in points
        #[arg(long)]
        c: f64,
        /// Emit CSV with a header row
        #[arg(long)]
        csv: bool,
    },
    /// Exact probability that a coalition captures a committee majority
    SybilProb {
        /// Population size
        #[arg(long = "N")]
        total: u32,
        /// Coalition size
        #[arg(long = "D")]
        dishonest: u32,
        /// Committee size
        #[arg(long = "n")]
        verifiers: u32,
        /// Capturing seat count [default: floor(n/2) + 1]
        #[arg(long = "k")]
        majority: Option<u32>,
        /// Emit CSV with a header row
        #[arg(long)]
        csv: bool,
    },
    /// Exact probability that a true proposition is decided True
    DecisionProb {
        /// Committee size
        #[arg(long)]
        n: u32,
        /// Per-verifier honesty probability
        #[arg(long)]
        h: f64,
        /// Emit CSV with a header row
        #[arg(long)]
        csv: bool,
    },
    /// Expected True-decision rate across corrupted-population fractions
    AttackCurve {
        /// Population size
        #[arg(long = "N")]
        total: u32,
        /// Committee size
        #[arg(long = "n")]
        verifiers: u32,
        /// Uncorrupted-node honesty rate
        #[arg(long)]
        unhr: f64,
        /// Corrupted-fraction grid
        #[arg(long, default_value = "0:1:0.05")]
        grid: String,
        /// Emit CSV with a header row
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CliError::Domain(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Sybil(args) => cmd_sybil(args),
        Command::Analyze(query) => cmd_analyze(query),
    }
}

fn emit(csv: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, csv).map_err(|e| {
            CliError::Runtime(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn set_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(jobs) = jobs else { return Ok(()) };
    if jobs == 0 {
        return Err(CliError::Domain("jobs must be at least 1".into()));
    }
    // A second initialization in the same process is harmless.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let spec = settings::resolve(&args.scenario)?;
    let started = Instant::now();
    let rows = run_sweep(
        &spec,
        &[spec.honesty_rate],
        &[spec.config.num_verifiers],
        &[spec.config.total_nodes],
    )
    .map_err(domain)?;
    emit(&sweep_to_csv(&rows), args.out.as_deref())?;
    let m = &rows[0].metrics;
    eprintln!(
        "seed {}: raised {} of {} events, decided {} True / {} False, counter {}, \
         mean hash evals per seat {:.2}, simulated span {}, wall {:.3}s",
        rows[0].seed,
        m.propositions_raised,
        spec.num_events,
        m.decided_true,
        m.decided_false,
        m.counter,
        m.mean_hash_evals_per_verifier,
        m.sim_span,
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let spec = settings::resolve(&args.scenario)?;
    set_jobs(args.jobs)?;
    let honesty = grid::parse_f64(&args.honesty_grid).map_err(CliError::Domain)?;
    let verifiers = grid::parse_u32(&args.verifier_grid).map_err(CliError::Domain)?;
    let nodes = match &args.node_grid {
        Some(text) => grid::parse_u32(text).map_err(CliError::Domain)?,
        None => vec![spec.config.total_nodes],
    };
    let started = Instant::now();
    let rows = run_sweep(&spec, &honesty, &verifiers, &nodes).map_err(domain)?;
    emit(&sweep_to_csv(&rows), args.out.as_deref())?;
    if let Some(dir) = &args.chart {
        let files = sweep_charts(dir, &rows, &honesty, &verifiers, &nodes)?;
        eprintln!("wrote {files} chart(s) to {}", dir.display());
    }
    eprintln!("{} rows in {:.3}s", rows.len(), started.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_sybil(args: SybilArgs) -> Result<(), CliError> {
    let spec = settings::resolve(&args.scenario)?;
    set_jobs(args.jobs)?;
    let fractions = grid::parse_f64(&args.corrupted_grid).map_err(CliError::Domain)?;
    let rates = grid::parse_f64(&args.unhr).map_err(CliError::Domain)?;
    let started = Instant::now();
    let rows = run_sybil_experiment(&spec, &fractions, &rates).map_err(domain)?;
    emit(&sweep_to_csv(&rows), args.out.as_deref())?;
    if let Some(dir) = &args.chart {
        let files = sybil_charts(dir, &rows, &rates)?;
        eprintln!("wrote {files} chart(s) to {}", dir.display());
    }
    eprintln!("{} rows in {:.3}s", rows.len(), started.elapsed().as_secs_f64());
    Ok(())
}

fn write_chart(dir: &Path, name: &str, svg: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, svg)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

/// One chart per fixed-parameter slice; the x axis is the first grid with
/// more than one value (honesty, then verifiers, then nodes).
fn sweep_charts(
    dir: &Path,
    rows: &[SweepRow],
    honesty: &[f64],
    verifiers: &[u32],
    nodes: &[u32],
) -> Result<usize, CliError> {
    ensure_dir(dir)?;
    let mut written = 0;
    if honesty.len() > 1 {
        for &v in verifiers {
            for &total in nodes {
                let points = rows
                    .iter()
                    .filter(|r| r.num_verifiers == v && r.total_nodes == total)
                    .map(|r| (r.honesty_rate, f64::from(r.metrics.decided_true)))
                    .collect();
                let title = format!("decided_true vs honesty (n={v}, N={total})");
                let svg = line_chart(&title, "honesty", "decided_true", &[Series {
                    label: format!("n={v}, N={total}"),
                    points,
                }]);
                write_chart(dir, &format!("decided_true_vs_honesty_n{v}_N{total}.svg"), &svg)?;
                written += 1;
            }
        }
    } else if verifiers.len() > 1 {
        for &h in honesty {
            for &total in nodes {
                let points = rows
                    .iter()
                    .filter(|r| r.honesty_rate == h && r.total_nodes == total)
                    .map(|r| (f64::from(r.num_verifiers), f64::from(r.metrics.decided_true)))
                    .collect();
                let title = format!("decided_true vs verifiers (h={}, N={total})", compact(h));
                let svg = line_chart(&title, "verifiers", "decided_true", &[Series {
                    label: format!("h={}, N={total}", compact(h)),
                    points,
                }]);
                write_chart(
                    dir,
                    &format!("decided_true_vs_verifiers_h{}_N{total}.svg", compact(h)),
                    &svg,
                )?;
                written += 1;
            }
        }
    } else {
        for &h in honesty {
            for &v in verifiers {
                let points = rows
                    .iter()
                    .filter(|r| r.honesty_rate == h && r.num_verifiers == v)
                    .map(|r| (f64::from(r.total_nodes), f64::from(r.metrics.decided_true)))
                    .collect();
                let title = format!("decided_true vs nodes (h={}, n={v})", compact(h));
                let svg = line_chart(&title, "nodes", "decided_true", &[Series {
                    label: format!("h={}, n={v}", compact(h)),
                    points,
                }]);
                write_chart(
                    dir,
                    &format!("decided_true_vs_nodes_h{}_n{v}.svg", compact(h)),
                    &svg,
                )?;
                written += 1;
            }
        }
    }
    Ok(written)
}

fn sybil_charts(dir: &Path, rows: &[SweepRow], rates: &[f64]) -> Result<usize, CliError> {
    ensure_dir(dir)?;
    let mut written = 0;
    for &unhr in rates {
        let points = rows
            .iter()
            .filter(|r| r.honesty_rate == unhr)
            .map(|r| (r.corrupted_fraction, f64::from(r.metrics.decided_true)))
            .collect();
        let title = format!("decided_true vs corrupted fraction (unhr={})", compact(unhr));
        let svg = line_chart(&title, "corrupted fraction", "decided_true", &[Series {
            label: format!("unhr={}", compact(unhr)),
            points,
        }]);
        write_chart(
            dir,
            &format!("decided_true_vs_corrupted_unhr{}.svg", compact(unhr)),
            &svg,
        )?;
        written += 1;
    }
    Ok(written)
}

fn cmd_analyze(query: Analyze) -> Result<(), CliError> {
    match query {
        Analyze::Utilities { pt, c, csv } => {
            let u = expected_utilities(pt, c).map_err(domain)?;
            if csv {
                println!("p_t,c,u_no_search,u_search_false,u_search_true");
                println!(
                    "{pt:.6},{c:.6},{:.6},{:.6},{:.6}",
                    u.u_no_search, u.u_search_false, u.u_search_true
                );
            } else {
                println!(
                    "{:.6} {:.6} {:.6}",
                    u.u_no_search, u.u_search_false, u.u_search_true
                );
            }
        }
        Analyze::SybilProb {
            total,
            dishonest,
            verifiers,
            majority,
            csv,
        } => {
            let mut setting = SybilSetting::new(total, dishonest, verifiers).map_err(domain)?;
            if let Some(k) = majority {
                setting = setting.with_majority_threshold(k);
            }
            let p = sybil_majority_probability(&setting);
            if csv {
                println!("total_nodes,dishonest_nodes,num_verifiers,majority_threshold,probability");
                println!(
                    "{},{},{},{},{p:.6}",
                    setting.total_nodes,
                    setting.dishonest_nodes,
                    setting.num_verifiers,
                    setting.majority_threshold
                );
            } else {
                println!("{p:.6}");
            }
        }
        Analyze::DecisionProb { n, h, csv } => {
            if n == 0 {
                return Err(CliError::Domain("need at least one verifier".into()));
            }
            if !(0.0..=1.0).contains(&h) {
                return Err(CliError::Domain(format!("h must lie in [0, 1], got {h}")));
            }
            let p = decision_probability(n, h);
            if csv {
                println!("num_verifiers,honesty_rate,decision_probability");
                println!("{n},{h:.6},{p:.6}");
            } else {
                println!("{p:.6}");
            }
        }
        Analyze::AttackCurve {
            total,
            verifiers,
            unhr,
            grid: grid_text,
            csv,
        } => {
            let fractions = grid::parse_f64(&grid_text).map_err(CliError::Domain)?;
            let curve = expected_attack_curve(total, verifiers, unhr, &fractions).map_err(domain)?;
            if csv {
                println!("corrupted_fraction,expected_true_rate");
                for (f, rate) in curve {
                    println!("{f:.6},{rate:.6}");
                }
            } else {
                for (f, rate) in curve {
                    println!("{f:.6} {rate:.6}");
                }
            }
        }
    }
    Ok(())
}
