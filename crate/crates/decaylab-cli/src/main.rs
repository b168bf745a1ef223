//! Command-line front end: list the built-in scenario catalog, run one
//! scenario (by id or from a TOML config file), or verify the whole
//! catalog including its contrast pairs.
//!
//! Exit codes: 0 all verdicts as expected, 1 a run failed or an
//! operational error occurred, 2 usage error.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use decaylab::scenarios::{
    builtin_catalog, builtin_pairs, filter_catalog, run_scenario, verify_all, EmitOptions,
    ScenarioConfig, ScenarioReport,
};

#[derive(Parser)]
#[command(
    name = "decaylab",
    version,
    about = "Numerical experiments on decay and boundedness of waves, heat flows and plates with potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios and contrast pairs
    List,
    /// Run one scenario by catalog id or from a TOML config file
    Run {
        /// Catalog id (see `list`) or path to a scenario config
        target: String,
        /// Directory for CSV / report JSON / SVG artifacts
        #[arg(long, env = "DECAYLAB_OUT")]
        out: Option<PathBuf>,
        /// Also render the SVG chart
        #[arg(long)]
        svg: bool,
        /// Override the config's sampling cadence (in steps)
        #[arg(long)]
        sample_every: Option<NonZeroUsize>,
    },
    /// Run the catalog (optionally glob-filtered) and the contrast pairs
    Verify {
        /// Glob over scenario ids, e.g. 'S1*' or '*heat*'
        #[arg(long)]
        filter: Option<String>,
        /// Directory for per-scenario artifacts and the summary JSON
        #[arg(long, env = "DECAYLAB_OUT")]
        out: Option<PathBuf>,
        /// Also render SVG charts
        #[arg(long)]
        svg: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::List => list(),
        Command::Run { target, out, svg, sample_every } => {
            run(&target, out.as_deref(), svg, sample_every)
        }
        Command::Verify { filter, out, svg } => verify(filter.as_deref(), out.as_deref(), svg),
    };
    match outcome {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn list() -> decaylab::Result<bool> {
    for cfg in builtin_catalog() {
        println!(
            "{:<34} {:<12} expect {:<20} {}",
            cfg.id,
            cfg.kind.as_str(),
            cfg.expected.to_string(),
            cfg.title
        );
    }
    println!();
    for pair in builtin_pairs() {
        println!(
            "pair: {} vs {} on {} (margin {})",
            pair.baseline, pair.with_potential, pair.column, pair.margin
        );
    }
    Ok(true)
}

fn load_target(target: &str) -> decaylab::Result<ScenarioConfig> {
    let path = Path::new(target);
    if path.is_file() {
        return ScenarioConfig::from_toml(&std::fs::read_to_string(path)?);
    }
    builtin_catalog()
        .into_iter()
        .find(|c| c.id == target)
        .ok_or_else(|| decaylab::Error::UnknownScenario(target.to_string()))
}

fn verdict_line(report: &ScenarioReport) -> String {
    format!(
        "{:<34} {:<20} (expected {}) {:>6.2}s",
        report.id,
        report.outcome.to_string(),
        report.expected,
        report.wall_clock_s
    )
}

fn run(
    target: &str,
    out: Option<&Path>,
    svg: bool,
    sample_every: Option<NonZeroUsize>,
) -> decaylab::Result<bool> {
    let mut cfg = load_target(target)?;
    if let Some(k) = sample_every {
        cfg.sample_every = k.get();
    }
    let emit = EmitOptions { out_dir: out.map(Path::to_path_buf), svg };
    let report = run_scenario(&cfg, &emit)?;
    println!("{}", verdict_line(&report));
    for c in &report.checks {
        println!(
            "  {:<28} {:<6} {}",
            c.name,
            match c.status {
                decaylab::functionals::CheckStatus::Pass => "pass",
                decaylab::functionals::CheckStatus::Fail => "FAIL",
                decaylab::functionals::CheckStatus::NotApplicable => "n/a",
            },
            c.detail
        );
    }
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    // reports record bare file names; show where they actually landed
    if let Some(dir) = out {
        for p in [&report.csv_path, &report.svg_path].into_iter().flatten() {
            println!("  wrote {}", dir.join(p).display());
        }
    }
    Ok(report.as_expected)
}

fn verify(filter: Option<&str>, out: Option<&Path>, svg: bool) -> decaylab::Result<bool> {
    // resolve the filter before running anything so a typo dies fast
    filter_catalog(filter)?;
    let emit = EmitOptions { out_dir: out.map(Path::to_path_buf), svg };
    let summary = verify_all(filter, &emit)?;
    for report in &summary.reports {
        let marker = if report.as_expected { "ok  " } else { "FAIL" };
        println!("{marker} {}", verdict_line(report));
    }
    for pair in &summary.pairs {
        let marker = if pair.status == decaylab::functionals::CheckStatus::Pass {
            "ok  "
        } else {
            "FAIL"
        };
        println!("{marker} pair {} vs {}: {}", pair.baseline, pair.with_potential, pair.detail);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(&summary)
            .map_err(|e| decaylab::Error::Config(format!("cannot serialize summary: {e}")))?;
        text.push('\n');
        std::fs::write(dir.join("verify.json"), text)?;
    }
    let n_ok = summary.reports.iter().filter(|r| r.as_expected).count();
    println!(
        "{}/{} scenarios as expected, {}/{} pairs separated",
        n_ok,
        summary.reports.len(),
        summary
            .pairs
            .iter()
            .filter(|p| p.status == decaylab::functionals::CheckStatus::Pass)
            .count(),
        summary.pairs.len()
    );
    Ok(summary.all_ok)
}
