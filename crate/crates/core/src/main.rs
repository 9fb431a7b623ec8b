use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sirlab::harness::{ensemble_summary, run_scenario, RunManifest, Scenario};
use sirlab::spatial::{continuum_lambda1, first_eigenpair};
use sirlab::Result;

#[derive(Parser)]
#[command(name = "sirlab", version, about = "SIR reaction-diffusion with random diffusion and transmission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a built-in scenario name) over its seed ensemble.
    Run {
        scenario: PathBuf,
        /// Output directory; nothing is written without it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the ensemble size.
        #[arg(long)]
        seeds: Option<usize>,
        /// Dotted `key=value` assignment applied before validation; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the principal Dirichlet eigenvalue of the scenario grid.
    Eig { scenario: PathBuf },
    /// Re-print verdicts and check outcomes from one or more manifests.
    Report {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
    },
}

fn print_manifest(m: &RunManifest) {
    println!(
        "scenario {} ({}), λ₁ʰ = {:.10}, continuum {:.10}",
        m.scenario.name, m.scenario_hash, m.lambda1_discrete, m.lambda1_continuum
    );
    for s in &m.seeds {
        let verdict = s.threshold.as_ref().map_or("-".to_string(), |t| {
            format!("{} (m = {:.6}, bounds {:.6} / {:.6})", t.verdict, t.m_estimate, t.eradication_bound, t.persistence_bound)
        });
        println!("  seed {:>3} [{}] {}", s.index, s.noise_seed, verdict);
        if let Some(e) = &s.error {
            println!("    ERROR {e}");
        }
        for c in &s.checks {
            let status = match (c.informational, c.passed) {
                (true, _) => "INFO",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let value = c.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
            let threshold = c.threshold.map_or("".to_string(), |v| format!(" vs {v:.3e}"));
            println!("    {status} {:<24} {value}{threshold}  {}", c.name, c.detail);
        }
    }
    println!("{}", if m.passed { "all checks passed" } else { "some checks failed" });
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            seeds,
            mut overrides,
        } => {
            if let Some(n) = seeds {
                overrides.push(format!("ensemble.seeds={n}"));
            }
            let sc = Scenario::load(&scenario, &overrides)?;
            let manifest = run_scenario(&sc, out.as_deref())?;
            print_manifest(&manifest);
            Ok(manifest.passed)
        }
        Command::Eig { scenario } => {
            let sc = Scenario::load(&scenario, &[])?;
            let grid = sc.build_grid()?;
            let pair = first_eigenpair(&grid)?;
            println!("lambda1_h = {:.15e}", pair.lambda1);
            println!("lambda0_h = {:.15e}", sc.noise.a0 * pair.lambda1);
            println!("lambda1_continuum = {:.15e}", continuum_lambda1(&grid));
            Ok(true)
        }
        Command::Report { manifests } => {
            let mut loaded = Vec::new();
            for p in &manifests {
                let text = std::fs::read_to_string(p).map_err(|e| sirlab::Error::Io {
                    path: p.display().to_string(),
                    source: e,
                })?;
                loaded.push(RunManifest::from_json_str(&text)?);
            }
            for m in &loaded {
                print_manifest(m);
            }
            let summary = ensemble_summary(&loaded)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            Ok(summary.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
