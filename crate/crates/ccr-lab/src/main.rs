//! `ccr-lab` — run verification suites against a model configuration.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 usage/configuration/capacity error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ccr_lab::config::{load_config, RunConfig};
use ccr_lab::suites::{run, Suite};
use ccr_lab::CcrError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    /// Space invariants: involution, hermiticity, positivity.
    Validate,
    /// Gram matrix positivity at the configured truncation.
    Gram,
    /// Baker–Campbell–Hausdorff closure in the truncated algebra.
    Bch,
    /// Canonical commutation relations of the represented fields.
    Ccr,
    /// Weyl operators: unitarity, group law, generator, composition.
    Weyl,
    /// σ-radical versus field radical.
    Radical,
    /// Independent Fock-space construction against the GNS one.
    FockCompare,
    /// Every suite above, in order.
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Validate => Suite::Validate,
            SuiteArg::Gram => Suite::Gram,
            SuiteArg::Bch => Suite::Bch,
            SuiteArg::Ccr => Suite::Ccr,
            SuiteArg::Weyl => Suite::Weyl,
            SuiteArg::Radical => Suite::Radical,
            SuiteArg::FockCompare => Suite::FockCompare,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Verification bench for truncated tensor-algebra field models.
#[derive(Debug, Parser)]
#[command(name = "ccr-lab", version, about)]
struct Cli {
    /// Which suite to run.
    #[arg(value_enum)]
    suite: SuiteArg,
    /// Path to a JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured truncation degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured probe degree for Weyl composition checks.
    #[arg(long)]
    probe: Option<usize>,
    /// Also write a machine-readable JSONL report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn effective_config(cli: &Cli) -> Result<RunConfig, CcrError> {
    let mut cfg = load_config(&cli.config)?;
    if let Some(degree) = cli.degree {
        cfg.truncation = degree;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(probe) = cli.probe {
        cfg.probe_degree = probe;
    }
    cfg.check()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("ccr-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let reports = match run(Suite::from(cli.suite), &cfg) {
        Ok(reports) => reports,
        Err(e) => {
            eprintln!("ccr-lab: {e}");
            return ExitCode::from(2);
        }
    };
    for report in &reports {
        print!("{}", report.human_table());
        println!();
    }
    if let Some(path) = &cli.out {
        let jsonl: String = reports.iter().map(|r| r.jsonl()).collect();
        if let Err(e) = std::fs::write(path, jsonl) {
            eprintln!("ccr-lab: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let failed: usize = reports.iter().map(|r| r.failed()).sum();
    let total: usize = reports.iter().map(|r| r.records.len()).sum();
    if failed == 0 {
        println!("ok: {total} checks passed");
        ExitCode::SUCCESS
    } else {
        println!("FAILED: {failed} of {total} checks");
        ExitCode::from(1)
    }
}
