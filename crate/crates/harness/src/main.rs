use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};

use wittquant::quantization::WeylAlgebra;
use wittquant_harness::config::{ConfigPatch, Mutation, ScenarioConfig};
use wittquant_harness::report::{Format, ScenarioReport};
use wittquant_harness::suite::{self, Profile};
use wittquant_harness::{eval, registry, scenarios};

#[derive(Parser)]
#[command(name = "wittquant", version, about = "Seeded checks of the Witt-vector center map of the Weyl algebra over Z/p^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run(RunArgs),
    /// Run every scenario of a profile.
    Suite {
        #[arg(long, value_enum, default_value = "quick")]
        profile: Profile,
        #[arg(long, value_enum)]
        mutation: Option<Mutation>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
    /// Evaluate an element expression in A_n, or in Z_1 with --z1.
    Eval {
        expr: String,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Evaluate in the center ring Z_1 = F_p[u, v], where {f, g} is the bracket.
        #[arg(long)]
        z1: bool,
    },
    /// Re-run the witnesses of a JSON report.
    Replay { report: PathBuf },
    /// List the scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    scenario: String,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    cap: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Monomial ideal generator in Z_1; repeatable.
    #[arg(long)]
    ideal: Vec<String>,
    #[arg(long)]
    witt_length: Option<usize>,
    #[arg(long, value_enum)]
    mutation: Option<Mutation>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl RunArgs {
    fn config(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::for_scenario(&self.scenario)?;
        if let Some(path) = &self.config {
            let file = ConfigPatch::load(path)?;
            cfg.apply(&file)?;
        }
        cfg.apply(&ConfigPatch {
            scenario: None,
            p: self.p,
            n: self.n,
            r: self.r,
            degree: self.degree,
            cap: self.cap,
            seed: self.seed,
            samples: self.samples,
            ideal: (!self.ideal.is_empty()).then(|| self.ideal.clone()),
            witt_length: self.witt_length,
            mutation: self.mutation,
        })?;
        Ok(cfg)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(true)` when every expected polarity is met.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let report = scenarios::run_scenario(&cfg)?;
            emit(&report.render(args.format), args.out.as_ref())?;
            Ok(report.verdict == registry::lookup(&cfg.scenario)?.expected)
        }
        Command::Suite {
            profile,
            mutation,
            out,
            format,
        } => {
            let report = suite::run_suite(profile, mutation)?;
            emit(&report.render(format), out.as_ref())?;
            Ok(report.passed)
        }
        Command::Eval { expr, p, n, r, z1 } => {
            let alg = WeylAlgebra::new(p, n, r)?;
            if z1 {
                println!("{}", eval::eval_center(&alg.center_ring(), &expr)?);
            } else {
                println!("{}", eval::eval_weyl(&alg, &expr)?);
            }
            Ok(true)
        }
        Command::Replay { report } => {
            let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let report = ScenarioReport::from_json(&text)?;
            let mut all = true;
            for r in scenarios::replay(&report)? {
                println!("{}: {}", r.check, if r.reproduced() { "reproduced" } else { "not reproduced" });
                all &= r.reproduced();
            }
            Ok(all)
        }
        Command::List => {
            for e in registry::REGISTRY {
                println!("{:<28} expect {:<5} {}", e.name, e.expected.to_string(), e.statement);
            }
            Ok(true)
        }
    }
}
