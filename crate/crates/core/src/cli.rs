//! `cvirus` command line.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::io::{emit_manifest, emit_runs_csv, emit_summary, parse_config, ScenarioKey, Settings};
use crate::scenario::{aggregate, run_replications, Algorithm, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cvirus", version, about = "Continuous-infection outbreak simulator with evolutionary cure search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario.
    Run(Flags),
    /// Run the full factorial over virulences x gd x algorithms plus baselines.
    Sweep(Flags),
    /// Run the untreated baseline (same as `run --algorithm none`).
    Baseline(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Flat key=value file; keys are these flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    virulence: Option<String>,
    /// Generations per simulated day.
    #[arg(long)]
    gd: Option<String>,
    /// ga | ca | none
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    days: Option<String>,
    #[arg(long)]
    replications: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Worker threads for replications.
    #[arg(long)]
    jobs: Option<String>,
    /// Level gained per transmitting contact.
    #[arg(long)]
    increment: Option<String>,
    /// Contacts per zombie per day.
    #[arg(long)]
    contacts: Option<String>,
    /// Level reduction of an effective treatment.
    #[arg(long)]
    effect: Option<String>,
    /// Half-width of each treatment window.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    treatments: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long = "society-size")]
    society_size: Option<String>,
    #[arg(long = "zombie-fraction")]
    zombie_fraction: Option<String>,
    /// lo,hi
    #[arg(long = "human-range")]
    human_range: Option<String>,
    /// lo,hi
    #[arg(long = "zombie-range")]
    zombie_range: Option<String>,
    #[arg(long = "pop-size")]
    pop_size: Option<String>,
    #[arg(long)]
    tournament: Option<String>,
    /// Per-gene mutation probability.
    #[arg(long)]
    mutation: Option<String>,
    /// Let the belief space parent offspring in cultural mode.
    #[arg(long)]
    influence: Option<String>,
    /// Sweep only: comma-separated virulences.
    #[arg(long)]
    virulences: Option<String>,
    /// Sweep only: comma-separated gd values.
    #[arg(long)]
    gds: Option<String>,
    /// Sweep only: comma-separated algorithms.
    #[arg(long)]
    algorithms: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("virulence", &self.virulence),
            ("gd", &self.gd),
            ("algorithm", &self.algorithm),
            ("days", &self.days),
            ("replications", &self.replications),
            ("seed", &self.seed),
            ("out", &self.out),
            ("jobs", &self.jobs),
            ("increment", &self.increment),
            ("contacts", &self.contacts),
            ("effect", &self.effect),
            ("window", &self.window),
            ("treatments", &self.treatments),
            ("threshold", &self.threshold),
            ("society-size", &self.society_size),
            ("zombie-fraction", &self.zombie_fraction),
            ("human-range", &self.human_range),
            ("zombie-range", &self.zombie_range),
            ("pop-size", &self.pop_size),
            ("tournament", &self.tournament),
            ("mutation", &self.mutation),
            ("influence", &self.influence),
            ("virulences", &self.virulences),
            ("gds", &self.gds),
            ("algorithms", &self.algorithms),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

/// Scenarios of a sweep: for each virulence the baseline first, then every
/// gd x algorithm combination.
pub fn sweep_scenarios(settings: &Settings) -> Vec<ScenarioConfig> {
    let mut out = Vec::new();
    for &v in &settings.sweep.virulences {
        let mut base = settings.scenario.clone();
        base.epidemic.virulence = v;
        out.push(ScenarioConfig {
            algorithm: Algorithm::None,
            ..base.clone()
        });
        for &gd in &settings.sweep.gds {
            for &algorithm in &settings.sweep.algorithms {
                if algorithm == Algorithm::None {
                    continue;
                }
                out.push(ScenarioConfig {
                    algorithm,
                    gd,
                    ..base.clone()
                });
            }
        }
    }
    out
}

fn execute(settings: &Settings, scenarios: &[ScenarioConfig]) -> Result<()> {
    fs::create_dir_all(&settings.out)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for cfg in scenarios {
        let key = ScenarioKey::of(cfg);
        eprintln!("running {} ({} replications)", key.tag(), cfg.replications);
        let results = run_replications(cfg, settings.jobs)?;
        let name = format!("runs_{}.csv", key.tag());
        emit_runs_csv(&results, &settings.out.join(&name))?;
        files.push(name);
        if results.len() >= 2 {
            rows.push((key, aggregate(&results)?));
        }
    }
    if !rows.is_empty() {
        emit_summary(&rows, &settings.out.join("summary.csv"))?;
        files.push("summary.csv".into());
    } else {
        eprintln!("fewer than two replications: no summary written");
    }
    let manifest = emit_manifest(&settings.out, settings, &files)?;
    eprintln!("wrote {}", manifest.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let (flags, mode) = match &cli.command {
        Command::Run(f) => (f, "run"),
        Command::Sweep(f) => (f, "sweep"),
        Command::Baseline(f) => (f, "baseline"),
    };
    let mut settings = parse_config(flags.config.as_deref(), &flags.overrides())?;
    let scenarios = match mode {
        "sweep" => sweep_scenarios(&settings),
        "baseline" => {
            settings.scenario.algorithm = Algorithm::None;
            vec![settings.scenario.clone()]
        }
        _ => vec![settings.scenario.clone()],
    };
    execute(&settings, &scenarios)
}

/// Entry point; returns the process exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) if e.is_config() => {
            eprintln!("config error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
