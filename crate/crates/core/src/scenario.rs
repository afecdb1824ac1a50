//! Day loop, replications and cross-replication statistics.
//!
//! Each simulated day the optimizer gets `gd` generations against the
//! current society, the best cure found is committed and applied to the
//! real society, and the outbreak advances one day.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{EpidemicParams, Society, SocietyConfig};
use crate::optimizer::{
    step_generation, BeliefSpace, EvalContext, OptimizerConfig, PopulationState,
};
use crate::rng::{replication_seed, RunStreams};
use crate::treatment::{apply_cure, CureOutcome, TreatmentPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Genetic,
    Cultural,
    /// No cure at all; the untreated baseline.
    None,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Genetic => "ga",
            Algorithm::Cultural => "ca",
            Algorithm::None => "none",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ga" | "genetic" => Ok(Algorithm::Genetic),
            "ca" | "cultural" => Ok(Algorithm::Cultural),
            "none" | "baseline" => Ok(Algorithm::None),
            other => Err(format!("unknown algorithm `{other}` (expected ga, ca or none)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub epidemic: EpidemicParams,
    pub society: SocietyConfig,
    pub treatments: TreatmentPlan,
    pub optimizer: OptimizerConfig,
    pub algorithm: Algorithm,
    /// Generations the optimizer may run per simulated day.
    pub gd: u32,
    /// Simulated days.
    pub horizon: u32,
    pub replications: u32,
    pub base_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            epidemic: EpidemicParams::default(),
            society: SocietyConfig::default(),
            treatments: TreatmentPlan::default(),
            optimizer: OptimizerConfig::default(),
            algorithm: Algorithm::Cultural,
            gd: 1,
            horizon: 200,
            replications: 10,
            base_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.epidemic.validate()?;
        self.society.validate()?;
        self.treatments.validate()?;
        self.optimizer.validate()?;
        for (name, v) in [
            ("gd", self.gd),
            ("horizon", self.horizon),
            ("replications", self.replications),
        ] {
            if v < 1 {
                return Err(Error::InvalidCount {
                    name,
                    reason: "must be at least 1".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayRecord {
    pub day: u32,
    /// Mean infection rate at the end of the day.
    pub mir: f64,
    pub humans: usize,
    pub zombies: usize,
    /// Cure applied today; `None` on the baseline.
    pub committed_doses: Option<Vec<f64>>,
    /// Recorded fitness of the committed cure; `None` on the baseline.
    pub best_fitness: Option<f64>,
    pub applied_counts: Vec<u32>,
    pub effective_counts: Vec<u32>,
}

/// Last day (0-based) that ended with at least one human.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LastHumanDay {
    Day(u32),
    /// Humans were still alive at the end of the horizon.
    Censored,
    /// No day ended with a human.
    NoHumans,
}

impl LastHumanDay {
    pub fn from_records(days: &[DayRecord]) -> Self {
        match days.last() {
            Some(last) if last.humans > 0 => LastHumanDay::Censored,
            _ => days
                .iter()
                .rev()
                .find(|d| d.humans > 0)
                .map_or(LastHumanDay::NoHumans, |d| LastHumanDay::Day(d.day)),
        }
    }

    /// Numeric value for averaging: censored runs count as `horizon`,
    /// runs without humans as 0.
    pub fn value(self, horizon: u32) -> f64 {
        match self {
            LastHumanDay::Day(d) => d as f64,
            LastHumanDay::Censored => horizon as f64,
            LastHumanDay::NoHumans => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub replication: u32,
    pub seed: u64,
    pub days: Vec<DayRecord>,
    pub last_human_day: LastHumanDay,
    pub lowest_mir: f64,
}

impl RunResult {
    pub fn horizon(&self) -> u32 {
        self.days.len() as u32
    }

    pub fn mirs(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.mir).collect()
    }

    pub fn mean_mir(&self) -> f64 {
        sorted_mean(&mut self.mirs())
    }

    pub fn first_neighborhood_day(&self) -> Option<u32> {
        first_neighborhood_day(&self.mirs())
    }
}

/// Width of the relative band around the final value.
pub const NEIGHBORHOOD: f64 = 0.05;
/// Trailing days averaged into the final value.
pub const FINAL_WINDOW: usize = 5;

/// First day whose MIR lies within 5 % (relative) of the run's final value,
/// the final value being the mean of the last five days.
pub fn first_neighborhood_day(mirs: &[f64]) -> Option<u32> {
    if mirs.is_empty() {
        return None;
    }
    let tail = &mirs[mirs.len().saturating_sub(FINAL_WINDOW)..];
    let fin = tail.iter().sum::<f64>() / tail.len() as f64;
    mirs.iter()
        .position(|&m| (m - fin).abs() <= NEIGHBORHOOD * fin)
        .map(|d| d as u32)
}

/// State of a single replication while it runs.
pub struct Run<'a> {
    config: &'a ScenarioConfig,
    society: Society,
    population: Option<PopulationState>,
    belief: Option<BeliefSpace>,
    streams: RunStreams,
    day: u32,
    stale: bool,
}

impl<'a> Run<'a> {
    pub fn new(config: &'a ScenarioConfig, replication: u32) -> Result<Self> {
        config.validate()?;
        let seed = replication_seed(config.base_seed, replication as u64);
        let mut streams = RunStreams::new(seed);
        let society = Society::random(&config.society, &mut streams.society_init)?;
        let (population, belief) = match config.algorithm {
            Algorithm::None => (None, None),
            algorithm => {
                let ctx = EvalContext {
                    society: &society,
                    params: &config.epidemic,
                    plan: &config.treatments,
                };
                let pop = PopulationState::random(
                    &config.optimizer,
                    &ctx,
                    &streams.evaluation,
                    &mut streams.optimizer,
                )?;
                let belief = (algorithm == Algorithm::Cultural)
                    .then(|| BeliefSpace::new(pop.best().clone()));
                (Some(pop), belief)
            }
        };
        Ok(Self {
            config,
            society,
            population,
            belief,
            streams,
            day: 0,
            stale: false,
        })
    }

    pub fn seed(&self) -> u64 {
        self.streams.seed
    }

    pub fn society(&self) -> &Society {
        &self.society
    }

    pub fn population(&self) -> Option<&PopulationState> {
        self.population.as_ref()
    }

    pub fn belief(&self) -> Option<&BeliefSpace> {
        self.belief.as_ref()
    }

    /// Simulates one day and reports its end state.
    pub fn run_day(&mut self) -> Result<DayRecord> {
        self.run_day_observed(|_| {})
    }

    /// [`Run::run_day`] with a hook called after every generation.
    pub fn run_day_observed<F>(&mut self, mut after_generation: F) -> Result<DayRecord>
    where
        F: FnMut(&Run<'_>),
    {
        let cfg = self.config;
        let mut committed = None;
        let mut outcome = CureOutcome::zeros(cfg.treatments.count);

        if self.population.is_some() {
            for g in 0..cfg.gd {
                if let Some(pop) = self.population.as_mut() {
                    let ctx = EvalContext {
                        society: &self.society,
                        params: &cfg.epidemic,
                        plan: &cfg.treatments,
                    };
                    if g == 0 && self.stale {
                        pop.reevaluate(self.belief.as_mut(), &ctx, &self.streams.evaluation);
                    }
                    step_generation(
                        pop,
                        self.belief.as_mut(),
                        &ctx,
                        &cfg.optimizer,
                        &self.streams.evaluation,
                        &mut self.streams.optimizer,
                    )?;
                }
                after_generation(self);
            }
        }
        if let Some(pop) = &self.population {
            let best = pop.best_ever.clone();
            outcome = apply_cure(
                &mut self.society,
                &best.chromosome.to_cure(),
                &cfg.treatments,
                &mut self.streams.cure,
            )?;
            committed = Some(best);
        }

        self.society.advance_day(&cfg.epidemic, &mut self.streams.epidemic);
        self.stale = true;

        let census = self.society.census();
        let record = DayRecord {
            day: self.day,
            mir: self.society.mean_infection_rate(),
            humans: census.humans,
            zombies: census.zombies,
            best_fitness: committed.as_ref().map(|c| c.fitness),
            committed_doses: committed.map(|c| c.chromosome.genes().to_vec()),
            applied_counts: outcome.applied,
            effective_counts: outcome.effective,
        };
        self.day += 1;
        Ok(record)
    }
}

/// Runs replication `replication` of `config` for the full horizon.
pub fn run_scenario(config: &ScenarioConfig, replication: u32) -> Result<RunResult> {
    let mut run = Run::new(config, replication)?;
    let days = (0..config.horizon)
        .map(|_| run.run_day())
        .collect::<Result<Vec<_>>>()?;
    let lowest_mir = days.iter().map(|d| d.mir).fold(f64::INFINITY, f64::min);
    Ok(RunResult {
        replication,
        seed: run.seed(),
        last_human_day: LastHumanDay::from_records(&days),
        lowest_mir,
        days,
    })
}

/// Runs every replication of `config`, in parallel on `jobs` threads
/// (all cores when `None`). Results come back in replication order.
pub fn run_replications(config: &ScenarioConfig, jobs: Option<usize>) -> Result<Vec<RunResult>> {
    config.validate()?;
    let work = || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| run_scenario(config, r))
            .collect::<Result<Vec<_>>>()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub replications: usize,
    pub horizon: u32,
    pub mir_mean_by_day: Vec<f64>,
    pub mir_sd_by_day: Vec<f64>,
    pub lowest_mir_mean: f64,
    pub lowest_mir_sd: f64,
    pub last_human_day_mean: f64,
    pub last_human_day_sd: f64,
    /// Mean over days of the cross-replication standard deviation of MIR.
    pub stability: f64,
    /// Runs that never enter the band count as `horizon`.
    pub first_neighborhood_day: f64,
    /// Time-averaged MIR of each run, summarised across runs.
    pub mean_mir_mean: f64,
    pub mean_mir_sd: f64,
}

// Sorting before summing makes every statistic independent of input order.
fn sorted_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    match (values.first(), values.last()) {
        (Some(a), Some(b)) if a == b => return *a,
        _ => {}
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample mean and standard deviation (denominator `n - 1`).
fn mean_sd(values: &mut [f64]) -> (f64, f64) {
    let mean = sorted_mean(values);
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    let var = sq.iter().sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

pub fn aggregate(results: &[RunResult]) -> Result<AggregateResult> {
    if results.len() < 2 {
        return Err(Error::InsufficientReplications {
            required: 2,
            found: results.len(),
        });
    }
    let horizon = results[0].horizon();
    if let Some(r) = results.iter().find(|r| r.horizon() != horizon) {
        return Err(Error::LengthMismatch {
            expected: horizon as usize,
            found: r.days.len(),
        });
    }

    let (mut mir_mean_by_day, mut mir_sd_by_day) = (Vec::new(), Vec::new());
    for day in 0..horizon as usize {
        let mut v: Vec<f64> = results.iter().map(|r| r.days[day].mir).collect();
        let (m, s) = mean_sd(&mut v);
        mir_mean_by_day.push(m);
        mir_sd_by_day.push(s);
    }
    let stability = sorted_mean(&mut mir_sd_by_day.clone());

    let collect = |f: &dyn Fn(&RunResult) -> f64| results.iter().map(f).collect::<Vec<f64>>();
    let (lowest_mir_mean, lowest_mir_sd) = mean_sd(&mut collect(&|r| r.lowest_mir));
    let (last_human_day_mean, last_human_day_sd) =
        mean_sd(&mut collect(&|r| r.last_human_day.value(horizon)));
    let (mean_mir_mean, mean_mir_sd) = mean_sd(&mut collect(&|r| r.mean_mir()));
    let first_neighborhood_day = sorted_mean(&mut collect(&|r| {
        r.first_neighborhood_day().unwrap_or(horizon) as f64
    }));

    Ok(AggregateResult {
        replications: results.len(),
        horizon,
        mir_mean_by_day,
        mir_sd_by_day,
        lowest_mir_mean,
        lowest_mir_sd,
        last_human_day_mean,
        last_human_day_sd,
        stability,
        first_neighborhood_day,
        mean_mir_mean,
        mean_mir_sd,
    })
}
