//! Continuous-infection outbreak simulator with evolutionary cure search.
//!
//! A society of agents carries a continuous infection level; agents above a
//! threshold turn into zombies and infect others. Ten windowed treatments,
//! mixed by dose probability into a cure, push levels back down. A genetic
//! algorithm, optionally extended with a cultural belief space, searches for
//! the cure with the lowest next-day mean infection rate while the outbreak
//! keeps moving.

pub mod cli;
pub mod error;
pub mod io;
pub mod model;
pub mod optimizer;
pub mod rng;
pub mod scenario;
pub mod treatment;

pub use error::{Error, Result};
pub use model::{Census, EpidemicParams, Individual, InfectionLevel, Society, SocietyConfig};
pub use optimizer::{
    crossover, evaluate_fitness, mutate, step_generation, tournament_select, BeliefSpace,
    Chromosome, EvalContext, EvaluatedChromosome, OptimizerConfig, PopulationState,
};
pub use scenario::{
    aggregate, run_replications, run_scenario, AggregateResult, Algorithm, DayRecord,
    LastHumanDay, Run, RunResult, ScenarioConfig,
};
pub use treatment::{apply_cure, treatment_window, Cure, CureOutcome, TreatmentPlan};
