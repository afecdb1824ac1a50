//! Genetic and cultural search over cures.
//!
//! A chromosome is a cure: one gene per treatment, each in the open
//! interval `(0, 1)`. Fitness is the mean infection rate after applying the
//! chromosome to a copy of the current society and advancing that copy one
//! day; lower is better, and every evaluation is a single stochastic sample.
//!
//! Both algorithms share everything except parent choice. In cultural mode
//! a belief space remembers the best chromosome seen in the run and replaces
//! either the mother or the father of every child with it.
//!
//! Tournaments sample contestants with replacement.

use rand::distributions::Open01;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{EpidemicParams, Society};
use crate::rng::EvalStreams;
use crate::treatment::{apply_cure, Cure, TreatmentPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome(Vec<f64>);

impl Chromosome {
    /// Wraps `genes`; each must lie strictly inside `(0, 1)`.
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if let Some(bad) = genes.iter().find(|&&g| !(g > 0.0 && g < 1.0)) {
            return Err(Error::InvalidParameter {
                name: "gene",
                reason: format!("{bad} is outside (0, 1)"),
            });
        }
        Ok(Self(genes))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.sample(Open01)).collect())
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_cure(&self) -> Cure {
        Cure::new(self.0.clone()).expect("genes lie in (0, 1)")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedChromosome {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    /// Per-gene replacement probability.
    pub mutation_probability: f64,
    /// Cultural mode only: when false the belief space is still maintained
    /// but never injected as a parent.
    pub belief_influence: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            tournament_size: 5,
            mutation_probability: 0.05,
            belief_influence: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 1 {
            return Err(Error::InvalidCount {
                name: "population_size",
                reason: "must be at least 1".into(),
            });
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return Err(Error::InvalidCount {
                name: "tournament_size",
                reason: format!("must lie in 1..={}", self.population_size),
            });
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::InvalidParameter {
                name: "mutation_probability",
                reason: format!("{} is outside [0, 1]", self.mutation_probability),
            });
        }
        Ok(())
    }
}

/// What a fitness evaluation looks at: the real society as of now.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub society: &'a Society,
    pub params: &'a EpidemicParams,
    pub plan: &'a TreatmentPlan,
}

/// One-day lookahead mean infection rate of `chromosome`.
///
/// Works on a copy; `ctx.society` is never touched.
pub fn evaluate_fitness<R: Rng + ?Sized>(
    chromosome: &Chromosome,
    ctx: &EvalContext<'_>,
    rng: &mut R,
) -> f64 {
    let mut copy = ctx.society.clone();
    apply_cure(&mut copy, &chromosome.to_cure(), ctx.plan, rng)
        .expect("chromosome length matches the treatment plan");
    copy.advance_day(ctx.params, rng);
    copy.mean_infection_rate()
}

/// Index of the minimum-fitness member; ties go to the lowest index.
pub fn argmin(members: &[EvaluatedChromosome]) -> usize {
    let mut best = 0;
    for (i, m) in members.iter().enumerate().skip(1) {
        if m.fitness < members[best].fitness {
            best = i;
        }
    }
    best
}

/// Runs one tournament of `size` contestants drawn uniformly with
/// replacement and returns the winner's index.
pub fn tournament_select<R: Rng + ?Sized>(
    members: &[EvaluatedChromosome],
    size: usize,
    rng: &mut R,
) -> usize {
    let mut winner = rng.gen_range(0..members.len());
    for _ in 1..size {
        let i = rng.gen_range(0..members.len());
        let (f, w) = (members[i].fitness, members[winner].fitness);
        if f < w || (f == w && i < winner) {
            winner = i;
        }
    }
    winner
}

/// Child whose genes are the pairwise means of the parents' genes.
pub fn crossover(a: &Chromosome, b: &Chromosome) -> Result<Chromosome> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(Chromosome(
        a.0.iter().zip(&b.0).map(|(x, y)| (x + y) / 2.0).collect(),
    ))
}

/// Replaces each gene independently with probability `p` by a fresh
/// uniform draw from `(0, 1)`.
pub fn mutate<R: Rng + ?Sized>(mut c: Chromosome, p: f64, rng: &mut R) -> Chromosome {
    for g in &mut c.0 {
        if rng.gen::<f64>() < p {
            *g = rng.sample(Open01);
        }
    }
    c
}

/// Cultural memory: the best chromosome recorded so far in the run.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSpace {
    pub champion: EvaluatedChromosome,
}

impl BeliefSpace {
    pub fn new(champion: EvaluatedChromosome) -> Self {
        Self { champion }
    }

    /// Adopts `candidate` if it is strictly fitter. Returns whether it did.
    pub fn observe(&mut self, candidate: &EvaluatedChromosome) -> bool {
        if candidate.fitness < self.champion.fitness {
            self.champion = candidate.clone();
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    pub members: Vec<EvaluatedChromosome>,
    pub generation: u64,
    /// Best fitness recorded since the population was last evaluated
    /// against a new day's society.
    pub best_ever: EvaluatedChromosome,
    /// Evaluation batches issued so far; addresses evaluation sub-streams.
    batches: u64,
}

impl PopulationState {
    /// Uniformly random population, evaluated against `ctx`.
    pub fn random<R: Rng + ?Sized>(
        config: &OptimizerConfig,
        ctx: &EvalContext<'_>,
        streams: &EvalStreams,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        let chromosomes: Vec<Chromosome> = (0..config.population_size)
            .map(|_| Chromosome::random(ctx.plan.count, rng))
            .collect();
        let members = evaluate_batch(chromosomes, ctx, streams, 0);
        let best_ever = members[argmin(&members)].clone();
        Ok(Self {
            members,
            generation: 0,
            best_ever,
            batches: 1,
        })
    }

    /// Re-scores every member, the elite included, against `ctx` and
    /// restarts the best-ever record from the fresh scores.
    ///
    /// A belief champion is re-scored in the same batch and then challenged
    /// by the population's best, so that stored fitness values only ever
    /// compare against the same society.
    pub fn reevaluate(
        &mut self,
        belief: Option<&mut BeliefSpace>,
        ctx: &EvalContext<'_>,
        streams: &EvalStreams,
    ) {
        let batch = self.batches;
        self.batches += 1;
        let chromosomes = self.members.drain(..).map(|m| m.chromosome).collect();
        self.members = evaluate_batch(chromosomes, ctx, streams, batch);
        self.best_ever = self.members[argmin(&self.members)].clone();
        if let Some(b) = belief {
            let index = self.members.len() as u64;
            b.champion.fitness =
                evaluate_fitness(&b.champion.chromosome, ctx, &mut streams.rng(batch, index));
            b.observe(&self.best_ever);
        }
    }

    pub fn best(&self) -> &EvaluatedChromosome {
        &self.members[argmin(&self.members)]
    }
}

fn evaluate_batch(
    chromosomes: Vec<Chromosome>,
    ctx: &EvalContext<'_>,
    streams: &EvalStreams,
    batch: u64,
) -> Vec<EvaluatedChromosome> {
    chromosomes
        .into_iter()
        .enumerate()
        .map(|(i, chromosome)| {
            let fitness = evaluate_fitness(&chromosome, ctx, &mut streams.rng(batch, i as u64));
            EvaluatedChromosome {
                chromosome,
                fitness,
            }
        })
        .collect()
}

/// Advances the population by one generation.
///
/// Passing `belief` selects cultural mode.
pub fn step_generation<R: Rng + ?Sized>(
    state: &mut PopulationState,
    belief: Option<&mut BeliefSpace>,
    ctx: &EvalContext<'_>,
    config: &OptimizerConfig,
    streams: &EvalStreams,
    rng: &mut R,
) -> Result<()> {
    step_generation_traced(state, belief, ctx, config, streams, rng, |_, _| {})
}

/// [`step_generation`] with a hook that sees each (mother, father) pair
/// right before crossover.
pub fn step_generation_traced<R, F>(
    state: &mut PopulationState,
    belief: Option<&mut BeliefSpace>,
    ctx: &EvalContext<'_>,
    config: &OptimizerConfig,
    streams: &EvalStreams,
    rng: &mut R,
    mut on_mating: F,
) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(&Chromosome, &Chromosome),
{
    let size = config.population_size;
    if state.members.len() != size || size == 0 {
        return Err(Error::UnevaluatedPopulation {
            expected: size,
            found: state.members.len(),
        });
    }

    let elite = state.members[argmin(&state.members)].clone();
    let pool: Vec<usize> = (0..size)
        .map(|_| tournament_select(&state.members, config.tournament_size, rng))
        .collect();

    let mut children = Vec::with_capacity(size - 1);
    for _ in 1..size {
        let mut mother = &state.members[pool[rng.gen_range(0..size)]].chromosome;
        let mut father = &state.members[pool[rng.gen_range(0..size)]].chromosome;
        if let Some(b) = belief.as_deref() {
            if config.belief_influence {
                if rng.gen::<bool>() {
                    mother = &b.champion.chromosome;
                } else {
                    father = &b.champion.chromosome;
                }
            }
        }
        on_mating(mother, father);
        let child = crossover(mother, father)?;
        children.push(mutate(child, config.mutation_probability, rng));
    }

    let children = evaluate_batch(children, ctx, streams, state.batches);
    state.batches += 1;

    let mut next = Vec::with_capacity(size);
    next.push(elite);
    next.extend(children);
    state.members = next;
    state.generation += 1;

    let best = &state.members[argmin(&state.members)];
    if best.fitness < state.best_ever.fitness {
        state.best_ever = best.clone();
    }
    if let Some(b) = belief {
        b.observe(best);
    }
    Ok(())
}
