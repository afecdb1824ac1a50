use cvirus::rng::{EvalStreams, SimRng};
use cvirus::scenario::Run;
use cvirus::{
    aggregate, apply_cure, run_replications, run_scenario, step_generation, Algorithm,
    BeliefSpace, Cure, EpidemicParams, EvalContext, OptimizerConfig, PopulationState,
    ScenarioConfig, Society, SocietyConfig, TreatmentPlan,
};
use proptest::prelude::*;
use rand::SeedableRng;

#[derive(Debug, Clone)]
enum Op {
    Advance(EpidemicParams),
    Cure(Vec<f64>, TreatmentPlan),
}

fn params() -> impl Strategy<Value = EpidemicParams> {
    (0.0..=1.0f64, 0u32..4, 0.0..=0.5f64).prop_map(|(virulence, contacts_per_zombie, increment)| {
        EpidemicParams {
            virulence,
            contacts_per_zombie,
            increment,
        }
    })
}

fn plan() -> impl Strategy<Value = TreatmentPlan> {
    (1usize..12, 0.0..=0.5f64, 0.0..=1.0f64).prop_map(|(count, halfwidth, effect)| TreatmentPlan {
        count,
        halfwidth,
        effect,
    })
}

fn cure_op() -> impl Strategy<Value = Op> {
    plan().prop_flat_map(|p| {
        prop::collection::vec(0.0..=1.0f64, p.count).prop_map(move |d| Op::Cure(d, p))
    })
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![params().prop_map(Op::Advance), cure_op()]
}

fn levels() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, 1..25)
}

fn small(algorithm: Algorithm, gd: u32, horizon: u32, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        society: SocietyConfig {
            size: 12,
            ..Default::default()
        },
        optimizer: OptimizerConfig {
            population_size: 8,
            tournament_size: 3,
            ..Default::default()
        },
        treatments: TreatmentPlan {
            effect: 0.05,
            ..Default::default()
        },
        algorithm,
        gd,
        horizon,
        replications: 4,
        base_seed: seed,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn levels_stay_in_unit_interval(
        start in levels(),
        threshold in 0.0..=1.0f64,
        ops in prop::collection::vec(op(), 1..20),
        seed in any::<u64>(),
    ) {
        let mut s = Society::from_levels(&start, threshold).unwrap();
        let mut rng = SimRng::seed_from_u64(seed);
        for op in &ops {
            match op {
                Op::Advance(p) => s.advance_day(p, &mut rng),
                Op::Cure(d, plan) => {
                    apply_cure(&mut s, &Cure::new(d.clone()).unwrap(), plan, &mut rng).unwrap();
                }
            }
            prop_assert!(s.levels().iter().all(|l| (0.0..=1.0).contains(l)));
            let c = s.census();
            prop_assert_eq!(c.humans + c.zombies, start.len());
        }
    }

    #[test]
    fn advance_never_lowers_a_level(
        start in levels(),
        p in params(),
        seed in any::<u64>(),
    ) {
        let mut s = Society::from_levels(&start, 0.75).unwrap();
        s.advance_day(&p, &mut SimRng::seed_from_u64(seed));
        for (after, before) in s.levels().iter().zip(&start) {
            prop_assert!(after >= before);
        }
    }

    #[test]
    fn zero_virulence_is_identity(start in levels(), mut p in params(), seed in any::<u64>()) {
        p.virulence = 0.0;
        let mut s = Society::from_levels(&start, 0.75).unwrap();
        s.advance_day(&p, &mut SimRng::seed_from_u64(seed));
        prop_assert_eq!(s.levels(), start);
    }

    #[test]
    fn cure_never_raises_a_level(start in levels(), op in cure_op(), seed in any::<u64>()) {
        let Op::Cure(doses, plan) = op else { unreachable!() };
        let mut s = Society::from_levels(&start, 0.75).unwrap();
        let out = apply_cure(&mut s, &Cure::new(doses).unwrap(), &plan, &mut SimRng::seed_from_u64(seed))
            .unwrap();
        for (after, before) in s.levels().iter().zip(&start) {
            prop_assert!(after <= before);
        }
        for (e, a) in out.effective.iter().zip(&out.applied) {
            prop_assert!(e <= a && *a as usize <= start.len());
        }
    }

    #[test]
    fn zero_doses_are_identity(start in levels(), p in plan(), seed in any::<u64>()) {
        let mut s = Society::from_levels(&start, 0.75).unwrap();
        let cure = Cure::new(vec![0.0; p.count]).unwrap();
        let out = apply_cure(&mut s, &cure, &p, &mut SimRng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(s.levels(), start);
        prop_assert!(out.applied.iter().all(|&a| a == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generations_keep_size_and_open_genes(
        seed in any::<u64>(),
        size in 2usize..12,
        mutation in 0.0..=1.0f64,
        cultural in any::<bool>(),
    ) {
        let society = Society::random(&SocietyConfig::default(), &mut SimRng::seed_from_u64(seed)).unwrap();
        let params = EpidemicParams::default();
        let plan = TreatmentPlan::default();
        let ctx = EvalContext { society: &society, params: &params, plan: &plan };
        let config = OptimizerConfig {
            population_size: size,
            tournament_size: 2,
            mutation_probability: mutation,
            belief_influence: true,
        };
        let streams = EvalStreams::new(seed);
        let mut rng = SimRng::seed_from_u64(seed ^ 1);
        let mut pop = PopulationState::random(&config, &ctx, &streams, &mut rng).unwrap();
        let mut belief = cultural.then(|| BeliefSpace::new(pop.best().clone()));
        for _ in 0..5 {
            step_generation(&mut pop, belief.as_mut(), &ctx, &config, &streams, &mut rng).unwrap();
            prop_assert_eq!(pop.members.len(), size);
            for m in &pop.members {
                prop_assert_eq!(m.chromosome.len(), plan.count);
                prop_assert!(m.chromosome.genes().iter().all(|&g| g > 0.0 && g < 1.0));
            }
        }
    }

    #[test]
    fn champion_is_recorded_minimum(seed in any::<u64>()) {
        let society = Society::random(&SocietyConfig::default(), &mut SimRng::seed_from_u64(seed)).unwrap();
        let params = EpidemicParams::default();
        let plan = TreatmentPlan::default();
        let ctx = EvalContext { society: &society, params: &params, plan: &plan };
        let config = OptimizerConfig { population_size: 10, ..Default::default() };
        let streams = EvalStreams::new(seed);
        let mut rng = SimRng::seed_from_u64(seed ^ 2);
        let mut pop = PopulationState::random(&config, &ctx, &streams, &mut rng).unwrap();
        let mut belief = BeliefSpace::new(pop.best().clone());
        let mut recorded = pop.members.iter().map(|m| m.fitness).fold(f64::INFINITY, f64::min);
        for _ in 0..10 {
            step_generation(&mut pop, Some(&mut belief), &ctx, &config, &streams, &mut rng).unwrap();
            recorded = pop.members.iter().map(|m| m.fitness).fold(recorded, f64::min);
            prop_assert_eq!(belief.champion.fitness, recorded);
            prop_assert_eq!(pop.best_ever.fitness, recorded);
        }
    }

    #[test]
    fn recorded_best_never_worsens_within_a_day(seed in any::<u64>(), cultural in any::<bool>()) {
        let algorithm = if cultural { Algorithm::Cultural } else { Algorithm::Genetic };
        let config = small(algorithm, 6, 3, seed);
        let mut run = Run::new(&config, 0).unwrap();
        for _ in 0..3 {
            let mut trace = Vec::new();
            let record = run
                .run_day_observed(|r| {
                    let pop = r.population().unwrap();
                    let floor = pop.members.iter().map(|m| m.fitness).fold(f64::INFINITY, f64::min);
                    let champion = r.belief().map(|b| b.champion.fitness);
                    trace.push((pop.best_ever.fitness, floor, champion));
                })
                .unwrap();
            prop_assert_eq!(trace.len(), 6);
            for pair in trace.windows(2) {
                prop_assert!(pair[1].0 <= pair[0].0);
            }
            for (best, floor, champion) in &trace {
                prop_assert!(best <= floor);
                if let Some(c) = champion {
                    prop_assert!(c <= best);
                }
            }
            prop_assert_eq!(record.best_fitness, Some(trace.last().unwrap().0));
        }
    }

    #[test]
    fn cultural_without_influence_matches_genetic(seed in any::<u64>()) {
        let ga = small(Algorithm::Genetic, 3, 6, seed);
        let mut ca = small(Algorithm::Cultural, 3, 6, seed);
        ca.optimizer.belief_influence = false;
        prop_assert_eq!(run_scenario(&ga, 1).unwrap(), run_scenario(&ca, 1).unwrap());
    }

    #[test]
    fn runs_are_seed_deterministic(seed in any::<u64>(), cultural in any::<bool>()) {
        let algorithm = if cultural { Algorithm::Cultural } else { Algorithm::Genetic };
        let config = small(algorithm, 2, 6, seed);
        let a = run_scenario(&config, 2).unwrap();
        prop_assert_eq!(&a, &run_scenario(&config, 2).unwrap());
        prop_assert_ne!(a.seed, run_scenario(&config, 3).unwrap().seed);
    }

    #[test]
    fn aggregate_ignores_order_and_threads(seed in any::<u64>(), rotate in 0usize..4) {
        let config = small(Algorithm::Cultural, 2, 8, seed);
        let serial = run_replications(&config, Some(1)).unwrap();
        let parallel = run_replications(&config, Some(3)).unwrap();
        prop_assert_eq!(&serial, &parallel);

        let mut shuffled = serial.clone();
        shuffled.rotate_left(rotate);
        shuffled.swap(0, 1);
        prop_assert_eq!(aggregate(&serial).unwrap(), aggregate(&shuffled).unwrap());
    }
}

#[test]
fn baseline_replications_are_independent_of_jobs() {
    let config = ScenarioConfig {
        algorithm: Algorithm::None,
        replications: 6,
        ..Default::default()
    };
    let a = run_replications(&config, Some(1)).unwrap();
    let b = run_replications(&config, None).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        a.iter().map(|r| r.replication).collect::<Vec<_>>(),
        (0..6).collect::<Vec<_>>()
    );
}

#[test]
fn every_cultural_mating_involves_the_champion() {
    let society = Society::random(&SocietyConfig::default(), &mut SimRng::seed_from_u64(4)).unwrap();
    let params = EpidemicParams::default();
    let plan = TreatmentPlan::default();
    let ctx = EvalContext { society: &society, params: &params, plan: &plan };
    let config = OptimizerConfig { population_size: 20, ..Default::default() };
    let streams = EvalStreams::new(4);
    let mut rng = SimRng::seed_from_u64(40);
    let mut pop = PopulationState::random(&config, &ctx, &streams, &mut rng).unwrap();
    let mut belief = BeliefSpace::new(pop.best().clone());
    let (mut mothers, mut fathers) = (0, 0);
    for _ in 0..10 {
        let champion = belief.champion.chromosome.clone();
        let mut matings = 0;
        cvirus::optimizer::step_generation_traced(
            &mut pop,
            Some(&mut belief),
            &ctx,
            &config,
            &streams,
            &mut rng,
            |m, f| {
                matings += 1;
                assert!(*m == champion || *f == champion);
                mothers += (*m == champion) as u32;
                fathers += (*f == champion) as u32;
            },
        )
        .unwrap();
        assert_eq!(matings, config.population_size - 1);
    }
    assert!(mothers > 0 && fathers > 0);
}

#[test]
fn day_boundary_rescores_population_and_champion() {
    let params = EpidemicParams::default();
    let plan = TreatmentPlan::default();
    let mut rng = SimRng::seed_from_u64(9);
    let first = Society::random(&SocietyConfig::default(), &mut rng).unwrap();
    let ctx = EvalContext { society: &first, params: &params, plan: &plan };
    let config = OptimizerConfig { population_size: 10, ..Default::default() };
    let streams = EvalStreams::new(9);
    let mut pop = PopulationState::random(&config, &ctx, &streams, &mut rng).unwrap();
    let mut belief = BeliefSpace::new(pop.best().clone());
    step_generation(&mut pop, Some(&mut belief), &ctx, &config, &streams, &mut rng).unwrap();

    // A much sicker society: every stored score is now stale.
    let second = Society::from_levels(&[0.9; 50], 0.75).unwrap();
    let ctx = EvalContext { society: &second, params: &params, plan: &plan };
    let before = pop.members.iter().map(|m| m.chromosome.clone()).collect::<Vec<_>>();
    pop.reevaluate(Some(&mut belief), &ctx, &streams);
    let after = pop.members.iter().map(|m| m.chromosome.clone()).collect::<Vec<_>>();
    assert_eq!(before, after);
    let floor = pop.members.iter().map(|m| m.fitness).fold(f64::INFINITY, f64::min);
    assert_eq!(pop.best_ever.fitness, floor);
    assert!(belief.champion.fitness <= floor);
    assert!(belief.champion.fitness > 0.5);
}
