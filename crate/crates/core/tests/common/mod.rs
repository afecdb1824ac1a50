//! Exhaustive-enumeration oracles shared by the test targets.
//!
//! The enumerators re-derive the dynamics from scratch (no library code
//! beyond the types), list every Bernoulli outcome with its probability,
//! and produce exact expectations.
#![allow(dead_code)]

use cvirus::EpidemicParams;

pub const SAMPLES: usize = 100_000;

/// (probability, resulting levels) for every outcome of a cure.
pub fn enumerate_cure(
    levels: &[f64],
    doses: &[f64],
    windows: &[(f64, f64)],
    effect: f64,
) -> Vec<(f64, Vec<f64>)> {
    let draws = levels.len() * doses.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << draws) {
        let mut p = 1.0;
        let mut after = levels.to_vec();
        for (i, level) in after.iter_mut().enumerate() {
            for (j, &dose) in doses.iter().enumerate() {
                let given = mask & (1 << (i * doses.len() + j)) != 0;
                p *= if given { dose } else { 1.0 - dose };
                if given && windows[j].0 <= *level && *level <= windows[j].1 {
                    *level = (*level - effect).max(0.0);
                }
            }
        }
        out.push((p, after));
    }
    out
}

/// (probability, resulting levels) for every outcome of one day.
pub fn enumerate_day(levels: &[f64], threshold: f64, params: &EpidemicParams) -> Vec<(f64, Vec<f64>)> {
    let humans: Vec<usize> = (0..levels.len()).filter(|&i| levels[i] < threshold).collect();
    let zombies = levels.len() - humans.len();
    let contacts = zombies * params.contacts_per_zombie as usize;
    if humans.is_empty() || contacts == 0 {
        return vec![(1.0, levels.to_vec())];
    }
    // Each contact independently: (target, transmitted).
    let mut states = vec![(1.0, levels.to_vec())];
    for _ in 0..contacts {
        let mut next = Vec::new();
        for (p, lv) in &states {
            for &t in &humans {
                let pt = p / humans.len() as f64;
                let mut hit = lv.clone();
                hit[t] = (hit[t] + params.increment).min(1.0);
                next.push((pt * params.virulence, hit));
                next.push((pt * (1.0 - params.virulence), lv.clone()));
            }
        }
        states = next;
    }
    states
}

pub fn mean(levels: &[f64]) -> f64 {
    levels.iter().sum::<f64>() / levels.len() as f64
}

pub fn expectation(outcomes: &[(f64, Vec<f64>)]) -> f64 {
    let total: f64 = outcomes.iter().map(|(p, _)| p).sum();
    assert!((total - 1.0).abs() < 1e-9, "probabilities sum to {total}");
    outcomes.iter().map(|(p, l)| p * mean(l)).sum()
}

/// Monte-Carlo mean and standard error over [`SAMPLES`] draws.
pub fn monte_carlo(sample: impl FnMut(u64) -> f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..SAMPLES as u64).map(sample).collect();
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, (var / xs.len() as f64).sqrt())
}

pub fn within_3se((m, se): (f64, f64), exact: f64) -> bool {
    (m - exact).abs() <= 3.0 * se.max(1e-12)
}

pub fn mc_within_3se(sample: impl FnMut(u64) -> f64, exact: f64) -> (f64, f64) {
    let (m, se) = monte_carlo(sample);
    assert!(
        within_3se((m, se), exact),
        "monte carlo {m} vs exact {exact} (se {se})"
    );
    (m, se)
}
