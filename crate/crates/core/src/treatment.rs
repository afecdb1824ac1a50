//! Windowed treatments and their stochastic application.
//!
//! Treatment `j` of `T` is centred at `(2j - 1) / 2T` and only acts on
//! individuals whose current level lies within `halfwidth` of that centre.
//! A cure is a vector of per-treatment dose probabilities.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Society;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreatmentPlan {
    pub count: usize,
    pub halfwidth: f64,
    /// Level reduction of one effective application.
    pub effect: f64,
}

impl Default for TreatmentPlan {
    fn default() -> Self {
        Self {
            count: 10,
            halfwidth: 0.10,
            effect: 0.0025,
        }
    }
}

impl TreatmentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidCount {
                name: "treatments",
                reason: "need at least one treatment".into(),
            });
        }
        if !(self.halfwidth >= 0.0 && self.halfwidth.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "halfwidth",
                reason: format!("{} must be non-negative", self.halfwidth),
            });
        }
        if !(0.0..=1.0).contains(&self.effect) {
            return Err(Error::InvalidParameter {
                name: "effect",
                reason: format!("{} is outside [0, 1]", self.effect),
            });
        }
        Ok(())
    }

    pub fn center(&self, index: usize) -> Result<f64> {
        if index < 1 || index > self.count {
            return Err(Error::IndexOutOfRange {
                index,
                count: self.count,
            });
        }
        Ok((2 * index - 1) as f64 / (2 * self.count) as f64)
    }

    /// Effective window of treatment `index` (1-based), clipped to `[0, 1]`.
    pub fn window(&self, index: usize) -> Result<(f64, f64)> {
        let c = self.center(index)?;
        Ok(((c - self.halfwidth).max(0.0), (c + self.halfwidth).min(1.0)))
    }

    pub fn windows(&self) -> Vec<(f64, f64)> {
        (1..=self.count).map(|j| self.window(j).unwrap()).collect()
    }
}

/// Window of treatment `index` (1-based) under the default plan.
pub fn treatment_window(index: usize) -> Result<(f64, f64)> {
    TreatmentPlan::default().window(index)
}

/// Dose probabilities, one per treatment, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cure(Vec<f64>);

impl Cure {
    pub fn new(doses: Vec<f64>) -> Result<Self> {
        if let Some(bad) = doses.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::InvalidParameter {
                name: "dose",
                reason: format!("{bad} is outside [0, 1]"),
            });
        }
        Ok(Self(doses))
    }

    pub fn doses(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CureOutcome {
    /// Administrations per treatment.
    pub applied: Vec<u32>,
    /// Administrations that hit the treatment's window.
    pub effective: Vec<u32>,
}

impl CureOutcome {
    pub fn zeros(count: usize) -> Self {
        Self {
            applied: vec![0; count],
            effective: vec![0; count],
        }
    }
}

/// Applies `cure` to every member of `society`.
///
/// Members are visited in id order and treatments in ascending order. Each
/// treatment is administered with its dose probability and takes effect if
/// the member's level, re-read after earlier reductions, lies within the
/// treatment's window. A single member can therefore slide through several
/// windows on one day.
pub fn apply_cure<R: Rng + ?Sized>(
    society: &mut Society,
    cure: &Cure,
    plan: &TreatmentPlan,
    rng: &mut R,
) -> Result<CureOutcome> {
    if cure.len() != plan.count {
        return Err(Error::LengthMismatch {
            expected: plan.count,
            found: cure.len(),
        });
    }
    let windows = plan.windows();
    let mut outcome = CureOutcome::zeros(plan.count);
    for member in society.members_mut() {
        for (j, (&dose, &(lo, hi))) in cure.doses().iter().zip(&windows).enumerate() {
            if rng.gen::<f64>() >= dose {
                continue;
            }
            outcome.applied[j] += 1;
            let level = member.level.get();
            if lo <= level && level <= hi {
                member.level = member.level.lower(plan.effect);
                outcome.effective[j] += 1;
            }
        }
    }
    Ok(outcome)
}
