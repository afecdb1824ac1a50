//! Society of agents carrying a continuous infection level.
//!
//! Every individual holds a level in `[0, 1]`. Those at or above the
//! society's threshold are zombies and infect; everybody else is human and
//! susceptible. Contacts are well mixed: a zombie meets humans uniformly at
//! random.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Infection level, always inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InfectionLevel(f64);

impl InfectionLevel {
    pub const ZERO: Self = Self(0.0);
    pub const FULL: Self = Self(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter {
                name: "level",
                reason: format!("{value} is outside [0, 1]"),
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn raise(self, by: f64) -> Self {
        Self((self.0 + by).min(1.0))
    }

    #[inline]
    pub fn lower(self, by: f64) -> Self {
        Self((self.0 - by).max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: u32,
    pub level: InfectionLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub humans: usize,
    pub zombies: usize,
}

/// Infection dynamics of one simulated day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    /// Probability that a zombie-human contact transmits.
    pub virulence: f64,
    pub contacts_per_zombie: u32,
    /// Level gained per transmitting contact.
    pub increment: f64,
}

impl Default for EpidemicParams {
    fn default() -> Self {
        Self {
            virulence: 1.0,
            contacts_per_zombie: 2,
            increment: 0.033,
        }
    }
}

impl EpidemicParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.virulence) {
            return Err(Error::InvalidParameter {
                name: "virulence",
                reason: format!("{} is outside [0, 1]", self.virulence),
            });
        }
        if self.contacts_per_zombie < 1 {
            return Err(Error::InvalidParameter {
                name: "contacts_per_zombie",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.increment > 0.0 && self.increment <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "increment",
                reason: format!("{} is outside (0, 1]", self.increment),
            });
        }
        Ok(())
    }
}

/// How a fresh society is drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SocietyConfig {
    pub size: usize,
    pub zombie_fraction: f64,
    pub human_range: (f64, f64),
    pub zombie_range: (f64, f64),
    pub threshold: f64,
}

impl Default for SocietyConfig {
    fn default() -> Self {
        Self {
            size: 50,
            zombie_fraction: 0.1,
            human_range: (0.0, 0.35),
            zombie_range: (0.8, 1.0),
            threshold: 0.75,
        }
    }
}

impl SocietyConfig {
    pub fn zombie_count(&self) -> usize {
        (self.size as f64 * self.zombie_fraction).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 1 {
            return Err(Error::InvalidCount {
                name: "society size",
                reason: "need at least one individual".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.zombie_fraction) {
            return Err(Error::InvalidParameter {
                name: "zombie_fraction",
                reason: format!("{} is outside [0, 1]", self.zombie_fraction),
            });
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidParameter {
                name: "threshold",
                reason: format!("{} is outside (0, 1)", self.threshold),
            });
        }
        for (name, (lo, hi)) in [
            ("human_range", self.human_range),
            ("zombie_range", self.zombie_range),
        ] {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::InvalidRange {
                    name,
                    reason: format!("[{lo}, {hi}] is not an ordered sub-range of [0, 1]"),
                });
            }
        }
        if self.human_range.1 >= self.threshold {
            return Err(Error::InvalidRange {
                name: "human_range",
                reason: format!(
                    "upper bound {} must lie below the threshold {}",
                    self.human_range.1, self.threshold
                ),
            });
        }
        if self.zombie_range.0 < self.threshold {
            return Err(Error::InvalidRange {
                name: "zombie_range",
                reason: format!(
                    "lower bound {} must not lie below the threshold {}",
                    self.zombie_range.0, self.threshold
                ),
            });
        }
        Ok(())
    }
}

/// A fixed-size, non-empty population.
///
/// Members are kept sorted by id; ids are `0..n` and never change.
#[derive(Debug, Clone, PartialEq)]
pub struct Society {
    members: Vec<Individual>,
    threshold: f64,
}

impl Society {
    /// Builds a society from explicit levels; member `i` gets id `i`.
    pub fn from_levels(levels: &[f64], threshold: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidCount {
                name: "society size",
                reason: "need at least one individual".into(),
            });
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidParameter {
                name: "threshold",
                reason: format!("{threshold} is outside (0, 1)"),
            });
        }
        let members = levels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                Ok(Individual {
                    id: i as u32,
                    level: InfectionLevel::new(l)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members, threshold })
    }

    /// Draws a random society: `round(n * zombie_fraction)` zombies with
    /// levels uniform in the zombie range, the rest uniform in the human
    /// range, then shuffled so ids carry no information about status.
    pub fn random<R: Rng + ?Sized>(config: &SocietyConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let zombies = config.zombie_count();
        let mut levels: Vec<f64> = (0..config.size)
            .map(|i| {
                let (lo, hi) = if i < zombies {
                    config.zombie_range
                } else {
                    config.human_range
                };
                rng.gen_range(lo..=hi)
            })
            .collect();
        levels.shuffle(rng);
        Self::from_levels(&levels, config.threshold)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub(crate) fn members_mut(&mut self) -> &mut [Individual] {
        &mut self.members
    }

    pub fn levels(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.level.get()).collect()
    }

    #[inline]
    pub fn is_zombie_level(&self, level: InfectionLevel) -> bool {
        level.get() >= self.threshold
    }

    pub fn mean_infection_rate(&self) -> f64 {
        let sum: f64 = self.members.iter().map(|m| m.level.get()).sum();
        sum / self.members.len() as f64
    }

    pub fn census(&self) -> Census {
        let zombies = self
            .members
            .iter()
            .filter(|m| self.is_zombie_level(m.level))
            .count();
        Census {
            humans: self.members.len() - zombies,
            zombies,
        }
    }

    /// Advances the outbreak by one day.
    ///
    /// Status is snapshotted at the start of the day: only start-of-day
    /// zombies make contacts, and only start-of-day humans are targets.
    /// Each zombie, in id order, meets `contacts_per_zombie` humans drawn
    /// with replacement; each contact transmits with probability
    /// `virulence` and raises the target by `increment` (capped at 1).
    pub fn advance_day<R: Rng + ?Sized>(&mut self, params: &EpidemicParams, rng: &mut R) {
        let mut humans = Vec::with_capacity(self.members.len());
        let mut zombies = 0usize;
        for (i, m) in self.members.iter().enumerate() {
            if self.is_zombie_level(m.level) {
                zombies += 1;
            } else {
                humans.push(i);
            }
        }
        if humans.is_empty() || zombies == 0 {
            return;
        }
        for _ in 0..zombies {
            for _ in 0..params.contacts_per_zombie {
                let target = humans[rng.gen_range(0..humans.len())];
                if rng.gen::<f64>() < params.virulence {
                    let m = &mut self.members[target];
                    m.level = m.level.raise(params.increment);
                }
            }
        }
    }
}
