//! Differential evolution with the rand/1 and current-to-rand/1 mutation
//! operators and binomial crossover.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, RunRecord, RunTracker};
use crate::error::{Error, Result};

/// Mutation operator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeMutation {
    Rand1,
    CurrentToRand1,
}

/// DE control parameters. Published settings: population 50, F = 0.5,
/// Cr = 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeConfig {
    pub population: usize,
    /// Differential weight F.
    pub scale: f64,
    /// Binomial crossover rate Cr.
    pub crossover: f64,
    pub mutation: DeMutation,
    /// Combination coefficient K for current-to-rand/1. `None` draws K
    /// uniformly from [0,1] per individual per generation.
    pub k: Option<f64>,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population: 50,
            scale: 0.5,
            crossover: 0.5,
            mutation: DeMutation::Rand1,
            k: None,
        }
    }
}

impl DeConfig {
    fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::Config(format!(
                "DE population must be at least 4, got {}",
                self.population
            )));
        }
        if !(self.scale > 0.0 && self.scale <= 2.0) {
            return Err(Error::Config(format!("DE scale F must be in (0,2], got {}", self.scale)));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::Config(format!(
                "DE crossover Cr must be in [0,1], got {}",
                self.crossover
            )));
        }
        Ok(())
    }
}

/// rand/1 mutant: `r1 + F (r2 - r3)` componentwise.
pub fn de_rand1_mutant(r1: &[f64], r2: &[f64], r3: &[f64], f: f64) -> Vec<f64> {
    r1.iter()
        .zip(r2)
        .zip(r3)
        .map(|((a, b), c)| a + f * (b - c))
        .collect()
}

/// current-to-rand/1 mutant: `x + K (r1 - x) + F (r2 - r3)` componentwise.
pub fn de_current_to_rand1_mutant(
    x: &[f64],
    r1: &[f64],
    r2: &[f64],
    r3: &[f64],
    f: f64,
    k: f64,
) -> Vec<f64> {
    x.iter()
        .zip(r1)
        .zip(r2.iter().zip(r3))
        .map(|((xi, a), (b, c))| xi + k * (a - xi) + f * (b - c))
        .collect()
}

/// Binomial crossover: each component comes from the mutant with
/// probability `cr`; one forced index guarantees at least one mutant gene.
pub fn binomial_crossover<R: Rng>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> Vec<f64> {
    assert_eq!(target.len(), mutant.len(), "crossover dimension mismatch");
    let forced = rng.gen_range(0..target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (t, m))| {
            let take_mutant = rng.gen::<f64>() < cr;
            if take_mutant || j == forced {
                *m
            } else {
                *t
            }
        })
        .collect()
}

fn pick_distinct<R: Rng>(rng: &mut R, n: usize, exclude: usize) -> (usize, usize, usize) {
    let mut draw = |taken: &[usize]| loop {
        let j = rng.gen_range(0..n);
        if j != exclude && !taken.contains(&j) {
            return j;
        }
    };
    let r1 = draw(&[]);
    let r2 = draw(&[r1]);
    let r3 = draw(&[r1, r2]);
    (r1, r2, r3)
}

pub(super) fn run(
    cfg: &DeConfig,
    ev: &Evaluator,
    budget: usize,
    rng: &mut ChaCha12Rng,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    let np = cfg.population;
    let direction = ev.direction();

    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| ev.space().sample(rng)).collect();
    let mut fit: Vec<_> = pop.iter().map(|x| ev.fitness(x)).collect();
    let mut evals = np;

    let mut tracker = RunTracker::new(direction, &pop[0], fit[0]);
    for i in 1..np {
        tracker.offer(&pop[i], fit[i]);
    }
    tracker.end_generation();

    while evals < budget {
        for i in 0..np {
            if evals >= budget {
                break;
            }
            let (r1, r2, r3) = pick_distinct(rng, np, i);
            let mutant = match cfg.mutation {
                DeMutation::Rand1 => de_rand1_mutant(&pop[r1], &pop[r2], &pop[r3], cfg.scale),
                DeMutation::CurrentToRand1 => {
                    let k = cfg.k.unwrap_or_else(|| rng.gen::<f64>());
                    de_current_to_rand1_mutant(&pop[i], &pop[r1], &pop[r2], &pop[r3], cfg.scale, k)
                }
            };
            let trial = ev.space().repair(&binomial_crossover(&pop[i], &mutant, cfg.crossover, rng));
            let trial_fit = ev.fitness(&trial);
            evals += 1;
            // Selection keeps the trial unless the target is strictly
            // better, so exact ties go to the trial.
            if !fit[i].better_than(&trial_fit, direction) {
                pop[i] = trial;
                fit[i] = trial_fit;
                tracker.offer(&pop[i], fit[i]);
            }
        }
        tracker.end_generation();
    }
    Ok(tracker.finish(seed, evals))
}
