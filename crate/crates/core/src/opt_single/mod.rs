//! Single-objective evolutionary optimizers over day and week decision
//! vectors: differential evolution with two mutation operators, particle
//! swarm optimization, and CMA-ES, all under the lexicographic
//! (violation, value) fitness.
//!
//! Candidates live in minute space — 4 variables for a day, 28 laid out
//! day-major for a week — and every candidate is floored and closed per
//! day before it is evaluated, so evaluated solutions always satisfy the
//! 1440-minute total exactly.

mod cmaes;
mod de;
mod pso;

pub use cmaes::CmaesConfig;
pub use de::{binomial_crossover, de_current_to_rand1_mutant, de_rand1_mutant, DeConfig, DeMutation};
pub use pso::{pso_step, Particle, PsoConfig, PsoSampling};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::composition::{
    day_structure, week_mixture, ActivityComposition, DayType, WeekPlan, ACTIVITY_COUNT,
};
use crate::error::{Error, Result};
use crate::objectives::{
    outcome_model, scalar_fitness_day, scalar_fitness_week, BmiWeekRule, Direction, Outcome,
    OutcomeModel, ScalarFitness,
};

/// What the optimizer searches over: one day or one catalog week mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Day(DayType),
    /// Week mixture by 1-based catalog index.
    Week(u8),
}

/// A single-objective benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleInstance {
    pub outcome: Outcome,
    pub domain: Domain,
    /// How week-level BMI folds daily values; ignored for day instances
    /// and non-BMI outcomes.
    pub bmi_week_rule: BmiWeekRule,
}

impl SingleInstance {
    pub fn day(outcome: Outcome, day: DayType) -> Self {
        Self {
            outcome,
            domain: Domain::Day(day),
            bmi_week_rule: BmiWeekRule::default(),
        }
    }

    pub fn week(outcome: Outcome, mixture: u8) -> Result<Self> {
        week_mixture(mixture)?;
        Ok(Self {
            outcome,
            domain: Domain::Week(mixture),
            bmi_week_rule: BmiWeekRule::default(),
        })
    }

    pub fn with_bmi_week_rule(mut self, rule: BmiWeekRule) -> Self {
        self.bmi_week_rule = rule;
        self
    }

    pub fn id(&self) -> String {
        match self.domain {
            Domain::Day(day) => format!("{}/{}", day.code(), self.outcome.id()),
            Domain::Week(m) => format!("week{}/{}", m, self.outcome.id()),
        }
    }

    /// Default evaluation budget: 25k for one-day, 125k for one-week runs.
    pub fn default_budget(&self) -> usize {
        match self.domain {
            Domain::Day(_) => 25_000,
            Domain::Week(_) => 125_000,
        }
    }
}

/// Bounds and repair for a day-major decision vector.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    days: Vec<DayType>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn for_domain(domain: Domain) -> Result<Self> {
        let days = match domain {
            Domain::Day(day) => vec![day],
            Domain::Week(m) => week_mixture(m)?.day_types(),
        };
        Ok(Self::for_days(days))
    }

    pub fn for_days(days: Vec<DayType>) -> Self {
        let mut lower = Vec::with_capacity(days.len() * ACTIVITY_COUNT);
        let mut upper = Vec::with_capacity(days.len() * ACTIVITY_COUNT);
        for &day in &days {
            let d = day_structure(day);
            lower.extend_from_slice(&d.lower);
            upper.extend_from_slice(&d.upper);
        }
        Self { days, lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn days(&self) -> &[DayType] {
        &self.days
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Floors non-positive components and closes each day to 1440 minutes.
    pub fn repair(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "candidate dimension mismatch");
        let mut out = Vec::with_capacity(x.len());
        for chunk in x.chunks_exact(ACTIVITY_COUNT) {
            let closed = ActivityComposition::closure_floored([chunk[0], chunk[1], chunk[2], chunk[3]]);
            out.extend_from_slice(&closed.minutes());
        }
        out
    }

    /// Uniform sample within the per-variable bounds, then repaired.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.dim())
            .map(|i| rng.gen_range(self.lower[i]..=self.upper[i]))
            .collect();
        self.repair(&raw)
    }

    /// The per-day compositions of a repaired vector.
    pub fn compositions(&self, repaired: &[f64]) -> Result<Vec<ActivityComposition>> {
        repaired
            .chunks_exact(ACTIVITY_COUNT)
            .map(|c| ActivityComposition::closure([c[0], c[1], c[2], c[3]]))
            .collect()
    }
}

/// Scores repaired candidates for one instance.
pub struct Evaluator {
    model: &'static OutcomeModel,
    space: SearchSpace,
    rule: BmiWeekRule,
}

impl Evaluator {
    pub fn new(instance: &SingleInstance) -> Result<Self> {
        Ok(Self {
            model: outcome_model(instance.outcome),
            space: SearchSpace::for_domain(instance.domain)?,
            rule: instance.bmi_week_rule,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn direction(&self) -> Direction {
        self.model.direction
    }

    /// Lexicographic fitness of an already-repaired candidate.
    pub fn fitness(&self, repaired: &[f64]) -> ScalarFitness {
        let comps = self
            .space
            .compositions(repaired)
            .expect("repaired candidates are strictly positive");
        if self.space.days().len() == 1 {
            scalar_fitness_day(self.model, &comps[0], day_structure(self.space.days()[0]))
        } else {
            let plan = WeekPlan::new(
                self.space
                    .days()
                    .iter()
                    .copied()
                    .zip(comps)
                    .collect::<Vec<_>>(),
            )
            .expect("search space weeks have 7 days");
            scalar_fitness_week(self.model, &plan, self.rule)
        }
    }
}

/// The four single-objective algorithm configurations under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleAlgorithm {
    DeRand1,
    DeCurrentToRand1,
    Pso,
    Cmaes,
}

impl SingleAlgorithm {
    pub const ALL: [SingleAlgorithm; 4] = [
        SingleAlgorithm::DeRand1,
        SingleAlgorithm::DeCurrentToRand1,
        SingleAlgorithm::Pso,
        SingleAlgorithm::Cmaes,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            SingleAlgorithm::DeRand1 => "de-rand-1",
            SingleAlgorithm::DeCurrentToRand1 => "de-current-to-rand-1",
            SingleAlgorithm::Pso => "pso",
            SingleAlgorithm::Cmaes => "cmaes",
        }
    }

    /// Published configuration for this algorithm.
    pub fn default_spec(&self) -> SingleSpec {
        match self {
            SingleAlgorithm::DeRand1 => SingleSpec::De(DeConfig::default()),
            SingleAlgorithm::DeCurrentToRand1 => SingleSpec::De(DeConfig {
                mutation: DeMutation::CurrentToRand1,
                ..DeConfig::default()
            }),
            SingleAlgorithm::Pso => SingleSpec::Pso(PsoConfig::default()),
            SingleAlgorithm::Cmaes => SingleSpec::Cmaes(CmaesConfig::default()),
        }
    }
}

impl fmt::Display for SingleAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SingleAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '/'], "-").as_str() {
            "de-rand-1" | "de-rand1" | "derand1" => Ok(SingleAlgorithm::DeRand1),
            "de-current-to-rand-1" | "de-current-to-rand1" | "de-ctr1" => {
                Ok(SingleAlgorithm::DeCurrentToRand1)
            }
            "pso" => Ok(SingleAlgorithm::Pso),
            "cmaes" | "cma-es" => Ok(SingleAlgorithm::Cmaes),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// A fully specified single-objective optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum SingleSpec {
    De(DeConfig),
    Pso(PsoConfig),
    Cmaes(CmaesConfig),
}

impl SingleSpec {
    pub fn algorithm(&self) -> SingleAlgorithm {
        match self {
            SingleSpec::De(cfg) => match cfg.mutation {
                DeMutation::Rand1 => SingleAlgorithm::DeRand1,
                DeMutation::CurrentToRand1 => SingleAlgorithm::DeCurrentToRand1,
            },
            SingleSpec::Pso(_) => SingleAlgorithm::Pso,
            SingleSpec::Cmaes(_) => SingleAlgorithm::Cmaes,
        }
    }

    fn min_budget(&self) -> usize {
        match self {
            SingleSpec::De(cfg) => cfg.population,
            SingleSpec::Pso(cfg) => cfg.swarm,
            SingleSpec::Cmaes(cfg) => cfg.lambda,
        }
    }
}

/// Everything recorded about one optimization run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    /// Best repaired decision vector found (day-major minutes).
    pub best_minutes: Vec<f64>,
    pub best: ScalarFitness,
    /// Best-so-far fitness at the end of each generation, including the
    /// initial population; monotone non-worsening under the lex order.
    pub history: Vec<ScalarFitness>,
    pub evaluations: usize,
}

/// Bookkeeping shared by the algorithm drivers: external elite plus the
/// per-generation history that makes RunRecord monotone by construction.
pub(crate) struct RunTracker {
    direction: Direction,
    best_minutes: Vec<f64>,
    best: ScalarFitness,
    history: Vec<ScalarFitness>,
}

impl RunTracker {
    pub(crate) fn new(direction: Direction, minutes: &[f64], fitness: ScalarFitness) -> Self {
        Self {
            direction,
            best_minutes: minutes.to_vec(),
            best: fitness,
            history: Vec::new(),
        }
    }

    pub(crate) fn offer(&mut self, minutes: &[f64], fitness: ScalarFitness) {
        if fitness.better_than(&self.best, self.direction) {
            self.best = fitness;
            self.best_minutes.clear();
            self.best_minutes.extend_from_slice(minutes);
        }
    }

    pub(crate) fn end_generation(&mut self) {
        self.history.push(self.best);
    }

    pub(crate) fn finish(self, seed: u64, evaluations: usize) -> RunRecord {
        RunRecord {
            seed,
            best_minutes: self.best_minutes,
            best: self.best,
            history: self.history,
            evaluations,
        }
    }
}

/// Runs one algorithm on one instance with a fixed evaluation budget.
///
/// Identical (spec, instance, budget, seed) inputs produce identical
/// records; each run owns its RNG and has no shared mutable state, so
/// distinct runs can execute in parallel.
pub fn run_single(
    spec: &SingleSpec,
    instance: &SingleInstance,
    budget: usize,
    seed: u64,
) -> Result<RunRecord> {
    if budget < spec.min_budget() {
        return Err(Error::Config(format!(
            "budget {budget} is below the population size {} of {}",
            spec.min_budget(),
            spec.algorithm().code()
        )));
    }
    let evaluator = Evaluator::new(instance)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match spec {
        SingleSpec::De(cfg) => de::run(cfg, &evaluator, budget, &mut rng, seed),
        SingleSpec::Pso(cfg) => pso::run(cfg, &evaluator, budget, &mut rng, seed),
        SingleSpec::Cmaes(cfg) => cmaes::run(cfg, &evaluator, budget, &mut rng, seed),
    }
}
