//! Multi-objective evolutionary engines — MOEA/D with Tchebycheff
//! decomposition, NSGA-II, and SPEA2 — over one-day compositions with a
//! 2–4 outcome subset. All engines minimize the converted objective
//! vector (|f1| for BMI, negated values for maximized outcomes) under
//! feasibility-first domination: violation compares before objectives, so
//! any bound-violating candidate loses to any feasible one.

mod moead;
mod nsga2;
mod operators;
mod sorting;
mod spea2;

pub use moead::{neighborhoods, tchebycheff, weight_vectors, MoeadConfig};
pub use operators::{
    polynomial_mutation, sbx_crossover, DEFAULT_CROSSOVER_PROB, DEFAULT_ETA_C, DEFAULT_ETA_M,
};
pub use sorting::{crowding_distance, fast_non_dominated_sort};
pub use spea2::spea2_fitness;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::composition::{bound_violation, day_structure, DayType};
use crate::error::{Error, Result};
use crate::objectives::{
    evaluate_ilr, outcome_model, to_minimization, validate_subset, Outcome,
};
use crate::opt_single::{Domain, SearchSpace};

/// A one-day multi-objective benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MoInstance {
    pub day: DayType,
    outcomes: Vec<Outcome>,
}

impl MoInstance {
    pub fn new(day: DayType, outcomes: Vec<Outcome>) -> Result<Self> {
        validate_subset(&outcomes)?;
        Ok(Self { day, outcomes })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn id(&self) -> String {
        let ids: Vec<&str> = self.outcomes.iter().map(|o| o.id()).collect();
        format!("{}/{}", self.day.code(), ids.join("+"))
    }
}

/// Feasibility-first Pareto domination on minimization objectives:
/// a smaller violation dominates outright; at equal violation `a`
/// dominates `b` when it is no worse everywhere and better somewhere.
pub fn dominates(a_violation: f64, a: &[f64], b_violation: f64, b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors of different subsets");
    if a_violation < b_violation {
        return true;
    }
    if a_violation > b_violation {
        return false;
    }
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// One candidate with its evaluation.
#[derive(Debug, Clone)]
pub(crate) struct MoIndividual {
    pub minutes: Vec<f64>,
    pub objectives: Vec<f64>,
    pub violation: f64,
}

/// A member of a returned trade-off front.
#[derive(Debug, Clone)]
pub struct FrontMember {
    /// Repaired decision vector (minutes, summing to 1440).
    pub minutes: Vec<f64>,
    /// Objective values in minimization convention.
    pub objectives: Vec<f64>,
    pub violation: f64,
}

/// Mutually non-dominated solutions returned by one engine run.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    outcomes: Vec<Outcome>,
    members: Vec<FrontMember>,
}

impl ParetoFront {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn members(&self) -> &[FrontMember] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Objective vectors (minimization convention) for metric computation.
    pub fn objective_points(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|m| m.objectives.clone()).collect()
    }
}

/// Evaluates candidates for one multi-objective instance. The ilr
/// transform is computed once per candidate and shared by all outcomes.
pub(crate) struct MoEvaluator {
    space: SearchSpace,
    outcomes: Vec<Outcome>,
    day: DayType,
}

impl MoEvaluator {
    pub(crate) fn new(instance: &MoInstance) -> Result<Self> {
        Ok(Self {
            space: SearchSpace::for_domain(Domain::Day(instance.day))?,
            outcomes: instance.outcomes.clone(),
            day: instance.day,
        })
    }

    pub(crate) fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub(crate) fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    /// Repairs a raw candidate and scores it.
    pub(crate) fn evaluate(&self, raw: &[f64]) -> MoIndividual {
        let minutes = self.space.repair(raw);
        self.evaluate_repaired(minutes)
    }

    pub(crate) fn evaluate_repaired(&self, minutes: Vec<f64>) -> MoIndividual {
        let comp = self
            .space
            .compositions(&minutes)
            .expect("repaired candidates are strictly positive")[0];
        let z = crate::composition::ilr(&comp);
        let objectives = self
            .outcomes
            .iter()
            .map(|&o| to_minimization(o, evaluate_ilr(outcome_model(o), &z)))
            .collect();
        MoIndividual {
            minutes,
            objectives,
            violation: bound_violation(&comp, day_structure(self.day)),
        }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> MoIndividual {
        let raw = self.space.sample(rng);
        self.evaluate_repaired(raw)
    }
}

/// Extracts the mutually non-dominated members of a population.
pub(crate) fn nondominated_set(pop: &[MoIndividual]) -> Vec<MoIndividual> {
    let mut keep: Vec<MoIndividual> = Vec::new();
    'outer: for cand in pop {
        let mut i = 0;
        while i < keep.len() {
            if dominates(keep[i].violation, &keep[i].objectives, cand.violation, &cand.objectives) {
                continue 'outer;
            }
            if dominates(cand.violation, &cand.objectives, keep[i].violation, &keep[i].objectives) {
                keep.swap_remove(i);
            } else {
                i += 1;
            }
        }
        keep.push(cand.clone());
    }
    keep
}

fn build_front(instance: &MoInstance, pop: Vec<MoIndividual>) -> ParetoFront {
    let mut members: Vec<FrontMember> = nondominated_set(&pop)
        .into_iter()
        .map(|ind| FrontMember {
            minutes: ind.minutes,
            objectives: ind.objectives,
            violation: ind.violation,
        })
        .collect();
    // Stable output order regardless of engine internals.
    members.sort_by(|a, b| {
        a.objectives
            .iter()
            .zip(&b.objectives)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    ParetoFront {
        outcomes: instance.outcomes.clone(),
        members,
    }
}

/// The three multi-objective engines under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoEngine {
    Moead,
    Nsga2,
    Spea2,
}

impl MoEngine {
    pub const ALL: [MoEngine; 3] = [MoEngine::Moead, MoEngine::Nsga2, MoEngine::Spea2];

    pub fn code(&self) -> &'static str {
        match self {
            MoEngine::Moead => "moead",
            MoEngine::Nsga2 => "nsga2",
            MoEngine::Spea2 => "spea2",
        }
    }
}

impl fmt::Display for MoEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for MoEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '/'], "-").as_str() {
            "moead" | "moea-d" => Ok(MoEngine::Moead),
            "nsga2" | "nsga-ii" | "nsga-2" => Ok(MoEngine::Nsga2),
            "spea2" | "spea-2" => Ok(MoEngine::Spea2),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Default population size for every engine.
pub const DEFAULT_MO_POPULATION: usize = 100;

/// Runs one engine on one instance and returns the final non-dominated
/// set. Identical inputs give identical fronts.
pub fn run_multi(
    engine: MoEngine,
    instance: &MoInstance,
    population: usize,
    budget: usize,
    seed: u64,
) -> Result<ParetoFront> {
    if population < 4 {
        return Err(Error::Config(format!(
            "population must be at least 4, got {population}"
        )));
    }
    if budget < population {
        return Err(Error::Config(format!(
            "budget {budget} is below the population size {population}"
        )));
    }
    let evaluator = MoEvaluator::new(instance)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pop = match engine {
        MoEngine::Moead => moead::run(&MoeadConfig::default(), &evaluator, population, budget, &mut rng),
        MoEngine::Nsga2 => nsga2::run(&evaluator, population, budget, &mut rng),
        MoEngine::Spea2 => spea2::run(&evaluator, population, budget, &mut rng),
    };
    Ok(build_front(instance, pop))
}
