//! Health-outcome objectives and the fitness machinery built on them.
//!
//! Each outcome is a quadratic regression in ilr coordinates,
//!
//! ```text
//! f(x) = b0 + b1 z1 + b2 z2 + b3 z3
//!      + b4 z1^2 + b5 z1 z2 + b6 z1 z3 + b7 z2^2 + b8 z2 z3 + b9 z3^2
//! ```
//!
//! with published coefficient estimates per outcome. BMI is optimized
//! toward zero (minimize |f1|); the other three outcomes are maximized.
//! Constraint handling is lexicographic: a solution's fitness is the pair
//! (bound violation, objective value) and any infeasible solution loses to
//! any feasible one.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::composition::{ilr, ActivityComposition, IlrCoordinates, WeekPlan};
use crate::composition::{bound_violation, week_violation, DayStructure};
use crate::error::{Error, Result};

/// The four built-in health outcomes (f1..f4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Outcome {
    /// f1 — body mass index z-score; optimal means closest to zero.
    Bmi,
    /// f2 — cognition (receptive vocabulary) score.
    Cognition,
    /// f3 — life satisfaction score.
    LifeSatisfaction,
    /// f4 — fitness (predicted VO2max).
    Fitness,
}

/// Which direction makes an outcome value better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Smaller |value| is better (BMI).
    MinimizeAbsolute,
    /// Larger value is better.
    Maximize,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::Bmi,
        Outcome::Cognition,
        Outcome::LifeSatisfaction,
        Outcome::Fitness,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Outcome::Bmi => "f1",
            Outcome::Cognition => "f2",
            Outcome::LifeSatisfaction => "f3",
            Outcome::Fitness => "f4",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Bmi => "BMI",
            Outcome::Cognition => "Cognition",
            Outcome::LifeSatisfaction => "Life satisfaction",
            Outcome::Fitness => "Fitness",
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            Outcome::Bmi => Direction::MinimizeAbsolute,
            _ => Direction::Maximize,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" | "bmi" => Ok(Outcome::Bmi),
            "f2" | "cognition" | "vocab" => Ok(Outcome::Cognition),
            "f3" | "life-satisfaction" | "life_satisfaction" | "lifesat" => {
                Ok(Outcome::LifeSatisfaction)
            }
            "f4" | "fitness" | "vo2max" => Ok(Outcome::Fitness),
            _ => Err(Error::UnknownOutcome(s.to_string())),
        }
    }
}

impl TryFrom<String> for Outcome {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Outcome> for String {
    fn from(o: Outcome) -> String {
        o.id().to_string()
    }
}

/// Regression coefficients and optimization direction for one outcome.
#[derive(Debug, Clone)]
pub struct OutcomeModel {
    pub outcome: Outcome,
    /// b0..b9 in the order constant, z1, z2, z3, z1^2, z1z2, z1z3, z2^2, z2z3, z3^2.
    pub coefficients: [f64; 10],
    pub direction: Direction,
}

// Published coefficient estimates, stored to full printed precision.
// Only the fitness outcome keeps its quadratic terms; for the other three
// the quadratic terms did not improve the fit and are zero.
static MODELS: [OutcomeModel; 4] = [
    OutcomeModel {
        outcome: Outcome::Bmi,
        coefficients: [0.23307, -0.59691, 0.05029, 0.68497, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        direction: Direction::MinimizeAbsolute,
    },
    OutcomeModel {
        outcome: Outcome::Cognition,
        coefficients: [
            2.3508268, -0.032037, 0.0670568, -0.003155, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        direction: Direction::Maximize,
    },
    OutcomeModel {
        outcome: Outcome::LifeSatisfaction,
        coefficients: [
            12395.053, 2255.008, -885.351, -1264.635, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        direction: Direction::Maximize,
    },
    OutcomeModel {
        outcome: Outcome::Fitness,
        coefficients: [
            68.85903, -17.84326, -1.77607, -11.25996, 3.15694, 13.88458, -5.12788, -6.85649,
            2.69689, 2.52276,
        ],
        direction: Direction::Maximize,
    },
];

/// The built-in model for an outcome.
pub fn outcome_model(outcome: Outcome) -> &'static OutcomeModel {
    &MODELS[outcome as usize]
}

/// Evaluates the regression polynomial at given ilr coordinates.
pub fn evaluate_ilr(m: &OutcomeModel, z: &IlrCoordinates) -> f64 {
    let b = &m.coefficients;
    let (z1, z2, z3) = (z.z1, z.z2, z.z3);
    b[0] + b[1] * z1
        + b[2] * z2
        + b[3] * z3
        + b[4] * z1 * z1
        + b[5] * z1 * z2
        + b[6] * z1 * z3
        + b[7] * z2 * z2
        + b[8] * z2 * z3
        + b[9] * z3 * z3
}

/// Predicted outcome value for one day's composition.
pub fn evaluate(m: &OutcomeModel, x: &ActivityComposition) -> f64 {
    evaluate_ilr(m, &ilr(x))
}

/// Week objective `F = sum of daily f` over the plan's seven days.
pub fn evaluate_week(m: &OutcomeModel, w: &WeekPlan) -> f64 {
    w.days().iter().map(|(_, x)| evaluate(m, x)).sum()
}

/// How the week-level BMI objective folds the seven daily values.
///
/// The default sums the signed daily values first and takes the absolute
/// value at comparison time, mirroring the one-day |f1| rule applied to F.
/// The alternative sums per-day absolute values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BmiWeekRule {
    #[default]
    AbsoluteOfSum,
    SumOfAbsolutes,
}

/// Lexicographic fitness: total bound violation first, objective value second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFitness {
    pub violation: f64,
    pub value: f64,
}

impl ScalarFitness {
    pub fn feasible(&self) -> bool {
        self.violation == 0.0
    }

    /// True when `self` strictly precedes `other` in the lexicographic order.
    pub fn better_than(&self, other: &ScalarFitness, direction: Direction) -> bool {
        lex_compare(direction, self, other) == Ordering::Less
    }
}

/// Total lexicographic order on fitness pairs; `Less` means `a` is better.
///
/// Violations compare first (smaller wins); on equal violation the value
/// decides, larger-is-better for maximized outcomes and smaller |value| for
/// BMI. Uses IEEE total ordering so the result is a genuine total order.
pub fn lex_compare(direction: Direction, a: &ScalarFitness, b: &ScalarFitness) -> Ordering {
    match a.violation.total_cmp(&b.violation) {
        Ordering::Equal => match direction {
            Direction::Maximize => b.value.total_cmp(&a.value),
            Direction::MinimizeAbsolute => a.value.abs().total_cmp(&b.value.abs()),
        },
        ord => ord,
    }
}

/// Fitness of a one-day composition under a day structure's bounds.
pub fn scalar_fitness_day(
    m: &OutcomeModel,
    x: &ActivityComposition,
    d: &DayStructure,
) -> ScalarFitness {
    ScalarFitness {
        violation: bound_violation(x, d),
        value: evaluate(m, x),
    }
}

/// Fitness of a week plan: violation summed over days, value per the
/// outcome (signed sum by default; see [`BmiWeekRule`] for BMI).
pub fn scalar_fitness_week(m: &OutcomeModel, w: &WeekPlan, rule: BmiWeekRule) -> ScalarFitness {
    let value = match (m.direction, rule) {
        (Direction::MinimizeAbsolute, BmiWeekRule::SumOfAbsolutes) => {
            w.days().iter().map(|(_, x)| evaluate(m, x).abs()).sum()
        }
        _ => evaluate_week(m, w),
    };
    ScalarFitness {
        violation: week_violation(w),
        value,
    }
}

/// Objective values for a subset of outcomes, all converted to
/// minimization: BMI contributes |f1|, maximized outcomes contribute -f.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    outcomes: Vec<Outcome>,
    values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Minimization-convention values, ordered like `outcomes()`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Validates an outcome subset: 2 to 4 distinct outcomes.
pub fn validate_subset(subset: &[Outcome]) -> Result<()> {
    if !(2..=4).contains(&subset.len()) {
        return Err(Error::ObjectiveSubset(subset.len()));
    }
    for (i, a) in subset.iter().enumerate() {
        if subset[i + 1..].contains(a) {
            return Err(Error::ObjectiveSubset(subset.len()));
        }
    }
    Ok(())
}

/// Converts one raw outcome value to the minimization convention.
pub fn to_minimization(outcome: Outcome, raw: f64) -> f64 {
    match outcome.direction() {
        Direction::MinimizeAbsolute => raw.abs(),
        Direction::Maximize => -raw,
    }
}

/// Evaluates a subset of outcomes at a composition, in minimization
/// convention, for use by the multi-objective engines.
pub fn objective_vector(subset: &[Outcome], x: &ActivityComposition) -> Result<ObjectiveVector> {
    validate_subset(subset)?;
    let z = ilr(x);
    let values = subset
        .iter()
        .map(|&o| to_minimization(o, evaluate_ilr(outcome_model(o), &z)))
        .collect();
    Ok(ObjectiveVector {
        outcomes: subset.to_vec(),
        values,
    })
}
