//! Compositional time-use optimization.
//!
//! Models how the 1440 minutes of a day split across sleep, sedentary
//! behaviour, light and moderate-to-vigorous physical activity drive four
//! health outcomes, and searches that space with single- and
//! multi-objective evolutionary algorithms under realistic day-structure
//! bounds. Includes a brute-force grid oracle and the statistics needed to
//! benchmark the optimizers against each other.

pub mod composition;
pub mod error;
pub mod metrics;
pub mod modelfit;
pub mod objectives;
pub mod opt_multi;
pub mod opt_single;

pub use composition::{
    bound_violation, day_structure, ilr, week_mixture, week_violation, ActivityComposition,
    DayStructure, DayType, IlrCoordinates, WeekMixture, WeekPlan,
};
pub use error::{Error, Result};
pub use objectives::{
    evaluate, evaluate_week, lex_compare, objective_vector, outcome_model, scalar_fitness_day,
    scalar_fitness_week, BmiWeekRule, Direction, ObjectiveVector, Outcome, OutcomeModel,
    ScalarFitness,
};
