//! Brute-force lattice enumeration of one-day instances.
//!
//! The oracle walks sleep, sedentary and LPA over a fixed-step lattice
//! inside their bounds, derives MVPA from the 1440-minute total, and keeps
//! the lexicographically best feasible point. It exists to cross-validate
//! the evolutionary optimizers: at a 1-minute step each day structure has
//! a few million feasible points, which is the exhaustive-search regime
//! the optimizers are meant to replace.

use rayon::prelude::*;

use crate::composition::{day_structure, ActivityComposition, DayType, MINUTES_PER_DAY};
use crate::composition::ilr_parts;
use crate::error::{Error, Result};
use crate::objectives::{evaluate_ilr, outcome_model, Direction, Outcome};

/// Best lattice point found for one outcome.
#[derive(Debug, Clone)]
pub struct GridBest {
    pub value: f64,
    pub composition: ActivityComposition,
}

/// Exhaustive lattice search for a single (outcome, day structure) instance.
///
/// Returns `None` when the step is so coarse that no lattice point is
/// feasible. The best value is monotone non-worsening as the step shrinks
/// because lattices at step `s/k` contain the step-`s` lattice points.
pub fn grid_oracle(outcome: Outcome, day: DayType, step: f64) -> Result<Option<GridBest>> {
    Ok(grid_oracle_all(day, step)?[outcome as usize].clone())
}

/// One lattice sweep evaluating all four outcomes at once.
///
/// The ilr transform dominates the per-point cost and is shared across
/// outcomes, so scanning once is four times cheaper than four sweeps.
pub fn grid_oracle_all(day: DayType, step: f64) -> Result<[Option<GridBest>; 4]> {
    if !(step >= 1.0) {
        return Err(Error::Config(format!(
            "grid step must be at least 1 minute, got {step}"
        )));
    }
    let d = day_structure(day);
    let sleeps = lattice(d.lower[0], d.upper[0], step);

    let per_slice: Vec<[Option<(f64, [f64; 4])>; 4]> = sleeps
        .par_iter()
        .map(|&x1| scan_slice(x1, d.lower, d.upper, step))
        .collect();

    let mut best: [Option<(f64, [f64; 4])>; 4] = [None, None, None, None];
    for slice in per_slice {
        for (i, candidate) in slice.into_iter().enumerate() {
            best[i] = merge(best[i].take(), candidate, Outcome::ALL[i].direction());
        }
    }

    let mut out: [Option<GridBest>; 4] = [None, None, None, None];
    for (i, b) in best.into_iter().enumerate() {
        out[i] = match b {
            Some((value, m)) => Some(GridBest {
                value,
                composition: ActivityComposition::closure(m)?,
            }),
            None => None,
        };
    }
    Ok(out)
}

fn lattice(lower: f64, upper: f64, step: f64) -> Vec<f64> {
    let n = ((upper - lower) / step).floor() as usize;
    (0..=n).map(|k| lower + k as f64 * step).collect()
}

fn scan_slice(
    x1: f64,
    lower: [f64; 4],
    upper: [f64; 4],
    step: f64,
) -> [Option<(f64, [f64; 4])>; 4] {
    let mut best: [Option<(f64, [f64; 4])>; 4] = [None, None, None, None];
    for x2 in lattice(lower[1], upper[1], step) {
        for x3 in lattice(lower[2], upper[2], step) {
            let x4 = MINUTES_PER_DAY - x1 - x2 - x3;
            if x4 < lower[3] - 1e-9 || x4 > upper[3] + 1e-9 {
                continue;
            }
            let z = ilr_parts(x1, x2, x3, x4);
            let m = [x1, x2, x3, x4];
            for (i, &outcome) in Outcome::ALL.iter().enumerate() {
                let value = evaluate_ilr(outcome_model(outcome), &z);
                best[i] = merge(best[i].take(), Some((value, m)), outcome.direction());
            }
        }
    }
    best
}

/// Order-independent merge of two candidates so the parallel reduction is
/// deterministic regardless of slice scheduling: better value wins, exact
/// value ties go to the lexicographically smaller composition.
fn merge(
    a: Option<(f64, [f64; 4])>,
    b: Option<(f64, [f64; 4])>,
    direction: Direction,
) -> Option<(f64, [f64; 4])> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let (ka, kb) = match direction {
                Direction::Maximize => (-a.0, -b.0),
                Direction::MinimizeAbsolute => (a.0.abs(), b.0.abs()),
            };
            let pick_a = match ka.total_cmp(&kb) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => a.1 <= b.1,
            };
            Some(if pick_a { a } else { b })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coarse_grid_recovers_known_optima() {
        // At step 5 the studious-day fitness optimum (390,690,150,210) is a
        // lattice point, so the oracle must land on it exactly.
        let best = grid_oracle(Outcome::Fitness, DayType::Studious, 5.0)
            .unwrap()
            .expect("feasible lattice");
        assert_abs_diff_eq!(best.value, 60.481673531968800, epsilon = 1e-9);
        let m = best.composition.minutes();
        assert_abs_diff_eq!(m[0], 390.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m[1], 690.0, epsilon = 1e-9);
    }

    #[test]
    fn value_never_worsens_as_step_shrinks() {
        let coarse = grid_oracle(Outcome::LifeSatisfaction, DayType::Sporty, 60.0)
            .unwrap()
            .unwrap();
        let fine = grid_oracle(Outcome::LifeSatisfaction, DayType::Sporty, 15.0)
            .unwrap()
            .unwrap();
        assert!(fine.value >= coarse.value);
    }

    #[test]
    fn oracle_is_deterministic() {
        let a = grid_oracle(Outcome::Bmi, DayType::WorkingWeekend, 7.0).unwrap().unwrap();
        let b = grid_oracle(Outcome::Bmi, DayType::WorkingWeekend, 7.0).unwrap().unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.composition.minutes(), b.composition.minutes());
    }

    #[test]
    fn infeasible_lattice_returns_empty() {
        // Step larger than any bound range leaves single lattice points at
        // the lower bounds: (360,690,150) forces MVPA = 240 > 210.
        let r = grid_oracle(Outcome::Fitness, DayType::Studious, 1000.0).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn rejects_sub_minute_steps() {
        assert!(grid_oracle(Outcome::Fitness, DayType::Studious, 0.5).is_err());
    }

    #[test]
    fn shared_sweep_matches_single_outcome_calls() {
        let all = grid_oracle_all(DayType::Sporty, 30.0).unwrap();
        for outcome in Outcome::ALL {
            let single = grid_oracle(outcome, DayType::Sporty, 30.0).unwrap().unwrap();
            let shared = all[outcome as usize].as_ref().unwrap();
            assert_eq!(single.value, shared.value);
        }
    }
}
