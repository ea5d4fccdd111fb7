//! Variation operators shared by the multi-objective engines: simulated
//! binary crossover and bounded polynomial mutation. Children are clipped
//! to the variable bounds and closed per day before evaluation.

use rand::Rng;

use crate::opt_single::SearchSpace;

/// Canonical operator settings (distribution indices and rates).
pub const DEFAULT_ETA_C: f64 = 20.0;
pub const DEFAULT_ETA_M: f64 = 20.0;
pub const DEFAULT_CROSSOVER_PROB: f64 = 0.9;

/// Raw per-variable SBX: children symmetric about the parent mean with
/// spread drawn through the inverse distribution at `u`.
pub(crate) fn sbx_pair(p1: f64, p2: f64, eta: f64, u: f64) -> (f64, f64) {
    let beta = if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    };
    let c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2);
    let c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2);
    (c1, c2)
}

/// Simulated binary crossover with distribution index `eta`. Each variable
/// is crossed with probability 1/2 (otherwise copied), children are
/// clipped to the bounds and closed per day.
pub fn sbx_crossover<R: Rng>(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(p1.len(), p2.len(), "SBX parent dimension mismatch");
    let dim = p1.len();
    let mut c1 = Vec::with_capacity(dim);
    let mut c2 = Vec::with_capacity(dim);
    for j in 0..dim {
        let (a, b) = if rng.gen::<f64>() < 0.5 && (p1[j] - p2[j]).abs() > 1e-14 {
            sbx_pair(p1[j], p2[j], eta, rng.gen())
        } else {
            (p1[j], p2[j])
        };
        let (lo, hi) = (space.lower()[j], space.upper()[j]);
        c1.push(a.clamp(lo, hi));
        c2.push(b.clamp(lo, hi));
    }
    (space.repair(&c1), space.repair(&c2))
}

/// Raw per-variable bounded polynomial mutation; the result stays within
/// [lower, upper] by construction.
pub(crate) fn polynomial_variable<R: Rng>(
    x: f64,
    lower: f64,
    upper: f64,
    eta: f64,
    rng: &mut R,
) -> f64 {
    let range = upper - lower;
    if range <= 0.0 {
        return x;
    }
    let x = x.clamp(lower, upper);
    let u: f64 = rng.gen();
    let pow = 1.0 / (eta + 1.0);
    let delta = if u < 0.5 {
        let rel = 1.0 - (x - lower) / range;
        (2.0 * u + (1.0 - 2.0 * u) * rel.powf(eta + 1.0)).powf(pow) - 1.0
    } else {
        let rel = 1.0 - (upper - x) / range;
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * rel.powf(eta + 1.0)).powf(pow)
    };
    (x + delta * range).clamp(lower, upper)
}

/// Polynomial mutation: each variable is perturbed with probability `pm`,
/// stays within its bounds, and the vector is closed per day afterwards.
pub fn polynomial_mutation<R: Rng>(
    x: &[f64],
    eta: f64,
    pm: f64,
    space: &SearchSpace,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = x.to_vec();
    for j in 0..out.len() {
        if rng.gen::<f64>() < pm {
            out[j] = polynomial_variable(out[j], space.lower()[j], space.upper()[j], eta, rng);
        }
    }
    space.repair(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::DayType;
    use crate::opt_single::Domain;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn spd_space() -> SearchSpace {
        SearchSpace::for_domain(Domain::Day(DayType::Sporty)).unwrap()
    }

    #[test]
    fn sbx_midpoint_draw_returns_parents() {
        // u = 0.5 gives spread 1: children coincide with the parents.
        let (c1, c2) = sbx_pair(10.0, 20.0, 20.0, 0.5);
        assert_abs_diff_eq!(c1, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c2, 20.0, epsilon = 1e-12);
    }

    #[test]
    fn sbx_preserves_parent_mean_every_draw() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p1: f64 = rng.gen_range(-5.0..5.0);
            let p2: f64 = rng.gen_range(-5.0..5.0);
            let u: f64 = rng.gen();
            let (c1, c2) = sbx_pair(p1, p2, 20.0, u);
            assert_abs_diff_eq!(c1 + c2, p1 + p2, epsilon = 1e-9);
        }
    }

    #[test]
    fn sbx_children_are_repaired() {
        let space = spd_space();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let p1 = vec![400.0, 600.0, 230.0, 210.0];
        let p2 = vec![600.0, 480.0, 280.0, 80.0];
        for _ in 0..50 {
            let (c1, c2) = sbx_crossover(&p1, &p2, 20.0, &space, &mut rng);
            for c in [&c1, &c2] {
                let total: f64 = c.iter().sum();
                assert_abs_diff_eq!(total, 1440.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn sbx_is_reproducible_for_a_seed() {
        let space = spd_space();
        let p1 = vec![400.0, 600.0, 230.0, 210.0];
        let p2 = vec![600.0, 480.0, 280.0, 80.0];
        let mut a = ChaCha12Rng::seed_from_u64(5);
        let mut b = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert_eq!(
                sbx_crossover(&p1, &p2, 20.0, &space, &mut a),
                sbx_crossover(&p1, &p2, 20.0, &space, &mut b)
            );
        }
    }

    #[test]
    fn mutation_probability_zero_is_identity_up_to_closure() {
        let space = spd_space();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let x = vec![400.0, 600.0, 230.0, 210.0];
        let y = polynomial_mutation(&x, 20.0, 0.0, &space, &mut rng);
        for (a, b) in x.iter().zip(&y) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn mutated_variables_stay_in_bounds_before_closure() {
        let space = spd_space();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..500 {
            for j in 0..4 {
                let x: f64 = rng.gen_range(space.lower()[j]..=space.upper()[j]);
                let m = polynomial_variable(x, space.lower()[j], space.upper()[j], 20.0, &mut rng);
                assert!(m >= space.lower()[j] && m <= space.upper()[j]);
            }
        }
    }
}
