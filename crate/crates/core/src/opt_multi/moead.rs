//! MOEA/D with the Tchebycheff scalarization: the front is decomposed
//! into scalar subproblems along simplex-lattice weight vectors, each
//! optimized collaboratively within its weight-space neighbourhood.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operators::{polynomial_mutation, DEFAULT_ETA_M};
use super::{MoEvaluator, MoIndividual};
use crate::opt_single::de_rand1_mutant;

/// MOEA/D control parameters: neighbourhood size, replacement limit per
/// offspring (common defaults; unstated in the source experiments), and
/// the differential-variation weight used to build children from
/// neighbourhood members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoeadConfig {
    pub neighborhood: usize,
    pub replacement_limit: usize,
    pub de_scale: f64,
    /// Probability of mating within the neighbourhood; otherwise parents
    /// come from the whole population.
    pub neighborhood_selection: f64,
}

impl Default for MoeadConfig {
    fn default() -> Self {
        Self {
            neighborhood: 20,
            replacement_limit: 2,
            de_scale: 0.5,
            neighborhood_selection: 0.9,
        }
    }
}

/// Simplex-lattice weight vectors for `objectives` dimensions with the
/// lattice resolution chosen so the count is closest to `target`; for two
/// objectives the count is exactly `target`.
pub fn weight_vectors(objectives: usize, target: usize) -> Vec<Vec<f64>> {
    assert!((2..=4).contains(&objectives));
    assert!(target >= 2);
    if objectives == 2 {
        let n = target;
        return (0..n)
            .map(|i| {
                let w = i as f64 / (n - 1) as f64;
                vec![w, 1.0 - w]
            })
            .collect();
    }
    // Choose H so that C(H + k - 1, k - 1) is closest to the target.
    let count_for = |h: usize| -> usize {
        // C(h + k - 1, k - 1) computed iteratively.
        let k = objectives - 1;
        let mut c = 1usize;
        for i in 0..k {
            c = c * (h + i + 1) / (i + 1);
        }
        c
    };
    let mut h = 1;
    while count_for(h + 1) <= target {
        h += 1;
    }
    let (below, above) = (count_for(h), count_for(h + 1));
    if target - below > above - target {
        h += 1;
    }

    let mut weights = Vec::new();
    let mut parts = vec![0usize; objectives];
    fill_lattice(&mut weights, &mut parts, 0, h, h);
    weights
}

fn fill_lattice(out: &mut Vec<Vec<f64>>, parts: &mut Vec<usize>, dim: usize, left: usize, h: usize) {
    if dim == parts.len() - 1 {
        parts[dim] = left;
        out.push(parts.iter().map(|&p| p as f64 / h as f64).collect());
        return;
    }
    for p in 0..=left {
        parts[dim] = p;
        fill_lattice(out, parts, dim + 1, left - p, h);
    }
}

/// For each weight vector, the indices of its `t` nearest weight vectors
/// by Euclidean distance (including itself), ties broken by index.
pub fn neighborhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    let n = weights.len();
    let t = t.min(n);
    (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                let da: f64 = weights[i]
                    .iter()
                    .zip(&weights[a])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                let db: f64 = weights[i]
                    .iter()
                    .zip(&weights[b])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                da.total_cmp(&db).then(a.cmp(&b))
            });
            order.truncate(t);
            order
        })
        .collect()
}

/// Tchebycheff aggregation: `max_i w_i |f_i - z*_i|`.
pub fn tchebycheff(objectives: &[f64], weights: &[f64], ideal: &[f64]) -> f64 {
    assert_eq!(objectives.len(), weights.len());
    assert_eq!(objectives.len(), ideal.len());
    objectives
        .iter()
        .zip(weights)
        .zip(ideal)
        .map(|((f, w), z)| w * (f - z).abs())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(super) struct MoeadOutcome {
    pub population: Vec<MoIndividual>,
    /// Per-generation (violation, Tchebycheff value) of every subproblem,
    /// recorded only when a fixed ideal point is supplied (test
    /// diagnostics).
    pub trace: Vec<Vec<(f64, f64)>>,
}

pub(super) fn run_with_options<R: Rng>(
    cfg: &MoeadConfig,
    ev: &MoEvaluator,
    population: usize,
    budget: usize,
    rng: &mut R,
    fixed_ideal: Option<Vec<f64>>,
) -> MoeadOutcome {
    let objectives = ev.outcome_count();
    let weights = weight_vectors(objectives, population);
    let n = weights.len();
    let neighbors = neighborhoods(&weights, cfg.neighborhood.max(2));

    let mut pop: Vec<MoIndividual> = (0..n).map(|_| ev.sample(rng)).collect();
    let mut evals = n;

    // Ideal point from feasible members when possible; the fallback keeps
    // the aggregation defined until the first feasible candidate appears.
    let mut ideal = match &fixed_ideal {
        Some(z) => z.clone(),
        None => {
            let mut z = vec![f64::INFINITY; objectives];
            let mut any_feasible = false;
            for ind in &pop {
                if ind.violation == 0.0 {
                    any_feasible = true;
                    for (zd, &o) in z.iter_mut().zip(&ind.objectives) {
                        *zd = zd.min(o);
                    }
                }
            }
            if !any_feasible {
                for ind in &pop {
                    for (zd, &o) in z.iter_mut().zip(&ind.objectives) {
                        *zd = zd.min(o);
                    }
                }
            }
            z
        }
    };

    let pm = 1.0 / ev.space().dim() as f64;
    let mut trace: Vec<Vec<(f64, f64)>> = Vec::new();
    if fixed_ideal.is_some() {
        trace.push(subproblem_values(&pop, &weights, &ideal));
    }

    'outer: loop {
        for i in 0..n {
            if evals >= budget {
                break 'outer;
            }
            // Differential variation from three distinct mating-pool
            // members, then polynomial mutation. The pool is the
            // neighbourhood most of the time, the whole population
            // otherwise.
            let hood = &neighbors[i];
            let use_hood = rng.gen::<f64>() < cfg.neighborhood_selection;
            let mut picks = [0usize; 3];
            for k in 0..3 {
                picks[k] = loop {
                    let cand = if use_hood {
                        hood[rng.gen_range(0..hood.len())]
                    } else {
                        rng.gen_range(0..n)
                    };
                    if !picks[..k].contains(&cand) {
                        break cand;
                    }
                };
            }
            let child = de_rand1_mutant(
                &pop[picks[0]].minutes,
                &pop[picks[1]].minutes,
                &pop[picks[2]].minutes,
                cfg.de_scale,
            );
            let child = polynomial_mutation(&child, DEFAULT_ETA_M, pm, ev.space(), rng);
            let child = ev.evaluate_repaired(child);
            evals += 1;

            if fixed_ideal.is_none() && child.violation == 0.0 {
                for (zd, &o) in ideal.iter_mut().zip(&child.objectives) {
                    *zd = zd.min(o);
                }
            }

            // Replace at most `replacement_limit` members of the mating
            // pool, scanned in random order; a smaller violation always
            // wins, equal violation needs a strictly better aggregated
            // value.
            let mut scan: Vec<usize> = if use_hood {
                hood.clone()
            } else {
                (0..n).collect()
            };
            for k in (1..scan.len()).rev() {
                scan.swap(k, rng.gen_range(0..=k));
            }
            let mut replaced = 0;
            for &j in &scan {
                if replaced >= cfg.replacement_limit {
                    break;
                }
                let better = child.violation < pop[j].violation
                    || (child.violation == pop[j].violation
                        && tchebycheff(&child.objectives, &weights[j], &ideal)
                            < tchebycheff(&pop[j].objectives, &weights[j], &ideal));
                if better {
                    pop[j] = child.clone();
                    replaced += 1;
                }
            }
        }
        if fixed_ideal.is_some() {
            trace.push(subproblem_values(&pop, &weights, &ideal));
        }
    }

    MoeadOutcome { population: pop, trace }
}

fn subproblem_values(pop: &[MoIndividual], weights: &[Vec<f64>], ideal: &[f64]) -> Vec<(f64, f64)> {
    pop.iter()
        .zip(weights)
        .map(|(ind, w)| (ind.violation, tchebycheff(&ind.objectives, w, ideal)))
        .collect()
}

pub(super) fn run<R: Rng>(
    cfg: &MoeadConfig,
    ev: &MoEvaluator,
    population: usize,
    budget: usize,
    rng: &mut R,
) -> Vec<MoIndividual> {
    run_with_options(cfg, ev, population, budget, rng, None).population
}
