//! SPEA2: strength-based fitness with k-nearest-neighbour density, an
//! external archive with distance-based truncation, and binary tournament
//! mating selection from the archive.

use rand::Rng;

use super::operators::{
    polynomial_mutation, sbx_crossover, DEFAULT_CROSSOVER_PROB, DEFAULT_ETA_C, DEFAULT_ETA_M,
};
use super::{dominates, MoEvaluator, MoIndividual};

/// SPEA2 fitness of every member of a (population ∪ archive) pool:
/// strength S(i) counts who i dominates, raw fitness R(i) sums the
/// strengths of i's dominators, and the density D(i) = 1/(σ_k + 2) uses
/// the distance to the k-th nearest neighbour with k = √N. Non-dominated
/// members have R = 0 and fitness < 1.
pub fn spea2_fitness(pool: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let n = pool.len();
    if n == 0 {
        return Vec::new();
    }
    let mut strength = vec![0usize; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(pool[i].0, &pool[i].1, pool[j].0, &pool[j].1) {
                strength[i] += 1;
                dominators[j].push(i);
            } else if dominates(pool[j].0, &pool[j].1, pool[i].0, &pool[i].1) {
                strength[j] += 1;
                dominators[i].push(j);
            }
        }
    }
    let raw: Vec<f64> = (0..n)
        .map(|i| dominators[i].iter().map(|&d| strength[d] as f64).sum())
        .collect();

    let k = ((n as f64).sqrt() as usize).clamp(1, n.saturating_sub(1).max(1));
    (0..n)
        .map(|i| {
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(&pool[i].1, &pool[j].1))
                .collect();
            dists.sort_by(f64::total_cmp);
            let sigma_k = dists.get(k - 1).copied().unwrap_or(0.0);
            raw[i] + 1.0 / (sigma_k + 2.0)
        })
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Archive truncation: repeatedly remove the member with lexicographically
/// smallest sorted-distance vector to the surviving members. Members that
/// hold the current minimum of any objective are protected, so boundary
/// solutions are never dropped before interior ones.
fn truncate(archive: &mut Vec<MoIndividual>, target: usize) {
    while archive.len() > target {
        let n = archive.len();
        let m = archive[0].objectives.len();
        let mut protected = vec![false; n];
        for d in 0..m {
            let mut best = 0;
            for i in 1..n {
                if archive[i].objectives[d] < archive[best].objectives[d] {
                    best = i;
                }
            }
            protected[best] = true;
        }

        let mut victim: Option<(usize, Vec<f64>)> = None;
        for i in 0..n {
            if protected[i] {
                continue;
            }
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(&archive[i].objectives, &archive[j].objectives))
                .collect();
            dists.sort_by(f64::total_cmp);
            let smaller = match &victim {
                None => true,
                Some((_, best)) => {
                    let mut order = std::cmp::Ordering::Equal;
                    for (a, b) in dists.iter().zip(best) {
                        order = a.total_cmp(b);
                        if order != std::cmp::Ordering::Equal {
                            break;
                        }
                    }
                    order == std::cmp::Ordering::Less
                }
            };
            if smaller {
                victim = Some((i, dists));
            }
        }
        match victim {
            Some((i, _)) => {
                archive.remove(i);
            }
            // Everything protected; cannot shrink further by this rule.
            None => break,
        }
    }
}

/// Environmental selection into an archive of `target` members: all
/// non-dominated members of the pool, truncated when too many, padded
/// with the best dominated members (by fitness) when too few.
fn environmental_selection(
    pool: &[MoIndividual],
    fitness: &[f64],
    target: usize,
) -> Vec<MoIndividual> {
    let mut archive: Vec<MoIndividual> = Vec::new();
    let mut rest: Vec<usize> = Vec::new();
    for (i, f) in fitness.iter().enumerate() {
        if *f < 1.0 {
            archive.push(pool[i].clone());
        } else {
            rest.push(i);
        }
    }
    if archive.len() > target {
        truncate(&mut archive, target);
    } else if archive.len() < target {
        rest.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
        for &i in rest.iter().take(target - archive.len()) {
            archive.push(pool[i].clone());
        }
    }
    archive
}

pub(super) fn run<R: Rng>(
    ev: &MoEvaluator,
    population: usize,
    budget: usize,
    rng: &mut R,
) -> Vec<MoIndividual> {
    let archive_size = population;
    let mut pop: Vec<MoIndividual> = (0..population).map(|_| ev.sample(rng)).collect();
    let mut evals = population;
    let mut archive: Vec<MoIndividual> = Vec::new();
    let pm = 1.0 / ev.space().dim() as f64;

    loop {
        let pool: Vec<MoIndividual> = pop.iter().chain(archive.iter()).cloned().collect();
        let items: Vec<(f64, Vec<f64>)> = pool
            .iter()
            .map(|p| (p.violation, p.objectives.clone()))
            .collect();
        let fitness = spea2_fitness(&items);
        archive = environmental_selection(&pool, &fitness, archive_size);
        if evals >= budget {
            break;
        }

        // Mating fitness of the new archive members for tournaments.
        let archive_items: Vec<(f64, Vec<f64>)> = archive
            .iter()
            .map(|p| (p.violation, p.objectives.clone()))
            .collect();
        let archive_fitness = spea2_fitness(&archive_items);

        let tournament = |rng: &mut R| -> usize {
            let a = rng.gen_range(0..archive.len());
            let b = rng.gen_range(0..archive.len());
            if archive_fitness[a] <= archive_fitness[b] {
                a
            } else {
                b
            }
        };

        let mut offspring: Vec<MoIndividual> = Vec::with_capacity(population);
        while offspring.len() < population && evals < budget {
            let p1 = tournament(rng);
            let p2 = tournament(rng);
            let (c1, c2) = if rng.gen::<f64>() < DEFAULT_CROSSOVER_PROB {
                sbx_crossover(
                    &archive[p1].minutes,
                    &archive[p2].minutes,
                    DEFAULT_ETA_C,
                    ev.space(),
                    rng,
                )
            } else {
                (archive[p1].minutes.clone(), archive[p2].minutes.clone())
            };
            for child in [c1, c2] {
                if offspring.len() == population || evals == budget {
                    break;
                }
                let mutated = polynomial_mutation(&child, DEFAULT_ETA_M, pm, ev.space(), rng);
                offspring.push(ev.evaluate_repaired(mutated));
                evals += 1;
            }
        }
        pop = offspring;
        if pop.is_empty() {
            break;
        }
    }
    archive
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(objs: &[[f64; 2]]) -> Vec<(f64, Vec<f64>)> {
        objs.iter().map(|o| (0.0, o.to_vec())).collect()
    }

    #[test]
    fn nondominated_pool_has_zero_raw_fitness() {
        let pool = feasible(&[[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]]);
        let f = spea2_fitness(&pool);
        assert!(f.iter().all(|v| *v < 1.0), "{f:?}");
    }

    #[test]
    fn chain_strengths_and_raw_fitness() {
        // (1,1) dominates both others; (2,2) dominates (3,3).
        // S = (2,1,0); R(1) = 0, R(2) = S(1) = 2, R(3) = S(1)+S(2) = 3.
        let pool = feasible(&[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]);
        let f = spea2_fitness(&pool);
        assert!(f[0] < 1.0);
        assert!(f[1] >= 2.0 && f[1] < 3.0);
        assert!(f[2] >= 3.0 && f[2] < 4.0);
    }

    #[test]
    fn single_member_fitness_below_one() {
        let pool = feasible(&[[5.0, 5.0]]);
        let f = spea2_fitness(&pool);
        assert_eq!(f.len(), 1);
        assert!(f[0] < 1.0);
    }

    #[test]
    fn truncation_protects_objective_extremes() {
        // A spread front plus a dense cluster; truncation must take from
        // the cluster, never the extreme endpoints.
        let mut archive: Vec<MoIndividual> = [
            [0.0, 10.0],
            [10.0, 0.0],
            [5.0, 5.0],
            [5.01, 4.99],
            [5.02, 4.98],
            [4.99, 5.01],
        ]
        .iter()
        .map(|o| MoIndividual {
            minutes: vec![0.0; 4],
            objectives: o.to_vec(),
            violation: 0.0,
        })
        .collect();
        truncate(&mut archive, 3);
        assert_eq!(archive.len(), 3);
        assert!(archive.iter().any(|m| m.objectives == vec![0.0, 10.0]));
        assert!(archive.iter().any(|m| m.objectives == vec![10.0, 0.0]));
    }
}
