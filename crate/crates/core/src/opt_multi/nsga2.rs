//! NSGA-II: fast non-dominated sorting, crowding-distance diversity, and
//! binary tournament selection over (rank, crowding).

use rand::Rng;

use super::operators::{
    polynomial_mutation, sbx_crossover, DEFAULT_CROSSOVER_PROB, DEFAULT_ETA_C, DEFAULT_ETA_M,
};
use super::sorting::{crowding_distance, fast_non_dominated_sort};
use super::{MoEvaluator, MoIndividual};

struct Ranked {
    rank: Vec<usize>,
    crowding: Vec<f64>,
}

fn rank_population(pop: &[MoIndividual]) -> (Vec<Vec<usize>>, Ranked) {
    let items: Vec<(f64, Vec<f64>)> = pop
        .iter()
        .map(|p| (p.violation, p.objectives.clone()))
        .collect();
    let fronts = fast_non_dominated_sort(&items);
    let mut rank = vec![0usize; pop.len()];
    let mut crowding = vec![0.0f64; pop.len()];
    for (r, front) in fronts.iter().enumerate() {
        let objs: Vec<Vec<f64>> = front.iter().map(|&i| pop[i].objectives.clone()).collect();
        let d = crowding_distance(&objs);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowding[i] = d[k];
        }
    }
    (fronts, Ranked { rank, crowding })
}

fn tournament<R: Rng>(ranked: &Ranked, n: usize, rng: &mut R) -> usize {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    if ranked.rank[a] < ranked.rank[b] {
        a
    } else if ranked.rank[b] < ranked.rank[a] {
        b
    } else if ranked.crowding[a] >= ranked.crowding[b] {
        a
    } else {
        b
    }
}

/// Environmental selection: whole fronts while they fit, then the last
/// front by descending crowding distance (index-ordered on exact ties so
/// the outcome is deterministic).
fn select_survivors(pop: &[MoIndividual], target: usize) -> Vec<MoIndividual> {
    let (fronts, _) = rank_population(pop);
    let mut next: Vec<MoIndividual> = Vec::with_capacity(target);
    for front in fronts {
        if next.len() == target {
            break;
        }
        if next.len() + front.len() <= target {
            next.extend(front.iter().map(|&i| pop[i].clone()));
        } else {
            let objs: Vec<Vec<f64>> = front.iter().map(|&i| pop[i].objectives.clone()).collect();
            let d = crowding_distance(&objs);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(front[x].cmp(&front[y])));
            for &k in order.iter().take(target - next.len()) {
                next.push(pop[front[k]].clone());
            }
        }
    }
    next
}

pub(super) fn run<R: Rng>(
    ev: &MoEvaluator,
    population: usize,
    budget: usize,
    rng: &mut R,
) -> Vec<MoIndividual> {
    let mut pop: Vec<MoIndividual> = (0..population).map(|_| ev.sample(rng)).collect();
    let mut evals = population;
    let pm = 1.0 / ev.space().dim() as f64;

    while evals < budget {
        let (_, ranked) = rank_population(&pop);
        let mut offspring: Vec<MoIndividual> = Vec::with_capacity(population);
        while offspring.len() < population && evals < budget {
            let p1 = tournament(&ranked, pop.len(), rng);
            let p2 = tournament(&ranked, pop.len(), rng);
            let (c1, c2) = if rng.gen::<f64>() < DEFAULT_CROSSOVER_PROB {
                sbx_crossover(&pop[p1].minutes, &pop[p2].minutes, DEFAULT_ETA_C, ev.space(), rng)
            } else {
                (pop[p1].minutes.clone(), pop[p2].minutes.clone())
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
        pop.extend(offspring);
        pop = select_survivors(&pop, population);
    }
    pop
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::DayType;
    use crate::objectives::Outcome;
    use crate::opt_multi::MoInstance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn survivor_selection_keeps_whole_first_front() {
        let inst =
            MoInstance::new(DayType::Sporty, vec![Outcome::Cognition, Outcome::Fitness]).unwrap();
        let ev = MoEvaluator::new(&inst).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let pop: Vec<MoIndividual> = (0..120).map(|_| ev.sample(&mut rng)).collect();

        let items: Vec<(f64, Vec<f64>)> = pop
            .iter()
            .map(|p| (p.violation, p.objectives.clone()))
            .collect();
        let fronts = fast_non_dominated_sort(&items);
        let target = fronts[0].len().max(20);

        let survivors = select_survivors(&pop, target);
        assert_eq!(survivors.len(), target);
        for &i in &fronts[0] {
            assert!(
                survivors.iter().any(|s| s.minutes == pop[i].minutes),
                "first-front member dropped although the front fits"
            );
        }
    }

    #[test]
    fn tournament_prefers_lower_rank_then_higher_crowding() {
        let ranked = Ranked {
            rank: vec![0, 1],
            crowding: vec![0.1, f64::INFINITY],
        };
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for _ in 0..50 {
            let w = tournament(&ranked, 2, &mut rng);
            // Index 1 can only win against itself.
            if w == 1 {
                continue;
            }
            assert_eq!(w, 0);
        }
    }
}
