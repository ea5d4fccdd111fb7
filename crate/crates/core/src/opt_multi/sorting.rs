//! Non-dominated sorting and crowding distance.

use super::dominates;

/// Partitions a population into fronts F1, F2, ... where every member of
/// front k is dominated by someone in front k-1 and by no one in its own
/// front. Items pair a violation with minimization objectives.
pub fn fast_non_dominated_sort(items: &[(f64, Vec<f64>)]) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (vi, oi) = (&items[i].0, &items[i].1);
            let (vj, oj) = (&items[j].0, &items[j].1);
            if dominates(*vi, oi, *vj, oj) {
                dominated[i].push(j);
                counts[j] += 1;
            } else if dominates(*vj, oj, *vi, oi) {
                dominated[j].push(i);
                counts[i] += 1;
            }
        }
    }

    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated[i] {
                counts[j] -= 1;
                if counts[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of one front: boundary members per
/// objective get infinity, interior members accumulate normalized gaps
/// between their neighbours. Duplicated objective vectors contribute zero
/// gaps to interior members.
pub fn crowding_distance(objectives: &[Vec<f64>]) -> Vec<f64> {
    let n = objectives.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let m = objectives[0].len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for k in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| objectives[a][k].total_cmp(&objectives[b][k]));
        let lo = objectives[order[0]][k];
        let hi = objectives[order[n - 1]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi - lo <= 0.0 {
            continue;
        }
        for w in 1..(n - 1) {
            let gap = objectives[order[w + 1]][k] - objectives[order[w - 1]][k];
            dist[order[w]] += gap / (hi - lo);
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn feasible(objs: &[[f64; 2]]) -> Vec<(f64, Vec<f64>)> {
        objs.iter().map(|o| (0.0, o.to_vec())).collect()
    }

    #[test]
    fn single_point_is_one_front() {
        let fronts = fast_non_dominated_sort(&feasible(&[[1.0, 2.0]]));
        assert_eq!(fronts, vec![vec![0]]);
    }

    #[test]
    fn staircase_plus_dominated_point() {
        let items = feasible(&[[1.0, 3.0], [2.0, 2.0], [3.0, 1.0], [3.0, 3.0]]);
        let fronts = fast_non_dominated_sort(&items);
        assert_eq!(fronts, vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn identical_points_share_one_front() {
        let items = feasible(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]);
        let fronts = fast_non_dominated_sort(&items);
        assert_eq!(fronts.len(), 1);
        assert_eq!(fronts[0].len(), 3);
    }

    #[test]
    fn infeasible_members_rank_behind_feasible() {
        let items = vec![
            (0.0, vec![5.0, 5.0]),
            (7.0, vec![0.0, 0.0]),
        ];
        let fronts = fast_non_dominated_sort(&items);
        assert_eq!(fronts, vec![vec![0], vec![1]]);
    }

    #[test]
    fn crowding_hand_case() {
        let objs = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        let d = crowding_distance(&objs);
        assert!(d[0].is_infinite());
        assert!(d[2].is_infinite());
        // Middle point: (3-1)/(3-1) per objective.
        assert_eq!(d[1], 2.0);
    }

    #[test]
    fn two_point_front_is_all_boundary() {
        let d = crowding_distance(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(d.iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn interior_duplicates_get_zero() {
        let objs = vec![
            vec![0.0, 4.0],
            vec![2.0, 2.0],
            vec![2.0, 2.0],
            vec![2.0, 2.0],
            vec![4.0, 0.0],
        ];
        let d = crowding_distance(&objs);
        // At least one duplicate is fully interior in every objective order.
        assert!(d.iter().filter(|v| **v == 0.0).count() >= 1);
    }

    /// Brute force reference: front index = number of "layers" peeled off.
    fn brute_force_fronts(items: &[(f64, Vec<f64>)]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..items.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining.iter().any(|&j| {
                        j != i
                            && dominates(items[j].0, &items[j].1, items[i].0, &items[i].1)
                    })
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn agrees_with_brute_force(
            objs in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 3), 1..60),
            violations in prop::collection::vec(prop::sample::select(vec![0.0f64, 0.0, 0.0, 2.5]), 60),
        ) {
            let items: Vec<(f64, Vec<f64>)> = objs
                .iter()
                .zip(&violations)
                .map(|(o, &v)| (v, o.clone()))
                .collect();
            let fast = fast_non_dominated_sort(&items);
            let brute = brute_force_fronts(&items);
            prop_assert_eq!(fast.len(), brute.len());
            for (a, b) in fast.iter().zip(&brute) {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort_unstable();
                b.sort_unstable();
                prop_assert_eq!(a, b);
            }
        }
    }
}
