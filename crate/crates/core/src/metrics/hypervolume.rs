//! Exact hypervolume of minimization fronts.
//!
//! 2-D fronts use a dimension sweep; 3-D and 4-D fronts use recursive
//! exclusive-volume slicing over sets limited point by point. Exponential
//! in the worst case, but exact and comfortably fast for the front sizes
//! this harness produces (at most a few hundred points).

/// Hypervolume dominated by `points` (minimization) and bounded by `reference`.
///
/// Points not strictly below the reference in every coordinate contribute
/// nothing and are dropped. An empty front has hypervolume 0.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    assert!(
        (2..=4).contains(&reference.len()),
        "hypervolume supports 2 to 4 objectives, got {}",
        reference.len()
    );
    let mut pts: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| {
            assert_eq!(p.len(), reference.len(), "point/reference dimension mismatch");
            p.iter().zip(reference).all(|(a, r)| a < r)
        })
        .cloned()
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts = nondominated(pts);
    if reference.len() == 2 {
        hv2(&mut pts, reference)
    } else {
        hv_recursive(&pts, reference)
    }
}

fn hv2(pts: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut hv = 0.0;
    let mut prev_y = reference[1];
    for p in pts.iter() {
        if p[1] < prev_y {
            hv += (reference[0] - p[0]) * (prev_y - p[1]);
            prev_y = p[1];
        }
    }
    hv
}

fn hv_recursive(pts: &[Vec<f64>], reference: &[f64]) -> f64 {
    match pts.len() {
        0 => 0.0,
        1 => box_volume(&pts[0], reference),
        2 => {
            box_volume(&pts[0], reference) + box_volume(&pts[1], reference)
                - box_volume(&join(&pts[0], &pts[1]), reference)
        }
        _ => {
            let mut sorted = pts.to_vec();
            sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
            (0..sorted.len())
                .map(|i| exclusive_volume(&sorted[i], &sorted[i + 1..], reference))
                .sum()
        }
    }
}

/// Volume dominated by `p` but by none of `rest`.
fn exclusive_volume(p: &[f64], rest: &[Vec<f64>], reference: &[f64]) -> f64 {
    let limited: Vec<Vec<f64>> = rest.iter().map(|q| join(p, q)).collect();
    let limited = nondominated(limited);
    box_volume(p, reference) - hv_recursive(&limited, reference)
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(a, r)| r - a).product()
}

/// Componentwise maximum: the corner of the overlap of two dominated boxes.
fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
}

/// Keeps only mutually non-dominated points (minimization, duplicates kept once).
fn nondominated(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut keep: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    'outer: for p in pts {
        let mut i = 0;
        while i < keep.len() {
            if dominates_or_equal(&keep[i], &p) {
                continue 'outer;
            }
            if dominates_or_equal(&p, &keep[i]) {
                keep.swap_remove(i);
            } else {
                i += 1;
            }
        }
        keep.push(p);
    }
    keep
}

fn dominates_or_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}
