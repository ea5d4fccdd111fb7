//! Performance metrics and statistical analysis for the benchmark harness:
//! hypervolume with shared front normalization, summary statistics, and
//! Kruskal–Wallis significance testing with Bonferroni adjustment.

mod hypervolume;
mod oracle;

pub use hypervolume::hypervolume;
pub use oracle::{grid_oracle, grid_oracle_all, GridBest};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Default per-dimension reference coordinate for normalized hypervolume.
pub const NORMALIZED_REFERENCE: f64 = 1.1;

/// Per-objective value range used to map fronts onto the unit box.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// A hypervolume value together with the frame it was computed in.
#[derive(Debug, Clone)]
pub struct HvResult {
    pub value: f64,
    pub reference: Vec<f64>,
    pub normalization: NormalizationBox,
}

/// Maps every front onto [0,1] per objective using the min/max over the
/// union of all fronts. Degenerate objectives (max = min) map to 0 so that
/// identical values neither add nor destroy volume.
pub fn normalize_fronts(fronts: &[Vec<Vec<f64>>]) -> Result<(Vec<Vec<Vec<f64>>>, NormalizationBox)> {
    let mut dim = None;
    for front in fronts {
        for p in front {
            match dim {
                None => dim = Some(p.len()),
                Some(d) if d == p.len() => {}
                Some(_) => return Err(Error::MismatchedObjectives),
            }
        }
    }
    let dim = dim.ok_or(Error::EmptyInput("normalize_fronts needs at least one point"))?;

    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    for front in fronts {
        for p in front {
            for d in 0..dim {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
    }

    let normalized = fronts
        .iter()
        .map(|front| {
            front
                .iter()
                .map(|p| {
                    (0..dim)
                        .map(|d| {
                            let range = max[d] - min[d];
                            if range > 0.0 {
                                (p[d] - min[d]) / range
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((normalized, NormalizationBox { min, max }))
}

/// Hypervolume of one front scaled into a shared normalization box, with
/// the reference point at [`NORMALIZED_REFERENCE`] per dimension.
pub fn normalized_hypervolume(front: &[Vec<f64>], normalization: &NormalizationBox) -> HvResult {
    let dim = normalization.min.len();
    let reference = vec![NORMALIZED_REFERENCE; dim];
    let scaled: Vec<Vec<f64>> = front
        .iter()
        .map(|p| {
            (0..dim)
                .map(|d| {
                    let range = normalization.max[d] - normalization.min[d];
                    if range > 0.0 {
                        (p[d] - normalization.min[d]) / range
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    HvResult {
        value: hypervolume(&scaled, &reference),
        reference,
        normalization: normalization.clone(),
    }
}

/// Arithmetic mean and sample standard deviation (n-1 denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    /// False for a single observation, where the std is reported as 0.
    pub std_defined: bool,
}

pub fn mean_std(values: &[f64]) -> Result<MeanStd> {
    if values.is_empty() {
        return Err(Error::EmptyInput("mean_std needs at least one value"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Ok(MeanStd { mean, std: 0.0, std_defined: false });
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(MeanStd {
        mean,
        std: (ss / (n - 1.0)).sqrt(),
        std_defined: true,
    })
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("median needs at least one value"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Midranks of the pooled sample, tied values sharing their average rank.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Kruskal–Wallis rank test with tie correction.
///
/// Returns the H statistic and its chi-squared p-value with
/// (#groups - 1) degrees of freedom. All groups identical gives H = 0.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<(f64, f64)> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "Kruskal-Wallis needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::EmptyInput("Kruskal-Wallis group is empty"));
    }
    let n_total: usize = groups.iter().map(Vec::len).sum();
    if n_total < 3 {
        return Err(Error::InsufficientData(
            "Kruskal-Wallis needs at least 3 observations".into(),
        ));
    }

    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = midranks(&pooled);

    let n = n_total as f64;
    let mut h = 0.0;
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        h += r * r / g.len() as f64;
        offset += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    // Tie correction: 1 - sum(t^3 - t) / (n^3 - n).
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    let correction = 1.0 - tie_sum / (n * n * n - n);
    if correction <= 0.0 {
        // Every observation tied; no evidence of any difference.
        return Ok((0.0, 1.0));
    }
    h /= correction;
    // Guard tiny negative values from float cancellation.
    h = h.max(0.0);

    let df = (groups.len() - 1) as f64;
    let chi = ChiSquared::new(df).expect("df >= 1");
    let p = 1.0 - chi.cdf(h);
    Ok((h, p))
}

/// Bonferroni-adjusted significance flags at family level alpha = 0.05:
/// significant iff p < 0.05 / m.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<bool> {
    assert!(m >= 1, "Bonferroni needs at least one comparison");
    let threshold = 0.05 / m as f64;
    p_values.iter().map(|&p| p < threshold).collect()
}

/// Which direction makes a summarized value better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueOrder {
    HigherIsBetter,
    LowerIsBetter,
}

/// Summary row for one algorithm on one instance, following the published
/// table layout: spread statistics plus the 1-based indices of algorithms
/// this one significantly beats.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub best: f64,
    pub worst: f64,
    pub median: f64,
    pub beats: Vec<usize>,
}

/// Builds the per-algorithm summary table with pairwise significance.
///
/// Pairwise decisions use two-group Kruskal–Wallis tests with Bonferroni
/// correction over all pairs; algorithm i "beats" j when the pair differs
/// significantly and i has the better median.
pub fn summarize(groups: &[(String, Vec<f64>)], order: ValueOrder) -> Result<Vec<AlgorithmSummary>> {
    if groups.is_empty() {
        return Err(Error::EmptyInput("summarize needs at least one group"));
    }
    let mut rows = Vec::with_capacity(groups.len());
    for (name, values) in groups {
        let ms = mean_std(values)?;
        let med = median(values)?;
        let (mut best, mut worst) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in values {
            best = best.min(v);
            worst = worst.max(v);
        }
        if order == ValueOrder::HigherIsBetter {
            std::mem::swap(&mut best, &mut worst);
        }
        rows.push(AlgorithmSummary {
            algorithm: name.clone(),
            n: values.len(),
            mean: ms.mean,
            std: ms.std,
            best,
            worst,
            median: med,
            beats: Vec::new(),
        });
    }

    let a = groups.len();
    if a >= 2 {
        let pairs: Vec<(usize, usize)> = (0..a)
            .flat_map(|i| ((i + 1)..a).map(move |j| (i, j)))
            .collect();
        let p_values: Vec<f64> = pairs
            .iter()
            .map(|&(i, j)| kruskal_wallis(&[groups[i].1.clone(), groups[j].1.clone()]).map(|(_, p)| p))
            .collect::<Result<_>>()?;
        let significant = bonferroni(&p_values, pairs.len());
        for (&(i, j), &sig) in pairs.iter().zip(&significant) {
            if !sig {
                continue;
            }
            let (mi, mj) = (rows[i].median, rows[j].median);
            let i_better = match order {
                ValueOrder::HigherIsBetter => mi > mj,
                ValueOrder::LowerIsBetter => mi < mj,
            };
            if mi == mj {
                continue;
            }
            if i_better {
                rows[i].beats.push(j + 1);
            } else {
                rows[j].beats.push(i + 1);
            }
        }
    }
    Ok(rows)
}
