//! Re-derives outcome regression coefficients from composition/outcome
//! datasets: ilr design matrices, ordinary least squares, and the nested
//! F-test that decides whether the quadratic ilr terms stay in the model.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::composition::{ilr, ActivityComposition};
use crate::error::{Error, Result};

/// Number of parameters in the linear ilr model (intercept + z1..z3).
pub const LINEAR_PARAMS: usize = 4;
/// Number of parameters in the full quadratic ilr model.
pub const QUADRATIC_PARAMS: usize = 10;

/// Rows of (composition, observed outcome value).
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    rows: Vec<(ActivityComposition, f64)>,
}

impl Dataset {
    pub fn new(rows: Vec<(ActivityComposition, f64)>) -> Self {
        Self { rows }
    }

    pub fn push(&mut self, x: ActivityComposition, y: f64) {
        self.rows.push((x, y));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[(ActivityComposition, f64)] {
        &self.rows
    }

    pub fn outcomes(&self) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|(_, y)| *y))
    }
}

/// Design matrix in ilr coordinates with columns ordered
/// [1, z1, z2, z3] and, when `quadratic`, [z1^2, z1z2, z1z3, z2^2, z2z3, z3^2].
pub fn ilr_design_matrix(data: &Dataset, quadratic: bool) -> DMatrix<f64> {
    let cols = if quadratic { QUADRATIC_PARAMS } else { LINEAR_PARAMS };
    let mut m = DMatrix::zeros(data.len(), cols);
    for (r, (x, _)) in data.rows().iter().enumerate() {
        let z = ilr(x);
        m[(r, 0)] = 1.0;
        m[(r, 1)] = z.z1;
        m[(r, 2)] = z.z2;
        m[(r, 3)] = z.z3;
        if quadratic {
            m[(r, 4)] = z.z1 * z.z1;
            m[(r, 5)] = z.z1 * z.z2;
            m[(r, 6)] = z.z1 * z.z3;
            m[(r, 7)] = z.z2 * z.z2;
            m[(r, 8)] = z.z2 * z.z3;
            m[(r, 9)] = z.z3 * z.z3;
        }
    }
    m
}

/// A least-squares fit: coefficient estimates and the residual sum of squares.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: DVector<f64>,
    pub rss: f64,
    pub rows: usize,
    pub params: usize,
}

/// Ordinary least squares via singular value decomposition.
///
/// The SVD route keeps the near-collinear quadratic design well-conditioned
/// and exposes rank deficiency directly: raw time-use predictors sum to a
/// constant, so a design built from them (plus intercept) is singular and
/// rejected here rather than silently producing garbage.
pub fn ols_fit(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let (rows, cols) = design.shape();
    if rows != y.len() {
        return Err(Error::InsufficientData(format!(
            "design has {rows} rows but {} responses",
            y.len()
        )));
    }
    if rows <= cols {
        return Err(Error::InsufficientData(format!(
            "need more than {cols} rows for {cols} parameters, got {rows}"
        )));
    }
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let tol = f64::EPSILON * max_sv * rows.max(cols) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < cols {
        return Err(Error::SingularDesign(format!(
            "design rank {rank} < {cols} columns (linearly dependent predictors)"
        )));
    }
    let beta = svd
        .solve(y, tol)
        .map_err(|e| Error::SingularDesign(e.to_string()))?;
    let residuals = y - design * &beta;
    Ok(OlsFit {
        coefficients: beta,
        rss: residuals.norm_squared(),
        rows,
        params: cols,
    })
}

/// Outcome of the nested-model ANOVA F-test at alpha = 0.05.
#[derive(Debug, Clone, Copy)]
pub struct FTestResult {
    pub f_statistic: f64,
    pub p_value: f64,
    /// True when the quadratic terms significantly improve the fit.
    pub keep_quadratic: bool,
}

/// Tests the six quadratic ilr terms against the linear model:
/// `F = ((RSS_lin - RSS_quad)/6) / (RSS_quad/(n-10))`.
pub fn quadratic_f_test(linear: &OlsFit, quadratic: &OlsFit, n: usize) -> Result<FTestResult> {
    if linear.params != LINEAR_PARAMS || quadratic.params != QUADRATIC_PARAMS {
        return Err(Error::Config(
            "quadratic_f_test expects a 4-parameter and a 10-parameter fit".into(),
        ));
    }
    if linear.rows != n || quadratic.rows != n {
        return Err(Error::Config(
            "both fits must come from the same n-row dataset".into(),
        ));
    }
    if n <= QUADRATIC_PARAMS {
        return Err(Error::InsufficientData(format!(
            "F-test needs n > {QUADRATIC_PARAMS}, got {n}"
        )));
    }
    let df1 = (QUADRATIC_PARAMS - LINEAR_PARAMS) as f64;
    let df2 = (n - QUADRATIC_PARAMS) as f64;
    let improvement = (linear.rss - quadratic.rss).max(0.0);
    if quadratic.rss <= 0.0 {
        // Perfect quadratic fit: infinitely strong evidence unless the
        // linear fit is also perfect.
        let keep = improvement > 0.0;
        return Ok(FTestResult {
            f_statistic: if keep { f64::INFINITY } else { 0.0 },
            p_value: if keep { 0.0 } else { 1.0 },
            keep_quadratic: keep,
        });
    }
    let f = (improvement / df1) / (quadratic.rss / df2);
    let dist = FisherSnedecor::new(df1, df2).expect("valid degrees of freedom");
    let p = 1.0 - dist.cdf(f);
    Ok(FTestResult {
        f_statistic: f,
        p_value: p,
        keep_quadratic: p < 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::ilr_parts;
    use crate::objectives::{evaluate, outcome_model, Outcome};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_dataset<F: Fn(&ActivityComposition) -> f64>(
        n: usize,
        seed: u64,
        noise: f64,
        f: F,
    ) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut data = Dataset::default();
        for _ in 0..n {
            let raw = [
                rng.gen_range(200.0..800.0),
                rng.gen_range(200.0..900.0),
                rng.gen_range(100.0..500.0),
                rng.gen_range(1.0..250.0),
            ];
            let x = ActivityComposition::closure(raw).unwrap();
            let eps = if noise > 0.0 {
                // Box-Muller keeps the dev-dependencies small.
                let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
                noise * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            } else {
                0.0
            };
            data.push(x, f(&x) + eps);
        }
        data
    }

    #[test]
    fn design_row_for_equal_parts_is_intercept_only() {
        let x = ActivityComposition::closure([360.0; 4]).unwrap();
        let data = Dataset::new(vec![(x, 1.0); 12]);
        let m = ilr_design_matrix(&data, true);
        assert_eq!(m.ncols(), QUADRATIC_PARAMS);
        assert_eq!(m[(0, 0)], 1.0);
        for c in 1..QUADRATIC_PARAMS {
            assert_eq!(m[(0, c)], 0.0);
        }
        assert_eq!(ilr_design_matrix(&data, false).ncols(), LINEAR_PARAMS);
    }

    #[test]
    fn design_matches_per_row_ilr_recomputation() {
        let data = random_dataset(20, 3, 0.0, |_| 0.0);
        let m = ilr_design_matrix(&data, true);
        for (r, (x, _)) in data.rows().iter().enumerate() {
            let [x1, x2, x3, x4] = x.minutes();
            let z = ilr_parts(x1, x2, x3, x4);
            assert_abs_diff_eq!(m[(r, 1)], z.z1, epsilon = 1e-15);
            assert_abs_diff_eq!(m[(r, 5)], z.z1 * z.z2, epsilon = 1e-15);
            assert_abs_diff_eq!(m[(r, 9)], z.z3 * z.z3, epsilon = 1e-15);
        }
    }

    #[test]
    fn noiseless_fit_recovers_generating_coefficients() {
        let model = outcome_model(Outcome::Fitness);
        let data = random_dataset(200, 11, 0.0, |x| evaluate(model, x));
        let design = ilr_design_matrix(&data, true);
        let fit = ols_fit(&design, &data.outcomes()).unwrap();
        for (est, truth) in fit.coefficients.iter().zip(model.coefficients) {
            assert_abs_diff_eq!(*est, truth, epsilon = 1e-6);
        }
        assert!(fit.rss < 1e-12);
    }

    #[test]
    fn constant_outcome_gives_intercept_only() {
        let data = random_dataset(50, 5, 0.0, |_| 7.5);
        let design = ilr_design_matrix(&data, true);
        let fit = ols_fit(&design, &data.outcomes()).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 7.5, epsilon = 1e-9);
        for c in 1..QUADRATIC_PARAMS {
            assert_abs_diff_eq!(fit.coefficients[c], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn raw_minutes_design_is_singular() {
        // Raw durations sum to 1440, so [1, x1..x4] is rank deficient.
        let data = random_dataset(40, 9, 0.0, |_| 1.0);
        let mut design = DMatrix::zeros(data.len(), 5);
        for (r, (x, _)) in data.rows().iter().enumerate() {
            design[(r, 0)] = 1.0;
            for (c, v) in x.minutes().iter().enumerate() {
                design[(r, c + 1)] = *v;
            }
        }
        match ols_fit(&design, &data.outcomes()) {
            Err(Error::SingularDesign(_)) => {}
            other => panic!("expected singular design error, got {other:?}"),
        }
    }

    #[test]
    fn ols_requires_more_rows_than_columns() {
        let data = random_dataset(8, 13, 0.0, |_| 1.0);
        let design = ilr_design_matrix(&data, true);
        assert!(ols_fit(&design, &data.outcomes()).is_err());
    }

    #[test]
    fn predictions_invariant_under_row_rescaling() {
        let model = outcome_model(Outcome::Fitness);
        let data = random_dataset(100, 17, 0.0, |x| evaluate(model, x));
        let design = ilr_design_matrix(&data, true);
        let fit = ols_fit(&design, &data.outcomes()).unwrap();

        // Rescale raw minutes per row; closure restores the same composition.
        let scaled = Dataset::new(
            data.rows()
                .iter()
                .enumerate()
                .map(|(i, (x, y))| {
                    let k = 1.0 + (i % 7) as f64;
                    let x2 = ActivityComposition::closure(x.minutes().map(|v| v * k)).unwrap();
                    (x2, *y)
                })
                .collect(),
        );
        let design2 = ilr_design_matrix(&scaled, true);
        let pred1 = design * &fit.coefficients;
        let pred2 = design2 * &fit.coefficients;
        for (a, b) in pred1.iter().zip(pred2.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn f_test_keeps_quadratic_under_the_alternative() {
        let model = outcome_model(Outcome::Fitness);
        let data = random_dataset(500, 23, 0.05, |x| evaluate(model, x));
        let lin = ols_fit(&ilr_design_matrix(&data, false), &data.outcomes()).unwrap();
        let quad = ols_fit(&ilr_design_matrix(&data, true), &data.outcomes()).unwrap();
        let res = quadratic_f_test(&lin, &quad, data.len()).unwrap();
        assert!(res.keep_quadratic, "F = {}, p = {}", res.f_statistic, res.p_value);
    }

    #[test]
    fn f_test_rejects_quadratic_under_the_null() {
        // Linear generating model plus noise: the quadratic terms should be
        // kept in at most alpha-level fraction of datasets. 50 seeded
        // datasets at n = 500 give a comfortable margin for >= 90%.
        let model = outcome_model(Outcome::LifeSatisfaction);
        let mut rejected = 0;
        let trials = 50;
        for seed in 0..trials {
            let data = random_dataset(500, 1000 + seed, 50.0, |x| evaluate(model, x));
            let lin = ols_fit(&ilr_design_matrix(&data, false), &data.outcomes()).unwrap();
            let quad = ols_fit(&ilr_design_matrix(&data, true), &data.outcomes()).unwrap();
            let res = quadratic_f_test(&lin, &quad, data.len()).unwrap();
            if !res.keep_quadratic {
                rejected += 1;
            }
        }
        assert!(
            rejected * 10 >= trials * 9,
            "quadratic dropped in only {rejected}/{trials} null datasets"
        );
    }

    #[test]
    fn f_test_edges() {
        let fit = |params: usize, rows: usize, rss: f64| OlsFit {
            coefficients: DVector::zeros(params),
            rss,
            rows,
            params,
        };
        // Equal residual sums: F = 0, quadratic dropped.
        let res = quadratic_f_test(&fit(4, 20, 5.0), &fit(10, 20, 5.0), 20).unwrap();
        assert_eq!(res.f_statistic, 0.0);
        assert!(!res.keep_quadratic);

        // No residual degrees of freedom left.
        assert!(quadratic_f_test(&fit(4, 10, 5.0), &fit(10, 10, 1.0), 10).is_err());
        // Mismatched model sizes.
        assert!(quadratic_f_test(&fit(4, 20, 5.0), &fit(9, 20, 1.0), 20).is_err());
    }
}
