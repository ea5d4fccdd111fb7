//! Covariance matrix adaptation evolution strategy with the canonical
//! (mu/mu_w, lambda) update rules: weighted recombination, cumulative step
//! size control, and rank-1 plus rank-mu covariance updates.
//!
//! The benchmark search runs in a unit-cube parameterization of the
//! bounded minute space: internal samples stay unclamped so the covariance
//! adapts on the real distribution, while evaluation clamps to the cube,
//! decodes to minutes, and applies the per-day closure.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Evaluator, RunRecord, RunTracker};
use crate::error::{Error, Result};
use crate::objectives::{lex_compare, ScalarFitness};

/// CMA-ES control parameters. Published settings: lambda = 10, initial
/// step 0.3 on the unit-normalized search cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmaesConfig {
    pub lambda: usize,
    pub sigma0: f64,
}

impl Default for CmaesConfig {
    fn default() -> Self {
        Self { lambda: 10, sigma0: 0.3 }
    }
}

impl CmaesConfig {
    fn validate(&self) -> Result<()> {
        if self.lambda < 2 {
            return Err(Error::Config(format!(
                "CMA-ES lambda must be at least 2, got {}",
                self.lambda
            )));
        }
        if !(self.sigma0 > 0.0) {
            return Err(Error::Config(format!(
                "CMA-ES initial step size must be positive, got {}",
                self.sigma0
            )));
        }
        Ok(())
    }
}

/// Full strategy state with the standard parameter settings derived from
/// (dimension, lambda).
pub(crate) struct CmaesState {
    dim: usize,
    lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c1: f64,
    c_mu: f64,
    chi_n: f64,
    pub(crate) mean: DVector<f64>,
    pub(crate) sigma: f64,
    cov: DMatrix<f64>,
    eigen_basis: DMatrix<f64>,
    eigen_scale: DVector<f64>,
    path_sigma: DVector<f64>,
    path_c: DVector<f64>,
    generation: usize,
}

impl CmaesState {
    pub(crate) fn new(mean: DVector<f64>, sigma0: f64, lambda: usize) -> Self {
        let n = mean.len();
        let nf = n as f64;
        let mu = lambda / 2;
        let mut weights: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c1 = 2.0 / ((nf + 1.3) * (nf + 1.3) + mu_eff);
        let c_mu = (2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0) * (nf + 2.0) + mu_eff))
            .min(1.0 - c1);
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        Self {
            dim: n,
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c1,
            c_mu,
            chi_n,
            mean,
            sigma: sigma0,
            cov: DMatrix::identity(n, n),
            eigen_basis: DMatrix::identity(n, n),
            eigen_scale: DVector::from_element(n, 1.0),
            path_sigma: DVector::zeros(n),
            path_c: DVector::zeros(n),
            generation: 0,
        }
    }

    pub(crate) fn lambda(&self) -> usize {
        self.lambda
    }


    /// Draws lambda offspring `x = m + sigma B D z` with z standard normal.
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> Vec<DVector<f64>> {
        (0..self.lambda)
            .map(|_| {
                let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let scaled = z.component_mul(&self.eigen_scale);
                &self.mean + self.sigma * (&self.eigen_basis * scaled)
            })
            .collect()
    }

    /// Applies one generation update given the offspring sorted best first.
    pub(crate) fn update(&mut self, ranked: &[DVector<f64>]) {
        assert!(ranked.len() >= self.mu, "need at least mu ranked offspring");
        let old_mean = self.mean.clone();

        let selected_steps: Vec<DVector<f64>> = ranked[..self.mu]
            .iter()
            .map(|x| (x - &old_mean) / self.sigma)
            .collect();
        let mut step_mean = DVector::zeros(self.dim);
        for (w, y) in self.weights.iter().zip(&selected_steps) {
            step_mean += *w * y;
        }
        self.mean = &old_mean + self.sigma * &step_mean;

        // C^(-1/2) y = B diag(1/d) B^T y.
        let mut whitened = self.eigen_basis.transpose() * &step_mean;
        for (v, d) in whitened.iter_mut().zip(self.eigen_scale.iter()) {
            *v /= d.max(1e-20);
        }
        let whitened = &self.eigen_basis * whitened;

        let cs_gain = (self.c_sigma * (2.0 - self.c_sigma) * self.mu_eff).sqrt();
        self.path_sigma = (1.0 - self.c_sigma) * &self.path_sigma + cs_gain * whitened;

        self.generation += 1;
        let ps_norm = self.path_sigma.norm();
        let expected = (1.0 - (1.0 - self.c_sigma).powi(2 * self.generation as i32)).sqrt();
        let h_sigma = if ps_norm / expected / self.chi_n < 1.4 + 2.0 / (self.dim as f64 + 1.0) {
            1.0
        } else {
            0.0
        };

        let cc_gain = (self.c_c * (2.0 - self.c_c) * self.mu_eff).sqrt();
        self.path_c = (1.0 - self.c_c) * &self.path_c + h_sigma * cc_gain * &step_mean;

        let delta_h = (1.0 - h_sigma) * self.c_c * (2.0 - self.c_c);
        let decay = 1.0 - self.c1 - self.c_mu + self.c1 * delta_h;
        let mut cov = decay * &self.cov;
        cov += self.c1 * (&self.path_c * self.path_c.transpose());
        for (w, y) in self.weights.iter().zip(&selected_steps) {
            cov += self.c_mu * *w * (y * y.transpose());
        }
        self.cov = cov;

        self.sigma *= ((self.c_sigma / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        if !self.sigma.is_finite() {
            self.sigma = 1e-8;
        }
        self.sigma = self.sigma.clamp(1e-16, 1e8);

        self.refresh_eigen();
    }

    fn refresh_eigen(&mut self) {
        // Symmetrize before decomposing; the update keeps C symmetric up
        // to rounding.
        let n = self.dim;
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (self.cov[(i, j)] + self.cov[(j, i)]);
                self.cov[(i, j)] = avg;
                self.cov[(j, i)] = avg;
            }
        }
        if self.cov.iter().any(|v| !v.is_finite()) {
            self.cov = DMatrix::identity(n, n);
            self.path_c = DVector::zeros(n);
            self.path_sigma = DVector::zeros(n);
        }
        let eigen = self.cov.clone().symmetric_eigen();
        let max_ev = eigen.eigenvalues.iter().fold(1e-30f64, |a, &b| a.max(b));
        // Floor eigenvalues to keep the condition number bounded.
        let floor = max_ev * 1e-14;
        self.eigen_scale = eigen.eigenvalues.map(|v| v.max(floor).sqrt());
        self.eigen_basis = eigen.eigenvectors;
    }
}

pub(super) fn run(
    cfg: &CmaesConfig,
    ev: &Evaluator,
    budget: usize,
    rng: &mut ChaCha12Rng,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    let dim = ev.space().dim();
    let lower = ev.space().lower().to_vec();
    let upper = ev.space().upper().to_vec();
    let decode = |u: &DVector<f64>| -> Vec<f64> {
        let clamped: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(j, &v)| lower[j] + v.clamp(0.0, 1.0) * (upper[j] - lower[j]))
            .collect();
        ev.space().repair(&clamped)
    };

    // Samples outside the cube rank as additionally infeasible by their
    // excursion distance (in minutes). Clamping alone leaves the ranking
    // flat once the distribution straddles a face, which stalls the step
    // size far from the optimum; the distance penalty is the standard
    // boundary handling and restores a selection gradient there.
    let cube_excursion = |u: &DVector<f64>| -> f64 {
        u.iter()
            .enumerate()
            .map(|(j, &v)| (v - v.clamp(0.0, 1.0)).abs() * (upper[j] - lower[j]))
            .sum()
    };

    let direction = ev.direction();
    let mean0 = DVector::from_fn(dim, |_, _| rng.gen::<f64>());
    let mut es = CmaesState::new(mean0, cfg.sigma0, cfg.lambda);

    let mut tracker: Option<RunTracker> = None;
    let mut evals = 0;
    while evals < budget {
        let samples = es.sample(rng);
        let take = es.lambda().min(budget - evals);
        let mut scored: Vec<(ScalarFitness, usize)> = Vec::with_capacity(take);
        for (i, sample) in samples.iter().take(take).enumerate() {
            let minutes = decode(sample);
            let fitness = ev.fitness(&minutes);
            match tracker.as_mut() {
                Some(t) => t.offer(&minutes, fitness),
                None => tracker = Some(RunTracker::new(direction, &minutes, fitness)),
            }
            let ranking = ScalarFitness {
                violation: fitness.violation + cube_excursion(sample),
                value: fitness.value,
            };
            scored.push((ranking, i));
        }
        evals += take;
        if take == es.lambda() {
            scored.sort_by(|a, b| lex_compare(direction, &a.0, &b.0).then(a.1.cmp(&b.1)));
            let ranked: Vec<DVector<f64>> =
                scored.iter().map(|&(_, i)| samples[i].clone()).collect();
            es.update(&ranked);
        }
        tracker.as_mut().expect("scored at least one sample").end_generation();
    }
    Ok(tracker.expect("budget >= lambda >= 1").finish(seed, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::DayType;
    use crate::objectives::Outcome;
    use crate::opt_single::{run_single, SingleInstance, SingleSpec};
    use rand::SeedableRng;

    fn sphere(x: &DVector<f64>) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    /// Minimize a raw function with the bare strategy state.
    fn minimize<R: Rng>(
        f: impl Fn(&DVector<f64>) -> f64,
        mean0: DVector<f64>,
        sigma0: f64,
        lambda: usize,
        budget: usize,
        rng: &mut R,
    ) -> (f64, f64) {
        let mut es = CmaesState::new(mean0, sigma0, lambda);
        let mut best = f64::INFINITY;
        let mut min_sigma = f64::INFINITY;
        let mut evals = 0;
        while evals + lambda <= budget {
            let samples = es.sample(rng);
            let mut scored: Vec<(f64, usize)> = samples
                .iter()
                .enumerate()
                .map(|(i, x)| (f(x), i))
                .collect();
            evals += lambda;
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            best = best.min(scored[0].0);
            let ranked: Vec<DVector<f64>> =
                scored.iter().map(|&(_, i)| samples[i].clone()).collect();
            es.update(&ranked);
            min_sigma = min_sigma.min(es.sigma);
        }
        (best, min_sigma)
    }

    #[test]
    fn solves_sphere_from_cube_center() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let mean0 = DVector::from_element(4, 0.5);
        let (best, min_sigma) = minimize(sphere, mean0, 0.3, 10, 5_000, &mut rng);
        assert!(best < 1e-6, "best {best} after 5000 evaluations");
        assert!(min_sigma > 0.0, "sigma collapsed to zero");
    }

    #[test]
    fn sigma_stays_positive_across_seeds() {
        for seed in 0..5 {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mean0 = DVector::from_element(6, 0.5);
            let (_, min_sigma) = minimize(sphere, mean0, 0.3, 10, 2_000, &mut rng);
            assert!(min_sigma > 0.0, "seed {seed}");
        }
    }

    #[test]
    fn recombination_weights_are_normalized_and_decreasing() {
        let es = CmaesState::new(DVector::zeros(4), 0.3, 10);
        assert_eq!(es.mu, 5);
        let sum: f64 = es.weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for w in es.weights.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(es.mu_eff > 1.0 && es.mu_eff <= es.mu as f64);
    }

    #[test]
    fn reaches_published_mean_level_on_studious_day_fitness() {
        // The published CMA-ES mean on this instance is 60.1741; a correct
        // implementation should at least reach the low 60s consistently.
        let inst = SingleInstance::day(Outcome::Fitness, DayType::Studious);
        let spec = SingleSpec::Cmaes(CmaesConfig::default());
        let mut hits = 0;
        for seed in 0..10 {
            let rec = run_single(&spec, &inst, 25_000, seed).unwrap();
            if rec.best.violation == 0.0 && rec.best.value >= 60.0 {
                hits += 1;
            }
        }
        assert!(hits >= 8, "only {hits}/10 seeds reached 60.0");
    }

    #[test]
    fn config_validation() {
        assert!(CmaesConfig { lambda: 1, ..CmaesConfig::default() }.validate().is_err());
        assert!(CmaesConfig { sigma0: 0.0, ..CmaesConfig::default() }.validate().is_err());
        assert!(CmaesConfig::default().validate().is_ok());
    }
}
