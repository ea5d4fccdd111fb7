//! Particle swarm optimization with inertia weight and a per-dimension
//! velocity cap.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::{Evaluator, RunRecord, RunTracker, SearchSpace};
use crate::error::{Error, Result};

/// PSO control parameters. Published settings: swarm 50, c1 = c2 = 1.
/// The inertia weight is unstated in the source experiments; 0.7298 is the
/// constriction-equivalent default.
/// How the stochastic attraction toward the personal and neighbourhood
/// bests is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsoSampling {
    /// Independent uniform coefficients per dimension (classic).
    PerDimension,
    /// One uniform coefficient per attractor per particle; pulls stay
    /// parallel to the attractor differences, which preserves alignment
    /// with active constraint faces.
    PerParticle,
    /// Uniform sample in the ball around the centre of gravity of
    /// (position, personal best, neighbourhood best) — the rotation
    /// invariant update of standard PSO 2011.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia: f64,
    pub sampling: PsoSampling,
    /// Velocity cap per dimension as a fraction of the bound range;
    /// `None` disables the cap.
    pub velocity_cap_fraction: Option<f64>,
    /// Informants per particle for the adaptive random topology; each
    /// particle follows the best personal best among its informers, and
    /// the topology is redrawn after any iteration that fails to improve
    /// the global best. `None` uses the fully connected (global best)
    /// topology, which stagnates early on ridge-shaped optima.
    pub informants: Option<usize>,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm: 50,
            c1: 1.0,
            c2: 1.0,
            inertia: 0.7298,
            sampling: PsoSampling::PerParticle,
            velocity_cap_fraction: Some(0.5),
            informants: Some(3),
        }
    }
}

impl PsoConfig {
    fn validate(&self) -> Result<()> {
        if self.swarm < 2 {
            return Err(Error::Config(format!("PSO swarm must be at least 2, got {}", self.swarm)));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::Config("PSO acceleration coefficients must be non-negative".into()));
        }
        Ok(())
    }
}

/// One particle: raw position (minute space) and velocity.
#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// Canonical velocity/position update:
/// `v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)`, `x <- x + v`,
/// with independent uniform r1, r2 per dimension and the velocity capped
/// to a fraction of each variable's bound range. `inertia` is the current
/// weight w (constant or scheduled by the caller).
///
/// The caller repairs and evaluates the new position afterwards.
pub fn pso_step<R: Rng>(
    particle: &mut Particle,
    pbest: &[f64],
    gbest: &[f64],
    cfg: &PsoConfig,
    inertia: f64,
    space: &SearchSpace,
    rng: &mut R,
) {
    let dim = particle.position.len();
    debug_assert_eq!(dim, pbest.len());
    debug_assert_eq!(dim, gbest.len());
    match cfg.sampling {
        PsoSampling::PerDimension => {
            for j in 0..dim {
                let r1 = rng.gen::<f64>();
                let r2 = rng.gen::<f64>();
                let x = particle.position[j];
                let v = inertia * particle.velocity[j]
                    + cfg.c1 * r1 * (pbest[j] - x)
                    + cfg.c2 * r2 * (gbest[j] - x);
                particle.velocity[j] = v;
            }
        }
        PsoSampling::PerParticle => {
            let r1 = rng.gen::<f64>();
            let r2 = rng.gen::<f64>();
            for j in 0..dim {
                let x = particle.position[j];
                let v = inertia * particle.velocity[j]
                    + cfg.c1 * r1 * (pbest[j] - x)
                    + cfg.c2 * r2 * (gbest[j] - x);
                particle.velocity[j] = v;
            }
        }
        PsoSampling::Ball => {
            // Centre of gravity of the three guides; when the particle is
            // its own neighbourhood best the social point drops out.
            let own_best = pbest
                .iter()
                .zip(gbest)
                .all(|(a, b)| a == b);
            let mut center = vec![0.0; dim];
            for j in 0..dim {
                let x = particle.position[j];
                let p = x + cfg.c1 * (pbest[j] - x);
                if own_best {
                    center[j] = (x + p) / 2.0;
                } else {
                    let l = x + cfg.c2 * (gbest[j] - x);
                    center[j] = (x + p + l) / 3.0;
                }
            }
            let radius: f64 = center
                .iter()
                .zip(&particle.position)
                .map(|(g, x)| (g - x) * (g - x))
                .sum::<f64>()
                .sqrt();
            // Uniform draw inside the ball.
            let mut dir: Vec<f64> =
                (0..dim).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let norm: f64 = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-300);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            for d in &mut dir {
                *d *= r / norm;
            }
            for j in 0..dim {
                let v = inertia * particle.velocity[j] + center[j] + dir[j]
                    - particle.position[j];
                particle.velocity[j] = v;
            }
        }
    }
    for j in 0..dim {
        if let Some(frac) = cfg.velocity_cap_fraction {
            let cap = frac * (space.upper()[j] - space.lower()[j]);
            particle.velocity[j] = particle.velocity[j].clamp(-cap, cap);
        }
        particle.position[j] += particle.velocity[j];
    }
}

fn draw_informers<R: Rng>(rng: &mut R, swarm: usize, k: usize) -> Vec<Vec<usize>> {
    // Each particle informs itself and k uniformly drawn particles.
    let mut informers: Vec<Vec<usize>> = (0..swarm).map(|i| vec![i]).collect();
    for i in 0..swarm {
        for _ in 0..k {
            let t = rng.gen_range(0..swarm);
            if !informers[t].contains(&i) {
                informers[t].push(i);
            }
        }
    }
    informers
}

pub(super) fn run(
    cfg: &PsoConfig,
    ev: &Evaluator,
    budget: usize,
    rng: &mut ChaCha12Rng,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    let direction = ev.direction();
    let dim = ev.space().dim();

    let mut particles: Vec<Particle> = (0..cfg.swarm)
        .map(|_| Particle {
            position: ev.space().sample(rng),
            velocity: vec![0.0; dim],
        })
        .collect();
    let mut pbest: Vec<Vec<f64>> = particles.iter().map(|p| p.position.clone()).collect();
    let mut pbest_fit: Vec<_> = pbest.iter().map(|x| ev.fitness(x)).collect();
    let mut evals = cfg.swarm;

    let mut gbest = pbest[0].clone();
    let mut gbest_fit = pbest_fit[0];
    for i in 1..cfg.swarm {
        if pbest_fit[i].better_than(&gbest_fit, direction) {
            gbest = pbest[i].clone();
            gbest_fit = pbest_fit[i];
        }
    }
    let mut tracker = RunTracker::new(direction, &gbest, gbest_fit);
    tracker.end_generation();

    let mut informers = cfg
        .informants
        .map(|k| draw_informers(rng, cfg.swarm, k));

    while evals < budget {
        let mut improved = false;
        for i in 0..cfg.swarm {
            if evals >= budget {
                break;
            }
            // The guide is the best personal best among this particle's
            // informers (the whole swarm without a topology).
            let guide = match &informers {
                Some(links) => {
                    let mut l = i;
                    for &s in &links[i] {
                        if pbest_fit[s].better_than(&pbest_fit[l], direction) {
                            l = s;
                        }
                    }
                    pbest[l].clone()
                }
                None => gbest.clone(),
            };
            let particle = &mut particles[i];
            pso_step(particle, &pbest[i], &guide, cfg, cfg.inertia, ev.space(), rng);
            // Positions stay raw; the closure enters only through the
            // evaluated candidate, so the swarm dynamics are undisturbed
            // by the rescaling (the fitness is scale-invariant anyway).
            let repaired = ev.space().repair(&particle.position);
            let fit = ev.fitness(&repaired);
            evals += 1;
            if fit.better_than(&pbest_fit[i], direction) {
                pbest[i].clone_from(&particle.position);
                pbest_fit[i] = fit;
                if fit.better_than(&gbest_fit, direction) {
                    gbest.clone_from(&particle.position);
                    gbest_fit = fit;
                    tracker.offer(&repaired, gbest_fit);
                    improved = true;
                }
            }
        }
        if !improved {
            if let (Some(links), Some(k)) = (informers.as_mut(), cfg.informants) {
                *links = draw_informers(rng, cfg.swarm, k);
            }
        }
        tracker.end_generation();
    }
    Ok(tracker.finish(seed, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::DayType;
    use crate::objectives::Outcome;
    use crate::opt_single::{run_single, Domain, SingleInstance, SingleSpec};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn day_space() -> SearchSpace {
        SearchSpace::for_domain(Domain::Day(DayType::Studious)).unwrap()
    }

    #[test]
    fn converged_swarm_is_a_fixed_point() {
        let space = day_space();
        let x = vec![390.0, 690.0, 150.0, 210.0];
        let mut p = Particle { position: x.clone(), velocity: vec![0.0; 4] };
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        pso_step(&mut p, &x, &x, &PsoConfig::default(), 0.7298, &space, &mut rng);
        assert_eq!(p.position, x);
        assert_eq!(p.velocity, vec![0.0; 4]);
    }

    /// RNG whose uniform doubles are as close to 1 as the generator allows.
    struct MaxRng;
    impl rand::RngCore for MaxRng {
        fn next_u32(&mut self) -> u32 {
            u32::MAX
        }
        fn next_u64(&mut self) -> u64 {
            u64::MAX
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0xFF);
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
            dest.fill(0xFF);
            Ok(())
        }
    }

    #[test]
    fn pure_social_pull_jumps_to_global_best() {
        let space = day_space();
        let start = vec![500.0, 700.0, 160.0, 80.0];
        let gbest = vec![390.0, 690.0, 150.0, 210.0];
        let cfg = PsoConfig {
            inertia: 0.0,
            c1: 0.0,
            c2: 1.0,
            velocity_cap_fraction: None,
            ..PsoConfig::default()
        };
        let mut p = Particle { position: start.clone(), velocity: vec![0.0; 4] };
        pso_step(&mut p, &start, &gbest, &cfg, 0.0, &space, &mut MaxRng);
        for (got, want) in p.position.iter().zip(&gbest) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-9);
        }
    }

    #[test]
    fn velocity_respects_cap() {
        let space = day_space();
        let cfg = PsoConfig::default(); // cap = 0.5 * range
        let start = vec![360.0, 690.0, 150.0, 1.0];
        let far = vec![720.0, 900.0, 480.0, 210.0];
        let mut p = Particle { position: start.clone(), velocity: vec![0.0; 4] };
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10 {
            pso_step(&mut p, &far, &far, &cfg, cfg.inertia, &space, &mut rng);
            for j in 0..4 {
                let cap = 0.5 * (space.upper()[j] - space.lower()[j]);
                assert!(p.velocity[j].abs() <= cap + 1e-12);
            }
        }
    }

    #[test]
    fn two_step_trajectory_is_deterministic() {
        let space = day_space();
        let cfg = PsoConfig::default();
        let run_two_steps = |seed: u64| {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mut p = Particle {
                position: vec![500.0, 700.0, 160.0, 80.0],
                velocity: vec![0.0; 4],
            };
            let pbest = vec![450.0, 710.0, 155.0, 125.0];
            let gbest = vec![390.0, 690.0, 150.0, 210.0];
            for _ in 0..2 {
                pso_step(&mut p, &pbest, &gbest, &cfg, cfg.inertia, &space, &mut rng);
            }
            p
        };
        let a = run_two_steps(11);
        let b = run_two_steps(11);
        assert_eq!(a.position, b.position);
        assert_eq!(a.velocity, b.velocity);
        let c = run_two_steps(12);
        assert_ne!(a.position, c.position);
    }

    #[test]
    fn converges_on_studious_day_fitness() {
        let inst = SingleInstance::day(Outcome::Fitness, DayType::Studious);
        let spec = SingleSpec::Pso(PsoConfig::default());
        let rec = run_single(&spec, &inst, 25_000, 1).unwrap();
        assert_eq!(rec.best.violation, 0.0);
        assert_abs_diff_eq!(rec.best.value, 60.4817, epsilon = 1e-3);
    }

    #[test]
    fn config_validation() {
        assert!(PsoConfig { swarm: 1, ..PsoConfig::default() }.validate().is_err());
        assert!(PsoConfig { c1: -0.1, ..PsoConfig::default() }.validate().is_err());
        assert!(PsoConfig::default().validate().is_ok());
    }
}
