use timeuse_core::composition::DayType;
use timeuse_core::objectives::Outcome;
use timeuse_core::opt_multi::{run_multi, MoEngine, MoInstance};

#[test]
fn probe_endpoints() {
    let inst = MoInstance::new(DayType::Sporty, vec![Outcome::Cognition, Outcome::Fitness]).unwrap();
    for engine in MoEngine::ALL {
        for seed in 0..6 {
            let front = run_multi(engine, &inst, 100, 25_000, seed).unwrap();
            let best_f2 = front.members().iter().map(|m| -m.objectives[0]).fold(f64::NEG_INFINITY, f64::max);
            let best_f4 = front.members().iter().map(|m| -m.objectives[1]).fold(f64::NEG_INFINITY, f64::max);
            println!("{engine} seed {seed}: f2 {best_f2:.4} f4 {best_f4:.4} (size {})", front.len());
        }
    }
}
