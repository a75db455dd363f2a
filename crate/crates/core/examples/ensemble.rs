// A custom seeded ensemble: the same manifest comes back for any thread
// count.
//
//     cargo run --release --example ensemble

use grwm::dynamics::{evolve_trajectory, CollapseParameters, DynamicsMode, TrajectoryConfig};
use grwm::ensemble::{run_ensemble, Outcome};
use grwm::state::{BranchState, Region, State};

fn main() -> grwm::Result<()> {
    let state = State::Branch(BranchState::equal_superposition(
        Region::new("A", -5.0, 1.0)?,
        Region::new("B", 5.0, 1.0)?,
        50,
        1.0,
    )?);
    let params = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(1.0)?;
    let trajectory = |_, seed, stream| {
        let config = TrajectoryConfig::new(0.2, 0.2, DynamicsMode::Jumps, seed).with_stream(stream);
        let rec = evolve_trajectory(&state, &params, &config)?;
        let w = rec.final_branch_weights();
        Ok(Outcome::new()
            .value("jumps", rec.jumps.len() as f64)
            .flag("in_a", w.first().is_some_and(|&a| a > 0.5)))
    };
    let one = run_ensemble("demo", &"50 particles, t = 0.2", 5000, 9, 1, trajectory)?;
    let many = run_ensemble("demo", &"50 particles, t = 0.2", 5000, 9, 0, trajectory)?;
    assert_eq!(one.to_json()?, many.to_json()?);

    let jumps = one.aggregate.mean("jumps").expect("jump counts");
    let in_a = one.aggregate.frequency("in_a").expect("outcome flags");
    println!("mean jumps {:.3} (expected {:.3})", jumps.mean, 50.0 * 0.2);
    println!("in A {:.4} [{:.4}, {:.4}]", in_a.frequency, in_a.ci_low, in_a.ci_high);
    println!("parameter hash {}", one.parameter_hash);
    Ok(())
}
