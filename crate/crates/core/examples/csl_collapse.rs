// Continuous collapse of a single particle in two bumps, one trajectory
// at a time, then the ensemble report.
//
//     cargo run --release --example csl_collapse

use num_complex::Complex64;

use grwm::dynamics::{evolve_trajectory, CollapseParameters, DynamicsMode, TrajectoryConfig};
use grwm::experiments::{run_csl_collapse, CslParams, RunContext};
use grwm::state::{normalize, MassObservablePartition, ParticleSpec, SpatialGrid, State};

fn main() -> grwm::Result<()> {
    let grid = SpatialGrid::new(8, 1.0, 0.0)?;
    let mut raw = vec![Complex64::new(0.0, 0.0); 8];
    for c in [1, 2, 5, 6] {
        raw[c] = Complex64::new(1.0, 0.0);
    }
    let state = State::WaveFunction(normalize(raw, grid, vec![ParticleSpec::nucleon("p")])?);
    let partition =
        MassObservablePartition::new("side", vec![("left".into(), (0..4).collect()), ("right".into(), (4..8).collect())]);
    let params = CollapseParameters::default().with_alpha(1.0).with_csl(2.0, 1.0);

    for seed in 0..4 {
        let config = TrajectoryConfig::new(4.0, 0.01, DynamicsMode::Csl, seed)
            .with_snapshots(100)
            .with_partition(partition.clone());
        let rec = evolve_trajectory(&state, &params, &config)?;
        let weights: Vec<String> = rec
            .snapshots
            .iter()
            .map(|s| format!("{:.3}", s.branch_weights[0]))
            .collect();
        println!("seed {seed}: left weight {}", weights.join(" -> "));
    }

    let p = CslParams {
        ensemble: 2000,
        ..Default::default()
    };
    print!("\n{}", run_csl_collapse(&p, &RunContext::new(5))?.summary_text());
    Ok(())
}
