// A single GRW trajectory of a two-particle wavefunction under free
// evolution, with snapshots and the jump record.
//
//     cargo run --release --example trajectory [seed]

use num_complex::Complex64;

use grwm::dynamics::{evolve_trajectory, CollapseParameters, DynamicsMode, Hamiltonian, TrajectoryConfig};
use grwm::state::{product_state, superpose, ParticleSpec, SpatialGrid, State, WaveFunction};

fn main() -> grwm::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let grid = SpatialGrid::spanning(-10.0, 10.0, 40)?;
    let packet = |x| WaveFunction::gaussian(grid.clone(), ParticleSpec::nucleon("p"), x, 0.8);
    let one = Complex64::new(1.0, 0.0);
    let here = product_state(&[packet(-5.0)?, packet(-5.0)?])?;
    let there = product_state(&[packet(5.0)?, packet(5.0)?])?;
    let state = State::WaveFunction(superpose(&[(one, &here), (one, &there)])?);

    let params = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(0.5)?;
    let config = TrajectoryConfig::new(4.0, 0.02, DynamicsMode::Jumps, seed)
        .with_hamiltonian(Hamiltonian::free())
        .with_snapshots(50);
    let rec = evolve_trajectory(&state, &params, &config)?;
    for s in &rec.snapshots {
        let left: f64 = s.mass[..20].iter().sum();
        println!("t = {:>4.2}  norm {:.12}  mass left {:.4}  right {:.4}", s.time, s.norm, left, s.total_mass - left);
    }
    println!("{} jump(s); first at {:?}", rec.jumps.len(), rec.first_jump_time);
    Ok(())
}
