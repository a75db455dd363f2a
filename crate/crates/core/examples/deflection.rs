// A test particle passing between regions A and B: mean-field sourcing
// gives no deflection, collapsed sourcing picks a side.
//
//     cargo run --release --example deflection

use grwm::experiments::{deflection_angle, run_deflection, DeflectionParams, PointSource, RunContext};

fn main() -> grwm::Result<()> {
    let p = DeflectionParams {
        ensemble: 2000,
        ..Default::default()
    };
    let total = p.particles as f64 * p.particle_mass;
    let source = |y: f64, mass: f64| PointSource { x: 0.0, y, mass };
    let split = [source(p.region_a_y, total / 2.0), source(p.region_b_y, total / 2.0)];
    let in_a = [source(p.region_a_y, total)];
    println!("mean field      {:+.6e} rad", deflection_angle(&split, &p));
    println!("all mass in A   {:+.6e} rad", deflection_angle(&in_a, &p));

    let r = run_deflection(&p, &RunContext::new(3))?;
    println!(
        "toward A after collapse: {:.4} of {} trajectories",
        r.measured("post_collapse_toward_a_frequency")?,
        r.measured("collapsed_trajectories")?
    );
    Ok(())
}
