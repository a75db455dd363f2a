// Mean first-jump time of an N-particle superposition against 1/(Nλ).
//
//     cargo run --release --example rate_scaling

use grwm::experiments::{first_jump_ensemble, RateScalingParams};

fn main() -> grwm::Result<()> {
    let p = RateScalingParams::default();
    println!("{:>6} {:>12} {:>12} {:>10}", "N", "mean", "1/(N lambda)", "std err");
    for (i, &n) in p.particle_counts.iter().enumerate() {
        let m = first_jump_ensemble(&p, n, 100 + i as u64, 0)?;
        let stat = m.aggregate.mean("first_jump_time").expect("jumps occurred");
        println!(
            "{n:>6} {:>12.6} {:>12.6} {:>10.2e}",
            stat.mean,
            1.0 / (n as f64 * p.rate),
            stat.std_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
