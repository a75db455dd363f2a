// Every marble is in the box, yet the chance that all of them are
// in the box shrinks geometrically.
//
//     cargo run --release --example counting_anomaly

use grwm::experiments::{run_counting_anomaly, CountingParams, RunContext};

fn main() -> grwm::Result<()> {
    println!("{:>6} {:>14} {:>12}", "n", "P(all in)", "accessible");
    for marbles in [1, 10, 100, 1000] {
        let p = CountingParams {
            marbles,
            ..Default::default()
        };
        let r = run_counting_anomaly(&p, &RunContext::new(0))?;
        println!(
            "{marbles:>6} {:>14.6e} {:>12}",
            r.measured("joint_all_in")?,
            r.measured("accessible_count")?
        );
    }
    Ok(())
}
