// Branch-selection frequencies of jump collapse against the initial
// weights, with Wilson intervals.
//
//     cargo run --release --example born_statistics [trajectories]

use grwm::experiments::{born_ensemble, BornParams};

fn main() -> grwm::Result<()> {
    let ensemble = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let p = BornParams {
        ensemble,
        ..Default::default()
    };
    for (i, w) in [0.5, 0.7, 0.9, 0.99].into_iter().enumerate() {
        let m = born_ensemble(&p, w, 42 + i as u64, 0)?;
        let f = m.aggregate.frequency("outcome_a").expect("outcome flag");
        println!(
            "p = {w:<5} frequency {:.4}  95% CI [{:.4}, {:.4}]  contains p: {}",
            f.frequency,
            f.ci_low,
            f.ci_high,
            f.contains(w)
        );
    }
    Ok(())
}
