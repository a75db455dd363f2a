// Accessibility masks over a grid of thresholds, and the one state
// whose verdict flips across R = 1.
//
//     cargo run --release --example threshold_sweep -- 0.05 0.1 0.3 0.5

use grwm::experiments::{sweep_masks, SweepParams};

fn main() -> grwm::Result<()> {
    let mut etas: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if etas.is_empty() {
        etas = vec![0.05, 0.1, 0.3, 0.5];
    }
    let p = SweepParams::default();
    let table = sweep_masks(&p, &etas)?;
    for (state, masks) in table.states.iter().zip(&table.masks) {
        print!("{state:<10}");
        for (eta, m) in etas.iter().zip(masks) {
            print!("  {eta}: {m:?}");
        }
        println!();
    }
    println!("identical across the grid: {}", table.identical());
    let boundary = sweep_masks(&p, &p.boundary)?;
    println!("flips between {:?}: {:?}", p.boundary, boundary.changed());
    Ok(())
}
