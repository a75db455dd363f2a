// Same mass density, different accessibility: ψ⊕ (all N particles in A
// or all in B) against ψ⊗ (half in each).
//
//     cargo run --release --example superposition_vs_product [N]

use grwm::experiments::{compare_superposition_product, run_superposition_vs_product, RunContext, SuperpositionParams};

fn main() -> grwm::Result<()> {
    let particles = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let p = SuperpositionParams {
        particles,
        ..Default::default()
    };
    let cmp = compare_superposition_product(&p, 0.1)?;
    println!("{:<10} {:>10} {:>14} {:>8} {:>10}", "state", "region", "M", "R", "accessible");
    for (name, f) in [("psi_plus", &cmp.plus), ("psi_times", &cmp.times)] {
        for i in 0..f.len() {
            let ratio = f.ratio[i].map_or("-".to_string(), |r| format!("{r:.4}"));
            println!(
                "{name:<10} {:>10} {:>14.6} {ratio:>8} {:>10}",
                f.layout.labels[i], f.mass[i], f.accessible[i]
            );
        }
    }

    let report = run_superposition_vs_product(&p, &RunContext::new(1))?;
    print!("\n{}", report.summary_text());
    Ok(())
}
