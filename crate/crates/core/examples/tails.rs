// One GRW hit on a two-bump superposition: the far bump survives as a
// tiny tail whose accessibility ratio is huge.
//
//     cargo run --release --example tails

use grwm::experiments::{tails_field, TailsParams};

fn main() -> grwm::Result<()> {
    let p = TailsParams::default();
    let out = tails_field(&p, 0.1)?;
    println!("separation {} alpha {}", p.separation, p.alpha);
    println!("tail weight      {:.4e}", out.tail_weight);
    for i in 0..out.field.len() {
        println!(
            "{:<5} mass {:.6e}  R {:>12}  accessible {}",
            out.field.layout.labels[i],
            out.field.mass[i],
            out.field.ratio[i].map_or("-".into(), |r| format!("{r:.4e}")),
            out.field.accessible[i]
        );
    }
    for eta in [0.05, 0.1, 0.3, 0.5] {
        let f = out.field.reclassified(eta)?;
        println!("eta {eta:<4}: tail accessible = {}", f.accessible[1]);
    }
    println!("classification   {:?}", out.indeterminacy.classification);
    Ok(())
}
