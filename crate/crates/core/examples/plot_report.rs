// Run an experiment from a JSON spec and render every series as SVG.
//
//     cargo run --release --example plot_report [output-dir]

use std::path::PathBuf;

use grwm::experiments::{run, ExperimentSpec};
use grwm::plot::report_svgs;

fn main() -> grwm::Result<()> {
    let dir: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);
    let spec = ExperimentSpec::from_json(r#"{"name": "tails-demo", "seed": 1, "params": {"separation": 8}}"#)?;
    let report = run(&spec)?;
    std::fs::write(dir.join("tails-demo.json"), report.to_json()?)?;
    for (series, svg) in report_svgs(&report)? {
        let path = dir.join(format!("{}_{series}.svg", report.name));
        std::fs::write(&path, svg)?;
        println!("{}", path.display());
    }
    Ok(())
}
