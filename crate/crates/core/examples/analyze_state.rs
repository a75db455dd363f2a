// Build states in both tiers, compute 𝓜, 𝓥 and 𝓡, ascribe degrees, and
// write the field as CSV and the state as JSON.
//
//     cargo run --release --example analyze_state [output-dir]

use std::fs::File;
use std::path::PathBuf;

use num_complex::Complex64;

use grwm::massdensity::{
    analyze, degree_of, degree_threshold_for, indeterminacy_report, write_field_csv,
};
use grwm::state::{superpose, BranchState, MassObservablePartition, ParticleSpec, Region, SpatialGrid, State, WaveFunction};

fn main() -> grwm::Result<()> {
    let dir: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);

    // Branch tier: a 0.99 / 0.01 marble.
    let marble = BranchState::two_outcome(Region::new("in", 0.0, 1.0)?, Region::new("out", 10.0, 1.0)?, 1, 1.0, 0.99)?;
    let state = State::Branch(marble);
    let field = analyze(&state, 0.1)?;
    let partition = MassObservablePartition::new("box", vec![("in".into(), vec![0]), ("out".into(), vec![1])]);
    let profile = degree_of(&state, &partition)?;
    let verdict = indeterminacy_report(&profile, degree_threshold_for(0.3));
    println!("marble ratios {:?}, accessible {:?}", field.ratio, field.accessible);
    println!("marble degrees {:?} -> {:?}", profile.degrees(), verdict.classification);

    // Wavefunction tier: a cat state on a 64-cell grid.
    let grid = SpatialGrid::spanning(-8.0, 8.0, 64)?;
    let left = WaveFunction::gaussian(grid.clone(), ParticleSpec::nucleon("p"), -4.0, 0.7)?;
    let right = WaveFunction::gaussian(grid, ParticleSpec::nucleon("p"), 4.0, 0.7)?;
    let one = Complex64::new(1.0, 0.0);
    let cat = State::WaveFunction(superpose(&[(one, &left), (one, &right)])?);
    let field = analyze(&cat, 0.1)?.with_smearing(1.0)?;
    println!("cat: {} of {} cells accessible", field.accessible_count(), field.len());

    let csv = dir.join("cat_field.csv");
    write_field_csv(&field, File::create(&csv)?)?;
    let json = dir.join("cat_state.json");
    std::fs::write(&json, cat.to_json()?)?;
    println!("wrote {} and {}", csv.display(), json.display());
    println!("try: grwm analyze {} --format csv", json.display());
    Ok(())
}
