// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (with the
//! individual checks beneath it) and then asserts.
//!
//!     cargo test --test acceptance -- --nocapture --test-threads=1

use std::time::Instant;

use num_complex::Complex64;

use grwm::dynamics::{
    csl_step, evolve_trajectory, sample_noise, seed_rng, unitary_step, CollapseParameters, DynamicsMode,
    Hamiltonian, TrajectoryConfig,
};
use grwm::experiments::{
    born_ensemble, counting_profiles, deflection_angle, first_jump_ensemble, run, run_born_statistics,
    run_collapse_rate_scaling, run_counting_anomaly, run_csl_collapse, run_deflection, run_superposition_vs_product,
    run_tails_demo, run_threshold_sweep, superposition_states, sweep_masks, tails_field, BornParams, CountingParams,
    CslParams, DeflectionParams, ExperimentName, ExperimentReport, ExperimentSpec, PointSource, RateScalingParams,
    RunContext, SuperpositionParams, SweepParams, TailsParams,
};
use grwm::massdensity::{analyze, branch_moments, degree_of, indeterminacy_report, Determinacy};
use grwm::state::{
    normalize, BranchState, MassObservablePartition, ParticleSpec, Region, SpatialGrid, State, WaveFunction,
};

const SEED: u64 = 20_260_417;

struct Criterion {
    id: u32,
    title: &'static str,
    start: Instant,
    lines: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            start: Instant::now(),
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.lines.push((ok, what.into()));
    }

    /// |got − want| ≤ tol.
    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{what}: {got:.12e} vs {want:.12e} (tol {tol:.1e})"));
    }

    fn at_most(&mut self, what: &str, got: f64, bound: f64) {
        self.check(got <= bound, format!("{what}: {got:.3e} <= {bound:.1e}"));
    }

    fn report_passed(&mut self, r: &ExperimentReport) {
        let failed: Vec<_> = r.failed_checks().map(|c| c.check.quantity.clone()).collect();
        self.check(r.passed, format!("{} report checks pass (failed: {failed:?})", r.name));
    }

    /// Prints the verdict and panics on failure; `limit` is in seconds.
    fn finish(mut self, limit: Option<f64>) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if let Some(limit) = limit {
            self.check(elapsed < limit, format!("runtime {elapsed:.2} s < {limit} s"));
        }
        let ok = self.lines.iter().all(|(ok, _)| *ok);
        let mut out = format!(
            "criterion {:>2} {:<34} {} ({elapsed:.2} s)\n",
            self.id,
            self.title,
            if ok { "PASS" } else { "FAIL" }
        );
        for (ok, line) in &self.lines {
            out.push_str(&format!("    [{}] {line}\n", if *ok { "ok" } else { "XX" }));
        }
        print!("{out}");
        assert!(ok, "criterion {} failed", self.id);
    }
}

fn three_sigma(p: f64, n: f64) -> f64 {
    3.0 * (p * (1.0 - p) / n).sqrt()
}

fn two_outcome(n: u64, p: f64) -> BranchState {
    BranchState::two_outcome(
        Region::new("A", -5.0, 1.0).unwrap(),
        Region::new("B", 5.0, 1.0).unwrap(),
        n,
        1.0,
        p,
    )
    .unwrap()
}

fn ab_partition() -> MassObservablePartition {
    MassObservablePartition::new("position", vec![("A".into(), vec![0]), ("B".into(), vec![1])])
}

#[test]
fn criterion_01_many_to_one() {
    let mut c = Criterion::new(1, "many-to-one mapping");
    let p = SuperpositionParams::default();
    let (plus, times) = superposition_states(&p).unwrap();
    let (mp, mt) = (branch_moments(&plus), branch_moments(&times));
    let half = p.particles as f64 * p.particle_mass / 2.0;
    for (region, i) in [("A", 0), ("B", 1)] {
        c.close(&format!("M_{region} of psi_plus"), mp.mass[i], half, 1e-9 * half);
        c.close(&format!("M_{region} of psi_times"), mt.mass[i], half, 1e-9 * half);
        c.close(&format!("psi_plus vs psi_times in {region}"), mp.mass[i], mt.mass[i], 1e-9 * half);
    }
    let r = run_superposition_vs_product(&p, &RunContext::new(SEED)).unwrap();
    for key in ["plus_density_a", "plus_density_b", "times_density_a", "times_density_b"] {
        c.close(&format!("report {key}·width"), r.measured[key] * p.region_width, half, 1e-9 * half);
    }
    c.report_passed(&r);
    c.finish(Some(1.0));
}

#[test]
fn criterion_02_cam_discrimination() {
    let mut c = Criterion::new(2, "CAM discrimination");
    let (plus, times) = superposition_states(&SuperpositionParams::default()).unwrap();
    let fp = analyze(&State::Branch(plus), 0.1).unwrap();
    let ft = analyze(&State::Branch(times), 0.1).unwrap();
    for i in 0..2 {
        c.check(ft.ratio[i] == Some(0.0), format!("R of psi_times in region {i} is exactly 0: {:?}", ft.ratio[i]));
        c.close(&format!("R of psi_plus in region {i}"), fp.ratio[i].unwrap_or(f64::NAN), 1.0, 1e-9);
        c.check(ft.accessible[i], format!("psi_times region {i} accessible at eta = 0.1"));
        c.check(!fp.accessible[i], format!("psi_plus region {i} non-accessible at eta = 0.1"));
    }
    let r = run_superposition_vs_product(&SuperpositionParams::default(), &RunContext::new(SEED)).unwrap();
    c.report_passed(&r);
    c.finish(Some(1.0));
}

#[test]
fn criterion_03_two_outcome_ratio_law() {
    let mut c = Criterion::new(3, "two-outcome ratio law");
    for p in [0.5, 0.9, 0.99, 0.999] {
        let f = analyze(&State::Branch(two_outcome(1000, p)), 0.1).unwrap();
        let r = f.ratio[0].unwrap();
        c.close(&format!("R^2 at p = {p}"), r * r, (1.0 - p) / p, 1e-9);
    }

    // Exact tier: one particle with weight p in one cell, 1 − p in another.
    let p: f64 = 0.99;
    let grid = SpatialGrid::new(16, 1.0, 0.0).unwrap();
    let mut raw = vec![Complex64::new(0.0, 0.0); 16];
    raw[3] = Complex64::new(p.sqrt(), 0.0);
    raw[12] = Complex64::new((1.0 - p).sqrt(), 0.0);
    let wf = normalize(raw, grid, vec![ParticleSpec::new("p", 1.0).unwrap()]).unwrap();
    let exact = analyze(&State::WaveFunction(wf), 0.1).unwrap();
    let tail = exact.ratio[12].unwrap();
    let branch = analyze(&State::Branch(two_outcome(1000, p)), 0.1).unwrap().ratio[1].unwrap();
    c.close("tail-cell R (wavefunction) vs sqrt(p/(1-p))", tail, (p / (1.0 - p)).sqrt(), 1e-9);
    c.close("tail-cell R, wavefunction vs branch tier", tail, branch, 1e-9);
    c.close("tail-cell R vs quoted 9.95", tail, 9.95, 5e-3);
    c.close("main-cell R (wavefunction)", exact.ratio[3].unwrap(), ((1.0 - p) / p).sqrt(), 1e-9);
    c.finish(Some(1.0));
}

/// Independent oracle: the continuum post-hit density integrated by
/// composite Simpson quadrature.
fn quadrature_tail_weight(separation: f64, alpha: f64) -> f64 {
    let (xl, xr) = (-separation / 2.0, separation / 2.0);
    let density = |x: f64| {
        let bump = |c: f64| (-(x - c).powi(2) / (4.0 * alpha * alpha)).exp();
        let hit = (-(x - xl).powi(2) / (2.0 * alpha * alpha)).exp();
        (bump(xl) + bump(xr)).powi(2) * hit
    };
    let simpson = |a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = density(a) + density(b);
        for i in 1..n {
            s += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let reach = separation + 20.0 * alpha;
    let left = simpson(-reach, 0.0, 200_000);
    let right = simpson(0.0, reach, 200_000);
    right / (left + right)
}

#[test]
fn criterion_04_tails_persistence() {
    let mut c = Criterion::new(4, "tails persistence");
    let p = TailsParams::default();
    let out = tails_field(&p, 0.1).unwrap();
    c.check(
        out.tail_weight > 0.0 && out.tail_weight < 1e-9,
        format!("0 < tail weight {:.4e} < 1e-9", out.tail_weight),
    );
    let oracle = quadrature_tail_weight(p.separation, p.alpha);
    c.close("tail weight vs quadrature oracle (relative)", out.tail_weight / oracle, 1.0, 0.1);
    let tail = out.field.index_of("tail").unwrap();
    for eta in [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let f = out.field.reclassified(eta).unwrap();
        c.check(!f.accessible[tail], format!("tail non-accessible at eta = {eta}"));
    }
    c.report_passed(&run_tails_demo(&p, &RunContext::new(SEED)).unwrap());
    c.finish(Some(5.0));
}

#[test]
fn criterion_05_counting_anomaly() {
    let mut c = Criterion::new(5, "counting anomaly");
    let mut previous = f64::INFINITY;
    for n in [1u64, 100, 1000] {
        let p = CountingParams {
            marbles: n,
            ..Default::default()
        };
        let oracle = p.in_weight.powi(n as i32);
        let joint: f64 = counting_profiles(&p).unwrap().iter().map(|d| d.degree("in").unwrap()).product();
        c.close(&format!("joint all-in, n = {n}"), joint, oracle, 1e-12);
        c.check(joint < previous, format!("joint strictly decreasing at n = {n}"));
        previous = joint;
        let r = run_counting_anomaly(&p, &RunContext::new(SEED)).unwrap();
        c.close(&format!("report joint all-in, n = {n}"), r.measured["joint_all_in"], oracle, 1e-12);
        c.close(&format!("accessible marbles, n = {n}"), r.measured["accessible_count"], n as f64, 0.0);
        c.report_passed(&r);
        if n == 100 {
            c.close("0.99^100 vs quoted 0.3660", joint, 0.3660, 5e-5);
        }
    }
    c.finish(Some(1.0));
}

#[test]
fn criterion_06_born_statistics() {
    let mut c = Criterion::new(6, "Born statistics (jumps)");
    let p = BornParams::default();
    for (i, w) in [0.5, 0.9].into_iter().enumerate() {
        let m = born_ensemble(&p, w, SEED + i as u64, 0).unwrap();
        let n = m.digests.len();
        c.check(n == 10_000 && m.failures.is_empty(), format!("{n} trajectories, {} failures", m.failures.len()));
        let collapsed = m.digests.iter().filter(|d| d.flags["collapsed"]).count();
        c.check(collapsed == n, format!("all trajectories reached a jump ({collapsed})"));
        let hits = m.digests.iter().filter(|d| d.flags["outcome_a"]).count();
        c.close(&format!("frequency of A at p = {w}"), hits as f64 / n as f64, w, three_sigma(w, n as f64));
    }
    c.report_passed(&run_born_statistics(&p, &RunContext::new(SEED)).unwrap());
    c.finish(Some(60.0));
}

#[test]
fn criterion_07_rate_scaling() {
    let mut c = Criterion::new(7, "collapse-rate scaling");
    let p = RateScalingParams::default();
    for (i, n) in [1u64, 10, 100].into_iter().enumerate() {
        let m = first_jump_ensemble(&p, n, SEED + i as u64, 0).unwrap();
        let times: Vec<f64> = m.digests.iter().filter_map(|d| d.values.get("first_jump_time").copied()).collect();
        c.check(times.len() == 10_000, format!("N = {n}: {} uncensored of 10000", times.len()));
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        let oracle = 1.0 / (n as f64 * p.rate);
        c.close(&format!("N = {n}: mean first jump / (1/(N lambda))"), mean / oracle, 1.0, 0.05);
    }
    c.report_passed(&run_collapse_rate_scaling(&p, &RunContext::new(SEED)).unwrap());
    c.finish(Some(60.0));
}

#[test]
fn criterion_08_csl_reduction_and_collapse() {
    let mut c = Criterion::new(8, "CSL reduction and collapse");
    let grid = SpatialGrid::spanning(-16.0, 16.0, 128).unwrap();
    let h = Hamiltonian::free();
    let off = CollapseParameters::default().with_csl(0.0, 1.0);
    let mut rng = seed_rng(SEED, 0);
    let mut a = WaveFunction::gaussian_with_momentum(grid.clone(), ParticleSpec::nucleon("p"), -3.0, 1.0, 2.0).unwrap();
    let mut b = a.clone();
    let mut worst: f64 = 0.0;
    for step in 0..100 {
        // Zero noise on even steps; on odd ones a drawn increment that the
        // switched-off coupling must ignore.
        let noise = if step % 2 == 0 {
            vec![0.0; grid.cell_count()]
        } else {
            sample_noise(&mut rng, &grid, 0.01)
        };
        a = csl_step(&a, &noise, 0.01, &off, &h).unwrap();
        b = unitary_step(&b, &h, 0.01).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            worst = worst.max((x - y).norm());
        }
    }
    c.at_most("max |csl_step − unitary_step| over 100 steps", worst, 1e-12);

    let p = CslParams::default();
    let r = run_csl_collapse(&p, &RunContext::new(SEED)).unwrap();
    for w in &p.weights {
        c.close(&format!("variance increases at p = {w}"), r.measured[&format!("variance_increases_p{w}")], 0.0, 0.0);
        c.close(
            &format!("final Born frequency at p = {w}"),
            r.measured[&format!("frequency_p{w}")],
            *w,
            three_sigma(*w, p.ensemble as f64),
        );
    }
    c.report_passed(&r);
    c.finish(Some(120.0));
}

#[test]
fn criterion_09_conservation_and_normalization() {
    let mut c = Criterion::new(9, "conservation and normalization");
    for name in ExperimentName::ALL {
        let mut spec = ExperimentSpec::new(name);
        spec.seed = SEED;
        let r = run(&spec).unwrap();
        let mut seen = 0;
        for (key, v) in &r.measured {
            if key.starts_with("mass_conservation_error") {
                c.at_most(&format!("{name}: {key}"), *v, 1e-9);
                seen += 1;
            } else if key.starts_with("norm_deviation") {
                c.at_most(&format!("{name}: {key}"), *v, 1e-12);
            }
        }
        c.check(seen > 0, format!("{name} reports mass conservation"));
    }

    // Snapshot-level check on wavefunction trajectories under both dynamics.
    let grid = SpatialGrid::spanning(-12.0, 12.0, 96).unwrap();
    let particle = ParticleSpec::new("p", 2.0).unwrap();
    let left = WaveFunction::gaussian(grid.clone(), particle.clone(), -4.0, 1.0).unwrap();
    let right = WaveFunction::gaussian(grid.clone(), particle, 4.0, 1.0).unwrap();
    let psi = grwm::state::superpose(&[(Complex64::new(1.0, 0.0), &left), (Complex64::new(1.0, 0.0), &right)]).unwrap();
    let state = State::WaveFunction(psi);
    let jumps = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(1.0).unwrap();
    let csl = CollapseParameters::default().with_alpha(1.0).with_csl(1.0, 1.0);
    for (mode, params) in [(DynamicsMode::Jumps, jumps), (DynamicsMode::Csl, csl)] {
        let config = TrajectoryConfig::new(3.0, 0.01, mode, SEED)
            .with_hamiltonian(Hamiltonian::free())
            .with_snapshots(1);
        let rec = evolve_trajectory(&state, &params, &config).unwrap();
        let norm = rec.snapshots.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0, f64::max);
        let mass = rec.snapshots.iter().map(|s| (s.total_mass - 2.0).abs() / 2.0).fold(0.0, f64::max);
        c.at_most(&format!("{mode:?}: worst |norm − 1| over {} snapshots", rec.snapshots.len()), norm, 1e-12);
        c.at_most(&format!("{mode:?}: worst relative mass error"), mass, 1e-9);
    }
    c.finish(None);
}

#[test]
fn criterion_10_threshold_arbitrariness() {
    let mut c = Criterion::new(10, "threshold arbitrariness");
    let p = SweepParams::default();
    let grid = sweep_masks(&p, &[0.05, 0.1, 0.3, 0.5]).unwrap();
    c.check(grid.identical(), format!("masks identical across eta for {:?}", grid.states));
    let boundary = sweep_masks(&p, &[0.9999, 1.0001]).unwrap();
    let flipped = boundary.changed();
    c.check(flipped == ["psi_plus"], format!("exactly one state flips at R = 1: {flipped:?}"));
    c.report_passed(&run_threshold_sweep(&p, &RunContext::new(SEED)).unwrap());
    c.finish(Some(5.0));
}

#[test]
fn criterion_11_degree_link() {
    let mut c = Criterion::new(11, "degree link");
    let (plus, times) = superposition_states(&SuperpositionParams::default()).unwrap();
    let tails = tails_field(&TailsParams::default(), 0.1).unwrap();
    let tails_partition = MassObservablePartition::new(
        "side",
        vec![
            ("main".into(), tails.state.grid().cells_between(f64::NEG_INFINITY, 0.0)),
            ("tail".into(), tails.state.grid().cells_between(0.0, f64::INFINITY)),
        ],
    );
    let suite = [
        ("psi_plus", State::Branch(plus), ab_partition()),
        ("psi_times", State::Branch(times), ab_partition()),
        ("tails", State::WaveFunction(tails.state.clone()), tails_partition),
        ("(0.99, 0.01)", State::Branch(two_outcome(100, 0.99)), ab_partition()),
        ("(0.5, 0.5)", State::Branch(two_outcome(100, 0.5)), ab_partition()),
    ];
    for (label, state, partition) in &suite {
        let d = degree_of(state, partition).unwrap();
        c.close(&format!("{label}: degrees sum"), d.total(), 1.0, 1e-12);
    }

    let eta_d = 0.05;
    let skewed = indeterminacy_report(&degree_of(&suite[3].1, &ab_partition()).unwrap(), eta_d);
    c.check(
        skewed.classification == Determinacy::EffectivelyDeterminate,
        format!("(0.99, 0.01) is {:?}", skewed.classification),
    );
    let minor = skewed.components.iter().find(|v| v.label == "B").unwrap();
    c.check(minor.present, format!("0.01 component present (degree {:.4})", minor.degree));
    c.check(!minor.accessible, "0.01 component non-accessible");
    let even = indeterminacy_report(&degree_of(&suite[4].1, &ab_partition()).unwrap(), eta_d);
    c.check(
        even.classification == Determinacy::IndeterminateGluttyDegree,
        format!("(0.5, 0.5) is {:?}", even.classification),
    );
    c.finish(None);
}

#[test]
fn criterion_12_deflection() {
    let mut c = Criterion::new(12, "deflection");
    let p = DeflectionParams::default();
    let (plus, times) = superposition_states(&SuperpositionParams {
        particles: p.particles,
        particle_mass: p.particle_mass,
        ..Default::default()
    })
    .unwrap();
    for (label, state) in [("psi_plus", plus), ("psi_times", times)] {
        let m = branch_moments(&state).mass;
        let sources = [
            PointSource {
                x: 0.0,
                y: p.region_a_y,
                mass: m[0],
            },
            PointSource {
                x: 0.0,
                y: p.region_b_y,
                mass: m[1],
            },
        ];
        c.at_most(&format!("{label}: |mean-field deflection|"), deflection_angle(&sources, &p).abs(), 1e-12);
    }
    let all_in_a = [PointSource {
        x: 0.0,
        y: p.region_a_y,
        mass: p.particles as f64 * p.particle_mass,
    }];
    c.check(deflection_angle(&all_in_a, &p) > 0.0, "mass collapsed into A pulls toward A");

    let r = run_deflection(&p, &RunContext::new(SEED)).unwrap();
    c.close(
        "post-collapse toward-A frequency",
        r.measured["post_collapse_toward_a_frequency"],
        0.5,
        three_sigma(0.5, p.ensemble as f64),
    );
    c.report_passed(&r);
    c.finish(Some(60.0));
}

#[test]
fn criterion_13_determinism() {
    let mut c = Criterion::new(13, "determinism");
    for name in ExperimentName::ALL {
        let mut spec = ExperimentSpec::new(name);
        spec.seed = SEED;
        let mut outputs = Vec::new();
        for threads in [1, 1, 2] {
            spec.parallelism = threads;
            let mut r = run(&spec).unwrap();
            r.timestamp = Some(format!("unix:{}", outputs.len()));
            outputs.push(r.without_timestamp().to_json().unwrap());
        }
        c.check(
            outputs.windows(2).all(|w| w[0] == w[1]),
            format!("{name}: byte-identical across repeats and thread counts ({} bytes)", outputs[0].len()),
        );
    }
    c.finish(None);
}
