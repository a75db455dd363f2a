// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use proptest::prelude::*;

use grwm::dynamics::{apply_localization, csl_step, unitary_step, CollapseParameters, Hamiltonian};
use grwm::massdensity::{analyze, branch_moments, degree_of, wave_moments};
use grwm::state::{
    normalize, BranchState, MassObservablePartition, ParticleSpec, Region, SpatialGrid, State, WaveFunction,
};

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn two_particle_state() -> impl Strategy<Value = WaveFunction> {
    (2usize..7, 0.1f64..2.0, 0.1f64..5.0, 0.1f64..5.0).prop_flat_map(|(cells, dx, m1, m2)| {
        amplitudes(cells * cells).prop_map(move |raw| {
            let particles = vec![ParticleSpec::new("a", m1).unwrap(), ParticleSpec::new("b", m2).unwrap()];
            normalize(raw, SpatialGrid::new(cells, dx, 0.0).unwrap(), particles).unwrap()
        })
    })
}

fn line_state() -> impl Strategy<Value = WaveFunction> {
    amplitudes(32).prop_map(|raw| {
        normalize(raw, SpatialGrid::spanning(-8.0, 8.0, 32).unwrap(), vec![ParticleSpec::nucleon("p")]).unwrap()
    })
}

proptest! {
    #[test]
    fn normalized_and_marginals_integrate_to_one(wf in two_particle_state()) {
        prop_assert!((wf.norm_squared() - 1.0).abs() < 1e-12);
        for k in 0..2 {
            let total: f64 = wf.marginal_density(k).unwrap().iter().sum::<f64>() * wf.grid().cell_width();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_is_conserved_and_variance_nonnegative(wf in two_particle_state()) {
        let m = wave_moments(&wf);
        let total: f64 = m.mass.iter().sum();
        prop_assert!((total - wf.total_mass()).abs() <= 1e-9 * wf.total_mass());
        prop_assert!(m.variance.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn degrees_sum_to_one(wf in two_particle_state(), split in 1usize..6) {
        let cells = wf.grid().cell_count();
        let split = split.min(cells - 1);
        let partition = MassObservablePartition::new(
            "side",
            vec![("L".into(), (0..split).collect()), ("R".into(), (split..cells).collect())],
        );
        let d = degree_of(&State::WaveFunction(wf), &partition).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        prop_assert!(d.degrees().iter().all(|&x| x >= 0.0));
    }

    /// Raising η can only add accessible cells.
    #[test]
    fn accessibility_is_monotone_in_threshold(wf in two_particle_state(), lo in 0.01f64..2.0, gap in 0.0f64..2.0) {
        let state = State::WaveFunction(wf);
        let a = analyze(&state, lo).unwrap();
        let b = analyze(&state, lo + gap).unwrap();
        for (x, y) in a.accessible.iter().zip(&b.accessible) {
            prop_assert!(!x || *y);
        }
    }

    #[test]
    fn two_outcome_ratio_law(p in 0.001f64..0.999, n in 1u64..5000, mass in 0.01f64..100.0) {
        let bs = BranchState::two_outcome(
            Region::new("A", 0.0, 1.0).unwrap(),
            Region::new("B", 3.0, 1.0).unwrap(),
            n,
            mass,
            p,
        ).unwrap();
        let f = analyze(&State::Branch(bs.clone()), 0.1).unwrap();
        let r = f.ratio[0].unwrap();
        prop_assert!((r * r - (1.0 - p) / p).abs() <= 1e-9 * (1.0 + (1.0 - p) / p));
        let m = branch_moments(&bs);
        prop_assert!((m.mass.iter().sum::<f64>() - bs.total_mass()).abs() <= 1e-9 * bs.total_mass());
    }

    #[test]
    fn localization_preserves_norm(wf in line_state(), center in -7.9f64..7.9, alpha in 0.2f64..4.0) {
        let params = CollapseParameters::default().with_alpha(alpha);
        let hit = apply_localization(&wf, 0, center, &params).unwrap();
        prop_assert!((hit.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_and_csl_steps_preserve_norm(
        wf in line_state(),
        dt in 0.001f64..0.1,
        noise in prop::collection::vec(-30.0f64..30.0, 32),
    ) {
        let h = Hamiltonian::free();
        let u = unitary_step(&wf, &h, dt).unwrap();
        prop_assert!((u.norm_squared() - 1.0).abs() < 1e-12);
        let params = CollapseParameters::default().with_csl(1.0, 1.0);
        let c = csl_step(&wf, &noise, dt, &params, &h).unwrap();
        prop_assert!((c.norm_squared() - 1.0).abs() < 1e-12);
    }
}
