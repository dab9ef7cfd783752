//! Property-based invariants of the operators, channels and readout routes.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use displacemon::decoherence::{dephasing_monte_carlo, thermal_add, DephasingSpec, ThermalAddSpec};
use displacemon::hilbert::{FockSpace, ResonatorState};
use displacemon::linalg::{self, max_abs_diff};
use displacemon::phasespace::{marginal, marginal_grid, wigner, WignerSpec};
use displacemon::protocol::{grating_branches, grating_operator, pplus, pplus_from_marginal, GratingSpec, Outcome};

fn coherent(space: &FockSpace, re: f64, im: f64) -> ResonatorState {
    space.coherent(Complex64::new(re, im)).into()
}

/// Normalized even superposition of two coherent states.
fn cat(space: &FockSpace, re: f64, im: f64) -> ResonatorState {
    let a = space.coherent(Complex64::new(re, im)).amplitudes;
    let b = space.coherent(Complex64::new(-re, -im)).amplitudes;
    ResonatorState::Pure(displacemon::hilbert::MechState::new(a + b)).normalized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grating_outcomes_are_complete(kick in 0.0f64..2.5, phi in -PI..PI) {
        let space = FockSpace::new(96).unwrap();
        let spec = GratingSpec::kick(kick, Outcome::Plus).with_phi(phi);
        let p = grating_operator(&space, &spec).unwrap();
        let m = grating_operator(&space, &spec.with_outcome(Outcome::Minus)).unwrap();
        let sum = linalg::matmul(&p.adjoint(), &p) + linalg::matmul(&m.adjoint(), &m);
        prop_assert!(max_abs_diff(&sum, &space.identity()) < 1e-9);
    }

    #[test]
    fn branch_probabilities_sum_to_one(kick in 0.0f64..2.0, phi in -PI..PI, re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let space = FockSpace::new(96).unwrap();
        let state = coherent(&space, re, im);
        let spec = GratingSpec::kick(kick, Outcome::Plus).with_phi(phi);
        let [(_, pp), (_, pm)] = grating_branches(&space, &state, &spec).unwrap();
        prop_assert!((pp + pm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotations_compose(a in -PI..PI, b in -PI..PI, re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let space = FockSpace::new(64).unwrap();
        let state = cat(&space, re, im);
        let two = state.rotate(a).rotate(b);
        let one = state.rotate(a + b);
        prop_assert!((two.overlap_fidelity(&one) - 1.0).abs() < 1e-10);
        prop_assert!((two.weight() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn readout_routes_agree(a3 in 0.0f64..2.0, theta in 0.0f64..PI, phi in -PI..PI, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let space = FockSpace::new(96).unwrap();
        let state = cat(&space, re, im);
        let alpha3 = Complex64::from_polar(a3, 0.5 * PI + theta);
        let by_chi = pplus(&state, alpha3, phi).unwrap();
        let by_marginal = pplus_from_marginal(&state, alpha3, phi).unwrap();
        prop_assert!((by_chi - by_marginal).abs() < 1e-8, "{} vs {}", by_chi, by_marginal);
    }

    #[test]
    fn wigner_projects_onto_position_density(re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let space = FockSpace::new(64).unwrap();
        let state = cat(&space, re, im);
        let w = wigner(&state, &WignerSpec::for_state(&state)).unwrap();
        let grid = displacemon::quadrature::UniformGrid::new(w.x[w.x.len() - 1], w.x.len());
        let direct = marginal(&state, 0.0, &grid);
        // the direct route may refuse a grid narrower than its own guard
        if let Ok(direct) = direct {
            let projected = w.marginal_x();
            let worst = projected.iter().zip(&direct.density).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            // the momentum axis spans less than one period 2 pi / h, so the
            // projected sum keeps a small leak from near-diagonal coherences
            prop_assert!(worst < 1e-5, "{}", worst);
        }
        prop_assert!((w.integral() - 1.0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn added_phonons_preserve_trace_and_positivity(n in 0.0f64..0.3, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let space = FockSpace::new(96).unwrap();
        let state = cat(&space, re, im);
        let out = thermal_add(&state, &ThermalAddSpec::new(n)).unwrap();
        let rho = out.to_density();
        prop_assert!((rho.weight - 1.0).abs() < 1e-8);
        prop_assert!(linalg::hermitian_defect(&rho.matrix) < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn added_phonons_compose(n1 in 0.0f64..0.15, n2 in 0.0f64..0.15, re in -1.0f64..1.0) {
        let space = FockSpace::new(96).unwrap();
        let state = cat(&space, re, 0.4);
        let two = thermal_add(&thermal_add(&state, &ThermalAddSpec::new(n1)).unwrap(), &ThermalAddSpec::new(n2)).unwrap();
        let one = thermal_add(&state, &ThermalAddSpec::new(n1 + n2)).unwrap();
        let diff = max_abs_diff(&two.to_density().matrix, &one.to_density().matrix);
        prop_assert!(diff < 1e-6, "{}", diff);
    }
}

#[test]
fn monte_carlo_noise_has_the_drawn_statistics() {
    let space = FockSpace::new(64).unwrap();
    let state = coherent(&space, 0.3, 0.0);
    let spec = GratingSpec::kick(1.0, Outcome::Plus);
    let n = 4000;
    let t = 2.5;
    let mc = dephasing_monte_carlo(&space, &state, &spec, &DephasingSpec { gamma: 0.1, t, n_traj: n, seed: 5 }).unwrap();
    assert!(mc.w_mean.abs() < 4.0 * (t / n as f64).sqrt(), "{}", mc.w_mean);
    assert!((mc.w_variance / t - 1.0).abs() < 0.1, "{}", mc.w_variance);
    let again = dephasing_monte_carlo(&space, &state, &spec, &DephasingSpec { gamma: 0.1, t, n_traj: n, seed: 5 }).unwrap();
    assert_eq!(mc.probability, again.probability);
}

#[test]
fn marginal_grid_covers_kicked_states() {
    let space = FockSpace::new(128).unwrap();
    let state = coherent(&space, 0.0, 2.5);
    let grid = marginal_grid(&state);
    let curve = marginal(&state, 0.5 * PI, &grid).unwrap();
    assert!((curve.integral() - 1.0).abs() < 1e-9);
}
