//! Grating measurement operators and the analytic pulse unitary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{condition, FockSpace, JointState, ResonatorState};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingSpec {
    pub alpha: Complex64,
    #[serde(default)]
    pub phi: f64,
    pub outcome: Outcome,
    /// Accept kicks with a real part (position-basis superpositions).
    #[serde(default)]
    pub general_alpha: bool,
}

impl GratingSpec {
    /// Momentum kick `alpha = i kick`.
    pub fn kick(kick: f64, outcome: Outcome) -> Self {
        Self {
            alpha: Complex64::new(0.0, kick),
            phi: 0.0,
            outcome,
            general_alpha: false,
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_outcome(mut self, outcome: Outcome) -> Self {
        self.outcome = outcome;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.general_alpha && self.alpha.re != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grating amplitude {} has a real part; enable general_alpha to allow it",
                self.alpha
            )));
        }
        if !(self.alpha.norm().is_finite() && self.phi.is_finite()) {
            return Err(Error::InvalidParameter("grating parameters must be finite".into()));
        }
        Ok(())
    }
}

fn check_kick(space: &FockSpace, alpha: Complex64) -> Result<()> {
    let limit = space.displacement_limit();
    if alpha.norm_sqr() >= limit {
        return Err(Error::TruncationRisk(format!(
            "|alpha|^2 = {:.3} must stay below dim/8 = {limit:.3}",
            alpha.norm_sqr()
        )));
    }
    Ok(())
}

/// Builds `f(|alpha| x)` in the position eigenbasis and carries it to the
/// direction of `alpha` with `R(theta)^dagger (.) R(theta)`, where
/// `alpha = i|alpha| e^{i theta}`.
fn along_kick<F: Fn(f64) -> Complex64>(space: &FockSpace, alpha: Complex64, f: F) -> CMatrix {
    let kick = alpha.norm();
    let op = space.function_of_position(|x| f(kick * x));
    if alpha.re == 0.0 && alpha.im >= 0.0 {
        return op;
    }
    let theta = (alpha / Complex64::new(0.0, kick)).arg();
    let r = space.rotation(theta);
    linalg::matmul(&linalg::matmul(&r.adjoint(), &op), &r)
}

/// `D(alpha)`, unitary on the retained levels. For `alpha = i|alpha|` this is
/// `exp(i |alpha| x)` taken in the position eigenbasis.
pub fn kick_operator(space: &FockSpace, alpha: Complex64) -> Result<CMatrix> {
    check_kick(space, alpha)?;
    Ok(along_kick(space, alpha, |u| Complex64::from_polar(1.0, u)))
}

/// `Upsilon_(+/-)` without the trailing free rotation:
/// `(D^dagger(alpha) +/- e^{i phi} D(alpha)) / 2`.
///
/// A general `alpha = i|alpha| e^{i theta}` is reduced to the imaginary case
/// by `D(alpha) = R(theta)^dagger D(i|alpha|) R(theta)`.
pub fn grating_operator(space: &FockSpace, spec: &GratingSpec) -> Result<CMatrix> {
    spec.validate()?;
    check_kick(space, spec.alpha)?;
    let sign = spec.outcome.sign();
    let e_phi = Complex64::from_polar(1.0, spec.phi);
    Ok(along_kick(space, spec.alpha, |u| {
        let d = Complex64::from_polar(1.0, u);
        (d.conj() + sign * e_phi * d) * 0.5
    }))
}

/// Conditioned grating step. The deterministic rotation accumulated during
/// the pulse is left to the free-evolution bookkeeping.
pub fn grating(
    space: &FockSpace,
    state: &ResonatorState,
    spec: &GratingSpec,
) -> Result<(ResonatorState, f64)> {
    let op = grating_operator(space, spec)?;
    condition(state, &op)
}

/// Both outcome branches of a grating, with their probabilities.
pub fn grating_branches(
    space: &FockSpace,
    state: &ResonatorState,
    spec: &GratingSpec,
) -> Result<[(ResonatorState, f64); 2]> {
    let plus = grating(space, state, &spec.with_outcome(Outcome::Plus))?;
    let minus = grating(space, state, &spec.with_outcome(Outcome::Minus))?;
    Ok([plus, minus])
}

/// `R(theta)` on the state: quarter period is `theta = pi/2`.
pub fn free_evolution(state: &ResonatorState, theta: f64) -> ResonatorState {
    state.rotate(theta)
}

/// Qubit-diagonal joint operator, acting blockwise on `(|+>, |->)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub plus: CMatrix,
    pub minus: CMatrix,
}

impl BlockOperator {
    pub fn apply(&self, joint: &JointState) -> JointState {
        let plus = linalg::matvec(&self.plus, &joint.plus_block().amplitudes);
        let minus = linalg::matvec(&self.minus, &joint.minus_block().amplitudes);
        JointState {
            vector: crate::linalg::CVector::from_iterator(
                2 * plus.len(),
                plus.iter().chain(minus.iter()).copied(),
            ),
        }
    }
}

/// `R(Omega t) exp(-i omega_q t sigma_z / 2) (D(alpha)|-><-| + D^dagger(alpha)|+><+|)`.
pub fn grating_unitary(
    space: &FockSpace,
    alpha: Complex64,
    qubit_phase: f64,
    mech_phase: f64,
) -> Result<BlockOperator> {
    let d = space.displacement(alpha)?;
    let r = space.rotation(mech_phase);
    let half = Complex64::from_polar(1.0, -0.5 * qubit_phase);
    let plus = linalg::matmul(&r, &d.adjoint()) * half;
    let minus = linalg::matmul(&r, &d) * half.conj();
    Ok(BlockOperator { plus, minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn gratings_form_a_complete_pair() {
        let space = FockSpace::new(256).unwrap();
        for (kick, phi) in [(1.9, 0.0), (0.7, 1.1), (2.5, -2.0)] {
            let spec = GratingSpec::kick(kick, Outcome::Plus).with_phi(phi);
            let p = grating_operator(&space, &spec).unwrap();
            let m = grating_operator(&space, &spec.with_outcome(Outcome::Minus)).unwrap();
            let sum = linalg::matmul(&p.adjoint(), &p) + linalg::matmul(&m.adjoint(), &m);
            assert!(max_abs_diff(&sum, &space.identity()) < 1e-9);
        }
    }

    #[test]
    fn vanishing_kick_is_identity() {
        let space = FockSpace::new(32).unwrap();
        let spec = GratingSpec::kick(0.0, Outcome::Plus);
        let op = grating_operator(&space, &spec).unwrap();
        assert!(max_abs_diff(&op, &space.identity()) < 1e-12);
        let (_, p) = grating(&space, &space.vacuum().into(), &spec).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_matches_displacement_form() {
        let space = FockSpace::new(128).unwrap();
        let alpha = c(0.0, 1.3);
        let d = space.displacement(alpha).unwrap();
        let phi = 0.4;
        let expected = (d.adjoint() - &d * Complex64::from_polar(1.0, phi)) * c(0.5, 0.0);
        let spec = GratingSpec::kick(1.3, Outcome::Minus).with_phi(phi);
        let op = grating_operator(&space, &spec).unwrap();
        assert!(max_abs_diff(&op, &expected) < 1e-10);
    }

    #[test]
    fn general_alpha_uses_rotated_kick() {
        let space = FockSpace::new(128).unwrap();
        let alpha = Complex64::from_polar(1.2, 0.3);
        let spec = GratingSpec {
            alpha,
            phi: 0.2,
            outcome: Outcome::Plus,
            general_alpha: true,
        };
        let d = space.displacement(alpha).unwrap();
        let expected = (d.adjoint() + &d * Complex64::from_polar(1.0, 0.2)) * c(0.5, 0.0);
        let op = grating_operator(&space, &spec).unwrap();
        assert!(max_abs_diff(&op, &expected) < 1e-10);
        assert!(grating_operator(&space, &GratingSpec { general_alpha: false, ..spec }).is_err());
    }

    #[test]
    fn probabilities_of_both_outcomes_sum_to_one() {
        let space = FockSpace::new(256).unwrap();
        let thermal: ResonatorState = space.thermal_state(5.0).unwrap().into();
        let spec = GratingSpec::kick(1.9, Outcome::Plus).with_phi(0.3);
        let [(_, p), (_, m)] = grating_branches(&space, &thermal, &spec).unwrap();
        assert!((p + m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unitary_sends_excited_vacuum_to_coherent_state() {
        let space = FockSpace::new(64).unwrap();
        let alpha = c(0.0, 1.5);
        let u = grating_unitary(&space, alpha, 0.0, 0.0).unwrap();
        let joint = JointState::product(c(1.0, 0.0), c(0.0, 0.0), &space.vacuum());
        let out = u.apply(&joint);
        let expected = space.coherent(-alpha);
        let overlap = out.plus_block().amplitudes.dotc(&expected.amplitudes).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
        assert!(out.minus_block().norm_sq < 1e-30);

        let id = grating_unitary(&space, c(0.0, 0.0), 0.0, 0.0).unwrap();
        assert!(max_abs_diff(&id.plus, &space.identity()) < 1e-15);
        assert!(max_abs_diff(&id.minus, &space.identity()) < 1e-15);
    }

    #[test]
    fn free_evolution_rotates_coherent_state() {
        let space = FockSpace::new(64).unwrap();
        let beta = c(1.0, 0.5);
        let theta = 0.9;
        let out = free_evolution(&space.coherent(beta).into(), theta);
        let expected: ResonatorState = space.coherent(beta * Complex64::from_polar(1.0, -theta)).into();
        assert!((out.overlap_fidelity(&expected) - 1.0).abs() < 1e-12);
        let full = free_evolution(&space.coherent(beta).into(), 2.0 * std::f64::consts::PI);
        assert!((full.overlap_fidelity(&space.coherent(beta).into()) - 1.0).abs() < 1e-12);
    }
}
