//! Two-grating interferometer and its qubit readout.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::cooling::{cool, CoolingPulse, FilterMode};
use super::grating::{grating, GratingSpec, Outcome};
use crate::decoherence::{thermal_add, ThermalAddSpec};
use crate::error::{Error, Result};
use crate::hilbert::{FockSpace, ResonatorState};
use crate::phasespace::{self, marginal, marginal_grid, PPlusMap};

/// One protocol operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Cool {
        pulse: CoolingPulse,
        repetitions: usize,
        mode: FilterMode,
        omega: f64,
    },
    Grate(GratingSpec),
    /// Free rotation by `theta = Omega tau`.
    Evolve { theta: f64 },
    /// Thermal phonons added by the environment.
    ThermalAdd(ThermalAddSpec),
    /// Unconditioned readout; the state is left untouched.
    Readout { alpha3: Complex64, phi: f64 },
}

impl Step {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Cool { .. } => "cool",
            Self::Grate(_) => "grate",
            Self::Evolve { .. } => "evolve",
            Self::ThermalAdd(_) => "thermal_add",
            Self::Readout { .. } => "readout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: Step,
    /// Success probability of a conditioned step, 1 otherwise.
    pub probability: f64,
    /// Readout probability for `Readout` steps.
    pub pplus: Option<f64>,
    pub state: ResonatorState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRecord {
    pub initial: ResonatorState,
    pub steps: Vec<StepRecord>,
}

impl ProtocolRecord {
    pub fn cumulative_probability(&self) -> f64 {
        self.steps.iter().map(|s| s.probability).product()
    }

    pub fn final_state(&self) -> &ResonatorState {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }
}

/// Run `steps` in order, checking truncation health after each.
pub fn run_protocol(space: &FockSpace, initial: &ResonatorState, steps: &[Step]) -> Result<ProtocolRecord> {
    let mut current = initial.clone();
    let mut records = Vec::with_capacity(steps.len());
    for step in steps {
        let (next, probability, pplus_value) = match step {
            Step::Cool {
                pulse,
                repetitions,
                mode,
                omega,
            } => {
                let rec = cool(space, &current, pulse, *repetitions, *mode, *omega)?;
                (rec.state, rec.probability, None)
            }
            Step::Grate(spec) => {
                let (s, p) = grating(space, &current, spec)?;
                (s, p, None)
            }
            Step::Evolve { theta } => (current.rotate(*theta), 1.0, None),
            Step::ThermalAdd(spec) => (thermal_add(&current, spec)?, 1.0, None),
            Step::Readout { alpha3, phi } => {
                let p = pplus(&current, *alpha3, *phi)?;
                (current.clone(), 1.0, Some(p))
            }
        };
        next.check_truncation(space.tolerance())?;
        records.push(StepRecord {
            step: step.clone(),
            probability,
            pplus: pplus_value,
            state: next.clone(),
        });
        current = next;
    }
    Ok(ProtocolRecord {
        initial: initial.clone(),
        steps: records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSpec {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// `Omega tau_1`.
    pub theta1: f64,
    /// `Omega tau_2`, measured from the second grating.
    pub theta2: f64,
    pub outcomes: [Outcome; 2],
    #[serde(default)]
    pub phi1: f64,
    #[serde(default)]
    pub phi2: f64,
}

impl InterferometerSpec {
    /// Equal momentum kicks a quarter period apart, both outcomes `+`.
    pub fn quarter_period(kick: f64) -> Self {
        Self {
            alpha1: Complex64::new(0.0, kick),
            alpha2: Complex64::new(0.0, kick),
            theta1: 0.5 * PI,
            theta2: 0.0,
            outcomes: [Outcome::Plus, Outcome::Plus],
            phi1: 0.0,
            phi2: 0.0,
        }
    }

    pub fn gratings(&self) -> [GratingSpec; 2] {
        let make = |alpha: Complex64, phi: f64, outcome: Outcome| GratingSpec {
            alpha,
            phi,
            outcome,
            general_alpha: false,
        };
        [
            make(self.alpha1, self.phi1, self.outcomes[0]),
            make(self.alpha2, self.phi2, self.outcomes[1]),
        ]
    }

    pub fn steps(&self) -> Vec<Step> {
        let [g1, g2] = self.gratings();
        vec![
            Step::Grate(g1),
            Step::Evolve { theta: self.theta1 },
            Step::Grate(g2),
            Step::Evolve { theta: self.theta2 },
        ]
    }
}

/// Grating, free evolution, grating, free evolution.
pub fn interferometer(
    space: &FockSpace,
    initial: &ResonatorState,
    spec: &InterferometerSpec,
) -> Result<ProtocolRecord> {
    run_protocol(space, initial, &spec.steps())
}

/// `p_+ = 1/2 + Re[e^{i phi} chi(2 alpha3)] / 2`, normalized by the state's
/// weight. Equals `Tr[Upsilon_+^dagger Upsilon_+ rho]` for the readout kick.
pub fn pplus(state: &ResonatorState, alpha3: Complex64, phi: f64) -> Result<f64> {
    let chi = phasespace::characteristic(state, 2.0 * alpha3)? / state.weight();
    Ok((0.5 + 0.5 * (Complex64::from_polar(1.0, phi) * chi).re).clamp(0.0, 1.0))
}

/// `p_+ = int cos^2(|alpha3| x + phi/2) P(x) dx` on the marginal along the
/// kick direction.
pub fn pplus_from_marginal(state: &ResonatorState, alpha3: Complex64, phi: f64) -> Result<f64> {
    let kick = alpha3.norm();
    let theta = if kick == 0.0 {
        0.0
    } else {
        (alpha3 / Complex64::new(0.0, kick)).arg()
    };
    let curve = marginal(state, theta, &marginal_grid(state))?;
    Ok(curve.pplus(kick, phi))
}

/// Readout map over `Omega tau_2` and `|alpha3| / alpha_ref`. `state` is
/// taken right after the second grating.
pub fn pplus_map(
    state: &ResonatorState,
    alpha_ref: f64,
    theta: Vec<f64>,
    ratio: Vec<f64>,
    phi: f64,
) -> Result<PPlusMap> {
    let mut failure = None;
    let map = PPlusMap::build(theta, ratio, alpha_ref, phi, |t, a3| {
        // rotating the state by t is the same as rotating the kick by t
        let alpha3 = Complex64::from_polar(a3, 0.5 * PI + t);
        pplus(state, alpha3, phi).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NAN
        })
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(map),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutSample {
    pub shots: u64,
    pub plus: u64,
    pub seed: u64,
}

impl ReadoutSample {
    pub fn estimate(&self) -> f64 {
        self.plus as f64 / self.shots as f64
    }
}

/// Simulated repeated readout with outcome probability `p`.
pub fn sample_readout(p: f64, shots: u64, seed: u64) -> Result<ReadoutSample> {
    let dist = Binomial::new(shots, p)
        .map_err(|e| Error::InvalidParameter(format!("readout probability {p}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ReadoutSample {
        shots,
        plus: dist.sample(&mut rng),
        seed,
    })
}
