//! Cooling by conditioned qubit flips: a pi burst flips the qubit only when
//! the resonator sits near equilibrium, so post-selecting the flipped outcome
//! passes the state through a narrow position window.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrate::{propagate_interaction, Schedule, DEFAULT_STEP_PHASE};
use super::pulse::{Carrier, DrivePulse};
use crate::error::{Error, Result};
use crate::hilbert::{condition, FockSpace, JointState, Moments, ResonatorState};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingPulse {
    /// Burst duration, s. The Gaussian drive has FWHM `tau_pi / 2`.
    pub tau_pi: f64,
    /// Peak coupling held during the burst, rad/s.
    pub lambda0: f64,
    #[serde(default)]
    pub carrier: Carrier,
}

impl CoolingPulse {
    /// 100 ns burst with `lambda0 / 2 pi = 800 kHz`, modulated.
    pub fn reference() -> Self {
        Self {
            tau_pi: 100e-9,
            lambda0: 2.0 * PI * 800e3,
            carrier: Carrier::Modulated,
        }
    }

    pub fn drive(&self) -> DrivePulse {
        DrivePulse::pi(self.tau_pi)
    }

    /// Detuning per unit position seen by a static resonator. A carrier at
    /// the mechanical frequency averages to half its peak in the co-rotating
    /// frame.
    pub fn static_coupling(&self) -> f64 {
        match self.carrier {
            Carrier::Modulated => 0.5 * self.lambda0,
            Carrier::Constant => self.lambda0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_pi > 0.0) || !self.lambda0.is_finite() {
            return Err(Error::InvalidParameter(
                "cooling burst needs tau_pi > 0 and a finite coupling".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    /// Position held fixed across the burst.
    #[default]
    Frozen,
    /// Joint qubit-resonator integration.
    Full,
}

/// `|F(x)|^2` sampled at positions `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCurve {
    pub x: Vec<f64>,
    pub transmission: Vec<f64>,
}

impl FilterCurve {
    /// Full width at half maximum of the transmission peak.
    pub fn fwhm(&self) -> Option<f64> {
        let (peak, &max) = self
            .transmission
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        let half = 0.5 * max;
        let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
            let mut prev = peak;
            for i in range {
                if self.transmission[i] < half {
                    let (x0, x1) = (self.x[prev], self.x[i]);
                    let (f0, f1) = (self.transmission[prev], self.transmission[i]);
                    return Some(x0 + (half - f0) / (f1 - f0) * (x1 - x0));
                }
                prev = i;
            }
            None
        };
        let right = crossing(&mut (peak + 1..self.x.len()))?;
        let left = crossing(&mut (0..peak).rev())?;
        Some(right - left)
    }
}

/// Final qubit amplitudes `(<+|U|+>, <-|U|+>)` of the two-level problem with
/// static detuning `delta` under the drive, integrated by RK4.
pub fn burst_amplitudes(drive: &DrivePulse, delta: f64) -> [Complex64; 2] {
    let (start, end) = drive.window();
    let rate = drive.peak().max(delta.abs());
    let steps = (((end - start) * rate / (0.2 * DEFAULT_STEP_PHASE)).ceil() as usize).max(200);
    let h = (end - start) / steps as f64;
    let minus_i = Complex64::new(0.0, -1.0);
    let deriv = |t: f64, s: [Complex64; 2]| -> [Complex64; 2] {
        let g = 0.5 * drive.rate(t);
        let d = 0.5 * delta;
        [minus_i * (d * s[0] + g * s[1]), minus_i * (g * s[0] - d * s[1])]
    };
    let mut s = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let add = |a: [Complex64; 2], b: [Complex64; 2], w: f64| [a[0] + b[0] * w, a[1] + b[1] * w];
    for k in 0..steps {
        let t = start + h * k as f64;
        let k1 = deriv(t, s);
        let k2 = deriv(t + 0.5 * h, add(s, k1, 0.5 * h));
        let k3 = deriv(t + 0.5 * h, add(s, k2, 0.5 * h));
        let k4 = deriv(t + h, add(s, k3, h));
        for i in 0..2 {
            s[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    s
}

/// Flip amplitude `<-|U|+>`.
pub fn flip_amplitude(drive: &DrivePulse, delta: f64) -> Complex64 {
    burst_amplitudes(drive, delta)[1]
}

/// Frozen-mode Kraus operators for the flipped and unflipped outcomes.
pub fn frozen_kraus_pair(space: &FockSpace, pulse: &CoolingPulse) -> Result<[CMatrix; 2]> {
    pulse.validate()?;
    let drive = pulse.drive();
    let lam = pulse.static_coupling();
    let branch = |k: usize| space.function_of_position(|x| burst_amplitudes(&drive, lam * x)[k]);
    Ok([branch(1), branch(0)])
}

/// Frozen-position filter curve on the points `x`.
pub fn frozen_filter_curve(pulse: &CoolingPulse, x: &[f64]) -> FilterCurve {
    let drive = pulse.drive();
    let lam = pulse.static_coupling();
    FilterCurve {
        x: x.to_vec(),
        transmission: x.iter().map(|&v| flip_amplitude(&drive, lam * v).norm_sqr()).collect(),
    }
}

/// Operator taking the resonator from `|+>` to the conditioned `|->` branch.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingKraus {
    pub operator: CMatrix,
    /// `|<x_k|K|x_k>|^2` on the position eigenbasis of the truncated space.
    pub curve: FilterCurve,
}

/// Kraus operator of one burst, conditioned on the flipped outcome.
///
/// In `Full` mode every Fock column is integrated with the coupling and
/// drive on, and the result is expressed in the frame co-rotating with the
/// resonator so that no free rotation is folded in.
pub fn cooling_kraus(
    space: &FockSpace,
    pulse: &CoolingPulse,
    mode: FilterMode,
    omega: f64,
) -> Result<CoolingKraus> {
    pulse.validate()?;
    let basis = space.position_basis();
    let operator = match mode {
        FilterMode::Frozen => {
            let drive = pulse.drive();
            let lam = pulse.static_coupling();
            space.function_of_position(|x| flip_amplitude(&drive, lam * x))
        }
        FilterMode::Full => {
            let schedule = Schedule::cooling(pulse.drive(), pulse.lambda0, pulse.carrier, omega);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let columns: Vec<JointState> = (0..space.dim())
                .map(|n| JointState::product(one, zero, &space.fock(n)))
                .collect();
            let out = propagate_interaction(&columns, &schedule, omega, schedule.default_step(omega))?;
            let dim = space.dim();
            CMatrix::from_fn(dim, dim, |m, n| out[n].vector[dim + m])
        }
    };
    let v = &basis.vectors;
    let in_position = linalg::matmul_r(&linalg::rmatmul(&v.transpose(), &operator), v);
    let curve = FilterCurve {
        x: basis.nodes.clone(),
        transmission: (0..space.dim()).map(|k| in_position[(k, k)].norm_sqr()).collect(),
    };
    Ok(CoolingKraus { operator, curve })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub curve: FilterCurve,
    pub state: ResonatorState,
    pub probability: f64,
}

/// One conditioned burst.
pub fn cooling_filter(
    space: &FockSpace,
    state: &ResonatorState,
    pulse: &CoolingPulse,
    mode: FilterMode,
    omega: f64,
) -> Result<FilterOutcome> {
    let kraus = cooling_kraus(space, pulse, mode, omega)?;
    let (state, probability) = condition(state, &kraus.operator)?;
    Ok(FilterOutcome {
        curve: kraus.curve,
        state,
        probability,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingRecord {
    pub state: ResonatorState,
    /// Product of the per-burst probabilities.
    pub probability: f64,
    pub step_probabilities: Vec<f64>,
    pub before: Moments,
    pub after: Moments,
    pub curve: FilterCurve,
}

/// `repetitions` bursts, each followed by a quarter period of free evolution
/// except the last.
pub fn cool(
    space: &FockSpace,
    state: &ResonatorState,
    pulse: &CoolingPulse,
    repetitions: usize,
    mode: FilterMode,
    omega: f64,
) -> Result<CoolingRecord> {
    let kraus = cooling_kraus(space, pulse, mode, omega)?;
    let before = state.normalized().moments();
    let mut current = state.clone();
    let mut probability = 1.0;
    let mut step_probabilities = Vec::with_capacity(repetitions);
    for k in 0..repetitions {
        if k > 0 {
            current = current.rotate(0.5 * PI);
        }
        let (next, p) = condition(&current, &kraus.operator)?;
        current = next;
        probability *= p;
        step_probabilities.push(p);
    }
    let after = current.normalized().moments();
    Ok(CoolingRecord {
        state: current,
        probability,
        step_probabilities,
        before,
        after,
        curve: kraus.curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA: f64 = 2.0 * PI * 125e6;

    #[test]
    fn resonant_burst_always_flips() {
        let drive = CoolingPulse::reference().drive();
        assert!((flip_amplitude(&drive, 0.0).norm_sqr() - 1.0).abs() < 1e-8);
        let far = flip_amplitude(&drive, 50.0 * drive.peak()).norm_sqr();
        assert!(far < 1e-3, "{far}");
    }

    #[test]
    fn zero_coupling_passes_everything() {
        let space = FockSpace::new(32).unwrap();
        let pulse = CoolingPulse {
            lambda0: 0.0,
            ..CoolingPulse::reference()
        };
        let thermal: ResonatorState = space.thermal_state(1.0).unwrap().into();
        let out = cooling_filter(&space, &thermal, &pulse, FilterMode::Frozen, OMEGA).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-8);
        assert!(out.curve.transmission.iter().all(|&t| (t - 1.0).abs() < 1e-8));
    }

    #[test]
    fn ground_state_survives() {
        let space = FockSpace::new(64).unwrap();
        let vac: ResonatorState = space.vacuum().into();
        let rec = cool(&space, &vac, &CoolingPulse::reference(), 2, FilterMode::Frozen, OMEGA).unwrap();
        assert!(rec.state.overlap_fidelity(&vac) > 0.99);
        assert!(rec.probability > 0.9);
    }

    #[test]
    fn fwhm_of_triangle() {
        let curve = FilterCurve {
            x: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            transmission: vec![0.0, 0.5, 1.0, 0.5, 0.0],
        };
        assert!((curve.fwhm().unwrap() - 2.0).abs() < 1e-12);
    }
}
