//! Direct RK4 integration of the qubit-resonator Hamiltonian
//! `Omega a^dagger a + lambda(t)/2 (a + a^dagger) sigma_z + g(t)/2 sigma_x`
//! in the qubit rotating frame.
//!
//! Integration runs in the mechanical interaction picture, where the state
//! only moves while the coupling or the drive is on.

use num_complex::Complex64;

use super::pulse::{Carrier, DrivePulse, PulseEnvelope};
use crate::error::{Error, Result};
use crate::hilbert::JointState;
use crate::linalg::CVector;

/// `dt * max(Omega, lambda_peak, g_peak)` must stay below this.
pub const MAX_STEP_PHASE: f64 = 0.05;
/// Default `dt * max(...)`.
pub const DEFAULT_STEP_PHASE: f64 = 0.01;

type Rate = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-dependent coupling `lambda(t)` and drive `g(t)` over `[start, end]`.
pub struct Schedule {
    pub start: f64,
    pub end: f64,
    coupling: Rate,
    drive: Rate,
    pub coupling_peak: f64,
    pub drive_peak: f64,
}

impl Schedule {
    pub fn new(
        start: f64,
        end: f64,
        coupling: impl Fn(f64) -> f64 + Send + Sync + 'static,
        drive: impl Fn(f64) -> f64 + Send + Sync + 'static,
        coupling_peak: f64,
        drive_peak: f64,
    ) -> Self {
        Self {
            start,
            end,
            coupling: Box::new(coupling),
            drive: Box::new(drive),
            coupling_peak: coupling_peak.abs(),
            drive_peak: drive_peak.abs(),
        }
    }

    /// Coupling pulse alone over its envelope window.
    pub fn grating(pulse: PulseEnvelope, omega: f64) -> Self {
        let (start, end) = pulse.window();
        Self::new(
            start,
            end,
            move |t| pulse.coupling(t, omega),
            |_| 0.0,
            pulse.lambda0,
            0.0,
        )
    }

    /// Qubit drive with the coupling held on (optionally modulated) for the
    /// length of the drive window.
    pub fn cooling(drive: DrivePulse, lambda0: f64, carrier: Carrier, omega: f64) -> Self {
        let (start, end) = drive.window();
        Self::new(
            start,
            end,
            move |t| match carrier {
                Carrier::Modulated => lambda0 * (omega * t).cos(),
                Carrier::Constant => lambda0,
            },
            move |t| drive.rate(t),
            lambda0,
            drive.peak(),
        )
    }

    pub fn coupling(&self, t: f64) -> f64 {
        (self.coupling)(t)
    }

    pub fn drive(&self, t: f64) -> f64 {
        (self.drive)(t)
    }

    /// Default step for mechanical frequency `omega`.
    pub fn default_step(&self, omega: f64) -> f64 {
        DEFAULT_STEP_PHASE / self.fastest_rate(omega)
    }

    fn fastest_rate(&self, omega: f64) -> f64 {
        omega.abs().max(self.coupling_peak).max(self.drive_peak)
    }

    fn check_step(&self, omega: f64, dt: f64) -> Result<usize> {
        if !(dt > 0.0) || !(self.end >= self.start) {
            return Err(Error::InvalidParameter(
                "integration needs dt > 0 and end >= start".into(),
            ));
        }
        let product = dt * self.fastest_rate(omega);
        if product >= MAX_STEP_PHASE {
            return Err(Error::StepTooLarge { product });
        }
        Ok((((self.end - self.start) / dt).ceil() as usize).max(1))
    }
}

/// Columns of joint states laid out contiguously, each `(|+> block, |-> block)`.
struct Batch {
    dim: usize,
    data: Vec<Complex64>,
}

impl Batch {
    fn columns(&self) -> usize {
        self.data.len() / (2 * self.dim)
    }
}

fn derivative(
    dim: usize,
    psi: &[Complex64],
    out: &mut [Complex64],
    lambda: f64,
    g: f64,
    carrier: Complex64,
) {
    let minus_i = Complex64::new(0.0, -1.0);
    let cols = psi.len() / (2 * dim);
    let sq: Vec<f64> = (0..dim).map(|n| (n as f64).sqrt()).collect();
    for col in 0..cols {
        let base = 2 * dim * col;
        for block in 0..2 {
            let sign = if block == 0 { 0.5 } else { -0.5 };
            let this = base + block * dim;
            let other = base + (1 - block) * dim;
            let kick = lambda * sign;
            for n in 0..dim {
                // (a psi)_n = sqrt(n+1) psi_{n+1}; (a^dagger psi)_n = sqrt(n) psi_{n-1}
                let mut mech = Complex64::new(0.0, 0.0);
                if n + 1 < dim {
                    mech += carrier.conj() * (sq[n + 1] * psi[this + n + 1]);
                }
                if n > 0 {
                    mech += carrier * (sq[n] * psi[this + n - 1]);
                }
                let h = kick * mech + 0.5 * g * psi[other + n];
                out[this + n] = minus_i * h;
            }
        }
    }
}

/// Interaction-picture RK4 from `start` to `end` (absolute times).
fn rk4(batch: &mut Batch, schedule: &Schedule, omega: f64, steps: usize) {
    let len = batch.data.len();
    let dim = batch.dim;
    let h = (schedule.end - schedule.start) / steps as f64;
    let mut k1 = vec![Complex64::new(0.0, 0.0); len];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let eval = |t: f64, psi: &[Complex64], out: &mut [Complex64]| {
        derivative(
            dim,
            psi,
            out,
            schedule.coupling(t),
            schedule.drive(t),
            Complex64::from_polar(1.0, omega * t),
        );
    };
    for step in 0..steps {
        let t = schedule.start + h * step as f64;
        let psi = &batch.data;
        eval(t, psi, &mut k1);
        for i in 0..len {
            tmp[i] = psi[i] + 0.5 * h * k1[i];
        }
        eval(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..len {
            tmp[i] = psi[i] + 0.5 * h * k2[i];
        }
        eval(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..len {
            tmp[i] = psi[i] + h * k3[i];
        }
        eval(t + h, &tmp, &mut k4);
        let w = h / 6.0;
        for i in 0..len {
            batch.data[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Multiply each Fock amplitude by `exp(i phase n)`.
fn phase_fock(batch: &mut Batch, phase: f64) {
    let dim = batch.dim;
    let factors: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::from_polar(1.0, phase * n as f64))
        .collect();
    for (i, z) in batch.data.iter_mut().enumerate() {
        *z *= factors[i % dim];
    }
}

fn pack(states: &[JointState]) -> Result<Batch> {
    let dim = states
        .first()
        .map(JointState::dim)
        .ok_or_else(|| Error::InvalidParameter("no states to integrate".into()))?;
    if states.iter().any(|s| s.dim() != dim) {
        return Err(Error::InvalidParameter("joint states differ in dimension".into()));
    }
    let data = states.iter().flat_map(|s| s.vector.iter().copied()).collect();
    Ok(Batch { dim, data })
}

fn unpack(batch: Batch) -> Vec<JointState> {
    let n = 2 * batch.dim;
    (0..batch.columns())
        .map(|c| JointState {
            vector: CVector::from_column_slice(&batch.data[c * n..(c + 1) * n]),
        })
        .collect()
}

/// Evolve Schrodinger-picture states given at `schedule.start`; the results
/// are in the interaction picture relative to the start time, i.e. with the
/// free rotation `R(Omega (end - start))` removed.
pub fn propagate_interaction(
    states: &[JointState],
    schedule: &Schedule,
    omega: f64,
    dt: f64,
) -> Result<Vec<JointState>> {
    let steps = schedule.check_step(omega, dt)?;
    let mut batch = pack(states)?;
    // absolute interaction frame: psi_I = R(-Omega t) psi_S
    phase_fock(&mut batch, omega * schedule.start);
    rk4(&mut batch, schedule, omega, steps);
    phase_fock(&mut batch, -omega * schedule.start);
    Ok(unpack(batch))
}

/// Evolve a Schrodinger-picture joint state from `schedule.start` to
/// `schedule.end` (qubit rotating frame).
pub fn integrate_joint(
    joint: &JointState,
    schedule: &Schedule,
    omega: f64,
    dt: f64,
) -> Result<JointState> {
    let steps = schedule.check_step(omega, dt)?;
    let mut batch = pack(std::slice::from_ref(joint))?;
    phase_fock(&mut batch, omega * schedule.start);
    rk4(&mut batch, schedule, omega, steps);
    phase_fock(&mut batch, -omega * schedule.end);
    Ok(unpack(batch).remove(0))
}
