//! Decoherence during the interferometer: white-noise qubit dephasing at
//! the readout grating, and thermal phonons added to the resonator.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, FockSpace, ResonatorState};
use crate::linalg::{self, CMatrix};
use crate::phasespace::characteristic;
use crate::protocol::grating::{grating_operator, kick_operator, GratingSpec};
use crate::quadrature::GaussHermite;

/// Default Gauss-Hermite order per axis for the added-phonon integral.
pub const DEFAULT_QUADRATURE_POINTS: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingSpec {
    /// Qubit dephasing rate, 1/s.
    pub gamma: f64,
    /// Exposure time, s.
    pub t: f64,
    pub n_traj: usize,
    pub seed: u64,
}

impl DephasingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.t >= 0.0) || self.n_traj == 0 {
            return Err(Error::InvalidParameter(
                "dephasing needs gamma >= 0, t >= 0 and at least one trajectory".into(),
            ));
        }
        Ok(())
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma * self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalAddSpec {
    /// Mean number of added phonons.
    pub n_added: f64,
    #[serde(default = "default_points")]
    pub quadrature_points: usize,
}

fn default_points() -> usize {
    DEFAULT_QUADRATURE_POINTS
}

impl ThermalAddSpec {
    pub fn new(n_added: f64) -> Self {
        Self {
            n_added,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
        }
    }
}

fn grating_parts(space: &FockSpace, spec: &GratingSpec) -> Result<(CMatrix, CMatrix)> {
    spec.validate()?;
    let d = kick_operator(space, spec.alpha)?;
    let d_dag = d.adjoint();
    Ok((d, d_dag))
}

/// `e^{-gamma t} Upsilon rho Upsilon^dagger + (1 - e^{-gamma t}) (D^dagger rho D + D rho D^dagger) / 4`,
/// with the probability relative to the incoming weight.
pub fn dephased_grating_analytic(
    space: &FockSpace,
    state: &ResonatorState,
    spec: &GratingSpec,
    gamma_t: f64,
) -> Result<(ResonatorState, f64)> {
    if !(gamma_t >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma t must be >= 0, got {gamma_t}")));
    }
    let rho = state.to_density();
    let coherence = (-gamma_t).exp();
    let upsilon = grating_operator(space, spec)?;
    let (d, d_dag) = grating_parts(space, spec)?;
    let kept = linalg::sandwich(&upsilon, &rho.matrix) * Complex64::new(coherence, 0.0);
    let lost = (linalg::sandwich(&d_dag, &rho.matrix) + linalg::sandwich(&d, &rho.matrix))
        * Complex64::new(0.25 * (1.0 - coherence), 0.0);
    let out = DensityMatrix::new(kept + lost);
    let probability = out.weight / rho.weight;
    if probability < crate::hilbert::MIN_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok((ResonatorState::Mixed(out), probability))
}

/// `p_+ = 1/2 + (e^{-gamma t} / 2) Re[e^{i phi} chi(2 alpha)]`.
pub fn pplus_dephased(state: &ResonatorState, alpha: Complex64, phi: f64, gamma_t: f64) -> Result<f64> {
    let chi = characteristic(state, 2.0 * alpha)? / state.weight();
    Ok(0.5 + 0.5 * (-gamma_t).exp() * (Complex64::from_polar(1.0, phi) * chi).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    /// Trajectory-averaged unnormalized conditional state; its weight relative
    /// to the input is the averaged probability.
    pub state: ResonatorState,
    pub probability: f64,
    pub standard_error: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Sample mean and variance of the noise integral `W(t)`.
    pub w_mean: f64,
    pub w_variance: f64,
}

/// Stochastic dephasing: each trajectory draws `W ~ N(0, t)` and sees the
/// grating with its phase shifted by `sqrt(2 gamma) W`.
///
/// Trajectory `k` uses stream `k` of a ChaCha generator seeded with `seed`,
/// so results do not depend on evaluation order. Every trajectory's
/// conditional state is `(1/4)[D^dagger rho D + D rho D^dagger]
/// +/- (1/4)[e^{i phi_k} D rho D + h.c.]`, which is linear in
/// `e^{i phi_k}`; the average is therefore formed from the sampled phase
/// factors without storing each state.
pub fn dephasing_monte_carlo(
    space: &FockSpace,
    state: &ResonatorState,
    spec: &GratingSpec,
    dephasing: &DephasingSpec,
) -> Result<MonteCarloResult> {
    dephasing.validate()?;
    let rho = state.to_density();
    let weight = rho.weight;
    let (d, d_dag) = grating_parts(space, spec)?;
    let incoherent =
        (linalg::sandwich(&d_dag, &rho.matrix) + linalg::sandwich(&d, &rho.matrix)) * Complex64::new(0.25, 0.0);
    let forward = linalg::matmul(&linalg::matmul(&d, &rho.matrix), &d);
    let trace_a = linalg::trace(&incoherent).re / weight;
    let trace_b = linalg::trace(&forward) / weight;

    let sign = spec.outcome.sign();
    let coupling = (2.0 * dephasing.gamma).sqrt();
    let normal = Normal::new(0.0, dephasing.t.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("noise distribution: {e}")))?;
    let n = dephasing.n_traj;
    let mut mean_phase = Complex64::new(0.0, 0.0);
    let mut p_stats = Welford::default();
    let mut w_stats = Welford::default();
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(dephasing.seed);
        rng.set_stream(k as u64);
        let w = normal.sample(&mut rng);
        let phase = Complex64::from_polar(1.0, spec.phi + coupling * w);
        mean_phase += phase;
        p_stats.push(trace_a + 0.5 * sign * (phase * trace_b).re);
        w_stats.push(w);
    }
    let nf = n as f64;
    mean_phase /= nf;
    let probability = p_stats.mean;
    let cross = &forward * mean_phase;
    let averaged = incoherent + (&cross + cross.adjoint()) * Complex64::new(0.25 * sign, 0.0);
    Ok(MonteCarloResult {
        state: ResonatorState::Mixed(DensityMatrix::new(averaged)),
        probability,
        standard_error: (p_stats.variance() / nf).sqrt(),
        n_traj: n,
        seed: dephasing.seed,
        w_mean: w_stats.mean,
        w_variance: w_stats.variance(),
    })
}

/// Running mean and sample variance.
#[derive(Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let delta = v - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (v - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        }
    }
}

/// `(D(beta_i) rho D(beta_i)^dagger)` averaged over Gauss-Hermite nodes of a
/// normal `beta_i` with the given variance, for purely imaginary kicks.
/// In the position eigenbasis each term only rephases `rho(x_j, x_k)`.
fn average_momentum_kicks(space: &FockSpace, rho: &CMatrix, variance: f64, rule: &GaussHermite) -> CMatrix {
    let basis = space.position_basis();
    let v = &basis.vectors;
    let x = &basis.nodes;
    let in_position = linalg::matmul_r(&linalg::rmatmul(&v.transpose(), rho), v);
    let dim = space.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for k in 0..dim {
            let d = x[j] - x[k];
            let re = rule.normal_expectation(variance, |b| (b * d).cos());
            let im = rule.normal_expectation(variance, |b| (b * d).sin());
            out[(j, k)] = in_position[(j, k)] * Complex64::new(re, im);
        }
    }
    linalg::matmul_r(&linalg::rmatmul(v, &out), &v.transpose())
}

/// `rho -> int d^2 beta exp(-|beta|^2 / n') / (pi n') D(beta) rho D(beta)^dagger`
/// by a tensor-product Gauss-Hermite rule over `Re beta` and `Im beta`.
///
/// The displacement splits as `D(beta_r) D(i beta_i)` up to a phase that
/// cancels in the sandwich, so the rule is applied one axis at a time. The
/// `beta_r` axis is handled as momentum kicks in the frame rotated by a
/// quarter period.
pub fn thermal_add(state: &ResonatorState, spec: &ThermalAddSpec) -> Result<ResonatorState> {
    let n_added = spec.n_added;
    if !(n_added >= 0.0) || !n_added.is_finite() {
        return Err(Error::InvalidParameter(format!("added phonons must be >= 0, got {n_added}")));
    }
    if n_added == 0.0 {
        return Ok(state.clone());
    }
    let dim = state.dim();
    // |beta|^2 out to four standard deviations on each axis
    let reach = 8.0 * n_added;
    if reach >= dim as f64 / 8.0 {
        return Err(Error::TruncationRisk(format!(
            "adding {n_added} phonons reaches |beta|^2 = {reach:.2}, beyond dim/8 = {}",
            dim as f64 / 8.0
        )));
    }
    let space = FockSpace::new(dim)?;
    let rule = GaussHermite::new(spec.quadrature_points);
    let variance = 0.5 * n_added;
    let rho = state.to_density();
    let kicked = average_momentum_kicks(&space, &rho.matrix, variance, &rule);
    // D(beta_r) = R(-pi/2)^dagger D(i beta_r) R(-pi/2)
    let r = space.rotation(-std::f64::consts::FRAC_PI_2);
    let rotated = linalg::sandwich(&r, &kicked);
    let shifted = average_momentum_kicks(&space, &rotated, variance, &rule);
    let out = linalg::sandwich(&r.adjoint(), &shifted);
    Ok(ResonatorState::Mixed(DensityMatrix::new(out)))
}

/// `p_+ = 1/2 + (e^{-4 n' |alpha|^2} / 2) Re[e^{i phi} chi(2 alpha)]`.
pub fn pplus_thermal(state: &ResonatorState, alpha: Complex64, phi: f64, n_added: f64) -> Result<f64> {
    let chi = characteristic(state, 2.0 * alpha)? / state.weight();
    let damping = (-4.0 * n_added * alpha.norm_sqr()).exp();
    Ok(0.5 + 0.5 * damping * (Complex64::from_polar(1.0, phi) * chi).re)
}

/// Outcome-resolved dephased probabilities, `(p_+, p_-)`.
pub fn dephased_probabilities(state: &ResonatorState, alpha: Complex64, phi: f64, gamma_t: f64) -> Result<(f64, f64)> {
    let p = pplus_dephased(state, alpha, phi, gamma_t)?;
    Ok((p, 1.0 - p))
}
