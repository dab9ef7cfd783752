//! Demo computations behind the bindings, sized for interactive use.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use displacemon::decoherence::{thermal_add, ThermalAddSpec};
use displacemon::device::DeviceParams;
use displacemon::hilbert::{FockSpace, ResonatorState};
use displacemon::phasespace::{ratio_axis, theta_axis, wigner, MapFeature, PPlusMap, WignerSpec};
use displacemon::protocol::{interferometer, pplus, InterferometerSpec};

/// Fock dimension for Wigner plots.
pub const WIGNER_DIM: usize = 96;
/// Fock dimension for readout maps; the readout kick reaches twice the
/// grating kick.
pub const MAP_DIM: usize = 160;
pub const MAX_KICK: f64 = 2.2;
pub const MAX_NBAR: f64 = 2.0;
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub flux: Vec<f64>,
    pub omega_q_ghz: Vec<f64>,
    pub lambda_mhz: Vec<f64>,
}

pub fn flux_sweep(e_j0_ghz: f64, b_parallel: f64, points: usize) -> Result<Sweep, String> {
    if !(1.0..=50.0).contains(&e_j0_ghz) || !(0.01..=2.0).contains(&b_parallel) {
        return Err("E_J0 must lie in [1, 50] GHz and the field in [0.01, 2] T".into());
    }
    if !(2..=2001).contains(&points) {
        return Err("points must lie in [2, 2001]".into());
    }
    let mut device = DeviceParams::reference();
    device.squid.e_j0 *= e_j0_ghz / 12.0;
    device.squid.b_parallel = b_parallel;
    let sweep = displacemon::device::flux_sweep(&device, -0.95, 0.95, points).map_err(|e| e.to_string())?;
    Ok(Sweep {
        flux: sweep.iter().map(|p| p.flux).collect(),
        omega_q_ghz: sweep.iter().map(|p| p.omega_q_hz / 1e9).collect(),
        lambda_mhz: sweep.iter().map(|p| p.lambda_hz / 1e6).collect(),
    })
}

fn check_state_inputs(kick: f64, nbar: f64) -> Result<(), String> {
    if !(0.0..=MAX_KICK).contains(&kick) {
        return Err(format!("kick must lie in [0, {MAX_KICK}]"));
    }
    if !(0.0..=MAX_NBAR).contains(&nbar) {
        return Err(format!("nbar must lie in [0, {MAX_NBAR}]"));
    }
    Ok(())
}

/// State after two momentum kicks a quarter period apart, both outcomes +.
fn protocol_state(space: &FockSpace, kick: f64, nbar: f64) -> Result<(ResonatorState, f64), String> {
    let initial: ResonatorState = if nbar == 0.0 {
        space.vacuum().into()
    } else {
        space.thermal_state(nbar).map_err(|e| e.to_string())?.into()
    };
    let rec = interferometer(space, &initial, &InterferometerSpec::quarter_period(kick)).map_err(|e| e.to_string())?;
    Ok((rec.final_state().normalized(), rec.cumulative_probability()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerPlot {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Row-major, `values[i * p.len() + j] = W(x_i, p_j)`.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub probability: f64,
}

pub fn protocol_wigner(kick: f64, nbar: f64, points: usize) -> Result<WignerPlot, String> {
    check_state_inputs(kick, nbar)?;
    let space = FockSpace::new(WIGNER_DIM).map_err(|e| e.to_string())?;
    let (state, probability) = protocol_state(&space, kick, nbar)?;
    let auto = WignerSpec::for_state(&state);
    let spec = WignerSpec {
        points: points.clamp(auto.points, auto.points.max(401)) | 1,
        ..auto
    };
    let w = wigner(&state, &spec).map_err(|e| e.to_string())?;
    Ok(WignerPlot {
        min: w.min(),
        max: w.max(),
        x: w.x,
        p: w.p,
        values: w.values,
        probability,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutMap {
    pub theta: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Row-major over `theta` then `ratio`.
    pub values: Vec<f64>,
    pub features: Vec<MapFeature>,
}

pub fn readout_map(kick: f64, nbar: f64, n_added: f64, theta_points: usize, ratio_points: usize) -> Result<ReadoutMap, String> {
    check_state_inputs(kick, nbar)?;
    if !(0.0..=0.5).contains(&n_added) {
        return Err("added phonons must lie in [0, 0.5]".into());
    }
    if !(4..=MAX_POINTS).contains(&theta_points) || !(4..=MAX_POINTS).contains(&ratio_points) {
        return Err(format!("map sides must lie in [4, {MAX_POINTS}]"));
    }
    let space = FockSpace::new(MAP_DIM).map_err(|e| e.to_string())?;
    let (mut state, _) = protocol_state(&space, kick, nbar)?;
    if n_added > 0.0 {
        state = thermal_add(&state, &ThermalAddSpec::new(n_added)).map_err(|e| e.to_string())?;
    }
    let mut failure = None;
    let map = PPlusMap::build(theta_axis(theta_points), ratio_axis(ratio_points, 2.0), kick.max(1e-3), 0.0, |t, a3| {
        pplus(&state, Complex64::from_polar(a3, 0.5 * PI + t), 0.0).unwrap_or_else(|e| {
            failure.get_or_insert(e.to_string());
            f64::NAN
        })
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ReadoutMap {
        features: map.features(1e-3),
        theta: map.theta,
        ratio: map.ratio,
        values: map.values,
    })
}
