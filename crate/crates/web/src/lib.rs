//! WebAssembly bindings for the browser demo: a flux sweep of the device,
//! the Wigner function after the two-grating protocol, and the readout map.
//!
//! Each binding returns JSON; the plain functions in [`demo`] do the work and
//! are tested natively.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js<T: serde::Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Qubit frequency and coupling against flux difference, as JSON columns.
#[wasm_bindgen]
pub fn flux_sweep(e_j0_ghz: f64, b_parallel: f64, points: usize) -> Result<String, JsError> {
    to_js(demo::flux_sweep(e_j0_ghz, b_parallel, points))
}

/// Wigner function after two kicks a quarter period apart, as JSON.
#[wasm_bindgen]
pub fn protocol_wigner(kick: f64, nbar: f64, points: usize) -> Result<String, JsError> {
    to_js(demo::protocol_wigner(kick, nbar, points))
}

/// Readout probability over free-rotation angle and readout kick, as JSON.
#[wasm_bindgen]
pub fn readout_map(kick: f64, nbar: f64, n_added: f64, theta_points: usize, ratio_points: usize) -> Result<String, JsError> {
    to_js(demo::readout_map(kick, nbar, n_added, theta_points, ratio_points))
}
