//! Scenario configuration: one TOML document per run, every section optional
//! unless the chosen subcommand needs it. Unknown keys are rejected.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use displacemon::device::{
    constants::PLANCK, tension_for_frequency, DeviceParams, EnvironmentParams, MechGeometry, Regime,
    SquidParams, GRAPHENE_SHEET_DENSITY,
};
use displacemon::hilbert::{FockSpace, ResonatorState};
use displacemon::protocol::{
    pulse_alpha, Carrier, CoolingPulse, FilterMode, InterferometerSpec, Outcome, PulseEnvelope,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub device: DeviceConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling: Option<CoolingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default)]
    pub readout: ReadoutConfig,
    #[serde(default)]
    pub decoherence: DecoherenceConfig,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalConfig>,
    #[serde(default)]
    pub wigner: WignerConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub geometry: GeometryConfig,
    pub squid: SquidConfig,
    pub environment: EnvironmentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// Suspended length, m.
    pub length: f64,
    /// Tube diameter, m.
    pub diameter: f64,
    /// Target mode frequency, Hz; sets the tension when `tension` is absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    /// Tension, N.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tension: Option<f64>,
    pub regime: Regime,
    /// Mass per unit area, kg/m^2.
    pub sheet_density: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            length: 800e-9,
            diameter: 2.5e-9,
            frequency_hz: Some(125e6),
            tension: None,
            regime: Regime::Tension,
            sheet_density: GRAPHENE_SHEET_DENSITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SquidConfig {
    /// Maximum Josephson energy as E/h, GHz.
    pub e_j0_ghz: f64,
    /// Charging energy as E/h, GHz.
    pub e_c_ghz: f64,
    pub asymmetry: f64,
    /// Area of one loop, m^2; only used for the perpendicular-field estimate.
    pub loop_area: f64,
    /// In-plane field, T.
    pub b_parallel: f64,
    /// Operating flux difference in flux quanta.
    pub flux_bias: f64,
}

impl Default for SquidConfig {
    fn default() -> Self {
        Self {
            e_j0_ghz: 12.0,
            e_c_ghz: 0.2,
            asymmetry: 0.0,
            loop_area: 0.0,
            b_parallel: 0.5,
            flux_bias: -0.84,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentConfig {
    /// K.
    pub temperature: f64,
    pub quality_factor: f64,
    /// Qubit dephasing time, s.
    pub t2: f64,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            temperature: 0.033,
            quality_factor: 1e5,
            t2: 2e-6,
        }
    }
}

impl DeviceConfig {
    pub fn params(&self) -> Result<DeviceParams, CliError> {
        let g = &self.geometry;
        let tension = match (g.tension, g.frequency_hz) {
            (Some(t), None) => t,
            (None, Some(f)) => tension_for_frequency(g.length, g.diameter, g.sheet_density, f),
            (None, None) if g.regime == Regime::Rigidity => 0.0,
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "device.geometry: give either tension or frequency_hz, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "device.geometry.tension: missing; give tension or frequency_hz".into(),
                ))
            }
        };
        let s = &self.squid;
        Ok(DeviceParams {
            geometry: MechGeometry {
                length: g.length,
                diameter: g.diameter,
                tension,
                regime: g.regime,
                sheet_density: g.sheet_density,
            },
            squid: SquidParams {
                e_j0: s.e_j0_ghz * 1e9 * PLANCK,
                e_c: s.e_c_ghz * 1e9 * PLANCK,
                asymmetry: s.asymmetry,
                loop_area: s.loop_area,
                b_parallel: s.b_parallel,
                flux_bias: s.flux_bias,
            },
            environment: EnvironmentParams {
                temperature: self.environment.temperature,
                quality_factor: self.environment.quality_factor,
                t2: self.environment.t2,
            },
        })
    }

    /// Mechanical angular frequency, rad/s.
    pub fn omega(&self) -> Result<f64, CliError> {
        Ok(self.params()?.mode()?.omega)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Flux differences in flux quanta.
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: -0.95,
            end: 0.95,
            points: 381,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub dim: usize,
    /// Population allowed in the top 5% of Fock levels.
    pub tolerance: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            dim: displacemon::hilbert::DEFAULT_DIM,
            tolerance: displacemon::hilbert::DEFAULT_TOL,
        }
    }
}

impl NumericsConfig {
    pub fn space(&self) -> Result<FockSpace, CliError> {
        FockSpace::with_tolerance(self.dim, self.tolerance)
            .map_err(|e| CliError::Config(format!("numerics: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    /// Thermal occupation of the initial state; 0 is the ground state.
    pub nbar: f64,
}

impl StateConfig {
    pub fn initial(&self, space: &FockSpace) -> Result<ResonatorState, CliError> {
        if !(self.nbar >= 0.0) {
            return Err(CliError::Config(format!("state.nbar: must be >= 0, got {}", self.nbar)));
        }
        if self.nbar == 0.0 {
            Ok(space.vacuum().into())
        } else {
            Ok(space.thermal_state(self.nbar)?.into())
        }
    }

    pub fn describe(&self) -> String {
        if self.nbar == 0.0 {
            "ground state".into()
        } else {
            format!("thermal state, nbar {}", self.nbar)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoolingConfig {
    /// Burst duration, s.
    pub tau_pi: f64,
    /// Peak coupling as lambda0 / 2 pi, Hz.
    pub lambda0_hz: f64,
    pub carrier: Carrier,
    pub repetitions: usize,
    pub mode: FilterMode,
}

impl Default for CoolingConfig {
    fn default() -> Self {
        Self {
            tau_pi: 100e-9,
            lambda0_hz: 800e3,
            carrier: Carrier::Modulated,
            repetitions: 2,
            mode: FilterMode::Frozen,
        }
    }
}

impl CoolingConfig {
    pub fn pulse(&self) -> CoolingPulse {
        CoolingPulse {
            tau_pi: self.tau_pi,
            lambda0: 2.0 * PI * self.lambda0_hz,
            carrier: self.carrier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// Peak coupling as lambda0 / 2 pi, Hz.
    pub lambda0_hz: f64,
    /// Envelope FWHM, s.
    pub fwhm: f64,
    #[serde(default)]
    pub carrier: Carrier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Momentum kicks |alpha| of the two gratings.
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Coupling pulse producing both kicks when `alphas` is empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseConfig>,
    /// Free rotations Omega tau after each grating, rad.
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default = "default_outcomes")]
    pub outcomes: Vec<Outcome>,
    #[serde(default = "default_phis")]
    pub phis: Vec<f64>,
}

fn default_thetas() -> Vec<f64> {
    vec![0.5 * PI, 0.0]
}

fn default_outcomes() -> Vec<Outcome> {
    vec![Outcome::Plus, Outcome::Plus]
}

fn default_phis() -> Vec<f64> {
    vec![0.0, 0.0]
}

fn pair<T: Copy>(key: &str, v: &[T]) -> Result<[T; 2], CliError> {
    match v {
        [a, b] => Ok([*a, *b]),
        [] => Err(CliError::Config(format!("{key}: missing; give one value per grating"))),
        _ => Err(CliError::Config(format!(
            "{key}: expected 2 entries, one per grating, got {}",
            v.len()
        ))),
    }
}

impl ProtocolConfig {
    /// Kick magnitudes, from `alphas` or from the pulse.
    pub fn kicks(&self, omega: f64) -> Result<[f64; 2], CliError> {
        if self.alphas.is_empty() {
            if let Some(p) = &self.pulse {
                let envelope = PulseEnvelope::gaussian(2.0 * PI * p.lambda0_hz, p.fwhm).with_carrier(p.carrier);
                let a = pulse_alpha(&envelope, omega)
                    .map_err(|e| CliError::Config(format!("protocol.pulse: {e}")))?
                    .norm();
                return Ok([a, a]);
            }
        }
        let kicks = pair("protocol.alphas", &self.alphas)?;
        if kicks.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(CliError::Config("protocol.alphas: kicks must be finite and >= 0".into()));
        }
        Ok(kicks)
    }

    pub fn spec(&self, omega: f64) -> Result<InterferometerSpec, CliError> {
        let [a1, a2] = self.kicks(omega)?;
        let [t1, t2] = pair("protocol.thetas", &self.thetas)?;
        let outcomes = pair("protocol.outcomes", &self.outcomes)?;
        let [p1, p2] = pair("protocol.phis", &self.phis)?;
        Ok(InterferometerSpec {
            alpha1: num_complex::Complex64::new(0.0, a1),
            alpha2: num_complex::Complex64::new(0.0, a2),
            theta1: t1,
            theta2: t2,
            outcomes,
            phi1: p1,
            phi2: p2,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutConfig {
    /// Readout kick |alpha3|; defaults to the second grating's kick.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha3: Option<f64>,
    /// Extra free rotation before readout, rad.
    pub theta: f64,
    pub phi: f64,
    /// Simulated shots; 0 skips sampling.
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceConfig {
    /// Accumulated qubit dephasing gamma t during readout.
    pub gamma_t: f64,
    /// Thermal phonons added before readout.
    pub n_added: f64,
    /// Monte Carlo trajectories for the dephased readout; 0 skips it.
    pub n_traj: usize,
    pub seed: u64,
    pub quadrature_points: usize,
}

impl Default for DecoherenceConfig {
    fn default() -> Self {
        Self {
            gamma_t: 0.0,
            n_added: 0.0,
            n_traj: 0,
            seed: 0,
            quadrature_points: displacemon::decoherence::DEFAULT_QUADRATURE_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub theta_points: usize,
    pub ratio_points: usize,
    /// Largest |alpha3| / alpha_ref.
    pub ratio_max: f64,
    /// Reference kick; defaults to the second grating's kick.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_ref: Option<f64>,
    /// Smallest |p+ - 1/2| reported as a feature.
    pub threshold: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            theta_points: 32,
            ratio_points: 32,
            ratio_max: 2.0,
            alpha_ref: None,
            threshold: 1e-3,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.theta_points < 2 || self.ratio_points < 2 {
            return Err(CliError::Config("map: theta_points and ratio_points must be >= 2".into()));
        }
        if !(self.ratio_max > 0.0) {
            return Err(CliError::Config("map.ratio_max: must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    /// Envelope width; defaults to sqrt(2 nbar + 1) of the state section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Grating kick |alpha|.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Marginal directions written next to each Wigner grid, rad.
    pub marginal_thetas: Vec<f64>,
    /// Largest wave number searched for marginal peaks.
    pub k_max: f64,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self {
            half_width: None,
            points: None,
            marginal_thetas: vec![0.0, 0.25 * PI, 0.5 * PI],
            k_max: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
}

/// Apply `key.path=value` overrides to a parsed document. Values parse as
/// TOML; anything that does not parse is taken as a string.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> Result<(), CliError> {
    for item in overrides {
        let (path, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{item}`: expected key.path=value")))?;
        let path = path.trim();
        let value = parse_value(raw.trim());
        let keys: Vec<&str> = path.split('.').collect();
        if keys.iter().any(|k| k.is_empty()) {
            return Err(CliError::Config(format!("override `{item}`: empty key in path")));
        }
        let (last, parents) = keys.split_last().expect("split yields at least one key");
        let mut table = &mut *doc;
        for (depth, key) in parents.iter().enumerate() {
            let entry = table
                .entry(key.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry.as_table_mut().ok_or_else(|| {
                CliError::Config(format!("override `{item}`: {} is not a table", keys[..=depth].join(".")))
            })?;
        }
        table.insert(last.to_string(), value);
    }
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Parse a config document, apply overrides and deserialize with key paths
/// in error messages.
pub fn load(text: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("config syntax: {}", e.message())))?;
    apply_overrides(&mut doc, overrides)?;
    serde_path_to_error::deserialize(toml::Value::Table(doc)).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner().message()))
    })
}

impl ScenarioConfig {
    /// The effective config with defaults filled in, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn protocol(&self) -> Result<&ProtocolConfig, CliError> {
        self.protocol
            .as_ref()
            .ok_or_else(|| CliError::Config("protocol: missing section; give protocol.alphas".into()))
    }
}
