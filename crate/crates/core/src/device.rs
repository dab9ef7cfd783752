//! Electromechanical parameter model: nanotube mode, SQUID-tuned transmon
//! frequency and the displacement coupling derived from it.
//!
//! Everything here is SI. Angular rates carry no suffix (rad/s); cyclic rates
//! are suffixed `_hz`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod constants {
    pub const PLANCK: f64 = 6.62607e-34;
    pub const HBAR: f64 = 1.05457e-34;
    pub const ELEMENTARY_CHARGE: f64 = 1.60218e-19;
    pub const BOLTZMANN: f64 = 1.38065e-23;
    pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
    pub const AMU: f64 = 1.66054e-27;
}

use constants::{BOLTZMANN, FLUX_QUANTUM, HBAR, PLANCK};

/// Graphene sheet density, kg/m^2.
pub const GRAPHENE_SHEET_DENSITY: f64 = 8e-7;
/// Extensional rigidity per unit diameter, Pa m / m.
pub const RIGIDITY_PER_DIAMETER: f64 = 1.09e3;
/// Below this `E_J0/E_C` the transmon formula is a poor approximation.
pub const TRANSMON_RATIO_WARNING: f64 = 20.0;
/// `|cos(pi flux / 2)|` below which a symmetric SQUID is treated as singular.
pub const SINGULAR_COS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Tension,
    Rigidity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechGeometry {
    pub length: f64,
    pub diameter: f64,
    #[serde(default)]
    pub tension: f64,
    pub regime: Regime,
    #[serde(default = "default_sheet_density")]
    pub sheet_density: f64,
}

fn default_sheet_density() -> f64 {
    GRAPHENE_SHEET_DENSITY
}

impl MechGeometry {
    pub fn linear_density(&self) -> f64 {
        PI * self.sheet_density * self.diameter
    }

    pub fn mass(&self) -> f64 {
        self.linear_density() * self.length
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidGeometry(msg.to_string()));
        if !(self.length > 0.0) {
            return bad("length must be positive");
        }
        if !(self.diameter > 0.0) {
            return bad("diameter must be positive");
        }
        if !(self.sheet_density > 0.0) {
            return bad("sheet density must be positive");
        }
        if self.tension < 0.0 {
            return bad("tension must be non-negative");
        }
        if self.regime == Regime::Tension && !(self.tension > 0.0) {
            return bad("tension regime requires a positive tension");
        }
        Ok(())
    }
}

/// Tension that puts the fundamental tension-dominated mode at `frequency_hz`.
pub fn tension_for_frequency(length: f64, diameter: f64, sheet_density: f64, frequency_hz: f64) -> f64 {
    let mu = PI * sheet_density * diameter;
    let speed = 2.0 * frequency_hz * length;
    mu * speed * speed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub omega: f64,
    pub omega_hz: f64,
    pub x_zp: f64,
    pub beta0: f64,
    pub mass: f64,
    /// Beam length, m; sets the flux swept per unit displacement.
    pub length: f64,
}

pub fn mechanical_mode(geom: &MechGeometry) -> Result<ModeParams> {
    geom.validate()?;
    let mu = geom.linear_density();
    let l = geom.length;
    let (omega, beta0) = match geom.regime {
        Regime::Tension => ((PI / l) * (geom.tension / mu).sqrt(), 2.0 * SQRT_2 / PI),
        Regime::Rigidity => {
            let rigidity = geom.diameter * RIGIDITY_PER_DIAMETER;
            let d = geom.diameter;
            ((22.4 / (l * l)) * (rigidity * d * d / (8.0 * mu)).sqrt(), 0.831)
        }
    };
    let mass = geom.mass();
    Ok(ModeParams {
        omega,
        omega_hz: omega / (2.0 * PI),
        x_zp: (HBAR / (2.0 * mass * omega)).sqrt(),
        beta0,
        mass,
        length: l,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidParams {
    /// Maximum Josephson energy, J.
    pub e_j0: f64,
    /// Charging energy, J.
    pub e_c: f64,
    #[serde(default)]
    pub asymmetry: f64,
    /// Area of one loop, m^2.
    #[serde(default)]
    pub loop_area: f64,
    /// In-plane field, T.
    pub b_parallel: f64,
    /// Operating flux difference in units of the flux quantum.
    pub flux_bias: f64,
}

impl SquidParams {
    /// Energies given as `E/h` in GHz.
    pub fn from_ghz(e_j0_ghz: f64, e_c_ghz: f64, b_parallel: f64, flux_bias: f64) -> Self {
        Self {
            e_j0: e_j0_ghz * 1e9 * PLANCK,
            e_c: e_c_ghz * 1e9 * PLANCK,
            asymmetry: 0.0,
            loop_area: 0.0,
            b_parallel,
            flux_bias,
        }
    }

    pub fn with_asymmetry(mut self, asymmetry: f64) -> Self {
        self.asymmetry = asymmetry;
        self
    }

    /// Maximum Josephson energy of junctions with critical current `ic` (A).
    pub fn e_j0_from_critical_current(ic: f64) -> f64 {
        ic * FLUX_QUANTUM / PI
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j0 > 0.0 && self.e_c > 0.0) {
            return Err(Error::InvalidParameter(
                "Josephson and charging energies must be positive".into(),
            ));
        }
        if !(0.0..2.0).contains(&self.asymmetry) {
            return Err(Error::InvalidParameter(format!(
                "junction asymmetry must lie in [0, 2), got {}",
                self.asymmetry
            )));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let ratio = self.e_j0 / self.e_c;
        if ratio < TRANSMON_RATIO_WARNING {
            vec![format!(
                "E_J0/E_C = {ratio:.1} is below {TRANSMON_RATIO_WARNING}; transmon approximation is poor"
            )]
        } else {
            Vec::new()
        }
    }

    /// Perpendicular field change that sets the flux bias, if the loop area is known.
    pub fn perpendicular_field(&self) -> Option<f64> {
        (self.loop_area > 0.0).then(|| self.flux_bias * FLUX_QUANTUM / self.loop_area)
    }

    fn flux_factor(&self, flux: f64) -> (f64, f64, f64) {
        let half = PI * flux / 2.0;
        let (s, c) = half.sin_cos();
        let q = self.asymmetry * self.asymmetry / 4.0;
        ((c * c + q * s * s).sqrt(), c, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    pub temperature: f64,
    pub quality_factor: f64,
    pub t2: f64,
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.quality_factor > 0.0 && self.t2 > 0.0) {
            return Err(Error::InvalidParameter(
                "temperature, quality factor and T2 must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `k_B T / (hbar Q_m)`, s^-1.
    pub fn thermal_decay_rate(&self) -> f64 {
        BOLTZMANN * self.temperature / (HBAR * self.quality_factor)
    }
}

/// Bose-Einstein occupation of a mode at angular frequency `omega`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    1.0 / (HBAR * omega / (BOLTZMANN * temperature)).exp_m1()
}

/// `E_J0 sqrt(cos^2 + (delta^2/4) sin^2)` of `pi flux / 2`.
pub fn josephson_energy(squid: &SquidParams, flux: f64) -> f64 {
    squid.e_j0 * squid.flux_factor(flux).0
}

/// Transmon-limit frequency `sqrt(8 E_J E_C)/hbar`, rad/s.
pub fn qubit_frequency(e_j: f64, e_c: f64) -> f64 {
    (8.0 * e_j * e_c).sqrt() / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// `X_ZP d(omega_q)/dX`, rad/s, with sign.
    pub signed: f64,
    pub magnitude: f64,
    pub magnitude_hz: f64,
}

/// Qubit frequency slope with respect to flux (in flux quanta), rad/s.
fn frequency_flux_slope(squid: &SquidParams, flux: f64) -> Result<f64> {
    let (factor, c, s) = squid.flux_factor(flux);
    if squid.asymmetry == 0.0 && c.abs() < SINGULAR_COS {
        return Err(Error::SingularBias {
            flux_bias: flux,
            cos_abs: c.abs(),
        });
    }
    let omega_max = qubit_frequency(squid.e_j0, squid.e_c);
    let q = squid.asymmetry * squid.asymmetry / 4.0;
    // d(factor)/d(flux) = -(pi/2) c s (1 - q) / factor; omega_q = omega_max sqrt(factor)
    Ok(-omega_max * (PI / 4.0) * c * s * (1.0 - q) / factor.powf(1.5))
}

pub fn coupling_strength(mode: &ModeParams, squid: &SquidParams, flux: f64) -> Result<Coupling> {
    squid.validate()?;
    let flux_per_meter = 2.0 * mode.beta0 * mode.length * squid.b_parallel / FLUX_QUANTUM;
    let signed = mode.x_zp * frequency_flux_slope(squid, flux)? * flux_per_meter;
    Ok(Coupling {
        signed,
        magnitude: signed.abs(),
        magnitude_hz: signed.abs() / (2.0 * PI),
    })
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiguresOfMerit {
    pub lambda_over_omega: f64,
    /// Coupling in rad/s over the thermal decay rate in s^-1.
    pub lambda_over_kappa_th: f64,
    /// `T2 lambda / 2 pi`.
    pub t2_lambda_over_2pi: f64,
    pub nbar: f64,
    pub kappa_th: f64,
    /// Coupling (rad/s) exceeds `kappa_th / 2 pi`.
    pub mechanically_strong: bool,
    /// Coupling (Hz) exceeds `1 / T2`.
    pub qubit_strong: bool,
    pub strong: bool,
    /// Coupling exceeds the mechanical frequency.
    pub ultrastrong: bool,
}

pub fn figures_of_merit(mode: &ModeParams, lambda: f64, env: &EnvironmentParams) -> Result<FiguresOfMerit> {
    env.validate()?;
    let lambda = lambda.abs();
    let kappa_th = env.thermal_decay_rate();
    let lambda_hz = lambda / (2.0 * PI);
    let mechanically_strong = lambda > kappa_th / (2.0 * PI);
    let qubit_strong = lambda_hz > 1.0 / env.t2;
    Ok(FiguresOfMerit {
        lambda_over_omega: lambda / mode.omega,
        lambda_over_kappa_th: lambda / kappa_th,
        t2_lambda_over_2pi: env.t2 * lambda_hz,
        nbar: thermal_occupation(mode.omega, env.temperature),
        kappa_th,
        mechanically_strong,
        qubit_strong,
        strong: mechanically_strong && qubit_strong,
        ultrastrong: lambda > mode.omega,
    })
}

/// Full device description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub geometry: MechGeometry,
    pub squid: SquidParams,
    pub environment: EnvironmentParams,
}

impl DeviceParams {
    /// Device of the nanotube SQUID design: 800 nm beam at 125 MHz, 12 GHz
    /// junctions, 0.2 GHz charging energy, 0.5 T in-plane field.
    pub fn reference() -> Self {
        let length = 800e-9;
        let diameter = 2.5e-9;
        Self {
            geometry: MechGeometry {
                length,
                diameter,
                tension: tension_for_frequency(length, diameter, GRAPHENE_SHEET_DENSITY, 125e6),
                regime: Regime::Tension,
                sheet_density: GRAPHENE_SHEET_DENSITY,
            },
            squid: SquidParams::from_ghz(12.0, 0.2, 0.5, -0.84),
            environment: EnvironmentParams {
                temperature: 0.033,
                quality_factor: 1e5,
                t2: 2e-6,
            },
        }
    }

    pub fn mode(&self) -> Result<ModeParams> {
        mechanical_mode(&self.geometry)
    }

    pub fn report(&self) -> Result<DeviceReport> {
        self.squid.validate()?;
        let mode = self.mode()?;
        let e_j = josephson_energy(&self.squid, self.squid.flux_bias);
        let omega_q_max = qubit_frequency(self.squid.e_j0, self.squid.e_c);
        let omega_q = qubit_frequency(e_j, self.squid.e_c);
        let coupling = coupling_strength(&mode, &self.squid, self.squid.flux_bias)?;
        let figures = figures_of_merit(&mode, coupling.magnitude, &self.environment)?;
        Ok(DeviceReport {
            mode,
            josephson_energy: e_j,
            omega_q_max,
            omega_q_max_hz: omega_q_max / (2.0 * PI),
            omega_q,
            omega_q_hz: omega_q / (2.0 * PI),
            coupling,
            figures,
            perpendicular_field: self.squid.perpendicular_field(),
            warnings: self.squid.warnings(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceReport {
    pub mode: ModeParams,
    pub josephson_energy: f64,
    pub omega_q_max: f64,
    pub omega_q_max_hz: f64,
    pub omega_q: f64,
    pub omega_q_hz: f64,
    pub coupling: Coupling,
    pub figures: FiguresOfMerit,
    pub perpendicular_field: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPoint {
    pub flux: f64,
    pub omega_q: f64,
    pub omega_q_hz: f64,
    /// Signed coupling, rad/s.
    pub lambda: f64,
    pub lambda_hz: f64,
    /// Beam displacement producing the same flux difference, m.
    pub displacement: f64,
}

/// Qubit frequency and coupling over a uniform grid of flux differences.
pub fn flux_sweep(device: &DeviceParams, start: f64, end: f64, points: usize) -> Result<Vec<FluxPoint>> {
    if !(start > -1.0 && end < 1.0 && start < end) {
        return Err(Error::InvalidParameter(format!(
            "flux range [{start}, {end}] must be increasing and inside (-1, 1)"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidParameter("flux sweep needs at least 2 points".into()));
    }
    if !(device.squid.b_parallel > 0.0) {
        return Err(Error::InvalidParameter(
            "flux sweep displacement axis needs a positive in-plane field".into(),
        ));
    }
    let mode = device.mode()?;
    let per_flux = FLUX_QUANTUM / (2.0 * mode.beta0 * mode.length * device.squid.b_parallel);
    (0..points)
        .map(|k| {
            let flux = start + (end - start) * k as f64 / (points - 1) as f64;
            let omega_q = qubit_frequency(josephson_energy(&device.squid, flux), device.squid.e_c);
            let lambda = coupling_strength(&mode, &device.squid, flux)?.signed;
            Ok(FluxPoint {
                flux,
                omega_q,
                omega_q_hz: omega_q / (2.0 * PI),
                lambda,
                lambda_hz: lambda / (2.0 * PI),
                displacement: flux * per_flux,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_mode_matches_quoted_values() {
        let mode = DeviceParams::reference().mode().unwrap();
        assert!(rel(mode.omega_hz, 125e6) < 1e-9);
        assert!(rel(mode.mass, 5e-21) < 0.01);
        assert!(rel(mode.x_zp, 3.7e-12) < 0.02);
        assert!((mode.beta0 - 0.9003).abs() < 1e-4);
        let check = mode.x_zp * (2.0 * mode.mass * mode.omega / HBAR).sqrt();
        assert!((check - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quoted_mass_gives_quoted_zero_point() {
        let x_zp = (HBAR / (2.0 * 5e-21 * 2.0 * PI * 125e6)).sqrt();
        assert!(rel(x_zp, 3.7e-12) < 0.02);
    }

    #[test]
    fn rigidity_regime_long_beam() {
        let geom = MechGeometry {
            length: 1.6e-6,
            diameter: 2.5e-9,
            tension: 0.0,
            regime: Regime::Rigidity,
            sheet_density: GRAPHENE_SHEET_DENSITY,
        };
        let mode = mechanical_mode(&geom).unwrap();
        assert!(rel(mode.omega_hz, 25e6) < 0.2, "{}", mode.omega_hz);
        assert_eq!(mode.beta0, 0.831);
    }

    #[test]
    fn tension_regime_without_tension_is_rejected() {
        let mut geom = DeviceParams::reference().geometry;
        geom.tension = 0.0;
        assert!(matches!(mechanical_mode(&geom), Err(Error::InvalidGeometry(_))));
        geom.regime = Regime::Rigidity;
        geom.length = -1.0;
        assert!(mechanical_mode(&geom).is_err());
    }

    #[test]
    fn josephson_energy_limits() {
        let squid = SquidParams::from_ghz(12.0, 0.2, 0.5, 0.0);
        assert_eq!(josephson_energy(&squid, 0.0), squid.e_j0);
        assert!(josephson_energy(&squid, 1.0) < 1e-15 * squid.e_j0);
        let ratio = josephson_energy(&squid, -0.84) / squid.e_j0;
        assert!((ratio - (0.42 * PI).cos().abs()).abs() < 1e-15);
        assert!((ratio - 0.2487).abs() < 1e-4);
        let asym = squid.with_asymmetry(0.3);
        assert!((josephson_energy(&asym, 1.0) / asym.e_j0 - 0.15).abs() < 1e-12);
    }

    #[test]
    fn qubit_frequencies() {
        let report = DeviceParams::reference().report().unwrap();
        assert!((report.omega_q_max_hz / 1e9 - 4.38).abs() < 0.05);
        assert!((report.omega_q_hz / 1e9 - 2.19).abs() < 0.03);
        let e = 1e-24;
        assert!(rel(qubit_frequency(4.0 * e, e), 2.0 * qubit_frequency(e, e)) < 1e-14);
    }

    #[test]
    fn reference_coupling() {
        let report = DeviceParams::reference().report().unwrap();
        assert!(rel(report.coupling.magnitude_hz, 8.5e6) < 0.05, "{}", report.coupling.magnitude_hz);
    }

    #[test]
    fn coupling_vanishes_at_zero_flux_and_is_odd() {
        let dev = DeviceParams::reference();
        let mode = dev.mode().unwrap();
        assert_eq!(coupling_strength(&mode, &dev.squid, 0.0).unwrap().signed, 0.0);
        let a = coupling_strength(&mode, &dev.squid, 0.37).unwrap().signed;
        let b = coupling_strength(&mode, &dev.squid, -0.37).unwrap().signed;
        assert!((a + b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn asymmetry_reduces_coupling() {
        let dev = DeviceParams::reference();
        let mode = dev.mode().unwrap();
        let sym = coupling_strength(&mode, &dev.squid, -0.84).unwrap().magnitude;
        let asym = coupling_strength(&mode, &dev.squid.with_asymmetry(0.3), -0.84)
            .unwrap()
            .magnitude;
        assert!(asym < sym);
    }

    #[test]
    fn singular_bias_is_reported() {
        let dev = DeviceParams::reference();
        let mode = dev.mode().unwrap();
        assert!(matches!(
            coupling_strength(&mode, &dev.squid, 1.0),
            Err(Error::SingularBias { .. })
        ));
        assert!(coupling_strength(&mode, &dev.squid.with_asymmetry(0.3), 1.0).is_ok());
    }

    /// Finite-difference oracle: lambda = X_ZP d(omega_q)/dX through the flux-displacement relation.
    fn numeric_coupling(dev: &DeviceParams, flux: f64) -> f64 {
        let mode = dev.mode().unwrap();
        let per_meter = 2.0 * mode.beta0 * mode.length * dev.squid.b_parallel / FLUX_QUANTUM;
        let omega = |x: f64| {
            qubit_frequency(josephson_energy(&dev.squid, flux + per_meter * x), dev.squid.e_c)
        };
        let h = 1e-3 * mode.x_zp;
        mode.x_zp * (omega(h) - omega(-h)) / (2.0 * h)
    }

    #[test]
    fn coupling_matches_finite_difference() {
        for delta in [0.0, 0.3, 1.1] {
            let dev = DeviceParams {
                squid: DeviceParams::reference().squid.with_asymmetry(delta),
                ..DeviceParams::reference()
            };
            let mode = dev.mode().unwrap();
            for flux in [-0.84, -0.3, 0.12, 0.6] {
                let analytic = coupling_strength(&mode, &dev.squid, flux).unwrap().signed;
                let numeric = numeric_coupling(&dev, flux);
                assert!(rel(analytic, numeric) < 1e-6, "delta {delta} flux {flux}");
            }
        }
    }

    #[test]
    fn figures_of_merit_reference_row() {
        let report = DeviceParams::reference().report().unwrap();
        let f = report.figures;
        assert!((f.lambda_over_omega - 0.07).abs() < 0.005);
        assert!((f.nbar - 5.0).abs() < 0.1);
        assert!(f.lambda_over_kappa_th > 300.0 && f.lambda_over_kappa_th < 3000.0);
        // Literal T2 lambda/2pi; the tabulated 9 differs by about a factor of two.
        assert!((f.t2_lambda_over_2pi - 17.0).abs() < 1.0);
        assert!(f.strong && !f.ultrastrong);
    }

    #[test]
    fn strong_coupling_thresholds_are_modest() {
        let dev = DeviceParams::reference();
        let report = dev.report().unwrap();
        let lambda = report.coupling.magnitude;
        let flags = |q: f64, t2: f64| {
            let env = EnvironmentParams { quality_factor: q, t2, ..dev.environment };
            figures_of_merit(&report.mode, lambda, &env).unwrap()
        };
        assert!(flags(15.0, 1.0).mechanically_strong);
        assert!(!flags(5.0, 1.0).mechanically_strong);
        assert!(flags(1e5, 130e-9).qubit_strong);
        assert!(!flags(1e5, 100e-9).qubit_strong);
    }

    #[test]
    fn occupation_at_33_mk() {
        let n = thermal_occupation(2.0 * PI * 125e6, 0.033);
        assert!((n - 5.0).abs() < 0.1);
    }

    #[test]
    fn flux_sweep_shapes() {
        let dev = DeviceParams::reference();
        let curve = flux_sweep(&dev, -0.99, 0.99, 199).unwrap();
        let top = curve
            .iter()
            .max_by(|a, b| a.omega_q.total_cmp(&b.omega_q))
            .unwrap();
        assert!(top.flux.abs() < 1e-12);
        let report = dev.report().unwrap();
        assert!(rel(top.omega_q, report.omega_q_max) < 1e-12);
        assert!(top.lambda.abs() < 1e-9 * report.coupling.magnitude);

        let asym = DeviceParams {
            squid: dev.squid.with_asymmetry(0.3),
            ..dev
        };
        let curve = flux_sweep(&asym, -0.999, 0.999, 401).unwrap();
        let min = curve.iter().map(|p| p.omega_q).fold(f64::INFINITY, f64::min);
        assert!(min > 0.3 * report.omega_q_max);

        let mode = dev.mode().unwrap();
        let slope = (curve[1].displacement - curve[0].displacement) / (curve[1].flux - curve[0].flux);
        let expected = FLUX_QUANTUM / (2.0 * mode.beta0 * mode.length * dev.squid.b_parallel);
        assert!(rel(slope, expected) < 1e-9);
    }

    #[test]
    fn flux_sweep_rejects_bad_range() {
        let dev = DeviceParams::reference();
        assert!(flux_sweep(&dev, -1.0, 0.5, 10).is_err());
        assert!(flux_sweep(&dev, 0.5, -0.5, 10).is_err());
    }
}
