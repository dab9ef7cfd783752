//! Coupling envelopes and qubit drive pulses.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this many carrier periods per FWHM the modulated pulse is not
/// slow compared with the mechanics.
pub const MIN_PERIODS_PER_FWHM: f64 = 5.0;

/// Gaussian envelopes are integrated over the centre +/- this many sigma.
pub const ENVELOPE_HALF_WIDTH_SIGMAS: f64 = 5.0;

/// `erf(3 / sqrt 2)`, the weight of a Gaussian inside +/- 3 sigma.
const ERF_THREE_SIGMA: f64 = 0.997_300_203_936_739_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    /// `lambda(t) = lambda0 g(t) cos(Omega t)`.
    #[default]
    Modulated,
    /// `lambda(t) = lambda0 g(t)`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// Unit-peak Gaussian whose FWHM is `width`.
    #[default]
    Gaussian,
    /// Unit box of duration `width` centred on `center`.
    Box,
}

fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * LN_2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    /// Peak coupling, rad/s.
    pub lambda0: f64,
    /// FWHM for Gaussian envelopes, duration for box envelopes, s.
    pub width: f64,
    #[serde(default)]
    pub carrier: Carrier,
    #[serde(default)]
    pub envelope: Envelope,
    /// Centre time, s. `None` puts the start of the window at t = 0.
    #[serde(default)]
    pub center: Option<f64>,
}

impl PulseEnvelope {
    pub fn gaussian(lambda0: f64, fwhm: f64) -> Self {
        Self {
            lambda0,
            width: fwhm,
            carrier: Carrier::Modulated,
            envelope: Envelope::Gaussian,
            center: None,
        }
    }

    pub fn with_carrier(mut self, carrier: Carrier) -> Self {
        self.carrier = carrier;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(Error::InvalidParameter("pulse width must be positive".into()));
        }
        if !self.lambda0.is_finite() {
            return Err(Error::InvalidParameter("pulse coupling must be finite".into()));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        fwhm_to_sigma(self.width)
    }

    fn half_window(&self) -> f64 {
        match self.envelope {
            Envelope::Gaussian => ENVELOPE_HALF_WIDTH_SIGMAS * self.sigma(),
            Envelope::Box => 0.5 * self.width,
        }
    }

    pub fn center(&self) -> f64 {
        self.center.unwrap_or_else(|| self.half_window())
    }

    /// Support of the envelope, `(start, end)`.
    pub fn window(&self) -> (f64, f64) {
        let c = self.center();
        let h = self.half_window();
        (c - h, c + h)
    }

    pub fn envelope_at(&self, t: f64) -> f64 {
        let (start, end) = self.window();
        if t < start || t > end {
            return 0.0;
        }
        match self.envelope {
            Envelope::Gaussian => {
                let u = (t - self.center()) / self.sigma();
                (-0.5 * u * u).exp()
            }
            Envelope::Box => 1.0,
        }
    }

    /// `lambda(t)` in rad/s.
    pub fn coupling(&self, t: f64, omega: f64) -> f64 {
        let g = self.lambda0 * self.envelope_at(t);
        match self.carrier {
            Carrier::Modulated => g * (omega * t).cos(),
            Carrier::Constant => g,
        }
    }

    /// Number of mechanical periods within the FWHM.
    pub fn periods_per_width(&self, omega: f64) -> f64 {
        self.width * omega / (2.0 * PI)
    }

    pub fn warnings(&self, omega: f64) -> Vec<String> {
        let periods = self.periods_per_width(omega);
        if self.carrier == Carrier::Modulated && periods < MIN_PERIODS_PER_FWHM {
            vec![format!(
                "modulated pulse spans only {periods:.2} mechanical periods; the envelope is not slow"
            )]
        } else {
            Vec::new()
        }
    }
}

/// `alpha = (i/2) int exp(i Omega t) lambda(t) dt` by composite Simpson over
/// the envelope window, at least 64 points per mechanical period.
pub fn pulse_alpha(pulse: &PulseEnvelope, omega: f64) -> Result<Complex64> {
    pulse.validate()?;
    if pulse.lambda0 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (start, end) = pulse.window();
    let periods = (end - start) * omega / (2.0 * PI);
    let mut intervals = ((periods * 64.0).ceil() as usize).max(4096);
    intervals += intervals % 2;
    let h = (end - start) / intervals as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=intervals {
        let t = start + h * k as f64;
        let weight = if k == 0 || k == intervals {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += Complex64::from_polar(weight * pulse.coupling(t, omega), omega * t);
    }
    Ok(Complex64::new(0.0, 0.5) * acc * (h / 3.0))
}

/// Rotating-wave closed form for a modulated Gaussian,
/// `i sqrt(pi) / (8 sqrt(ln 2)) lambda0 tau`.
pub fn alpha_rotating_wave(lambda0: f64, fwhm: f64) -> Complex64 {
    Complex64::new(0.0, PI.sqrt() / (8.0 * LN_2.sqrt()) * lambda0 * fwhm)
}

/// FWHM that produces `|alpha|` under the rotating-wave closed form.
pub fn fwhm_for_alpha(lambda0: f64, alpha_abs: f64) -> f64 {
    alpha_abs * 8.0 * LN_2.sqrt() / (PI.sqrt() * lambda0)
}

/// Exact kick from an unmodulated coupling held at `lambda0` for `duration`
/// starting at t = 0.
pub fn alpha_constant(lambda0: f64, omega: f64, duration: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, omega * duration) - 1.0;
    phase * (lambda0 / (2.0 * omega))
}

/// Gaussian qubit drive with pulse area `area`, FWHM `duration / 2`,
/// truncated at +/- 3 sigma and starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePulse {
    pub duration: f64,
    pub area: f64,
    pub start: f64,
}

impl DrivePulse {
    pub fn pi(duration: f64) -> Self {
        Self {
            duration,
            area: PI,
            start: 0.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        fwhm_to_sigma(0.5 * self.duration)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start, self.start + 6.0 * self.sigma())
    }

    pub fn peak(&self) -> f64 {
        self.area / (self.sigma() * (2.0 * PI).sqrt() * ERF_THREE_SIGMA)
    }

    /// Rabi rate `g(t)`, rad/s.
    pub fn rate(&self, t: f64) -> f64 {
        let (start, end) = self.window();
        if t < start || t > end {
            return 0.0;
        }
        let u = (t - start - 3.0 * self.sigma()) / self.sigma();
        self.peak() * (-0.5 * u * u).exp()
    }
}
