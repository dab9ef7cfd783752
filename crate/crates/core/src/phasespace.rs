//! Phase-space views of resonator states: rotated marginals, Wigner
//! distributions, characteristic functions and wave-number spectra, plus the
//! classical checkerboard reference model.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::ResonatorState;
use crate::linalg::{self, RMatrix};
use crate::quadrature::{trapezoid, HermiteTable, UniformGrid};

/// Grids must reach this many standard deviations past the state centroid.
pub const GRID_SIGMAS: f64 = 5.0;
/// Default step of marginal grids, matching 1024 points on [-12, 12].
pub const DEFAULT_STEP: f64 = 24.0 / 1023.0;
/// Peaks below this fraction of the zero-frequency component are ignored.
pub const DEFAULT_PEAK_FLOOR: f64 = 0.01;

pub const WIGNER_CONVENTION: &str =
    "x=a+a^dagger, p=i(a^dagger-a); int W dp = P(x); int W dx dp = weight";

fn extent_needed(state: &ResonatorState) -> f64 {
    let m = state.normalized().moments();
    m.mean_radius() + GRID_SIGMAS * m.max_variance().max(0.0).sqrt()
}

/// Position grid wide enough for every rotation of `state`, at the default
/// step and never narrower than [-12, 12].
pub fn marginal_grid(state: &ResonatorState) -> UniformGrid {
    let m = state.normalized().moments();
    let reach = m.mean_radius() + 6.0 * m.max_variance().max(0.0).sqrt();
    let half = reach.max(12.0).ceil();
    UniformGrid::with_max_step(half, DEFAULT_STEP, 1024)
}

fn check_grid(state: &ResonatorState, theta: f64, half_width: f64) -> Result<()> {
    let m = state.normalized().moments();
    let need = m.mean_at(theta).abs() + GRID_SIGMAS * m.var_at(theta).max(0.0).sqrt();
    if half_width < need {
        return Err(Error::GridTooSmall(format!(
            "half width {half_width:.2} below the {need:.2} needed at theta = {theta:.3}"
        )));
    }
    Ok(())
}

/// `P(x_j) = <x_j|rho|x_j>` on the table's points.
pub fn position_density(state: &ResonatorState, table: &HermiteTable) -> Vec<f64> {
    let phi = &table.values;
    match state {
        ResonatorState::Pure(s) => {
            let re = phi * s.amplitudes.map(|z| z.re);
            let im = phi * s.amplitudes.map(|z| z.im);
            re.iter().zip(im.iter()).map(|(a, b)| a * a + b * b).collect()
        }
        ResonatorState::Mixed(rho) => {
            let (rr, _) = linalg::split(&rho.matrix);
            // Only the real part of rho contributes to a real quadratic form.
            let m = phi * rr;
            (0..phi.nrows())
                .map(|j| m.row(j).dot(&phi.row(j)))
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCurve {
    pub theta: f64,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub step: f64,
    /// Weight of the state the curve was taken from.
    pub weight: f64,
}

impl MarginalCurve {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.density, self.step)
    }

    /// `int P(x) exp(i k x) dx`, rectangle rule on the grid.
    pub fn fourier(&self, k: f64) -> Complex64 {
        self.x
            .iter()
            .zip(&self.density)
            .map(|(&x, &p)| Complex64::from_polar(p, k * x))
            .sum::<Complex64>()
            * self.step
    }

    /// `int P(x) cos(k x) dx`.
    pub fn cosine_component(&self, k: f64) -> f64 {
        self.fourier(k).re
    }

    /// Readout probability `int cos^2(kick x + phi/2) P(x) dx`, normalized by the weight.
    pub fn pplus(&self, kick: f64, phi: f64) -> f64 {
        let vals: Vec<f64> = self
            .x
            .iter()
            .zip(&self.density)
            .map(|(&x, &p)| (kick * x + 0.5 * phi).cos().powi(2) * p)
            .collect();
        trapezoid(&vals, self.step) / self.weight
    }
}

/// `P(x; theta)`, the position density of `R(theta) rho R(theta)^dagger`,
/// i.e. the distribution of `x cos(theta) + p sin(theta)`.
pub fn marginal(state: &ResonatorState, theta: f64, grid: &UniformGrid) -> Result<MarginalCurve> {
    check_grid(state, theta, grid.half_width)?;
    let table = HermiteTable::new(grid, state.dim());
    Ok(marginal_with_table(state, theta, &table))
}

/// Marginal on a precomputed table, without the extent guard.
pub fn marginal_with_table(state: &ResonatorState, theta: f64, table: &HermiteTable) -> MarginalCurve {
    let rotated = state.rotate(theta);
    MarginalCurve {
        theta,
        x: table.x.clone(),
        density: position_density(&rotated, table),
        step: table.step,
        weight: state.weight(),
    }
}

/// `chi(beta) = Tr[D(beta) rho]`, unnormalized.
///
/// Uses the exact Fock matrix elements of the displacement, so no
/// truncation of `D` itself enters. The guard `|beta|^2 < dim/2` keeps the
/// retained levels meaningful for the displaced components.
pub fn characteristic(state: &ResonatorState, beta: Complex64) -> Result<Complex64> {
    let dim = state.dim();
    if beta.norm_sqr() >= dim as f64 / 2.0 {
        return Err(Error::TruncationRisk(format!(
            "|beta|^2 = {:.3} must stay below dim/2 = {}",
            beta.norm_sqr(),
            dim as f64 / 2.0
        )));
    }
    let space = crate::hilbert::FockSpace::new(dim)?;
    let d = space.displacement_elements(beta);
    Ok(state.expectation(&d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub k: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub k: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// `|F(0)|`, the reference for the floor.
    pub reference: f64,
    pub floor: f64,
    pub peaks: Vec<SpectralPeak>,
}

impl Spectrum {
    /// Peaks at or above `k_min`.
    pub fn peaks_above(&self, k_min: f64) -> Vec<SpectralPeak> {
        self.peaks.iter().copied().filter(|p| p.k >= k_min).collect()
    }

    /// Interpolated magnitude at `k`.
    pub fn magnitude_at(&self, k: f64) -> f64 {
        let dk = self.k[1] - self.k[0];
        let pos = k / dk;
        let i = (pos.floor() as usize).min(self.k.len() - 2);
        let t = pos - i as f64;
        self.magnitude[i] * (1.0 - t) + self.magnitude[i + 1] * t
    }
}

/// Magnitude spectrum `|int P(x) exp(i k x) dx|` on the grid's DFT bins
/// `k_m = 2 pi m / (n h)` up to `k_max`.
///
/// Sampling at the bins means a density that is flat over the whole grid has
/// no leakage sidelobes. Peaks are interior local maxima above
/// `floor_fraction * |F(0)|`, refined by a parabola through three bins.
pub fn wavenumber_spectrum(curve: &MarginalCurve, k_max: f64, floor_fraction: f64) -> Result<Spectrum> {
    let h = curve.step;
    if h > 2.0 * PI / (8.0 * k_max) {
        return Err(Error::UnderResolved(format!(
            "grid step {h:.4} gives fewer than 8 points per fringe at k = {k_max}"
        )));
    }
    let n = curve.x.len();
    let dk = 2.0 * PI / (n as f64 * h);
    let bins = (k_max / dk).ceil() as usize + 2;
    let k: Vec<f64> = (0..bins).map(|m| m as f64 * dk).collect();
    let magnitude: Vec<f64> = k.iter().map(|&kk| curve.fourier(kk).norm()).collect();
    let reference = magnitude[0];
    let floor = floor_fraction * reference;
    let mut peaks = Vec::new();
    for m in 1..bins - 1 {
        let (a, b, c) = (magnitude[m - 1], magnitude[m], magnitude[m + 1]);
        if b > a && b >= c && b >= floor && k[m] <= k_max {
            let denom = a - 2.0 * b + c;
            let shift = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            peaks.push(SpectralPeak {
                k: k[m] + shift * dk,
                magnitude: b - 0.25 * (a - c) * shift,
            });
        }
    }
    Ok(Spectrum {
        k,
        magnitude,
        reference,
        floor,
        peaks,
    })
}

/// Square grid shared by x and p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerSpec {
    pub half_width: f64,
    pub points: usize,
}

impl WignerSpec {
    /// Smallest grid that covers the state and keeps the momentum axis
    /// inside the alias-free band `|p| < pi / h`.
    pub fn for_state(state: &ResonatorState) -> Self {
        let half_width = (1.1 * extent_needed(state)).ceil().max(6.0);
        Self::for_half_width(half_width)
    }

    pub fn for_half_width(half_width: f64) -> Self {
        let alias = (2.2 * half_width * half_width / PI).ceil() as usize + 1;
        let mut points = alias.max(201);
        points += 1 - points % 2;
        Self { half_width, points }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Row-major, `values[i * p.len() + j] = W(x_i, p_j)`.
    pub values: Vec<f64>,
    pub step: f64,
    pub convention: String,
    pub weight: f64,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.len() + j]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step * self.step
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `int_{W<0} |W| dx dp`.
    pub fn negativity(&self) -> f64 {
        self.values.iter().filter(|&&w| w < 0.0).map(|w| -w).sum::<f64>() * self.step * self.step
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        let np = self.p.len();
        (0..self.x.len())
            .map(|i| self.values[i * np..(i + 1) * np].iter().sum::<f64>() * self.step)
            .collect()
    }

    pub fn marginal_p(&self) -> Vec<f64> {
        let np = self.p.len();
        (0..np)
            .map(|j| (0..self.x.len()).map(|i| self.values[i * np + j]).sum::<f64>() * self.step)
            .collect()
    }

    /// `int W(x, p) exp(i (x beta_i - p beta_r)) dx dp`.
    pub fn characteristic(&self, beta: Complex64) -> Complex64 {
        let np = self.p.len();
        let px: Vec<Complex64> = self.p.iter().map(|&p| Complex64::from_polar(1.0, -p * beta.re)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &x) in self.x.iter().enumerate() {
            let row: Complex64 = self.values[i * np..(i + 1) * np]
                .iter()
                .zip(&px)
                .map(|(&w, &e)| e * w)
                .sum();
            acc += row * Complex64::from_polar(1.0, x * beta.im);
        }
        acc * self.step * self.step
    }

    /// Bilinear value at an arbitrary point, zero outside the grid.
    pub fn interpolate(&self, x: f64, p: f64) -> f64 {
        let fx = (x - self.x[0]) / self.step;
        let fp = (p - self.p[0]) / self.step;
        let (nx, np) = (self.x.len(), self.p.len());
        if fx < 0.0 || fp < 0.0 || fx > (nx - 1) as f64 || fp > (np - 1) as f64 {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(nx - 2);
        let j = (fp.floor() as usize).min(np - 2);
        let (tx, tp) = (fx - i as f64, fp - j as f64);
        self.at(i, j) * (1.0 - tx) * (1.0 - tp)
            + self.at(i + 1, j) * tx * (1.0 - tp)
            + self.at(i, j + 1) * (1.0 - tx) * tp
            + self.at(i + 1, j + 1) * tx * tp
    }

    /// The distribution of `R(theta) rho R(theta)^dagger`, obtained by
    /// rigidly rotating this grid: `W'(x, p) = W(x cos - p sin, x sin + p cos)`.
    pub fn rotated(&self, theta: f64) -> WignerGrid {
        let (s, c) = theta.sin_cos();
        let np = self.p.len();
        let mut values = vec![0.0; self.values.len()];
        for (i, &x) in self.x.iter().enumerate() {
            for (j, &p) in self.p.iter().enumerate() {
                values[i * np + j] = self.interpolate(x * c - p * s, x * s + p * c);
            }
        }
        WignerGrid {
            values,
            ..self.clone()
        }
    }
}

/// Wigner distribution `W(x,p) = (1/4 pi) int rho(x + s/2, x - s/2) exp(-i p s / 2) ds`,
/// evaluated with `s = 2 k h` so both arguments stay on the grid.
pub fn wigner(state: &ResonatorState, spec: &WignerSpec) -> Result<WignerGrid> {
    let need = extent_needed(state);
    if spec.half_width < need {
        return Err(Error::GridTooSmall(format!(
            "Wigner half width {:.2} below the {need:.2} the state needs",
            spec.half_width
        )));
    }
    let h = spec.step();
    if PI / h < 1.05 * spec.half_width {
        return Err(Error::GridTooSmall(format!(
            "{} points cannot resolve momenta up to {:.2} without aliasing",
            spec.points, spec.half_width
        )));
    }
    let grid = UniformGrid::new(spec.half_width, spec.points);
    let table = HermiteTable::new(&grid, state.dim());
    let rho_x = position_matrix(state, &table.values);
    let n = spec.points;
    let axis = grid.values();
    let mut values = vec![0.0; n * n];
    let scale = h / (2.0 * PI);
    for i in 0..n {
        let reach = i.min(n - 1 - i);
        let diag: Vec<Complex64> = (1..=reach).map(|k| rho_x.get(i + k, i - k)).collect();
        let centre = rho_x.get(i, i).re;
        for (j, &p) in axis.iter().enumerate() {
            let step = Complex64::from_polar(1.0, -p * h);
            let mut phase = step;
            let mut acc = 0.0;
            for d in &diag {
                acc += (d * phase).re;
                phase *= step;
            }
            values[i * n + j] = scale * (centre + 2.0 * acc);
        }
    }
    Ok(WignerGrid {
        x: axis.clone(),
        p: axis,
        values,
        step: h,
        convention: WIGNER_CONVENTION.to_string(),
        weight: state.weight(),
    })
}

/// `rho(x_i, x_j)` as separate real and imaginary parts.
struct PositionMatrix {
    re: RMatrix,
    im: RMatrix,
}

impl PositionMatrix {
    fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[(i, j)], self.im[(i, j)])
    }
}

fn position_matrix(state: &ResonatorState, phi: &RMatrix) -> PositionMatrix {
    match state {
        ResonatorState::Pure(s) => {
            let re = phi * s.amplitudes.map(|z| z.re);
            let im = phi * s.amplitudes.map(|z| z.im);
            // psi(x_i) psi(x_j)^*
            PositionMatrix {
                re: &re * re.transpose() + &im * im.transpose(),
                im: &im * re.transpose() - &re * im.transpose(),
            }
        }
        ResonatorState::Mixed(rho) => {
            let (rr, ri) = linalg::split(&rho.matrix);
            let pt = phi.transpose();
            PositionMatrix {
                re: phi * rr * &pt,
                im: phi * ri * &pt,
            }
        }
    }
}

/// Classical phase-space density
/// `exp(-(x^2 + p^2) / 2 sigma^2) cos^2(alpha x) cos^2(alpha p) / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCheckerboard {
    pub sigma: f64,
    pub alpha: f64,
    pub normalization: f64,
}

impl ClassicalCheckerboard {
    /// Normalization is found by 2-D quadrature.
    pub fn new(sigma: f64, alpha: f64) -> Result<Self> {
        if !(sigma > 0.0) || alpha.abs() == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "checkerboard needs sigma > 0 and alpha != 0, got sigma {sigma}, alpha {alpha}"
            )));
        }
        let mut cb = Self {
            sigma,
            alpha: alpha.abs(),
            normalization: 1.0,
        };
        let (half, points) = cb.quadrature_grid();
        let h = 2.0 * half / (points - 1) as f64;
        let axis: Vec<f64> = (0..points).map(|j| -half + h * j as f64).collect();
        let mut total = 0.0;
        for &x in &axis {
            for &p in &axis {
                total += cb.density(x, p);
            }
        }
        cb.normalization = total * h * h;
        Ok(cb)
    }

    pub fn density(&self, x: f64, p: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (-(x * x + p * p) / (2.0 * s2)).exp()
            * (self.alpha * x).cos().powi(2)
            * (self.alpha * p).cos().powi(2)
            / self.normalization
    }

    /// Half width and point count that resolve the density and the
    /// readout fringes up to `alpha_3 = 4 alpha`.
    fn quadrature_grid(&self) -> (f64, usize) {
        let half = 9.0 * self.sigma;
        let k_max = 2.0 * self.alpha + 8.0 * self.alpha;
        let step = (self.sigma / 8.0).min(PI / (2.0 * k_max));
        let points = (2.0 * half / step).ceil() as usize + 1;
        (half, points)
    }

    /// `G(q) = int exp(-u^2 / 2 sigma^2) cos^2(alpha u) exp(i q u) du / (sigma sqrt(2 pi))`.
    fn envelope(&self, q: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let a2 = 2.0 * self.alpha;
        0.5 * (-0.5 * s2 * q * q).exp()
            + 0.25 * (-0.5 * s2 * (q + a2).powi(2)).exp()
            + 0.25 * (-0.5 * s2 * (q - a2).powi(2)).exp()
    }
}

/// `int P^cl(x cos + p sin, p cos - x sin) dp` on `grid`.
pub fn classical_marginal(cb: &ClassicalCheckerboard, theta: f64, grid: &UniformGrid) -> MarginalCurve {
    let (s, c) = theta.sin_cos();
    let (half, points) = cb.quadrature_grid();
    let hp = 2.0 * half / (points - 1) as f64;
    let x = grid.values();
    let density = x
        .iter()
        .map(|&xv| {
            let mut acc = 0.0;
            for j in 0..points {
                let p = -half + hp * j as f64;
                acc += cb.density(xv * c + p * s, p * c - xv * s);
            }
            acc * hp
        })
        .collect();
    MarginalCurve {
        theta,
        x,
        density,
        step: grid.step(),
        weight: 1.0,
    }
}

/// Closed form `1/2 + (cos phi / 2) G(2 a3 cos theta) G(2 a3 sin theta) / G(0)^2`.
pub fn classical_pplus(cb: &ClassicalCheckerboard, alpha3: f64, phi: f64, theta: f64) -> f64 {
    let q = 2.0 * alpha3.abs();
    let g0 = cb.envelope(0.0);
    0.5 + 0.5 * phi.cos() * cb.envelope(q * theta.cos()) * cb.envelope(q * theta.sin()) / (g0 * g0)
}

/// Readout probability from the numerically integrated rotated marginal.
pub fn classical_pplus_numeric(cb: &ClassicalCheckerboard, alpha3: f64, phi: f64, theta: f64) -> f64 {
    let (half, points) = cb.quadrature_grid();
    let grid = UniformGrid::new(half, points);
    classical_marginal(cb, theta, &grid).pplus(alpha3.abs(), phi)
}

/// Readout probability over rotation angles and kick ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PPlusMap {
    /// Rotation angles `Omega tau_2` in [0, pi).
    pub theta: Vec<f64>,
    /// `|alpha_3| / alpha_ref`.
    pub ratio: Vec<f64>,
    pub alpha_ref: f64,
    pub phi: f64,
    /// Row-major, `values[i * ratio.len() + j]`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFeature {
    pub theta: f64,
    pub ratio: f64,
    /// `|p_+ - 1/2|` at the feature.
    pub amplitude: f64,
}

/// Uniform angle grid on [0, pi).
pub fn theta_axis(points: usize) -> Vec<f64> {
    (0..points).map(|i| PI * i as f64 / points as f64).collect()
}

/// Uniform ratio grid on (0, max].
pub fn ratio_axis(points: usize, max: f64) -> Vec<f64> {
    (1..=points).map(|j| max * j as f64 / points as f64).collect()
}

impl PPlusMap {
    pub fn build<F: FnMut(f64, f64) -> f64>(
        theta: Vec<f64>,
        ratio: Vec<f64>,
        alpha_ref: f64,
        phi: f64,
        mut f: F,
    ) -> Self {
        let mut values = Vec::with_capacity(theta.len() * ratio.len());
        for &t in &theta {
            for &r in &ratio {
                values.push(f(t, r * alpha_ref));
            }
        }
        Self {
            theta,
            ratio,
            alpha_ref,
            phi,
            values,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ratio.len() + j]
    }

    /// Local maxima of `|p_+ - 1/2|` above `threshold`. The angle axis is
    /// periodic; in ratio only interior points count, so the trivial
    /// `p_+ -> 1` ridge at vanishing kick is not a feature.
    pub fn features(&self, threshold: f64) -> Vec<MapFeature> {
        let (nt, nr) = (self.theta.len(), self.ratio.len());
        let amp = |i: usize, j: usize| (self.at(i, j) - 0.5).abs();
        let mut out = Vec::new();
        for i in 0..nt {
            for j in 1..nr.saturating_sub(1) {
                let a = amp(i, j);
                if a < threshold {
                    continue;
                }
                let mut is_max = true;
                for di in [nt - 1, 0, 1] {
                    for dj in [-1i64, 0, 1] {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let ii = (i + di) % nt;
                        let jj = (j as i64 + dj) as usize;
                        if amp(ii, jj) > a {
                            is_max = false;
                        }
                    }
                }
                if is_max {
                    out.push(MapFeature {
                        theta: self.theta[i],
                        ratio: self.ratio[j],
                        amplitude: a,
                    });
                }
            }
        }
        out
    }
}

/// Classical readout map over `theta` and `alpha_3 / alpha`.
pub fn classical_map(cb: &ClassicalCheckerboard, theta: Vec<f64>, ratio: Vec<f64>, phi: f64) -> PPlusMap {
    PPlusMap::build(theta, ratio, cb.alpha, phi, |t, a3| classical_pplus(cb, a3, phi, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::FockSpace;
    use crate::linalg::c;

    #[test]
    fn vacuum_marginal_and_wigner() {
        let space = FockSpace::new(32).unwrap();
        let vac: ResonatorState = space.vacuum().into();
        let curve = marginal(&vac, 0.0, &UniformGrid::default()).unwrap();
        for (x, p) in curve.x.iter().zip(&curve.density).step_by(97) {
            let expected = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
            assert!((p - expected).abs() < 1e-12);
        }
        let w = wigner(&vac, &WignerSpec::for_half_width(8.0)).unwrap();
        let mid = w.x.len() / 2;
        assert!(w.x[mid].abs() < 1e-12);
        assert!((w.at(mid, mid) - 1.0 / (2.0 * PI)).abs() < 1e-10);
        assert!((w.integral() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn quarter_turn_marginal_is_momentum_density() {
        let space = FockSpace::new(64).unwrap();
        let st: ResonatorState = space.coherent(c(0.7, 1.1)).into();
        let curve = marginal(&st, PI / 2.0, &UniformGrid::default()).unwrap();
        // coherent state: p-density is Gaussian centred on 2 Im(beta)
        for (x, p) in curve.x.iter().zip(&curve.density).step_by(101) {
            let expected = (-0.5 * (x - 2.2).powi(2)).exp() / (2.0 * PI).sqrt();
            assert!((p - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_guard() {
        let space = FockSpace::new(256).unwrap();
        let thermal: ResonatorState = space.thermal_state(5.0).unwrap().into();
        let err = marginal(&thermal, 0.0, &UniformGrid::new(12.0, 1024)).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall(_)));
        let grid = marginal_grid(&thermal);
        assert!(marginal(&thermal, 0.0, &grid).is_ok());
        let err = wigner(&thermal, &WignerSpec::for_half_width(10.0)).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall(_)));
    }

    #[test]
    fn thermal_marginal_width() {
        let space = FockSpace::new(256).unwrap();
        let thermal: ResonatorState = space.thermal_state(2.0).unwrap().into();
        let grid = marginal_grid(&thermal);
        let curve = marginal(&thermal, 0.3, &grid).unwrap();
        let var: f64 = curve
            .x
            .iter()
            .zip(&curve.density)
            .map(|(x, p)| x * x * p)
            .sum::<f64>()
            * curve.step;
        assert!((var - 5.0).abs() < 1e-6, "{var}");
    }

    #[test]
    fn characteristic_of_vacuum() {
        let space = FockSpace::new(64).unwrap();
        let vac: ResonatorState = space.vacuum().into();
        for beta in [c(0.0, 0.0), c(0.3, -1.2), c(2.0, 1.0)] {
            let chi = characteristic(&vac, beta).unwrap();
            assert!((chi - c((-0.5 * beta.norm_sqr()).exp(), 0.0)).norm() < 1e-12);
        }
        assert!(characteristic(&vac, c(6.0, 0.0)).is_err());
    }

    #[test]
    fn spectrum_of_grating_pattern() {
        // cos^2(k x) under a wide Gaussian has its only fringe peak at 2k
        let grid = UniformGrid::new(40.0, 4001);
        let k = 1.3;
        let x = grid.values();
        let density: Vec<f64> = x
            .iter()
            .map(|&v| (k * v).cos().powi(2) * (-v * v / 200.0).exp())
            .collect();
        let curve = MarginalCurve {
            theta: 0.0,
            x,
            density,
            step: grid.step(),
            weight: 1.0,
        };
        let spec = wavenumber_spectrum(&curve, 6.0, 0.01).unwrap();
        assert_eq!(spec.peaks.len(), 1, "{:?}", spec.peaks);
        assert!((spec.peaks[0].k - 2.0 * k).abs() < 0.01);
    }

    #[test]
    fn flat_density_has_no_peaks() {
        let grid = UniformGrid::default();
        let curve = MarginalCurve {
            theta: 0.0,
            x: grid.values(),
            density: vec![1.0 / 24.0; grid.points],
            step: grid.step(),
            weight: 1.0,
        };
        let spec = wavenumber_spectrum(&curve, 10.0, 0.01).unwrap();
        assert!(spec.peaks.is_empty());
        assert!(matches!(
            wavenumber_spectrum(&curve, 1000.0, 0.01),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn checkerboard_normalization_matches_closed_form() {
        for (sigma, alpha) in [(0.5, 1.9), (1.0, 1.9), (5.0, 1.9)] {
            let cb = ClassicalCheckerboard::new(sigma, alpha).unwrap();
            let g0 = cb.envelope(0.0);
            let analytic = 2.0 * PI * sigma * sigma * g0 * g0;
            assert!((cb.normalization / analytic - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_limits() {
        // vanishing checkerboard wave number leaves a Gaussian
        let cb = ClassicalCheckerboard {
            sigma: 1.3,
            alpha: 1e-9,
            normalization: 1.0,
        };
        for a3 in [0.1f64, 0.5, 1.0] {
            let expected = 0.5 + 0.5 * (-2.0 * 1.69 * a3 * a3).exp() * 0.4f64.cos();
            assert!((classical_pplus(&cb, a3, 0.4, 0.7) - expected).abs() < 1e-12);
        }
        let cb = ClassicalCheckerboard::new(5.0, 1.9).unwrap();
        assert!((classical_pplus(&cb, 1.9, PI / 2.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn classical_marginal_quarter_symmetry() {
        let cb = ClassicalCheckerboard::new(1.0, 1.9).unwrap();
        let grid = UniformGrid::new(9.0, 601);
        let a = classical_marginal(&cb, 0.3, &grid);
        let b = classical_marginal(&cb, 0.3 + PI / 2.0, &grid);
        for (u, v) in a.density.iter().zip(&b.density) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!((a.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn map_features_respect_periodic_angle() {
        let theta = theta_axis(8);
        let ratio = ratio_axis(5, 2.0);
        let map = PPlusMap::build(theta, ratio, 1.0, 0.0, |t, r| {
            0.5 + 0.4 * (-(r - 1.2f64).powi(2) * 10.0).exp() * t.cos().powi(2)
        });
        let f = map.features(1e-3);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].theta, 0.0);
        assert!((f[0].ratio - 1.2).abs() < 1e-12);
    }
}
