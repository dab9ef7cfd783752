//! Truncated Fock-space numerics.
//!
//! Units are dimensionless: `x = a + a^dagger`, `p = i(a^dagger - a)`, so the
//! vacuum has `<x^2> = <p^2> = 1` and `[x, p] = 2i`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, RMatrix};

pub const DEFAULT_DIM: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Probabilities below this are treated as a failed post-selection.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Eigen-decomposition of the truncated position operator. Its eigenvalues are
/// the Gauss-Hermite nodes of order `dim` (scaled by sqrt 2), so functions of
/// `x` built here are exact Gauss quadratures on the retained subspace.
#[derive(Debug)]
pub struct PositionBasis {
    pub nodes: Vec<f64>,
    /// Column `k` is the eigenvector for `nodes[k]`.
    pub vectors: RMatrix,
}

#[derive(Debug, Clone)]
pub struct FockSpace {
    dim: usize,
    convergence_tol: f64,
    position: OnceLock<Arc<PositionBasis>>,
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.convergence_tol == other.convergence_tol
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self::new(DEFAULT_DIM).expect("default dimension is valid")
    }
}

pub struct LadderOps {
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub n: CMatrix,
    pub x: CMatrix,
    pub p: CMatrix,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_tolerance(dim, DEFAULT_TOL)
    }

    pub fn with_tolerance(dim: usize, convergence_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock dimension must be >= 2, got {dim}"
            )));
        }
        if !(convergence_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "convergence tolerance must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            convergence_tol,
            position: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.convergence_tol
    }

    pub fn annihilation(&self) -> CMatrix {
        let mut a = CMatrix::zeros(self.dim, self.dim);
        for n in 1..self.dim {
            a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn ladder_ops(&self) -> LadderOps {
        let a = self.annihilation();
        let a_dag = a.adjoint();
        let n = CMatrix::from_diagonal(&CVector::from_fn(self.dim, |k, _| c(k as f64, 0.0)));
        let x = &a + &a_dag;
        let p = (&a_dag - &a) * linalg::I;
        LadderOps { a, a_dag, n, x, p }
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim, self.dim)
    }

    /// Largest `|alpha|^2` accepted by [`FockSpace::displacement`].
    pub fn displacement_limit(&self) -> f64 {
        self.dim as f64 / 8.0
    }

    fn check_displacement(&self, alpha: Complex64) -> Result<()> {
        if alpha.norm_sqr() >= self.displacement_limit() {
            return Err(Error::TruncationRisk(format!(
                "|alpha|^2 = {:.3} must stay below dim/8 = {:.3}",
                alpha.norm_sqr(),
                self.displacement_limit()
            )));
        }
        Ok(())
    }

    /// `D(alpha) = exp(alpha a^dagger - alpha^* a)` by scaling and squaring.
    pub fn displacement(&self, alpha: Complex64) -> Result<CMatrix> {
        self.check_displacement(alpha)?;
        if alpha == Complex64::new(0.0, 0.0) {
            return Ok(self.identity());
        }
        let a = self.annihilation();
        let generator = a.adjoint() * alpha - a * alpha.conj();
        Ok(linalg::expm(&generator))
    }

    /// Matrix elements `<m|D(alpha)|n>` of the untruncated displacement,
    /// restricted to the retained levels. No truncation guard is needed: these
    /// are the exact projections. For `m >= n`,
    /// `<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2)`;
    /// below the diagonal `m, n` swap and `alpha` becomes `-alpha^*`. Each
    /// band runs the Laguerre recurrence on normalized values so nothing
    /// overflows.
    pub fn displacement_elements(&self, alpha: Complex64) -> CMatrix {
        let dim = self.dim;
        let x = alpha.norm_sqr();
        if x == 0.0 {
            return self.identity();
        }
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..dim).scan(0.0, |acc, k| {
                *acc += (k as f64).ln();
                Some(*acc)
            }))
            .collect();
        let unit = alpha / alpha.norm();
        let mut d = CMatrix::zeros(dim, dim);
        for order in 0..dim {
            let a = order as f64;
            let len = dim - order;
            // g_n = sqrt(n!/(n+a)!) x^{a/2} e^{-x/2} L_n^(a)(x)
            let mut g = vec![0.0; len];
            g[0] = (0.5 * a * x.ln() - 0.5 * x - 0.5 * ln_fact[order]).exp();
            if len > 1 {
                g[1] = g[0] * (1.0 + a - x) / (1.0 + a).sqrt();
            }
            for n in 1..len.saturating_sub(1) {
                let nf = n as f64;
                let r1 = ((nf + 1.0) / (nf + 1.0 + a)).sqrt();
                let r2 = ((nf + 1.0) * nf / ((nf + 1.0 + a) * (nf + a))).sqrt();
                g[n + 1] = ((2.0 * nf + 1.0 + a - x) * g[n] * r1 - (nf + a) * g[n - 1] * r2) / (nf + 1.0);
            }
            let above = unit.powu(order as u32);
            let below = (-unit.conj()).powu(order as u32);
            for (n, &gn) in g.iter().enumerate() {
                d[(n + order, n)] = above * gn;
                if order > 0 {
                    d[(n, n + order)] = below * gn;
                }
            }
        }
        d
    }

    /// Diagonal of `R(theta) = exp(-i theta a^dagger a)`.
    pub fn rotation_phases(&self, theta: f64) -> Vec<Complex64> {
        (0..self.dim)
            .map(|n| Complex64::from_polar(1.0, -theta * n as f64))
            .collect()
    }

    pub fn rotation(&self, theta: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(self.rotation_phases(theta)))
    }

    pub fn thermal_state(&self, nbar: f64) -> Result<DensityMatrix> {
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean occupation must be >= 0, got {nbar}"
            )));
        }
        if nbar >= self.dim as f64 / 20.0 {
            return Err(Error::TruncationRisk(format!(
                "thermal occupation {nbar} needs nbar < dim/20 = {}",
                self.dim as f64 / 20.0
            )));
        }
        let ratio = nbar / (1.0 + nbar);
        let mut p = 1.0 / (1.0 + nbar);
        let mut diag = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            diag.push(c(p, 0.0));
            p *= ratio;
        }
        let matrix = CMatrix::from_diagonal(&CVector::from_vec(diag));
        Ok(DensityMatrix::new(matrix))
    }

    pub fn fock(&self, n: usize) -> MechState {
        assert!(n < self.dim, "Fock level {n} outside dim {}", self.dim);
        let mut v = CVector::zeros(self.dim);
        v[n] = c(1.0, 0.0);
        MechState::new(v)
    }

    pub fn vacuum(&self) -> MechState {
        self.fock(0)
    }

    /// Coherent state `|beta>` from its exact Fock amplitudes.
    pub fn coherent(&self, beta: Complex64) -> MechState {
        let mut v = CVector::zeros(self.dim);
        let mut amp = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
        v[0] = amp;
        for n in 1..self.dim {
            amp = amp * beta / (n as f64).sqrt();
            v[n] = amp;
        }
        MechState::new(v)
    }

    pub fn position_basis(&self) -> Arc<PositionBasis> {
        self.position
            .get_or_init(|| {
                let dim = self.dim;
                let x = DMatrix::<f64>::from_fn(dim, dim, |i, j| {
                    if i + 1 == j || j + 1 == i {
                        (i.max(j) as f64).sqrt()
                    } else {
                        0.0
                    }
                });
                let eig = SymmetricEigen::new(x);
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let nodes = order.iter().map(|&k| eig.eigenvalues[k]).collect();
                let vectors = RMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
                Arc::new(PositionBasis { nodes, vectors })
            })
            .clone()
    }

    /// `f(x)` as an operator on the retained subspace.
    pub fn function_of_position<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let basis = self.position_basis();
        let v = &basis.vectors;
        // V diag(f) V^T with V real
        let mut scaled = CMatrix::zeros(self.dim, self.dim);
        for (k, &node) in basis.nodes.iter().enumerate() {
            let fk = f(node);
            for i in 0..self.dim {
                scaled[(i, k)] = fk * v[(i, k)];
            }
        }
        linalg::matmul_r(&scaled, &v.transpose())
    }
}

/// Pure resonator state, possibly sub-normalized after conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct MechState {
    pub amplitudes: CVector,
    pub norm_sq: f64,
}

impl MechState {
    pub fn new(amplitudes: CVector) -> Self {
        let norm_sq = amplitudes.norm_squared();
        Self {
            amplitudes,
            norm_sq,
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn normalized(&self) -> Self {
        Self::new(&self.amplitudes / Complex64::new(self.norm_sq.sqrt(), 0.0))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(&self.amplitudes * self.amplitudes.adjoint())
    }
}

/// Resonator density matrix. `weight` is its trace, which drops below one
/// after post-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
    pub weight: f64,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Self {
        let weight = linalg::trace(&matrix).re;
        Self { matrix, weight }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn normalized(&self) -> Self {
        Self::new(&self.matrix / Complex64::new(self.weight, 0.0))
    }

    /// Hermiticity, trace and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = linalg::hermitian_defect(&self.matrix);
        if defect > tol {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        let trace = linalg::trace(&self.matrix).re;
        if (trace - self.weight).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "trace {trace} differs from weight {}",
                self.weight
            )));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidParameter(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * c(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }
}

/// Either representation of a resonator state.
#[derive(Debug, Clone, PartialEq)]
pub enum ResonatorState {
    Pure(MechState),
    Mixed(DensityMatrix),
}

impl From<MechState> for ResonatorState {
    fn from(s: MechState) -> Self {
        Self::Pure(s)
    }
}

impl From<DensityMatrix> for ResonatorState {
    fn from(s: DensityMatrix) -> Self {
        Self::Mixed(s)
    }
}

/// First and second quadrature moments of a normalized state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_n: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Symmetrized covariance `<(xp + px)/2> - <x><p>`.
    pub cov_xp: f64,
}

impl Moments {
    /// Mean of the rotated quadrature `x cos(theta) + p sin(theta)`.
    pub fn mean_at(&self, theta: f64) -> f64 {
        self.mean_x * theta.cos() + self.mean_p * theta.sin()
    }

    pub fn var_at(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.var_x * c * c + self.var_p * s * s + 2.0 * self.cov_xp * s * c
    }

    /// Largest quadrature variance over all rotation angles.
    pub fn max_variance(&self) -> f64 {
        let mid = 0.5 * (self.var_x + self.var_p);
        let half = 0.5 * (self.var_x - self.var_p);
        mid + (half * half + self.cov_xp * self.cov_xp).sqrt()
    }

    /// Distance of the centroid from the origin in phase space.
    pub fn mean_radius(&self) -> f64 {
        self.mean_x.hypot(self.mean_p)
    }
}

impl ResonatorState {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(s) => s.dim(),
            Self::Mixed(s) => s.dim(),
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            Self::Pure(s) => s.norm_sq,
            Self::Mixed(s) => s.weight,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    /// `M psi` or `M rho M^dagger`.
    pub fn apply(&self, op: &CMatrix) -> Self {
        match self {
            Self::Pure(s) => Self::Pure(MechState::new(linalg::matvec(op, &s.amplitudes))),
            Self::Mixed(s) => Self::Mixed(DensityMatrix::new(linalg::sandwich(op, &s.matrix))),
        }
    }

    /// `R(theta)` applied as a diagonal phase.
    pub fn rotate(&self, theta: f64) -> Self {
        let dim = self.dim();
        let phases: Vec<Complex64> = (0..dim)
            .map(|n| Complex64::from_polar(1.0, -theta * n as f64))
            .collect();
        match self {
            Self::Pure(s) => {
                let v = CVector::from_fn(dim, |n, _| s.amplitudes[n] * phases[n]);
                Self::Pure(MechState {
                    amplitudes: v,
                    norm_sq: s.norm_sq,
                })
            }
            Self::Mixed(s) => {
                let m = CMatrix::from_fn(dim, dim, |i, j| {
                    s.matrix[(i, j)] * phases[i] * phases[j].conj()
                });
                Self::Mixed(DensityMatrix {
                    matrix: m,
                    weight: s.weight,
                })
            }
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            Self::Pure(s) => s.to_density(),
            Self::Mixed(s) => s.clone(),
        }
    }

    pub fn normalized(&self) -> Self {
        match self {
            Self::Pure(s) => Self::Pure(s.normalized()),
            Self::Mixed(s) => Self::Mixed(s.normalized()),
        }
    }

    /// Diagonal populations `<n|rho|n>` (unnormalized).
    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Pure(s) => s.amplitudes.iter().map(|z| z.norm_sqr()).collect(),
            Self::Mixed(s) => s.matrix.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    /// `rho_{m,n}` without forming the outer product of a pure state.
    fn element(&self, m: usize, n: usize) -> Complex64 {
        match self {
            Self::Pure(s) => s.amplitudes[m] * s.amplitudes[n].conj(),
            Self::Mixed(s) => s.matrix[(m, n)],
        }
    }

    /// `Tr[O rho]`, unnormalized.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        match self {
            Self::Pure(s) => s.amplitudes.dotc(&linalg::matvec(op, &s.amplitudes)),
            Self::Mixed(s) => linalg::trace_product(op, &s.matrix),
        }
    }

    pub fn moments(&self) -> Moments {
        let dim = self.dim();
        let w = self.weight();
        let mut mean_a = Complex64::new(0.0, 0.0);
        let mut mean_a2 = Complex64::new(0.0, 0.0);
        let mut mean_n = 0.0;
        for n in 0..dim {
            mean_n += n as f64 * self.element(n, n).re;
            if n + 1 < dim {
                mean_a += ((n + 1) as f64).sqrt() * self.element(n + 1, n);
            }
            if n + 2 < dim {
                mean_a2 += (((n + 1) * (n + 2)) as f64).sqrt() * self.element(n + 2, n);
            }
        }
        let (mean_a, mean_a2, mean_n) = (mean_a / w, mean_a2 / w, mean_n / w);
        let mean_x = 2.0 * mean_a.re;
        let mean_p = 2.0 * mean_a.im;
        let x2 = 2.0 * mean_a2.re + 2.0 * mean_n + 1.0;
        let p2 = -2.0 * mean_a2.re + 2.0 * mean_n + 1.0;
        Moments {
            mean_n,
            mean_x,
            mean_p,
            var_x: x2 - mean_x * mean_x,
            var_p: p2 - mean_p * mean_p,
            cov_xp: 2.0 * mean_a2.im - mean_x * mean_p,
        }
    }

    /// Normalized population in the top 5% of Fock levels.
    pub fn edge_population(&self) -> f64 {
        let pops = self.populations();
        let dim = pops.len();
        let band = ((dim as f64 * 0.05).ceil() as usize).max(1);
        pops[dim - band..].iter().sum::<f64>() / self.weight()
    }

    pub fn check_truncation(&self, tol: f64) -> Result<()> {
        let edge = self.edge_population();
        if edge >= tol {
            return Err(Error::TruncationRisk(format!(
                "population {edge:e} in the top 5% of {} Fock levels exceeds {tol:e}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Fidelity with another state after normalizing both. For mixed inputs
    /// this is `Tr[rho sigma]`, exact when either state is pure.
    pub fn overlap_fidelity(&self, other: &Self) -> f64 {
        let (a, b) = (self.normalized(), other.normalized());
        match (&a, &b) {
            (Self::Pure(x), Self::Pure(y)) => x.amplitudes.dotc(&y.amplitudes).norm_sqr(),
            (Self::Pure(x), mixed) | (mixed, Self::Pure(x)) => {
                mixed.to_density_expectation(&x.amplitudes)
            }
            (Self::Mixed(x), Self::Mixed(y)) => linalg::trace_product(&x.matrix, &y.matrix).re,
        }
    }

    fn to_density_expectation(&self, psi: &CVector) -> f64 {
        let rho = self.to_density();
        psi.dotc(&linalg::matvec(&rho.matrix, psi)).re
    }
}

/// Qubit (x) resonator pure state, ordered `(|+> (x) Fock, |-> (x) Fock)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub vector: CVector,
}

impl JointState {
    pub fn product(plus: Complex64, minus: Complex64, mech: &MechState) -> Self {
        let dim = mech.dim();
        let v = CVector::from_fn(2 * dim, |k, _| {
            if k < dim {
                plus * mech.amplitudes[k]
            } else {
                minus * mech.amplitudes[k - dim]
            }
        });
        Self { vector: v }
    }

    pub fn dim(&self) -> usize {
        self.vector.len() / 2
    }

    pub fn plus_block(&self) -> MechState {
        MechState::new(self.vector.rows(0, self.dim()).into_owned())
    }

    pub fn minus_block(&self) -> MechState {
        MechState::new(self.vector.rows(self.dim(), self.dim()).into_owned())
    }

    pub fn norm_sq(&self) -> f64 {
        self.vector.norm_squared()
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        let ov = self.vector.dotc(&other.vector).norm_sqr();
        ov / (self.norm_sq() * other.norm_sq())
    }
}

/// Apply a measurement operator and return the conditional state with the
/// probability relative to the incoming weight.
pub fn condition(state: &ResonatorState, op: &CMatrix) -> Result<(ResonatorState, f64)> {
    let incoming = state.weight();
    if !(incoming > 0.0) {
        return Err(Error::ZeroProbability {
            probability: incoming,
        });
    }
    let out = state.apply(op);
    let probability = out.weight() / incoming;
    if probability < MIN_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    Ok((out, probability))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dims: Vec<usize>,
    /// Largest absolute observable deviation between consecutive dims.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Run `scenario` at each dimension and at twice the last one; observables
/// must agree within `tol` between consecutive runs.
pub fn converge_check<F>(scenario: F, dims: &[usize], tol: f64) -> Result<ConvergenceReport>
where
    F: Fn(&FockSpace) -> Result<Vec<f64>>,
{
    if dims.is_empty() {
        return Err(Error::InvalidParameter("no dimensions to compare".into()));
    }
    let mut all: Vec<usize> = dims.to_vec();
    if all.len() == 1 {
        all.push(2 * all[0]);
    }
    let mut previous: Option<(usize, Vec<f64>)> = None;
    let mut max_deviation: f64 = 0.0;
    let mut worst = (all[0], all[0]);
    for &dim in &all {
        let space = FockSpace::new(dim)?;
        let obs = scenario(&space)?;
        if let Some((pdim, prev)) = &previous {
            if prev.len() != obs.len() {
                return Err(Error::InvalidParameter(
                    "observable count changed with dimension".into(),
                ));
            }
            let dev = prev
                .iter()
                .zip(&obs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev >= max_deviation {
                max_deviation = dev;
                worst = (*pdim, dim);
            }
        }
        previous = Some((dim, obs));
    }
    if max_deviation >= tol {
        return Err(Error::NotConverged {
            drift: max_deviation,
            tolerance: tol,
            dims: worst,
        });
    }
    Ok(ConvergenceReport {
        dims: all,
        max_deviation,
        tolerance: tol,
        passed: true,
    })
}
