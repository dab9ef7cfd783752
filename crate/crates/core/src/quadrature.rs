//! Gauss-Hermite rules and Hermite-function tables in the `x = a + a^dagger`
//! quadrature convention (vacuum variance `<x^2> = 1`).

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Nodes and weights for `int exp(-u^2) f(u) du`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub-Welsch: eigen-decomposition of the Hermite Jacobi matrix.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Expectation of `f` under a centred normal with the given variance.
    pub fn normal_expectation<F: FnMut(f64) -> f64>(&self, variance: f64, mut f: F) -> f64 {
        let scale = (2.0 * variance).sqrt();
        let norm = std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * f(scale * u))
            .sum::<f64>()
            / norm
    }
}

/// Uniform position grid `x_j = -half_width + j h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub half_width: f64,
    pub points: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, points: usize) -> Self {
        assert!(half_width > 0.0 && points >= 3, "degenerate grid");
        Self { half_width, points }
    }

    /// Grid of at least `min_points` with spacing no larger than `max_step`.
    pub fn with_max_step(half_width: f64, max_step: f64, min_points: usize) -> Self {
        let needed = (2.0 * half_width / max_step).ceil() as usize + 1;
        Self::new(half_width, needed.max(min_points))
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points)
            .map(|j| -self.half_width + j as f64 * h)
            .collect()
    }
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self::new(12.0, 1024)
    }
}

/// Table of `phi_n(x_j)`, the position wavefunctions of Fock states with
/// `x = a + a^dagger`, so that `int phi_n^2 dx = 1`.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    pub x: Vec<f64>,
    pub step: f64,
    /// Row `j`, column `n`.
    pub values: DMatrix<f64>,
}

impl HermiteTable {
    pub fn new(grid: &UniformGrid, dim: usize) -> Self {
        let x = grid.values();
        Self::at_points(x, grid.step(), dim)
    }

    pub fn at_points(x: Vec<f64>, step: f64, dim: usize) -> Self {
        let mut values = DMatrix::<f64>::zeros(x.len(), dim);
        for (j, &xj) in x.iter().enumerate() {
            for (n, v) in hermite_functions(xj, dim).into_iter().enumerate() {
                values[(j, n)] = v;
            }
        }
        Self { x, step, values }
    }
}

/// `phi_0 .. phi_{dim-1}` at a single point.
pub fn hermite_functions(x: f64, dim: usize) -> Vec<f64> {
    // Standard oscillator functions psi_n(xi) with xi = x / sqrt(2), rescaled
    // by 2^{-1/4} so they are normalized in x.
    let xi = x / std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(dim);
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(psi0);
    if dim > 1 {
        out.push(std::f64::consts::SQRT_2 * xi * psi0);
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    let scale = 2f64.powf(-0.25);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// Composite trapezoid on uniform samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}
