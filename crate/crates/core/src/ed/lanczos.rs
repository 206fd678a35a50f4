//! Lanczos iteration for the lowest eigenvalue of a symmetric operator.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hamiltonian::LinearOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Change of the lowest Ritz value between steps below which the
    /// iteration may stop.
    pub tol_energy: f64,
    pub max_iter: usize,
    /// Full Gram-Schmidt against every stored Lanczos vector.
    pub reorthogonalize: bool,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol_energy: 1e-12,
            max_iter: 500,
            reorthogonalize: true,
            seed: 0,
        }
    }
}

impl LanczosConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol_energy > 0.0) {
            return Err(Error::InvalidInput("tol_energy must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Relative residual `‖Hv − E v‖ / ‖H‖` accepted as converged.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Second Ritz value closer than this to the lowest one raises a warning.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub residual_norm: f64,
    pub degeneracy_warning: bool,
    pub iterations: usize,
    pub norm_estimate: f64,
    pub vector: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    SymmetricEigen::new(t)
}

/// Lowest eigenpair of `op`, started from a seeded random vector.
pub fn lowest_eigenpair(op: &dyn LinearOperator, config: &LanczosConfig) -> Result<GroundState> {
    config.validate()?;
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut prev_energy = f64::INFINITY;
    let mut norm_estimate = 0.0f64;
    let mut best = (f64::INFINITY, f64::INFINITY);
    let max_steps = config.max_iter.min(n);

    for step in 0..max_steps {
        let current = &basis[step];
        op.apply(current, &mut w);
        let alpha = dot(current, &w);
        axpy(-alpha, current, &mut w);
        if step > 0 {
            axpy(-betas[step - 1], &basis[step - 1], &mut w);
        }
        if config.reorthogonalize {
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        alphas.push(alpha);

        let eig = tridiagonal_eigen(&alphas, &betas);
        let mut order: Vec<usize> = (0..alphas.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energy = eig.eigenvalues[order[0]];
        norm_estimate = eig
            .eigenvalues
            .iter()
            .fold(norm_estimate, |m, e| m.max(e.abs()))
            .max(f64::MIN_POSITIVE);
        let last = eig.eigenvectors[(alphas.len() - 1, order[0])];
        let residual_estimate = (beta * last).abs();
        best = (energy, residual_estimate);

        let breakdown = beta <= 1e-14 * norm_estimate.max(1.0);
        let settled = (energy - prev_energy).abs() <= config.tol_energy * energy.abs().max(1.0)
            && residual_estimate <= 0.1 * RESIDUAL_TOL * norm_estimate;
        if settled || breakdown || step + 1 == max_steps {
            let ritz = eig.eigenvectors.column(order[0]);
            let mut x = vec![0.0; n];
            for (i, q) in basis.iter().enumerate() {
                axpy(ritz[i], q, &mut x);
            }
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|xi| *xi /= nx);
            let mut hx = vec![0.0; n];
            op.apply(&x, &mut hx);
            axpy(-energy, &x, &mut hx);
            let residual_norm = dot(&hx, &hx).sqrt();
            if residual_norm <= RESIDUAL_TOL * norm_estimate {
                let degeneracy_warning =
                    order.len() > 1 && eig.eigenvalues[order[1]] - energy < DEGENERACY_TOL;
                return Ok(GroundState {
                    energy,
                    residual_norm,
                    degeneracy_warning,
                    iterations: step + 1,
                    norm_estimate,
                    vector: x,
                });
            }
            best = (energy, residual_norm);
            if breakdown {
                break;
            }
        }
        prev_energy = energy;
        if step + 1 < max_steps {
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(std::mem::replace(&mut w, vec![0.0; n]));
            betas.push(beta);
        }
    }
    Err(Error::NotConverged {
        best_estimate: best.0,
        residual: best.1,
        iterations: alphas.len(),
    })
}
