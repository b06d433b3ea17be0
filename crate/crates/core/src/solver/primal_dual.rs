use serde::{Deserialize, Serialize};

use super::l1_norm;
use crate::error::{Error, Result};
use crate::signal::{GridSignal, LowPassOperator, LowPassWorkspace};

/// Configuration for the first-order solver.
///
/// The operator norm of Q is exactly 1 (orthogonal projection), so step
/// sizes must satisfy primal_step * dual_step <= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub primal_step: f64,
    pub dual_step: f64,
    /// Relative objective stagnation tolerance between convergence checks.
    pub tol_obj: f64,
    /// Feasibility tolerance used for the dual optimality check (the primal
    /// iterate is an exact projection onto x >= 0).
    pub tol_feas: f64,
    /// Iterations between convergence checks.
    pub check_interval: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 400_000,
            primal_step: 0.99,
            dual_step: 0.99,
            tol_obj: 1e-9,
            tol_feas: 1e-9,
            check_interval: 100,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.primal_step > 0.0 && self.dual_step > 0.0) {
            return Err(Error::InvalidArgument {
                name: "steps",
                reason: "step sizes must be positive".into(),
            });
        }
        if self.primal_step * self.dual_step > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument {
                name: "steps",
                reason: format!(
                    "primal_step * dual_step = {} exceeds 1 = ||Q||^2",
                    self.primal_step * self.dual_step
                ),
            });
        }
        if self.check_interval == 0 {
            return Err(Error::InvalidArgument {
                name: "check_interval",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Outcome of a first-order solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub xhat: GridSignal,
    /// Final objective ||y - Q xhat||_1 for the returned iterate.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective sampled at every convergence check.
    pub history: Vec<f64>,
    /// Duality gap estimate objective - <w, y> at the last check.
    pub gap: f64,
    /// Worst violation of the dual constraint Q w <= 0 at the last check.
    pub dual_violation: f64,
}

/// Primal-dual splitting on min_{x >= 0} max_{||w||_inf <= 1} <w, y - Qx>.
///
/// Q is applied through the FFT each iteration. The returned point is the
/// best iterate observed at a convergence check, so the reported objective
/// is the running minimum of the history.
pub fn solve_cvx(y: &[f64], op: &LowPassOperator, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let n = op.n();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            name: "y",
            expected: n,
            got: y.len(),
        });
    }

    let mut workspace = LowPassWorkspace::new(op);
    let y_l1 = l1_norm(y);
    let obj_scale = 1.0 + y_l1;

    let mut x = vec![0.0; n];
    let mut x_bar = vec![0.0; n];
    let mut w = vec![0.0; n];

    let mut history = Vec::new();
    let mut best_obj = f64::INFINITY;
    let mut best_x = x.clone();
    let mut prev_obj = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    let mut dual_violation = f64::INFINITY;

    let sigma = cfg.dual_step;
    let tau = cfg.primal_step;

    while iterations < cfg.max_iters {
        for _ in 0..cfg.check_interval.min(cfg.max_iters - iterations) {
            // Dual ascent with prox of the conjugate of ||y - .||_1.
            let q_xbar = workspace.apply(&x_bar);
            for i in 0..n {
                w[i] = (w[i] + sigma * (q_xbar[i] - y[i])).clamp(-1.0, 1.0);
            }
            // Primal descent with projection onto the nonnegative orthant.
            let q_w = workspace.apply(&w);
            for i in 0..n {
                let x_new = (x[i] - tau * q_w[i]).max(0.0);
                x_bar[i] = 2.0 * x_new - x[i];
                x[i] = x_new;
            }
            iterations += 1;
        }

        let q_x = workspace.apply(&x);
        let obj: f64 = y.iter().zip(&q_x).map(|(a, b)| (a - b).abs()).sum();
        history.push(obj);
        if obj < best_obj {
            best_obj = obj;
            best_x.copy_from_slice(&x);
        }

        // Dual certificate: w is box-feasible by construction; check
        // Q w <= 0 and the duality gap obj - <w, y>.
        let q_w = workspace.apply(&w);
        dual_violation = q_w.iter().fold(0.0_f64, |acc, v| acc.max(*v));
        let dual_value: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum();
        gap = obj - dual_value;

        let stagnated = (prev_obj - obj).abs() <= cfg.tol_obj * obj_scale;
        let dual_ok = dual_violation <= cfg.tol_feas && gap.abs() <= 10.0 * cfg.tol_obj * obj_scale;
        if stagnated && dual_ok {
            converged = true;
            break;
        }
        prev_obj = obj;
    }

    let xhat = GridSignal::new(n, best_x.iter().map(|v| v.max(0.0)).collect())?;
    Ok(SolveReport {
        xhat,
        objective: best_obj,
        iterations,
        converged,
        history,
        gap,
        dual_violation,
    })
}
