//! Solvers for the recovery program: minimize ||y - Q x||_1 subject to x >= 0.
//!
//! Two fidelities: a primal-dual splitting that applies Q through the FFT
//! (scales to large grids) and a dense two-phase simplex used as a reference
//! oracle on small instances.

mod primal_dual;
mod simplex;

pub use primal_dual::{solve_cvx, SolveReport, SolverConfig};
pub use simplex::{solve_reference_lp, ReferenceSolution, SimplexOutcome};

use crate::error::{Error, Result};
use crate::signal::LowPassOperator;

/// Dense symmetric matrix of the projection Q; row m is the Dirichlet kernel
/// centered at m. Guarded to N <= 512.
pub fn materialize_q(op: &LowPassOperator) -> Result<Vec<Vec<f64>>> {
    let n = op.n();
    if n > 512 {
        return Err(Error::InvalidArgument {
            name: "op",
            reason: format!("dense Q is guarded to N <= 512, got {n}"),
        });
    }
    let flo = op.flo();
    // First row by closed form; the matrix is circulant.
    let mut row0 = vec![0.0; n];
    for (m, v) in row0.iter_mut().enumerate() {
        let mut acc = 1.0;
        for k in 1..=flo {
            acc += 2.0 * (2.0 * std::f64::consts::PI * k as f64 * m as f64 / n as f64).cos();
        }
        *v = acc / n as f64;
    }
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = row0[(j + n - i) % n];
        }
    }
    Ok(q)
}

pub(crate) fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::apply_lowpass;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dense_q_is_symmetric_idempotent_projection() {
        let op = LowPassOperator::new(8, 3).unwrap();
        let q = materialize_q(&op).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_abs_diff_eq!(q[i][j], q[j][i], epsilon = 1e-12);
                let mut acc = 0.0;
                for k in 0..8 {
                    acc += q[i][k] * q[k][j];
                }
                assert_abs_diff_eq!(acc, q[i][j], epsilon = 1e-10);
            }
        }
        let trace: f64 = (0..8).map(|i| q[i][i]).sum();
        assert_abs_diff_eq!(trace, 7.0, epsilon = 1e-10);
    }

    #[test]
    fn dense_q_matches_operator_on_basis() {
        let op = LowPassOperator::new(16, 4).unwrap();
        let q = materialize_q(&op).unwrap();
        let mut e0 = vec![0.0; 16];
        e0[0] = 1.0;
        let col = apply_lowpass(&op, &e0).unwrap();
        for i in 0..16 {
            assert_abs_diff_eq!(q[i][0], col[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_q_guard() {
        let op = LowPassOperator::new(1024, 10).unwrap();
        assert!(materialize_q(&op).is_err());
    }
}
