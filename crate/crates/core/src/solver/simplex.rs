use serde::{Deserialize, Serialize};

use super::materialize_q;
use crate::error::{Error, Result};
use crate::signal::LowPassOperator;

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_TOL: f64 = 1e-12;

/// Diagnostics from the dense simplex run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOutcome {
    pub phase1_iterations: usize,
    pub phase2_iterations: usize,
    /// The anti-cycling guard switched pivoting to Bland's rule.
    pub bland_activated: bool,
}

/// Optimal vertex of the reference linear program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub xhat: Vec<f64>,
    pub objective: f64,
    pub outcome: SimplexOutcome,
}

/// Dense tableau for min c'z subject to A z = b, z >= 0.
///
/// Row `m` carries reduced costs c_j - z_j and minus the objective in its
/// rhs entry; both are maintained by ordinary pivoting.
struct Tableau {
    m: usize,
    cols: usize,
    /// Columns allowed to enter the basis (phase 2 blocks artificials).
    entering_limit: usize,
    /// (m+1) x (cols+1); column `cols` is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    degenerate_pivots: usize,
    degenerate_cap: usize,
    bland: bool,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.t[row].clone();
        for (r, t_row) in self.t.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = t_row[col];
            if factor == 0.0 {
                continue;
            }
            for (v, p) in t_row.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            // Kill residual rounding in the pivot column.
            t_row[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn entering_column(&self) -> Option<usize> {
        let costs = &self.t[self.m];
        if self.bland {
            (0..self.entering_limit).find(|&c| costs[c] < -REDUCED_COST_TOL)
        } else {
            let mut best = None;
            let mut best_val = -REDUCED_COST_TOL;
            for (c, &v) in costs.iter().enumerate().take(self.entering_limit) {
                if v < best_val {
                    best_val = v;
                    best = Some(c);
                }
            }
            best
        }
    }

    fn leaving_row(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.m {
            let a = self.t[r][col];
            if a > PIVOT_TOL {
                let ratio = self.t[r][self.cols] / a;
                let better = match best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < bratio - DEGENERATE_TOL
                            || ((ratio - bratio).abs() <= DEGENERATE_TOL
                                && self.basis[r] < self.basis[br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Pivots to optimality; returns false on unboundedness.
    fn optimize(&mut self) -> bool {
        while let Some(col) = self.entering_column() {
            let Some(row) = self.leaving_row(col) else {
                return false;
            };
            if self.t[row][self.cols] / self.t[row][col] <= DEGENERATE_TOL {
                self.degenerate_pivots += 1;
                if self.degenerate_pivots > self.degenerate_cap {
                    self.bland = true;
                }
            }
            self.pivot(row, col);
            self.iterations += 1;
        }
        true
    }

    fn objective(&self) -> f64 {
        -self.t[self.m][self.cols]
    }

    fn solution(&self, n: usize) -> Vec<f64> {
        let mut z = vec![0.0; n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                z[b] = self.t[r][self.cols];
            }
        }
        z
    }
}

/// Two-phase dense simplex for min c'z subject to A z = b, z >= 0.
pub(crate) fn simplex(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
) -> Result<(Vec<f64>, f64, SimplexOutcome)> {
    let m = a.len();
    let n = c.len();
    let cols = n + m;

    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols] = flip * b[i];
    }
    // Phase-1 reduced costs for the artificial basis: price out unit costs.
    for j in 0..=cols {
        let mut acc = 0.0;
        for row in t.iter().take(m) {
            acc -= row[j];
        }
        t[m][j] = acc;
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }

    let mut tab = Tableau {
        m,
        cols,
        entering_limit: cols,
        t,
        basis: (n..cols).collect(),
        degenerate_pivots: 0,
        degenerate_cap: 10 * n,
        bland: false,
        iterations: 0,
    };
    tab.optimize();
    if tab.objective() > 1e-7 {
        return Err(Error::InvalidArgument {
            name: "lp",
            reason: format!(
                "phase 1 ended infeasible with residual {:.3e}",
                tab.objective()
            ),
        });
    }
    let phase1_iterations = tab.iterations;

    // Drive lingering artificials out of the basis where a structural pivot
    // exists; a fully zero row is redundant and its artificial stays at zero.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&cidx| tab.t[r][cidx].abs() > PIVOT_TOL) {
                tab.pivot(r, col);
            }
        }
    }

    // Phase 2: rebuild the cost row for the structural objective (artificial
    // columns are blocked from entering; any still basic carry zero cost).
    for j in 0..=cols {
        let mut acc = if j < n { c[j] } else { 0.0 };
        for r in 0..m {
            let basic = tab.basis[r];
            let basic_cost = if basic < n { c[basic] } else { 0.0 };
            acc -= basic_cost * tab.t[r][j];
        }
        tab.t[m][j] = acc;
    }
    tab.entering_limit = n;
    tab.iterations = 0;
    if !tab.optimize() {
        return Err(Error::InvalidArgument {
            name: "lp",
            reason: "phase 2 detected an unbounded objective".into(),
        });
    }

    Ok((
        tab.solution(n),
        tab.objective(),
        SimplexOutcome {
            phase1_iterations,
            phase2_iterations: tab.iterations,
            bland_activated: tab.bland,
        },
    ))
}

/// Assembles and solves min 1'(u + v) s.t. Qx + u - v = y, x,u,v >= 0.
///
/// Dense oracle, guarded to N <= 128. The optimal value is the minimal
/// l1 residual ||y - Q xhat||_1 over nonnegative xhat.
pub fn solve_reference_lp(y: &[f64], op: &LowPassOperator) -> Result<ReferenceSolution> {
    let n = op.n();
    if n > 128 {
        return Err(Error::InvalidArgument {
            name: "op",
            reason: format!("reference LP is guarded to N <= 128, got {n}"),
        });
    }
    if y.len() != n {
        return Err(Error::LengthMismatch {
            name: "y",
            expected: n,
            got: y.len(),
        });
    }
    let q = materialize_q(op)?;
    let mut a = vec![vec![0.0; 3 * n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = q[i][j];
        }
        a[i][n + i] = 1.0;
        a[i][2 * n + i] = -1.0;
    }
    let mut c = vec![0.0; 3 * n];
    for v in c.iter_mut().skip(n) {
        *v = 1.0;
    }
    let (z, objective, outcome) = simplex(&a, y, &c)?;
    Ok(ReferenceSolution {
        xhat: z[..n].to_vec(),
        objective,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::apply_lowpass;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_data_gives_zero_vertex() {
        let op = LowPassOperator::new(16, 4).unwrap();
        let sol = solve_reference_lp(&vec![0.0; 16], &op).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.xhat.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn generic_simplex_solves_textbook_instance() {
        // min -3x - 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 (slacks added):
        // optimum -36 at (2, 6).
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let (z, obj, _) = simplex(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(obj, -36.0, epsilon = 1e-9);
        assert_abs_diff_eq!(z[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(z[1], 6.0, epsilon = 1e-9);
    }

    #[test]
    fn smallest_grid_single_spike_recovers_exactly() {
        let op = LowPassOperator::new(4, 1).unwrap();
        let mut x = vec![0.0; 4];
        x[1] = 0.8;
        let y = apply_lowpass(&op, &x).unwrap();
        let sol = solve_reference_lp(&y, &op).unwrap();
        assert!(sol.objective.abs() <= 1e-10);
        for (got, want) in sol.xhat.iter().zip(&x) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-9);
        }
        // Uniqueness: the nullspace of Q is spanned by the Nyquist vector
        // (+1,-1,+1,-1); any movement along it breaks nonnegativity.
        let v = [1.0, -1.0, 1.0, -1.0];
        let qv = apply_lowpass(&op, &v).unwrap();
        assert!(qv.iter().all(|a| a.abs() < 1e-12));
        for t in [0.1, -0.1] {
            let moved: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + t * b).collect();
            assert!(moved.iter().any(|a| *a < 0.0));
        }
    }

    #[test]
    fn noisy_instance_has_positive_objective_and_feasible_residual() {
        use rand::{Rng, SeedableRng};
        let op = LowPassOperator::new(32, 8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut x = vec![0.0; 32];
        x[4] = 1.0;
        x[20] = 0.5;
        let mut y = apply_lowpass(&op, &x).unwrap();
        for v in y.iter_mut() {
            *v += rng.gen_range(-0.01..0.01);
        }
        let sol = solve_reference_lp(&y, &op).unwrap();
        assert!(sol.objective > 0.0);
        // Recompute the residual from xhat; it must match the LP objective.
        let qx = apply_lowpass(&op, &sol.xhat).unwrap();
        let res: f64 = y.iter().zip(&qx).map(|(a, b)| (a - b).abs()).sum();
        assert_abs_diff_eq!(res, sol.objective, epsilon = 1e-9);
        assert!(sol.xhat.iter().all(|v| *v >= -1e-12));
    }
}
