use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{Cone, ConicProblem, ConicSolution, ConicSolver, ConicStatus, SolveStats};
use crate::error::{Error, Result};

/// Interior-point backend built on Clarabel.
///
/// Rotated cones are mapped onto second-order cones through
/// `(q, s, u) -> (q + s, q - s, 2u)`.
#[derive(Debug, Clone)]
pub struct ClarabelSolver {
    pub tol: f64,
    pub max_iter: u32,
}

impl ClarabelSolver {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_iter: 200 }
    }
}

impl ConicSolver for ClarabelSolver {
    fn solve(&self, problem: &ConicProblem) -> Result<ConicSolution> {
        problem.validate()?;
        let n = problem.num_vars();
        let m = problem.num_rows();

        // Clarabel: A x + s = b, s in K. Our rows are r = G x + g in K, so A = -G, b = g.
        let mut rows_i = Vec::new();
        let mut cols_j = Vec::new();
        let mut vals = Vec::new();
        let mut b = Vec::with_capacity(m);
        let mut cones = Vec::with_capacity(problem.blocks.len());
        let mut push_row = |row: usize, expr: &super::LinExpr, scale: f64, b: &mut Vec<f64>| {
            for &(v, c) in expr.terms() {
                rows_i.push(row);
                cols_j.push(v.0);
                vals.push(-c * scale);
            }
            b.push(expr.constant_part() * scale);
        };

        let mut row = 0;
        for block in &problem.blocks {
            match block.cone {
                Cone::Nonnegative(d) => {
                    for expr in &block.rows {
                        push_row(row, expr, 1.0, &mut b);
                        row += 1;
                    }
                    cones.push(SupportedConeT::NonnegativeConeT(d));
                }
                Cone::SecondOrder(d) => {
                    for expr in &block.rows {
                        push_row(row, expr, 1.0, &mut b);
                        row += 1;
                    }
                    cones.push(SupportedConeT::SecondOrderConeT(d));
                }
                Cone::RotatedSecondOrder(d) => {
                    let q = &block.rows[0];
                    let s = &block.rows[1];
                    push_row(row, &(q.clone() + s.clone()), 1.0, &mut b);
                    push_row(row + 1, &(q.clone() - s.clone()), 1.0, &mut b);
                    row += 2;
                    for expr in &block.rows[2..] {
                        push_row(row, expr, 2.0, &mut b);
                        row += 1;
                    }
                    cones.push(SupportedConeT::SecondOrderConeT(d));
                }
            }
        }
        debug_assert_eq!(row, m);

        let a = CscMatrix::new_from_triplets(m, n, rows_i, cols_j, vals);
        let p = CscMatrix::zeros((n, n));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .build()
            .map_err(|e| Error::InvalidInput(format!("solver settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &problem.objective, &a, &b, &cones, settings)
            .map_err(|e| Error::InvalidInput(format!("solver setup: {e:?}")))?;
        solver.solve();

        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => ConicStatus::Optimal,
            SolverStatus::AlmostSolved => ConicStatus::AlmostOptimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                ConicStatus::Infeasible
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                ConicStatus::Unbounded
            }
            _ => ConicStatus::NumericalFailure,
        };

        // Map the second-order duals of rotated blocks back to their own rows.
        let mut dual = sol.z.clone();
        let mut offset = 0;
        for block in &problem.blocks {
            let d = block.cone.dim();
            if let Cone::RotatedSecondOrder(_) = block.cone {
                let (z0, z1) = (sol.z[offset], sol.z[offset + 1]);
                dual[offset] = z0 + z1;
                dual[offset + 1] = z0 - z1;
                for z in &mut dual[offset + 2..offset + d] {
                    *z *= 2.0;
                }
            }
            offset += d;
        }

        let objective = problem.objective_value(&sol.x);
        Ok(ConicSolution {
            x: sol.x.clone(),
            dual,
            objective,
            status,
            stats: SolveStats {
                iterations: sol.iterations,
                primal_residual: sol.r_prim,
                dual_residual: sol.r_dual,
                gap: (sol.obj_val - sol.obj_val_dual).abs(),
                solve_time: sol.solve_time,
            },
        })
    }
}
