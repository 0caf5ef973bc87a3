//! Standard-form conic programs and their solution.
//!
//! A [`ConicProblem`] minimizes `c'x + offset` subject to `A x + b` lying in a
//! product of nonnegative orthants, second-order cones and rotated
//! second-order cones. The constraint rows are stored as sparse affine
//! expressions, one per cone coordinate.

mod cbf;
mod clarabel_backend;
mod expr;

pub use cbf::write_cbf;
pub use clarabel_backend::ClarabelSolver;
pub use expr::{LinExpr, VarId};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cone block and its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// Every coordinate is non-negative.
    Nonnegative(usize),
    /// `(t, x)` with `t >= ||x||`.
    SecondOrder(usize),
    /// `(q, s, u)` with `q * s >= ||u||^2` and `q, s >= 0`.
    RotatedSecondOrder(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Nonnegative(n) | Cone::SecondOrder(n) | Cone::RotatedSecondOrder(n) => n,
        }
    }

    /// Largest violation of cone membership for `v`, zero when `v` is inside.
    ///
    /// Quadratic cones are measured in the norm domain so the violation has
    /// the same units as the coordinates.
    pub fn violation(&self, v: &[f64]) -> f64 {
        match *self {
            Cone::Nonnegative(_) => v.iter().map(|x| (-x).max(0.0)).fold(0.0, f64::max),
            Cone::SecondOrder(_) => {
                let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                (norm - v[0]).max(0.0)
            }
            Cone::RotatedSecondOrder(_) => {
                let (q, s) = (v[0], v[1]);
                let u2: f64 = v[2..].iter().map(|x| x * x).sum();
                // q s >= ||u||^2  <=>  q + s >= ||(q - s, 2u)||
                let norm = ((q - s) * (q - s) + 4.0 * u2).sqrt();
                (0.5 * (norm - q - s)).max((-q).max(0.0)).max((-s).max(0.0))
            }
        }
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.violation(v) <= tol
    }
}

/// A labelled group of constraint rows belonging to one cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeBlock {
    pub label: String,
    pub cone: Cone,
    pub rows: Vec<LinExpr>,
}

/// Emits the rows of a rotated cone encoding `q * s >= ||u||^2`, `q, s >= 0`.
pub fn rotated_soc_rows(s: LinExpr, q: LinExpr, u: Vec<LinExpr>) -> ConeBlock {
    let mut rows = Vec::with_capacity(u.len() + 2);
    rows.push(q);
    rows.push(s);
    rows.extend(u);
    ConeBlock {
        label: String::new(),
        cone: Cone::RotatedSecondOrder(rows.len()),
        rows,
    }
}

/// Minimize `objective . x + objective_offset` subject to every block's rows lying in its cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicProblem {
    pub var_names: Vec<String>,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub blocks: Vec<ConeBlock>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self {
            var_names: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            blocks: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.len()).sum()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.var_names.push(name.into());
        self.objective.push(0.0);
        VarId(self.var_names.len() - 1)
    }

    /// Sets the objective to minimize `expr`.
    pub fn minimize(&mut self, expr: &LinExpr) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(v, coef) in expr.terms() {
            self.objective[v.0] += coef;
        }
        self.objective_offset = expr.constant_part();
    }

    pub fn add_block(&mut self, label: impl Into<String>, mut block: ConeBlock) {
        block.label = label.into();
        self.blocks.push(block);
    }

    /// Adds rows constrained to be non-negative.
    pub fn nonneg(&mut self, label: impl Into<String>, rows: Vec<LinExpr>) {
        let cone = Cone::Nonnegative(rows.len());
        self.add_block(
            label,
            ConeBlock {
                label: String::new(),
                cone,
                rows,
            },
        );
    }

    /// Adds `t >= ||x||`.
    pub fn soc(&mut self, label: impl Into<String>, t: LinExpr, x: Vec<LinExpr>) {
        let mut rows = vec![t];
        rows.extend(x);
        let cone = Cone::SecondOrder(rows.len());
        self.add_block(
            label,
            ConeBlock {
                label: String::new(),
                cone,
                rows,
            },
        );
    }

    /// Adds `q * s >= ||u||^2` with `q, s >= 0`.
    pub fn rotated_soc(&mut self, label: impl Into<String>, q: LinExpr, s: LinExpr, u: Vec<LinExpr>) {
        self.add_block(label, rotated_soc_rows(s, q, u));
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(Error::Dimension("objective length differs from variable count".into()));
        }
        for block in &self.blocks {
            let min_dim = match block.cone {
                Cone::Nonnegative(_) => 0,
                Cone::SecondOrder(_) => 1,
                Cone::RotatedSecondOrder(_) => 2,
            };
            if block.cone.dim() != block.rows.len() || block.rows.len() < min_dim {
                return Err(Error::Dimension(format!(
                    "block `{}` declares dimension {} but has {} rows",
                    block.label,
                    block.cone.dim(),
                    block.rows.len()
                )));
            }
            for row in &block.rows {
                if row.terms().iter().any(|(v, _)| v.0 >= n) {
                    return Err(Error::Dimension(format!(
                        "block `{}` references an unknown variable",
                        block.label
                    )));
                }
                if !row.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "block `{}` has a non-finite coefficient",
                        block.label
                    )));
                }
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("objective has a non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() + self.objective_offset
    }

    /// Largest cone violation of the rows evaluated at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let vals: Vec<f64> = b.rows.iter().map(|r| r.eval(x)).collect();
                b.cone.violation(&vals)
            })
            .fold(0.0, f64::max)
    }

    pub fn blocks_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a ConeBlock> + 'a {
        self.blocks.iter().filter(move |b| b.label.starts_with(prefix))
    }
}

impl Default for ConicProblem {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConicStatus {
    Optimal,
    /// Converged only to the solver's reduced accuracy thresholds.
    AlmostOptimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: u32,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub solve_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicSolution {
    pub x: Vec<f64>,
    /// One dual value per constraint row, in block order.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub status: ConicStatus,
    pub stats: SolveStats,
}

/// A backend able to solve a [`ConicProblem`].
pub trait ConicSolver {
    fn solve(&self, problem: &ConicProblem) -> Result<ConicSolution>;
}

/// Solves with the default backend at tolerance `tol`.
pub fn solve(problem: &ConicProblem, tol: f64) -> Result<ConicSolution> {
    ClarabelSolver::new(tol).solve(problem)
}
