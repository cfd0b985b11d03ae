//! A small exact solver for pure binary linear programs.
//!
//! Models maximize a linear objective over 0/1 variables subject to linear
//! rows. The solver is a depth-first branch and bound with bound
//! propagation; it runs in exact integer arithmetic whenever every
//! coefficient is integral and in floating point with a fixed tolerance
//! otherwise. [`brute_force`] enumerates every assignment and serves as the
//! reference for tests.

mod brute;
mod solver;

pub use brute::{brute_force, BRUTE_FORCE_MAX_VARS};
pub use solver::solve;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Feasibility tolerance used when the model has fractional coefficients.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, assignment: &[bool]) -> f64 {
        self.coeffs
            .iter()
            .filter(|(v, _)| assignment[*v])
            .map(|(_, a)| a)
            .sum()
    }
}

/// A maximization problem over binary variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IlpModel {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    /// Added to every objective value; does not influence the search.
    pub objective_constant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Proven optimal.
    Optimal,
    /// The time limit was hit; the assignment is the best one found.
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlpSolution {
    pub assignment: Vec<bool>,
    pub objective_value: f64,
    /// The objective in exact arithmetic, when every coefficient is integral.
    pub objective_int: Option<i64>,
    pub status: SolveStatus,
}

impl IlpSolution {
    pub fn value(&self, var: usize) -> bool {
        self.assignment[var]
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum IlpError {
    #[error("the model has no feasible assignment")]
    Infeasible,
    #[error("time limit reached before any feasible assignment was found")]
    TimeoutWithoutIncumbent,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("{vars} variables exceed the enumeration limit of {limit}")]
    TooLarge { vars: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub time_limit_ms: u64,
    /// Accepted for interface stability; the search is fully deterministic.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit_ms: 10_000,
            seed: 0,
        }
    }
}

/// Largest magnitude for which integer arithmetic is used.
const INTEGRAL_LIMIT: f64 = (1u64 << 52) as f64;

impl IlpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(name.into());
        self.vars.len() - 1
    }

    /// Adds `coef` to the objective coefficient of `var`.
    pub fn add_objective(&mut self, var: usize, coef: f64) {
        if coef != 0.0 {
            self.objective.push((var, coef));
        }
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<(), IlpError> {
        let n = self.vars.len();
        for (v, c) in &self.objective {
            if *v >= n {
                return Err(IlpError::InvalidModel(format!("objective uses undeclared variable {v}")));
            }
            if !c.is_finite() {
                return Err(IlpError::InvalidModel(format!("objective coefficient of {} is not finite", self.vars[*v])));
            }
        }
        if !self.objective_constant.is_finite() {
            return Err(IlpError::InvalidModel("objective constant is not finite".into()));
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() {
                return Err(IlpError::InvalidModel(format!("row {} has a non-finite right-hand side", c.name)));
            }
            for (v, a) in &c.coeffs {
                if *v >= n {
                    return Err(IlpError::InvalidModel(format!("row {} uses undeclared variable {v}", c.name)));
                }
                if !a.is_finite() {
                    return Err(IlpError::InvalidModel(format!("row {} has a non-finite coefficient", c.name)));
                }
            }
        }
        Ok(())
    }

    /// True when every coefficient and right-hand side is a modest integer,
    /// so the model can be solved in exact arithmetic.
    pub fn is_integral(&self) -> bool {
        let ok = |x: f64| x.fract() == 0.0 && x.abs() < INTEGRAL_LIMIT;
        let obj_mass: f64 = self.objective.iter().map(|(_, c)| c.abs()).sum::<f64>() + self.objective_constant.abs();
        obj_mass < INTEGRAL_LIMIT
            && ok(self.objective_constant)
            && self.objective.iter().all(|(_, c)| ok(*c))
            && self.constraints.iter().all(|c| {
                ok(c.rhs)
                    && c.coeffs.iter().all(|(_, a)| ok(*a))
                    && c.coeffs.iter().map(|(_, a)| a.abs()).sum::<f64>() < INTEGRAL_LIMIT
            })
    }

    pub fn evaluate(&self, assignment: &[bool]) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .filter(|(v, _)| assignment[*v])
                .map(|(_, c)| c)
                .sum::<f64>()
    }

    pub fn evaluate_int(&self, assignment: &[bool]) -> Option<i64> {
        if !self.is_integral() {
            return None;
        }
        Some(
            self.objective_constant as i64
                + self
                    .objective
                    .iter()
                    .filter(|(v, _)| assignment[*v])
                    .map(|(_, c)| *c as i64)
                    .sum::<i64>(),
        )
    }

    /// Names of the rows the assignment violates. Integral rows are checked
    /// exactly, others with [`FLOAT_TOLERANCE`].
    pub fn violations(&self, assignment: &[bool]) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.constraints {
            let integral = c.rhs.fract() == 0.0 && c.coeffs.iter().all(|(_, a)| a.fract() == 0.0);
            let ok = if integral {
                let act: i64 = c
                    .coeffs
                    .iter()
                    .filter(|(v, _)| assignment[*v])
                    .map(|(_, a)| *a as i64)
                    .sum();
                let rhs = c.rhs as i64;
                match c.sense {
                    Sense::Le => act <= rhs,
                    Sense::Ge => act >= rhs,
                    Sense::Eq => act == rhs,
                }
            } else {
                let act = c.activity(assignment);
                match c.sense {
                    Sense::Le => act <= c.rhs + FLOAT_TOLERANCE,
                    Sense::Ge => act >= c.rhs - FLOAT_TOLERANCE,
                    Sense::Eq => (act - c.rhs).abs() <= FLOAT_TOLERANCE,
                }
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }

    pub fn is_feasible(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.vars.len() && self.violations(assignment).is_empty()
    }

    /// Plain-text dump in the common LP file layout, for cross-checking with
    /// external solvers.
    pub fn to_lp_string(&self) -> String {
        let name = |v: usize| lp_name(&self.vars[v], v);
        let terms = |coeffs: &[(usize, f64)]| -> String {
            if coeffs.is_empty() {
                return "0".to_string();
            }
            let mut s = String::new();
            for (k, (v, c)) in coeffs.iter().enumerate() {
                let sign = match (k, *c < 0.0) {
                    (0, true) => "-",
                    (0, false) => "",
                    (_, true) => " - ",
                    (_, false) => " + ",
                };
                let _ = write!(s, "{sign}{} {}", fmt_num(c.abs()), name(*v));
            }
            s
        };
        let mut out = String::new();
        out.push_str("Maximize\n");
        let _ = writeln!(out, " obj: {}", terms(&self.objective));
        if self.objective_constant != 0.0 {
            let _ = writeln!(out, "\\ constant {}", fmt_num(self.objective_constant));
        }
        out.push_str("Subject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let label = if c.name.is_empty() { format!("r{i}") } else { lp_name(&c.name, i) };
            let _ = writeln!(out, " {label}: {} {} {}", terms(&c.coeffs), c.sense.symbol(), fmt_num(c.rhs));
        }
        out.push_str("Binary\n");
        for v in 0..self.vars.len() {
            let _ = writeln!(out, " {}", name(v));
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn lp_name(raw: &str, index: usize) -> String {
    let cleaned: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if cleaned.is_empty() || cleaned.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        format!("v{index}_{cleaned}")
    } else {
        cleaned
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_dump_lists_rows_and_binaries() {
        let mut m = IlpModel::new();
        let a = m.add_var("x[0]");
        let b = m.add_var("y");
        m.add_objective(a, 2.0);
        m.add_objective(b, -1.5);
        m.add_constraint("pick", vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0);
        let lp = m.to_lp_string();
        assert!(lp.contains("obj: 2 x_0_ - 1.5 y"));
        assert!(lp.contains("pick: 1 x_0_ + 1 y <= 1"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn integrality_detection() {
        let mut m = IlpModel::new();
        let a = m.add_var("a");
        m.add_objective(a, 3.0);
        assert!(m.is_integral());
        m.add_objective(a, 0.5);
        assert!(!m.is_integral());
    }
}
