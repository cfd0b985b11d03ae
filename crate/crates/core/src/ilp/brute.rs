use super::{IlpError, IlpModel, IlpSolution, SolveStatus, FLOAT_TOLERANCE};

pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Enumerates every assignment. Among optimal assignments the
/// lexicographically smallest one (variable 0 most significant, false
/// before true) is returned.
pub fn brute_force(model: &IlpModel) -> Result<IlpSolution, IlpError> {
    model.validate()?;
    let n = model.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(IlpError::TooLarge {
            vars: n,
            limit: BRUTE_FORCE_MAX_VARS,
        });
    }
    let integral = model.is_integral();
    let mut best: Option<(Vec<bool>, f64, Option<i64>)> = None;
    let mut assignment = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (v, slot) in assignment.iter_mut().enumerate() {
            *slot = (mask >> (n - 1 - v)) & 1 == 1;
        }
        if !model.is_feasible(&assignment) {
            continue;
        }
        let value = model.evaluate(&assignment);
        let exact = integral.then(|| {
            model.objective_constant as i64
                + model
                    .objective
                    .iter()
                    .filter(|(v, _)| assignment[*v])
                    .map(|(_, c)| *c as i64)
                    .sum::<i64>()
        });
        let better = match &best {
            None => true,
            Some((_, bv, bi)) => match (integral, exact, bi) {
                (true, Some(e), Some(b)) => e > *b,
                _ => value > bv + FLOAT_TOLERANCE,
            },
        };
        if better {
            best = Some((assignment.clone(), value, exact));
        }
    }
    best.map(|(assignment, objective_value, objective_int)| IlpSolution {
        assignment,
        objective_value,
        objective_int,
        status: SolveStatus::Optimal,
    })
    .ok_or(IlpError::Infeasible)
}
