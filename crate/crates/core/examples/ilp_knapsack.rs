//! The binary program solver on its own: a small knapsack with a conflict.

use qdmr_dg::ilp::{brute_force, solve, IlpModel, Sense, SolverConfig};

fn main() -> anyhow::Result<()> {
    let items = [("tent", 5.0, 4.0), ("stove", 4.0, 3.0), ("book", 2.0, 1.0), ("camera", 6.0, 5.0)];
    let mut m = IlpModel::new();
    let vars: Vec<usize> = items.iter().map(|(name, ..)| m.add_var(*name)).collect();
    for (&v, (_, value, _)) in vars.iter().zip(&items) {
        m.add_objective(v, *value);
    }
    let weights = vars.iter().zip(&items).map(|(&v, (_, _, w))| (v, *w)).collect();
    m.add_constraint("capacity", weights, Sense::Le, 8.0);
    m.add_constraint("tent or camera", vec![(vars[0], 1.0), (vars[3], 1.0)], Sense::Le, 1.0);

    let sol = solve(&m, &SolverConfig::default())?;
    let packed: Vec<&str> = vars.iter().filter(|&&v| sol.value(v)).map(|&v| m.vars[v].as_str()).collect();
    println!("{:?}: value {} with {packed:?}", sol.status, sol.objective_value);
    let check = brute_force(&m)?;
    println!("enumeration agrees: {}", check.objective_value == sol.objective_value);
    Ok(())
}
