//! A feasible all-ICEB starting plan.

use super::TransformationModel;

/// Every sequence is served by the full-life ICEB type, missing buses are
/// bought when needed, and no charging infrastructure is built. Energy
/// columns stay at zero.
pub fn iceb_start(model: &TransformationModel) -> Vec<f64> {
    let problem = &model.problem;
    let vars = &model.vars;
    let k = problem.initial_type;
    let h = problem.types.types[k].holding_period_years;
    let need = problem.num_sequences() as f64;
    let mut values = vec![0.0; vars.len()];

    let mut held = problem.initial_fleet_size() as f64;
    for t in vars.periods() {
        held -= problem.initial_retirements(t) as f64;
        if t > h {
            held -= values[vars.purchase(k, t - h)];
        }
        let buy = (need - held).max(0.0);
        values[vars.purchase(k, t)] = buy;
        held += buy;
        values[vars.stock(k, t)] = held;

        for s in 0..problem.num_sequences() {
            values[vars.assign(s, k, t)] = 1.0;
        }
    }
    values
}
