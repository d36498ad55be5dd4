use crate::lp::VariableId;
use crate::network::{heat_bus_id, supply_bus_id, FlowKind, HeatCircuit, ModelBuilder, NetworkError};

/// Emit the rise cascade and lossless downshifts of one heat circuit.
///
/// Lifting `L` watts into level `n` consumes `r·L` of fresh supply at `n`
/// and `(1 − r)·L` of heat already held at level `n − 1`, with
/// `r = (T_n − T_{n−1}) / (T_n − T_0)`. Heat at level `n` may always be
/// moved to level `n − 1` without loss.
pub fn emit_rise_cascade(b: &mut ModelBuilder<'_>, circuit: &HeatCircuit) -> Result<(), NetworkError> {
    let k = circuit.ladder.len();
    if k < 2 {
        return Err(NetworkError::Component { context: circuit.id.clone(), message: "ladder needs at least 2 levels".into() });
    }
    let steps = b.steps();
    for n in 1..k {
        let r = circuit
            .ladder
            .ratio(n, n - 1)
            .map_err(|source| NetworkError::Thermo { context: circuit.id.clone(), source })?;
        let heat = b.bus(&circuit.id, &heat_bus_id(&circuit.id, n))?;
        let supply = b.bus(&circuit.id, &supply_bus_id(&circuit.id, n))?;
        let below = if n >= 2 { Some(b.bus(&circuit.id, &heat_bus_id(&circuit.id, n - 1))?) } else { None };
        let mut lifts: Vec<VariableId> = Vec::with_capacity(steps);
        for t in 0..steps {
            let v = b.variable(format!("lift_{}_l{n}_t{t}", circuit.id), 0.0, f64::INFINITY)?;
            b.tap(heat, t, v, 1.0);
            b.tap(supply, t, v, -r);
            if let Some(below) = below {
                b.tap(below, t, v, -(1.0 - r));
            }
            lifts.push(v);
        }
        b.record_plain(format!("{}_lift_l{n}", circuit.id), FlowKind::Transfer, &lifts);
        if let Some(below) = below {
            let mut downs = Vec::with_capacity(steps);
            for t in 0..steps {
                let v = b.variable(format!("down_{}_l{n}_t{t}", circuit.id), 0.0, f64::INFINITY)?;
                b.tap(heat, t, v, -1.0);
                b.tap(below, t, v, 1.0);
                downs.push(v);
            }
            b.record_plain(format!("{}_down_l{n}", circuit.id), FlowKind::Transfer, &downs);
        }
    }
    Ok(())
}
