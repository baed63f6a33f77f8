// Variational ground-state preparation with the three-angle layered
// ansatz, optimized layer by layer under the stock simplex settings. The
// run reports both cost flavors: energy minimization and direct overlap
// against the exact ground state.

use tcichain::exact::parity_resolved;
use tcichain::model::{build_hamiltonian, BoundaryCondition, ModelSpec};
use tcichain::vqe::{minimize_layered, CircuitShape, Cost, OptOptions};

fn main() -> tcichain::Result<()> {
    let spec = ModelSpec::tricritical(5, BoundaryCondition::Open)?;
    let h = build_hamiltonian(&spec, false)?;
    let [even, odd] = parity_resolved(&h, true)?;
    let sector = if even.values[0] <= odd.values[0] { &even } else { &odd };
    let e0 = sector.values[0];
    let ground = sector.state(0)?;

    let depth = spec.l + 1; // open boundaries want one extra layer
    let shape = CircuitShape::new(spec.l, spec.bc, depth)?;
    let opts = OptOptions::default();
    println!("L = {}, open, M = {depth}, exact E0 = {e0:.10}", spec.l);

    let energy_cost = Cost::Energy { h };
    let r = minimize_layered(&energy_cost, &shape, &opts)?;
    let state = energy_cost.prepare(&shape, &r.params)?;
    println!("\nenergy cost:");
    println!("  optimized energy   {:.10}", r.cost);
    println!("  excess density     {:.3e}", (r.cost - e0) / spec.l as f64);
    println!("  overlap with exact {:.6}", state.overlap(&ground)?.norm());
    println!("  evaluations        {}", r.evaluations);

    let overlap_cost = Cost::Infidelity { target: ground };
    let r = minimize_layered(&overlap_cost, &shape, &opts)?;
    println!("\noverlap cost:");
    println!("  final infidelity   {:.3e}", r.cost);
    println!("  evaluations        {}", r.evaluations);
    Ok(())
}
