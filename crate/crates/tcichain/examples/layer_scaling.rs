// How many ansatz layers does the ground state need? Scan depth with the
// warm-start ladder against the exact state and report the first depth
// whose infidelity clears 1 - 0.99. The threshold depth tracks the chain
// length: M = L with periodic boundaries, one more with open ends.

use tcichain::exact::parity_resolved;
use tcichain::model::{build_hamiltonian, BoundaryCondition, ModelSpec};
use tcichain::vqe::{layer_scaling, minimal_depth, CircuitShape, OptOptions};

fn main() -> tcichain::Result<()> {
    let opts = OptOptions::default();
    let target = 0.99;
    println!("fidelity target {target}");

    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Open] {
        println!("\n{bc:?} boundaries:");
        println!("{:>4} {:>6} {:>14} {:>14}", "L", "M*", "infidelity(M*)", "evals(total)");
        for l in [4, 5, 6] {
            let spec = ModelSpec::tricritical(l, bc)?;
            let h = build_hamiltonian(&spec, false)?;
            let [even, odd] = parity_resolved(&h, true)?;
            let sector = if even.values[0] <= odd.values[0] { &even } else { &odd };
            let ground = sector.state(0)?;

            let ceiling = l + if bc.is_periodic() { 2 } else { 3 };
            let template = CircuitShape::new(l, bc, 1)?;
            let points = layer_scaling(&h, &ground, sector.values[0], &template, ceiling, &opts)?;
            let total: u64 = points.iter().map(|p| p.evaluations).sum();
            match minimal_depth(&points, 1.0 - target) {
                Some(m) => {
                    let at = &points[m - 1];
                    println!("{l:>4} {m:>6} {:>14.3e} {total:>14}", at.infidelity);
                }
                None => println!("{l:>4} {:>6} within depth {ceiling}: not reached", "-"),
            }
        }
    }
    Ok(())
}
