// Print the lattice supercurrent components as Pauli strings, and the
// two-current correlator they generate. Useful for eyeballing how the
// Majorana products collapse: psi_j stays three-local, the correlator
// grows a Z string between its endpoints.

use tcichain::model::{
    build_supercurrent, correlator_observable, BoundaryCondition, CorrelatorKind, ModelSpec,
    SupercurrentKind,
};

fn main() -> tcichain::Result<()> {
    let spec = ModelSpec::tricritical(8, BoundaryCondition::Open)?;
    println!("chain: L = {}, lambda_3/lambda_i = {}", spec.l, spec.lambda_3 / spec.lambda_i);

    for (kind, name) in [(SupercurrentKind::Psi, "psi"), (SupercurrentKind::G, "g")] {
        println!("\n{name}_j components:");
        for j in [1, 2, 3] {
            let op = build_supercurrent(kind, j, &spec)?;
            println!("  {name}_{j} = {}", op.to_text().replace('\n', "  "));
        }
    }

    println!("\ncorrelator expansions C_1k = psi_1 psi_k:");
    for k in [4, 6] {
        let c = correlator_observable(CorrelatorKind::C, 1, k, &spec)?;
        println!("  C_1{k} ({} strings):", c.num_terms());
        for line in c.to_text().lines() {
            println!("    {line}");
        }
    }
    Ok(())
}
