// The two supercharges square to the Hamiltonian plus its ground-state
// shift, exactly, on the periodic chain. This is the operator-level check
// that the Majorana bookkeeping (index wrapping, chain-end signs, term
// normalization) is right, so it runs over several sizes and couplings.

use tcichain::model::{
    build_hamiltonian_repr, BoundaryCondition, EnergyShift, ModelSpec, Representation, Sign,
};
use tcichain::model::build_supercharge;

fn main() -> tcichain::Result<()> {
    println!("supercharge square identity: Q+^2 + Q-^2 = H + E0");
    println!("{:>3} {:>9} {:>9} {:>12} {:>12}", "L", "li", "l3", "E0", "max residue");

    for l in [4, 6, 8] {
        for (li, l3) in [(1.0, 1.0), (1.0, 0.856)] {
            let spec = ModelSpec::new(l, li, l3, BoundaryCondition::Periodic)?;
            let qp = build_supercharge(Sign::Plus, &spec)?;
            let qm = build_supercharge(Sign::Minus, &spec)?;

            // the identity holds for the Majorana form of H; the spin-chain
            // form differs by boundary parity strings
            let h = build_hamiltonian_repr(&spec, false, Representation::Majorana)?;
            let e0 = EnergyShift::of(&spec)?.e0;

            let square = qp.mul(&qp)?.add(&qm.mul(&qm)?)?;
            let residue = square
                .sub(&h)?
                .sub(&tcichain::pauli::Observable::identity_times(l, e0.into()))?;

            println!(
                "{l:>3} {li:>9.3} {l3:>9.3} {e0:>12.6} {:>12.3e}",
                residue.max_coeff()
            );
            assert!(residue.max_coeff() < 1e-10, "identity violated");
        }
    }
    println!("all residues below 1e-10");
    Ok(())
}
