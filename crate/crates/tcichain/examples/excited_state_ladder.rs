// Excited states by deflation: each rung minimizes the energy plus
// overlap penalties against the states already found, using the adjoint
// gradient settings. The circuit is translation invariant and starts from
// the uniform superposition, so it can only ever produce zero-momentum
// states; the ladder walks the k = 0 tower and skips the finite-momentum
// levels in between. The first three levels of the periodic chain all have
// k = 0, which is why the R2 gap ratio comes out of a four-rung ladder
// while R3 (whose numerator state carries k != 0) does not.

use num_complex::Complex64;
use tcichain::exact::{eigensolve, gap_ratios, parity_resolved};
use tcichain::model::{build_hamiltonian, BoundaryCondition, ModelSpec};
use tcichain::vqe::{deflation_ladder, CircuitShape, OptOptions};

/// Eigenvalue of the one-site translation, `cos k` for a momentum
/// eigenstate.
fn translation_overlap(amps: &[Complex64], l: usize) -> f64 {
    let dim = 1usize << l;
    let mut ip = Complex64::new(0.0, 0.0);
    for s in 0..dim {
        let t = ((s << 1) | (s >> (l - 1))) & (dim - 1);
        ip += amps[t].conj() * amps[s];
    }
    ip.re
}

fn main() -> tcichain::Result<()> {
    let spec = ModelSpec::tricritical(5, BoundaryCondition::Periodic)?;
    let h = build_hamiltonian(&spec, false)?;
    let exact = eigensolve(&h, true)?;

    println!("L = {}, periodic; lowest exact levels:", spec.l);
    println!("{:>5} {:>14} {:>8}", "level", "E", "<T>");
    for k in 0..8 {
        let state = exact.state(k)?;
        println!(
            "{k:>5} {:>14.10} {:>8.4}",
            exact.values[k],
            translation_overlap(state.amplitudes(), spec.l)
        );
    }

    let shape = CircuitShape::new(spec.l, spec.bc, spec.l + 1)?;
    let rungs = deflation_ladder(&h, &shape, 4, None, &OptOptions::for_ladder())?;

    println!("\nfour-rung ladder, M = {}:", spec.l + 1);
    println!("{:>5} {:>14} {:>14} {:>10} {:>8}", "rung", "E", "matches", "overlap", "evals");
    for (k, rung) in rungs.iter().enumerate() {
        // best-overlap exact level; degenerate finite-momentum pairs make
        // a fixed-index comparison meaningless
        let mut best = (0, 0.0);
        for cand in 0..16.min(exact.values.len()) {
            let o = rung.state.overlap(&exact.state(cand)?)?.norm();
            if o > best.1 {
                best = (cand, o);
            }
        }
        println!(
            "{k:>5} {:>14.10} {:>14.10} {:>10.6} {:>8}",
            rung.energy, exact.values[best.0], best.1, rung.result.evaluations
        );
    }

    let e: Vec<f64> = rungs.iter().map(|r| r.energy).collect();
    let [even, odd] = parity_resolved(&h, false)?;
    let reference = gap_ratios(&even.values, &odd.values)?;
    println!("\nR2: ladder {:.6}  exact {:.6}", (e[1] - e[0]) / (e[2] - e[0]), reference.r2);
    println!("(R3 needs the k != 0 level the uniform circuit cannot reach)");
    Ok(())
}
