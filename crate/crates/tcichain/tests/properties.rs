//! Randomized invariants of the Pauli algebra, the simulator, and the
//! analysis helpers, checked against brute-force alternatives where one
//! exists. Tolerances are loose enough that uniform-random coefficients
//! cannot produce accidental cancellation at the comparison scale.

use num_complex::Complex64;
use proptest::prelude::*;
use tcichain::analysis::{basis_probabilities, fit_power_law, mutual_information};
use tcichain::exact::{eigensolve, entanglement_entropy, parity_resolved, reduced_density};
use tcichain::model::{
    build_hamiltonian, correlator_observable, BoundaryCondition, CorrelatorKind, ModelSpec,
};
use tcichain::pauli::{pauli_mul, Letter, Observable, PauliString, PauliTerm};
use tcichain::rng::{derive, streams};
use tcichain::sim::{
    apply_ansatz, expectation, measure, rotate_to_basis, AnsatzParams, CountsTable,
    MeasurementBasis, StateVector,
};
use tcichain::vqe::{CircuitShape, Cost};

const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0..4usize, n).prop_map(move |ls| {
        let mut p = PauliString::identity(n);
        for (j, &i) in ls.iter().enumerate() {
            p.set(j + 1, LETTERS[i]).unwrap();
        }
        p
    })
}

fn observable(n: usize) -> impl Strategy<Value = Observable> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, pauli_string(n)), 1..6).prop_map(
        move |ts| {
            Observable::from_terms(
                n,
                ts.into_iter().map(|(re, im, s)| PauliTerm::new(Complex64::new(re, im), s)),
            )
            .unwrap()
        },
    )
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1usize << n).prop_filter_map(
        "norm too small",
        move |amps| {
            let v: Vec<Complex64> = amps.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let mut s = StateVector::from_amplitudes(n, v).ok()?;
            s.normalize().ok()?;
            Some(s)
        },
    )
}

fn boundary(per: bool) -> BoundaryCondition {
    if per {
        BoundaryCondition::Periodic
    } else {
        BoundaryCondition::Open
    }
}

fn single(n: usize, s: PauliString) -> Observable {
    Observable::from_terms(n, [PauliTerm::new(Complex64::new(1.0, 0.0), s)]).unwrap()
}

proptest! {
    /// `pauli_mul` against operator composition: applying the canonical
    /// product (with its phase) to a state equals applying the factors in
    /// sequence.
    #[test]
    fn string_product_matches_action_composition(
        (p, q, v) in (1..=5usize).prop_flat_map(|n| (pauli_string(n), pauli_string(n), state(n)))
    ) {
        let n = v.num_sites();
        let (phase, r) = pauli_mul(&p, &q).unwrap();
        let composed = single(n, p).apply(&single(n, q).apply(v.amplitudes()));
        let direct = single(n, r).apply(v.amplitudes());
        for (a, b) in direct.iter().zip(&composed) {
            prop_assert!((a * phase - b).norm() < 1e-12);
        }
    }

    /// Rebuilding an observable from its own canonical terms reproduces the
    /// text byte for byte; term order on input is irrelevant; duplicate
    /// strings merge additively.
    #[test]
    fn canonical_form_is_stable_and_order_free(
        (n, terms) in (1..=4usize).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, pauli_string(n)), 1..7))
        })
    ) {
        let make = |ts: Vec<(f64, f64, PauliString)>| {
            Observable::from_terms(
                n,
                ts.into_iter().map(|(re, im, s)| PauliTerm::new(Complex64::new(re, im), s)),
            )
            .unwrap()
        };
        let a = make(terms.clone());
        let rebuilt = Observable::from_terms(n, a.terms().to_vec()).unwrap();
        prop_assert_eq!(a.to_text(), rebuilt.to_text());

        let mut rev = terms.clone();
        rev.reverse();
        prop_assert!(a.sub(&make(rev)).unwrap().max_coeff() < 1e-9);

        let doubled = make(terms.iter().cloned().chain(terms.iter().cloned()).collect());
        let diff = doubled.sub(&a.scale(Complex64::new(2.0, 0.0))).unwrap().max_coeff();
        prop_assert!(diff < 1e-9);
    }

    /// Dense assembly commutes with scaling and addition.
    #[test]
    fn dense_assembly_is_linear(
        (n, a, b, x, y) in (1..=4usize).prop_flat_map(|n| {
            (Just(n), observable(n), observable(n), -2.0..2.0f64, -2.0..2.0f64)
        })
    ) {
        let ca = Complex64::new(x, 0.3 * y);
        let cb = Complex64::new(y, -0.7 * x);
        let lhs = a.scale(ca).add(&b.scale(cb)).unwrap().to_dense().unwrap();
        let da = a.to_dense().unwrap();
        let db = b.to_dense().unwrap();
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (ca * da[i] + cb * db[i])).norm() < 1e-9);
        }
    }

    /// Every layered circuit is a unitary on the normalized start state.
    #[test]
    fn layered_circuit_preserves_norm(
        (l, per, flat) in (2..=5usize, 1..=3usize, any::<bool>()).prop_flat_map(|(l, d, per)| {
            (Just(l), Just(per), prop::collection::vec(-3.2..3.2f64, 3 * d - 1))
        })
    ) {
        let params = AnsatzParams::from_flat(&flat).unwrap();
        let out = apply_ansatz(l, boundary(per), &params);
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    /// Two measurement passes from the same derived stream give identical
    /// counts, and the table survives its own CSV encoding.
    #[test]
    fn sampling_is_reproducible_and_round_trips(
        (v, li, shots, seed) in (1..=5usize).prop_flat_map(|n| {
            (state(n), 1..4usize, 100..2000u64, any::<u64>())
        })
    ) {
        let n = v.num_sites();
        let basis = MeasurementBasis::uniform(n, LETTERS[li]).unwrap();
        let mut r1 = derive(seed, streams::SAMPLING);
        let c1 = measure(&v, &basis, shots, seed, &mut r1).unwrap();
        let mut r2 = derive(seed, streams::SAMPLING);
        let c2 = measure(&v, &basis, shots, seed, &mut r2).unwrap();
        prop_assert_eq!(c1.to_csv(), c2.to_csv());
        let back = CountsTable::from_csv(&c1.to_csv()).unwrap();
        prop_assert_eq!(back.to_csv(), c1.to_csv());
        prop_assert_eq!(back.total(), shots);
    }

    /// Subadditivity: the two-block mutual information of any distribution
    /// is nonnegative at every cut.
    #[test]
    fn mutual_information_is_nonnegative(
        (n, raw) in (2..=6usize).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(0.0..1.0f64, 1usize << n))
        })
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        for ell in 1..n {
            let i = mutual_information(&probs, n, ell, None).unwrap();
            prop_assert!(i > -1e-10, "I({}) = {}", ell, i);
        }
    }

    /// The two sides of any cut through a pure state carry equal entropy,
    /// and keeping every site returns the rank-one projector on the state.
    #[test]
    fn pure_state_entropy_is_complement_symmetric(
        v in (2..=5usize).prop_flat_map(state)
    ) {
        let n = v.num_sites();
        for ell in 1..n {
            let s = entanglement_entropy(&v, ell).unwrap();
            let left = reduced_density(&v, 1, ell).unwrap().entropy().unwrap();
            let right = reduced_density(&v, ell + 1, n).unwrap().entropy().unwrap();
            prop_assert!((left - right).abs() < 1e-9, "cut {}: {} vs {}", ell, left, right);
            prop_assert!((s - left).abs() < 1e-9, "cut {}: {} vs {}", ell, s, left);
        }
        let rho = reduced_density(&v, 1, n).unwrap();
        prop_assert!(rho.entropy().unwrap() < 1e-8);
        let dim = rho.dim();
        for c in 0..dim {
            for r in 0..dim {
                let want = v.amplitudes()[r] * v.amplitudes()[c].conj();
                prop_assert!((rho.data[c * dim + r] - want).norm() < 1e-10);
            }
        }
    }

    /// The closed-form basis distribution agrees with rotating the state
    /// and reading squared amplitudes.
    #[test]
    fn basis_probabilities_match_rotated_amplitudes(
        (v, li) in (1..=5usize).prop_flat_map(|n| (state(n), 1..4usize))
    ) {
        let n = v.num_sites();
        let letter = LETTERS[li];
        let direct = basis_probabilities(&v, letter).unwrap();
        let basis = MeasurementBasis::uniform(n, letter).unwrap();
        let mut rot = v.clone();
        rotate_to_basis(&mut rot, &basis).unwrap();
        for (s, &p) in direct.iter().enumerate() {
            prop_assert!((p - rot.amplitudes()[s].norm_sqr()).abs() < 1e-10);
        }
    }

    /// On exact power-law data the fit recovers the exponent regardless of
    /// overall sign, and rescaling values moves only the amplitude.
    #[test]
    fn power_law_fit_recovers_and_scales(
        (e, amp, s, flip) in (-3.0..-0.5f64, 0.1..5.0f64, 0.2..4.0f64, any::<bool>())
    ) {
        let sign = if flip { -1.0 } else { 1.0 };
        let series: Vec<(usize, f64)> =
            (1..=7).map(|r| (r, sign * amp * (r as f64).powf(e))).collect();
        let fit = fit_power_law(&series, None).unwrap();
        prop_assert!((fit.exponent - e).abs() < 1e-9);
        prop_assert!((fit.log_amplitude - amp.ln()).abs() < 1e-9);
        let scaled: Vec<(usize, f64)> = series.iter().map(|&(r, v)| (r, s * v)).collect();
        let fit2 = fit_power_law(&scaled, None).unwrap();
        prop_assert!((fit2.exponent - fit.exponent).abs() < 1e-9);
        prop_assert!((fit2.log_amplitude - (fit.log_amplitude + s.ln())).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// No parameter assignment beats the exact ground energy, and the cost
    /// value agrees with an explicit expectation on the prepared state.
    #[test]
    fn variational_energy_respects_ground_floor(
        (l, per, li, l3, flat) in
            (3..=5usize, 1..=3usize, any::<bool>(), 0.25..2.0f64, 0.05..2.0f64).prop_flat_map(
                |(l, d, per, li, l3)| {
                    (Just(l), Just(per), Just(li), Just(l3),
                     prop::collection::vec(-3.2..3.2f64, 3 * d - 1))
                },
            )
    ) {
        let bc = boundary(per);
        let spec = ModelSpec::new(l, li, l3, bc).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let exact = eigensolve(&h, false).unwrap();
        let depth = (flat.len() + 1) / 3;
        let shape = CircuitShape::new(l, bc, depth).unwrap();
        let cost = Cost::Energy { h: h.clone() };
        let v = cost.value(&shape, &flat).unwrap();
        prop_assert!(v >= exact.values[0] - 1e-9, "{} below ground {}", v, exact.values[0]);
        let prepared = cost.prepare(&shape, &flat).unwrap();
        prop_assert!((v - expectation(&h, &prepared).unwrap()).abs() < 1e-9);
    }

    /// The overlap cost is exactly one minus the overlap magnitude with the
    /// prepared state.
    #[test]
    fn overlap_cost_matches_prepared_state(
        (l, per, target, flat) in (2..=4usize, 1..=2usize, any::<bool>()).prop_flat_map(
            |(l, d, per)| {
                (Just(l), Just(per), state(l), prop::collection::vec(-3.2..3.2f64, 3 * d - 1))
            },
        )
    ) {
        let bc = boundary(per);
        let depth = (flat.len() + 1) / 3;
        let shape = CircuitShape::new(l, bc, depth).unwrap();
        let cost = Cost::Infidelity { target: target.clone() };
        let v = cost.value(&shape, &flat).unwrap();
        let prepared = cost.prepare(&shape, &flat).unwrap();
        let o = target.overlap(&prepared).unwrap().norm();
        prop_assert!((v - (1.0 - o)).abs() < 1e-10);
    }

    /// Solving the two spin-flip sectors separately and pooling the levels
    /// reproduces the unrestricted spectrum.
    #[test]
    fn parity_sectors_merge_into_full_spectrum(
        (l, per, li, l3) in (3..=5usize, any::<bool>(), 0.25..2.0f64, 0.05..2.0f64)
    ) {
        let spec = ModelSpec::new(l, li, l3, boundary(per)).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let full = eigensolve(&h, false).unwrap();
        let [even, odd] = parity_resolved(&h, false).unwrap();
        let mut merged: Vec<f64> =
            even.values.iter().chain(odd.values.iter()).copied().collect();
        merged.sort_by(f64::total_cmp);
        prop_assert_eq!(merged.len(), full.values.len());
        for (a, b) in merged.iter().zip(&full.values) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
        }
    }
}

/// Shifting both insertion points one site around the ring leaves the
/// ground-state correlator unchanged, for pairs whose fermion strings stay
/// clear of the wrap. A current at site `j` reaches Majorana indices
/// `2j-2..=2j+1`, so `2..=L-2` keeps both the operator and its shifted copy
/// inside the chain; currents touching the seam translate into
/// parity-dressed operators instead and are excluded.
#[test]
fn ring_correlators_are_translation_covariant_in_the_bulk() {
    let l = 8;
    let spec = ModelSpec::tricritical(l, BoundaryCondition::Periodic).unwrap();
    let h = build_hamiltonian(&spec, false).unwrap();
    let exact = eigensolve(&h, true).unwrap();
    let ground = exact.state(0).unwrap();
    for kind in [CorrelatorKind::C, CorrelatorKind::D] {
        for j in 2..=l - 2 {
            for k in 2..=l - 2 {
                if j == k {
                    continue;
                }
                let a = correlator_observable(kind, j, k, &spec).unwrap();
                let b = correlator_observable(kind, j + 1, k + 1, &spec).unwrap();
                let va = a.expectation_complex(ground.amplitudes());
                let vb = b.expectation_complex(ground.amplitudes());
                assert!(
                    (va - vb).norm() < 1e-9,
                    "{kind:?} ({j},{k}) -> ({},{}): {va} vs {vb}",
                    j + 1,
                    k + 1
                );
            }
        }
    }
}
