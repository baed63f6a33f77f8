//! Term-level pins for the operator builders: the supercurrent components
//! at the chain edges and in the bulk, the hand-derived Pauli expansion of
//! the two-point product, and text round-trips against golden files.

use num_complex::Complex64;
use tcichain::model::{
    build_hamiltonian, build_supercharge, build_supercurrent, correlator_observable,
    BoundaryCondition, CorrelatorKind, ModelSpec, Sign, SupercurrentKind,
};
use tcichain::pauli::{Letter, Observable, PauliString, PauliTerm};

fn string(l: usize, letters: &[(usize, Letter)]) -> PauliString {
    let mut p = PauliString::identity(l);
    for &(site, letter) in letters {
        p.set(site, letter).unwrap();
    }
    p
}

/// The product `psi_1 psi_k` on an open chain with `lambda_i = 1` and
/// `3 < k < L`, written out string by string. Four strings are coupling
/// free, six carry one power of `lambda_3`, two carry `lambda_3^2`; the
/// cubic Majorana pieces reach one site past `k`, and the string through
/// site `k` drops out of those via `X_k^2 = 1`.
fn expected_product(l: usize, k: usize, l3: f64) -> Observable {
    use Letter::{X, Y, Z};
    let im = |x: f64| Complex64::new(0.0, x);
    let xr = |a: usize, b: usize| (a..=b).map(|m| (m, X)).collect::<Vec<_>>();
    let cat = |mut a: Vec<(usize, Letter)>, b: Vec<(usize, Letter)>| {
        a.extend(b);
        a
    };
    let mut terms = Vec::new();
    let mut push = |coeff: Complex64, letters: Vec<(usize, Letter)>| {
        terms.push(PauliTerm::new(coeff, string(l, &letters)));
    };

    push(im(1.0), cat(vec![(1, Y)], cat(xr(2, k - 1), vec![(k, Z)])));
    push(im(-1.0), cat(vec![(1, Z)], cat(xr(2, k - 1), vec![(k, Z)])));
    push(im(1.0), cat(vec![(1, Y)], cat(xr(2, k - 1), vec![(k, Y)])));
    push(im(-1.0), cat(vec![(1, Z)], cat(xr(2, k - 1), vec![(k, Y)])));
    push(
        im(l3 * l3),
        cat(vec![(1, X), (2, Y)], cat(xr(3, k - 2), vec![(k - 1, Y), (k, X)])),
    );
    push(
        im(l3 * l3),
        cat(vec![(1, X), (2, Y)], cat(xr(3, k - 1), vec![(k + 1, Z)])),
    );
    push(im(l3), cat(vec![(1, Y)], cat(xr(2, k - 2), vec![(k - 1, Y), (k, X)])));
    push(im(-l3), cat(vec![(1, Z)], cat(xr(2, k - 2), vec![(k - 1, Y), (k, X)])));
    push(im(l3), cat(vec![(1, Y)], cat(xr(2, k - 1), vec![(k + 1, Z)])));
    push(im(-l3), cat(vec![(1, Z)], cat(xr(2, k - 1), vec![(k + 1, Z)])));
    push(im(l3), cat(vec![(1, X), (2, Y)], cat(xr(3, k - 1), vec![(k, Z)])));
    push(im(l3), cat(vec![(1, X), (2, Y)], cat(xr(3, k - 1), vec![(k, Y)])));
    Observable::from_terms(l, terms).unwrap()
}

#[test]
fn bulk_correlator_expands_to_twelve_known_strings() {
    for &l3 in &[0.856, 0.3] {
        let spec = ModelSpec::new(8, 1.0, l3, BoundaryCondition::Open).unwrap();
        for k in 4..8 {
            let built = correlator_observable(CorrelatorKind::C, 1, k, &spec).unwrap();
            let expected = expected_product(8, k, l3);
            assert_eq!(built.num_terms(), 12, "k={k}");
            let diff = built.sub(&expected).unwrap().max_coeff();
            assert!(diff < 1e-12, "k={k} l3={l3}: max coefficient diff {diff:.3e}");
        }
    }
}

fn assert_terms(obs: &Observable, expected: &[(&str, f64)]) {
    let map = obs.term_map();
    assert_eq!(map.len(), expected.len(), "term count");
    for &(letters, coeff) in expected {
        let got = map
            .get(letters)
            .unwrap_or_else(|| panic!("missing term {letters}"));
        assert!(
            (got.re - coeff).abs() < 1e-12 && got.im.abs() < 1e-12,
            "{letters}: got {got}, want {coeff}"
        );
    }
}

#[test]
fn supercurrent_components_at_edges_and_bulk() {
    let spec = ModelSpec::tricritical(8, BoundaryCondition::Open).unwrap();
    let r = spec.lambda_3;
    let psi = |j| build_supercurrent(SupercurrentKind::Psi, j, &spec).unwrap();
    let g = |j| build_supercurrent(SupercurrentKind::G, j, &spec).unwrap();

    // Left edge: the Majorana index below the chain is dropped, leaving a
    // stringless three-term operator with all-real coefficients.
    assert_terms(&psi(1), &[("ZIIIIIII", 1.0), ("YIIIIIII", 1.0), ("IZIIIIII", r)]);
    assert_terms(&g(1), &[("ZIIIIIII", 1.0), ("YIIIIIII", -1.0), ("IZIIIIII", -r)]);

    // Bulk site: four terms, the cubic pieces reaching one site each way.
    assert_terms(
        &psi(2),
        &[("XZIIIIII", 1.0), ("XYIIIIII", 1.0), ("YXIIIIII", r), ("XIZIIIII", r)],
    );
    assert_terms(
        &g(2),
        &[("XZIIIIII", 1.0), ("XYIIIIII", -1.0), ("YXIIIIII", r), ("XIZIIIII", -r)],
    );

    // Right edge: the index above the chain is dropped.
    assert_terms(
        &psi(8),
        &[("XXXXXXXZ", 1.0), ("XXXXXXXY", 1.0), ("XXXXXXYX", r)],
    );
    assert_terms(
        &g(8),
        &[("XXXXXXXZ", 1.0), ("XXXXXXXY", -1.0), ("XXXXXXYX", r)],
    );
}

#[test]
fn observable_text_round_trips_through_golden_files() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let cases: [(&str, Observable); 3] = [
        (
            "hamiltonian_l4_tricritical_pbc.txt",
            build_hamiltonian(
                &ModelSpec::tricritical(4, BoundaryCondition::Periodic).unwrap(),
                false,
            )
            .unwrap(),
        ),
        (
            "correlator_c_1_5_l8_open.txt",
            correlator_observable(
                CorrelatorKind::C,
                1,
                5,
                &ModelSpec::tricritical(8, BoundaryCondition::Open).unwrap(),
            )
            .unwrap(),
        ),
        (
            "supercharge_plus_l6_pbc.txt",
            build_supercharge(
                Sign::Plus,
                &ModelSpec::tricritical(6, BoundaryCondition::Periodic).unwrap(),
            )
            .unwrap(),
        ),
    ];
    for (name, built) in &cases {
        let golden = std::fs::read_to_string(format!("{dir}/{name}")).unwrap();
        assert_eq!(&built.to_text(), &golden, "{name}: text drifted from golden file");
        let parsed = Observable::from_text(&golden).unwrap();
        let diff = built.sub(&parsed).unwrap().max_coeff();
        assert!(diff < 1e-15, "{name}: parsed copy differs by {diff:.3e}");
    }
}
