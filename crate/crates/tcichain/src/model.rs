//! Operator builders for the chain: the transverse-field Ising part, the
//! three-spin deformation, their sum, supercharges, supercurrents, and
//! supercurrent correlator operators.
//!
//! Two interchangeable representations exist for the Hamiltonian pieces. The
//! spin form writes the terms directly in Pauli letters with site indices
//! wrapped modulo L. The Majorana form substitutes the Jordan-Wigner images
//! and wraps *Majorana* indices modulo 2L. For open boundaries the two are
//! identical operators. On a ring they differ by a boundary term carrying the
//! global spin-flip parity, and agree on its odd sector; the supersymmetry
//! square identity `(Q+)^2 + (Q-)^2 = H + E0` holds exactly for the
//! Majorana-wrapped pair, which is why both forms are exposed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{majorana_monomial, MajoranaIndex, Observable, PauliString, PauliTerm};

pub const TRICRITICAL_RATIO: f64 = 0.856;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

impl BoundaryCondition {
    pub fn is_periodic(self) -> bool {
        matches!(self, BoundaryCondition::Periodic)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub l: usize,
    pub lambda_i: f64,
    pub lambda_3: f64,
    pub bc: BoundaryCondition,
}

impl ModelSpec {
    pub fn new(l: usize, lambda_i: f64, lambda_3: f64, bc: BoundaryCondition) -> Result<ModelSpec> {
        let spec = ModelSpec { l, lambda_i, lambda_3, bc };
        spec.validate()?;
        Ok(spec)
    }

    /// Couplings on the tricritical line: `lambda_3 / lambda_i = 0.856`.
    pub fn tricritical(l: usize, bc: BoundaryCondition) -> Result<ModelSpec> {
        ModelSpec::new(l, 1.0, TRICRITICAL_RATIO, bc)
    }

    /// Named presets accepted in run configs: `tci-open-<L>` / `tci-pbc-<L>`.
    pub fn preset(name: &str) -> Result<ModelSpec> {
        let rest = name
            .strip_prefix("tci-")
            .ok_or_else(|| Error::InvalidModel(format!("unknown preset {name:?}")))?;
        let (bc, l) = if let Some(l) = rest.strip_prefix("open-") {
            (BoundaryCondition::Open, l)
        } else if let Some(l) = rest.strip_prefix("pbc-") {
            (BoundaryCondition::Periodic, l)
        } else {
            return Err(Error::InvalidModel(format!("unknown preset {name:?}")));
        };
        let l: usize = l
            .parse()
            .map_err(|_| Error::InvalidModel(format!("bad size in preset {name:?}")))?;
        ModelSpec::tricritical(l, bc)
    }

    pub fn validate(&self) -> Result<()> {
        // The two-site Ising part is fine from L=2; everything touching the
        // three-spin term re-checks L >= 3 at build time.
        if self.l < 2 || self.l > crate::pauli::MAX_SITES {
            return Err(Error::InvalidModel(format!("site count {} out of range", self.l)));
        }
        if !self.lambda_i.is_finite() || !self.lambda_3.is_finite() {
            return Err(Error::InvalidModel("non-finite coupling".into()));
        }
        Ok(())
    }

    fn require_l3(&self) -> Result<()> {
        if self.l < 3 {
            Err(Error::InvalidModel(format!(
                "three-site terms need L >= 3, got L = {}",
                self.l
            )))
        } else {
            Ok(())
        }
    }

    pub fn require_positive_lambda3(&self) -> Result<()> {
        if self.lambda_3 <= 0.0 {
            Err(Error::InvalidModel(format!(
                "lambda_3 must be positive here, got {}",
                self.lambda_3
            )))
        } else {
            Ok(())
        }
    }
}

/// The additive constant `E0 = L (lambda_i^2 + lambda_3^2) / lambda_3` that
/// completes the sum-of-squares identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyShift {
    pub e0: f64,
}

impl EnergyShift {
    pub fn of(spec: &ModelSpec) -> Result<EnergyShift> {
        spec.require_positive_lambda3()?;
        let e0 =
            spec.l as f64 * (spec.lambda_i * spec.lambda_i + spec.lambda_3 * spec.lambda_3)
                / spec.lambda_3;
        Ok(EnergyShift { e0 })
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Wrap a (possibly out-of-range) Majorana index onto `1..=2L`.
fn wrap_majorana(a: i64, l: usize) -> MajoranaIndex {
    let m = 2 * l as i64;
    MajoranaIndex(((a - 1).rem_euclid(m) + 1) as usize)
}

fn in_range(a: i64, l: usize) -> bool {
    a >= 1 && a <= 2 * l as i64
}

/// Majorana monomial with PBC wrapping or open-bc range enforcement.
fn monomial(
    indices: &[i64],
    scalar: Complex64,
    spec: &ModelSpec,
) -> Result<Option<PauliTerm>> {
    if spec.bc.is_periodic() {
        let wrapped: Vec<MajoranaIndex> =
            indices.iter().map(|&a| wrap_majorana(a, spec.l)).collect();
        Ok(Some(majorana_monomial(&wrapped, scalar, spec.l)?))
    } else if indices.iter().all(|&a| in_range(a, spec.l)) {
        let idx: Vec<MajoranaIndex> = indices.iter().map(|&a| MajoranaIndex(a as usize)).collect();
        Ok(Some(majorana_monomial(&idx, scalar, spec.l)?))
    } else {
        Ok(None)
    }
}

/// Transverse-field Ising part in spin form:
/// `H_I = -sum_j (X_j + Z_j Z_{j+1})`, with the `(L,1)` bond only on rings.
pub fn build_ising(spec: &ModelSpec) -> Result<Observable> {
    spec.validate()?;
    let l = spec.l;
    let mut terms = Vec::with_capacity(2 * l);
    for j in 1..=l {
        terms.push(PauliTerm::new(
            re(-1.0),
            PauliString::single(l, j, crate::pauli::Letter::X)?,
        ));
    }
    let bonds = if spec.bc.is_periodic() { l } else { l - 1 };
    for j in 1..=bonds {
        let k = j % l + 1;
        let mut s = PauliString::identity(l);
        s.set(j, crate::pauli::Letter::Z)?;
        s.set(k, crate::pauli::Letter::Z)?;
        terms.push(PauliTerm::new(re(-1.0), s));
    }
    Observable::from_terms(l, terms)
}

/// Same operator assembled from Majorana images, `i sum_a g_a g_{a+1}`,
/// with the index `a` wrapped modulo 2L on rings.
pub fn build_ising_majorana(spec: &ModelSpec) -> Result<Observable> {
    spec.validate()?;
    let l = spec.l;
    let last = if spec.bc.is_periodic() { 2 * l } else { 2 * l - 1 };
    let mut terms = Vec::with_capacity(last);
    for a in 1..=last as i64 {
        if let Some(t) = monomial(&[a, a + 1], Complex64::new(0.0, 1.0), spec)? {
            terms.push(t);
        }
    }
    Observable::from_terms(l, terms)
}

/// Three-spin deformation in spin form:
/// `H_3 = sum_j (X_j Z_{j+1} Z_{j+2} + Z_j Z_{j+1} X_{j+2})`.
pub fn build_h3(spec: &ModelSpec) -> Result<Observable> {
    spec.validate()?;
    spec.require_l3()?;
    let l = spec.l;
    let last = if spec.bc.is_periodic() { l } else { l - 2 };
    let mut terms = Vec::with_capacity(2 * last);
    for j in 1..=last {
        let (a, b, c) = (j, j % l + 1, (j + 1) % l + 1);
        let mut s1 = PauliString::identity(l);
        s1.set(a, crate::pauli::Letter::X)?;
        s1.set(b, crate::pauli::Letter::Z)?;
        s1.set(c, crate::pauli::Letter::Z)?;
        terms.push(PauliTerm::new(re(1.0), s1));
        let mut s2 = PauliString::identity(l);
        s2.set(a, crate::pauli::Letter::Z)?;
        s2.set(b, crate::pauli::Letter::Z)?;
        s2.set(c, crate::pauli::Letter::X)?;
        terms.push(PauliTerm::new(re(1.0), s2));
    }
    Observable::from_terms(l, terms)
}

/// Majorana image of the three-spin term,
/// `H_3 = -sum_a g_{a-2} g_{a-1} g_{a+1} g_{a+2}`, indices wrapped on rings.
pub fn build_h3_majorana(spec: &ModelSpec) -> Result<Observable> {
    spec.validate()?;
    spec.require_l3()?;
    let l = spec.l as i64;
    let range: Vec<i64> = if spec.bc.is_periodic() {
        (1..=2 * l).collect()
    } else {
        (3..=2 * l - 2).collect()
    };
    let mut terms = Vec::with_capacity(range.len());
    for a in range {
        if let Some(t) = monomial(&[a - 2, a - 1, a + 1, a + 2], re(-1.0), spec)? {
            terms.push(t);
        }
    }
    Observable::from_terms(spec.l, terms)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Representation {
    Spin,
    Majorana,
}

/// Full Hamiltonian `2 lambda_i H_I + lambda_3 H_3`, optionally plus
/// `E0 * Id`. The shift is excluded by default everywhere states are
/// optimized; it only matters for the sum-of-squares identity.
pub fn build_hamiltonian(spec: &ModelSpec, include_shift: bool) -> Result<Observable> {
    build_hamiltonian_repr(spec, include_shift, Representation::Spin)
}

pub fn build_hamiltonian_repr(
    spec: &ModelSpec,
    include_shift: bool,
    repr: Representation,
) -> Result<Observable> {
    let (hi, h3) = match repr {
        Representation::Spin => (build_ising(spec)?, build_h3(spec)?),
        Representation::Majorana => (build_ising_majorana(spec)?, build_h3_majorana(spec)?),
    };
    let mut h = hi.scale(re(2.0 * spec.lambda_i)).add(&h3.scale(re(spec.lambda_3)))?;
    if include_shift {
        let shift = EnergyShift::of(spec)?;
        h = h.add(&Observable::identity_times(spec.l, re(shift.e0)))?;
    }
    Ok(h)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Supercharge
/// `Q^s = 1/(2 sqrt(lambda_3)) sum_a s^a (lambda_i g_a + s i lambda_3 g_{a-1} g_a g_{a+1})`
/// on a ring (the wrapped neighbor indices make no sense on an open chain).
pub fn build_supercharge(sign: Sign, spec: &ModelSpec) -> Result<Observable> {
    spec.validate()?;
    spec.require_l3()?;
    spec.require_positive_lambda3()?;
    if !spec.bc.is_periodic() {
        return Err(Error::Unsupported(
            "supercharges are defined with wrapped Majorana indices; use a periodic chain".into(),
        ));
    }
    let s = sign.value();
    let norm = 1.0 / (2.0 * spec.lambda_3.sqrt());
    let mut terms = Vec::with_capacity(4 * spec.l);
    for a in 1..=2 * spec.l as i64 {
        let pref = if a % 2 == 0 { norm } else { s * norm };
        if let Some(t) = monomial(&[a], re(pref * spec.lambda_i), spec)? {
            terms.push(t);
        }
        let cube_scalar = Complex64::new(0.0, pref * s * spec.lambda_3);
        if let Some(t) = monomial(&[a - 1, a, a + 1], cube_scalar, spec)? {
            terms.push(t);
        }
    }
    Observable::from_terms(spec.l, terms)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupercurrentKind {
    Psi,
    G,
}

impl SupercurrentKind {
    fn sign(self) -> f64 {
        match self {
            SupercurrentKind::Psi => -1.0,
            SupercurrentKind::G => 1.0,
        }
    }
}

/// Local supercurrent at site `j`:
/// `psi_j = lambda_i (g_{2j-1} - g_{2j}) + i lambda_3 (g_{2j-2} - g_{2j+1}) g_{2j-1} g_{2j}`
/// and `G_j` the same with plus signs. On open chains any summand whose
/// Majorana index leaves `1..=2L` is dropped, which trims the operators at
/// `j = 1` and `j = L`.
pub fn build_supercurrent(
    kind: SupercurrentKind,
    j: usize,
    spec: &ModelSpec,
) -> Result<Observable> {
    spec.validate()?;
    spec.require_l3()?;
    if j == 0 || j > spec.l {
        return Err(Error::SiteOutOfRange { index: j, max: spec.l });
    }
    let k = kind.sign();
    let j = j as i64;
    let (lo, hi) = (2 * j - 1, 2 * j);
    let mut terms = Vec::with_capacity(4);
    if let Some(t) = monomial(&[lo], re(spec.lambda_i), spec)? {
        terms.push(t);
    }
    if let Some(t) = monomial(&[hi], re(k * spec.lambda_i), spec)? {
        terms.push(t);
    }
    if let Some(t) = monomial(&[lo - 1, lo, hi], Complex64::new(0.0, spec.lambda_3), spec)? {
        terms.push(t);
    }
    if let Some(t) = monomial(&[hi + 1, lo, hi], Complex64::new(0.0, k * spec.lambda_3), spec)? {
        terms.push(t);
    }
    Observable::from_terms(spec.l, terms)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CorrelatorKind {
    /// `psi_j psi_k`
    C,
    /// `G_j G_k`
    D,
}

impl CorrelatorKind {
    pub fn current(self) -> SupercurrentKind {
        match self {
            CorrelatorKind::C => SupercurrentKind::Psi,
            CorrelatorKind::D => SupercurrentKind::G,
        }
    }
}

/// Product operator `psi_j psi_k` (or `G_j G_k`), canonicalized.
///
/// The product of two distinct Hermitian supercurrents is anti-Hermitian up
/// to its symmetric part cancelling, so ground-state expectations of these
/// operators come out purely imaginary; the analysis layer records the
/// imaginary part as the correlation value.
pub fn correlator_observable(
    kind: CorrelatorKind,
    j: usize,
    k: usize,
    spec: &ModelSpec,
) -> Result<Observable> {
    if j == k {
        return Err(Error::InvalidModel("correlator needs two distinct sites".into()));
    }
    let a = build_supercurrent(kind.current(), j, spec)?;
    let b = build_supercurrent(kind.current(), k, spec)?;
    a.mul(&b)
}

/// Global spin-flip operator `F = prod_j X_j`.
pub fn spin_flip(l: usize) -> Result<Observable> {
    let mut s = PauliString::identity(l);
    for j in 1..=l {
        s.set(j, crate::pauli::Letter::X)?;
    }
    Observable::from_terms(l, [PauliTerm::new(re(1.0), s)])
}
