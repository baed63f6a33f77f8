//! Phase-exact Pauli-string algebra and the Jordan-Wigner compiler.
//!
//! Strings are stored as an (x, z) bitmask pair: bit `j-1` of `x` marks an X
//! on site `j`, bit `j-1` of `z` a Z, both together a Y. All products are
//! evaluated in integer arithmetic, so phases are exact members of
//! `{1, i, -1, -i}` and never accumulate rounding error. Sites are 1-based in
//! every public signature; the bit layout is private.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped during
/// canonicalization. True cancellations produced by the exact phase algebra
/// land at exactly zero; the tolerance only mops up float dust from scalar
/// coefficients.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default qubit cap for dense matrix realization (`2^14` rows).
pub const DENSE_CAP: usize = 14;

/// Largest supported chain; masks are single `u64` words.
pub const MAX_SITES: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// A phaseless Pauli string on `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PauliString {
    x: u64,
    z: u64,
    n: u16,
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        assert!(n >= 1 && n <= MAX_SITES, "qubit count {n} out of range");
        PauliString { x: 0, z: 0, n: n as u16 }
    }

    /// Single-letter string: `letter` on site `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, letter: Letter) -> Result<PauliString> {
        let mut s = PauliString::identity(n);
        s.set(site, letter)?;
        Ok(s)
    }

    pub fn set(&mut self, site: usize, letter: Letter) -> Result<()> {
        if site == 0 || site > self.n as usize {
            return Err(Error::SiteOutOfRange { index: site, max: self.n as usize });
        }
        let bit = 1u64 << (site - 1);
        self.x &= !bit;
        self.z &= !bit;
        match letter {
            Letter::I => {}
            Letter::X => self.x |= bit,
            Letter::Y => {
                self.x |= bit;
                self.z |= bit;
            }
            Letter::Z => self.z |= bit,
        }
        Ok(())
    }

    pub fn letter(&self, site: usize) -> Letter {
        assert!(site >= 1 && site <= self.n as usize);
        let bit = 1u64 << (site - 1);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn qubits(&self) -> usize {
        self.n as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of sites carrying a non-identity letter.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Bitmask of sites carrying a non-identity letter (bit `j-1` for site `j`).
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Amplitude and target index of `P|s>`, so `P|s> = amp |s XOR x>`.
    pub fn image(&self, s: u64) -> (Complex64, u64) {
        let sign = 1.0 - 2.0 * ((s & self.z).count_ones() & 1) as f64;
        (phase_i_pow(self.y_count() as i64) * sign, s ^ self.x)
    }

    /// Parse a letter string like `"XZZI"`; site 1 is the leftmost character.
    pub fn parse(s: &str) -> Result<PauliString> {
        let n = s.chars().count();
        if n == 0 || n > MAX_SITES {
            return Err(Error::Parse(format!("bad string length {n}")));
        }
        let mut p = PauliString::identity(n);
        for (i, c) in s.chars().enumerate() {
            let letter = Letter::from_char(c)
                .ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?}")))?;
            p.set(i + 1, letter)?;
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 1..=self.n as usize {
            write!(f, "{}", self.letter(site).as_char())?;
        }
        Ok(())
    }
}

/// Product of two strings with the exact scalar phase: `p * q == phase * r`.
///
/// With y(s) = |x_s AND z_s|, the phase exponent of i is
/// `y(p) + y(q) - y(r) + 2*|q.x AND p.z|  (mod 4)`; the first three terms
/// account for the i folded into each Y, the last for commuting q's X past
/// p's Z. Verified against the brute-force matrix oracle in the test suite.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<(Complex64, PauliString)> {
    if p.n != q.n {
        return Err(Error::LengthMismatch { left: p.n as usize, right: q.n as usize });
    }
    let r = PauliString { x: p.x ^ q.x, z: p.z ^ q.z, n: p.n };
    let k = p.y_count() as i64 + q.y_count() as i64 - r.y_count() as i64
        + 2 * (q.x & p.z).count_ones() as i64;
    Ok((phase_i_pow(k), r))
}

fn phase_i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A Pauli string with a complex coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, string: PauliString) -> PauliTerm {
        PauliTerm { coeff, string }
    }
}

/// 1-based index on the Majorana chain; a chain of `L` spins carries `2L`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MajoranaIndex(pub usize);

/// Jordan-Wigner image of a single Majorana operator.
///
/// Odd index `2j-1` maps to `Z_j` behind an X-string on sites `< j`; even
/// index `2j` maps to `-Y_j` behind the same string. Both images square to
/// the identity with phase +1 and are Hermitian.
pub fn jw_majorana(a: MajoranaIndex, l: usize) -> Result<PauliTerm> {
    let MajoranaIndex(a) = a;
    if a == 0 || a > 2 * l {
        return Err(Error::MajoranaOutOfRange { index: a, max: 2 * l });
    }
    let j = a.div_ceil(2); // spin site
    let prefix = (1u64 << (j - 1)) - 1; // X on sites 1..j-1
    let site_bit = 1u64 << (j - 1);
    if a % 2 == 1 {
        let s = PauliString { x: prefix, z: site_bit, n: l as u16 };
        Ok(PauliTerm::new(Complex64::new(1.0, 0.0), s))
    } else {
        let s = PauliString { x: prefix | site_bit, z: site_bit, n: l as u16 };
        Ok(PauliTerm::new(Complex64::new(-1.0, 0.0), s))
    }
}

/// Ordered product `scalar * g_{a1} g_{a2} ...` collapsed to a single term.
///
/// Anticommutation comes out of the phase-exact products, so index order
/// matters exactly as written.
pub fn majorana_monomial(
    indices: &[MajoranaIndex],
    scalar: Complex64,
    l: usize,
) -> Result<PauliTerm> {
    if indices.is_empty() {
        return Err(Error::Parse("empty Majorana monomial".into()));
    }
    let first = jw_majorana(indices[0], l)?;
    let mut coeff = scalar * first.coeff;
    let mut string = first.string;
    for &a in &indices[1..] {
        let t = jw_majorana(a, l)?;
        let (phase, r) = pauli_mul(&string, &t.string)?;
        coeff *= phase * t.coeff;
        string = r;
    }
    Ok(PauliTerm::new(coeff, string))
}

/// Canonical sum of Pauli terms: sorted by string, duplicates merged,
/// near-zero coefficients pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n: u16,
    terms: Vec<PauliTerm>,
}

impl Observable {
    pub fn zero(n: usize) -> Observable {
        assert!(n >= 1 && n <= MAX_SITES);
        Observable { n: n as u16, terms: Vec::new() }
    }

    pub fn identity_times(n: usize, c: Complex64) -> Observable {
        let mut o = Observable::zero(n);
        o.push(PauliTerm::new(c, PauliString::identity(n)));
        o.canonicalize();
        o
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Observable> {
        let mut o = Observable::zero(n);
        for t in terms {
            if t.string.n as usize != n {
                return Err(Error::LengthMismatch { left: t.string.n as usize, right: n });
            }
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::Numerics("non-finite term coefficient".into()));
            }
            o.push(t);
        }
        o.canonicalize();
        Ok(o)
    }

    fn push(&mut self, t: PauliTerm) {
        self.terms.push(t);
    }

    fn canonicalize(&mut self) {
        self.terms.sort_unstable_by_key(|t| t.string);
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.string == t.string => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > PRUNE_TOL);
        self.terms = merged;
    }

    pub fn qubits(&self) -> usize {
        self.n as usize
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every canonical coefficient real: since Pauli strings are Hermitian,
    /// this is exactly Hermiticity of the sum.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.im.abs() <= tol)
    }

    pub fn add(&self, other: &Observable) -> Result<Observable> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n as usize, right: other.n as usize });
        }
        let mut o = self.clone();
        o.terms.extend_from_slice(&other.terms);
        o.canonicalize();
        Ok(o)
    }

    pub fn sub(&self, other: &Observable) -> Result<Observable> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Observable {
        let mut o = self.clone();
        for t in &mut o.terms {
            t.coeff *= c;
        }
        o.canonicalize();
        o
    }

    /// Operator product, distributing `pauli_mul` over all term pairs.
    pub fn mul(&self, other: &Observable) -> Result<Observable> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n as usize, right: other.n as usize });
        }
        let mut o = Observable::zero(self.n as usize);
        for a in &self.terms {
            for b in &other.terms {
                let (phase, r) = pauli_mul(&a.string, &b.string)?;
                o.push(PauliTerm::new(a.coeff * b.coeff * phase, r));
            }
        }
        o.canonicalize();
        Ok(o)
    }

    /// Hermitian adjoint (conjugates coefficients; strings are self-adjoint).
    pub fn dagger(&self) -> Observable {
        let mut o = self.clone();
        for t in &mut o.terms {
            t.coeff = t.coeff.conj();
        }
        o
    }

    /// Largest coefficient magnitude; zero observable gives 0.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; an upper bound on the operator norm.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Apply to a state vector: `out += O |amp>`.
    ///
    /// Basis convention: computational state `s` has the Z eigenvalue of site
    /// `j` stored in bit `j-1` (bit 0 means eigenvalue +1). A string acts as
    /// `P|s> = i^y (-1)^{|s AND z|} |s XOR x>`.
    pub fn apply_accumulate(&self, amp: &[Complex64], out: &mut [Complex64]) {
        let dim = 1usize << self.n;
        assert_eq!(amp.len(), dim);
        assert_eq!(out.len(), dim);
        for t in &self.terms {
            let base = t.coeff * phase_i_pow(t.string.y_count() as i64);
            let (x, z) = (t.string.x, t.string.z);
            if x == 0 {
                for (s, a) in amp.iter().enumerate() {
                    let sign = 1.0 - 2.0 * ((s as u64 & z).count_ones() & 1) as f64;
                    out[s] += base * sign * a;
                }
            } else {
                for (s, a) in amp.iter().enumerate() {
                    let sign = 1.0 - 2.0 * ((s as u64 & z).count_ones() & 1) as f64;
                    out[s ^ x as usize] += base * sign * a;
                }
            }
        }
    }

    pub fn apply(&self, amp: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amp.len()];
        self.apply_accumulate(amp, &mut out);
        out
    }

    /// `<amp| O |amp>` as a complex number (no Hermiticity assumption).
    pub fn expectation_complex(&self, amp: &[Complex64]) -> Complex64 {
        let oa = self.apply(amp);
        amp.iter().zip(&oa).map(|(a, b)| a.conj() * b).sum()
    }

    /// Dense column-major matrix of dimension `2^L`, capped at `cap` qubits.
    pub fn to_dense_capped(&self, cap: usize) -> Result<Vec<Complex64>> {
        let l = self.n as usize;
        if l > cap {
            return Err(Error::DenseCapExceeded { l, cap });
        }
        let dim = 1usize << l;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for t in &self.terms {
            let base = t.coeff * phase_i_pow(t.string.y_count() as i64);
            let (x, z) = (t.string.x as usize, t.string.z as usize);
            for col in 0..dim {
                let sign = 1.0 - 2.0 * ((col as u64 & z as u64).count_ones() & 1) as f64;
                let row = col ^ x;
                m[row + dim * col] += base * sign;
            }
        }
        Ok(m)
    }

    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        self.to_dense_capped(DENSE_CAP)
    }

    /// One term per line: `<re> <im> <letters>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&format!("{} {} {}\n", t.coeff.re, t.coeff.im, t.string));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Observable> {
        let mut terms = Vec::new();
        let mut n = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (re, im, letters) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Err(Error::Parse(format!("bad observable line {line:?}"))),
            };
            if it.next().is_some() {
                return Err(Error::Parse(format!("trailing tokens in {line:?}")));
            }
            let re: f64 = re.parse().map_err(|_| Error::Parse(format!("bad float {re:?}")))?;
            let im: f64 = im.parse().map_err(|_| Error::Parse(format!("bad float {im:?}")))?;
            let string = PauliString::parse(letters)?;
            let ln = string.qubits();
            match n {
                None => n = Some(ln),
                Some(prev) if prev != ln => {
                    return Err(Error::LengthMismatch { left: prev, right: ln })
                }
                _ => {}
            }
            terms.push(PauliTerm::new(Complex64::new(re, im), string));
        }
        let n = n.ok_or_else(|| Error::Parse("no terms in observable text".into()))?;
        Observable::from_terms(n, terms)
    }

    /// Coefficient lookup by string, zero when absent.
    pub fn coeff_of(&self, s: &PauliString) -> Complex64 {
        match self.terms.binary_search_by_key(s, |t| t.string) {
            Ok(i) => self.terms[i].coeff,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Term-by-term map for tests and reporting, keyed by letter string.
    pub fn term_map(&self) -> BTreeMap<String, Complex64> {
        self.terms.iter().map(|t| (t.string.to_string(), t.coeff)).collect()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
