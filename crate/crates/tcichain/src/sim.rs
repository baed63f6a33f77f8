//! Dense state-vector simulation: the layered variational circuit, product
//! basis rotations, shot sampling, and a classical readout-error channel with
//! its tensor-inverse mitigation.
//!
//! Basis convention throughout: site `j` (1-based) owns bit `j - 1` of the
//! computational index, bit value 1 meaning `Z = -1`. Bitstrings render site 1
//! first, so index 0b100 on three sites prints as `001`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::BoundaryCondition;
use crate::pauli::{Letter, Observable, PauliString, MAX_SITES};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: u16,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> StateVector {
        assert!(n >= 1 && n <= MAX_SITES);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n: n as u16, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        if n < 1 || n > MAX_SITES || amps.len() != 1 << n {
            return Err(Error::LengthMismatch { left: amps.len(), right: 1 << n });
        }
        Ok(StateVector { n: n as u16, amps })
    }

    pub fn num_sites(&self) -> usize {
        self.n as usize
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::Numerics("cannot normalize a null vector".into()));
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }
}

/// `|+>^L`, the circuit's fixed starting point.
pub fn plus_state(l: usize) -> StateVector {
    let mut s = StateVector::zero_state(l);
    let amp = Complex64::new(1.0 / (s.dim() as f64).sqrt(), 0.0);
    for a in &mut s.amps {
        *a = amp;
    }
    s
}

/// `exp(-i angle sum_j X_j)`: one x-rotation on every site.
pub fn apply_mix_all(state: &mut StateVector, angle: f64) {
    let l = state.num_sites();
    let c = Complex64::new(angle.cos(), 0.0);
    let ms = Complex64::new(0.0, -angle.sin());
    for q in 0..l {
        let bit = 1usize << q;
        for base in 0..state.amps.len() {
            if base & bit == 0 {
                let a = state.amps[base];
                let b = state.amps[base | bit];
                state.amps[base] = c * a + ms * b;
                state.amps[base | bit] = ms * a + c * b;
            }
        }
    }
}

/// `exp(-i angle sum_bonds Z_j Z_{j+1})`, diagonal, with the wrap bond on
/// rings. The phase depends only on how many bonds are frustrated.
pub fn apply_bond_phase(state: &mut StateVector, angle: f64, bc: BoundaryCondition) {
    let l = state.num_sites();
    let bonds = if bc.is_periodic() { l } else { l - 1 };
    let table: Vec<Complex64> = (0..=bonds)
        .map(|k| {
            let m = bonds as f64 - 2.0 * k as f64;
            Complex64::new(0.0, -angle * m).exp()
        })
        .collect();
    let mask = (1usize << (l - 1)) - 1;
    for s in 0..state.amps.len() {
        let frustrated = if bc.is_periodic() {
            let rot = (s >> 1) | ((s & 1) << (l - 1));
            (s ^ rot).count_ones()
        } else {
            ((s ^ (s >> 1)) & mask).count_ones()
        };
        state.amps[s] *= table[frustrated as usize];
    }
}

/// `exp(-i angle sum_j Z_j)`, diagonal.
pub fn apply_field_phase(state: &mut StateVector, angle: f64) {
    let l = state.num_sites();
    let table: Vec<Complex64> = (0..=l)
        .map(|k| {
            let m = l as f64 - 2.0 * k as f64;
            Complex64::new(0.0, -angle * m).exp()
        })
        .collect();
    for s in 0..state.amps.len() {
        state.amps[s] *= table[s.count_ones() as usize];
    }
}

/// Angles for the layered circuit. The first layer starts from `|+>^L`, where
/// the mixer would act trivially, so it carries only the two phase angles;
/// every later layer has all three. A depth-M circuit therefore takes
/// `3M - 1` parameters, packed `[beta_1, gamma_1, alpha_2, beta_2, gamma_2, ...]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams {
    layers: Vec<(Option<f64>, f64, f64)>,
}

impl AnsatzParams {
    pub fn from_flat(params: &[f64]) -> Result<AnsatzParams> {
        if params.len() < 2 || (params.len() + 1) % 3 != 0 {
            return Err(Error::InvalidConfig(format!(
                "parameter vector length {} is not 3M - 1",
                params.len()
            )));
        }
        let mut layers = vec![(None, params[0], params[1])];
        for chunk in params[2..].chunks(3) {
            layers.push((Some(chunk[0]), chunk[1], chunk[2]));
        }
        Ok(AnsatzParams { layers })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for (alpha, beta, gamma) in &self.layers {
            if let Some(a) = alpha {
                out.push(*a);
            }
            out.push(*beta);
            out.push(*gamma);
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn num_params(&self) -> usize {
        3 * self.depth() - 1
    }

    pub fn layers(&self) -> &[(Option<f64>, f64, f64)] {
        &self.layers
    }

    pub fn param_count_for_depth(depth: usize) -> usize {
        assert!(depth >= 1);
        3 * depth - 1
    }
}

/// One circuit layer: mixer (if present), then bond phase, then field phase.
pub fn apply_layer(
    state: &mut StateVector,
    alpha: Option<f64>,
    beta: f64,
    gamma: f64,
    bc: BoundaryCondition,
) {
    if let Some(a) = alpha {
        apply_mix_all(state, a);
    }
    apply_bond_phase(state, beta, bc);
    apply_field_phase(state, gamma);
}

/// Run the full circuit from `|+>^L`.
pub fn apply_ansatz(l: usize, bc: BoundaryCondition, params: &AnsatzParams) -> StateVector {
    let mut state = plus_state(l);
    for &(alpha, beta, gamma) in params.layers() {
        apply_layer(&mut state, alpha, beta, gamma, bc);
    }
    state
}

/// Real expectation value of a Hermitian observable. The imaginary residue is
/// a cross-check on both the operator and the state; anything above noise
/// level is treated as an error rather than silently discarded.
pub fn expectation(obs: &Observable, state: &StateVector) -> Result<f64> {
    if obs.qubits() != state.num_sites() {
        return Err(Error::LengthMismatch { left: obs.qubits(), right: state.num_sites() });
    }
    let v = obs.expectation_complex(state.amplitudes());
    let scale = 1.0 + v.re.abs();
    if v.im.abs() > 1e-9 * scale {
        return Err(Error::NonHermitian(format!(
            "expectation has imaginary residue {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Product measurement basis, one letter per site (identity is not a valid
/// measurement axis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementBasis {
    letters: Vec<Letter>,
}

impl MeasurementBasis {
    pub fn new(letters: Vec<Letter>) -> Result<MeasurementBasis> {
        if letters.is_empty() || letters.len() > MAX_SITES {
            return Err(Error::InvalidConfig("basis must cover 1..=63 sites".into()));
        }
        if letters.contains(&Letter::I) {
            return Err(Error::InvalidConfig("measurement basis letters must be X, Y or Z".into()));
        }
        Ok(MeasurementBasis { letters })
    }

    pub fn uniform(l: usize, letter: Letter) -> Result<MeasurementBasis> {
        MeasurementBasis::new(vec![letter; l])
    }

    pub fn num_sites(&self) -> usize {
        self.letters.len()
    }

    /// Letter at 1-based site `j`.
    pub fn letter(&self, j: usize) -> Letter {
        self.letters[j - 1]
    }

    pub fn parse(text: &str) -> Result<MeasurementBasis> {
        let letters = text
            .chars()
            .map(|c| match c {
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse(format!("bad basis letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        MeasurementBasis::new(letters)
    }
}

impl std::fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for letter in &self.letters {
            let c = match letter {
                Letter::I => 'I',
                Letter::X => 'X',
                Letter::Y => 'Y',
                Letter::Z => 'Z',
            };
            f.write_char(c)?;
        }
        Ok(())
    }
}

/// Rotate so that a computational measurement afterwards realizes the given
/// product basis: Hadamard for X sites, and the map
/// `(a, b) -> ((a - i b)/sqrt2, (a + i b)/sqrt2)` for Y sites so that bit 0
/// collects the `+i` eigenstate amplitude.
pub fn rotate_to_basis(state: &mut StateVector, basis: &MeasurementBasis) -> Result<()> {
    if basis.num_sites() != state.num_sites() {
        return Err(Error::LengthMismatch {
            left: basis.num_sites(),
            right: state.num_sites(),
        });
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for j in 1..=basis.num_sites() {
        let bit = 1usize << (j - 1);
        match basis.letter(j) {
            Letter::Z => {}
            Letter::X => {
                for base in 0..state.amps.len() {
                    if base & bit == 0 {
                        let a = state.amps[base];
                        let b = state.amps[base | bit];
                        state.amps[base] = (a + b) * inv_sqrt2;
                        state.amps[base | bit] = (a - b) * inv_sqrt2;
                    }
                }
            }
            Letter::Y => {
                let i = Complex64::new(0.0, 1.0);
                for base in 0..state.amps.len() {
                    if base & bit == 0 {
                        let a = state.amps[base];
                        let b = state.amps[base | bit];
                        state.amps[base] = (a - i * b) * inv_sqrt2;
                        state.amps[base | bit] = (a + i * b) * inv_sqrt2;
                    }
                }
            }
            Letter::I => unreachable!("validated at construction"),
        }
    }
    Ok(())
}

/// Draw `shots` outcomes from `|amp|^2` by inverse-CDF sampling. Determinism
/// contract: a given generator state always yields the same counts.
pub fn sample_counts(state: &StateVector, shots: u64, rng: &mut ChaCha8Rng) -> BTreeMap<u64, u64> {
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(state.dim() - 1);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    counts
}

/// Measurement record: the basis, the shot budget, the seed that produced it,
/// and the histogram of outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsTable {
    pub l: usize,
    pub basis: MeasurementBasis,
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl CountsTable {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    fn bitstring(&self, s: u64) -> String {
        (1..=self.l).map(|j| if s >> (j - 1) & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# sites,{}", self.l);
        let _ = writeln!(out, "# basis,{}", self.basis);
        let _ = writeln!(out, "# shots,{}", self.shots);
        let _ = writeln!(out, "# seed,{}", self.seed);
        out.push_str("bitstring,count\n");
        for (&s, &c) in &self.counts {
            let _ = writeln!(out, "{},{}", self.bitstring(s), c);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<CountsTable> {
        let mut l = None;
        let mut basis = None;
        let mut shots = None;
        let mut seed = None;
        let mut counts = BTreeMap::new();
        let mut saw_header = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim()
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad metadata line {line:?}")))?;
                match key.trim() {
                    "sites" => l = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
                    "basis" => basis = Some(MeasurementBasis::parse(value.trim())?),
                    "shots" => shots = Some(value.trim().parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?),
                    "seed" => seed = Some(value.trim().parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?),
                    other => return Err(Error::Parse(format!("unknown metadata key {other:?}"))),
                }
                continue;
            }
            if !saw_header {
                if line != "bitstring,count" {
                    return Err(Error::Parse(format!("expected column header, got {line:?}")));
                }
                saw_header = true;
                continue;
            }
            let (bits, count) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad count row {line:?}")))?;
            let l = l.ok_or_else(|| Error::Parse("sites metadata must precede rows".into()))?;
            if bits.len() != l {
                return Err(Error::Parse(format!("bitstring {bits:?} does not match {l} sites")));
            }
            let mut s = 0u64;
            for (pos, c) in bits.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => s |= 1 << pos,
                    other => return Err(Error::Parse(format!("bad bit {other:?}"))),
                }
            }
            let count: u64 = count.trim().parse().map_err(|e: std::num::ParseIntError| Error::Parse(e.to_string()))?;
            *counts.entry(s).or_insert(0) += count;
        }
        let l = l.ok_or_else(|| Error::Parse("missing sites metadata".into()))?;
        let basis = basis.ok_or_else(|| Error::Parse("missing basis metadata".into()))?;
        let shots = shots.ok_or_else(|| Error::Parse("missing shots metadata".into()))?;
        let seed = seed.ok_or_else(|| Error::Parse("missing seed metadata".into()))?;
        Ok(CountsTable { l, basis, shots, seed, counts })
    }
}

/// Rotate, sample, and record.
pub fn measure(
    state: &StateVector,
    basis: &MeasurementBasis,
    shots: u64,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CountsTable> {
    let mut rotated = state.clone();
    rotate_to_basis(&mut rotated, basis)?;
    let counts = sample_counts(&rotated, shots, rng);
    Ok(CountsTable { l: state.num_sites(), basis: basis.clone(), shots, seed, counts })
}

/// Sample mean and standard error of a Pauli string estimated from counts.
/// Every site the string acts on must have been measured along that same
/// axis; otherwise the counts carry no information about it.
pub fn estimate_pauli(counts: &CountsTable, string: &PauliString) -> Result<(f64, f64)> {
    if string.qubits() != counts.l {
        return Err(Error::LengthMismatch { left: string.qubits(), right: counts.l });
    }
    for site in 1..=counts.l {
        let letter = string.letter(site);
        if letter != Letter::I && counts.basis.letter(site) != letter {
            return Err(Error::BasisMismatch { site });
        }
    }
    let support = string.support_mask();
    let n = counts.total();
    if n < 2 {
        return Err(Error::Numerics("need at least two shots for an error bar".into()));
    }
    let mut signed = 0i64;
    for (&s, &c) in &counts.counts {
        let sign = if (s & support).count_ones() % 2 == 0 { 1 } else { -1 };
        signed += sign * c as i64;
    }
    let n_f = n as f64;
    let mean = signed as f64 / n_f;
    // sample variance of +/-1 outcomes collapses to n(1 - m^2)/(n - 1)
    let var = (n_f * (1.0 - mean * mean) / (n_f - 1.0)).max(0.0);
    Ok((mean, (var / n_f).sqrt()))
}

/// Classical per-site readout flips: `p10` is the chance a prepared 0 reads
/// as 1, `p01` the chance a prepared 1 reads as 0. Column-stochastic form
/// `[[1 - p10, p01], [p10, 1 - p01]]` with columns indexed by the true bit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutModel {
    p01: Vec<f64>,
    p10: Vec<f64>,
}

impl ReadoutModel {
    pub fn new(p01: Vec<f64>, p10: Vec<f64>) -> Result<ReadoutModel> {
        if p01.len() != p10.len() || p01.is_empty() {
            return Err(Error::LengthMismatch { left: p01.len(), right: p10.len() });
        }
        for (&a, &b) in p01.iter().zip(&p10) {
            if !(0.0..0.5).contains(&a) || !(0.0..0.5).contains(&b) {
                return Err(Error::InvalidConfig(
                    "flip probabilities must lie in [0, 0.5) for an invertible channel".into(),
                ));
            }
        }
        Ok(ReadoutModel { p01, p10 })
    }

    pub fn uniform(l: usize, p01: f64, p10: f64) -> Result<ReadoutModel> {
        ReadoutModel::new(vec![p01; l], vec![p10; l])
    }

    /// `(p01, p10)` per site.
    pub fn rates(&self) -> (&[f64], &[f64]) {
        (&self.p01, &self.p10)
    }

    /// Site order follows row order in the table; only the last two columns
    /// are consumed, the rest are device bookkeeping.
    pub fn from_calibration_csv(text: &str) -> Result<ReadoutModel> {
        let mut p01 = Vec::new();
        let mut p10 = Vec::new();
        let mut saw_header = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols.len() < 2 || *cols.last().unwrap() != "P10" || cols[cols.len() - 2] != "P01"
                {
                    return Err(Error::Parse(
                        "calibration header must end with P01,P10 columns".into(),
                    ));
                }
                saw_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() < 3 {
                return Err(Error::Parse(format!("short calibration row {line:?}")));
            }
            let a: f64 = cols[cols.len() - 2].parse().map_err(|e: std::num::ParseFloatError| Error::Parse(e.to_string()))?;
            let b: f64 = cols[cols.len() - 1].parse().map_err(|e: std::num::ParseFloatError| Error::Parse(e.to_string()))?;
            p01.push(a);
            p10.push(b);
        }
        if !saw_header {
            return Err(Error::Parse("calibration table has no header".into()));
        }
        ReadoutModel::new(p01, p10)
    }

    pub fn num_sites(&self) -> usize {
        self.p01.len()
    }

    /// Restrict to the first `l` sites.
    pub fn truncated(&self, l: usize) -> Result<ReadoutModel> {
        if l == 0 || l > self.num_sites() {
            return Err(Error::SiteOutOfRange { index: l, max: self.num_sites() });
        }
        ReadoutModel::new(self.p01[..l].to_vec(), self.p10[..l].to_vec())
    }

    /// Push every recorded shot through the flip channel.
    pub fn corrupt(&self, counts: &CountsTable, rng: &mut ChaCha8Rng) -> Result<CountsTable> {
        if self.num_sites() != counts.l {
            return Err(Error::LengthMismatch { left: self.num_sites(), right: counts.l });
        }
        let mut noisy: BTreeMap<u64, u64> = BTreeMap::new();
        for (&s, &c) in &counts.counts {
            for _ in 0..c {
                let mut out = s;
                for q in 0..counts.l {
                    let bit = 1u64 << q;
                    let p = if s & bit == 0 { self.p10[q] } else { self.p01[q] };
                    if rng.gen::<f64>() < p {
                        out ^= bit;
                    }
                }
                *noisy.entry(out).or_insert(0) += 1;
            }
        }
        Ok(CountsTable { counts: noisy, ..counts.clone() })
    }

    /// Invert the channel on the empirical distribution, one site axis at a
    /// time. The output is a quasi-distribution: entries still sum to one but
    /// may dip slightly negative where statistics are thin.
    pub fn mitigate(&self, counts: &CountsTable) -> Result<QuasiProbs> {
        if self.num_sites() != counts.l {
            return Err(Error::LengthMismatch { left: self.num_sites(), right: counts.l });
        }
        let dim = 1usize << counts.l;
        let n = counts.total();
        if n == 0 {
            return Err(Error::Numerics("empty counts table".into()));
        }
        let mut probs = vec![0.0f64; dim];
        for (&s, &c) in &counts.counts {
            probs[s as usize] = c as f64 / n as f64;
        }
        for q in 0..counts.l {
            let det = 1.0 - self.p01[q] - self.p10[q];
            let (a00, a01) = ((1.0 - self.p01[q]) / det, -self.p01[q] / det);
            let (a10, a11) = (-self.p10[q] / det, (1.0 - self.p10[q]) / det);
            let bit = 1usize << q;
            for base in 0..dim {
                if base & bit == 0 {
                    let f0 = probs[base];
                    let f1 = probs[base | bit];
                    probs[base] = a00 * f0 + a01 * f1;
                    probs[base | bit] = a10 * f0 + a11 * f1;
                }
            }
        }
        Ok(QuasiProbs { l: counts.l, basis: counts.basis.clone(), probs })
    }
}

/// Mitigated outcome distribution in a fixed product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiProbs {
    l: usize,
    basis: MeasurementBasis,
    probs: Vec<f64>,
}

impl QuasiProbs {
    pub fn num_sites(&self) -> usize {
        self.l
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Expectation of a Pauli string compatible with the recorded basis.
    pub fn estimate_pauli(&self, string: &PauliString) -> Result<f64> {
        if string.qubits() != self.l {
            return Err(Error::LengthMismatch { left: string.qubits(), right: self.l });
        }
        for site in 1..=self.l {
            let letter = string.letter(site);
            if letter != Letter::I && self.basis.letter(site) != letter {
                return Err(Error::BasisMismatch { site });
            }
        }
        let support = string.support_mask();
        let mut acc = 0.0;
        for (s, &p) in self.probs.iter().enumerate() {
            let sign = if (s as u64 & support).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * p;
        }
        Ok(acc)
    }
}
