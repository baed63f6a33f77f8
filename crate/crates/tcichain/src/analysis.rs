//! Scaling analysis on top of exact or sampled states: supercurrent
//! correlator series and their power-law exponents, Shannon mutual
//! information of measurement distributions, entanglement entropy profiles,
//! the central-charge fits against the chord coordinate, and the quadratic
//! finite-size extrapolation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::model::{correlator_observable, CorrelatorKind, ModelSpec};
use crate::pauli::Letter;
use crate::sim::{rotate_to_basis, CountsTable, MeasurementBasis, StateVector};

/// `Im <psi_j psi_k>` (or the G pair) for every `k > j`, indexed by the
/// separation `k - j`.
///
/// Once the two currents share no Majorana factors the product is
/// anti-Hermitian and its expectation purely imaginary; at separations 1
/// and 2 the operators overlap and a Hermitian piece appears, whose real
/// expectation is not part of the scaling signal. The imaginary part is the
/// series value at every separation.
pub fn correlator_series(
    kind: CorrelatorKind,
    spec: &ModelSpec,
    state: &StateVector,
    j: usize,
) -> Result<Vec<(usize, f64)>> {
    if state.num_sites() != spec.l {
        return Err(Error::LengthMismatch { left: state.num_sites(), right: spec.l });
    }
    let mut out = Vec::with_capacity(spec.l - j);
    for k in j + 1..=spec.l {
        let obs = correlator_observable(kind, j, k, spec)?;
        let v = obs.expectation_complex(state.amplitudes());
        out.push((k - j, v.im));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// `ln A` in `|v| = A r^exponent`.
    pub log_amplitude: f64,
    pub window: (usize, usize),
    pub points: usize,
}

/// Least-squares line through `(ln r, ln |v|)` over separations inside
/// `window` (inclusive; defaults to everything present). Zeros are skipped;
/// fewer than three surviving points is an error because two points always
/// fit a line.
pub fn fit_power_law(
    series: &[(usize, f64)],
    window: Option<(usize, usize)>,
) -> Result<PowerLawFit> {
    let (lo, hi) = window.unwrap_or_else(|| {
        let rs = series.iter().map(|&(r, _)| r);
        (rs.clone().min().unwrap_or(1), rs.max().unwrap_or(1))
    });
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(r, v) in series {
        if r < lo || r > hi || v.abs() == 0.0 {
            continue;
        }
        xs.push((r as f64).ln());
        ys.push(v.abs().ln());
    }
    if xs.len() < 3 {
        return Err(Error::Numerics(format!(
            "power-law fit needs at least 3 usable points, found {}",
            xs.len()
        )));
    }
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    Ok(PowerLawFit { exponent: slope, log_amplitude: intercept, window: (lo, hi), points: xs.len() })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx < 1e-14 {
        return Err(Error::Numerics("degenerate abscissa in linear fit".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Shannon entropy in nats of a (quasi-)distribution. Entries may dip
/// slightly negative from mitigation; anything beyond roundoff tolerance is
/// rejected, the rest is clamped.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in probs {
        if p < -1e-9 {
            return Err(Error::Numerics(format!("probability {p:.3e} is negative")));
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s)
}

/// Plug-in entropy plus the first-order occupancy correction
/// `(K - 1) / (2 n)`, which removes most of the downward bias of
/// finite-shot histograms.
pub fn shannon_entropy_corrected(probs: &[f64], shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Numerics("bias correction needs a shot count".into()));
    }
    let occupied = probs.iter().filter(|&&p| p > 0.0).count();
    Ok(shannon_entropy(probs)? + (occupied.saturating_sub(1)) as f64 / (2.0 * shots as f64))
}

/// Outcome distribution of measuring every site along `letter`.
pub fn basis_probabilities(state: &StateVector, letter: Letter) -> Result<Vec<f64>> {
    let basis = MeasurementBasis::uniform(state.num_sites(), letter)?;
    let mut rotated = state.clone();
    rotate_to_basis(&mut rotated, &basis)?;
    Ok(rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// Empirical distribution of a counts table over the full register.
pub fn probabilities_from_counts(counts: &CountsTable) -> Vec<f64> {
    let dim = 1usize << counts.l;
    let n = counts.total() as f64;
    let mut probs = vec![0.0; dim];
    for (&s, &c) in &counts.counts {
        probs[s as usize] = c as f64 / n;
    }
    probs
}

/// Marginal over the contiguous 1-based site range `first..=last`.
pub fn marginal_probabilities(
    probs: &[f64],
    l: usize,
    first: usize,
    last: usize,
) -> Result<Vec<f64>> {
    if probs.len() != 1 << l {
        return Err(Error::LengthMismatch { left: probs.len(), right: 1 << l });
    }
    if first == 0 || last > l || first > last {
        return Err(Error::SiteOutOfRange { index: last.max(first), max: l });
    }
    let width = last - first + 1;
    let low = first - 1;
    let mut out = vec![0.0; 1 << width];
    let mask = (1usize << width) - 1;
    for (s, &p) in probs.iter().enumerate() {
        out[(s >> low) & mask] += p;
    }
    Ok(out)
}

/// `I(ell) = S(A) + S(B) - S(AB)` for the cut after site `ell`, from a full
/// distribution over the register. Pass `shots` to apply the occupancy
/// correction to all three entropies.
pub fn mutual_information(
    probs: &[f64],
    l: usize,
    ell: usize,
    shots: Option<u64>,
) -> Result<f64> {
    if ell == 0 || ell >= l {
        return Err(Error::SiteOutOfRange { index: ell, max: l - 1 });
    }
    let pa = marginal_probabilities(probs, l, 1, ell)?;
    let pb = marginal_probabilities(probs, l, ell + 1, l)?;
    let (sa, sb, sab) = match shots {
        None => (shannon_entropy(&pa)?, shannon_entropy(&pb)?, shannon_entropy(probs)?),
        Some(n) => (
            shannon_entropy_corrected(&pa, n)?,
            shannon_entropy_corrected(&pb, n)?,
            shannon_entropy_corrected(probs, n)?,
        ),
    };
    Ok(sa + sb - sab)
}

/// Mutual information at every cut `1..=L-1`.
pub fn mi_series(probs: &[f64], l: usize, shots: Option<u64>) -> Result<Vec<(usize, f64)>> {
    (1..l).map(|ell| Ok((ell, mutual_information(probs, l, ell, shots)?))).collect()
}

/// Entanglement entropy at every cut `1..=L-1`.
pub fn ee_series(state: &StateVector) -> Result<Vec<(usize, f64)>> {
    let l = state.num_sites();
    (1..l).map(|ell| Ok((ell, exact::entanglement_entropy(state, ell)?))).collect()
}

/// Chord coordinate for mutual-information fits:
/// `(1/4) ln((L/pi) sin(pi ell / L))`.
pub fn chord_x_mi(l: usize, ell: usize) -> f64 {
    0.25 * ((l as f64 / PI) * (PI * ell as f64 / l as f64).sin()).ln()
}

/// Chord coordinate for entanglement-entropy fits, slope 1/3 instead of 1/4.
pub fn chord_x_ee(l: usize, ell: usize) -> f64 {
    ((l as f64 / PI) * (PI * ell as f64 / l as f64).sin()).ln() / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralChargeFit {
    pub c: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    pub points: usize,
}

fn fit_against_chord(
    series: &[(usize, f64)],
    l: usize,
    window: Option<(usize, usize)>,
    x_of: fn(usize, usize) -> f64,
) -> Result<CentralChargeFit> {
    let (lo, hi) = window.unwrap_or((1, l - 1));
    if lo == 0 || hi >= l || lo > hi {
        return Err(Error::InvalidConfig(format!("bad fit window [{lo}, {hi}] for L = {l}")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(ell, v) in series {
        if ell < lo || ell > hi {
            continue;
        }
        xs.push(x_of(l, ell));
        ys.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::Numerics("central-charge fit needs at least 2 points".into()));
    }
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    Ok(CentralChargeFit { c: slope, intercept, window: (lo, hi), points: xs.len() })
}

/// Central charge from a mutual-information profile: the slope of `I(ell)`
/// against the chord coordinate. The window defaults to every cut; the
/// boundary cuts carry the largest finite-size corrections but dropping
/// them is a caller's choice, not a hidden default.
pub fn fit_central_charge(
    mi: &[(usize, f64)],
    l: usize,
    window: Option<(usize, usize)>,
) -> Result<CentralChargeFit> {
    fit_against_chord(mi, l, window, chord_x_mi)
}

/// Central charge from an entanglement-entropy profile.
pub fn fit_central_charge_ee(
    ee: &[(usize, f64)],
    l: usize,
    window: Option<(usize, usize)>,
) -> Result<CentralChargeFit> {
    fit_against_chord(ee, l, window, chord_x_ee)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticExtrapolation {
    /// Value at `1/L -> 0`.
    pub limit: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl QuadraticExtrapolation {
    pub fn evaluate(&self, l: f64) -> f64 {
        self.limit + self.linear / l + self.quadratic / (l * l)
    }
}

/// Least-squares fit of `y(L) = limit + linear/L + quadratic/L^2` through
/// the per-size values, by the 3x3 normal equations.
pub fn extrapolate_quadratic(sizes: &[usize], values: &[f64]) -> Result<QuadraticExtrapolation> {
    if sizes.len() != values.len() {
        return Err(Error::LengthMismatch { left: sizes.len(), right: values.len() });
    }
    if sizes.len() < 3 {
        return Err(Error::Numerics("quadratic extrapolation needs at least 3 sizes".into()));
    }
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (&l, &y) in sizes.iter().zip(values) {
        if l == 0 {
            return Err(Error::InvalidModel("size 0 in extrapolation".into()));
        }
        let u = 1.0 / l as f64;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            b[i] += basis[i] * y;
        }
    }
    let x = solve3(a, b)?;
    Ok(QuadraticExtrapolation { limit: x[0], linear: x[1], quadratic: x[2] })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    // Gaussian elimination with partial pivoting on a 3x3 system
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::Numerics("singular system in extrapolation".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{eigensolve, lanczos_ground, LanczosOptions};
    use crate::model::{build_hamiltonian, BoundaryCondition, ModelSpec};
    use crate::rng::{self, streams};
    use crate::sim::{measure, plus_state};

    #[test]
    fn shannon_entropy_fixture() {
        let s = shannon_entropy(&[0.25, 0.75]).unwrap();
        assert!((s - 0.5623351446188083).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!(shannon_entropy(&[-0.1, 1.1]).is_err());
    }

    #[test]
    fn power_law_fit_recovers_exact_scaling() {
        let series: Vec<(usize, f64)> =
            (1..=9).map(|r| (r, -2.5 * (r as f64).powf(-1.37))).collect();
        let fit = fit_power_law(&series, None).unwrap();
        assert!((fit.exponent + 1.37).abs() < 1e-12);
        assert!((fit.log_amplitude - 2.5f64.ln()).abs() < 1e-12);
        assert_eq!(fit.points, 9);
        // windowing drops points
        let fit = fit_power_law(&series, Some((2, 5))).unwrap();
        assert_eq!(fit.points, 4);
        assert!(fit_power_law(&series[..2], None).is_err());
    }

    #[test]
    fn quadratic_extrapolation_recovers_coefficients() {
        let sizes = [7usize, 9, 11, 13];
        let truth = QuadraticExtrapolation { limit: 0.7, linear: 1.3, quadratic: -4.2 };
        let values: Vec<f64> = sizes.iter().map(|&l| truth.evaluate(l as f64)).collect();
        let fit = extrapolate_quadratic(&sizes, &values).unwrap();
        assert!((fit.limit - 0.7).abs() < 1e-10);
        assert!((fit.linear - 1.3).abs() < 1e-9);
        assert!((fit.quadratic + 4.2).abs() < 1e-8);
        assert!(extrapolate_quadratic(&sizes[..2], &values[..2]).is_err());
    }

    #[test]
    fn product_state_has_zero_mutual_information() {
        let probs = basis_probabilities(&plus_state(4), Letter::Z).unwrap();
        for ell in 1..4 {
            let i = mutual_information(&probs, 4, ell, None).unwrap();
            assert!(i.abs() < 1e-12);
        }
        // and measuring along its own axis gives a deterministic outcome
        let probs = basis_probabilities(&plus_state(4), Letter::X).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_is_symmetric_and_nonnegative_on_the_ground_state() {
        let spec = ModelSpec::tricritical(8, BoundaryCondition::Periodic).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let ground = eigensolve(&h, true).unwrap().state(0).unwrap();
        for letter in [Letter::Z, Letter::X] {
            let probs = basis_probabilities(&ground, letter).unwrap();
            let series = mi_series(&probs, 8, None).unwrap();
            for &(ell, v) in &series {
                assert!(v > 0.0, "I({ell}) = {v}");
                let mirror = series[8 - ell - 1].1;
                assert!((v - mirror).abs() < 1e-10, "asymmetry at {ell}");
            }
        }
    }

    /// The frozen thirteen-site profile: mutual information in both bases,
    /// the entropy profile, and the three central-charge slopes over the
    /// full window.
    #[test]
    fn thirteen_site_profiles_and_charges() {
        let spec = ModelSpec::tricritical(13, BoundaryCondition::Periodic).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let (_, ground) = lanczos_ground(&h, &LanczosOptions::default()).unwrap();

        let px = basis_probabilities(&ground, Letter::X).unwrap();
        let ix = mi_series(&px, 13, None).unwrap();
        let expect_x = [
            0.5099614930, 0.6203444152, 0.6865473240, 0.7262510390, 0.7492467678, 0.7598593575,
        ];
        for (ell, want) in (1..=6).zip(expect_x) {
            assert!((ix[ell - 1].1 - want).abs() < 1e-8, "I_X({ell})");
        }

        let pz = basis_probabilities(&ground, Letter::Z).unwrap();
        let iz = mi_series(&pz, 13, None).unwrap();
        let expect_z = [
            0.3391159950, 0.4784767084, 0.5617126062, 0.6105283336, 0.6379328272, 0.6503307784,
        ];
        for (ell, want) in (1..=6).zip(expect_z) {
            assert!((iz[ell - 1].1 - want).abs() < 1e-8, "I_Z({ell})");
        }

        let ee = ee_series(&ground).unwrap();
        let expect_ee = [
            0.5099614930, 0.7057515344, 0.7939326812, 0.8461736614, 0.8766770826, 0.8909101080,
        ];
        for (ell, want) in (1..=6).zip(expect_ee) {
            assert!((ee[ell - 1].1 - want).abs() < 1e-8, "S({ell})");
        }

        let cx = fit_central_charge(&ix, 13, None).unwrap();
        assert!((cx.c - 0.70639039).abs() < 1e-7);
        assert!((cx.intercept - 0.50922219).abs() < 1e-7);
        let cz = fit_central_charge(&iz, 13, None).unwrap();
        assert!((cz.c - 0.88125182).abs() < 1e-7);
        let cee = fit_central_charge_ee(&ee, 13, None).unwrap();
        assert!((cee.c - 0.79895678).abs() < 1e-7);
    }

    /// Frozen eight-site open-chain correlator series from site 1, plus the
    /// two power-law exponents over the full separation window.
    #[test]
    fn correlator_series_and_exponents() {
        use crate::model::CorrelatorKind;

        let spec = ModelSpec::tricritical(8, BoundaryCondition::Open).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let ground = eigensolve(&h, true).unwrap().state(0).unwrap();

        let c = correlator_series(CorrelatorKind::C, &spec, &ground, 1).unwrap();
        let expect_c = [
            -2.7174358099,
            -1.4669411594,
            -0.5707621699,
            -0.3608547990,
            -0.2588272261,
            -0.1643332523,
            -0.1665130044,
        ];
        for (&(r, v), want) in c.iter().zip(expect_c) {
            assert!((v - want).abs() < 1e-8, "C at separation {r}");
        }

        let d = correlator_series(CorrelatorKind::D, &spec, &ground, 1).unwrap();
        let expect_d = [
            -0.9002146470,
            0.5086880889,
            0.0035445190,
            0.0155727463,
            0.0063724498,
            0.0019986282,
            0.0032934302,
        ];
        for (&(r, v), want) in d.iter().zip(expect_d) {
            assert!((v - want).abs() < 1e-8, "D at separation {r}");
        }

        let fc = fit_power_law(&c, None).unwrap();
        assert!((fc.exponent + 1.5616).abs() < 5e-4, "C exponent {}", fc.exponent);
        let fd = fit_power_law(&d, None).unwrap();
        assert!((fd.exponent + 3.2884).abs() < 5e-4, "D exponent {}", fd.exponent);
    }

    #[test]
    fn occupancy_correction_beats_the_plugin_estimate() {
        // sampled mutual information is biased upward by sparse histograms;
        // the corrected estimator must land closer to the exact value
        let spec = ModelSpec::tricritical(8, BoundaryCondition::Periodic).unwrap();
        let h = build_hamiltonian(&spec, false).unwrap();
        let ground = eigensolve(&h, true).unwrap().state(0).unwrap();
        let probs = basis_probabilities(&ground, Letter::X).unwrap();
        let exact_i = mutual_information(&probs, 8, 4, None).unwrap();

        let basis = MeasurementBasis::uniform(8, Letter::X).unwrap();
        let shots = 20_000u64;
        let counts =
            measure(&ground, &basis, shots, 17, &mut rng::derive(17, streams::SAMPLING)).unwrap();
        let sampled = probabilities_from_counts(&counts);
        let plugin = mutual_information(&sampled, 8, 4, None).unwrap();
        let corrected = mutual_information(&sampled, 8, 4, Some(shots)).unwrap();
        assert!(
            (corrected - exact_i).abs() < (plugin - exact_i).abs(),
            "plugin {plugin:.6}, corrected {corrected:.6}, exact {exact_i:.6}"
        );
    }
}
