//! Time-bin-qubit Bell-state analysis at a 50:50 splitter: projections onto
//! the antisymmetric state (an early click on one detector, a late click on
//! the other), closed forms for attenuated and single-photon sources, an exact
//! truncated-Fock route over the four output modes, storage-channel bounds,
//! and fidelity inference from measured error rates.

use num_complex::Complex64;

use crate::detect::{click_probability, Detector};
use crate::error::{require_nonnegative, Error, Result};
use crate::numeric::phase_average;
use crate::photonstat::{SourceKind, SourcePulse, TruncationPolicy};
use crate::synth::{fit_points, FitModel, FitResult};

/// Qubit encoded in early/late temporal modes with amplitudes cos(theta/2)
/// and e^(i phi) sin(theta/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBinQubit {
    theta: f64,
    phi: f64,
}

impl TimeBinQubit {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
            return Err(Error::Domain(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        crate::error::require_finite("phi", phi)?;
        Ok(Self {
            theta,
            phi: phi.rem_euclid(2.0 * std::f64::consts::PI),
        })
    }

    /// |e>: photon in the early bin.
    pub fn early() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// |l>: photon in the late bin.
    pub fn late() -> Self {
        Self {
            theta: std::f64::consts::PI,
            phi: 0.0,
        }
    }

    /// (|e> + |l>)/sqrt(2).
    pub fn plus() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }

    /// (|e> - |l>)/sqrt(2).
    pub fn minus() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: std::f64::consts::PI,
        }
    }

    /// Equal superposition with relative phase `phi`.
    pub fn superposition(phi: f64) -> Result<Self> {
        Self::new(std::f64::consts::FRAC_PI_2, phi)
    }

    /// The orthogonal state on the Bloch sphere.
    pub fn orthogonal(&self) -> Self {
        Self {
            theta: std::f64::consts::PI - self.theta,
            phi: (self.phi + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Storage channel that returns the stored state with probability F and its
/// orthogonal complement otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryChannel {
    fidelity: f64,
}

impl MemoryChannel {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(fidelity.is_finite() && (0.5..=1.0).contains(&fidelity)) {
            return Err(Error::Domain(format!(
                "storage fidelity must lie in [0.5, 1], got {fidelity}"
            )));
        }
        Ok(Self { fidelity })
    }

    /// Best classical (measure-and-reprepare) storage.
    pub fn best_classical() -> Self {
        Self { fidelity: 2.0 / 3.0 }
    }

    pub fn perfect() -> Self {
        Self { fidelity: 1.0 }
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }
}

/// Outcome of comparing parallel against orthogonal qubit pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmResult {
    pub p_parallel: f64,
    pub p_orthogonal: f64,
    pub error_rate: f64,
    pub visibility: f64,
}

/// Assemble error rate and visibility from the two projection probabilities.
pub fn bsm_result(p_parallel: f64, p_orthogonal: f64) -> Result<BsmResult> {
    let error_rate = error_rate(p_parallel, p_orthogonal)?;
    if p_orthogonal <= 0.0 {
        return Err(Error::Undefined(
            "visibility is undefined when the orthogonal projection probability is zero".into(),
        ));
    }
    Ok(BsmResult {
        p_parallel,
        p_orthogonal,
        error_rate,
        visibility: (p_orthogonal - p_parallel) / p_orthogonal,
    })
}

/// Unnormalized antisymmetric-projection weight for two attenuated,
/// phase-averaged pulses of equal mean photon number `mu`:
/// (mu^2 e^(-2mu) / 8) [4 sin^2((ta+tb)/2) + sin^2 ta + sin^2 tb
///                      - 2 sin ta sin tb (1 + cos(pa - pb))].
pub fn psi_minus_probability_attenuated(
    qa: &TimeBinQubit,
    qb: &TimeBinQubit,
    mu: f64,
) -> Result<f64> {
    require_nonnegative("mu", mu)?;
    let (ta, tb) = (qa.theta, qb.theta);
    let bracket = 4.0 * ((ta + tb) / 2.0).sin().powi(2) + ta.sin().powi(2) + tb.sin().powi(2)
        - 2.0 * ta.sin() * tb.sin() * (1.0 + (qa.phi - qb.phi).cos());
    Ok(mu * mu * (-2.0 * mu).exp() / 8.0 * bracket.max(0.0))
}

/// Unnormalized antisymmetric-projection weight for one photon per input:
/// (1/4)[sin^2((ta+tb)/2) + sin^2((ta-tb)/2) - sin ta sin tb cos(pa - pb)].
pub fn psi_minus_probability_single_photon(qa: &TimeBinQubit, qb: &TimeBinQubit) -> f64 {
    let (ta, tb) = (qa.theta, qb.theta);
    let value = 0.25
        * (((ta + tb) / 2.0).sin().powi(2) + ((ta - tb) / 2.0).sin().powi(2)
            - ta.sin() * tb.sin() * (qa.phi - qb.phi).cos());
    value.max(0.0)
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Single-photon output-mode amplitudes over (ce, cl, de, dl) for a qubit
/// entering port a or port b of a 50:50 splitter.
fn mode_amplitudes(q: &TimeBinQubit, from_port_a: bool) -> [Complex64; 4] {
    let c = (q.theta / 2.0).cos();
    let s = (q.theta / 2.0).sin();
    let late = Complex64::from_polar(s, q.phi);
    let i = Complex64::new(0.0, 1.0);
    let t = Complex64::new(INV_SQRT2, 0.0);
    let r = i * INV_SQRT2;
    if from_port_a {
        [t * c, t * late, r * c, r * late]
    } else {
        [r * c, r * late, t * c, t * late]
    }
}

/// Probability of registering an antisymmetric-projection pattern (early
/// click on one detector and late click on the other, both orders counted),
/// from the full truncated-Fock expansion over the four output modes of a
/// 50:50 splitter with photon statistics mixed per source. Converges to the
/// closed forms as the mean photon numbers vanish.
pub fn psi_minus_probability_exact(
    qa: &TimeBinQubit,
    qb: &TimeBinQubit,
    source_a: &SourcePulse,
    source_b: &SourcePulse,
    d1: &Detector,
    d2: &Detector,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let pa = source_pmf_checked(source_a, policy)?;
    let pb = source_pmf_checked(source_b, policy)?;
    let u = mode_amplitudes(qa, true);
    let v = mode_amplitudes(qb, false);

    let max_total = pa.max_n() + pb.max_n();
    let u_pows = mode_power_table(&u, max_total);
    let v_pows = mode_power_table(&v, max_total);
    let ln_fact: Vec<f64> = {
        let mut t = Vec::with_capacity(max_total + 2);
        t.push(0.0);
        for k in 1..=max_total + 1 {
            t.push(t[k - 1] + (k as f64).ln());
        }
        t
    };

    const WEIGHT_SKIP: f64 = 1e-18;
    let mut total = 0.0;
    for (n, &wa) in pa.probs().iter().enumerate() {
        for (m, &wb) in pb.probs().iter().enumerate() {
            let w = wa * wb;
            if w < WEIGHT_SKIP {
                continue;
            }
            total += w * pattern_probability(n, m, &u_pows, &v_pows, &ln_fact, d1, d2);
        }
    }
    Ok(total)
}

fn source_pmf_checked(
    source: &SourcePulse,
    policy: &TruncationPolicy,
) -> Result<crate::photonstat::PhotonNumberPMF> {
    let pmf = source.pmf(policy)?;
    if matches!(source.kind(), SourceKind::PhaseAveragedCoherent)
        && pmf.tail_bound() > policy.epsilon()
    {
        return Err(Error::Capacity {
            module: "bsm",
            detail: format!(
                "source of mean {} hit the hard cap {} before reaching epsilon {}",
                source.mean_photons(),
                policy.hard_cap(),
                policy.epsilon()
            ),
            tail: pmf.tail_bound(),
        });
    }
    Ok(pmf)
}

fn mode_power_table(amps: &[Complex64; 4], max_power: usize) -> [Vec<Complex64>; 4] {
    std::array::from_fn(|i| {
        let mut col = Vec::with_capacity(max_power + 1);
        col.push(Complex64::new(1.0, 0.0));
        for p in 1..=max_power {
            let prev = col[p - 1];
            col.push(prev * amps[i]);
        }
        col
    })
}

/// Pattern probability for Fock inputs of n and m photons carrying the two
/// qubit envelopes: expand (sum_i u_i o_i^+)^n (sum_i v_i o_i^+)^m over the
/// four-mode occupation basis and weigh each occupation by its click pattern.
fn pattern_probability(
    n: usize,
    m: usize,
    u_pows: &[Vec<Complex64>; 4],
    v_pows: &[Vec<Complex64>; 4],
    ln_fact: &[f64],
    d1: &Detector,
    d2: &Detector,
) -> f64 {
    let total = n + m;
    if total == 0 {
        // No photons: only dark clicks can fire the pattern.
        let dark_pattern = |da: &Detector, db: &Detector| da.dark() * db.dark();
        return dark_pattern(d1, d2) + dark_pattern(d1, d2);
    }
    let half_ln_nm = 0.5 * (ln_fact[n] + ln_fact[m]);
    let click1: Vec<f64> = (0..=total).map(|k| click_probability(k, d1)).collect();
    let click2: Vec<f64> = (0..=total).map(|k| click_probability(k, d2)).collect();

    let mut acc = 0.0;
    for k1 in 0..=total {
        for k2 in 0..=total - k1 {
            for k3 in 0..=total - k1 - k2 {
                let k4 = total - k1 - k2 - k3;
                let mut amp = Complex64::new(0.0, 0.0);
                for j1 in 0..=k1.min(n) {
                    for j2 in 0..=k2.min(n - j1) {
                        for j3 in 0..=k3.min(n - j1 - j2) {
                            let j4 = n - j1 - j2 - j3;
                            if j4 > k4 {
                                continue;
                            }
                            let (l1, l2, l3, l4) = (k1 - j1, k2 - j2, k3 - j3, k4 - j4);
                            let ln_coef = ln_fact[n] + ln_fact[m]
                                - ln_fact[j1]
                                - ln_fact[j2]
                                - ln_fact[j3]
                                - ln_fact[j4]
                                - ln_fact[l1]
                                - ln_fact[l2]
                                - ln_fact[l3]
                                - ln_fact[l4]
                                + 0.5 * (ln_fact[k1] + ln_fact[k2] + ln_fact[k3] + ln_fact[k4])
                                - half_ln_nm;
                            let term = u_pows[0][j1]
                                * u_pows[1][j2]
                                * u_pows[2][j3]
                                * u_pows[3][j4]
                                * v_pows[0][l1]
                                * v_pows[1][l2]
                                * v_pows[2][l3]
                                * v_pows[3][l4];
                            amp += term * ln_coef.exp();
                        }
                    }
                }
                let p = amp.norm_sqr();
                if p > 0.0 {
                    acc += p * (click1[k1] * click2[k4] + click1[k2] * click2[k3]);
                }
            }
        }
    }
    acc
}

/// Click probabilities of the antisymmetric pattern and of each detector for
/// two attenuated pulses, by averaging classical intensities over the uniform
/// relative phase. Semiclassical twin of the exact Fock route; also the
/// per-trial model used for Monte Carlo sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmClickProbabilities {
    pub psi_minus: f64,
    pub single_1: f64,
    pub single_2: f64,
}

/// Intensities in (ce, cl, de, dl) for relative source phase `chi`.
pub(crate) fn bsm_intensities(
    qa: &TimeBinQubit,
    qb: &TimeBinQubit,
    mu_a: f64,
    mu_b: f64,
    chi: f64,
) -> [f64; 4] {
    let u = mode_amplitudes(qa, true);
    let v = mode_amplitudes(qb, false);
    let alpha = Complex64::new(mu_a.sqrt(), 0.0);
    let beta = Complex64::from_polar(mu_b.sqrt(), chi);
    std::array::from_fn(|i| (alpha * u[i] + beta * v[i]).norm_sqr())
}

pub fn bsm_click_probabilities_phase_averaged(
    qa: &TimeBinQubit,
    qb: &TimeBinQubit,
    mu_a: f64,
    mu_b: f64,
    d1: &Detector,
    d2: &Detector,
) -> Result<BsmClickProbabilities> {
    require_nonnegative("mu_a", mu_a)?;
    require_nonnegative("mu_b", mu_b)?;
    let pattern = phase_average(|chi| {
        let i = bsm_intensities(qa, qb, mu_a, mu_b, chi);
        d1.click_probability_for_intensity(i[0]) * d2.click_probability_for_intensity(i[3])
            + d1.click_probability_for_intensity(i[1]) * d2.click_probability_for_intensity(i[2])
    })?;
    let single_1 = phase_average(|chi| {
        let i = bsm_intensities(qa, qb, mu_a, mu_b, chi);
        1.0 - (1.0 - d1.click_probability_for_intensity(i[0]))
            * (1.0 - d1.click_probability_for_intensity(i[1]))
    })?;
    let single_2 = phase_average(|chi| {
        let i = bsm_intensities(qa, qb, mu_a, mu_b, chi);
        1.0 - (1.0 - d2.click_probability_for_intensity(i[2]))
            * (1.0 - d2.click_probability_for_intensity(i[3]))
    })?;
    Ok(BsmClickProbabilities {
        psi_minus: pattern,
        single_1,
        single_2,
    })
}

/// Fraction of antisymmetric projections that occur for parallel inputs.
pub fn error_rate(p_parallel: f64, p_orthogonal: f64) -> Result<f64> {
    require_nonnegative("p_parallel", p_parallel)?;
    require_nonnegative("p_orthogonal", p_orthogonal)?;
    let sum = p_parallel + p_orthogonal;
    if sum == 0.0 {
        return Err(Error::Undefined(
            "error rate is undefined when both projection probabilities vanish".into(),
        ));
    }
    Ok(p_parallel / sum)
}

/// Error rate after one qubit passes a storage channel of fidelity F:
/// (F p_par + (1 - F) p_orth) / (p_par + p_orth).
pub fn apply_memory_channel(
    p_parallel: f64,
    p_orthogonal: f64,
    channel: &MemoryChannel,
) -> Result<f64> {
    require_nonnegative("p_parallel", p_parallel)?;
    require_nonnegative("p_orthogonal", p_orthogonal)?;
    let sum = p_parallel + p_orthogonal;
    if sum == 0.0 {
        return Err(Error::Undefined(
            "error rate is undefined when both projection probabilities vanish".into(),
        ));
    }
    let f = channel.fidelity();
    Ok((f * p_parallel + (1.0 - f) * p_orthogonal) / sum)
}

/// Measurement basis of a Bell-state error-rate measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmBasis {
    EarlyLate,
    PlusMinus,
}

/// What carried the qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmSource {
    Attenuated,
    SinglePhoton,
}

/// Invert the storage-channel bound to infer the memory fidelity from a
/// measured error rate. In the early/late basis (any source) and for single
/// photons F = 1 - e; for attenuated pulses in the +/- basis F = (3 - 4e)/2.
pub fn fidelity_from_error(e: f64, basis: BsmBasis, source: BsmSource) -> Result<f64> {
    if !(e.is_finite() && (0.0..=1.0).contains(&e)) {
        return Err(Error::Domain(format!(
            "error rate must lie in [0, 1], got {e}"
        )));
    }
    let f = match (basis, source) {
        (BsmBasis::EarlyLate, _) | (_, BsmSource::SinglePhoton) => 1.0 - e,
        (BsmBasis::PlusMinus, BsmSource::Attenuated) => (3.0 - 4.0 * e) / 2.0,
    };
    if !(0.5..=1.0).contains(&f) {
        return Err(Error::NoSolution(format!(
            "error rate {e} maps to fidelity {f} outside the physical range [0.5, 1]"
        )));
    }
    Ok(f)
}

/// The closed-form error-rate and fidelity bounds for quantum and classical
/// storage of one of the two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsmBounds {
    /// Best classical storage fidelity.
    pub classical_memory_fidelity: f64,
    /// Attenuated pulses, +/- basis, quantum memory.
    pub attenuated_plus_minus_quantum: f64,
    /// Attenuated pulses, +/- basis, classical memory.
    pub attenuated_plus_minus_classical: f64,
    /// Early/late basis, classical memory (any source).
    pub early_late_classical: f64,
    /// Single photons, classical memory (any basis).
    pub single_photon_classical: f64,
    /// Single photons, quantum memory.
    pub single_photon_quantum: f64,
}

impl BsmBounds {
    /// Rows of (name, value) for display.
    pub fn table(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("F_classical_memory", self.classical_memory_fidelity),
            ("e_attenuated_+/-_quantum", self.attenuated_plus_minus_quantum),
            (
                "e_attenuated_+/-_classical",
                self.attenuated_plus_minus_classical,
            ),
            ("e_early/late_classical", self.early_late_classical),
            ("e_single_photon_classical", self.single_photon_classical),
            ("e_single_photon_quantum", self.single_photon_quantum),
        ]
    }
}

pub fn classical_quantum_bounds() -> BsmBounds {
    let f_cm = 2.0 / 3.0;
    BsmBounds {
        classical_memory_fidelity: f_cm,
        attenuated_plus_minus_quantum: 0.25,
        attenuated_plus_minus_classical: (3.0 - 2.0 * f_cm) / 4.0,
        early_late_classical: 1.0 - f_cm,
        single_photon_classical: 1.0 - f_cm,
        single_photon_quantum: 0.0,
    }
}

/// Antisymmetric-projection curve against the relative phase between two
/// equal-superposition qubits, with a cosine fit, the fitted visibility, and
/// the error rate e = (1 - V)/(2 - V).
#[derive(Debug, Clone)]
pub struct BsmPhaseScan {
    pub curve: Vec<(f64, f64)>,
    pub fit: FitResult,
    pub visibility: f64,
    pub error_rate: f64,
}

pub fn bsm_phase_scan(mu: f64, phi_grid: &[f64]) -> Result<BsmPhaseScan> {
    if phi_grid.is_empty() {
        return Err(Error::Domain("phase grid is empty".into()));
    }
    let qa = TimeBinQubit::plus();
    let mut curve = Vec::with_capacity(phi_grid.len());
    for &dphi in phi_grid {
        let qb = TimeBinQubit::superposition(dphi)?;
        curve.push((dphi, psi_minus_probability_attenuated(&qa, &qb, mu)?));
    }
    let xs: Vec<f64> = curve.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let fit = fit_points(&xs, &ys, FitModel::Cosine)?;
    let visibility = fit.visibility;
    Ok(BsmPhaseScan {
        curve,
        fit,
        visibility,
        error_rate: (1.0 - visibility) / (2.0 - visibility),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn attenuated_closed_form_cases() {
        let mu: f64 = 0.37;
        let scale = mu * mu * (-2.0 * mu).exp();
        // Identical basis states project to zero.
        assert_eq!(
            psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::early(), mu)
                .unwrap(),
            0.0
        );
        // Opposite basis states: bracket = 4.
        assert_abs_diff_eq!(
            psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::late(), mu)
                .unwrap(),
            scale / 2.0,
            epsilon = 1e-15
        );
        // Superposition basis: parallel to orthogonal is 1:3.
        let p_par =
            psi_minus_probability_attenuated(&TimeBinQubit::plus(), &TimeBinQubit::plus(), mu)
                .unwrap();
        let p_orth =
            psi_minus_probability_attenuated(&TimeBinQubit::plus(), &TimeBinQubit::minus(), mu)
                .unwrap();
        assert_abs_diff_eq!(p_orth / p_par, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn xy_plane_specialization_agrees_with_general_formula() {
        let mu = 0.6;
        for k in 0..12 {
            let dphi = k as f64 * std::f64::consts::PI / 6.0;
            let qa = TimeBinQubit::plus();
            let qb = TimeBinQubit::superposition(dphi).unwrap();
            let general = psi_minus_probability_attenuated(&qa, &qb, mu).unwrap();
            let special = mu * mu * (-2.0 * mu).exp() / 4.0 * (2.0 - dphi.cos());
            assert_abs_diff_eq!(general, special, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_photon_closed_form_cases() {
        // Any parallel pair projects to zero.
        for q in [
            TimeBinQubit::early(),
            TimeBinQubit::late(),
            TimeBinQubit::plus(),
            TimeBinQubit::superposition(1.1).unwrap(),
        ] {
            assert!(psi_minus_probability_single_photon(&q, &q) < 1e-30);
        }
        // Substitution oracle: (e, l) gives 1/2, (+, -) gives 1/2.
        assert_abs_diff_eq!(
            psi_minus_probability_single_photon(&TimeBinQubit::early(), &TimeBinQubit::late()),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            psi_minus_probability_single_photon(&TimeBinQubit::plus(), &TimeBinQubit::minus()),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exact_route_reproduces_single_photon_forms() {
        let policy = TruncationPolicy::default();
        let ideal = Detector::ideal();
        let a = SourcePulse::fock(1);
        let cases = [
            (TimeBinQubit::early(), TimeBinQubit::late()),
            (TimeBinQubit::plus(), TimeBinQubit::minus()),
            (TimeBinQubit::plus(), TimeBinQubit::superposition(0.7).unwrap()),
        ];
        for (qa, qb) in cases {
            let exact =
                psi_minus_probability_exact(&qa, &qb, &a, &a, &ideal, &ideal, &policy).unwrap();
            let closed = psi_minus_probability_single_photon(&qa, &qb);
            assert_abs_diff_eq!(exact, closed, epsilon = 1e-12);
        }
        // Parallel single photons with ideal detectors never fire the pattern.
        let zero = psi_minus_probability_exact(
            &TimeBinQubit::plus(),
            &TimeBinQubit::plus(),
            &a,
            &a,
            &ideal,
            &ideal,
            &policy,
        )
        .unwrap();
        assert!(zero < 1e-30);
    }

    #[test]
    fn exact_route_converges_to_attenuated_closed_form() {
        let policy = TruncationPolicy::new(1e-14, 64).unwrap();
        let ideal = Detector::ideal();
        for &mu in &[1e-3, 1e-2] {
            let tol = if mu == 1e-3 { 0.01 } else { 0.05 };
            let a = SourcePulse::coherent(mu).unwrap();
            for (qa, qb) in [
                (TimeBinQubit::early(), TimeBinQubit::late()),
                (TimeBinQubit::plus(), TimeBinQubit::plus()),
                (TimeBinQubit::plus(), TimeBinQubit::minus()),
            ] {
                let exact =
                    psi_minus_probability_exact(&qa, &qb, &a, &a, &ideal, &ideal, &policy)
                        .unwrap();
                let closed = psi_minus_probability_attenuated(&qa, &qb, mu).unwrap();
                assert!(
                    (exact / closed - 1.0).abs() < tol,
                    "mu={mu}: ratio {}",
                    exact / closed
                );
            }
        }
    }

    #[test]
    fn exact_route_matches_phase_averaged_route() {
        let policy = TruncationPolicy::new(1e-14, 64).unwrap();
        let det = Detector::with_efficiency(0.7).unwrap();
        let mu = 0.6;
        let a = SourcePulse::coherent(mu).unwrap();
        for (qa, qb) in [
            (TimeBinQubit::early(), TimeBinQubit::late()),
            (TimeBinQubit::plus(), TimeBinQubit::minus()),
            (TimeBinQubit::plus(), TimeBinQubit::superposition(1.3).unwrap()),
            (TimeBinQubit::new(1.0, 0.4).unwrap(), TimeBinQubit::new(2.2, 5.0).unwrap()),
        ] {
            let exact =
                psi_minus_probability_exact(&qa, &qb, &a, &a, &det, &det, &policy).unwrap();
            let semi = bsm_click_probabilities_phase_averaged(&qa, &qb, mu, mu, &det, &det)
                .unwrap()
                .psi_minus;
            assert!(
                (exact - semi).abs() < 1e-9,
                "exact {exact} vs semiclassical {semi}"
            );
        }
    }

    #[test]
    fn error_rate_cases() {
        assert_eq!(error_rate(0.0, 0.4).unwrap(), 0.0);
        assert_abs_diff_eq!(error_rate(0.25, 0.75).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(error_rate(0.3, 0.3).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(error_rate(0.0, 0.0), Err(Error::Undefined(_))));
    }

    #[test]
    fn memory_channel_bounds() {
        let cm = MemoryChannel::best_classical();
        assert_abs_diff_eq!(
            apply_memory_channel(0.0, 1.0, &cm).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            apply_memory_channel(0.25, 0.75, &cm).unwrap(),
            5.0 / 12.0,
            epsilon = 1e-12
        );
        let perfect = MemoryChannel::perfect();
        assert_abs_diff_eq!(
            apply_memory_channel(0.25, 0.75, &perfect).unwrap(),
            error_rate(0.25, 0.75).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn channel_error_decreases_with_fidelity() {
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let f = 0.5 + 0.05 * i as f64;
            let e = apply_memory_channel(0.2, 0.8, &MemoryChannel::new(f).unwrap()).unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn basis_symmetry_of_error_rates() {
        let mu = 0.45;
        let p1 = psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::early(), mu).unwrap();
        let o1 = psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::late(), mu).unwrap();
        let p2 = psi_minus_probability_attenuated(&TimeBinQubit::late(), &TimeBinQubit::late(), mu).unwrap();
        let o2 = psi_minus_probability_attenuated(&TimeBinQubit::late(), &TimeBinQubit::early(), mu).unwrap();
        assert_abs_diff_eq!(
            error_rate(p1, o1).unwrap(),
            error_rate(p2, o2).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn fidelity_inversions() {
        assert_abs_diff_eq!(
            fidelity_from_error(0.039, BsmBasis::EarlyLate, BsmSource::Attenuated).unwrap(),
            0.961,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fidelity_from_error(0.287, BsmBasis::PlusMinus, BsmSource::Attenuated).unwrap(),
            0.926,
            epsilon = 1e-12
        );
        // e = 0 in the +/- basis with attenuated pulses is unphysical.
        assert!(matches!(
            fidelity_from_error(0.0, BsmBasis::PlusMinus, BsmSource::Attenuated),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn bounds_table_values() {
        let b = classical_quantum_bounds();
        assert_abs_diff_eq!(b.classical_memory_fidelity, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.attenuated_plus_minus_quantum, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b.attenuated_plus_minus_classical, 5.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.early_late_classical, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.single_photon_classical, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(b.single_photon_quantum, 0.0);
        assert_eq!(b.table().len(), 6);
    }

    #[test]
    fn phase_scan_noiseless_visibility() {
        let grid: Vec<f64> = (0..24)
            .map(|k| k as f64 * std::f64::consts::PI / 12.0)
            .collect();
        let scan = bsm_phase_scan(0.3, &grid).unwrap();
        assert_abs_diff_eq!(scan.visibility, 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(scan.error_rate, 0.25, epsilon = 1e-9);
        // The zero-phase point is the global minimum of the curve.
        let min = scan
            .curve
            .iter()
            .cloned()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(min.0, 0.0);
    }
}
