//! Two-pulse interference engine: mode overlaps of Gaussian pulses across
//! polarization, time, and frequency; exact coincidence and single-detector
//! visibilities via the Fock route; an independent phase-averaged intensity
//! oracle; and the low-mean-photon-number closed forms.

use num_complex::Complex64;

use crate::detect::{coincidence_probability, single_detector_probability, Detector};
use crate::error::{require_nonnegative, Error, Result};
use crate::photonstat::{SourceKind, SourcePulse, TruncationPolicy};
use crate::splitter::{
    coherent_joint_output, fock_output_distinguishable, fock_output_indistinguishable,
    BeamSplitter, JointOutputDistribution, OverlapParameter,
};

/// Fourier-limited product of intensity FWHM duration and intensity FWHM
/// bandwidth for a Gaussian pulse: 2 ln 2 / pi.
pub const TIME_BANDWIDTH_PRODUCT: f64 = 2.0 * std::f64::consts::LN_2 / std::f64::consts::PI;

/// Transform-limited Gaussian pulse. Durations and bandwidths are intensity
/// full widths at half maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    /// Intensity FWHM duration, seconds.
    pub duration_fwhm: f64,
    /// Carrier detuning from the common reference, Hz.
    pub carrier_offset: f64,
    /// Pulse-center arrival time, seconds.
    pub arrival_time: f64,
    /// Linear polarization angle, radians.
    pub polarization_angle: f64,
}

impl GaussianPulse {
    pub fn new(duration_fwhm: f64) -> Result<Self> {
        if !(duration_fwhm.is_finite() && duration_fwhm > 0.0) {
            return Err(Error::Domain(format!(
                "pulse duration must be positive, got {duration_fwhm}"
            )));
        }
        Ok(Self {
            duration_fwhm,
            carrier_offset: 0.0,
            arrival_time: 0.0,
            polarization_angle: 0.0,
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.duration_fwhm.is_finite() && self.duration_fwhm > 0.0) {
            return Err(Error::Domain(format!(
                "pulse duration must be positive, got {}",
                self.duration_fwhm
            )));
        }
        if !(self.carrier_offset.is_finite()
            && self.arrival_time.is_finite()
            && self.polarization_angle.is_finite())
        {
            return Err(Error::Domain("pulse parameters must be finite".into()));
        }
        Ok(())
    }

    /// Standard deviation of the intensity envelope.
    pub fn sigma(&self) -> f64 {
        self.duration_fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    /// Intensity FWHM of the pulse spectrum, assuming Fourier limit.
    pub fn bandwidth_fwhm(&self) -> f64 {
        TIME_BANDWIDTH_PRODUCT / self.duration_fwhm
    }
}

/// Result of a visibility computation: the coincidence (or single-detector)
/// probability for the nominally indistinguishable setting, the fully
/// distinguishable reference, and the visibility (reference - parallel) / reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomResult {
    pub p_parallel: f64,
    pub p_orthogonal: f64,
    pub visibility: f64,
}

impl HomResult {
    fn from_probabilities(p_parallel: f64, p_orthogonal: f64) -> Result<Self> {
        if p_orthogonal <= 0.0 {
            return Err(Error::Undefined(
                "visibility is undefined when the distinguishable-case probability is zero".into(),
            ));
        }
        Ok(Self {
            p_parallel,
            p_orthogonal,
            visibility: (p_orthogonal - p_parallel) / p_orthogonal,
        })
    }
}

/// Mode overlap of two pulses: |cos of the polarization difference| times the
/// magnitude of the normalized overlap integral of the complex envelopes,
/// evaluated on a time grid sized automatically for the requested resolution.
pub fn mode_overlap(p1: &GaussianPulse, p2: &GaussianPulse) -> Result<OverlapParameter> {
    let (span, feature) = overlap_grid_geometry(p1, p2)?;
    // 2^10 samples by default, grown until the step resolves the narrower
    // pulse (and any carrier beat) at 50 samples per feature width.
    let mut samples = 1usize << 10;
    while span / (samples - 1) as f64 > feature / 50.0 {
        samples *= 2;
        if samples > (1 << 22) {
            return Err(Error::Accuracy(
                "overlap grid would need more than 2^22 samples".into(),
            ));
        }
    }
    mode_overlap_with_samples(p1, p2, samples)
}

/// Mode overlap on a fixed grid of `samples` points. Errors if the grid step
/// does not resolve the narrower pulse to duration/50.
pub fn mode_overlap_with_samples(
    p1: &GaussianPulse,
    p2: &GaussianPulse,
    samples: usize,
) -> Result<OverlapParameter> {
    if samples < 2 {
        return Err(Error::Domain("overlap grid needs at least 2 samples".into()));
    }
    let (span, feature) = overlap_grid_geometry(p1, p2)?;
    let step = span / (samples - 1) as f64;
    if step > feature / 50.0 {
        return Err(Error::Accuracy(format!(
            "grid step {step:.3e} s exceeds {:.3e} s needed to resolve the pulses",
            feature / 50.0
        )));
    }

    let start = p1.arrival_time.min(p2.arrival_time) - 0.5 * (span - (p1.arrival_time - p2.arrival_time).abs());
    let mut inner = Complex64::new(0.0, 0.0);
    let (mut norm1, mut norm2) = (0.0, 0.0);
    for i in 0..samples {
        let t = start + i as f64 * step;
        let a1 = envelope(p1, t);
        let a2 = envelope(p2, t);
        inner += a1.conj() * a2;
        norm1 += a1.norm_sqr();
        norm2 += a2.norm_sqr();
    }
    let temporal = if norm1 > 0.0 && norm2 > 0.0 {
        inner.norm() / (norm1 * norm2).sqrt()
    } else {
        0.0
    };
    let pol = (p1.polarization_angle - p2.polarization_angle).cos().abs();
    OverlapParameter::new((pol * temporal).clamp(0.0, 1.0))
}

fn overlap_grid_geometry(p1: &GaussianPulse, p2: &GaussianPulse) -> Result<(f64, f64)> {
    p1.validate()?;
    p2.validate()?;
    let sigma_max = p1.sigma().max(p2.sigma());
    let dt = (p1.arrival_time - p2.arrival_time).abs();
    let span = dt + 12.0 * sigma_max;
    let fwhm_min = p1.duration_fwhm.min(p2.duration_fwhm);
    let dnu = (p1.carrier_offset - p2.carrier_offset).abs();
    let feature = if dnu > 0.0 {
        fwhm_min.min(0.5 / dnu)
    } else {
        fwhm_min
    };
    Ok((span, feature))
}

fn envelope(p: &GaussianPulse, t: f64) -> Complex64 {
    let s = p.sigma();
    let x = t - p.arrival_time;
    let amp = (-x * x / (4.0 * s * s)).exp();
    let phase = 2.0 * std::f64::consts::PI * p.carrier_offset * t;
    Complex64::from_polar(amp, phase)
}

/// Closed-form magnitude of the normalized overlap of two Gaussian envelopes;
/// internal oracle for the numerical grid integral.
#[allow(dead_code)]
pub(crate) fn gaussian_overlap_closed_form(p1: &GaussianPulse, p2: &GaussianPulse) -> f64 {
    let (s1, s2) = (p1.sigma(), p2.sigma());
    let ssum = s1 * s1 + s2 * s2;
    let dt = p1.arrival_time - p2.arrival_time;
    let dnu = 2.0 * std::f64::consts::PI * (p1.carrier_offset - p2.carrier_offset);
    ((2.0 * s1 * s2 / ssum).sqrt())
        * (-dt * dt / (4.0 * ssum)).exp()
        * (-dnu * dnu * s1 * s1 * s2 * s2 / ssum).exp()
}

/// Mean intensities at the two splitter outputs for relative phase `phi`
/// between the interfering (parallel) coherent components.
fn output_intensities(
    mu_a: f64,
    mu_b: f64,
    lambda: f64,
    bs: &BeamSplitter,
    phi: f64,
) -> (f64, f64) {
    let r = bs.reflection_amplitude();
    let t = bs.transmission_amplitude();
    let cross = 2.0 * r * t * lambda * (mu_a * mu_b).sqrt() * phi.sin();
    let i_c = t * t * mu_a + r * r * mu_b - cross;
    let i_d = r * r * mu_a + t * t * mu_b + cross;
    (i_c, i_d)
}

use crate::numeric::phase_average;

/// Coincidence probability for two phase-averaged coherent inputs, computed
/// by numerically averaging classical intensities over the uniform relative
/// phase. Independent of the Fock route and used as its cross-check.
pub fn coincidence_phase_averaged(
    mu_a: f64,
    mu_b: f64,
    lambda: OverlapParameter,
    bs: &BeamSplitter,
    d1: &Detector,
    d2: &Detector,
) -> Result<f64> {
    require_nonnegative("mu_a", mu_a)?;
    require_nonnegative("mu_b", mu_b)?;
    phase_average(|phi| {
        let (i_c, i_d) = output_intensities(mu_a, mu_b, lambda.value(), bs, phi);
        d1.click_probability_for_intensity(i_c) * d2.click_probability_for_intensity(i_d)
    })
}

/// Single-detector (output c) probability by the same phase-averaged route.
pub fn single_detector_phase_averaged(
    mu_a: f64,
    mu_b: f64,
    lambda: OverlapParameter,
    bs: &BeamSplitter,
    det: &Detector,
) -> Result<f64> {
    require_nonnegative("mu_a", mu_a)?;
    require_nonnegative("mu_b", mu_b)?;
    phase_average(|phi| {
        let (i_c, _) = output_intensities(mu_a, mu_b, lambda.value(), bs, phi);
        det.click_probability_for_intensity(i_c)
    })
}

/// Joint output distribution for a pair of sources with the given overlap.
/// Coherent pairs accept any overlap; Fock pairs are restricted to the fully
/// indistinguishable or fully distinguishable cases.
pub fn joint_output_sources(
    a: &SourcePulse,
    b: &SourcePulse,
    lambda: OverlapParameter,
    bs: &BeamSplitter,
    policy: &TruncationPolicy,
) -> Result<JointOutputDistribution> {
    match (a.kind(), b.kind()) {
        (SourceKind::PhaseAveragedCoherent, SourceKind::PhaseAveragedCoherent) => {
            coherent_joint_output(a.mean_photons(), b.mean_photons(), lambda, bs, policy)
        }
        (SourceKind::Fock(n), SourceKind::Fock(m)) => {
            if lambda.value() == 1.0 {
                fock_output_indistinguishable(n, m, bs)
            } else if lambda.value() == 0.0 {
                fock_output_distinguishable(n, m, bs)
            } else {
                Err(Error::Domain(
                    "partial mode overlap is only modeled for phase-averaged coherent inputs"
                        .into(),
                ))
            }
        }
        _ => Err(Error::Domain(
            "mixed Fock/coherent input pairs are not modeled".into(),
        )),
    }
}

/// Coincidence probability for a pair of sources via the Fock route.
pub fn coincidence_probability_sources(
    a: &SourcePulse,
    b: &SourcePulse,
    lambda: OverlapParameter,
    bs: &BeamSplitter,
    d1: &Detector,
    d2: &Detector,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let dist = joint_output_sources(a, b, lambda, bs, policy)?;
    Ok(coincidence_probability(&dist, d1, d2))
}

/// Coincidence visibility for a pair of sources: the parallel case is
/// evaluated at `lambda_parallel`, the reference at zero overlap.
pub fn hom_visibility_sources(
    a: &SourcePulse,
    b: &SourcePulse,
    lambda_parallel: OverlapParameter,
    bs: &BeamSplitter,
    d1: &Detector,
    d2: &Detector,
    policy: &TruncationPolicy,
) -> Result<HomResult> {
    let p_par = coincidence_probability_sources(a, b, lambda_parallel, bs, d1, d2, policy)?;
    let p_orth =
        coincidence_probability_sources(a, b, OverlapParameter::zero(), bs, d1, d2, policy)?;
    HomResult::from_probabilities(p_par, p_orth)
}

/// Coincidence visibility for two phase-averaged coherent inputs.
pub fn hom_visibility_exact(
    mu_a: f64,
    mu_b: f64,
    lambda_parallel: OverlapParameter,
    bs: &BeamSplitter,
    d1: &Detector,
    d2: &Detector,
    policy: &TruncationPolicy,
) -> Result<HomResult> {
    let a = SourcePulse::coherent(mu_a)?;
    let b = SourcePulse::coherent(mu_b)?;
    hom_visibility_sources(&a, &b, lambda_parallel, bs, d1, d2, policy)
}

/// Visibility of the interference as seen by a single detector, for equal
/// mean photon numbers at both inputs.
pub fn single_detector_visibility_exact(
    mu: f64,
    bs: &BeamSplitter,
    det: &Detector,
    policy: &TruncationPolicy,
) -> Result<HomResult> {
    let dist_par = coherent_joint_output(mu, mu, OverlapParameter::full(), bs, policy)?;
    let dist_orth = coherent_joint_output(mu, mu, OverlapParameter::zero(), bs, policy)?;
    let p_par = single_detector_probability(&dist_par, det);
    let p_orth = single_detector_probability(&dist_orth, det);
    HomResult::from_probabilities(p_par, p_orth)
}

/// Low-mean-photon-number closed forms for balanced inputs on a 50:50
/// splitter with equal detectors: the coincidence visibility is 1/2
/// independent of mu, and the single-detector visibility is
/// eta mu / (4 + 2 (4 - eta) mu).
pub fn closed_form_visibilities(mu: f64, eta: f64) -> Result<(f64, f64)> {
    require_nonnegative("mu", mu)?;
    crate::error::require_in_unit("eta", eta)?;
    let v11 = 0.5;
    let v1x = eta * mu / (4.0 + 2.0 * (4.0 - eta) * mu);
    Ok((v11, v1x))
}

/// Inverts the single-detector closed form to estimate the mean photon
/// number per pulse from an observed single-detector visibility.
pub fn infer_mu_from_single_visibility(v1x: f64, eta: f64) -> Result<f64> {
    crate::error::require_in_unit("eta", eta)?;
    require_nonnegative("v1x", v1x)?;
    let supremum = eta / (2.0 * (4.0 - eta));
    if v1x >= supremum {
        return Err(Error::NoSolution(format!(
            "single-detector visibility {v1x} is at or above the closed form's supremum {supremum:.6}"
        )));
    }
    Ok(4.0 * v1x / (eta - 2.0 * (4.0 - eta) * v1x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn pulse_8ns() -> GaussianPulse {
        GaussianPulse::new(8e-9).unwrap()
    }

    #[test]
    fn identical_pulses_overlap_fully() {
        let p = pulse_8ns();
        let l = mode_overlap(&p, &p).unwrap();
        assert_abs_diff_eq!(l.value(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_polarizations_do_not_overlap() {
        let p1 = pulse_8ns();
        let mut p2 = pulse_8ns();
        p2.polarization_angle = std::f64::consts::FRAC_PI_2;
        let l = mode_overlap(&p1, &p2).unwrap();
        assert_abs_diff_eq!(l.value(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fwhm_delay_halves_the_overlap() {
        // exp(-dt^2/(8 sigma^2)) with dt = FWHM = 2 sigma sqrt(2 ln 2) is 1/2.
        let p1 = pulse_8ns();
        let mut p2 = pulse_8ns();
        p2.arrival_time = p2.duration_fwhm;
        let l = mode_overlap(&p1, &p2).unwrap();
        assert_abs_diff_eq!(l.value(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn numeric_overlap_matches_closed_form() {
        let mut p1 = pulse_8ns();
        p1.carrier_offset = 12e6;
        for (dt, dnu, s2) in [
            (3e-9, 0.0, 8e-9),
            (0.0, 40e6, 8e-9),
            (5e-9, 25e6, 8e-9),
            (2e-9, 10e6, 19e-9),
        ] {
            let p2 = GaussianPulse {
                duration_fwhm: s2,
                carrier_offset: p1.carrier_offset + dnu,
                arrival_time: dt,
                polarization_angle: 0.0,
            };
            let numeric = mode_overlap(&p1, &p2).unwrap().value();
            let closed = gaussian_overlap_closed_form(&p1, &p2);
            assert_abs_diff_eq!(numeric, closed, epsilon = 1e-9);
        }
    }

    #[test]
    fn coarse_grid_is_an_accuracy_error() {
        let p = pulse_8ns();
        assert!(matches!(
            mode_overlap_with_samples(&p, &p, 16),
            Err(Error::Accuracy(_))
        ));
    }

    #[test]
    fn dark_vacuum_coincidences_are_dark_products() {
        let d = Detector::new(0.7, 0.125).unwrap();
        let p = coincidence_phase_averaged(
            0.0,
            0.0,
            OverlapParameter::full(),
            &BeamSplitter::balanced(),
            &d,
            &d,
        )
        .unwrap();
        assert_abs_diff_eq!(p, 0.125 * 0.125, epsilon = 1e-12);
        let ideal = Detector::with_efficiency(0.7).unwrap();
        let p0 = coincidence_phase_averaged(
            0.0,
            0.0,
            OverlapParameter::full(),
            &BeamSplitter::balanced(),
            &ideal,
            &ideal,
        )
        .unwrap();
        assert_eq!(p0, 0.0);
    }

    #[test]
    fn leading_order_coincidences_match_simplified_model() {
        // Parallel: eta^2 mu^2 / 2; orthogonal: eta^2 mu^2, up to O(mu^3).
        let mu = 1e-4;
        let eta = 0.31;
        let bs = BeamSplitter::balanced();
        let det = Detector::with_efficiency(eta).unwrap();
        let p_par =
            coincidence_phase_averaged(mu, mu, OverlapParameter::full(), &bs, &det, &det).unwrap();
        let p_orth =
            coincidence_phase_averaged(mu, mu, OverlapParameter::zero(), &bs, &det, &det).unwrap();
        let expected_par = eta * eta * mu * mu / 2.0;
        let expected_orth = eta * eta * mu * mu;
        assert!((p_par - expected_par).abs() < 1e-3 * expected_par);
        assert!((p_orth - expected_orth).abs() < 1e-3 * expected_orth);
    }

    #[test]
    fn fock_and_phase_averaged_routes_agree() {
        let policy = TruncationPolicy::new(1e-14, 64).unwrap();
        let bs = BeamSplitter::balanced();
        for &lambda in &[0.0, 1.0] {
            for &(mu_a, mu_b) in &[(0.1, 0.1), (0.6, 0.6), (2.0, 0.6)] {
                for &eta in &[0.3, 1.0] {
                    let det = Detector::with_efficiency(eta).unwrap();
                    let l = OverlapParameter::new(lambda).unwrap();
                    let fock = coincidence_probability_sources(
                        &SourcePulse::coherent(mu_a).unwrap(),
                        &SourcePulse::coherent(mu_b).unwrap(),
                        l,
                        &bs,
                        &det,
                        &det,
                        &policy,
                    )
                    .unwrap();
                    let oracle =
                        coincidence_phase_averaged(mu_a, mu_b, l, &bs, &det, &det).unwrap();
                    assert!(
                        (fock - oracle).abs() <= 1e-9,
                        "mu=({mu_a},{mu_b}) lambda={lambda} eta={eta}: {fock} vs {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn partial_overlap_routes_agree_too() {
        let policy = TruncationPolicy::new(1e-14, 64).unwrap();
        let bs = BeamSplitter::from_reflectance(0.4).unwrap();
        let d1 = Detector::with_efficiency(0.7).unwrap();
        let d2 = Detector::with_efficiency(0.55).unwrap();
        let l = OverlapParameter::new(0.6).unwrap();
        let fock = coincidence_probability_sources(
            &SourcePulse::coherent(0.8).unwrap(),
            &SourcePulse::coherent(1.3).unwrap(),
            l,
            &bs,
            &d1,
            &d2,
            &policy,
        )
        .unwrap();
        let oracle = coincidence_phase_averaged(0.8, 1.3, l, &bs, &d1, &d2).unwrap();
        assert!((fock - oracle).abs() <= 1e-9);
    }

    #[test]
    fn visibility_is_half_at_low_mu() {
        let det = Detector::with_efficiency(0.7).unwrap();
        let res = hom_visibility_exact(
            1e-3,
            1e-3,
            OverlapParameter::full(),
            &BeamSplitter::balanced(),
            &det,
            &det,
            &policy(),
        )
        .unwrap();
        assert_abs_diff_eq!(res.visibility, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn imbalanced_inputs_follow_the_imbalance_law() {
        let det = Detector::with_efficiency(0.7).unwrap();
        let (mu_b, ratio) = (1e-3, 2.0);
        let mu_a = ratio * mu_b;
        let res = hom_visibility_exact(
            mu_a,
            mu_b,
            OverlapParameter::full(),
            &BeamSplitter::balanced(),
            &det,
            &det,
            &policy(),
        )
        .unwrap();
        let expected = 2.0 * mu_a * mu_b / ((mu_a + mu_b) * (mu_a + mu_b));
        assert_abs_diff_eq!(expected, 4.0 / 9.0, epsilon = 1e-15);
        assert!((res.visibility - expected).abs() < 0.01 * expected);
    }

    #[test]
    fn visibility_scales_with_overlap_squared() {
        let det = Detector::with_efficiency(0.05).unwrap();
        let bs = BeamSplitter::balanced();
        for &l in &[0.25, 0.5, 0.75, 1.0] {
            let res = hom_visibility_exact(
                1e-3,
                1e-3,
                OverlapParameter::new(l).unwrap(),
                &bs,
                &det,
                &det,
                &policy(),
            )
            .unwrap();
            let expected = l * l / 2.0;
            assert!(
                (res.visibility - expected).abs() < 0.01 * expected,
                "lambda {l}: {} vs {}",
                res.visibility,
                expected
            );
        }
        let res_zero = hom_visibility_exact(
            1e-3,
            1e-3,
            OverlapParameter::zero(),
            &bs,
            &det,
            &det,
            &policy(),
        )
        .unwrap();
        assert_abs_diff_eq!(res_zero.visibility, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_photons_interfere_perfectly() {
        let res = hom_visibility_sources(
            &SourcePulse::fock(1),
            &SourcePulse::fock(1),
            OverlapParameter::full(),
            &BeamSplitter::balanced(),
            &Detector::ideal(),
            &Detector::ideal(),
            &policy(),
        )
        .unwrap();
        assert_eq!(res.p_parallel, 0.0);
        assert_abs_diff_eq!(res.p_orthogonal, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(res.visibility, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coincidence_visibility_degrades_monotonically_in_mu() {
        let det = Detector::ideal();
        let bs = BeamSplitter::balanced();
        let policy = policy();
        let mut prev = f64::INFINITY;
        for &mu in &[0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0] {
            let v = hom_visibility_exact(
                mu,
                mu,
                OverlapParameter::full(),
                &bs,
                &det,
                &det,
                &policy,
            )
            .unwrap()
            .visibility;
            assert!(v <= prev + 1e-12, "visibility rose at mu={mu}");
            prev = v;
        }
    }

    #[test]
    fn single_detector_visibility_limits() {
        let bs = BeamSplitter::balanced();
        let policy = policy();
        // mu -> 0 drives the visibility to zero.
        let tiny = single_detector_visibility_exact(
            1e-6,
            &bs,
            &Detector::with_efficiency(0.7).unwrap(),
            &policy,
        )
        .unwrap();
        assert!(tiny.visibility < 1e-6);
        // So does eta -> 0.
        let blind = single_detector_visibility_exact(
            0.5,
            &bs,
            &Detector::with_efficiency(1e-6).unwrap(),
            &policy,
        )
        .unwrap();
        assert!(blind.visibility < 1e-6);
    }

    #[test]
    fn closed_forms_evaluate_as_stated() {
        let (v11, v1x) = closed_form_visibilities(0.5, 0.7).unwrap();
        assert_eq!(v11, 0.5);
        assert_abs_diff_eq!(v1x, 0.35 / 7.3, epsilon = 1e-15);
        let (_, v1x52) = closed_form_visibilities(0.52, 0.7).unwrap();
        assert_abs_diff_eq!(v1x52, 0.0490, epsilon = 1e-4);
        let (_, v0) = closed_form_visibilities(0.0, 0.9).unwrap();
        assert_eq!(v0, 0.0);
    }

    #[test]
    fn mu_inference_round_trips() {
        let eta = 0.7;
        for &mu in &[0.05, 0.5, 2.0] {
            let (_, v1x) = closed_form_visibilities(mu, eta).unwrap();
            let back = infer_mu_from_single_visibility(v1x, eta).unwrap();
            assert!((back - mu).abs() < 1e-9);
        }
        assert_eq!(infer_mu_from_single_visibility(0.0, eta).unwrap(), 0.0);
        assert!(matches!(
            infer_mu_from_single_visibility(0.2, eta),
            Err(Error::NoSolution(_))
        ));
    }
}
