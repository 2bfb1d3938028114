//! Built-in verification suite: every check pins a quantitative claim of the
//! model with an explicit tolerance and a runtime budget. The CLI `validate`
//! subcommand and the acceptance test target both run exactly this list.

use std::time::Instant;

use crate::afcmem::{visibility_vs_bandwidth, AfcMemory};
use crate::bsm::{
    bsm_phase_scan, classical_quantum_bounds, error_rate, fidelity_from_error,
    psi_minus_probability_attenuated, psi_minus_probability_exact, BsmBasis, BsmSource,
    TimeBinQubit,
};
use crate::detect::Detector;
use crate::error::Result;
use crate::hom::{
    closed_form_visibilities, coincidence_phase_averaged, coincidence_probability_sources,
    hom_visibility_exact, hom_visibility_sources, infer_mu_from_single_visibility,
    single_detector_visibility_exact, GaussianPulse,
};
use crate::photonstat::{SourcePulse, TruncationPolicy};
use crate::splitter::{BeamSplitter, OverlapParameter};
use crate::synth::{fit_curve, fit_points_with_fixed, sample_hom_counts, FitModel, HomSamplerConfig};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn run_check(
    name: &'static str,
    budget_seconds: f64,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CheckResult {
    let start = Instant::now();
    let (mut passed, mut detail) = match body() {
        Ok(outcome) => outcome,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    if seconds >= budget_seconds {
        passed = false;
        detail = format!("{detail}; runtime {seconds:.2} s exceeded budget {budget_seconds} s");
    }
    CheckResult {
        name,
        passed,
        detail,
        seconds,
    }
}

/// Run the full verification suite.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        run_check("coherent_hom_limit", 1.0, coherent_hom_limit),
        run_check("oracle_equivalence", 10.0, oracle_equivalence),
        run_check("single_photon_hom", 10.0, single_photon_hom),
        run_check("single_detector_visibility", 10.0, single_detector_visibility),
        run_check("bsm_closed_forms", 10.0, bsm_closed_forms),
        run_check("bsm_exact_vs_closed_form", 30.0, bsm_exact_vs_closed_form),
        run_check("imbalance_law", 10.0, imbalance_law),
        run_check("afc_bandwidth_scan", 30.0, afc_bandwidth_scan),
        run_check("monte_carlo_pipeline", 120.0, monte_carlo_pipeline),
        run_check("storage_configuration_coverage", 30.0, storage_configuration_coverage),
    ]
}

/// Render results as aligned pass/fail lines.
pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<width$}  {}  [{:7.3} s]  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail,
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", results.len()));
    out
}

fn eta07() -> Detector {
    Detector::with_efficiency(0.7).unwrap()
}

/// Interference of weak phase-averaged pulses dips to half the reference
/// rate, independent of the mean photon number in the low-mu regime.
fn coherent_hom_limit() -> Result<(bool, String)> {
    let bs = BeamSplitter::balanced();
    let det = eta07();
    let policy = TruncationPolicy::default();
    let base = hom_visibility_exact(1e-3, 1e-3, OverlapParameter::full(), &bs, &det, &det, &policy)?;
    let mut passed = (base.visibility - 0.5).abs() <= 1e-3;
    let mut worst: f64 = 0.0;
    for &mu in &[1e-3, 1e-2, 5e-2] {
        let v = hom_visibility_exact(mu, mu, OverlapParameter::full(), &bs, &det, &det, &policy)?
            .visibility;
        worst = worst.max((v - 0.5).abs());
    }
    passed &= worst <= 1e-2;
    Ok((
        passed,
        format!(
            "V(mu=1e-3) = {:.6} (|dV| <= 1e-3); max |dV| over mu grid {:.2e} (<= 1e-2)",
            base.visibility, worst
        ),
    ))
}

/// The truncated-Fock route and the phase-averaged intensity quadrature are
/// independent computations of the same coincidence probability.
fn oracle_equivalence() -> Result<(bool, String)> {
    let policy = TruncationPolicy::default().with_epsilon(1e-14)?;
    let bs = BeamSplitter::balanced();
    let mut worst: f64 = 0.0;
    for &lambda in &[0.0, 1.0] {
        let l = OverlapParameter::new(lambda)?;
        for &mu_a in &[0.1, 0.6, 2.0] {
            for &mu_b in &[0.1, 0.6, 2.0] {
                for &eta in &[0.3, 0.7, 1.0] {
                    let det = Detector::with_efficiency(eta)?;
                    let fock = coincidence_probability_sources(
                        &SourcePulse::coherent(mu_a)?,
                        &SourcePulse::coherent(mu_b)?,
                        l,
                        &bs,
                        &det,
                        &det,
                        &policy,
                    )?;
                    let oracle = coincidence_phase_averaged(mu_a, mu_b, l, &bs, &det, &det)?;
                    worst = worst.max((fock - oracle).abs());
                }
            }
        }
    }
    Ok((
        worst <= 1e-9,
        format!("max |Fock - quadrature| = {worst:.2e} over 54 cases (<= 1e-9)"),
    ))
}

/// One photon per port: perfect bunching, coincidence 1/2 when
/// distinguishable, unit visibility.
fn single_photon_hom() -> Result<(bool, String)> {
    let bs = BeamSplitter::balanced();
    let ideal = Detector::ideal();
    let policy = TruncationPolicy::default();
    let one = SourcePulse::fock(1);
    let p_par = coincidence_probability_sources(
        &one,
        &one,
        OverlapParameter::full(),
        &bs,
        &ideal,
        &ideal,
        &policy,
    )?;
    let p_orth = coincidence_probability_sources(
        &one,
        &one,
        OverlapParameter::zero(),
        &bs,
        &ideal,
        &ideal,
        &policy,
    )?;
    let vis = hom_visibility_sources(
        &one,
        &one,
        OverlapParameter::full(),
        &bs,
        &ideal,
        &ideal,
        &policy,
    )?
    .visibility;
    let passed =
        p_par.abs() <= 1e-12 && (p_orth - 0.5).abs() <= 1e-12 && (vis - 1.0).abs() <= 1e-12;
    Ok((
        passed,
        format!("P(coincidence): parallel {p_par:.2e}, orthogonal {p_orth:.12}; V = {vis:.12}"),
    ))
}

/// Exact single-detector visibility against the simplified closed form, the
/// closed form's quoted value, and the mean-photon-number inversion.
///
/// The first clause pins a 5 percent agreement at mu = 0.05 which the exact
/// model does not meet: the closed form's relative error is (2 - eta) mu at
/// leading order, 6.4 percent here. The check is asserted as specified and
/// reports its measured value honestly.
fn single_detector_visibility() -> Result<(bool, String)> {
    let bs = BeamSplitter::balanced();
    let det = eta07();
    let policy = TruncationPolicy::default();
    let exact = single_detector_visibility_exact(0.05, &bs, &det, &policy)?.visibility;
    let (_, closed_005) = closed_form_visibilities(0.05, 0.7)?;
    let rel = (exact - closed_005).abs() / closed_005;
    let clause_a = rel <= 0.05;

    let (_, v1x) = closed_form_visibilities(0.5, 0.7)?;
    let clause_b = (v1x - 0.0479).abs() <= 1e-4;

    let mu_back = infer_mu_from_single_visibility(v1x, 0.7)?;
    let clause_c = (mu_back - 0.5).abs() <= 1e-9;

    Ok((
        clause_a && clause_b && clause_c,
        format!(
            "exact {exact:.6} vs closed {closed_005:.6} at mu=0.05: rel {:.2}% (<= 5%: {}); \
             v1x(0.7, 0.5) = {v1x:.6} (~0.0479: {}); mu round-trip |d| = {:.1e} (<= 1e-9: {})",
            rel * 100.0,
            clause_a,
            clause_b,
            (mu_back - 0.5).abs(),
            clause_c
        ),
    ))
}

/// Closed-form error rates, the bounds table, and fidelity inversions.
fn bsm_closed_forms() -> Result<(bool, String)> {
    let mu = 0.6;
    let p_par_el =
        psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::early(), mu)?;
    let p_orth_el =
        psi_minus_probability_attenuated(&TimeBinQubit::early(), &TimeBinQubit::late(), mu)?;
    let e_el = error_rate(p_par_el, p_orth_el)?;

    let p_par_pm =
        psi_minus_probability_attenuated(&TimeBinQubit::plus(), &TimeBinQubit::plus(), mu)?;
    let p_orth_pm =
        psi_minus_probability_attenuated(&TimeBinQubit::plus(), &TimeBinQubit::minus(), mu)?;
    let e_pm = error_rate(p_par_pm, p_orth_pm)?;
    let v_pm = (p_orth_pm - p_par_pm) / p_orth_pm;

    let bounds = classical_quantum_bounds();
    let f_el = fidelity_from_error(0.039, BsmBasis::EarlyLate, BsmSource::Attenuated)?;
    let f_pm = fidelity_from_error(0.287, BsmBasis::PlusMinus, BsmSource::Attenuated)?;

    let passed = e_el == 0.0
        && (e_pm - 0.25).abs() <= 1e-15
        && (v_pm - 2.0 / 3.0).abs() <= 1e-15
        && (bounds.early_late_classical - 0.333).abs() <= 5e-4
        && (bounds.attenuated_plus_minus_classical - 0.417).abs() <= 5e-4
        && (bounds.classical_memory_fidelity - 0.667).abs() <= 5e-4
        && (f_el - 0.961).abs() <= 5e-4
        && (f_pm - 0.926).abs() <= 5e-4;
    Ok((
        passed,
        format!(
            "e(e/l) = {e_el}; e(+/-) = {e_pm:.12}; V(+/-) = {v_pm:.12}; bounds \
             {:.3}/{:.3}/{:.3}; F(0.039) = {f_el:.4}, F(0.287) = {f_pm:.4}",
            bounds.early_late_classical,
            bounds.attenuated_plus_minus_classical,
            bounds.classical_memory_fidelity
        ),
    ))
}

/// The four-mode Fock enumeration converges to the attenuated closed forms
/// at low mean photon number, in both measurement bases.
fn bsm_exact_vs_closed_form() -> Result<(bool, String)> {
    let policy = TruncationPolicy::default().with_epsilon(1e-14)?;
    let ideal = Detector::ideal();
    let mu = 1e-3;
    let source = SourcePulse::coherent(mu)?;
    let combos = [
        (TimeBinQubit::early(), TimeBinQubit::early()),
        (TimeBinQubit::early(), TimeBinQubit::late()),
        (TimeBinQubit::late(), TimeBinQubit::late()),
        (TimeBinQubit::late(), TimeBinQubit::early()),
        (TimeBinQubit::plus(), TimeBinQubit::plus()),
        (TimeBinQubit::plus(), TimeBinQubit::minus()),
        (TimeBinQubit::minus(), TimeBinQubit::minus()),
        (TimeBinQubit::minus(), TimeBinQubit::plus()),
    ];
    let mut worst: f64 = 1.0;
    let mut passed = true;
    for (qa, qb) in combos {
        let exact = psi_minus_probability_exact(&qa, &qb, &source, &source, &ideal, &ideal, &policy)?;
        let closed = psi_minus_probability_attenuated(&qa, &qb, mu)?;
        if closed < 1e-30 {
            passed &= exact < 1e-30;
        } else {
            let ratio = exact / closed;
            if (ratio - 1.0).abs() > (worst - 1.0).abs() {
                worst = ratio;
            }
            passed &= (0.99..=1.01).contains(&ratio);
        }
    }
    Ok((
        passed,
        format!("worst exact/closed ratio {worst:.5} over 8 combos (within [0.99, 1.01])"),
    ))
}

/// Low-mu visibility follows 2 mu_a mu_b / (mu_a + mu_b)^2 and peaks at
/// balanced inputs.
fn imbalance_law() -> Result<(bool, String)> {
    let bs = BeamSplitter::balanced();
    let det = eta07();
    let policy = TruncationPolicy::default();
    let mu_b = 1e-3;
    let mut previous = f64::INFINITY;
    let mut passed = true;
    let mut details = Vec::new();
    for &ratio in &[1.0, 2.0, 4.0] {
        let mu_a = ratio * mu_b;
        let v = hom_visibility_exact(mu_a, mu_b, OverlapParameter::full(), &bs, &det, &det, &policy)?
            .visibility;
        let expected = 2.0 * mu_a * mu_b / ((mu_a + mu_b) * (mu_a + mu_b));
        passed &= (v - expected).abs() <= 0.01 * expected;
        passed &= v < previous || ratio == 1.0;
        previous = v;
        details.push(format!("ratio {ratio}: V = {v:.5} vs {expected:.5}"));
    }
    Ok((passed, details.join("; ")))
}

/// Visibility against comb bandwidth: monotone, flat above 100 MHz, and with
/// a knee whose fitted width is within a factor of two of 79 MHz.
fn afc_bandwidth_scan() -> Result<(bool, String)> {
    let memory = AfcMemory {
        tooth_spacing: 1.0 / 30e-9,
        bandwidth: 600e6,
        peak_efficiency: 0.015,
        decoherence_time: 10e-6,
        coupling_transmission: 1.0,
        inactive_od: 0.0,
        active: true,
    };
    let pulse = GaussianPulse::new(8e-9)?;
    let bs = BeamSplitter::balanced();
    let det = eta07();
    let grid: Vec<f64> = (1..=30).map(|i| 10e6 * i as f64).collect();
    let curve = visibility_vs_bandwidth(
        &memory,
        &pulse,
        3.4e-4,
        &bs,
        &det,
        &det,
        &grid,
        &TruncationPolicy::default(),
    )?;

    let monotone = curve.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);

    let plateau: Vec<f64> = curve
        .iter()
        .filter(|(b, _)| *b >= 100e6)
        .map(|&(_, v)| v)
        .collect();
    let plateau_max = plateau.iter().cloned().fold(f64::MIN, f64::max);
    let plateau_min = plateau.iter().cloned().fold(f64::MAX, f64::min);
    let plateau_change = (plateau_max - plateau_min) / plateau_max;

    let xs: Vec<f64> = curve.iter().map(|(b, _)| b / 1e6).collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, v)| v).collect();
    let fit = fit_points_with_fixed(&xs, &ys, FitModel::Gaussian, &[(2, 0.0)])?;
    let fwhm = fit.gaussian_fwhm().unwrap();
    let fwhm_ok = (79.0 / 2.0..=79.0 * 2.0).contains(&fwhm);

    Ok((
        monotone && plateau_change < 0.01 && fwhm_ok,
        format!(
            "monotone: {monotone}; plateau change above 100 MHz {:.2}% (< 1%); \
             fitted knee FWHM {fwhm:.1} MHz (within factor 2 of 79 MHz)",
            plateau_change * 100.0
        ),
    ))
}

/// Full synthetic pipeline: sampled polarization sweep at the single-photon
/// level, sine fit, fitted visibility consistent with the 50 percent ceiling.
fn monte_carlo_pipeline() -> Result<(bool, String)> {
    let config = HomSamplerConfig {
        mu_a: 0.5,
        mu_b: 0.5,
        beam_splitter: BeamSplitter::balanced(),
        detector_1: eta07(),
        detector_2: eta07(),
    };
    let settings: Vec<(f64, OverlapParameter)> = (0..=12)
        .map(|i| {
            let angle = i as f64 * 15.0 * std::f64::consts::PI / 180.0;
            Ok((angle, OverlapParameter::new(angle.cos().abs())?))
        })
        .collect::<Result<_>>()?;
    let records = sample_hom_counts(&config, &settings, 1_000_000, 7)?;
    let fit = fit_curve(&records, FitModel::Sine)?;
    let pull = (fit.visibility - 0.5).abs() / fit.visibility_std_error;
    Ok((
        pull <= 3.0,
        format!(
            "fitted V = {:.5} +/- {:.5}, |V - 0.5| = {:.1} standard errors (<= 3)",
            fit.visibility, fit.visibility_std_error, pull
        ),
    ))
}

/// The three storage configurations (none, single, double) with the quoted
/// source strengths and chain transmissions all reach the ideal visibility.
fn storage_configuration_coverage() -> Result<(bool, String)> {
    let bs = BeamSplitter::balanced();
    let det = eta07();
    let policy = TruncationPolicy::default();
    let pulse = GaussianPulse::new(8e-9)?;
    let target_mu: f64 = 3.4e-4;
    let mut details = Vec::new();
    let mut passed = true;

    let storage_memory = |chain_efficiency: f64| -> Result<AfcMemory> {
        // Peak efficiency per the quoted ~1.5 percent; coupling absorbs the
        // rest of the chain so that recall passes exactly chain_efficiency.
        let mem = AfcMemory {
            tooth_spacing: 1.0 / 30e-9,
            bandwidth: 600e6,
            peak_efficiency: 0.015,
            decoherence_time: 10e-6,
            coupling_transmission: 1.0,
            inactive_od: 0.0,
            active: true,
        };
        let (probe, _) = crate::afcmem::recall(&mem, &pulse, 1.0)?;
        Ok(AfcMemory {
            coupling_transmission: chain_efficiency / probe.efficiency,
            ..mem
        })
    };

    // No storage: both sources at 0.6 through inactive devices whose optical
    // depth brings the splitter inputs to 3.4e-4.
    {
        let chain = target_mu / 0.6;
        let od = -(chain.ln());
        let device = AfcMemory {
            tooth_spacing: 1.0 / 30e-9,
            bandwidth: 600e6,
            peak_efficiency: 0.015,
            decoherence_time: 10e-6,
            coupling_transmission: 1.0,
            inactive_od: od,
            active: false,
        };
        let (out_a, mu_a) = crate::afcmem::transmit(&device, &pulse, 0.6)?;
        let (out_b, mu_b) = crate::afcmem::transmit(&device, &pulse, 0.6)?;
        let lambda = crate::hom::mode_overlap(&out_a.pulse, &out_b.pulse)?;
        let v = hom_visibility_exact(mu_a, mu_b, lambda, &bs, &det, &det, &policy)?.visibility;
        passed &= (v - 0.5).abs() <= 1e-3;
        details.push(format!("none: mu_bs = ({mu_a:.2e}, {mu_b:.2e}), V = {v:.6}"));
    }

    // Single storage: source 0.6 recalled through a 5.67e-4 chain against a
    // directly transmitted arm balanced to the same splitter photon number.
    {
        let source_mu = crate::afcmem::balance_source_mu(target_mu, &[5.67e-4])?;
        passed &= (source_mu - 0.6).abs() < 0.01;
        let mem_a = storage_memory(target_mu / 0.6)?;
        let (stored, mu_a) = crate::afcmem::recall(&mem_a, &pulse, 0.6)?;
        let inactive = AfcMemory {
            active: false,
            inactive_od: -((target_mu / 0.6f64).ln()),
            coupling_transmission: 1.0,
            ..mem_a
        };
        let (through, mu_b) = crate::afcmem::transmit(&inactive, &pulse, 0.6)?;
        let mut reference = through.pulse;
        reference.arrival_time = stored.pulse.arrival_time;
        let lambda = crate::hom::mode_overlap(&stored.pulse, &reference)?;
        let v = hom_visibility_exact(mu_a, mu_b, lambda, &bs, &det, &det, &policy)?.visibility;
        passed &= (v - 0.5).abs() <= 1e-3;
        details.push(format!(
            "single: source 0.6, mu_bs = ({mu_a:.2e}, {mu_b:.2e}), V = {v:.6}"
        ));
    }

    // Double storage: the less efficient arm runs at 4.6, the other at 0.6.
    {
        let source_a = crate::afcmem::balance_source_mu(target_mu, &[target_mu / 4.6])?;
        passed &= (source_a - 4.6).abs() < 1e-9;
        let mem_a = storage_memory(target_mu / 4.6)?;
        let mem_b = storage_memory(target_mu / 0.6)?;
        let (out_a, mu_a) = crate::afcmem::recall(&mem_a, &pulse, 4.6)?;
        let (out_b, mu_b) = crate::afcmem::recall(&mem_b, &pulse, 0.6)?;
        let lambda = crate::hom::mode_overlap(&out_a.pulse, &out_b.pulse)?;
        let v = hom_visibility_exact(mu_a, mu_b, lambda, &bs, &det, &det, &policy)?.visibility;
        passed &= (v - 0.5).abs() <= 1e-3;
        passed &= (mu_a - target_mu).abs() <= 1e-9 && (mu_b - target_mu).abs() <= 1e-9;
        details.push(format!(
            "double: sources (4.6, 0.6), mu_bs = ({mu_a:.2e}, {mu_b:.2e}), V = {v:.6}"
        ));
    }

    Ok((passed, details.join("; ")))
}

/// Also exposed for the phase-scan criterion used in tests of the runner.
pub fn phase_scan_matches_bounds() -> Result<bool> {
    let grid: Vec<f64> = (0..24)
        .map(|k| k as f64 * std::f64::consts::TAU / 24.0)
        .collect();
    let scan = bsm_phase_scan(0.3, &grid)?;
    Ok((scan.visibility - 2.0 / 3.0).abs() < 1e-9 && (scan.error_rate - 0.25).abs() < 1e-9)
}
