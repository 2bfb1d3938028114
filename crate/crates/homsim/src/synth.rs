//! Synthetic count records with shot noise, and the least-squares models used
//! to extract visibilities from them: a sine for polarization scans, a
//! Gaussian for time and frequency scans, a cosine for Bell-state phase scans.
//!
//! Sampling draws a fresh uniform optical phase per pulse, computes the
//! classical click probabilities for that phase, and draws one Bernoulli
//! outcome per detector gate. Trials are split into fixed-size batches, each
//! with its own counter-mode RNG stream derived from (seed, setting, batch),
//! so results do not depend on how batches are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bsm::{bsm_intensities, TimeBinQubit};
use crate::detect::Detector;
use crate::error::{Error, Result};
use crate::numeric::{invert_small, solve_small};
use crate::splitter::{BeamSplitter, OverlapParameter};

/// Counts accumulated at one sweep setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    /// The swept quantity (angle in radians, delay in seconds, detuning in
    /// hertz, or phase in radians).
    pub setting: f64,
    pub trials: u64,
    pub coincidences: u64,
    pub singles_1: u64,
    pub singles_2: u64,
}

/// Generator configuration for interference sweeps: two phase-averaged
/// coherent pulses on a splitter, watched by two detectors.
#[derive(Debug, Clone, Copy)]
pub struct HomSamplerConfig {
    pub mu_a: f64,
    pub mu_b: f64,
    pub beam_splitter: BeamSplitter,
    pub detector_1: Detector,
    pub detector_2: Detector,
}

const BATCH: u64 = 1 << 16;

fn stream_id(setting_index: usize, batch_index: u64) -> u64 {
    ((setting_index as u64) << 32) | batch_index
}

fn batch_ranges(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(BATCH))
        .map(|b| (b, (trials - b * BATCH).min(BATCH)))
        .collect()
}

/// Sample count records for a sweep whose settings map to mode overlaps.
/// Deterministic for a fixed seed, independent of worker count.
pub fn sample_hom_counts(
    config: &HomSamplerConfig,
    settings: &[(f64, OverlapParameter)],
    trials_per_setting: u64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if trials_per_setting == 0 {
        return Err(Error::Domain("trials per setting must be >= 1".into()));
    }
    crate::error::require_nonnegative("mu_a", config.mu_a)?;
    crate::error::require_nonnegative("mu_b", config.mu_b)?;
    let records = settings
        .iter()
        .enumerate()
        .map(|(idx, &(setting, lambda))| {
            let r = config.beam_splitter.reflection_amplitude();
            let t = config.beam_splitter.transmission_amplitude();
            let cross = 2.0 * r * t * lambda.value() * (config.mu_a * config.mu_b).sqrt();
            let base_c = t * t * config.mu_a + r * r * config.mu_b;
            let base_d = r * r * config.mu_a + t * t * config.mu_b;
            let (coinc, s1, s2) = batch_ranges(trials_per_setting)
                .into_par_iter()
                .map(|(batch, n)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream_id(idx, batch));
                    let mut acc = (0u64, 0u64, 0u64);
                    for _ in 0..n {
                        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                        let i_c = base_c - cross * phi.sin();
                        let i_d = base_d + cross * phi.sin();
                        let click1 = rng.gen::<f64>()
                            < config.detector_1.click_probability_for_intensity(i_c);
                        let click2 = rng.gen::<f64>()
                            < config.detector_2.click_probability_for_intensity(i_d);
                        acc.0 += (click1 && click2) as u64;
                        acc.1 += click1 as u64;
                        acc.2 += click2 as u64;
                    }
                    acc
                })
                .reduce(
                    || (0, 0, 0),
                    |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
                );
            CountRecord {
                setting,
                trials: trials_per_setting,
                coincidences: coinc,
                singles_1: s1,
                singles_2: s2,
            }
        })
        .collect();
    Ok(records)
}

/// Generator configuration for Bell-state phase sweeps: equal-superposition
/// time-bin qubits with a relative phase, both pulses of mean `mu`.
#[derive(Debug, Clone, Copy)]
pub struct BsmSamplerConfig {
    pub mu: f64,
    pub detector_1: Detector,
    pub detector_2: Detector,
}

/// Sample antisymmetric-pattern counts over a grid of relative qubit phases.
/// A pattern fires when one detector clicks early and the other clicks late.
pub fn sample_bsm_phase_counts(
    config: &BsmSamplerConfig,
    dphi_grid: &[f64],
    trials_per_setting: u64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    if trials_per_setting == 0 {
        return Err(Error::Domain("trials per setting must be >= 1".into()));
    }
    crate::error::require_nonnegative("mu", config.mu)?;
    let qa = TimeBinQubit::plus();
    let records = dphi_grid
        .iter()
        .enumerate()
        .map(|(idx, &dphi)| {
            let qb = TimeBinQubit::superposition(dphi)?;
            let (coinc, s1, s2) = batch_ranges(trials_per_setting)
                .into_par_iter()
                .map(|(batch, n)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(stream_id(idx, batch));
                    let mut acc = (0u64, 0u64, 0u64);
                    for _ in 0..n {
                        let chi = rng.gen::<f64>() * std::f64::consts::TAU;
                        let i = bsm_intensities(&qa, &qb, config.mu, config.mu, chi);
                        let ce = rng.gen::<f64>()
                            < config.detector_1.click_probability_for_intensity(i[0]);
                        let cl = rng.gen::<f64>()
                            < config.detector_1.click_probability_for_intensity(i[1]);
                        let de = rng.gen::<f64>()
                            < config.detector_2.click_probability_for_intensity(i[2]);
                        let dl = rng.gen::<f64>()
                            < config.detector_2.click_probability_for_intensity(i[3]);
                        acc.0 += ((ce && dl) || (cl && de)) as u64;
                        acc.1 += (ce || cl) as u64;
                        acc.2 += (de || dl) as u64;
                    }
                    acc
                })
                .reduce(
                    || (0, 0, 0),
                    |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
                );
            Ok(CountRecord {
                setting: dphi,
                trials: trials_per_setting,
                coincidences: coinc,
                singles_1: s1,
                singles_2: s2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(records)
}

/// Models fitted to sweep curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// y = p0 - p1 cos(2x); the cos^2 law of polarization scans.
    Sine,
    /// y = p0 - p1 exp(-(x - p2)^2 / (2 p3^2)); temporal and spectral dips.
    Gaussian,
    /// y = p0 - p1 cos(x); Bell-state phase scans.
    Cosine,
}

impl FitModel {
    pub fn parameter_count(&self) -> usize {
        match self {
            FitModel::Sine | FitModel::Cosine => 2,
            FitModel::Gaussian => 4,
        }
    }

    fn eval(&self, p: &[f64], x: f64) -> f64 {
        match self {
            FitModel::Sine => p[0] - p[1] * (2.0 * x).cos(),
            FitModel::Cosine => p[0] - p[1] * x.cos(),
            FitModel::Gaussian => {
                let z = (x - p[2]) / p[3];
                p[0] - p[1] * (-0.5 * z * z).exp()
            }
        }
    }

    fn gradient(&self, p: &[f64], x: f64) -> Vec<f64> {
        match self {
            FitModel::Sine => vec![1.0, -(2.0 * x).cos()],
            FitModel::Cosine => vec![1.0, -x.cos()],
            FitModel::Gaussian => {
                let z = (x - p[2]) / p[3];
                let g = (-0.5 * z * z).exp();
                vec![
                    1.0,
                    -g,
                    -p[1] * g * z / p[3],
                    -p[1] * g * z * z / p[3],
                ]
            }
        }
    }

    fn initial_guess(&self, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        let (mut y_min, mut y_max, mut x_at_min) = (f64::INFINITY, f64::NEG_INFINITY, xs[0]);
        for (&x, &y) in xs.iter().zip(ys) {
            if y < y_min {
                y_min = y;
                x_at_min = x;
            }
            y_max = y_max.max(y);
        }
        let offset = y_max;
        let depth = (y_max - y_min).max(f64::MIN_POSITIVE);
        match self {
            FitModel::Sine | FitModel::Cosine => vec![(y_max + y_min) / 2.0, depth / 2.0],
            FitModel::Gaussian => {
                let span = xs.last().unwrap() - xs[0];
                vec![offset, depth, x_at_min, (span / 4.0).abs().max(1e-300)]
            }
        }
    }

    /// Visibility of the fitted curve from its extrema, with the gradient for
    /// error propagation (entries for all parameters, fixed ones included).
    fn visibility(&self, p: &[f64]) -> (f64, Vec<f64>) {
        match self {
            FitModel::Sine | FitModel::Cosine => {
                // min = p0 - p1, max = p0 + p1, V = 2 p1 / (p0 + p1).
                let denom = p[0] + p[1];
                let v = 2.0 * p[1] / denom;
                (v, vec![-2.0 * p[1] / (denom * denom), 2.0 * p[0] / (denom * denom)])
            }
            FitModel::Gaussian => {
                // Baseline p0, dip bottom p0 - p1, V = p1 / p0.
                (p[1] / p[0], vec![-p[1] / (p[0] * p[0]), 1.0 / p[0], 0.0, 0.0])
            }
        }
    }
}

/// A completed least-squares fit. Parameter order follows the model
/// definition; `standard_errors` are derived from the residual covariance
/// (zero for parameters held fixed).
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: FitModel,
    pub parameters: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub visibility: f64,
    pub visibility_std_error: f64,
    pub ssr: f64,
    pub iterations: usize,
}

impl FitResult {
    /// Full width at half maximum of a fitted Gaussian.
    pub fn gaussian_fwhm(&self) -> Option<f64> {
        match self.model {
            FitModel::Gaussian => {
                Some(2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * self.parameters[3].abs())
            }
            _ => None,
        }
    }
}

/// Fit a model to count records using the coincidence column.
pub fn fit_curve(records: &[CountRecord], model: FitModel) -> Result<FitResult> {
    let xs: Vec<f64> = records.iter().map(|r| r.setting).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.coincidences as f64).collect();
    fit_points(&xs, &ys, model)
}

/// Fit a model to arbitrary points.
pub fn fit_points(xs: &[f64], ys: &[f64], model: FitModel) -> Result<FitResult> {
    fit_points_with_fixed(xs, ys, model, &[])
}

/// Fit with some parameters held at given values, e.g. a Gaussian centered at
/// zero for one-sided scans. `fixed` pairs (parameter index, value).
pub fn fit_points_with_fixed(
    xs: &[f64],
    ys: &[f64],
    model: FitModel,
    fixed: &[(usize, f64)],
) -> Result<FitResult> {
    let n_params = model.parameter_count();
    if xs.len() != ys.len() {
        return Err(Error::Domain("mismatched fit input lengths".into()));
    }
    if xs.len() < n_params + 1 {
        return Err(Error::Domain(format!(
            "need at least {} settings to fit {} parameters",
            n_params + 1,
            n_params
        )));
    }
    let mut params = model.initial_guess(xs, ys);
    for &(idx, value) in fixed {
        if idx >= n_params {
            return Err(Error::Domain(format!("no parameter {idx} in this model")));
        }
        params[idx] = value;
    }
    let free: Vec<usize> = (0..n_params)
        .filter(|i| fixed.iter().all(|&(idx, _)| idx != *i))
        .collect();
    if free.is_empty() {
        return Err(Error::Domain("all fit parameters are fixed".into()));
    }

    let ssr_of = |p: &[f64]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - model.eval(p, x);
                r * r
            })
            .sum()
    };

    // Levenberg damping on the normal equations of the local linearization.
    let mut ssr = ssr_of(&params);
    let mut damping = 1e-3;
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let max_iterations = 200;
    while iterations < max_iterations {
        iterations += 1;
        let mut jtj = vec![vec![0.0; free.len()]; free.len()];
        let mut jtr = vec![0.0; free.len()];
        for (&x, &y) in xs.iter().zip(ys) {
            let g_full = model.gradient(&params, x);
            let r = y - model.eval(&params, x);
            for (a, &fa) in free.iter().enumerate() {
                jtr[a] += g_full[fa] * r;
                for (b, &fb) in free.iter().enumerate() {
                    jtj[a][b] += g_full[fa] * g_full[fb];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += damping * jtj[a][a].max(1e-300);
            }
            let mut rhs = jtr.clone();
            let Some(step) = solve_small(&mut damped, &mut rhs) else {
                damping *= 10.0;
                continue;
            };
            let mut trial = params.clone();
            for (a, &fa) in free.iter().enumerate() {
                trial[fa] += step[a];
            }
            let trial_ssr = ssr_of(&trial);
            if trial_ssr.is_finite() && trial_ssr <= ssr {
                last_step = step.iter().map(|s| s * s).sum::<f64>().sqrt();
                let rel_drop = (ssr - trial_ssr) / ssr.max(1e-300);
                params = trial;
                ssr = trial_ssr;
                damping = (damping / 10.0).max(1e-12);
                improved = true;
                if rel_drop < 1e-12 || ssr < 1e-28 {
                    iterations = max_iterations; // converged; exit outer loop
                }
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            if ssr < 1e-20 || last_step < 1e-12 {
                break;
            }
            return Err(Error::FitDidNotConverge {
                iterations,
                ssr,
                last_step,
            });
        }
    }

    // Residual covariance: sigma^2 (J^T J)^-1 on the free parameters.
    let dof = xs.len().saturating_sub(free.len()).max(1);
    let sigma2 = ssr / dof as f64;
    let mut jtj = vec![vec![0.0; free.len()]; free.len()];
    for &x in xs {
        let g_full = model.gradient(&params, x);
        for (a, &fa) in free.iter().enumerate() {
            for (b, &fb) in free.iter().enumerate() {
                jtj[a][b] += g_full[fa] * g_full[fb];
            }
        }
    }
    let cov_free = invert_small(&jtj).ok_or_else(|| Error::FitDidNotConverge {
        iterations,
        ssr,
        last_step,
    })?;
    let mut standard_errors = vec![0.0; n_params];
    for (a, &fa) in free.iter().enumerate() {
        standard_errors[fa] = (sigma2 * cov_free[a][a]).max(0.0).sqrt();
    }
    let (visibility, grad) = model.visibility(&params);
    let mut var_v = 0.0;
    for (a, &fa) in free.iter().enumerate() {
        for (b, &fb) in free.iter().enumerate() {
            var_v += grad[fa] * grad[fb] * sigma2 * cov_free[a][b];
        }
    }
    Ok(FitResult {
        model,
        parameters: params,
        standard_errors,
        visibility,
        visibility_std_error: var_v.max(0.0).sqrt(),
        ssr,
        iterations,
    })
}
