//! Phenomenological atomic-frequency-comb memory: fixed recall delay set by
//! the comb tooth spacing, exponential efficiency decay with storage time, and
//! bandpass filtering by the comb envelope with the resulting temporal
//! broadening of recalled pulses.

use crate::detect::Detector;
use crate::error::{require_nonnegative, Error, Result};
use crate::hom::{hom_visibility_exact, mode_overlap, GaussianPulse};
use crate::photonstat::TruncationPolicy;
use crate::splitter::BeamSplitter;

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Configuration of one memory channel. All frequencies in Hz, times in
/// seconds. When `active` is false the device only attenuates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfcMemory {
    /// Comb tooth spacing; recall happens after 1 / tooth_spacing.
    pub tooth_spacing: f64,
    /// Intensity FWHM of the comb envelope acting as a bandpass filter.
    pub bandwidth: f64,
    /// Recall efficiency at zero storage time, before coupling loss.
    pub peak_efficiency: f64,
    /// Exponential decay time of the recall efficiency.
    pub decoherence_time: f64,
    /// Frequency-independent coupling transmission of the device.
    pub coupling_transmission: f64,
    /// Optical depth experienced on inactive (transmit-only) passage.
    pub inactive_od: f64,
    /// Whether a comb is prepared.
    pub active: bool,
}

impl AfcMemory {
    fn validate(&self) -> Result<()> {
        if !(self.tooth_spacing.is_finite() && self.tooth_spacing > 0.0) {
            return Err(Error::Domain("tooth spacing must be positive".into()));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::Domain("comb bandwidth must be positive".into()));
        }
        if !(self.decoherence_time.is_finite() && self.decoherence_time > 0.0) {
            return Err(Error::Domain("decoherence time must be positive".into()));
        }
        crate::error::require_in_unit("peak efficiency", self.peak_efficiency)?;
        crate::error::require_in_unit("coupling transmission", self.coupling_transmission)?;
        require_nonnegative("inactive optical depth", self.inactive_od)?;
        Ok(())
    }
}

/// Envelope and efficiency of a pulse leaving a memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryOutput {
    pub pulse: GaussianPulse,
    pub efficiency: f64,
}

/// Storage time of an active memory: the inverse comb tooth spacing.
pub fn storage_time(mem: &AfcMemory) -> Result<f64> {
    mem.validate()?;
    if !mem.active {
        return Err(Error::State(
            "storage time is undefined for an inactive memory".into(),
        ));
    }
    Ok(1.0 / mem.tooth_spacing)
}

/// Store and recall a pulse. The recalled spectrum is the input spectrum
/// multiplied by the comb's Gaussian envelope, so the recalled duration grows
/// as the envelope narrows; the efficiency combines the peak efficiency,
/// coupling loss, decoherence over the storage time, and the spectral energy
/// fraction passed by the envelope. Returns the output and the recalled mean
/// photon number.
pub fn recall(
    mem: &AfcMemory,
    input: &GaussianPulse,
    input_mu: f64,
) -> Result<(MemoryOutput, f64)> {
    mem.validate()?;
    input.validate()?;
    require_nonnegative("input mean photon number", input_mu)?;
    if !mem.active {
        return Err(Error::State(
            "cannot recall from an inactive memory; use transmit".into(),
        ));
    }
    let t_storage = 1.0 / mem.tooth_spacing;
    let w_in = input.bandwidth_fwhm();
    // Gaussian times Gaussian in the intensity spectrum: the filtered
    // bandwidth satisfies 1/W'^2 = 1/W^2 + 1/B^2, and the passed energy
    // fraction equals W'/W.
    let w_out = w_in * mem.bandwidth / (w_in * w_in + mem.bandwidth * mem.bandwidth).sqrt();
    let energy_fraction = w_out / w_in;
    let duration_out = crate::hom::TIME_BANDWIDTH_PRODUCT / w_out;

    let efficiency = mem.peak_efficiency
        * mem.coupling_transmission
        * (-t_storage / mem.decoherence_time).exp()
        * energy_fraction;
    let pulse = GaussianPulse {
        duration_fwhm: duration_out.max(input.duration_fwhm),
        arrival_time: input.arrival_time + t_storage,
        ..*input
    };
    Ok((MemoryOutput { pulse, efficiency }, input_mu * efficiency))
}

/// Pass a pulse through a memory without storing it: the envelope is
/// unchanged and the mean photon number is attenuated by the coupling and the
/// configured inactive optical depth.
pub fn transmit(
    mem: &AfcMemory,
    input: &GaussianPulse,
    input_mu: f64,
) -> Result<(MemoryOutput, f64)> {
    mem.validate()?;
    input.validate()?;
    require_nonnegative("input mean photon number", input_mu)?;
    let efficiency = mem.coupling_transmission * (-mem.inactive_od).exp();
    Ok((
        MemoryOutput {
            pulse: *input,
            efficiency,
        },
        input_mu * efficiency,
    ))
}

/// Source mean photon number needed to reach `target_mu_at_bs` through a
/// chain of per-stage transmissions.
pub fn balance_source_mu(target_mu_at_bs: f64, chain: &[f64]) -> Result<f64> {
    require_nonnegative("target mean photon number", target_mu_at_bs)?;
    let mut product = 1.0;
    for (i, &t) in chain.iter().enumerate() {
        if !(t.is_finite() && t > 0.0 && t <= 1.0) {
            if t == 0.0 {
                return Err(Error::NoSolution(format!(
                    "stage {i} transmits nothing; no source power reaches the splitter"
                )));
            }
            return Err(Error::Domain(format!(
                "stage {i} transmission must lie in (0, 1], got {t}"
            )));
        }
        product *= t;
    }
    if product == 0.0 {
        return Err(Error::NoSolution(
            "chain transmission underflowed to zero".into(),
        ));
    }
    Ok(target_mu_at_bs / product)
}

/// Arrival-time offset between a pulse delayed by a fiber of refractive index
/// `n` and length `length` (meters) and the nearest pulse of a train with
/// repetition period `rep_period`: (n l / c) mod rep_period.
pub fn pulse_timing_offset(refractive_index: f64, length: f64, rep_period: f64) -> Result<f64> {
    crate::error::require_finite("refractive index", refractive_index)?;
    require_nonnegative("path length", length)?;
    if !(rep_period.is_finite() && rep_period > 0.0) {
        return Err(Error::Domain("repetition period must be positive".into()));
    }
    Ok((refractive_index * length / SPEED_OF_LIGHT).rem_euclid(rep_period))
}

/// Interference visibility of a recalled pulse against a transmitted one as a
/// function of the comb bandwidth. For each grid point the stored arm's source
/// is re-balanced so both arms carry `mu_at_bs` at the splitter, the
/// transmitted pulse is re-timed onto the echo, and the mode overlap of the
/// broadened against the unbroadened envelope feeds the exact visibility.
pub fn visibility_vs_bandwidth(
    mem_template: &AfcMemory,
    pulse: &GaussianPulse,
    mu_at_bs: f64,
    bs: &BeamSplitter,
    d1: &Detector,
    d2: &Detector,
    bandwidth_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, f64)>> {
    if bandwidth_grid.is_empty() {
        return Err(Error::Domain("bandwidth grid is empty".into()));
    }
    let mut memory = *mem_template;
    memory.active = true;
    let inactive = AfcMemory {
        active: false,
        inactive_od: 0.0,
        coupling_transmission: 1.0,
        ..*mem_template
    };
    let mut curve = Vec::with_capacity(bandwidth_grid.len());
    for &b in bandwidth_grid {
        memory.bandwidth = b;
        let (probe, _) = recall(&memory, pulse, mu_at_bs)?;
        let source_mu = balance_source_mu(mu_at_bs, &[probe.efficiency])?;
        let (stored, stored_mu) = recall(&memory, pulse, source_mu)?;
        debug_assert!((stored_mu - mu_at_bs).abs() <= 1e-12 * mu_at_bs.max(1.0));
        let (through, through_mu) = transmit(&inactive, pulse, mu_at_bs)?;
        // The experiment re-times pulse generation so the transmitted pulse
        // meets the echo; only the envelopes differ.
        let mut reference = through.pulse;
        reference.arrival_time = stored.pulse.arrival_time;
        let lambda = mode_overlap(&stored.pulse, &reference)?;
        let vis = hom_visibility_exact(stored_mu, through_mu, lambda, bs, d1, d2, policy)?;
        curve.push((b, vis.visibility));
    }
    Ok(curve)
}
