//! Non-number-resolving click detectors: at most one detection event per
//! gate, each incident photon detected independently with probability eta.

use crate::error::{Error, Result};
use crate::splitter::JointOutputDistribution;

/// Single-photon detector with efficiency `eta` and an optional per-gate
/// dark-click probability that fires independently of incident photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    eta: f64,
    dark: f64,
}

impl Detector {
    pub fn new(eta: f64, dark: f64) -> Result<Self> {
        crate::error::require_in_unit("detector efficiency", eta)?;
        if !(dark.is_finite() && (0.0..1.0).contains(&dark)) {
            return Err(Error::Domain(format!(
                "dark-click probability must lie in [0, 1), got {dark}"
            )));
        }
        Ok(Self { eta, dark })
    }

    /// Unit efficiency, no dark clicks.
    pub fn ideal() -> Self {
        Self {
            eta: 1.0,
            dark: 0.0,
        }
    }

    /// Noiseless detector of the given efficiency.
    pub fn with_efficiency(eta: f64) -> Result<Self> {
        Self::new(eta, 0.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dark(&self) -> f64 {
        self.dark
    }

    /// Probability that a pulse of mean intensity `intensity` (photons per
    /// gate, Poissonian) produces a click: 1 - (1 - dark) e^(-eta I).
    pub fn click_probability_for_intensity(&self, intensity: f64) -> f64 {
        1.0 - (1.0 - self.dark) * (-self.eta * intensity).exp()
    }
}

/// Probability of a click given exactly `n` incident photons:
/// 1 - (1 - dark)(1 - eta)^n.
pub fn click_probability(n: usize, det: &Detector) -> f64 {
    1.0 - (1.0 - det.dark) * (1.0 - det.eta).powi(n as i32)
}

/// Probability that both detectors click, one at each spatial output.
pub fn coincidence_probability(
    dist: &JointOutputDistribution,
    d1: &Detector,
    d2: &Detector,
) -> f64 {
    let c1: Vec<f64> = (0..=dist.max_c()).map(|n| click_probability(n, d1)).collect();
    let c2: Vec<f64> = (0..=dist.max_d()).map(|n| click_probability(n, d2)).collect();
    dist.iter().map(|(nc, nd, p)| p * c1[nc] * c2[nd]).sum()
}

/// Probability that the detector at output c clicks, regardless of the other.
pub fn single_detector_probability(dist: &JointOutputDistribution, det: &Detector) -> f64 {
    let c: Vec<f64> = (0..=dist.max_c()).map(|n| click_probability(n, det)).collect();
    dist.iter().map(|(nc, _, p)| p * c[nc]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitter::{
        fock_output_distinguishable, fock_output_indistinguishable, BeamSplitter,
    };
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_never_clicks_without_dark() {
        let det = Detector::with_efficiency(0.7).unwrap();
        assert_eq!(click_probability(0, &det), 0.0);
    }

    #[test]
    fn one_photon_clicks_with_eta() {
        let det = Detector::with_efficiency(0.7).unwrap();
        assert_abs_diff_eq!(click_probability(1, &det), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn multi_photon_click_closed_form() {
        let det = Detector::with_efficiency(0.5).unwrap();
        assert_abs_diff_eq!(click_probability(3, &det), 0.875, epsilon = 1e-15);
    }

    #[test]
    fn dark_clicks_or_with_photons() {
        let det = Detector::new(0.7, 0.1).unwrap();
        assert_abs_diff_eq!(click_probability(0, &det), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(
            click_probability(1, &det),
            1.0 - 0.9 * 0.3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn monotone_in_photon_number_eta_and_dark() {
        for n in 0..6usize {
            let d = Detector::new(0.4, 0.05).unwrap();
            assert!(click_probability(n + 1, &d) >= click_probability(n, &d));
        }
        for i in 0..10 {
            let lo = Detector::new(0.1 * i as f64 / 10.0, 0.0).unwrap();
            let hi = Detector::new(0.1 * (i + 1) as f64 / 10.0, 0.0).unwrap();
            assert!(click_probability(2, &hi) >= click_probability(2, &lo));
        }
    }

    #[test]
    fn bunched_photons_never_coincide() {
        let dist = fock_output_indistinguishable(1, 1, &BeamSplitter::balanced()).unwrap();
        let p = coincidence_probability(&dist, &Detector::ideal(), &Detector::ideal());
        assert_eq!(p, 0.0);
    }

    #[test]
    fn distinguishable_pair_coincides_half_the_time() {
        let dist = fock_output_distinguishable(1, 1, &BeamSplitter::balanced()).unwrap();
        let p = coincidence_probability(&dist, &Detector::ideal(), &Detector::ideal());
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn empty_port_cannot_click() {
        // Point mass at (2, 0): detector 2 sees vacuum.
        let dist = fock_output_indistinguishable(2, 0, &BeamSplitter::new(0.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(dist.prob(2, 0), 1.0);
        let p = coincidence_probability(
            &dist,
            &Detector::with_efficiency(0.9).unwrap(),
            &Detector::with_efficiency(0.9).unwrap(),
        );
        assert_eq!(p, 0.0);
    }

    #[test]
    fn single_detector_marginalizes_other_output() {
        let dist = fock_output_indistinguishable(1, 0, &BeamSplitter::balanced()).unwrap();
        let det = Detector::with_efficiency(0.7).unwrap();
        assert_abs_diff_eq!(
            single_detector_probability(&dist, &det),
            0.5 * 0.7,
            epsilon = 1e-14
        );
    }
}
