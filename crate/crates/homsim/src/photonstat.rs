//! Photon-number distributions for the two source types: phase-averaged
//! coherent (laser) pulses, which are Poissonian mixtures of Fock states,
//! and Fock states themselves. Distributions are truncated with an explicit
//! bound on the omitted tail mass.

use crate::error::{require_nonnegative, Error, Result};

/// Controls where photon-number expansions are cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    epsilon: f64,
    hard_cap: usize,
}

impl TruncationPolicy {
    /// `epsilon` is the target upper bound on omitted probability mass,
    /// `hard_cap` the largest photon number ever represented.
    pub fn new(epsilon: f64, hard_cap: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "truncation epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if hard_cap < 1 {
            return Err(Error::Domain("hard_cap must be >= 1".into()));
        }
        Ok(Self { epsilon, hard_cap })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn hard_cap(&self) -> usize {
        self.hard_cap
    }

    /// Same policy with a different tail target.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.hard_cap)
    }
}

impl Default for TruncationPolicy {
    /// Covers mean photon numbers up to ~25 with negligible tail in f64.
    fn default() -> Self {
        Self {
            epsilon: 1e-12,
            hard_cap: 64,
        }
    }
}

/// A truncated probability distribution over photon number, together with
/// an upper bound on the probability mass beyond the truncation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberPMF {
    probs: Vec<f64>,
    tail_bound: f64,
}

impl PhotonNumberPMF {
    /// Probability of exactly `n` photons (zero beyond the truncation point).
    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Entries `0..=max_n`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest represented photon number.
    pub fn max_n(&self) -> usize {
        self.probs.len() - 1
    }

    /// Upper bound on the omitted mass.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Mean photon number of the truncated distribution.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

/// Poisson distribution of mean `mu`, truncated at the smallest photon number
/// whose remaining tail falls below `policy.epsilon()` (or at the hard cap,
/// whichever comes first, with the actual tail reported).
pub fn poisson_pmf(mu: f64, policy: &TruncationPolicy) -> Result<PhotonNumberPMF> {
    require_nonnegative("mean photon number", mu)?;
    let mut probs = vec![(-mu).exp()];
    let mut captured = probs[0];
    let mut n = 0usize;
    while 1.0 - captured >= policy.epsilon() && n < policy.hard_cap() {
        n += 1;
        let p = probs[n - 1] * mu / n as f64;
        probs.push(p);
        captured += p;
    }
    Ok(PhotonNumberPMF {
        probs,
        tail_bound: (1.0 - captured).max(0.0),
    })
}

/// Point mass at photon number `n`.
pub fn fock_pmf(n: usize, policy: &TruncationPolicy) -> Result<PhotonNumberPMF> {
    if n > policy.hard_cap() {
        return Err(Error::Capacity {
            module: "photonstat",
            detail: format!("fock({n}) exceeds hard cap {}", policy.hard_cap()),
            tail: 1.0,
        });
    }
    let mut probs = vec![0.0; n + 1];
    probs[n] = 1.0;
    Ok(PhotonNumberPMF {
        probs,
        tail_bound: 0.0,
    })
}

/// What kind of light a source emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Laser pulse with uniformly random optical phase; Poissonian photon
    /// statistics, diagonal in the Fock basis.
    PhaseAveragedCoherent,
    /// Definite photon number.
    Fock(usize),
}

/// One optical source: its photon statistics, characterized entirely by the
/// mean photon number per pulse (phases are averaged away).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePulse {
    kind: SourceKind,
    mean_photons: f64,
}

impl SourcePulse {
    pub fn coherent(mean_photons: f64) -> Result<Self> {
        require_nonnegative("mean photon number", mean_photons)?;
        Ok(Self {
            kind: SourceKind::PhaseAveragedCoherent,
            mean_photons,
        })
    }

    pub fn fock(n: usize) -> Self {
        Self {
            kind: SourceKind::Fock(n),
            mean_photons: n as f64,
        }
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    /// Photon-number distribution of this source.
    pub fn pmf(&self, policy: &TruncationPolicy) -> Result<PhotonNumberPMF> {
        match self.kind {
            SourceKind::PhaseAveragedCoherent => poisson_pmf(self.mean_photons, policy),
            SourceKind::Fock(n) => fock_pmf(n, policy),
        }
    }

    /// Same source scaled to a different mean photon number. For Fock sources
    /// this is only valid when the target is an integer matching a Fock state,
    /// so scaling is restricted to coherent sources.
    pub fn with_mean_photons(&self, mean_photons: f64) -> Result<Self> {
        match self.kind {
            SourceKind::PhaseAveragedCoherent => Self::coherent(mean_photons),
            SourceKind::Fock(_) => Err(Error::Domain(
                "cannot rescale the mean photon number of a Fock source".into(),
            )),
        }
    }
}
