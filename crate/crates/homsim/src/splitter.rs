//! Beam-splitter transforms of Fock inputs into joint output photon-number
//! distributions. The two input pulses may share the same auxiliary mode
//! (indistinguishable), occupy orthogonal auxiliary modes (distinguishable),
//! or anything in between via a single real mode-overlap parameter.

use std::sync::LazyLock;

use crate::error::{require_nonnegative, Error, Result};
use crate::photonstat::{poisson_pmf, TruncationPolicy};

/// Largest photon number for which factorial tables are built.
const MAX_PHOTONS: usize = 2048;

/// ln(n!) for n = 0..=MAX_PHOTONS, built once and shared read-only.
static LN_FACTORIAL: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let mut table = Vec::with_capacity(MAX_PHOTONS + 1);
    table.push(0.0);
    for n in 1..=MAX_PHOTONS {
        table.push(table[n - 1] + (n as f64).ln());
    }
    table
});

fn ln_factorial(n: usize) -> f64 {
    LN_FACTORIAL[n]
}

/// Amplitudes below this are flushed to zero when accumulating coefficients.
const AMPLITUDE_FLOOR: f64 = 1e-300;

/// Lossless two-port splitter with real reflection and transmission
/// amplitudes. The reflected amplitude carries the usual factor i, which
/// drops out of every probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    r: f64,
    t: f64,
}

impl BeamSplitter {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(r.is_finite() && t.is_finite() && (0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&t))
        {
            return Err(Error::Domain(format!(
                "beam-splitter amplitudes must lie in [0, 1], got r={r}, t={t}"
            )));
        }
        if (r * r + t * t - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "beam splitter must satisfy r^2 + t^2 = 1, got {}",
                r * r + t * t
            )));
        }
        Ok(Self { r, t })
    }

    /// 50:50 splitter.
    pub fn balanced() -> Self {
        Self {
            r: std::f64::consts::FRAC_1_SQRT_2,
            t: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// Splitter with intensity reflectance `r_squared`.
    pub fn from_reflectance(r_squared: f64) -> Result<Self> {
        crate::error::require_in_unit("reflectance", r_squared)?;
        Ok(Self {
            r: r_squared.sqrt(),
            t: (1.0 - r_squared).sqrt(),
        })
    }

    pub fn reflection_amplitude(&self) -> f64 {
        self.r
    }

    pub fn transmission_amplitude(&self) -> f64 {
        self.t
    }
}

/// Mode overlap between the two input pulses: 1 for fully indistinguishable,
/// 0 for fully distinguishable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapParameter(f64);

impl OverlapParameter {
    pub fn new(lambda: f64) -> Result<Self> {
        crate::error::require_in_unit("mode overlap", lambda)?;
        Ok(Self(lambda))
    }

    pub fn full() -> Self {
        Self(1.0)
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Joint distribution of photon numbers at the two spatial outputs, each
/// aggregated over both auxiliary modes. Dense matrix indexed (n_c, n_d).
#[derive(Debug, Clone, PartialEq)]
pub struct JointOutputDistribution {
    probs: Vec<f64>,
    dim_c: usize,
    dim_d: usize,
    tail: f64,
}

impl JointOutputDistribution {
    fn zeros(dim_c: usize, dim_d: usize) -> Self {
        Self {
            probs: vec![0.0; dim_c * dim_d],
            dim_c,
            dim_d,
            tail: 0.0,
        }
    }

    pub fn prob(&self, n_c: usize, n_d: usize) -> f64 {
        if n_c < self.dim_c && n_d < self.dim_d {
            self.probs[n_c * self.dim_d + n_d]
        } else {
            0.0
        }
    }

    fn add(&mut self, n_c: usize, n_d: usize, p: f64) {
        self.probs[n_c * self.dim_d + n_d] += p;
    }

    /// Largest represented photon number at output c.
    pub fn max_c(&self) -> usize {
        self.dim_c - 1
    }

    /// Largest represented photon number at output d.
    pub fn max_d(&self) -> usize {
        self.dim_d - 1
    }

    /// Probability mass not represented due to truncation.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Iterate over all support points as (n_c, n_d, probability).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.probs.iter().enumerate().filter_map(move |(i, &p)| {
            if p > 0.0 {
                Some((i / self.dim_d, i % self.dim_d, p))
            } else {
                None
            }
        })
    }

    /// Mean photon number at output c.
    pub fn mean_c(&self) -> f64 {
        self.iter().map(|(nc, _, p)| nc as f64 * p).sum()
    }

    /// Mean photon number at output d.
    pub fn mean_d(&self) -> f64 {
        self.iter().map(|(_, nd, p)| nd as f64 * p).sum()
    }
}

fn check_fock_input(n: usize, m: usize) -> Result<()> {
    if n + m > MAX_PHOTONS {
        return Err(Error::Capacity {
            module: "splitter",
            detail: format!("total input photon number {} exceeds {MAX_PHOTONS}", n + m),
            tail: 1.0,
        });
    }
    Ok(())
}

/// Output distribution for Fock inputs |n> and |m> occupying the same
/// auxiliary mode. Amplitudes leading to the same output occupation are
/// summed coherently before squaring; with the i-reflection convention all
/// terms for a given output share a unit phase times an alternating sign.
pub fn fock_output_indistinguishable(
    n: usize,
    m: usize,
    bs: &BeamSplitter,
) -> Result<JointOutputDistribution> {
    check_fock_input(n, m)?;
    let total = n + m;
    let mut dist = JointOutputDistribution::zeros(total + 1, total + 1);
    let (r, t) = (bs.r, bs.t);
    for s in 0..=total {
        let mut amp = 0.0;
        let j_lo = s.saturating_sub(m);
        let j_hi = n.min(s);
        for j in j_lo..=j_hi {
            let k = s - j;
            // K(n,m,j,k) = t^(m-k+j) (i r)^(n-j+k) sqrt(C(n,j) C(m,k) C(j+k,j) C(n+m-j-k, n-j))
            let ln_binoms = 0.5
                * (ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j)
                    + ln_factorial(m)
                    - ln_factorial(k)
                    - ln_factorial(m - k)
                    + ln_factorial(s)
                    - ln_factorial(j)
                    - ln_factorial(k)
                    + ln_factorial(total - s)
                    - ln_factorial(n - j)
                    - ln_factorial(m - k));
            let magnitude =
                t.powi((m - k + j) as i32) * r.powi((n - j + k) as i32) * ln_binoms.exp();
            if magnitude < AMPLITUDE_FLOOR {
                continue;
            }
            // i^(n-j+k) = i^(n+s) * (-1)^j within fixed s; the common unit
            // phase i^(n+s) drops out of the squared modulus.
            if j % 2 == 0 {
                amp += magnitude;
            } else {
                amp -= magnitude;
            }
        }
        dist.add(s, total - s, amp * amp);
    }
    Ok(dist)
}

/// Output distribution for Fock inputs |n> and |m> in orthogonal auxiliary
/// modes. The photons route independently, so each spatial output collects a
/// binomial share of each input.
pub fn fock_output_distinguishable(
    n: usize,
    m: usize,
    bs: &BeamSplitter,
) -> Result<JointOutputDistribution> {
    check_fock_input(n, m)?;
    let total = n + m;
    let mut dist = JointOutputDistribution::zeros(total + 1, total + 1);
    let t2 = bs.t * bs.t;
    let r2 = bs.r * bs.r;
    for j in 0..=n {
        let ln_bn = ln_factorial(n) - ln_factorial(j) - ln_factorial(n - j);
        let pa = ln_bn.exp() * t2.powi(j as i32) * r2.powi((n - j) as i32);
        for k in 0..=m {
            let ln_bm = ln_factorial(m) - ln_factorial(k) - ln_factorial(m - k);
            let pb = ln_bm.exp() * r2.powi(k as i32) * t2.powi((m - k) as i32);
            let p = pa * pb;
            if p < AMPLITUDE_FLOOR {
                continue;
            }
            dist.add(j + k, total - j - k, p);
        }
    }
    Ok(dist)
}

fn pmf_or_capacity(
    mu: f64,
    policy: &TruncationPolicy,
    what: &str,
) -> Result<crate::photonstat::PhotonNumberPMF> {
    let pmf = poisson_pmf(mu, policy)?;
    if pmf.tail_bound() > policy.epsilon() {
        return Err(Error::Capacity {
            module: "splitter",
            detail: format!(
                "{what} (mu = {mu}) hit the hard cap {} before reaching epsilon {}",
                policy.hard_cap(),
                policy.epsilon()
            ),
            tail: pmf.tail_bound(),
        });
    }
    Ok(pmf)
}

/// Joint spatial-output distribution for two phase-averaged coherent inputs
/// of means `mu_a` and `mu_b` with mode overlap `lambda`.
///
/// Input b splits exactly into a parallel component of mean `lambda^2 mu_b`
/// that interferes with input a, and an orthogonal component of mean
/// `(1 - lambda^2) mu_b` that routes independently; both are Poissonian and
/// independent once phases are averaged.
pub fn coherent_joint_output(
    mu_a: f64,
    mu_b: f64,
    lambda: OverlapParameter,
    bs: &BeamSplitter,
    policy: &TruncationPolicy,
) -> Result<JointOutputDistribution> {
    require_nonnegative("mu_a", mu_a)?;
    require_nonnegative("mu_b", mu_b)?;
    let l2 = lambda.value() * lambda.value();
    let mu_par = l2 * mu_b;
    let mu_perp = (1.0 - l2) * mu_b;
    let r2 = bs.r * bs.r;
    let t2 = bs.t * bs.t;

    let pa = pmf_or_capacity(mu_a, policy, "input a")?;
    let pb = pmf_or_capacity(mu_par, policy, "parallel component of input b")?;
    let pc = pmf_or_capacity(r2 * mu_perp, policy, "orthogonal component at output c")?;
    let pd = pmf_or_capacity(t2 * mu_perp, policy, "orthogonal component at output d")?;

    // Poisson mixture of indistinguishable Fock transforms for a + b-parallel.
    let interf_dim = pa.max_n() + pb.max_n() + 1;
    let mut interf = JointOutputDistribution::zeros(interf_dim, interf_dim);
    for (n, &wa) in pa.probs().iter().enumerate() {
        for (m, &wb) in pb.probs().iter().enumerate() {
            let w = wa * wb;
            if w < AMPLITUDE_FLOOR {
                continue;
            }
            let fock = fock_output_indistinguishable(n, m, bs)?;
            for (nc, nd, p) in fock.iter() {
                interf.add(nc, nd, w * p);
            }
        }
    }

    // Convolve with the independently routed orthogonal component.
    let dim_c = interf_dim + pc.max_n();
    let dim_d = interf_dim + pd.max_n();
    let mut out = JointOutputDistribution::zeros(dim_c, dim_d);
    for (nc, nd, p) in interf.iter() {
        for (i, &wc) in pc.probs().iter().enumerate() {
            let pw = p * wc;
            if pw < AMPLITUDE_FLOOR {
                continue;
            }
            for (j, &wd) in pd.probs().iter().enumerate() {
                out.add(nc + i, nd + j, pw * wd);
            }
        }
    }
    out.tail = (1.0 - out.total()).max(0.0);
    Ok(out)
}
