//! Closed forms for the squaring detector and threshold calibration.
//!
//! With unit-power BPSK, fading gain `h` and SNR `γ`, the normalized energy
//! statistic over `n` samples is `χ²_n` under H0 and noncentral `χ²_n(δ)`
//! with `δ = n·γ·h²` under H1. The noncentral survival function is
//! evaluated as a Poisson mixture of central ones,
//!
//! ```text
//! P(χ²_n(δ) > λ) = Σ_k e^(−δ/2) (δ/2)^k / k! · P(χ²_{n+2k} > λ),
//! ```
//!
//! which equals the generalized Marcum function `Q_{n/2}(√δ, √λ)`.
//!
//! Under Rayleigh block fading `h² ~ Exp(1)`, so the instantaneous SNR is
//! exponential with mean `γ̄`. The fading-averaged detection probability is
//! the AWGN one integrated against that density by Gauss–Laguerre
//! quadrature.
//!
//! There is no closed form for the cubing detector; it is calibrated by
//! empirical quantiles instead.

use crate::detector::{exceeds, statistic_value, DetectorSpec};
use crate::error::{domain, Error, Result};
use crate::metrics::binomial_stderr;
use crate::rng::trial_rng;
use crate::signal_channel::{noise_frame, ChannelModel};
use crate::special::{gamma_q, ln_gamma, GaussLaguerre};

use rayon::prelude::*;

/// Poisson tail mass left out of the noncentral series.
pub const POISSON_TAIL_TOL: f64 = 1e-12;
/// Largest number of mixture terms before giving up.
pub const POISSON_MAX_TERMS: usize = 1_000_000;
/// Accuracy of analytic threshold calibration in P_FA units.
pub const ANALYTIC_CALIBRATION_TOL: f64 = 1e-9;
/// Fewest H0 statistics an empirical quantile may be taken from.
pub const MIN_QUANTILE_TRIALS: u64 = 100_000;

fn check_dof(dof: u32) -> Result<()> {
    if dof == 0 {
        return Err(domain("degrees of freedom must be at least 1"));
    }
    Ok(())
}

fn check_threshold(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(domain(format!("threshold must be ≥ 0, got {lambda}")));
    }
    Ok(())
}

/// `P(χ²_ν > λ)`.
pub fn chi2_sf(dof: u32, lambda: f64) -> Result<f64> {
    check_dof(dof)?;
    check_threshold(lambda)?;
    gamma_q(dof as f64 / 2.0, lambda / 2.0)
}

/// `P(χ²_ν(δ) > λ)` by the Poisson mixture, summed outward from the mode.
pub fn noncentral_chi2_sf(dof: u32, noncentrality: f64, lambda: f64) -> Result<f64> {
    check_dof(dof)?;
    check_threshold(lambda)?;
    if !(noncentrality >= 0.0 && noncentrality.is_finite()) {
        return Err(domain(format!(
            "noncentrality must be finite and ≥ 0, got {noncentrality}"
        )));
    }
    if noncentrality == 0.0 {
        return chi2_sf(dof, lambda);
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let mu = noncentrality / 2.0;
    let term = |k: u64| -> Result<f64> { chi2_sf(dof + 2 * k as u32, lambda) };
    let weight = |k: u64| -> f64 {
        let kf = k as f64;
        (-mu + kf * mu.ln() - ln_gamma(kf + 1.0)).exp()
    };

    let mode = mu.floor() as u64;
    let w_mode = weight(mode);
    let mut sum = w_mode * term(mode)?;
    let mut terms = 1usize;

    // Upward: w_{k+1} = w_k · μ/(k+1); the tail past k is at most
    // w_k·r/(1−r) with r = μ/(k+2) once k+2 > μ.
    let mut k = mode;
    let mut w = w_mode;
    loop {
        let r = mu / (k + 2) as f64;
        if r < 1.0 && w * r / (1.0 - r) < POISSON_TAIL_TOL / 2.0 {
            break;
        }
        k += 1;
        w *= mu / k as f64;
        sum += w * term(k)?;
        terms += 1;
        if terms > POISSON_MAX_TERMS {
            return Err(Error::Numeric(format!(
                "noncentral series did not converge (dof={dof}, δ={noncentrality}, λ={lambda})"
            )));
        }
    }

    // Downward: w_{k−1} = w_k · k/μ; the tail below k is at most
    // w_k·r/(1−r) with r = k/μ.
    let mut k = mode;
    let mut w = w_mode;
    while k > 0 {
        let r = k as f64 / mu;
        if r < 1.0 && w * r / (1.0 - r) < POISSON_TAIL_TOL / 2.0 {
            break;
        }
        w *= k as f64 / mu;
        k -= 1;
        sum += w * term(k)?;
        terms += 1;
        if terms > POISSON_MAX_TERMS {
            return Err(Error::Numeric(format!(
                "noncentral series did not converge (dof={dof}, δ={noncentrality}, λ={lambda})"
            )));
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// False-alarm probability of the normalized squaring detector.
pub fn pfa_analytic(n: u32, lambda: f64) -> Result<f64> {
    chi2_sf(n, lambda)
}

/// Detection probability of the normalized squaring detector in AWGN with
/// unit-power BPSK at linear SNR `gamma`.
pub fn pd_awgn_analytic(n: u32, gamma: f64, lambda: f64) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(domain(format!("SNR must be finite and ≥ 0, got {gamma}")));
    }
    noncentral_chi2_sf(n, n as f64 * gamma, lambda)
}

/// Detection probability averaged over Rayleigh block fading with mean
/// linear SNR `mean_gamma`.
pub fn pd_rayleigh_analytic(n: u32, mean_gamma: f64, lambda: f64) -> Result<f64> {
    if !(mean_gamma > 0.0 && mean_gamma.is_finite()) {
        return Err(domain(format!(
            "mean SNR must be finite and > 0, got {mean_gamma}"
        )));
    }
    check_dof(n)?;
    check_threshold(lambda)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let v = GaussLaguerre::standard().integrate(|t| pd_awgn_analytic(n, mean_gamma * t, lambda))?;
    if !v.is_finite() {
        return Err(Error::Numeric("fading quadrature produced a non-finite value".into()));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// How a threshold is chosen for a target false-alarm rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationMethod {
    /// Bisection on the χ² survival function; squaring detector only.
    Analytic,
    /// Upper quantile of seeded noise-only statistics.
    EmpiricalQuantile {
        trials: u64,
        seed: u64,
        /// Thread count for the simulation; 0 uses the global pool.
        workers: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationKind {
    Analytic,
    EmpiricalQuantile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    pub lambda: f64,
    pub achieved_pfa: f64,
    pub method: CalibrationKind,
    /// Zero for analytic calibration.
    pub mc_trials: u64,
    /// Standard error of `achieved_pfa` (zero when analytic).
    pub stderr: f64,
    /// Promised bound on `|achieved_pfa − target|`.
    pub tolerance: f64,
}

/// Picks λ so the detector's false-alarm rate equals `target_pfa`.
///
/// Thresholds are in the detector's own units with unit noise variance.
pub fn calibrate_threshold(
    spec: &DetectorSpec,
    n: u32,
    target_pfa: f64,
    method: CalibrationMethod,
) -> Result<CalibrationResult> {
    let mut v = calibrate_thresholds(spec, n, &[target_pfa], method)?;
    Ok(v.remove(0))
}

/// [`calibrate_threshold`] for several targets; empirical calibration
/// simulates the noise-only statistics once and reads every quantile off
/// the same sample.
pub fn calibrate_thresholds(
    spec: &DetectorSpec,
    n: u32,
    targets: &[f64],
    method: CalibrationMethod,
) -> Result<Vec<CalibrationResult>> {
    for &t in targets {
        check_target(t)?;
    }
    check_dof(n)?;
    match method {
        CalibrationMethod::Analytic => {
            if spec.p() != 2 {
                return Err(Error::Config(format!(
                    "no closed form for {spec}; use empirical calibration"
                )));
            }
            targets.iter().map(|&t| calibrate_chi2(n, t)).collect()
        }
        CalibrationMethod::EmpiricalQuantile {
            trials,
            seed,
            workers,
        } => {
            let mut stats = noise_statistics(spec, n, trials, seed, workers)?;
            stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
            targets
                .iter()
                .map(|&t| quantile_threshold(&stats, t))
                .collect()
        }
    }
}

pub(crate) fn check_target(target_pfa: f64) -> Result<()> {
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(domain(format!(
            "target P_FA must lie in (0, 1), got {target_pfa}"
        )));
    }
    Ok(())
}

pub(crate) fn calibrate_chi2(n: u32, target: f64) -> Result<CalibrationResult> {
    // Bracket [lo, hi] with sf(lo) ≥ target > sf(hi).
    let mut lo = 0.0;
    let mut hi = (n as f64).max(1.0);
    while chi2_sf(n, hi)? >= target {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("threshold bracket overflowed".into()));
        }
    }
    let mut best = (lo, chi2_sf(n, lo)?);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let sf = chi2_sf(n, mid)?;
        if (sf - target).abs() < (best.1 - target).abs() {
            best = (mid, sf);
        }
        if (sf - target).abs() <= ANALYTIC_CALIBRATION_TOL / 10.0 || mid == lo || mid == hi {
            break;
        }
        if sf >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target).abs() > ANALYTIC_CALIBRATION_TOL {
        return Err(Error::Numeric(format!(
            "bisection stalled at P_FA {} for target {target}",
            best.1
        )));
    }
    Ok(CalibrationResult {
        lambda: best.0,
        achieved_pfa: best.1,
        method: CalibrationKind::Analytic,
        mc_trials: 0,
        stderr: 0.0,
        tolerance: ANALYTIC_CALIBRATION_TOL,
    })
}

/// Noise-only statistics, one per trial, in trial order.
fn noise_statistics(spec: &DetectorSpec, n: u32, trials: u64, seed: u64, workers: usize) -> Result<Vec<f64>> {
    check_quantile_trials(trials)?;
    let channel = ChannelModel::awgn();
    let sigma = channel.noise_std();
    let run = || -> Result<Vec<f64>> {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let w = noise_frame(n as usize, &channel, &mut trial_rng(seed, i))?;
                Ok(statistic_value(w.samples(), spec, sigma))
            })
            .collect()
    };
    crate::montecarlo::Engine::new(workers)?.install(run)
}

pub(crate) fn check_quantile_trials(trials: u64) -> Result<()> {
    if trials < MIN_QUANTILE_TRIALS {
        return Err(Error::Config(format!(
            "empirical calibration needs at least {MIN_QUANTILE_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// λ = the statistic with exactly `round(target·M)` of the `M` sorted
/// values at or above it.
pub(crate) fn quantile_threshold(sorted: &[f64], target: f64) -> Result<CalibrationResult> {
    let m = sorted.len();
    let k = (target * m as f64).round() as usize;
    if k == 0 || k >= m {
        return Err(Error::Config(format!(
            "{m} trials cannot resolve a P_FA of {target}"
        )));
    }
    let lambda = sorted[m - k];
    let below = sorted.partition_point(|&t| !exceeds(t, lambda));
    let achieved = (m - below) as f64 / m as f64;
    let stderr = binomial_stderr(target, m as u64);
    Ok(CalibrationResult {
        lambda,
        achieved_pfa: achieved,
        method: CalibrationKind::EmpiricalQuantile,
        mc_trials: m as u64,
        stderr,
        tolerance: 3.0 * stderr,
    })
}
