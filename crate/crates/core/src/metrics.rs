//! False-alarm, detection and missed-detection rates, and ROC curves.
//!
//! `P_FA = P(H1 | H0)`, `P_D = P(H1 | H1)` and `P_MD = P(H0 | H1)`. A
//! [`RatePoint`] only ever stores `P_D`; `P_MD` is derived as `1 − P_D`, so
//! the two always sum to one.

use crate::error::{domain, Result};

/// Outcome tallies from a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub h0_trials: u64,
    pub false_alarms: u64,
    pub h1_trials: u64,
    pub detections: u64,
}

impl ConfusionCounts {
    pub fn new(h0_trials: u64, false_alarms: u64, h1_trials: u64, detections: u64) -> Result<Self> {
        if false_alarms > h0_trials || detections > h1_trials {
            return Err(domain("event counts exceed trial counts"));
        }
        Ok(Self {
            h0_trials,
            false_alarms,
            h1_trials,
            detections,
        })
    }
}

/// Binomial standard error `√(r(1 − r)/n)`.
pub fn binomial_stderr(rate: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// One operating point of a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pfa: f64,
    pd: f64,
    stderr_pfa: f64,
    stderr_pd: f64,
}

impl RatePoint {
    /// Builds a point from a detection probability; `pmd` follows from it.
    pub fn new(pfa: f64, pd: f64, stderr_pfa: f64, stderr_pd: f64) -> Result<Self> {
        for (name, r) in [("pfa", pfa), ("pd", pd)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(domain(format!("{name} = {r} is not a probability")));
            }
        }
        for (name, s) in [("stderr_pfa", stderr_pfa), ("stderr_pd", stderr_pd)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(domain(format!("{name} = {s} must be finite and ≥ 0")));
            }
        }
        Ok(Self {
            pfa,
            pd,
            stderr_pfa,
            stderr_pd,
        })
    }

    /// Exact point (zero standard error), as produced by the closed forms.
    pub fn exact(pfa: f64, pd: f64) -> Result<Self> {
        Self::new(pfa, pd, 0.0, 0.0)
    }

    pub fn pfa(&self) -> f64 {
        self.pfa
    }

    pub fn pd(&self) -> f64 {
        self.pd
    }

    pub fn pmd(&self) -> f64 {
        1.0 - self.pd
    }

    pub fn stderr_pfa(&self) -> f64 {
        self.stderr_pfa
    }

    pub fn stderr_pd(&self) -> f64 {
        self.stderr_pd
    }

    /// Same as `stderr_pd`: `pmd` is an affine function of `pd`.
    pub fn stderr_pmd(&self) -> f64 {
        self.stderr_pd
    }
}

/// Empirical rates from trial counts.
pub fn rates_from_counts(c: &ConfusionCounts) -> Result<RatePoint> {
    if c.h0_trials == 0 || c.h1_trials == 0 {
        return Err(domain("rates need at least one trial under each hypothesis"));
    }
    if c.false_alarms > c.h0_trials || c.detections > c.h1_trials {
        return Err(domain("event counts exceed trial counts"));
    }
    let pfa = c.false_alarms as f64 / c.h0_trials as f64;
    let pd = c.detections as f64 / c.h1_trials as f64;
    RatePoint::new(
        pfa,
        pd,
        binomial_stderr(pfa, c.h0_trials),
        binomial_stderr(pd, c.h1_trials),
    )
}

/// Whether a curve comes from closed forms or from simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Analytic,
    Empirical,
}

/// Slack allowed on an analytic curve before a decrease counts as a bug.
pub const ANALYTIC_MONOTONE_TOL: f64 = 1e-12;

/// An ROC curve ordered by strictly decreasing threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, RatePoint)>,
    warnings: Vec<String>,
}

impl RocCurve {
    pub fn points(&self) -> &[(f64, RatePoint)] {
        &self.points
    }

    /// Monotonicity violations within Monte Carlo noise (more than 3σ).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest and largest `pfa` on the curve.
    pub fn pfa_support(&self) -> (f64, f64) {
        let lo = self.points.iter().map(|p| p.1.pfa).fold(f64::INFINITY, f64::min);
        let hi = self.points.iter().map(|p| p.1.pfa).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Linearly interpolated `(pd, stderr_pd)` at `pfa`.
    ///
    /// Where several points share the queried `pfa` the one with the largest
    /// `pd` wins, which is the achievable operating point.
    pub fn pd_at(&self, pfa: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.pfa_support();
        if !(pfa >= lo && pfa <= hi) {
            return Err(domain(format!(
                "pfa {pfa} outside curve support [{lo}, {hi}]"
            )));
        }
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |v: (f64, f64)| {
            if best.is_none_or(|b| v.0 > b.0) {
                best = Some(v);
            }
        };
        for (_, p) in &self.points {
            if p.pfa == pfa {
                consider((p.pd, p.stderr_pd));
            }
        }
        for w in self.points.windows(2) {
            let (a, b) = (&w[0].1, &w[1].1);
            let (x0, x1) = if a.pfa <= b.pfa { (a, b) } else { (b, a) };
            if x0.pfa < pfa && pfa < x1.pfa {
                let t = (pfa - x0.pfa) / (x1.pfa - x0.pfa);
                let pd = x0.pd + t * (x1.pd - x0.pd);
                let se = ((1.0 - t).powi(2) * x0.stderr_pd.powi(2) + t.powi(2) * x1.stderr_pd.powi(2)).sqrt();
                consider((pd, se));
            }
        }
        best.ok_or_else(|| domain(format!("no curve segment covers pfa {pfa}")))
    }
}

/// Sorts points by decreasing threshold and checks the ROC shape.
///
/// Along decreasing λ both `pfa` and `pd` must not decrease. For analytic
/// curves a drop larger than [`ANALYTIC_MONOTONE_TOL`] is an error; for
/// empirical curves a drop larger than three combined standard errors is
/// recorded as a warning.
pub fn roc_assemble(mut points: Vec<(f64, RatePoint)>, kind: CurveKind) -> Result<RocCurve> {
    if points.is_empty() {
        return Err(domain("an ROC curve needs at least one point"));
    }
    if let Some((l, _)) = points.iter().find(|(l, _)| l.is_nan()) {
        return Err(domain(format!("threshold {l} is not a number")));
    }
    points.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(domain(format!("duplicate threshold {}", w[0].0)));
    }
    let mut warnings = Vec::new();
    for w in points.windows(2) {
        let ((l0, a), (l1, b)) = (&w[0], &w[1]);
        let checks = [
            ("pfa", a.pfa, b.pfa, a.stderr_pfa, b.stderr_pfa),
            ("pd", a.pd, b.pd, a.stderr_pd, b.stderr_pd),
        ];
        for (name, x0, x1, s0, s1) in checks {
            let drop = x0 - x1;
            if drop <= 0.0 {
                continue;
            }
            match kind {
                CurveKind::Analytic if drop > ANALYTIC_MONOTONE_TOL => {
                    return Err(domain(format!(
                        "analytic {name} decreases from {x0} to {x1} between λ={l0} and λ={l1}"
                    )));
                }
                CurveKind::Empirical if drop > 3.0 * (s0 * s0 + s1 * s1).sqrt() => {
                    warnings.push(format!(
                        "{name} drops from {x0} to {x1} between λ={l0} and λ={l1}"
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(RocCurve { points, warnings })
}

/// Pointwise comparison of two curves at one `pfa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceEntry {
    pub pfa: f64,
    pub pd_a: f64,
    pub pd_b: f64,
    /// `pd_a − pd_b`.
    pub delta: f64,
    pub stderr_delta: f64,
}

/// Interpolates both curves on `pfa_grid` and reports `pd_a − pd_b`.
pub fn roc_dominates(a: &RocCurve, b: &RocCurve, pfa_grid: &[f64]) -> Result<Vec<DominanceEntry>> {
    pfa_grid
        .iter()
        .map(|&pfa| {
            let (pd_a, se_a) = a.pd_at(pfa)?;
            let (pd_b, se_b) = b.pd_at(pfa)?;
            Ok(DominanceEntry {
                pfa,
                pd_a,
                pd_b,
                delta: pd_a - pd_b,
                stderr_delta: (se_a * se_a + se_b * se_b).sqrt(),
            })
        })
        .collect()
}
