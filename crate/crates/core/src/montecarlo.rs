//! Seeded Monte Carlo estimation of detector rates.
//!
//! A run draws `trials` independent frames. Trial `i` of a scenario seeded
//! with `s` reads only from [`trial_rng(s, i)`](crate::rng::trial_rng), in
//! this order: primary-user samples, fading gain, noise. Noise-only trials
//! draw noise alone. Results depend on nothing but the scenario, so any
//! thread count gives identical output.
//!
//! Statistics are computed once per trial and reused for every threshold
//! (and for every detector in a comparison). Sweeps over λ are therefore
//! exactly monotone, not just monotone on average.

use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::analytic::{
    calibrate_chi2, check_quantile_trials, check_target, quantile_threshold, CalibrationKind,
    CalibrationResult,
};
use crate::detector::{exceeds, statistic_value, DetectorSpec};
use crate::error::{Error, Result};
use crate::metrics::{binomial_stderr, rates_from_counts, roc_assemble, ConfusionCounts, CurveKind, RatePoint, RocCurve};
use crate::reference;
use crate::rng::{derive_seed, labels, trial_rng};
use crate::signal_channel::{gen_primary, noise_frame, transmit, ChannelModel, SampleFrame, SignalModel, Snr};

/// Whether the primary user transmits during a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Presence {
    /// H0: noise only.
    NoiseOnly,
    /// H1 at the given SNR. `Snr::Linear(0.0)` is allowed and makes H1
    /// statistically identical to H0.
    Signal(Snr),
}

/// A fully specified experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub signal: SignalModel,
    pub channel: ChannelModel,
    pub n_samples: usize,
    pub presence: Presence,
    pub trials: u64,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        signal: SignalModel,
        channel: ChannelModel,
        n_samples: usize,
        presence: Presence,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Domain("a scenario needs at least one sample per frame".into()));
        }
        if trials == 0 {
            return Err(Error::Domain("a scenario needs at least one trial".into()));
        }
        if let Presence::Signal(snr) = presence {
            snr.linear()?;
        }
        Ok(Self {
            signal,
            channel,
            n_samples,
            presence,
            trials,
            seed,
        })
    }

    /// BPSK over `channel` at `snr_db`.
    pub fn h1(channel: ChannelModel, n_samples: usize, snr_db: f64, trials: u64, seed: u64) -> Result<Self> {
        Self::new(SignalModel::bpsk(), channel, n_samples, Presence::Signal(Snr::Db(snr_db)), trials, seed)
    }

    /// Noise-only counterpart.
    pub fn h0(channel: ChannelModel, n_samples: usize, trials: u64, seed: u64) -> Result<Self> {
        Self::new(SignalModel::bpsk(), channel, n_samples, Presence::NoiseOnly, trials, seed)
    }

    pub fn is_noise_only(&self) -> bool {
        matches!(self.presence, Presence::NoiseOnly)
    }

    /// Same scenario with a different presence.
    pub fn with_presence(mut self, presence: Presence) -> Result<Self> {
        if let Presence::Signal(snr) = presence {
            snr.linear()?;
        }
        self.presence = presence;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("a scenario needs at least one trial".into()));
        }
        self.trials = trials;
        Ok(self)
    }

    /// The received frame of trial `index`.
    pub fn frame(&self, index: u64) -> Result<SampleFrame> {
        let mut rng = trial_rng(self.seed, index);
        match self.presence {
            Presence::NoiseOnly => noise_frame(self.n_samples, &self.channel, &mut rng),
            Presence::Signal(snr) => {
                let x = gen_primary(&self.signal, self.n_samples, &mut rng)?;
                Ok(transmit(&x, &self.channel, snr, &mut rng)?.0)
            }
        }
    }
}

/// Threshold values for a sweep, strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    values: Vec<f64>,
    provenance: GridProvenance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridProvenance {
    Explicit,
    /// Calibrated so that row `i` hits false-alarm rate `targets[i]`.
    PfaTargets(Vec<f64>),
}

impl ThresholdGrid {
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::checked(values, GridProvenance::Explicit)
    }

    fn checked(values: Vec<f64>, provenance: GridProvenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("threshold grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("threshold {v} is not ≥ 0")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] >= w[0]) {
            return Err(Error::Domain(format!(
                "thresholds must strictly decrease, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { values, provenance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &GridProvenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Rows of the replication grid.
pub const REPLICATION_ROWS: usize = 26;

/// False-alarm targets of the replication grid: 26 values log-spaced from
/// 0.001 to 0.9, increasing, so the matching thresholds decrease.
pub fn replication_pfa_targets() -> Vec<f64> {
    let (lo, hi) = (1e-3f64, 0.9f64);
    let steps = (REPLICATION_ROWS - 1) as f64;
    (0..REPLICATION_ROWS)
        .map(|i| lo * (hi / lo).powf(i as f64 / steps))
        .collect()
}

/// Estimated false-alarm rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FalseAlarmEstimate {
    pub false_alarms: u64,
    pub trials: u64,
}

impl FalseAlarmEstimate {
    pub fn pfa(&self) -> f64 {
        self.false_alarms as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        binomial_stderr(self.pfa(), self.trials)
    }
}

/// Estimated detection rate; `pmd` is `1 − pd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionEstimate {
    pub detections: u64,
    pub trials: u64,
}

impl DetectionEstimate {
    pub fn pd(&self) -> f64 {
        self.detections as f64 / self.trials as f64
    }

    pub fn pmd(&self) -> f64 {
        1.0 - self.pd()
    }

    pub fn stderr(&self) -> f64 {
        binomial_stderr(self.pd(), self.trials)
    }
}

/// Missed-detection rates over a threshold grid × SNR list.
#[derive(Debug, Clone, PartialEq)]
pub struct PmdTable {
    pub grid: ThresholdGrid,
    pub snr_list_db: Vec<f64>,
    /// `values[row][col]`: row = threshold index, col = SNR.
    pub values: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub detector: DetectorSpec,
    pub trials: u64,
}

impl PmdTable {
    /// Published reference values for this detector (squaring → conventional
    /// table, anything else → cubing table).
    pub fn reference(&self) -> &'static [[f64; 3]; 26] {
        if self.detector.p() == 2 {
            &reference::CONVENTIONAL_PMD
        } else {
            &reference::CUBING_PMD
        }
    }

    /// Places where the table breaks the expected ordering by more than
    /// three standard errors: P_MD must not rise down a column (falling λ)
    /// nor along a row (rising SNR).
    pub fn monotonicity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let rows = self.values.len();
        let cols = self.snr_list_db.len();
        let tol = |a: (usize, usize), b: (usize, usize)| {
            3.0 * (self.stderr[a.0][a.1].powi(2) + self.stderr[b.0][b.1].powi(2)).sqrt()
        };
        for c in 0..cols {
            for r in 1..rows {
                let rise = self.values[r][c] - self.values[r - 1][c];
                if rise > tol((r, c), (r - 1, c)) {
                    out.push(format!("column {} dB rises from row {} to {}", self.snr_list_db[c], r, r + 1));
                }
            }
        }
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&a, &b| self.snr_list_db[a].partial_cmp(&self.snr_list_db[b]).unwrap());
        for r in 0..rows {
            for w in order.windows(2) {
                let rise = self.values[r][w[1]] - self.values[r][w[0]];
                if rise > tol((r, w[0]), (r, w[1])) {
                    out.push(format!(
                        "row {} rises from {} dB to {} dB",
                        r + 1,
                        self.snr_list_db[w[0]],
                        self.snr_list_db[w[1]]
                    ));
                }
            }
        }
        out
    }
}

/// One row of a detector comparison at a matched false-alarm rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub target_pfa: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub calibration_a: CalibrationKind,
    pub calibration_b: CalibrationKind,
    pub pmd_a: f64,
    pub pmd_b: f64,
    /// `pmd_a − pmd_b`; positive means detector b misses less.
    pub delta: f64,
    pub stderr_delta: f64,
}

/// Published P_MD pair at one threshold index and SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub index: usize,
    pub snr_db: f64,
    pub pmd_conventional: f64,
    pub pmd_cubing: f64,
}

/// Side-by-side evaluation of two detectors on identical frames.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub detector_a: DetectorSpec,
    pub detector_b: DetectorSpec,
    pub rows: Vec<CompareRow>,
    /// Published rows at the H1 scenario's SNR when it is one of −10, 0, 10 dB.
    pub reference: Vec<ReferenceRow>,
    pub h1_trials: u64,
    pub calibration_trials: u64,
}

/// Measured direction of a comparison row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Detector b misses less by more than 3σ.
    BBetter,
    /// Detector a misses less by more than 3σ.
    ABetter,
    Indistinguishable,
}

impl CompareRow {
    pub fn verdict(&self) -> Verdict {
        if self.delta > 3.0 * self.stderr_delta {
            Verdict::BBetter
        } else if -self.delta > 3.0 * self.stderr_delta {
            Verdict::ABetter
        } else {
            Verdict::Indistinguishable
        }
    }
}

impl CompareReport {
    /// One-line summary of the measured sign of `pmd_a − pmd_b`.
    pub fn summary(&self) -> String {
        let count = |v: Verdict| self.rows.iter().filter(|r| r.verdict() == v).count();
        format!(
            "{} vs {}: {} misses less at {} target(s), {} misses less at {}, indistinguishable (3σ) at {}",
            self.detector_a,
            self.detector_b,
            self.detector_b,
            count(Verdict::BBetter),
            self.detector_a,
            count(Verdict::ABetter),
            count(Verdict::Indistinguishable),
        )
    }
}

/// Runs simulations on a fixed number of threads (0 = rayon's global pool).
#[derive(Clone, Default)]
pub struct Engine {
    pool: Option<Arc<ThreadPool>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("workers", &self.workers()).finish()
    }
}

impl Engine {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Ok(Self { pool: None });
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Self {
            pool: Some(Arc::new(pool)),
        })
    }

    pub fn workers(&self) -> usize {
        self.pool
            .as_ref()
            .map_or_else(rayon::current_num_threads, |p| p.current_num_threads())
    }

    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    /// Per-trial statistics for several detectors on the same frames:
    /// `out[d][i]` is detector `d` on trial `i`.
    pub fn statistics(&self, sc: &Scenario, specs: &[DetectorSpec]) -> Result<Vec<Vec<f64>>> {
        if specs.is_empty() {
            return Ok(Vec::new());
        }
        let d = specs.len();
        let sigma = sc.channel.noise_std();
        let mut flat = vec![0.0; sc.trials as usize * d];
        self.install(|| {
            flat.par_chunks_mut(d)
                .enumerate()
                .try_for_each(|(i, slot)| -> Result<()> {
                    let y = sc.frame(i as u64)?;
                    for (s, spec) in slot.iter_mut().zip(specs) {
                        *s = statistic_value(y.samples(), spec, sigma);
                    }
                    Ok(())
                })
        })?;
        Ok((0..d)
            .map(|j| flat.iter().skip(j).step_by(d).copied().collect())
            .collect())
    }

    fn sorted_statistics(&self, sc: &Scenario, spec: &DetectorSpec) -> Result<Vec<f64>> {
        let mut s = self.statistics(sc, std::slice::from_ref(spec))?.remove(0);
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(s)
    }

    /// Empirical P_FA on a noise-only scenario.
    pub fn estimate_pfa(&self, sc: &Scenario, spec: &DetectorSpec, lambda: f64) -> Result<FalseAlarmEstimate> {
        check_lambda(lambda)?;
        if !sc.is_noise_only() {
            return Err(Error::Usage("estimate_pfa needs a noise-only scenario".into()));
        }
        let stats = self.sorted_statistics(sc, spec)?;
        Ok(FalseAlarmEstimate {
            false_alarms: count_at_or_above(&stats, lambda),
            trials: sc.trials,
        })
    }

    /// Empirical P_D / P_MD on a signal-present scenario. Rayleigh channels
    /// draw a fresh gain per trial.
    pub fn estimate_pmd(&self, sc: &Scenario, spec: &DetectorSpec, lambda: f64) -> Result<DetectionEstimate> {
        check_lambda(lambda)?;
        if sc.is_noise_only() {
            return Err(Error::Usage("estimate_pmd needs a signal-present scenario".into()));
        }
        let stats = self.sorted_statistics(sc, spec)?;
        Ok(DetectionEstimate {
            detections: count_at_or_above(&stats, lambda),
            trials: sc.trials,
        })
    }

    /// Empirical ROC over `grid` from one set of H0 and one set of H1 frames.
    pub fn roc_sweep(
        &self,
        sc_h0: &Scenario,
        sc_h1: &Scenario,
        spec: &DetectorSpec,
        grid: &ThresholdGrid,
    ) -> Result<RocCurve> {
        check_pair(sc_h0, sc_h1)?;
        if sc_h0.channel.kind() != sc_h1.channel.kind() {
            return Err(Error::Usage("H0 and H1 scenarios use different channel families".into()));
        }
        let s0 = self.sorted_statistics(sc_h0, spec)?;
        let s1 = self.sorted_statistics(sc_h1, spec)?;
        let points = grid
            .values()
            .iter()
            .map(|&l| {
                let c = ConfusionCounts::new(
                    sc_h0.trials,
                    count_at_or_above(&s0, l),
                    sc_h1.trials,
                    count_at_or_above(&s1, l),
                )?;
                Ok((l, rates_from_counts(&c)?))
            })
            .collect::<Result<Vec<(f64, RatePoint)>>>()?;
        roc_assemble(points, CurveKind::Empirical)
    }

    /// P_MD over `grid` for each SNR column. Columns are given as H1
    /// scenarios; share a seed across them for common random numbers.
    pub fn pmd_table(&self, columns: &[Scenario], spec: &DetectorSpec, grid: &ThresholdGrid) -> Result<PmdTable> {
        let first = columns
            .first()
            .ok_or_else(|| Error::Usage("a P_MD table needs at least one SNR column".into()))?;
        let mut snr_list_db = Vec::with_capacity(columns.len());
        for sc in columns {
            if sc.n_samples != first.n_samples {
                return Err(Error::Usage("all SNR columns must use the same sample count".into()));
            }
            match sc.presence {
                Presence::Signal(Snr::Db(db)) => snr_list_db.push(db),
                Presence::Signal(Snr::Linear(g)) => snr_list_db.push(10.0 * g.log10()),
                Presence::NoiseOnly => {
                    return Err(Error::Usage("P_MD table columns need a signal".into()));
                }
            }
        }
        let rows = grid.len();
        let mut values = vec![vec![0.0; columns.len()]; rows];
        let mut stderr = vec![vec![0.0; columns.len()]; rows];
        for (c, sc) in columns.iter().enumerate() {
            let stats = self.sorted_statistics(sc, spec)?;
            for (r, &l) in grid.values().iter().enumerate() {
                let e = DetectionEstimate {
                    detections: count_at_or_above(&stats, l),
                    trials: sc.trials,
                };
                values[r][c] = e.pmd();
                stderr[r][c] = e.stderr();
            }
        }
        Ok(PmdTable {
            grid: grid.clone(),
            snr_list_db,
            values,
            stderr,
            detector: *spec,
            trials: first.trials,
        })
    }

    /// Thresholds for `targets` on the noise statistics of `sc_h0`.
    ///
    /// The squaring detector is calibrated analytically. Other detectors use
    /// empirical quantiles of `calibration_trials` noise frames drawn from a
    /// seed derived from `sc_h0.seed`, independent of the evaluation frames.
    /// The sorted calibration sample is returned alongside for error
    /// propagation.
    pub fn calibrate(
        &self,
        spec: &DetectorSpec,
        sc_h0: &Scenario,
        targets: &[f64],
        calibration_trials: u64,
    ) -> Result<(Vec<CalibrationResult>, Option<Vec<f64>>)> {
        if !sc_h0.is_noise_only() {
            return Err(Error::Usage("calibration needs a noise-only scenario".into()));
        }
        for &t in targets {
            check_target(t)?;
        }
        if spec.p() == 2 {
            let scale = if spec.normalized() { 1.0 } else { sc_h0.channel.noise_variance() };
            let res = targets
                .iter()
                .map(|&t| {
                    let mut c = calibrate_chi2(sc_h0.n_samples as u32, t)?;
                    c.lambda *= scale;
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((res, None));
        }
        check_quantile_trials(calibration_trials)?;
        let cal = sc_h0
            .with_seed(derive_seed(sc_h0.seed, labels::CALIBRATION))
            .with_trials(calibration_trials)?;
        let stats = self.sorted_statistics(&cal, spec)?;
        let res = targets
            .iter()
            .map(|&t| quantile_threshold(&stats, t))
            .collect::<Result<Vec<_>>>()?;
        Ok((res, Some(stats)))
    }

    /// Threshold grid hitting `targets` (sorted ascending) for `spec`.
    pub fn grid_from_pfa_targets(
        &self,
        spec: &DetectorSpec,
        sc_h0: &Scenario,
        targets: &[f64],
        calibration_trials: u64,
    ) -> Result<ThresholdGrid> {
        let mut t = targets.to_vec();
        t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        t.dedup();
        let (cal, _) = self.calibrate(spec, sc_h0, &t, calibration_trials)?;
        ThresholdGrid::checked(cal.iter().map(|c| c.lambda).collect(), GridProvenance::PfaTargets(t))
    }

    /// Compares two detectors at matched false-alarm rates on identical
    /// H1 frames.
    ///
    /// `stderr_delta` combines the paired binomial error of the two miss
    /// indicators with each empirically calibrated threshold's own
    /// uncertainty, pushed through the H1 statistics by moving the quantile
    /// one standard error either way.
    pub fn compare_detectors(
        &self,
        sc_h0: &Scenario,
        sc_h1: &Scenario,
        specs: (DetectorSpec, DetectorSpec),
        pfa_targets: &[f64],
        calibration_trials: u64,
    ) -> Result<CompareReport> {
        check_pair(sc_h0, sc_h1)?;
        let (a, b) = specs;
        let (cal_a, stats0_a) = self.calibrate(&a, sc_h0, pfa_targets, calibration_trials)?;
        let (cal_b, stats0_b) = self.calibrate(&b, sc_h0, pfa_targets, calibration_trials)?;
        let h1 = self.statistics(sc_h1, &[a, b])?;
        let m = sc_h1.trials as f64;
        let mut sorted_a = h1[0].clone();
        sorted_a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut sorted_b = h1[1].clone();
        sorted_b.sort_by(|x, y| x.partial_cmp(y).unwrap());

        let mut rows = Vec::with_capacity(pfa_targets.len());
        for (i, &t) in pfa_targets.iter().enumerate() {
            let (la, lb) = (cal_a[i].lambda, cal_b[i].lambda);
            let mut det_a = 0u64;
            let mut det_b = 0u64;
            let mut a_only = 0u64;
            let mut b_only = 0u64;
            for (&ta, &tb) in h1[0].iter().zip(&h1[1]) {
                let (da, db) = (exceeds(ta, la), exceeds(tb, lb));
                det_a += da as u64;
                det_b += db as u64;
                a_only += (da && !db) as u64;
                b_only += (db && !da) as u64;
            }
            let pmd_a = 1.0 - det_a as f64 / m;
            let pmd_b = 1.0 - det_b as f64 / m;
            let delta = (b_only as f64 - a_only as f64) / m;
            let paired_var = (((a_only + b_only) as f64 / m) - delta * delta).max(0.0) / m;
            let cal_var_a = calibration_spread(stats0_a.as_deref(), &sorted_a, t, &cal_a[i]);
            let cal_var_b = calibration_spread(stats0_b.as_deref(), &sorted_b, t, &cal_b[i]);
            rows.push(CompareRow {
                target_pfa: t,
                lambda_a: la,
                lambda_b: lb,
                calibration_a: cal_a[i].method,
                calibration_b: cal_b[i].method,
                pmd_a,
                pmd_b,
                delta: pmd_a - pmd_b,
                stderr_delta: (paired_var + cal_var_a + cal_var_b).sqrt(),
            });
        }

        let reference = match sc_h1.presence {
            Presence::Signal(Snr::Db(db)) => reference::column(db)
                .map(|c| {
                    (0..REPLICATION_ROWS)
                        .map(|r| ReferenceRow {
                            index: r + 1,
                            snr_db: db,
                            pmd_conventional: reference::CONVENTIONAL_PMD[r][c],
                            pmd_cubing: reference::CUBING_PMD[r][c],
                        })
                        .collect()
                })
                .unwrap_or_default(),
            _ => Vec::new(),
        };

        Ok(CompareReport {
            detector_a: a,
            detector_b: b,
            rows,
            reference,
            h1_trials: sc_h1.trials,
            calibration_trials: if stats0_a.is_some() || stats0_b.is_some() {
                calibration_trials
            } else {
                0
            },
        })
    }
}

/// Variance that an empirical threshold's sampling error adds to P_MD.
fn calibration_spread(cal_sorted: Option<&[f64]>, h1_sorted: &[f64], target: f64, cal: &CalibrationResult) -> f64 {
    let Some(stats) = cal_sorted else {
        return 0.0;
    };
    let s = cal.stderr;
    let lo = (target - s).max(1.0 / stats.len() as f64);
    let hi = (target + s).min(1.0 - 1.0 / stats.len() as f64);
    let (Ok(l_hi), Ok(l_lo)) = (quantile_threshold(stats, lo), quantile_threshold(stats, hi)) else {
        return 0.0;
    };
    let m = h1_sorted.len() as f64;
    let pd_strict = count_at_or_above(h1_sorted, l_hi.lambda) as f64 / m;
    let pd_loose = count_at_or_above(h1_sorted, l_lo.lambda) as f64 / m;
    let half = (pd_loose - pd_strict) / 2.0;
    half * half
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("threshold must be ≥ 0, got {lambda}")));
    }
    Ok(())
}

fn check_pair(sc_h0: &Scenario, sc_h1: &Scenario) -> Result<()> {
    if !sc_h0.is_noise_only() {
        return Err(Error::Usage("the H0 scenario must be noise-only".into()));
    }
    if sc_h1.is_noise_only() {
        return Err(Error::Usage("the H1 scenario must carry a signal".into()));
    }
    if sc_h0.n_samples != sc_h1.n_samples {
        return Err(Error::Usage(format!(
            "H0 and H1 frame lengths differ ({} vs {})",
            sc_h0.n_samples, sc_h1.n_samples
        )));
    }
    if sc_h0.channel.noise_variance() != sc_h1.channel.noise_variance() {
        return Err(Error::Usage("H0 and H1 noise variances differ".into()));
    }
    Ok(())
}

/// Number of sorted statistics at or above `lambda`.
pub fn count_at_or_above(sorted: &[f64], lambda: f64) -> u64 {
    (sorted.len() - sorted.partition_point(|&t| !exceeds(t, lambda))) as u64
}
