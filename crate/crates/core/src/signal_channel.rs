//! Primary-user signal generation and the AWGN / Rayleigh channel.
//!
//! Samples are real baseband values. Noise has variance `σ²` (1 by default)
//! and the signal is scaled so that the received SNR, measured with a unit
//! fading gain, is `γ = P_signal / σ²`.
//!
//! Rayleigh fading is flat and block-constant: one envelope gain `h` per
//! frame with density `2h·exp(−h²)`, so `E[h²] = 1` and the mean SNR equals
//! the nominal one.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{domain, Result};

/// A frame of real baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleFrame {
    samples: Vec<f64>,
}

impl SampleFrame {
    /// Wraps `samples`, rejecting empty frames and non-finite entries.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(domain("a frame needs at least one sample"));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("sample {k} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of the squared samples.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Waveform family of the primary user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    /// Random antipodal symbols `±√P`, one per sample.
    Bpsk,
    /// Zero-phase carrier `√(2P)·cos(2π·c·k/n)` with `c` cycles per frame.
    Sinusoid { cycles_per_frame: f64 },
    /// I.i.d. Gaussian samples of variance `P`.
    GaussianIid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalModel {
    kind: SignalKind,
    power: f64,
}

impl SignalModel {
    pub fn new(kind: SignalKind, power: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(domain(format!("signal power must be positive, got {power}")));
        }
        if let SignalKind::Sinusoid { cycles_per_frame } = kind {
            if !(cycles_per_frame > 0.0 && cycles_per_frame.is_finite()) {
                return Err(domain(format!(
                    "cycles per frame must be positive, got {cycles_per_frame}"
                )));
            }
        }
        Ok(Self { kind, power })
    }

    /// Unit-power BPSK, the default primary signal.
    pub fn bpsk() -> Self {
        Self {
            kind: SignalKind::Bpsk,
            power: 1.0,
        }
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn power(&self) -> f64 {
        self.power
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Awgn,
    RayleighFlat,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::RayleighFlat => "rayleigh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    kind: ChannelKind,
    noise_variance: f64,
}

impl ChannelModel {
    pub fn new(kind: ChannelKind, noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(domain(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        Ok(Self {
            kind,
            noise_variance,
        })
    }

    /// Unit noise variance AWGN.
    pub fn awgn() -> Self {
        Self {
            kind: ChannelKind::Awgn,
            noise_variance: 1.0,
        }
    }

    /// Unit noise variance Rayleigh block fading.
    pub fn rayleigh() -> Self {
        Self {
            kind: ChannelKind::RayleighFlat,
            noise_variance: 1.0,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_variance.sqrt()
    }
}

/// Envelope gain applied to a whole frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    pub gain: f64,
}

/// Signal-to-noise ratio, either in dB or as a linear power ratio.
///
/// `Linear(0.0)` is a legal "signal present at zero power" level; the
/// noise-only hypothesis is a separate scenario flag, not an SNR value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Db(f64),
    Linear(f64),
}

impl Snr {
    pub fn linear(self) -> Result<f64> {
        match self {
            Snr::Db(db) => snr_to_linear(db),
            Snr::Linear(g) if g >= 0.0 && g.is_finite() => Ok(g),
            Snr::Linear(g) => Err(domain(format!("linear SNR must be finite and ≥ 0, got {g}"))),
        }
    }
}

impl std::fmt::Display for Snr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Snr::Db(db) => write!(f, "{db} dB"),
            Snr::Linear(g) => write!(f, "{g} (linear)"),
        }
    }
}

/// `10^(dB/10)`.
pub fn snr_to_linear(snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(domain(format!("SNR in dB must be finite, got {snr_db}")));
    }
    Ok(10f64.powf(snr_db / 10.0))
}

/// Draws one frame of `n` primary-user samples.
pub fn gen_primary<R: Rng + ?Sized>(
    model: &SignalModel,
    n: usize,
    rng: &mut R,
) -> Result<SampleFrame> {
    if n == 0 {
        return Err(domain("a frame needs at least one sample"));
    }
    let p = model.power;
    let samples = match model.kind {
        SignalKind::Bpsk => {
            let a = p.sqrt();
            (0..n)
                .map(|_| if rng.random::<bool>() { a } else { -a })
                .collect()
        }
        SignalKind::Sinusoid { cycles_per_frame } => {
            let a = (2.0 * p).sqrt();
            let w = 2.0 * PI * cycles_per_frame / n as f64;
            (0..n).map(|k| a * (w * k as f64).cos()).collect()
        }
        SignalKind::GaussianIid => {
            let s = p.sqrt();
            (0..n)
                .map(|_| s * rng.sample::<f64, _>(StandardNormal))
                .collect()
        }
    };
    SampleFrame::new(samples)
}

/// Draws the frame gain: exactly 1 for AWGN, Rayleigh with `E[h²] = 1` otherwise.
pub fn draw_fading<R: Rng + ?Sized>(channel: &ChannelModel, rng: &mut R) -> FadingDraw {
    match channel.kind {
        ChannelKind::Awgn => FadingDraw { gain: 1.0 },
        ChannelKind::RayleighFlat => {
            // h² ~ Exp(1)
            let e: f64 = rng.sample(Exp1);
            FadingDraw { gain: e.sqrt() }
        }
    }
}

/// A noise-only frame `w[k] ~ N(0, σ²)`.
pub fn noise_frame<R: Rng + ?Sized>(
    n: usize,
    channel: &ChannelModel,
    rng: &mut R,
) -> Result<SampleFrame> {
    if n == 0 {
        return Err(domain("a frame needs at least one sample"));
    }
    let s = channel.noise_std();
    SampleFrame::new(
        (0..n)
            .map(|_| s * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}

/// Sends a unit-power frame through the channel:
/// `y[k] = h·√(γσ²)·x[k] + w[k]`.
///
/// The fading gain is drawn first, then the noise, so two calls that share a
/// stream state and differ only in SNR see the same `h` and `w`.
pub fn transmit<R: Rng + ?Sized>(
    x: &SampleFrame,
    channel: &ChannelModel,
    snr: Snr,
    rng: &mut R,
) -> Result<(SampleFrame, FadingDraw)> {
    let gamma = snr.linear()?;
    let fading = draw_fading(channel, rng);
    let amp = fading.gain * (gamma * channel.noise_variance).sqrt();
    let s = channel.noise_std();
    let y = x
        .samples
        .iter()
        .map(|&xk| amp * xk + s * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((SampleFrame::new(y)?, fading))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn db_conversion() {
        assert_eq!(snr_to_linear(0.0).unwrap(), 1.0);
        assert!((snr_to_linear(-10.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((snr_to_linear(10.0).unwrap() - 10.0).abs() < 1e-12);
        assert!(snr_to_linear(f64::NAN).is_err());
        assert!(snr_to_linear(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn bpsk_is_antipodal() {
        let mut rng = trial_rng(1, 0);
        let x = gen_primary(&SignalModel::bpsk(), 4, &mut rng).unwrap();
        assert!(x.samples().iter().all(|&v| v == 1.0 || v == -1.0));
        let m = SignalModel::new(SignalKind::Bpsk, 4.0).unwrap();
        let x = gen_primary(&m, 64, &mut rng).unwrap();
        assert!(x.samples().iter().all(|&v| v.abs() == 2.0));
    }

    #[test]
    fn sinusoid_matches_unit_cosine() {
        let m = SignalModel::new(SignalKind::Sinusoid { cycles_per_frame: 2.0 }, 0.5).unwrap();
        let x = gen_primary(&m, 8, &mut trial_rng(0, 0)).unwrap();
        for (k, v) in x.samples().iter().enumerate() {
            let want = (2.0 * PI * 2.0 * k as f64 / 8.0).cos();
            assert!((v - want).abs() < 1e-15, "k={k}: {v} vs {want}");
        }
    }

    #[test]
    fn gaussian_power_converges() {
        let m = SignalModel::new(SignalKind::GaussianIid, 1.0).unwrap();
        let x = gen_primary(&m, 1_000_000, &mut trial_rng(11, 0)).unwrap();
        let p = x.mean_power();
        assert!((0.997..=1.003).contains(&p), "power {p}");
    }

    #[test]
    fn rayleigh_second_moment_is_one() {
        let ch = ChannelModel::rayleigh();
        let mut rng = trial_rng(5, 0);
        let n = 1_000_000;
        let mut gains: Vec<f64> = (0..n).map(|_| draw_fading(&ch, &mut rng).gain).collect();
        let m2 = gains.iter().map(|h| h * h).sum::<f64>() / n as f64;
        assert!((0.996..=1.004).contains(&m2), "E[h²] = {m2}");
        assert!(gains.iter().all(|&h| h >= 0.0));
        gains.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = gains[n / 2];
        // CDF 1 − exp(−h²) = 1/2; the sample median has sd ≈ 0.0006 here.
        assert!((median - 2f64.ln().sqrt()).abs() < 0.003, "median {median}");
    }

    #[test]
    fn awgn_gain_is_one() {
        let mut rng = trial_rng(5, 0);
        for _ in 0..100 {
            assert_eq!(draw_fading(&ChannelModel::awgn(), &mut rng).gain, 1.0);
        }
    }

    #[test]
    fn vanishing_noise_leaves_scaled_signal() {
        let ch = ChannelModel::new(ChannelKind::Awgn, 1e-12).unwrap();
        let mut rng = trial_rng(3, 0);
        let x = gen_primary(&SignalModel::bpsk(), 32, &mut rng).unwrap();
        let (y, h) = transmit(&x, &ch, Snr::Db(0.0), &mut rng).unwrap();
        assert_eq!(h.gain, 1.0);
        // At fixed SNR the noise shrinks with the signal, so agreement is
        // absolute: both terms are O(1e-6).
        let amp = (1e-12f64).sqrt();
        for (yk, xk) in y.samples().iter().zip(x.samples()) {
            assert!((yk - amp * xk).abs() < 1e-5);
        }
    }

    #[test]
    fn zero_snr_is_pure_noise() {
        let ch = ChannelModel::awgn();
        let x = gen_primary(&SignalModel::bpsk(), 16, &mut trial_rng(2, 0)).unwrap();
        let (y, _) = transmit(&x, &ch, Snr::Linear(0.0), &mut trial_rng(2, 1)).unwrap();
        let w = noise_frame(16, &ch, &mut trial_rng(2, 1)).unwrap();
        assert_eq!(y, w);
    }

    #[test]
    fn awgn_received_power() {
        let ch = ChannelModel::awgn();
        let mut rng = trial_rng(8, 0);
        let x = gen_primary(&SignalModel::bpsk(), 1_000_000, &mut rng).unwrap();
        let (y, _) = transmit(&x, &ch, Snr::Db(0.0), &mut rng).unwrap();
        let p = y.mean_power();
        assert!((1.994..=2.006).contains(&p), "power {p}");
    }

    #[test]
    fn snr_only_moves_the_signal_term() {
        let ch = ChannelModel::awgn();
        let x = gen_primary(&SignalModel::bpsk(), 64, &mut trial_rng(4, 0)).unwrap();
        let (y0, _) = transmit(&x, &ch, Snr::Db(0.0), &mut trial_rng(4, 1)).unwrap();
        let (y1, _) = transmit(&x, &ch, Snr::Db(6.0), &mut trial_rng(4, 1)).unwrap();
        let a0 = 1.0;
        let a1 = snr_to_linear(6.0).unwrap().sqrt();
        for k in 0..64 {
            let w0 = y0.samples()[k] - a0 * x.samples()[k];
            let w1 = y1.samples()[k] - a1 * x.samples()[k];
            assert!((w0 - w1).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SampleFrame::new(vec![]).is_err());
        assert!(SampleFrame::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(SignalModel::new(SignalKind::Bpsk, 0.0).is_err());
        assert!(SignalModel::new(SignalKind::Sinusoid { cycles_per_frame: 0.0 }, 1.0).is_err());
        assert!(ChannelModel::new(ChannelKind::Awgn, -1.0).is_err());
        let x = SampleFrame::new(vec![1.0]).unwrap();
        assert!(transmit(&x, &ChannelModel::awgn(), Snr::Db(f64::NAN), &mut trial_rng(0, 0)).is_err());
    }
}
