//! Run configuration: built-in defaults, then `SENSESIM_SEED`, then the
//! TOML config file, then command-line flags. Later sources win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::detector::DetectorSpec;
use crate::error::{Error, Result};
use crate::montecarlo::replication_pfa_targets;
use crate::signal_channel::{ChannelKind, ChannelModel, SignalKind, SignalModel};

pub const SEED_ENV: &str = "SENSESIM_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SAMPLES: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "sensesim", version, about = "Energy-detection spectrum sensing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Empirical ROC curves (P_D against P_FA), one CSV per SNR.
    Roc,
    /// P_MD over a threshold grid × SNR list, with the published tables alongside.
    PmdTable,
    /// Squaring vs cubing detector at matched false-alarm rates.
    Compare,
    /// Print thresholds for the requested false-alarm rates.
    Calibrate,
    /// Check the simulator against the closed forms.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Roc => "roc",
            Command::PmdTable => "pmd-table",
            Command::Compare => "compare",
            Command::Calibrate => "calibrate",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelArg {
    Awgn,
    Rayleigh,
}

impl From<ChannelArg> for ChannelKind {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Awgn => ChannelKind::Awgn,
            ChannelArg::Rayleigh => ChannelKind::RayleighFlat,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML experiment file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo trials per hypothesis.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,
    /// Samples per sensing frame.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Comma-separated SNRs in dB.
    #[arg(long = "snr-db", global = true, value_name = "LIST", value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub channel: Option<ChannelArg>,
    #[arg(long = "detector-p", global = true, value_name = "INT")]
    pub detector_p: Option<u32>,
    /// Comma-separated false-alarm targets in (0, 1).
    #[arg(long = "pfa-targets", global = true, value_name = "LIST", value_delimiter = ',')]
    pub pfa_targets: Option<Vec<f64>>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

/// On-disk layout of the config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub samples: Option<usize>,
    pub snr_db: Option<Vec<f64>>,
    pub channel: Option<ChannelArg>,
    pub detector_p: Option<u32>,
    pub pfa_targets: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub svg: Option<bool>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub signal: SignalSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    /// "bpsk", "sinusoid" or "gaussian".
    pub kind: Option<String>,
    pub power: Option<f64>,
    pub cycles_per_frame: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub variance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    /// Noise-only trials behind each empirical threshold.
    pub trials: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Fully resolved parameters of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: u64,
    pub samples: usize,
    pub snr_db: Vec<f64>,
    pub channel: ChannelModel,
    pub signal: SignalModel,
    pub detector: DetectorSpec,
    /// Empty means the command's default targets.
    pub pfa_targets: Vec<f64>,
    pub calibration_trials: u64,
    pub out: PathBuf,
    pub svg: bool,
    pub threads: usize,
}

impl RunConfig {
    /// Merges the sources; `env_seed` is the raw `SENSESIM_SEED` value.
    pub fn resolve(command: Command, flags: &Flags, file: Option<&FileConfig>, env_seed: Option<&str>) -> Result<Self> {
        let empty = FileConfig::default();
        let file = file.unwrap_or(&empty);

        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("{SEED_ENV}={s:?} is not a u64")))?,
            ),
            None => None,
        };
        let seed = flags.seed.or(file.seed).or(env_seed).unwrap_or(DEFAULT_SEED);
        let trials = flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        let default_snr = match command {
            Command::Compare => vec![-10.0],
            Command::Roc => vec![5.0],
            _ => vec![-10.0, 0.0, 10.0],
        };
        let snr_db = flags.snr_db.clone().or_else(|| file.snr_db.clone()).unwrap_or(default_snr);
        if snr_db.is_empty() || snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNR list must be non-empty and finite".into()));
        }
        let channel_kind: ChannelKind = flags.channel.or(file.channel).unwrap_or(ChannelArg::Awgn).into();
        let variance = file.noise.variance.unwrap_or(1.0);
        let channel = ChannelModel::new(channel_kind, variance).map_err(as_config)?;

        let power = file.signal.power.unwrap_or(1.0);
        let kind = match file.signal.kind.as_deref().unwrap_or("bpsk") {
            "bpsk" => SignalKind::Bpsk,
            "gaussian" => SignalKind::GaussianIid,
            "sinusoid" => SignalKind::Sinusoid {
                cycles_per_frame: file.signal.cycles_per_frame.ok_or_else(|| {
                    Error::Config("sinusoid signal needs signal.cycles_per_frame".into())
                })?,
            },
            other => return Err(Error::Config(format!("unknown signal kind {other:?}"))),
        };
        let signal = SignalModel::new(kind, power).map_err(as_config)?;

        let default_p = if command == Command::Compare { 3 } else { 2 };
        let p = flags.detector_p.or(file.detector_p).unwrap_or(default_p);
        let detector = DetectorSpec::new(p, true).map_err(as_config)?;

        let pfa_targets = flags
            .pfa_targets
            .clone()
            .or_else(|| file.pfa_targets.clone())
            .unwrap_or_default();
        if let Some(t) = pfa_targets.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Config(format!("P_FA target {t} is outside (0, 1)")));
        }
        let calibration_trials = file.calibration.trials.unwrap_or(DEFAULT_TRIALS);
        let out = flags.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
        let svg = flags.svg || file.svg.unwrap_or(false);
        let threads = flags.threads.or(file.threads).unwrap_or(0);

        Ok(Self {
            command,
            seed,
            trials,
            samples,
            snr_db,
            channel,
            signal,
            detector,
            pfa_targets,
            calibration_trials,
            out,
            svg,
            threads,
        })
    }

    /// Targets for commands that sweep or compare; falls back to `default`.
    pub fn targets_or(&self, default: &[f64]) -> Vec<f64> {
        if self.pfa_targets.is_empty() {
            default.to_vec()
        } else {
            self.pfa_targets.clone()
        }
    }

    /// Targets used by `roc` and `pmd-table` when none are given.
    pub fn sweep_targets(&self) -> Vec<f64> {
        self.targets_or(&replication_pfa_targets())
    }

    /// Parameters echoed into every output header. Thread count and output
    /// directory are left out because they do not affect results.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        let signal = match self.signal.kind() {
            SignalKind::Bpsk => "bpsk".to_string(),
            SignalKind::GaussianIid => "gaussian".to_string(),
            SignalKind::Sinusoid { cycles_per_frame } => format!("sinusoid(cycles_per_frame={cycles_per_frame})"),
        };
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        vec![
            ("command", self.command.name().to_string()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("samples", self.samples.to_string()),
            ("snr_db", list(&self.snr_db)),
            ("channel", self.channel.kind().name().to_string()),
            ("noise_variance", self.channel.noise_variance().to_string()),
            ("signal", signal),
            ("signal_power", self.signal.power().to_string()),
            ("detector_p", self.detector.p().to_string()),
            ("pfa_targets", list(&self.pfa_targets)),
            ("calibration_trials", self.calibration_trials.to_string()),
        ]
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(Command::Roc, &Flags::default(), None, None).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.trials, DEFAULT_TRIALS);
        assert_eq!(c.samples, 10);
        assert_eq!(c.detector.p(), 2);
        assert_eq!(c.sweep_targets().len(), 26);
        let c = RunConfig::resolve(Command::Compare, &Flags::default(), None, None).unwrap();
        assert_eq!(c.detector.p(), 3);
        assert_eq!(c.snr_db, vec![-10.0]);
    }

    #[test]
    fn precedence_flags_file_env() {
        let file = FileConfig::parse("seed = 5\ntrials = 200\n").unwrap();
        let c = RunConfig::resolve(Command::Roc, &Flags::default(), Some(&file), Some("9")).unwrap();
        assert_eq!((c.seed, c.trials), (5, 200));
        let c = RunConfig::resolve(Command::Roc, &Flags::default(), None, Some("9")).unwrap();
        assert_eq!(c.seed, 9);
        let flags = Flags {
            seed: Some(1),
            ..Default::default()
        };
        let c = RunConfig::resolve(Command::Roc, &flags, Some(&file), Some("9")).unwrap();
        assert_eq!((c.seed, c.trials), (1, 200));
    }

    #[test]
    fn nested_sections() {
        let file = FileConfig::parse(
            "channel = \"rayleigh\"\n[signal]\nkind = \"sinusoid\"\ncycles_per_frame = 2.5\n[noise]\nvariance = 2.0\n[calibration]\ntrials = 150000\n",
        )
        .unwrap();
        let c = RunConfig::resolve(Command::PmdTable, &Flags::default(), Some(&file), None).unwrap();
        assert_eq!(c.channel.kind(), ChannelKind::RayleighFlat);
        assert_eq!(c.channel.noise_variance(), 2.0);
        assert_eq!(c.signal.kind(), SignalKind::Sinusoid { cycles_per_frame: 2.5 });
        assert_eq!(c.calibration_trials, 150_000);
    }

    #[test]
    fn bad_configs() {
        assert!(FileConfig::parse("sed = 1").is_err());
        assert!(FileConfig::parse("seed = \"x\"").is_err());
        let bad = |text: &str| {
            let f = FileConfig::parse(text).unwrap();
            RunConfig::resolve(Command::Roc, &Flags::default(), Some(&f), None)
        };
        assert!(matches!(bad("trials = 0"), Err(Error::Config(_))));
        assert!(matches!(bad("pfa_targets = [0.5, 1.0]"), Err(Error::Config(_))));
        assert!(matches!(bad("detector_p = 0"), Err(Error::Config(_))));
        assert!(matches!(bad("[signal]\nkind = \"sinusoid\""), Err(Error::Config(_))));
        assert!(matches!(bad("[noise]\nvariance = -1.0"), Err(Error::Config(_))));
        assert!(RunConfig::resolve(Command::Roc, &Flags::default(), None, Some("abc")).is_err());
    }
}
