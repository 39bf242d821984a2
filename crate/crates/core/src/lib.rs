//! Energy-detection spectrum sensing: a seeded Monte Carlo simulator for the
//! squaring and cubing detectors over AWGN and Rayleigh block fading, with
//! closed-form curves for the squaring detector that check the simulation.
//!
//! Module map:
//!
//! * [`signal_channel`]: primary-user waveforms, fading and noise.
//! * [`detector`]: the `Σ|y|^p` statistic and threshold decision.
//! * [`metrics`]: P_FA / P_D / P_MD and ROC curves.
//! * [`analytic`]: χ² closed forms and threshold calibration.
//! * [`montecarlo`]: the simulation engine, sweeps and detector comparison.
//! * [`cli`]: configuration, CSV/SVG output and the command implementations.

pub mod analytic;
pub mod cli;
pub mod detector;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod reference;
pub mod rng;
pub mod signal_channel;
pub mod special;

pub use error::{Error, Result};
