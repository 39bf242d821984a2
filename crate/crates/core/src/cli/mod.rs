//! Command-line front end.
//!
//! Every command is a pure function from a [`RunConfig`] to an [`Outcome`]
//! (file contents plus stdout text); writing to disk happens afterwards.
//! Output files open with a comment header carrying the tool version, the
//! seed and every result-affecting parameter.

pub mod config;
pub mod csv;
pub mod svg;

use std::path::Path;

use clap::Parser;

use crate::analytic::{calibrate_thresholds, chi2_sf, noncentral_chi2_sf, pd_awgn_analytic, pd_rayleigh_analytic, pfa_analytic, CalibrationMethod};
use crate::detector::DetectorSpec;
use crate::error::{Error, Result};
use crate::metrics::binomial_stderr;
use crate::montecarlo::{Engine, Presence, Scenario};
use crate::reference;
use crate::rng::{derive_seed, labels};
use crate::signal_channel::{snr_to_linear, ChannelKind, ChannelModel, SignalKind, SignalModel, Snr};

pub use config::{Cli, Command, FileConfig, Flags, RunConfig};
use csv::CsvDoc;
use svg::{Plot, Series};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for success, failed validation and bad input.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Everything a command produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<OutputFile>,
    pub stdout: String,
    /// Validation checks that failed; non-empty means exit status 1.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        if self.files.is_empty() {
            return Ok(());
        }
        std::fs::create_dir_all(dir)?;
        for f in &self.files {
            std::fs::write(dir.join(&f.name), &f.contents)?;
        }
        Ok(())
    }
}

/// Runs `cfg.command` on `engine`.
pub fn execute(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    match cfg.command {
        Command::Roc => cmd_roc(cfg, engine),
        Command::PmdTable => cmd_pmd_table(cfg, engine),
        Command::Compare => cmd_compare(cfg, engine),
        Command::Calibrate => cmd_calibrate(cfg, engine),
        Command::Validate => cmd_validate(cfg, engine),
    }
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.failures.is_empty() {
                EXIT_OK
            } else {
                eprintln!("{} check(s) failed:", outcome.failures.len());
                for f in &outcome.failures {
                    eprintln!("  {f}");
                }
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => EXIT_VALIDATION,
                _ => EXIT_USAGE,
            }
        }
    }
}

/// Resolves the configuration, runs the command and writes its files.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let file = cli.flags.config.as_deref().map(FileConfig::load).transpose()?;
    let env_seed = std::env::var(config::SEED_ENV).ok();
    let cfg = RunConfig::resolve(cli.command, &cli.flags, file.as_ref(), env_seed.as_deref())?;
    let engine = Engine::new(cfg.threads)?;
    let outcome = execute(&cfg, &engine)?;
    outcome.write_to(&cfg.out).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("cannot write to {}: {io}", cfg.out.display())),
        other => other,
    })?;
    Ok(outcome)
}

fn header(cfg: &RunConfig) -> Vec<String> {
    let mut lines = vec![format!("sensesim {VERSION}"), format!("seed={}", cfg.seed)];
    lines.push(
        cfg.params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    lines
}

fn csv_with_header<S: Into<String>>(cfg: &RunConfig, columns: impl IntoIterator<Item = S>) -> CsvDoc {
    let mut doc = CsvDoc::new(columns);
    for l in header(cfg) {
        doc.comment(l);
    }
    doc
}

fn svg_with_header(cfg: &RunConfig, plot: &Plot) -> String {
    let mut s = String::new();
    for l in header(cfg) {
        s.push_str(&format!("<!-- {} -->\n", l.replace("--", "- -")));
    }
    s.push_str(&plot.render());
    s
}

/// File-name fragment for an SNR: `-10` → `m10db`.
pub fn snr_tag(db: f64) -> String {
    let s = format!("{}", db.abs());
    if db < 0.0 {
        format!("m{s}db")
    } else {
        format!("{s}db")
    }
}

fn h0_scenario(cfg: &RunConfig) -> Result<Scenario> {
    Scenario::new(
        cfg.signal,
        cfg.channel,
        cfg.samples,
        Presence::NoiseOnly,
        cfg.trials,
        derive_seed(cfg.seed, labels::NOISE_ONLY),
    )
}

/// H1 scenarios share the run seed, so SNR columns see the same noise.
fn h1_scenario(cfg: &RunConfig, snr_db: f64) -> Result<Scenario> {
    Scenario::new(
        cfg.signal,
        cfg.channel,
        cfg.samples,
        Presence::Signal(Snr::Db(snr_db)),
        cfg.trials,
        cfg.seed,
    )
}

/// Closed-form `(pfa, pd)` at λ when the configuration has one.
fn analytic_point(cfg: &RunConfig, snr_db: f64, lambda: f64) -> Option<(f64, f64)> {
    if cfg.detector.p() != 2 || cfg.signal.kind() != SignalKind::Bpsk {
        return None;
    }
    let n = cfg.samples as u32;
    let l = lambda / if cfg.detector.normalized() { 1.0 } else { cfg.channel.noise_variance() };
    let gamma = snr_to_linear(snr_db).ok()? * cfg.signal.power();
    let pfa = pfa_analytic(n, l).ok()?;
    let pd = match cfg.channel.kind() {
        ChannelKind::Awgn => pd_awgn_analytic(n, gamma, l).ok()?,
        ChannelKind::RayleighFlat => pd_rayleigh_analytic(n, gamma, l).ok()?,
    };
    Some((pfa, pd))
}

/// `roc`: one CSV (and optional SVG) per SNR.
pub fn cmd_roc(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    let h0 = h0_scenario(cfg)?;
    let grid = engine.grid_from_pfa_targets(&cfg.detector, &h0, &cfg.sweep_targets(), cfg.calibration_trials)?;
    let mut out = Outcome::default();
    for &snr in &cfg.snr_db {
        let h1 = h1_scenario(cfg, snr)?;
        let roc = engine.roc_sweep(&h0, &h1, &cfg.detector, &grid)?;
        let mut doc = csv_with_header(cfg, ["lambda", "pfa", "stderr_pfa", "pd", "stderr_pd"]);
        doc.comment(format!("roc snr_db={snr}"));
        for w in roc.warnings() {
            doc.comment(format!("warning: {w}"));
        }
        for (l, p) in roc.points() {
            doc.row(vec![Some(*l), Some(p.pfa()), Some(p.stderr_pfa()), Some(p.pd()), Some(p.stderr_pd())])?;
        }
        let stem = format!("roc_{}_p{}_{}", cfg.channel.kind().name(), cfg.detector.p(), snr_tag(snr));
        out.files.push(OutputFile {
            name: format!("{stem}.csv"),
            contents: doc.render(),
        });
        if cfg.svg {
            let mut series = vec![Series::new(
                "simulated",
                roc.points().iter().map(|(_, p)| (p.pfa(), p.pd())).collect(),
            )];
            let analytic: Option<Vec<(f64, f64)>> =
                roc.points().iter().map(|(l, _)| analytic_point(cfg, snr, *l)).collect();
            if let Some(a) = analytic {
                series.push(Series::new("closed form", a).dashed());
            }
            let plot = Plot {
                title: format!("ROC, {} channel, N={}, SNR={snr} dB, {}", cfg.channel.kind().name(), cfg.samples, cfg.detector),
                x_label: "P_FA".into(),
                y_label: "P_D".into(),
                log_x: true,
                series,
            };
            out.files.push(OutputFile {
                name: format!("{stem}.svg"),
                contents: svg_with_header(cfg, &plot),
            });
        }
        out.stdout.push_str(&format!("wrote {stem}.csv ({} points)\n", roc.len()));
    }
    Ok(out)
}

/// `pmd-table`: simulated P_MD grid with the published tables alongside.
pub fn cmd_pmd_table(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    let h0 = h0_scenario(cfg)?;
    let grid = engine.grid_from_pfa_targets(&cfg.detector, &h0, &cfg.sweep_targets(), cfg.calibration_trials)?;
    let columns = cfg
        .snr_db
        .iter()
        .map(|&s| h1_scenario(cfg, s))
        .collect::<Result<Vec<_>>>()?;
    let table = engine.pmd_table(&columns, &cfg.detector, &grid)?;

    let mut names = vec!["threshold_index".to_string(), "lambda".to_string()];
    for &s in &table.snr_list_db {
        names.push(format!("pmd_{}", snr_tag(s)));
        names.push(format!("stderr_{}", snr_tag(s)));
    }
    for which in ["conventional", "cubing"] {
        for &s in &reference::SNR_DB {
            names.push(format!("ref_{which}_{}", snr_tag(s)));
        }
    }
    let mut doc = csv_with_header(cfg, names);
    doc.comment(format!("pmd_table detector={}", table.detector));
    if let crate::montecarlo::GridProvenance::PfaTargets(t) = table.grid.provenance() {
        doc.comment(format!(
            "thresholds calibrated to pfa_targets={}",
            t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
        ));
    }
    doc.comment("ref_* columns: published P_MD tables, row = threshold index, verbatim");
    let violations = table.monotonicity_violations();
    if violations.is_empty() {
        doc.comment("trend: P_MD non-increasing down every column and across SNR within 3 stderr");
    }
    for v in &violations {
        doc.comment(format!("trend violation: {v}"));
    }
    for (r, &l) in table.grid.values().iter().enumerate() {
        let mut row = vec![Some((r + 1) as f64), Some(l)];
        for c in 0..table.snr_list_db.len() {
            row.push(Some(table.values[r][c]));
            row.push(Some(table.stderr[r][c]));
        }
        for t in [&reference::CONVENTIONAL_PMD, &reference::CUBING_PMD] {
            for c in 0..3 {
                row.push(t.get(r).map(|v| v[c]));
            }
        }
        doc.row(row)?;
    }
    let stem = format!("pmd_table_{}_p{}", cfg.channel.kind().name(), cfg.detector.p());
    let mut out = Outcome::default();
    out.files.push(OutputFile {
        name: format!("{stem}.csv"),
        contents: doc.render(),
    });
    if cfg.svg {
        let mut series: Vec<Series> = table
            .snr_list_db
            .iter()
            .enumerate()
            .map(|(c, s)| {
                Series::new(
                    format!("simulated {s} dB"),
                    (0..table.values.len()).map(|r| ((r + 1) as f64, table.values[r][c])).collect(),
                )
            })
            .collect();
        for &s in &table.snr_list_db {
            if let Some(c) = reference::column(s) {
                let t = table.reference();
                series.push(
                    Series::new(format!("published {s} dB"), (0..26).map(|r| ((r + 1) as f64, t[r][c])).collect()).dashed(),
                );
            }
        }
        let plot = Plot {
            title: format!("P_MD by threshold index, {} channel, {}", cfg.channel.kind().name(), cfg.detector),
            x_label: "threshold index".into(),
            y_label: "P_MD".into(),
            log_x: false,
            series,
        };
        out.files.push(OutputFile {
            name: format!("{stem}.svg"),
            contents: svg_with_header(cfg, &plot),
        });
    }
    out.stdout.push_str(&format!(
        "wrote {stem}.csv ({} rows × {} SNRs, {} trend violations)\n",
        table.values.len(),
        table.snr_list_db.len(),
        violations.len()
    ));
    Ok(out)
}

/// Default matched false-alarm rates for `compare`.
pub const COMPARE_TARGETS: [f64; 2] = [0.01, 0.1];

/// `compare`: squaring vs `detector_p` at matched P_FA, one CSV per SNR.
pub fn cmd_compare(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    let h0 = h0_scenario(cfg)?;
    let a = DetectorSpec::conventional();
    let b = cfg.detector;
    let targets = cfg.targets_or(&COMPARE_TARGETS);
    let mut out = Outcome::default();
    for &snr in &cfg.snr_db {
        let h1 = h1_scenario(cfg, snr)?;
        let rep = engine.compare_detectors(&h0, &h1, (a, b), &targets, cfg.calibration_trials)?;
        let pa = a.p();
        let pb = b.p();
        let mut doc = csv_with_header(
            cfg,
            [
                "target_pfa".to_string(),
                format!("lambda_p{pa}"),
                format!("lambda_p{pb}"),
                format!("pmd_p{pa}"),
                format!("pmd_p{pb}"),
                "delta".to_string(),
                "stderr_delta".to_string(),
            ],
        );
        doc.comment(format!("compare snr_db={snr} delta=pmd_p{pa}-pmd_p{pb}"));
        doc.comment(format!("measured: {}", rep.summary()));
        for r in &rep.reference {
            doc.comment(format!(
                "published index={} snr_db={} pmd_conventional={} pmd_cubing={}",
                r.index, r.snr_db, r.pmd_conventional, r.pmd_cubing
            ));
        }
        for r in &rep.rows {
            doc.row(vec![
                Some(r.target_pfa),
                Some(r.lambda_a),
                Some(r.lambda_b),
                Some(r.pmd_a),
                Some(r.pmd_b),
                Some(r.delta),
                Some(r.stderr_delta),
            ])?;
        }
        let stem = format!("compare_{}_p{pa}_p{pb}_{}", cfg.channel.kind().name(), snr_tag(snr));
        out.files.push(OutputFile {
            name: format!("{stem}.csv"),
            contents: doc.render(),
        });
        if cfg.svg {
            let plot = Plot {
                title: format!("P_MD at matched P_FA, {} channel, SNR={snr} dB", cfg.channel.kind().name()),
                x_label: "P_FA".into(),
                y_label: "P_MD".into(),
                log_x: true,
                series: vec![
                    Series::new(format!("p={pa}"), rep.rows.iter().map(|r| (r.target_pfa, r.pmd_a)).collect()),
                    Series::new(format!("p={pb}"), rep.rows.iter().map(|r| (r.target_pfa, r.pmd_b)).collect()).dashed(),
                ],
            };
            out.files.push(OutputFile {
                name: format!("{stem}.svg"),
                contents: svg_with_header(cfg, &plot),
            });
        }
        out.stdout.push_str(&format!("SNR {snr} dB: {}\n", rep.summary()));
    }
    Ok(out)
}

/// `calibrate`: prints thresholds; writes no files.
pub fn cmd_calibrate(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    let h0 = h0_scenario(cfg)?.with_trials(cfg.calibration_trials)?;
    let targets = cfg.targets_or(&[0.1]);
    let (cal, _) = engine.calibrate(&cfg.detector, &h0, &targets, cfg.calibration_trials)?;
    let mut out = Outcome::default();
    for (t, c) in targets.iter().zip(cal) {
        let method = match c.method {
            crate::analytic::CalibrationKind::Analytic => "analytic",
            crate::analytic::CalibrationKind::EmpiricalQuantile => "empirical-quantile",
        };
        out.stdout.push_str(&format!(
            "p={} n={} target_pfa={t} lambda={} achieved_pfa={} stderr={} method={method} mc_trials={}\n",
            cfg.detector.p(),
            cfg.samples,
            c.lambda,
            c.achieved_pfa,
            c.stderr,
            c.mc_trials
        ));
    }
    Ok(out)
}

/// A single oracle check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.observed - self.expected).abs() <= self.tolerance
    }
}

/// The Monte Carlo vs closed-form suite behind `validate`.
///
/// Trial counts come from the configuration; every Monte Carlo check uses
/// a 3-sigma binomial band at that count.
pub fn validation_checks(cfg: &RunConfig, engine: &Engine) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let m = cfg.trials;
    let targets = [0.01, 0.1, 0.5];
    let conv = DetectorSpec::conventional();
    let bpsk = SignalModel::bpsk();

    for n in [2u32, 10, 50] {
        let cal = calibrate_thresholds(&conv, n, &targets, CalibrationMethod::Analytic)?;
        let h0 = Scenario::new(bpsk, ChannelModel::awgn(), n as usize, Presence::NoiseOnly, m, derive_seed(cfg.seed, n as u64))?;
        let stats = sorted(engine.statistics(&h0, &[conv])?.remove(0));
        for (t, c) in targets.iter().zip(&cal) {
            let pfa = crate::montecarlo::count_at_or_above(&stats, c.lambda) as f64 / m as f64;
            checks.push(Check {
                name: format!("H0 pfa N={n} target={t}"),
                observed: pfa,
                expected: *t,
                tolerance: 3.0 * binomial_stderr(*t, m),
            });
        }
    }

    let n = 10u32;
    let cal = calibrate_thresholds(&conv, n, &targets, CalibrationMethod::Analytic)?;
    let mut stream = 1000u64;
    for (kind, label) in [(ChannelModel::awgn(), "awgn"), (ChannelModel::rayleigh(), "rayleigh")] {
        for snr in [-10.0, 0.0, 10.0] {
            let g = snr_to_linear(snr)?;
            stream += 1;
            let h1 = Scenario::h1(kind, n as usize, snr, m, derive_seed(cfg.seed, stream))?;
            let stats = sorted(engine.statistics(&h1, &[conv])?.remove(0));
            for (t, c) in targets.iter().zip(&cal) {
                let pd = crate::montecarlo::count_at_or_above(&stats, c.lambda) as f64 / m as f64;
                let want = match kind.kind() {
                    ChannelKind::Awgn => pd_awgn_analytic(n, g, c.lambda)?,
                    ChannelKind::RayleighFlat => pd_rayleigh_analytic(n, g, c.lambda)?,
                };
                checks.push(Check {
                    name: format!("H1 pd {label} N={n} snr={snr}dB target_pfa={t}"),
                    observed: pd,
                    expected: want,
                    tolerance: 3.0 * binomial_stderr(want, m),
                });
            }
        }
    }

    let worst_exp = (0..=1000)
        .map(|i| {
            let l = i as f64 * 0.1;
            chi2_sf(2, l).map(|v| (v - (-l / 2.0).exp()).abs())
        })
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))?;
    checks.push(Check {
        name: "chi2_sf(2, λ) vs exp(−λ/2) on [0, 100]".into(),
        observed: worst_exp,
        expected: 0.0,
        tolerance: 1e-12,
    });
    let mut worst_central = 0.0f64;
    for dof in [1u32, 2, 10, 50] {
        for l in [0.5, 5.0, 20.0, 80.0] {
            worst_central = worst_central.max((noncentral_chi2_sf(dof, 0.0, l)? - chi2_sf(dof, l)?).abs());
        }
    }
    checks.push(Check {
        name: "noncentral with δ=0 vs central".into(),
        observed: worst_central,
        expected: 0.0,
        tolerance: 1e-12,
    });
    let mut worst_round_trip = 0.0f64;
    for n in [2u32, 10, 50] {
        for (t, c) in targets.iter().zip(calibrate_thresholds(&conv, n, &targets, CalibrationMethod::Analytic)?) {
            worst_round_trip = worst_round_trip.max((pfa_analytic(n, c.lambda)? - t).abs());
        }
    }
    checks.push(Check {
        name: "analytic calibration round trip".into(),
        observed: worst_round_trip,
        expected: 0.0,
        tolerance: 1e-9,
    });
    Ok(checks)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// `validate`: runs [`validation_checks`] and reports every result.
pub fn cmd_validate(cfg: &RunConfig, engine: &Engine) -> Result<Outcome> {
    let checks = validation_checks(cfg, engine)?;
    let mut doc = csv_with_header(cfg, ["check", "observed", "expected", "tolerance", "pass"]);
    let mut out = Outcome::default();
    for (i, c) in checks.iter().enumerate() {
        doc.comment(format!("check {}: {}", i + 1, c.name));
        let ok = c.passed();
        out.stdout.push_str(&format!(
            "[{}] {}: observed {} expected {} tol {}\n",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.expected,
            c.tolerance
        ));
        if !ok {
            out.failures.push(c.name.clone());
        }
    }
    for (i, c) in checks.iter().enumerate() {
        doc.row(vec![
            Some((i + 1) as f64),
            Some(c.observed),
            Some(c.expected),
            Some(c.tolerance),
            Some(if c.passed() { 1.0 } else { 0.0 }),
        ])?;
    }
    out.files.push(OutputFile {
        name: "validate.csv".into(),
        contents: doc.render(),
    });
    Ok(out)
}
