//! The p-th-power energy detector.
//!
//! The statistic is `T = Σ |y[k]|^p`, optionally divided by `σ^p`. `p = 2`
//! is the ordinary energy detector (square, then integrate). `p = 3` is the
//! cubing variant. It uses the absolute cube `|y|³`: the signed cube of
//! zero-mean samples averages out to zero under both hypotheses and would
//! carry no information.
//!
//! The analog front end (pre-filter, ADC) is not modelled. A band of width
//! `W` observed for `T` seconds gives roughly `N ≈ 2TW` real samples, and
//! `N` is what the rest of the crate takes as input.

use crate::error::{domain, Result};
use crate::signal_channel::SampleFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectorSpec {
    p: u32,
    normalized: bool,
}

impl DetectorSpec {
    pub fn new(p: u32, normalized: bool) -> Result<Self> {
        if p == 0 {
            return Err(domain("detector exponent must be at least 1"));
        }
        Ok(Self { p, normalized })
    }

    /// Normalized squaring detector.
    pub fn conventional() -> Self {
        Self {
            p: 2,
            normalized: true,
        }
    }

    /// Normalized cubing detector.
    pub fn cubing() -> Self {
        Self {
            p: 3,
            normalized: true,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }
}

impl std::fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={}", self.p)?;
        if !self.normalized {
            write!(f, " (unnormalized)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Statistic(f64);

impl Statistic {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(domain(format!("statistic must be finite and ≥ 0, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Primary user present.
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub hypothesis: Hypothesis,
    pub threshold: f64,
}

/// Raw `Σ |y|^p / σ^p` over a slice; the hot path of the Monte Carlo engine.
///
/// `sigma` is ignored unless `spec` is normalized.
pub fn statistic_value(samples: &[f64], spec: &DetectorSpec, sigma: f64) -> f64 {
    let p = spec.p as i32;
    let sum: f64 = samples.iter().map(|v| v.abs().powi(p)).sum();
    if spec.normalized {
        sum / sigma.powi(p)
    } else {
        sum
    }
}

/// Detection statistic of a received frame.
pub fn statistic(y: &SampleFrame, spec: &DetectorSpec, sigma: f64) -> Result<Statistic> {
    if spec.normalized && !(sigma > 0.0 && sigma.is_finite()) {
        return Err(domain(format!("noise std must be positive, got {sigma}")));
    }
    Statistic::new(statistic_value(y.samples(), spec, sigma))
}

/// Threshold test. Ties go to H1.
pub fn decide(t: Statistic, threshold: f64) -> Result<Decision> {
    if !(threshold >= 0.0) {
        return Err(domain(format!("threshold must be ≥ 0, got {threshold}")));
    }
    let hypothesis = if exceeds(t.0, threshold) {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    };
    Ok(Decision {
        hypothesis,
        threshold,
    })
}

/// The H1 rule on raw values, shared with the counting code.
#[inline]
pub fn exceeds(t: f64, threshold: f64) -> bool {
    t >= threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(v: &[f64]) -> SampleFrame {
        SampleFrame::new(v.to_vec()).unwrap()
    }

    #[test]
    fn square_and_cube_sums() {
        let y = frame(&[1.0, -2.0, 2.0]);
        let sq = DetectorSpec::new(2, false).unwrap();
        let cu = DetectorSpec::new(3, false).unwrap();
        assert_eq!(statistic(&y, &sq, 1.0).unwrap().value(), 9.0);
        assert_eq!(statistic(&y, &cu, 1.0).unwrap().value(), 17.0);
        let z = frame(&[0.0; 5]);
        for p in 1..6 {
            let s = DetectorSpec::new(p, true).unwrap();
            assert_eq!(statistic(&z, &s, 1.0).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn decisions_and_ties() {
        let t = Statistic::new(9.0).unwrap();
        assert_eq!(decide(t, 8.0).unwrap().hypothesis, Hypothesis::H1);
        assert_eq!(decide(t, 9.0).unwrap().hypothesis, Hypothesis::H1);
        let z = Statistic::new(0.0).unwrap();
        assert_eq!(decide(z, 0.1).unwrap().hypothesis, Hypothesis::H0);
        assert!(decide(t, -1.0).is_err());
        assert!(decide(t, f64::NAN).is_err());
    }

    #[test]
    fn bad_specs_and_sigma() {
        assert!(DetectorSpec::new(0, true).is_err());
        let y = frame(&[1.0]);
        assert!(statistic(&y, &DetectorSpec::conventional(), 0.0).is_err());
        assert!(statistic(&y, &DetectorSpec::new(2, false).unwrap(), 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_p(
            v in prop::collection::vec(-10.0f64..10.0, 1..32),
            c in -5.0f64..5.0,
            p in 1u32..5,
        ) {
            let spec = DetectorSpec::new(p, false).unwrap();
            let base = statistic(&frame(&v), &spec, 1.0).unwrap().value();
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            let got = statistic(&frame(&scaled), &spec, 1.0).unwrap().value();
            let want = c.abs().powi(p as i32) * base;
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }

        #[test]
        fn normalized_is_scale_free(
            v in prop::collection::vec(-10.0f64..10.0, 1..32),
            c in 0.01f64..100.0,
            sigma in 0.1f64..10.0,
            p in 1u32..5,
            lambda in 0.0f64..50.0,
        ) {
            let spec = DetectorSpec::new(p, true).unwrap();
            let a = statistic(&frame(&v), &spec, sigma).unwrap().value();
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            let b = statistic(&frame(&scaled), &spec, c * sigma).unwrap().value();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            // Decisions agree unless T sits on the threshold to rounding.
            if (a - lambda).abs() > 1e-9 * a.max(1.0) {
                let da = decide(Statistic::new(a).unwrap(), lambda).unwrap().hypothesis;
                let db = decide(Statistic::new(b).unwrap(), lambda).unwrap().hypothesis;
                prop_assert_eq!(da, db);
            }
        }

        #[test]
        fn single_switch_in_threshold(t in 0.0f64..100.0, mut lambdas in prop::collection::vec(0.0f64..200.0, 2..40)) {
            lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let st = Statistic::new(t).unwrap();
            let seq: Vec<Hypothesis> = lambdas.iter().map(|&l| decide(st, l).unwrap().hypothesis).collect();
            let switches = seq.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert!(switches <= 1);
            if switches == 1 {
                prop_assert_eq!(seq[0], Hypothesis::H1);
            }
        }
    }
}
