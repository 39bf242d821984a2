//! Special functions behind the closed-form detector curves.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_TINY: f64 = 1e-300;

fn gamma_iter_cap(a: f64) -> usize {
    // Both expansions need O(√a) terms once a is large.
    1_000 + 20 * a.sqrt() as usize
}

/// `exp(−x + a·ln x − ln Γ(a))`, the common prefactor.
fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x)/Γ(a)`.
///
/// Series for `P` when `x < a + 1`, Lentz continued fraction for `Q`
/// otherwise.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("gamma_q needs a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("gamma_q needs x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let cap = gamma_iter_cap(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..cap {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * GAMMA_EPS {
                let p = sum * gamma_prefactor(a, x);
                return Ok((1.0 - p).clamp(0.0, 1.0));
            }
        }
        Err(Error::Numeric(format!("gamma series did not converge (a={a}, x={x})")))
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / GAMMA_TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=cap {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < GAMMA_TINY {
                d = GAMMA_TINY;
            }
            c = b + an / c;
            if c.abs() < GAMMA_TINY {
                c = GAMMA_TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < GAMMA_EPS {
                return Ok((gamma_prefactor(a, x) * h).clamp(0.0, 1.0));
            }
        }
        Err(Error::Numeric(format!(
            "gamma continued fraction did not converge (a={a}, x={x})"
        )))
    }
}

/// Nodes and weights of an `n`-point Gauss–Laguerre rule for
/// `∫₀^∞ f(t)·e^(−t) dt`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Computes the rule by Newton iteration on `L_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("quadrature needs at least one node".into()));
        }
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n {
            // Initial guesses from the classical asymptotic spacing.
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
                }
            };
            let mut step = f64::INFINITY;
            for _ in 0..100 {
                let (p, p_prev) = laguerre_pair(n, z);
                let dp = nf * (p - p_prev) / z;
                step = p / dp;
                z -= step;
                if step.abs() <= 1e-14 * z.abs() {
                    break;
                }
            }
            // Rounding in L_n can leave Newton jittering just above the stop
            // criterion; that is still far below the accuracy we need.
            if !(step.abs() <= 1e-11 * z.abs()) {
                return Err(Error::Numeric(format!("Laguerre root {i} of {n} did not converge")));
            }
            // w = z / (n·L_{n−1}(z))² at a root of L_n.
            let (_, p_prev) = laguerre_pair(n, z);
            nodes[i] = z;
            weights[i] = z / (nf * p_prev).powi(2);
        }
        Ok(Self { nodes, weights })
    }

    /// Cached 128-point rule.
    pub fn standard() -> &'static GaussLaguerre {
        static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
        RULE.get_or_init(|| GaussLaguerre::new(QUADRATURE_NODES).expect("Gauss–Laguerre rule"))
    }

    pub fn integrate<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            if *w == 0.0 {
                continue;
            }
            acc += w * f(*x)?;
        }
        Ok(acc)
    }
}

/// Node count of [`GaussLaguerre::standard`].
pub const QUADRATURE_NODES: usize = 128;

/// `(L_n(z), L_{n−1}(z))` by the three-term recurrence.
fn laguerre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
    }
    (p1, p2)
}
