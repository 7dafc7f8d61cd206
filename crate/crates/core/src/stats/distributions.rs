//! χ² and normal distribution functions.
//!
//! The regularized incomplete gamma function is evaluated with the power
//! series below `a + 1` and with a modified Lentz continued fraction above
//! it, so each tail is computed directly rather than as `1 - other`.

use crate::error::{MrError, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `exp(a ln x - x - ln Γ(a))`, the common prefactor of both expansions.
fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * gamma_prefactor(a, x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        lower_series(a, x).min(1.0)
    } else {
        (1.0 - upper_continued_fraction(a, x)).max(0.0)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        (1.0 - lower_series(a, x)).max(0.0)
    } else {
        upper_continued_fraction(a, x).min(1.0)
    }
}

/// χ² distribution with real-valued degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    df: f64,
}

impl ChiSquared {
    pub fn new(df: f64) -> Result<Self> {
        if !(df > 0.0) || !df.is_finite() {
            return Err(MrError::InvalidDf(df));
        }
        Ok(Self { df })
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        gamma_p(0.5 * self.df, 0.5 * x)
    }

    /// Upper tail probability `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        gamma_q(0.5 * self.df, 0.5 * x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let k = 0.5 * self.df;
        if x == 0.0 {
            return match k.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 0.5,
                _ => 0.0,
            };
        }
        ((k - 1.0) * x.ln() - 0.5 * x - k * std::f64::consts::LN_2 - ln_gamma(k)).exp()
    }

    /// Inverse of the CDF: the `x` with `cdf(x) = p`.
    ///
    /// Works on whichever tail is smaller so that extreme upper quantiles
    /// (Bonferroni levels) keep full relative precision.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(MrError::InvalidP(p));
        }
        let upper = p > 0.5;
        let target = if upper { 1.0 - p } else { p };
        // g(x) is increasing in x and has its root at the quantile.
        let g = |x: f64| {
            if upper {
                target - self.sf(x)
            } else {
                self.cdf(x) - target
            }
        };

        let mut lo = 0.0_f64;
        let mut hi = self.df.max(1.0);
        while g(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }

        let mut x = wilson_hilferty(self.df, p).clamp(lo, hi);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..500 {
            let gx = g(x);
            if gx == 0.0 {
                return Ok(x);
            }
            if gx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let dens = self.pdf(x);
            let newton = x - gx / dens;
            x = if dens > 0.0 && newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            if (x - lo).min(hi - x) < 1e-15 * x && gx.abs() < 1e-17 {
                break;
            }
        }
        Ok(x)
    }
}

/// Starting point for the quantile search.
fn wilson_hilferty(df: f64, p: f64) -> f64 {
    let z = normal_quantile_approx(p);
    let h = 2.0 / (9.0 * df);
    (df * (1.0 - h + z * h.sqrt()).powi(3)).max(1e-8)
}

/// Rational approximation of the standard normal quantile (abs. error ~4.5e-4).
/// Only used to seed iterations.
fn normal_quantile_approx(p: f64) -> f64 {
    let q = if p < 0.5 { p } else { 1.0 - p };
    let t = (-2.0 * q.ln()).sqrt();
    let z = t - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
        / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    if p < 0.5 {
        -z
    } else {
        z
    }
}

/// `P(X > x)` for `X ~ χ²_df`.
pub fn chi2_sf(x: f64, df: f64) -> Result<f64> {
    Ok(ChiSquared::new(df)?.sf(x))
}

/// `x` such that `P(X ≤ x) = p` for `X ~ χ²_df`.
pub fn chi2_quantile(p: f64, df: f64) -> Result<f64> {
    ChiSquared::new(df)?.quantile(p)
}

/// Two-sided normal p-value for a z statistic, `P(|Z| > |z|)`.
///
/// Uses `Z² ~ χ²_1` so it shares the incomplete gamma code path.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    gamma_q(0.5, 0.5 * z * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sf_at_zero_is_one() {
        assert_eq!(chi2_sf(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(chi2_sf(0.0, 17.5).unwrap(), 1.0);
    }

    #[test]
    fn sf_at_five_percent_critical_value() {
        let p = chi2_sf(3.841459, 1.0).unwrap();
        assert!((p - 0.05).abs() < 1e-6, "{p}");
    }

    #[test]
    fn invalid_df_is_rejected() {
        assert_eq!(chi2_sf(1.0, 0.0), Err(MrError::InvalidDf(0.0)));
        assert_eq!(chi2_sf(1.0, -3.0), Err(MrError::InvalidDf(-3.0)));
        assert!(chi2_quantile(0.5, f64::NAN).is_err());
    }

    #[test]
    fn invalid_p_is_rejected() {
        assert_eq!(chi2_quantile(0.0, 1.0), Err(MrError::InvalidP(0.0)));
        assert_eq!(chi2_quantile(1.0, 1.0), Err(MrError::InvalidP(1.0)));
    }

    #[test]
    fn sf_at_df_approaches_one_half() {
        for df in [100.0, 1_000.0, 10_000.0] {
            let p = chi2_sf(df, df).unwrap();
            // the χ² median sits below its mean by about 2/3
            assert!((p - 0.5).abs() < 1.0 / df.sqrt(), "df={df} p={p}");
        }
    }

    #[test]
    fn ln_gamma_integers() {
        let mut fact = 1.0_f64;
        for n in 1..30 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0));
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn normal_p_values() {
        assert_eq!(normal_two_sided_p(0.0), 1.0);
        assert!((normal_two_sided_p(1.959_963_984_540_054) - 0.05).abs() < 1e-13);
        assert!((normal_two_sided_p(-1.959_963_984_540_054) - 0.05).abs() < 1e-13);
    }

    #[test]
    fn extreme_quantiles_invert() {
        let chi = ChiSquared::new(1.0).unwrap();
        for alpha in [0.05 / 22.0, 0.05 / 100.0, 1e-8, 1e-12] {
            let x = chi.quantile(1.0 - alpha).unwrap();
            let back = chi.sf(x);
            assert!((back - alpha).abs() < 1e-9 * alpha.max(1e-3), "{alpha} {back}");
        }
    }
}
