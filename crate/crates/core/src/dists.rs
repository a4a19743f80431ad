//! Utility distributions for mempool simulation: three light-tailed
//! (exponential, log-normal, Rayleigh) and two heavy-tailed (Levy,
//! Pareto), plus the uniform gas-size sampler.
//!
//! Sampling is by exact transforms (inverse CDF where closed-form, the
//! exponentiated normal for log-normal, and the reciprocal-squared
//! normal representation for Levy), so a fixed seed always reproduces
//! the same draws with no rejection loops.

use std::fmt;
use std::str::FromStr;

use rand::distr::OpenClosed01;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("{dist}: parameter {name} must be positive, got {value}")]
    NonPositiveParameter {
        dist: &'static str,
        name: &'static str,
        value: f64,
    },
    #[error("{dist}: parameter {name} must be finite, got {value}")]
    NonFiniteParameter {
        dist: &'static str,
        name: &'static str,
        value: f64,
    },
    #[error("unknown distribution {0:?}; expected name(param[,param])")]
    Unparseable(String),
    #[error("{dist}: expected {expected} parameter(s), got {got}")]
    WrongArity {
        dist: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A transaction utility distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityDistribution {
    /// Density `exp(-x/theta)/theta` on `x > 0`.
    Exponential { theta: f64 },
    /// Density of `exp(N(mu, sigma^2))` on `x > 0`.
    LogNormal { mu: f64, sigma: f64 },
    /// Density `x/sigma^2 * exp(-x^2/(2 sigma^2))` on `x > 0`.
    Rayleigh { sigma: f64 },
    /// Density `sqrt(sigma/(2 pi (x-mu)^3)) * exp(-sigma/(2(x-mu)))` on
    /// `x > mu`. Heavy-tailed: infinite mean.
    Levy { mu: f64, sigma: f64 },
    /// Density `alpha / x^(alpha+1)` on `x >= 1`. Heavy-tailed for
    /// `alpha <= 1`.
    Pareto { alpha: f64 },
}

fn require_positive(dist: &'static str, name: &'static str, value: f64) -> Result<(), DistError> {
    if !value.is_finite() {
        return Err(DistError::NonFiniteParameter { dist, name, value });
    }
    if value <= 0.0 {
        return Err(DistError::NonPositiveParameter { dist, name, value });
    }
    Ok(())
}

fn require_finite(dist: &'static str, name: &'static str, value: f64) -> Result<(), DistError> {
    if !value.is_finite() {
        return Err(DistError::NonFiniteParameter { dist, name, value });
    }
    Ok(())
}

impl UtilityDistribution {
    pub fn exponential(theta: f64) -> Result<Self, DistError> {
        require_positive("exponential", "theta", theta)?;
        Ok(Self::Exponential { theta })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self, DistError> {
        require_finite("lognormal", "mu", mu)?;
        require_positive("lognormal", "sigma", sigma)?;
        Ok(Self::LogNormal { mu, sigma })
    }

    pub fn rayleigh(sigma: f64) -> Result<Self, DistError> {
        require_positive("rayleigh", "sigma", sigma)?;
        Ok(Self::Rayleigh { sigma })
    }

    pub fn levy(mu: f64, sigma: f64) -> Result<Self, DistError> {
        require_finite("levy", "mu", mu)?;
        require_positive("levy", "sigma", sigma)?;
        Ok(Self::Levy { mu, sigma })
    }

    pub fn pareto(alpha: f64) -> Result<Self, DistError> {
        require_positive("pareto", "alpha", alpha)?;
        Ok(Self::Pareto { alpha })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::LogNormal { .. } => "lognormal",
            Self::Rayleigh { .. } => "rayleigh",
            Self::Levy { .. } => "levy",
            Self::Pareto { .. } => "pareto",
        }
    }

    /// Stable numeric id of the distribution family, used to separate
    /// experiment seed streams.
    pub fn kind_id(&self) -> u64 {
        match self {
            Self::Exponential { .. } => 0,
            Self::LogNormal { .. } => 1,
            Self::Rayleigh { .. } => 2,
            Self::Levy { .. } => 3,
            Self::Pareto { .. } => 4,
        }
    }

    /// True for distributions with infinite mean and variance.
    pub fn is_heavy_tailed(&self) -> bool {
        matches!(self, Self::Levy { .. } | Self::Pareto { .. })
    }

    /// Probability density at `x`; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x / theta).exp() / theta
                }
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            Self::Rayleigh { sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let s2 = sigma * sigma;
                    x / s2 * (-x * x / (2.0 * s2)).exp()
                }
            }
            Self::Levy { mu, sigma } => {
                if x <= mu {
                    0.0
                } else {
                    let d = x - mu;
                    (sigma / (2.0 * std::f64::consts::PI * d * d * d)).sqrt()
                        * (-sigma / (2.0 * d)).exp()
                }
            }
            Self::Pareto { alpha } => {
                if x < 1.0 {
                    0.0
                } else {
                    alpha / x.powf(alpha + 1.0)
                }
            }
        }
    }

    /// Cumulative distribution function; clamped to [0, 1] outside the
    /// support.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / theta).exp_m1()
                }
            }
            Self::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (x.ln() - mu) / sigma;
                    0.5 * erfc(-z / std::f64::consts::SQRT_2)
                }
            }
            Self::Rayleigh { sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x * x / (2.0 * sigma * sigma)).exp_m1()
                }
            }
            Self::Levy { mu, sigma } => {
                if x <= mu {
                    0.0
                } else {
                    erfc((sigma / (2.0 * (x - mu))).sqrt())
                }
            }
            Self::Pareto { alpha } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-alpha)
                }
            }
        }
    }

    /// Draws one value from the distribution.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { theta } => {
                let u: f64 = rng.sample(OpenClosed01);
                -theta * u.ln()
            }
            Self::LogNormal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z).exp()
            }
            Self::Rayleigh { sigma } => {
                let u: f64 = rng.sample(OpenClosed01);
                sigma * (-2.0 * u.ln()).sqrt()
            }
            Self::Levy { mu, sigma } => loop {
                let z: f64 = rng.sample(StandardNormal);
                if z != 0.0 {
                    break mu + sigma / (z * z);
                }
            },
            Self::Pareto { alpha } => {
                let u: f64 = rng.sample(OpenClosed01);
                u.powf(-1.0 / alpha)
            }
        }
    }

    /// Draws `n` independent values. Deterministic for a fixed stream.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

impl fmt::Display for UtilityDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { theta } => write!(f, "exponential({theta})"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal({mu},{sigma})"),
            Self::Rayleigh { sigma } => write!(f, "rayleigh({sigma})"),
            Self::Levy { mu, sigma } => write!(f, "levy({mu},{sigma})"),
            Self::Pareto { alpha } => write!(f, "pareto({alpha})"),
        }
    }
}

impl FromStr for UtilityDistribution {
    type Err = DistError;

    /// Parses `name(param[,param])`, e.g. `exponential(2.5)` or
    /// `levy(0,1)`. Names are case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| DistError::Unparseable(s.into()))?;
        if !s.ends_with(')') {
            return Err(DistError::Unparseable(s.into()));
        }
        let name = s[..open].trim().to_ascii_lowercase();
        let args: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| DistError::Unparseable(s.into()))?;
        let arity = |expected: usize, dist: &'static str| {
            if args.len() == expected {
                Ok(())
            } else {
                Err(DistError::WrongArity {
                    dist,
                    expected,
                    got: args.len(),
                })
            }
        };
        match name.as_str() {
            "exponential" => {
                arity(1, "exponential")?;
                Self::exponential(args[0])
            }
            "lognormal" => {
                arity(2, "lognormal")?;
                Self::log_normal(args[0], args[1])
            }
            "rayleigh" => {
                arity(1, "rayleigh")?;
                Self::rayleigh(args[0])
            }
            "levy" => {
                arity(2, "levy")?;
                Self::levy(args[0], args[1])
            }
            "pareto" => {
                arity(1, "pareto")?;
                Self::pareto(args[0])
            }
            _ => Err(DistError::Unparseable(s.into())),
        }
    }
}

/// Draws `n` transaction gas values uniformly from `[lo, hi]`.
pub fn sample_gas<R: Rng + ?Sized>(
    lo: f64,
    hi: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>, DistError> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(DistError::NonFiniteParameter {
            dist: "uniform gas",
            name: "bounds",
            value: if lo.is_finite() { hi } else { lo },
        });
    }
    if lo <= 0.0 || hi < lo {
        return Err(ModelError::InvalidGasBounds { lo, hi }.into());
    }
    Ok((0..n).map(|_| rng.random_range(lo..=hi)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_density_near_origin_is_rate() {
        let d = UtilityDistribution::exponential(2.5).unwrap();
        assert_relative_eq!(d.pdf(1e-12), 0.4, max_relative = 1e-9);
        assert_eq!(d.pdf(0.0), 0.0);
        assert_eq!(d.pdf(-1.0), 0.0);
    }

    #[test]
    fn pareto_density_and_cdf_closed_forms() {
        let d = UtilityDistribution::pareto(0.5).unwrap();
        assert_relative_eq!(d.pdf(1.0), 0.5);
        assert_relative_eq!(d.cdf(4.0), 0.5, max_relative = 1e-15);
        assert_eq!(d.pdf(0.999), 0.0);
    }

    #[test]
    fn levy_density_is_zero_at_location() {
        let d = UtilityDistribution::levy(0.0, 1.0).unwrap();
        assert_eq!(d.pdf(0.0), 0.0);
        assert_eq!(d.pdf(-1.0), 0.0);
        assert!(d.pdf(0.5) > 0.0);
    }

    #[test]
    fn cdf_limits() {
        for d in [
            UtilityDistribution::exponential(2.5).unwrap(),
            UtilityDistribution::log_normal(1.0, 1.0).unwrap(),
            UtilityDistribution::rayleigh(1.0).unwrap(),
            UtilityDistribution::levy(0.0, 1.0).unwrap(),
            UtilityDistribution::pareto(0.5).unwrap(),
        ] {
            assert_eq!(d.cdf(f64::NEG_INFINITY), 0.0);
            assert_relative_eq!(d.cdf(f64::INFINITY), 1.0);
        }
    }

    #[test]
    fn exponential_median() {
        let d = UtilityDistribution::exponential(2.5).unwrap();
        assert_relative_eq!(d.cdf(2.5 * std::f64::consts::LN_2), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let d = UtilityDistribution::log_normal(1.0, 1.0).unwrap();
        let a = d.sample(100, &mut ChaCha8Rng::seed_from_u64(7));
        let b = d.sample(100, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(d.sample(0, &mut ChaCha8Rng::seed_from_u64(7)).is_empty());
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pareto = UtilityDistribution::pareto(0.5).unwrap();
        assert!(pareto.sample(1000, &mut rng).iter().all(|&x| x >= 1.0));
        let levy = UtilityDistribution::levy(0.0, 1.0).unwrap();
        assert!(levy.sample(1000, &mut rng).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gas_sampler_degenerate_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = sample_gas(2.0, 2.0, 10, &mut rng).unwrap();
        assert!(v.iter().all(|&x| x == 2.0));
        assert!(sample_gas(0.0, 1.0, 1, &mut rng).is_err());
        assert!(sample_gas(3.0, 1.0, 1, &mut rng).is_err());
        assert!(sample_gas(1.0, 3.0, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn display_round_trips_through_parse() {
        for d in [
            UtilityDistribution::exponential(2.5).unwrap(),
            UtilityDistribution::log_normal(1.0, 1.0).unwrap(),
            UtilityDistribution::rayleigh(1.0).unwrap(),
            UtilityDistribution::levy(0.0, 1.0).unwrap(),
            UtilityDistribution::pareto(0.5).unwrap(),
        ] {
            let parsed: UtilityDistribution = d.to_string().parse().unwrap();
            assert_eq!(parsed, d);
        }
        assert!("cauchy(1)".parse::<UtilityDistribution>().is_err());
        assert!("exponential(0)".parse::<UtilityDistribution>().is_err());
        assert!("exponential(1,2)".parse::<UtilityDistribution>().is_err());
    }
}
