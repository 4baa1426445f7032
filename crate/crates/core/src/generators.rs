//! Seedable synthetic data sources.
//!
//! Every stochastic family draws from a [`ChaCha8Rng`] seeded with
//! `seed_from_u64`, so a given [`GeneratorSpec`] always produces the same
//! sequence on this crate version. The chosen algorithm is exported as
//! [`RNG_ALGORITHM`] for report metadata.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Open01, Triangular};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the pseudo-random generator behind every family.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Lognormal shapes below this are rejected as degenerate.
pub const MIN_LOGNORMAL_SHAPE: f64 = 1e-9;

/// `NormalPositive` requires `mean > -MAX_NORMAL_REJECTION_SIGMAS * sd` so
/// that rejection of nonpositive draws terminates in practice.
pub const MAX_NORMAL_REJECTION_SIGMAS: f64 = 5.0;

/// A distribution family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Density `k/x` on `(10^a, 10^b)`.
    KOverX { a: f64, b: f64 },
    /// `ln x ~ Normal(location, shape)`.
    Lognormal { location: f64, shape: f64 },
    /// `base · rate^i` for `i = 0, 1, ...`; ignores the seed.
    ExpGrowth { base: f64, rate: f64 },
    /// `10^T` with `T` triangular on `(lo, hi)` peaking at `mode`.
    LogTriangular { lo: f64, mode: f64, hi: f64 },
    /// `depth` nested uniforms starting from `Uniform(0, top)`.
    ChainUniform { depth: u32, top: f64 },
    Uniform { a: f64, b: f64 },
    /// Normal draws with nonpositive values rejected and redrawn.
    NormalPositive { mean: f64, sd: f64 },
}

impl Family {
    /// `k/x` on an arbitrary positive interval `(lo, hi)`.
    pub fn kx_range(lo: f64, hi: f64) -> Self {
        Family::KOverX { a: lo.log10(), b: hi.log10() }
    }

    /// Short family name used in tables and metadata.
    pub fn name(&self) -> &'static str {
        match self {
            Family::KOverX { .. } => "kx",
            Family::Lognormal { .. } => "lognormal",
            Family::ExpGrowth { .. } => "exp-growth",
            Family::LogTriangular { .. } => "log-triangular",
            Family::ChainUniform { .. } => "chain-uniform",
            Family::Uniform { .. } => "uniform",
            Family::NormalPositive { .. } => "normal-positive",
        }
    }

    /// Whether the family is one of the logarithmic sources.
    pub fn is_logarithmic(&self) -> bool {
        !matches!(self, Family::Uniform { .. } | Family::NormalPositive { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite, got {v}")))
            }
        };
        match *self {
            Family::KOverX { a, b } => {
                finite("a", a)?;
                finite("b", b)?;
                if a > b {
                    return Err(Error::param("a, b", format!("need a <= b, got ({a}, {b})")));
                }
                if !(10f64.powf(a) > 0.0 && 10f64.powf(b).is_finite()) {
                    return Err(Error::param("a, b", "range exponents overflow a double"));
                }
            }
            Family::Lognormal { location, shape } => {
                finite("location", location)?;
                finite("shape", shape)?;
                if !(shape >= MIN_LOGNORMAL_SHAPE) {
                    return Err(Error::param(
                        "shape",
                        format!("must be at least {MIN_LOGNORMAL_SHAPE}, got {shape}"),
                    ));
                }
            }
            Family::ExpGrowth { base, rate } => {
                finite("base", base)?;
                finite("rate", rate)?;
                if !(base > 0.0) {
                    return Err(Error::param("base", format!("must be positive, got {base}")));
                }
                if !(rate > 1.0) {
                    return Err(Error::param("rate", format!("must exceed 1, got {rate}")));
                }
            }
            Family::LogTriangular { lo, mode, hi } => {
                finite("lo", lo)?;
                finite("mode", mode)?;
                finite("hi", hi)?;
                if !(lo < mode && mode < hi) {
                    return Err(Error::param(
                        "lo, mode, hi",
                        format!("need lo < mode < hi, got ({lo}, {mode}, {hi})"),
                    ));
                }
            }
            Family::ChainUniform { depth, top } => {
                finite("top", top)?;
                if depth == 0 {
                    return Err(Error::param("depth", "must be at least 1"));
                }
                if !(top > 0.0) {
                    return Err(Error::param("top", format!("must be positive, got {top}")));
                }
            }
            Family::Uniform { a, b } => {
                finite("a", a)?;
                finite("b", b)?;
                if !(0.0 <= a && a < b) {
                    return Err(Error::param("a, b", format!("need 0 <= a < b, got ({a}, {b})")));
                }
            }
            Family::NormalPositive { mean, sd } => {
                finite("mean", mean)?;
                finite("sd", sd)?;
                if !(sd > 0.0) {
                    return Err(Error::param("sd", format!("must be positive, got {sd}")));
                }
                if mean <= -MAX_NORMAL_REJECTION_SIGMAS * sd {
                    return Err(Error::param(
                        "mean",
                        "positive draws are too rare for rejection sampling",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A family plus sample size and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub count: u64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, count: u64, seed: u64) -> Self {
        GeneratorSpec { family, count, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::param("n", "sample size must be at least 1"));
        }
        self.family.validate()
    }

    /// A fresh stream over this spec.
    pub fn generator(&self) -> Result<Generator> {
        Generator::new(self)
    }

    /// Draw all `count` values.
    pub fn sample(&self) -> Result<Vec<f64>> {
        Ok(self.generator()?.collect())
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    KOverX { lo: f64, hi: f64, ln_ratio: f64 },
    Lognormal(LogNormal<f64>),
    ExpGrowth { base: f64, rate: f64 },
    LogTriangular { tri: Triangular<f64>, lo: f64, hi: f64 },
    ChainUniform { depth: u32, top: f64 },
    Uniform { a: f64, span: f64 },
    NormalPositive(Normal<f64>),
}

/// Stateful stream of values for one [`GeneratorSpec`].
#[derive(Debug, Clone)]
pub struct Generator {
    sampler: Sampler,
    rng: ChaCha8Rng,
    index: u64,
    count: u64,
}

impl Generator {
    pub fn new(spec: &GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let sampler = match spec.family {
            Family::KOverX { a, b } => {
                let (lo, hi) = (10f64.powf(a), 10f64.powf(b));
                Sampler::KOverX { lo, hi, ln_ratio: (b - a) * std::f64::consts::LN_10 }
            }
            Family::Lognormal { location, shape } => Sampler::Lognormal(
                LogNormal::new(location, shape).map_err(|e| Error::param("shape", e.to_string()))?,
            ),
            Family::ExpGrowth { base, rate } => Sampler::ExpGrowth { base, rate },
            Family::LogTriangular { lo, mode, hi } => Sampler::LogTriangular {
                tri: Triangular::new(lo, hi, mode)
                    .map_err(|e| Error::param("lo, mode, hi", e.to_string()))?,
                lo: 10f64.powf(lo),
                hi: 10f64.powf(hi),
            },
            Family::ChainUniform { depth, top } => Sampler::ChainUniform { depth, top },
            Family::Uniform { a, b } => Sampler::Uniform { a, span: b - a },
            Family::NormalPositive { mean, sd } => Sampler::NormalPositive(
                Normal::new(mean, sd).map_err(|e| Error::param("sd", e.to_string()))?,
            ),
        };
        Ok(Generator {
            sampler,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            index: 0,
            count: spec.count,
        })
    }

    fn draw(&mut self) -> f64 {
        let rng = &mut self.rng;
        match &self.sampler {
            Sampler::KOverX { lo, hi, ln_ratio } => {
                let u: f64 = rng.random();
                (lo * (u * ln_ratio).exp()).clamp(*lo, *hi)
            }
            Sampler::Lognormal(d) => d.sample(rng),
            Sampler::ExpGrowth { base, rate } => base * rate.powf(self.index as f64),
            Sampler::LogTriangular { tri, lo, hi } => 10f64.powf(tri.sample(rng)).clamp(*lo, *hi),
            Sampler::ChainUniform { depth, top } => {
                (0..*depth).fold(*top, |b, _| b * rng.sample::<f64, _>(Open01))
            }
            Sampler::Uniform { a, span } => a + span * rng.sample::<f64, _>(Open01),
            Sampler::NormalPositive(d) => loop {
                let x = d.sample(rng);
                if x > 0.0 {
                    break x;
                }
            },
        }
    }
}

impl Iterator for Generator {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.index >= self.count {
            return None;
        }
        let x = self.draw();
        self.index += 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.index) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Generator {}

fn run(family: Family, n: u64, seed: u64) -> Result<Vec<f64>> {
    GeneratorSpec::new(family, n, seed).sample()
}

/// `k/x` samples on `(10^a, 10^b)`. `a == b` yields the constant `10^a`.
pub fn sample_kx(a: f64, b: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    run(Family::KOverX { a, b }, n, seed)
}

/// `k/x` samples on `(lo, hi)`.
pub fn sample_kx_range(lo: f64, hi: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::param("lo, hi", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    let mut values = run(Family::kx_range(lo, hi), n, seed)?;
    // The decimal exponents may round the endpoints by an ulp.
    values.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    Ok(values)
}

pub fn sample_lognormal(location: f64, shape: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    run(Family::Lognormal { location, shape }, n, seed)
}

/// The deterministic sequence `base · rate^i`, `i = 0..n`.
pub fn exp_growth(base: f64, rate: f64, n: u64) -> Result<Vec<f64>> {
    run(Family::ExpGrowth { base, rate }, n, 0)
}

pub fn sample_log_triangular(lo: f64, mode: f64, hi: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    run(Family::LogTriangular { lo, mode, hi }, n, seed)
}

pub fn sample_chain_uniform(depth: u32, top: f64, n: u64, seed: u64) -> Result<Vec<f64>> {
    run(Family::ChainUniform { depth, top }, n, seed)
}

/// Non-logarithmic comparison families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contrast {
    Uniform { a: f64, b: f64 },
    NormalPositive { mean: f64, sd: f64 },
}

impl From<Contrast> for Family {
    fn from(c: Contrast) -> Self {
        match c {
            Contrast::Uniform { a, b } => Family::Uniform { a, b },
            Contrast::NormalPositive { mean, sd } => Family::NormalPositive { mean, sd },
        }
    }
}

pub fn sample_contrast(family: Contrast, n: u64, seed: u64) -> Result<Vec<f64>> {
    run(family.into(), n, seed)
}

/// Write one value per line in shortest round-trip form.
pub fn write_values<W: Write>(mut out: W, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let families = [
            Family::KOverX { a: 0.0, b: 6.0 },
            Family::Lognormal { location: 5.0, shape: 1.0 },
            Family::LogTriangular { lo: 1.0, mode: 3.0, hi: 5.0 },
            Family::ChainUniform { depth: 5, top: 5666.0 },
            Family::Uniform { a: 5.0, b: 78000.0 },
            Family::NormalPositive { mean: 177.0, sd: 40.0 },
        ];
        for f in families {
            let a = GeneratorSpec::new(f.clone(), 1000, 7).sample().unwrap();
            let b = GeneratorSpec::new(f.clone(), 1000, 7).sample().unwrap();
            let c = GeneratorSpec::new(f.clone(), 1000, 8).sample().unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert!(a.iter().all(|&x| x > 0.0 && x.is_finite()), "{f:?}");
        }
    }

    #[test]
    fn kx_range_and_decades() {
        let v = sample_kx(0.0, 6.0, 1_000_000, 11).unwrap();
        assert!(v.iter().all(|&x| (1.0..=1e6).contains(&x)));
        let mut decades = [0u64; 6];
        for x in &v {
            decades[(x.log10().floor() as usize).min(5)] += 1;
        }
        for c in decades {
            assert!((c as f64 / 1e6 - 1.0 / 6.0).abs() < 0.002, "{decades:?}");
        }
        assert_eq!(sample_kx(0.0, 0.0, 3, 1).unwrap(), vec![1.0, 1.0, 1.0]);
        assert!(sample_kx(1.0, 0.0, 3, 1).is_err());
        assert!(sample_kx(0.0, 6.0, 0, 1).is_err());
        let r = sample_kx_range(20.0, 200.0, 10_000, 3).unwrap();
        assert!(r.iter().all(|&x| (20.0..=200.0).contains(&x)));
    }

    #[test]
    fn kx_passes_kolmogorov_smirnov() {
        let n = 1_000_000;
        let mut logs: Vec<f64> = sample_kx(0.0, 6.0, n, 5).unwrap().iter().map(|x| x.log10() / 6.0).collect();
        logs.sort_by(f64::total_cmp);
        let d = logs
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                (u - lo).abs().max((hi - u).abs())
            })
            .fold(0.0, f64::max);
        // Asymptotic 1% critical value.
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn lognormal_moments() {
        let ln: Vec<f64> = sample_lognormal(5.0, 1.0, 1_000_000, 21).unwrap().iter().map(|x| x.ln()).collect();
        let m = mean(&ln);
        assert!((m - 5.0).abs() < 0.01, "mean {m}");
        let n = ln.len() as f64;
        let m2 = ln.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3 = ln.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        let m4 = ln.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        assert!(skew.abs() < 0.01, "skew {skew}");
        assert!(kurt.abs() < 0.05, "excess kurtosis {kurt}");
        assert!(sample_lognormal(0.0, 1e-12, 3, 1).is_err());
        assert!(sample_lognormal(0.0, 0.0, 3, 1).is_err());
        assert!(sample_lognormal(0.0, -1.0, 3, 1).is_err());
    }

    #[test]
    fn exp_growth_values() {
        let v = exp_growth(1.5, 1.01, 3).unwrap();
        for (x, y) in v.iter().zip([1.5, 1.515, 1.53015]) {
            assert!((x - y).abs() < 1e-12);
        }
        let v = exp_growth(1.5, 1.01, 10_000).unwrap();
        let last = 1.5 * 1.01f64.powi(9999);
        assert!((v[9999] / last - 1.0).abs() < 1e-12);
        assert_eq!(exp_growth(7.0, 2.0, 1).unwrap(), vec![7.0]);
        assert!(exp_growth(1.5, 1.0, 3).is_err());
        assert!(exp_growth(0.0, 2.0, 3).is_err());
    }

    #[test]
    fn log_triangular_shape() {
        let v = sample_log_triangular(1.0, 3.0, 5.0, 1_000_000, 4).unwrap();
        assert!(v.iter().all(|&x| (10.0..=1e5).contains(&x)));
        let mut logs: Vec<f64> = v.iter().map(|x| x.log10()).collect();
        logs.sort_by(f64::total_cmp);
        assert!((logs[logs.len() / 2] - 3.0).abs() < 0.01);
        let w = sample_log_triangular(2.0, 2.5, 3.0, 10_000, 4).unwrap();
        assert!(w.iter().all(|&x| (100.0..=1000.0).contains(&x)));
        assert!(sample_log_triangular(1.0, 1.0, 5.0, 3, 1).is_err());
        assert!(sample_log_triangular(5.0, 3.0, 1.0, 3, 1).is_err());
    }

    #[test]
    fn chain_uniform_mean() {
        let v = sample_chain_uniform(5, 5666.0, 1_000_000, 9).unwrap();
        assert!((mean(&v) - 5666.0 / 32.0).abs() < 2.0);
        let u = sample_chain_uniform(1, 5666.0, 100_000, 9).unwrap();
        assert!(u.iter().all(|&x| x > 0.0 && x < 5666.0));
        assert!((mean(&u) - 2833.0).abs() < 20.0);
        assert!(sample_chain_uniform(0, 5666.0, 3, 1).is_err());
    }

    #[test]
    fn contrast_families() {
        let u = sample_contrast(Contrast::Uniform { a: 5.0, b: 78000.0 }, 100_000, 2).unwrap();
        assert!(u.iter().all(|&x| (5.0..=78000.0).contains(&x)));
        let n = sample_contrast(Contrast::NormalPositive { mean: 177.0, sd: 40.0 }, 100_000, 2).unwrap();
        assert!(n.iter().all(|&x| x > 0.0));
        assert!((mean(&n) - 177.0).abs() < 0.5);
        let n = sample_contrast(Contrast::NormalPositive { mean: 0.0, sd: 1.0 }, 1000, 2).unwrap();
        assert!(n.iter().all(|&x| x > 0.0));
        assert!(sample_contrast(Contrast::Uniform { a: 3.0, b: 3.0 }, 3, 1).is_err());
        assert!(sample_contrast(Contrast::NormalPositive { mean: 1.0, sd: 0.0 }, 3, 1).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = GeneratorSpec::new(Family::ChainUniform { depth: 5, top: 5666.0 }, 10, 42);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"family\":\"chain-uniform\""));
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn written_values_parse_back() {
        let v = sample_lognormal(9.3, 1.7, 100, 1).unwrap();
        let mut buf = Vec::new();
        write_values(&mut buf, v.iter().copied()).unwrap();
        let parsed: Vec<f64> = String::from_utf8(buf).unwrap().lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, v);
    }
}
