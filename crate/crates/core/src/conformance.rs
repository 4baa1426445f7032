//! Comparing measured proportions with theoretical ones, significant digit
//! extraction, and the factor vectors that make a bin scheme mimic second
//! digits.

use serde::{Deserialize, Serialize};

use crate::engine::{proportions, BinTally};
use crate::error::{Error, Result};
use crate::scheme::{BinSchemeSpec, Expansion, ProportionVector};
use crate::theory;

/// Default MAD threshold separating conforming from non-conforming data.
pub const DEFAULT_MAD_THRESHOLD: f64 = 0.010;

/// Attached to every comparison against `general_law(D, F_AVG)`.
pub const F_AVG_CAVEAT: &str = "reference vector uses the arithmetic mean of the varying \
factors in the constant-factor law; this substitution has no mathematical basis and is a \
rough diagnostic only";

/// Distances between an empirical and a theoretical vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Mean absolute deviation.
    pub mad: f64,
    pub max_abs_dev: f64,
    /// Sum of squared deviations.
    pub ssd: f64,
}

pub fn compare(empirical: &ProportionVector, theoretical: &ProportionVector) -> Result<Metrics> {
    compare_slices(empirical.as_slice(), theoretical.as_slice())
}

/// [`compare`] on raw slices.
pub fn compare_slices(empirical: &[f64], theoretical: &[f64]) -> Result<Metrics> {
    if empirical.len() != theoretical.len() {
        return Err(Error::LengthMismatch(empirical.len(), theoretical.len()));
    }
    if empirical.is_empty() {
        return Err(Error::EmptyData);
    }
    let (mut sum, mut max, mut ssd) = (0.0, 0.0f64, 0.0);
    for (e, t) in empirical.iter().zip(theoretical) {
        let d = (e - t).abs();
        sum += d;
        max = max.max(d);
        ssd += d * d;
    }
    Ok(Metrics { mad: sum / empirical.len() as f64, max_abs_dev: max, ssd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Conforming,
    NonConforming,
}

/// Classification together with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub class: Classification,
    /// Always `"mad"`.
    pub metric: String,
    pub threshold: f64,
}

impl Verdict {
    pub fn is_conforming(&self) -> bool {
        self.class == Classification::Conforming
    }
}

/// Conforming iff `mad <= threshold`.
pub fn classify(metrics: &Metrics, threshold: f64) -> Result<Verdict> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::param("threshold", format!("must be positive, got {threshold}")));
    }
    let class = if metrics.mad <= threshold {
        Classification::Conforming
    } else {
        Classification::NonConforming
    };
    Ok(Verdict { class, metric: "mad".to_owned(), threshold })
}

/// Where a theoretical vector came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TheorySource {
    GeneralLaw { bins: u32, factor: f64 },
    BenfordFirst { base: u32 },
    BenfordSecond { base: u32 },
    FlatLimit { bins: u32 },
    /// `general_law(bins, f_avg)` standing in for a varying-factor scheme.
    FactorAverage { bins: u32, f_avg: f64 },
    Custom,
}

impl TheorySource {
    pub fn vector(&self) -> Result<ProportionVector> {
        match *self {
            TheorySource::GeneralLaw { bins, factor } => theory::general_law_vector(bins, factor),
            TheorySource::BenfordFirst { base } => theory::benford_vector(base),
            TheorySource::BenfordSecond { base } => theory::benford_second_order(base),
            TheorySource::FlatLimit { bins } => theory::flat_limit(bins),
            TheorySource::FactorAverage { bins, f_avg } => theory::general_law_vector(bins, f_avg),
            TheorySource::Custom => Err(Error::param("theory", "custom vectors carry no formula")),
        }
    }

    pub fn caveat(&self) -> Option<&'static str> {
        matches!(self, TheorySource::FactorAverage { .. }).then_some(F_AVG_CAVEAT)
    }
}

/// The natural reference law for a scheme.
///
/// Constant factors map to the general law (labelled as Benford or flat
/// where it reduces to those). A vector that is a whole number of
/// second-digit periods maps to the second-digit law; any other vector
/// falls back to the factor-average diagnostic.
pub fn theory_for_scheme(spec: &BinSchemeSpec) -> Result<TheorySource> {
    let bins = spec.bins;
    match &spec.expansion {
        Expansion::Constant { factor } => Ok(if *factor == 1.0 {
            TheorySource::FlatLimit { bins }
        } else if *factor == bins as f64 + 1.0 {
            TheorySource::BenfordFirst { base: bins + 1 }
        } else {
            TheorySource::GeneralLaw { bins, factor: *factor }
        }),
        Expansion::Vector { factors } => {
            if bins >= 3 && is_second_order_vector(bins, factors) {
                Ok(TheorySource::BenfordSecond { base: bins })
            } else if factors.is_empty() {
                Ok(TheorySource::FlatLimit { bins })
            } else {
                Ok(TheorySource::FactorAverage { bins, f_avg: f_avg(factors)? })
            }
        }
    }
}

fn is_second_order_vector(base: u32, factors: &[f64]) -> bool {
    let period = second_order_period(base);
    let p = period.len();
    (factors.len() + 1).is_multiple_of(p)
        && factors.iter().enumerate().all(|(i, f)| *f == period[i % p])
}

/// Empirical proportions of a tally set against a reference law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub scheme: BinSchemeSpec,
    pub empirical: ProportionVector,
    pub theoretical: ProportionVector,
    pub theoretical_source: TheorySource,
    pub metrics: Metrics,
    pub verdict: Verdict,
    /// In-range observations behind `empirical`.
    pub sample_size: u64,
    /// In-range share of all observations seen.
    pub coverage: f64,
    pub caveats: Vec<String>,
}

impl ConformanceReport {
    /// Compare `tally` with `source`, or with the scheme's natural law when
    /// `source` is `None`.
    pub fn from_tally(tally: &BinTally, source: Option<TheorySource>, threshold: f64) -> Result<Self> {
        let source = match source {
            Some(s) => s,
            None => theory_for_scheme(&tally.scheme)?,
        };
        Self::with_theory(tally, source.vector()?, source, threshold)
    }

    /// Compare `tally` with an explicit vector.
    pub fn with_theory(
        tally: &BinTally,
        theoretical: ProportionVector,
        source: TheorySource,
        threshold: f64,
    ) -> Result<Self> {
        let empirical = proportions(tally)?;
        let metrics = compare(&empirical, &theoretical)?;
        let verdict = classify(&metrics, threshold)?;
        let caveats = source.caveat().map(str::to_owned).into_iter().collect();
        Ok(ConformanceReport {
            scheme: tally.scheme.clone(),
            empirical,
            theoretical,
            theoretical_source: source,
            metrics,
            verdict,
            sample_size: tally.in_range(),
            coverage: tally.coverage(),
            caveats,
        })
    }
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::param("base", format!("must be at least 2, got {base}")));
    }
    Ok(())
}

/// Largest integer `n` with `m` no more than two ulps below `n` is treated as
/// `n`, so values such as `2.9999999999999996` read as 3.
fn snap_up(m: f64) -> f64 {
    let r = m.ceil();
    if r - m > 0.0 && r - m <= 2.0 * f64::EPSILON * r {
        r
    } else {
        m
    }
}

/// `x · base^-k`, split in two so extreme exponents do not overflow.
fn scale_by_power(x: f64, base: f64, k: i32) -> f64 {
    let half = k / 2;
    x * base.powi(-half) * base.powi(-(k - half))
}

/// Significand of `x` in `[1, base)`.
fn significand(x: f64, base: u32) -> Result<f64> {
    check_base(base)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::NonPositiveValue(x));
    }
    let b = base as f64;
    let k = (x.ln() / b.ln()).floor() as i32;
    let mut m = scale_by_power(x, b, k);
    // The logarithm may land one exponent off.
    while m >= b {
        m /= b;
    }
    while m < 1.0 {
        m *= b;
    }
    m = snap_up(m);
    if m >= b {
        m /= b;
    }
    Ok(m)
}

/// Leading digit of `x` written in `base`.
pub fn first_significant_digit(x: f64, base: u32) -> Result<u32> {
    Ok(significand(x, base)?.floor() as u32)
}

/// Digit following the leading one.
pub fn second_significant_digit(x: f64, base: u32) -> Result<u32> {
    let m = significand(x, base)?;
    let rest = snap_up((m - m.floor()) * base as f64);
    Ok((rest.floor() as u32).min(base - 1))
}

/// One period of second-digit factors: `base - 2` ones, then `base`.
pub fn second_order_period(base: u32) -> Vec<f64> {
    let mut period = vec![1.0; base.saturating_sub(2) as usize];
    period.push(base as f64);
    period
}

/// A `base`-bin vector scheme whose ranks follow second significant digits,
/// covering `periods` first-digit decades. Starts at 0 with the default width;
/// use [`BinSchemeSpec::with_origin`] to move it.
pub fn second_order_scheme(base: u32, periods: u32) -> Result<BinSchemeSpec> {
    if base < 3 {
        return Err(Error::param("base", format!("must be at least 3, got {base}")));
    }
    if periods == 0 {
        return Err(Error::param("periods", "must be at least 1"));
    }
    let period = second_order_period(base);
    let mut factors: Vec<f64> = period.iter().copied().cycle().take(period.len() * periods as usize).collect();
    // The factor after the final period would only open an unused cycle.
    factors.pop();
    Ok(BinSchemeSpec::vector(base, factors, 0.0, crate::DEFAULT_WIDTH))
}

/// Arithmetic mean of a factor vector.
pub fn f_avg(factors: &[f64]) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::param("factors", "must not be empty"));
    }
    if let Some(f) = factors.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(Error::param("factors", format!("must be positive, got {f}")));
    }
    Ok(factors.iter().sum::<f64>() / factors.len() as f64)
}
