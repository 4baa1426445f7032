//! Bin-scheme vocabulary: scheme descriptions, cycle layouts, bin
//! assignments and proportion vectors.
//!
//! A scheme lays `bins` equal-width bins side by side starting at `start`.
//! That run of bins is one cycle. Each following cycle starts where the
//! previous one ended and multiplies the bin width by an inflation factor,
//! either a constant or the next entry of an explicit factor vector. Bins are
//! half-open `[lo, hi)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of a [`ProportionVector`].
pub const PROPORTION_SUM_TOLERANCE: f64 = 1e-9;

/// How bin widths grow from one cycle to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Expansion {
    /// Every cycle is `factor` times wider than the previous one. Unbounded.
    Constant { factor: f64 },
    /// Cycle `c` (for `c >= 1`) is `factors[c - 1]` times wider than cycle
    /// `c - 1`. Defines exactly `factors.len() + 1` cycles.
    Vector { factors: Vec<f64> },
}

/// Full description of a bin scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSchemeSpec {
    /// Number of bins per cycle.
    pub bins: u32,
    pub expansion: Expansion,
    /// Left edge of the first bin of cycle 0.
    pub start: f64,
    /// Bin width in cycle 0.
    pub width: f64,
}

impl BinSchemeSpec {
    pub fn constant(bins: u32, factor: f64, start: f64, width: f64) -> Self {
        BinSchemeSpec {
            bins,
            expansion: Expansion::Constant { factor },
            start,
            width,
        }
    }

    pub fn vector(bins: u32, factors: Vec<f64>, start: f64, width: f64) -> Self {
        BinSchemeSpec {
            bins,
            expansion: Expansion::Vector { factors },
            start,
            width,
        }
    }

    /// Same scheme with a different start and initial width.
    pub fn with_origin(mut self, start: f64, width: f64) -> Self {
        self.start = start;
        self.width = width;
        self
    }

    /// Index of the final cycle for vector schemes, `None` when unbounded.
    pub fn last_cycle(&self) -> Option<u64> {
        match &self.expansion {
            Expansion::Constant { .. } => None,
            Expansion::Vector { factors } => Some(factors.len() as u64),
        }
    }

    /// The constant inflation factor, if any.
    pub fn constant_factor(&self) -> Option<f64> {
        match self.expansion {
            Expansion::Constant { factor } => Some(factor),
            Expansion::Vector { .. } => None,
        }
    }
}

/// A broken [`BinSchemeSpec`] invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeViolation {
    NoBins,
    NonPositiveWidth(f64),
    NegativeStart(f64),
    NonPositiveFactor { index: usize, value: f64 },
}

impl fmt::Display for SchemeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeViolation::NoBins => write!(f, "bins ≥ 1"),
            SchemeViolation::NonPositiveWidth(w) => write!(f, "width > 0 (got {w})"),
            SchemeViolation::NegativeStart(s) => write!(f, "start ≥ 0 (got {s})"),
            SchemeViolation::NonPositiveFactor { index, value } => {
                write!(f, "factor > 0 (factor #{index} is {value})")
            }
        }
    }
}

/// Checks every scheme invariant and reports all violations at once.
pub fn validate_scheme(spec: &BinSchemeSpec) -> std::result::Result<(), Vec<SchemeViolation>> {
    let mut violations = Vec::new();
    if spec.bins == 0 {
        violations.push(SchemeViolation::NoBins);
    }
    if !(spec.width > 0.0 && spec.width.is_finite()) {
        violations.push(SchemeViolation::NonPositiveWidth(spec.width));
    }
    if !(spec.start >= 0.0 && spec.start.is_finite()) {
        violations.push(SchemeViolation::NegativeStart(spec.start));
    }
    let factors: &[f64] = match &spec.expansion {
        Expansion::Constant { factor } => std::slice::from_ref(factor),
        Expansion::Vector { factors } => factors,
    };
    for (index, &value) in factors.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            violations.push(SchemeViolation::NonPositiveFactor { index, value });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Position and bin width of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleLayout {
    pub cycle_index: u64,
    pub cycle_start: f64,
    pub bin_width: f64,
}

/// The (cycle, rank) pair a value falls into. `rank` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinAssignment {
    pub cycle_index: u64,
    pub rank: u32,
}

/// Nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProportionVector(Vec<f64>);

impl ProportionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidProportions("empty vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidProportions(format!("entry {bad} is not in [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > PROPORTION_SUM_TOLERANCE {
            return Err(Error::InvalidProportions(format!("entries sum to {sum}")));
        }
        Ok(ProportionVector(values))
    }

    /// Normalizes integer counts. Fails with [`Error::EmptyData`] when all
    /// counts are zero.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyData);
        }
        let total = total as f64;
        Ok(ProportionVector(
            counts.iter().map(|&c| c as f64 / total).collect(),
        ))
    }

    /// Uniform vector `1/n` repeated `n` times.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProportions("empty vector".into()));
        }
        Ok(ProportionVector(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry for 1-based `rank`.
    pub fn rank(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ProportionVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ProportionVector::new(values)
    }
}

impl From<ProportionVector> for Vec<f64> {
    fn from(p: ProportionVector) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for ProportionVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone)]
enum Geometry {
    Flat,
    Geometric { factor: f64, ln_factor: f64 },
    Table { starts: Vec<f64>, widths: Vec<f64> },
}

/// A validated scheme with its cycle geometry prepared for fast lookups.
#[derive(Debug, Clone)]
pub struct BinScheme {
    spec: BinSchemeSpec,
    geometry: Geometry,
}

impl BinScheme {
    pub fn new(spec: BinSchemeSpec) -> Result<Self> {
        validate_scheme(&spec).map_err(Error::InvalidScheme)?;
        let geometry = match &spec.expansion {
            Expansion::Constant { factor } if *factor == 1.0 => Geometry::Flat,
            Expansion::Constant { factor } => Geometry::Geometric {
                factor: *factor,
                ln_factor: (factor - 1.0).ln_1p(),
            },
            Expansion::Vector { factors } => {
                let span = spec.bins as f64;
                let mut widths = Vec::with_capacity(factors.len() + 1);
                widths.push(spec.width);
                for f in factors {
                    let prev = *widths.last().unwrap();
                    widths.push(prev * f);
                }
                let mut starts = Vec::with_capacity(widths.len() + 1);
                starts.push(spec.start);
                for w in &widths {
                    let prev = *starts.last().unwrap();
                    starts.push(prev + span * w);
                }
                Geometry::Table { starts, widths }
            }
        };
        Ok(BinScheme { spec, geometry })
    }

    pub fn spec(&self) -> &BinSchemeSpec {
        &self.spec
    }

    pub fn bins(&self) -> u32 {
        self.spec.bins
    }

    pub fn last_cycle(&self) -> Option<u64> {
        self.spec.last_cycle()
    }

    /// Start and bin width of `cycle`.
    pub fn layout(&self, cycle: u64) -> Result<CycleLayout> {
        if let Some(last) = self.last_cycle() {
            if cycle > last {
                return Err(Error::CycleOutOfRange { cycle, last });
            }
        }
        Ok(CycleLayout {
            cycle_index: cycle,
            cycle_start: self.cycle_start(cycle),
            bin_width: self.bin_width(cycle),
        })
    }

    /// Left edge of `cycle`. For vector schemes `cycle` may be one past the
    /// last cycle, giving the right edge of the covered range.
    pub(crate) fn cycle_start(&self, cycle: u64) -> f64 {
        let s = &self.spec;
        let bins = s.bins as f64;
        match &self.geometry {
            Geometry::Flat => s.start + (cycle as f64 * bins) * s.width,
            Geometry::Geometric { factor, ln_factor } => {
                s.start + bins * s.width * geometric_sum(*factor, *ln_factor, cycle)
            }
            Geometry::Table { starts, .. } => starts
                .get(cycle as usize)
                .copied()
                .unwrap_or(f64::INFINITY),
        }
    }

    pub(crate) fn bin_width(&self, cycle: u64) -> f64 {
        let s = &self.spec;
        match &self.geometry {
            Geometry::Flat => s.width,
            Geometry::Geometric { factor, ln_factor } => {
                s.width * power(*factor, *ln_factor, cycle)
            }
            Geometry::Table { widths, .. } => widths
                .get(cycle as usize)
                .copied()
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Right edge of the region covered by the scheme: infinite for constant
    /// factors ≥ 1, finite for vectors and for shrinking constant factors.
    pub fn upper_limit(&self) -> f64 {
        let s = &self.spec;
        match &self.geometry {
            Geometry::Flat => f64::INFINITY,
            Geometry::Geometric { factor, .. } if *factor > 1.0 => f64::INFINITY,
            Geometry::Geometric { factor, .. } => {
                s.start + s.bins as f64 * s.width / (1.0 - factor)
            }
            Geometry::Table { starts, .. } => *starts.last().unwrap(),
        }
    }

    pub(crate) fn geometric(&self) -> Option<(f64, f64)> {
        match self.geometry {
            Geometry::Geometric { factor, ln_factor } => Some((factor, ln_factor)),
            _ => None,
        }
    }

    pub(crate) fn table_starts(&self) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Table { starts, .. } => Some(starts),
            _ => None,
        }
    }
}

/// Layout of `cycle` for an unvalidated spec.
pub fn layout(spec: &BinSchemeSpec, cycle: u64) -> Result<CycleLayout> {
    BinScheme::new(spec.clone())?.layout(cycle)
}

// Factors far from 1 use repeated multiplication so integer factors give
// exact results; factors near 1 go through expm1/exp to avoid cancellation.
fn uses_powi(factor: f64, cycle: u64) -> bool {
    (factor - 1.0).abs() >= 0.5 && cycle <= i32::MAX as u64
}

fn power(factor: f64, ln_factor: f64, cycle: u64) -> f64 {
    if uses_powi(factor, cycle) {
        factor.powi(cycle as i32)
    } else {
        (cycle as f64 * ln_factor).exp()
    }
}

/// `(F^c - 1) / (F - 1)`, i.e. `1 + F + ... + F^(c-1)`.
fn geometric_sum(factor: f64, ln_factor: f64, cycle: u64) -> f64 {
    if uses_powi(factor, cycle) {
        (factor.powi(cycle as i32) - 1.0) / (factor - 1.0)
    } else {
        (cycle as f64 * ln_factor).exp_m1() / (factor - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_scheme_a() {
        let spec = BinSchemeSpec::constant(4, 8.0, 0.0, 0.0008);
        assert_eq!(validate_scheme(&spec), Ok(()));
    }

    #[test]
    fn reports_zero_bins() {
        let spec = BinSchemeSpec::constant(0, 2.0, 0.0, 1.0);
        let v = validate_scheme(&spec).unwrap_err();
        assert_eq!(v, vec![SchemeViolation::NoBins]);
        assert_eq!(v[0].to_string(), "bins ≥ 1");
    }

    #[test]
    fn reports_zero_width() {
        let spec = BinSchemeSpec::constant(3, 2.0, 0.0, 0.0);
        let v = validate_scheme(&spec).unwrap_err();
        assert_eq!(v, vec![SchemeViolation::NonPositiveWidth(0.0)]);
        assert!(v[0].to_string().starts_with("width > 0"));
    }

    #[test]
    fn reports_every_violation() {
        let spec = BinSchemeSpec::vector(0, vec![2.0, -1.0, 0.0], -3.0, f64::NAN);
        let v = validate_scheme(&spec).unwrap_err();
        assert_eq!(v.len(), 5);
        assert!(matches!(
            v[3],
            SchemeViolation::NonPositiveFactor { index: 1, .. }
        ));
    }

    #[test]
    fn layout_examples() {
        let spec = BinSchemeSpec::constant(3, 2.0, 0.0, 1.0);
        assert_eq!(
            layout(&spec, 1).unwrap(),
            CycleLayout { cycle_index: 1, cycle_start: 3.0, bin_width: 2.0 }
        );
        assert_eq!(
            layout(&spec, 0).unwrap(),
            CycleLayout { cycle_index: 0, cycle_start: 0.0, bin_width: 1.0 }
        );
        let flat = BinSchemeSpec::constant(3, 1.0, 0.0, 1.0);
        assert_eq!(
            layout(&flat, 5).unwrap(),
            CycleLayout { cycle_index: 5, cycle_start: 15.0, bin_width: 1.0 }
        );
    }

    #[test]
    fn vector_layout_and_range_error() {
        let spec = BinSchemeSpec::vector(2, vec![3.0, 0.5], 1.0, 1.0);
        let scheme = BinScheme::new(spec).unwrap();
        let starts: Vec<f64> = (0..=2).map(|c| scheme.layout(c).unwrap().cycle_start).collect();
        let widths: Vec<f64> = (0..=2).map(|c| scheme.layout(c).unwrap().bin_width).collect();
        assert_eq!(starts, vec![1.0, 3.0, 9.0]);
        assert_eq!(widths, vec![1.0, 3.0, 1.5]);
        assert_eq!(scheme.upper_limit(), 12.0);
        assert_eq!(
            scheme.layout(3),
            Err(Error::CycleOutOfRange { cycle: 3, last: 2 })
        );
    }

    #[test]
    fn closed_form_matches_accumulation() {
        for &(bins, factor, width) in &[(4u32, 8.0, 0.0008), (7, 3.0, 0.0008), (10, 1.05, 0.3), (9, 1.0000001, 0.01), (5, 0.9, 1.0)] {
            let scheme = BinScheme::new(BinSchemeSpec::constant(bins, factor, 0.25, width)).unwrap();
            let mut start = 0.25;
            let mut w = width;
            for c in 0..300u64 {
                let l = scheme.layout(c).unwrap();
                let rel = (l.cycle_start - start).abs() / start.abs().max(1e-300);
                assert!(rel < 1e-12, "F={factor} c={c}: {} vs {start}", l.cycle_start);
                assert!((l.bin_width - w).abs() <= 1e-12 * w);
                start += bins as f64 * w;
                w *= factor;
            }
        }
    }

    #[test]
    fn shrinking_factor_has_finite_reach() {
        let scheme = BinScheme::new(BinSchemeSpec::constant(2, 0.5, 0.0, 1.0)).unwrap();
        assert_eq!(scheme.upper_limit(), 4.0);
        assert_eq!(scheme.layout(1).unwrap().cycle_start, 2.0);
    }

    #[test]
    fn proportion_vector_rules() {
        assert!(ProportionVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProportionVector::new(vec![0.6, 0.5]).is_err());
        assert!(ProportionVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProportionVector::new(vec![]).is_err());
        assert_eq!(ProportionVector::from_counts(&[0, 0]), Err(Error::EmptyData));
        let p = ProportionVector::from_counts(&[3, 1]).unwrap();
        assert_eq!(p.as_slice(), &[0.75, 0.25]);
        assert_eq!(p.rank(1), Some(0.75));
        assert_eq!(p.rank(0), None);
    }

    #[test]
    fn proportion_vector_serde_validates() {
        let p: ProportionVector = serde_json::from_str("[0.25,0.75]").unwrap();
        assert_eq!(p.len(), 2);
        assert!(serde_json::from_str::<ProportionVector>("[0.25,0.25]").is_err());
    }
}
