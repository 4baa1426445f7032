//! Assigning values to bins and tallying data sets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{BinAssignment, BinScheme, BinSchemeSpec, ProportionVector};

/// Default minimum cycle population for [`per_cycle_proportions`].
pub const DEFAULT_MIN_CYCLE_COUNT: u64 = 100;

// Beyond 2^53 cycle indices (and bin offsets) stop being exact in f64.
const MAX_RESOLVABLE_CYCLE: f64 = 9_007_199_254_740_992.0;

const PARALLEL_CHUNK: usize = 1 << 16;

/// Where a positive value lands under a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Bin(BinAssignment),
    /// Below the scheme start.
    BelowRange,
    /// Past the right edge of a bounded scheme.
    AboveRange,
}

/// Finds the unique half-open bin containing `x`.
pub fn assign(scheme: &BinScheme, x: f64) -> Result<Placement> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::NonPositiveValue(x));
    }
    let spec = scheme.spec();
    if x < spec.start {
        return Ok(Placement::BelowRange);
    }
    if x >= scheme.upper_limit() {
        return Ok(Placement::AboveRange);
    }
    let cycle = match locate_cycle(scheme, x)? {
        Some(c) => c,
        None => return Ok(Placement::AboveRange),
    };
    let rank = locate_rank(scheme, cycle, x);
    Ok(Placement::Bin(BinAssignment { cycle_index: cycle, rank }))
}

fn locate_cycle(scheme: &BinScheme, x: f64) -> Result<Option<u64>> {
    if let Some(starts) = scheme.table_starts() {
        // starts[0] <= x < starts[last] is already established.
        let idx = starts.partition_point(|&s| s <= x) - 1;
        return Ok(Some(idx as u64));
    }
    let spec = scheme.spec();
    let span = spec.bins as f64 * spec.width;
    let t = (x - spec.start) / span;
    let estimate = match scheme.geometric() {
        None => t.floor(),
        Some((factor, ln_factor)) => ((t * (factor - 1.0)).ln_1p() / ln_factor).floor(),
    };
    if !estimate.is_finite() || estimate >= MAX_RESOLVABLE_CYCLE {
        return Err(Error::Unresolvable(x));
    }
    let mut c = estimate.max(0.0) as u64;
    while c > 0 && x < scheme.cycle_start(c) {
        c -= 1;
    }
    loop {
        let next = scheme.cycle_start(c + 1);
        if x < next {
            return Ok(Some(c));
        }
        if next <= scheme.cycle_start(c) {
            // Shrinking factor: cycles no longer advance in f64.
            return Ok(None);
        }
        c += 1;
    }
}

fn locate_rank(scheme: &BinScheme, cycle: u64, x: f64) -> u32 {
    let bins = scheme.bins();
    let start = scheme.cycle_start(cycle);
    let width = scheme.bin_width(cycle);
    let guess = ((x - start) / width).floor();
    let mut r = if guess.is_finite() {
        guess.clamp(0.0, (bins - 1) as f64) as u32
    } else {
        0
    };
    while r > 0 && x < start + r as f64 * width {
        r -= 1;
    }
    while r + 1 < bins && x >= start + (r + 1) as f64 * width {
        r += 1;
    }
    r + 1
}

/// Counts for one data set under one scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinTally {
    pub scheme: BinSchemeSpec,
    /// Cycle index to per-rank counts (length `bins`).
    pub per_cycle_counts: BTreeMap<u64, Vec<u64>>,
    pub below_range: u64,
    pub above_range: u64,
    pub excluded_nonpositive: u64,
    /// NaN and infinite inputs.
    pub excluded_nonfinite: u64,
}

impl BinTally {
    pub fn empty(scheme: BinSchemeSpec) -> Self {
        BinTally {
            scheme,
            per_cycle_counts: BTreeMap::new(),
            below_range: 0,
            above_range: 0,
            excluded_nonpositive: 0,
            excluded_nonfinite: 0,
        }
    }

    /// Counts by rank summed over all cycles.
    pub fn aggregate_counts(&self) -> Vec<u64> {
        let mut total = vec![0u64; self.scheme.bins as usize];
        for counts in self.per_cycle_counts.values() {
            for (t, c) in total.iter_mut().zip(counts) {
                *t += c;
            }
        }
        total
    }

    pub fn in_range(&self) -> u64 {
        self.per_cycle_counts.values().flatten().sum()
    }

    /// Every input value is accounted for in exactly one of these buckets.
    pub fn total(&self) -> u64 {
        self.in_range()
            + self.below_range
            + self.above_range
            + self.excluded_nonpositive
            + self.excluded_nonfinite
    }

    /// Fraction of all input values that landed in a bin.
    pub fn coverage(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.in_range() as f64 / n as f64,
        }
    }

    /// Adds another tally of the same scheme into this one.
    pub fn merge(&mut self, other: &BinTally) -> Result<()> {
        if self.scheme != other.scheme {
            return Err(Error::SchemeMismatch);
        }
        let bins = self.scheme.bins as usize;
        for (cycle, counts) in &other.per_cycle_counts {
            let mine = self
                .per_cycle_counts
                .entry(*cycle)
                .or_insert_with(|| vec![0; bins]);
            for (m, c) in mine.iter_mut().zip(counts) {
                *m += c;
            }
        }
        self.below_range += other.below_range;
        self.above_range += other.above_range;
        self.excluded_nonpositive += other.excluded_nonpositive;
        self.excluded_nonfinite += other.excluded_nonfinite;
        Ok(())
    }

    fn record(&mut self, scheme: &BinScheme, x: f64) -> Result<()> {
        if x.is_nan() || x.is_infinite() {
            self.excluded_nonfinite += 1;
            return Ok(());
        }
        if x <= 0.0 {
            self.excluded_nonpositive += 1;
            return Ok(());
        }
        match assign(scheme, x)? {
            Placement::Bin(a) => {
                let bins = scheme.bins() as usize;
                self.per_cycle_counts
                    .entry(a.cycle_index)
                    .or_insert_with(|| vec![0; bins])[a.rank as usize - 1] += 1;
            }
            Placement::BelowRange => self.below_range += 1,
            Placement::AboveRange => self.above_range += 1,
        }
        Ok(())
    }
}

/// Tallies `data` sequentially.
pub fn tally(scheme: &BinScheme, data: &[f64]) -> Result<BinTally> {
    let mut t = BinTally::empty(scheme.spec().clone());
    for &x in data {
        t.record(scheme, x)?;
    }
    Ok(t)
}

/// Tallies `data` in parallel chunks and merges the partial tallies.
/// The result is identical to [`tally`].
pub fn tally_parallel(scheme: &BinScheme, data: &[f64]) -> Result<BinTally> {
    data.par_chunks(PARALLEL_CHUNK)
        .map(|chunk| tally(scheme, chunk))
        .try_reduce(
            || BinTally::empty(scheme.spec().clone()),
            |mut a, b| {
                a.merge(&b)?;
                Ok(a)
            },
        )
}

/// Aggregate rank proportions over all cycles.
pub fn proportions(tally: &BinTally) -> Result<ProportionVector> {
    ProportionVector::from_counts(&tally.aggregate_counts())
}

/// Rank proportions of a single cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleProportions {
    pub cycle_index: u64,
    pub proportions: ProportionVector,
    pub count: u64,
}

/// Proportions of each cycle holding at least `min_count` values, in cycle
/// order.
pub fn per_cycle_proportions(tally: &BinTally, min_count: u64) -> Result<Vec<CycleProportions>> {
    if min_count == 0 {
        return Err(Error::param("min_count", "must be at least 1"));
    }
    let mut out = Vec::new();
    for (&cycle, counts) in &tally.per_cycle_counts {
        let count: u64 = counts.iter().sum();
        if count >= min_count {
            out.push(CycleProportions {
                cycle_index: cycle,
                proportions: ProportionVector::from_counts(counts)?,
                count,
            });
        }
    }
    Ok(out)
}

/// Multiplies every value by `factor`.
pub fn scale_data(data: &[f64], factor: f64) -> Result<Vec<f64>> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::param("K", format!("scale factor must be positive, got {factor}")));
    }
    Ok(data.iter().map(|x| x * factor).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(bins: u32, factor: f64, start: f64, width: f64) -> BinScheme {
        BinScheme::new(BinSchemeSpec::constant(bins, factor, start, width)).unwrap()
    }

    fn bin(cycle_index: u64, rank: u32) -> Placement {
        Placement::Bin(BinAssignment { cycle_index, rank })
    }

    #[test]
    fn assign_examples() {
        let s = scheme(3, 2.0, 0.0, 1.0);
        assert_eq!(assign(&s, 2.5).unwrap(), bin(0, 3));
        assert_eq!(assign(&s, 3.0).unwrap(), bin(1, 1));
        assert_eq!(assign(&s, 20.999).unwrap(), bin(2, 3));
        assert_eq!(assign(&s, 21.0).unwrap(), bin(3, 1));
        let shifted = scheme(3, 2.0, 1.0, 1.0);
        assert_eq!(assign(&shifted, 0.5).unwrap(), Placement::BelowRange);
    }

    #[test]
    fn assign_rejects_nonpositive() {
        let s = scheme(3, 2.0, 0.0, 1.0);
        assert_eq!(assign(&s, 0.0), Err(Error::NonPositiveValue(0.0)));
        assert!(assign(&s, -2.0).is_err());
        assert!(assign(&s, f64::NAN).is_err());
    }

    #[test]
    fn vector_scheme_above_range() {
        let s = BinScheme::new(BinSchemeSpec::vector(2, vec![3.0], 0.0, 1.0)).unwrap();
        assert_eq!(assign(&s, 7.9).unwrap(), bin(1, 2));
        assert_eq!(assign(&s, 8.0).unwrap(), Placement::AboveRange);
    }

    #[test]
    fn shrinking_constant_factor_reports_above_range() {
        let s = scheme(2, 0.5, 0.0, 1.0);
        // cycles: [0,2) [2,3) [3,3.5) [3.5,3.75) ...
        assert_eq!(assign(&s, 2.75).unwrap(), bin(1, 2));
        assert_eq!(assign(&s, 3.0).unwrap(), bin(2, 1));
        assert!(matches!(assign(&s, 3.999).unwrap(), Placement::Bin(b) if b.cycle_index > 8));
        assert_eq!(assign(&s, 4.0).unwrap(), Placement::AboveRange);
    }

    #[test]
    fn flat_scheme_far_out() {
        let s = scheme(4, 1.0, 0.0, 0.25);
        assert_eq!(assign(&s, 1_000_000.6).unwrap(), bin(1_000_000, 3));
        let tiny = scheme(1, 1.0, 0.0, 1e-300);
        assert_eq!(assign(&tiny, 1e10), Err(Error::Unresolvable(1e10)));
    }

    #[test]
    fn tally_examples() {
        let s = scheme(3, 2.0, 0.0, 1.0);
        let t = tally(&s, &[0.5]).unwrap();
        assert_eq!(t.per_cycle_counts[&0], vec![1, 0, 0]);
        let t = tally(&s, &[-1.0, 0.5]).unwrap();
        assert_eq!(t.excluded_nonpositive, 1);
        assert_eq!(t.per_cycle_counts[&0], vec![1, 0, 0]);
        assert_eq!(t.total(), 2);
        let t = tally(&s, &[f64::NAN, f64::INFINITY, 0.0]).unwrap();
        assert_eq!((t.excluded_nonfinite, t.excluded_nonpositive), (2, 1));
        assert_eq!(proportions(&t), Err(Error::EmptyData));
    }

    #[test]
    fn proportions_examples() {
        let mut t = BinTally::empty(BinSchemeSpec::constant(4, 2.0, 0.0, 1.0));
        t.per_cycle_counts.insert(0, vec![1, 1, 1, 1]);
        assert_eq!(proportions(&t).unwrap().as_slice(), &[0.25; 4]);

        let mut t = BinTally::empty(BinSchemeSpec::constant(3, 2.0, 0.0, 1.0));
        t.per_cycle_counts.insert(0, vec![3, 1, 0]);
        t.per_cycle_counts.insert(1, vec![1, 2, 1]);
        assert_eq!(proportions(&t).unwrap().as_slice(), &[0.5, 0.375, 0.125]);
    }

    #[test]
    fn per_cycle_examples() {
        let mut t = BinTally::empty(BinSchemeSpec::constant(3, 2.0, 0.0, 1.0));
        t.per_cycle_counts.insert(0, vec![1, 0, 0]);
        t.per_cycle_counts.insert(4, vec![2, 1, 1]);
        let rows = per_cycle_proportions(&t, 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].cycle_index, 4);
        assert_eq!(rows[0].count, 4);
        assert_eq!(rows[0].proportions.as_slice(), &[0.5, 0.25, 0.25]);
        assert!(per_cycle_proportions(&t, 10).unwrap().is_empty());
        assert!(per_cycle_proportions(&t, 0).is_err());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale_data(&[1.0, 2.0, 3.0], 2.0).unwrap(), vec![2.0, 4.0, 6.0]);
        assert_eq!(scale_data(&[5.0], 1.0).unwrap(), vec![5.0]);
        assert!(scale_data(&[5.0], 0.0).is_err());
        assert!(scale_data(&[5.0], -1.0).is_err());
    }

    #[test]
    fn merge_rejects_other_scheme() {
        let mut a = BinTally::empty(BinSchemeSpec::constant(3, 2.0, 0.0, 1.0));
        let b = BinTally::empty(BinSchemeSpec::constant(3, 3.0, 0.0, 1.0));
        assert_eq!(a.merge(&b), Err(Error::SchemeMismatch));
    }
}
