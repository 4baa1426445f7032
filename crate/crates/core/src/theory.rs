//! Analytical bin proportions for the reciprocal (k/x) density.
//!
//! A scheme with `D` bins, start `w` and initial width `w` laid over `k/x`
//! gives, after `N` cycles, the rank proportions
//!
//! ```text
//! S_N(d) = Σ_{j<N} ln((P_j + d·F^j) / (P_j + (d-1)·F^j)) / ln(P_N)
//! P_j    = 1 + D·(F^j - 1)/(F - 1)          (1 + D·j when F = 1)
//! ```
//!
//! and as `N → ∞` the general law
//!
//! ```text
//! P(d) = ln((D + d(F-1)) / (D + (d-1)(F-1))) / ln(F)     (1/D when F = 1)
//! ```
//!
//! which is Benford's law `log_B(1 + 1/d)` when `F = D + 1 = B`.
//!
//! The series is evaluated with every term divided through by `F^j`, so it
//! stays finite for cycle counts in the tens of thousands.

use crate::error::{Error, Result};
use crate::scheme::ProportionVector;

/// Upper bound on the cycle count explored by [`convergence_profile`].
pub const MAX_SERIES_CYCLES: u64 = 10_000;

fn check_law(bins: u32, factor: f64) -> Result<()> {
    if bins == 0 {
        return Err(Error::param("D", "bin count must be at least 1"));
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::param("F", format!("inflation factor must be positive, got {factor}")));
    }
    Ok(())
}

fn check_rank(bins: u32, rank: u32) -> Result<()> {
    if rank == 0 || rank > bins {
        return Err(Error::param("d", format!("rank {rank} outside 1..={bins}")));
    }
    Ok(())
}

/// Closed-form limit of the bin proportions for rank `d`.
pub fn general_law(bins: u32, factor: f64, rank: u32) -> Result<f64> {
    check_law(bins, factor)?;
    check_rank(bins, rank)?;
    Ok(general_law_unchecked(bins as f64, factor, rank as f64))
}

fn general_law_unchecked(bins: f64, factor: f64, rank: f64) -> f64 {
    if factor == 1.0 {
        return 1.0 / bins;
    }
    let g = factor - 1.0;
    // ln((D + d·g) / (D + (d-1)·g)) = ln1p(g / (D + (d-1)·g))
    (g / (bins + (rank - 1.0) * g)).ln_1p() / g.ln_1p()
}

/// [`general_law`] for every rank.
pub fn general_law_vector(bins: u32, factor: f64) -> Result<ProportionVector> {
    check_law(bins, factor)?;
    let d = bins as f64;
    ProportionVector::new(
        (1..=bins)
            .map(|r| general_law_unchecked(d, factor, r as f64))
            .collect(),
    )
}

/// Bin equality of flat schemes: `1/D` per rank.
pub fn flat_limit(bins: u32) -> Result<ProportionVector> {
    check_law(bins, 1.0)?;
    ProportionVector::uniform(bins as usize)
}

/// First-digit Benford probability `log_base(1 + 1/d)`.
pub fn benford(base: u32, digit: u32) -> Result<f64> {
    if base < 2 {
        return Err(Error::param("base", format!("base must be at least 2, got {base}")));
    }
    if digit == 0 || digit >= base {
        return Err(Error::param("d", format!("digit {digit} outside 1..={}", base - 1)));
    }
    Ok((1.0 / digit as f64).ln_1p() / (base as f64).ln())
}

/// First-digit Benford distribution for `base` (length `base - 1`).
pub fn benford_vector(base: u32) -> Result<ProportionVector> {
    if base < 2 {
        return Err(Error::param("base", format!("base must be at least 2, got {base}")));
    }
    ProportionVector::new((1..base).map(|d| benford(base, d).unwrap()).collect())
}

/// Second-digit Benford distribution (digits `0..base`).
pub fn benford_second_order(base: u32) -> Result<ProportionVector> {
    if base < 2 {
        return Err(Error::param("base", format!("base must be at least 2, got {base}")));
    }
    let b = base as f64;
    let ln_b = b.ln();
    let values = (0..base)
        .map(|s| {
            (1..base)
                .map(|f| (1.0 / (f as f64 * b + s as f64)).ln_1p() / ln_b)
                .sum()
        })
        .collect();
    ProportionVector::new(values)
}

/// Per-cycle quantities of the finite series, normalized by `F^j` where that
/// keeps them bounded.
#[derive(Debug, Clone, Copy)]
struct SeriesTerms {
    bins: f64,
    factor: f64,
    ln_factor: f64,
}

impl SeriesTerms {
    fn new(bins: u32, factor: f64) -> Self {
        SeriesTerms {
            bins: bins as f64,
            factor,
            ln_factor: (factor - 1.0).ln_1p(),
        }
    }

    /// Contribution of cycle `j` to rank `d`:
    /// `ln((P_j + d·F^j) / (P_j + (d-1)·F^j))`.
    fn term(&self, j: u64, rank: f64) -> f64 {
        let j_f = j as f64;
        if self.factor == 1.0 {
            return (1.0 / (self.bins * j_f + rank)).ln_1p();
        }
        if self.factor > 1.0 {
            // g_j = P_j / F^j = F^-j + D·(1 - F^-j)/(F - 1)
            let decay = (-j_f * self.ln_factor).exp();
            let g = decay + self.bins * -(-j_f * self.ln_factor).exp_m1() / (self.factor - 1.0);
            (1.0 / (g + rank - 1.0)).ln_1p()
        } else {
            let grow = (j_f * self.ln_factor).exp();
            let p = self.prefix(j);
            (grow / (p + (rank - 1.0) * grow)).ln_1p()
        }
    }

    /// `P_j` for factors ≤ 1.
    fn prefix(&self, j: u64) -> f64 {
        let j_f = j as f64;
        if self.factor == 1.0 {
            1.0 + self.bins * j_f
        } else {
            1.0 + self.bins * (j_f * self.ln_factor).exp_m1() / (self.factor - 1.0)
        }
    }

    /// `ln(P_n)`, the normalizer after `n` cycles.
    fn log_total(&self, n: u64) -> f64 {
        let n_f = n as f64;
        if self.factor > 1.0 {
            let decay = (-n_f * self.ln_factor).exp();
            let g = decay + self.bins * -(-n_f * self.ln_factor).exp_m1() / (self.factor - 1.0);
            n_f * self.ln_factor + g.ln()
        } else {
            self.prefix(n).ln()
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_cycles(cycles: u64) -> Result<()> {
    if cycles == 0 {
        return Err(Error::param("N", "cycle count must be at least 1"));
    }
    Ok(())
}

/// Rank-`d` proportion of `k/x` under a scheme with `cycles` cycles
/// (`cycles = 1` is the non-expanding scheme).
pub fn series_sn(bins: u32, factor: f64, rank: u32, cycles: u64) -> Result<f64> {
    check_law(bins, factor)?;
    check_rank(bins, rank)?;
    check_cycles(cycles)?;
    let terms = SeriesTerms::new(bins, factor);
    let mut acc = CompensatedSum::default();
    for j in 0..cycles {
        acc.add(terms.term(j, rank as f64));
    }
    Ok(acc.value() / terms.log_total(cycles))
}

/// [`series_sn`] for every rank.
pub fn series_vector(bins: u32, factor: f64, cycles: u64) -> Result<ProportionVector> {
    check_cycles(cycles)?;
    let mut partials = SeriesPartials::new(bins, factor)?;
    let mut last = None;
    for _ in 0..cycles {
        last = partials.next();
    }
    ProportionVector::new(last.expect("cycles >= 1").1)
}

/// Yields `(N, [S_N(1), ..., S_N(D)])` for `N = 1, 2, ...`, reusing the
/// numerator sums between steps.
#[derive(Debug, Clone)]
pub struct SeriesPartials {
    terms: SeriesTerms,
    sums: Vec<CompensatedSum>,
    cycles: u64,
}

impl SeriesPartials {
    pub fn new(bins: u32, factor: f64) -> Result<Self> {
        check_law(bins, factor)?;
        Ok(SeriesPartials {
            terms: SeriesTerms::new(bins, factor),
            sums: vec![CompensatedSum::default(); bins as usize],
            cycles: 0,
        })
    }
}

impl Iterator for SeriesPartials {
    type Item = (u64, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        let j = self.cycles;
        for (i, s) in self.sums.iter_mut().enumerate() {
            s.add(self.terms.term(j, (i + 1) as f64));
        }
        self.cycles += 1;
        let denom = self.terms.log_total(self.cycles);
        Some((self.cycles, self.sums.iter().map(|s| s.value() / denom).collect()))
    }
}

/// The once-expanding (two-cycle) proportion, written out directly.
pub fn once_expanding(bins: u32, factor: f64, rank: u32) -> Result<f64> {
    check_law(bins, factor)?;
    check_rank(bins, rank)?;
    let (dd, f, d) = (bins as f64, factor, rank as f64);
    let num = (1.0 / d).ln_1p() + ((1.0 + dd + d * f) / (1.0 + dd + (d - 1.0) * f)).ln();
    Ok(num / (1.0 + dd + dd * f).ln())
}

/// The twice-expanding (three-cycle) proportion, written out directly.
pub fn twice_expanding(bins: u32, factor: f64, rank: u32) -> Result<f64> {
    check_law(bins, factor)?;
    check_rank(bins, rank)?;
    let (dd, f, d) = (bins as f64, factor, rank as f64);
    let f2 = f * f;
    let num = (1.0 / d).ln_1p()
        + ((1.0 + dd + d * f) / (1.0 + dd + (d - 1.0) * f)).ln()
        + ((1.0 + dd + dd * f + d * f2) / (1.0 + dd + dd * f + (d - 1.0) * f2)).ln();
    Ok(num / (1.0 + dd + dd * f + dd * f2).ln())
}

/// Share of `k/x` on `(a, b)` falling in each segment between consecutive
/// `cuts`. The cuts must start at `a`, end at `b` and increase strictly.
pub fn kx_segment_proportions(a: f64, b: f64, cuts: &[f64]) -> Result<ProportionVector> {
    if !(a > 0.0 && a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::param("a, b", format!("need 0 < a < b, got ({a}, {b})")));
    }
    if cuts.len() < 2 || cuts[0] != a || cuts[cuts.len() - 1] != b {
        return Err(Error::param("cuts", "must begin at a and end at b"));
    }
    if cuts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("cuts", "must be strictly increasing"));
    }
    let logs: Vec<f64> = cuts.iter().map(|c| c.ln()).collect();
    let total = logs[logs.len() - 1] - logs[0];
    ProportionVector::new(logs.windows(2).map(|w| (w[1] - w[0]) / total).collect())
}

/// Outcome of [`convergence_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// First cycle count meeting the tolerance, or the last one examined.
    pub cycles: u64,
    /// `max_d |S_N(d) - P(d)|` at `cycles`.
    pub max_abs_gap: f64,
    pub converged: bool,
}

/// Smallest `N ≤ n_max` whose series vector is within `tolerance` of the
/// general law in every rank. `n_max` is clamped to [`MAX_SERIES_CYCLES`].
pub fn convergence_profile(bins: u32, factor: f64, tolerance: f64, n_max: u64) -> Result<Convergence> {
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be positive"));
    }
    check_cycles(n_max)?;
    let limit = general_law_vector(bins, factor)?;
    let n_max = n_max.min(MAX_SERIES_CYCLES);
    let mut last = Convergence { cycles: 0, max_abs_gap: f64::INFINITY, converged: false };
    for (n, v) in SeriesPartials::new(bins, factor)?.take(n_max as usize) {
        let gap = max_gap(&v, limit.as_slice());
        last = Convergence { cycles: n, max_abs_gap: gap, converged: gap <= tolerance };
        if last.converged {
            break;
        }
    }
    Ok(last)
}

pub(crate) fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
