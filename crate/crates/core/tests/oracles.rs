#![allow(clippy::excessive_precision)]

mod common;

use binlaw::generators::{sample_kx, sample_kx_range, sample_lognormal};
use binlaw::theory::series_vector;
use binlaw::{assign, proportions, scale_data, tally, tally_parallel, BinScheme, BinSchemeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn series_matches_quadrature() {
    for (d, f, n) in [(3, 2.0, 4), (4, 8.0, 3), (7, 3.0, 5), (5, 1.0, 6), (6, 0.8, 4)] {
        let q = common::quadrature_proportions(d, f, n);
        let s = series_vector(d, f, n).unwrap();
        for (a, b) in q.iter().zip(s.iter()) {
            assert!((a - b).abs() < 1e-9, "D={d} F={f} N={n}: {a} vs {b}");
        }
    }
}

#[test]
fn quadrature_oracle_frozen_values() {
    // 50-digit evaluations of the series.
    let s43 = [0.45583779541055094, 0.30842543466931486, 0.2357367699201342];
    let q = common::quadrature_proportions(3, 2.0, 4);
    for (a, b) in q.iter().zip(s43) {
        assert!((a - b).abs() < 1e-12);
    }
    let s48 = [0.46703884061077581, 0.24222206614729262, 0.16517666961019492, 0.12556242363173665];
    let q = common::quadrature_proportions(4, 8.0, 3);
    for (a, b) in q.iter().zip(s48) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn assign_agrees_with_linear_scan() {
    let schemes = [
        BinSchemeSpec::constant(4, 8.0, 0.0, 0.0008),
        BinSchemeSpec::constant(7, 3.0, 0.0, 0.0008),
        BinSchemeSpec::constant(9, 10.0, 0.033, 0.07),
        BinSchemeSpec::constant(5, 1.0, 0.0, 0.3),
        BinSchemeSpec::constant(3, 1.0000001, 2.0, 0.01),
        BinSchemeSpec::constant(6, 0.9, 0.5, 0.2),
        BinSchemeSpec::vector(5, binlaw::figures::FIG5_FACTORS.to_vec(), 0.0, 0.007),
        BinSchemeSpec::vector(6, binlaw::figures::FIG6_FACTORS.to_vec(), 0.0, 0.037),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for spec in schemes {
        let scheme = BinScheme::new(spec.clone()).unwrap();
        for _ in 0..10_000 {
            let x = 10f64.powf(rng.random_range(-4.0..4.5));
            assert_eq!(assign(&scheme, x).unwrap(), common::linear_scan(&scheme, x), "{spec:?} x={x}");
        }
        // Every bin edge of the first cycles lands in the bin it opens.
        for c in 0..6 {
            let Ok(l) = scheme.layout(c) else { break };
            for r in 0..spec.bins {
                let x = l.cycle_start + r as f64 * l.bin_width;
                if x > 0.0 {
                    assert_eq!(assign(&scheme, x).unwrap(), common::linear_scan(&scheme, x));
                }
            }
        }
    }
}

#[test]
fn parallel_tally_equals_sequential() {
    let data = sample_lognormal(9.3, 1.7, 300_000, 4).unwrap();
    let scheme = BinScheme::new(BinSchemeSpec::constant(7, 3.0, 0.0, 0.0008)).unwrap();
    assert_eq!(tally(&scheme, &data).unwrap(), tally_parallel(&scheme, &data).unwrap());
}

#[test]
fn statistical_scale_invariance() {
    // Whole decades, so scaling only shifts where the range starts.
    let data = sample_kx(0.0, 6.0, 100_000, 15).unwrap();
    let scheme = BinScheme::new(BinSchemeSpec::constant(9, 10.0, 0.0, 0.0005)).unwrap();
    let base = proportions(&tally(&scheme, &data).unwrap()).unwrap();
    for k in [0.007, 3.0, 1234.0] {
        let scaled = proportions(&tally(&scheme, &scale_data(&data, k).unwrap()).unwrap()).unwrap();
        for (a, b) in base.iter().zip(scaled.iter()) {
            assert!((a - b).abs() < 0.02, "K={k}: {a} vs {b}");
        }
    }
}

#[test]
fn skewness_grows_with_factor() {
    let data = sample_lognormal(9.3, 1.7, 100_000, 8).unwrap();
    let first: Vec<f64> = (1..=12)
        .map(|f| {
            let s = BinScheme::new(BinSchemeSpec::constant(7, f as f64, 0.0, 0.0039)).unwrap();
            proportions(&tally(&s, &data).unwrap()).unwrap()[0]
        })
        .collect();
    for w in first.windows(2) {
        assert!(w[1] >= w[0] - 0.01, "{first:?}");
    }
}

#[test]
fn per_cycle_development_of_kx() {
    // With S = W the cycle-j share of rank d is
    // ln((P_j + d·F^j) / (P_j + (d-1)·F^j)) / ln(P_{j+1} / P_j), moving from
    // log_{D+1}(1 + 1/d) at j = 0 towards the general law.
    let top = 1e9;
    let data = sample_kx_range(1.0, top, 1_000_000, 6).unwrap();
    for (d, f) in [(4u32, 8.0), (9, 3.0)] {
        let spec = BinSchemeSpec::constant(d, f, 1.0, 1.0);
        let s = BinScheme::new(spec.clone()).unwrap();
        let cycles = binlaw::per_cycle_proportions(&tally(&s, &data).unwrap(), 20_000).unwrap();
        let mut firsts = Vec::new();
        for c in cycles {
            let next = binlaw::layout(&spec, c.cycle_index + 1).unwrap().cycle_start;
            if next > top {
                continue;
            }
            let l = binlaw::layout(&spec, c.cycle_index).unwrap();
            let span = (next / l.cycle_start).ln();
            for (r, got) in c.proportions.iter().enumerate() {
                let lo = l.cycle_start + r as f64 * l.bin_width;
                let want = ((lo + l.bin_width) / lo).ln() / span;
                assert!((got - want).abs() < 0.01, "D={d} F={f} cycle {}: {got} vs {want}", c.cycle_index);
            }
            firsts.push(c.proportions[0]);
        }
        assert!(firsts.len() >= 4, "{firsts:?}");
        let bl = binlaw::theory::benford(d + 1, 1).unwrap();
        let gl = binlaw::theory::general_law(d, f, 1).unwrap();
        assert!((firsts[0] - bl).abs() < 0.01);
        let last = *firsts.last().unwrap();
        assert!((last - gl).abs() < (firsts[0] - gl).abs(), "{firsts:?} towards {gl}");
    }
}
