//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use binlaw::{BinSchemeSpec, BinScheme, Placement};

/// Nodes and weights of `n`-point Gauss-Legendre quadrature on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        total += rule.iter().map(|(x, w)| w * f(mid + x * h / 2.0)).sum::<f64>() * h / 2.0;
    }
    total
}

/// Rank shares of `1/x` integrated numerically over the first `cycles`
/// cycles of the scheme that starts at 1 with width 1.
pub fn quadrature_proportions(bins: u32, factor: f64, cycles: u64) -> Vec<f64> {
    let spec = BinSchemeSpec::constant(bins, factor, 1.0, 1.0);
    let rule = gauss_legendre(16);
    let mut mass = vec![0.0; bins as usize];
    for c in 0..cycles {
        let l = binlaw::layout(&spec, c).unwrap();
        for (r, m) in mass.iter_mut().enumerate() {
            let a = l.cycle_start + r as f64 * l.bin_width;
            *m += integrate(|x| 1.0 / x, a, a + l.bin_width, 16, &rule);
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter().map(|m| m / total).collect()
}

/// Bin of `x` found by walking cycles and bins one by one.
pub fn linear_scan(scheme: &BinScheme, x: f64) -> Placement {
    let spec = scheme.spec();
    if x < spec.start {
        return Placement::BelowRange;
    }
    let mut c = 0u64;
    loop {
        let Ok(here) = scheme.layout(c) else {
            return Placement::AboveRange;
        };
        let next = match scheme.layout(c + 1) {
            Ok(l) => l.cycle_start,
            Err(_) => scheme.upper_limit(),
        };
        if next <= here.cycle_start {
            return Placement::AboveRange;
        }
        if x < next {
            let mut rank = 1;
            while rank < spec.bins && x >= here.cycle_start + rank as f64 * here.bin_width {
                rank += 1;
            }
            return Placement::Bin(binlaw::BinAssignment { cycle_index: c, rank });
        }
        c += 1;
    }
}
