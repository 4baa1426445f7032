//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use binlaw::conformance::{second_order_scheme, TheorySource};
use binlaw::figures::{reproduce, Figure, FigureTable, RowKind};
use binlaw::theory::{self, convergence_profile, SeriesPartials, MAX_SERIES_CYCLES};
use binlaw::{
    per_cycle_proportions, tally_parallel, BinScheme, BinSchemeSpec, ConformanceReport, Family,
    GeneratorSpec, Metrics, Verdict, RNG_ALGORITHM,
};
use serde::{Deserialize, Serialize};

use crate::args::{AnalyzeArgs, FamilyName, Format, LawArgs, ReproduceArgs, SchemeArgs, SeriesArgs, SimulateArgs};
use crate::error::{CliError, Result};
use crate::input::read_values;
use crate::output::{num, write_aligned, write_tsv};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    /// Aggregate count per rank.
    pub per_rank: Vec<u64>,
    pub in_range: u64,
    /// Every parsed value, in range or not.
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub cycle: u64,
    pub count: u64,
    pub proportions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusions {
    pub below_range: u64,
    pub above_range: u64,
    pub nonpositive: u64,
    pub nonfinite: u64,
    /// Unparsable lines skipped under `--lenient`.
    pub malformed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub source: TheorySource,
    pub vector: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    pub version: String,
}

/// Everything `analyze` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub scheme: BinSchemeSpec,
    pub counts: Counts,
    pub proportions: Vec<f64>,
    pub per_cycle: Vec<CycleRow>,
    pub coverage: f64,
    pub exclusions: Exclusions,
    pub theory: Theory,
    pub metrics: Metrics,
    pub verdict: Verdict,
    pub meta: Meta,
}

/// Sidecar metadata written by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMeta {
    pub generator: GeneratorSpec,
    pub seed: u64,
    pub n: u64,
    pub rng: String,
    pub version: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn scheme_from_args(a: &SchemeArgs) -> Result<BinSchemeSpec> {
    let spec = if let Some(base) = a.second_order_base {
        second_order_scheme(base, a.periods)?.with_origin(a.start, a.width)
    } else if let Some(factors) = &a.factors {
        BinSchemeSpec::vector(a.bins, factors.clone(), a.start, a.width)
    } else {
        BinSchemeSpec::constant(a.bins, a.factor, a.start, a.width)
    };
    // Validate up front so bad flags are usage errors.
    BinScheme::new(spec.clone())?;
    Ok(spec)
}

fn with_output<F>(path: Option<&Path>, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Output(e.into()))?;
    writeln!(out)?;
    Ok(())
}

pub fn build_report(args: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let spec = scheme_from_args(&args.scheme)?;
    if args.min_count == 0 {
        return Err(usage("--min-count must be at least 1"));
    }
    let meta = match &args.meta {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            let m: SimulationMeta = serde_json::from_str(&text)
                .map_err(|e| CliError::Data(format!("{}: not a simulation sidecar: {e}", p.display())))?;
            Meta { seed: Some(m.seed), generator: Some(m.generator), rng: Some(m.rng), version: VERSION.to_owned() }
        }
        None => Meta { seed: None, generator: None, rng: None, version: VERSION.to_owned() },
    };
    let loaded = read_values(&args.input, args.column.as_deref(), args.lenient)?;
    let scheme = BinScheme::new(spec.clone())?;
    let t = tally_parallel(&scheme, &loaded.values)?;
    let report = ConformanceReport::from_tally(&t, None, args.threshold)?;
    let per_cycle = if args.per_cycle {
        per_cycle_proportions(&t, args.min_count)?
            .into_iter()
            .map(|c| CycleRow { cycle: c.cycle_index, count: c.count, proportions: c.proportions.into_vec() })
            .collect()
    } else {
        Vec::new()
    };
    Ok(AnalyzeReport {
        scheme: spec,
        counts: Counts { per_rank: t.aggregate_counts(), in_range: t.in_range(), total: t.total() },
        proportions: report.empirical.into_vec(),
        per_cycle,
        coverage: report.coverage,
        exclusions: Exclusions {
            below_range: t.below_range,
            above_range: t.above_range,
            nonpositive: t.excluded_nonpositive,
            nonfinite: t.excluded_nonfinite,
            malformed: loaded.malformed,
        },
        theory: Theory {
            source: report.theoretical_source,
            vector: report.theoretical.into_vec(),
            caveats: report.caveats,
        },
        metrics: report.metrics,
        verdict: report.verdict,
        meta,
    })
}

fn describe_scheme(s: &BinSchemeSpec) -> String {
    let growth = match &s.expansion {
        binlaw::Expansion::Constant { factor } => format!("F={factor}"),
        binlaw::Expansion::Vector { factors } => format!(
            "F_i=[{}]",
            factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")
        ),
    };
    format!("D={} {growth} S={} W={}", s.bins, s.start, s.width)
}

fn describe_source(s: &TheorySource) -> String {
    match s {
        TheorySource::GeneralLaw { bins, factor } => format!("general law D={bins} F={factor}"),
        TheorySource::BenfordFirst { base } => format!("first-digit Benford, base {base}"),
        TheorySource::BenfordSecond { base } => format!("second-digit Benford, base {base}"),
        TheorySource::FlatLimit { bins } => format!("flat limit 1/{bins}"),
        TheorySource::FactorAverage { bins, f_avg } => format!("general law D={bins} F=F_AVG={}", num(*f_avg)),
        TheorySource::Custom => "custom".to_owned(),
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    if v.is_conforming() {
        "conforming"
    } else {
        "non-conforming"
    }
}

fn render_report(r: &AnalyzeReport, format: Format, out: &mut dyn Write) -> Result<()> {
    let rank_rows = || -> Vec<Vec<String>> {
        (0..r.proportions.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    r.counts.per_rank[i].to_string(),
                    num(r.proportions[i]),
                    num(r.theory.vector[i]),
                    num(r.proportions[i] - r.theory.vector[i]),
                ]
            })
            .collect()
    };
    let header = || vec!["rank".to_owned(), "count".into(), "proportion".into(), "theory".into(), "deviation".into()];
    match format {
        Format::Json => write_json(out, r)?,
        Format::Tsv => {
            let mut rows = vec![header()];
            rows.extend(rank_rows());
            write_tsv(out, &rows)?;
            writeln!(out)?;
            let e = &r.exclusions;
            let mut summary = vec![
                vec!["key".to_owned(), "value".into()],
                vec!["scheme".into(), describe_scheme(&r.scheme)],
                vec!["theory".into(), describe_source(&r.theory.source)],
                vec!["in_range".into(), r.counts.in_range.to_string()],
                vec!["total".into(), r.counts.total.to_string()],
                vec!["coverage".into(), num(r.coverage)],
                vec!["below_range".into(), e.below_range.to_string()],
                vec!["above_range".into(), e.above_range.to_string()],
                vec!["nonpositive".into(), e.nonpositive.to_string()],
                vec!["nonfinite".into(), e.nonfinite.to_string()],
                vec!["malformed".into(), e.malformed.to_string()],
                vec!["mad".into(), num(r.metrics.mad)],
                vec!["max_abs_dev".into(), num(r.metrics.max_abs_dev)],
                vec!["ssd".into(), num(r.metrics.ssd)],
                vec!["verdict".into(), verdict_word(&r.verdict).into()],
                vec!["threshold".into(), num(r.verdict.threshold)],
            ];
            if let Some(seed) = r.meta.seed {
                summary.push(vec!["seed".into(), seed.to_string()]);
            }
            write_tsv(out, &summary)?;
            if !r.per_cycle.is_empty() {
                writeln!(out)?;
                let mut rows = vec![vec!["cycle".to_owned(), "count".into()]];
                rows[0].extend((1..=r.proportions.len()).map(|i| format!("p{i}")));
                for c in &r.per_cycle {
                    let mut row = vec![c.cycle.to_string(), c.count.to_string()];
                    row.extend(c.proportions.iter().map(|p| num(*p)));
                    rows.push(row);
                }
                write_tsv(out, &rows)?;
            }
        }
        Format::Table => {
            writeln!(out, "scheme  {}", describe_scheme(&r.scheme))?;
            writeln!(out, "theory  {}", describe_source(&r.theory.source))?;
            writeln!(out)?;
            let mut rows = vec![header()];
            rows.extend(rank_rows());
            write_aligned(out, &rows)?;
            writeln!(out)?;
            let e = &r.exclusions;
            writeln!(
                out,
                "in range {} of {} (coverage {}); below {}, above {}, nonpositive {}, nonfinite {}, malformed {}",
                r.counts.in_range, r.counts.total, num(r.coverage), e.below_range, e.above_range, e.nonpositive, e.nonfinite, e.malformed
            )?;
            writeln!(
                out,
                "mad {}  max_abs_dev {}  ssd {}",
                num(r.metrics.mad),
                num(r.metrics.max_abs_dev),
                num(r.metrics.ssd)
            )?;
            writeln!(out, "verdict {} (mad <= {})", verdict_word(&r.verdict), num(r.verdict.threshold))?;
            for c in &r.theory.caveats {
                writeln!(out, "caveat: {c}")?;
            }
            if let Some(seed) = r.meta.seed {
                writeln!(out, "seed {seed}")?;
            }
            if !r.per_cycle.is_empty() {
                writeln!(out)?;
                let mut rows = vec![vec!["cycle".to_owned(), "count".into()]];
                rows[0].extend((1..=r.proportions.len()).map(|i| format!("p{i}")));
                for c in &r.per_cycle {
                    let mut row = vec![c.cycle.to_string(), c.count.to_string()];
                    row.extend(c.proportions.iter().map(|p| num(*p)));
                    rows.push(row);
                }
                write_aligned(out, &rows)?;
            }
        }
    }
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs, format: Format) -> Result<()> {
    let report = build_report(args)?;
    with_output(args.output.as_deref(), |out| render_report(&report, format, out))
}

#[derive(Debug, Serialize)]
struct LawOutput {
    source: TheorySource,
    vector: Vec<f64>,
}

fn write_vector(format: Format, label: &str, source: &TheorySource, v: &[f64], first: usize) -> Result<()> {
    with_output(None, |out| {
        match format {
            Format::Json => write_json(out, &LawOutput { source: source.clone(), vector: v.to_vec() })?,
            Format::Tsv => {
                let mut rows = vec![vec![label.to_owned(), "proportion".into()]];
                rows.extend(v.iter().enumerate().map(|(i, p)| vec![(i + first).to_string(), num(*p)]));
                write_tsv(out, &rows)?;
            }
            Format::Table => {
                writeln!(out, "{}", describe_source(source))?;
                let mut rows = vec![vec![label.to_owned(), "proportion".into()]];
                rows.extend(v.iter().enumerate().map(|(i, p)| vec![(i + first).to_string(), num(*p)]));
                write_aligned(out, &rows)?;
            }
        }
        Ok(())
    })
}

pub fn law(args: &LawArgs, format: Format) -> Result<()> {
    let (source, label, first) = match (args.bins, args.base, args.flat) {
        (Some(bins), None, None) => {
            let factor = args.factor.ok_or_else(|| usage("--bins needs --factor"))?;
            (TheorySource::GeneralLaw { bins, factor }, "rank", 1)
        }
        (None, Some(base), None) if args.order == 1 => (TheorySource::BenfordFirst { base }, "digit", 1),
        (None, Some(base), None) => (TheorySource::BenfordSecond { base }, "digit", 0),
        (None, None, Some(bins)) => (TheorySource::FlatLimit { bins }, "rank", 1),
        _ => return Err(usage("give exactly one of --bins/--factor, --base or --flat")),
    };
    if args.base.is_none() && args.order != 1 {
        return Err(usage("--order applies to --base only"));
    }
    let v = source.vector()?;
    write_vector(format, label, &source, v.as_slice(), first)
}

#[derive(Debug, Serialize)]
struct SeriesRow {
    n: u64,
    vector: Vec<f64>,
    max_gap: f64,
}

#[derive(Debug, Serialize)]
struct SeriesOutput {
    bins: u32,
    factor: f64,
    tolerance: f64,
    limit: Vec<f64>,
    rows: Vec<SeriesRow>,
    n_reached: Option<u64>,
    final_gap: f64,
}

pub fn series(args: &SeriesArgs, format: Format) -> Result<()> {
    if args.n_max == 0 || args.n_max > MAX_SERIES_CYCLES {
        return Err(usage(format!("--n-max must be in 1..={MAX_SERIES_CYCLES}")));
    }
    if args.step == 0 {
        return Err(usage("--step must be at least 1"));
    }
    let limit = theory::general_law_vector(args.bins, args.factor)?.into_vec();
    let conv = convergence_profile(args.bins, args.factor, args.tolerance, args.n_max)?;
    let mut rows = Vec::new();
    for (n, v) in SeriesPartials::new(args.bins, args.factor)?.take(args.n_max as usize) {
        if n % args.step == 0 || n == 1 || n == args.n_max {
            let max_gap = v.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            rows.push(SeriesRow { n, vector: v, max_gap });
        }
    }
    let out = SeriesOutput {
        bins: args.bins,
        factor: args.factor,
        tolerance: args.tolerance,
        limit,
        rows,
        n_reached: conv.converged.then_some(conv.cycles),
        final_gap: conv.max_abs_gap,
    };
    let reached = match out.n_reached {
        Some(n) => format!("N_reached {n} (gap {} <= {})", num(out.final_gap), num(out.tolerance)),
        None => format!(
            "N_reached none within {} cycles (gap {} > {})",
            args.n_max,
            num(out.final_gap),
            num(out.tolerance)
        ),
    };
    with_output(None, |w| {
        let table = |labels: bool| -> Vec<Vec<String>> {
            let mut rows = Vec::new();
            if labels {
                let mut h = vec!["N".to_owned()];
                h.extend((1..=out.limit.len()).map(|d| format!("d{d}")));
                h.push("max_gap".into());
                rows.push(h);
            }
            for r in &out.rows {
                let mut row = vec![r.n.to_string()];
                row.extend(r.vector.iter().map(|p| num(*p)));
                row.push(num(r.max_gap));
                rows.push(row);
            }
            let mut lim = vec!["limit".to_owned()];
            lim.extend(out.limit.iter().map(|p| num(*p)));
            lim.push(String::new());
            rows.push(lim);
            rows
        };
        match format {
            Format::Json => write_json(w, &out)?,
            Format::Tsv => {
                write_tsv(w, &table(true))?;
                writeln!(w, "{reached}")?;
            }
            Format::Table => {
                writeln!(w, "series D={} F={}", out.bins, out.factor)?;
                write_aligned(w, &table(true))?;
                writeln!(w, "{reached}")?;
            }
        }
        Ok(())
    })
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--family {family} needs --{flag}")))
}

fn family_from_args(a: &SimulateArgs) -> Result<Family> {
    let fam = match a.family {
        FamilyName::Kx => Family::KOverX { a: need(a.a, "a", "kx")?, b: need(a.b, "b", "kx")? },
        FamilyName::Lognormal => Family::Lognormal {
            location: need(a.location, "location", "lognormal")?,
            shape: need(a.shape, "shape", "lognormal")?,
        },
        FamilyName::ExpGrowth => Family::ExpGrowth {
            base: need(a.base, "base", "exp-growth")?,
            rate: need(a.rate, "rate", "exp-growth")?,
        },
        FamilyName::LogTriangular => Family::LogTriangular {
            lo: need(a.lo, "lo", "log-triangular")?,
            mode: need(a.mode, "mode", "log-triangular")?,
            hi: need(a.hi, "hi", "log-triangular")?,
        },
        FamilyName::ChainUniform => Family::ChainUniform {
            depth: need(a.depth, "depth", "chain-uniform")?,
            top: need(a.top, "top", "chain-uniform")?,
        },
        FamilyName::Uniform => Family::Uniform { a: need(a.a, "a", "uniform")?, b: need(a.b, "b", "uniform")? },
        FamilyName::NormalPositive => Family::NormalPositive {
            mean: need(a.mean, "mean", "normal-positive")?,
            sd: need(a.sd, "sd", "normal-positive")?,
        },
    };
    Ok(fam)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let spec = GeneratorSpec::new(family_from_args(args)?, args.n, args.seed);
    let generator = spec.generator()?;
    let meta = SimulationMeta {
        generator: spec.clone(),
        seed: args.seed,
        n: args.n,
        rng: RNG_ALGORITHM.to_owned(),
        version: VERSION.to_owned(),
    };
    let meta_json = serde_json::to_string(&meta).map_err(|e| CliError::Output(e.into()))?;
    with_output(args.output.as_deref(), |out| {
        binlaw::generators::write_values(out, generator)?;
        Ok(())
    })?;
    match &args.meta {
        Some(p) => std::fs::write(p, meta_json + "\n").map_err(|e| CliError::io(p, e))?,
        None => eprintln!("{meta_json}"),
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReproduceOutput<'a> {
    #[serde(flatten)]
    table: &'a FigureTable,
    meta: Meta,
}

fn pp(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{:.2}", v * 100.0))
}

fn figure_rows(t: &FigureTable) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut h = vec!["Data Set".to_owned()];
    h.extend(t.columns.iter().cloned());
    h.extend(["MAD pp".to_owned(), "max dev pp".into(), "note".into()]);
    rows.push(h);
    let width = t.columns.len();
    for r in &t.rows {
        let mut row = vec![r.label.clone()];
        match &r.proportions {
            Some(p) => row.extend(p.iter().map(|x| format!("{:.1}%", x * 100.0))),
            None => row.extend(std::iter::repeat_n(String::from("-"), width)),
        }
        row.push(pp(r.mad));
        row.push(pp(r.max_abs_dev));
        let mut note = r.note.clone().unwrap_or_default();
        if r.kind == RowKind::Contrast && note.is_empty() {
            note = "non-logarithmic contrast".to_owned();
        }
        row.push(note);
        rows.push(row);
    }
    if let Some(l) = &t.law {
        let mut row = vec![l.label.clone()];
        row.extend(l.vector.iter().map(|x| format!("{:.1}%", x * 100.0)));
        row.extend([String::new(), String::new(), String::new()]);
        rows.push(row);
    }
    rows
}

pub fn reproduce_cmd(args: &ReproduceArgs, format: Format) -> Result<()> {
    let figure: Figure = args.figure.parse().map_err(|_| {
        let ids: Vec<&str> = Figure::ALL.iter().map(|f| f.id()).collect();
        usage(format!("unknown figure `{}` (expected one of {})", args.figure, ids.join(", ")))
    })?;
    let table = reproduce(figure, args.seed, args.n)?;
    with_output(None, |out| {
        match format {
            Format::Json => write_json(
                out,
                &ReproduceOutput {
                    table: &table,
                    meta: Meta {
                        seed: Some(args.seed),
                        generator: None,
                        rng: Some(RNG_ALGORITHM.to_owned()),
                        version: VERSION.to_owned(),
                    },
                },
            )?,
            Format::Tsv => {
                let rows: Vec<Vec<String>> = figure_rows(&table)
                    .into_iter()
                    .map(|r| r.into_iter().map(|c| c.trim_end_matches('%').to_owned()).collect())
                    .collect();
                write_tsv(out, &rows)?;
            }
            Format::Table => {
                writeln!(out, "{} ({}, seed {}, n {})", table.title, table.figure, table.seed, table.n)?;
                write_aligned(out, &figure_rows(&table))?;
                for n in &table.notes {
                    writeln!(out, "note: {n}")?;
                }
            }
        }
        Ok(())
    })
}
