//! Reconstruction of the published bin tables from synthetic data.
//!
//! Rows backed by real-world data sets that cannot be regenerated are kept
//! in place, with a note and no numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conformance::{compare_slices, second_order_scheme, TheorySource, F_AVG_CAVEAT};
use crate::engine::{proportions, tally_parallel};
use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::scheme::{BinScheme, BinSchemeSpec};

/// Integer factor vector of the varying-factor 5-bin table.
pub const FIG5_FACTORS: [f64; 20] = [
    2., 3., 4., 2., 5., 3., 6., 3., 5., 7., 4., 2., 3., 2., 7., 8., 9., 7., 3., 6.,
];

/// Fractional factor vector of the varying-factor 6-bin table.
pub const FIG6_FACTORS: [f64; 20] = [
    2.37, 3.08, 1.55, 4.17, 1.18, 2.35, 1.82, 5.07, 3.39, 2.04, 4.82, 7.07, 2.33, 6.67, 3.01,
    1.67, 2.97, 3.33, 6.08, 2.25,
];

/// Length of the exponential growth series, fixed regardless of `n`.
pub const EXP_GROWTH_LEN: u64 = 10_000;

pub const NOT_REPRODUCIBLE: &str = "not reproducible: requires external data";

/// Four bins, factor 8, from 0 with width 0.0008.
pub fn scheme_a() -> BinSchemeSpec {
    BinSchemeSpec::constant(4, 8.0, 0.0, 0.0008)
}

/// Seven bins, factor 3, from 0 with width 0.0008.
pub fn scheme_b() -> BinSchemeSpec {
    BinSchemeSpec::constant(7, 3.0, 0.0, 0.0008)
}

pub fn fig3_scheme() -> BinSchemeSpec {
    BinSchemeSpec::constant(9, 10.0, 0.033, 0.07)
}

pub fn fig4_scheme() -> BinSchemeSpec {
    BinSchemeSpec::constant(9, 10.0, 5.0, 311.0)
}

pub fn fig5_scheme() -> BinSchemeSpec {
    BinSchemeSpec::vector(5, FIG5_FACTORS.to_vec(), 0.0, 0.007)
}

pub fn fig6_scheme() -> BinSchemeSpec {
    BinSchemeSpec::vector(6, FIG6_FACTORS.to_vec(), 0.0, 0.037)
}

/// Seven bins from 0 with width 0.0039 and factor `factor`.
pub fn fig7_scheme(factor: f64) -> BinSchemeSpec {
    BinSchemeSpec::constant(7, factor, 0.0, 0.0039)
}

/// Starts and widths of the three second-digit runs.
pub const SECOND_ORDER_ORIGINS: [(f64, f64); 3] = [(0.5, 0.07), (0.0, 0.30), (0.63, 0.00045)];

/// One simulable data source of the published tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub label: &'static str,
    pub family: Family,
    /// Fixed sample size, if the source ignores the requested `n`.
    pub fixed_count: Option<u64>,
}

impl Source {
    fn new(label: &'static str, family: Family) -> Self {
        Source { label, family, fixed_count: None }
    }

    pub fn spec(&self, n: u64, seed: u64) -> GeneratorSpec {
        GeneratorSpec::new(self.family.clone(), self.fixed_count.unwrap_or(n), seed)
    }
}

/// The six logarithmic generators standing in for the table rows.
pub fn logarithmic_sources() -> Vec<Source> {
    vec![
        Source::new("LOG Symmetrical Triangular (1, 3, 5)", Family::LogTriangular { lo: 1.0, mode: 3.0, hi: 5.0 }),
        Source::new("k/x over (1, 1000000)", Family::KOverX { a: 0.0, b: 6.0 }),
        Source {
            fixed_count: Some(EXP_GROWTH_LEN),
            ..Source::new("Exponential Growth, B=1.5, F=1.01", Family::ExpGrowth { base: 1.5, rate: 1.01 })
        },
        Source::new("Lognormal, Location=5, Shape=1", Family::Lognormal { location: 5.0, shape: 1.0 }),
        Source::new("Lognormal, Location=9.3, Shape=1.7", Family::Lognormal { location: 9.3, shape: 1.7 }),
        Source::new("Chain U(U(U(U(U(0, 5666)))))", Family::ChainUniform { depth: 5, top: 5666.0 }),
    ]
}

/// Non-logarithmic comparison generators of the varying-factor tables.
pub fn contrast_sources() -> Vec<Source> {
    vec![
        Source::new("(NON-Logarithmic) Normal(177, 40)", Family::NormalPositive { mean: 177.0, sd: 40.0 }),
        Source::new("(NON-Logarithmic) Uniform(5, 78000)", Family::Uniform { a: 5.0, b: 78000.0 }),
        Source::new("(NON-Logarithmic) k/x over (1, 10)", Family::KOverX { a: 0.0, b: 1.0 }),
    ]
}

/// Published tables that can be rebuilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    #[serde(rename = "schemeA")]
    SchemeA,
    #[serde(rename = "schemeB")]
    SchemeB,
    SecondOrder,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::SchemeA,
        Figure::SchemeB,
        Figure::SecondOrder,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::SchemeA => "schemeA",
            Figure::SchemeB => "schemeB",
            Figure::SecondOrder => "second_order",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param("figure", format!("unknown figure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Logarithmic,
    Contrast,
    /// Mean of the logarithmic rows above it.
    Average,
    NotReproducible,
}

/// One line of a rebuilt table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub label: String,
    pub kind: RowKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    /// Scheme used for this row when it differs from the table's.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<BinSchemeSpec>,
    pub proportions: Option<Vec<f64>>,
    /// Reference vector for rows compared against their own law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    pub mad: Option<f64>,
    pub max_abs_dev: Option<f64>,
    pub coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FigureRow {
    fn missing(label: &str, note: &str) -> Self {
        FigureRow {
            label: label.to_owned(),
            kind: RowKind::NotReproducible,
            generator: None,
            scheme: None,
            proportions: None,
            reference: None,
            mad: None,
            max_abs_dev: None,
            coverage: None,
            note: Some(note.to_owned()),
        }
    }
}

/// The law row appended below the data rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub label: String,
    pub source: TheorySource,
    pub vector: Vec<f64>,
}

/// A rebuilt table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureTable {
    pub figure: Figure,
    pub title: String,
    /// Scheme shared by every row, when there is one.
    pub scheme: Option<BinSchemeSpec>,
    pub columns: Vec<String>,
    pub rows: Vec<FigureRow>,
    pub law: Option<LawRow>,
    pub seed: u64,
    pub n: u64,
    pub notes: Vec<String>,
}

impl FigureTable {
    pub fn row(&self, label: &str) -> Option<&FigureRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn average(&self) -> Option<&FigureRow> {
        self.rows.iter().find(|r| r.kind == RowKind::Average)
    }
}

fn bin_labels(bins: u32) -> Vec<String> {
    (0..bins)
        .map(|i| {
            let letter = (b'A' + (i % 26) as u8) as char;
            if i < 26 {
                format!("Bin {letter}")
            } else {
                format!("Bin {}", i + 1)
            }
        })
        .collect()
}

fn measure(
    label: &str,
    kind: RowKind,
    generator: Option<GeneratorSpec>,
    data: &[f64],
    scheme: &BinSchemeSpec,
    reference: Option<&[f64]>,
) -> Result<FigureRow> {
    let t = tally_parallel(&BinScheme::new(scheme.clone())?, data)?;
    let mut row = FigureRow {
        label: label.to_owned(),
        kind,
        generator,
        scheme: None,
        proportions: None,
        reference: None,
        mad: None,
        max_abs_dev: None,
        coverage: Some(t.coverage()),
        note: None,
    };
    match proportions(&t) {
        Ok(p) => {
            if let Some(r) = reference {
                let m = compare_slices(p.as_slice(), r)?;
                row.mad = Some(m.mad);
                row.max_abs_dev = Some(m.max_abs_dev);
            }
            row.proportions = Some(p.into_vec());
        }
        Err(Error::EmptyData) => row.note = Some("no values inside the scheme".to_owned()),
        Err(e) => return Err(e),
    }
    Ok(row)
}

fn simulate(
    source: &Source,
    kind: RowKind,
    n: u64,
    seed: u64,
    scheme: &BinSchemeSpec,
    reference: Option<&[f64]>,
) -> Result<FigureRow> {
    let spec = source.spec(n, seed);
    let data = spec.sample()?;
    measure(source.label, kind, Some(spec), &data, scheme, reference)
}

fn average_row(rows: &[FigureRow], reference: Option<&[f64]>) -> Result<Option<FigureRow>> {
    let vectors: Vec<&Vec<f64>> = rows
        .iter()
        .filter(|r| r.kind == RowKind::Logarithmic)
        .filter_map(|r| r.proportions.as_ref())
        .collect();
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    let mut avg = vec![0.0; first.len()];
    for v in &vectors {
        for (a, x) in avg.iter_mut().zip(v.iter()) {
            *a += x / vectors.len() as f64;
        }
    }
    let (mad, max) = match reference {
        Some(r) => {
            let m = compare_slices(&avg, r)?;
            (Some(m.mad), Some(m.max_abs_dev))
        }
        None => (None, None),
    };
    Ok(Some(FigureRow {
        label: format!("Average of {} simulated logarithmic rows", vectors.len()),
        kind: RowKind::Average,
        generator: None,
        scheme: None,
        proportions: Some(avg),
        reference: None,
        mad,
        max_abs_dev: max,
        coverage: None,
        note: None,
    }))
}

/// Which real-data rows a layout lists, in order, around the generator rows.
struct Layout {
    title: String,
    scheme: BinSchemeSpec,
    source: TheorySource,
    law_label: String,
    real_rows: bool,
    contrasts: bool,
    notes: Vec<String>,
}

fn standard_table(figure: Figure, layout: Layout, seed: u64, n: u64) -> Result<FigureTable> {
    let law = layout.source.vector()?.into_vec();
    let mut rows = Vec::new();
    if layout.real_rows {
        rows.push(FigureRow::missing("Time Between Earthquakes", NOT_REPRODUCIBLE));
        rows.push(FigureRow::missing("USA Population Centers", NOT_REPRODUCIBLE));
    }
    let mut offset = 0u64;
    for source in logarithmic_sources() {
        rows.push(simulate(&source, RowKind::Logarithmic, n, seed.wrapping_add(offset), &layout.scheme, Some(&law))?);
        offset += 1;
    }
    if layout.real_rows {
        rows.push(FigureRow::missing("Varied Data - Hill's Model", NOT_REPRODUCIBLE));
    }
    let average = average_row(&rows, Some(&law))?;
    if layout.contrasts {
        rows.push(FigureRow::missing("(NON-Logarithmic) US County Area", NOT_REPRODUCIBLE));
        rows.push(FigureRow::missing("(NON-Logarithmic) Payroll Data", NOT_REPRODUCIBLE));
        for source in contrast_sources() {
            rows.push(simulate(&source, RowKind::Contrast, n, seed.wrapping_add(offset), &layout.scheme, Some(&law))?);
            offset += 1;
        }
    }
    rows.extend(average);
    let mut notes = layout.notes;
    if let Some(c) = layout.source.caveat() {
        notes.push(c.to_owned());
    }
    Ok(FigureTable {
        figure,
        title: layout.title,
        columns: bin_labels(layout.scheme.bins),
        scheme: Some(layout.scheme),
        rows,
        law: Some(LawRow { label: layout.law_label, source: layout.source, vector: law }),
        seed,
        n,
        notes,
    })
}

fn fig7_table(seed: u64, n: u64) -> Result<FigureTable> {
    let source = Source::new("Lognormal, Location=9.3, Shape=1.7", Family::Lognormal { location: 9.3, shape: 1.7 });
    let spec = source.spec(n, seed);
    let data = spec.sample()?;
    let mut rows = Vec::new();
    for f in 1..=12 {
        let factor = f as f64;
        let scheme = fig7_scheme(factor);
        let law = crate::theory::general_law_vector(7, factor)?.into_vec();
        let mut row = measure(&format!("F = {f}"), RowKind::Logarithmic, Some(spec.clone()), &data, &scheme, Some(&law))?;
        row.scheme = Some(scheme);
        row.reference = Some(law);
        rows.push(row);
    }
    Ok(FigureTable {
        figure: Figure::Fig7,
        title: "Seven-bin schemes with F = 1..12 (Start=0 Width=0.0039)".to_owned(),
        scheme: None,
        columns: bin_labels(7),
        rows,
        law: None,
        seed,
        n,
        notes: vec![
            "population-centre data replaced by one Lognormal(9.3, 1.7) sample shared by every row".to_owned(),
            "deviations are against general_law(7, F) of each row".to_owned(),
        ],
    })
}

/// Periods of the second-digit scheme needed to pass `upper`.
fn second_order_periods(start: f64, width: f64, upper: f64) -> Result<u32> {
    for periods in 1..=64 {
        let spec = second_order_scheme(10, periods)?.with_origin(start, width);
        if BinScheme::new(spec)?.upper_limit() > upper {
            return Ok(periods);
        }
    }
    Err(Error::param("width", "too small to cover the data with a second-digit scheme"))
}

fn second_order_table(seed: u64, n: u64) -> Result<FigureTable> {
    let source = Source::new("k/x over (1, 1000000)", Family::KOverX { a: 0.0, b: 6.0 });
    let spec = source.spec(n, seed);
    let data = spec.sample()?;
    let top = data.iter().copied().fold(0.0, f64::max);
    let source_law = TheorySource::BenfordSecond { base: 10 };
    let law = source_law.vector()?.into_vec();
    let mut rows = Vec::new();
    for (start, width) in SECOND_ORDER_ORIGINS {
        let periods = second_order_periods(start, width, top)?;
        let scheme = second_order_scheme(10, periods)?.with_origin(start, width);
        let label = format!("Start {start}, width {width}");
        let mut row = measure(&label, RowKind::Logarithmic, Some(spec.clone()), &data, &scheme, Some(&law))?;
        row.scheme = Some(scheme);
        rows.push(row);
    }
    let fa = crate::conformance::f_avg(&crate::conformance::second_order_period(10))?;
    Ok(FigureTable {
        figure: Figure::SecondOrder,
        title: "Ten-bin second-digit schemes, factors {1 x8, 10} repeated".to_owned(),
        scheme: None,
        columns: (0..10).map(|d| format!("Digit {d}")).collect(),
        rows,
        law: Some(LawRow {
            label: "Second-digit Benford law, base 10".to_owned(),
            source: source_law,
            vector: law,
        }),
        seed,
        n,
        notes: vec![
            "population data replaced by one k/x(1, 10^6) sample shared by every row".to_owned(),
            format!(
                "for comparison: general_law(10, F_AVG = {fa}) = {:?}; {F_AVG_CAVEAT}",
                crate::theory::general_law_vector(10, fa)?
                    .iter()
                    .map(|v| (v * 1000.0).round() / 1000.0)
                    .collect::<Vec<_>>()
            ),
        ],
    })
}

/// Rebuild `figure` from synthetic data. Row `i` of the generator rows uses
/// seed `seed + i`; tables built on one shared sample use `seed` itself.
pub fn reproduce(figure: Figure, seed: u64, n: u64) -> Result<FigureTable> {
    if n == 0 {
        return Err(Error::param("n", "sample size must be at least 1"));
    }
    let gl = |bins: u32, factor: f64| TheorySource::GeneralLaw { bins, factor };
    let layout = |title: &str, scheme: BinSchemeSpec, source: TheorySource, law_label: &str, real_rows: bool| Layout {
        title: title.to_owned(),
        scheme,
        source,
        law_label: law_label.to_owned(),
        real_rows,
        contrasts: false,
        notes: Vec::new(),
    };
    let table = match figure {
        Figure::Fig1 | Figure::SchemeA => standard_table(
            figure,
            layout("Four-bin Scheme A, D=4 F=8 S=0 W=0.0008", scheme_a(), gl(4, 8.0), "General law D=4 F=8", figure == Figure::Fig1),
            seed,
            n,
        )?,
        Figure::Fig2 | Figure::SchemeB => standard_table(
            figure,
            layout("Seven-bin Scheme B, D=7 F=3 S=0 W=0.0008", scheme_b(), gl(7, 3.0), "General law D=7 F=3", figure == Figure::Fig2),
            seed,
            n,
        )?,
        Figure::Fig3 => standard_table(
            figure,
            layout("9-bin scheme F=10 (Start=0.033 Width=0.07)", fig3_scheme(), TheorySource::BenfordFirst { base: 10 }, "LOG10(1+1/d)", true),
            seed,
            n,
        )?,
        Figure::Fig4 => standard_table(
            figure,
            layout("9-bin scheme F=10 (Start=5 Width=311)", fig4_scheme(), TheorySource::BenfordFirst { base: 10 }, "LOG10(1+1/d)", true),
            seed,
            n,
        )?,
        Figure::Fig5 | Figure::Fig6 => {
            let (title, scheme, factors) = if figure == Figure::Fig5 {
                ("5-bin scheme, integer varying F (Start=0 Width=0.007)", fig5_scheme(), &FIG5_FACTORS[..])
            } else {
                ("6-bin scheme, fractional varying F (Start=0 Width=0.037)", fig6_scheme(), &FIG6_FACTORS[..])
            };
            let fa = crate::conformance::f_avg(factors)?;
            let bins = scheme.bins;
            let mut l = layout(
                title,
                scheme,
                TheorySource::FactorAverage { bins, f_avg: fa },
                &format!("General law D={bins} F=F_AVG={fa:.4}"),
                true,
            );
            l.contrasts = true;
            standard_table(figure, l, seed, n)?
        }
        Figure::Fig7 => fig7_table(seed, n)?,
        Figure::SecondOrder => second_order_table(seed, n)?,
    };
    Ok(table)
}
