//! Size sweeps: one [`EntropyReport`] per linear size `L`, least-squares
//! fits of logarithmic scaling laws, and deterministic CSV/JSON/SVG output.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{FermiSeaSpec, RegionSpec};
use crate::numfmt::{sci17, serialize_f64};
use crate::spectrum::{self, EntropyReport};

pub const MAX_MODES_1D: usize = 4096;
pub const MAX_MODES_2D: usize = 900;
pub const CSV_HEADER: [&str; 7] = ["L", "S_A", "S_m", "S_res", "C_1", "C_2", "delta_S"];

/// How region A grows with `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTemplate {
    /// Sites `0..L` of a chain.
    Interval,
    /// `L × L` block of the square lattice.
    Square,
}

impl RegionTemplate {
    pub fn dimension(&self) -> usize {
        match self {
            RegionTemplate::Interval => 1,
            RegionTemplate::Square => 2,
        }
    }

    pub fn modes(&self, scale: usize) -> usize {
        match self {
            RegionTemplate::Interval => scale,
            RegionTemplate::Square => scale * scale,
        }
    }

    pub fn region(&self, scale: usize) -> Result<RegionSpec> {
        match self {
            RegionTemplate::Interval => RegionSpec::interval(scale),
            RegionTemplate::Square => RegionSpec::square(scale),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegionTemplate::Interval => "interval",
            RegionTemplate::Square => "square",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quantity {
    #[serde(rename = "S_A")]
    SA,
    #[serde(rename = "S_m")]
    Sm,
    #[serde(rename = "S_res")]
    Sres,
    #[serde(rename = "C_2")]
    C2,
    #[serde(rename = "delta_S")]
    DeltaS,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::SA, Quantity::Sm, Quantity::Sres, Quantity::C2, Quantity::DeltaS];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::SA => "S_A",
            Quantity::Sm => "S_m",
            Quantity::Sres => "S_res",
            Quantity::C2 => "C_2",
            Quantity::DeltaS => "delta_S",
        }
    }

    pub fn of(&self, r: &EntropyReport) -> f64 {
        match self {
            Quantity::SA => r.s_a,
            Quantity::Sm => r.s_m,
            Quantity::Sres => r.s_res,
            Quantity::C2 => r.c_2,
            Quantity::DeltaS => r.delta_s,
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown quantity `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(Error::Config(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: FermiSeaSpec,
    pub geometry: RegionTemplate,
    pub scales: Vec<usize>,
    pub quantities: Vec<Quantity>,
    pub output: Option<OutputSpec>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.quantities.is_empty() {
            return Err(Error::Config("no quantities requested".into()));
        }
        if self.scales.len() < 3 {
            return Err(Error::Config(format!(
                "need at least 3 sizes, got {}",
                self.scales.len()
            )));
        }
        if self.scales[0] == 0 || self.scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be positive and strictly increasing".into()));
        }
        let d = self.geometry.dimension();
        if self.model.dimension() != d {
            return Err(Error::Config(format!(
                "{}d model with a {}d region",
                self.model.dimension(),
                d
            )));
        }
        let largest = *self.scales.last().expect("non-empty");
        let limit = if d == 1 { MAX_MODES_1D } else { MAX_MODES_2D };
        let modes = self.geometry.modes(largest);
        if modes > limit {
            return Err(Error::Budget {
                modes,
                limit,
                dimension: d,
            });
        }
        if let FermiSeaSpec::FiniteRing { n_sites, .. } = self.model {
            if largest > n_sites {
                return Err(Error::Config(format!(
                    "interval of {largest} sites does not fit on a ring of {n_sites}"
                )));
            }
        }
        Ok(())
    }

    /// Scaling law matching the dimension: `ln L` in 1d, `L ln L` in 2d.
    pub fn natural_model(&self) -> ScalingModel {
        match self.geometry.dimension() {
            1 => ScalingModel::LnL,
            _ => ScalingModel::LLnL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "L")]
    pub scale: usize,
    #[serde(flatten)]
    pub report: EntropyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, q: Quantity) -> Vec<f64> {
        self.rows.iter().map(|r| q.of(&r.report)).collect()
    }

    pub fn scales(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.scale).collect()
    }
}

/// Report for a single size.
pub fn sweep_point(model: &FermiSeaSpec, geometry: RegionTemplate, scale: usize) -> Result<EntropyReport> {
    let region = geometry.region(scale)?;
    let c = model.correlation(&region)?;
    spectrum::report(&c)
}

/// Computes every row. Rows run in parallel on the current rayon pool;
/// the output is ordered by `L` regardless of completion order, and a
/// failure is reported for the smallest failing `L`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let results: Vec<Result<SweepRow>> = cfg
        .scales
        .par_iter()
        .map(|&scale| {
            sweep_point(&cfg.model, cfg.geometry, scale)
                .map(|report| SweepRow { scale, report })
                .map_err(|e| Error::SweepRow {
                    scale,
                    source: Box::new(e),
                })
        })
        .collect();
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalingModel {
    /// `y = a ln L + b`
    #[serde(rename = "A_lnL")]
    LnL,
    /// `y = a L ln L + b`
    #[serde(rename = "A_LlnL")]
    LLnL,
}

impl ScalingModel {
    pub fn regressor(&self, scale: f64) -> f64 {
        match self {
            ScalingModel::LnL => scale.ln(),
            ScalingModel::LLnL => scale * scale.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(serialize_with = "serialize_f64")]
    pub slope: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub intercept: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub r_squared: f64,
    pub model: ScalingModel,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64], model: ScalingModel) -> Result<FitResult> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Numerical("need at least two points to fit".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > f64::EPSILON * mx.abs().max(1.0)) {
        return Err(Error::Numerical("degenerate design matrix: regressor is constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        model,
    })
}

/// Number of rows used by [`fit_scaling`]: the larger half of the grid,
/// but never fewer than three.
pub fn fit_window(rows: usize) -> usize {
    rows.div_ceil(2).max(3).min(rows)
}

/// Fits `quantity` against `ln L` or `L ln L` over the largest sizes.
pub fn fit_scaling(table: &SweepTable, quantity: Quantity, model: ScalingModel) -> Result<FitResult> {
    if table.rows.len() < 3 {
        return Err(Error::Config(format!(
            "fit needs at least 3 rows, got {}",
            table.rows.len()
        )));
    }
    let mut rows = table.rows.clone();
    rows.sort_by_key(|r| r.scale);
    let tail = &rows[rows.len() - fit_window(rows.len())..];
    let xs: Vec<f64> = tail.iter().map(|r| model.regressor(r.scale as f64)).collect();
    let ys: Vec<f64> = tail.iter().map(|r| quantity.of(&r.report)).collect();
    least_squares(&xs, &ys, model)
}

/// Fits for every requested quantity, in request order.
pub fn fit_all(cfg: &SweepConfig, table: &SweepTable) -> Result<Vec<(Quantity, FitResult)>> {
    let model = cfg.natural_model();
    cfg.quantities
        .iter()
        .map(|&q| fit_scaling(table, q, model).map(|f| (q, f)))
        .collect()
}

pub fn write_csv<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in &table.rows {
        let r = &row.report;
        out.write_record([
            row.scale.to_string(),
            sci17(r.s_a),
            sci17(r.s_m),
            sci17(r.s_res),
            sci17(r.c_1),
            sci17(r.c_2),
            sci17(r.delta_s),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
#[serde(tag = "kind")]
enum ModelDoc {
    #[serde(rename = "sine1d")]
    Sine1d {
        #[serde(rename = "k_F", serialize_with = "serialize_f64")]
        k_f: f64,
    },
    #[serde(rename = "square2d")]
    Square2d {
        #[serde(rename = "k_F", serialize_with = "serialize_f64")]
        k_f: f64,
    },
    #[serde(rename = "ring")]
    Ring { n_sites: usize, n_filled: usize },
}

impl From<FermiSeaSpec> for ModelDoc {
    fn from(m: FermiSeaSpec) -> Self {
        match m {
            FermiSeaSpec::SineKernel1D { k_f } => ModelDoc::Sine1d { k_f },
            FermiSeaSpec::SquareSea2D { k_f } => ModelDoc::Square2d { k_f },
            FermiSeaSpec::FiniteRing { n_sites, n_filled } => ModelDoc::Ring { n_sites, n_filled },
        }
    }
}

#[derive(Serialize)]
struct FitDoc {
    quantity: Quantity,
    #[serde(flatten)]
    fit: FitResult,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    model: ModelDoc,
    geometry: &'static str,
    rows: &'a [SweepRow],
    fits: Vec<FitDoc>,
}

/// JSON document: model, geometry, one object per row mirroring
/// [`EntropyReport`], and the scaling fits.
pub fn write_json<W: Write>(cfg: &SweepConfig, table: &SweepTable, mut w: W) -> Result<()> {
    let fits = fit_all(cfg, table)?
        .into_iter()
        .map(|(quantity, fit)| FitDoc { quantity, fit })
        .collect();
    let doc = SweepDoc {
        model: cfg.model.into(),
        geometry: cfg.geometry.name(),
        rows: &table.rows,
        fits,
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Static line chart of the requested quantities against `ln L`.
pub fn write_svg<W: Write>(cfg: &SweepConfig, table: &SweepTable, mut w: W) -> Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

    let xs: Vec<f64> = table.rows.iter().map(|r| (r.scale as f64).ln()).collect();
    let series: Vec<(Quantity, Vec<f64>)> = cfg.quantities.iter().map(|&q| (q, table.column(q))).collect();
    let (xmin, xmax) = bounds(xs.iter().copied());
    let (ymin, ymax) = bounds(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let px = |x: f64| PAD + (x - xmin) / (xmax - xmin).max(1e-300) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - ymin) / (ymax - ymin).max(1e-300) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">ln L</text>"#, W / 2.0, H - 15.0);
    for (k, (q, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, points.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            W - PAD + 5.0,
            PAD + 15.0 * k as f64,
            q.name()
        );
    }
    svg.push_str("</svg>\n");
    w.write_all(svg.as_bytes())?;
    Ok(())
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Writes `table` to the configured output, if any.
pub fn write_output(cfg: &SweepConfig, table: &SweepTable) -> Result<()> {
    let Some(out) = &cfg.output else {
        return Ok(());
    };
    let mut w = BufWriter::new(File::create(&out.path)?);
    match out.format {
        OutputFormat::Csv => write_csv(table, &mut w)?,
        OutputFormat::Json => write_json(cfg, table, &mut w)?,
        OutputFormat::Svg => write_svg(cfg, table, &mut w)?,
    }
    w.flush()?;
    Ok(())
}
