//! `key = value` sweep configs and the value syntax shared with flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use fermient::sweep::{OutputFormat, OutputSpec, Quantity, RegionTemplate, SweepConfig};
use fermient::FermiSeaSpec;

/// Keys accepted in a sweep config, one per sweep flag.
pub const SWEEP_KEYS: [&str; 9] = [
    "model", "kf", "sites", "filled", "geometry", "scales", "quantities", "output", "format",
];

pub type Params = BTreeMap<String, String>;

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Unknown and repeated keys are errors.
pub fn parse_config(text: &str) -> Result<Params, String> {
    let mut out = Params::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim();
        let value = value.trim();
        if !SWEEP_KEYS.contains(&key) {
            return Err(format!("line {}: unknown key `{key}`", i + 1));
        }
        if value.is_empty() {
            return Err(format!("line {}: `{key}` has no value", i + 1));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(format!("line {}: `{key}` given twice", i + 1));
        }
    }
    Ok(out)
}

/// A real number, optionally a multiple of π written with a `pi` suffix:
/// `0.5pi`, `pi`, `-2pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = match t.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(m) => m.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))? * PI,
        None => t.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

fn parse_usize(key: &str, s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|e| format!("{key} `{s}`: {e}"))
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').map(|x| f(x.trim())).collect()
}

/// Builds a model from its name and parameters.
pub fn model(name: &str, kf: Option<&str>, sites: Option<usize>, filled: Option<usize>) -> Result<FermiSeaSpec, String> {
    let need_kf = || -> Result<f64, String> {
        parse_real(kf.ok_or_else(|| format!("model `{name}` needs kf"))?)
    };
    match name {
        "sine1d" => Ok(FermiSeaSpec::SineKernel1D { k_f: need_kf()? }),
        "square2d" => Ok(FermiSeaSpec::SquareSea2D { k_f: need_kf()? }),
        "ring" => Ok(FermiSeaSpec::FiniteRing {
            n_sites: sites.ok_or("model `ring` needs sites")?,
            n_filled: filled.ok_or("model `ring` needs filled")?,
        }),
        _ => Err(format!("unknown model `{name}` (sine1d, square2d, ring)")),
    }
}

/// Turns merged sweep parameters into a [`SweepConfig`].
pub fn sweep_config(p: &Params) -> Result<SweepConfig, String> {
    let get = |k: &str| p.get(k).map(String::as_str);
    let usize_of = |k: &str| get(k).map(|v| parse_usize(k, v)).transpose();
    let name = get("model").ok_or("missing `model`")?;
    let model = model(name, get("kf"), usize_of("sites")?, usize_of("filled")?)?;
    let geometry = match get("geometry") {
        Some("interval") => RegionTemplate::Interval,
        Some("square") => RegionTemplate::Square,
        Some(g) => return Err(format!("unknown geometry `{g}` (interval, square)")),
        None if model.dimension() == 2 => RegionTemplate::Square,
        None => RegionTemplate::Interval,
    };
    let scales = parse_list(get("scales").ok_or("missing `scales`")?, |s| parse_usize("scales", s))?;
    let quantities = match get("quantities") {
        Some(q) => parse_list(q, |s| s.parse::<Quantity>().map_err(|e| e.to_string()))?,
        None => Quantity::ALL.to_vec(),
    };
    let format = match get("format") {
        Some(f) => f.parse::<OutputFormat>().map_err(|e| e.to_string())?,
        None => match get("output").and_then(|o| o.rsplit_once('.')).map(|(_, ext)| ext) {
            Some("json") => OutputFormat::Json,
            Some("svg") => OutputFormat::Svg,
            _ => OutputFormat::Csv,
        },
    };
    let output = get("output").map(|path| OutputSpec {
        path: PathBuf::from(path),
        format,
    });
    Ok(SweepConfig {
        model,
        geometry,
        scales,
        quantities,
        output,
    })
}

/// Format used when no output path is configured.
pub fn stdout_format(p: &Params) -> Result<OutputFormat, String> {
    match p.get("format") {
        Some(f) => f.parse().map_err(|e: fermient::Error| e.to_string()),
        None => Ok(OutputFormat::Csv),
    }
}
