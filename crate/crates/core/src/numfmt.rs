//! Fixed-width float formatting shared by every writer in the crate.
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips any `f64` and keeps output byte-identical across runs.

use serde::Serializer;
use serde_json::value::RawValue;

/// `x` with 17 significant digits, e.g. `6.9314718055994529e-1`.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// serde helper: emit an `f64` as a raw JSON number with 17 significant
/// digits. Non-finite values become `null`.
pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(sci17(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&*raw, s)
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_f64_slice<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Sci17(*x))?;
    }
    seq.end()
}

/// Newtype whose `Serialize` impl goes through [`serialize_f64`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci17(pub f64);

impl serde::Serialize for Sci17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, s)
    }
}
