//! Occupation spectrum of a correlation matrix and the quantities that
//! depend on it alone: von Neumann entropy and number cumulants.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fcs;
use crate::kernel::CorrelationMatrix;
use crate::numfmt::serialize_f64;

/// Eigenvalues further than this outside `[0, 1]` are rejected.
pub const CLIP_TOL: f64 = 1e-10;

/// Slack on `S_A ≥ 4 ln2 C_2`, which is an equality for every half-filled mode.
pub const VARIANCE_BOUND_SLACK: f64 = 1e-12;

/// Eigenvalues `ν_j ∈ [0, 1]` of a correlation matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationSpectrum {
    values: Vec<f64>,
}

impl OccupationSpectrum {
    /// Validates, clips round-off into `[0, 1]` and sorts descending.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            *v = clip_occupation(*v)?;
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Disjoint union of two spectra, i.e. the spectrum of a direct sum.
    pub fn union(&self, other: &Self) -> Self {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    /// Particle-hole conjugate spectrum `1 - ν_j`.
    pub fn complement(&self) -> Self {
        let mut values: Vec<f64> = self.values.iter().map(|v| 1.0 - v).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }
}

fn clip_occupation(v: f64) -> Result<f64> {
    if !v.is_finite() || v < -CLIP_TOL || v > 1.0 + CLIP_TOL {
        return Err(Error::InvalidCorrelation(format!(
            "occupation eigenvalue {v:e} outside [0, 1]"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Clipped, descending eigenvalues of `c`.
pub fn occupation_spectrum(c: &CorrelationMatrix) -> Result<OccupationSpectrum> {
    let values: Vec<f64> = match c.as_real() {
        Some(real) => real.symmetric_eigenvalues().iter().copied().collect(),
        None => c
            .entries()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect(),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver returned non-finite values".into()));
    }
    OccupationSpectrum::new(values)
}

/// Binary entropy `-ν ln ν - (1-ν) ln(1-ν)`, exactly zero at 0 and 1.
pub fn binary_entropy(nu: f64) -> f64 {
    if nu <= 0.0 || nu >= 1.0 {
        0.0
    } else {
        -nu * nu.ln() - (1.0 - nu) * (1.0 - nu).ln()
    }
}

/// Von Neumann entropy of the Gaussian state with this spectrum, in nats.
pub fn entropy_from_spectrum(s: &OccupationSpectrum) -> f64 {
    s.values.iter().map(|&v| binary_entropy(v)).sum()
}

/// Mean `C_1 = Σ ν` and variance `C_2 = Σ ν(1-ν)` of the particle number.
pub fn cumulants(s: &OccupationSpectrum) -> (f64, f64) {
    s.values
        .iter()
        .fold((0.0, 0.0), |(c1, c2), &v| (c1 + v, c2 + v * (1.0 - v)))
}

/// Everything known about one free-fermion instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    #[serde(rename = "S_A", serialize_with = "serialize_f64")]
    pub s_a: f64,
    #[serde(rename = "C_1", serialize_with = "serialize_f64")]
    pub c_1: f64,
    #[serde(rename = "C_2", serialize_with = "serialize_f64")]
    pub c_2: f64,
    #[serde(rename = "S_m", serialize_with = "serialize_f64")]
    pub s_m: f64,
    #[serde(rename = "S_res", serialize_with = "serialize_f64")]
    pub s_res: f64,
    #[serde(rename = "delta_S", serialize_with = "serialize_f64")]
    pub delta_s: f64,
    pub bound_gaussian_ok: bool,
    pub bound_variance_ok: bool,
}

impl EntropyReport {
    /// Assembles a report from its primary quantities and derives the rest.
    pub fn assemble(s_a: f64, c_1: f64, c_2: f64, s_m: f64) -> Result<Self> {
        let delta_s = fcs::gaussian_bound(c_2)?;
        let s_res = fcs::accessible_entropy(s_a, s_m).value;
        Ok(Self {
            s_a,
            c_1,
            c_2,
            s_m,
            s_res,
            delta_s,
            bound_gaussian_ok: s_m <= delta_s,
            bound_variance_ok: s_a >= 4.0 * LN_2 * c_2 - VARIANCE_BOUND_SLACK,
        })
    }

    /// `S_A - ΔS ≤ S_res ≤ S_A`.
    pub fn sandwich_holds(&self) -> bool {
        self.s_a - self.delta_s <= self.s_res && self.s_res <= self.s_a
    }

    /// Copy with every entropy multiplied by `factor`; cumulants untouched.
    /// `1 / ln 2` converts nats to bits.
    pub fn scale_entropies(&self, factor: f64) -> Self {
        Self {
            s_a: self.s_a * factor,
            s_m: self.s_m * factor,
            s_res: self.s_res * factor,
            delta_s: self.delta_s * factor,
            ..*self
        }
    }
}

/// Full entropy report for a correlation matrix.
pub fn report(c: &CorrelationMatrix) -> Result<EntropyReport> {
    let spectrum = occupation_spectrum(c)?;
    report_from_spectrum(&spectrum)
}

pub fn report_from_spectrum(spectrum: &OccupationSpectrum) -> Result<EntropyReport> {
    let s_a = entropy_from_spectrum(spectrum);
    let (c_1, c_2) = cumulants(spectrum);
    let dist = fcs::charge_distribution(spectrum)?;
    let s_m = fcs::measurement_entropy(&dist);
    EntropyReport::assemble(s_a, c_1, c_2, s_m)
}
