//! Full counting statistics of the particle number in a region.
//!
//! For a Gaussian state with occupation spectrum `ν_j` the generating
//! function `χ(λ) = <e^{iλ N_A}>` is the product `Π_j (1 + ν_j (e^{iλ} - 1))`,
//! a trigonometric polynomial of degree `m`. Sampling it on `m + 1`
//! equispaced points therefore recovers the distribution `p_n` exactly.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::OccupationSpectrum;

/// Largest imaginary residue tolerated when inverting χ.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Negative probabilities down to this are treated as round-off.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Allowed deviation of `Σ p_n` from one.
pub const NORM_TOL: f64 = 1e-10;
/// `S_A - S_m` below `-NEGATIVE_RES_TOL` raises the inconsistency flag.
pub const NEGATIVE_RES_TOL: f64 = 1e-9;

/// Probabilities `p_n` of finding `n = 0, 1, ...` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeDistribution {
    p: Vec<f64>,
}

impl ChargeDistribution {
    /// Validates `p`, clips round-off negatives and renormalizes.
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        for v in p.iter_mut() {
            if !v.is_finite() || *v < -NEGATIVE_TOL || *v > 1.0 + NORM_TOL {
                return Err(Error::Numerical(format!("probability {v:e} out of range")));
            }
            *v = v.max(0.0);
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Numerical(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        p.iter_mut().for_each(|v| *v /= total);
        Ok(Self { p })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.p
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64 - mean).powi(2) * p)
            .sum()
    }

    /// `Σ_n p_n e^{iλn}`.
    pub fn characteristic(&self, lambda: f64) -> Complex64 {
        self.p
            .iter()
            .enumerate()
            .map(|(n, &p)| p * Complex64::cis(lambda * n as f64))
            .sum()
    }
}

/// `χ(λ) = Π_j (1 + ν_j (e^{iλ} - 1))`.
pub fn generating_function(s: &OccupationSpectrum, lambda: f64) -> Complex64 {
    let z = Complex64::cis(lambda) - 1.0;
    s.values()
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &nu| acc * (1.0 + nu * z))
}

/// Exact distribution of the particle number by discrete Fourier inversion
/// of χ. Modes with `ν ∈ {0, 1}` are deterministic and only shift the
/// count, so the transform runs over the fractional modes alone, on a
/// `k + 1` point grid.
pub fn charge_distribution(s: &OccupationSpectrum) -> Result<ChargeDistribution> {
    let m = s.len();
    let ones = s.values().iter().filter(|&&v| v == 1.0).count();
    let fractional: Vec<f64> = s
        .values()
        .iter()
        .copied()
        .filter(|&v| v > 0.0 && v < 1.0)
        .collect();
    let grid = fractional.len() + 1;
    let step = 2.0 * PI / grid as f64;
    let chi: Vec<Complex64> = (0..grid)
        .map(|k| {
            let z = Complex64::cis(step * k as f64) - 1.0;
            fractional
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &nu| acc * (1.0 + nu * z))
        })
        .collect();

    let twiddle: Vec<Complex64> = (0..grid)
        .map(|j| Complex64::cis(-step * j as f64))
        .collect();

    let mut p = vec![0.0; m + 1];
    for n in 0..grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in chi.iter().enumerate() {
            acc += c * twiddle[(k * n) % grid];
        }
        acc /= grid as f64;
        if acc.im.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::Numerical(format!(
                "imaginary residue {:e} in p_{}",
                acc.im,
                n + ones
            )));
        }
        p[n + ones] = acc.re;
    }
    ChargeDistribution::new(p)
}

/// Shannon entropy `-Σ p_n ln p_n`, in nats.
pub fn measurement_entropy(d: &ChargeDistribution) -> f64 {
    shannon(d.probabilities())
}

pub(crate) fn shannon(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum()
}

/// Maximum entropy of an integer-valued variable with variance `C_2`:
/// `ΔS = ½ ln[2πe (C_2 + 1/12)]`.
pub fn gaussian_bound(c_2: f64) -> Result<f64> {
    if !(c_2 >= 0.0) || !c_2.is_finite() {
        return Err(Error::InvalidParameter(format!("variance {c_2} must be non-negative")));
    }
    Ok(0.5 * (2.0 * PI * E * (c_2 + 1.0 / 12.0)).ln())
}

/// Accessible entropy together with a consistency flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessibleEntropy {
    pub value: f64,
    /// Set when `S_A - S_m < -1e-9`, impossible for a fixed-N state.
    pub inconsistent: bool,
}

/// `S_res = S_A - S_m`.
pub fn accessible_entropy(s_a: f64, s_m: f64) -> AccessibleEntropy {
    let value = s_a - s_m;
    AccessibleEntropy {
        value,
        inconsistent: value < -NEGATIVE_RES_TOL,
    }
}

/// Sum of per-charge Gaussian bounds, which caps the joint measurement
/// entropy of several conserved charges by subadditivity.
pub fn multi_charge_bound(variances: &[f64]) -> Result<f64> {
    if variances.is_empty() {
        return Err(Error::InvalidParameter("no charges given".into()));
    }
    variances.iter().map(|&v| gaussian_bound(v)).sum()
}
