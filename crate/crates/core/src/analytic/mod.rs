//! Closed-form reference models.
//!
//! Each model produces an [`AnalyticReport`]: the usual [`EntropyReport`]
//! plus the large-variance Gaussian value `½ ln(2πe C_2)` that the measured
//! entropy should approach.

mod widom;

pub use widom::{
    counting_function_u, widom_coefficients, widom_u, Geometry, WidomSpec, MIN_U_NODES,
};

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::fcs;
use crate::numfmt::serialize_opt_f64;
use crate::spectrum::{binary_entropy, EntropyReport};

/// Report of an analytic model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    #[serde(flatten)]
    pub report: EntropyReport,
    /// `½ ln(2πe C_2)`; absent when `C_2 = 0`.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub s_m_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

/// Entropy of a continuous Gaussian with variance `c_2`.
pub fn gaussian_entropy(c_2: f64) -> Option<f64> {
    (c_2 > 0.0).then(|| 0.5 * (2.0 * PI * E * c_2).ln())
}

/// Point contact opened for a time Δt with transmission `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpcSwitchParams {
    transmission: f64,
    ratio: f64,
}

impl QpcSwitchParams {
    /// `transmission` is `D ∈ [0, 1]`; `ratio` is `Δt/τ > 1`.
    pub fn new(transmission: f64, ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::InvalidParameter(format!(
                "transmission {transmission} outside [0, 1]"
            )));
        }
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(Error::InvalidParameter(format!("time ratio {ratio} must exceed 1")));
        }
        Ok(Self { transmission, ratio })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// `C_2 = (D/π²) ln(Δt/τ)`.
    pub fn variance(&self) -> f64 {
        self.transmission / (PI * PI) * self.ratio.ln()
    }
}

/// `λ*` with `sin(λ*/2) = √D sin(λ/2)`, on the principal branch after
/// reducing `λ` to `[-π, π]`.
pub fn effective_counting_field(transmission: f64, lambda: f64) -> f64 {
    let l = wrap_to_pi(lambda);
    let s = (transmission.sqrt() * (0.5 * l).sin()).clamp(-1.0, 1.0);
    2.0 * s.asin()
}

fn wrap_to_pi(lambda: f64) -> f64 {
    if (-PI..=PI).contains(&lambda) {
        return lambda;
    }
    let w = (lambda + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// `χ(λ) = exp(-λ*² ln(Δt/τ) / (2π²))`.
pub fn qpc_switch_chi(p: &QpcSwitchParams, lambda: f64) -> Complex64 {
    let ls = effective_counting_field(p.transmission, lambda);
    Complex64::new((-ls * ls * p.ratio.ln() / (2.0 * PI * PI)).exp(), 0.0)
}

/// Smallest trapezoid grid used to invert χ.
pub const QPC_MIN_GRID: usize = 1 << 12;
/// Grid doubling stops once `S_m` moves less than this.
pub const QPC_CONVERGENCE: f64 = 1e-6;
/// Probabilities below this end the support.
pub const QPC_TAIL_CUTOFF: f64 = 1e-16;
const QPC_MAX_GRID: usize = 1 << 20;

/// Distribution of transferred charge from trapezoid inversion of the
/// switch χ on `grid` points of `[-π, π]`. Returns `(n_min, p)`.
///
/// The support is grown outwards from `n = 0` until `p_n` drops below
/// [`QPC_TAIL_CUTOFF`]; values past that point (including the small
/// oscillating tail produced by the kink of χ at `λ = ±π` when `D = 1`)
/// are discarded and the rest renormalized.
pub fn qpc_switch_distribution(p: &QpcSwitchParams, grid: usize) -> Result<(i64, Vec<f64>)> {
    let step = 2.0 * PI / grid as f64;
    let samples: Vec<(f64, f64)> = (0..grid)
        .map(|k| {
            let l = -PI + step * k as f64;
            (l, qpc_switch_chi(p, l).re)
        })
        .collect();
    // χ is real and even, so p_n = (1/M) Σ χ(λ_k) cos(λ_k n).
    let coefficient = |n: i64| -> f64 {
        samples.iter().map(|&(l, c)| c * (l * n as f64).cos()).sum::<f64>() / grid as f64
    };
    let half = (grid / 2) as i64;
    let mut upper = vec![coefficient(0)];
    loop {
        let n = upper.len() as i64;
        if n >= half {
            return Err(Error::Numerical(format!(
                "charge distribution tail above {QPC_TAIL_CUTOFF:e} at the grid edge (M = {grid})"
            )));
        }
        let v = coefficient(n);
        if v < QPC_TAIL_CUTOFF {
            break;
        }
        upper.push(v);
    }
    // Symmetric in n.
    let mut p: Vec<f64> = upper[1..].iter().rev().copied().collect();
    p.extend_from_slice(&upper);
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    Ok((-(upper.len() as i64 - 1), p))
}

/// Measurement entropy of the switch by grid-doubled Fourier inversion.
pub fn qpc_switch_measurement_entropy(p: &QpcSwitchParams) -> Result<f64> {
    let mut grid = QPC_MIN_GRID;
    let mut prev = fcs::shannon(&qpc_switch_distribution(p, grid)?.1);
    while grid < QPC_MAX_GRID {
        grid *= 2;
        let next = fcs::shannon(&qpc_switch_distribution(p, grid)?.1);
        if (next - prev).abs() < QPC_CONVERGENCE {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "measurement entropy not converged at M = {QPC_MAX_GRID}"
    )))
}

/// Switched point contact: `C_2 = (D/π²) ln(Δt/τ)`, `S = (π²/3) C_2`, and
/// `S_m` from numerical inversion of χ.
pub fn qpc_switch_report(p: &QpcSwitchParams) -> Result<AnalyticReport> {
    let c_2 = p.variance();
    let s = PI * PI / 3.0 * c_2;
    let s_m = if p.transmission == 0.0 {
        0.0
    } else {
        qpc_switch_measurement_entropy(p)?
    };
    Ok(AnalyticReport {
        report: EntropyReport::assemble(s, 0.0, c_2, s_m)?,
        s_m_asymptotic: gaussian_entropy(c_2),
        note: None,
    })
}

/// Exact binomial distribution of `n` successes out of `attempts`.
pub fn binomial_distribution(attempts: u64, transmission: f64) -> Result<Vec<f64>> {
    let b = Binomial::new(transmission, attempts)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((0..=attempts).map(|n| b.pmf(n)).collect())
}

/// Voltage-biased contact: `N` independent attempts with success
/// probability `D`. `S = N h(D)` with `h` the binary entropy.
pub fn binomial_report(attempts: u64, transmission: f64) -> Result<AnalyticReport> {
    if attempts == 0 {
        return Err(Error::InvalidParameter("need at least one attempt".into()));
    }
    if !(0.0..=1.0).contains(&transmission) {
        return Err(Error::InvalidParameter(format!(
            "transmission {transmission} outside [0, 1]"
        )));
    }
    let n = attempts as f64;
    let s_m = fcs::shannon(&binomial_distribution(attempts, transmission)?);
    let s = n * binary_entropy(transmission);
    let c_2 = n * transmission * (1.0 - transmission);
    Ok(AnalyticReport {
        report: EntropyReport::assemble(s, n * transmission, c_2, s_m)?,
        s_m_asymptotic: gaussian_entropy(c_2),
        note: None,
    })
}

pub const LUTTINGER_NOTE: &str = "C_2 = (g/2π) ln(k_F L) as given for the bosonized liquid; \
     at g = 1 this slope (1/2π) differs from the free-fermion lattice value 1/π²";

/// Luttinger liquid with interaction parameter `g` on a region with
/// `k_F L = kfl`. The charge distribution is Gaussian, so `S_m` is the
/// maximum entropy of an integer variable with variance `C_2`,
/// `½ ln[2πe (C_2 + 1/12)]`. `S_A` is the `c = 1` value `⅓ ln(k_F L)`.
pub fn luttinger_report(g: f64, kfl: f64) -> Result<AnalyticReport> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidParameter(format!("g = {g} must be positive")));
    }
    if !(kfl >= 1.0) || !kfl.is_finite() {
        return Err(Error::InvalidParameter(format!("k_F L = {kfl} must be at least 1")));
    }
    let c_1 = kfl / PI;
    let c_2 = g / (2.0 * PI) * kfl.ln();
    let s_m = fcs::gaussian_bound(c_2)?;
    Ok(AnalyticReport {
        report: EntropyReport::assemble(kfl.ln() / 3.0, c_1, c_2, s_m)?,
        s_m_asymptotic: gaussian_entropy(c_2),
        note: Some(LUTTINGER_NOTE),
    })
}

/// `χ_Lutt(λ) = exp(iλ k_F L/π - g λ² ln(k_F L) / (4π))`.
pub fn luttinger_chi(g: f64, kfl: f64, lambda: f64) -> Complex64 {
    Complex64::new(-g * lambda * lambda / (4.0 * PI) * kfl.ln(), lambda * kfl / PI).exp()
}
