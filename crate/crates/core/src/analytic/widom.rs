//! Widom asymptotics for `Tr f(P_Γ P_{LA} P_Γ)`:
//! `c_1 f(1) L^d + c_2 U(f) L^{d-1} ln L`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfmt::serialize_f64;

/// Fewest Gauss-Legendre nodes accepted for `U(f)`.
pub const MIN_U_NODES: usize = 200;

/// Shape of a region in real or momentum space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Interval { length: f64 },
    Rectangle { width: f64, height: f64 },
}

impl Geometry {
    fn dimension(&self) -> usize {
        match self {
            Geometry::Interval { .. } => 1,
            Geometry::Rectangle { .. } => 2,
        }
    }

    fn volume(&self) -> f64 {
        match *self {
            Geometry::Interval { length } => length,
            Geometry::Rectangle { width, height } => width * height,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            Geometry::Interval { length } => length >= 0.0 && length.is_finite(),
            Geometry::Rectangle { width, height } => {
                width >= 0.0 && height >= 0.0 && width.is_finite() && height.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedGeometry(format!("{self:?} has a negative or non-finite side")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidomSpec {
    pub d: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub c1: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub c2: f64,
}

impl WidomSpec {
    /// `ln χ(λ) ≈ iλ c_1 L^d - (λ²/2) c_2 L^{d-1} ln L`.
    pub fn log_chi(&self, lambda: f64, scale: f64) -> Complex64 {
        let d = self.d as i32;
        Complex64::new(
            -0.5 * lambda * lambda * self.variance(scale),
            lambda * self.c1 * scale.powi(d),
        )
    }

    /// Predicted number variance `c_2 L^{d-1} ln L`.
    pub fn variance(&self, scale: f64) -> f64 {
        self.c2 * scale.powi(self.d as i32 - 1) * scale.ln()
    }
}

/// `c_1 = |A||Γ| / (2π)^d` and
/// `c_2 = (2π)^{-(d+1)} ∫_{∂A} ∫_{∂Γ} |n_x · n_p| dS_x dS_p`.
///
/// The boundary integral is taken without a `ln 2` prefactor: with natural
/// logarithms that is the normalization which reproduces the sine-kernel
/// variance slope `1/π²` in one dimension.
pub fn widom_coefficients(region: Geometry, sea: Geometry, d: usize) -> Result<WidomSpec> {
    region.check()?;
    sea.check()?;
    if !(1..=2).contains(&d) || region.dimension() != d || sea.dimension() != d {
        return Err(Error::UnsupportedGeometry(format!(
            "need two intervals (d = 1) or two rectangles (d = 2), got {region:?}, {sea:?}, d = {d}"
        )));
    }
    let two_pi = 2.0 * PI;
    let c1 = region.volume() * sea.volume() / two_pi.powi(d as i32);
    let boundary = match (region, sea) {
        // Two endpoints each, normals ±1.
        (Geometry::Interval { length: a }, Geometry::Interval { length: g }) => {
            if a > 0.0 && g > 0.0 {
                4.0
            } else {
                0.0
            }
        }
        // Sides normal to x pair with sides normal to x, likewise for y;
        // perpendicular pairs contribute nothing.
        (
            Geometry::Rectangle { width: aw, height: ah },
            Geometry::Rectangle { width: gw, height: gh },
        ) => 4.0 * (ah * gh + aw * gw),
        _ => unreachable!(),
    };
    Ok(WidomSpec {
        d,
        c1,
        c2: boundary / two_pi.powi(d as i32 + 1),
    })
}

/// `Re ∫_0^1 (f(t) - t f(1)) / (t(1-t)) dt` by Gauss-Legendre quadrature.
/// The nodes are interior, so the removable endpoint singularities are
/// never evaluated. `f` must vanish at 0.
pub fn widom_u<F>(f: F, nodes: usize) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    if nodes < MIN_U_NODES {
        return Err(Error::InvalidParameter(format!(
            "U(f) needs at least {MIN_U_NODES} nodes, got {nodes}"
        )));
    }
    let f1 = f(1.0);
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("nodes > 0"));
    let value = rule.integrate(0.0, 1.0, |t| ((f(t) - t * f1) / (t * (1.0 - t))).re);
    if !value.is_finite() {
        return Err(Error::Numerical("U(f) quadrature produced a non-finite value".into()));
    }
    Ok(value)
}

/// `U(f)` for the counting function `f(t) = ln(1 + t(e^{iλ} - 1))`, for
/// `|λ| < π`. At `λ = ±π` the chord passes through zero.
pub fn counting_function_u(lambda: f64, nodes: usize) -> Result<f64> {
    if !(lambda.abs() < PI) {
        return Err(Error::InvalidParameter(format!(
            "counting field λ = {lambda} must satisfy |λ| < π"
        )));
    }
    let z = Complex64::cis(lambda) - 1.0;
    widom_u(|t| (1.0 + t * z).ln(), nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_coefficients() {
        let w = widom_coefficients(Geometry::Interval { length: 1.0 }, Geometry::Interval { length: PI }, 1)
            .unwrap();
        assert_abs_diff_eq!(w.c1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.c2, 1.0 / (PI * PI), epsilon = 1e-16);

        let empty = widom_coefficients(Geometry::Interval { length: 3.0 }, Geometry::Interval { length: 0.0 }, 1)
            .unwrap();
        assert_eq!(empty.c1, 0.0);
    }

    #[test]
    fn square_coefficients() {
        let w = widom_coefficients(
            Geometry::Rectangle { width: 1.0, height: 1.0 },
            Geometry::Rectangle { width: PI, height: PI },
            2,
        )
        .unwrap();
        assert_abs_diff_eq!(w.c1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(w.c2, 1.0 / (PI * PI), epsilon = 1e-16);
    }

    #[test]
    fn rectangle_boundary_integral_by_sampling() {
        // Brute-force the double boundary integral over sampled side points.
        let (aw, ah, gw, gh) = (1.3, 0.6, 2.0, 0.9);
        let sides = |w: f64, h: f64| -> Vec<([f64; 2], f64)> {
            vec![([1.0, 0.0], h), ([-1.0, 0.0], h), ([0.0, 1.0], w), ([0.0, -1.0], w)]
        };
        let samples = 50;
        let mut total = 0.0;
        for (na, la) in sides(aw, ah) {
            for (ng, lg) in sides(gw, gh) {
                for _ in 0..samples {
                    for _ in 0..samples {
                        let dot = (na[0] * ng[0] + na[1] * ng[1]).abs();
                        total += dot * (la / samples as f64) * (lg / samples as f64);
                    }
                }
            }
        }
        let w = widom_coefficients(
            Geometry::Rectangle { width: aw, height: ah },
            Geometry::Rectangle { width: gw, height: gh },
            2,
        )
        .unwrap();
        assert_abs_diff_eq!(w.c2, total / (2.0 * PI).powi(3), epsilon = 1e-12);
    }

    #[test]
    fn geometry_errors() {
        let i = Geometry::Interval { length: 1.0 };
        let r = Geometry::Rectangle { width: 1.0, height: 1.0 };
        assert!(widom_coefficients(i, r, 1).is_err());
        assert!(widom_coefficients(r, r, 1).is_err());
        assert!(widom_coefficients(i, i, 3).is_err());
        assert!(widom_coefficients(Geometry::Interval { length: -1.0 }, i, 1).is_err());
    }

    #[test]
    fn counting_function_examples() {
        assert_abs_diff_eq!(counting_function_u(PI / 2.0, 200).unwrap(), -PI * PI / 8.0, epsilon = 1e-8);
        assert_abs_diff_eq!(counting_function_u(0.0, 200).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(counting_function_u(1.0, 200).unwrap(), -0.5, epsilon = 1e-8);
        assert!(counting_function_u(PI, 200).is_err());
        assert!(counting_function_u(-PI, 200).is_err());
        assert!(counting_function_u(1.0, 50).is_err());
    }

    #[test]
    fn user_function() {
        // f(t) = t²: integrand (t² - t)/(t(1-t)) = -1.
        let u = widom_u(|t| Complex64::new(t * t, 0.0), 200).unwrap();
        assert_abs_diff_eq!(u, -1.0, epsilon = 1e-13);
    }

    #[test]
    fn log_chi_prediction() {
        let w = WidomSpec { d: 1, c1: 0.5, c2: 1.0 / (PI * PI) };
        let z = w.log_chi(1.0, 100.0);
        assert_abs_diff_eq!(z.im, 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.re, -0.5 * 100f64.ln() / (PI * PI), epsilon = 1e-14);
    }
}
