//! One-body correlation matrices of Fermi seas restricted to a region.
//!
//! A Fermi sea filling the momentum domain Γ has correlation function
//! `C(x, y) = <a†_y a_x> = ∫_Γ e^{ik(x-y)} dk / (2π)^d`. Restricting `x, y` to a
//! real-space region A gives the matrix `P_A P_Γ P_A` whose spectrum controls
//! every entropy and counting quantity downstream.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance, `max |C - C†|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Sites of a lattice region. The coordinate arity fixes the dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sites {
    Line(Vec<i64>),
    Plane(Vec<(i64, i64)>),
}

/// Region A: a non-empty set of distinct lattice sites together with the
/// linear size `L` used when it is part of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSpec {
    sites: Sites,
    scale: usize,
}

impl RegionSpec {
    pub fn line(sites: Vec<i64>, scale: usize) -> Result<Self> {
        check_distinct(sites.iter())?;
        Self::finish(Sites::Line(sites), scale)
    }

    pub fn plane(sites: Vec<(i64, i64)>, scale: usize) -> Result<Self> {
        check_distinct(sites.iter())?;
        Self::finish(Sites::Plane(sites), scale)
    }

    /// Sites `0..len` of a chain.
    pub fn interval(len: usize) -> Result<Self> {
        Self::line((0..len as i64).collect(), len)
    }

    /// An `len × len` block of the square lattice, row-major.
    pub fn square(len: usize) -> Result<Self> {
        let n = len as i64;
        Self::plane(
            (0..n).flat_map(|y| (0..n).map(move |x| (x, y))).collect(),
            len,
        )
    }

    fn finish(sites: Sites, scale: usize) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidRegion("scale must be positive".into()));
        }
        Ok(Self { sites, scale })
    }

    pub fn dimension(&self) -> usize {
        match self.sites {
            Sites::Line(_) => 1,
            Sites::Plane(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match &self.sites {
            Sites::Line(s) => s.len(),
            Sites::Plane(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn scale(&self) -> usize {
        self.scale
    }
}

fn check_distinct<'a, T>(sites: impl ExactSizeIterator<Item = &'a T>) -> Result<()>
where
    T: std::hash::Hash + Eq + 'a,
{
    if sites.len() == 0 {
        return Err(Error::InvalidRegion("region has no sites".into()));
    }
    let mut seen = HashSet::new();
    for s in sites {
        if !seen.insert(s) {
            return Err(Error::InvalidRegion("duplicate site".into()));
        }
    }
    Ok(())
}

/// Momentum-space domain Γ of the filled Fermi sea.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FermiSeaSpec {
    /// Chain with `|k| ≤ k_F`.
    SineKernel1D { k_f: f64 },
    /// Square lattice with Γ = [-k_F, k_F]².
    SquareSea2D { k_f: f64 },
    /// Tight-binding ring of `n_sites` sites with the `n_filled` lowest-|k|
    /// plane waves occupied.
    FiniteRing { n_sites: usize, n_filled: usize },
}

impl FermiSeaSpec {
    pub fn dimension(&self) -> usize {
        match self {
            FermiSeaSpec::SquareSea2D { .. } => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FermiSeaSpec::SineKernel1D { k_f } | FermiSeaSpec::SquareSea2D { k_f } => {
                check_kf(k_f)
            }
            FermiSeaSpec::FiniteRing { n_sites, n_filled } => {
                if n_sites == 0 {
                    return Err(Error::InvalidParameter("ring needs at least one site".into()));
                }
                if n_filled > n_sites {
                    return Err(Error::InvalidParameter(format!(
                        "n_filled = {n_filled} exceeds n_sites = {n_sites}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Correlation matrix of this sea restricted to `region`.
    pub fn correlation(&self, region: &RegionSpec) -> Result<CorrelationMatrix> {
        match *self {
            FermiSeaSpec::SineKernel1D { k_f } => sine_kernel_1d(region, k_f),
            FermiSeaSpec::SquareSea2D { k_f } => square_sea_2d(region, k_f),
            FermiSeaSpec::FiniteRing { n_sites, n_filled } => finite_ring(n_sites, n_filled, region),
        }
    }
}

fn check_kf(k_f: f64) -> Result<()> {
    if !(k_f > 0.0 && k_f <= PI) {
        return Err(Error::InvalidParameter(format!("k_F = {k_f} outside (0, π]")));
    }
    Ok(())
}

/// Hermitian one-body matrix `C[i][j] = <a†_j a_i>` on the modes of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    /// Wraps `entries` after checking it is square and Hermitian. The
    /// spectral range is checked later, when the spectrum is computed.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidCorrelation(format!(
                "expected a non-empty square matrix, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let dev = hermitian_deviation(&entries);
        if !(dev < HERMITIAN_TOL) {
            return Err(Error::InvalidCorrelation(format!(
                "not Hermitian: max |C - C†| = {dev:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Principal submatrix on the listed modes.
    pub fn restrict(&self, modes: &[usize]) -> Result<Self> {
        if let Some(&bad) = modes.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::InvalidRegion(format!("mode {bad} out of range")));
        }
        let sub = DMatrix::from_fn(modes.len(), modes.len(), |i, j| {
            self.entries[(modes[i], modes[j])]
        });
        Self::new(sub)
    }

    /// Real part when every imaginary part vanishes exactly.
    pub(crate) fn as_real(&self) -> Option<DMatrix<f64>> {
        if self.entries.iter().all(|z| z.im == 0.0) {
            Some(self.entries.map(|z| z.re))
        } else {
            None
        }
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Translation-invariant sine-kernel factor `sin(k_F r) / (π r)`, with the
/// `r = 0` limit `k_F / π`.
pub fn sine_factor(k_f: f64, r: i64) -> f64 {
    if r == 0 {
        k_f / PI
    } else {
        let r = r as f64;
        (k_f * r).sin() / (PI * r)
    }
}

/// Chain kernel `C[i][j] = sin(k_F (x_i - x_j)) / (π (x_i - x_j))`.
pub fn sine_kernel_1d(region: &RegionSpec, k_f: f64) -> Result<CorrelationMatrix> {
    check_kf(k_f)?;
    let Sites::Line(xs) = region.sites() else {
        return Err(Error::InvalidRegion("sine kernel needs a 1d region".into()));
    };
    // Tabulate by displacement so the O(m²) fill does no trig.
    let (lo, hi) = min_max(xs.iter().copied());
    let span = hi - lo;
    let table: Vec<f64> = (0..=span).map(|r| sine_factor(k_f, r)).collect();
    let m = xs.len();
    let entries = DMatrix::from_fn(m, m, |i, j| {
        let r = (xs[i] - xs[j]).unsigned_abs() as usize;
        table[r]
    });
    CorrelationMatrix::from_real(entries)
}

/// Square Fermi sea `[-k_F, k_F]²`: the kernel factorizes into a product of
/// chain kernels along each axis.
pub fn square_sea_2d(region: &RegionSpec, k_f: f64) -> Result<CorrelationMatrix> {
    check_kf(k_f)?;
    let Sites::Plane(ps) = region.sites() else {
        return Err(Error::InvalidRegion("square sea needs a 2d region".into()));
    };
    let (xlo, xhi) = min_max(ps.iter().map(|p| p.0));
    let (ylo, yhi) = min_max(ps.iter().map(|p| p.1));
    let span = (xhi - xlo).max(yhi - ylo);
    let table: Vec<f64> = (0..=span).map(|r| sine_factor(k_f, r)).collect();
    let m = ps.len();
    let entries = DMatrix::from_fn(m, m, |i, j| {
        let dx = (ps[i].0 - ps[j].0).unsigned_abs() as usize;
        let dy = (ps[i].1 - ps[j].1).unsigned_abs() as usize;
        table[dx] * table[dy]
    });
    CorrelationMatrix::from_real(entries)
}

/// Integer momenta `q` (with `k = 2πq / n_sites`) of the `n_filled` lowest
/// states of a ring. Ties in |k| are broken by taking `+|k|` before `-|k|`.
pub fn ring_occupied_momenta(n_sites: usize, n_filled: usize) -> Vec<i64> {
    let n = n_sites as i64;
    // Brillouin zone (-n/2, n/2].
    let mut qs: Vec<i64> = (-(n - 1) / 2..=n / 2).collect();
    qs.sort_by_key(|&q| (q.abs(), q < 0));
    qs.truncate(n_filled);
    qs
}

/// `C[i][j] = (1/n) Σ_{q occupied} e^{i 2π q (x_i - x_j) / n}` on a ring.
pub fn finite_ring(n_sites: usize, n_filled: usize, region: &RegionSpec) -> Result<CorrelationMatrix> {
    FermiSeaSpec::FiniteRing { n_sites, n_filled }.validate()?;
    let Sites::Line(xs) = region.sites() else {
        return Err(Error::InvalidRegion("ring kernel needs a 1d region".into()));
    };
    if let Some(x) = xs.iter().find(|&&x| x < 0 || x >= n_sites as i64) {
        return Err(Error::InvalidRegion(format!(
            "site {x} outside ring 0..{n_sites}"
        )));
    }
    let qs = ring_occupied_momenta(n_sites, n_filled);
    let n = n_sites as i64;
    // Only displacements mod n matter.
    let table: Vec<Complex64> = (0..n)
        .map(|r| {
            qs.iter()
                .map(|&q| {
                    let k = 2.0 * PI * ((q * r).rem_euclid(n)) as f64 / n as f64;
                    Complex64::from_polar(1.0, k)
                })
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let m = xs.len();
    let mut entries = DMatrix::from_fn(m, m, |i, j| table[(xs[i] - xs[j]).rem_euclid(n) as usize]);
    // Symmetrize so round-off in the phase sums cannot break Hermiticity.
    for i in 0..m {
        entries[(i, i)].im = 0.0;
        for j in i + 1..m {
            let avg = 0.5 * (entries[(i, j)] + entries[(j, i)].conj());
            entries[(i, j)] = avg;
            entries[(j, i)] = avg.conj();
        }
    }
    CorrelationMatrix::new(entries)
}

fn min_max(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sine_kernel_entries() {
        let region = RegionSpec::interval(5).unwrap();
        let c = sine_kernel_1d(&region, FRAC_PI_2).unwrap();
        let e = c.entries();
        for i in 0..5 {
            assert_eq!(e[(i, i)].re, 0.5);
        }
        assert_abs_diff_eq!(e[(0, 2)].re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(e[(3, 1)].re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(e[(0, 1)].re, 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(4, 3)].re, 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn sine_kernel_trace_is_mean_density() {
        let k_f = 0.3 * PI;
        let region = RegionSpec::interval(37).unwrap();
        let c = sine_kernel_1d(&region, k_f).unwrap();
        assert_abs_diff_eq!(c.trace(), 37.0 * k_f / PI, epsilon = 1e-12);
    }

    #[test]
    fn sine_kernel_rejects_bad_input() {
        let line = RegionSpec::interval(3).unwrap();
        assert!(sine_kernel_1d(&line, 0.0).is_err());
        assert!(sine_kernel_1d(&line, 3.2).is_err());
        assert!(sine_kernel_1d(&line, f64::NAN).is_err());
        let sq = RegionSpec::square(2).unwrap();
        assert!(matches!(sine_kernel_1d(&sq, 1.0), Err(Error::InvalidRegion(_))));
        assert!(sine_kernel_1d(&line, PI).is_ok());
    }

    #[test]
    fn square_sea_entries() {
        let region = RegionSpec::plane(vec![(0, 0), (2, 0), (1, 1), (3, 5)], 4).unwrap();
        let c = square_sea_2d(&region, FRAC_PI_2).unwrap();
        let e = c.entries();
        assert_eq!(e[(0, 0)].re, 0.25);
        assert_abs_diff_eq!(e[(0, 1)].re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(e[(0, 2)].re, 1.0 / (PI * PI), epsilon = 1e-15);
        assert!(matches!(
            square_sea_2d(&RegionSpec::interval(3).unwrap(), 1.0),
            Err(Error::InvalidRegion(_))
        ));
    }

    #[test]
    fn region_validation() {
        assert!(RegionSpec::line(vec![], 1).is_err());
        assert!(RegionSpec::line(vec![1, 2, 1], 3).is_err());
        assert!(RegionSpec::plane(vec![(0, 0), (0, 0)], 1).is_err());
        assert!(RegionSpec::line(vec![0], 0).is_err());
        let sq = RegionSpec::square(3).unwrap();
        assert_eq!(sq.len(), 9);
        assert_eq!(sq.dimension(), 2);
    }

    #[test]
    fn ring_tie_break() {
        assert_eq!(ring_occupied_momenta(8, 4), vec![0, 1, -1, 2]);
        assert_eq!(ring_occupied_momenta(4, 4), vec![0, 1, -1, 2]);
        assert_eq!(ring_occupied_momenta(5, 5), vec![0, 1, -1, 2, -2]);
        assert!(ring_occupied_momenta(6, 0).is_empty());
    }

    #[test]
    fn ring_entries() {
        let region = RegionSpec::line(vec![0, 1, 2, 3], 4).unwrap();
        let c = finite_ring(4, 2, &region).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(c.entries()[(i, i)].re, 0.5, epsilon = 1e-15);
        }
        let empty = finite_ring(4, 0, &region).unwrap();
        assert!(empty.entries().iter().all(|z| z.norm() == 0.0));

        // q ∈ {0, 1, -1, 2}, k = 2πq/8, displacement -1.
        let pair = RegionSpec::line(vec![0, 1], 2).unwrap();
        let c = finite_ring(8, 4, &pair).unwrap();
        let expected = Complex64::new((1.0 + 2.0_f64.sqrt()) / 8.0, -1.0 / 8.0);
        assert_abs_diff_eq!((c.entries()[(0, 1)] - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ring_rejects_bad_input() {
        let region = RegionSpec::line(vec![0, 1], 2).unwrap();
        assert!(finite_ring(4, 5, &region).is_err());
        let outside = RegionSpec::line(vec![0, 4], 2).unwrap();
        assert!(matches!(finite_ring(4, 2, &outside), Err(Error::InvalidRegion(_))));
    }

    #[test]
    fn large_ring_approaches_sine_kernel() {
        let region = RegionSpec::interval(9).unwrap();
        let ring = finite_ring(4096, 2048, &region).unwrap();
        let sine = sine_kernel_1d(&region, FRAC_PI_2).unwrap();
        let diff = (ring.entries() - sine.entries()).map(|z| z.norm()).max();
        assert!(diff < 1e-3, "max deviation {diff}");
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.2, 0.5]);
        assert!(CorrelationMatrix::from_real(m).is_err());
        let nan = DMatrix::from_element(1, 1, f64::NAN);
        assert!(CorrelationMatrix::from_real(nan).is_err());
    }
}
