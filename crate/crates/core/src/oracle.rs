//! Brute-force many-body engine on a handful of fermionic modes.
//!
//! States are amplitude vectors over the `2^m` occupation bitstrings, with
//! mode 0 the least significant bit. The basis state with occupied modes
//! `i_1 < i_2 < ... < i_N` is `a†_{i_1} a†_{i_2} ... a†_{i_N} |0>`, so
//! `a†_i` picks up the sign `(-1)^{#occupied modes below i}`.
//!
//! Region A is always the block of low modes `0..m_A`. With that ordering
//! the fermionic partial trace over B is the plain tensor-product partial
//! trace, and for number-conserving states the result is basis independent.
//!
//! Nothing here uses the Gaussian machinery of [`crate::spectrum`] or
//! [`crate::fcs`]; it exists to check them.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fcs::{self, ChargeDistribution};
use crate::kernel::CorrelationMatrix;
use crate::spectrum;

pub const MAX_MODES: usize = 14;
/// Allowed deviation of the state norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Gram determinants below this mean the orbitals are dependent.
pub const GRAM_TOL: f64 = 1e-12;
/// Largest density-matrix element allowed between different sectors.
pub const LEAKAGE_TOL: f64 = 1e-12;
/// Sector weights at or below this carry no entropy.
const EMPTY_SECTOR: f64 = 1e-15;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn parity_below(bits: usize, mode: usize) -> f64 {
    if (bits & ((1 << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Pure state of `n_modes` fermionic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    amplitudes: Vec<Complex64>,
    fixed_n: Option<usize>,
}

impl FockState {
    pub fn new(n_modes: usize, amplitudes: Vec<Complex64>, fixed_n: Option<usize>) -> Result<Self> {
        check_modes(n_modes)?;
        if amplitudes.len() != 1 << n_modes {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for {n_modes} modes",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        if let Some(n) = fixed_n {
            let stray = amplitudes
                .iter()
                .enumerate()
                .filter(|(s, _)| s.count_ones() as usize != n)
                .map(|(_, a)| a.norm())
                .fold(0.0, f64::max);
            if stray > NORM_TOL {
                return Err(Error::NotNumberConserving { leakage: stray });
            }
        }
        Ok(Self {
            n_modes,
            amplitudes,
            fixed_n,
        })
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        check_modes(n_modes)?;
        let mut amplitudes = vec![ZERO; 1 << n_modes];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self::new(n_modes, amplitudes, Some(0))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn fixed_n(&self) -> Option<usize> {
        self.fixed_n
    }

    /// `<a†_j a_i>` evaluated directly on the amplitudes.
    pub fn correlation_matrix(&self) -> Result<CorrelationMatrix> {
        let m = self.n_modes;
        let mut c = DMatrix::from_element(m, m, ZERO);
        for (s, &amp) in self.amplitudes.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            for i in (0..m).filter(|&i| s & (1 << i) != 0) {
                let s1 = s ^ (1 << i);
                let sign1 = parity_below(s, i);
                for j in (0..m).filter(|&j| s1 & (1 << j) == 0) {
                    let s2 = s1 | (1 << j);
                    let sign2 = parity_below(s1, j);
                    c[(i, j)] += self.amplitudes[s2].conj() * amp * (sign1 * sign2);
                }
            }
        }
        CorrelationMatrix::new(c)
    }

    /// Relabels mode `i` as `perm[i]`, with the reordering sign of each
    /// basis state.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let m = self.n_modes;
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the modes".into()));
        }
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (s, &amp) in self.amplitudes.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let labels: Vec<usize> = (0..m).filter(|&i| s & (1 << i) != 0).map(|i| perm[i]).collect();
            let inversions = labels
                .iter()
                .enumerate()
                .map(|(k, a)| labels[k + 1..].iter().filter(|&b| b < a).count())
                .sum::<usize>();
            let target = labels.iter().fold(0, |acc, &l| acc | (1 << l));
            out[target] = if inversions % 2 == 0 { amp } else { -amp };
        }
        Self::new(m, out, self.fixed_n)
    }

    /// Joint probabilities `p[n_A][n_B]` of the particle numbers in A = modes
    /// `0..m_a` and B = the rest.
    pub fn joint_number_distribution(&self, m_a: usize) -> Result<Vec<Vec<f64>>> {
        self.check_cut(m_a)?;
        let m_b = self.n_modes - m_a;
        let mut p = vec![vec![0.0; m_b + 1]; m_a + 1];
        let mask = (1 << m_a) - 1;
        for (s, a) in self.amplitudes.iter().enumerate() {
            let n_a = (s & mask).count_ones() as usize;
            let n_b = (s >> m_a).count_ones() as usize;
            p[n_a][n_b] += a.norm_sqr();
        }
        Ok(p)
    }

    fn check_cut(&self, m_a: usize) -> Result<()> {
        if m_a == 0 || m_a >= self.n_modes {
            return Err(Error::InvalidRegion(format!(
                "region A must hold 1..{} modes, got {m_a}",
                self.n_modes - 1
            )));
        }
        Ok(())
    }

    fn apply_creation(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (s, &amp) in self.amplitudes.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            for (i, &c) in coeffs.iter().enumerate() {
                if s & (1 << i) == 0 && c != ZERO {
                    out[s | (1 << i)] += c * amp * parity_below(s, i);
                }
            }
        }
        out
    }
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 0 || n_modes > MAX_MODES {
        return Err(Error::InvalidParameter(format!(
            "oracle supports 1..={MAX_MODES} modes, got {n_modes}"
        )));
    }
    Ok(())
}

/// Normalized Slater determinant `b†_1 b†_2 ... b†_N |0>` of the orbitals
/// stored as the columns of `orbitals` (an `m × N` matrix).
pub fn slater_state(orbitals: &DMatrix<Complex64>) -> Result<FockState> {
    let (m, n) = orbitals.shape();
    check_modes(m)?;
    if n > m {
        return Err(Error::InvalidParameter(format!("{n} orbitals in {m} modes")));
    }
    let mut phi = orbitals.clone();
    for mut col in phi.column_iter_mut() {
        let norm = col.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DependentOrbitals { gram: 0.0 });
        }
        col /= Complex64::new(norm, 0.0);
    }
    let gram = (phi.adjoint() * &phi).determinant().re;
    if !(gram >= GRAM_TOL) {
        return Err(Error::DependentOrbitals { gram });
    }

    let mut state = FockState {
        n_modes: m,
        amplitudes: FockState::vacuum(m)?.amplitudes,
        fixed_n: Some(0),
    };
    for k in (0..n).rev() {
        let coeffs: Vec<Complex64> = phi.column(k).iter().copied().collect();
        state.amplitudes = state.apply_creation(&coeffs);
    }
    let norm = state.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    state.amplitudes.iter_mut().for_each(|a| *a /= norm);
    FockState::new(m, state.amplitudes, Some(n))
}

/// One-body matrix `Φ (Φ†Φ)^{-1} Φ†` of the Slater state spanned by the
/// orbital columns; equal to `Φ Φ†` for orthonormal orbitals.
pub fn one_body_matrix(orbitals: &DMatrix<Complex64>) -> Result<CorrelationMatrix> {
    let gram_inv = (orbitals.adjoint() * orbitals)
        .try_inverse()
        .ok_or(Error::DependentOrbitals { gram: 0.0 })?;
    let c = orbitals * gram_inv * orbitals.adjoint();
    // Exact Hermitian projection of round-off.
    CorrelationMatrix::new((&c + c.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Density matrix of region A = modes `0..m_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    m_a: usize,
    matrix: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann(&self.eigenvalues())
    }
}

/// `ρ_A = Tr_B |ψ><ψ|` for A = modes `0..m_a`.
pub fn reduced_density_matrix(state: &FockState, m_a: usize) -> Result<ReducedDensityMatrix> {
    state.check_cut(m_a)?;
    let dim_a = 1 << m_a;
    let dim_b = 1 << (state.n_modes - m_a);
    // Column-major: psi[(a, b)] = amplitude of bitstring a | b << m_a.
    let psi = DMatrix::from_column_slice(dim_a, dim_b, &state.amplitudes);
    Ok(ReducedDensityMatrix {
        m_a,
        matrix: &psi * psi.adjoint(),
    })
}

/// Same as [`reduced_density_matrix`] but takes the region as a mode list,
/// which must be `0..m_a` in order.
pub fn reduced_density_matrix_modes(state: &FockState, modes: &[usize]) -> Result<ReducedDensityMatrix> {
    if modes.iter().enumerate().any(|(k, &i)| k != i) {
        return Err(Error::InvalidRegion(
            "region must be the contiguous low modes 0..m_A; permute the state first".into(),
        ));
    }
    reduced_density_matrix(state, modes.len())
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

fn von_neumann(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Sector weights `p_n` and entropies `S_n` of the normalized blocks
/// `Π_n ρ_A Π_n / p_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDecomposition {
    pub probabilities: ChargeDistribution,
    /// `None` for sectors with vanishing weight.
    pub sector_entropies: Vec<Option<f64>>,
}

/// Splits `ρ_A` into fixed-`N_A` blocks. Fails if `ρ_A` has weight between
/// different sectors or in sectors above the global particle number.
pub fn sector_decomposition(rho: &ReducedDensityMatrix, fixed_n: usize) -> Result<SectorDecomposition> {
    let dim = rho.matrix.nrows();
    let weight = |s: usize| s.count_ones() as usize;

    let mut leakage = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            if weight(i) != weight(j) {
                leakage = leakage.max(rho.matrix[(i, j)].norm());
            }
        }
    }
    if leakage > LEAKAGE_TOL {
        return Err(Error::NotNumberConserving { leakage });
    }

    let mut p = Vec::with_capacity(rho.m_a + 1);
    let mut sector_entropies = Vec::with_capacity(rho.m_a + 1);
    for n in 0..=rho.m_a {
        let idx: Vec<usize> = (0..dim).filter(|&s| weight(s) == n).collect();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| rho.matrix[(idx[a], idx[b])]);
        let p_n: f64 = block.diagonal().iter().map(|z| z.re).sum();
        if n > fixed_n && p_n > LEAKAGE_TOL {
            return Err(Error::NotNumberConserving { leakage: p_n });
        }
        p.push(p_n);
        sector_entropies.push(if p_n > EMPTY_SECTOR {
            let eig = hermitian_eigenvalues(&(block / Complex64::new(p_n, 0.0)));
            Some(von_neumann(&eig))
        } else {
            None
        });
    }
    Ok(SectorDecomposition {
        probabilities: ChargeDistribution::new(p)?,
        sector_entropies,
    })
}

/// `S_res = Σ_n p_n S_n`.
pub fn accessible_entropy_direct(dec: &SectorDecomposition) -> f64 {
    dec.probabilities
        .probabilities()
        .iter()
        .zip(&dec.sector_entropies)
        .filter_map(|(p, s)| s.map(|s| p * s))
        .sum()
}

/// Haar-random orthonormal frame of `n` orbitals in `m` modes.
pub fn random_orbitals<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, n.max(1), |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the column phases so the frame is Haar distributed.
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            col *= d / d.norm();
        }
    }
    q.columns(0, n).into_owned()
}

/// Slater state of a Haar-random frame, returned with its orbitals.
pub fn random_slater<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<(DMatrix<Complex64>, FockState)> {
    let orbitals = random_orbitals(m, n, rng);
    let state = slater_state(&orbitals)?;
    Ok((orbitals, state))
}

/// Generic (non-Gaussian) state with complex Gaussian amplitudes on the
/// Hamming-weight-`n` shell.
pub fn random_fixed_n<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<FockState> {
    check_modes(m)?;
    if n > m {
        return Err(Error::InvalidParameter(format!("{n} particles in {m} modes")));
    }
    let mut amps: Vec<Complex64> = (0..1usize << m)
        .map(|s| {
            if s.count_ones() as usize == n {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            } else {
                ZERO
            }
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    FockState::new(m, amps, Some(n))
}

/// Mode layout of the two-fermion example: the halves A and B of an
/// interval each carry an "up" mode (`e^{4πix/L}` restricted to the half)
/// and a "down" mode (the constant restricted to the half).
pub mod two_fermion {
    use super::*;

    pub const A_UP: usize = 0;
    pub const A_DOWN: usize = 1;
    pub const B_UP: usize = 2;
    pub const B_DOWN: usize = 3;
    pub const M_A: usize = 2;

    /// One fermion in each half: antisymmetrized but not entangled.
    pub fn psi1_orbitals() -> DMatrix<Complex64> {
        let mut phi = DMatrix::from_element(4, 2, ZERO);
        phi[(A_DOWN, 0)] = Complex64::new(1.0, 0.0);
        phi[(B_DOWN, 1)] = Complex64::new(1.0, 0.0);
        phi
    }

    /// Constant and `e^{4πix/L}` orbitals on the whole interval. Each splits
    /// evenly over the two halves, and the two restrictions to either half
    /// are orthogonal.
    pub fn psi2_orbitals() -> DMatrix<Complex64> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut phi = DMatrix::from_element(4, 2, ZERO);
        phi[(A_DOWN, 0)] = h;
        phi[(B_DOWN, 0)] = h;
        phi[(A_UP, 1)] = h;
        phi[(B_UP, 1)] = h;
        phi
    }

    pub fn psi1() -> Result<FockState> {
        slater_state(&psi1_orbitals())
    }

    pub fn psi2() -> Result<FockState> {
        slater_state(&psi2_orbitals())
    }
}

/// Entropies of one state computed through the brute-force path.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEntropies {
    pub s_a: f64,
    pub s_m: f64,
    pub s_res_direct: f64,
    pub decomposition: SectorDecomposition,
}

impl OracleEntropies {
    pub fn identity_error(&self) -> f64 {
        (self.s_res_direct - (self.s_a - self.s_m)).abs()
    }
}

pub fn oracle_entropies(state: &FockState, m_a: usize) -> Result<OracleEntropies> {
    let fixed_n = state
        .fixed_n()
        .ok_or_else(|| Error::InvalidParameter("state has no fixed particle number".into()))?;
    let rho = reduced_density_matrix(state, m_a)?;
    let decomposition = sector_decomposition(&rho, fixed_n)?;
    Ok(OracleEntropies {
        s_a: rho.entropy(),
        s_m: fcs::measurement_entropy(&decomposition.probabilities),
        s_res_direct: accessible_entropy_direct(&decomposition),
        decomposition,
    })
}

/// Outcome of a randomized identity check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct IdentityCheck {
    pub modes: usize,
    pub trials: usize,
    pub seed: u64,
    pub states_checked: usize,
    /// max |Σ p_n S_n - (S_A - S_m)| over all states.
    #[serde(serialize_with = "crate::numfmt::serialize_f64")]
    pub max_identity_error: f64,
    /// max |S_A(oracle) - S_A(spectrum)| over the Slater states.
    #[serde(serialize_with = "crate::numfmt::serialize_f64")]
    pub max_spectral_entropy_error: f64,
    /// max |p_n(oracle) - p_n(fcs)| over the Slater states.
    #[serde(serialize_with = "crate::numfmt::serialize_f64")]
    pub max_spectral_distribution_error: f64,
    pub sandwich_violations: usize,
}

/// Draws `trials` Haar-random Slater states and as many random fixed-N
/// states on `modes` modes, with A the lower half, and compares the direct
/// accessible entropy with `S_A - S_m`. Slater states are also compared
/// against the spectral route.
pub fn identity_check(modes: usize, trials: usize, seed: u64) -> Result<IdentityCheck> {
    if !(2..=MAX_MODES).contains(&modes) {
        return Err(Error::InvalidParameter(format!(
            "identity check needs 2..={MAX_MODES} modes, got {modes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m_a = modes / 2;
    let region: Vec<usize> = (0..m_a).collect();
    let mut out = IdentityCheck {
        modes,
        trials,
        seed,
        states_checked: 0,
        max_identity_error: 0.0,
        max_spectral_entropy_error: 0.0,
        max_spectral_distribution_error: 0.0,
        sandwich_violations: 0,
    };
    for _ in 0..trials {
        let n = rng.random_range(1..modes);
        let (orbitals, slater) = random_slater(modes, n, &mut rng)?;
        let generic = random_fixed_n(modes, n, &mut rng)?;

        let direct = oracle_entropies(&slater, m_a)?;
        let c_a = one_body_matrix(&orbitals)?.restrict(&region)?;
        let spec = spectrum::occupation_spectrum(&c_a)?;
        let report = spectrum::report_from_spectrum(&spec)?;
        let dist = fcs::charge_distribution(&spec)?;
        out.max_spectral_entropy_error = out
            .max_spectral_entropy_error
            .max((direct.s_a - report.s_a).abs());
        let p_err = direct
            .decomposition
            .probabilities
            .probabilities()
            .iter()
            .zip(dist.probabilities())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.max_spectral_distribution_error = out.max_spectral_distribution_error.max(p_err);
        if !report.sandwich_holds() {
            out.sandwich_violations += 1;
        }

        for e in [direct, oracle_entropies(&generic, m_a)?] {
            out.max_identity_error = out.max_identity_error.max(e.identity_error());
            out.states_checked += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis_orbitals(m: usize, modes: &[usize]) -> DMatrix<Complex64> {
        let mut phi = DMatrix::from_element(m, modes.len(), ZERO);
        for (k, &i) in modes.iter().enumerate() {
            phi[(i, k)] = c(1.0);
        }
        phi
    }

    #[test]
    fn slater_of_basis_orbitals() {
        let s = slater_state(&basis_orbitals(2, &[0])).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, c(1.0), ZERO, ZERO]);
        assert_eq!(s.fixed_n(), Some(1));
        let s = slater_state(&basis_orbitals(2, &[0, 1])).unwrap();
        assert_eq!(s.amplitudes()[0b11], c(1.0));
    }

    #[test]
    fn slater_sign_convention() {
        // b†_0 b†_1 with b_0 = a_1, b_1 = a_0 gives a†_1 a†_0 |0> = -|11>.
        let s = slater_state(&basis_orbitals(2, &[1, 0])).unwrap();
        assert_eq!(s.amplitudes()[0b11], c(-1.0));
    }

    #[test]
    fn dependent_orbitals_rejected() {
        let mut phi = DMatrix::from_element(3, 2, c(1.0));
        phi[(2, 1)] = c(1.0);
        assert!(matches!(slater_state(&phi), Err(Error::DependentOrbitals { .. })));
        let zero = DMatrix::from_element(3, 1, ZERO);
        assert!(slater_state(&zero).is_err());
        assert!(slater_state(&DMatrix::from_element(2, 3, c(1.0))).is_err());
    }

    #[test]
    fn non_orthonormal_orbitals_give_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (q, s) = random_slater(5, 2, &mut rng).unwrap();
        // Any invertible recombination spans the same subspace.
        let mix = DMatrix::from_row_slice(2, 2, &[c(2.0), Complex64::new(0.3, 0.1), c(0.0), c(0.5)]);
        let s2 = slater_state(&(&q * &mix)).unwrap();
        let overlap: Complex64 = s.amplitudes().iter().zip(s2.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        let c1 = one_body_matrix(&q).unwrap();
        let c2 = one_body_matrix(&(&q * mix)).unwrap();
        assert!((c1.entries() - c2.entries()).norm() < 1e-12);
    }

    #[test]
    fn psi2_amplitudes() {
        use two_fermion::*;
        let s = psi2().unwrap();
        let support = [
            (1 << A_DOWN) | (1 << A_UP),
            (1 << A_DOWN) | (1 << B_UP),
            (1 << B_DOWN) | (1 << A_UP),
            (1 << B_DOWN) | (1 << B_UP),
        ];
        for (bits, a) in s.amplitudes().iter().enumerate() {
            let want = if support.contains(&bits) { 0.25 } else { 0.0 };
            assert_abs_diff_eq!(a.norm_sqr(), want, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_fermion_reduced_states() {
        let r1 = reduced_density_matrix(&two_fermion::psi1().unwrap(), 2).unwrap();
        assert_abs_diff_eq!(r1.entropy(), 0.0, epsilon = 1e-14);

        let r2 = reduced_density_matrix(&two_fermion::psi2().unwrap(), 2).unwrap();
        for l in r2.eigenvalues() {
            assert_abs_diff_eq!(l, 0.25, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(r2.entropy(), 2.0 * LN_2, epsilon = 1e-14);

        let vac = reduced_density_matrix(&FockState::vacuum(4).unwrap(), 2).unwrap();
        assert_eq!(vac.matrix()[(0, 0)], c(1.0));
        assert_abs_diff_eq!(vac.entropy(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_fermion_sectors() {
        let dec = sector_decomposition(&reduced_density_matrix(&two_fermion::psi2().unwrap(), 2).unwrap(), 2)
            .unwrap();
        for (p, want) in dec.probabilities.probabilities().iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(dec.sector_entropies[0].unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dec.sector_entropies[1].unwrap(), LN_2, epsilon = 1e-14);
        assert_abs_diff_eq!(dec.sector_entropies[2].unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(accessible_entropy_direct(&dec), 0.5 * LN_2, epsilon = 1e-14);

        let dec = sector_decomposition(&reduced_density_matrix(&two_fermion::psi1().unwrap(), 2).unwrap(), 2)
            .unwrap();
        assert_abs_diff_eq!(dec.probabilities.probabilities()[1], 1.0, epsilon = 1e-15);
        assert_eq!(dec.sector_entropies[0], None);
        assert_abs_diff_eq!(dec.sector_entropies[1].unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(accessible_entropy_direct(&dec), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn leakage_is_detected() {
        // (|00> + |01>)/√2 on 2 modes: superposes N = 0 and N = 1.
        let h = c(FRAC_1_SQRT_2);
        let s = FockState::new(2, vec![h, h, ZERO, ZERO], None).unwrap();
        let rho = reduced_density_matrix(&s, 1).unwrap();
        assert!(matches!(
            sector_decomposition(&rho, 1),
            Err(Error::NotNumberConserving { .. })
        ));
        assert!(FockState::new(2, vec![h, h, ZERO, ZERO], Some(0)).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(FockState::new(2, vec![c(1.0); 3], None).is_err());
        assert!(FockState::new(2, vec![c(1.0), c(1.0), ZERO, ZERO], None).is_err());
        assert!(FockState::vacuum(15).is_err());
        let s = FockState::vacuum(3).unwrap();
        assert!(reduced_density_matrix(&s, 0).is_err());
        assert!(reduced_density_matrix(&s, 3).is_err());
        assert!(matches!(
            reduced_density_matrix_modes(&s, &[1, 2]),
            Err(Error::InvalidRegion(_))
        ));
        assert!(reduced_density_matrix_modes(&s, &[0, 1]).is_ok());
    }

    #[test]
    fn correlation_from_amplitudes_matches_orbitals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(4, 2), (6, 3), (7, 5)] {
            let (phi, s) = random_slater(m, n, &mut rng).unwrap();
            let direct = s.correlation_matrix().unwrap();
            let one_body = one_body_matrix(&phi).unwrap();
            let diff = (direct.entries() - one_body.entries()).map(|z| z.norm()).max();
            assert!(diff < 1e-10, "m={m} n={n}: {diff}");
            assert_abs_diff_eq!(direct.trace(), n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn permutation_keeps_state_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (phi, s) = random_slater(5, 2, &mut rng).unwrap();
        let perm = [3, 0, 4, 1, 2];
        let permuted = s.permute_modes(&perm).unwrap();
        // The permuted state is the Slater state of the permuted orbitals.
        let mut phi_p = phi.clone();
        for (i, &p) in perm.iter().enumerate() {
            phi_p.set_row(p, &phi.row(i));
        }
        let direct = slater_state(&phi_p).unwrap();
        let overlap: Complex64 = permuted.amplitudes().iter().zip(direct.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        assert!(s.permute_modes(&[0, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn entropies_ignore_ordering_within_each_side() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_fixed_n(6, 3, &mut rng).unwrap();
        let base = oracle_entropies(&s, 3).unwrap();
        let shuffled = s.permute_modes(&[2, 0, 1, 5, 3, 4]).unwrap();
        let other = oracle_entropies(&shuffled, 3).unwrap();
        assert_abs_diff_eq!(base.s_a, other.s_a, epsilon = 1e-12);
        assert_abs_diff_eq!(base.s_m, other.s_m, epsilon = 1e-12);
        assert_abs_diff_eq!(base.s_res_direct, other.s_res_direct, epsilon = 1e-12);
    }

    #[test]
    fn joint_distribution_is_perfectly_correlated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_fixed_n(7, 3, &mut rng).unwrap();
        let joint = s.joint_number_distribution(4).unwrap();
        let mut total = 0.0;
        for (n_a, row) in joint.iter().enumerate() {
            for (n_b, &p) in row.iter().enumerate() {
                total += p;
                if n_a + n_b != 3 {
                    assert_eq!(p, 0.0);
                }
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_check_is_reproducible() {
        let a = identity_check(6, 5, 7).unwrap();
        let b = identity_check(6, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states_checked, 10);
        assert!(a.max_identity_error < 1e-9);
        assert!(identity_check(1, 5, 7).is_err());
        assert!(identity_check(15, 5, 7).is_err());
    }
}
