//! Equal-time observables of a quenched chain, computed from the Heisenberg
//! propagators: spin-spin correlation magnitudes as Pfaffian magnitudes of
//! an antisymmetric two-point matrix, and subsystem entanglement entropy
//! from the spectrum of the Majorana correlation matrix.
//!
//! Wick's theorem reduces every quantity here to the four N x N blocks
//!
//! ```text
//!   <A_m A_n> = (phi~ phi~+)_mn    <A_m B_n> =  (phi~ psi~+)_mn
//!   <B_m B_n> = -(psi~ psi~+)_mn   <B_m A_n> = -(psi~ phi~+)_mn ,
//! ```
//!
//! and the queries below slice out only the rows they need, so a correlation
//! at separation D or an entropy over L sites costs O(D^2 N) or O(L^2 N)
//! plus one dense factorization of the small matrix, never O(N^3).

use crate::chain::ChainSpec;
use crate::freefermion::QuenchPropagator;
use crate::{Error, Result};
use ndarray::{s, Array2, ArrayView2};
use ndarray_linalg::{Determinant, SVD};
use num_complex::Complex64;

/// `X Y^+` for row slices of the propagator matrices.
fn times_dagger(x: &ArrayView2<Complex64>, y: &ArrayView2<Complex64>) -> Array2<Complex64> {
    let yc = y.mapv(|z| z.conj());
    x.dot(&yc.t())
}

/// The four Wick-contraction blocks over the full chain.
#[derive(Clone, Debug)]
pub struct CorrelationBlocks {
    /// `<A_m A_n>`
    pub aa: Array2<Complex64>,
    /// `<B_m B_n>`
    pub bb: Array2<Complex64>,
    /// `<A_m B_n>`
    pub ab: Array2<Complex64>,
    /// `<B_m A_n>`
    pub ba: Array2<Complex64>,
    pub t: f64,
}

/// Computes all four blocks densely. Sliced queries below avoid this; it
/// exists for whole-chain consumers (energy audits, cross-checks).
pub fn two_point_blocks(prop: &QuenchPropagator) -> CorrelationBlocks {
    let phi = prop.phi_tilde.view();
    let psi = prop.psi_tilde.view();
    let aa = times_dagger(&phi, &phi);
    let bb = times_dagger(&psi, &psi).mapv(|z| -z);
    let ab = times_dagger(&phi, &psi);
    // <B_m A_n> = -conj(<A_n B_m>)
    let ba = ab.t().mapv(|z| -z.conj());
    CorrelationBlocks {
        aa,
        bb,
        ab,
        ba,
        t: prop.t,
    }
}

/// Magnitude of one two-point function `|<mu^x_j mu^x_l>|`.
#[derive(Clone, Copy, Debug)]
pub struct CorrelationResult {
    /// Separation `D = l - j`.
    pub d: usize,
    /// `sqrt(max(det, 0))`.
    pub magnitude: f64,
    pub t: f64,
    /// Determinant of the antisymmetric two-point matrix; negative values
    /// beyond round-off are rejected before this struct is built.
    pub det: f64,
    /// `ln(magnitude)`, finite even when the magnitude underflows.
    pub log_magnitude: f64,
}

/// Builds the real antisymmetric matrix whose Pfaffian is the two-point
/// function. The operator string `B_j A_{j+1} ... B_{l-1} A_l` holds 2D
/// Majoranas, D of type B on sites j..l-1 and D of type A on sites j+1..l;
/// a global rephasing makes all blocks real without changing the
/// determinant.
fn correlation_gamma(prop: &QuenchPropagator, j: usize, l: usize) -> Result<Array2<f64>> {
    let n = prop.phi_tilde.nrows();
    if j < 1 || l <= j || l > n {
        return Err(Error::DimensionMismatch(format!(
            "correlation sites must satisfy 1 <= j < l <= {n}, got ({j}, {l})"
        )));
    }
    let d = l - j;
    let phi_a = prop.phi_tilde.slice(s![j..j + d, ..]);
    let psi_b = prop.psi_tilde.slice(s![j - 1..j - 1 + d, ..]);
    let gpsi = times_dagger(&psi_b, &psi_b);
    let gphi = times_dagger(&phi_a, &phi_a);
    let gcross = times_dagger(&psi_b, &phi_a);
    let mut gamma = Array2::<f64>::zeros((2 * d, 2 * d));
    for m in 0..d {
        for p in 0..d {
            if m != p {
                // delta + <B B> and <A A> - delta are purely imaginary.
                gamma[[m, p]] = gpsi[[m, p]].im;
                gamma[[d + m, d + p]] = gphi[[m, p]].im;
            }
            let g = -gcross[[m, p]].re; // <B_{j+m} A_{j+1+p}>
            gamma[[m, d + p]] = g;
            gamma[[d + p, m]] = -g;
        }
    }
    Ok(gamma)
}

/// `|<mu^x_j mu^x_l>|` at the propagator's time, for 1-based sites `j < l`.
pub fn correlation_xx(prop: &QuenchPropagator, j: usize, l: usize) -> Result<CorrelationResult> {
    let gamma = correlation_gamma(prop, j, l)?;
    let (sign, ln_abs) = gamma.sln_det()?;
    let det = sign * ln_abs.exp();
    if det < -1e-8 {
        return Err(Error::NegativeDeterminant { det });
    }
    let (magnitude, log_magnitude) = if sign > 0.0 {
        ((0.5 * ln_abs).exp(), 0.5 * ln_abs)
    } else {
        // det in [-1e-8, 0]: round-off around an exact zero.
        (0.0, f64::NEG_INFINITY)
    };
    Ok(CorrelationResult {
        d: l - j,
        magnitude,
        t: prop.t,
        det,
        log_magnitude,
    })
}

/// Majorana correlation matrix of a contiguous subsystem: real antisymmetric
/// 2L x 2L, interleaving `(A, B)` per site, with `i Gamma` having spectrum
/// in `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct MajoranaCorrelation {
    pub gamma: Array2<f64>,
    pub t: f64,
    /// `(first, L)`, 1-based first site.
    pub site_range: (usize, usize),
}

/// Builds the subsystem Majorana correlation matrix from sliced blocks.
pub fn majorana_correlation(
    prop: &QuenchPropagator,
    first: usize,
    len: usize,
) -> Result<MajoranaCorrelation> {
    let n = prop.phi_tilde.nrows();
    if first < 1 || len < 1 || first + len - 1 > n {
        return Err(Error::DimensionMismatch(format!(
            "subsystem (first={first}, len={len}) outside 1..={n}"
        )));
    }
    let f = first - 1;
    let phi = prop.phi_tilde.slice(s![f..f + len, ..]);
    let psi = prop.psi_tilde.slice(s![f..f + len, ..]);
    let gphi = times_dagger(&phi, &phi);
    let gpsi = times_dagger(&psi, &psi);
    let gab = times_dagger(&phi, &psi); // <A_m B_n>
    let mut gamma = Array2::<f64>::zeros((2 * len, 2 * len));
    for a in 0..len {
        for b in 0..len {
            if a != b {
                gamma[[2 * a, 2 * b]] = gphi[[a, b]].im;
                gamma[[2 * a + 1, 2 * b + 1]] = gpsi[[a, b]].im;
            }
            let g = gab[[a, b]].re;
            gamma[[2 * a, 2 * b + 1]] = g;
            gamma[[2 * b + 1, 2 * a]] = -g;
        }
    }
    Ok(MajoranaCorrelation {
        gamma,
        t: prop.t,
        site_range: (first, len),
    })
}

/// Entanglement entropy of a contiguous subsystem.
#[derive(Clone, Debug)]
pub struct EntropyResult {
    /// Subsystem length.
    pub l: usize,
    /// Von Neumann entropy in bits.
    pub bits: f64,
    /// Mode weights `nu_m` in `[0, 1]`, one per site, descending.
    pub nu: Vec<f64>,
}

/// Entanglement entropy (bits) of `len` sites starting at 1-based `first`.
///
/// The singular values of the real antisymmetric Gamma come in equal pairs,
/// one pair per independent mode; each mode contributes the binary entropy
/// of its occupation `(1 - nu_m) / 2`.
pub fn entanglement_entropy(
    prop: &QuenchPropagator,
    first: usize,
    len: usize,
) -> Result<EntropyResult> {
    let corr = majorana_correlation(prop, first, len)?;
    let (_, sv, _) = corr.gamma.svd(false, false)?;
    let mut nu = Vec::with_capacity(len);
    for m in 0..len {
        let v = sv[2 * m];
        if v > 1.0 + 1e-6 {
            return Err(Error::ModeWeightOutOfRange { nu: v });
        }
        nu.push(v.min(1.0));
    }
    let mut bits = 0.0;
    for v in &nu {
        bits += binary_entropy((1.0 - v) / 2.0)?;
    }
    Ok(EntropyResult { l: len, bits, nu })
}

/// `H_b(x) = -x log2 x - (1-x) log2(1-x)`, with `0 log 0 := 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::EntropyDomain { x });
    }
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Energy expectation of the chain Hamiltonian in the evolved state,
/// from O(N) two-point entries. Conserved when `spec` generated the
/// evolution.
pub fn energy_expectation(prop: &QuenchPropagator, spec: &ChainSpec) -> Result<f64> {
    let n = spec.n_sites;
    if prop.phi_tilde.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "propagator has {} sites, spec has {n}",
            prop.phi_tilde.nrows()
        )));
    }
    let row_dot = |x: &Array2<Complex64>, r: usize, y: &Array2<Complex64>, q: usize| {
        x.row(r)
            .iter()
            .zip(y.row(q).iter())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
    };
    let ba = |m: usize, q: usize| (-row_dot(&prop.psi_tilde, m, &prop.phi_tilde, q)).re;
    let ab_diag = |m: usize| row_dot(&prop.phi_tilde, m, &prop.psi_tilde, m).re;
    let mut e = 0.0;
    for j in 0..n - 1 {
        e -= spec.couplings[j] * ba(j, j + 1);
    }
    // Wrap bond enters with flipped sign in the even-parity sector.
    e += spec.couplings[n - 1] * ba(n - 1, 0);
    for j in 0..n {
        e -= spec.fields[j] * ab_diag(j);
    }
    Ok(e)
}
