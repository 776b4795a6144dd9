//! Dense exact-diagonalization reference for small chains.
//!
//! Works directly in the 2^N spin basis: bit `j-1` of a basis index encodes
//! site `j`, with a clear bit meaning `mu^z = +1`. Parity
//! `P = prod_j mu^z_j` is then `+1` on indices with even popcount, and the
//! Hamiltonian is block-diagonal across the two popcount classes because
//! every bond operator flips exactly two bits.
//!
//! Everything here is deliberately simple and independent of the
//! free-fermion path: evolution is spectral calculus on the sector
//! Hamiltonians, entropy comes from the exact reduced density matrix.

use crate::chain::{ChainSpec, ParitySector};
use crate::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, EighInto, UPLO};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Largest chain for which the full 2^N x 2^N Hamiltonian may be built.
pub const MAX_DENSE_SITES: usize = 14;
/// Largest chain for which exact evolution (full sector eigendecomposition)
/// is allowed.
pub const MAX_EVOLVE_SITES: usize = 12;

/// A normalized many-body state over the full 2^N spin basis.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub amplitudes: Array1<Complex64>,
    pub n_sites: usize,
}

impl DenseState {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Ground-state result carrying the data needed to judge its reliability.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: DenseState,
    pub energy: f64,
    /// Gap to the next level within the same parity sector.
    pub gap: f64,
    /// True when the sector ground level is degenerate (gap < 1e-10); the
    /// returned eigenvector is then a basis-dependent representative.
    pub degenerate: bool,
}

/// Dense reference for one chain, caching the per-sector eigendecompositions
/// so repeated evolutions of the same chain pay the cubic cost once.
pub struct OracleChain {
    spec: ChainSpec,
    even_states: Vec<usize>,
    odd_states: Vec<usize>,
    /// Position of each basis index inside its parity sector.
    index_in_sector: Vec<u32>,
    even_eig: OnceLock<(Array1<f64>, Array2<f64>)>,
    odd_eig: OnceLock<(Array1<f64>, Array2<f64>)>,
}

impl OracleChain {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        let n = spec.n_sites;
        if n > MAX_DENSE_SITES {
            return Err(Error::DenseTooLarge {
                n,
                max: MAX_DENSE_SITES,
            });
        }
        let dim = 1usize << n;
        let mut even_states = Vec::with_capacity(dim / 2);
        let mut odd_states = Vec::with_capacity(dim / 2);
        let mut index_in_sector = vec![0u32; dim];
        for b in 0..dim {
            if b.count_ones() % 2 == 0 {
                index_in_sector[b] = even_states.len() as u32;
                even_states.push(b);
            } else {
                index_in_sector[b] = odd_states.len() as u32;
                odd_states.push(b);
            }
        }
        Ok(OracleChain {
            spec: spec.clone(),
            even_states,
            odd_states,
            index_in_sector,
            even_eig: OnceLock::new(),
            odd_eig: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    fn diagonal_energy(&self, b: usize) -> f64 {
        let mut e = 0.0;
        for (j, h) in self.spec.fields.iter().enumerate() {
            let z = if (b >> j) & 1 == 0 { 1.0 } else { -1.0 };
            e -= h * z;
        }
        e
    }

    fn sector_states(&self, even: bool) -> &[usize] {
        if even {
            &self.even_states
        } else {
            &self.odd_states
        }
    }

    fn sector_hamiltonian(&self, even: bool) -> Array2<f64> {
        let n = self.spec.n_sites;
        let states = self.sector_states(even);
        let m = states.len();
        let mut h = Array2::<f64>::zeros((m, m));
        for (i, &b) in states.iter().enumerate() {
            h[[i, i]] = self.diagonal_energy(b);
            for j in 0..n {
                let k = (j + 1) % n;
                let mask = (1usize << j) | (1usize << k);
                // Bond flips preserve parity, so the partner stays in-sector.
                let i2 = self.index_in_sector[b ^ mask] as usize;
                h[[i2, i]] += -self.spec.couplings[j];
            }
        }
        h
    }

    fn sector_eig(&self, even: bool) -> Result<&(Array1<f64>, Array2<f64>)> {
        let cell = if even { &self.even_eig } else { &self.odd_eig };
        if cell.get().is_none() {
            let h = self.sector_hamiltonian(even);
            let (w, v) = h.eigh_into(UPLO::Lower)?;
            let _ = cell.set((w, v));
        }
        Ok(cell.get().expect("just initialized"))
    }

    /// Lowest state of the even-parity sector.
    pub fn ground_state(&self) -> Result<GroundState> {
        let (w, v) = self.sector_eig(true)?;
        let dim = 1usize << self.spec.n_sites;
        let mut amplitudes = Array1::<Complex64>::zeros(dim);
        for (i, &b) in self.even_states.iter().enumerate() {
            amplitudes[b] = Complex64::new(v[[i, 0]], 0.0);
        }
        let gap = w[1] - w[0];
        Ok(GroundState {
            state: DenseState {
                amplitudes,
                n_sites: self.spec.n_sites,
            },
            energy: w[0],
            gap,
            degenerate: gap < 1e-10,
        })
    }

    /// Evolves `state` for time `t` under this chain's Hamiltonian.
    pub fn evolve(&self, state: &DenseState, t: f64) -> Result<DenseState> {
        let n = self.spec.n_sites;
        if n > MAX_EVOLVE_SITES {
            return Err(Error::DenseTooLarge {
                n,
                max: MAX_EVOLVE_SITES,
            });
        }
        if state.n_sites != n {
            return Err(Error::DimensionMismatch(format!(
                "state has {} sites, chain has {}",
                state.n_sites, n
            )));
        }
        let dim = 1usize << n;
        let mut out = Array1::<Complex64>::zeros(dim);
        for even in [true, false] {
            let states = self.sector_states(even);
            let m = states.len();
            let mut re = Array1::<f64>::zeros(m);
            let mut im = Array1::<f64>::zeros(m);
            let mut weight = 0.0;
            for (i, &b) in states.iter().enumerate() {
                let a = state.amplitudes[b];
                re[i] = a.re;
                im[i] = a.im;
                weight += a.norm_sqr();
            }
            if weight < 1e-30 {
                continue;
            }
            let (w, v) = self.sector_eig(even)?;
            let cre = v.t().dot(&re);
            let cim = v.t().dot(&im);
            let mut pre = Array1::<f64>::zeros(m);
            let mut pim = Array1::<f64>::zeros(m);
            for k in 0..m {
                let (sin, cos) = (w[k] * t).sin_cos();
                // (a + ib) e^{-i w t}
                pre[k] = cre[k] * cos + cim[k] * sin;
                pim[k] = cim[k] * cos - cre[k] * sin;
            }
            let bre = v.dot(&pre);
            let bim = v.dot(&pim);
            for (i, &b) in states.iter().enumerate() {
                out[b] = Complex64::new(bre[i], bim[i]);
            }
        }
        Ok(DenseState {
            amplitudes: out,
            n_sites: n,
        })
    }

    /// Exact energy expectation, applying the Hamiltonian on the fly.
    pub fn energy(&self, state: &DenseState) -> f64 {
        let n = self.spec.n_sites;
        let dim = 1usize << n;
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..dim {
            let a = state.amplitudes[b];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            acc += state.amplitudes[b].conj() * self.diagonal_energy(b) * a;
            for j in 0..n {
                let k = (j + 1) % n;
                let mask = (1usize << j) | (1usize << k);
                acc += state.amplitudes[b ^ mask].conj() * (-self.spec.couplings[j]) * a;
            }
        }
        acc.re
    }
}

/// Full 2^N x 2^N Hamiltonian matrix in the spin basis.
pub fn dense_hamiltonian(spec: &ChainSpec) -> Result<Array2<f64>> {
    let n = spec.n_sites;
    if n > MAX_DENSE_SITES {
        return Err(Error::DenseTooLarge {
            n,
            max: MAX_DENSE_SITES,
        });
    }
    let dim = 1usize << n;
    let mut m = Array2::<f64>::zeros((dim, dim));
    for b in 0..dim {
        let mut diag = 0.0;
        for (j, h) in spec.fields.iter().enumerate() {
            let z = if (b >> j) & 1 == 0 { 1.0 } else { -1.0 };
            diag -= h * z;
        }
        m[[b, b]] = diag;
        for j in 0..n {
            let k = (j + 1) % n;
            let mask = (1usize << j) | (1usize << k);
            m[[b ^ mask, b]] += -spec.couplings[j];
        }
    }
    Ok(m)
}

/// Ground state of the requested parity sector.
pub fn dense_ground_state(spec: &ChainSpec, sector: ParitySector) -> Result<GroundState> {
    let ParitySector::EvenParity = sector;
    OracleChain::new(spec)?.ground_state()
}

/// One-shot evolution; for repeated times build an [`OracleChain`] instead.
pub fn dense_evolve(state: &DenseState, spec: &ChainSpec, t: f64) -> Result<DenseState> {
    OracleChain::new(spec)?.evolve(state, t)
}

/// Exact two-point function `<mu^x_j mu^x_l>` (signed). Sites are 1-based.
pub fn dense_correlation(state: &DenseState, j: usize, l: usize) -> Result<f64> {
    let n = state.n_sites;
    if j < 1 || l < 1 || j > n || l > n {
        return Err(Error::DimensionMismatch(format!(
            "sites ({j}, {l}) outside 1..={n}"
        )));
    }
    if j == l {
        return Ok(1.0);
    }
    // mu^x is a pure bit flip in this basis; no string attaches.
    let mask = (1usize << (j - 1)) | (1usize << (l - 1));
    let dim = 1usize << n;
    let mut acc = Complex64::new(0.0, 0.0);
    for b in 0..dim {
        acc += state.amplitudes[b ^ mask].conj() * state.amplitudes[b];
    }
    Ok(acc.re)
}

/// Von Neumann entropy (bits) of the contiguous block starting at site
/// `first` (1-based) with `len` sites, from the exact reduced density matrix.
pub fn dense_entropy(state: &DenseState, first: usize, len: usize) -> Result<f64> {
    let n = state.n_sites;
    if first < 1 || len < 1 || first + len - 1 > n {
        return Err(Error::DimensionMismatch(format!(
            "block (first={first}, len={len}) outside 1..={n}"
        )));
    }
    let lo = first - 1;
    let da = 1usize << len;
    let de = 1usize << (n - len);
    let low_mask = (1usize << lo) - 1;
    let mut m = Array2::<Complex64>::zeros((da, de));
    for b in 0..(1usize << n) {
        let a = (b >> lo) & (da - 1);
        let e = ((b >> (lo + len)) << lo) | (b & low_mask);
        m[[a, e]] = state.amplitudes[b];
    }
    // Spectra of M M+ and M+ M agree on nonzero eigenvalues; diagonalize the
    // smaller Gram matrix.
    let gram = if da <= de {
        let mh = m.t().mapv(|z| z.conj());
        m.dot(&mh)
    } else {
        let mh = m.t().mapv(|z| z.conj());
        mh.dot(&m)
    };
    let (vals, _) = gram.eigh(UPLO::Lower)?;
    let mut s = 0.0;
    for lambda in vals.iter() {
        if *lambda > 1e-14 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::DisorderModel;
    use crate::freefermion::diagonalize_chain;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_classical_spectrum() {
        // H = -2 mu^x_1 mu^x_2 after the bulk and wrap bonds merge; its
        // eigenvalues are -2 and +2, each twice.
        let spec = ChainSpec::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let h = dense_hamiltonian(&spec).unwrap();
        let (w, _) = h.eigh(UPLO::Lower).unwrap();
        let expected = [-2.0, -2.0, 2.0, 2.0];
        for (got, want) in w.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_parity() {
        let model = DisorderModel::new(0.5, 0.5, 6, 17).unwrap();
        let spec = model.sample_chain(0);
        let h = dense_hamiltonian(&spec).unwrap();
        let dim = 1usize << 6;
        let parity: Vec<f64> = (0..dim)
            .map(|b: usize| if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let mut max_comm = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                max_comm = max_comm.max((h[[r, c]] * (parity[c] - parity[r])).abs());
            }
        }
        assert!(max_comm < 1e-12);
    }

    #[test]
    fn ground_energy_matches_quasiparticle_sum() {
        for (n, seed) in [(4usize, 1u64), (6, 2), (8, 3), (10, 4)] {
            let model = DisorderModel::new(0.5, 0.5, n, seed).unwrap();
            let spec = model.sample_chain(0);
            let dense = dense_ground_state(&spec, ParitySector::EvenParity).unwrap();
            let basis = diagonalize_chain(&spec).unwrap();
            let free = -0.5 * basis.omega.sum();
            assert_abs_diff_eq!(dense.energy, free, epsilon = 1e-8);
            assert!(!dense.degenerate);
        }
    }

    #[test]
    fn zero_field_ground_state_is_ghz() {
        let spec = ChainSpec::uniform(8, 1.0, 0.0).unwrap();
        let gs = dense_ground_state(&spec, ParitySector::EvenParity).unwrap();
        assert_abs_diff_eq!(gs.energy, -8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            dense_entropy(&gs.state, 1, 4).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        for l in 2..=8 {
            assert_abs_diff_eq!(
                dense_correlation(&gs.state, 1, l).unwrap(),
                1.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn evolution_is_unitary_and_composes() {
        let model = DisorderModel::new(0.5, 0.5, 8, 23).unwrap();
        let spec = model.sample_chain(0);
        let chain = OracleChain::new(&spec).unwrap();
        let gs = chain.ground_state().unwrap();
        // Evolve under a quenched chain so the state actually moves.
        let mut quenched = spec.clone();
        quenched.fields = vec![0.9; 8];
        let qchain = OracleChain::new(&quenched).unwrap();
        let one = qchain.evolve(&gs.state, 1.7).unwrap();
        assert_abs_diff_eq!(one.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(qchain.energy(&one), qchain.energy(&gs.state), epsilon = 1e-10);
        let two = qchain.evolve(&qchain.evolve(&gs.state, 0.9).unwrap(), 0.8).unwrap();
        for (a, b) in one.amplitudes.iter().zip(two.amplitudes.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_complement_matches() {
        let model = DisorderModel::new(0.5, 0.5, 8, 29).unwrap();
        let spec = model.sample_chain(0);
        let mut quenched = spec.clone();
        quenched.fields = vec![0.5; 8];
        let gs = dense_ground_state(&spec, ParitySector::EvenParity).unwrap();
        let evolved = OracleChain::new(&quenched)
            .unwrap()
            .evolve(&gs.state, 2.3)
            .unwrap();
        let left = dense_entropy(&evolved, 1, 3).unwrap();
        let right = dense_entropy(&evolved, 4, 5).unwrap();
        assert_abs_diff_eq!(left, right, epsilon = 1e-10);
    }

    #[test]
    fn size_limits_enforced() {
        let spec = ChainSpec::uniform(15, 1.0, 0.5).unwrap();
        assert!(matches!(
            dense_hamiltonian(&spec),
            Err(Error::DenseTooLarge { .. })
        ));
        let spec13 = ChainSpec::uniform(13, 1.0, 0.5).unwrap();
        let chain = OracleChain::new(&spec13).unwrap();
        let dim = 1usize << 13;
        let mut amplitudes = Array1::<Complex64>::zeros(dim);
        amplitudes[0] = Complex64::new(1.0, 0.0);
        let state = DenseState {
            amplitudes,
            n_sites: 13,
        };
        assert!(matches!(
            chain.evolve(&state, 1.0),
            Err(Error::DenseTooLarge { .. })
        ));
    }
}
