//! Chain specifications and the disorder ensemble.
//!
//! All randomness in the crate originates here. Each disorder realization
//! draws its couplings from a dedicated ChaCha stream keyed by
//! `(master_seed, realization)`, so a parallel sweep produces bitwise the
//! same ensemble no matter how work is scheduled across threads.

use crate::{Error, Result};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Parity sector of the ring. Only the even sector (`prod_j mu^z_j = +1`)
/// is supported; it maps to antiperiodic fermions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParitySector {
    EvenParity,
}

/// One Ising ring: `H = -sum_j J_j mu^x_j mu^x_{j+1} - sum_j h_j mu^z_j`,
/// with bond `j` coupling sites `j` and `j+1` and bond `N` wrapping to
/// site 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    /// Bond couplings `J_1 .. J_N`; all positive.
    pub couplings: Vec<f64>,
    /// Transverse fields `h_1 .. h_N`; all nonnegative.
    pub fields: Vec<f64>,
    pub sector: ParitySector,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let n = couplings.len();
        if n < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 sites, got {n}")));
        }
        if fields.len() != n {
            return Err(Error::InvalidChain(format!(
                "couplings ({n}) and fields ({}) must have equal length",
                fields.len()
            )));
        }
        if let Some(j) = couplings.iter().find(|j| !(**j > 0.0)) {
            return Err(Error::InvalidChain(format!("coupling {j} not positive")));
        }
        if let Some(h) = fields.iter().find(|h| !(**h >= 0.0)) {
            return Err(Error::InvalidChain(format!("field {h} negative")));
        }
        Ok(ChainSpec {
            n_sites: n,
            couplings,
            fields,
            sector: ParitySector::EvenParity,
        })
    }

    /// Translation-invariant ring with coupling `j` and field `h`.
    pub fn uniform(n_sites: usize, j: f64, h: f64) -> Result<Self> {
        ChainSpec::new(vec![j; n_sites], vec![h; n_sites])
    }
}

/// Disorder ensemble `J_j = 1 + epsilon * eta_j` with `eta_j` i.i.d.
/// uniform on `[-1, 1]` and uniform transverse field `h_j = base_field`.
#[derive(Clone, Copy, Debug)]
pub struct DisorderModel {
    pub epsilon: f64,
    pub base_field: f64,
    pub n_sites: usize,
    pub master_seed: u64,
}

impl DisorderModel {
    pub fn new(epsilon: f64, base_field: f64, n_sites: usize, master_seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::DisorderTooStrong { epsilon });
        }
        if n_sites < 2 {
            return Err(Error::InvalidChain(format!(
                "need at least 2 sites, got {n_sites}"
            )));
        }
        if !(base_field >= 0.0) {
            return Err(Error::InvalidChain(format!("field {base_field} negative")));
        }
        Ok(DisorderModel {
            epsilon,
            base_field,
            n_sites,
            master_seed,
        })
    }

    /// Draws realization `realization` of the ensemble. Deterministic in
    /// `(master_seed, realization)`; independent realizations never share a
    /// stream, so sweeps may sample them in any order.
    pub fn sample_chain(&self, realization: u64) -> ChainSpec {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&realization.to_le_bytes());
        key[16..24].copy_from_slice(b"Jstream\0");
        let mut rng = ChaCha12Rng::from_seed(key);
        let eta = Uniform::new_inclusive(-1.0f64, 1.0f64);
        let couplings: Vec<f64> = (0..self.n_sites)
            .map(|_| 1.0 + self.epsilon * eta.sample(&mut rng))
            .collect();
        ChainSpec {
            n_sites: self.n_sites,
            couplings,
            fields: vec![self.base_field; self.n_sites],
            sector: ParitySector::EvenParity,
        }
    }
}
