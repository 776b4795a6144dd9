//! Assembly of per-row chain results into 2D diagnostics.
//!
//! The 2D model decouples into independent rows, one quantum Ising chain
//! per row, so nothing here simulates a lattice: a Wilson loop of side D
//! is a product of D row correlators, and the entanglement entropy of a
//! cylinder-like region cutting 2M rows is the sum of the 2M row
//! entropies, minus a sector-dependent topological deficit.
//!
//! Because rows are statistically independent, the D factors of one loop
//! may come from D independent disorder realizations of a single chain.

use crate::{Error, Result};

/// Closed-string sector of the assembled 2D state.
///
/// The x sector hosts a winding string that crosses every cut, so the
/// summed row entropy carries no deficit; the z sector is topologically
/// trivial and pays the `log2(2) = 1` bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    XSector,
    ZSector,
}

/// A Wilson loop of side `d` assembled from row correlation magnitudes.
#[derive(Clone, Debug)]
pub struct WilsonLoopResult {
    pub d: usize,
    /// `ln` of the loop expectation value, `-inf` if any row vanished.
    pub log_value: f64,
    pub per_row_factors: Vec<f64>,
    /// Set when a factor was numerically zero or negative; the loop value
    /// is then reported as `-inf` in log rather than failing the run.
    pub has_zero_factor: bool,
}

/// Multiplies `d` row correlation magnitudes into a loop expectation,
/// kept in log space so area-law decay cannot underflow.
pub fn wilson_loop(row_correlations: &[f64]) -> Result<WilsonLoopResult> {
    let d = row_correlations.len();
    if d == 0 {
        return Err(Error::DimensionMismatch(
            "a Wilson loop needs at least one row factor".into(),
        ));
    }
    for &f in row_correlations {
        if !f.is_finite() || f > 1.0 + 1e-6 {
            return Err(Error::DimensionMismatch(format!(
                "row correlation {f} is not a magnitude in (0, 1]"
            )));
        }
    }
    let has_zero_factor = row_correlations.iter().any(|&f| f <= 0.0);
    let log_value = if has_zero_factor {
        f64::NEG_INFINITY
    } else {
        row_correlations.iter().map(|f| f.ln()).sum()
    };
    Ok(WilsonLoopResult {
        d,
        log_value,
        per_row_factors: row_correlations.to_vec(),
        has_zero_factor,
    })
}

/// Region entropy of a 2M-row cylinder cut, with topological deficit.
#[derive(Clone, Debug)]
pub struct TwoDEntropyResult {
    pub m_rows: usize,
    pub total_bits: f64,
    pub sector: Sector,
    /// `(sum of row entropies) - total_bits`: 0 in the x sector, 1 in the
    /// z sector.
    pub gamma_topo: f64,
    /// The x-sector deficit depends on how the winding string is assigned
    /// to the cut; results there are flagged rather than asserted.
    pub convention_dependent: bool,
}

/// Sums `2M` per-row entropies into the region entropy of the assembled
/// state and applies the sector rule: the z sector pays a one-bit
/// topological deficit, the x sector pays none.
///
/// The deficit rule comes from the static sector analysis and is applied
/// unchanged to time-evolved rows; under dynamical localization the
/// deficit persists, which is exactly what the rule encodes.
pub fn assemble_entropy(row_entropies: &[f64], sector: Sector) -> Result<TwoDEntropyResult> {
    if row_entropies.is_empty() || row_entropies.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "a cylinder cut crosses an even number of rows, got {}",
            row_entropies.len()
        )));
    }
    for &s in row_entropies {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::DimensionMismatch(format!(
                "row entropy {s} is not a nonnegative number of bits"
            )));
        }
    }
    let sum: f64 = row_entropies.iter().sum();
    let (total_bits, gamma_topo) = match sector {
        Sector::XSector => (sum, 0.0),
        Sector::ZSector => (sum - 1.0, 1.0),
    };
    Ok(TwoDEntropyResult {
        m_rows: row_entropies.len() / 2,
        total_bits,
        sector,
        gamma_topo,
        convention_dependent: sector == Sector::XSector,
    })
}
