//! Steady-state transmission spectra of two dipole-dipole coupled two-level
//! atoms strongly coupled to a driven single-mode optical cavity.
//!
//! The same physical system is solved in three mutually cross-checking
//! layers:
//!
//! - [`dressed`] — analytic dressed states and complex normal-mode
//!   frequencies of the effective single-atom Hamiltonian;
//! - [`lowexc`] / [`saturation`] — semiclassical mean-field steady states,
//!   linear (low-excitation) and saturated (multivalued, bistable), with
//!   Jacobian stability classification;
//! - [`oracle`] — the fully quantum Lindblad steady state on a truncated
//!   Fock ⊗ atom ⊗ atom space, used as the reference the other layers are
//!   validated against.
//!
//! [`meanfield`] provides time integration of the factorized mean-field
//! equations (relaxation to steady state, hysteresis sweeps) and the
//! Jacobian shared with the stability classifier.
//!
//! All rates are expressed in units of the atom-cavity coupling `g` by
//! convention; nothing in the code enforces that, but defaults and tests
//! assume it.
//!
//! ```
//! use ddicav::{linspace, lowexc, saturation, SystemParams};
//!
//! # fn main() -> ddicav::Result<()> {
//! let p = SystemParams {
//!     eta: 0.12, kappa: 0.12, gamma: 0.0767, gamma_prime: 0.05,
//!     j_ddi: 1.0, ..Default::default()
//! };
//!
//! // linear transmission spectrum and its two peaks
//! let spec = lowexc::spectrum_low(&p, &lowexc::default_delta_c_grid(p.g))?;
//! assert_eq!(spec.peaks().len(), 2);
//!
//! // classified saturated branches at one probe detuning
//! let branches = saturation::branches_at(&SystemParams { delta_c: -1.0, ..p })?;
//! assert!(branches.iter().all(|b| b.stable.is_some()));
//! # Ok(())
//! # }
//! ```

pub mod dressed;
pub mod error;
pub mod linalg;
pub mod lowexc;
pub mod meanfield;
pub mod oracle;
pub mod params;
pub mod saturation;

pub use error::{Error, Result};
pub use params::{ComplexDetunings, DdiGeometry, SystemParams};

/// Uniformly spaced grid over `[start, stop]` with `count` points.
///
/// The last point is pinned to `stop` exactly. A single-point grid is the
/// start value.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1, "grid needs at least one point");
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
    grid[count - 1] = stop;
    grid
}

/// Grid over `[-half_width, half_width]` that is exactly symmetric under
/// negation: point `i` and point `count-1-i` are exact negatives.
///
/// `count` must be odd so that 0 is on the grid.
pub fn symmetric_grid(half_width: f64, count: usize) -> Vec<f64> {
    assert!(
        count >= 1 && count % 2 == 1,
        "symmetric grid needs an odd point count"
    );
    let m = (count / 2) as isize;
    let step = half_width / m.max(1) as f64;
    (-m..=m).map(|i| i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(-5.0, 5.0, 2001);
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[2000], 5.0);
    }

    #[test]
    fn linspace_single_point() {
        assert_eq!(linspace(1.25, 7.0, 1), vec![1.25]);
    }

    #[test]
    fn symmetric_grid_negates_exactly() {
        let g = symmetric_grid(4.0, 81);
        for i in 0..g.len() {
            assert_eq!(g[i], -g[g.len() - 1 - i]);
        }
        assert_eq!(g[40], 0.0);
    }
}
