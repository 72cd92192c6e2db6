//! Saturated semiclassical steady state: the self-consistent saturation
//! parameter s0, multivalued branches, bistability detection, and Jacobian
//! stability classification.
//!
//! Eliminating the field from the saturated steady state yields a cubic in
//! s0: with `D̃(u) = Δ̃a·u − J̃`, `D(s) = Δ̃c·D̃(1+s) − 2g²` and
//! `K = 2g²η²`,
//!
//! ```text
//! s·|D(s)|² = K·(1+s)·[(1+s) + γ′/γ]
//! ```
//!
//! whose nonnegative real roots are the candidate branches. Every root maps
//! back to amplitudes through the same linear-response algebra as the
//! low-excitation layer with the atomic detuning rescaled by `1 + s0`, and
//! every branch is an exact fixed point of the mean-field flow.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dedup_roots, real_cubic_roots};
use crate::lowexc::{check_grid, linearized_steady_state};
use crate::meanfield::{mean_field_jacobian, rhs_norm, MeanFieldState};
use crate::params::SystemParams;

/// Eigenvalue real parts within ±this of zero cannot be classified.
pub const STABILITY_EPS: f64 = 1e-10;

/// Roots closer than this in s0 are folded into one; stability at a fold is
/// not classifiable anyway.
pub const ROOT_COALESCENCE_TOL: f64 = 1e-9;

/// Relative residual every accepted root/branch must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// One saturated steady-state branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedBranch {
    /// Saturation parameter s0 ≥ 0.
    pub s0: f64,
    /// Field amplitude ⟨a⟩.
    pub a0: C64,
    /// Atomic coherence ⟨σ⟩ (equal for both atoms).
    pub sigma0: C64,
    /// Inversion ⟨σz⟩ = −1/(1+s0) ∈ [−1, 0].
    pub sigma_z0: f64,
    /// Intracavity photon number |⟨a⟩|².
    pub photon_number: f64,
    /// Set by [`classify_stability`]; `None` until classified.
    pub stable: Option<bool>,
}

impl SaturatedBranch {
    /// The branch embedded as a mean-field state (both atoms identical).
    pub fn mean_field_state(&self) -> MeanFieldState {
        MeanFieldState {
            a: self.a0,
            sigma1: self.sigma0,
            sigma2: self.sigma0,
            sigma1z: self.sigma_z0,
            sigma2z: self.sigma_z0,
        }
    }
}

fn require_gamma(p: &SystemParams) -> Result<f64> {
    if p.gamma > 0.0 {
        Ok(p.gamma_prime / p.gamma)
    } else {
        Err(Error::InvalidParameter(
            "saturated steady state needs gamma > 0 (the inversion balance has no limit at gamma = 0)"
                .into(),
        ))
    }
}

// |D(s)|² as a real quadratic in s: D(s) = A·s + B.
fn denominator_quadratic(p: &SystemParams) -> (f64, f64, f64) {
    let dt = p.detunings();
    let a = dt.delta_c_tilde * dt.delta_a_tilde;
    let b = dt.delta_c_tilde * (dt.delta_a_tilde - dt.j_tilde) - 2.0 * p.g * p.g;
    (a.norm_sqr(), 2.0 * (a * b.conj()).re, b.norm_sqr())
}

/// Real coefficients `[c0, c1, c2, c3]` of the saturation cubic
/// `Σ ci·s0^i = 0`, the cleared form of the self-consistency equation.
///
/// Rejects γ = 0, where the collective-decay ratio γ′/γ diverges.
pub fn saturation_cubic(p: &SystemParams) -> Result<[f64; 4]> {
    let rho = require_gamma(p)?;
    let (alpha, beta, c) = denominator_quadratic(p);
    let k = 2.0 * p.g * p.g * p.eta * p.eta;
    Ok([-k * (1.0 + rho), c - k * (2.0 + rho), beta - k, alpha])
}

/// Variant clearing that folds the collective-decay term into a single
/// `(1 + γ′/γ)` prefactor on `(1+s0)²`. Coincides with [`saturation_cubic`]
/// when γ′ = 0 or at s0 = 0; kept as a diagnostic for quantifying the
/// difference, which tests report. The solver uses [`saturation_cubic`]
/// because only its roots are fixed points of the mean-field flow.
pub fn combined_prefactor_cubic(p: &SystemParams) -> Result<[f64; 4]> {
    let rho = require_gamma(p)?;
    let (alpha, beta, c) = denominator_quadratic(p);
    let k = 2.0 * p.g * p.g * p.eta * p.eta * (1.0 + rho);
    Ok([-k, c - 2.0 * k, beta - k, alpha])
}

/// Relative residual of the uncleared self-consistency equation at `s0`:
/// `s0 − K(1+s0)[(1+s0)+γ′/γ]/|D(s0)|²`, scaled by the larger side.
pub fn self_consistency_residual(p: &SystemParams, s0: f64) -> Result<f64> {
    let rho = require_gamma(p)?;
    let (alpha, beta, c) = denominator_quadratic(p);
    let denom = (alpha * s0 + beta) * s0 + c;
    let k = 2.0 * p.g * p.g * p.eta * p.eta;
    let rhs = k * (1.0 + s0) * ((1.0 + s0) + rho) / denom;
    let scale = s0.abs().max(rhs.abs());
    let r = (s0 - rhs).abs();
    Ok(if scale > 1e-30 { r / scale } else { r })
}

/// Relative residual of the two-term inversion balance evaluated with the
/// branch's own photon number,
/// `s0 − 2g²(1+s0)·n·[(1+s0) + γ′/γ]/|Δ̃a(1+s0) − J̃|²`.
pub fn branch_residual(p: &SystemParams, b: &SaturatedBranch) -> Result<f64> {
    let rho = require_gamma(p)?;
    let dt = p.detunings();
    let u = 1.0 + b.s0;
    let d_atom = (dt.delta_a_tilde * u - dt.j_tilde).norm_sqr();
    let rhs = 2.0 * p.g * p.g * u * b.photon_number * (u + rho) / d_atom;
    let scale = b.s0.abs().max(rhs.abs());
    let r = (b.s0 - rhs).abs();
    Ok(if scale > 1e-30 { r / scale } else { r })
}

/// All real roots s0 ≥ 0 of the saturation cubic, ascending, deduplicated
/// at [`ROOT_COALESCENCE_TOL`], each verified against the uncleared-form
/// residual oracle.
pub fn saturation_roots(p: &SystemParams) -> Result<Vec<f64>> {
    let cubic = saturation_cubic(p)?;
    let roots = real_cubic_roots(cubic);
    let kept: Vec<f64> = roots
        .into_iter()
        .filter(|&r| r >= -1e-12)
        .map(|r| r.max(0.0))
        .collect();
    let kept = dedup_roots(kept, ROOT_COALESCENCE_TOL);
    for &r in &kept {
        let res = self_consistency_residual(p, r)?;
        if res > RESIDUAL_TOL {
            return Err(Error::NumericalFailure(format!(
                "saturation root s0 = {r} has residual {res:.3e}"
            )));
        }
    }
    Ok(kept)
}

/// Fill a branch from one root of the saturation cubic: amplitudes from the
/// linear-response algebra with the atomic detuning rescaled by `1 + s0`.
///
/// At s0 = 0 this is bit-for-bit the low-excitation steady state. For
/// s0 → ∞ the atoms decouple and the branch tends to the empty-cavity
/// Lorentzian. Stability is left unset.
pub fn branch_from_root(p: &SystemParams, s0: f64) -> Result<SaturatedBranch> {
    if !(s0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "saturation parameter must be >= 0, got {s0}"
        )));
    }
    let lin = linearized_steady_state(p, 1.0 + s0)?;
    Ok(SaturatedBranch {
        s0,
        a0: lin.a0,
        sigma0: lin.sigma0,
        sigma_z0: -1.0 / (1.0 + s0),
        photon_number: lin.photon_number,
        stable: None,
    })
}

/// Classify a branch by the spectrum of the mean-field Jacobian at the
/// fixed point: stable iff every eigenvalue real part is < −[`STABILITY_EPS`].
///
/// Errors if the branch is not actually a fixed point (rhs norm > 1e−8 in
/// units of g) or if an eigenvalue sits within ±[`STABILITY_EPS`] of zero.
pub fn classify_stability(p: &SystemParams, b: SaturatedBranch) -> Result<SaturatedBranch> {
    let state = b.mean_field_state();
    let res = rhs_norm(p, &state);
    if res > 1e-8 * p.g {
        return Err(Error::NotAFixedPoint(res));
    }
    let jac = mean_field_jacobian(p, &state);
    let m = DMatrix::from_fn(8, 8, |r, c| jac[r][c]);
    let eigenvalues = m.complex_eigenvalues();
    let mut max_re = f64::NEG_INFINITY;
    for lambda in eigenvalues.iter() {
        if lambda.re.abs() <= STABILITY_EPS {
            return Err(Error::MarginalStability {
                real_part: lambda.re,
                threshold: STABILITY_EPS,
            });
        }
        max_re = max_re.max(lambda.re);
    }
    Ok(SaturatedBranch {
        stable: Some(max_re < -STABILITY_EPS),
        ..b
    })
}

/// All classified branches at one probe detuning, ascending in s0.
pub fn branches_at(p: &SystemParams) -> Result<Vec<SaturatedBranch>> {
    saturation_roots(p)?
        .into_iter()
        .map(|s0| classify_stability(p, branch_from_root(p, s0)?))
        .collect()
}

/// One point of a saturated probe sweep: 1, 2 or 3 classified branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatedSpectrumPoint {
    pub delta_c: f64,
    pub branches: Vec<SaturatedBranch>,
}

/// Ordered saturated probe sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatedSpectrum {
    pub points: Vec<SaturatedSpectrumPoint>,
}

impl SaturatedSpectrum {
    /// Branch counts along the sweep.
    pub fn branch_counts(&self) -> Vec<usize> {
        self.points.iter().map(|pt| pt.branches.len()).collect()
    }

    /// Largest stable saturation parameter over the whole sweep.
    pub fn max_stable_s0(&self) -> Option<f64> {
        self.points
            .iter()
            .flat_map(|pt| pt.branches.iter())
            .filter(|b| b.stable == Some(true))
            .map(|b| b.s0)
            .fold(None, |m, s| Some(m.map_or(s, |m: f64| m.max(s))))
    }

    /// Largest saturation parameter reached by the lowest branch: how far
    /// the continuation of the linear solution saturates along the sweep.
    pub fn max_lowest_branch_s0(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|pt| pt.branches.first().map(|b| b.s0))
            .fold(None, |m, s| Some(m.map_or(s, |m: f64| m.max(s))))
    }
}

/// Evaluate roots, branches, and stability across a strictly increasing
/// probe grid. Grid points are independent and evaluated in parallel;
/// assembly is in grid order.
pub fn spectrum_saturated(p: &SystemParams, delta_c_grid: &[f64]) -> Result<SaturatedSpectrum> {
    check_grid(delta_c_grid)?;
    require_gamma(p)?;
    let points: Result<Vec<SaturatedSpectrumPoint>> = delta_c_grid
        .par_iter()
        .enumerate()
        .map(|(index, &delta_c)| {
            let q = SystemParams { delta_c, ..*p };
            let branches = branches_at(&q).map_err(|e| e.at_grid_point(index, delta_c))?;
            Ok(SaturatedSpectrumPoint { delta_c, branches })
        })
        .collect();
    Ok(SaturatedSpectrum { points: points? })
}

/// A probe-detuning window bounded by two fold points, inside which the
/// steady state is multivalued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldWindow {
    pub lower: f64,
    pub upper: f64,
}

/// Locate multivalued windows along the grid: scan the root count, then
/// refine each count change by bisection to ~1e−9 of the grid span.
/// Windows that extend past the grid ends are clipped to them.
pub fn bistable_windows(p: &SystemParams, delta_c_grid: &[f64]) -> Result<Vec<FoldWindow>> {
    check_grid(delta_c_grid)?;
    let count_at = |delta_c: f64| -> Result<usize> {
        Ok(saturation_roots(&SystemParams { delta_c, ..*p })?.len())
    };
    let counts: Result<Vec<usize>> = delta_c_grid.iter().map(|&x| count_at(x)).collect();
    let counts = counts?;
    let span = delta_c_grid[delta_c_grid.len() - 1] - delta_c_grid[0];
    let tol = 1e-9 * span.max(1e-9);

    let mut edges = Vec::new();
    for i in 0..counts.len() - 1 {
        if counts[i] != counts[i + 1] {
            let (mut lo, mut hi) = (delta_c_grid[i], delta_c_grid[i + 1]);
            let c_lo = counts[i];
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if count_at(mid)? == c_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            edges.push((0.5 * (lo + hi), counts[i] < counts[i + 1]));
        }
    }

    let mut windows = Vec::new();
    let mut open: Option<f64> = if counts[0] > 1 {
        Some(delta_c_grid[0])
    } else {
        None
    };
    for (x, rising) in edges {
        if rising {
            open = Some(x);
        } else if let Some(lower) = open.take() {
            windows.push(FoldWindow { lower, upper: x });
        }
    }
    if let Some(lower) = open {
        windows.push(FoldWindow {
            lower,
            upper: delta_c_grid[delta_c_grid.len() - 1],
        });
    }
    Ok(windows)
}
