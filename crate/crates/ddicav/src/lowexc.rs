//! Semiclassical low-excitation (linear, harmonic-oscillator) steady state
//! and transmission spectrum.
//!
//! Both atoms are treated as undepleted (`⟨σz⟩ = −1`), which closes the
//! mean-field equations into a linear system. The saturated layer
//! generalizes the same algebra by rescaling the atomic response with
//! `1 + s0`; see [`crate::saturation`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::nonzero;
use crate::params::SystemParams;

/// Linear steady state at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowExcSteadyState {
    /// Intracavity field amplitude ⟨a⟩.
    pub a0: C64,
    /// Atomic coherence ⟨σ1⟩ = ⟨σ2⟩ (the atoms are identical).
    pub sigma0: C64,
    /// Intracavity photon number |⟨a⟩|².
    pub photon_number: f64,
    /// The dimensionless coupling factor v = 2g²/(Δ̃c·(Δ̃a − J̃)).
    pub v: C64,
}

/// Linear-response amplitudes with the atomic detuning rescaled by `u`;
/// `u = 1` is the low-excitation limit, `u = 1 + s0` the saturated branch.
/// Shared so the two layers are bit-identical where they coincide.
pub(crate) struct Linearized {
    /// Coupling factor 2g²/(Δ̃c·(Δ̃a·u − J̃)).
    pub w: C64,
    pub a0: C64,
    pub sigma0: C64,
    pub photon_number: f64,
}

pub(crate) fn linearized_steady_state(p: &SystemParams, u: f64) -> Result<Linearized> {
    let dt = p.detunings();
    let dc = nonzero(dt.delta_c_tilde, "cavity response denominator Δc + iκ")?;
    let da = nonzero(
        dt.delta_a_tilde * u - dt.j_tilde,
        "atomic response denominator",
    )?;
    let w = 2.0 * p.g * p.g / (dc * da);
    let one_minus = C64::new(1.0, 0.0) - w;
    if one_minus == C64::ZERO {
        return Err(Error::SingularParameters(
            "linear response diverges: coupling factor equals 1".into(),
        ));
    }
    let a0 = (p.eta / dc) / one_minus;
    let sigma0 = p.g * a0 / da;
    Ok(Linearized {
        w,
        a0,
        sigma0,
        photon_number: a0.norm_sqr(),
    })
}

/// Coupling factor v = 2g²/(Δ̃c·(Δ̃a − J̃)).
///
/// Depends on Δ and J only through Δ + J at fixed Δc, γ, γ′. Errors if a
/// denominator factor is exactly zero (possible only in the lossless case).
pub fn coupling_factor_v(p: &SystemParams) -> Result<C64> {
    let dt = p.detunings();
    let dc = nonzero(dt.delta_c_tilde, "cavity response denominator Δc + iκ")?;
    let da = nonzero(dt.delta_a_tilde - dt.j_tilde, "atomic response denominator")?;
    Ok(2.0 * p.g * p.g / (dc * da))
}

/// Low-excitation steady state: ⟨a⟩ = (η/Δ̃c)/(1−v), ⟨σ⟩ = g⟨a⟩/(Δ̃a−J̃),
/// photon number |⟨a⟩|².
pub fn steady_state_low(p: &SystemParams) -> Result<LowExcSteadyState> {
    let lin = linearized_steady_state(p, 1.0)?;
    Ok(LowExcSteadyState {
        a0: lin.a0,
        sigma0: lin.sigma0,
        photon_number: lin.photon_number,
        v: lin.w,
    })
}

/// One point of a low-excitation probe sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowSpectrumPoint {
    pub delta_c: f64,
    pub state: LowExcSteadyState,
}

/// Ordered probe sweep, exactly one steady state per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct LowSpectrum {
    pub points: Vec<LowSpectrumPoint>,
}

impl LowSpectrum {
    pub fn photon_numbers(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|pt| pt.state.photon_number)
            .collect()
    }

    pub fn delta_c_values(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.delta_c).collect()
    }

    /// Local photon-number maxima, tallest first.
    pub fn peaks(&self) -> Vec<Peak> {
        find_peaks(&self.delta_c_values(), &self.photon_numbers())
    }
}

/// Evaluate the low-excitation steady state across a strictly increasing
/// probe-detuning grid; all other parameters held fixed.
pub fn spectrum_low(p: &SystemParams, delta_c_grid: &[f64]) -> Result<LowSpectrum> {
    check_grid(delta_c_grid)?;
    let mut points = Vec::with_capacity(delta_c_grid.len());
    for (index, &delta_c) in delta_c_grid.iter().enumerate() {
        let q = SystemParams { delta_c, ..*p };
        let state = steady_state_low(&q).map_err(|e| e.at_grid_point(index, delta_c))?;
        points.push(LowSpectrumPoint { delta_c, state });
    }
    Ok(LowSpectrum { points })
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "sweep grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Default probe grid: 2001 points over ±5g, enough to resolve peaks of
/// width ~0.1g.
pub fn default_delta_c_grid(g: f64) -> Vec<f64> {
    crate::linspace(-5.0 * g, 5.0 * g, 2001)
}

/// A refined local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
}

/// Interior local maxima refined by a three-point parabola through the
/// discrete argmax and its neighbors, returned tallest first.
pub fn find_peaks(grid: &[f64], values: &[f64]) -> Vec<Peak> {
    assert_eq!(grid.len(), values.len());
    let mut peaks = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            peaks.push(parabolic_vertex(
                (grid[i - 1], values[i - 1]),
                (grid[i], values[i]),
                (grid[i + 1], values[i + 1]),
            ));
        }
    }
    peaks.sort_by(|a, b| b.height.partial_cmp(&a.height).unwrap());
    peaks
}

fn parabolic_vertex(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> Peak {
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let (x3, y3) = p3;
    let d21 = x2 - x1;
    let d23 = x2 - x3;
    let num = d21 * d21 * (y2 - y3) - d23 * d23 * (y2 - y1);
    let den = d21 * (y2 - y3) - d23 * (y2 - y1);
    if den == 0.0 {
        return Peak {
            position: x2,
            height: y2,
        };
    }
    let position = x2 - 0.5 * num / den;
    // evaluate the same parabola at its vertex (Lagrange form)
    let l1 = (position - x2) * (position - x3) / ((x1 - x2) * (x1 - x3));
    let l2 = (position - x1) * (position - x3) / ((x2 - x1) * (x2 - x3));
    let l3 = (position - x1) * (position - x2) / ((x3 - x1) * (x3 - x2));
    Peak {
        position,
        height: y1 * l1 + y2 * l2 + y3 * l3,
    }
}
