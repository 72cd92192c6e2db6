//! Analytic layer: dressed states, eigenenergies, mixing angles and complex
//! normal-mode frequencies of the effective single-atom Hamiltonian.
//!
//! The two dipole-coupled atoms reduce, at low excitation, to one fictitious
//! atom at frequency `ωa + J` coupled to the mode with strength `√2·g`; the
//! other fictitious atom decouples. Everything here depends on the atomic
//! detuning and the dipole coupling only through the combination `Δ + J`.

use num_complex::Complex64 as C64;

use crate::params::SystemParams;

/// Upper or lower dressed branch / normal mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        }
    }
}

/// One dressed eigenstate of the n-excitation manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLevel {
    /// Excitation number n ≥ 1.
    pub n: u32,
    pub branch: Branch,
    /// Eigenenergy relative to the caller's cavity-frequency reference.
    pub energy: f64,
    /// Mixing angle θn ∈ (0, π).
    pub theta_n: f64,
}

impl DressedLevel {
    /// Amplitude of the atom-excited component |e, n−1⟩ in this state.
    pub fn atom_amplitude(&self) -> f64 {
        match self.branch {
            Branch::Minus => (self.theta_n / 2.0).sin(),
            Branch::Plus => (self.theta_n / 2.0).cos(),
        }
    }

    /// Amplitude of the photon component |g, n⟩ in this state.
    pub fn photon_amplitude(&self) -> f64 {
        match self.branch {
            Branch::Minus => -(self.theta_n / 2.0).cos(),
            Branch::Plus => (self.theta_n / 2.0).sin(),
        }
    }
}

/// The two complex normal-mode frequencies; real parts are resonance
/// positions, imaginary parts their widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModePair {
    pub omega_minus: C64,
    pub omega_plus: C64,
}

impl NormalModePair {
    /// Distance between the resonance positions, Re(ω+) − Re(ω−) ≥ 0.
    pub fn splitting(&self) -> f64 {
        self.omega_plus.re - self.omega_minus.re
    }
}

/// Mixing angle θn = atan2(2√2·g·√n, Δ + J), continuous through Δ + J = 0
/// where it passes π/2 (equal atomic and photonic weight).
pub fn mixing_angle(n: u32, delta: f64, j_ddi: f64, g: f64) -> f64 {
    assert!(n >= 1, "mixing angle defined for n >= 1");
    assert!(g > 0.0, "mixing angle defined for g > 0");
    let y = 2.0 * std::f64::consts::SQRT_2 * g * (n as f64).sqrt();
    y.atan2(delta + j_ddi)
}

/// Both dressed levels of the n-excitation manifold, energies relative to a
/// zero cavity-frequency reference. See [`dressed_energies_with_ref`].
pub fn dressed_energies(n: u32, p: &SystemParams) -> (DressedLevel, DressedLevel) {
    dressed_energies_with_ref(n, p, 0.0)
}

/// Dressed energies with an explicit cavity-frequency reference:
///
/// `E_{n±} = n·ωc_ref + (Δ+J)/2 ± ½·√((Δ+J)² + 8g²n)`
///
/// Only energy differences appear in spectra, so the reference defaults to
/// zero. The splitting `E_{n+} − E_{n−} = √((Δ+J)² + 8g²n)` is reference-free.
pub fn dressed_energies_with_ref(
    n: u32,
    p: &SystemParams,
    omega_c_ref: f64,
) -> (DressedLevel, DressedLevel) {
    assert!(n >= 1, "dressed manifolds start at n = 1");
    let dpj = p.delta + p.j_ddi;
    let nf = n as f64;
    let half_split = 0.5 * (dpj * dpj + 8.0 * p.g * p.g * nf).sqrt();
    let center = nf * omega_c_ref + 0.5 * dpj;
    let theta = mixing_angle(n, p.delta, p.j_ddi, p.g);
    (
        DressedLevel {
            n,
            branch: Branch::Minus,
            energy: center - half_split,
            theta_n: theta,
        },
        DressedLevel {
            n,
            branch: Branch::Plus,
            energy: center + half_split,
            theta_n: theta,
        },
    )
}

/// Complex normal-mode frequencies of the linear response,
///
/// `ω± = −½(Δ̃a − J̃ + Δ̃c) ± ½·√(8g² + (Δ̃a − J̃ − Δ̃c)²)`,
///
/// with the square-root branch fixed so that Re(ω+) ≥ Re(ω−).
pub fn normal_mode_frequencies(p: &SystemParams) -> NormalModePair {
    let dt = p.detunings();
    let shifted_atom = dt.delta_a_tilde - dt.j_tilde;
    let sum = shifted_atom + dt.delta_c_tilde;
    let diff = shifted_atom - dt.delta_c_tilde;
    let root = (C64::new(8.0 * p.g * p.g, 0.0) + diff * diff).sqrt();
    let mut omega_minus = -0.5 * sum - 0.5 * root;
    let mut omega_plus = -0.5 * sum + 0.5 * root;
    if omega_plus.re < omega_minus.re {
        std::mem::swap(&mut omega_plus, &mut omega_minus);
    }
    NormalModePair {
        omega_minus,
        omega_plus,
    }
}

/// Normal modes swept over atomic detunings Δ at fixed J: the avoided
/// crossing between the bare-atom and bare-cavity resonances. The minimum
/// gap sits at Δ = −J.
pub fn avoided_crossing(p: &SystemParams, delta_grid: &[f64]) -> Vec<(f64, NormalModePair)> {
    assert!(
        !delta_grid.is_empty(),
        "avoided crossing needs a nonempty grid"
    );
    delta_grid
        .iter()
        .map(|&delta| {
            let q = SystemParams { delta, ..*p };
            (delta, normal_mode_frequencies(&q))
        })
        .collect()
}
