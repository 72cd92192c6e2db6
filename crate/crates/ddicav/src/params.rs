//! Physical parameter set, derived complex detunings, and the geometric
//! dipole-dipole coupling formula.
//!
//! Every other module consumes [`SystemParams`]; it is the single source of
//! truth for one simulation instance. All rates are angular frequencies
//! expressed in units of the coupling `g` by convention, so `g = 1` is the
//! usual choice.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// All physical rates and detunings defining one simulation instance.
///
/// Detunings are stored as the pump-cavity detuning `delta_c = ωp − ωc` and
/// the atom-cavity detuning `delta = ωa − ωc`; the pump-atom detuning
/// `Δa = ωp − ωa` is always derived as `delta_c − delta`. Probe sweeps vary
/// `delta_c` at fixed `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Atom-cavity coupling rate g (> 0).
    pub g: f64,
    /// Cavity field decay rate κ (≥ 0).
    pub kappa: f64,
    /// Atomic decay rate γ (≥ 0).
    pub gamma: f64,
    /// Collective atomic decay rate γ′ (≥ 0).
    pub gamma_prime: f64,
    /// Pump amplitude η (≥ 0).
    pub eta: f64,
    /// Pump-cavity detuning Δc = ωp − ωc.
    pub delta_c: f64,
    /// Atom-cavity detuning Δ = ωa − ωc.
    pub delta: f64,
    /// Dipole-dipole interaction strength J.
    pub j_ddi: f64,
}

impl Default for SystemParams {
    /// Unit coupling, everything else switched off.
    fn default() -> Self {
        SystemParams {
            g: 1.0,
            kappa: 0.0,
            gamma: 0.0,
            gamma_prime: 0.0,
            eta: 0.0,
            delta_c: 0.0,
            delta: 0.0,
            j_ddi: 0.0,
        }
    }
}

impl SystemParams {
    /// Validated constructor; prefer struct update syntax off [`Default`]
    /// followed by [`SystemParams::validate`] when building sweeps.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: f64,
        kappa: f64,
        gamma: f64,
        gamma_prime: f64,
        eta: f64,
        delta_c: f64,
        delta: f64,
        j_ddi: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            g,
            kappa,
            gamma,
            gamma_prime,
            eta,
            delta_c,
            delta,
            j_ddi,
        };
        p.validate()?;
        Ok(p)
    }

    /// Check the admissible ranges: g > 0 and all decay/pump rates ≥ 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g must be > 0, got {}",
                self.g
            )));
        }
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("eta", self.eta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("delta_c", self.delta_c),
            ("delta", self.delta),
            ("j_ddi", self.j_ddi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Pump-atom detuning Δa = ωp − ωa = Δc − Δ.
    pub fn delta_a(&self) -> f64 {
        self.delta_c - self.delta
    }

    /// The three complex detunings entering every steady-state formula.
    pub fn detunings(&self) -> ComplexDetunings {
        ComplexDetunings {
            delta_a_tilde: C64::new(self.delta_a(), self.gamma),
            delta_c_tilde: C64::new(self.delta_c, self.kappa),
            j_tilde: C64::new(self.j_ddi, -self.gamma_prime),
        }
    }

    /// Set the pump via the intensity ratio η²/κ² used for the saturated
    /// spectra, i.e. η = κ·√ratio.
    pub fn set_pump_ratio(&mut self, eta2_over_kappa2: f64) -> Result<()> {
        if !(eta2_over_kappa2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eta2_over_kappa2 must be >= 0, got {eta2_over_kappa2}"
            )));
        }
        self.eta = self.kappa * eta2_over_kappa2.sqrt();
        Ok(())
    }

    /// Parse a flat `key = value` listing (config file or CLI overrides).
    ///
    /// Recognized keys: `g, kappa, gamma, gamma_prime, eta, delta_c, delta,
    /// j_ddi`, plus `eta2_over_kappa2` which sets η from the given ratio
    /// (applied after all other keys). Lines starting with `#` and blank
    /// lines are skipped. Later assignments win.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut p = SystemParams::default();
        p.apply_key_values(text)?;
        Ok(p)
    }

    /// Apply `key = value` assignments from `text` on top of `self`.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        let mut pump_ratio = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "line {}: `{}` is not a number",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            match key {
                "g" => self.g = value,
                "kappa" => self.kappa = value,
                "gamma" => self.gamma = value,
                "gamma_prime" => self.gamma_prime = value,
                "eta" => self.eta = value,
                "delta_c" => self.delta_c = value,
                "delta" => self.delta = value,
                "j_ddi" => self.j_ddi = value,
                "eta2_over_kappa2" => pump_ratio = Some(value),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: unknown key `{key}`",
                        lineno + 1
                    )))
                }
            }
        }
        if let Some(r) = pump_ratio {
            self.set_pump_ratio(r)?;
        }
        self.validate()
    }

    /// The parameter listing in the same flat key=value form the parser
    /// accepts; used for output headers.
    pub fn key_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("eta", self.eta),
            ("delta_c", self.delta_c),
            ("delta", self.delta),
            ("j_ddi", self.j_ddi),
        ]
    }
}

/// The complex detunings `Δ̃a = Δa + iγ`, `Δ̃c = Δc + iκ`, `J̃ = J − iγ′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDetunings {
    pub delta_a_tilde: C64,
    pub delta_c_tilde: C64,
    pub j_tilde: C64,
}

/// Geometric front end for the dipole-dipole coupling: two parallel dipoles
/// a distance `r` apart, tilted by `phi` from the interatomic axis.
///
/// Users may bypass this entirely and set `j_ddi` directly; the geometry is
/// only consulted when a coupling has to be derived from positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdiGeometry {
    /// Free-space spontaneous emission rate Γ0 (> 0).
    pub gamma0: f64,
    /// Atomic transition frequency ωa (> 0).
    pub omega_a: f64,
    /// Interatomic distance r (> 0; the coupling diverges at r = 0).
    pub r: f64,
    /// Angle of the dipole moments to the interatomic axis, radians.
    pub phi: f64,
    /// Speed of light in the same unit system as ωa and r (> 0).
    pub c_light: f64,
}

impl DdiGeometry {
    pub fn new(gamma0: f64, omega_a: f64, r: f64, phi: f64, c_light: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma0", gamma0),
            ("omega_a", omega_a),
            ("c_light", c_light),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interatomic distance r must be > 0, got {r}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi must be finite, got {phi}"
            )));
        }
        Ok(DdiGeometry {
            gamma0,
            omega_a,
            r,
            phi,
            c_light,
        })
    }

    /// Dipole-dipole coupling J = (3/4)(Γ0 c³/ωa³ r³)(1 − 3cos²φ).
    ///
    /// Positive for perpendicular polarization (φ = π/2), zero at the magic
    /// angle cos²φ = 1/3, negative for dipoles along the axis.
    pub fn strength(&self) -> f64 {
        let scale = self.gamma0 * self.c_light.powi(3) / (self.omega_a.powi(3) * self.r.powi(3));
        let cos_phi = self.phi.cos();
        0.75 * scale * (1.0 - 3.0 * cos_phi * cos_phi)
    }
}

/// Free-function form of [`DdiGeometry::strength`].
pub fn ddi_strength(geom: &DdiGeometry) -> f64 {
    geom.strength()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn weak_drive_params() -> SystemParams {
        // the weak-drive decay set used across the transmission examples
        SystemParams {
            eta: 0.12,
            kappa: 0.12,
            gamma: 0.0767,
            gamma_prime: 0.05,
            ..Default::default()
        }
    }

    #[test]
    fn detunings_carry_the_decays() {
        let p = weak_drive_params();
        let dt = p.detunings();
        assert_eq!(dt.delta_c_tilde, C64::new(0.0, 0.12));
        assert_eq!(dt.delta_a_tilde, C64::new(0.0, 0.0767));
        assert_eq!(dt.j_tilde, C64::new(0.0, -0.05));
    }

    #[test]
    fn lossless_limit_is_real() {
        let p = SystemParams {
            delta_c: 0.3,
            delta: -0.7,
            j_ddi: 0.4,
            ..Default::default()
        };
        let dt = p.detunings();
        assert_eq!(dt.delta_a_tilde.im, 0.0);
        assert_eq!(dt.delta_c_tilde.im, 0.0);
        assert_eq!(dt.j_tilde.im, 0.0);
    }

    #[test]
    fn delta_a_is_delta_c_minus_delta() {
        let p = SystemParams {
            delta_c: 1.0,
            delta: -1.0,
            ..Default::default()
        };
        assert_eq!(p.delta_a(), 2.0);
        assert_eq!(p.detunings().delta_a_tilde.re, p.delta_c - p.delta);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(SystemParams::new(0.0, 0.1, 0.1, 0.0, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, -0.1, 0.1, 0.0, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(1.0, 0.1, 0.1, 0.0, -0.1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ddi_perpendicular_unit_scale() {
        // Γ0 c³/(ωa³ r³) = 1 at φ = π/2: cos φ = 0 leaves the 3/4 prefactor.
        let geom = DdiGeometry::new(1.0, 1.0, 1.0, FRAC_PI_2, 1.0).unwrap();
        assert_relative_eq!(geom.strength(), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn ddi_magic_angle_zero() {
        let phi = (1.0f64 / 3.0).sqrt().acos();
        for r in [0.5, 1.0, 2.0, 10.0] {
            let geom = DdiGeometry::new(1.0, 1.0, r, phi, 1.0).unwrap();
            assert!(geom.strength().abs() < 1e-15, "J = {}", geom.strength());
        }
    }

    #[test]
    fn ddi_parallel_unit_scale() {
        let geom = DdiGeometry::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(geom.strength(), -1.5, max_relative = 1e-15);
    }

    #[test]
    fn ddi_inverse_cube_falloff() {
        // doubling r divides |J| by 8, away from the magic angle
        for phi in [0.0, 0.3, FRAC_PI_2, 2.0, PI] {
            if (1.0 - 3.0 * phi.cos().powi(2)).abs() < 1e-12 {
                continue;
            }
            let j1 = DdiGeometry::new(2.0, 1.5, 1.0, phi, 1.0)
                .unwrap()
                .strength();
            let j2 = DdiGeometry::new(2.0, 1.5, 2.0, phi, 1.0)
                .unwrap()
                .strength();
            assert_relative_eq!(j2.abs(), j1.abs() / 8.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn ddi_rejects_zero_distance() {
        assert!(DdiGeometry::new(1.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(DdiGeometry::new(1.0, 1.0, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn key_value_round_trip() {
        let text = "\
# example configuration
g = 1.0
kappa = 0.12
gamma = 0.0767
gamma_prime = 0.05
eta = 0.12
delta_c = 0
delta = 0
j_ddi = 2.0
";
        let p = SystemParams::from_key_values(text).unwrap();
        assert_eq!(p.kappa, 0.12);
        assert_eq!(p.j_ddi, 2.0);
        let mut q = SystemParams::default();
        for (k, v) in p.key_values() {
            q.apply_key_values(&format!("{k} = {v}")).unwrap();
        }
        assert_eq!(p, q);
    }

    #[test]
    fn pump_ratio_sets_eta() {
        let mut p = weak_drive_params();
        p.kappa = 0.1;
        p.apply_key_values("eta2_over_kappa2 = 4").unwrap();
        assert_relative_eq!(p.eta, 0.2, max_relative = 1e-15);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(SystemParams::from_key_values("omega = 3").is_err());
    }
}
