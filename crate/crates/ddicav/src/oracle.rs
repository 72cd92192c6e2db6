//! Fully quantum reference layer: the Liouvillian of the driven two-atom
//! cavity on a truncated Fock ⊗ atom ⊗ atom space, and its exact steady
//! state, used to validate the semiclassical layers.
//!
//! Basis ordering is photon-major, then atom 1, then atom 2:
//! `index = 4·n + 2·(atom1 excited) + (atom2 excited)`, photons `0..=n_max`.
//!
//! The vectorized Liouvillian (row-major, `v[i·dim + j] = ρ[i][j]`) is
//! banded with bandwidth `4·dim + 4`, because every operator in the model
//! moves the photon index by at most one (state-index shift ≤ 4). The
//! steady state is the null vector, extracted by inverse iteration on a
//! banded LU factorization, with a dense bordered solve as fallback.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::params::SystemParams;

/// Truncated Hilbert space: photons 0..=n_max times two two-level atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpec {
    n_max: usize,
}

impl HilbertSpec {
    /// Fock truncation with at least one photon state above the vacuum.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be >= 1, got {n_max}"
            )));
        }
        Ok(HilbertSpec { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Total dimension 4·(n_max + 1).
    pub fn dim(&self) -> usize {
        4 * (self.n_max + 1)
    }

    /// Basis index of |n, atom1, atom2⟩.
    pub fn index(&self, n: usize, atom1_excited: bool, atom2_excited: bool) -> usize {
        debug_assert!(n <= self.n_max);
        4 * n + 2 * usize::from(atom1_excited) + usize::from(atom2_excited)
    }
}

// Sparse operator as triplets (row, col, value); all model operators are real.
type Triplets = Vec<(usize, usize, f64)>;

fn op_annihilate(h: &HilbertSpec) -> Triplets {
    let mut t = Vec::new();
    for n in 1..=h.n_max {
        for s in 0..4 {
            t.push((4 * (n - 1) + s, 4 * n + s, (n as f64).sqrt()));
        }
    }
    t
}

fn op_lower(h: &HilbertSpec, atom: usize) -> Triplets {
    let bit = if atom == 1 { 2 } else { 1 };
    let mut t = Vec::new();
    for n in 0..=h.n_max {
        for s in 0..4 {
            if s & bit != 0 {
                t.push((4 * n + (s & !bit), 4 * n + s, 1.0));
            }
        }
    }
    t
}

fn transpose(t: &Triplets) -> Triplets {
    t.iter().map(|&(i, j, v)| (j, i, v)).collect()
}

// A·B for triplet operators (small, used only during assembly).
fn product(a: &Triplets, b: &Triplets, dim: usize) -> Triplets {
    let mut dense = vec![0.0; dim * dim];
    for &(i, k, va) in a {
        for &(kk, j, vb) in b {
            if k == kk {
                dense[i * dim + j] += va * vb;
            }
        }
    }
    let mut t = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let v = dense[i * dim + j];
            if v != 0.0 {
                t.push((i, j, v));
            }
        }
    }
    t
}

fn triplets_to_matrix(t: &Triplets, dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for &(i, j, v) in t {
        m[(i, j)] += C64::new(v, 0.0);
    }
    m
}

/// The system Hamiltonian in the pump frame,
/// `H = −Δc a†a − Δa(N1+N2) + g(a†σ1 + aσ1† + a†σ2 + aσ2†)
///      + J(σ1†σ2 + σ1σ2†) + η(a + a†)`,
/// assembled Hermitian by construction (`‖H − H†‖ = 0` exactly).
pub fn build_hamiltonian(p: &SystemParams, h: &HilbertSpec) -> DMatrix<C64> {
    triplets_to_matrix(&hamiltonian_triplets(p, h), h.dim())
}

fn hamiltonian_triplets(p: &SystemParams, h: &HilbertSpec) -> Triplets {
    let delta_a = p.delta_a();
    let mut t = Vec::new();
    for n in 0..=h.n_max {
        for s in 0..4usize {
            let excited = (s >> 1) + (s & 1);
            let idx = 4 * n + s;
            let diag = -p.delta_c * n as f64 - delta_a * excited as f64;
            if diag != 0.0 {
                t.push((idx, idx, diag));
            }
        }
    }
    let mut sym = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            t.push((i, j, v));
            t.push((j, i, v));
        }
    };
    for n in 0..h.n_max {
        let amp = ((n + 1) as f64).sqrt();
        // a†σk: |n, e⟩ → |n+1, g⟩ for each atom, both atoms, plus h.c.
        for s2 in 0..2 {
            sym(
                h.index(n + 1, false, s2 == 1),
                h.index(n, true, s2 == 1),
                p.g * amp,
            );
        }
        for s1 in 0..2 {
            sym(
                h.index(n + 1, s1 == 1, false),
                h.index(n, s1 == 1, true),
                p.g * amp,
            );
        }
        // drive η(a + a†)
        for s in 0..4 {
            sym(4 * n + s, 4 * (n + 1) + s, p.eta * amp);
        }
    }
    // dipole-dipole exchange |e g⟩ ↔ |g e⟩
    for n in 0..=h.n_max {
        sym(h.index(n, true, false), h.index(n, false, true), p.j_ddi);
    }
    t
}

/// The vectorized Liouvillian `ρ̇ = −i[H,ρ] + Lκρ + Lγρ + Lγ′ρ` with the
/// cavity decay, the two independent atomic decays, and the cross-atom
/// collective decay channels.
pub struct Liouvillian {
    hilbert: HilbertSpec,
    band: BandMatrix,
    scale: f64,
}

/// Assemble the Liouvillian superoperator for the given parameters.
pub fn build_liouvillian(p: &SystemParams, h: &HilbertSpec) -> Liouvillian {
    let dim = h.dim();
    let band_width = 4 * dim + 4;
    let mut band = BandMatrix::new(dim * dim, band_width, band_width);

    let ham = hamiltonian_triplets(p, h);
    let a = op_annihilate(h);
    let s1 = op_lower(h, 1);
    let s2 = op_lower(h, 2);
    let num_ph = product(&transpose(&a), &a, dim);
    let n1 = product(&transpose(&s1), &s1, dim);
    let n2 = product(&transpose(&s2), &s2, dim);
    let s1d_s2 = product(&transpose(&s1), &s2, dim);
    let s2d_s1 = product(&transpose(&s2), &s1, dim);

    // ρ ↦ c·(A ρ): rows move, columns of ρ untouched
    let left = |band: &mut BandMatrix, op: &Triplets, c: C64| {
        for &(i, k, v) in op {
            let cv = c * v;
            for j in 0..dim {
                band.add(i * dim + j, k * dim + j, cv);
            }
        }
    };
    // ρ ↦ c·(ρ B)
    let right = |band: &mut BandMatrix, op: &Triplets, c: C64| {
        for &(k, j, v) in op {
            let cv = c * v;
            for i in 0..dim {
                band.add(i * dim + j, i * dim + k, cv);
            }
        }
    };
    // ρ ↦ c·(A ρ B†)
    let sandwich = |band: &mut BandMatrix, ja: &Triplets, jb: &Triplets, c: C64| {
        for &(i, k, va) in ja {
            for &(j, l, vb) in jb {
                band.add(i * dim + j, k * dim + l, c * va * vb);
            }
        }
    };

    let i_unit = C64::i();
    left(&mut band, &ham, -i_unit);
    right(&mut band, &ham, i_unit);

    let kappa = C64::new(p.kappa, 0.0);
    sandwich(&mut band, &a, &a, 2.0 * kappa);
    left(&mut band, &num_ph, -kappa);
    right(&mut band, &num_ph, -kappa);

    let gamma = C64::new(p.gamma, 0.0);
    for (sk, nk) in [(&s1, &n1), (&s2, &n2)] {
        sandwich(&mut band, sk, sk, 2.0 * gamma);
        left(&mut band, nk, -gamma);
        right(&mut band, nk, -gamma);
    }

    let gp = C64::new(p.gamma_prime, 0.0);
    sandwich(&mut band, &s1, &s2, 2.0 * gp);
    left(&mut band, &s1d_s2, -gp);
    right(&mut band, &s1d_s2, -gp);
    sandwich(&mut band, &s2, &s1, 2.0 * gp);
    left(&mut band, &s2d_s1, -gp);
    right(&mut band, &s2d_s1, -gp);

    let scale = band.max_abs();
    Liouvillian {
        hilbert: *h,
        band,
        scale,
    }
}

impl Liouvillian {
    pub fn hilbert(&self) -> &HilbertSpec {
        &self.hilbert
    }

    pub fn dim(&self) -> usize {
        self.hilbert.dim()
    }

    /// ρ̇ for a given density-matrix-shaped operator.
    pub fn apply_matrix(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let dim = self.dim();
        let v: Vec<C64> = rho.transpose().as_slice().to_vec(); // row-major vec
        let w = self.band.apply(&v);
        DMatrix::from_fn(dim, dim, |i, j| w[i * dim + j])
    }

    /// Action on an already vectorized (row-major) state.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.band.apply(v)
    }

    /// Superoperator element at (row, col) in vectorized indices.
    pub fn matrix_element(&self, row: usize, col: usize) -> C64 {
        self.band.get(row, col)
    }

    /// How far the vectorized identity is from being a left null vector:
    /// `max_col |Σ_diag rows L|`, which is zero for any Lindblad generator.
    pub fn trace_preservation_defect(&self) -> f64 {
        let dim = self.dim();
        let n = dim * dim;
        let mut acc = vec![C64::ZERO; n];
        for t in 0..dim {
            let row = t * dim + t;
            let lo = row.saturating_sub(4 * dim + 4);
            let hi = (row + 4 * dim + 4).min(n - 1);
            for col in lo..=hi {
                acc[col] += self.band.get(row, col);
            }
        }
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Solve `Lρ = 0, tr ρ = 1` by inverse iteration on the banded LU;
    /// falls back to a dense bordered solve at small dimensions.
    pub fn steady_state(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let n = dim * dim;
        let lu = self.band.clone().factor();
        let tiny = lu.tiny_pivot_count(1e-8);
        if tiny >= 2 {
            return Err(Error::DegenerateSteadyState(tiny));
        }

        // start from the maximally mixed state; its overlap with the steady
        // state is its trace, which is 1 by construction
        let mut x = vec![C64::ZERO; n];
        for t in 0..dim {
            x[t * dim + t] = C64::new(1.0 / dim as f64, 0.0);
        }
        let mut best_res = f64::INFINITY;
        for _ in 0..6 {
            lu.solve(&mut x);
            let peak = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if peak == 0.0 {
                break;
            }
            for z in x.iter_mut() {
                *z /= peak;
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in x.iter_mut() {
                *z /= norm;
            }
            let residual = self
                .band
                .apply(&x)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            best_res = residual / self.scale.max(1e-300);
            if best_res <= 1e-12 {
                break;
            }
        }
        if best_res <= 1e-9 {
            self.finish_state(&x)
        } else if n <= 2000 {
            self.steady_state_bordered()
        } else {
            Err(Error::NumericalFailure(format!(
                "inverse iteration stalled at relative residual {best_res:.3e}"
            )))
        }
    }

    // normalize a raw null vector into a valid density matrix
    fn finish_state(&self, v: &[C64]) -> Result<DensityMatrix> {
        let dim = self.dim();
        let raw = DMatrix::from_fn(dim, dim, |i, j| v[i * dim + j]);
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let trace: C64 = (0..dim).map(|i| herm[(i, i)]).sum();
        if trace.norm() < 1e-8 {
            return Err(Error::DegenerateSteadyState(2));
        }
        let rho = herm / trace;
        let dm = DensityMatrix {
            hilbert: self.hilbert,
            elements: rho,
        };
        // hermitization and normalization must not have broken the solve
        let v2: Vec<C64> = dm.elements.transpose().as_slice().to_vec();
        let res = self
            .band
            .apply(&v2)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let vnorm = v2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rel = res / (self.scale.max(1e-300) * vnorm);
        if rel > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "steady state residual {rel:.3e} after normalization"
            )));
        }
        dm.validate()?;
        Ok(dm)
    }

    // dense fallback: replace the ρ(0,0) row with the trace constraint
    fn steady_state_bordered(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let n = dim * dim;
        let mut m = DMatrix::<C64>::zeros(n, n);
        let bw = 4 * dim + 4;
        for row in 0..n {
            let lo = row.saturating_sub(bw);
            let hi = (row + bw).min(n - 1);
            for col in lo..=hi {
                m[(row, col)] = self.band.get(row, col);
            }
        }
        for col in 0..n {
            m[(0, col)] = C64::ZERO;
        }
        for t in 0..dim {
            m[(0, t * dim + t)] = C64::new(1.0, 0.0);
        }
        let mut b = nalgebra::DVector::<C64>::zeros(n);
        b[0] = C64::new(1.0, 0.0);
        let solved = nalgebra::linalg::LU::new(m)
            .solve(&b)
            .ok_or_else(|| Error::NumericalFailure("bordered steady-state solve failed".into()))?;
        self.finish_state(solved.as_slice())
    }
}

/// Quantum steady state for the given parameters and truncation.
pub fn steady_state_quantum(p: &SystemParams, h: &HilbertSpec) -> Result<DensityMatrix> {
    if p.kappa <= 0.0 && p.gamma <= 0.0 {
        return Err(Error::InvalidParameter(
            "steady state needs dissipation: kappa > 0 or gamma > 0".into(),
        ));
    }
    build_liouvillian(p, h).steady_state()
}

/// Steady-state density matrix on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    hilbert: HilbertSpec,
    elements: DMatrix<C64>,
}

/// Observables with closed-form traces against the density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// tr(a†a ρ); this is *not* forced to equal |⟨a⟩|² — their ratio is the
    /// coherence diagnostic of the semiclassical photon-number assumption.
    PhotonNumber,
    Sigma1z,
    Sigma2z,
    FieldAmplitude,
}

/// tr(O ρ) for the requested observable. Real observables come back with a
/// numerically tiny imaginary part.
pub fn expectation(rho: &DensityMatrix, which: Observable) -> C64 {
    match which {
        Observable::PhotonNumber => C64::new(rho.photon_number(), 0.0),
        Observable::Sigma1z => C64::new(rho.inversion(1), 0.0),
        Observable::Sigma2z => C64::new(rho.inversion(2), 0.0),
        Observable::FieldAmplitude => rho.field_amplitude(),
    }
}

impl DensityMatrix {
    pub fn hilbert(&self) -> &HilbertSpec {
        &self.hilbert
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    /// tr(a†a ρ) = Σ n·ρ_diag.
    pub fn photon_number(&self) -> f64 {
        let h = &self.hilbert;
        let mut acc = 0.0;
        for n in 0..=h.n_max {
            for s in 0..4 {
                acc += n as f64 * self.elements[(4 * n + s, 4 * n + s)].re;
            }
        }
        acc
    }

    /// ⟨σkz⟩ for atom 1 or 2: excited population minus ground population.
    pub fn inversion(&self, atom: usize) -> f64 {
        assert!(atom == 1 || atom == 2, "atoms are labelled 1 and 2");
        let bit = if atom == 1 { 2 } else { 1 };
        let h = &self.hilbert;
        let mut acc = 0.0;
        for n in 0..=h.n_max {
            for s in 0..4usize {
                let sign = if s & bit != 0 { 1.0 } else { -1.0 };
                acc += sign * self.elements[(4 * n + s, 4 * n + s)].re;
            }
        }
        acc
    }

    /// ⟨a⟩ = tr(a ρ) = Σ √n·ρ[n, n−1] over the photon ladder.
    pub fn field_amplitude(&self) -> C64 {
        let h = &self.hilbert;
        let mut acc = C64::ZERO;
        for n in 1..=h.n_max {
            for s in 0..4 {
                acc += (n as f64).sqrt() * self.elements[(4 * n + s, 4 * (n - 1) + s)];
            }
        }
        acc
    }

    /// tr(O ρ) for an arbitrary operator on the same space.
    pub fn expectation_of(&self, op: &DMatrix<C64>) -> C64 {
        (op * &self.elements).diagonal().sum()
    }

    /// max |ρ − ρ†| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.elements.adjoint();
        (&self.elements - adj)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// |tr ρ − 1|.
    pub fn trace_defect(&self) -> f64 {
        let trace: C64 = self.elements.diagonal().sum();
        (trace - C64::new(1.0, 0.0)).norm()
    }

    /// Smallest eigenvalue (ρ is Hermitian); ≥ −1e−10 for a physical state.
    pub fn min_eigenvalue(&self) -> f64 {
        nalgebra::SymmetricEigen::new(self.elements.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermiticity to 1e−12, unit trace to 1e−10, positivity to −1e−10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::NumericalFailure(format!(
                "hermiticity defect {herm:.3e}"
            )));
        }
        let tr = self.trace_defect();
        if tr > 1e-10 {
            return Err(Error::NumericalFailure(format!("trace defect {tr:.3e}")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < -1e-10 {
            return Err(Error::NumericalFailure(format!(
                "negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(())
    }
}

/// Quantum photon number across a probe sweep; points run in parallel and
/// assemble in grid order.
pub fn photon_number_sweep(
    p: &SystemParams,
    delta_c_grid: &[f64],
    h: &HilbertSpec,
) -> Result<Vec<(f64, f64)>> {
    crate::lowexc::check_grid(delta_c_grid)?;
    delta_c_grid
        .par_iter()
        .enumerate()
        .map(|(index, &delta_c)| {
            let q = SystemParams { delta_c, ..*p };
            let rho = steady_state_quantum(&q, h).map_err(|e| e.at_grid_point(index, delta_c))?;
            Ok((delta_c, rho.photon_number()))
        })
        .collect()
}
