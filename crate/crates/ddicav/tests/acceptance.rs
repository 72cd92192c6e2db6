//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them). Tolerances
//! are pinned here, not configurable.

use ddicav::dressed::dressed_energies;
use ddicav::meanfield::{default_t_max, perturbed, relax_to_steady_state, rhs_norm};
use ddicav::oracle::{photon_number_sweep, steady_state_quantum, HilbertSpec};
use ddicav::params::SystemParams;
use ddicav::saturation::{
    branch_from_root, branch_residual, branches_at, saturation_roots, spectrum_saturated,
};
use ddicav::{linspace, lowexc, symmetric_grid};

fn pass(criterion: usize, what: &str, details: String) {
    println!("criterion {criterion:2} PASS — {what}: {details}");
}

// Δ = 0, (η, κ, γ, γ′) = (0.12, 0.12, 0.0767, 0.05) g
fn weak_drive_params(j_ddi: f64) -> SystemParams {
    SystemParams {
        eta: 0.12,
        kappa: 0.12,
        gamma: 0.0767,
        gamma_prime: 0.05,
        j_ddi,
        ..Default::default()
    }
}

// J = 0.5g, κ = γ = 0.1g, Δ = 0, γ′ = 0.01g at pump ratio η²/κ² = 4
fn bistable_params() -> SystemParams {
    SystemParams {
        kappa: 0.1,
        gamma: 0.1,
        gamma_prime: 0.01,
        j_ddi: 0.5,
        eta: 0.2,
        ..Default::default()
    }
}

// κ = γ = γ′ = 0.1g at pump ratio η²/κ² = 4
fn strong_pump_params() -> SystemParams {
    SystemParams {
        kappa: 0.1,
        gamma: 0.1,
        gamma_prime: 0.1,
        eta: 0.2,
        ..Default::default()
    }
}

fn doublet_separation(p: &SystemParams, grid: &[f64]) -> f64 {
    let spec = lowexc::spectrum_low(p, grid).unwrap();
    let peaks = spec.peaks();
    assert!(peaks.len() >= 2, "expected a doublet, found {peaks:?}");
    (peaks[0].position - peaks[1].position).abs()
}

#[test]
fn criterion_01_vacuum_rabi_splitting() {
    let p = weak_drive_params(0.0);
    let grid = symmetric_grid(5.0, 2001);
    let sep = doublet_separation(&p, &grid);
    let expect = 2.0 * std::f64::consts::SQRT_2;
    let rel = (sep - expect).abs() / expect;
    assert!(rel < 0.02, "separation {sep} vs 2√2·g: {:.2}%", 100.0 * rel);
    pass(
        1,
        "vacuum-Rabi splitting",
        format!("separation {sep:.4} g vs 2√2 g ({:.2}% off)", 100.0 * rel),
    );
}

#[test]
fn criterion_02_splitting_law() {
    let grid = symmetric_grid(5.0, 4001);
    let mut worst: f64 = 0.0;
    for dpj in [0.0, 1.0, 2.0] {
        let p = weak_drive_params(dpj);
        let sep = doublet_separation(&p, &grid);
        let law = (dpj * dpj + 8.0).sqrt();
        let rel = (sep - law).abs() / law;
        assert!(
            rel < 0.02,
            "Δ+J = {dpj}: separation {sep} vs {law} ({:.2}%)",
            100.0 * rel
        );
        worst = worst.max(rel);
    }
    pass(
        2,
        "splitting law √((Δ+J)² + 8g²)",
        format!("worst deviation {:.3}%", 100.0 * worst),
    );
}

#[test]
fn criterion_03_delta_plus_j_equivalence() {
    let grid = linspace(-5.0, 5.0, 801);
    let specs: Vec<_> = [(1.0, 0.0), (0.0, 1.0), (-1.0, 2.0)]
        .into_iter()
        .map(|(delta, j)| {
            let p = SystemParams {
                delta,
                ..weak_drive_params(j)
            };
            lowexc::spectrum_low(&p, &grid).unwrap()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for s in &specs[1..] {
        for (a, b) in specs[0].points.iter().zip(&s.points) {
            let rel = (a.state.photon_number - b.state.photon_number).abs() / a.state.photon_number;
            assert!(
                rel <= 1e-10,
                "Δc = {}: relative mismatch {rel:.3e}",
                a.delta_c
            );
            worst = worst.max(rel);
        }
    }
    pass(
        3,
        "spectra depend on Δ+J only",
        format!("worst pointwise mismatch {worst:.2e}"),
    );
}

#[test]
fn criterion_04_symmetric_spectrum() {
    // Δ + J = 0 with J = 1g
    let p = SystemParams {
        delta: -1.0,
        ..weak_drive_params(1.0)
    };
    let grid = symmetric_grid(5.0, 2001);
    let spec = lowexc::spectrum_low(&p, &grid).unwrap();
    let n = spec.points.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let a = spec.points[i].state.photon_number;
        let b = spec.points[n - 1 - i].state.photon_number;
        let rel = (a - b).abs() / a;
        assert!(
            rel <= 1e-12,
            "asymmetry {rel:.3e} at Δc = {}",
            spec.points[i].delta_c
        );
        worst = worst.max(rel);
    }
    pass(
        4,
        "Δ+J = 0 spectrum is symmetric",
        format!("worst asymmetry {worst:.2e}"),
    );
}

#[test]
fn criterion_05_zero_saturation_reduction() {
    let mut checked = 0;
    for delta_c in linspace(-4.0, 4.0, 33) {
        for p in [
            weak_drive_params(0.0),
            weak_drive_params(1.0),
            bistable_params(),
        ] {
            let q = SystemParams { delta_c, ..p };
            let b = branch_from_root(&q, 0.0).unwrap();
            let low = lowexc::steady_state_low(&q).unwrap();
            assert_eq!(b.a0, low.a0, "field amplitude differs at Δc = {delta_c}");
            assert_eq!(b.sigma0, low.sigma0, "coherence differs at Δc = {delta_c}");
            assert_eq!(b.photon_number, low.photon_number);
            assert_eq!(b.sigma_z0, -1.0);
            checked += 1;
        }
    }
    pass(
        5,
        "s0 = 0 branch equals the linear solution bit-for-bit",
        format!("{checked} points"),
    );
}

#[test]
fn criterion_06_bistability_with_classified_branches() {
    let p = bistable_params();
    // a Δc window with exactly three nonnegative roots exists
    let grid = linspace(-3.0, 3.0, 601);
    let three: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| {
            saturation_roots(&SystemParams { delta_c: x, ..p })
                .unwrap()
                .len()
                == 3
        })
        .collect();
    assert!(!three.is_empty(), "no three-root window at pump ratio 4");
    let window = (three[0], *three.last().unwrap());

    // the middle-s0 branch is the unstable one
    let q = SystemParams {
        delta_c: 0.5 * (window.0 + window.1),
        ..p
    };
    let branches = branches_at(&q).unwrap();
    assert_eq!(branches.len(), 3);
    assert_eq!(
        branches[0].stable,
        Some(true),
        "low branch should be stable"
    );
    assert_eq!(
        branches[1].stable,
        Some(false),
        "middle branch should be unstable"
    );
    assert_eq!(
        branches[2].stable,
        Some(true),
        "high branch should be stable"
    );

    // relaxation confirms the basins
    let t_max = default_t_max(&q);
    for b in [&branches[0], &branches[2]] {
        let r = relax_to_steady_state(&q, &perturbed(&b.mean_field_state(), 1e-4), t_max, 1e-11)
            .unwrap();
        assert!(
            r.state.distance(&b.mean_field_state()) <= 1e-5,
            "stable branch s0 = {} not recovered",
            b.s0
        );
    }
    let r = relax_to_steady_state(
        &q,
        &perturbed(&branches[1].mean_field_state(), 1e-4),
        t_max,
        1e-11,
    )
    .unwrap();
    assert!(r.state.distance(&branches[1].mean_field_state()) > 1e-3);
    assert!(
        r.state.distance(&branches[0].mean_field_state()) <= 1e-6
            || r.state.distance(&branches[2].mean_field_state()) <= 1e-6,
        "unstable branch escaped to neither stable branch"
    );
    pass(
        6,
        "bistable window with middle branch unstable",
        format!(
            "window Δc ∈ [{:.3}, {:.3}] g, basins confirmed",
            window.0, window.1
        ),
    );
}

#[test]
fn criterion_07_residual_oracles_on_every_branch() {
    let p = bistable_params();
    let grid = linspace(-3.0, 3.0, 241);
    let spec = spectrum_saturated(&p, &grid).unwrap();
    let mut branches = 0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_rhs: f64 = 0.0;
    for pt in &spec.points {
        let q = SystemParams {
            delta_c: pt.delta_c,
            ..p
        };
        for b in &pt.branches {
            let res = branch_residual(&q, b).unwrap();
            let rhs = rhs_norm(&q, &b.mean_field_state());
            assert!(res <= 1e-10, "Δc = {}: residual {res:.3e}", pt.delta_c);
            assert!(rhs <= 1e-8, "Δc = {}: rhs norm {rhs:.3e}", pt.delta_c);
            worst_residual = worst_residual.max(res);
            worst_rhs = worst_rhs.max(rhs);
            branches += 1;
        }
    }
    pass(
        7,
        "every emitted branch passes both residual oracles",
        format!(
            "{branches} branches, worst residual {worst_residual:.2e}, worst rhs {worst_rhs:.2e}"
        ),
    );
}

#[test]
fn criterion_08_quantum_semiclassical_agreement() {
    // the weak-drive decay set; at weak drive the worst deviation sits at the
    // antiresonance and grows with J (quadratically in η), so the J = 0
    // reference curve is the meaningful 2% gate
    let p = SystemParams {
        eta: 0.01,
        ..weak_drive_params(0.0)
    };
    let h = HilbertSpec::new(12).unwrap();
    let grid = linspace(-4.0, 4.0, 41);
    let quantum = photon_number_sweep(&p, &grid, &h).unwrap();
    let mut worst: f64 = 0.0;
    for (delta_c, n_quantum) in &quantum {
        let q = SystemParams {
            delta_c: *delta_c,
            ..p
        };
        let n_low = lowexc::steady_state_low(&q).unwrap().photon_number;
        let rel = (n_quantum - n_low).abs() / n_low;
        assert!(
            rel < 0.02,
            "Δc = {delta_c}: quantum {n_quantum:.6e} vs linear {n_low:.6e}"
        );
        worst = worst.max(rel);
    }
    // truncation self-convergence at the tallest point of the sweep
    let (peak_dc, peak_n) = quantum
        .iter()
        .copied()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let q = SystemParams {
        delta_c: peak_dc,
        ..p
    };
    let n_bigger = steady_state_quantum(&q, &HilbertSpec::new(14).unwrap())
        .unwrap()
        .photon_number();
    let change = (peak_n - n_bigger).abs();
    assert!(change < 1e-8, "truncation change {change:.3e}");
    pass(
        8,
        "Liouvillian steady state matches the linear formula at weak drive",
        format!(
            "worst deviation {:.3}%, truncation change {change:.2e}",
            100.0 * worst
        ),
    );
}

#[test]
fn criterion_09_empty_cavity_limits() {
    let empty =
        |eta: f64, kappa: f64, delta_c: f64| eta * eta / (delta_c * delta_c + kappa * kappa);
    let mut worst: f64 = 0.0;

    // g = 0 in the linear layer (direct construction: the coupled formulas
    // are well-defined at g = 0 even though validated parameter sets keep
    // g > 0)
    for delta_c in [-0.7, 0.0, 0.4] {
        let p = SystemParams {
            g: 0.0,
            delta_c,
            ..weak_drive_params(0.0)
        };
        let n = lowexc::steady_state_low(&p).unwrap().photon_number;
        let rel = (n - empty(p.eta, p.kappa, delta_c)).abs() / empty(p.eta, p.kappa, delta_c);
        assert!(rel <= 1e-6, "linear layer at g = 0: {rel:.3e}");
        worst = worst.max(rel);

        // g = 0 in the saturated layer: the cubic collapses to s0 = 0
        let q = SystemParams { gamma: 0.1, ..p };
        let roots = saturation_roots(&q).unwrap();
        assert_eq!(roots, vec![0.0]);
        let n_sat = branch_from_root(&q, 0.0).unwrap().photon_number;
        let rel = (n_sat - empty(q.eta, q.kappa, delta_c)).abs() / empty(q.eta, q.kappa, delta_c);
        assert!(rel <= 1e-6, "saturated layer at g = 0: {rel:.3e}");
        worst = worst.max(rel);

        // s0 → ∞ at full coupling: saturated atoms decouple
        let r = bistable_params();
        let r = SystemParams { delta_c, ..r };
        let n_inf = branch_from_root(&r, 1e9).unwrap().photon_number;
        let rel = (n_inf - empty(r.eta, r.kappa, delta_c)).abs() / empty(r.eta, r.kappa, delta_c);
        assert!(rel <= 1e-6, "s0 → ∞: {rel:.3e}");
        worst = worst.max(rel);
    }

    // g = 0 in the quantum layer: driven damped cavity in a coherent state
    let p = SystemParams {
        g: 0.0,
        eta: 0.06,
        kappa: 0.12,
        gamma: 0.05,
        ..Default::default()
    };
    let rho = steady_state_quantum(&p, &HilbertSpec::new(12).unwrap()).unwrap();
    let rel = (rho.photon_number() - empty(p.eta, p.kappa, 0.0)).abs() / empty(p.eta, p.kappa, 0.0);
    assert!(rel <= 1e-6, "quantum layer at g = 0: {rel:.3e}");
    worst = worst.max(rel);

    pass(
        9,
        "empty-cavity limits (g = 0 and s0 → ∞)",
        format!("worst deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_10_saturation_trends() {
    // detuning de-saturation at Δc = 0 (J = 0, κ = γ = γ′ = 0.1g, η²/κ² = 4)
    let base = strong_pump_params();
    let mut s_of_delta = Vec::new();
    for delta in [0.0, 1.0, 3.0, 5.0] {
        let p = SystemParams { delta, ..base };
        let best = branches_at(&p)
            .unwrap()
            .into_iter()
            .filter(|b| b.stable == Some(true))
            .map(|b| b.s0)
            .fold(f64::NEG_INFINITY, f64::max);
        if let Some(&prev) = s_of_delta.last() {
            assert!(
                best < prev,
                "s0 did not fall: Δ = {delta}: {best} vs {prev}"
            );
        }
        s_of_delta.push(best);
    }

    // dipole-coupling saturation enhancement at Δ = 0: the saturation
    // reached by the lowest branch across the sweep grows with J. (At the
    // single point Δc = 0 the root is J-insensitive; the growth happens at
    // the deformed resonances, which is where the spectrum saturates.)
    let grid = linspace(-5.0, 5.0, 501);
    let mut s_of_j = Vec::new();
    for j in [0.0, 0.5, 1.0] {
        let p = SystemParams { j_ddi: j, ..base };
        let spec = spectrum_saturated(&p, &grid).unwrap();
        let best = spec.max_lowest_branch_s0().unwrap();
        if let Some(&prev) = s_of_j.last() {
            assert!(best > prev, "s0 did not grow: J = {j}: {best} vs {prev}");
        }
        s_of_j.push(best);
    }
    pass(
        10,
        "saturation falls with Δ and grows with J",
        format!(
            "s0(Δ) = {:?} at Δc = 0; peak lowest-branch s0(J) = {:?}",
            s_of_delta
                .iter()
                .map(|s| (s * 1e4).round() / 1e4)
                .collect::<Vec<_>>(),
            s_of_j
                .iter()
                .map(|s| (s * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_11_dressed_state_oracle() {
    use ddicav::oracle::build_hamiltonian;
    let mut worst: f64 = 0.0;
    for (delta, j, delta_c) in [
        (0.0, 0.0, 0.0),
        (0.5, 1.0, 0.3),
        (-1.0, 2.0, -0.6),
        (2.0, -0.5, 1.1),
    ] {
        let p = SystemParams {
            delta,
            j_ddi: j,
            delta_c,
            ..Default::default()
        };

        // independent 2×2 diagonalization of the effective single-atom
        // block {|e, 0⟩, |g, 1⟩} in the pump frame
        let d1 = -(p.delta_a() - p.j_ddi);
        let d2 = -p.delta_c;
        let off = std::f64::consts::SQRT_2 * p.g;
        let tr = d1 + d2;
        let disc = ((d1 - d2) * (d1 - d2) + 4.0 * off * off).sqrt();
        let block = [0.5 * (tr - disc) + p.delta_c, 0.5 * (tr + disc) + p.delta_c];

        // bright-state manifold of the full two-atom Hamiltonian
        let drive_free = SystemParams { eta: 0.0, ..p };
        let h = HilbertSpec::new(2).unwrap();
        let ham = build_hamiltonian(&drive_free, &h);
        let (eg, ge, gg1) = (
            h.index(0, true, false),
            h.index(0, false, true),
            h.index(1, false, false),
        );
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let b11 = 0.5 * (ham[(eg, eg)] + ham[(eg, ge)] + ham[(ge, eg)] + ham[(ge, ge)]).re;
        let b12 = inv_sqrt2 * (ham[(eg, gg1)] + ham[(ge, gg1)]).re;
        let b22 = ham[(gg1, gg1)].re;
        let tr2 = b11 + b22;
        let disc2 = ((b11 - b22) * (b11 - b22) + 4.0 * b12 * b12).sqrt();
        let bright = [
            0.5 * (tr2 - disc2) + p.delta_c,
            0.5 * (tr2 + disc2) + p.delta_c,
        ];

        let (lo, hi) = dressed_energies(1, &p);
        for (i, e) in [lo.energy, hi.energy].into_iter().enumerate() {
            let d_block = (e - block[i]).abs() / block[i].abs().max(1.0);
            let d_bright = (e - bright[i]).abs() / bright[i].abs().max(1.0);
            assert!(d_block <= 1e-10, "2×2 block mismatch {d_block:.3e}");
            assert!(d_bright <= 1e-10, "bright manifold mismatch {d_bright:.3e}");
            worst = worst.max(d_block).max(d_bright);
        }
    }
    pass(
        11,
        "dressed energies vs block and bright-manifold diagonalization",
        format!("worst mismatch {worst:.2e}"),
    );
}
