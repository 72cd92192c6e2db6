//! Ready-to-run figure configurations: each figure is a pinned parameter
//! set; anything the set leaves open (which coupling strengths, which pump
//! ladder, which detunings) is filled from the default table below and
//! echoed into the output header.

use ddicav::params::SystemParams;
use ddicav::Error;

use crate::run::{Axis, Regime, RunConfig, SweepSpec};

// Δ = 0, (η, κ, γ, γ′) = (0.12, 0.12, 0.0767, 0.05) g
fn weak_drive_params() -> SystemParams {
    SystemParams {
        eta: 0.12,
        kappa: 0.12,
        gamma: 0.0767,
        gamma_prime: 0.05,
        ..Default::default()
    }
}

fn probe_sweep() -> SweepSpec {
    SweepSpec::new(Axis::DeltaC, -5.0, 5.0, 2001).expect("static sweep")
}

fn label(config: &mut RunConfig, label: String, note: &str) {
    config.label = label;
    config
        .notes
        .push(("filled_defaults".into(), note.to_string()));
}

/// The numbered figure recipes, each a list of runs (one output file per
/// run).
pub fn figure_recipe(n: usize) -> Result<Vec<RunConfig>, Error> {
    match n {
        1 => {
            // normal-mode spectra for a ladder of coupling strengths
            let js = [0.0, 1.0, 2.0];
            Ok(js
                .iter()
                .map(|&j| {
                    let p = SystemParams {
                        j_ddi: j,
                        ..weak_drive_params()
                    };
                    let mut c = RunConfig::new(p, probe_sweep(), Regime::Low);
                    label(&mut c, format!("j{j}"), "J/g in {0, 1, 2}");
                    c
                })
                .collect())
        }
        2 => {
            // the avoided crossing against atomic detuning at J = g, plus
            // the spectra at the three detunings the figure highlights
            let p = SystemParams {
                j_ddi: 1.0,
                ..weak_drive_params()
            };
            let sweep = SweepSpec::new(Axis::Delta, -4.0, 4.0, 801)?;
            let mut runs = vec![{
                let mut c = RunConfig::new(p, sweep, Regime::AvoidedCrossing);
                label(
                    &mut c,
                    "modes".into(),
                    "mode positions swept over delta at J/g = 1",
                );
                c
            }];
            for delta in [1.0, 0.0, -1.0] {
                let q = SystemParams { delta, ..p };
                let mut c = RunConfig::new(q, probe_sweep(), Regime::Low);
                label(
                    &mut c,
                    format!("spectrum_delta{delta}"),
                    "delta/g in {1, 0, -1}",
                );
                runs.push(c);
            }
            Ok(runs)
        }
        3 => {
            // panel (a): no dipole coupling, no collective decay; panel (b):
            // J = g with the full decay set; detunings filled as {−1, 0, 1}
            let deltas = [-1.0, 0.0, 1.0];
            let mut runs = Vec::new();
            for &delta in &deltas {
                let p = SystemParams {
                    delta,
                    gamma_prime: 0.0,
                    ..weak_drive_params()
                };
                let mut c = RunConfig::new(p, probe_sweep(), Regime::Low);
                label(
                    &mut c,
                    format!("a_delta{delta}"),
                    "panel a: J = 0, gamma_prime = 0; delta/g in {-1, 0, 1}",
                );
                runs.push(c);
            }
            for &delta in &deltas {
                let p = SystemParams {
                    delta,
                    j_ddi: 1.0,
                    ..weak_drive_params()
                };
                let mut c = RunConfig::new(p, probe_sweep(), Regime::Low);
                label(
                    &mut c,
                    format!("b_delta{delta}"),
                    "panel b: J/g = 1; delta/g in {-1, 0, 1}",
                );
                runs.push(c);
            }
            Ok(runs)
        }
        4 => {
            // saturated spectra for a pump ladder at J = 0.5g,
            // κ = γ = 0.1g, Δ = 0, γ′ = 0.01g
            let ratios = [0.25, 1.0, 2.0, 4.0];
            Ok(ratios
                .iter()
                .map(|&r| {
                    let mut p = SystemParams {
                        kappa: 0.1,
                        gamma: 0.1,
                        gamma_prime: 0.01,
                        j_ddi: 0.5,
                        ..Default::default()
                    };
                    p.set_pump_ratio(r).expect("static ratio");
                    let mut c = RunConfig::new(p, probe_sweep(), Regime::Saturated);
                    label(
                        &mut c,
                        format!("pump{r}"),
                        "eta^2/kappa^2 in {0.25, 1, 2, 4}",
                    );
                    c
                })
                .collect())
        }
        5 => {
            // detuning ladder at strong pump, no dipole coupling
            let deltas = [0.0, 1.0, 3.0, 5.0];
            Ok(deltas
                .iter()
                .map(|&delta| {
                    let mut p = SystemParams {
                        kappa: 0.1,
                        gamma: 0.1,
                        gamma_prime: 0.1,
                        delta,
                        ..Default::default()
                    };
                    p.set_pump_ratio(4.0).expect("static ratio");
                    let mut c = RunConfig::new(p, probe_sweep(), Regime::Saturated);
                    label(&mut c, format!("delta{delta}"), "delta/g in {0, 1, 3, 5}");
                    c
                })
                .collect())
        }
        6 => {
            // coupling ladder at strong pump, resonant atoms
            let js = [0.0, 0.5, 1.0, 5.0, 20.0];
            Ok(js
                .iter()
                .map(|&j| {
                    let mut p = SystemParams {
                        kappa: 0.1,
                        gamma: 0.1,
                        gamma_prime: 0.1,
                        j_ddi: j,
                        ..Default::default()
                    };
                    p.set_pump_ratio(4.0).expect("static ratio");
                    let mut c = RunConfig::new(p, probe_sweep(), Regime::Saturated);
                    label(&mut c, format!("j{j}"), "J/g in {0, 0.5, 1, 5, 20}");
                    c
                })
                .collect())
        }
        other => Err(Error::InvalidParameter(format!(
            "figure number must be 1..=6, got {other}"
        ))),
    }
}
