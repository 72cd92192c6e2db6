//! Sweep engine: a resolved run configuration dispatches to the requested
//! solver layer over a parameter grid and assembles one output table.

use ddicav::dressed;
use ddicav::meanfield::{self, MeanFieldState};
use ddicav::oracle::{self, HilbertSpec};
use ddicav::params::SystemParams;
use ddicav::saturation;
use ddicav::{linspace, lowexc, Error};

use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    DeltaC,
    Delta,
    JDdi,
    Eta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DeltaC => "delta_c",
            Axis::Delta => "delta",
            Axis::JDdi => "j_ddi",
            Axis::Eta => "eta",
        }
    }

    fn apply(self, p: &SystemParams, value: f64) -> SystemParams {
        match self {
            Axis::DeltaC => SystemParams {
                delta_c: value,
                ..*p
            },
            Axis::Delta => SystemParams { delta: value, ..*p },
            Axis::JDdi => SystemParams { j_ddi: value, ..*p },
            Axis::Eta => SystemParams { eta: value, ..*p },
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, count: usize) -> Result<Self, Error> {
        if count < 1 {
            return Err(Error::InvalidParameter("sweep count must be >= 1".into()));
        }
        if !(start <= stop) {
            return Err(Error::InvalidParameter(format!(
                "sweep start {start} must be <= stop {stop}"
            )));
        }
        Ok(SweepSpec {
            axis,
            start,
            stop,
            count,
        })
    }

    /// Parse `axis=start:stop:count`, e.g. `delta_c=-5:5:2001`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let bad = |m: &str| Error::InvalidParameter(format!("sweep `{text}`: {m}"));
        let (axis, range) = text
            .split_once('=')
            .ok_or_else(|| bad("expected axis=start:stop:count"))?;
        let axis = match axis.trim() {
            "delta_c" => Axis::DeltaC,
            "delta" => Axis::Delta,
            "j_ddi" => Axis::JDdi,
            "eta" => Axis::Eta,
            other => return Err(bad(&format!("unknown axis `{other}`"))),
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad("stop is not a number"))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count is not an integer"))?;
        SweepSpec::new(axis, start, stop, count)
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }

    pub fn describe(&self) -> String {
        format!(
            "{} from {} to {} in {} points",
            self.axis.name(),
            self.start,
            self.stop,
            self.count
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Low,
    Saturated,
    Dressed,
    AvoidedCrossing,
    Bistability,
    Relax,
    Hysteresis,
    Oracle,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::Saturated => "saturated",
            Regime::Dressed => "dressed",
            Regime::AvoidedCrossing => "avoided-crossing",
            Regime::Bistability => "bistability",
            Regime::Relax => "relax",
            Regime::Hysteresis => "hysteresis",
            Regime::Oracle => "oracle",
        }
    }

    fn sweeps(self) -> bool {
        !matches!(self, Regime::Dressed | Regime::Relax)
    }
}

/// One fully resolved run: parameters, sweep, regime, and the odds and ends
/// particular regimes need.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub label: String,
    pub params: SystemParams,
    pub sweep: SweepSpec,
    pub regime: Regime,
    /// Fock truncation for the quantum layer.
    pub n_max: usize,
    /// Number of dressed manifolds to emit.
    pub levels: u32,
    pub t_max: Option<f64>,
    pub tol: f64,
    /// Keep every n-th accepted step in time-series output.
    pub sample_every: usize,
    /// Extra header lines (recipe-filled defaults and the like).
    pub notes: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(params: SystemParams, sweep: SweepSpec, regime: Regime) -> Self {
        RunConfig {
            label: String::new(),
            params,
            sweep,
            regime,
            n_max: 12,
            levels: 3,
            t_max: None,
            tol: meanfield::DEFAULT_RHS_TOL,
            sample_every: 10,
            notes: Vec::new(),
        }
    }

    fn base_table(&self, columns: Vec<&'static str>) -> Table {
        let mut t = Table::new(columns);
        t.note("tool", format!("ddicav {}", env!("CARGO_PKG_VERSION")));
        t.note("regime", self.regime.name());
        for (k, v) in self.params.key_values() {
            t.note(k, v);
        }
        if self.regime.sweeps() {
            t.note("sweep", self.sweep.describe());
        }
        for (k, v) in &self.notes {
            t.note(k.clone(), v.clone());
        }
        t
    }
}

/// Execute a run and assemble its output table.
pub fn run(config: &RunConfig) -> Result<Table, Error> {
    config.params.validate()?;
    match config.regime {
        Regime::Low => run_low(config),
        Regime::Saturated => run_saturated(config),
        Regime::Dressed => run_dressed(config),
        Regime::AvoidedCrossing => run_avoided_crossing(config),
        Regime::Bistability => run_bistability(config),
        Regime::Relax => run_relax(config),
        Regime::Hysteresis => run_hysteresis(config),
        Regime::Oracle => run_oracle(config),
    }
}

fn run_low(config: &RunConfig) -> Result<Table, Error> {
    let mut table = config.base_table(vec![
        config.sweep.axis.name(),
        "photon_number",
        "re_a",
        "im_a",
        "re_sigma",
        "im_sigma",
    ]);
    if config.sweep.axis == Axis::DeltaC {
        let spec = lowexc::spectrum_low(&config.params, &config.sweep.grid())?;
        for pt in &spec.points {
            table.push(low_row(pt.delta_c, &pt.state));
        }
    } else {
        for (index, x) in config.sweep.grid().into_iter().enumerate() {
            let q = config.sweep.axis.apply(&config.params, x);
            let state = lowexc::steady_state_low(&q).map_err(|e| e.at_grid_point(index, x))?;
            table.push(low_row(x, &state));
        }
    }
    Ok(table)
}

fn low_row(x: f64, s: &lowexc::LowExcSteadyState) -> Vec<Cell> {
    vec![
        Cell::Num(x),
        Cell::Num(s.photon_number),
        Cell::Num(s.a0.re),
        Cell::Num(s.a0.im),
        Cell::Num(s.sigma0.re),
        Cell::Num(s.sigma0.im),
    ]
}

fn run_saturated(config: &RunConfig) -> Result<Table, Error> {
    let mut table = config.base_table(vec![
        config.sweep.axis.name(),
        "branch_index",
        "s0",
        "photon_number",
        "stable",
    ]);
    let mut push_branches = |x: f64, branches: &[saturation::SaturatedBranch]| {
        for (i, b) in branches.iter().enumerate() {
            table.push(vec![
                Cell::Num(x),
                Cell::Int(i as i64),
                Cell::Num(b.s0),
                Cell::Num(b.photon_number),
                Cell::Int(match b.stable {
                    Some(true) => 1,
                    _ => 0,
                }),
            ]);
        }
    };
    if config.sweep.axis == Axis::DeltaC {
        let spec = saturation::spectrum_saturated(&config.params, &config.sweep.grid())?;
        for pt in &spec.points {
            push_branches(pt.delta_c, &pt.branches);
        }
    } else {
        for (index, x) in config.sweep.grid().into_iter().enumerate() {
            let q = config.sweep.axis.apply(&config.params, x);
            let branches = saturation::branches_at(&q).map_err(|e| e.at_grid_point(index, x))?;
            push_branches(x, &branches);
        }
    }
    Ok(table)
}

fn run_dressed(config: &RunConfig) -> Result<Table, Error> {
    let mut table = config.base_table(vec!["n", "branch", "energy", "theta_n"]);
    table.note("levels", config.levels);
    for n in 1..=config.levels {
        let (lo, hi) = dressed::dressed_energies(n, &config.params);
        for level in [lo, hi] {
            table.push(vec![
                Cell::Int(level.n as i64),
                Cell::Str(level.branch.label().to_string()),
                Cell::Num(level.energy),
                Cell::Num(level.theta_n),
            ]);
        }
    }
    Ok(table)
}

fn run_avoided_crossing(config: &RunConfig) -> Result<Table, Error> {
    if config.sweep.axis != Axis::Delta {
        return Err(Error::InvalidParameter(
            "the avoided crossing sweeps the atomic detuning (axis `delta`)".into(),
        ));
    }
    let mut table = config.base_table(vec![
        "delta",
        "re_omega_minus",
        "im_omega_minus",
        "re_omega_plus",
        "im_omega_plus",
    ]);
    for (delta, modes) in dressed::avoided_crossing(&config.params, &config.sweep.grid()) {
        table.push(vec![
            Cell::Num(delta),
            Cell::Num(modes.omega_minus.re),
            Cell::Num(modes.omega_minus.im),
            Cell::Num(modes.omega_plus.re),
            Cell::Num(modes.omega_plus.im),
        ]);
    }
    Ok(table)
}

fn run_bistability(config: &RunConfig) -> Result<Table, Error> {
    if config.sweep.axis != Axis::DeltaC {
        return Err(Error::InvalidParameter(
            "fold windows are located along the probe detuning (axis `delta_c`)".into(),
        ));
    }
    let mut table = config.base_table(vec!["window_index", "delta_c_lower", "delta_c_upper"]);
    let windows = saturation::bistable_windows(&config.params, &config.sweep.grid())?;
    for (i, w) in windows.iter().enumerate() {
        table.push(vec![
            Cell::Int(i as i64),
            Cell::Num(w.lower),
            Cell::Num(w.upper),
        ]);
    }
    Ok(table)
}

fn run_relax(config: &RunConfig) -> Result<Table, Error> {
    let mut table = config.base_table(vec!["t", "re_a", "im_a", "sigma1z", "photon_number"]);
    let t_max = config
        .t_max
        .unwrap_or_else(|| meanfield::default_t_max(&config.params));
    table.note("t_max", t_max);
    table.note("tol", config.tol);
    let mut seen = 0usize;
    let mut last_t = f64::NEG_INFINITY;
    let relaxation = meanfield::relax_with_observer(
        &config.params,
        &MeanFieldState::vacuum(),
        t_max,
        config.tol,
        |t, s| {
            if seen % config.sample_every.max(1) == 0 {
                table.push(vec![
                    Cell::Num(t),
                    Cell::Num(s.a.re),
                    Cell::Num(s.a.im),
                    Cell::Num(s.sigma1z),
                    Cell::Num(s.photon_number()),
                ]);
                last_t = t;
            }
            seen += 1;
        },
    )?;
    // include the converged endpoint unless sampling just emitted it
    if relaxation.t_final > last_t {
        let s = relaxation.state;
        table.push(vec![
            Cell::Num(relaxation.t_final),
            Cell::Num(s.a.re),
            Cell::Num(s.a.im),
            Cell::Num(s.sigma1z),
            Cell::Num(s.photon_number()),
        ]);
    }
    Ok(table)
}

fn run_hysteresis(config: &RunConfig) -> Result<Table, Error> {
    if config.sweep.axis != Axis::DeltaC {
        return Err(Error::InvalidParameter(
            "hysteresis sweeps the probe detuning (axis `delta_c`)".into(),
        ));
    }
    let mut table = config.base_table(vec!["delta_c", "re_a", "im_a", "sigma1z", "photon_number"]);
    table.note("path", "up then down");
    let grid = config.sweep.grid();
    let mut path = grid.clone();
    path.extend(grid.iter().rev());
    let sweep = meanfield::hysteresis_sweep(&config.params, &path)?;
    for pt in &sweep {
        if !pt.converged {
            eprintln!(
                "warning: no steady state at delta_c = {} (rhs norm {:.3e})",
                pt.delta_c, pt.rhs_norm
            );
        }
        table.push(vec![
            Cell::Num(pt.delta_c),
            Cell::Num(pt.state.a.re),
            Cell::Num(pt.state.a.im),
            Cell::Num(pt.state.sigma1z),
            Cell::Num(pt.state.photon_number()),
        ]);
    }
    Ok(table)
}

fn run_oracle(config: &RunConfig) -> Result<Table, Error> {
    if config.sweep.axis != Axis::DeltaC {
        return Err(Error::InvalidParameter(
            "the quantum reference sweeps the probe detuning (axis `delta_c`)".into(),
        ));
    }
    let mut table = config.base_table(vec![
        "delta_c",
        "q_photon_number",
        "semiclassical_photon_number",
        "relative_diff",
        "n_max",
    ]);
    let hilbert = HilbertSpec::new(config.n_max)?;
    let grid = config.sweep.grid();
    let quantum = oracle::photon_number_sweep(&config.params, &grid, &hilbert)?;
    let mut peak = (f64::NEG_INFINITY, 0.0f64);
    for &(delta_c, n_quantum) in &quantum {
        let q = SystemParams {
            delta_c,
            ..config.params
        };
        let n_semi = lowexc::steady_state_low(&q)?.photon_number;
        let rel = (n_quantum - n_semi).abs() / n_semi.abs().max(1e-300);
        if n_quantum > peak.0 {
            peak = (n_quantum, delta_c);
        }
        table.push(vec![
            Cell::Num(delta_c),
            Cell::Num(n_quantum),
            Cell::Num(n_semi),
            Cell::Num(rel),
            Cell::Int(config.n_max as i64),
        ]);
    }
    // truncation diagnostic at the tallest sweep point
    let q = SystemParams {
        delta_c: peak.1,
        ..config.params
    };
    let bigger = HilbertSpec::new(config.n_max + 2)?;
    let n_bigger = oracle::steady_state_quantum(&q, &bigger)?.photon_number();
    let change = (peak.0 - n_bigger).abs();
    table.note("truncation_change_at_peak", format!("{change:e}"));
    if change > 1e-8 {
        eprintln!(
            "warning: photon number changes by {change:.3e} when n_max grows from {} to {}; \
             increase --n-max",
            config.n_max,
            config.n_max + 2
        );
    }
    Ok(table)
}
