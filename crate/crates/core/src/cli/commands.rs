use rayon::prelude::*;

use super::output::{num, opt, Table};
use crate::config::RunConfig;
use crate::dynamics::{
    dipole_coherences, extract_transition_time, Observables, PhaseKind, ProtocolSchedule, Simulation, TimeSeries,
};
use crate::fock_space::{DensityMatrix, TruncatedBasis};
use crate::lattice_green::{coupling_matrices, ChainGeometry};
use crate::modes::{analytic_dispersion, double_modes, kz_of_mode, single_modes};
use crate::radiation::{cone_angle, far_field_pattern};
use crate::rate_model::{
    alpha1_fit, evolve_rate_model, fit_power_law, gamma_closed_form, kappa_ratio, pop_closed_form,
    transition_time_formula, RateModelConfig,
};
use crate::{Error, Result};

/// Largest chain `validate-truncation` accepts with `n_max = 3`.
pub const TRUNCATION_GUARD: usize = 12;

/// Single-mode table, analytic dispersion at the same `k_z`, and the
/// labelled two-excitation modes when `n_max ≥ 2`.
pub fn cmd_modes(cfg: &RunConfig) -> Result<Vec<Table>> {
    let geometry = cfg.geometry()?;
    let (n, a) = (geometry.n_atoms(), geometry.spacing());
    let coupling = coupling_matrices(&geometry);
    let modes = single_modes(&coupling)?;

    let mut single = Table::new("single_modes", &["xi", "kz", "omega", "gamma"]);
    let mut analytic = Table::new("dispersion", &["xi", "kz", "omega", "gamma"]);
    for m in &modes {
        let kz = kz_of_mode(n, a, m.label)?;
        single.push(vec![m.label.to_string(), num(kz), num(m.shift), num(m.decay)]);
        let (gamma, omega) = analytic_dispersion(kz, a)?;
        analytic.push(vec![m.label.to_string(), num(kz), num(omega), num(gamma)]);
    }
    single.note("gamma_min", modes[0].decay);
    single.note("gamma_max", modes[n - 1].decay);
    let mut tables = vec![single, analytic];

    if cfg.truncation.n_max >= 2 && n >= 2 {
        let basis = TruncatedBasis::new(n, 2)?;
        let doubles = double_modes(&coupling, &basis)?;
        let mut t = Table::new(
            "double_modes",
            &["rank", "xi1", "xi2", "label_overlap", "ambiguous", "omega", "gamma"],
        );
        for d in &doubles {
            t.push(vec![
                d.rank.to_string(),
                d.pair_label.0.to_string(),
                d.pair_label.1.to_string(),
                num(d.label_overlap),
                d.is_ambiguous().to_string(),
                num(d.shift),
                num(d.decay),
            ]);
        }
        t.note("ambiguous", doubles.iter().filter(|d| d.is_ambiguous()).count() as i64);
        tables.push(t);
    }
    Ok(tables)
}

fn sample_phases(series: &TimeSeries) -> Vec<&'static str> {
    let mut labels = vec!["start"; series.len()];
    for (k, marker) in series.phases.iter().enumerate() {
        let end = series.phases.get(k + 1).map_or(series.len(), |m| m.first_sample);
        for l in &mut labels[marker.first_sample..end] {
            *l = marker.kind.name();
        }
    }
    labels
}

fn series_table(name: &str, series: &TimeSeries) -> Table {
    let n_manifolds = series.pop_by_manifold.first().map_or(0, Vec::len);
    // pop_k is the excited-atom population carried by manifold k
    let mut columns: Vec<String> = vec!["t".into(), "phase".into(), "pop_total".into()];
    columns.extend((1..n_manifolds).map(|k| format!("pop_{k}")));
    columns.extend(["gamma", "trace"].map(String::from));
    columns.extend(series.projections.iter().map(|p| p.label.column()));
    let mut table = Table {
        name: name.into(),
        columns,
        rows: Vec::with_capacity(series.len()),
        summary: toml::Table::new(),
    };
    let phases = sample_phases(series);
    for i in 0..series.len() {
        let mut row = vec![num(series.times[i]), phases[i].to_string()];
        row.push(num(series.total_pop[i]));
        row.extend(series.pop_by_manifold[i].iter().enumerate().skip(1).map(|(k, &p)| num(k as f64 * p)));
        row.push(opt(series.gamma[i]));
        row.push(num(series.trace[i]));
        row.extend(series.projections.iter().map(|p| num(p.values[i])));
        table.push(row);
    }
    table
}

fn simulation(cfg: &RunConfig, geometry: &ChainGeometry, n_max: usize) -> Result<Simulation> {
    let sim = Simulation::new(geometry, n_max)?;
    let needs_pairs = cfg
        .output
        .projections
        .iter()
        .any(|p| matches!(p, crate::dynamics::ProjectionLabel::Pair(..)));
    if needs_pairs {
        sim.with_double_modes()
    } else {
        Ok(sim)
    }
}

/// Full protocol time series and the cumulative emission per mode.
pub fn cmd_protocol(cfg: &RunConfig) -> Result<Vec<Table>> {
    let geometry = cfg.geometry()?;
    let sim = simulation(cfg, &geometry, cfg.truncation.n_max)?;
    let schedule = ProtocolSchedule::canonical(&cfg.protocol_params(), sim.modes())?;
    let obs = Observables {
        projections: cfg.output.projections.clone(),
    };
    let run = sim.run(&schedule, DensityMatrix::ground(sim.basis()), &obs)?;
    let mut series = series_table("protocol", &run.series);
    series.note("final_pop", *run.series.total_pop.last().unwrap_or(&0.0));

    let mut emission = Table::new("emission", &["xi", "emitted", "gamma"]);
    for (m, e) in sim.modes().iter().zip(&run.series.emission) {
        emission.push(vec![m.label.to_string(), num(*e), num(m.decay)]);
    }
    let total: f64 = run.series.emission.iter().sum();
    emission.note("total", total);
    emission.note("xi_aim", cfg.xi_aim() as i64);
    if let Some((xi, _)) = run
        .series
        .emission
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
    {
        emission.note("brightest", (xi + 1) as i64);
    }
    Ok(vec![series, emission])
}

/// Storage analysis of one chain: illumination and staggered transfer,
/// then storage until `γ` has settled on `Γ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct StorageOutcome {
    pub n_atoms: usize,
    pub omega_t1: f64,
    pub gamma1: f64,
    pub kappa: f64,
    /// Rate-model `t_tr`, `None` in the linear regime.
    pub t_tr_formula: Option<f64>,
    /// Extracted `t_tr`, measured from the start of storage.
    pub t_tr: Option<f64>,
    /// Whether `γ` stayed settled long enough for `t_tr` to be trusted.
    pub settled: bool,
    pub storage_simulated: f64,
    /// Storage samples, time measured from the start of storage.
    pub times: Vec<f64>,
    pub gamma: Vec<Option<f64>>,
    pub pop: Vec<f64>,
}

pub fn storage_analysis(cfg: &RunConfig, geometry: &ChainGeometry, omega_t1: f64, alpha1: f64) -> Result<StorageOutcome> {
    let n = geometry.n_atoms();
    let sim = Simulation::new(geometry, 2)?;
    let kappa = kappa_ratio(geometry, sim.basis())?;
    let gamma1 = sim.modes()[0].decay;
    let t_tr_formula = transition_time_formula(omega_t1, kappa, alpha1, n)?;
    let estimate = t_tr_formula.unwrap_or(0.0).max(20.0);
    let cap = cfg.sweep.max_storage_factor * estimate;
    let chunk = (0.25 * estimate).max(10.0);

    let mut params = cfg.protocol_params();
    params.omega_t1 = omega_t1;
    params.n_cycles = 0;
    params.storage_time = chunk;
    let schedule = ProtocolSchedule::canonical(&params, sim.modes())?;
    let prefix = ProtocolSchedule {
        phases: schedule.phases[..2].to_vec(),
    };
    let storage_template = schedule.phases[2].clone();
    let obs = Observables::default();
    let run = sim.run(&prefix, DensityMatrix::ground(sim.basis()), &obs)?;
    let mut rho = run.final_state;
    let mut series = run.series;
    let start = prefix.total_duration();
    // transfer and storage both run in the atomic frame
    let first = series.len();

    let mut elapsed = 0.0;
    let mut t_tr = None;
    let mut settled = false;
    while elapsed < cap - 1e-9 {
        let mut phase = storage_template.clone();
        phase.duration = chunk.min(cap - elapsed);
        sim.integrate(&mut rho, &phase, start + elapsed, &obs, &mut series)?;
        elapsed += phase.duration;
        let times: Vec<f64> = series.times[first..].iter().map(|t| t - start).collect();
        t_tr = extract_transition_time(&times, &series.gamma[first..], gamma1)?;
        if let Some(t) = t_tr {
            if elapsed >= 20.0 && elapsed - t >= cfg.sweep.settle_fraction * elapsed {
                settled = true;
                break;
            }
        }
    }
    Ok(StorageOutcome {
        n_atoms: n,
        omega_t1,
        gamma1,
        kappa,
        t_tr_formula,
        t_tr: if settled { t_tr } else { None },
        settled,
        storage_simulated: elapsed,
        times: series.times[first..].iter().map(|t| t - start).collect(),
        gamma: series.gamma[first..].to_vec(),
        pop: series.total_pop[first..].to_vec(),
    })
}

/// `t_tr` over the `(N, Ωt₁)` grid of the sweep section, the rate-model
/// prediction, and the `t_tr ∝ N^p` fit per `Ωt₁`.
pub fn cmd_storage_sweep(cfg: &RunConfig) -> Result<Vec<Table>> {
    let a = cfg.geometry.spacing;
    let alpha1 = alpha1_fit(a, &cfg.sweep.alpha1_sizes)?;
    let mut jobs: Vec<(usize, f64)> = Vec::new();
    for &n in &cfg.sweep.n_atoms {
        if n < 3 {
            return Err(Error::Config(format!("storage sweep needs N ≥ 3, got {n}")));
        }
        for &x in &cfg.sweep.omega_t1 {
            jobs.push((n, x));
        }
    }
    let outcomes: Vec<StorageOutcome> = jobs
        .par_iter()
        .map(|&(n, x)| storage_analysis(cfg, &ChainGeometry::new(n, a)?, x, alpha1))
        .collect::<Result<_>>()?;

    let mut rows = Table::new(
        "storage_sweep",
        &[
            "n_atoms",
            "omega_t1",
            "t_tr",
            "t_tr_formula",
            "ratio",
            "kappa",
            "alpha1",
            "gamma1",
            "storage_simulated",
            "status",
        ],
    );
    let mut curves = Table::new("storage_gamma", &["n_atoms", "omega_t1", "t", "pop", "gamma"]);
    for o in &outcomes {
        let status = match (o.settled, o.t_tr_formula) {
            (false, _) => "inconclusive",
            (true, None) => "linear",
            (true, Some(_)) => "ok",
        };
        let ratio = match (o.t_tr, o.t_tr_formula) {
            (Some(t), Some(f)) if f > 0.0 => Some(t / f),
            _ => None,
        };
        rows.push(vec![
            o.n_atoms.to_string(),
            num(o.omega_t1),
            opt(o.t_tr),
            opt(o.t_tr_formula),
            opt(ratio),
            num(o.kappa),
            num(alpha1),
            num(o.gamma1),
            num(o.storage_simulated),
            status.into(),
        ]);
        for i in 0..o.times.len() {
            curves.push(vec![
                o.n_atoms.to_string(),
                num(o.omega_t1),
                num(o.times[i]),
                num(o.pop[i]),
                opt(o.gamma[i]),
            ]);
        }
    }
    rows.note("alpha1", alpha1);

    let mut fits = Table::new("storage_fit", &["omega_t1", "exponent", "prefactor", "points"]);
    for &x in &cfg.sweep.omega_t1 {
        let (ns, ts): (Vec<f64>, Vec<f64>) = outcomes
            .iter()
            .filter(|o| o.omega_t1 == x && o.t_tr_formula.is_some())
            .filter_map(|o| o.t_tr.filter(|t| *t > 0.0).map(|t| (o.n_atoms as f64, t)))
            .unzip();
        let (exponent, prefactor) = match fit_power_law(&ns, &ts) {
            Ok((p, c)) => (Some(p), Some(c)),
            Err(_) => (None, None),
        };
        fits.push(vec![num(x), opt(exponent), opt(prefactor), ns.len().to_string()]);
    }
    Ok(vec![rows, curves, fits])
}

/// Population and `γ` along the protocol for `n_max = 1, 2, 3`.
pub fn cmd_validate_truncation(cfg: &RunConfig) -> Result<Vec<Table>> {
    let n = cfg.geometry.n_atoms;
    if n > TRUNCATION_GUARD {
        return Err(Error::Config(format!(
            "n_max = 3 with {n} atoms exceeds the memory guard; use n_atoms ≤ {TRUNCATION_GUARD}"
        )));
    }
    let geometry = cfg.geometry()?;
    let mut params = cfg.protocol_params();
    params.n_cycles = 0;
    let runs: Vec<TimeSeries> = (1..=3usize)
        .into_par_iter()
        .map(|n_max| {
            let sim = Simulation::new(&geometry, n_max)?;
            let schedule = ProtocolSchedule::canonical(&params, sim.modes())?;
            Ok(sim
                .run(&schedule, DensityMatrix::ground(sim.basis()), &Observables::default())?
                .series)
        })
        .collect::<Result<_>>()?;

    let mut t = Table::new(
        "truncation",
        &["t", "phase", "pop_n1", "pop_n2", "pop_n3", "gamma_n1", "gamma_n2", "gamma_n3"],
    );
    let phases = sample_phases(&runs[0]);
    let mut worst = 0.0f64;
    for i in 0..runs[0].len() {
        let mut row = vec![num(runs[0].times[i]), phases[i].to_string()];
        row.extend(runs.iter().map(|s| num(s.total_pop[i])));
        row.extend(runs.iter().map(|s| opt(s.gamma[i])));
        let (p2, p3) = (runs[1].total_pop[i], runs[2].total_pop[i]);
        if p3 > 1e-12 {
            worst = worst.max((p2 - p3).abs() / p3);
        }
        t.push(row);
    }
    t.note("max_rel_diff_n2_n3", worst);
    Ok(vec![t])
}

/// Far-field pattern of `⟨σ_ge^n⟩` at a snapshot of the protocol.
pub fn cmd_radiation(cfg: &RunConfig, snapshot: Option<f64>) -> Result<Vec<Table>> {
    let geometry = cfg.geometry()?;
    let sim = Simulation::new(&geometry, cfg.truncation.n_max)?;
    let schedule = ProtocolSchedule::canonical(&cfg.protocol_params(), sim.modes())?;
    let default_snapshot = schedule
        .phases
        .iter()
        .zip(schedule.windows())
        .find(|(p, _)| p.kind == PhaseKind::EmissionTransfer)
        .map_or_else(|| schedule.total_duration(), |(_, w)| w.1);
    let t = snapshot.or(cfg.radiation.snapshot_time).unwrap_or(default_snapshot);
    let total = schedule.total_duration();
    if !(0.0..=total).contains(&t) {
        return Err(Error::Config(format!(
            "snapshot time {t} is outside the run [0, {total}]"
        )));
    }
    let run = sim.run(&schedule.truncated(t)?, DensityMatrix::ground(sim.basis()), &Observables::default())?;
    let coherences = dipole_coherences(&run.final_state, sim.basis())?;
    let pattern = far_field_pattern(&coherences, &geometry, &cfg.radiation.grid)?;

    let mut table = Table::new("radiation", &["theta", "phi", "intensity"]);
    for (i, th) in pattern.theta.iter().enumerate() {
        for (j, ph) in pattern.phi.iter().enumerate() {
            table.push(vec![num(*th), num(*ph), num(pattern.intensity[[i, j]])]);
        }
    }
    let xi = cfg.xi_aim();
    table.note("snapshot_time", t);
    table.note("xi_aim", xi as i64);
    table.note("peak_theta", pattern.cone_peak());
    if let Some(theta) = cone_angle(xi, geometry.n_atoms(), geometry.spacing())? {
        table.note("cone_angle", theta);
    }
    Ok(vec![table])
}

/// Cascade solution and the two-survivor closed forms over the storage
/// window, from the rates of the configured chain.
pub fn cmd_rate_model(cfg: &RunConfig) -> Result<Vec<Table>> {
    let geometry = cfg.geometry()?;
    let x = cfg.drive.omega_t1;
    let rm = RateModelConfig::from_geometry(&geometry, x)?;
    let kappa = rm.gamma12 / rm.gamma1;
    let mut t = Table::new(
        "rate_model",
        &["t", "pair", "single1", "single2", "pop", "pop_closed", "gamma_closed"],
    );
    let steps = (cfg.schedule.storage_time / cfg.output.sample_interval).round() as usize;
    for i in 0..=steps {
        let time = i as f64 * cfg.output.sample_interval;
        let s = evolve_rate_model(&rm, time)?;
        t.push(vec![
            num(time),
            num(s.pair),
            num(s.single1),
            num(s.single2),
            num(s.total_population()),
            num(pop_closed_form(x, rm.gamma1, rm.gamma12, time)),
            num(gamma_closed_form(x, rm.gamma1, kappa, time)),
        ]);
    }
    let alpha1 = alpha1_fit(geometry.spacing(), &cfg.sweep.alpha1_sizes)?;
    t.note("kappa", kappa);
    t.note("alpha1", alpha1);
    t.note("branch1", rm.branch1);
    t.note("branch2", rm.branch2);
    if let Some(tt) = transition_time_formula(x, kappa, alpha1, geometry.n_atoms())? {
        t.note("t_tr_formula", tt);
    }
    Ok(vec![t])
}

/// `κ` over the sweep's chain sizes and spacings.
pub fn cmd_kappa_map(cfg: &RunConfig) -> Result<Vec<Table>> {
    let mut jobs = Vec::new();
    for &a in &cfg.sweep.spacings {
        for &n in &cfg.sweep.n_atoms {
            jobs.push((n, a));
        }
    }
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(n, a)| {
            let geometry = ChainGeometry::new(n, a)?;
            let coupling = coupling_matrices(&geometry);
            let basis = TruncatedBasis::new(n, 2)?;
            let gamma1 = single_modes(&coupling)?[0].decay;
            let kappa = kappa_ratio(&geometry, &basis)?;
            Ok(vec![n.to_string(), num(a), num(gamma1), num(kappa * gamma1), num(kappa)])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("kappa", &["n_atoms", "spacing", "gamma1", "gamma12", "kappa"]);
    for r in rows {
        t.push(r);
    }
    Ok(vec![t])
}
