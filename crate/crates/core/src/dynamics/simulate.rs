use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::observables::{block_expectation, decay_from_derivative};
use super::{drive_hamiltonian, pvd_hamiltonian, Phase, PhaseKind, ProtocolSchedule};
use crate::fock_space::{embed_hamiltonian, hermitize, DensityMatrix, MasterEquation, SparseMatrix, TruncatedBasis};
use crate::lattice_green::{coupling_matrices, ChainGeometry, CouplingMatrices};
use crate::modes::{check_label, double_modes, find_pair, single_modes, CollectiveMode, TwoExcitationMode};
use crate::{Error, Result, C64};

/// Largest allowed trace drift before a run is declared unstable.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-4;

/// Mode whose projection is recorded along a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionLabel {
    Single(usize),
    Pair(usize, usize),
}

impl ProjectionLabel {
    /// Column name used in CSV output.
    pub fn column(&self) -> String {
        match self {
            ProjectionLabel::Single(x) => format!("proj_{x}"),
            ProjectionLabel::Pair(a, b) => format!("proj_{a}_{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionTrack {
    pub label: ProjectionLabel,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMarker {
    pub kind: PhaseKind,
    pub start: f64,
    pub end: f64,
    /// Index of the first sample recorded strictly inside the phase.
    pub first_sample: usize,
}

/// Observables recorded along a trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// Probability per manifold `0..=n_max` at each sample.
    pub pop_by_manifold: Vec<Vec<f64>>,
    /// `⟨N̂_exc⟩`.
    pub total_pop: Vec<f64>,
    /// Instantaneous decay rate, undefined below the population floor.
    pub gamma: Vec<Option<f64>>,
    pub trace: Vec<f64>,
    pub projections: Vec<ProjectionTrack>,
    pub phases: Vec<PhaseMarker>,
    /// Cumulative `∫ Γ_ξ ⟨ψ_ξ|ρ|ψ_ξ⟩ dt` per single mode over the
    /// emission-tracking phases, indexed by `ξ - 1`.
    pub emission: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `dPop/dt = -γ Pop` at each sample.
    pub fn pop_derivative(&self) -> Vec<Option<f64>> {
        self.gamma
            .iter()
            .zip(&self.total_pop)
            .map(|(g, p)| g.map(|g| -g * p))
            .collect()
    }

    pub fn projection(&self, label: ProjectionLabel) -> Option<&[f64]> {
        self.projections
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.values.as_slice())
    }

    /// Probability in manifold `k` over time.
    pub fn manifold(&self, k: usize) -> Vec<f64> {
        self.pop_by_manifold
            .iter()
            .map(|p| p.get(k).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn marker(&self, kind: PhaseKind) -> Option<&PhaseMarker> {
        self.phases.iter().find(|m| m.kind == kind)
    }

    /// Samples with `t ≥ from`, as `(times, gamma)` slices.
    pub fn gamma_since(&self, from: f64) -> (&[f64], &[Option<f64>]) {
        let i = self.times.partition_point(|&t| t < from - 1e-12);
        (&self.times[i..], &self.gamma[i..])
    }

    /// Value of a sampled series at the sample closest to `t`.
    pub fn sample_index(&self, t: f64) -> Option<usize> {
        if self.times.is_empty() {
            return None;
        }
        let i = self.times.partition_point(|&s| s < t);
        let candidates = [i.saturating_sub(1), i.min(self.times.len() - 1)];
        candidates
            .into_iter()
            .min_by(|&a, &b| {
                (self.times[a] - t)
                    .abs()
                    .partial_cmp(&(self.times[b] - t).abs())
                    .unwrap()
            })
    }
}

/// What to record besides populations and `γ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub projections: Vec<ProjectionLabel>,
}

/// Result of a protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub series: TimeSeries,
    /// State at the end, in the frame of the last phase.
    pub final_state: DensityMatrix,
    /// Frame frequency of `final_state`.
    pub final_frame: f64,
}

/// Couplings, modes and operators of one chain at a fixed truncation.
#[derive(Clone, Debug)]
pub struct Simulation {
    geometry: ChainGeometry,
    coupling: CouplingMatrices,
    basis: TruncatedBasis,
    modes: Vec<CollectiveMode>,
    double: Option<Vec<TwoExcitationMode>>,
    h_eff: SparseMatrix,
    me: MasterEquation,
    h_norm: f64,
}

impl Simulation {
    pub fn new(geometry: &ChainGeometry, n_max: usize) -> Result<Self> {
        let coupling = coupling_matrices(geometry);
        let basis = TruncatedBasis::new(geometry.n_atoms(), n_max)?;
        let modes = single_modes(&coupling)?;
        let h_eff = embed_hamiltonian(&coupling.h_eff_single, &basis)?;
        let me = MasterEquation::new(&basis, &coupling.decay)?;
        let h_norm = coupling
            .h_eff_single
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(Simulation {
            geometry: geometry.clone(),
            coupling,
            basis,
            modes,
            double: None,
            h_eff,
            me,
            h_norm,
        })
    }

    /// Also diagonalizes the two-excitation block (needs `n_max ≥ 2`).
    pub fn with_double_modes(mut self) -> Result<Self> {
        self.double = Some(double_modes(&self.coupling, &self.basis)?);
        Ok(self)
    }

    pub fn geometry(&self) -> &ChainGeometry {
        &self.geometry
    }

    pub fn coupling(&self) -> &CouplingMatrices {
        &self.coupling
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn modes(&self) -> &[CollectiveMode] {
        &self.modes
    }

    pub fn double_modes(&self) -> Option<&[TwoExcitationMode]> {
        self.double.as_deref()
    }

    pub fn master_equation(&self) -> &MasterEquation {
        &self.me
    }

    /// Embedded `H_eff`.
    pub fn h_eff(&self) -> &SparseMatrix {
        &self.h_eff
    }

    /// `H_eff + H_F + H_S` for the terms active in `phase`.
    pub fn phase_hamiltonian(&self, phase: &Phase) -> Result<SparseMatrix> {
        let mut h = self.h_eff.clone();
        if let Some(drive) = &phase.drive {
            h = h.add(&drive_hamiltonian(drive, Some(&self.modes), &self.basis)?)?;
        }
        if let Some(pattern) = &phase.detuning {
            h = h.add(&pvd_hamiltonian(pattern, &self.basis)?)?;
        }
        Ok(h)
    }

    /// Enforces `dt ≤ 0.05 / max(Ω, Δ, ‖H_eff‖∞, 1)`.
    pub fn check_step(&self, phase: &Phase) -> Result<()> {
        let rate = phase
            .control_rate(self.basis.n_atoms())?
            .max(self.h_norm)
            .max(1.0);
        let limit = 0.05 / rate;
        if phase.dt > limit * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "{} step {} exceeds the stability limit {limit}",
                phase.kind.name(),
                phase.dt
            )));
        }
        Ok(())
    }

    fn resolve(&self, labels: &[ProjectionLabel]) -> Result<Vec<(usize, &ndarray::Array1<C64>)>> {
        labels
            .iter()
            .map(|label| match *label {
                ProjectionLabel::Single(x) => {
                    check_label(self.modes.len(), x)?;
                    Ok((1, &self.modes[x - 1].amplitudes))
                }
                ProjectionLabel::Pair(a, b) => {
                    let double = self.double.as_deref().ok_or(Error::MissingModes)?;
                    let mode = find_pair(double, a, b).ok_or_else(|| {
                        Error::IndexOutOfRange(format!("no two-excitation mode labelled ({a}, {b})"))
                    })?;
                    Ok((2, &mode.amplitudes))
                }
            })
            .collect()
    }

    /// Integrates `ρ` through `phase` starting at `t0`, appending samples
    /// to `series`.
    pub fn integrate(
        &self,
        rho: &mut DensityMatrix,
        phase: &Phase,
        t0: f64,
        observables: &Observables,
        series: &mut TimeSeries,
    ) -> Result<()> {
        rho.check_basis(&self.basis)?;
        self.check_step(phase)?;
        let targets = self.resolve(&observables.projections)?;
        if series.projections.len() != targets.len() {
            series.projections = observables
                .projections
                .iter()
                .map(|&label| ProjectionTrack {
                    label,
                    values: Vec::new(),
                })
                .collect();
        }
        if series.emission.len() != self.modes.len() {
            series.emission = vec![0.0; self.modes.len()];
        }
        let h = self.phase_hamiltonian(phase)?;
        let n_steps = phase.n_steps();
        if n_steps == 0 {
            return Ok(());
        }
        let dt = phase.duration / n_steps as f64;
        let mut stepper = Rk4::new(self.basis.dim());
        let mut emission_rate = self.emission_rates(rho.matrix());

        for step in 1..=n_steps {
            stepper.step(&self.me, &h, rho.matrix_mut(), dt);
            let t = t0 + step as f64 * dt;
            let trace: f64 = rho.trace();
            if !trace.is_finite() || (trace - 1.0).abs() > TRACE_DRIFT_LIMIT {
                return Err(Error::Stability {
                    time: t,
                    reason: format!("trace drifted to {trace}"),
                });
            }
            if phase.track_emission {
                let next = self.emission_rates(rho.matrix());
                for ((acc, a), b) in series.emission.iter_mut().zip(&emission_rate).zip(&next) {
                    *acc += 0.5 * dt * (a + b);
                }
                emission_rate = next;
            }
            if step % phase.stride == 0 || step == n_steps {
                self.record(rho, &h, t, &targets, series, &mut stepper);
            }
        }
        Ok(())
    }

    fn emission_rates(&self, rho: &Array2<C64>) -> Vec<f64> {
        self.modes
            .iter()
            .map(|m| m.decay * block_expectation(rho, 1, &m.amplitudes))
            .collect()
    }

    fn record(
        &self,
        rho: &DensityMatrix,
        h: &SparseMatrix,
        t: f64,
        targets: &[(usize, &ndarray::Array1<C64>)],
        series: &mut TimeSeries,
        stepper: &mut Rk4,
    ) {
        let m = rho.matrix();
        let pops: Vec<f64> = (0..=self.basis.n_max())
            .map(|k| self.basis.manifold(k).map(|i| m[[i, i]].re).sum())
            .collect();
        self.me.rhs_into(m, h, &mut stepper.work, &mut stepper.k[0]);
        series.gamma.push(decay_from_derivative(m, &stepper.k[0], &self.me));
        series.total_pop.push(pops.iter().enumerate().map(|(k, p)| k as f64 * p).sum());
        series.trace.push(pops.iter().sum());
        series.pop_by_manifold.push(pops);
        series.times.push(t);
        for (track, (k, v)) in series.projections.iter_mut().zip(targets) {
            track.values.push(block_expectation(m, self.basis.manifold(*k).start, v));
        }
    }

    /// Runs a schedule from `rho0`, changing frame at phase boundaries where
    /// the laser frame switches on or off.
    pub fn run(
        &self,
        schedule: &ProtocolSchedule,
        rho0: DensityMatrix,
        observables: &Observables,
    ) -> Result<ProtocolRun> {
        schedule.validate()?;
        let mut rho = rho0;
        rho.check_basis(&self.basis)?;
        let mut series = TimeSeries::default();
        let targets = self.resolve(&observables.projections)?;
        series.projections = observables
            .projections
            .iter()
            .map(|&label| ProjectionTrack {
                label,
                values: Vec::new(),
            })
            .collect();
        series.emission = vec![0.0; self.modes.len()];
        let first_h = match schedule.phases.first() {
            Some(p) => self.phase_hamiltonian(p)?,
            None => self.h_eff.clone(),
        };
        let mut scratch = Rk4::new(self.basis.dim());
        self.record(&rho, &first_h, 0.0, &targets, &mut series, &mut scratch);

        let mut frame = schedule.phases.first().map_or(0.0, Phase::frame_frequency);
        let mut t = 0.0;
        for phase in &schedule.phases {
            let next_frame = phase.frame_frequency();
            if next_frame != frame {
                rho.rotate_frame(&self.basis, (frame - next_frame) * t);
                frame = next_frame;
            }
            let first_sample = series.len();
            self.integrate(&mut rho, phase, t, observables, &mut series)?;
            series.phases.push(PhaseMarker {
                kind: phase.kind,
                start: t,
                end: t + phase.duration,
                first_sample,
            });
            t += phase.duration;
        }
        Ok(ProtocolRun {
            series,
            final_state: rho,
            final_frame: frame,
        })
    }
}

/// Builds the simulation and runs `schedule` from the ground state.
pub fn run_protocol(
    schedule: &ProtocolSchedule,
    geometry: &ChainGeometry,
    n_max: usize,
    observables: &Observables,
) -> Result<ProtocolRun> {
    let mut sim = Simulation::new(geometry, n_max)?;
    if observables
        .projections
        .iter()
        .any(|p| matches!(p, ProjectionLabel::Pair(..)))
    {
        sim = sim.with_double_modes()?;
    }
    let rho0 = DensityMatrix::ground(sim.basis());
    sim.run(schedule, rho0, observables)
}

/// Fixed-step RK4 workspace for the matrix ODE.
struct Rk4 {
    k: [Array2<C64>; 4],
    stage: Array2<C64>,
    work: Array2<C64>,
}

impl Rk4 {
    fn new(d: usize) -> Self {
        let z = || Array2::zeros((d, d));
        Rk4 {
            k: [z(), z(), z(), z()],
            stage: z(),
            work: z(),
        }
    }

    fn step(&mut self, me: &MasterEquation, h: &SparseMatrix, rho: &mut Array2<C64>, dt: f64) {
        let half = C64::new(0.5 * dt, 0.0);
        let full = C64::new(dt, 0.0);
        let [k1, k2, k3, k4] = &mut self.k;
        me.rhs_into(rho, h, &mut self.work, k1);
        Zip::from(&mut self.stage).and(&*rho).and(&*k1).for_each(|s, &r, &k| *s = r + half * k);
        me.rhs_into(&self.stage, h, &mut self.work, k2);
        Zip::from(&mut self.stage).and(&*rho).and(&*k2).for_each(|s, &r, &k| *s = r + half * k);
        me.rhs_into(&self.stage, h, &mut self.work, k3);
        Zip::from(&mut self.stage).and(&*rho).and(&*k3).for_each(|s, &r, &k| *s = r + full * k);
        me.rhs_into(&self.stage, h, &mut self.work, k4);
        let sixth = dt / 6.0;
        Zip::from(&mut *rho)
            .and(&*k1)
            .and(&*k2)
            .and(&*k3)
            .and(&*k4)
            .for_each(|r, &a, &b, &c, &d| *r += (a + 2.0 * (b + c) + d) * sixth);
        hermitize(rho);
    }
}
