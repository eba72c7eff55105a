use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DetuningPattern, DriveConfig, DriveProfile};
use crate::modes::{check_label, CollectiveMode};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseKind {
    Illumination,
    StaggeredTransfer,
    Storage,
    EmissionTransfer,
    FreeEvolution,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Illumination => "illumination",
            PhaseKind::StaggeredTransfer => "staggered-transfer",
            PhaseKind::Storage => "storage",
            PhaseKind::EmissionTransfer => "emission-transfer",
            PhaseKind::FreeEvolution => "free-evolution",
        }
    }
}

/// One segment of a protocol: the extra terms on top of `H_eff`, its
/// duration and the integration settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub duration: f64,
    /// Requested RK4 step; the actual step divides the duration evenly.
    pub dt: f64,
    /// Record a sample every `stride` steps (and at the phase end).
    pub stride: usize,
    pub drive: Option<DriveConfig>,
    pub detuning: Option<DetuningPattern>,
    /// Accumulate per-mode emitted population during this phase.
    pub track_emission: bool,
}

impl Phase {
    pub fn new(kind: PhaseKind, duration: f64, dt: f64) -> Self {
        Phase {
            kind,
            duration,
            dt,
            stride: 1,
            drive: None,
            detuning: None,
            track_emission: false,
        }
    }

    /// Frequency of the frame the phase is integrated in, relative to the
    /// atomic transition.
    pub fn frame_frequency(&self) -> f64 {
        self.drive.as_ref().map_or(0.0, |d| d.detuning)
    }

    /// Fastest rate the step must resolve, besides `H_eff` itself.
    pub(crate) fn control_rate(&self, n_atoms: usize) -> Result<f64> {
        let drive = self
            .drive
            .as_ref()
            .map_or(0.0, |d| d.rabi.max(d.detuning.abs()));
        let pvd = match &self.detuning {
            Some(p) => p.max_abs(n_atoms)?,
            None => 0.0,
        };
        Ok(drive.max(pvd))
    }

    pub(crate) fn n_steps(&self) -> usize {
        if self.duration <= 0.0 {
            return 0;
        }
        (self.duration / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// Timed sequence of phases, contiguous from `t = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSchedule {
    pub phases: Vec<Phase>,
}

/// Integration step per kind of phase; `None` uses the default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSizes {
    /// Default `0.02 / max(Ω, |Δ₀|)`.
    pub drive: Option<f64>,
    /// Default `0.02 / Δ`.
    pub transfer: Option<f64>,
    /// Default `0.02`.
    pub free: Option<f64>,
}

/// Parameters of the excite → transfer → store → emit protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub rabi: f64,
    /// Illumination area `Ω t₁`.
    pub omega_t1: f64,
    pub profile: DriveProfile,
    /// PVD amplitude `Δ`.
    pub delta: f64,
    pub storage_time: f64,
    pub n_cycles: usize,
    pub xi_aim: Option<usize>,
    /// Default `π / (3Δ)`.
    pub cycle_transfer: Option<f64>,
    /// Default `2 / Γ_{ξ_aim}`.
    pub cycle_free: Option<f64>,
    pub steps: StepSizes,
    /// Time between recorded samples during storage and free flight.
    pub sample_interval: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            rabi: 100.0,
            omega_t1: 0.6,
            profile: DriveProfile::SuperradiantShaped,
            delta: 100.0,
            storage_time: 0.0,
            n_cycles: 0,
            xi_aim: None,
            cycle_transfer: None,
            cycle_free: None,
            steps: StepSizes::default(),
            sample_interval: 0.5,
        }
    }
}

impl ProtocolSchedule {
    /// Illumination (`t₁ = Ωt₁/Ω`, laser resonant with the most superradiant
    /// mode), staggered transfer (`π/(2Δ)`), storage, then `N_c` emission
    /// cycles of sinusoidal transfer and free flight.
    pub fn canonical(params: &ProtocolParams, modes: &[CollectiveMode]) -> Result<Self> {
        let n = modes.len();
        if n == 0 {
            return Err(Error::MissingModes);
        }
        for (name, v) in [("rabi", params.rabi), ("delta", params.delta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(params.omega_t1 >= 0.0) || !(params.storage_time >= 0.0) {
            return Err(Error::Config("durations must be non-negative".into()));
        }
        if !(params.sample_interval > 0.0) {
            return Err(Error::Config("sample_interval must be positive".into()));
        }
        let detuning = modes[n - 1].shift;
        let dt_drive = params
            .steps
            .drive
            .unwrap_or(0.02 / params.rabi.max(detuning.abs()));
        let dt_transfer = params.steps.transfer.unwrap_or(0.02 / params.delta);
        let dt_free = params.steps.free.unwrap_or(0.02);
        let free_stride = ((params.sample_interval / dt_free).round() as usize).max(1);

        let mut phases = Vec::new();
        let mut illumination = Phase::new(PhaseKind::Illumination, params.omega_t1 / params.rabi, dt_drive);
        illumination.drive = Some(DriveConfig {
            rabi: params.rabi,
            detuning,
            profile: params.profile.clone(),
        });
        phases.push(illumination);

        let mut transfer = Phase::new(PhaseKind::StaggeredTransfer, PI / (2.0 * params.delta), dt_transfer);
        transfer.detuning = Some(DetuningPattern::Staggered {
            amplitude: params.delta,
        });
        phases.push(transfer);

        let mut storage = Phase::new(PhaseKind::Storage, params.storage_time, dt_free);
        storage.stride = free_stride;
        phases.push(storage);

        if params.n_cycles > 0 {
            let xi_aim = params
                .xi_aim
                .ok_or_else(|| Error::Config("emission cycles need xi_aim".into()))?;
            check_label(n, xi_aim)?;
            let gamma_aim = modes[xi_aim - 1].decay;
            let t_transfer = params.cycle_transfer.unwrap_or(PI / (3.0 * params.delta));
            let t_free = match params.cycle_free {
                Some(t) => t,
                None if gamma_aim > 0.0 => 2.0 / gamma_aim,
                None => {
                    return Err(Error::Config(format!(
                        "mode {xi_aim} does not radiate; set cycle_free explicitly"
                    )))
                }
            };
            for _ in 0..params.n_cycles {
                let mut push = Phase::new(PhaseKind::EmissionTransfer, t_transfer, dt_transfer);
                push.detuning = Some(DetuningPattern::Sinusoidal {
                    amplitude: params.delta,
                    xi_aim,
                });
                push.track_emission = true;
                phases.push(push);
                let mut fly = Phase::new(PhaseKind::FreeEvolution, t_free, dt_free);
                fly.stride = free_stride;
                fly.track_emission = true;
                phases.push(fly);
            }
        }
        Ok(ProtocolSchedule { phases })
    }

    pub fn total_duration(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// `[start, end]` of every phase.
    pub fn windows(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        self.phases
            .iter()
            .map(|p| {
                let w = (t, t + p.duration);
                t += p.duration;
                w
            })
            .collect()
    }

    /// Start time of the first phase of a kind.
    pub fn start_of(&self, kind: PhaseKind) -> Option<f64> {
        self.phases
            .iter()
            .zip(self.windows())
            .find(|(p, _)| p.kind == kind)
            .map(|(_, w)| w.0)
    }

    /// The schedule cut at time `t`.
    pub fn truncated(&self, t: f64) -> Result<Self> {
        let total = self.total_duration();
        if !(0.0..=total + 1e-12).contains(&t) {
            return Err(Error::Config(format!(
                "time {t} outside the schedule [0, {total}]"
            )));
        }
        let mut phases = Vec::new();
        for (p, (start, end)) in self.phases.iter().zip(self.windows()) {
            if start >= t {
                break;
            }
            let mut q = p.clone();
            q.duration = end.min(t) - start;
            phases.push(q);
        }
        Ok(ProtocolSchedule { phases })
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.phases.iter().enumerate() {
            if !(p.duration >= 0.0) || !p.duration.is_finite() {
                return Err(Error::Config(format!("phase {i} has duration {}", p.duration)));
            }
            if !(p.dt > 0.0) {
                return Err(Error::Config(format!("phase {i} has step {}", p.dt)));
            }
            if p.stride == 0 {
                return Err(Error::Config(format!("phase {i} has zero stride")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_green::{coupling_matrices, ChainGeometry};
    use crate::modes::single_modes;

    fn modes(n: usize) -> Vec<CollectiveMode> {
        single_modes(&coupling_matrices(&ChainGeometry::new(n, 0.35).unwrap())).unwrap()
    }

    #[test]
    fn canonical_layout() {
        let m = modes(10);
        let params = ProtocolParams {
            storage_time: 30.0,
            n_cycles: 5,
            xi_aim: Some(8),
            ..ProtocolParams::default()
        };
        let s = ProtocolSchedule::canonical(&params, &m).unwrap();
        assert_eq!(s.phases.len(), 3 + 2 * 5);
        assert!((s.phases[0].duration - 0.006).abs() < 1e-15);
        assert!((s.phases[1].duration - PI / 200.0).abs() < 1e-15);
        assert!((s.phases[3].duration - PI / 300.0).abs() < 1e-15);
        assert!((s.phases[4].duration - 2.0 / m[7].decay).abs() < 1e-12);
        assert_eq!(s.phases[0].drive.as_ref().unwrap().detuning, m[9].shift);
        let w = s.windows();
        for pair in w.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
        assert_eq!(s.start_of(PhaseKind::Storage), Some(w[2].0));
    }

    #[test]
    fn truncation_cuts_inside_a_phase() {
        let m = modes(6);
        let params = ProtocolParams {
            storage_time: 10.0,
            ..ProtocolParams::default()
        };
        let s = ProtocolSchedule::canonical(&params, &m).unwrap();
        let t = s.windows()[2].0 + 4.0;
        let cut = s.truncated(t).unwrap();
        assert_eq!(cut.phases.len(), 3);
        assert!((cut.total_duration() - t).abs() < 1e-12);
        assert!(s.truncated(1e3).is_err());
    }

    #[test]
    fn cycles_need_a_target() {
        let params = ProtocolParams {
            n_cycles: 2,
            ..ProtocolParams::default()
        };
        assert!(ProtocolSchedule::canonical(&params, &modes(4)).is_err());
    }
}
