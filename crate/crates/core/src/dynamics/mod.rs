//! Drive and detuning Hamiltonians, master-equation integration, the
//! excite → transfer → store → emit protocol and its observables.

mod hamiltonians;
mod observables;
mod schedule;
mod simulate;

pub use hamiltonians::{drive_hamiltonian, pvd_hamiltonian, DetuningPattern, DriveConfig, DriveProfile};
pub use observables::{
    dipole_coherences, excited_population, extract_transition_time, instantaneous_decay,
    manifold_populations, mode_projection, ModeRef,
};
pub use schedule::{Phase, PhaseKind, ProtocolParams, ProtocolSchedule, StepSizes};
pub use simulate::{
    run_protocol, Observables, PhaseMarker, ProjectionLabel, ProjectionTrack, ProtocolRun, Simulation,
    TimeSeries, TRACE_DRIFT_LIMIT,
};
