//! Excite → transfer → store for a chain (default 20 atoms) and print the
//! populations and decay rate at the phase boundaries.
//!
//! `cargo run --release --example protocol -- [N] [storage time]`

use std::time::Instant;

use subradiant_chain::dynamics::{run_protocol, Observables, ProjectionLabel, ProtocolParams, ProtocolSchedule};
use subradiant_chain::lattice_green::{coupling_matrices, ChainGeometry};
use subradiant_chain::modes::single_modes;

fn main() -> subradiant_chain::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let storage: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(100.0);
    let geometry = ChainGeometry::new(n, 0.35)?;
    let modes = single_modes(&coupling_matrices(&geometry))?;
    let params = ProtocolParams {
        storage_time: storage,
        ..ProtocolParams::default()
    };
    let schedule = ProtocolSchedule::canonical(&params, &modes)?;
    let obs = Observables {
        projections: vec![ProjectionLabel::Single(1), ProjectionLabel::Single(n)],
    };
    let start = Instant::now();
    let run = run_protocol(&schedule, &geometry, 2, &obs)?;
    let s = &run.series;
    println!("{n} atoms, {} samples in {:.1?}; Γ₁ = {:.4e}", s.len(), start.elapsed(), modes[0].decay);
    let mut checkpoints: Vec<f64> = schedule.windows().iter().map(|w| w.1).collect();
    checkpoints.insert(2, schedule.windows()[1].1 + storage / 2.0);
    for t in checkpoints {
        let i = s.sample_index(t).unwrap();
        println!(
            "t = {:8.3}  pop = {:.5}  γ = {:>10}  ψ₁ = {:.5}  ψ_N = {:.5}",
            s.times[i],
            s.total_pop[i],
            s.gamma[i].map_or("-".into(), |g| format!("{g:.4e}")),
            s.projection(ProjectionLabel::Single(1)).unwrap()[i],
            s.projection(ProjectionLabel::Single(n)).unwrap()[i],
        );
    }
    Ok(())
}
