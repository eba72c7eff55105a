//! Far field of the chain after the first emission transfer, compared with
//! the cone angle of the targeted mode.

use subradiant_chain::cli::cmd_radiation;
use subradiant_chain::config::RunConfig;

fn main() -> subradiant_chain::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.schedule.storage_time = 20.0;
    cfg.schedule.n_cycles = 1;
    cfg.radiation.grid.n_phi = 9;
    let table = &cmd_radiation(&cfg, None)?[0];
    let theta = table.column("theta").unwrap();
    let intensity = table.column("intensity").unwrap();
    // one azimuth suffices: the pattern is symmetric about the chain
    for (th, i) in theta.iter().zip(&intensity).step_by(cfg.radiation.grid.n_phi * 10) {
        println!("θ = {:6.1}°  I = {:.4} {}", th.to_degrees(), i, "#".repeat((40.0 * i) as usize));
    }
    for (k, v) in &table.summary {
        println!("{k} = {v}");
    }
    Ok(())
}
