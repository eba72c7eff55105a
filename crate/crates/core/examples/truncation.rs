//! Excitation-number truncation n_max = 1, 2, 3 on a 10-atom chain.

use subradiant_chain::cli::cmd_validate_truncation;
use subradiant_chain::config::RunConfig;

fn main() -> subradiant_chain::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.geometry.n_atoms = 10;
    cfg.drive.omega_t1 = 0.8;
    cfg.schedule.storage_time = 100.0;
    let table = &cmd_validate_truncation(&cfg)?[0];
    let t = table.column("t").unwrap();
    let pops: Vec<Vec<f64>> = ["pop_n1", "pop_n2", "pop_n3"].iter().map(|c| table.column(c).unwrap()).collect();
    for target in [0.004, 0.008, 0.02, 5.0, 20.0, 50.0, 100.0] {
        let i = t.iter().position(|&x| x >= target).unwrap_or(t.len() - 1);
        println!(
            "t = {:8.4}  Pop(n_max=1) = {:.4}  Pop(2) = {:.4}  Pop(3) = {:.4}",
            t[i], pops[0][i], pops[1][i], pops[2][i]
        );
    }
    for (k, v) in &table.summary {
        println!("{k} = {v}");
    }
    Ok(())
}
