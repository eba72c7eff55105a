//! Transition time into the single-excitation decay regime for a few small
//! chains, against the rate-model estimate.

use subradiant_chain::cli::storage_analysis;
use subradiant_chain::config::RunConfig;
use subradiant_chain::lattice_green::ChainGeometry;
use subradiant_chain::rate_model::{alpha1_fit, alpha1_sizes, fit_power_law};

fn main() -> subradiant_chain::Result<()> {
    let cfg = RunConfig::default();
    let alpha1 = alpha1_fit(0.35, &alpha1_sizes())?;
    println!("α₁ = {alpha1:.3}");
    let (mut ns, mut ts) = (Vec::new(), Vec::new());
    for n in [4, 6, 8, 10] {
        let o = storage_analysis(&cfg, &ChainGeometry::new(n, 0.35)?, 0.6, alpha1)?;
        println!(
            "N = {n:>2}  κ = {:6.2}  t_tr = {:>7}  formula = {:>7}  settled = {}",
            o.kappa,
            o.t_tr.map_or("-".into(), |t| format!("{t:.1}")),
            o.t_tr_formula.map_or("-".into(), |t| format!("{t:.1}")),
            o.settled
        );
        if let Some(t) = o.t_tr {
            ns.push(n as f64);
            ts.push(t);
        }
    }
    let (p, _) = fit_power_law(&ns, &ts)?;
    println!("t_tr ∝ N^{p:.2}");
    Ok(())
}
