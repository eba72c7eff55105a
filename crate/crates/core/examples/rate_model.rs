//! Three-state cascade for the last two survivors of the storage phase.

use subradiant_chain::lattice_green::ChainGeometry;
use subradiant_chain::rate_model::{evolve_rate_model, gamma_closed_form, RateModelConfig};

fn main() -> subradiant_chain::Result<()> {
    let geometry = ChainGeometry::new(12, 0.35)?;
    let cfg = RateModelConfig::from_geometry(&geometry, 0.6)?;
    let kappa = cfg.gamma12 / cfg.gamma1;
    println!(
        "Γ₁ = {:.4e}, Γ₂ = {:.4e}, Γ₁₂ = {:.4e} (κ = {kappa:.2}), branches {:.3e} / {:.3e}",
        cfg.gamma1, cfg.gamma2, cfg.gamma12, cfg.branch1, cfg.branch2
    );
    for t in [0.0, 10.0, 50.0, 100.0, 200.0, 400.0, 800.0] {
        let s = evolve_rate_model(&cfg, t)?;
        println!(
            "t = {t:5}  pair = {:.3e}  ψ₁ = {:.3e}  ψ₂ = {:.3e}  γ/Γ₁ (closed form) = {:.3}",
            s.pair,
            s.single1,
            s.single2,
            gamma_closed_form(0.6, cfg.gamma1, kappa, t) / cfg.gamma1
        );
    }
    Ok(())
}
