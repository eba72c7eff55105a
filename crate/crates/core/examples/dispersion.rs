//! Single-excitation modes of a 100-atom chain next to the infinite-chain
//! dispersion relation.

use subradiant_chain::lattice_green::{coupling_matrices, ChainGeometry};
use subradiant_chain::modes::{analytic_dispersion, kz_of_mode, single_modes};
use subradiant_chain::K0;

fn main() -> subradiant_chain::Result<()> {
    let (n, a) = (100, 0.35);
    let modes = single_modes(&coupling_matrices(&ChainGeometry::new(n, a)?))?;
    println!("{:>4} {:>8} {:>12} {:>12} {:>12} {:>12}", "ξ", "kz/k0", "ω", "ω (∞)", "Γ", "Γ (∞)");
    for m in modes.iter().step_by(9) {
        let kz = kz_of_mode(n, a, m.label)?;
        let (gamma, omega) = analytic_dispersion(kz, a)?;
        println!(
            "{:>4} {:>8.4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            m.label,
            kz / K0,
            m.shift,
            omega,
            m.decay,
            gamma
        );
    }
    Ok(())
}
