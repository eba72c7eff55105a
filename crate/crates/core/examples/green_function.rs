//! Dipole-dipole couplings along the chain from the free-space Green tensor.

use subradiant_chain::lattice_green::{coupling_matrices, dyadic_green, ChainGeometry};

fn main() -> subradiant_chain::Result<()> {
    let g = dyadic_green([0.0; 3], [0.0, 0.0, 0.35])?;
    println!("G_zz(a = 0.35 λ) = {}", g[2][2]);
    let c = coupling_matrices(&ChainGeometry::new(6, 0.35)?);
    println!("\n{:>3} {:>12} {:>12}", "|m-n|", "J_1n", "Γ_1n");
    for n in 0..6 {
        println!("{n:>5} {:>12.5} {:>12.5}", c.h_eff_single[[0, n]].re, c.decay[[0, n]]);
    }
    Ok(())
}
