//! Two-excitation eigenmodes of a short chain and their fermionic labels.

use subradiant_chain::fock_space::TruncatedBasis;
use subradiant_chain::lattice_green::{coupling_matrices, ChainGeometry};
use subradiant_chain::modes::double_modes;

fn main() -> subradiant_chain::Result<()> {
    let n = 10;
    let coupling = coupling_matrices(&ChainGeometry::new(n, 0.35)?);
    let modes = double_modes(&coupling, &TruncatedBasis::new(n, 2)?)?;
    println!("{:>4} {:>8} {:>8} {:>12} {:>10}", "rank", "pair", "overlap", "Γ", "ω");
    for m in modes.iter().take(8).chain(modes.iter().rev().take(3)) {
        println!(
            "{:>4} {:>8} {:>8.3}{} {:>11.4e} {:>10.4}",
            m.rank,
            format!("({},{})", m.pair_label.0, m.pair_label.1),
            m.label_overlap,
            if m.is_ambiguous() { "?" } else { " " },
            m.decay,
            m.shift
        );
    }
    Ok(())
}
