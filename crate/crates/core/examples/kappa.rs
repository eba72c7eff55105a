//! Ratio κ = Γ₍₁,₂₎ / Γ₁ of the most subradiant pair to the most subradiant
//! single mode, over chain length and spacing.

use subradiant_chain::fock_space::TruncatedBasis;
use subradiant_chain::lattice_green::ChainGeometry;
use subradiant_chain::rate_model::kappa_ratio;

fn main() -> subradiant_chain::Result<()> {
    let spacings = [0.2, 0.3, 0.35, 0.4];
    print!("{:>4}", "N");
    for a in spacings {
        print!(" {a:>8}");
    }
    println!();
    for n in (6..=20).step_by(2) {
        print!("{n:>4}");
        let basis = TruncatedBasis::new(n, 2)?;
        for a in spacings {
            print!(" {:>8.2}", kappa_ratio(&ChainGeometry::new(n, a)?, &basis)?);
        }
        println!();
    }
    Ok(())
}
