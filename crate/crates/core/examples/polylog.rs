//! Polylogarithms on and inside the unit circle.

use std::f64::consts::PI;

use subradiant_chain::modes::polylog;
use subradiant_chain::C64;

fn main() -> subradiant_chain::Result<()> {
    // Li₂(1) = π²/6, Li₃(-1) = -3ζ(3)/4
    println!("Li₂(1)  = {:.15} (π²/6 = {:.15})", polylog(2, C64::new(1.0, 0.0))?.re, PI * PI / 6.0);
    println!("Li₃(-1) = {:.15} (-3ζ(3)/4 = {:.15})", polylog(3, C64::new(-1.0, 0.0))?.re, -0.75 * 1.202_056_903_159_594);
    for theta in [0.3, 1.0, 2.5] {
        let z = C64::from_polar(1.0, theta);
        // Re Li₂(e^{iθ}) = π²/6 - θ(2π - θ)/4
        let exact = PI * PI / 6.0 - theta * (2.0 * PI - theta) / 4.0;
        println!("Re Li₂(e^{{i{theta}}}) = {:.15} (closed form {exact:.15})", polylog(2, z)?.re);
    }
    println!("Li₃(0.4 + 0.3i) = {}", polylog(3, C64::new(0.4, 0.3))?);
    Ok(())
}
