use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Riemann zeta at integer arguments `s ≥ 2`.
fn zeta_int(s: u32) -> f64 {
    match s {
        2 => PI * PI / 6.0,
        3 => 1.202_056_903_159_594_3,
        4 => PI.powi(4) / 90.0,
        6 => PI.powi(6) / 945.0,
        8 => PI.powi(8) / 9450.0,
        10 => PI.powi(10) / 93555.0,
        _ => {
            // n^-s with s ≥ 5: a short direct sum is exact to double precision
            (1..=60).rev().map(|n| (n as f64).powi(-(s as i32))).sum()
        }
    }
}

/// Polylogarithm `Li_s(z) = Σ_{l≥1} z^l / l^s` for `s ∈ {2, 3}` on the closed
/// unit disc.
///
/// Small `|z|` uses the defining series; elsewhere the expansion in
/// `μ = ln z` (convergent for `|μ| < 2π`) handles the unit circle, where the
/// defining series converges too slowly.
pub fn polylog(s: u32, z: C64) -> Result<C64> {
    if !(2..=3).contains(&s) {
        return Err(Error::Domain(format!("polylog order {s} not in {{2, 3}}")));
    }
    let r = z.norm();
    if !r.is_finite() || r > 1.0 + 1e-14 {
        return Err(Error::Domain(format!("polylog argument |z| = {r} > 1")));
    }
    if r <= 0.5 {
        return Ok(direct_series(s, z));
    }
    if (z - 1.0).norm() == 0.0 {
        return Ok(C64::new(zeta_int(s), 0.0));
    }
    Ok(log_series(s, z.ln()))
}

fn direct_series(s: u32, z: C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut power = z;
    for l in 1..200 {
        let term = power / (l as f64).powi(s as i32);
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
        power *= z;
    }
    sum
}

fn log_series(s: u32, mu: C64) -> C64 {
    let s_minus_1 = (s - 1) as i32;
    let harmonic = if s == 2 { 1.0 } else { 1.5 };
    let factorial = if s == 2 { 1.0 } else { 2.0 };
    let mut sum = mu.powi(s_minus_1) / factorial * (harmonic - (-mu).ln());

    // k < s - 1: ζ(s), and ζ(2)μ for s = 3
    sum += zeta_int(s);
    if s == 3 {
        sum += mu * zeta_int(2);
    }
    // k = s: ζ(0) = -1/2
    sum += -0.5 * mu.powi(s as i32) / if s == 2 { 2.0 } else { 6.0 };
    // k = s - 1 + 2m, m ≥ 1: ζ(1-2m) = (-1)^m 2 (2m-1)! ζ(2m) / (2π)^{2m};
    // even negative arguments vanish.
    let x2 = (mu / (2.0 * PI)).powi(2);
    let mut x_pow = C64::new(1.0, 0.0);
    let base = mu.powi(s_minus_1);
    for m in 1..200u32 {
        x_pow *= x2;
        let two_m = 2.0 * m as f64;
        let falling: f64 = (0..s).map(|j| two_m + j as f64).product();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = base * x_pow * (sign * 2.0 * zeta_int(2 * m) / falling);
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    sum
}
