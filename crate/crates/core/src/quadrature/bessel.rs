//! Bessel functions of the first kind J_ν for ν ∈ {0, ½, 1, …, 4}.
//!
//! Half-integer orders use the closed trigonometric forms
//! J_(l+½)(x) = √(2x/π)·j_l(x) for x ≥ 4 and the power series below.
//! Integer orders use the power series below [`SERIES_SWITCH`] and the
//! Hankel asymptotic expansion above it.

use std::f64::consts::PI;

/// Orders are passed as 2ν; the largest supported is ν = 4.
pub const MAX_TWICE_ORDER: u32 = 8;

/// Series/asymptotic switch point for integer orders.
pub const SERIES_SWITCH: f64 = 12.0;

const HALF_ORDER_SERIES_BELOW: f64 = 4.0;

/// J_ν(x) with ν = `twice_order`/2, for x ≥ 0.
pub fn bessel_j(twice_order: u32, x: f64) -> f64 {
    assert!(
        twice_order <= MAX_TWICE_ORDER,
        "Bessel order {}/2 not supported",
        twice_order
    );
    assert!(x >= 0.0, "Bessel argument must be nonnegative");
    if twice_order % 2 == 1 {
        if x < HALF_ORDER_SERIES_BELOW {
            bessel_j_series(twice_order, x)
        } else {
            half_order_closed(twice_order / 2, x)
        }
    } else if x < SERIES_SWITCH {
        bessel_j_series(twice_order, x)
    } else {
        bessel_j_asymptotic(twice_order, x)
    }
}

/// Σ_j (−1)^j (x/2)^(2j+ν) / (j! Γ(j+ν+1)).
pub fn bessel_j_series(twice_order: u32, x: f64) -> f64 {
    let nu = twice_order as f64 / 2.0;
    if x == 0.0 {
        return if twice_order == 0 { 1.0 } else { 0.0 };
    }
    let half = x / 2.0;
    let mut term = half.powf(nu) / gamma_half_integer(twice_order + 2);
    let mut sum = term;
    let q = half * half;
    for j in 1..300 {
        let jf = j as f64;
        term *= -q / (jf * (jf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && jf > q.sqrt() {
            break;
        }
    }
    sum
}

/// Hankel expansion √(2/(πx))·(P cos ω − Q sin ω), ω = x − νπ/2 − π/4,
/// summed until the terms stop decreasing.
pub fn bessel_j_asymptotic(twice_order: u32, x: f64) -> f64 {
    let nu = twice_order as f64 / 2.0;
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (kf * 8.0 * x);
        if next == 0.0 {
            break;
        }
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        // t_k enters P (even k) or Q (odd k) with sign (−1)^⌊k/2⌋
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let omega = x - nu * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

fn half_order_closed(l: u32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let j = match l {
        0 => s / x,
        1 => s / (x * x) - c / x,
        2 => (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x),
        3 => (15.0 / (x * x * x) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x,
        _ => unreachable!("half-integer order above 7/2"),
    };
    (2.0 * x / PI).sqrt() * j
}

/// Γ(t/2) for positive integer t.
fn gamma_half_integer(twice_arg: u32) -> f64 {
    let mut g = if twice_arg % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut t = if twice_arg % 2 == 0 { 2 } else { 1 };
    while t < twice_arg {
        g *= t as f64 / 2.0;
        t += 2;
    }
    g
}
