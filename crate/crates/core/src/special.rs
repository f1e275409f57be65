//! Riemann and half-integer Hurwitz zeta values needed by the endpoint
//! corrections of the radial quadrature.

use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Riemann zeta for real `s != 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s == 0.0 {
        return -0.5;
    }
    if s < 0.0 {
        // reflection: zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)
        return 2f64.powf(s)
            * PI.powf(s - 1.0)
            * (PI * s / 2.0).sin()
            * gamma(1.0 - s)
            * riemann_zeta(1.0 - s);
    }
    borwein(s)
}

/// Borwein's alternating-series acceleration, used for s > 0.
fn borwein(s: f64) -> f64 {
    const N: usize = 40;
    let n = N as f64;
    let mut d = [0.0f64; N + 1];
    let mut acc = 0.0;
    for (i, slot) in d.iter_mut().enumerate() {
        let i_f = i as f64;
        // term_i = n (n+i-1)! 4^i / ((n-i)! (2i)!), accumulated in log space
        let log_term =
            n.ln() + ln_fact(N + i - 1) - ln_fact(N - i) - ln_fact(2 * i) + i_f * 4f64.ln();
        acc += if i == 0 { 1.0 } else { log_term.exp() };
        *slot = acc;
    }
    let dn = d[N];
    let mut sum = 0.0;
    for k in 0..N {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - dn) / ((k + 1) as f64).powf(s);
    }
    -sum / (dn * (1.0 - 2f64.powf(1.0 - s)))
}

fn ln_fact(k: usize) -> f64 {
    statrs::function::factorial::ln_factorial(k as u64)
}

/// Hurwitz zeta at shift 1/2: `zeta(s, 1/2) = (2^s - 1) zeta(s)`.
pub fn hurwitz_zeta_half(s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    (2f64.powf(s) - 1.0) * riemann_zeta(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((riemann_zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((riemann_zeta(0.0) + 0.5).abs() < 1e-14);
        assert!((riemann_zeta(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        assert!((riemann_zeta(-3.0) - 1.0 / 120.0).abs() < 1e-14);
        assert!(riemann_zeta(-2.0).abs() < 1e-14);
        assert!((riemann_zeta(0.5) + 1.4603545088095868).abs() < 1e-13);
    }

    #[test]
    fn half_shift_matches_bernoulli() {
        // zeta(-1, 1/2) = -B_2(1/2)/2 = 1/24
        assert!((hurwitz_zeta_half(-1.0) - 1.0 / 24.0).abs() < 1e-14);
        // zeta(-3, 1/2) = -B_4(1/2)/4 = -7/960
        assert!((hurwitz_zeta_half(-3.0) + 7.0 / 960.0).abs() < 1e-14);
    }
}
