//! Independent special-function oracles for tests.
#![allow(dead_code)]

/// Lanczos approximation (g = 7, 9 terms) of `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `log ‖σ_0^m‖²` on the round sphere with `N` orbitals:
/// `2π (N/2) ∫_0^N u^{m−1/2}(N−u)^{N−m−3/2} du`.
pub fn sphere_norm_log(n: u32, m: u32) -> f64 {
    let (n, m) = (f64::from(n), f64::from(m));
    let (alpha, beta) = (m - 0.5, n - m - 1.5);
    (2.0 * std::f64::consts::PI).ln()
        + (n / 2.0).ln()
        + (alpha + beta + 1.0) * n.ln()
        + ln_beta(alpha + 1.0, beta + 1.0)
}

/// `log ‖σ_0^m‖²` on the flat plane:
/// `2π ∫_0^∞ (2u)^{m−1/2} e^{−u+1/2} du = 2π e^{1/2} 2^{m−1/2} Γ(m + 1/2)`.
pub fn plane_norm_log(m: u32) -> f64 {
    let m = f64::from(m);
    (2.0 * std::f64::consts::PI).ln() + 0.5 + (m - 0.5) * 2f64.ln() + ln_gamma(m + 0.5)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
