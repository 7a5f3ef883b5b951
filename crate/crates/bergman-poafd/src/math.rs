//! Small numerical helpers shared across modules.

/// Rising factorial s (s+1) ... (s+m-1); empty product for m = 0.
pub fn rising(s: f64, m: u32) -> f64 {
    let mut p = 1.0;
    for j in 0..m {
        p *= s + j as f64;
    }
    p
}

/// Falling factorial n (n-1) ... (n-m+1); zero when m exceeds n.
pub fn falling(n: u32, m: u32) -> f64 {
    if m > n {
        return 0.0;
    }
    let mut p = 1.0;
    for j in 0..m {
        p *= (n - j) as f64;
    }
    p
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut p = 1.0;
    for j in 0..k {
        p *= (n - j) as f64 / (j + 1) as f64;
    }
    p
}

pub fn factorial(n: u32) -> f64 {
    rising(1.0, n)
}

/// Log-Gamma via the Lanczos approximation (g = 7, 9 terms), reflected for
/// arguments below 1/2. Relative accuracy is near machine precision, which
/// keeps Gamma-ratio weights meaningful for indices around 10^4 without
/// overflow.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    // published digits, a couple beyond f64
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::NAN;
    }
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI / (s * gamma(1.0 - x));
    }
    ln_gamma(x).exp()
}

/// SplitMix64 step: deterministic scatter without pulling in an RNG crate.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rising_and_falling() {
        assert_eq!(rising(2.0, 0), 1.0);
        assert_eq!(rising(2.0, 3), 2.0 * 3.0 * 4.0);
        assert_eq!(falling(5, 2), 20.0);
        assert_eq!(falling(2, 3), 0.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(factorial(5), 120.0);
    }

    #[test]
    fn ln_gamma_matches_known_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(10.5) - 13.940_625_219_403_763).abs() < 1e-10);
        // ratio used by coefficient weights: k! Gamma(a+2) / Gamma(k+a+2)
        let a = 1.5_f64;
        let k = 10_000u32;
        let w = (ln_gamma(k as f64 + 1.0) + ln_gamma(a + 2.0) - ln_gamma(k as f64 + a + 2.0)).exp();
        // recurrence w_k = w_{k-1} k / (k + 1 + a) is exact up to rounding
        let mut wr = 1.0;
        for j in 1..=k {
            wr *= j as f64 / (j as f64 + 1.0 + a);
        }
        assert!((w - wr).abs() / wr < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(12);
        // degree 2n-1 = 23 is integrated exactly; check x^22 over [-1,1]
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(22)).sum();
        assert!((val - 2.0 / 23.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_large_rule_is_sane() {
        let (x, w) = gauss_legendre(200);
        assert_eq!(x.len(), 200);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }
}
