//! Small numerical helpers: compensated sums, log-space arithmetic and the
//! standard normal distribution.

use core::f64::consts::PI;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = NeumaierSum::new();
    for x in xs {
        s.add(x);
    }
    s.value()
}

/// `log(exp(a) + exp(b))` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// `log Σ exp(x_i)`; returns `-∞` for an empty or all `-∞` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s = neumaier(xs.iter().map(|&x| libm::exp(x - m)));
    m + libm::log(s)
}

pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// `log C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Upper tail `1 - Φ(x)`, accurate for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step against `erfc`.
pub fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    if u > 0.5 {
        return -lower_quantile(1.0 - u);
    }
    lower_quantile(u)
}

// Quantile for u <= 1/2.
fn lower_quantile(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let x = if u < 0.02425 {
        let q = libm::sqrt(-2.0 * libm::log(u));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley refinement on Φ(x) - u.
    let e = normal_cdf(x) - u;
    let g = e * libm::sqrt(2.0 * PI) * libm::exp(0.5 * x * x);
    x - g / (1.0 + 0.5 * x * g)
}

/// Relative deviation of two quantities given the magnitude of the terms that
/// produced them.
pub fn relative_deviation(lhs: f64, rhs: f64, term_scale: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs()).max(term_scale).max(f64::MIN_POSITIVE);
    (lhs - rhs).abs() / scale
}

const STIRLING_ERRORS: [f64; 16] = [
    0.0,
    0.08106146679532725821967,
    0.04134069595540929409382,
    0.02767792568499833914879,
    0.02079067210376509311152,
    0.01664469118982119216319,
    0.01387612882307074799875,
    0.01189670994589177009506,
    0.01041126526197209649748,
    0.009255462182712732917729,
    0.008330563433362871256469,
    0.007573675487951840794972,
    0.006942840107209529865664,
    0.00640899418800420706844,
    0.005951370112758847735624,
    0.005554733551962801371039,
];

/// `log k! - log(√(2πk) (k/e)^k)`.
fn stirling_error(k: u64) -> f64 {
    if k < 16 {
        return STIRLING_ERRORS[k as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let n = k as f64;
    let nn = n * n;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// Deviance term `x log(x/m) + m - x`, accurate when `x ≈ m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return s;
            }
            s = next;
        }
        s
    } else {
        x * libm::log(x / m) + m - x
    }
}

/// Log Poisson probability of `k`, by the saddle-point expansion (a few ulps
/// even for large intensities, unlike `k log ρ - ρ - log k!`).
pub fn ln_poisson_pmf(k: u64, rho: f64) -> f64 {
    if rho == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -rho;
    }
    let x = k as f64;
    -stirling_error(k) - deviance(x, rho) - 0.5 * libm::log(2.0 * core::f64::consts::PI * x)
}

/// Log binomial probability of `k` successes among `n`, saddle-point form.
pub fn ln_binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return n as f64 * libm::log1p(-p);
    }
    if k == n {
        return n as f64 * libm::log(p);
    }
    let (x, nf) = (k as f64, n as f64);
    let lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k) - deviance(x, nf * p) - deviance(nf - x, nf * q);
    let lf = libm::log(2.0 * core::f64::consts::PI) + libm::log(x) + libm::log1p(-x / nf);
    lc - 0.5 * lf
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier(xs), 2.0);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = [-1.0, 0.5, -3.0];
        let direct = libm::log(xs.iter().map(|&x| libm::exp(x)).sum::<f64>());
        assert_relative_eq!(log_sum_exp(&xs), direct, epsilon = 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_relative_eq!(log_add_exp(-1000.0, -1000.0), -1000.0 + core::f64::consts::LN_2);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &u in &[1e-300, 1e-12, 1e-3, 0.02, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-12] {
            let x = normal_quantile(u);
            let back = if u > 0.5 { 1.0 - normal_sf(x) } else { normal_cdf(x) };
            assert_relative_eq!(back, u, max_relative = 1e-12);
        }
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn factorials() {
        assert_relative_eq!(ln_factorial(5), libm::log(120.0), epsilon = 1e-13);
        assert_relative_eq!(ln_choose(10, 3), libm::log(120.0), epsilon = 1e-13);
    }

    #[test]
    fn saddle_point_pmfs() {
        for &(k, rho) in &[(0u64, 2.0), (3, 2.0), (17, 2.0), (500, 500.0), (430, 500.0)] {
            let direct = -rho + k as f64 * libm::log(rho) - ln_factorial(k);
            assert!((ln_poisson_pmf(k, rho) - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
        // Exact value for Poisson(1) at 20: e^{-1}/20!.
        let exact = -1.0 - 42.335616460753485;
        assert!((ln_poisson_pmf(20, 1.0) - exact).abs() < 1e-13);
        let b: f64 = (0..=10).map(|k| libm::exp(ln_binomial_pmf(k, 10, 0.3))).sum();
        assert!((b - 1.0).abs() < 1e-15);
        assert!((ln_binomial_pmf(2, 4, 0.5) - libm::log(0.375)).abs() < 1e-15);
    }
}
