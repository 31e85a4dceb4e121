//! Generator, carré du champ and eigenfunction recursion.

use alloc::vec::Vec;

use super::QueueParams;
use crate::error::{invalid, Result};
use crate::grid::GridFunction;

fn require_origin(f: &GridFunction) -> Result<()> {
    if f.start() != 0 {
        return Err(invalid("queue functions must start at state 0"));
    }
    Ok(())
}

/// `Lf(n) = nμ D*f(n) + λ Df(n)` on `[0, len - 1)`; the `D*` term carries
/// coefficient zero at `n = 0`, so `f(-1)` is never read.
pub fn generator_apply(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let v = f.values();
    let out = (0..v.len().saturating_sub(1))
        .map(|n| {
            let up = params.lambda * (v[n + 1] - v[n]);
            if n == 0 {
                up
            } else {
                n as f64 * params.mu * (v[n - 1] - v[n]) + up
            }
        })
        .collect();
    Ok(GridFunction::real(out))
}

/// M/M/1 generator `μ D* + λ D`, with the `D*` term masked at 0.
pub fn mm1_generator_apply(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let v = f.values();
    let out = (0..v.len().saturating_sub(1))
        .map(|n| {
            let up = params.lambda * (v[n + 1] - v[n]);
            if n == 0 {
                up
            } else {
                params.mu * (v[n - 1] - v[n]) + up
            }
        })
        .collect();
    Ok(GridFunction::real(out))
}

/// `-λ DD*f(n) + (nμ - λ) D*f(n)` on `[1, len - 1)`.
pub fn polarized_form(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let v = f.values();
    let out: Vec<f64> = (1..v.len().saturating_sub(1))
        .map(|n| {
            let ds = v[n - 1] - v[n];
            let dds = (v[n] - v[n + 1]) - ds;
            -params.lambda * dds + (n as f64 * params.mu - params.lambda) * ds
        })
        .collect();
    GridFunction::with_start(1, out, crate::Interval::REAL)
}

/// `Γ(f, f)(n) = ½(nμ|D*f|² + λ|Df|²)` on `[0, len - 1)`.
pub fn carre_du_champ(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let v = f.values();
    let out = (0..v.len().saturating_sub(1))
        .map(|n| {
            let d = v[n + 1] - v[n];
            let down = if n == 0 {
                0.0
            } else {
                let ds = v[n - 1] - v[n];
                n as f64 * params.mu * ds * ds
            };
            0.5 * (down + params.lambda * d * d)
        })
        .collect();
    Ok(GridFunction::real(out))
}

/// `2Γ₂(f, f) = (3/2)λμ|Df|² + (n/2)μ²|D*f|² + R(f, f)` on `[0, len - 2)`, with
/// `2R = n(n-1)μ²|D*D*f|² + 2nλμ|DD*f|² + λ²|DDf|²`.
pub fn gamma_two(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let v = f.values();
    let (lam, mu) = (params.lambda, params.mu);
    let out = (0..v.len().saturating_sub(2))
        .map(|n| {
            let nf = n as f64;
            let d = v[n + 1] - v[n];
            let dd = v[n + 2] - 2.0 * v[n + 1] + v[n];
            let (ds, dds) = if n >= 1 { (v[n - 1] - v[n], (v[n] - v[n + 1]) - (v[n - 1] - v[n])) } else { (0.0, 0.0) };
            let dsds = if n >= 2 { v[n - 2] - 2.0 * v[n - 1] + v[n] } else { 0.0 };
            let r2 = nf * (nf - 1.0) * mu * mu * dsds * dsds + 2.0 * nf * lam * mu * dds * dds + lam * lam * dd * dd;
            0.5 * (1.5 * lam * mu * d * d + 0.5 * nf * mu * mu * ds * ds + 0.5 * r2)
        })
        .collect();
    Ok(GridFunction::real(out))
}

fn product(f: &GridFunction, g: &GridFunction) -> GridFunction {
    f.zip(g, |a, b| a * b)
}

/// `Γ(f, g) = ½(L(fg) - f Lg - g Lf)` straight from the generator.
fn gamma_bilinear(params: &QueueParams, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let lfg = generator_apply(params, &product(f, g))?;
    let lf = generator_apply(params, f)?;
    let lg = generator_apply(params, g)?;
    let n = lfg.len();
    let out = (0..n as i64).map(|k| 0.5 * (lfg.at(k) - f.at(k) * lg.at(k) - g.at(k) * lf.at(k))).collect();
    Ok(GridFunction::real(out))
}

/// `Γ(f, f) = ½(L(f²) - 2f Lf)`, computed from the generator.
pub fn carre_du_champ_from_generator(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    gamma_bilinear(params, f, f)
}

/// `Γ₂(f, f) = ½(LΓ(f, f) - 2Γ(f, Lf))`, computed from the generator.
pub fn gamma_two_from_generator(params: &QueueParams, f: &GridFunction) -> Result<GridFunction> {
    require_origin(f)?;
    let g = gamma_bilinear(params, f, f)?;
    let lg = generator_apply(params, &g)?;
    let lf = generator_apply(params, f)?;
    let cross = gamma_bilinear(params, f, &lf)?;
    let n = lg.len().min(cross.len());
    let out = (0..n as i64).map(|k| 0.5 * (lg.at(k) - 2.0 * cross.at(k))).collect();
    Ok(GridFunction::real(out))
}

/// Solution of `λf(n+1) = (λ + α + nμ)f(n) - nμ f(n-1)` with `f(0) = 1`, on
/// `0..=n_max`.
pub fn eigenfunction(params: &QueueParams, alpha: f64, n_max: usize) -> Result<GridFunction> {
    if params.lambda <= 0.0 {
        return Err(invalid("the eigenfunction recursion needs a positive arrival rate"));
    }
    let (lam, mu) = (params.lambda, params.mu);
    let mut v = Vec::with_capacity(n_max + 1);
    v.push(1.0);
    for n in 0..n_max {
        let nf = n as f64;
        let prev = if n == 0 { 0.0 } else { v[n - 1] };
        v.push(((lam + alpha + nf * mu) * v[n] - nf * mu * prev) / lam);
    }
    Ok(GridFunction::real(v))
}

/// Largest `|Lf - αf|` on `0..len-1`, relative to the magnitude of the terms.
pub fn eigen_residual(params: &QueueParams, alpha: f64, f: &GridFunction) -> Result<f64> {
    let lf = generator_apply(params, f)?;
    let v = f.values();
    let mut worst: f64 = 0.0;
    for n in 0..lf.len() {
        let nf = n as f64;
        let prev = if n == 0 { 0.0 } else { v[n - 1] };
        let scale = (params.lambda * v[n + 1]).abs()
            + ((params.lambda + nf * params.mu) * v[n]).abs()
            + (nf * params.mu * prev).abs()
            + (alpha * v[n]).abs();
        let r = (lf.at(n as i64) - alpha * v[n]).abs();
        worst = worst.max(if scale > 0.0 { r / scale } else { r });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> QueueParams {
        QueueParams::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn generator_on_identity_and_constants() {
        let lf = generator_apply(&params(), &GridFunction::identity(10)).unwrap();
        for n in 0..9 {
            assert_eq!(lf.at(n), 2.0 - n as f64);
        }
        let lc = generator_apply(&params(), &GridFunction::constant(4.0, 6)).unwrap();
        assert!(lc.values().iter().all(|&v| v == 0.0));
        let pure = QueueParams::new(3.0, 0.0).unwrap();
        let f = GridFunction::real((0..6).map(|n| (n * n) as f64).collect());
        let lf = generator_apply(&pure, &f).unwrap();
        let df = f.d_forward();
        for n in 0..5 {
            assert_eq!(lf.at(n), 3.0 * df.at(n));
        }
    }

    #[test]
    fn gamma_closed_forms_match_generator() {
        let q = QueueParams::new(1.7, 0.6).unwrap();
        let f = GridFunction::real((0..14).map(|n| libm::sin(1.3 * n as f64) * (1.0 + 0.2 * n as f64)).collect());
        let a = carre_du_champ(&q, &f).unwrap();
        let b = carre_du_champ_from_generator(&q, &f).unwrap();
        for n in 0..a.len() as i64 {
            assert_relative_eq!(a.at(n), b.at(n), max_relative = 1e-12, epsilon = 1e-12);
        }
        let a = gamma_two(&q, &f).unwrap();
        let b = gamma_two_from_generator(&q, &f).unwrap();
        assert_eq!(a.len(), b.len());
        for n in 0..a.len() as i64 {
            assert_relative_eq!(a.at(n), b.at(n), max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn linear_function_values() {
        let q = params();
        let h = GridFunction::identity(12);
        let g = carre_du_champ(&q, &h).unwrap();
        let g2 = gamma_two(&q, &h).unwrap();
        for n in 0..10 {
            let nf = n as f64;
            assert_relative_eq!(2.0 * g.at(n), 2.0 + nf);
            assert_relative_eq!(4.0 * g2.at(n), 3.0 * 2.0 + nf);
        }
    }

    #[test]
    fn eigenfunctions() {
        let q = params();
        let f0 = eigenfunction(&q, 0.0, 20).unwrap();
        assert!(f0.values().iter().all(|&v| v == 1.0));
        let f1 = eigenfunction(&q, -1.0, 20).unwrap();
        for n in 0..=20 {
            assert_relative_eq!(f1.at(n), 1.0 - n as f64 / 2.0, epsilon = 1e-12);
        }
        for alpha in [-2.5, -0.3, 0.7] {
            let f = eigenfunction(&q, alpha, 30).unwrap();
            assert!(eigen_residual(&q, alpha, &f).unwrap() < 1e-9);
        }
    }
}
