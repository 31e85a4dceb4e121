//! Cross-checks against independently computed references: dense linear
//! algebra, direct pmf formulas, brute-force grids and plain Riemann sums.

use mminf_core::lab::two_point_u;
use mminf_core::queue::{check_queue_identity, mehler_law, spectral_gap, spectrum, truncated_generator, QueueAux, QueueIdentityId};
use mminf_core::rng::{stream, uniform_in};
use mminf_core::scaling::{gaussian_phi_entropy, gaussian_sobolev_sides, GaussianMeasure, TestFunction};
use mminf_core::simulator::simulate_path;
use mminf_core::transform::{transform_a, TransformPoint};
use mminf_core::{DiscreteMeasure, GridFunction, PhiFunction, QueueParams};
use nalgebra::{DMatrix, SymmetricEigen};

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

fn poisson_pmf(k: u64, rho: f64) -> f64 {
    (k as f64 * rho.ln() - rho - ln_factorial(k)).exp()
}

fn binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let c = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    (c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

#[test]
fn tridiagonal_eigenvalues_match_dense_solver() {
    for (lam, mu) in [(2.0, 1.0), (5.0, 2.0), (0.7, 3.0)] {
        let q = QueueParams::new(lam, mu).unwrap();
        let trunc = 80;
        let m = truncated_generator(&q, trunc).unwrap();
        let n = m.dim();
        let dense = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m.diag()[i]
            } else if i + 1 == j {
                m.off()[i]
            } else if j + 1 == i {
                m.off()[j]
            } else {
                0.0
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let ours = spectrum(&q, trunc, 6).unwrap();
        for (k, (a, b)) in ours.iter().zip(&ev).enumerate() {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "λ={lam} μ={mu} k={k}: {a} vs {b}");
        }
        assert!((spectral_gap(&q, trunc).unwrap() - ev[1]).abs() < 1e-9 * mu);
    }
}

#[test]
fn mehler_law_matches_matrix_exponential() {
    let q = QueueParams::new(2.0, 1.0).unwrap();
    let size = 60;
    let gen = DMatrix::from_fn(size, size, |i, j| {
        let up = if i + 1 < size { q.lambda } else { 0.0 };
        let down = i as f64 * q.mu;
        if j == i + 1 {
            up
        } else if j + 1 == i {
            down
        } else if i == j {
            -(up + down)
        } else {
            0.0
        }
    });
    for &t in &[0.1, 0.7, 2.0] {
        let pt = (gen.clone() * t).exp();
        for n in [0usize, 3, 9] {
            let law = mehler_law(&q, t, n).unwrap();
            for k in 0..30 {
                let exact = pt[(n, k)];
                assert!((law.weight(k) - exact).abs() < 1e-11, "t={t} n={n} k={k}: {} vs {exact}", law.weight(k));
            }
        }
    }
}

#[test]
fn pmfs_match_direct_formulas() {
    for &rho in &[0.3, 2.0, 17.5] {
        let m = DiscreteMeasure::poisson(rho).unwrap();
        for k in 0..m.len() as u64 {
            let d = poisson_pmf(k, rho);
            assert!((m.weight(k as usize) - d).abs() <= 1e-13 * d.max(1e-300) + 1e-300, "ρ={rho} k={k}");
        }
    }
    let (n, p, rho) = (7u64, 0.35, 1.4);
    let m = DiscreteMeasure::binpoi(n, p, rho).unwrap();
    for k in 0..20u64 {
        let d: f64 = (0..=k.min(n)).map(|j| binomial_pmf(j, n, p) * poisson_pmf(k - j, rho)).sum();
        assert!((m.weight(k as usize) - d).abs() < 1e-14, "k={k}");
    }
}

// Kolmogorov-Smirnov distance between sorted samples and Exp(rate).
fn ks_exponential(mut xs: Vec<f64>, rate: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn holding_times_and_jump_directions() {
    let q = QueueParams::new(2.0, 1.0).unwrap();
    let path = simulate_path(&q, 2, 20_000.0, 12345).unwrap();
    for state in [0u64, 1, 2, 3] {
        let rate = q.lambda + state as f64 * q.mu;
        let sojourns: Vec<(f64, u64)> = path.sojourns().filter(|s| s.0 == state).map(|s| (s.1, s.2)).collect();
        let n = sojourns.len();
        assert!(n > 2000, "state {state}: {n}");
        let d = ks_exponential(sojourns.iter().map(|s| s.0).collect(), rate);
        // 0.1% critical value.
        assert!(d < 1.95 / (n as f64).sqrt(), "state {state}: KS {d}");
        let ups = sojourns.iter().filter(|s| s.1 == state + 1).count() as f64 / n as f64;
        let p = q.lambda / rate;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((ups - p).abs() < 4.0 * se + 1e-12, "state {state}: {ups} vs {p}");
    }
}

#[test]
fn two_point_criterion_matches_dense_grid() {
    let phis = [PhiFunction::p1(), PhiFunction::p2(), PhiFunction::p3(1.5).unwrap(), PhiFunction::power_mixture()];
    let mut checked = 0;
    for i in 0..500u64 {
        let phi = &phis[i as usize % phis.len()];
        let mut rng = stream(99, i);
        let a = uniform_in(&mut rng, 0.2, 4.0);
        let b = uniform_in(&mut rng, 0.2, 4.0);
        let fwd = transform_a(phi, TransformPoint::new(a, b - a)).unwrap();
        let bwd = transform_a(phi, TransformPoint::new(b, a - b)).unwrap();
        let g = [fwd * uniform_in(&mut rng, 0.5, 1.5), bwd * uniform_in(&mut rng, 0.5, 1.5)];
        let r = two_point_u(phi, [a, b], g, 101).unwrap();
        if r.borderline {
            continue;
        }
        // U by the plain definition on 10⁴ points; the naive form loses
        // about eps·|Φ| to cancellation, so a positive maximum too close to that is skipped.
        let (mut worst, mut noise) = (f64::NEG_INFINITY, 0.0f64);
        for j in 0..10_000 {
            let p = j as f64 / 9_999.0;
            let q = 1.0 - p;
            let m = q * a + p * b;
            let ent = q * phi.eval(a) + p * phi.eval(b) - phi.eval(m);
            worst = worst.max(ent - p * q * (q * g[0] + p * g[1]));
            noise = noise.max(16.0 * f64::EPSILON * (phi.eval(a).abs() + phi.eval(b).abs() + phi.eval(m).abs()));
        }
        if worst > noise && worst < 100.0 * noise {
            continue;
        }
        let dense_ok = worst <= noise;
        assert_eq!(dense_ok, r.criterion, "case {i}: a={a} b={b} g={g:?} worst={worst:e}");
        checked += 1;
    }
    assert!(checked > 400);
}

fn trapezoid_gauss(variance: f64, h: impl Fn(f64) -> f64) -> f64 {
    let sd = variance.sqrt();
    let (lo, hi, n) = (-14.0 * sd, 14.0 * sd, 1_000_000);
    let dx = (hi - lo) / n as f64;
    let dens = |y: f64| (-0.5 * y * y / variance).exp() / (2.0 * std::f64::consts::PI * variance).sqrt();
    (0..=n)
        .map(|i| {
            let y = lo + i as f64 * dx;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * dens(y) * h(y)
        })
        .sum::<f64>()
        * dx
}

#[test]
fn gaussian_functionals_match_trapezoid_and_closed_forms() {
    // Exponentials are log-Sobolev extremals: both sides equal (ρ/8) e^{ρ/8}.
    for &rho in &[0.5, 1.0, 3.0] {
        let (l, r) = gaussian_sobolev_sides(&PhiFunction::p1(), rho, &TestFunction::Exp { c: 1.0, k: 0.5 }).unwrap();
        let exact = rho / 8.0 * (rho / 8.0).exp();
        assert!((l - exact).abs() < 1e-8 * exact && (r - exact).abs() < 1e-8 * exact, "ρ={rho}: {l} {r} {exact}");
    }
    let phi = PhiFunction::p3(1.5).unwrap();
    let g = |y: f64| 2.0 + y.tanh();
    let variance = 1.7;
    let gm = GaussianMeasure::new(0.0, variance).unwrap();
    let ours = gaussian_phi_entropy(&gm, &phi, &TestFunction::Tanh { c: 2.0, s: 1.0 }).unwrap();
    let mean = trapezoid_gauss(variance, g);
    let reference = trapezoid_gauss(variance, |y| phi.eval(g(y))) - phi.eval(mean);
    assert!((ours - reference).abs() < 1e-8 * reference, "{ours} vs {reference}");
}

#[test]
fn time_integral_matches_riemann_sum() {
    let q = QueueParams::new(2.0, 1.0).unwrap();
    let phi = PhiFunction::p1();
    let f = GridFunction::real((0..60).map(|k| 1.0 + 0.5 * ((k as f64) * 0.7).sin()).collect());
    let (t, n) = (0.8, 3usize);
    let r = check_queue_identity(QueueIdentityId::EntLoc, &q, Some(&phi), &f, QueueAux { t, n }).unwrap();
    assert!(r.pass, "{}", r.summary_line());
    // Midpoint rule on ∫₀ᵗ P_s(λA(F,DF) + μhA(F,D*F))(n) ds with F = P_{t-s} f,
    // transporting f by explicit Mehler laws.
    let steps = 2_000;
    let ds = t / steps as f64;
    let mut total = 0.0;
    for i in 0..steps {
        let s = (i as f64 + 0.5) * ds;
        let big_f = |k: usize| {
            let law = mehler_law(&q, t - s, k).unwrap();
            (0..law.len()).map(|j| law.weight(j) * f.values()[j]).sum::<f64>()
        };
        let inner = mehler_law(&q, s, n).unwrap();
        let mut acc = 0.0;
        for k in 0..inner.len() {
            let x = big_f(k);
            let up = q.lambda * transform_a(&phi, TransformPoint::new(x, big_f(k + 1) - x)).unwrap();
            let down = if k == 0 { 0.0 } else { q.mu * k as f64 * transform_a(&phi, TransformPoint::new(x, big_f(k - 1) - x)).unwrap() };
            acc += inner.weight(k) * (up + down);
        }
        total += acc * ds;
    }
    let ent = mehler_law(&q, t, n).unwrap().phi_entropy(&phi, &f).unwrap();
    assert!((total - ent).abs() < 1e-6 * ent, "{total} vs {ent}");
}
