//! Local entropy inequalities under the law of `X_t` given `X_0 = n`.

use serde::{Deserialize, Serialize};

use super::{mehler_law, QueueParams};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::phi::PhiFunction;
use crate::report::{Case, Tally, VerificationReport};
use crate::transform::{a_unchecked, c_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LocalVariant {
    /// Binomial-Poisson bound transported by the Mehler formula.
    MmiLoc,
    /// Bound obtained by semigroup interpolation on `[0, t]`.
    MmiLocNew,
    /// Variance bound with `|Df|²`.
    LocalPoincare,
}

impl LocalVariant {
    pub const ALL: [LocalVariant; 3] = [Self::MmiLoc, Self::MmiLocNew, Self::LocalPoincare];

    pub fn name(&self) -> &'static str {
        match self {
            Self::MmiLoc => "MMI_LOC",
            Self::MmiLocNew => "MMI_LOC_NEW",
            Self::LocalPoincare => "LOCAL_POINCARE",
        }
    }
}

struct Terms<'a> {
    phi: &'a PhiFunction,
    f: &'a GridFunction,
}

impl Terms<'_> {
    fn a(&self, k: usize) -> f64 {
        let (x, y) = (self.f.at(k as i64), self.f.at(k as i64 + 1));
        a_unchecked(self.phi, x, y - x)
    }
    /// `A(τ(f, Df))(k) = A(f(k+1), f(k) - f(k+1))`.
    fn a_tau(&self, k: usize) -> f64 {
        let (x, y) = (self.f.at(k as i64), self.f.at(k as i64 + 1));
        a_unchecked(self.phi, y, x - y)
    }
    fn c(&self, k: usize) -> f64 {
        let (x, y) = (self.f.at(k as i64), self.f.at(k as i64 + 1));
        c_unchecked(self.phi, x, y - x)
    }
    fn grad_sq(&self, k: usize) -> f64 {
        let d = self.f.at(k as i64 + 1) - self.f.at(k as i64);
        d * d
    }
}

/// Left and right sides of a local inequality at `(t, n)`.
pub fn local_sides(
    variant: LocalVariant,
    params: &QueueParams,
    phi: &PhiFunction,
    f: &GridFunction,
    t: f64,
    n: usize,
) -> Result<(f64, f64)> {
    let law = mehler_law(params, t, n)?;
    let top = law.len() as i64;
    if f.start() != 0 || !f.covers(0, top) {
        return Err(Error::Window { index: top, len: f.len() });
    }
    let quadratic = PhiFunction::p2();
    let (phi, lhs_phi) = match variant {
        LocalVariant::LocalPoincare => (&quadratic, &quadratic),
        _ => (phi, phi),
    };
    let iv = phi.interval();
    for k in 0..=top {
        iv.check(f.at(k))?;
    }
    let lhs = law.phi_entropy(lhs_phi, f)?;
    let terms = Terms { phi, f };
    let (p, q) = (params.p(t), params.q(t));
    let rho_q = params.rho_q(t);
    let nf = n as f64;
    let lower = |g: &dyn Fn(usize) -> f64| -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let m: DiscreteMeasure = mehler_law(params, t, n - 1)?;
        Ok(m.expect_with(g))
    };
    let rhs = match variant {
        LocalVariant::MmiLoc => {
            let upper = law.expect_with(|k| terms.a(k));
            rho_q * upper + nf * p * q * lower(&|k| q * terms.a(k) + p * terms.a_tau(k))?
        }
        LocalVariant::MmiLocNew => {
            // ρ(1-p³)/3 = ρq(1+p+p²)/3 and ρq²(2+p)/6 = ρq·q(2+p)/6 stay finite as μ → 0.
            let ca = rho_q * (1.0 + p + p * p) / 3.0;
            let ct = rho_q * q * (2.0 + p) / 6.0;
            let upper = law.expect_with(|k| ca * terms.a(k) + ct * (terms.a_tau(k) + 0.5 * terms.c(k)));
            let lo = lower(&|k| (1.0 - p * p) * terms.a_tau(k) + 0.5 * q * q * terms.c(k))?;
            upper + 0.5 * nf * p * lo
        }
        LocalVariant::LocalPoincare => {
            rho_q * law.expect_with(|k| terms.grad_sq(k)) + nf * p * q * lower(&|k| terms.grad_sq(k))?
        }
    };
    Ok((lhs, rhs))
}

/// Single-case report for a local inequality.
pub fn local_inequality_eval(
    variant: LocalVariant,
    params: &QueueParams,
    phi: &PhiFunction,
    f: &GridFunction,
    t: f64,
    n: usize,
) -> Result<VerificationReport> {
    let (lhs, rhs) = local_sides(variant, params, phi, f, t, n)?;
    let mut tally = Tally::inequality(alloc::format!("{}[{}]", variant.name(), phi.family()), 1e-9);
    tally.record(Case::new(0, lhs, rhs).input("t", t).input("n", n as f64));
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_collapse() {
        let q = QueueParams::new(2.0, 1.0).unwrap();
        let f = GridFunction::real((0..60).map(|k| libm::sin(0.7 * k as f64)).collect());
        for &(t, n) in &[(0.2, 3usize), (1.0, 0), (2.0, 7)] {
            let p2 = PhiFunction::p2();
            let a = local_sides(LocalVariant::MmiLocNew, &q, &p2, &f, t, n).unwrap();
            let b = local_sides(LocalVariant::LocalPoincare, &q, &p2, &f, t, n).unwrap();
            let c = local_sides(LocalVariant::MmiLoc, &q, &p2, &f, t, n).unwrap();
            assert_relative_eq!(a.1, b.1, max_relative = 1e-12);
            assert_relative_eq!(a.1, c.1, max_relative = 1e-12);
            assert_relative_eq!(a.0, b.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn linear_function_is_an_equality_case() {
        let q = QueueParams::new(2.0, 1.0).unwrap();
        let h = GridFunction::identity(60);
        let (lhs, rhs) = local_sides(LocalVariant::LocalPoincare, &q, &PhiFunction::p2(), &h, 0.5, 4).unwrap();
        let (p, qq) = (q.p(0.5), q.q(0.5));
        assert_relative_eq!(lhs, (4.0 * p + 2.0) * qq, max_relative = 1e-12);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }

    #[test]
    fn entropy_bound_holds_for_p1() {
        let q = QueueParams::new(2.0, 1.0).unwrap();
        let f = GridFunction::new((0..60).map(|k| 1.0 + (k % 5) as f64).collect(), Interval::POSITIVE).unwrap();
        for v in LocalVariant::ALL {
            let r = local_inequality_eval(v, &q, &PhiFunction::p1(), &f, 0.9, 5).unwrap();
            assert!(r.pass, "{}", r.summary_line());
        }
    }

    #[test]
    fn pure_arrivals() {
        let q = QueueParams::new(1.5, 0.0).unwrap();
        let f = GridFunction::new((0..40).map(|k| 1.0 + 0.1 * k as f64).collect(), Interval::POSITIVE).unwrap();
        let (lhs, rhs) = local_sides(LocalVariant::MmiLocNew, &q, &PhiFunction::p1(), &f, 1.0, 2).unwrap();
        assert!(lhs <= rhs && rhs.is_finite());
    }
}
