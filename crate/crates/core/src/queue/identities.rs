//! Exact identities of the queue generator and semigroup.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    carre_du_champ_from_generator, gamma_two_from_generator, generator_apply, mehler_law, mm1_generator_apply,
    polarized_form, semigroup_values, QueueParams,
};
use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::phi::PhiFunction;
use crate::quadrature::{adaptive, AdaptiveOptions};
use crate::report::{Case, Tally, VerificationReport};
use crate::rng::{below, stream, uniform_in};
use crate::transform::{a_unchecked, b_unchecked};
use crate::transform_check::Samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QueueIdentityId {
    Polarized,
    CommutInf,
    CommutSg,
    IppSg,
    PropbPoi,
    MehlerMoments,
    GammaLinear,
    EntLoc,
    #[serde(rename = "MM1_INV")]
    Mm1Inv,
    #[serde(rename = "MM1_COMMUT_INF")]
    Mm1CommutInf,
}

impl QueueIdentityId {
    pub const ALL: [QueueIdentityId; 10] = [
        Self::Polarized,
        Self::CommutInf,
        Self::CommutSg,
        Self::IppSg,
        Self::PropbPoi,
        Self::MehlerMoments,
        Self::GammaLinear,
        Self::EntLoc,
        Self::Mm1Inv,
        Self::Mm1CommutInf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Polarized => "POLARIZED",
            Self::CommutInf => "COMMUT_INF",
            Self::CommutSg => "COMMUT_SG",
            Self::IppSg => "IPP_SG",
            Self::PropbPoi => "PROPB_POI",
            Self::MehlerMoments => "MEHLER_MOMENTS",
            Self::GammaLinear => "GAMMA_LINEAR",
            Self::EntLoc => "ENT_LOC",
            Self::Mm1Inv => "MM1_INV",
            Self::Mm1CommutInf => "MM1_COMMUT_INF",
        }
    }

    pub fn needs_phi(&self) -> bool {
        matches!(self, Self::PropbPoi | Self::EntLoc)
    }

    pub fn is_quadrature_backed(&self) -> bool {
        matches!(self, Self::EntLoc)
    }

    pub fn default_tolerance(&self) -> f64 {
        if self.is_quadrature_backed() {
            1e-7
        } else {
            1e-10
        }
    }
}

/// Time and state at which a pointwise identity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueAux {
    pub t: f64,
    pub n: usize,
}

fn need(f: &GridFunction, last: usize) -> Result<()> {
    if f.start() != 0 || !f.covers(0, last as i64) {
        return Err(Error::Window { index: last as i64, len: f.len() });
    }
    Ok(())
}

const ENT_LOC_QUADRATURE: AdaptiveOptions = AdaptiveOptions { abs_tol: 1e-10, rel_tol: 1e-9, max_depth: 30 };

fn ent_loc_sides(params: &QueueParams, phi: &PhiFunction, f: &GridFunction, t: f64, n: usize) -> Result<(f64, f64, bool)> {
    let law = mehler_law(params, t, n)?;
    let lhs = law.phi_entropy(phi, f)?;
    let count = law.len() + 1;
    let reach = count - 1 + DiscreteMeasure::poisson(params.rho_q(t))?.max_index();
    need(f, reach)?;
    let (lam, mu) = (params.lambda, params.mu);
    let mut failure = None;
    let r = adaptive(
        |s| {
            let big_f = match semigroup_values(params, t - s, f, count) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return 0.0;
                }
            };
            let inner = mehler_law(params, s, n).expect("valid time");
            inner.expect_with(|k| {
                let x = big_f.at(k as i64);
                let up = lam * a_unchecked(phi, x, big_f.at(k as i64 + 1) - x);
                let down = if k == 0 { 0.0 } else { mu * k as f64 * a_unchecked(phi, x, big_f.at(k as i64 - 1) - x) };
                up + down
            })
        },
        0.0,
        t,
        ENT_LOC_QUADRATURE,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((lhs, r.value, r.converged))
}

fn evaluate(
    id: QueueIdentityId,
    params: &QueueParams,
    phi: Option<&PhiFunction>,
    f: &GridFunction,
    aux: QueueAux,
    index: usize,
) -> Result<(Case, bool)> {
    let QueueAux { t, n } = aux;
    let (lam, mu) = (params.lambda, params.mu);
    let nf = n as f64;
    let mut converged = true;
    let case = match id {
        QueueIdentityId::Polarized => {
            if n == 0 {
                return Err(invalid("the polarised form reads f(n-1); use n ≥ 1"));
            }
            need(f, n + 1)?;
            let lf = generator_apply(params, f)?.at(n as i64);
            let pol = polarized_form(params, f)?.at(n as i64);
            let (a, b, c) = (f.at(n as i64 - 1), f.at(n as i64), f.at(n as i64 + 1));
            let scale = (nf * mu * (a - b)).abs() + (lam * (c - b)).abs() + (lam * (2.0 * b - a - c)).abs();
            Case::new(index, lf, pol).with_scale(scale)
        }
        QueueIdentityId::CommutInf | QueueIdentityId::Mm1CommutInf => {
            let mm1 = id == QueueIdentityId::Mm1CommutInf;
            if mm1 && n == 0 {
                return Err(invalid("the M/M/1 commutation holds for n ≥ 1 only"));
            }
            need(f, n + 2)?;
            let apply = |g: &GridFunction| if mm1 { mm1_generator_apply(params, g) } else { generator_apply(params, g) };
            let df = f.d_forward();
            let l_df = apply(&df)?.at(n as i64);
            let lf = apply(f)?;
            let d_lf = lf.at(n as i64 + 1) - lf.at(n as i64);
            let rhs = if mm1 { 0.0 } else { mu * df.at(n as i64) };
            Case::new(index, l_df - d_lf, rhs).with_scale(l_df.abs() + lf.at(n as i64 + 1).abs() + lf.at(n as i64).abs())
        }
        QueueIdentityId::CommutSg => {
            let pf = semigroup_values(params, t, f, n + 2)?;
            let pdf = semigroup_values(params, t, &f.d_forward(), n + 1)?;
            let lhs = pf.at(n as i64 + 1) - pf.at(n as i64);
            let rhs = params.p(t) * pdf.at(n as i64);
            Case::new(index, lhs, rhs).with_scale(pf.at(n as i64 + 1).abs() + pf.at(n as i64).abs())
        }
        QueueIdentityId::IppSg => {
            if n == 0 {
                return Err(invalid("the semigroup integration by parts needs n ≥ 1"));
            }
            let hf = f.map_indexed(|k, v| k as f64 * v);
            let shifted = GridFunction::real(f.values()[1..].to_vec());
            let p_hf = semigroup_values(params, t, &hf, n + 1)?;
            let p_abs = semigroup_values(params, t, &hf.map(f64::abs), n + 1)?;
            let p_sh = semigroup_values(params, t, &shifted, n + 1)?;
            let lhs = mu * p_hf.at(n as i64);
            let a = mu * nf * params.p(t) * p_sh.at(n as i64 - 1);
            let b = lam * params.q(t) * p_sh.at(n as i64);
            Case::new(index, lhs, a + b).with_scale(mu * p_abs.at(n as i64) + a.abs() + b.abs())
        }
        QueueIdentityId::PropbPoi => {
            let phi = phi.ok_or_else(|| invalid("PROPB_POI needs a Φ"))?;
            let q = DiscreteMeasure::poisson(params.finite_rho()?)?;
            need(f, q.len())?;
            let lf = generator_apply(params, f)?;
            let lhs = q.expect_with(|k| phi.d1(f.at(k as i64)) * lf.at(k as i64));
            let scale = q.expect_with(|k| (phi.d1(f.at(k as i64)) * lf.at(k as i64)).abs());
            let rhs = -lam
                * q.expect_with(|k| {
                    let x = f.at(k as i64);
                    b_unchecked(phi, x, f.at(k as i64 + 1) - x)
                });
            Case::new(index, lhs, rhs).with_scale(scale)
        }
        QueueIdentityId::MehlerMoments => {
            let law = mehler_law(params, t, n)?;
            let (p, q) = (params.p(t), params.q(t));
            let rq = params.rho_q(t);
            let mean = law.mean();
            let var = law.variance();
            let mean_x = nf * p + rq;
            let var_x = nf * p * q + rq;
            let dm = crate::numeric::relative_deviation(mean, mean_x, 0.0);
            let dv = crate::numeric::relative_deviation(var, var_x, 0.0);
            if dm >= dv {
                Case::new(index, mean, mean_x).input("moment", 1.0)
            } else {
                Case::new(index, var, var_x).input("moment", 2.0)
            }
        }
        QueueIdentityId::GammaLinear => {
            let h = GridFunction::identity(n + 4);
            let g = carre_du_champ_from_generator(params, &h)?.at(n as i64);
            let g2 = gamma_two_from_generator(params, &h)?.at(n as i64);
            let (a, ax) = (2.0 * g, lam + nf * mu);
            let (b, bx) = (4.0 * g2, 3.0 * lam * mu + nf * mu * mu);
            let da = crate::numeric::relative_deviation(a, ax, 0.0);
            let db = crate::numeric::relative_deviation(b, bx, 0.0);
            if da >= db {
                Case::new(index, a, ax).input("form", 1.0)
            } else {
                Case::new(index, b, bx).input("form", 2.0)
            }
        }
        QueueIdentityId::EntLoc => {
            let phi = phi.ok_or_else(|| invalid("ENT_LOC needs a Φ"))?;
            let (lhs, rhs, ok) = ent_loc_sides(params, phi, f, t, n)?;
            converged = ok;
            Case::new(index, lhs, rhs)
        }
        QueueIdentityId::Mm1Inv => {
            let rho = params.finite_rho()?;
            let q = DiscreteMeasure::geometric(rho)?;
            need(f, q.len())?;
            let lf = mm1_generator_apply(params, f)?;
            let lhs = q.expect_with(|k| lf.at(k as i64));
            let scale = q.expect_with(|k| {
                let up = (lam * (f.at(k as i64 + 1) - f.at(k as i64))).abs();
                let down = if k == 0 { 0.0 } else { (mu * (f.at(k as i64 - 1) - f.at(k as i64))).abs() };
                up + down
            });
            Case::new(index, lhs, 0.0).with_scale(scale)
        }
    };
    Ok((case.input("t", t).input("n", nf), converged))
}

/// Checks one identity for one function at one `(t, n)`.
pub fn check_queue_identity(
    id: QueueIdentityId,
    params: &QueueParams,
    phi: Option<&PhiFunction>,
    f: &GridFunction,
    aux: QueueAux,
) -> Result<VerificationReport> {
    let mut tally = Tally::identity(id.name(), id.default_tolerance());
    let (case, converged) = evaluate(id, params, phi, f, aux, 0)?;
    if !converged {
        tally.flag("time quadrature did not converge");
    }
    tally.record(case);
    Ok(tally.finish())
}

/// Checks one identity on seeded random functions, times in `[0.05, 3]` and
/// states in `0..10` (`1..10` where `n - 1` is read).
pub fn sweep_queue_identity(
    id: QueueIdentityId,
    params: &QueueParams,
    phi: Option<&PhiFunction>,
    samples: Samples,
) -> Result<VerificationReport> {
    if id.needs_phi() && phi.is_none() {
        return Err(invalid("this identity needs a Φ"));
    }
    let reach = if params.mu > 0.0 { params.rho() } else { params.lambda * 3.0 };
    let mut support = DiscreteMeasure::poisson(reach)?.len();
    if id == QueueIdentityId::Mm1Inv {
        support = support.max(DiscreteMeasure::geometric(params.finite_rho()?)?.len());
    }
    let len = 16 + 2 * support;
    let min_n = matches!(id, QueueIdentityId::Polarized | QueueIdentityId::IppSg | QueueIdentityId::Mm1CommutInf) as u64;
    let label = match phi {
        Some(phi) if id.needs_phi() => alloc::format!("{}[{}]", id.name(), phi.family()),
        _ => id.name().into(),
    };
    let mut tally = Tally::identity(label, id.default_tolerance()).seed(samples.seed);
    for i in 0..samples.count {
        let mut rng = stream(samples.seed, i as u64);
        let values: Vec<f64> = match phi {
            Some(phi) if id.needs_phi() => {
                let iv = phi.interval();
                (0..len).map(|_| iv.probe(&mut rng)).collect()
            }
            _ => (0..len).map(|_| uniform_in(&mut rng, -5.0, 5.0)).collect(),
        };
        let t = uniform_in(&mut rng, 0.05, 3.0);
        let n = (min_n + below(&mut rng, 10 - min_n)) as usize;
        let (case, converged) = evaluate(id, params, phi, &GridFunction::real(values), QueueAux { t, n }, i)?;
        if !converged {
            tally.flag("time quadrature did not converge");
        }
        tally.record(case);
    }
    Ok(tally.finish())
}
