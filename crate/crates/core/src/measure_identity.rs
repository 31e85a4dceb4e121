//! Binomial and Poisson integration-by-parts identities.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::report::{Case, Tally, VerificationReport};
use crate::rng::{stream, uniform_in};
use crate::transform_check::Samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeasureIdentityId {
    IppBin,
    IppBinBw,
    IppPoi,
    #[serde(rename = "IPP_BINPOI")]
    IppBinPoi,
}

impl MeasureIdentityId {
    pub const ALL: [MeasureIdentityId; 4] = [Self::IppBin, Self::IppBinBw, Self::IppPoi, Self::IppBinPoi];

    pub fn name(&self) -> &'static str {
        match self {
            Self::IppBin => "IPP_BIN",
            Self::IppBinBw => "IPP_BIN_BW",
            Self::IppPoi => "IPP_POI",
            Self::IppBinPoi => "IPP_BINPOI",
        }
    }
}

/// Parameters of the binomial/Poisson laws; unused fields are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub n: u64,
    pub p: f64,
    pub rho: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self { n: 5, p: 0.3, rho: 2.0 }
    }
}

/// The laws an identity reads, with the window `f` must cover.
struct Laws {
    main: DiscreteMeasure,
    reduced: Option<DiscreteMeasure>,
}

fn laws(id: MeasureIdentityId, params: &MeasureParams) -> Result<Laws> {
    let MeasureParams { n, p, rho } = *params;
    let needs_n = matches!(id, MeasureIdentityId::IppBin | MeasureIdentityId::IppBinBw | MeasureIdentityId::IppBinPoi);
    if needs_n && n == 0 {
        return Err(invalid("binomial identities need n ≥ 1"));
    }
    Ok(match id {
        MeasureIdentityId::IppBin | MeasureIdentityId::IppBinBw => Laws {
            main: DiscreteMeasure::binomial(n, p)?,
            reduced: Some(DiscreteMeasure::binomial(n - 1, p)?),
        },
        MeasureIdentityId::IppPoi => Laws { main: DiscreteMeasure::poisson(rho)?, reduced: None },
        MeasureIdentityId::IppBinPoi => Laws {
            main: DiscreteMeasure::binpoi(n, p, rho)?,
            reduced: Some(DiscreteMeasure::binpoi(n - 1, p, rho)?),
        },
    })
}

/// Window length a test function needs for this identity.
pub fn required_window(id: MeasureIdentityId, params: &MeasureParams) -> Result<usize> {
    Ok(laws(id, params)?.main.len() + 1)
}

fn evaluate(id: MeasureIdentityId, params: &MeasureParams, l: &Laws, f: &GridFunction, index: usize) -> Result<Case> {
    let MeasureParams { n, p, rho } = *params;
    if !f.covers(0, l.main.len() as i64) {
        return Err(invalid("test function window too short for the identity"));
    }
    let nf = n as f64;
    let q = 1.0 - p;
    let fv = |k: usize| f.at(k as i64);
    let case = match id {
        MeasureIdentityId::IppBin => {
            let red = l.reduced.as_ref().expect("reduced law");
            let lhs = l.main.expect_with(|k| k as f64 * fv(k));
            let rhs = nf * p * red.expect_with(|k| fv(k + 1));
            Case::new(index, lhs, rhs).with_scale(l.main.expect_with(|k| (k as f64 * fv(k)).abs()))
        }
        MeasureIdentityId::IppBinBw => {
            let red = l.reduced.as_ref().expect("reduced law");
            let lhs = l.main.expect_with(|k| (nf - k as f64) * fv(k));
            let rhs = nf * q * red.expect_with(fv);
            Case::new(index, lhs, rhs).with_scale(l.main.expect_with(|k| ((nf - k as f64) * fv(k)).abs()))
        }
        MeasureIdentityId::IppPoi => {
            let lhs = l.main.expect_with(|k| k as f64 * fv(k));
            let rhs = rho * l.main.expect_with(|k| fv(k + 1));
            Case::new(index, lhs, rhs).with_scale(l.main.expect_with(|k| (k as f64 * fv(k)).abs()))
        }
        MeasureIdentityId::IppBinPoi => {
            let red = l.reduced.as_ref().expect("reduced law");
            let lhs = l.main.expect_with(|k| k as f64 * fv(k));
            let a = nf * p * red.expect_with(|k| fv(k + 1));
            let b = rho * l.main.expect_with(|k| fv(k + 1));
            let scale = l.main.expect_with(|k| (k as f64 * fv(k)).abs());
            Case::new(index, lhs, a + b).with_scale(scale.max(a.abs() + b.abs()))
        }
    };
    Ok(case.input("n", nf).input("p", p).input("rho", rho))
}

/// Checks one identity on one test function.
pub fn check_measure_identity(
    id: MeasureIdentityId,
    params: &MeasureParams,
    f: &GridFunction,
) -> Result<VerificationReport> {
    let l = laws(id, params)?;
    let mut tally = Tally::identity(id.name(), 1e-10);
    tally.record(evaluate(id, params, &l, f, 0)?);
    Ok(tally.finish())
}

/// Checks one identity on seeded random functions with values in `[-5, 5]`.
pub fn sweep_measure_identity(
    id: MeasureIdentityId,
    params: &MeasureParams,
    samples: Samples,
) -> Result<VerificationReport> {
    let l = laws(id, params)?;
    let len = l.main.len() + 1;
    let mut tally = Tally::identity(id.name(), 1e-10).seed(samples.seed);
    for i in 0..samples.count {
        let mut rng = stream(samples.seed, i as u64);
        let values: Vec<f64> = (0..len).map(|_| uniform_in(&mut rng, -5.0, 5.0)).collect();
        tally.record(evaluate(id, params, &l, &GridFunction::real(values), i)?);
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_on_random_functions() {
        let params = MeasureParams { n: 5, p: 0.3, rho: 2.0 };
        for id in MeasureIdentityId::ALL {
            let r = sweep_measure_identity(id, &params, Samples::new(200, 9)).unwrap();
            assert!(r.pass, "{}", r.summary_line());
        }
    }

    #[test]
    fn identity_function_and_edge_cases() {
        let params = MeasureParams { n: 5, p: 0.3, rho: 2.0 };
        let h = GridFunction::identity(8);
        let r = check_measure_identity(MeasureIdentityId::IppBin, &params, &h).unwrap();
        assert!(r.pass);
        let one = MeasureParams { n: 1, p: 0.4, rho: 0.0 };
        let f = GridFunction::real(alloc::vec![2.0, -3.0, 7.0]);
        let r = check_measure_identity(MeasureIdentityId::IppBinBw, &one, &f).unwrap();
        // Both sides equal q·f(0).
        assert!((r.max_abs_dev.unwrap()).abs() < 1e-15);
        assert!(check_measure_identity(MeasureIdentityId::IppBin, &MeasureParams { n: 0, ..params }, &h).is_err());
    }
}
