//! Tag tables for every verified statement and every built-in Φ, in a stable
//! order, each tag paired with the formula it checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lab::InequalityId;
use crate::measure_identity::MeasureIdentityId;
use crate::queue::{LocalVariant, QueueIdentityId};
use crate::transform_check::{TransformComparisonId, TransformIdentityId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Registry {
    Identities,
    Inequalities,
    Phis,
}

impl Registry {
    pub const ALL: [Registry; 3] = [Self::Identities, Self::Inequalities, Self::Phis];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identities => "identities",
            Self::Inequalities => "inequalities",
            Self::Phis => "phis",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub tag: String,
    pub group: &'static str,
    pub statement: &'static str,
}

fn transform_identity(id: TransformIdentityId) -> &'static str {
    use TransformIdentityId::*;
    match id {
        AbcSum => "A(u,v) + A(u+v,-v) = B(u,v)",
        BTauInv => "B(u+v,-v) = B(u,v)",
        SigmaCSq => "C(u,pv) = p² C(u,v)",
        IntRepA => "A(u,v) = ∫₀¹ (1-s) C(u+sv, v) ds",
        IntRepB => "B(u,v) = ∫₀¹ C(u+sv, v) ds",
        SmallVAsymp => "A(u,εv) ~ ½ε² C(u,v), B(u,εv) ~ ε² C(u,v) as ε → 0",
        EntTwop => "Ent_{ℬ(1,p)}[f] = pA(a,b-a) - A(a,p(b-a))",
        Adtau => "A(f, D*f)(n+1) = A(τ(f, Df))(n)",
        P2Collapse => "for u²: 2A = B = C = 2v²",
    }
}

fn transform_comparison(id: TransformComparisonId) -> &'static str {
    use TransformComparisonId::*;
    match id {
        ALeB => "A(u,v) ≤ B(u,v)",
        ALeCP1 => "A(u,v) ≤ C(u,v) for u log u",
        CThirdLe2A => "C(u+v/3, v) ≤ 2A(u,v)",
        CHalfLeB => "C(u+v/2, v) ≤ B(u,v)",
        SigmaALe => "A(u,pv) ≤ pA(u,v)",
        SigmaBLe => "B(u,pv) ≤ pB(u,v)",
        PaMinusAp => "pA(u,v) - A(u,pv) ≤ pq(pA(u+v,-v) + qA(u,v))",
        ApCA => "A(u,pv) ≤ ½p²q C(u,v) + p³ A(u,v)",
        AtpCA => "A(u+pv,-pv) ≤ ½p²q C(u,v) + p³ A(u+v,-v)",
        BpCB => "B(u,pv) ≤ p²q C(u,v) + p³ B(u,v)",
    }
}

fn measure_identity(id: MeasureIdentityId) -> &'static str {
    use MeasureIdentityId::*;
    match id {
        IppBin => "⟨ℬ(n,p), h f⟩ = np⟨ℬ(n-1,p), f(·+1)⟩",
        IppBinBw => "⟨ℬ(n,p), (n-h) f⟩ = nq⟨ℬ(n-1,p), f⟩",
        IppPoi => "⟨𝒫(ρ), h f⟩ = ρ⟨𝒫(ρ), f(·+1)⟩",
        IppBinPoi => "⟨ℬ(n,p)*𝒫(ρ), h f⟩ = np⟨ℬ(n-1,p)*𝒫(ρ), f(·+1)⟩ + ρ⟨ℬ(n,p)*𝒫(ρ), f(·+1)⟩",
    }
}

fn queue_identity(id: QueueIdentityId) -> &'static str {
    use QueueIdentityId::*;
    match id {
        Polarized => "Lf(n) = λDf(n) + nμD*f(n)",
        CommutInf => "LDf - DLf = μDf",
        CommutSg => "DP_t f = e^{-μt} P_t Df",
        IppSg => "μP_t(hf)(n) = μnp P_t f(·+1)(n-1) + λq P_t f(·+1)(n)",
        PropbPoi => "⟨𝒫(ρ), Φ'(f) Lf⟩ = -λ⟨𝒫(ρ), B(f, Df)⟩",
        MehlerMoments => "X_t | X_0 = n has mean np + ρq and variance npq + ρq",
        GammaLinear => "2Γ(h,h) = λ + nμ, 4Γ₂(h,h) = 3λμ + nμ² for h(n) = n",
        EntLoc => "Ent_{P_t}[f] = ∫₀ᵗ P_s(λA(F,DF) + μhA(F,D*F)) ds, F = P_{t-s}f",
        Mm1Inv => "⟨𝒢(ρ), L₁f⟩ = 0 for the M/M/1 generator L₁",
        Mm1CommutInf => "L₁Df(n) = DL₁f(n) for n ≥ 1",
    }
}

fn local_variant(v: LocalVariant) -> &'static str {
    match v {
        LocalVariant::MmiLoc => "Ent_{P_t(n)}[f] ≤ ρq⟨P_t(n), A(f,Df)⟩ + npq⟨P_t(n-1), qA(f,Df) + pA(τ(f,Df))⟩",
        LocalVariant::MmiLocNew => "Ent_{P_t(n)}[f] ≤ ⟨P_t(n), ρq(1+p+p²)/3 A + ρq²(2+p)/6 (Aτ + ½C)⟩ + ½np⟨P_t(n-1), (1-p²)Aτ + ½q²C⟩",
        LocalVariant::LocalPoincare => "Var_{P_t(n)}[f] ≤ ρq⟨P_t(n), |Df|²⟩ + npq⟨P_t(n-1), |Df|²⟩",
    }
}

fn inequality(id: InequalityId) -> &'static str {
    use InequalityId::*;
    match id {
        TwoPointA => "Ent_{ℬ(1,p)}[f] ≤ pq⟨ℬ(1,p), A(f,Df)⟩, gradient mod 2",
        TwoPointB => "Ent_{ℬ(1,p)}[f] ≤ pq⟨ℬ(1,p), B(f,Df)⟩, gradient mod 2",
        BernProduct => "Ent_{*ℬ(1,p_i)}[f] ≤ max_i p_iq_i ⟨*ℬ(1,p_i), (n-h)A(f,Df) + hA(f,D*f)⟩",
        Binomial => "Ent_{ℬ(n,p)}[f] ≤ pq⟨ℬ(n,p), (n-h)A(f,Df) + hA(f,D*f)⟩",
        BinomialAlt => "Ent_{ℬ(n,p)}[f] ≤ npq⟨ℬ(n-1,p), qA(f,Df) + pA(τ(f,Df))⟩",
        PoissonA => "Ent_{𝒫(ρ)}[f] ≤ ρ⟨𝒫(ρ), A(f,Df)⟩",
        PoissonBLimit => "Ent_{𝒫(ρ)}[f] ≤ ρ⟨𝒫(ρ), B(f,Df)⟩",
        BinPoi => "Ent_{ℬ(n,p)*𝒫(ρ)}[f] ≤ ρ⟨ℬ(n,p)*𝒫(ρ), A(f,Df)⟩ + npq⟨ℬ(n-1,p)*𝒫(ρ), qA(f,Df) + pA(τ(f,Df))⟩",
        EntropyDecay => "Ent_{𝒫(ρ)}[P_t f] ≤ e^{-cμt} Ent_{𝒫(ρ)}[f], c = 2 for u², 1 otherwise",
        TvEnt => "2 TV(P_t(n), 𝒫(ρ))² ≤ e^{-μt} log(e^ρ ρ^{-n} n!)",
        MixedBcLimit => "Ent_{𝒫(ρ)}[f] ≤ ½ρ⟨𝒫(ρ), (2/3)B(f,Df) + (1/3)C(f,Df)⟩",
        Gamma2Ge => "Γ₂(f,f) ≥ ½μ Γ(f,f)",
        Tensorisation => "Ent_{ℬ(1,p)⊗𝒫(ρ)}[F] ≤ ⟨𝒫(ρ), Ent_{ℬ(1,p)}[F(·,x₂)]⟩ + ⟨ℬ(1,p), Ent_{𝒫(ρ)}[F(x₁,·)]⟩",
        Variational => "Ent_Q[f] = sup_g ⟨Q, (Φ'(g) - Φ'(⟨g⟩))(f - g)⟩ + Ent_Q[g]",
    }
}

const PHIS: [(&str, &str); 8] = [
    ("P1", "u log u on (0, ∞)"),
    ("P2", "u² on ℝ"),
    ("P3(α)", "u^α on (0, ∞), 1 < α < 2"),
    ("POWER_MIXTURE", "u(u-1)/log u = ∫₁² u^p dp on (0, ∞)"),
    ("NEG_XLOGNEGX", "-u log(-u) on (-∞, 0)"),
    ("NEG_GAUSS_ISOP", "minus the Gaussian isoperimetric profile on (0, 1)"),
    ("NEG_LOG", "-log u on (0, ∞), -1/Φ'' concave"),
    ("CUSTOM", "user-supplied derivatives of order 0 to 4"),
];

pub fn entries(registry: Registry) -> Vec<Entry> {
    let e = |tag: &str, group, statement| Entry { tag: tag.to_string(), group, statement };
    match registry {
        Registry::Identities => {
            let mut v = Vec::new();
            v.extend(TransformIdentityId::ALL.iter().map(|id| e(id.name(), "transform", transform_identity(*id))));
            v.extend(MeasureIdentityId::ALL.iter().map(|id| e(id.name(), "measure", measure_identity(*id))));
            v.extend(QueueIdentityId::ALL.iter().map(|id| e(id.name(), "queue", queue_identity(*id))));
            v
        }
        Registry::Inequalities => {
            let mut v: Vec<Entry> = InequalityId::ALL.iter().map(|id| e(id.name(), "inequality", inequality(*id))).collect();
            v.extend(TransformComparisonId::ALL.iter().map(|id| e(id.name(), "transform_comparison", transform_comparison(*id))));
            v.extend(LocalVariant::ALL.iter().map(|id| e(id.name(), "queue_local", local_variant(*id))));
            v
        }
        Registry::Phis => PHIS.iter().map(|(t, s)| e(t, "phi", s)).collect(),
    }
}

/// All tags of one registry, in listing order.
pub fn tags(registry: Registry) -> Vec<String> {
    entries(registry).into_iter().map(|e| e.tag).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_are_unique_and_stable() {
        for r in Registry::ALL {
            let t = tags(r);
            let mut s = t.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), t.len(), "{}", r.name());
            assert_eq!(t, tags(r));
        }
        assert!(tags(Registry::Identities).contains(&"COMMUT_SG".to_string()));
        assert!(tags(Registry::Inequalities).contains(&"POISSON_A".to_string()));
        assert_eq!(Registry::from_name("phis"), Some(Registry::Phis));
    }
}
