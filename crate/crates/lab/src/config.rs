//! Suite configuration: a single JSON document, validated against the
//! registries before anything runs.

use std::path::{Path, PathBuf};

use mminf_core::lab::{InequalityId, InequalityParams};
use mminf_core::measure_identity::MeasureIdentityId;
use mminf_core::queue::{LocalVariant, QueueIdentityId};
use mminf_core::registry::{tags, Registry};
use mminf_core::transform_check::{TransformComparisonId, TransformIdentityId};
use mminf_core::{PhiFamily, PhiFunction, QueueParams};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Identities,
    Inequalities,
    Decay,
    Spectral,
    Tv,
    Simulation,
    Scaling,
    Admissibility,
    Fluid,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 9] = [
        Self::Identities,
        Self::Inequalities,
        Self::Decay,
        Self::Spectral,
        Self::Tv,
        Self::Simulation,
        Self::Scaling,
        Self::Admissibility,
        Self::Fluid,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSpec {
    pub lambda: f64,
    pub mu: f64,
}

impl QueueSpec {
    pub fn params(&self) -> Result<QueueParams, LabError> {
        Ok(QueueParams::new(self.lambda, self.mu)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    pub identities: usize,
    /// Cases for identities that integrate the semigroup over time.
    pub time_integral: usize,
    pub inequalities: usize,
    pub admissibility: usize,
    pub mc_paths: usize,
    pub fluid_paths: usize,
    pub clt_paths: usize,
    pub search_budget: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            identities: 1000,
            time_integral: 100,
            inequalities: 1000,
            admissibility: 2000,
            mc_paths: 100_000,
            fluid_paths: 200,
            clt_paths: 10_000,
            search_budget: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub quadrature: f64,
    pub inequality: f64,
    pub equality: f64,
    pub decay: f64,
    pub spectral: f64,
    pub monte_carlo_tv: f64,
    pub scaling: f64,
    pub theta: f64,
    pub clt_variance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            quadrature: 1e-7,
            inequality: 1e-9,
            equality: 1e-10,
            decay: 1e-8,
            spectral: 1e-6,
            monte_carlo_tv: 0.02,
            scaling: 0.05,
            theta: 0.02,
            clt_variance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    /// Master JSON report; a `.meta.json` sibling carries the timestamp.
    pub report: Option<PathBuf>,
    /// Directory for CSV curves.
    pub curves_dir: Option<PathBuf>,
}

fn default_suites() -> Vec<SuiteKind> {
    SuiteKind::ALL.to_vec()
}

fn default_phis() -> Vec<PhiFamily> {
    vec![PhiFamily::P1, PhiFamily::P2, PhiFamily::P3 { alpha: 1.5 }, PhiFamily::PowerMixture]
}

fn default_admissibility_phis() -> Vec<PhiFamily> {
    vec![
        PhiFamily::P1,
        PhiFamily::P2,
        PhiFamily::P3 { alpha: 1.5 },
        PhiFamily::PowerMixture,
        PhiFamily::NegXlognegx,
        PhiFamily::NegGaussIsop,
        PhiFamily::NegLog,
    ]
}

fn default_queues() -> Vec<QueueSpec> {
    vec![QueueSpec { lambda: 2.0, mu: 1.0 }]
}

fn default_spectral_queues() -> Vec<QueueSpec> {
    vec![QueueSpec { lambda: 2.0, mu: 1.0 }, QueueSpec { lambda: 5.0, mu: 2.0 }]
}

fn default_mm1_queue() -> QueueSpec {
    QueueSpec { lambda: 0.5, mu: 1.0 }
}

fn default_scaling_grid() -> Vec<u64> {
    vec![10, 100, 1000]
}

fn default_fluid_seeds() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Master seed; every stream in the run is derived from it.
    pub seed: u64,
    #[serde(default = "default_suites")]
    pub suites: Vec<SuiteKind>,
    #[serde(default = "default_phis")]
    pub phis: Vec<PhiFamily>,
    #[serde(default = "default_admissibility_phis")]
    pub admissibility_phis: Vec<PhiFamily>,
    #[serde(default = "default_queues")]
    pub queues: Vec<QueueSpec>,
    #[serde(default = "default_spectral_queues")]
    pub spectral_queues: Vec<QueueSpec>,
    #[serde(default = "default_mm1_queue")]
    pub mm1_queue: QueueSpec,
    /// Empty selects every identity tag.
    #[serde(default)]
    pub identity_tags: Vec<String>,
    /// Empty selects every inequality tag.
    #[serde(default)]
    pub inequality_tags: Vec<String>,
    #[serde(default)]
    pub inequality_params: InequalityParams,
    #[serde(default = "default_scaling_grid")]
    pub scaling_grid: Vec<u64>,
    #[serde(default = "default_fluid_seeds")]
    pub fluid_seeds: usize,
    #[serde(default)]
    pub samples: SampleCounts,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputPaths,
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        serde_json::from_value(serde_json::json!({ "seed": seed })).expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(path.to_path_buf(), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        check_tags(&self.identity_tags, Registry::Identities)?;
        check_tags(&self.inequality_tags, Registry::Inequalities)?;
        for f in self.phis.iter().chain(&self.admissibility_phis) {
            PhiFunction::from_family(f)?;
        }
        for q in self.queues.iter().chain(&self.spectral_queues).chain([&self.mm1_queue]) {
            q.params()?.finite_rho()?;
        }
        if self.queues.is_empty() {
            return Err(LabError::Config("queues must not be empty".into()));
        }
        if self.mm1_queue.lambda >= self.mm1_queue.mu {
            return Err(LabError::Config("mm1_queue needs lambda < mu".into()));
        }
        self.inequality_params.validate()?;
        if self.scaling_grid.is_empty() || self.scaling_grid.contains(&0) {
            return Err(LabError::Config("scaling_grid needs positive scales".into()));
        }
        if self.fluid_seeds == 0 {
            return Err(LabError::Config("fluid_seeds must be positive".into()));
        }
        let s = &self.samples;
        if [s.identities, s.time_integral, s.inequalities, s.admissibility, s.mc_paths, s.fluid_paths, s.clt_paths, s.search_budget].contains(&0) {
            return Err(LabError::Config("sample counts must be positive".into()));
        }
        Ok(())
    }

    pub fn runs(&self, suite: SuiteKind) -> bool {
        self.suites.contains(&suite)
    }

    pub fn phi_functions(&self) -> Result<Vec<PhiFunction>, LabError> {
        Ok(self.phis.iter().map(PhiFunction::from_family).collect::<Result<_, _>>()?)
    }

    pub fn selected_identities(&self) -> IdentitySelection {
        let pick = |name: &str| self.identity_tags.is_empty() || self.identity_tags.iter().any(|t| t == name);
        IdentitySelection {
            transform: TransformIdentityId::ALL.into_iter().filter(|i| pick(i.name())).collect(),
            measure: MeasureIdentityId::ALL.into_iter().filter(|i| pick(i.name())).collect(),
            queue: QueueIdentityId::ALL.into_iter().filter(|i| pick(i.name())).collect(),
        }
    }

    pub fn selected_inequalities(&self) -> InequalitySelection {
        let pick = |name: &str| self.inequality_tags.is_empty() || self.inequality_tags.iter().any(|t| t == name);
        InequalitySelection {
            functional: InequalityId::ALL.into_iter().filter(|i| pick(i.name())).collect(),
            comparison: TransformComparisonId::ALL.into_iter().filter(|i| pick(i.name())).collect(),
            local: LocalVariant::ALL.into_iter().filter(|i| pick(i.name())).collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IdentitySelection {
    pub transform: Vec<TransformIdentityId>,
    pub measure: Vec<MeasureIdentityId>,
    pub queue: Vec<QueueIdentityId>,
}

#[derive(Debug, Clone, Default)]
pub struct InequalitySelection {
    pub functional: Vec<InequalityId>,
    pub comparison: Vec<TransformComparisonId>,
    pub local: Vec<LocalVariant>,
}

fn check_tags(selected: &[String], registry: Registry) -> Result<(), LabError> {
    let valid = tags(registry);
    let unknown: Vec<String> = selected.iter().filter(|t| !valid.contains(t)).cloned().collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(LabError::UnknownTags { registry: registry.name(), unknown, valid })
    }
}
