//! Run configurations and the certificates runs emit. A certificate
//! carries everything needed to re-verify the claim without searching:
//! the witness, the measured residuals, and the configuration echo.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::DominationVector;
use crate::dynamics::{
    uniform_ip_check, DynError, IpReport, MultiRecurrence, Net, RecurrentPoint, RefineParams,
    Scalar, SemigroupRecurrence, SemigroupTable, WordSystem,
};
use crate::ramsey::{
    search_monochromatic_extraction, search_monochromatic_substitutions,
    substitution_instances, CatalogColoring, Coloring, ExtractionWitness, SearchBudget,
    SearchError, SearchOutcome, SubstitutionWitness,
};
use crate::sequence::{is_extraction, plans, PlanFilter, SeqOrder, WordSequence};
use crate::space::{Point, Space};

pub const SCHEMA: &str = "locword/v1";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unsupported schema {0:?}; expected {SCHEMA:?}")]
    Schema(String),
    #[error("config rejected: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("certificate rejected: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Dynamics(#[from] DynError),
    #[error(transparent)]
    Sequence(#[from] crate::sequence::SequenceError),
}

fn check_schema(schema: &str) -> Result<(), ConfigError> {
    if schema != SCHEMA {
        return Err(ConfigError::Schema(schema.to_string()));
    }
    Ok(())
}

fn default_budget() -> SearchBudget {
    let max_candidates = std::env::var("LOCWORD_MAX_CANDIDATES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000);
    SearchBudget { window: 6, max_plan_depth: 3, max_candidates, seed: 0 }
}

/// How a run names its base sequence.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "kebab-case")]
pub enum BaseSpec {
    /// The tight chain of pure-variable terms.
    Canonical { length: usize },
    /// Explicit terms.
    Explicit { sequence: WordSequence },
}

impl BaseSpec {
    pub fn build(
        &self,
        order: SeqOrder,
        dom: &DominationVector,
    ) -> Result<WordSequence, ConfigError> {
        match self {
            BaseSpec::Canonical { length } => {
                WordSequence::canonical(order, dom.clone(), *length)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))
            }
            BaseSpec::Explicit { sequence } => {
                if sequence.order() != order || sequence.domination() != dom {
                    return Err(ConfigError::Invalid(
                        "explicit base disagrees with order or bounds".into(),
                    ));
                }
                Ok(sequence.clone())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Partition runs
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum PartitionMode {
    /// One variable word, all substitutions one color.
    Substitutions,
    /// An extraction prefix, all constant extracted words one color.
    Extraction {
        terms_wanted: usize,
        #[serde(flatten)]
        base: BaseSpec,
    },
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub schema: String,
    pub domination: DominationVector,
    pub order: SeqOrder,
    pub coloring: CatalogColoring,
    #[serde(flatten)]
    pub mode: PartitionMode,
    pub seed: u64,
    #[serde(default)]
    pub budget: Option<SearchBudget>,
}

impl PartitionConfig {
    pub fn budget(&self) -> SearchBudget {
        let mut b = self.budget.unwrap_or_else(default_budget);
        b.seed = self.seed;
        b
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "witness-kind", rename_all = "kebab-case")]
pub enum PartitionOutcome {
    Substitutions(SearchOutcome<SubstitutionWitness>),
    Extraction(SearchOutcome<ExtractionWitness>),
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub schema: String,
    pub config: PartitionConfig,
    #[serde(flatten)]
    pub outcome: PartitionOutcome,
}

pub fn run_partition(config: &PartitionConfig) -> Result<PartitionCertificate, ConfigError> {
    check_schema(&config.schema)?;
    let budget = config.budget();
    let outcome = match &config.mode {
        PartitionMode::Substitutions => PartitionOutcome::Substitutions(
            search_monochromatic_substitutions(&config.coloring, &config.domination, &budget)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?,
        ),
        PartitionMode::Extraction { terms_wanted, base } => {
            let base = base.build(config.order, &config.domination)?;
            PartitionOutcome::Extraction(
                search_monochromatic_extraction(&config.coloring, &base, *terms_wanted, &budget)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?,
            )
        }
    };
    Ok(PartitionCertificate { schema: SCHEMA.into(), config: config.clone(), outcome })
}

pub fn verify_partition(cert: &PartitionCertificate) -> Result<(), VerifyError> {
    if cert.schema != SCHEMA {
        return Err(VerifyError::Mismatch(format!("schema {:?}", cert.schema)));
    }
    match &cert.outcome {
        PartitionOutcome::Substitutions(SearchOutcome::Found { witness }) => {
            let instances = substitution_instances(&witness.word, &cert.config.domination)?;
            if instances.is_empty() {
                return Err(VerifyError::Mismatch("witness admits no substitutions".into()));
            }
            for inst in &instances {
                let c = cert.config.coloring.color(inst).map_err(SearchError::from)?;
                if c != witness.color {
                    return Err(VerifyError::Mismatch(format!(
                        "instance colored {c}, certificate says {}",
                        witness.color
                    )));
                }
            }
            Ok(())
        }
        PartitionOutcome::Extraction(SearchOutcome::Found { witness }) => {
            let PartitionMode::Extraction { terms_wanted, base } = &cert.config.mode else {
                return Err(VerifyError::Mismatch("mode disagrees with witness kind".into()));
            };
            let base = base
                .build(cert.config.order, &cert.config.domination)
                .map_err(|e| VerifyError::Mismatch(e.to_string()))?;
            if witness.prefix.len() != *terms_wanted {
                return Err(VerifyError::Mismatch("prefix length disagrees".into()));
            }
            if is_extraction(&witness.prefix, &base, witness.prefix.len())?.is_none() {
                return Err(VerifyError::Mismatch("prefix is not an extraction of the base".into()));
            }
            for (_, w) in plans(&witness.prefix, PlanFilter::ConstantOnly, *terms_wanted) {
                let c = cert
                    .config
                    .coloring
                    .color(w.as_constant().unwrap())
                    .map_err(SearchError::from)?;
                if c != witness.color {
                    return Err(VerifyError::Mismatch(format!(
                        "extracted word colored {c}, certificate says {}",
                        witness.color
                    )));
                }
            }
            Ok(())
        }
        // Exhaustion claims carry no witness; accept the well-formed echo.
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Recurrence runs
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RecurrenceConfig {
    pub schema: String,
    pub space: Space,
    pub system: WordSystem,
    pub domination: DominationVector,
    pub order: SeqOrder,
    #[serde(flatten)]
    pub base: BaseSpec,
    pub levels: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub depth: usize,
    pub seed: u64,
    #[serde(default)]
    pub budget: Option<SearchBudget>,
    /// Orbit start; defaults to a seed-derived sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
}

impl RecurrenceConfig {
    pub fn params(&self) -> RefineParams {
        let mut budget = self.budget.unwrap_or_else(default_budget);
        budget.seed = self.seed;
        RefineParams {
            levels: self.levels,
            schedule: self.schedule.clone(),
            depth: self.depth,
            budget,
        }
    }

    pub fn start_point(&self) -> Point {
        self.start
            .clone()
            .unwrap_or_else(|| crate::dynamics::multi::start_point(&self.space, self.seed))
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RecurrenceCertificate {
    pub schema: String,
    pub config: RecurrenceConfig,
    pub start: Point,
    #[serde(flatten)]
    pub outcome: SearchOutcome<RecurrentPoint>,
}

pub fn run_recurrence(config: &RecurrenceConfig) -> Result<RecurrenceCertificate, ConfigError> {
    check_schema(&config.schema)?;
    let base = config.base.build(config.order, &config.domination)?;
    let start = config.start_point();
    let outcome = crate::dynamics::find_recurrent_point(
        &config.space,
        &config.system,
        &base,
        &start,
        &config.params(),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(RecurrenceCertificate { schema: SCHEMA.into(), config: config.clone(), start, outcome })
}

pub fn verify_recurrence(cert: &RecurrenceCertificate) -> Result<(), VerifyError> {
    if cert.schema != SCHEMA {
        return Err(VerifyError::Mismatch(format!("schema {:?}", cert.schema)));
    }
    let SearchOutcome::Found { witness } = &cert.outcome else {
        return Ok(());
    };
    let base = cert
        .config
        .base
        .build(cert.config.order, &cert.config.domination)
        .map_err(|e| VerifyError::Mismatch(e.to_string()))?;
    if is_extraction(&witness.prefix, &base, witness.prefix.len())?.is_none() {
        return Err(VerifyError::Mismatch("prefix is not an extraction of the base".into()));
    }
    let space = &cert.config.space;
    let sys = &cert.config.system;
    let words: Vec<crate::word::LocatedWord> =
        plans(&witness.prefix, PlanFilter::ConstantOnly, witness.prefix.len())
            .map(|(_, w)| w.as_constant().unwrap().clone())
            .collect();
    if words.len() != witness.residuals.len() {
        return Err(VerifyError::Mismatch("residual table length disagrees".into()));
    }
    let mut orbit_eps = 0.0f64;
    let mut rec_eps = 0.0f64;
    for (w, (word, orbit_d, rec_d)) in words.iter().zip(&witness.residuals) {
        if w.to_word() != *word {
            return Err(VerifyError::Mismatch("residual table words disagree".into()));
        }
        let o = space.distance(&sys.apply(space, w, &cert.start)?, &witness.x0);
        let r = space.distance(&sys.apply(space, w, &witness.x0)?, &witness.x0);
        if o != *orbit_d || r != *rec_d {
            return Err(VerifyError::Mismatch(format!(
                "recomputed residuals ({o}, {r}) disagree with recorded ({orbit_d}, {rec_d})"
            )));
        }
        orbit_eps = orbit_eps.max(o);
        rec_eps = rec_eps.max(r);
    }
    if orbit_eps != witness.orbit_epsilon
        || rec_eps != witness.recurrence_epsilon
        || orbit_eps.max(rec_eps) != witness.achieved_epsilon
    {
        return Err(VerifyError::Mismatch("summary tolerances disagree with residuals".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Multiple recurrence runs
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MultiConfig {
    pub schema: String,
    pub space: Space,
    pub systems: Vec<WordSystem>,
    pub domination: DominationVector,
    pub order: SeqOrder,
    #[serde(flatten)]
    pub base: BaseSpec,
    pub levels: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub depth: usize,
    pub seed: u64,
    #[serde(default)]
    pub budget: Option<SearchBudget>,
}

impl MultiConfig {
    pub fn params(&self) -> RefineParams {
        let mut budget = self.budget.unwrap_or_else(default_budget);
        budget.seed = self.seed;
        RefineParams {
            levels: self.levels,
            schedule: self.schedule.clone(),
            depth: self.depth,
            budget,
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MultiCertificate {
    pub schema: String,
    pub config: MultiConfig,
    #[serde(flatten)]
    pub outcome: SearchOutcome<MultiRecurrence>,
}

pub fn run_multi(config: &MultiConfig) -> Result<MultiCertificate, ConfigError> {
    check_schema(&config.schema)?;
    let base = config.base.build(config.order, &config.domination)?;
    let outcome = crate::dynamics::multiple_recurrence_search(
        &config.space,
        &config.systems,
        &base,
        &config.params(),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(MultiCertificate { schema: SCHEMA.into(), config: config.clone(), outcome })
}

pub fn verify_multi(cert: &MultiCertificate) -> Result<(), VerifyError> {
    if cert.schema != SCHEMA {
        return Err(VerifyError::Mismatch(format!("schema {:?}", cert.schema)));
    }
    let SearchOutcome::Found { witness } = &cert.outcome else {
        return Ok(());
    };
    let base = cert
        .config
        .base
        .build(cert.config.order, &cert.config.domination)
        .map_err(|e| VerifyError::Mismatch(e.to_string()))?;
    if is_extraction(&witness.point.prefix, &base, witness.point.prefix.len())?.is_none() {
        return Err(VerifyError::Mismatch("prefix is not an extraction of the base".into()));
    }
    let space = &cert.config.space;
    let mut per_system = vec![0.0f64; cert.config.systems.len()];
    for (word, recorded) in &witness.residuals {
        let w = word
            .as_constant()
            .ok_or_else(|| VerifyError::Mismatch("residual word is not constant".into()))?;
        if recorded.len() != cert.config.systems.len() {
            return Err(VerifyError::Mismatch("residual arity disagrees".into()));
        }
        for (i, sys) in cert.config.systems.iter().enumerate() {
            let d = space.distance(&sys.apply(space, w, &witness.point.x0)?, &witness.point.x0);
            if d != recorded[i] {
                return Err(VerifyError::Mismatch(format!(
                    "recomputed residual {d} disagrees with recorded {}",
                    recorded[i]
                )));
            }
            per_system[i] = per_system[i].max(d);
        }
    }
    if per_system != witness.per_system_epsilon
        || witness.achieved_epsilon
            != witness.per_system_epsilon.iter().copied().fold(0.0, f64::max)
    {
        return Err(VerifyError::Mismatch("summary tolerances disagree with residuals".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Limit-equivalence runs
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IpConfig {
    pub schema: String,
    pub space: Space,
    pub net: Net,
    pub domination: DominationVector,
    pub order: SeqOrder,
    #[serde(flatten)]
    pub base: BaseSpec,
    pub x0: Point,
    pub epsilon: f64,
    pub n0: u32,
    pub depth: usize,
    pub seed: u64,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IpCertificate {
    pub schema: String,
    pub config: IpConfig,
    pub report: IpReport,
}

pub fn run_check_ip(config: &IpConfig) -> Result<IpCertificate, ConfigError> {
    check_schema(&config.schema)?;
    let base = config.base.build(config.order, &config.domination)?;
    let report = uniform_ip_check(
        &config.space,
        &config.net,
        &base,
        &config.x0,
        config.epsilon,
        config.n0,
        config.depth,
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(IpCertificate { schema: SCHEMA.into(), config: config.clone(), report })
}

pub fn verify_check_ip(cert: &IpCertificate) -> Result<(), VerifyError> {
    if cert.schema != SCHEMA {
        return Err(VerifyError::Mismatch(format!("schema {:?}", cert.schema)));
    }
    let base = cert
        .config
        .base
        .build(cert.config.order, &cert.config.domination)
        .map_err(|e| VerifyError::Mismatch(e.to_string()))?;
    let fresh = uniform_ip_check(
        &cert.config.space,
        &cert.config.net,
        &base,
        &cert.config.x0,
        cert.config.epsilon,
        cert.config.n0,
        cert.config.depth,
    )?;
    if fresh != cert.report {
        return Err(VerifyError::Mismatch("recomputed report disagrees".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Semigroup runs
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SemigroupConfig {
    pub schema: String,
    pub space: Space,
    pub table: SemigroupTable,
    pub scale: Scalar,
    pub domination: DominationVector,
    pub order: SeqOrder,
    #[serde(flatten)]
    pub base: BaseSpec,
    pub levels: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub depth: usize,
    pub seed: u64,
    #[serde(default)]
    pub budget: Option<SearchBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SemigroupCertificate {
    pub schema: String,
    pub config: SemigroupConfig,
    pub start: Point,
    #[serde(flatten)]
    pub outcome: SearchOutcome<SemigroupRecurrence>,
}

pub fn run_semigroup(config: &SemigroupConfig) -> Result<SemigroupCertificate, ConfigError> {
    check_schema(&config.schema)?;
    let base = config.base.build(config.order, &config.domination)?;
    let mut budget = config.budget.unwrap_or_else(default_budget);
    budget.seed = config.seed;
    let params = RefineParams {
        levels: config.levels,
        schedule: config.schedule.clone(),
        depth: config.depth,
        budget,
    };
    let start = config
        .start
        .clone()
        .unwrap_or_else(|| crate::dynamics::multi::start_point(&config.space, config.seed));
    let outcome = crate::dynamics::semigroup_recurrence(
        &config.space,
        &config.table,
        &config.scale,
        &base,
        &start,
        &params,
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(SemigroupCertificate { schema: SCHEMA.into(), config: config.clone(), start, outcome })
}

pub fn verify_semigroup(cert: &SemigroupCertificate) -> Result<(), VerifyError> {
    if cert.schema != SCHEMA {
        return Err(VerifyError::Mismatch(format!("schema {:?}", cert.schema)));
    }
    let SearchOutcome::Found { witness } = &cert.outcome else {
        return Ok(());
    };
    // Recurrence side: same checks as a plain run, against the induced
    // translation system.
    let sys = WordSystem::Phi {
        table: cert.config.table.clone(),
        scale: cert.config.scale.clone(),
    };
    let space = &cert.config.space;
    let words: Vec<crate::word::LocatedWord> =
        plans(&witness.point.prefix, PlanFilter::ConstantOnly, witness.point.prefix.len())
            .map(|(_, w)| w.as_constant().unwrap().clone())
            .collect();
    if words.len() != witness.point.residuals.len() {
        return Err(VerifyError::Mismatch("residual table length disagrees".into()));
    }
    for (w, (word, orbit_d, rec_d)) in words.iter().zip(&witness.point.residuals) {
        if w.to_word() != *word {
            return Err(VerifyError::Mismatch("residual table words disagree".into()));
        }
        let o = space.distance(&sys.apply(space, w, &cert.start)?, &witness.point.x0);
        let r = space.distance(&sys.apply(space, w, &witness.point.x0)?, &witness.point.x0);
        if o != *orbit_d || r != *rec_d {
            return Err(VerifyError::Mismatch("recomputed residuals disagree".into()));
        }
    }
    // Step decomposition: re-verify by direct substitution.
    if witness.decomposition.len() != witness.point.prefix.len() {
        return Err(VerifyError::Mismatch("decomposition arity disagrees".into()));
    }
    for (slot, recorded) in witness.decomposition.iter().enumerate() {
        let fresh =
            crate::dynamics::semigroup::decompose_term(&cert.config.table, &witness.point.prefix, slot + 1)?;
        if &fresh != recorded {
            return Err(VerifyError::Mismatch(format!(
                "decomposition of term {} disagrees",
                slot + 1
            )));
        }
        if !recorded.affine_verified {
            return Err(VerifyError::Mismatch(format!(
                "term {} decomposition failed its substitution check",
                slot + 1
            )));
        }
    }
    Ok(())
}
