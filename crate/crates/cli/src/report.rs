//! Serializable reports.

use mumhodge::continuation::{CrossMumReport, FrameReport};
use mumhodge::lmhs::TorelliEvidence;
use mumhodge::picard_fuchs::SingularPointReport;
use serde::Serialize;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub order: usize,
    pub precision_bits: u32,
    pub max_precision_bits: u32,
    pub denominator_bound: String,
    /// Echo of a user-supplied base point; automatic base points appear in
    /// the continuation section.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorSummary {
    pub name: String,
    pub theta_form: String,
    pub z_degree: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectedMumCheck {
    pub expected: Vec<String>,
    pub found: Vec<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusSummary {
    pub order: usize,
    /// Leading coefficients of `ψ₃, ψ₂, ψ₁, ψ₀`.
    pub psi3: Vec<String>,
    pub psi2: Vec<String>,
    pub psi1: Vec<String>,
    pub psi0: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MirrorMapSummary {
    pub order: usize,
    pub a: String,
    pub q_of_z: Vec<String>,
    pub z_of_q: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RawLoop {
    pub location: String,
    pub precision: u32,
    pub log2_error: f64,
    pub matrix: [[String; 4]; 4],
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ContinuationSection {
    /// Integral frame at the only MUM point handled.
    Frame { frame: FrameReport },
    /// Both MUM points `0` and `∞`.
    CrossMum {
        #[serde(flatten)]
        report: CrossMumReport,
    },
    Skipped { reason: String },
    /// Recognition failed; the monodromy is given as raw floats in the
    /// Frobenius frame at `0`.
    Failed {
        error: String,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        raw_monodromy: Vec<RawLoop>,
        #[serde(skip_serializing_if = "Option::is_none")]
        log2_global_residual: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TorelliPair {
    pub first: String,
    pub second: String,
    #[serde(flatten)]
    pub evidence: TorelliEvidence,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum TorelliSection {
    SingleMum { location: String, conclusion: String },
    Pairwise { pairs: Vec<TorelliPair>, hypothesis_met: bool, conclusion: String },
    Unavailable { reason: String },
}

pub const HYPOTHESIS_MET: &str = "hypothesis met: generic Torelli applies";
pub const HYPOTHESIS_NOT_MET: &str = "hypothesis not met by this criterion";
pub const SINGLE_MUM: &str = "single MUM: the limit data at this point determine it, so generic Torelli holds near it";

impl TorelliSection {
    pub fn pairwise(pairs: Vec<TorelliPair>) -> Self {
        let hypothesis_met = pairs.iter().all(|p| p.evidence.verdict == mumhodge::lmhs::TorelliVerdict::Distinguishable);
        let conclusion = if hypothesis_met { HYPOTHESIS_MET } else { HYPOTHESIS_NOT_MET }.to_string();
        TorelliSection::Pairwise { pairs, hypothesis_met, conclusion }
    }

    pub fn conclusion(&self) -> &str {
        match self {
            TorelliSection::SingleMum { conclusion, .. } | TorelliSection::Pairwise { conclusion, .. } => conclusion,
            TorelliSection::Unavailable { reason } => reason,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub operator: OperatorSummary,
    pub settings: Settings,
    pub singular_points: Vec<SingularPointReport>,
    pub mum_points: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_mum: Option<ExpectedMumCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<FrobeniusSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mirror_map: Option<MirrorMapSummary>,
    pub continuation: ContinuationSection,
    pub torelli: TorelliSection,
}
