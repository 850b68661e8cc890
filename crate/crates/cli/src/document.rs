//! Operator and record documents (TOML).

use std::collections::BTreeMap;
use std::path::Path;

use mumhodge::lmhs::MirrorInvariants;
use mumhodge::picard_fuchs::{PFOperator, SingularLocation};
use mumhodge::rational::{format_rational, parse_rational};
use mumhodge::Rational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A fourth-order operator `Σⱼ zʲ Qⱼ(Θ)`; `theta_coefficients[j]` lists the
/// coefficients of `Θ⁰..Θ⁴` in `Qⱼ` as exact rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub name: String,
    pub theta_coefficients: BTreeMap<String, [String; 5]>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    /// Expected MUM locations ("0", "infinity", "p/q").
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected_mum: Vec<String>,
    /// Mirror invariants keyed by MUM location.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mirror_invariants: BTreeMap<String, MirrorInvariants>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.expected_mum.is_empty() && self.mirror_invariants.is_empty()
    }
}

pub fn parse_location(s: &str) -> Result<SingularLocation, CliError> {
    match s.trim() {
        "infinity" | "inf" | "oo" => Ok(SingularLocation::Infinity),
        t => parse_rational(t).map(SingularLocation::Rational).map_err(|e| CliError::Parse(e.to_string())),
    }
}

impl OperatorDocument {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("operator documents serialize")
    }

    pub fn from_operator(name: &str, op: &PFOperator) -> Self {
        let theta_coefficients = op
            .terms()
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().any(|c| *c != Rational::default()))
            .map(|(j, row)| (j.to_string(), row.clone().map(|c| format_rational(&c))))
            .collect();
        OperatorDocument { name: name.to_string(), theta_coefficients, metadata: Metadata::default() }
    }

    pub fn operator(&self) -> Result<PFOperator, CliError> {
        let mut rows: BTreeMap<usize, [Rational; 5]> = BTreeMap::new();
        for (key, coeffs) in &self.theta_coefficients {
            let j: usize = key.trim().parse().map_err(|_| CliError::Parse(format!("z-power {key:?} is not a non-negative integer")))?;
            let mut row: [Rational; 5] = Default::default();
            for (slot, c) in row.iter_mut().zip(coeffs) {
                *slot = parse_rational(c).map_err(|e| CliError::Parse(format!("z^{j}: {e}")))?;
            }
            rows.insert(j, row);
        }
        let degree = rows.keys().next_back().copied().ok_or_else(|| CliError::Parse("no theta coefficients".into()))?;
        let terms = (0..=degree).map(|j| rows.remove(&j).unwrap_or_default()).collect();
        PFOperator::new(terms).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn expected_mum(&self) -> Result<Vec<SingularLocation>, CliError> {
        self.metadata.expected_mum.iter().map(|s| parse_location(s)).collect()
    }

    /// Supplied invariants at `z = 0`, if any.
    pub fn invariants_at_zero(&self) -> Result<Option<MirrorInvariants>, CliError> {
        for (key, mi) in &self.metadata.mirror_invariants {
            if parse_location(key)? == SingularLocation::zero() {
                return Ok(Some(mi.clone()));
            }
        }
        Ok(None)
    }
}

/// Per-MUM limit data entered by hand, for the Torelli test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordsDocument {
    #[serde(rename = "record")]
    pub records: Vec<MumRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MumRecord {
    pub label: String,
    /// `(a, b, e, f)` as rational strings; derived from `mirror_invariants`
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<[String; 4]>,
    /// `π/κ` as a rational string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_over_kappa: Option<String>,
    /// Rational added to `π`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_shift: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_invariants: Option<MirrorInvariants>,
}

impl RecordsDocument {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("record documents serialize")
    }
}

/// Operator documents bundled with the tool, by file name.
pub const BUNDLED: [(&str, &str); 3] = [
    ("two_mum.toml", include_str!("../operators/two_mum.toml")),
    ("quintic.toml", include_str!("../operators/quintic.toml")),
    ("theta4.toml", include_str!("../operators/theta4.toml")),
];

/// Record documents bundled with the tool, by file name.
pub const BUNDLED_RECORDS: [(&str, &str); 1] = [("degrees_42_14.toml", include_str!("../operators/degrees_42_14.toml"))];
