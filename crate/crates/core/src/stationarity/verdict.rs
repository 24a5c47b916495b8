use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_strings, to_strings, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Implicit,
    Fuzzy,
    Explicit,
    MordukhovichI,
    MordukhovichIi,
    MordukhovichIii,
    AbstractCq,
    MrCq,
    StrongCq,
    IncLambda,
    Sigma,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Implicit,
        CheckKind::Fuzzy,
        CheckKind::Explicit,
        CheckKind::MordukhovichI,
        CheckKind::MordukhovichIi,
        CheckKind::MordukhovichIii,
        CheckKind::AbstractCq,
        CheckKind::MrCq,
        CheckKind::StrongCq,
        CheckKind::IncLambda,
        CheckKind::Sigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Implicit => "implicit",
            CheckKind::Fuzzy => "fuzzy",
            CheckKind::Explicit => "explicit",
            CheckKind::MordukhovichI => "mordukhovich_i",
            CheckKind::MordukhovichIi => "mordukhovich_ii",
            CheckKind::MordukhovichIii => "mordukhovich_iii",
            CheckKind::AbstractCq => "abstract_cq",
            CheckKind::MrCq => "mr_cq",
            CheckKind::StrongCq => "strong_cq",
            CheckKind::IncLambda => "inc_lambda",
            CheckKind::Sigma => "sigma",
        }
    }

    pub fn is_stationarity(self) -> bool {
        matches!(self, CheckKind::Implicit | CheckKind::Fuzzy | CheckKind::Explicit)
    }

    /// Whether the check is posed at a multiplier `λ̄ ∈ K(z̄)`.
    pub fn uses_lambda(self) -> bool {
        !matches!(self, CheckKind::Implicit | CheckKind::MordukhovichI | CheckKind::Sigma)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown check kind '{s}'")))
    }
}

/// Multiplier witnesses. For a holding stationarity verdict they satisfy the
/// defining inclusion; for a failing qualification condition they are the
/// nonzero counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses<S> {
    pub lambda: Option<Vec<S>>,
    pub mu: Option<Vec<S>>,
    pub nu: Option<Vec<S>>,
    pub xi: Option<Vec<S>>,
    /// Further named parts, e.g. the chosen subgradient.
    pub extra: BTreeMap<String, Vec<S>>,
}

impl<S> Default for Witnesses<S> {
    fn default() -> Self {
        Witnesses { lambda: None, mu: None, nu: None, xi: None, extra: BTreeMap::new() }
    }
}

impl<S: Scalar> Witnesses<S> {
    pub fn is_empty(&self) -> bool {
        self.lambda.is_none() && self.mu.is_none() && self.nu.is_none() && self.xi.is_none() && self.extra.is_empty()
    }

    pub(crate) fn part(&self, name: &str) -> Result<&[S]> {
        let v = match name {
            "lambda" => self.lambda.as_deref(),
            "mu" => self.mu.as_deref(),
            "nu" => self.nu.as_deref(),
            "xi" => self.xi.as_deref(),
            other => self.extra.get(other).map(|v| v.as_slice()),
        };
        v.ok_or_else(|| Error::Parse(format!("witness '{name}' missing")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<S> {
    pub kind: CheckKind,
    pub point: Vec<S>,
    pub holds: bool,
    pub witnesses: Witnesses<S>,
    /// Stratum of `λ̄` within `K(z̄)` when the check is posed at a multiplier.
    pub stratum: Option<usize>,
    /// Anchors of the results applied.
    pub certificates: Vec<String>,
    /// Statements established by those results.
    pub certified: Vec<String>,
    /// Per-stratum verdicts when no `λ̄` was given; `holds` is then the
    /// existential aggregate.
    pub strata: Vec<Verdict<S>>,
    /// Universal aggregate over the strata.
    pub holds_for_all: Option<bool>,
}

impl<S: Scalar> Verdict<S> {
    pub(crate) fn new(kind: CheckKind, point: &[S], holds: bool) -> Self {
        Verdict {
            kind,
            point: point.to_vec(),
            holds,
            witnesses: Witnesses::default(),
            stratum: None,
            certificates: Vec::new(),
            certified: Vec::new(),
            strata: Vec::new(),
            holds_for_all: None,
        }
    }

    pub(crate) fn certify(&mut self, anchor: &str, statement: impl Into<String>) {
        if !self.certificates.iter().any(|a| a == anchor) {
            self.certificates.push(anchor.to_string());
        }
        self.certified.push(statement.into());
    }

    pub fn is_aggregate(&self) -> bool {
        !self.strata.is_empty()
    }

    pub fn to_dto(&self) -> VerdictDto {
        let w = &self.witnesses;
        let opt = |v: &Option<Vec<S>>| v.as_ref().map(|x| to_strings(x));
        VerdictDto {
            kind: self.kind,
            point: to_strings(&self.point),
            holds: self.holds,
            witnesses: WitnessesDto {
                lambda: opt(&w.lambda),
                mu: opt(&w.mu),
                nu: opt(&w.nu),
                xi: opt(&w.xi),
                extra: w.extra.iter().map(|(k, v)| (k.clone(), to_strings(v))).collect(),
            },
            stratum: self.stratum,
            certificates: self.certificates.clone(),
            certified: self.certified.clone(),
            strata: self.strata.iter().map(|v| v.to_dto()).collect(),
            holds_for_all: self.holds_for_all,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_dto()).expect("verdict serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dto: VerdictDto = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        dto.to_verdict()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WitnessesDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<String>>,
    #[serde(default, flatten)]
    pub extra: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerdictDto {
    pub kind: CheckKind,
    pub point: Vec<String>,
    pub holds: bool,
    pub witnesses: WitnessesDto,
    pub stratum: Option<usize>,
    pub certificates: Vec<String>,
    #[serde(default)]
    pub certified: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<VerdictDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds_for_all: Option<bool>,
}

impl VerdictDto {
    pub fn to_verdict<S: Scalar>(&self) -> Result<Verdict<S>> {
        let opt = |v: &Option<Vec<String>>| -> Result<Option<Vec<S>>> { v.as_ref().map(|x| from_strings(x)).transpose() };
        let w = &self.witnesses;
        Ok(Verdict {
            kind: self.kind,
            point: from_strings(&self.point)?,
            holds: self.holds,
            witnesses: Witnesses {
                lambda: opt(&w.lambda)?,
                mu: opt(&w.mu)?,
                nu: opt(&w.nu)?,
                xi: opt(&w.xi)?,
                extra: w.extra.iter().map(|(k, v)| Ok((k.clone(), from_strings(v)?))).collect::<Result<_>>()?,
            },
            stratum: self.stratum,
            certificates: self.certificates.clone(),
            certified: self.certified.clone(),
            strata: self.strata.iter().map(|d| d.to_verdict()).collect::<Result<_>>()?,
            holds_for_all: self.holds_for_all,
        })
    }
}
