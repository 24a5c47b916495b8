//! Problem classes built on the implicit-variable framework, the two
//! counterexamples and the grid oracle.

pub mod bilevel;
pub mod ccmp;
pub mod emop;
pub mod examples;
pub mod oracle;

use serde::{Deserialize, Serialize};

pub use bilevel::{complementarity_graph, BilevelLq, FullyExplicitReport, MpccReformulation, MultiplierConditions};
pub use ccmp::{ccmp_cross_check, Ccmp, CcmpCrossCheck};
pub use emop::{simplex, EmopLinear};
pub use examples::{example_a, ExampleB};
pub use oracle::{oracle_relate, GridAxes, GridOracleConfig, GridRow, GridSummary, ProgramOracle, RelationReport};

use crate::error::{Error, Result};
use crate::geometry::{PolyUnionDto, PolyhedronDto};
use crate::scalar::{from_strings, Scalar};
use crate::stationarity::{ImplicitProgram, Objective, ObjectiveDto, ProgramDto};

/// Problem file contents, tagged by `type`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    Ccmp {
        n: usize,
        kappa: usize,
        /// Defaults to `f(z) = eᵀz`.
        #[serde(default)]
        objective: Option<ObjectiveDto>,
        #[serde(rename = "M", default)]
        m_set: Option<PolyUnionDto>,
    },
    BilevelLq {
        #[serde(rename = "Q")]
        q: Vec<Vec<String>>,
        #[serde(rename = "P")]
        p: Vec<Vec<String>>,
        c: Vec<String>,
        #[serde(rename = "A")]
        a: Vec<Vec<String>>,
        b: Vec<String>,
        objective: ObjectiveDto,
        #[serde(rename = "S", default)]
        s_set: Option<PolyUnionDto>,
    },
    EmopLinear {
        #[serde(rename = "J")]
        j: Vec<Vec<String>>,
        #[serde(rename = "Gamma")]
        gamma: PolyhedronDto,
        #[serde(default)]
        objective: Option<ObjectiveDto>,
    },
    ExampleA,
    ExampleB,
    Program(ProgramDto),
}

/// A loaded instance: either a polyhedral program (with its builder kept
/// for class-specific reports) or the oracle-only counterexample.
#[derive(Debug, Clone)]
pub enum Loaded<S> {
    Ccmp(Ccmp<S>),
    Bilevel(BilevelLq<S>),
    Emop(EmopLinear<S>),
    Program(ImplicitProgram<S>),
    OracleOnly(ExampleB),
}

impl<S: Scalar> Loaded<S> {
    /// The polyhedral program, if there is one.
    pub fn program(&self) -> Option<&ImplicitProgram<S>> {
        match self {
            Loaded::Ccmp(c) => Some(c.program()),
            Loaded::Bilevel(b) => Some(b.program()),
            Loaded::Emop(e) => Some(e.program()),
            Loaded::Program(p) => Some(p),
            Loaded::OracleOnly(_) => None,
        }
    }

    pub fn oracle(&self) -> &dyn ProgramOracle<S> {
        match self {
            Loaded::OracleOnly(b) => b,
            _ => self.program().expect("polyhedral instance"),
        }
    }
}

fn matrix<S: Scalar>(rows: &[Vec<String>]) -> Result<Vec<Vec<S>>> {
    rows.iter().map(|r| from_strings(r)).collect()
}

impl Instance {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            // tagged enums buffer their content, so field errors carry no position
            if e.line() == 0 {
                Error::Parse(e.to_string())
            } else {
                Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
            }
        })
    }

    pub fn build<S: Scalar>(&self) -> Result<Loaded<S>> {
        Ok(match self {
            Instance::Ccmp { n, kappa, objective, m_set } => {
                let objective = match objective {
                    Some(o) => o.to_objective()?,
                    None => Objective::linear(vec![S::one(); *n]),
                };
                let m_set = m_set.as_ref().map(|u| u.to_union()).transpose()?;
                Loaded::Ccmp(Ccmp::new(*n, *kappa, objective, m_set)?)
            }
            Instance::BilevelLq { q, p, c, a, b, objective, s_set } => Loaded::Bilevel(BilevelLq::new(
                matrix(q)?,
                matrix(p)?,
                from_strings(c)?,
                matrix(a)?,
                from_strings(b)?,
                objective.to_objective()?,
                s_set.as_ref().map(|u| u.to_union()).transpose()?,
            )?),
            Instance::EmopLinear { j, gamma, objective } => Loaded::Emop(EmopLinear::new(
                matrix(j)?,
                gamma.to_polyhedron()?,
                objective.as_ref().map(|o| o.to_objective()).transpose()?,
            )?),
            Instance::ExampleA => Loaded::Program(example_a()?),
            Instance::ExampleB => Loaded::OracleOnly(ExampleB),
            Instance::Program(dto) => Loaded::Program(dto.to_program()?),
        })
    }
}
