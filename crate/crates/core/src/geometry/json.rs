use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolyhedron, PolyUnion};
use crate::scalar::{from_strings, to_strings, Scalar};

/// Serialized polyhedron with rationals written as `"p/q"` strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronDto {
    pub dim: usize,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<String>>,
    #[serde(default)]
    pub b: Vec<String>,
    #[serde(rename = "E", default)]
    pub e: Vec<Vec<String>>,
    #[serde(default)]
    pub d: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyUnionDto {
    pub dim: usize,
    pub pieces: Vec<PolyhedronDto>,
}

impl<S: Scalar> From<&ConvexPolyhedron<S>> for PolyhedronDto {
    fn from(p: &ConvexPolyhedron<S>) -> Self {
        PolyhedronDto {
            dim: p.dim(),
            a: p.a().iter().map(|r| to_strings(r)).collect(),
            b: to_strings(p.b()),
            e: p.e().iter().map(|r| to_strings(r)).collect(),
            d: to_strings(p.d()),
        }
    }
}

impl PolyhedronDto {
    pub fn to_polyhedron<S: Scalar>(&self) -> Result<ConvexPolyhedron<S>> {
        let a = self.a.iter().map(|r| from_strings(r)).collect::<Result<Vec<_>>>()?;
        let e = self.e.iter().map(|r| from_strings(r)).collect::<Result<Vec<_>>>()?;
        ConvexPolyhedron::new(self.dim, a, from_strings(&self.b)?, e, from_strings(&self.d)?)
    }
}

impl<S: Scalar> From<&PolyUnion<S>> for PolyUnionDto {
    fn from(u: &PolyUnion<S>) -> Self {
        PolyUnionDto { dim: u.dim(), pieces: u.pieces().iter().map(PolyhedronDto::from).collect() }
    }
}

impl PolyUnionDto {
    pub fn to_union<S: Scalar>(&self) -> Result<PolyUnion<S>> {
        let pieces = self.pieces.iter().map(|p| p.to_polyhedron()).collect::<Result<Vec<_>>>()?;
        PolyUnion::possibly_empty(self.dim, pieces)
    }
}

impl<S: Scalar> ConvexPolyhedron<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolyhedronDto::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dto: PolyhedronDto = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        dto.to_polyhedron()
    }
}

impl<S: Scalar> PolyUnion<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolyUnionDto::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dto: PolyUnionDto = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        dto.to_union()
    }
}
