use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_out, ConvexPolyhedron};
use crate::linalg::{self, Matrix};
use crate::scalar::{dot, from_strings, to_strings, Scalar};

/// Objective classes whose limiting subdifferential is an exact polyhedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective<S> {
    /// `c·z + c₀`
    Affine { c: Vec<S>, c0: S },
    /// `maxᵢ (cᵢ·z + c₀ᵢ)`
    MaxAffine { pieces: Vec<(Vec<S>, S)> },
    /// `½ zᵀQz + c·z` with `Q` symmetric
    Quadratic { q: Matrix<S>, c: Vec<S> },
}

impl<S: Scalar> Objective<S> {
    pub fn linear(c: Vec<S>) -> Self {
        Objective::Affine { c, c0: S::zero() }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Affine { c, .. } | Objective::Quadratic { c, .. } => c.len(),
            Objective::MaxAffine { pieces } => pieces.first().map_or(0, |p| p.0.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Objective::Affine { .. } => Ok(()),
            Objective::MaxAffine { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::pre("max-affine objective without pieces"));
                }
                let n = pieces[0].0.len();
                if pieces.iter().any(|p| p.0.len() != n) {
                    return Err(Error::dim("max-affine pieces of different lengths"));
                }
                Ok(())
            }
            Objective::Quadratic { q, c } => {
                let n = c.len();
                if q.len() != n || q.iter().any(|r| r.len() != n) {
                    return Err(Error::dim("quadratic term shape"));
                }
                if (0..n).any(|i| (0..n).any(|j| q[i][j] != q[j][i])) {
                    return Err(Error::pre("quadratic term is not symmetric"));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, z: &[S]) -> S {
        match self {
            Objective::Affine { c, c0 } => dot(c, z) + c0,
            Objective::MaxAffine { pieces } => {
                pieces.iter().map(|(c, c0)| dot(c, z) + c0).max().expect("nonempty pieces")
            }
            Objective::Quadratic { q, c } => {
                let qz = linalg::mat_vec(q, z);
                dot(&qz, z) / S::int(2) + dot(c, z)
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Objective::Affine { .. } | Objective::MaxAffine { .. } => true,
            Objective::Quadratic { q, .. } => linalg::is_psd(q),
        }
    }

    /// Limiting subdifferential at `z`.
    pub fn subdifferential_at(&self, z: &[S]) -> Result<ConvexPolyhedron<S>> {
        if z.len() != self.dim() {
            return Err(Error::dim("objective evaluated at a point of wrong length"));
        }
        match self {
            Objective::Affine { c, .. } => Ok(ConvexPolyhedron::point(c)),
            Objective::Quadratic { q, c } => Ok(ConvexPolyhedron::point(&linalg::add_vec(&linalg::mat_vec(q, z), c))),
            Objective::MaxAffine { pieces } => {
                let top = self.value(z);
                let active: Vec<&Vec<S>> =
                    pieces.iter().filter(|(c, c0)| dot(c, z) + c0 == top).map(|(c, _)| c).collect();
                let n = z.len();
                let k = active.len();
                // (g, t): g = Σ tᵢ cᵢ, t ≥ 0, Σ t = 1
                let mut p = ConvexPolyhedron::universe(n + k);
                for j in 0..n {
                    let mut row = vec![S::zero(); n + k];
                    row[j] = S::one();
                    for (i, c) in active.iter().enumerate() {
                        row[n + i] = -c[j].clone();
                    }
                    p.push_eq(row, S::zero());
                }
                let mut sum = vec![S::zero(); n + k];
                for i in 0..k {
                    sum[n + i] = S::one();
                    let mut row = vec![S::zero(); n + k];
                    row[n + i] = -S::one();
                    p.push_ineq(row, S::zero());
                }
                p.push_eq(sum, S::one());
                project_out(&p, &(n..n + k).collect::<Vec<_>>())
            }
        }
    }

    pub fn to_dto(&self) -> ObjectiveDto {
        match self {
            Objective::Affine { c, c0 } => ObjectiveDto::Affine { c: to_strings(c), c0: Some(c0.to_string()) },
            Objective::MaxAffine { pieces } => ObjectiveDto::MaxAffine {
                pieces: pieces.iter().map(|(c, c0)| AffineDto { c: to_strings(c), c0: Some(c0.to_string()) }).collect(),
            },
            Objective::Quadratic { q, c } => {
                ObjectiveDto::Quadratic { q: q.iter().map(|r| to_strings(r)).collect(), c: to_strings(c) }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AffineDto {
    pub c: Vec<String>,
    #[serde(default)]
    pub c0: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveDto {
    Affine {
        c: Vec<String>,
        #[serde(default)]
        c0: Option<String>,
    },
    MaxAffine {
        pieces: Vec<AffineDto>,
    },
    Quadratic {
        q: Vec<Vec<String>>,
        c: Vec<String>,
    },
}

impl ObjectiveDto {
    pub fn to_objective<S: Scalar>(&self) -> Result<Objective<S>> {
        let opt = |x: &Option<String>| -> Result<S> {
            match x {
                Some(s) => crate::scalar::parse_scalar(s),
                None => Ok(S::zero()),
            }
        };
        let obj = match self {
            ObjectiveDto::Affine { c, c0 } => Objective::Affine { c: from_strings(c)?, c0: opt(c0)? },
            ObjectiveDto::MaxAffine { pieces } => Objective::MaxAffine {
                pieces: pieces.iter().map(|p| Ok((from_strings(&p.c)?, opt(&p.c0)?))).collect::<Result<_>>()?,
            },
            ObjectiveDto::Quadratic { q, c } => Objective::Quadratic {
                q: q.iter().map(|r| from_strings(r)).collect::<Result<_>>()?,
                c: from_strings(c)?,
            },
        };
        obj.validate()?;
        Ok(obj)
    }
}
