use crate::error::{Error, Result};
use crate::geometry::{ConvexPolyhedron, MAX_PIECES};
use crate::scalar::Scalar;

/// A finite union of convex polyhedra of a common dimension.
///
/// Empty pieces are dropped on construction. [`PolyUnion::new`] rejects a
/// union with no nonempty piece; [`PolyUnion::empty`] builds the empty set
/// explicitly for results such as images outside the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyUnion<S> {
    dim: usize,
    pieces: Vec<ConvexPolyhedron<S>>,
}

impl<S: Scalar> PolyUnion<S> {
    pub fn new(dim: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Result<Self> {
        let u = Self::possibly_empty(dim, pieces)?;
        if u.pieces.is_empty() {
            return Err(Error::pre("every piece of the union is empty"));
        }
        Ok(u)
    }

    /// Like [`PolyUnion::new`] but accepts an empty result.
    pub fn possibly_empty(dim: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Result<Self> {
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::dim(format!("piece of dim {} in union of dim {dim}", p.dim())));
        }
        let pieces: Vec<_> = pieces.into_iter().filter(|p| !p.is_empty()).collect();
        if pieces.len() > MAX_PIECES {
            return Err(Error::Resource(format!("{} pieces exceed the limit of {MAX_PIECES}", pieces.len())));
        }
        Ok(PolyUnion { dim, pieces })
    }

    pub fn empty(dim: usize) -> Self {
        PolyUnion { dim, pieces: Vec::new() }
    }

    pub fn single(p: ConvexPolyhedron<S>) -> Self {
        let dim = p.dim();
        Self::possibly_empty(dim, vec![p]).expect("single piece")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[ConvexPolyhedron<S>] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<ConvexPolyhedron<S>> {
        self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_convex_piece(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn contains(&self, x: &[S]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    /// Pieces containing `x`.
    pub fn pieces_containing<'a>(&'a self, x: &'a [S]) -> impl Iterator<Item = &'a ConvexPolyhedron<S>> + 'a {
        self.pieces.iter().filter(move |p| p.contains(x))
    }

    pub fn feasible_point(&self) -> Option<Vec<S>> {
        self.pieces.iter().find_map(|p| p.feasible_point())
    }

    pub fn map_pieces<F>(&self, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&ConvexPolyhedron<S>) -> Result<ConvexPolyhedron<S>>,
    {
        let pieces = self.pieces.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::possibly_empty(dim, pieces)
    }

    pub fn pullback(&self, new_dim: usize, t: &[Vec<S>], shift: Option<&[S]>) -> Result<Self> {
        self.map_pieces(new_dim, |p| p.pullback(new_dim, t, shift))
    }

    pub fn translate(&self, v: &[S]) -> Self {
        self.map_pieces(self.dim, |p| Ok(p.translate(v))).expect("same dim")
    }

    pub fn intersect_polyhedron(&self, q: &ConvexPolyhedron<S>) -> Result<Self> {
        self.map_pieces(self.dim, |p| p.intersect(q))
    }

    /// Pairwise intersections.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dim("intersect unions of different dims"));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(p.intersect(q)?);
            }
        }
        Self::possibly_empty(self.dim, pieces)
    }

    /// Pairwise products.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(p.product(q));
            }
        }
        Self::possibly_empty(self.dim + other.dim, pieces)
    }

    pub fn union_with(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dim("union of different dims"));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::possibly_empty(self.dim, pieces)
    }

    /// Simplifies each piece and drops pieces contained in another one.
    pub fn simplify(&self) -> Self {
        let mut pieces: Vec<ConvexPolyhedron<S>> = Vec::new();
        for p in self.pieces.iter().map(|p| p.simplify()) {
            if !pieces.contains(&p) {
                pieces.push(p);
            }
        }
        let mut keep = vec![true; pieces.len()];
        for i in 0..pieces.len() {
            for j in 0..pieces.len() {
                if i != j && keep[j] && pieces[j].contains_polyhedron(&pieces[i]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let pieces = pieces.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
        PolyUnion { dim: self.dim, pieces }
    }

    pub fn is_cone(&self) -> bool {
        self.pieces.iter().all(|p| p.is_cone())
    }
}

impl<S: Scalar> From<ConvexPolyhedron<S>> for PolyUnion<S> {
    fn from(p: ConvexPolyhedron<S>) -> Self {
        PolyUnion::single(p)
    }
}

/// One `{…}` per piece joined by ` ∪ `; `∅` for no pieces.
impl<S: Scalar> std::fmt::Display for PolyUnion<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.pieces.iter().map(|p| format!("{{{p}}}")).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}
