//! Solution spaces returned by the solvers.

use crate::polymat::SeriesMatrix;

/// Either no solution (`Bottom`) or the affine set `particular + basis * b`
/// for constant vectors `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSpace {
    Bottom,
    Affine { particular: SeriesMatrix, basis: SeriesMatrix },
}

impl SolutionSpace {
    pub fn is_bottom(&self) -> bool {
        matches!(self, SolutionSpace::Bottom)
    }

    pub fn particular(&self) -> Option<&SeriesMatrix> {
        match self {
            SolutionSpace::Affine { particular, .. } => Some(particular),
            SolutionSpace::Bottom => None,
        }
    }

    pub fn basis(&self) -> Option<&SeriesMatrix> {
        match self {
            SolutionSpace::Affine { basis, .. } => Some(basis),
            SolutionSpace::Bottom => None,
        }
    }

    /// Number of basis columns, `None` for `Bottom`.
    pub fn dimension(&self) -> Option<usize> {
        self.basis().map(SeriesMatrix::cols)
    }
}
