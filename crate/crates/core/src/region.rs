//! Membership predicates over `ℝⁿ`.

use std::fmt;
use std::sync::Arc;

use crate::bodies::ConvexBody;

pub trait Region: Send + Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    /// Whether the region is known to be convex (not verified).
    fn claimed_convex(&self) -> bool {
        false
    }
    /// Whether the region is known to satisfy `−A = A`.
    fn claimed_symmetric(&self) -> bool {
        false
    }
}

impl Region for ConvexBody<f64> {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        ConvexBody::contains(self, x)
    }

    fn claimed_convex(&self) -> bool {
        true
    }

    fn claimed_symmetric(&self) -> bool {
        self.is_symmetric()
    }
}

impl<R: Region + ?Sized> Region for Arc<R> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn contains(&self, x: &[f64]) -> bool {
        (**self).contains(x)
    }

    fn claimed_convex(&self) -> bool {
        (**self).claimed_convex()
    }

    fn claimed_symmetric(&self) -> bool {
        (**self).claimed_symmetric()
    }
}

/// `{x : ⟨a,x⟩ <= b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Region for HalfSpace {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        crate::linalg::dot(&self.normal, x) <= self.offset
    }

    fn claimed_convex(&self) -> bool {
        true
    }
}

/// A region given by an arbitrary predicate.
pub struct FnRegion<F> {
    dim: usize,
    convex: bool,
    pred: F,
}

impl<F: Fn(&[f64]) -> bool + Send + Sync> FnRegion<F> {
    pub fn new(dim: usize, pred: F) -> Self {
        FnRegion { dim, convex: false, pred }
    }

    pub fn convex(dim: usize, pred: F) -> Self {
        FnRegion { dim, convex: true, pred }
    }
}

impl<F> fmt::Debug for FnRegion<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnRegion").field("dim", &self.dim).field("convex", &self.convex).finish()
    }
}

impl<F: Fn(&[f64]) -> bool + Send + Sync> Region for FnRegion<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        (self.pred)(x)
    }

    fn claimed_convex(&self) -> bool {
        self.convex
    }
}
