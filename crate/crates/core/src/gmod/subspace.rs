use super::GradedModule;
use crate::linalg::{intersect_columns, same_span, sum_columns, Matrix};

/// A subspace of each graded piece of an ambient module, stored as column
/// bases aligned with the ambient degree window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSubspace {
    d_min: i32,
    bases: Vec<Matrix>,
    empty: Matrix,
}

impl GradedSubspace {
    pub fn from_fn(ambient: &GradedModule, f: impl Fn(i32) -> Matrix) -> Self {
        let bases = ambient
            .degrees()
            .map(|d| {
                let b = f(d);
                assert_eq!(b.rows(), ambient.dim(d), "subspace basis has wrong ambient dimension");
                b
            })
            .collect();
        GradedSubspace {
            d_min: ambient.d_min(),
            bases,
            empty: Matrix::zeros(ambient.p(), 0, 0),
        }
    }

    pub fn full(ambient: &GradedModule) -> Self {
        Self::from_fn(ambient, |d| Matrix::identity(ambient.p(), ambient.dim(d)))
    }

    pub fn zero(ambient: &GradedModule) -> Self {
        Self::from_fn(ambient, |d| Matrix::zeros(ambient.p(), ambient.dim(d), 0))
    }

    /// Column basis in degree `d` (an empty matrix off the window).
    pub fn basis(&self, d: i32) -> &Matrix {
        let k = d - self.d_min;
        if k < 0 || k as usize >= self.bases.len() {
            &self.empty
        } else {
            &self.bases[k as usize]
        }
    }

    pub fn dim(&self, d: i32) -> usize {
        self.basis(d).cols()
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(|b| b.cols()).sum()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min..=self.d_min + self.bases.len() as i32 - 1
    }

    pub fn intersect(&self, other: &GradedSubspace) -> GradedSubspace {
        self.combine(other, intersect_columns)
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        self.combine(other, sum_columns)
    }

    fn combine(&self, other: &GradedSubspace, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> GradedSubspace {
        assert_eq!(self.d_min, other.d_min);
        assert_eq!(self.bases.len(), other.bases.len());
        GradedSubspace {
            d_min: self.d_min,
            bases: self.bases.iter().zip(&other.bases).map(|(a, b)| f(a, b)).collect(),
            empty: self.empty.clone(),
        }
    }

    /// Exact equality of subspaces degree by degree.
    pub fn same_as(&self, other: &GradedSubspace) -> bool {
        self.d_min == other.d_min
            && self.bases.len() == other.bases.len()
            && self.bases.iter().zip(&other.bases).all(|(a, b)| same_span(a, b))
    }

    /// First degree where the two subspaces differ.
    pub fn first_difference(&self, other: &GradedSubspace) -> Option<i32> {
        self.degrees()
            .find(|&d| !same_span(self.basis(d), other.basis(d)))
    }

    pub fn contains(&self, other: &GradedSubspace) -> bool {
        self.degrees().all(|d| self.basis(d).spans(other.basis(d)))
    }
}
