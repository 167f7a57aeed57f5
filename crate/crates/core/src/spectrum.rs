//! Full eigendecomposition of a sector matrix.
//!
//! Eigenvalues come out ascending. Each eigenvector is fixed in sign so that
//! its largest-magnitude component (first one on ties) is positive, which
//! makes the output reproducible. Eigenvalues closer than `degtol` form
//! degeneracy groups; these are contiguous index ranges.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVectorView, DVectorViewMut};

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::sector::SectorMatrix;
use crate::Real;

#[derive(Clone, Debug)]
pub struct Spectrum<T: Real = f64> {
    basis: Arc<SectorBasis>,
    eigenvalues: Vec<T>,
    eigenvectors: DMatrix<T>,
    groups: Vec<Range<usize>>,
    degtol: T,
}

/// `1e-8 · max(1, ‖H‖_F)`.
pub fn default_degtol<T: Real>(frobenius: T) -> T {
    T::of(1e-8) * frobenius.max(T::one())
}

/// Symmetric eigendecomposition with ascending eigenvalues and the sign
/// convention applied to each column.
pub fn symmetric_eigen<T: Real>(h: &DMatrix<T>) -> Result<(Vec<T>, DMatrix<T>)> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.ncols(),
        });
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergence(n));
    }
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = h
        .clone()
        .try_symmetric_eigen(T::default_epsilon(), 10_000 + 100 * n)
        .ok_or(Error::NonConvergence(n))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let values: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<T>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        fix_sign(vectors.column_mut(dst));
    }
    Ok((values, vectors))
}

/// Flips `v` so its largest-magnitude component is positive.
pub fn fix_sign<T: Real>(mut v: DVectorViewMut<'_, T>) {
    let mut best = 0;
    let mut best_abs = T::zero();
    for (k, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = k;
        }
    }
    if !v.is_empty() && v[best] < T::zero() {
        v.neg_mut();
    }
}

/// Maximal runs of ascending eigenvalues whose consecutive gaps are at most
/// `degtol`. Singletons are included.
pub fn group_degeneracies<T: Real>(eigenvalues: &[T], degtol: T) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=eigenvalues.len() {
        if k == eigenvalues.len() || eigenvalues[k] - eigenvalues[k - 1] > degtol {
            groups.push(start..k);
            start = k;
        }
    }
    groups
}

pub fn diagonalize<T: Real>(m: &SectorMatrix<T>) -> Result<Spectrum<T>> {
    diagonalize_with(m, default_degtol(m.frobenius_norm()))
}

pub fn diagonalize_with<T: Real>(m: &SectorMatrix<T>, degtol: T) -> Result<Spectrum<T>> {
    let (eigenvalues, eigenvectors) = symmetric_eigen(m.matrix())?;
    let groups = group_degeneracies(&eigenvalues, degtol);
    Ok(Spectrum {
        basis: m.basis().clone(),
        eigenvalues,
        eigenvectors,
        groups,
        degtol,
    })
}

impl<T: Real> Spectrum<T> {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVectorView<'_, T> {
        self.eigenvectors.column(k)
    }

    pub fn degtol(&self) -> T {
        self.degtol
    }

    pub fn degeneracy_groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Re-groups with a different tolerance.
    pub fn regroup(&mut self, degtol: T) {
        self.degtol = degtol;
        self.groups = group_degeneracies(&self.eigenvalues, degtol);
    }

    /// Whether eigenstate `k` shares its eigenvalue with another state.
    pub fn is_degenerate(&self, k: usize) -> bool {
        self.group_of(k).map(|g| g.len() > 1).unwrap_or(false)
    }

    pub fn group_of(&self, k: usize) -> Option<&Range<usize>> {
        let pos = self.groups.partition_point(|g| g.end <= k);
        self.groups.get(pos).filter(|g| g.contains(&k))
    }

    /// Indices whose eigenvalue lies within `tol` of `value`.
    pub fn indices_near(&self, value: T, tol: T) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| (self.eigenvalues[k] - value).abs() <= tol)
            .collect()
    }

    /// Replaces the eigenvectors of one degeneracy group by `block`, whose
    /// columns must span the same eigenspace.
    pub(crate) fn replace_group(&mut self, group: &Range<usize>, block: &DMatrix<T>) {
        for (c, k) in group.clone().enumerate() {
            self.eigenvectors.set_column(k, &block.column(c));
            fix_sign(self.eigenvectors.column_mut(k));
        }
    }
}
