//! Laplacian eigendecomposition and the graph Fourier transform.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{check_len, Graph};
use crate::scalar::{real, Real};

/// Ascending eigenpairs of a graph Laplacian, `L = U Λ Uᵀ`.
///
/// Each eigenvector column is sign-normalised so that its first entry of
/// non-negligible magnitude is positive. Eigenvalues at or below the zero
/// tolerance span the null space; there are `n - rank` of them and they come
/// first.
#[derive(Clone, Debug)]
pub struct LaplacianSpectrum<T: Real> {
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<T>,
    rank: usize,
    zero_tol: T,
}

impl<T: Real> LaplacianSpectrum<T> {
    /// Decomposes the Laplacian of `g` with the default relative zero tolerance.
    pub fn of(g: &Graph<T>) -> Result<Self> {
        Self::with_tolerance(g, None)
    }

    /// Decomposes the Laplacian of `g`. When `zero_tol` is `None` the
    /// tolerance is `T::ZERO_TOL_REL` times the largest eigenvalue magnitude.
    pub fn with_tolerance(g: &Graph<T>, zero_tol: Option<T>) -> Result<Self> {
        let n = g.n();
        let eig = SymmetricEigen::try_new(g.laplacian(), T::default_epsilon(), 10_000)
            .ok_or(Error::EigenNonConvergence)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .expect("finite eigenvalues")
        });

        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let mut eigenvectors = DMatrix::zeros(n, n);
        let sign_eps = T::default_epsilon().sqrt();
        for (col, &k) in order.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let flip = v
                .iter()
                .find(|x| x.abs() > sign_eps)
                .is_some_and(|&x| x < T::zero());
            for row in 0..n {
                eigenvectors[(row, col)] = if flip { -v[row] } else { v[row] };
            }
        }

        let scale = eigenvalues.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let zero_tol = zero_tol.unwrap_or(real::<T>(T::ZERO_TOL_REL) * scale);
        // empty graph: every eigenvalue is exactly zero
        let zero_tol = if zero_tol > T::zero() {
            zero_tol
        } else {
            T::default_epsilon()
        };
        let rank = eigenvalues.iter().filter(|&&x| x > zero_tol).count();

        Ok(Self {
            eigenvalues,
            eigenvectors,
            rank,
            zero_tol,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns.
    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.eigenvectors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn zero_tol(&self) -> T {
        self.zero_tol
    }

    /// Number of null-space coordinates.
    pub fn null_dim(&self) -> usize {
        self.n() - self.rank
    }

    /// Eigenvalue `j` with null-space entries snapped to exactly zero.
    #[inline]
    pub fn effective_eigenvalue(&self, j: usize) -> T {
        if j < self.null_dim() {
            T::zero()
        } else {
            self.eigenvalues[j]
        }
    }

    /// Graph Fourier transform `Uᵀ y`.
    pub fn gft(&self, y: &[T]) -> Result<DVector<T>> {
        check_len("signal", self.n(), y.len())?;
        Ok(self.eigenvectors.tr_mul(&DVector::from_column_slice(y)))
    }

    /// Inverse transform `U c`.
    pub fn igft(&self, coeffs: &[T]) -> Result<DVector<T>> {
        check_len("spectral coefficients", self.n(), coeffs.len())?;
        Ok(&self.eigenvectors * DVector::from_column_slice(coeffs))
    }

    /// `fᵀ L f` evaluated from spectral coefficients `c = Uᵀ f`.
    pub fn smoothness(&self, coeffs: &DVector<T>) -> T {
        coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &c)| acc + self.effective_eigenvalue(j) * c * c)
    }

    /// `U Λ Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<T> {
        let u = &self.eigenvectors;
        u * DMatrix::from_diagonal(&self.eigenvalues) * u.transpose()
    }
}
