//! Dense eigendecomposition of the graph Laplacian, the graph Fourier
//! transform, and bandlimited test-signal synthesis.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{Graph, Signal};

/// Dense graphs only; local subdomains and every test graph sit far below
/// this.
pub const MAX_DENSE_EIGEN_N: usize = 10_000;

/// Full eigendecomposition `L = U diag(lambda) U^T` with eigenvalues in
/// ascending order and a deterministic sign convention on the columns of
/// `U` (largest-magnitude entry positive, first such entry on ties).
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// Orthonormal eigenvector matrix, column `k` paired with
    /// `eigenvalues[k]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Graph Fourier coefficients `x_hat = U^T x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients(DVector<f64>);

impl FourierCoefficients {
    pub fn from_vec(values: Vec<f64>) -> Self {
        FourierCoefficients(DVector::from_vec(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn norm2(&self) -> f64 {
        self.0.norm()
    }
}

impl std::ops::Index<usize> for FourierCoefficients {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Dense symmetric eigendecomposition of the graph's Laplacian.
pub fn eigendecompose(g: &Graph) -> Result<Spectrum> {
    let n = g.n();
    if n > MAX_DENSE_EIGEN_N {
        return Err(Error::TooLarge(n, MAX_DENSE_EIGEN_N));
    }
    let l = g.laplacian();
    for i in 0..n {
        for j in (i + 1)..n {
            if l[(i, j)] != l[(j, i)] {
                return Err(Error::NonSymmetric(i, j));
            }
        }
    }
    let eig = l.clone().symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues of a symmetric real matrix are finite")
    });

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut lead = 0usize;
        for i in 1..n {
            if col[i].abs() > col[lead].abs() {
                lead = i;
            }
        }
        let flip = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, dst)] = flip * col[i];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Forward transform `x_hat = U^T x`.
pub fn fourier(spec: &Spectrum, x: &Signal) -> Result<FourierCoefficients> {
    if x.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: x.len(),
        });
    }
    Ok(FourierCoefficients(spec.eigenvectors.tr_mul(x.values())))
}

/// Inverse transform `x = U x_hat`.
pub fn inverse_fourier(spec: &Spectrum, xhat: &FourierCoefficients) -> Result<Signal> {
    if xhat.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: xhat.len(),
        });
    }
    Ok(Signal::new(&spec.eigenvectors * xhat.values()))
}

/// Sum of the first `k` eigenvectors, the synthetic test signal used by the
/// benchmarks.
pub fn bandlimited_signal(spec: &Spectrum, k: usize) -> Result<Signal> {
    if k == 0 || k > spec.n() {
        return Err(Error::KOutOfRange { k, n: spec.n() });
    }
    let mut acc = DVector::zeros(spec.n());
    for col in 0..k {
        acc += spec.eigenvectors.column(col);
    }
    Ok(Signal::new(acc))
}
