//! Positive definite graph basis function kernels. The diffusion and
//! variational spline families are assembled from the Laplacian spectrum by
//! their Mercer sums; integer-order spline kernels additionally have a
//! factorization route that builds kernel columns by repeated linear solves
//! against `eps*I + L`, with no eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{Graph, Signal};
use crate::spectral::{fourier, Spectrum};

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// `f_hat_k = exp(-t * lambda_k)`, positive definite for every `t`.
    Diffusion { t: f64 },
    /// `f_hat_k = (eps + lambda_k)^(-s)`, positive definite for
    /// `eps > -lambda_1` and `s > 0`.
    VariationalSpline { eps: f64, s: f64 },
    /// Raw spectral multipliers supplied by the caller.
    Raw,
}

/// A positive definite GBF kernel tied to the spectrum of the graph it
/// lives on.
#[derive(Debug, Clone)]
pub struct GbfKernel {
    spectrum: Spectrum,
    multipliers: DVector<f64>,
    kind: KernelKind,
}

/// Symmetric positive definite kernel submatrix on an ordered node list.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub nodes: Vec<usize>,
    pub entries: DMatrix<f64>,
}

/// Positive definiteness criterion for a GBF: every spectral multiplier
/// strictly positive.
pub fn is_positive_definite_gbf(multipliers: &[f64]) -> bool {
    multipliers.iter().all(|&f| f > 0.0)
}

/// Diffusion kernel `exp(-t L)`.
pub fn diffusion_kernel(spectrum: Spectrum, t: f64) -> GbfKernel {
    let multipliers =
        DVector::from_iterator(spectrum.n(), spectrum.eigenvalues().iter().map(|&l| (-t * l).exp()));
    GbfKernel {
        spectrum,
        multipliers,
        kind: KernelKind::Diffusion { t },
    }
}

/// Variational spline kernel `(eps I + L)^(-s)`.
pub fn spline_kernel(spectrum: Spectrum, eps: f64, s: f64) -> Result<GbfKernel> {
    if !(s > 0.0) {
        return Err(Error::NonpositiveSplineOrder(s));
    }
    let min_eig = spectrum.min_eigenvalue();
    if !(eps > -min_eig) {
        return Err(Error::EpsilonTooSmall {
            eps,
            min_required: -min_eig,
        });
    }
    let multipliers = DVector::from_iterator(
        spectrum.n(),
        spectrum.eigenvalues().iter().map(|&l| (eps + l).powf(-s)),
    );
    Ok(GbfKernel {
        spectrum,
        multipliers,
        kind: KernelKind::VariationalSpline { eps, s },
    })
}

/// Kernel from raw spectral multipliers; they must all be positive.
pub fn kernel_from_multipliers(spectrum: Spectrum, multipliers: Vec<f64>) -> Result<GbfKernel> {
    if multipliers.len() != spectrum.n() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.n(),
            got: multipliers.len(),
        });
    }
    if !is_positive_definite_gbf(&multipliers) {
        return Err(Error::InvalidConfig(
            "spectral multipliers must be strictly positive".into(),
        ));
    }
    Ok(GbfKernel {
        spectrum,
        multipliers: DVector::from_vec(multipliers),
        kind: KernelKind::Raw,
    })
}

impl GbfKernel {
    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn multipliers(&self) -> &DVector<f64> {
        &self.multipliers
    }

    /// Single kernel entry by its Mercer sum.
    pub fn entry(&self, v: usize, w: usize) -> f64 {
        let u = self.spectrum.eigenvectors();
        (0..self.n())
            .map(|k| self.multipliers[k] * u[(v, k)] * u[(w, k)])
            .sum()
    }

    fn check_nodes(&self, nodes: &[usize]) -> Result<()> {
        for &v in nodes {
            if v >= self.n() {
                return Err(Error::NodeOutOfRange {
                    index: v,
                    n: self.n(),
                });
            }
        }
        Ok(())
    }

    /// Kernel submatrix on a node list, assembled as `B B^T` with
    /// `B = U[nodes, :] diag(sqrt(f_hat))`.
    pub fn matrix(&self, nodes: &[usize]) -> Result<KernelMatrix> {
        self.check_nodes(nodes)?;
        let b = self.scaled_rows(nodes);
        Ok(KernelMatrix {
            nodes: nodes.to_vec(),
            entries: &b * b.transpose(),
        })
    }

    /// Rectangular kernel block `K[rows, cols]`.
    pub fn cross_matrix(&self, rows: &[usize], cols: &[usize]) -> Result<DMatrix<f64>> {
        self.check_nodes(rows)?;
        self.check_nodes(cols)?;
        let br = self.scaled_rows(rows);
        let bc = self.scaled_rows(cols);
        Ok(&br * bc.transpose())
    }

    fn scaled_rows(&self, nodes: &[usize]) -> DMatrix<f64> {
        let u = self.spectrum.eigenvectors();
        let n = self.n();
        DMatrix::from_fn(nodes.len(), n, |r, k| {
            u[(nodes[r], k)] * self.multipliers[k].sqrt()
        })
    }

    /// RKHS norm `sqrt(sum_k x_hat_k^2 / f_hat_k)`.
    pub fn rkhs_norm(&self, x: &Signal) -> Result<f64> {
        let xhat = fourier(&self.spectrum, x)?;
        Ok((0..self.n())
            .map(|k| xhat[k] * xhat[k] / self.multipliers[k])
            .sum::<f64>()
            .sqrt())
    }

    /// RKHS inner product of two signals.
    pub fn rkhs_inner(&self, x: &Signal, y: &Signal) -> Result<f64> {
        let xhat = fourier(&self.spectrum, x)?;
        let yhat = fourier(&self.spectrum, y)?;
        Ok((0..self.n())
            .map(|k| xhat[k] * yhat[k] / self.multipliers[k])
            .sum())
    }
}

/// Generalized convolution `C_y x = U diag(y_hat) U^T x`.
pub fn convolve(spectrum: &Spectrum, y: &Signal, x: &Signal) -> Result<Signal> {
    let yhat = fourier(spectrum, y)?;
    let xhat = fourier(spectrum, x)?;
    let n = spectrum.n();
    let scaled =
        crate::spectral::FourierCoefficients::from_vec((0..n).map(|k| yhat[k] * xhat[k]).collect());
    crate::spectral::inverse_fourier(spectrum, &scaled)
}

/// Columns `K[:, cols]` of the integer-order spline kernel
/// `(eps I + L)^(-s)`, by `s` successive solves against a single
/// factorization. Falls back to partial-pivot LU when the shifted matrix is
/// not numerically positive definite; `positive_definite` records which
/// path ran.
pub struct SplineSolveColumns {
    pub columns: DMatrix<f64>,
    pub positive_definite: bool,
}

pub fn spline_kernel_columns_by_solve(
    g: &Graph,
    eps: f64,
    s: u32,
    cols: &[usize],
) -> Result<SplineSolveColumns> {
    if s == 0 {
        return Err(Error::NonpositiveSplineOrder(0.0));
    }
    let n = g.n();
    for &c in cols {
        if c >= n {
            return Err(Error::NodeOutOfRange { index: c, n });
        }
    }
    let mut shifted = g.laplacian().clone();
    for i in 0..n {
        shifted[(i, i)] += eps;
    }
    let mut rhs = DMatrix::<f64>::zeros(n, cols.len());
    for (k, &c) in cols.iter().enumerate() {
        rhs[(c, k)] = 1.0;
    }
    match shifted.clone().cholesky() {
        Some(chol) => {
            for _ in 0..s {
                rhs = chol.solve(&rhs);
            }
            Ok(SplineSolveColumns {
                columns: rhs,
                positive_definite: true,
            })
        }
        None => {
            let lu = shifted.lu();
            for _ in 0..s {
                rhs = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
            }
            Ok(SplineSolveColumns {
                columns: rhs,
                positive_definite: false,
            })
        }
    }
}
