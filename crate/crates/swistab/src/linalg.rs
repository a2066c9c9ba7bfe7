//! Dense small-matrix numerics.
//!
//! Everything downstream works in the geometry induced by a symmetric
//! positive-definite weight `P`:
//!
//! ```text
//! ‖x‖_P = √(xᵀPx),    ‖A‖_P = max{‖Ax‖_P : ‖x‖_P = 1}
//! ```
//!
//! With `R = √P` (the principal square root), `‖A‖_P` equals the largest
//! singular value of `R·A·R⁻¹`, and the co-norm (minimum gain) equals the
//! smallest. [`PFactor`] caches `R` and `R⁻¹` so trajectory loops pay one
//! factorization per weight matrix.
//!
//! Matrices here are small (d ≤ a few dozen) and dense; eigenvalues of
//! nonsymmetric matrices go through a real Schur decomposition, symmetric
//! ones through a symmetric eigensolver.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry accepted when ingesting a matrix as symmetric.
pub const DEFAULT_SYM_TOL: f64 = 1e-12;

/// Iteration cap handed to the QR-type eigensolvers.
const EIGEN_MAX_ITER: usize = 10_000;

/// Sweep cap for the cyclic Jacobi eigensolver.
const JACOBI_MAX_SWEEPS: usize = 64;

/// `a·b − c·d` with one compensated rounding (Kahan's trick); accurate even
/// under heavy cancellation.
pub(crate) fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let cd = c * d;
    let err = f64::mul_add(c, d, -cd);
    let dop = f64::mul_add(a, b, -cd);
    dop - err
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The off-diagonal mass shrinks quadratically per sweep, the eigenvector
/// matrix is a product of exact rotations (orthogonal to machine
/// precision), and the eigenvalues carry errors O(eps·‖A‖). Shifted-QR
/// implementations can lose digits on clustered spectra, which weak-margin
/// certificates produce constantly; Jacobi does not.
fn jacobi_eigen(a: &DMatrix<f64>, with_vectors: bool) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= f64::EPSILON * scale {
            let mut vals: Vec<(f64, usize)> = (0..n).map(|i| (m[(i, i)], i)).collect();
            vals.sort_by(|x, y| x.0.total_cmp(&y.0));
            let eigenvalues: Vec<f64> = vals.iter().map(|(l, _)| *l).collect();
            let mut vecs = DMatrix::zeros(n, n);
            if with_vectors {
                for (col, (_, i)) in vals.iter().enumerate() {
                    vecs.set_column(col, &v.column(*i));
                }
            }
            return Ok((eigenvalues, vecs));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 0.25 * f64::EPSILON * f64::EPSILON * scale {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // rotation angle from the classic Jacobi formulas
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - s * miq;
                    m[(i, q)] = s * mip + c * miq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = c * mpj - s * mqj;
                    m[(q, j)] = s * mpj + c * mqj;
                }
                // restore exact symmetry on the rotated pair
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                if with_vectors {
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = c * vip - s * viq;
                        v[(i, q)] = s * vip + c * viq;
                    }
                }
            }
        }
    }
    Err(Error::EigenFailed)
}

/// Squared singular values of a (not necessarily square) matrix, ascending,
/// via the Gram matrix and Jacobi. Relative accuracy is excellent at the
/// top of the spectrum; the bottom is resolved to O(eps·σ_max²), which is
/// exactly the numeric-kernel regime.
fn gram_sq_singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let gram = a.transpose() * a;
    let sym = (&gram + gram.transpose()) * 0.5;
    let (vals, _) = jacobi_eigen(&sym, false)?;
    Ok(vals)
}

pub(crate) fn sigma_max(a: &DMatrix<f64>) -> Result<f64> {
    let vals = gram_sq_singular_values(a)?;
    Ok(vals[vals.len() - 1].max(0.0).sqrt())
}

pub(crate) fn sigma_min(a: &DMatrix<f64>) -> Result<f64> {
    let vals = gram_sq_singular_values(a)?;
    Ok(vals[0].max(0.0).sqrt())
}

/// Tolerance bundle used across all numeric routines.
///
/// * `eig` — accuracy band granted to computed eigenvalues / singular values;
/// * `rank` — relative numeric-rank threshold for kernels;
/// * `psd` — slack for positive-semidefiniteness and norm comparisons;
/// * `conv` — convergence threshold for limit probes;
/// * `band` — decision band around 1 for the stability verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eig: f64,
    pub rank: f64,
    pub psd: f64,
    pub conv: f64,
    pub band: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eig: 1e-12,
            rank: 1e-9,
            psd: 1e-9,
            conv: 1e-8,
            band: 1e-9,
        }
    }
}

fn check_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() == a.ncols() && a.nrows() > 0 {
        Ok(a.nrows())
    } else {
        Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

/// Largest eigenvalue modulus of a square matrix.
///
/// d = 1 and d = 2 use closed forms; larger matrices go through the real
/// Schur decomposition.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    let d = check_square(a)?;
    check_finite(a)?;
    match d {
        1 => Ok(a[(0, 0)].abs()),
        2 => {
            let t = a[(0, 0)] + a[(1, 1)];
            let det = diff_of_products(a[(0, 0)], a[(1, 1)], a[(0, 1)], a[(1, 0)]);
            let disc = diff_of_products(t, t, 4.0, det);
            if disc >= 0.0 {
                let s = disc.sqrt();
                Ok(0.5 * (t + s).abs().max((t - s).abs()))
            } else {
                // complex pair; |λ|² = det
                Ok(det.sqrt())
            }
        }
        _ => {
            let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, EIGEN_MAX_ITER)
                .ok_or(Error::EigenFailed)?;
            Ok(schur
                .complex_eigenvalues()
                .iter()
                .fold(0.0f64, |r, z| r.max(z.norm())))
        }
    }
}

/// A real symmetric matrix, symmetrized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Ingest a matrix that is symmetric within [`DEFAULT_SYM_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_sym_tol(m, DEFAULT_SYM_TOL)
    }

    /// Ingest a matrix that is symmetric within `sym_tol` (relative to the
    /// largest entry); the stored copy is exactly symmetrized.
    pub fn with_sym_tol(m: DMatrix<f64>, sym_tol: f64) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let scale = m.amax();
        let mut asym = 0.0f64;
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if scale > 0.0 && asym > sym_tol * scale {
            return Err(Error::NotSymmetric {
                asym: asym / scale,
                tol: sym_tol,
            });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymMatrix { m: sym })
    }

    /// Wrap a matrix that is symmetric by construction (no check beyond
    /// exact symmetrization).
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let sym = (&m + m.transpose()) * 0.5;
        SymMatrix { m: sym }
    }

    pub fn identity(d: usize) -> Self {
        SymMatrix {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Eigenvalues (ascending) with matching orthonormal eigenvector columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        jacobi_eigen(&self.m, true)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.0[0])
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = self.eigen()?;
        Ok(vals[vals.len() - 1])
    }
}

/// A linear subspace of ℝ^d held as an orthonormal basis (columns).
#[derive(Clone, Debug)]
pub struct Subspace {
    /// d×r with orthonormal columns; r = 0 encodes the zero subspace.
    basis: DMatrix<f64>,
}

impl Subspace {
    const ORTHO_TOL: f64 = 1e-8;

    /// Wrap a basis matrix, checking `BᵀB = I` within a fixed tolerance.
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        check_finite(&basis)?;
        let r = basis.ncols();
        let gram = basis.transpose() * &basis;
        let err = (&gram - DMatrix::identity(r, r)).amax();
        if r > 0 && err > Self::ORTHO_TOL {
            return Err(Error::PreconditionFailed {
                what: "basis columns are not orthonormal",
                value: err,
            });
        }
        Ok(Subspace { basis })
    }

    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    pub fn zero(d: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(d, 0),
        }
    }

    pub fn full(d: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(d, d),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projector B·Bᵀ onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Whether `v` lies in the subspace up to `tol·‖v‖`.
    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        let res = v - self.projector() * v;
        res.norm() <= tol * v.norm()
    }
}

/// Cached factorization of an SPD weight `P`.
///
/// Holds the principal square root `R = √P` (symmetric, `R·R = P`) and its
/// inverse, so repeated norm evaluations cost two small matrix products and
/// one SVD.
#[derive(Clone, Debug)]
pub struct PFactor {
    r: DMatrix<f64>,
    r_inv: DMatrix<f64>,
    cond: f64,
    dim: usize,
}

impl PFactor {
    pub fn new(p: &SymMatrix, tol: &Tolerance) -> Result<Self> {
        let (vals, vecs) = p.eigen()?;
        let d = p.dim();
        let min = vals[0];
        let max = vals[d - 1];
        if min <= tol.psd {
            return Err(Error::NotPositiveDefinite { min_eig: min });
        }
        let sqrt =
            DMatrix::from_diagonal(&DVector::from_iterator(d, vals.iter().map(|v| v.sqrt())));
        let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            vals.iter().map(|v| 1.0 / v.sqrt()),
        ));
        let r = &vecs * sqrt * vecs.transpose();
        let r_inv = &vecs * inv_sqrt * vecs.transpose();
        Ok(PFactor {
            r,
            r_inv,
            cond: (max / min).sqrt(),
            dim: d,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The principal square root `R = √P`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// `R⁻¹` (also symmetric).
    pub fn inv_factor(&self) -> &DMatrix<f64> {
        &self.r_inv
    }

    /// Condition number of `R`; a product-boundedness constant for any
    /// system certified under this weight.
    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// Similarity transform `R·A·R⁻¹` taking the P-geometry to the
    /// Euclidean one.
    pub fn transform(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        &self.r * a * &self.r_inv
    }

    /// Induced operator norm ‖A‖_P.
    pub fn opnorm(&self, a: &DMatrix<f64>) -> f64 {
        debug_assert_eq!(a.nrows(), self.dim);
        sigma_max(&self.transform(a)).expect("jacobi sweep cap")
    }

    /// Co-norm (minimum gain) ‖A‖_{P,co}.
    pub fn conorm(&self, a: &DMatrix<f64>) -> f64 {
        debug_assert_eq!(a.nrows(), self.dim);
        sigma_min(&self.transform(a)).expect("jacobi sweep cap")
    }

    /// Vector norm ‖x‖_P = ‖Rx‖₂.
    pub fn vec_norm(&self, x: &DVector<f64>) -> f64 {
        debug_assert_eq!(x.nrows(), self.dim);
        (&self.r * x).norm()
    }
}

/// Principal square root of an SPD matrix: returns `R` with `RᵀR = P`.
pub fn p_factor(p: &SymMatrix, tol: &Tolerance) -> Result<DMatrix<f64>> {
    Ok(PFactor::new(p, tol)?.r)
}

/// ‖x‖_P = √(xᵀPx); zero exactly when x = 0.
pub fn p_norm_vec(p: &SymMatrix, x: &DVector<f64>) -> Result<f64> {
    if x.nrows() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.nrows(),
        });
    }
    let q = (x.transpose() * p.matrix() * x)[(0, 0)];
    // rounding can leave a tiny negative quadratic form on near-null vectors
    Ok(q.max(0.0).sqrt())
}

/// Induced operator norm ‖A‖_P (largest singular value of R·A·R⁻¹).
pub fn p_opnorm(p: &SymMatrix, a: &DMatrix<f64>, tol: &Tolerance) -> Result<f64> {
    let d = check_square(a)?;
    check_finite(a)?;
    if d != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: d,
        });
    }
    Ok(PFactor::new(p, tol)?.opnorm(a))
}

/// Co-norm ‖A‖_{P,co} = min{‖Ax‖_P : ‖x‖_P = 1}; zero exactly when A is
/// singular.
pub fn p_conorm(p: &SymMatrix, a: &DMatrix<f64>, tol: &Tolerance) -> Result<f64> {
    let d = check_square(a)?;
    check_finite(a)?;
    if d != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: d,
        });
    }
    Ok(PFactor::new(p, tol)?.conorm(a))
}

/// Numeric kernel of a symmetric PSD matrix: the span of eigenvectors whose
/// eigenvalues satisfy `λ ≤ rank_tol·λ_max` (absolute `rank_tol` when
/// `λ_max = 0`).
pub fn kernel(s: &SymMatrix, tol: &Tolerance) -> Result<Subspace> {
    let (vals, vecs) = s.eigen()?;
    let d = s.dim();
    let lam_max = vals[d - 1].max(0.0);
    let threshold = if lam_max > 0.0 {
        tol.rank * lam_max
    } else {
        tol.rank
    };
    let cols: Vec<usize> = (0..d).filter(|&i| vals[i] <= threshold).collect();
    let mut basis = DMatrix::zeros(d, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        basis.set_column(j, &vecs.column(i));
    }
    Ok(Subspace::from_orthonormal(basis))
}

/// PSD square root: returns `T ⪰ 0` with `T² = S`.
///
/// Eigenvalues in `[-psd_tol·λ_max, 0)` are clamped to zero; anything more
/// negative is a genuine violation and is rejected.
pub fn sqrt_psd(s: &SymMatrix, tol: &Tolerance) -> Result<SymMatrix> {
    let (vals, vecs) = s.eigen()?;
    let d = s.dim();
    let lam_max = vals[d - 1].max(0.0);
    let clamp = tol.psd * lam_max;
    if vals[0] < -clamp {
        return Err(Error::NotPsd {
            min_eig: vals[0],
            threshold: -clamp,
        });
    }
    let sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        vals.iter().map(|v| v.max(0.0).sqrt()),
    ));
    Ok(SymMatrix::symmetrized(&vecs * sqrt * vecs.transpose()))
}
