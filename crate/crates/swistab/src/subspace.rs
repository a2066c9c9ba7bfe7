//! Norm-preserving subspaces and their geometry.
//!
//! Under a quadratic norm ‖·‖_P the sets
//!
//! ```text
//! 𝕂_P(A)    = {x : ‖Ax‖_P = ‖A‖_P·‖x‖_P}
//! 𝕂_{P,co}(A) = {x : ‖Ax‖_P = ‖A‖_{P,co}·‖x‖_P}
//! ```
//!
//! are genuine linear subspaces (they are not for general norms): squaring
//! the defining equality turns each into the kernel of a PSD matrix,
//!
//! ```text
//! 𝕂_P(A)      = ker(‖A‖_P²·P − AᵀPA),
//! 𝕂_{P,co}(A) = ker(AᵀPA − ‖A‖_{P,co}²·P),
//! ```
//!
//! which is how they are computed here. When A is singular the co-norm is
//! zero and the co-norm set degenerates to ker(A).
//!
//! For a pair with ‖S₁‖_P = ‖S₂‖_P = 1, the single condition
//! 𝕂_P(S₁) ∩ 𝕂_P(S₂) = {0} drives the almost-sure stability theory; the
//! report produced by [`check_iv1`] bundles that test with the per-matrix
//! invariance flags and the exceptional periodic words that must be probed
//! separately in dimensions 2 and 3.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{kernel, PFactor, Subspace, SymMatrix, Tolerance};
use crate::lyapunov::SwitchedSystem;
use crate::words::Word;

/// Kernel of the PSD pencil `s²·P − AᵀPA` (shared by the norm and co-norm
/// subspaces and by the planar splitting).
pub(crate) fn norm_equality_kernel(
    p: &SymMatrix,
    gram: &DMatrix<f64>,
    s: f64,
    upper: bool,
    tol: &Tolerance,
) -> Result<Subspace> {
    let pencil = if upper {
        SymMatrix::symmetrized(p.matrix() * (s * s) - gram)
    } else {
        SymMatrix::symmetrized(gram - p.matrix() * (s * s))
    };
    kernel(&pencil, tol)
}

/// 𝕂_P(A): the subspace on which A scales the P-norm by exactly ‖A‖_P.
pub fn k_subspace(p: &SymMatrix, a: &DMatrix<f64>, tol: &Tolerance) -> Result<Subspace> {
    let f = PFactor::new(p, tol)?;
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.nrows(),
        });
    }
    let norm = f.opnorm(a);
    let gram = a.transpose() * p.matrix() * a;
    norm_equality_kernel(p, &gram, norm, true, tol)
}

/// 𝕂_{P,co}(A): the subspace of minimal gain; equals ker(A) when A is
/// singular.
pub fn k_conorm_subspace(p: &SymMatrix, a: &DMatrix<f64>, tol: &Tolerance) -> Result<Subspace> {
    let f = PFactor::new(p, tol)?;
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.nrows(),
        });
    }
    let co = f.conorm(a);
    let gram = a.transpose() * p.matrix() * a;
    norm_equality_kernel(p, &gram, co, false, tol)
}

/// Whether A maps V into itself: ‖(I − BBᵀ)·A·B‖₂ ≤ rank·‖A‖₂.
pub fn is_invariant(a: &DMatrix<f64>, v: &Subspace, tol: &Tolerance) -> Result<bool> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            got: a.nrows(),
        });
    }
    let r = v.dim();
    let d = v.ambient_dim();
    if r == 0 || r == d {
        return Ok(true);
    }
    let b = v.basis();
    let image = a * b;
    let residual = &image - v.projector() * &image;
    let res_norm = crate::linalg::sigma_max(&residual)?;
    let a_norm = crate::linalg::sigma_max(a)?;
    Ok(res_norm <= tol.rank * a_norm.max(1.0))
}

/// Orthonormal basis of V ∩ W, via the kernel of the summed complementary
/// projectors (I − BBᵀ) + (I − CCᵀ).
pub fn intersect(v: &Subspace, w: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    if v.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            got: w.ambient_dim(),
        });
    }
    let d = v.ambient_dim();
    let id = DMatrix::<f64>::identity(d, d);
    let pencil = SymMatrix::symmetrized((&id - v.projector()) + (&id - w.projector()));
    // x is in both subspaces exactly when both complementary projections
    // vanish, i.e. x is in the kernel of the PSD sum
    kernel(&pencil, tol)
}

/// Report for the kernel-intersection condition 𝕂_P(S₁) ∩ 𝕂_P(S₂) = {0}.
#[derive(Clone, Debug)]
pub struct Iv1Report {
    pub k_sets: Vec<Subspace>,
    pub k_dims: Vec<usize>,
    pub intersection: Subspace,
    pub intersection_dim: usize,
    /// Whether the intersection is trivial.
    pub holds: bool,
    /// Per-matrix flag: is 𝕂_P(S_k) invariant under S_k?
    pub invariant: Vec<bool>,
    /// Periodic words that generic-recurrent stability must exclude in this
    /// dimension (empty outside d ∈ {2,3}).
    pub exception_words: Vec<Word>,
}

/// Exceptional periodic words for generic-recurrent stability: a pair
/// satisfying the intersection condition is stable along every generic
/// recurrent signal except the periodic extensions of these words, which
/// must be probed separately.
pub fn exception_words_for_dim(d: usize) -> Vec<Word> {
    match d {
        2 => vec![Word::new(vec![1, 2]).expect("static")],
        3 => vec![
            Word::new(vec![1, 2]).expect("static"),
            Word::new(vec![2, 1]).expect("static"),
            Word::new(vec![1, 2, 2]).expect("static"),
            Word::new(vec![2, 1, 1]).expect("static"),
        ],
        _ => Vec::new(),
    }
}

/// Evaluate the intersection condition for a two-matrix system, with
/// invariance flags and the dimension-specific exceptional words.
pub fn check_iv1(sys: &SwitchedSystem, p: &SymMatrix, tol: &Tolerance) -> Result<Iv1Report> {
    if sys.alphabet_size() != 2 {
        return Err(Error::WrongAlphabet {
            k: sys.alphabet_size(),
            hint: "the intersection condition is stated for K = 2",
        });
    }
    let k1 = k_subspace(p, sys.matrix(1)?, tol)?;
    let k2 = k_subspace(p, sys.matrix(2)?, tol)?;
    let inter = intersect(&k1, &k2, tol)?;
    let holds = inter.dim() == 0;
    let invariant = vec![
        is_invariant(sys.matrix(1)?, &k1, tol)?,
        is_invariant(sys.matrix(2)?, &k2, tol)?,
    ];
    let k_dims = vec![k1.dim(), k2.dim()];
    Ok(Iv1Report {
        k_sets: vec![k1, k2],
        intersection_dim: inter.dim(),
        intersection: inter,
        k_dims,
        holds,
        invariant,
        exception_words: exception_words_for_dim(sys.dim()),
    })
}
