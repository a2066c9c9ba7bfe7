//! Weak Lyapunov certificates for switched systems.
//!
//! A finite family 𝒮 = {S₁,…,S_K} admits the symmetric positive-definite
//! matrix `P` as a (non-strict) Lyapunov matrix when
//!
//! ```text
//! P − S_kᵀ·P·S_k ⪰ 0        for every k,
//! ```
//!
//! equivalently ‖S_k‖_P ≤ 1 for all k. The inequality is deliberately
//! non-strict: margins of exactly zero are legitimate and common in the
//! interesting systems, so validity uses a relative band rather than a
//! strict sign test.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, PFactor, SymMatrix, Tolerance};

/// A finite set of square matrices {S₁,…,S_K} acting on ℝ^d, indexed by
/// letters 1..=K.
#[derive(Clone, Debug)]
pub struct SwitchedSystem {
    matrices: Vec<DMatrix<f64>>,
    dim: usize,
}

impl SwitchedSystem {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let k = matrices.len();
        if k == 0 || k > u8::MAX as usize {
            return Err(Error::WrongAlphabet {
                k,
                hint: "need 1 <= K <= 255 matrices",
            });
        }
        let dim = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != m.ncols() || m.nrows() == 0 {
                return Err(Error::NonSquare {
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
            if m.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows(),
                });
            }
            if !m.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(SwitchedSystem { matrices, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Alphabet size K.
    pub fn alphabet_size(&self) -> usize {
        self.matrices.len()
    }

    /// Matrix for a 1-based letter.
    pub fn matrix(&self, letter: u8) -> Result<&DMatrix<f64>> {
        if letter == 0 || letter as usize > self.matrices.len() {
            return Err(Error::InvalidLetter {
                letter,
                k: self.matrices.len(),
            });
        }
        Ok(&self.matrices[letter as usize - 1])
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }
}

/// Outcome of checking `P − S_kᵀPS_k ⪰ 0` for every subsystem.
///
/// `margins[k]` is the smallest eigenvalue of `P − S_kᵀPS_k` (raw, so an
/// exact-zero margin shows up as ≈ 0 rather than being rounded away), and
/// the certificate is valid when every margin clears `−psd·λ_max(P)`.
#[derive(Clone, Debug)]
pub struct LyapunovCertificate {
    p: SymMatrix,
    factor: PFactor,
    margins: Vec<f64>,
    strict: Vec<bool>,
    p_norms: Vec<f64>,
    valid: bool,
}

impl LyapunovCertificate {
    pub fn p(&self) -> &SymMatrix {
        &self.p
    }

    /// Cached factorization of P, shared with the trajectory machinery.
    pub fn factor(&self) -> &PFactor {
        &self.factor
    }

    /// Min eigenvalue of `P − S_kᵀPS_k` per letter.
    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    /// Whether the inequality is strict (margin > psd tolerance) per letter.
    pub fn strict(&self) -> &[bool] {
        &self.strict
    }

    /// ‖S_k‖_P per letter; each ≤ 1 + O(psd) when the certificate is valid.
    pub fn p_norms(&self) -> &[f64] {
        &self.p_norms
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// Product-boundedness constant: every finite product has Euclidean
    /// norm at most cond(R).
    pub fn product_bound(&self) -> f64 {
        self.factor.cond()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            Err(Error::InvalidCertificate {
                worst_margin: self.worst_margin(),
            })
        }
    }
}

/// Check the weak Lyapunov condition for `sys` under the candidate `P`.
pub fn verify_weak_lyapunov(
    sys: &SwitchedSystem,
    p: &SymMatrix,
    tol: &Tolerance,
) -> Result<LyapunovCertificate> {
    if p.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: p.dim(),
        });
    }
    let factor = PFactor::new(p, tol)?;
    let p_scale = p.max_eigenvalue()?;
    let mut margins = Vec::with_capacity(sys.alphabet_size());
    let mut strict = Vec::with_capacity(sys.alphabet_size());
    let mut p_norms = Vec::with_capacity(sys.alphabet_size());
    for s in sys.matrices() {
        let residual = SymMatrix::symmetrized(p.matrix() - s.transpose() * p.matrix() * s);
        let margin = residual.min_eigenvalue()?;
        margins.push(margin);
        strict.push(margin > tol.psd);
        p_norms.push(factor.opnorm(s));
    }
    let valid = margins.iter().all(|&m| m >= -tol.psd * p_scale);
    Ok(LyapunovCertificate {
        p: p.clone(),
        factor,
        margins,
        strict,
        p_norms,
        valid,
    })
}

/// Smallest `N ≤ n_max` with ‖A^N‖_P < 1.
///
/// Exists for every A with ρ(A) < 1 by the spectral-radius formula; when
/// the budget runs out the spectral radius is reported so the caller can
/// tell "ρ ≥ 1" from "budget too small".
pub fn power_contraction_index(
    a: &DMatrix<f64>,
    p: &SymMatrix,
    n_max: usize,
    tol: &Tolerance,
) -> Result<usize> {
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
    let factor = PFactor::new(p, tol)?;
    let mut power = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    for n in 1..=n_max {
        power = a * power;
        if factor.opnorm(&power) < 1.0 - tol.psd {
            return Ok(n);
        }
    }
    Err(Error::NotContractiveWithinBudget {
        n_max,
        rho: spectral_radius(a)?,
    })
}

/// Result of the power-strictification test.
#[derive(Clone, Debug)]
pub struct StrictificationReport {
    /// Min eigenvalue of `D − (A^d)ᵀ·D·A^d`.
    pub min_eig: f64,
    /// Whether it clears the psd tolerance (it must, given the
    /// preconditions).
    pub strict: bool,
}

/// For a stable `A` with a weak Lyapunov matrix `D`, the d-th power
/// satisfies the *strict* inequality `D − (A^d)ᵀDA^d ≻ 0`.
///
/// Preconditions are checked and reported individually: ρ(A) < 1, `D` SPD,
/// and `D − AᵀDA ⪰ 0` within the psd band.
pub fn strictification_check(
    a: &DMatrix<f64>,
    d_mat: &SymMatrix,
    tol: &Tolerance,
) -> Result<StrictificationReport> {
    let d = a.nrows();
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if d != d_mat.dim() {
        return Err(Error::DimensionMismatch {
            expected: d_mat.dim(),
            got: d,
        });
    }
    let rho = spectral_radius(a)?;
    if rho >= 1.0 - tol.eig {
        return Err(Error::PreconditionFailed {
            what: "spectral radius must be < 1",
            value: rho,
        });
    }
    let d_min = d_mat.min_eigenvalue()?;
    if d_min <= tol.psd {
        return Err(Error::PreconditionFailed {
            what: "D must be positive definite",
            value: d_min,
        });
    }
    let d_scale = d_mat.max_eigenvalue()?;
    let weak = SymMatrix::symmetrized(d_mat.matrix() - a.transpose() * d_mat.matrix() * a);
    let weak_min = weak.min_eigenvalue()?;
    if weak_min < -tol.psd * d_scale {
        return Err(Error::PreconditionFailed {
            what: "D - A'DA must be positive semidefinite",
            value: weak_min,
        });
    }
    let mut power = DMatrix::<f64>::identity(d, d);
    for _ in 0..d {
        power = a * power;
    }
    let strictified =
        SymMatrix::symmetrized(d_mat.matrix() - power.transpose() * d_mat.matrix() * &power);
    let min_eig = strictified.min_eigenvalue()?;
    Ok(StrictificationReport {
        min_eig,
        strict: min_eig > tol.psd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::*;
    use nalgebra::DVector;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn marginal_pair_has_unit_norms_and_zero_margins() {
        let sys = marginal_shear_pair();
        let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(2), &tol()).unwrap();
        assert!(cert.is_valid());
        for &n in cert.p_norms() {
            assert!((n - 1.0).abs() < 1e-9);
        }
        for &m in cert.margins() {
            assert!(m.abs() < 1e-12);
            // non-strict inequality: exactly marginal
        }
        assert!(!cert.strict().iter().any(|&s| s));
    }

    #[test]
    fn zero_matrix_has_strict_certificate() {
        let sys = SwitchedSystem::new(vec![DMatrix::<f64>::zeros(2, 2)]).unwrap();
        let p = SymMatrix::from_diagonal(&[2.0, 3.0]);
        let cert = verify_weak_lyapunov(&sys, &p, &tol()).unwrap();
        assert!(cert.is_valid());
        assert!((cert.margins()[0] - 2.0).abs() < 1e-12); // = λ_min(P)
        assert!(cert.strict()[0]);
    }

    #[test]
    fn expansion_is_rejected() {
        let sys = SwitchedSystem::new(vec![DMatrix::<f64>::identity(2, 2) * 2.0]).unwrap();
        let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(2), &tol()).unwrap();
        assert!(!cert.is_valid());
        assert!((cert.margins()[0] - (-3.0)).abs() < 1e-12);
        assert!(matches!(
            cert.ensure_valid(),
            Err(Error::InvalidCertificate { .. })
        ));
    }

    #[test]
    fn contraction_index_immediate() {
        let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.0, 0.0, 0.9]);
        let n = power_contraction_index(&a, &SymMatrix::identity(2), 10, &tol()).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn contraction_index_matches_direct_power_oracle() {
        // oracle: multiply powers directly until the Euclidean norm dips
        let a = tilted_shear_s1();
        let p = SymMatrix::identity(2);
        let mut power = DMatrix::<f64>::identity(2, 2);
        let mut oracle = None;
        for n in 1..=64 {
            power = &a * power;
            let sv = power.clone().singular_values();
            if sv.iter().cloned().fold(0.0f64, f64::max) < 1.0 - tol().psd {
                oracle = Some(n);
                break;
            }
        }
        let got = power_contraction_index(&a, &p, 64, &tol()).unwrap();
        assert_eq!(Some(got), oracle);
        assert_eq!(got, 2);
    }

    #[test]
    fn contraction_index_budget_error_reports_rho() {
        let prod = marginal_shear_s1() * marginal_shear_s2();
        match power_contraction_index(&prod, &SymMatrix::identity(2), 64, &tol()) {
            Err(Error::NotContractiveWithinBudget { rho, .. }) => {
                assert!((rho - 1.0).abs() < 1e-9);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn strictification_on_stable_pair_member() {
        let rep =
            strictification_check(&stable_pair_s1(), &SymMatrix::identity(2), &tol()).unwrap();
        // A² = I/4 for this matrix, so the min eigenvalue is exactly 15/16
        assert!((rep.min_eig - 0.9375).abs() < 1e-12);
        assert!(rep.strict);
    }

    #[test]
    fn strictification_on_zero_matrix() {
        let d = SymMatrix::from_diagonal(&[3.0, 5.0]);
        let rep = strictification_check(&DMatrix::<f64>::zeros(2, 2), &d, &tol()).unwrap();
        assert!((rep.min_eig - 3.0).abs() < 1e-12);
    }

    #[test]
    fn strictification_rejects_unstable() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(
            strictification_check(&a, &SymMatrix::identity(2), &tol()),
            Err(Error::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn strictification_randomized_property() {
        // 100 random stable A with the weak Lyapunov matrix D = I obtained
        // by scaling to unit Euclidean norm
        let mut rng = TestRng::new(97);
        let mut done = 0;
        while done < 100 {
            let d = 2 + (done % 3);
            let mut a = rng.matrix(d);
            let sv = a.clone().singular_values();
            let smax = sv.iter().cloned().fold(0.0f64, f64::max);
            if smax == 0.0 {
                continue;
            }
            a /= smax;
            if spectral_radius(&a).unwrap() >= 1.0 - 1e-6 {
                continue; // needs ρ < 1 strictly; random ties are skipped
            }
            let rep = strictification_check(&a, &SymMatrix::identity(d), &tol()).unwrap();
            assert!(
                rep.min_eig > tol().psd,
                "strictified min eig {} not positive",
                rep.min_eig
            );
            done += 1;
        }
    }

    #[test]
    fn valid_certificate_contracts_random_states() {
        let sys = marginal_shear_pair();
        let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(2), &tol()).unwrap();
        let mut rng = TestRng::new(11);
        for _ in 0..10_000 {
            let x = rng.vector(2);
            let k = 1 + (rng.next_unit() * 2.0) as u8;
            let sx = sys.matrix(k).unwrap() * &x;
            let nx = cert.factor().vec_norm(&x);
            let nsx = cert.factor().vec_norm(&sx);
            assert!(nsx <= nx * (1.0 + 10.0 * tol().psd));
        }
    }

    #[test]
    fn valid_certificate_bounds_short_products() {
        // product boundedness: every word of length ≤ 8 has ‖·‖_P ≤ 1 + ε
        for sys in [marginal_shear_pair(), stable_pair(), axis_isometry_pair()] {
            let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(2), &tol()).unwrap();
            let mats = sys.matrices();
            let mut frontier: Vec<DMatrix<f64>> = vec![DMatrix::identity(2, 2)];
            for _ in 0..8 {
                let mut next = Vec::with_capacity(frontier.len() * mats.len());
                for prod in &frontier {
                    for s in mats {
                        let q = s * prod;
                        assert!(cert.factor().opnorm(&q) <= 1.0 + 20.0 * tol().psd);
                        next.push(q);
                    }
                }
                frontier = next;
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let sys = marginal_shear_pair();
        let p = SymMatrix::identity(3);
        assert!(matches!(
            verify_weak_lyapunov(&sys, &p, &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
        let x = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            crate::linalg::p_norm_vec(&SymMatrix::identity(2), &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
