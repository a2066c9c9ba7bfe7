//! Shared unit-test fixtures: small benchmark systems and a seeded RNG.
//!
//! The pairs here are the standard hard cases for weak-Lyapunov stability:
//! every matrix has unit Euclidean norm (so P = I is a non-strict Lyapunov
//! matrix) while the interesting behavior sits in the products.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SymMatrix;
use crate::lyapunov::SwitchedSystem;

/// √((3−√5)/2) = (√5−1)/2: the scaling that gives a planar shear unit norm.
pub fn shear_scale() -> f64 {
    ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt()
}

/// diag(1, 1/2): isometric on the first axis, contracting on the second.
pub fn axis_isometry_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5])
}

/// diag(1/2, 1): isometric on the second axis.
pub fn axis_isometry_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0])
}

/// Two diagonal maps whose norm-preserving lines are complementary axes;
/// both lines are invariant.
pub fn axis_isometry_pair() -> SwitchedSystem {
    SwitchedSystem::new(vec![axis_isometry_s1(), axis_isometry_s2()]).unwrap()
}

/// α·[[1,0],[1,1]]: unit-norm lower shear with a tilted norm-preserving line.
pub fn tilted_shear_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * shear_scale()
}

/// ½·[[1,3/2],[0,1]]: unit-norm upper shear, norm-preserving line x₂ = 2x₁.
pub fn tilted_shear_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 0.0, 1.0]) * 0.5
}

/// Unit-norm pair whose norm-preserving lines meet only at 0 but are not
/// invariant.
pub fn tilted_shear_pair() -> SwitchedSystem {
    SwitchedSystem::new(vec![tilted_shear_s1(), tilted_shear_s2()]).unwrap()
}

/// 3×3 with a plane rotation block: powers do not converge although their
/// Gram matrices do.
pub fn rotation_block_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0])
}

pub fn rotation_block_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0])
}

pub fn rotation_block_s3() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5])
}

/// K = 3 system mixing a rotation block with two axis contractions.
pub fn rotation_block_triple() -> SwitchedSystem {
    SwitchedSystem::new(vec![
        rotation_block_s1(),
        rotation_block_s2(),
        rotation_block_s3(),
    ])
    .unwrap()
}

/// ½·[[1,0],[3/2,−1]]: unit norm, spectral radius 1/2.
pub fn stable_pair_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.5, -1.0]) * 0.5
}

/// α·[[1,1],[0,1]]: unit-norm upper shear.
pub fn stable_pair_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * shear_scale()
}

/// Absolutely stable pair: ρ(S₁), ρ(S₂) and ρ(S₁S₂) all below one.
pub fn stable_pair() -> SwitchedSystem {
    SwitchedSystem::new(vec![stable_pair_s1(), stable_pair_s2()]).unwrap()
}

/// The unit-norm shear α·[[1,1],[0,1]] on its own.
pub fn unit_shear() -> DMatrix<f64> {
    stable_pair_s2()
}

pub fn unit_shear_singleton() -> SwitchedSystem {
    SwitchedSystem::new(vec![unit_shear()]).unwrap()
}

/// {A, Aᵀ}: symmetrized extension whose joint radius jumps to ‖A‖₂ = 1.
pub fn unit_shear_with_transpose() -> SwitchedSystem {
    SwitchedSystem::new(vec![unit_shear(), unit_shear().transpose()]).unwrap()
}

/// α·[[1,0],[1,1]]: the opposing lower shear.
pub fn marginal_shear_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * shear_scale()
}

pub fn marginal_shear_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * shear_scale()
}

/// Both subsystems stable (ρ = α < 1) yet ρ(S₁S₂) = 1: not absolutely
/// stable, but almost-surely stable.
pub fn marginal_shear_pair() -> SwitchedSystem {
    SwitchedSystem::new(vec![marginal_shear_s1(), marginal_shear_s2()]).unwrap()
}

/// Deterministic test RNG with small-matrix helpers.
pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.0.random::<f64>() - 1.0
    }

    pub fn vector(&mut self, d: usize) -> DVector<f64> {
        DVector::from_fn(d, |_, _| self.next_signed())
    }

    pub fn matrix(&mut self, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(d, d, |_, _| self.next_signed())
    }

    /// Well-conditioned random SPD matrix: QᵀΛQ with Λ ∈ [0.5, 2].
    pub fn spd(&mut self, d: usize) -> SymMatrix {
        let m = self.matrix(d) + DMatrix::<f64>::identity(d, d) * 2.0;
        let qr = m.qr();
        let q = qr.q();
        let lam = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| 0.5 + 1.5 * self.next_unit()));
        SymMatrix::symmetrized(&q * lam * q.transpose())
    }

    /// Random pair scaled to ‖S_k‖_P = 1, so P is a weak Lyapunov matrix
    /// with margin exactly zero.
    pub fn certified_pair(&mut self, d: usize, p: &SymMatrix) -> SwitchedSystem {
        let tol = crate::linalg::Tolerance::default();
        let f = crate::linalg::PFactor::new(p, &tol).unwrap();
        let mats: Vec<DMatrix<f64>> = (0..2)
            .map(|_| {
                let mut a = self.matrix(d);
                let n = f.opnorm(&a);
                if n > 0.0 {
                    a /= n;
                }
                a
            })
            .collect();
        SwitchedSystem::new(mats).unwrap()
    }
}
