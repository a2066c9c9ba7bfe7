//! Fixtures shared by the integration and acceptance suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swistab::linalg::{PFactor, SymMatrix, Tolerance};
use swistab::SwitchedSystem;

/// √((3−√5)/2) = (√5−1)/2, the scale giving a planar shear unit norm.
pub fn shear_scale() -> f64 {
    ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt()
}

pub fn axis_isometry_pair() -> SwitchedSystem {
    SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]),
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]),
    ])
    .unwrap()
}

pub fn tilted_shear_pair() -> SwitchedSystem {
    let a = shear_scale();
    SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * a,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 0.0, 1.0]) * 0.5,
    ])
    .unwrap()
}

pub fn rotation_block_triple() -> SwitchedSystem {
    SwitchedSystem::new(vec![
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]),
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]),
    ])
    .unwrap()
}

pub fn stable_pair() -> SwitchedSystem {
    let a = shear_scale();
    SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.5, -1.0]) * 0.5,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * a,
    ])
    .unwrap()
}

pub fn unit_shear() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * shear_scale()
}

pub fn unit_shear_singleton() -> SwitchedSystem {
    SwitchedSystem::new(vec![unit_shear()]).unwrap()
}

pub fn unit_shear_with_transpose() -> SwitchedSystem {
    SwitchedSystem::new(vec![unit_shear(), unit_shear().transpose()]).unwrap()
}

pub fn marginal_shear_pair() -> SwitchedSystem {
    let a = shear_scale();
    SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * a,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * a,
    ])
    .unwrap()
}

/// Deterministic RNG with the same helpers the unit suites use.
pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.0.random::<f64>() - 1.0
    }

    pub fn vector(&mut self, d: usize) -> DVector<f64> {
        DVector::from_fn(d, |_, _| self.next_signed())
    }

    pub fn matrix(&mut self, d: usize) -> DMatrix<f64> {
        DMatrix::from_fn(d, d, |_, _| self.next_signed())
    }

    pub fn spd(&mut self, d: usize) -> SymMatrix {
        let m = self.matrix(d) + DMatrix::<f64>::identity(d, d) * 2.0;
        let q = m.qr().q();
        let lam = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| 0.5 + 1.5 * self.next_unit()));
        SymMatrix::new(&q * lam * q.transpose()).unwrap()
    }

    /// Random pair scaled to ‖S_k‖_P = 1 (weak certificate with zero margin).
    pub fn certified_pair(&mut self, d: usize, p: &SymMatrix) -> SwitchedSystem {
        let tol = Tolerance::default();
        let f = PFactor::new(p, &tol).unwrap();
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
