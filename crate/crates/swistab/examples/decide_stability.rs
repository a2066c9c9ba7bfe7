//! Decide absolute stability of planar pairs by the finite word test.
//!
//! Under a weak Lyapunov certificate with d = 2, K = 2, absolute stability
//! is equivalent to ρ(S₁) < 1, ρ(S₂) < 1 and ρ(S₁S₂) < 1 — three spectral
//! radii decide the behavior of *all* switching signals. The second pair
//! below fails exactly at the product: each subsystem is stable but the
//! alternating signal never decays.
//!
//! Run with: cargo run -p swistab --example decide_stability

use swistab::lyapunov::verify_weak_lyapunov;
use swistab::words::decide_d2;
use swistab::{DMatrix, SwitchedSystem, SymMatrix, Tolerance};

fn report(name: &str, sys: &SwitchedSystem) {
    let tol = Tolerance::default();
    let cert = verify_weak_lyapunov(sys, &SymMatrix::identity(2), &tol).unwrap();
    let verdict = decide_d2(sys, &cert, &tol).unwrap();
    println!("{name}: {}", verdict.status);
    if let Some((word, value)) = &verdict.witness {
        println!("  worst word ({word}) with rho^(1/n) = {value:.12}");
    }
    println!("  margin to 1: {:+.3e}", verdict.margin);
}

fn main() {
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();

    // ρ(S₁) = 1/2, ρ(S₂) = α, ρ(S₁S₂) = α: absolutely stable
    let stable = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.5, -1.0]) * 0.5,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * alpha,
    ])
    .unwrap();
    report("stable pair  ", &stable);

    // ρ(S₁) = ρ(S₂) = α < 1 but ρ(S₁S₂) = 1: not absolutely stable
    let marginal = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * alpha,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * alpha,
    ])
    .unwrap();
    report("marginal pair", &marginal);
}
