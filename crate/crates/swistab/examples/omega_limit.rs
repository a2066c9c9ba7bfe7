//! Limit objects of a trajectory: the matrix Q_σ, the interior/exterior
//! radii and the stable manifold.
//!
//! Every limit point M of the product sequence shares one Gram matrix
//! MᵀPM, so Q_σ = √(MᵀPM) is well defined; tail norms obey
//! ‖Π_n·x₀‖_P → ‖Q_σ·x₀‖₂ and ker(Q_σ) is the set of initial states that
//! decay. The rotation-block system below also shows the fallback: powers
//! of a rotation never converge, their Gram matrices do.
//!
//! Run with: cargo run -p swistab --example omega_limit

use swistab::dynamics::omega_estimate;
use swistab::lyapunov::verify_weak_lyapunov;
use swistab::signals::make_periodic;
use swistab::words::Word;
use swistab::{DMatrix, SwitchedSystem, SymMatrix, Tolerance};

fn main() {
    let sys = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]),
        DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]),
    ])
    .unwrap();
    let tol = Tolerance::default();
    let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(3), &tol).unwrap();

    for letter in [2u8, 1u8] {
        let sig = make_periodic(Word::new(vec![letter]).unwrap());
        let est = omega_estimate(&sys, &cert, &sig, 200, 8, &tol).unwrap();
        println!(
            "constant signal {letter} (probes converged via {:?}):",
            est.mode
        );
        println!("  Q =");
        for i in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|j| format!("{:+.6}", est.q.matrix()[(i, j)]))
                .collect();
            println!("    [{}]", row.join(", "));
        }
        println!(
            "  r_E = {:.9}, r_I = {:.9}, dim E^s = {}",
            est.r_e,
            est.r_i,
            est.stable_manifold.dim()
        );
        println!();
    }
}
