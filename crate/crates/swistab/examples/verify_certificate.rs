//! Check the weak Lyapunov condition P − S_kᵀPS_k ⪰ 0 and inspect the
//! per-matrix margins.
//!
//! The example pair has ‖S₁‖₂ = ‖S₂‖₂ = 1, so the identity is a valid but
//! *non-strict* Lyapunov matrix: both margins are exactly zero. A scaled-up
//! copy violates the condition and the margin reports by how much.
//!
//! Run with: cargo run -p swistab --example verify_certificate

use swistab::lyapunov::verify_weak_lyapunov;
use swistab::{DMatrix, SwitchedSystem, SymMatrix, Tolerance};

fn main() {
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    let s1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * alpha;
    let s2 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * alpha;
    let sys = SwitchedSystem::new(vec![s1.clone(), s2]).unwrap();

    let tol = Tolerance::default();
    let p = SymMatrix::identity(2);
    let cert = verify_weak_lyapunov(&sys, &p, &tol).unwrap();

    println!("pair of opposed shears, P = I:");
    println!("  valid: {}", cert.is_valid());
    for (k, (margin, norm)) in cert.margins().iter().zip(cert.p_norms()).enumerate() {
        println!(
            "  S{}: margin = {margin:+.3e}, ‖S‖_P = {norm:.15}, strict = {}",
            k + 1,
            cert.strict()[k]
        );
    }
    println!("  product bound (cond R): {:.3}", cert.product_bound());

    // an expanding system cannot be certified
    let expanding = SwitchedSystem::new(vec![s1 * 1.5]).unwrap();
    let cert = verify_weak_lyapunov(&expanding, &p, &tol).unwrap();
    println!("\nsame shear scaled by 1.5:");
    println!(
        "  valid: {}, worst margin = {:+.6}",
        cert.is_valid(),
        cert.worst_margin()
    );
}
