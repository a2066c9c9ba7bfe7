//! Geometry of the norm-preserving subspaces 𝕂_P(S_k).
//!
//! For a unit-norm matrix, 𝕂_P(S) collects the states whose P-norm
//! survives one application of S. Almost-sure stability of a pair hinges
//! on 𝕂_P(S₁) ∩ 𝕂_P(S₂) = {0} together with whether each subspace is
//! invariant: invariance makes *every* generic signal stable, while the
//! non-invariant case leaves finitely many exceptional periodic signals.
//!
//! Run with: cargo run -p swistab --example norm_preserving_subspaces

use swistab::subspace::check_iv1;
use swistab::{DMatrix, SwitchedSystem, SymMatrix, Tolerance};

fn report(name: &str, sys: &SwitchedSystem) {
    let tol = Tolerance::default();
    let rep = check_iv1(sys, &SymMatrix::identity(sys.dim()), &tol).unwrap();
    println!("{name}:");
    for (k, kset) in rep.k_sets.iter().enumerate() {
        let b = kset.basis();
        let dir: Vec<String> = (0..b.nrows())
            .map(|i| format!("{:+.6}", if kset.dim() > 0 { b[(i, 0)] } else { 0.0 }))
            .collect();
        println!(
            "  dim K(S{}) = {}, invariant = {}, direction = [{}]",
            k + 1,
            kset.dim(),
            rep.invariant[k],
            dir.join(", ")
        );
    }
    println!(
        "  intersection dim = {} ({})",
        rep.intersection_dim,
        if rep.holds {
            "trivial: condition holds"
        } else {
            "condition fails"
        }
    );
    if !rep.exception_words.is_empty() {
        let words: Vec<String> = rep
            .exception_words
            .iter()
            .map(|w| format!("({w})"))
            .collect();
        println!("  exceptional periodic words: {}", words.join(" "));
    }
    println!();
}

fn main() {
    // diagonal pair: the preserved lines are the axes and are invariant
    let axis = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]),
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]),
    ])
    .unwrap();
    report("axis-aligned isometries", &axis);

    // sheared pair: the preserved lines are tilted (golden ratio slope and
    // x₂ = 2x₁) and neither is invariant
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    let tilted = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * alpha,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 0.0, 1.0]) * 0.5,
    ])
    .unwrap();
    report("tilted shears", &tilted);
}
