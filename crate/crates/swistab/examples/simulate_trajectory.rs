//! Norm profiles of individual trajectories, and the periodic-signal
//! dichotomy.
//!
//! Under a valid certificate ‖S_{σn}⋯S_{σ1}‖_P never increases. For the
//! marginal pair the alternating signal pins the norm at exactly 1
//! forever, while a fair coin flip drives it to zero; the dichotomy check
//! classifies periodic words as norm-one or exponential decay with a
//! fitted rate.
//!
//! Run with: cargo run -p swistab --example simulate_trajectory

use swistab::dynamics::{dichotomy_check, iterate, DichotomyClass};
use swistab::lyapunov::verify_weak_lyapunov;
use swistab::signals::make_periodic;
use swistab::words::Word;
use swistab::{DMatrix, SwitchedSystem, SwitchingSignal, SymMatrix, Tolerance};

fn main() {
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    let sys = SwitchedSystem::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]) * alpha,
        DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * alpha,
    ])
    .unwrap();
    let tol = Tolerance::default();
    let cert = verify_weak_lyapunov(&sys, &SymMatrix::identity(2), &tol).unwrap();

    let periodic = make_periodic(Word::new(vec![1, 2]).unwrap());
    let rec = iterate(&sys, &cert, &periodic, 1000, None).unwrap();
    println!(
        "alternating signal: norm after 1000 steps = {:.12}",
        rec.product_norms.last().unwrap()
    );

    let coin = SwitchingSignal::bernoulli(vec![0.5, 0.5], 7).unwrap();
    let rec = iterate(&sys, &cert, &coin, 1000, None).unwrap();
    println!(
        "fair-coin signal:   norm after 1000 steps = {:.3e}",
        rec.product_norms.last().unwrap()
    );

    for letters in [vec![1, 2], vec![1, 1, 2]] {
        let w = Word::new(letters).unwrap();
        let rep = dichotomy_check(&sys, &cert, &w, 400).unwrap();
        match rep.class {
            DichotomyClass::NormOne => println!("word ({w}): norm stays 1"),
            DichotomyClass::ExponentialDecay { rate, .. } => {
                println!("word ({w}): exponential decay at rate {rate:.6} per step")
            }
        }
    }
}
