//! Lower-bound the generalized (joint) spectral radius by scanning words.
//!
//! ρ(𝒮) = sup over lengths n of the max of ρ(S_{w_n}⋯S_{w_1})^{1/n}, so
//! every word evaluated gives a certified lower bound. Enumeration keeps
//! one representative per cyclic class (rotations share their spectral
//! radius). The second system extends a single shear A by its transpose,
//! which jumps the joint radius from ρ(A) = α to ‖A‖₂ = 1 at length two.
//!
//! Run with: cargo run -p swistab --example gsr_scan

use swistab::words::gsr_lower_bound;
use swistab::{DMatrix, SwitchedSystem};

fn scan(name: &str, sys: &SwitchedSystem, n_max: usize) {
    let scan = gsr_lower_bound(sys, n_max, true).unwrap();
    println!("{name}:");
    for wm in &scan.per_length {
        println!(
            "  n = {:>2}: max rho^(1/n) = {:.12}  word ({})",
            wm.length, wm.value, wm.word
        );
    }
    println!(
        "  => joint radius >= {:.12} witnessed by ({})\n",
        scan.value, scan.witness
    );
}

fn main() {
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]) * alpha;

    let singleton = SwitchedSystem::new(vec![shear.clone()]).unwrap();
    scan("single shear", &singleton, 4);

    let with_transpose = SwitchedSystem::new(vec![shear.clone(), shear.transpose()]).unwrap();
    scan("shear with its transpose", &with_transpose, 6);
}
