//! swistab — stability analysis for discrete-time linear switched systems
//! that share a common, possibly non-strict, Lyapunov matrix.
//!
//! Given matrices 𝒮 = {S₁,…,S_K} and a symmetric positive-definite `P`
//! with `P − S_kᵀPS_k ⪰ 0` for all k, the switched dynamics
//! `x_n = S_{σ_n}⋯S_{σ_1}x₀` are non-expanding in the norm
//! ‖x‖_P = √(xᵀPx), and questions about stability reduce to spectral
//! radii of finitely many matrix words, to the geometry of the
//! norm-preserving subspaces 𝕂_P(S_k), and to limits of the product
//! sequence. This crate implements:
//!
//! * [`lyapunov`] — certificate checking with per-matrix semidefinite
//!   margins, power contraction indices and strictification;
//! * [`words`] — word enumeration (with cyclic dedup), lower bounds on
//!   the joint/generalized spectral radius, and the exact K = 2 decision
//!   procedures for d = 2 (word lengths 1, 2) and d = 3 (lengths 1–6, 8);
//! * [`subspace`] — norm- and co-norm-preserving subspaces, invariance
//!   tests, intersections;
//! * [`signals`] — periodic, Bernoulli, Markov, explicit and constant-run
//!   switching-signal generators with seeded reproducibility, plus
//!   finite-prefix classification;
//! * [`dynamics`] — trajectory norm profiles, ω-limit estimation (the
//!   limit Gram matrix `Q_σ`, stable manifold, interior/exterior radii),
//!   the planar splitting, the periodic-signal norm dichotomy, and Monte
//!   Carlo almost-sure-stability experiments;
//! * [`cli`] — the `swistab` command-line frontend over JSON system files.
//!
//! Run `cargo run --example decide_stability -p swistab` (or any other
//! example under `examples/`) for a guided tour of one capability each.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod signals;
pub mod subspace;
pub mod words;

#[cfg(test)]
pub(crate) mod testfix;

pub use error::{Error, Result};
pub use linalg::{PFactor, Subspace, SymMatrix, Tolerance};
pub use lyapunov::{LyapunovCertificate, SwitchedSystem};
pub use signals::SwitchingSignal;
pub use words::{StabilityStatus, StabilityVerdict, Word};

pub use nalgebra::{DMatrix, DVector};
