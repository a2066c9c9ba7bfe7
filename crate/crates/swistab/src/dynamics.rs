//! Trajectories of the switched dynamics and their limits.
//!
//! Under a valid weak Lyapunov certificate every product
//! Π_n = S_{σ_n}⋯S_{σ_1} satisfies ‖Π_n‖_P ≤ 1 and the norm sequence is
//! non-increasing, so it converges to some r ∈ [0, 1]. The limit *set* of
//! the product sequence may be large (rotations never settle), but the
//! Gram matrix MᵀPM is the same for every limit point M, which makes
//!
//! ```text
//! Q_σ = √(MᵀPM)
//! ```
//!
//! well defined. `Q_σ = 0` exactly when the signal is stable, and in
//! general the tail of ‖Π_n(x₀)‖_P equals ‖Q_σ·x₀‖₂, so ker(Q_σ) is the
//! stable manifold of the signal.
//!
//! [`omega_estimate`] probes the product sequence at period multiples
//! (periodic signals) or geometrically spaced indices (everything else)
//! and declares convergence when successive probes agree in Frobenius
//! norm. A product sequence that rotates forever legitimately fails that
//! test while its Gram probes still converge; the estimator falls back to
//! Gram probes before giving up, and reports which route succeeded.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kernel, sqrt_psd, Subspace, SymMatrix, Tolerance};
use crate::lyapunov::{LyapunovCertificate, SwitchedSystem};
use crate::signals::{SwitchingSignal, RNG_ID};
use crate::subspace::norm_equality_kernel;
use crate::words::Word;

/// Floor below which a limit Gram matrix is treated as exactly zero
/// (entries this small are decay dust, not geometry).
const GRAM_ZERO_FLOOR: f64 = 1e-280;

/// Norm profile of one finite trajectory.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    /// ‖S_{σ_i}⋯S_{σ_1}‖_P for i = 1..=n.
    pub product_norms: Vec<f64>,
    pub final_product: DMatrix<f64>,
    /// ‖Π_i·x₀‖_P when an initial state was supplied.
    pub state_norms: Option<Vec<f64>>,
    /// Successive product differences ‖Π_i − Π_j‖_F at geometrically
    /// spaced probe indices (i, value).
    pub probe_deltas: Vec<(usize, f64)>,
}

fn letters_for(sys: &SwitchedSystem, sig: &SwitchingSignal, n: usize) -> Result<Vec<u8>> {
    if sig.alphabet() > sys.alphabet_size() {
        return Err(Error::WrongAlphabet {
            k: sig.alphabet(),
            hint: "signal alphabet exceeds the system's",
        });
    }
    Ok(sig.prefix(n))
}

/// Run the cocycle for `n` steps, recording the P-norm profile.
pub fn iterate(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    sig: &SwitchingSignal,
    n: usize,
    x0: Option<&DVector<f64>>,
) -> Result<TrajectoryRecord> {
    cert.ensure_valid()?;
    if n == 0 {
        return Err(Error::HorizonZero);
    }
    if let Some(x) = x0 {
        if x.nrows() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                got: x.nrows(),
            });
        }
    }
    let letters = letters_for(sys, sig, n)?;
    let factor = cert.factor();
    let d = sys.dim();
    let mut prod = DMatrix::<f64>::identity(d, d);
    let mut state = x0.cloned();
    let mut product_norms = Vec::with_capacity(n);
    let mut state_norms = x0.map(|_| Vec::with_capacity(n));
    let mut probe_deltas = Vec::new();
    let mut last_probe = prod.clone();
    for (i, &letter) in letters.iter().enumerate() {
        let s = sys.matrix(letter)?;
        prod = s * &prod;
        product_norms.push(factor.opnorm(&prod));
        if let Some(x) = state.as_mut() {
            *x = s * &*x;
            state_norms.as_mut().unwrap().push(factor.vec_norm(x));
        }
        let step = i + 1;
        if step.is_power_of_two() || step == n {
            probe_deltas.push((step, (&prod - &last_probe).norm()));
            last_probe = prod.clone();
        }
    }
    Ok(TrajectoryRecord {
        product_norms,
        final_product: prod,
        state_norms,
        probe_deltas,
    })
}

/// Which probe sequence converged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    /// The products themselves settled.
    Product,
    /// Only the Gram matrices MᵀPM settled (rotation-type limits).
    Gram,
}

/// Estimated limit data of a trajectory.
#[derive(Clone, Debug)]
pub struct OmegaEstimate {
    /// Late product: an approximate element of the limit set.
    pub m: DMatrix<f64>,
    /// Largest successive probe difference among the retained probes.
    pub residual: f64,
    /// Q_σ = √(MᵀPM).
    pub q: SymMatrix,
    /// Exterior radius ‖M‖_P.
    pub r_e: f64,
    /// Interior radius ‖M‖_{P,co}.
    pub r_i: f64,
    /// Stable manifold ker(Q_σ).
    pub stable_manifold: Subspace,
    pub mode: ProbeMode,
    gram: SymMatrix,
}

impl OmegaEstimate {
    /// The converged Gram matrix MᵀPM.
    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }
}

fn probe_indices(sig: &SwitchingSignal, n: usize) -> Vec<usize> {
    match sig.period() {
        Some(p) => (1..=n / p).map(|i| i * p).collect(),
        None => {
            let mut idx: Vec<usize> = Vec::new();
            let mut i = 1usize;
            while i <= n {
                idx.push(i);
                i *= 2;
            }
            if *idx.last().unwrap_or(&0) != n {
                idx.push(n);
            }
            idx
        }
    }
}

fn max_successive_delta(probes: &[DMatrix<f64>]) -> f64 {
    probes
        .windows(2)
        .map(|w| (&w[1] - &w[0]).norm())
        .fold(0.0f64, f64::max)
}

/// Estimate Q_σ, the radii and the stable manifold from a finite horizon.
///
/// `probe_count` trailing probes vote on convergence (at least two).
/// Returns [`Error::NotConverged`] when neither the product probes nor the
/// Gram probes settle within `tol.conv`; the caller can retry with a longer
/// horizon.
pub fn omega_estimate(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    sig: &SwitchingSignal,
    n: usize,
    probe_count: usize,
    tol: &Tolerance,
) -> Result<OmegaEstimate> {
    cert.ensure_valid()?;
    if n == 0 {
        return Err(Error::HorizonZero);
    }
    let letters = letters_for(sys, sig, n)?;
    let keep = probe_count.max(2);
    let indices = probe_indices(sig, n);
    if indices.len() < 2 {
        return Err(Error::NotConverged {
            residual: f64::INFINITY,
            tol: tol.conv,
        });
    }
    let d = sys.dim();
    let mut prod = DMatrix::<f64>::identity(d, d);
    let mut probes: Vec<DMatrix<f64>> = Vec::new();
    let mut next = 0usize;
    for (i, &letter) in letters.iter().enumerate() {
        prod = sys.matrix(letter)? * &prod;
        if next < indices.len() && i + 1 == indices[next] {
            probes.push(prod.clone());
            if probes.len() > keep {
                probes.remove(0);
            }
            next += 1;
        }
    }

    let p = cert.p();
    let residual_m = max_successive_delta(&probes);
    let grams: Vec<DMatrix<f64>> = probes
        .iter()
        .map(|m| m.transpose() * p.matrix() * m)
        .collect();
    let residual_g = max_successive_delta(&grams);

    let (mode, residual) = if residual_m < tol.conv {
        (ProbeMode::Product, residual_m)
    } else if residual_g < tol.conv {
        (ProbeMode::Gram, residual_g)
    } else {
        return Err(Error::NotConverged {
            residual: residual_m.min(residual_g),
            tol: tol.conv,
        });
    };

    let m = probes.last().expect("at least two probes").clone();
    let mut gram_raw = grams.last().expect("at least two probes").clone();
    if gram_raw.amax() < GRAM_ZERO_FLOOR {
        gram_raw = DMatrix::zeros(d, d);
    }
    let gram = SymMatrix::symmetrized(gram_raw);
    let q = sqrt_psd(&gram, tol)?;

    // ‖M‖_P and ‖M‖_{P,co} depend on M only through the Gram matrix:
    // they are the extreme eigenvalues of R⁻¹·(MᵀPM)·R⁻¹, square-rooted.
    let h = SymMatrix::symmetrized(
        cert.factor().inv_factor() * gram.matrix() * cert.factor().inv_factor(),
    );
    let (h_vals, _) = h.eigen()?;
    let r_i = h_vals[0].max(0.0).sqrt();
    let r_e = h_vals[h_vals.len() - 1].max(0.0).sqrt();
    let stable_manifold = kernel(&q, tol)?;

    Ok(OmegaEstimate {
        m,
        residual,
        q,
        r_e,
        r_i,
        stable_manifold,
        mode,
        gram,
    })
}

/// The planar splitting attached to one signal.
#[derive(Clone, Debug)]
pub struct Split2 {
    /// Minimal-gain part: tail norms converge to r_I·‖x₀‖_P here.
    pub conorm_part: Subspace,
    /// Norm-preserving part: tail norms converge to r_E·‖x₀‖_P here.
    pub norm_part: Subspace,
    pub r_i: f64,
    pub r_e: f64,
}

/// Split ℝ² along the limit Gram matrix of the signal.
///
/// When r_I < r_E the two parts are complementary lines (or line plus
/// plane degenerations); when r_I = r_E within `tol.conv` both parts are
/// all of ℝ².
pub fn split2(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    sig: &SwitchingSignal,
    n: usize,
    tol: &Tolerance,
) -> Result<Split2> {
    if sys.dim() != 2 {
        return Err(Error::WrongDimension {
            d: sys.dim(),
            hint: "the splitting is planar",
        });
    }
    let est = omega_estimate(sys, cert, sig, n, 8, tol)?;
    split_from_gram(cert.p(), est.gram(), est.r_e, est.r_i, tol)
}

fn split_from_gram(
    p: &SymMatrix,
    gram: &SymMatrix,
    r_e: f64,
    r_i: f64,
    tol: &Tolerance,
) -> Result<Split2> {
    let d = p.dim();
    if (r_e - r_i).abs() <= tol.conv * r_e.max(1.0) {
        return Ok(Split2 {
            conorm_part: Subspace::full(d),
            norm_part: Subspace::full(d),
            r_i,
            r_e,
        });
    }
    let norm_part = norm_equality_kernel(p, gram.matrix(), r_e, true, tol)?;
    let conorm_part = norm_equality_kernel(p, gram.matrix(), r_i, false, tol)?;
    Ok(Split2 {
        conorm_part,
        norm_part,
        r_i,
        r_e,
    })
}

/// Outcome of the periodic-signal norm dichotomy.
#[derive(Clone, Debug)]
pub enum DichotomyClass {
    /// ‖Π_j‖_P ≈ prefactor·rateʲ with rate < 1 (rate fitted on the second
    /// half of the horizon).
    ExponentialDecay { rate: f64, prefactor: f64 },
    /// Every shifted product keeps P-norm 1.
    NormOne,
}

#[derive(Clone, Debug)]
pub struct DichotomyReport {
    pub class: DichotomyClass,
    /// Extremes of ‖Π_j‖_P over all shifts and steps (min may underflow
    /// to zero for fast decay).
    pub min_norm: f64,
    pub max_norm: f64,
}

/// Product accumulator that renormalizes each step, so norms are tracked
/// in log space and never underflow.
struct ScaledProduct {
    b: DMatrix<f64>,
    log_scale: f64,
}

impl ScaledProduct {
    fn new(d: usize) -> Self {
        ScaledProduct {
            b: DMatrix::identity(d, d),
            log_scale: 0.0,
        }
    }

    fn step(&mut self, s: &DMatrix<f64>) {
        self.b = s * &self.b;
        let f = self.b.norm();
        if f > 0.0 && f.is_finite() {
            self.b /= f;
            self.log_scale += f.ln();
        } else {
            // exactly annihilated
            self.log_scale = f64::NEG_INFINITY;
        }
    }

    fn log_p_norm(&self, cert: &LyapunovCertificate) -> f64 {
        if self.log_scale == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.log_scale + cert.factor().opnorm(&self.b).ln()
    }
}

/// Classify a periodic signal: exponential decay of the product norms, or
/// all shifted products pinned to norm one.
///
/// Under a valid certificate these are the only two behaviors; anything
/// else signals a tolerance or certificate failure and is reported as
/// [`Error::InconsistentWithDichotomy`].
pub fn dichotomy_check(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    word: &Word,
    n: usize,
) -> Result<DichotomyReport> {
    dichotomy_check_with_tol(sys, cert, word, n, &Tolerance::default())
}

pub fn dichotomy_check_with_tol(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    word: &Word,
    n: usize,
    tol: &Tolerance,
) -> Result<DichotomyReport> {
    cert.ensure_valid()?;
    if n == 0 {
        return Err(Error::HorizonZero);
    }
    let p = word.len();
    let band = 10.0 * tol.psd;
    let mut min_log = f64::INFINITY;
    let mut max_log = f64::NEG_INFINITY;
    let mut shift0_logs = Vec::with_capacity(n);
    for shift in 0..p {
        let sig = crate::signals::make_periodic(word.rotated(shift));
        let letters = letters_for(sys, &sig, n)?;
        let mut prod = ScaledProduct::new(sys.dim());
        for &letter in &letters {
            prod.step(sys.matrix(letter)?);
            let l = prod.log_p_norm(cert);
            min_log = min_log.min(l);
            max_log = max_log.max(l);
            if shift == 0 {
                shift0_logs.push(l);
            }
        }
    }

    let min_norm = min_log.exp();
    let max_norm = max_log.exp();
    if min_norm >= 1.0 - band && max_norm <= 1.0 + band {
        return Ok(DichotomyReport {
            class: DichotomyClass::NormOne,
            min_norm,
            max_norm,
        });
    }

    // least-squares log-linear fit over the second half (skips transients)
    let start = n / 2;
    let pts: Vec<(f64, f64)> = (start..n)
        .filter(|&j| shift0_logs[j].is_finite())
        .map(|j| ((j + 1) as f64, shift0_logs[j]))
        .collect();
    if pts.len() < 2 {
        // norms hit exact zero: that is decay to machine zero
        return Ok(DichotomyReport {
            class: DichotomyClass::ExponentialDecay {
                rate: 0.0,
                prefactor: 1.0,
            },
            min_norm,
            max_norm,
        });
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let rate = slope.exp();
    let final_log = *shift0_logs.last().expect("n >= 1");
    if rate < 1.0 && final_log < (1.0 - band).ln() {
        Ok(DichotomyReport {
            class: DichotomyClass::ExponentialDecay {
                rate,
                prefactor: intercept.exp(),
            },
            min_norm,
            max_norm,
        })
    } else {
        Err(Error::InconsistentWithDichotomy {
            detail: format!(
                "norms left the unit band (min {min_norm:.3e}) but the fitted rate is {rate:.6}"
            ),
        })
    }
}

/// SplitMix64 step; used to derive independent per-trial seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn derive_trial_seed(base: u64, trial: u64) -> u64 {
    splitmix64(base ^ splitmix64(trial))
}

/// One Monte Carlo trial.
#[derive(Clone, Debug)]
pub struct McTrial {
    pub trial: usize,
    pub seed: u64,
    pub final_log_norm: f64,
    pub decayed: bool,
}

/// Aggregate Monte Carlo report; deterministic given the base seed and
/// independent of trial scheduling.
#[derive(Clone, Debug)]
pub struct McReport {
    pub fraction: f64,
    pub decayed: usize,
    pub trials: usize,
    pub horizon: usize,
    pub decay_thresh: f64,
    pub rng: &'static str,
    pub per_trial: Vec<McTrial>,
}

/// Sample `trials` signals from the measure template, run each to the
/// horizon and report the fraction whose final product P-norm falls below
/// `decay_thresh`.
///
/// Trial seeds are derived from the base seed with SplitMix64, so trials
/// are independent, reproducible and order-insensitive; deterministic
/// measure templates (periodic, explicit) simply repeat one signal.
pub fn monte_carlo_stability(
    sys: &SwitchedSystem,
    cert: &LyapunovCertificate,
    measure: &SwitchingSignal,
    trials: usize,
    horizon: usize,
    decay_thresh: f64,
    seed: u64,
) -> Result<McReport> {
    cert.ensure_valid()?;
    if trials == 0 || horizon == 0 {
        return Err(Error::HorizonZero);
    }
    if measure.alphabet() > sys.alphabet_size() {
        return Err(Error::WrongAlphabet {
            k: measure.alphabet(),
            hint: "measure alphabet exceeds the system's",
        });
    }
    let log_thresh = decay_thresh.ln();
    let per_trial: Vec<McTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_trial_seed(seed, t as u64);
            let sig = measure.with_seed(trial_seed);
            let letters = sig.prefix(horizon);
            let mut prod = ScaledProduct::new(sys.dim());
            for &letter in &letters {
                prod.step(&sys.matrices()[letter as usize - 1]);
            }
            let final_log_norm = prod.log_p_norm(cert);
            McTrial {
                trial: t,
                seed: trial_seed,
                final_log_norm,
                decayed: final_log_norm < log_thresh,
            }
        })
        .collect();
    let decayed = per_trial.iter().filter(|t| t.decayed).count();
    Ok(McReport {
        fraction: decayed as f64 / trials as f64,
        decayed,
        trials,
        horizon,
        decay_thresh,
        rng: RNG_ID,
        per_trial,
    })
}
