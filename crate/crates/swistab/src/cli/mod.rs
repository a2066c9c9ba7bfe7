//! The `swistab` command-line frontend.
//!
//! ```text
//! swistab verify|decide|ksub|simulate|omega|montecarlo|gsr <file> [flags]
//! ```
//!
//! Exit codes: 0 success/stable, 1 negative verdict, 2 undetermined,
//! 3 not converged, 64 usage or parse error, 65 budget exceeded,
//! 70 internal failure. `SWISTAB_THREADS` caps the worker count.

pub mod input;
pub mod report;

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::dynamics;
use crate::error::Error;
use crate::linalg::Tolerance;
use crate::lyapunov::verify_weak_lyapunov;
use crate::signals::classify_prefix;
use crate::subspace::{self, exception_words_for_dim};
use crate::words::{self, StabilityStatus};

use input::{parse_signal_spec, parse_x0, SystemFile};
use report::{matrix_value, subspace_value, Report};

/// Exit-code contract.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const UNDETERMINED: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const BUDGET: i32 = 65;
    pub const INTERNAL: i32 = 70;
}

/// Default Monte Carlo decay threshold on the final product P-norm.
pub const DEFAULT_DECAY_THRESH: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "swistab",
    version,
    about = "Stability analysis for discrete-time linear switched systems with a weak Lyapunov matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON system file.
    file: String,
    /// Emit the machine report to stdout.
    #[arg(long)]
    json: bool,
    /// Override the eigenvalue accuracy band.
    #[arg(long = "tol-eig")]
    tol_eig: Option<f64>,
    /// Override the numeric-rank threshold.
    #[arg(long = "tol-rank")]
    tol_rank: Option<f64>,
    /// Override the semidefiniteness slack.
    #[arg(long = "tol-psd")]
    tol_psd: Option<f64>,
    /// Override the decision band around 1.
    #[arg(long)]
    band: Option<f64>,
}

#[derive(Args)]
struct SignalArgs {
    /// Signal specification: periodic:1,2 | bernoulli:0.5,0.5 |
    /// markov:<file> | constantrun:1
    #[arg(long)]
    signal: String,
    /// Generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory horizon.
    #[arg(long, default_value_t = 2000)]
    horizon: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the weak Lyapunov condition and report per-matrix margins.
    Verify(CommonArgs),
    /// Decide absolute stability (d = 2 or 3, K = 2).
    Decide(CommonArgs),
    /// Norm-preserving subspaces, invariance and the intersection condition.
    Ksub(CommonArgs),
    /// Run one trajectory and report its P-norm profile.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        signal: SignalArgs,
        /// Initial state, e.g. --x0 1,0 (norm profile of the state included).
        #[arg(long)]
        x0: Option<String>,
        /// Write the profile as CSV (index,norm) to this path.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Estimate the limit matrix Q, the radii and the stable manifold.
    Omega {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        signal: SignalArgs,
        /// Trailing probes that vote on convergence.
        #[arg(long, default_value_t = 8)]
        probes: usize,
    },
    /// Monte Carlo almost-sure-stability experiment.
    Montecarlo {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        signal: SignalArgs,
        /// Number of sampled signals.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Lower-bound the generalized spectral radius by word scanning.
    Gsr {
        #[command(flatten)]
        common: CommonArgs,
        /// Longest word length to scan.
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NonSquare { .. }
            | Error::NonFinite
            | Error::NotSymmetric { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidLetter { .. }
            | Error::WrongDimension { .. }
            | Error::WrongAlphabet { .. }
            | Error::EmptyWord
            | Error::InvalidDistribution { .. }
            | Error::InvalidSchedule { .. }
            | Error::HorizonZero => exit_code::USAGE,
            Error::NotPositiveDefinite { .. } | Error::InvalidCertificate { .. } => {
                exit_code::NEGATIVE
            }
            Error::BudgetExceeded { .. } => exit_code::BUDGET,
            Error::NotConverged { .. } => exit_code::NOT_CONVERGED,
            Error::NotPsd { .. }
            | Error::NotContractiveWithinBudget { .. }
            | Error::PreconditionFailed { .. }
            | Error::InconsistentWithDichotomy { .. }
            | Error::EigenFailed => exit_code::INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Loaded {
    file: SystemFile,
    bytes: Vec<u8>,
    path: String,
    tol: Tolerance,
}

fn load(common: &CommonArgs) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(&common.file).map_err(|e| Failure {
        code: exit_code::USAGE,
        message: format!("cannot read {}: {e}", common.file),
    })?;
    let file: SystemFile = serde_json::from_slice(&bytes).map_err(|e| Failure {
        code: exit_code::USAGE,
        message: format!("cannot parse {}: {e}", common.file),
    })?;
    let mut tol = file.tolerance();
    if let Some(v) = common.tol_eig {
        tol.eig = v;
    }
    if let Some(v) = common.tol_rank {
        tol.rank = v;
    }
    if let Some(v) = common.tol_psd {
        tol.psd = v;
    }
    if let Some(v) = common.band {
        tol.band = v;
    }
    Ok(Loaded {
        file,
        bytes,
        path: common.file.clone(),
        tol,
    })
}

fn emit(report: &Report, json: bool, human: &[String]) {
    if json {
        println!("{}", report.to_json());
    } else {
        for line in human {
            println!("{line}");
        }
    }
}

fn cmd_verify(common: &CommonArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let cert = verify_weak_lyapunov(&sys, &p, &loaded.tol)?;
    let mut report = Report::new("verify", &loaded.path, &loaded.bytes, loaded.tol);
    report.result = json!({
        "valid": cert.is_valid(),
        "margins": cert.margins(),
        "strict": cert.strict(),
        "p_norms": cert.p_norms(),
        "worst_margin": cert.worst_margin(),
        "product_bound": cert.product_bound(),
    });
    let report = report.finalize(started);
    let mut human = vec![format!(
        "certificate: {}",
        if cert.is_valid() { "VALID" } else { "INVALID" }
    )];
    for (k, (m, n)) in cert.margins().iter().zip(cert.p_norms()).enumerate() {
        human.push(format!(
            "  S{}: margin {m:+.6e}  ‖S‖_P = {n:.12}{}",
            k + 1,
            if cert.strict()[k] { "  (strict)" } else { "" }
        ));
    }
    human.push(format!("product bound: {:.6}", cert.product_bound()));
    emit(&report, common.json, &human);
    Ok(if cert.is_valid() {
        exit_code::SUCCESS
    } else {
        exit_code::NEGATIVE
    })
}

fn cmd_decide(common: &CommonArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let cert = verify_weak_lyapunov(&sys, &p, &loaded.tol)?;
    let verdict = match sys.dim() {
        2 => words::decide_d2(&sys, &cert, &loaded.tol)?,
        3 => words::decide_d3(&sys, &cert, &loaded.tol)?,
        d => {
            return Err(Failure {
                code: exit_code::USAGE,
                message: format!(
                    "decide handles d = 2 or 3 only (got d = {d}); \
                     probe word stability with `swistab gsr` instead"
                ),
            })
        }
    };
    let mut report = Report::new("decide", &loaded.path, &loaded.bytes, loaded.tol);
    let (witness_word, witness_value) = match &verdict.witness {
        Some((w, v)) => (Some(w.to_string()), Some(*v)),
        None => (None, None),
    };
    report.result = json!({
        "status": verdict.status.to_string(),
        "witness": witness_word,
        "witness_value": witness_value,
        "margin": verdict.margin,
    });
    let report = report.finalize(started);
    let mut human = vec![format!("verdict: {}", verdict.status)];
    if let Some((w, v)) = &verdict.witness {
        human.push(format!("worst word: ({w})  with ρ^(1/n) = {v:.12}"));
    }
    human.push(format!("margin to 1: {:+.3e}", verdict.margin));
    emit(&report, common.json, &human);
    Ok(match verdict.status {
        StabilityStatus::AbsolutelyStable => exit_code::SUCCESS,
        StabilityStatus::NotAbsolutelyStable => exit_code::NEGATIVE,
        StabilityStatus::Undetermined => exit_code::UNDETERMINED,
    })
}

fn cmd_ksub(common: &CommonArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let tol = loaded.tol;
    let factor = crate::linalg::PFactor::new(&p, &tol)?;

    let mut per_matrix = Vec::new();
    let mut human = Vec::new();
    let mut ksets = Vec::new();
    for k in 1..=sys.alphabet_size() as u8 {
        let s = sys.matrix(k)?;
        let kset = subspace::k_subspace(&p, s, &tol)?;
        let conorm_set = subspace::k_conorm_subspace(&p, s, &tol)?;
        let invariant = subspace::is_invariant(s, &kset, &tol)?;
        human.push(format!(
            "S{k}: ‖S‖_P = {:.12}, dim 𝕂 = {}, invariant = {invariant}, dim 𝕂_co = {}",
            factor.opnorm(s),
            kset.dim(),
            conorm_set.dim()
        ));
        per_matrix.push(json!({
            "letter": k,
            "p_norm": factor.opnorm(s),
            "k_set": subspace_value(&kset),
            "k_set_invariant": invariant,
            "conorm_set": subspace_value(&conorm_set),
        }));
        ksets.push(kset);
    }

    // pairwise intersections of the norm-preserving subspaces
    let mut pairwise = Vec::new();
    for i in 0..ksets.len() {
        for j in (i + 1)..ksets.len() {
            let inter = subspace::intersect(&ksets[i], &ksets[j], &tol)?;
            pairwise.push(json!({
                "pair": [i + 1, j + 1],
                "intersection_dim": inter.dim(),
            }));
        }
    }

    let iv1 = if sys.alphabet_size() == 2 {
        let rep = subspace::check_iv1(&sys, &p, &tol)?;
        human.push(format!(
            "intersection 𝕂(S₁) ∩ 𝕂(S₂): dim {} — condition {}",
            rep.intersection_dim,
            if rep.holds { "holds" } else { "fails" }
        ));
        if !rep.exception_words.is_empty() {
            human.push(format!(
                "exceptional periodic words: {}",
                rep.exception_words
                    .iter()
                    .map(|w| format!("({w})"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        Some(rep)
    } else {
        None
    };

    let mut report = Report::new("ksub", &loaded.path, &loaded.bytes, tol);
    report.result = json!({
        "per_matrix": per_matrix,
        "pairwise_intersections": pairwise,
        "iv1_holds": iv1.as_ref().map(|r| r.holds),
        "invariant_flags": iv1.as_ref().map(|r| r.invariant.clone()),
        "exception_words": iv1
            .as_ref()
            .map(|r| r.exception_words.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
    });
    let report = report.finalize(started);
    emit(&report, common.json, &human);
    Ok(exit_code::SUCCESS)
}

fn cmd_simulate(
    common: &CommonArgs,
    signal: &SignalArgs,
    x0: &Option<String>,
    csv: &Option<String>,
) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let cert = verify_weak_lyapunov(&sys, &p, &loaded.tol)?;
    let sig = parse_signal_spec(&signal.signal, sys.alphabet_size(), signal.seed)?;
    let x0 = x0.as_ref().map(|s| parse_x0(s)).transpose()?;
    let rec = dynamics::iterate(&sys, &cert, &sig, signal.horizon, x0.as_ref())?;

    if let Some(path) = csv {
        let mut out = String::with_capacity(rec.product_norms.len() * 28);
        out.push_str("index,norm\n");
        for (i, v) in rec.product_norms.iter().enumerate() {
            out.push_str(&format!("{},{:.16e}\n", i + 1, v));
        }
        std::fs::write(path, out).map_err(|e| Failure {
            code: exit_code::USAGE,
            message: format!("cannot write {path}: {e}"),
        })?;
    }

    let final_norm = *rec.product_norms.last().expect("horizon >= 1");
    let min_norm = rec
        .product_norms
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let classification = classify_prefix(
        &sig,
        signal.horizon.min(4096),
        &exception_words_for_dim(sys.dim()),
    );
    let mut report = Report::new("simulate", &loaded.path, &loaded.bytes, loaded.tol);
    report.seed = Some(signal.seed);
    report.rng = Some(crate::signals::RNG_ID.to_string());
    report.signal = Some(signal.signal.clone());
    report.result = json!({
        "horizon": signal.horizon,
        "final_norm": final_norm,
        "min_norm": min_norm,
        "final_state_norm": rec.state_norms.as_ref().map(|v| *v.last().expect("horizon >= 1")),
        "probe_deltas": rec.probe_deltas,
        "prefix_generic_so_far": classification.generic_so_far,
        "prefix_detected_period": classification.detected_period,
        "prefix_matches_exception": classification.matches_exception.map(|w| w.to_string()),
        "csv": csv,
    });
    let report = report.finalize(started);
    let human = vec![
        format!("signal: {}  horizon: {}", signal.signal, signal.horizon),
        format!("final ‖Π‖_P = {final_norm:.6e}   min = {min_norm:.6e}"),
    ];
    emit(&report, common.json, &human);
    Ok(exit_code::SUCCESS)
}

fn cmd_omega(common: &CommonArgs, signal: &SignalArgs, probes: usize) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let cert = verify_weak_lyapunov(&sys, &p, &loaded.tol)?;
    let sig = parse_signal_spec(&signal.signal, sys.alphabet_size(), signal.seed)?;
    let est = dynamics::omega_estimate(&sys, &cert, &sig, signal.horizon, probes, &loaded.tol)?;

    let mut report = Report::new("omega", &loaded.path, &loaded.bytes, loaded.tol);
    report.seed = Some(signal.seed);
    report.rng = Some(crate::signals::RNG_ID.to_string());
    report.signal = Some(signal.signal.clone());
    report.result = json!({
        "q": matrix_value(est.q.matrix()),
        "r_exterior": est.r_e,
        "r_interior": est.r_i,
        "stable_manifold": subspace_value(&est.stable_manifold),
        "residual": est.residual,
        "probe_mode": format!("{:?}", est.mode),
    });
    let report = report.finalize(started);
    let human = vec![
        format!(
            "converged via {:?} probes, residual {:.3e}",
            est.mode, est.residual
        ),
        format!("r_E = {:.12}   r_I = {:.12}", est.r_e, est.r_i),
        format!("dim E^s = {}", est.stable_manifold.dim()),
    ];
    emit(&report, common.json, &human);
    Ok(exit_code::SUCCESS)
}

fn cmd_montecarlo(common: &CommonArgs, signal: &SignalArgs, trials: usize) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, p) = loaded.file.to_system()?;
    let cert = verify_weak_lyapunov(&sys, &p, &loaded.tol)?;
    let measure = parse_signal_spec(&signal.signal, sys.alphabet_size(), signal.seed)?;
    let rep = dynamics::monte_carlo_stability(
        &sys,
        &cert,
        &measure,
        trials,
        signal.horizon,
        DEFAULT_DECAY_THRESH,
        signal.seed,
    )?;

    let mut report = Report::new("montecarlo", &loaded.path, &loaded.bytes, loaded.tol);
    report.seed = Some(signal.seed);
    report.rng = Some(rep.rng.to_string());
    report.signal = Some(signal.signal.clone());
    let per_trial: Vec<_> = rep
        .per_trial
        .iter()
        .map(|t| {
            json!({
                "trial": t.trial,
                "seed": t.seed,
                "final_log_norm": t.final_log_norm,
                "decayed": t.decayed,
            })
        })
        .collect();
    report.result = json!({
        "fraction": rep.fraction,
        "decayed": rep.decayed,
        "trials": rep.trials,
        "horizon": rep.horizon,
        "decay_thresh": rep.decay_thresh,
        "measure_atomic": measure.is_deterministic(),
        "per_trial": per_trial,
    });
    let report = report.finalize(started);
    let human = vec![
        format!(
            "decay fraction: {:.4} ({}/{} trials, horizon {}, threshold {:.1e})",
            rep.fraction, rep.decayed, rep.trials, rep.horizon, rep.decay_thresh
        ),
        format!(
            "measure: {}{}",
            signal.signal,
            if measure.is_deterministic() {
                "  [atomic]"
            } else {
                ""
            }
        ),
    ];
    emit(&report, common.json, &human);
    Ok(exit_code::SUCCESS)
}

fn cmd_gsr(common: &CommonArgs, nmax: usize) -> Result<i32, Failure> {
    let started = Instant::now();
    let loaded = load(common)?;
    let (sys, _p) = loaded.file.to_system()?;
    let scan = words::gsr_lower_bound(&sys, nmax, true)?;

    let mut report = Report::new("gsr", &loaded.path, &loaded.bytes, loaded.tol);
    let per_length: Vec<_> = scan
        .per_length
        .iter()
        .map(|wm| {
            json!({
                "length": wm.length,
                "max_value": wm.value,
                "word": wm.word.to_string(),
            })
        })
        .collect();
    report.result = json!({
        "lower_bound": scan.value,
        "witness": scan.witness.to_string(),
        "per_length": per_length,
    });
    let report = report.finalize(started);
    let mut human = vec![format!(
        "generalized spectral radius ≥ {:.12}   witness ({})",
        scan.value, scan.witness
    )];
    for wm in &scan.per_length {
        human.push(format!(
            "  n = {:>2}: max ρ^(1/n) = {:.12}   ({})",
            wm.length, wm.value, wm.word
        ));
    }
    emit(&report, common.json, &human);
    Ok(exit_code::SUCCESS)
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Verify(c) => cmd_verify(c),
        Command::Decide(c) => cmd_decide(c),
        Command::Ksub(c) => cmd_ksub(c),
        Command::Simulate {
            common,
            signal,
            x0,
            csv,
        } => cmd_simulate(common, signal, x0, csv),
        Command::Omega {
            common,
            signal,
            probes,
        } => cmd_omega(common, signal, *probes),
        Command::Montecarlo {
            common,
            signal,
            trials,
        } => cmd_montecarlo(common, signal, *trials),
        Command::Gsr { common, nmax } => cmd_gsr(common, *nmax),
    }
}

/// Parse arguments from the process environment and run; returns the exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are successes, not usage errors
            let code = if e.use_stderr() { exit_code::USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    let worker_cap = std::env::var("SWISTAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1);

    let outcome = match worker_cap {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build();
            match pool {
                Ok(pool) => pool.install(|| dispatch(&cli)),
                Err(e) => Err(Failure {
                    code: exit_code::INTERNAL,
                    message: format!("cannot build worker pool: {e}"),
                }),
            }
        }
        None => dispatch(&cli),
    };

    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("swistab: {}", f.message);
            f.code
        }
    }
}
