//! Switching-signal construction and finite-prefix classification.
//!
//! Whether a signal is generic, recurrent or nonchaotic is a property of
//! its infinite tail and cannot be decided from any finite prefix. The
//! split here is deliberate: constructors *guarantee* a property by
//! construction (periodic signals are recurrent, constant-run signals are
//! nonchaotic, Bernoulli/Markov sampling is the ergodic case), while
//! [`classify_prefix`] only reports finite-prefix evidence.
//!
//! All stochastic generation is seeded ChaCha8 (`rng id "chacha8"` in
//! reports); identical kind + seed reproduce identical prefixes of any
//! length, and prefixes are generated single-pass so a longer request
//! extends a shorter one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::words::Word;

/// Identifier of the pseudo-random generator used for all sampling.
pub const RNG_ID: &str = "chacha8";

/// 1-based alphabet letter.
pub type Letter = u8;

const DIST_TOL: f64 = 1e-12;

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.len() > u8::MAX as usize {
        return Err(Error::InvalidDistribution {
            reason: format!("need 1..=255 probabilities, got {}", probs.len()),
        });
    }
    if probs
        .iter()
        .any(|&p| !(0.0..=1.0 + DIST_TOL).contains(&p) || !p.is_finite())
    {
        return Err(Error::InvalidDistribution {
            reason: "probabilities must lie in [0, 1]".into(),
        });
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution {
            reason: format!("probabilities sum to {sum}, expected 1"),
        });
    }
    Ok(())
}

fn sample_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> Letter {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return (i + 1) as Letter;
        }
    }
    probs.len() as Letter
}

/// Run-length schedule for constant-run signals; strictly increasing.
#[derive(Clone, Debug)]
pub struct RunSchedule {
    pub first: usize,
    pub step: usize,
}

impl RunSchedule {
    pub fn new(first: usize, step: usize) -> Result<Self> {
        if first == 0 {
            return Err(Error::InvalidSchedule {
                reason: "first run length must be >= 1",
            });
        }
        if step == 0 {
            return Err(Error::InvalidSchedule {
                reason: "run lengths must be strictly increasing (step >= 1)",
            });
        }
        Ok(RunSchedule { first, step })
    }

    fn length(&self, i: usize) -> usize {
        self.first + i * self.step
    }
}

/// What to emit between consecutive constant runs.
#[derive(Clone, Debug)]
pub enum Filler {
    /// One copy of this word per gap, cycled across gaps.
    Word(Word),
    /// One letter per gap, sampled from this distribution.
    Bernoulli(Vec<f64>),
}

/// Signal kinds.
#[derive(Clone, Debug)]
pub enum SignalKind {
    Periodic {
        word: Word,
    },
    Bernoulli {
        probs: Vec<f64>,
        seed: u64,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        init: Vec<f64>,
        seed: u64,
    },
    Explicit {
        prefix: Vec<Letter>,
    },
    ConstantRun {
        letter: Letter,
        schedule: RunSchedule,
        filler: Filler,
        seed: u64,
    },
}

/// A switching signal over the alphabet {1,…,K}: a kind plus the alphabet
/// size its letters are drawn from.
#[derive(Clone, Debug)]
pub struct SwitchingSignal {
    kind: SignalKind,
    alphabet: usize,
}

/// Periodic repetition of a word; recurrent by construction.
pub fn make_periodic(word: Word) -> SwitchingSignal {
    let alphabet = word.max_letter() as usize;
    SwitchingSignal {
        kind: SignalKind::Periodic { word },
        alphabet,
    }
}

/// A signal containing, beyond any index, a constant run of `letter` of
/// every length; nonchaotic by construction.
pub fn make_constant_run(
    letter: Letter,
    schedule: RunSchedule,
    filler: Filler,
    seed: u64,
) -> Result<SwitchingSignal> {
    if letter == 0 {
        return Err(Error::InvalidLetter { letter, k: 0 });
    }
    let filler_max = match &filler {
        Filler::Word(w) => w.max_letter() as usize,
        Filler::Bernoulli(probs) => {
            validate_probs(probs)?;
            probs.len()
        }
    };
    let alphabet = filler_max.max(letter as usize);
    Ok(SwitchingSignal {
        kind: SignalKind::ConstantRun {
            letter,
            schedule,
            filler,
            seed,
        },
        alphabet,
    })
}

impl SwitchingSignal {
    /// i.i.d. letters with the given distribution.
    pub fn bernoulli(probs: Vec<f64>, seed: u64) -> Result<Self> {
        validate_probs(&probs)?;
        let alphabet = probs.len();
        Ok(SwitchingSignal {
            kind: SignalKind::Bernoulli { probs, seed },
            alphabet,
        })
    }

    /// Markov-chain letters with the given row-stochastic transition matrix
    /// and initial distribution.
    pub fn markov(transition: Vec<Vec<f64>>, init: Vec<f64>, seed: u64) -> Result<Self> {
        let k = transition.len();
        if k == 0 {
            return Err(Error::InvalidDistribution {
                reason: "transition matrix is empty".into(),
            });
        }
        for row in &transition {
            if row.len() != k {
                return Err(Error::InvalidDistribution {
                    reason: format!("transition row has {} entries, expected {k}", row.len()),
                });
            }
            validate_probs(row)?;
        }
        if init.len() != k {
            return Err(Error::InvalidDistribution {
                reason: format!(
                    "initial distribution has {} entries, expected {k}",
                    init.len()
                ),
            });
        }
        validate_probs(&init)?;
        Ok(SwitchingSignal {
            kind: SignalKind::Markov {
                transition,
                init,
                seed,
            },
            alphabet: k,
        })
    }

    /// A signal given by an explicit finite prefix (extended periodically
    /// if generation runs past it).
    pub fn explicit(prefix: Vec<Letter>, alphabet: usize) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::EmptyWord);
        }
        for &l in &prefix {
            if l == 0 || l as usize > alphabet {
                return Err(Error::InvalidLetter {
                    letter: l,
                    k: alphabet,
                });
            }
        }
        Ok(SwitchingSignal {
            kind: SignalKind::Explicit { prefix },
            alphabet,
        })
    }

    /// Widen the alphabet (letters stay 1..=old K).
    pub fn with_alphabet(mut self, alphabet: usize) -> Result<Self> {
        if alphabet < self.alphabet {
            return Err(Error::WrongAlphabet {
                k: alphabet,
                hint: "alphabet may only be widened",
            });
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    /// Same kind, new seed (used to derive independent Monte Carlo trials).
    /// Deterministic kinds are unchanged.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out.kind {
            SignalKind::Bernoulli { seed: s, .. } => *s = seed,
            SignalKind::Markov { seed: s, .. } => *s = seed,
            SignalKind::ConstantRun { seed: s, .. } => *s = seed,
            SignalKind::Periodic { .. } | SignalKind::Explicit { .. } => {}
        }
        out
    }

    pub fn kind(&self) -> &SignalKind {
        &self.kind
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Period of the underlying word for periodic (and explicit) signals.
    pub fn period(&self) -> Option<usize> {
        match &self.kind {
            SignalKind::Periodic { word } => Some(word.len()),
            SignalKind::Explicit { prefix } => Some(prefix.len()),
            _ => None,
        }
    }

    /// Whether generation ignores the seed entirely, so the induced measure
    /// is concentrated on a single signal (atomic).
    pub fn is_deterministic(&self) -> bool {
        match &self.kind {
            SignalKind::Periodic { .. } | SignalKind::Explicit { .. } => true,
            SignalKind::Bernoulli { probs, .. } => probs.iter().any(|&p| p >= 1.0 - DIST_TOL),
            SignalKind::Markov {
                transition, init, ..
            } => {
                init.iter().any(|&p| p >= 1.0 - DIST_TOL)
                    && transition
                        .iter()
                        .all(|row| row.iter().any(|&p| p >= 1.0 - DIST_TOL))
            }
            SignalKind::ConstantRun { filler, .. } => match filler {
                Filler::Word(_) => true,
                Filler::Bernoulli(probs) => probs.iter().any(|&p| p >= 1.0 - DIST_TOL),
            },
        }
    }

    /// First `n` letters; deterministic given kind + seed, and stable under
    /// extension (the length-n prefix is a prefix of the length-2n one).
    pub fn prefix(&self, n: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(n);
        match &self.kind {
            SignalKind::Periodic { word } => {
                let letters = word.letters();
                for i in 0..n {
                    out.push(letters[i % letters.len()]);
                }
            }
            SignalKind::Explicit { prefix } => {
                for i in 0..n {
                    out.push(prefix[i % prefix.len()]);
                }
            }
            SignalKind::Bernoulli { probs, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..n {
                    out.push(sample_categorical(&mut rng, probs));
                }
            }
            SignalKind::Markov {
                transition,
                init,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut state = sample_categorical(&mut rng, init);
                for _ in 0..n {
                    out.push(state);
                    state = sample_categorical(&mut rng, &transition[state as usize - 1]);
                }
            }
            SignalKind::ConstantRun {
                letter,
                schedule,
                filler,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut run = 0usize;
                let mut filler_pos = 0usize;
                while out.len() < n {
                    let len = schedule.length(run);
                    for _ in 0..len {
                        if out.len() == n {
                            break;
                        }
                        out.push(*letter);
                    }
                    if out.len() == n {
                        break;
                    }
                    match filler {
                        Filler::Word(w) => {
                            let letters = w.letters();
                            for _ in 0..letters.len() {
                                if out.len() == n {
                                    break;
                                }
                                out.push(letters[filler_pos % letters.len()]);
                                filler_pos += 1;
                            }
                        }
                        Filler::Bernoulli(probs) => {
                            out.push(sample_categorical(&mut rng, probs));
                        }
                    }
                    run += 1;
                }
            }
        }
        out
    }
}

/// Finite-prefix evidence about a signal.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalClassification {
    /// Every letter of the alphabet appeared in the prefix.
    pub generic_so_far: bool,
    /// The prefix is constant.
    pub constant_prefix: bool,
    /// Smallest period p ≤ n/3 under which the whole prefix is periodic
    /// (at least three consecutive repetitions fit), if any.
    pub detected_period: Option<usize>,
    /// The exception word whose periodic extension equals the prefix, if
    /// any.
    pub matches_exception: Option<Word>,
}

/// Classify the length-`n` prefix of a signal against a list of exception
/// words. Total: every prefix has a classification.
pub fn classify_prefix(
    sig: &SwitchingSignal,
    n: usize,
    exceptions: &[Word],
) -> SignalClassification {
    let prefix = sig.prefix(n.max(1));
    let n = prefix.len();

    let mut seen = vec![false; sig.alphabet() + 1];
    for &l in &prefix {
        if (l as usize) < seen.len() {
            seen[l as usize] = true;
        }
    }
    let generic_so_far = (1..=sig.alphabet()).all(|k| seen[k]);
    let constant_prefix = prefix.iter().all(|&l| l == prefix[0]);

    let mut detected_period = None;
    for p in 1..=n / 3 {
        if (0..n - p).all(|i| prefix[i] == prefix[i + p]) {
            detected_period = Some(p);
            break;
        }
    }

    let matches_exception = exceptions
        .iter()
        .find(|w| {
            let letters = w.letters();
            (0..n).all(|i| prefix[i] == letters[i % letters.len()])
        })
        .cloned();

    SignalClassification {
        generic_so_far,
        constant_prefix,
        detected_period,
        matches_exception,
    }
}
