//! JSON system files and signal specifications for the CLI.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SymMatrix, Tolerance};
use crate::lyapunov::SwitchedSystem;
use crate::signals::{make_constant_run, make_periodic, Filler, RunSchedule, SwitchingSignal};
use crate::words::Word;

/// Self-describing system file: dimension, alphabet size, the matrices as
/// row arrays, an optional weight `P` (identity when omitted) and optional
/// tolerance overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// Per-field tolerance overrides carried by a system file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
}

fn rows_to_matrix(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rows.len(),
        });
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(d, d, &flat))
}

impl SystemFile {
    /// Build the switched system and the weight matrix (identity default).
    pub fn to_system(&self) -> Result<(SwitchedSystem, SymMatrix)> {
        if self.matrices.len() != self.k {
            return Err(Error::WrongAlphabet {
                k: self.matrices.len(),
                hint: "matrix count must equal K",
            });
        }
        let mats = self
            .matrices
            .iter()
            .map(|rows| rows_to_matrix(rows, self.d))
            .collect::<Result<Vec<_>>>()?;
        let sys = SwitchedSystem::new(mats)?;
        let p = match &self.p {
            Some(rows) => SymMatrix::new(rows_to_matrix(rows, self.d)?)?,
            None => SymMatrix::identity(self.d),
        };
        Ok((sys, p))
    }

    /// Default tolerances overridden by the file's `tolerances` block.
    pub fn tolerance(&self) -> Tolerance {
        let mut tol = Tolerance::default();
        if let Some(o) = &self.tolerances {
            if let Some(v) = o.eig {
                tol.eig = v;
            }
            if let Some(v) = o.rank {
                tol.rank = v;
            }
            if let Some(v) = o.psd {
                tol.psd = v;
            }
            if let Some(v) = o.conv {
                tol.conv = v;
            }
            if let Some(v) = o.band {
                tol.band = v;
            }
        }
        tol
    }
}

/// Transition data for `markov:<file>` signal specifications.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovFile {
    pub transition: Vec<Vec<f64>>,
    pub init: Vec<f64>,
}

fn parse_letters(body: &str) -> Result<Vec<u8>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|_| Error::InvalidDistribution {
                    reason: format!("bad letter {s:?} in signal spec"),
                })
        })
        .collect()
}

fn parse_probs(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidDistribution {
                    reason: format!("bad probability {s:?} in signal spec"),
                })
        })
        .collect()
}

/// Parse a `--signal` specification against a system with alphabet size
/// `k`: `periodic:1,2` | `bernoulli:0.5,0.5` | `markov:<file>` |
/// `constantrun:1`.
pub fn parse_signal_spec(spec: &str, k: usize, seed: u64) -> Result<SwitchingSignal> {
    let (head, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidDistribution {
            reason: format!("signal spec {spec:?} has no kind prefix"),
        })?;
    let sig = match head {
        "periodic" => make_periodic(Word::new(parse_letters(body)?)?),
        "bernoulli" => SwitchingSignal::bernoulli(parse_probs(body)?, seed)?,
        "markov" => {
            let text = std::fs::read_to_string(body).map_err(|e| Error::InvalidDistribution {
                reason: format!("cannot read markov file {body:?}: {e}"),
            })?;
            let mf: MarkovFile =
                serde_json::from_str(&text).map_err(|e| Error::InvalidDistribution {
                    reason: format!("bad markov file {body:?}: {e}"),
                })?;
            SwitchingSignal::markov(mf.transition, mf.init, seed)?
        }
        "constantrun" => {
            let letters = parse_letters(body)?;
            if letters.len() != 1 {
                return Err(Error::InvalidDistribution {
                    reason: "constantrun takes exactly one letter".into(),
                });
            }
            // default gap content cycles through the whole alphabet
            let filler = Word::new((1..=k as u8).collect())?;
            make_constant_run(
                letters[0],
                RunSchedule::new(1, 1)?,
                Filler::Word(filler),
                seed,
            )?
        }
        other => {
            return Err(Error::InvalidDistribution {
                reason: format!("unknown signal kind {other:?}"),
            })
        }
    };
    if sig.alphabet() > k {
        return Err(Error::InvalidLetter {
            letter: sig.alphabet() as u8,
            k,
        });
    }
    sig.with_alphabet(k)
}

/// Parse `--x0 1,0` into a vector.
pub fn parse_x0(spec: &str) -> Result<DVector<f64>> {
    let vals = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidDistribution {
                    reason: format!("bad coordinate {s:?} in --x0"),
                })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DVector::from_vec(vals))
}
