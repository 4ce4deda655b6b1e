//! JSON file formats and report schemas.
//!
//! Exact quantities are serialized as rational strings (`"1/2"`), certified
//! numerical ones as JSON numbers. Every report states which is which in a
//! `provenance` object.

use crate::facegeom::{FaceReport, Provenance};
use crate::game::{Behaviour, GameError, XorGame};
use crate::nlc::{NlcError, NlcSpec};
use crate::qsdp::QuantumBiasResult;
use crate::rational::{format_rational, parse_rational, ParseRationalError, Rational};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const GAME_FORMAT: &str = "tightbell-game-v1";
pub const BEHAVIOUR_FORMAT: &str = "tightbell-behaviour-v1";
pub const NLC_FORMAT: &str = "tightbell-nlc-v1";

/// Marks values computed in exact rational or integer arithmetic.
pub const EXACT: &str = "exact";
/// Marks floating-point values backed by a dual certificate.
pub const CERTIFIED_NUMERIC: &str = "certified-numeric";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read or write {path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format tag {found:?}, expected {expected:?}")]
    Format { found: String, expected: &'static str },
    #[error("bad entry at {location}: {source}")]
    Rational {
        location: String,
        source: ParseRationalError,
    },
    #[error("invalid behaviour: {0}")]
    Behaviour(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Nlc(#[from] NlcError),
}

/// A rational written either as a string or as a bare JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    fn parse(&self, location: impl FnOnce() -> String) -> Result<Rational, IoError> {
        match self {
            Self::Text(s) => parse_rational(s).map_err(|source| IoError::Rational {
                location: location(),
                source,
            }),
            Self::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(r: &Rational) -> Self {
        Self::Text(format_rational(r))
    }
}

fn check_format(found: Option<&str>, expected: &'static str) -> Result<(), IoError> {
    match found {
        None => Ok(()),
        Some(f) if f == expected => Ok(()),
        Some(f) => Err(IoError::Format {
            found: f.to_string(),
            expected,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub m_a: usize,
    pub m_b: usize,
    pub q: Vec<Vec<RationalText>>,
    pub f: Vec<Vec<u8>>,
}

impl GameFile {
    pub fn from_game(game: &XorGame) -> Self {
        let (m_a, m_b) = (game.m_a(), game.m_b());
        Self {
            format: Some(GAME_FORMAT.to_string()),
            m_a,
            m_b,
            q: (0..m_a)
                .map(|x| (0..m_b).map(|y| game.q(x, y).into()).collect())
                .collect(),
            f: (0..m_a)
                .map(|x| (0..m_b).map(|y| u8::from(game.f(x, y))).collect())
                .collect(),
        }
    }

    pub fn to_game(&self) -> Result<XorGame, IoError> {
        check_format(self.format.as_deref(), GAME_FORMAT)?;
        if self.q.len() != self.m_a || self.f.len() != self.m_a {
            return Err(GameError::ShapeMismatch(format!(
                "expected {} rows in q and f, got {} and {}",
                self.m_a,
                self.q.len(),
                self.f.len()
            ))
            .into());
        }
        let mut q = Vec::with_capacity(self.m_a);
        for (x, row) in self.q.iter().enumerate() {
            if row.len() != self.m_b {
                return Err(GameError::ShapeMismatch(format!(
                    "row {x} of q has {} entries, expected {}",
                    row.len(),
                    self.m_b
                ))
                .into());
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(y, v)| v.parse(|| format!("q[{x}][{y}]")))
                .collect::<Result<Vec<_>, _>>()?;
            q.push(parsed);
        }
        Ok(XorGame::new(q, self.f.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviourFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub m_a: usize,
    pub m_b: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `m_a × m_b` correlators.
    pub c: Vec<Vec<f64>>,
}

impl BehaviourFile {
    pub fn from_behaviour(b: &Behaviour) -> Self {
        Self {
            format: Some(BEHAVIOUR_FORMAT.to_string()),
            m_a: b.m_a,
            m_b: b.m_b,
            alpha: b.alpha.clone(),
            beta: b.beta.clone(),
            c: b.c.chunks(b.m_b.max(1)).map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn to_behaviour(&self) -> Result<Behaviour, IoError> {
        check_format(self.format.as_deref(), BEHAVIOUR_FORMAT)?;
        if self.alpha.len() != self.m_a
            || self.beta.len() != self.m_b
            || self.c.len() != self.m_a
            || self.c.iter().any(|r| r.len() != self.m_b)
        {
            return Err(IoError::Behaviour("array lengths do not match m_a, m_b".into()));
        }
        Ok(Behaviour {
            m_a: self.m_a,
            m_b: self.m_b,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            c: self.c.concat(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlcFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub n: u32,
    pub q_tilde: Vec<RationalText>,
    pub f_z: Vec<u8>,
}

impl NlcFile {
    pub fn from_spec(spec: &NlcSpec) -> Self {
        Self {
            format: Some(NLC_FORMAT.to_string()),
            n: spec.n(),
            q_tilde: spec.q_tilde().iter().map(Into::into).collect(),
            f_z: spec.f_z().to_vec(),
        }
    }

    pub fn to_spec(&self) -> Result<NlcSpec, IoError> {
        check_format(self.format.as_deref(), NLC_FORMAT)?;
        let q = self
            .q_tilde
            .iter()
            .enumerate()
            .map(|(z, v)| v.parse(|| format!("q_tilde[{z}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NlcSpec::new(self.n, q, self.f_z.clone())?)
    }
}

/// Either a game file or an NLC spec file, decided by its `format` tag (or,
/// without one, by its fields).
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    Game(GameFile),
    Nlc(NlcFile),
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let is_nlc = match value.get("format").and_then(|f| f.as_str()) {
            Some(NLC_FORMAT) => true,
            Some(_) => false,
            None => value.get("q_tilde").is_some(),
        };
        Ok(if is_nlc {
            Self::Nlc(serde_json::from_value(value)?)
        } else {
            Self::Game(serde_json::from_value(value)?)
        })
    }

    pub fn to_game(&self) -> Result<XorGame, IoError> {
        match self {
            Self::Game(g) => g.to_game(),
            Self::Nlc(n) => Ok(crate::nlc::build_nlc(&n.to_spec()?)),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_game(path: &Path) -> Result<XorGame, IoError> {
    InputFile::parse(&read_text(path)?)?.to_game()
}

pub fn write_game(path: &Path, game: &XorGame) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(&GameFile::from_game(game))?;
    text.push('\n');
    write_text(path, &text)
}

/// Dual certificate in a form that can be re-checked without this crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateExport {
    pub xi_q: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub t: Vec<f64>,
    pub min_eig: f64,
    pub raw_min_eig: f64,
    pub classification: String,
}

impl From<&QuantumBiasResult> for CertificateExport {
    fn from(r: &QuantumBiasResult) -> Self {
        Self {
            xi_q: r.xi_q,
            dual_value: r.dual_value,
            gap: r.gap,
            t: r.cert.t.clone(),
            min_eig: r.cert.min_eig,
            raw_min_eig: r.cert.raw_min_eig,
            classification: r.classification.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceProvenance {
    pub xi_c: String,
    pub xi_q: String,
    pub dim_full: String,
    pub dim_corr: String,
    pub codim_full: String,
    pub codim_corr: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodimBoundExport {
    pub full: usize,
    pub corr: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceReportExport {
    pub m_a: usize,
    pub m_b: usize,
    pub reduced_m_a: usize,
    pub reduced_m_b: usize,
    pub ambient_dim: usize,
    pub xi_c: String,
    pub xi_q: f64,
    pub classification: String,
    pub num_vertices: usize,
    pub dim_full: usize,
    pub dim_corr: usize,
    pub codim_full: usize,
    pub codim_corr: usize,
    pub bound_thm1_dim: usize,
    pub bound_thm2_codim: CodimBoundExport,
    pub is_facet_full: Option<bool>,
    pub is_facet_corr: Option<bool>,
    pub truncated: bool,
    pub f_relation_max_residual: Option<f64>,
    pub f_relation_pass: Option<bool>,
    pub max_slackness_residual: Option<f64>,
    pub notes: Vec<String>,
    pub provenance: FaceProvenance,
    pub certificate: CertificateExport,
}

impl From<&FaceReport> for FaceReportExport {
    fn from(r: &FaceReport) -> Self {
        let dims = match r.provenance {
            Provenance::Measured => Provenance::Measured.as_str().to_string(),
            p => p.as_str().to_string(),
        };
        // A lower bound on the dimension is an upper bound on the codimension.
        let codims = match r.provenance {
            Provenance::LowerBound => "upper bound (truncated vertex set)".to_string(),
            p => p.as_str().to_string(),
        };
        Self {
            m_a: r.dims.0,
            m_b: r.dims.1,
            reduced_m_a: r.reduced_dims.0,
            reduced_m_b: r.reduced_dims.1,
            ambient_dim: r.ambient_dim(),
            xi_c: format_rational(&r.xi_c),
            xi_q: r.xi_q,
            classification: r.classification.as_str().to_string(),
            num_vertices: r.num_vertices,
            dim_full: r.dim_full,
            dim_corr: r.dim_corr,
            codim_full: r.codim_full,
            codim_corr: r.codim_corr,
            bound_thm1_dim: r.bound_thm1_dim,
            bound_thm2_codim: CodimBoundExport {
                full: r.bound_thm2_codim.full,
                corr: r.bound_thm2_codim.corr,
            },
            is_facet_full: r.is_facet_full,
            is_facet_corr: r.is_facet_corr,
            truncated: r.truncated,
            f_relation_max_residual: r.f_relation.map(|f| f.max_residual),
            f_relation_pass: r.f_relation.map(|f| f.all_pass),
            max_slackness_residual: r.max_slackness_residual,
            notes: r.notes.clone(),
            provenance: FaceProvenance {
                xi_c: EXACT.to_string(),
                xi_q: CERTIFIED_NUMERIC.to_string(),
                dim_full: dims.clone(),
                dim_corr: dims,
                codim_full: codims.clone(),
                codim_corr: codims,
            },
            certificate: (&r.quantum).into(),
        }
    }
}
