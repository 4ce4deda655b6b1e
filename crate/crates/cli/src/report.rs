//! JSON report bodies for each command.

use serde::Serialize;
use tightbell::classical::ClassicalBiasResult;
use tightbell::io::CertificateExport;
use tightbell::nlc::{CorollaryBound, G0Dimension, NlcAnalysis, NlcBiasBound};
use tightbell::qsdp::QuantumBiasResult;
use tightbell::rational::{format_rational, to_f64};
use tightbell::DeterministicStrategy;

use crate::RunConfig;

#[derive(Debug, Serialize)]
pub struct StrategyOut {
    pub alpha: Vec<i8>,
    pub beta: Vec<i8>,
}

impl From<&DeterministicStrategy> for StrategyOut {
    fn from(s: &DeterministicStrategy) -> Self {
        Self {
            alpha: s.alpha.clone(),
            beta: s.beta.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub exact: Vec<&'static str>,
    pub certified_numeric: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct ClassicalReport {
    pub kind: &'static str,
    pub m_a: usize,
    pub m_b: usize,
    pub xi_c: String,
    pub xi_c_approx: f64,
    pub winning_probability: String,
    pub witness: StrategyOut,
    pub num_alpha_optimal: u64,
    pub enumerated_side: &'static str,
    pub provenance: Provenance,
}

impl ClassicalReport {
    pub fn new(m_a: usize, m_b: usize, r: &ClassicalBiasResult) -> Self {
        let half = tightbell::rational::ratio(1, 2);
        let omega = (&r.xi_c + tightbell::rational::ratio(1, 1)) * half;
        Self {
            kind: "classical",
            m_a,
            m_b,
            xi_c: format_rational(&r.xi_c),
            xi_c_approx: to_f64(&r.xi_c),
            winning_probability: format_rational(&omega),
            witness: (&r.witness).into(),
            num_alpha_optimal: r.num_alpha_optimal,
            enumerated_side: if r.transposed { "bob" } else { "alice" },
            provenance: Provenance {
                exact: vec!["xi_c", "winning_probability", "witness"],
                certified_numeric: vec![],
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolverSettings {
    pub seed: u64,
    pub restarts: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub adv_tol: f64,
}

impl From<&RunConfig> for SolverSettings {
    fn from(c: &RunConfig) -> Self {
        Self {
            seed: c.seed,
            restarts: c.restarts,
            gap_tol: c.gap_tol,
            feas_tol: c.feas_tol,
            adv_tol: c.adv_tol,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuantumReport {
    pub kind: &'static str,
    pub m_a: usize,
    pub m_b: usize,
    pub certified: bool,
    pub xi_q: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub min_eig: f64,
    pub raw_min_eig: f64,
    pub dual_shift: f64,
    pub xi_c: Option<String>,
    pub classification: &'static str,
    pub restart: usize,
    pub sweeps: usize,
    pub stalls: usize,
    pub certificate: CertificateExport,
    pub solver: SolverSettings,
    pub provenance: Provenance,
}

impl QuantumReport {
    pub fn new(
        m_a: usize,
        m_b: usize,
        r: &QuantumBiasResult,
        xi_c: Option<String>,
        certified: bool,
        cfg: &RunConfig,
    ) -> Self {
        Self {
            kind: "quantum",
            m_a,
            m_b,
            certified,
            xi_q: r.xi_q,
            dual_value: r.dual_value,
            gap: r.gap,
            min_eig: r.cert.min_eig,
            raw_min_eig: r.cert.raw_min_eig,
            dual_shift: r.cert.shift,
            xi_c,
            classification: r.classification.as_str(),
            restart: r.restart,
            sweeps: r.sweeps,
            stalls: r.stalls,
            certificate: r.into(),
            solver: cfg.into(),
            provenance: Provenance {
                exact: vec!["xi_c"],
                certified_numeric: vec!["xi_q", "dual_value", "gap", "min_eig", "certificate"],
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub n: u32,
    pub spectrum: Vec<String>,
    pub lambda_norm: String,
    pub game_matrix_norm: String,
    pub k: usize,
    pub l: usize,
    pub xi_star: String,
    pub kl_dim_bound: usize,
    pub diagonal_verified: Option<bool>,
    pub provenance: Provenance,
}

impl From<&NlcAnalysis> for SpectrumReport {
    fn from(a: &NlcAnalysis) -> Self {
        Self {
            n: a.n,
            spectrum: a.spectrum.iter().map(format_rational).collect(),
            lambda_norm: format_rational(&a.lambda_norm),
            game_matrix_norm: format_rational(&a.game_matrix_norm()),
            k: a.k,
            l: a.l,
            xi_star: format_rational(&a.xi_star),
            kl_dim_bound: a.kl_dim_bound,
            diagonal_verified: a.diagonal_verified,
            provenance: Provenance {
                exact: vec!["spectrum", "lambda_norm", "k", "l", "xi_star", "diagonal_verified"],
                certified_numeric: vec![],
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundReport {
    pub xi_star: String,
    pub xi_c: String,
    pub matches_classical: bool,
    pub provenance: Provenance,
}

impl From<&NlcBiasBound> for BoundReport {
    fn from(b: &NlcBiasBound) -> Self {
        Self {
            xi_star: format_rational(&b.xi_star),
            xi_c: format_rational(&b.xi_c),
            matches_classical: b.matches_classical,
            provenance: Provenance {
                exact: vec!["xi_star", "xi_c", "matches_classical"],
                certified_numeric: vec![],
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct G0Report {
    pub n: u32,
    pub formula: usize,
    pub verified: usize,
    pub face_dim_with_all_ones: usize,
    pub agrees: bool,
}

impl G0Report {
    pub fn new(n: u32, g: &G0Dimension) -> Self {
        Self {
            n,
            formula: g.formula_value,
            verified: g.verified_value,
            face_dim_with_all_ones: g.with_all_ones,
            agrees: g.formula_value == g.verified_value,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CorollaryReport {
    pub n: u32,
    pub dim_bound: usize,
    pub dim_bound_corr: usize,
    pub codim_bound_full: usize,
    pub codim_bound_corr: usize,
}

impl CorollaryReport {
    pub fn new(n: u32, c: &CorollaryBound) -> Self {
        Self {
            n,
            dim_bound: c.dim_bound,
            dim_bound_corr: c.dim_bound_corr,
            codim_bound_full: c.codim_bound_full,
            codim_bound_corr: c.codim_bound_corr,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TrivialFacetReport {
    pub m_a: usize,
    pub m_b: usize,
    pub x0: usize,
    pub y0: usize,
    pub sign: i8,
    pub dim: usize,
    pub is_facet: bool,
    pub num_vertices: usize,
}

#[derive(Debug, Serialize)]
pub struct ProbeReport {
    pub dim_lower_bound: usize,
    pub thm3_bound: usize,
    pub samples_accepted: usize,
    pub rank_tol: f64,
    pub singular_values: Vec<f64>,
    pub note: &'static str,
}

#[derive(Debug, Serialize)]
pub struct FamilyPoint {
    pub n: u32,
    pub size: usize,
    pub xi_c: String,
    pub xi_q: f64,
    pub classification: &'static str,
    pub num_vertices: usize,
    pub dim_full: usize,
    pub dim_corr: usize,
    pub codim_full: usize,
    pub codim_corr: usize,
    pub dim_bound: usize,
    pub provenance: &'static str,
}

#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub points: Vec<FamilyPoint>,
}
