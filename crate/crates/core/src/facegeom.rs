//! Faces of the Bell polytope cut out by an XOR game.
//!
//! Behaviours live in `ℝ^D`, `D = m_a·m_b + m_a + m_b`, as `(α, β, vec C)`
//! with `C` flattened row-major. The face of a game is the convex hull of the
//! embedded optimal deterministic strategies, so its dimension is the exact
//! affine rank of those integer points.

use crate::classical::{
    optimal_vertices, verify_f_relation, ClassicalError, EnumerationCaps, FRelationReport,
};
use crate::exact::affine_dimension;
use crate::game::{DeterministicStrategy, GameError, XorGame};
use crate::qsdp::{
    extract_f, slackness_residual_classical, solve_quantum_bias, solve_quantum_bias_with,
    Classification, QsdpError, QuantumBiasResult, Solver, SolverConfig, DEFAULT_SLACK_TOL,
};
use crate::rational::{to_f64, Rational};
use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum FaceError {
    #[error("no points given")]
    EmptyInput,
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("enumerating {count} strategies exceeds the cap of {cap}")]
    TooLarge { count: u128, cap: u64 },
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QsdpError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("probe requires a no-advantage game, got {}", .0.as_str())]
    NotApplicable(Classification),
    #[error("probe found dimension {found} above the Gram bound {bound}")]
    ProbeInconsistent { found: usize, bound: usize },
}

/// `(α, β, vec αβᵀ)` as integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmbeddedVertex {
    pub m_a: usize,
    pub m_b: usize,
    pub coords: Vec<i64>,
}

impl EmbeddedVertex {
    pub fn alpha(&self) -> &[i64] {
        &self.coords[..self.m_a]
    }

    pub fn beta(&self) -> &[i64] {
        &self.coords[self.m_a..self.m_a + self.m_b]
    }

    pub fn correlation_coords(&self) -> &[i64] {
        &self.coords[self.m_a + self.m_b..]
    }
}

pub fn embed_vertex(v: &DeterministicStrategy) -> EmbeddedVertex {
    let (m_a, m_b) = (v.alpha.len(), v.beta.len());
    let mut coords = Vec::with_capacity(m_a * m_b + m_a + m_b);
    coords.extend(v.alpha.iter().map(|&a| i64::from(a)));
    coords.extend(v.beta.iter().map(|&b| i64::from(b)));
    for &a in &v.alpha {
        coords.extend(v.beta.iter().map(|&b| i64::from(a * b)));
    }
    EmbeddedVertex { m_a, m_b, coords }
}

/// Exact affine dimension of a set of integer points.
pub fn affine_dimension_exact(points: &[Vec<i64>]) -> Result<usize, FaceError> {
    if let Some(first) = points.first() {
        if points.iter().any(|p| p.len() != first.len()) {
            return Err(FaceError::InvalidDims("points differ in length".into()));
        }
    }
    affine_dimension(points).ok_or(FaceError::EmptyInput)
}

/// Upper bound `m + m(m−1)/2`, `m = min(m_a, m_b)`, on the face dimension of an
/// exhaustive game without quantum advantage.
pub fn no_advantage_dim_bound(m_a: usize, m_b: usize) -> usize {
    let m = m_a.min(m_b);
    m + m * (m.saturating_sub(1)) / 2
}

/// Codimension lower bounds for a game with `M_a × M_b` inputs whose
/// exhaustive reduction is `m_a × m_b` (oriented so `m_a ≤ m_b`):
/// `Δ ≥ m_b + M_a(m_b − m_a) + m_a(m_a+1)/2` in the full space and
/// `Δ₀ ≥ M_a(m_b − m_a) + m_a(m_a+1)/2` in correlation space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodimBound {
    pub full: usize,
    pub corr: usize,
}

pub fn reduced_codim_bound(
    big_m_a: usize,
    big_m_b: usize,
    m_a: usize,
    m_b: usize,
) -> Result<CodimBound, FaceError> {
    if m_a == 0 || m_b == 0 || m_a > big_m_a || m_b > big_m_b {
        return Err(FaceError::InvalidDims(format!(
            "reduced {m_a}x{m_b} does not fit in {big_m_a}x{big_m_b}"
        )));
    }
    if m_a > m_b {
        return Err(FaceError::InvalidDims(format!(
            "orient the game so that m_a <= m_b (got {m_a} > {m_b})"
        )));
    }
    let corr = big_m_a * (m_b - m_a) + m_a * (m_a + 1) / 2;
    Ok(CodimBound {
        full: m_b + corr,
        corr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrivialFacetReport {
    pub dim: usize,
    pub is_facet: bool,
    pub num_vertices: usize,
}

/// Dimension of the correlation face `c_{x0 y0} = sign` of the local
/// correlation polytope.
pub fn trivial_facet_check(
    m_a: usize,
    m_b: usize,
    x0: usize,
    y0: usize,
    sign: i8,
    cap: u64,
) -> Result<TrivialFacetReport, FaceError> {
    if m_a == 0 || m_b == 0 || x0 >= m_a || y0 >= m_b || (sign != 1 && sign != -1) {
        return Err(FaceError::InvalidDims(format!(
            "need x0 < {m_a}, y0 < {m_b} and sign = ±1"
        )));
    }
    let bits = m_a + m_b;
    let count: u128 = 1u128 << (bits - 1).min(127);
    if bits > 63 || count > u128::from(cap) {
        return Err(FaceError::TooLarge { count, cap });
    }
    let mut points = Vec::with_capacity(count as usize);
    for pa in 0u64..(1 << m_a) {
        let alpha: Vec<i64> = (0..m_a).map(|x| if pa >> x & 1 == 1 { -1 } else { 1 }).collect();
        for pb in 0u64..(1 << m_b) {
            let beta: Vec<i64> =
                (0..m_b).map(|y| if pb >> y & 1 == 1 { -1 } else { 1 }).collect();
            if alpha[x0] * beta[y0] != i64::from(sign) {
                continue;
            }
            points.push(
                alpha
                    .iter()
                    .flat_map(|&a| beta.iter().map(move |&b| a * b))
                    .collect::<Vec<_>>(),
            );
        }
    }
    let dim = affine_dimension_exact(&points)?;
    Ok(TrivialFacetReport {
        dim,
        is_facet: dim == m_a * m_b - 1,
        num_vertices: points.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Measured,
    /// Measured on a truncated vertex set.
    LowerBound,
    /// Derived from the reduced game through the codimension formula.
    BoundViaTheorem2,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Measured => "measured",
            Self::LowerBound => "lower bound (truncated vertex set)",
            Self::BoundViaTheorem2 => "bound via Theorem 2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceConfig {
    pub caps: EnumerationCaps,
    pub solver: SolverConfig,
    pub slack_tol: f64,
}

impl Default for FaceConfig {
    fn default() -> Self {
        Self {
            caps: EnumerationCaps::default(),
            solver: SolverConfig::default(),
            slack_tol: DEFAULT_SLACK_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceReport {
    /// Original input counts `(M_a, M_b)`.
    pub dims: (usize, usize),
    /// Input counts after dropping never-asked inputs.
    pub reduced_dims: (usize, usize),
    pub xi_c: Rational,
    pub xi_q: f64,
    pub classification: Classification,
    pub quantum: QuantumBiasResult,
    /// Optimal vertices of the original game (after lifting).
    pub num_vertices: usize,
    pub dim_full: usize,
    pub dim_corr: usize,
    pub codim_full: usize,
    pub codim_corr: usize,
    pub provenance: Provenance,
    /// `m + m(m−1)/2` for the reduced game.
    pub bound_thm1_dim: usize,
    pub bound_thm2_codim: CodimBound,
    pub is_facet_full: Option<bool>,
    pub is_facet_corr: Option<bool>,
    pub truncated: bool,
    /// `β = Fα` on the reduced game's vertices (no-advantage games only).
    pub f_relation: Option<FRelationReport>,
    /// Largest `‖(Γ − Φ̃)s‖_∞` over the reduced game's vertices.
    pub max_slackness_residual: Option<f64>,
    pub notes: Vec<String>,
}

impl FaceReport {
    /// Behaviour-space dimension `D` of the original game.
    pub fn ambient_dim(&self) -> usize {
        let (ma, mb) = self.dims;
        ma * mb + ma + mb
    }
}

/// All sign vectors of a given length, as a list.
fn sign_vectors(len: usize) -> Vec<Vec<i8>> {
    (0u64..(1 << len))
        .map(|p| (0..len).map(|i| if p >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Full pipeline: reduce, enumerate, lift, embed, measure, bound, certify.
pub fn face_report(game: &XorGame, cfg: &FaceConfig) -> Result<FaceReport, FaceError> {
    let (reduced, map) = game.reduce_exhaustive()?;
    let (big_a, big_b) = map.original_dims;
    let (ra, rb) = (reduced.m_a(), reduced.m_b());

    let vertex_set = optimal_vertices(&reduced, &cfg.caps)?;
    let xi_c = vertex_set.xi_c.clone();

    let quantum = solve_quantum_bias_with(&reduced, &cfg.solver, Some(to_f64(&xi_c)))?;
    let classification = quantum.classification;

    let (f_relation, max_slackness_residual) =
        if classification == Classification::NoAdvantage && !vertex_set.truncated {
            let f = extract_f(&quantum.cert, &reduced, cfg.solver.feas_tol)?;
            let relation = verify_f_relation(&vertex_set, &f, cfg.slack_tol)?;
            let slack = vertex_set
                .vertices
                .iter()
                .map(|v| slackness_residual_classical(&quantum.cert, &reduced, v))
                .fold(0.0, f64::max);
            (Some(relation), Some(slack))
        } else {
            (None, None)
        };

    let (small, large) = (ra.min(rb), ra.max(rb));
    let (big_small, big_large) = if ra <= rb { (big_a, big_b) } else { (big_b, big_a) };
    let bound_thm1_dim = no_advantage_dim_bound(ra, rb);
    let bound_thm2_codim = reduced_codim_bound(big_small, big_large, small, large)?;

    let ambient = big_a * big_b + big_a + big_b;
    let corr_ambient = big_a * big_b;
    let dropped_a = big_a - ra;
    let dropped_b = big_b - rb;
    let completions = 1u128 << (dropped_a + dropped_b).min(127);
    let lifted_count = vertex_set.vertices.len() as u128 * completions;

    let mut notes = Vec::new();
    let (num_vertices, dim_full, dim_corr, provenance) =
        if dropped_a + dropped_b < 64 && lifted_count <= cfg.caps.vertex_cap as u128 {
            let fills_a = sign_vectors(dropped_a);
            let fills_b = sign_vectors(dropped_b);
            let mut full = Vec::with_capacity(lifted_count as usize);
            for v in &vertex_set.vertices {
                for fa in &fills_a {
                    for fb in &fills_b {
                        full.push(embed_vertex(&map.lift(v, fa, fb)).coords);
                    }
                }
            }
            let corr: Vec<Vec<i64>> = full.iter().map(|p| p[big_a + big_b..].to_vec()).collect();
            let provenance = if vertex_set.truncated {
                Provenance::LowerBound
            } else {
                Provenance::Measured
            };
            (
                full.len(),
                affine_dimension_exact(&full)?,
                affine_dimension_exact(&corr)?,
                provenance,
            )
        } else if classification == Classification::NoAdvantage && !vertex_set.truncated {
            notes.push(format!(
                "lifting {lifted_count} vertices exceeds the vertex cap; dimensions are upper bounds from the reduced game"
            ));
            (
                usize::try_from(lifted_count).unwrap_or(usize::MAX),
                ambient - bound_thm2_codim.full,
                corr_ambient - bound_thm2_codim.corr,
                Provenance::BoundViaTheorem2,
            )
        } else {
            return Err(FaceError::TooLarge {
                count: lifted_count,
                cap: cfg.caps.vertex_cap as u64,
            });
        };

    let measured = provenance == Provenance::Measured;
    if big_a == big_b && big_a.is_power_of_two() && big_a >= 2 && measured {
        let n = big_a.trailing_zeros();
        if let Ok(c) = crate::nlc::corollary_bound(n) {
            if dim_full == c.dim_bound {
                notes.push(format!(
                    "attains the NLC dimension bound 2^n + 2^(n-1)(2^n - 1) = {} with equality (n = {n})",
                    c.dim_bound
                ));
            }
        }
    }
    if provenance == Provenance::LowerBound {
        notes.push("vertex set truncated: dimensions are lower bounds, facet verdicts suppressed".into());
    }

    Ok(FaceReport {
        dims: (big_a, big_b),
        reduced_dims: (ra, rb),
        xi_c,
        xi_q: quantum.xi_q,
        classification,
        num_vertices,
        dim_full,
        dim_corr,
        codim_full: ambient - dim_full,
        codim_corr: corr_ambient - dim_corr,
        provenance,
        bound_thm1_dim,
        bound_thm2_codim,
        is_facet_full: measured.then_some(dim_full + 1 == ambient),
        is_facet_corr: measured.then_some(dim_corr + 1 == corr_ambient),
        truncated: vertex_set.truncated,
        f_relation,
        max_slackness_residual,
        notes,
        quantum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub samples: usize,
    pub perturb_scale: f64,
    /// Singular values at or below `rank_tol·max(1, σ_max)` count as zero.
    pub rank_tol: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            samples: 24,
            perturb_scale: 0.5,
            rank_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumFaceProbe {
    /// Numerical rank of the sampled optimal correlator differences.
    pub dim_lower_bound: usize,
    /// `m(m−1)/2` with `m = min(m_a, m_b)`.
    pub thm3_bound: usize,
    pub samples_accepted: usize,
    pub singular_values: Vec<f64>,
}

/// Samples optimal quantum correlators and measures the dimension of their
/// affine span. Even samples are fresh random starts, odd samples perturb the
/// base optimum; a sample counts only if it reaches the certified optimum
/// within `gap_tol`. The result is a lower bound on the correlation-level
/// dimension of the optimal quantum face.
pub fn quantum_face_probe(
    game: &XorGame,
    probe: &ProbeConfig,
    solver_cfg: &SolverConfig,
) -> Result<QuantumFaceProbe, FaceError> {
    let (reduced, _) = game.reduce_exhaustive()?;
    let base = solve_quantum_bias(&reduced, solver_cfg)?;
    if base.classification != Classification::NoAdvantage {
        return Err(FaceError::NotApplicable(base.classification));
    }
    let m = reduced.m_a().min(reduced.m_b());
    let thm3_bound = m * (m - 1) / 2;
    let solver = Solver::new(&reduced, solver_cfg)?;
    let base_c = base.gram.c_block();
    let restarts = solver_cfg.restarts.max(1) as u64;

    let samples: Vec<Option<DMatrix<f64>>> = (0..probe.samples)
        .into_par_iter()
        .map(|k| {
            let stream = restarts + k as u64;
            let start = if k % 2 == 0 {
                solver.random_start(solver_cfg.seed, stream)
            } else {
                let noise = solver.random_start(solver_cfg.seed, stream);
                let mut perturbed = base.gram.clone();
                perturbed.vectors += noise.vectors * probe.perturb_scale;
                for i in 0..perturbed.vectors.nrows() {
                    let norm = perturbed.vectors.row(i).norm();
                    let row = perturbed.vectors.row(i) / norm;
                    perturbed.vectors.row_mut(i).copy_from(&row);
                }
                perturbed
            };
            let r = solver.optimize(start);
            let optimal = r.gap <= solver_cfg.gap_tol
                && (r.xi_q - base.xi_q).abs() <= solver_cfg.gap_tol;
            optimal.then(|| r.gram.c_block())
        })
        .collect();

    let diffs: Vec<DMatrix<f64>> = samples.into_iter().flatten().map(|c| c - &base_c).collect();
    let accepted = diffs.len();
    let (dim_lower_bound, singular_values) = if diffs.is_empty() {
        (0, Vec::new())
    } else {
        let cols = base_c.len();
        let stacked = DMatrix::from_fn(diffs.len(), cols, |i, j| diffs[i][j]);
        let sv: Vec<f64> = stacked.singular_values().iter().copied().collect();
        let sigma_max = sv.iter().copied().fold(0.0, f64::max);
        let threshold = probe.rank_tol * sigma_max.max(1.0);
        (sv.iter().filter(|&&s| s > threshold).count(), sv)
    };
    if dim_lower_bound > thm3_bound {
        return Err(FaceError::ProbeInconsistent {
            found: dim_lower_bound,
            bound: thm3_bound,
        });
    }
    Ok(QuantumFaceProbe {
        dim_lower_bound,
        thm3_bound,
        samples_accepted: accepted,
        singular_values,
    })
}
