//! Quantum bias of an XOR game as a unit-diagonal semidefinite program.
//!
//! Primal: maximize `tr(Q̃Φ̃)` over PSD `Q̃` with unit diagonal, where
//! `Φ̃ = ½[[0, Φ], [Φᵀ, 0]]`. Dual: minimize `Σ t_i` subject to
//! `diag(t) ⪰ Φ̃`.
//!
//! The primal is solved on the factorization `Q̃ = UUᵀ` with unit rows
//! `u_i` by block-coordinate ascent: each row update `u_i ← w_i/‖w_i‖` with
//! `w_i = Σ_j Φ̃_ij u_j` is the exact maximizer given the other rows. Since
//! `Φ̃` is bipartite, all of Alice's rows can be updated at once, then all of
//! Bob's. At a stationary point `Φ̃U = diag(t)U` with `t_i = ‖w_i‖`, which
//! is the dual candidate.
//!
//! The candidate is certified afterwards. If `diag(t) − Φ̃` has a negative
//! eigenvalue `λ_min`, every `t_i` is raised by `−λ_min`; the shifted vector
//! is dual feasible and its value `Σ t_i` is a rigorous upper bound. The
//! reported gap therefore includes the repair, and the unshifted eigenvalue
//! is kept as `raw_min_eig`.

use crate::classical::{classical_bias, EnumerationCaps};
use crate::game::{DeterministicStrategy, XorGame};
use crate::rational::to_f64;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

pub const MAX_SDP_SIZE: usize = 4096;

#[derive(Debug, Clone, Error)]
pub enum QsdpError {
    #[error("duality gap {:.3e} above tolerance after all restarts", best.gap)]
    NotConverged { best: Box<QuantumBiasResult> },
    #[error("dual candidate is infeasible: min eigenvalue {:.3e}", best.cert.min_eig)]
    DualInfeasible { best: Box<QuantumBiasResult> },
    #[error("some Bob multiplier is not positive ({value:.3e} at input {index}); game not exhaustive or certificate invalid")]
    SingularLambda { index: usize, value: f64 },
    #[error("check requires a no-advantage classification, got {0:?}")]
    NotApplicable(Classification),
    #[error("{m_a}+{m_b} inputs exceed the dense limit of {limit}")]
    TooLarge { m_a: usize, m_b: usize, limit: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

impl QsdpError {
    /// The best solver result carried by certification failures.
    pub fn best_result(&self) -> Option<&QuantumBiasResult> {
        match self {
            Self::NotConverged { best } | Self::DualInfeasible { best } => Some(best),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Factorization rank; `None` means full rank `m_a + m_b`.
    pub rank: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// Maximum number of Alice+Bob sweeps per restart.
    pub max_iters: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub adv_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rank: None,
            restarts: 8,
            seed: 0,
            max_iters: 200_000,
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            adv_tol: 1e-6,
        }
    }
}

pub const DEFAULT_SLACK_TOL: f64 = 1e-6;

/// `Φ̃ = ½[[0, Φ], [Φᵀ, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTilde {
    pub matrix: DMatrix<f64>,
}

pub fn build_phi_tilde(game: &XorGame) -> PhiTilde {
    let (ma, mb) = (game.m_a(), game.m_b());
    let phi = game.game_matrix();
    let mut matrix = DMatrix::zeros(ma + mb, ma + mb);
    for x in 0..ma {
        for y in 0..mb {
            let v = to_f64(phi.get(x, y)) / 2.0;
            matrix[(x, ma + y)] = v;
            matrix[(ma + y, x)] = v;
        }
    }
    PhiTilde { matrix }
}

/// Unit vectors `u_x` (Alice, rows `0..m_a`) and `v_y` (Bob, rows
/// `m_a..m_a+m_b`) whose inner products form `Q̃ = [[R, C], [Cᵀ, S]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSolution {
    pub m_a: usize,
    pub m_b: usize,
    pub vectors: DMatrix<f64>,
}

impl GramSolution {
    pub fn rank(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn alice(&self) -> DMatrix<f64> {
        self.vectors.rows(0, self.m_a).into_owned()
    }

    pub fn bob(&self) -> DMatrix<f64> {
        self.vectors.rows(self.m_a, self.m_b).into_owned()
    }

    pub fn gram(&self) -> DMatrix<f64> {
        &self.vectors * self.vectors.transpose()
    }

    pub fn r_block(&self) -> DMatrix<f64> {
        let a = self.alice();
        &a * a.transpose()
    }

    /// Quantum correlators `c_xy = ⟨u_x, v_y⟩`.
    pub fn c_block(&self) -> DMatrix<f64> {
        self.alice() * self.bob().transpose()
    }

    pub fn s_block(&self) -> DMatrix<f64> {
        let b = self.bob();
        &b * b.transpose()
    }

    /// `max_i |‖u_i‖ − 1|`.
    pub fn max_norm_error(&self) -> f64 {
        self.vectors
            .row_iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    /// Multipliers, Alice's first; already shifted to be feasible.
    pub t: Vec<f64>,
    /// `Σ = 2·diag(t_A)`.
    pub sigma: Vec<f64>,
    /// `Λ = 2·diag(t_B)`.
    pub lambda_diag: Vec<f64>,
    /// Smallest eigenvalue of `diag(t) − Φ̃` for the reported `t`.
    pub min_eig: f64,
    /// Smallest eigenvalue before the feasibility shift.
    pub raw_min_eig: f64,
    /// Amount added to every `t_i`.
    pub shift: f64,
    pub dual_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Advantage,
    NoAdvantage,
    Undecided,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Advantage => "advantage",
            Self::NoAdvantage => "no_advantage",
            Self::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBiasResult {
    pub xi_q: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub gram: GramSolution,
    pub cert: DualCertificate,
    pub classification: Classification,
    /// Classical bias used for the classification, if it was computable.
    pub xi_c: Option<f64>,
    /// Index of the restart that produced this result.
    pub restart: usize,
    pub sweeps: usize,
    /// Row updates skipped because `w_i = 0`.
    pub stalls: usize,
}

impl QuantumBiasResult {
    pub fn is_certified(&self, cfg: &SolverConfig) -> bool {
        self.gap.is_finite() && self.gap <= cfg.gap_tol && self.cert.min_eig >= -cfg.feas_tol
    }
}

/// Smallest eigenvalue of a symmetric matrix (Householder tridiagonalization
/// followed by implicit symmetric QR).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Block-coordinate ascent on one game; shared by the bias solver and the
/// face probe.
pub struct Solver {
    m_a: usize,
    m_b: usize,
    rank: usize,
    phi: DMatrix<f64>,
    phi_tilde: DMatrix<f64>,
    max_iters: usize,
}

/// Stop once the alignment gap `Σ‖w_i‖(1 − cos∠(u_i, w_i))` is this small;
/// the dual residual scales with its square root.
const ALIGNMENT_TARGET: f64 = 1e-24;
/// Sweeps without a new best alignment gap before giving up.
const STAGNATION_SWEEPS: usize = 5_000;

impl Solver {
    pub fn new(game: &XorGame, cfg: &SolverConfig) -> Result<Self, QsdpError> {
        let (m_a, m_b) = (game.m_a(), game.m_b());
        if m_a + m_b > MAX_SDP_SIZE {
            return Err(QsdpError::TooLarge {
                m_a,
                m_b,
                limit: MAX_SDP_SIZE,
            });
        }
        let phi_exact = game.game_matrix().to_f64();
        let phi = DMatrix::from_row_slice(m_a, m_b, &phi_exact);
        Ok(Self {
            m_a,
            m_b,
            rank: cfg.rank.unwrap_or(m_a + m_b).max(1),
            phi,
            phi_tilde: build_phi_tilde(game).matrix,
            max_iters: cfg.max_iters,
        })
    }

    /// Seeded random unit vectors; restart `k` uses stream `k` of the seed.
    pub fn random_start(&self, seed: u64, stream: u64) -> GramSolution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let n = self.m_a + self.m_b;
        let mut vectors = DMatrix::from_fn(n, self.rank, |_, _| {
            <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
        });
        normalize_rows(&mut vectors, None);
        GramSolution {
            m_a: self.m_a,
            m_b: self.m_b,
            vectors,
        }
    }

    /// Runs the ascent from `start` and certifies the end point.
    pub fn optimize(&self, start: GramSolution) -> QuantumBiasResult {
        let mut u = start.alice();
        let mut v = start.bob();
        let mut stalls = 0;
        let mut best_alignment = f64::INFINITY;
        let mut last_improvement = 0;
        let mut sweeps = 0;
        while sweeps < self.max_iters {
            let w_a = (&self.phi * &v) * 0.5;
            let alignment = alignment_gap(&u, &w_a);
            if alignment <= ALIGNMENT_TARGET {
                break;
            }
            if alignment < best_alignment * 0.999 {
                best_alignment = alignment;
                last_improvement = sweeps;
            } else if sweeps - last_improvement > STAGNATION_SWEEPS {
                break;
            }
            #[cfg(debug_assertions)]
            let before = objective(&u, &w_a);
            u = w_a;
            stalls += normalize_rows(&mut u, Some(&start.alice()));
            let mut w_b = (self.phi.transpose() * &u) * 0.5;
            #[cfg(debug_assertions)]
            let previous_v = v.clone();
            stalls += normalize_rows(&mut w_b, Some(&start.bob()));
            v = w_b;
            #[cfg(debug_assertions)]
            {
                let after = objective(&v, &((self.phi.transpose() * &u) * 0.5));
                let mid = objective(&previous_v, &((self.phi.transpose() * &u) * 0.5));
                debug_assert!(mid >= before - 1e-12, "Alice update decreased the objective");
                debug_assert!(after >= mid - 1e-12, "Bob update decreased the objective");
            }
            sweeps += 1;
        }
        let mut vectors = DMatrix::zeros(self.m_a + self.m_b, self.rank);
        vectors.rows_mut(0, self.m_a).copy_from(&u);
        vectors.rows_mut(self.m_a, self.m_b).copy_from(&v);
        let gram = GramSolution {
            m_a: self.m_a,
            m_b: self.m_b,
            vectors,
        };
        let (xi_q, cert) = self.certify(&gram);
        QuantumBiasResult {
            xi_q,
            dual_value: cert.dual_value,
            gap: cert.dual_value - xi_q,
            gram,
            cert,
            classification: Classification::Undecided,
            xi_c: None,
            restart: 0,
            sweeps,
            stalls,
        }
    }

    /// Primal value and shifted stationarity multipliers for a Gram factor.
    pub fn certify(&self, gram: &GramSolution) -> (f64, DualCertificate) {
        let w = &self.phi_tilde * &gram.vectors;
        let n = self.m_a + self.m_b;
        let primal: f64 = (0..n).map(|i| gram.vectors.row(i).dot(&w.row(i))).sum();
        let mut t: Vec<f64> = w.row_iter().map(|r| r.norm()).collect();
        let mut slack = DMatrix::from_diagonal(&DVector::from_vec(t.clone())) - &self.phi_tilde;
        let raw_min_eig = min_eigenvalue(&slack);
        let shift = if raw_min_eig < 0.0 { -raw_min_eig } else { 0.0 };
        if shift > 0.0 {
            t.iter_mut().for_each(|ti| *ti += shift);
            for i in 0..n {
                slack[(i, i)] += shift;
            }
        }
        let min_eig = if shift > 0.0 {
            min_eigenvalue(&slack)
        } else {
            raw_min_eig
        };
        let dual_value = t.iter().sum();
        let cert = DualCertificate {
            sigma: t[..self.m_a].iter().map(|v| 2.0 * v).collect(),
            lambda_diag: t[self.m_a..].iter().map(|v| 2.0 * v).collect(),
            t,
            min_eig,
            raw_min_eig,
            shift,
            dual_value,
        };
        (primal, cert)
    }
}

fn objective(rows: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    rows.row_iter().zip(w.row_iter()).map(|(a, b)| a.dot(&b)).sum()
}

/// `Σ_i ‖w_i‖ − ⟨u_i, w_i⟩`, evaluated as `Σ ‖w_i‖·½‖u_i − ŵ_i‖²` to avoid
/// cancellation.
fn alignment_gap(u: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    u.row_iter()
        .zip(w.row_iter())
        .map(|(ui, wi)| {
            let norm = wi.norm();
            if norm == 0.0 {
                0.0
            } else {
                let diff = ui - wi / norm;
                0.5 * norm * diff.norm_squared()
            }
        })
        .sum()
}

/// Normalizes every row; zero rows are restored from `fallback` (or left at
/// zero). Returns the number of zero rows.
fn normalize_rows(m: &mut DMatrix<f64>, fallback: Option<&DMatrix<f64>>) -> usize {
    let mut zero_rows = 0;
    for i in 0..m.nrows() {
        let norm = m.row(i).norm();
        if norm > 0.0 {
            let scaled = m.row(i) / norm;
            m.row_mut(i).copy_from(&scaled);
        } else {
            zero_rows += 1;
            if let Some(f) = fallback {
                m.row_mut(i).copy_from(&f.row(i));
            }
        }
    }
    zero_rows
}

/// Picks the best restart: certified results first, then the larger primal
/// value, then the lower restart index. Uncertified results are ranked by gap.
fn better(a: &QuantumBiasResult, b: &QuantumBiasResult, cfg: &SolverConfig) -> bool {
    match (a.is_certified(cfg), b.is_certified(cfg)) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.xi_q > b.xi_q || (a.xi_q == b.xi_q && a.restart < b.restart),
        (false, false) => {
            a.gap < b.gap || (a.gap == b.gap && a.restart < b.restart) || b.gap.is_nan()
        }
    }
}

fn classify(result: &QuantumBiasResult, cfg: &SolverConfig) -> Classification {
    match result.xi_c {
        Some(xi_c) if result.is_certified(cfg) => {
            let diff = result.xi_q - xi_c;
            if diff > cfg.adv_tol {
                Classification::Advantage
            } else if diff.abs() <= cfg.adv_tol {
                Classification::NoAdvantage
            } else {
                Classification::Undecided
            }
        }
        _ => Classification::Undecided,
    }
}

/// Solves the SDP, computing the classical bias for the classification when
/// the smaller side can be enumerated with default caps.
pub fn solve_quantum_bias(
    game: &XorGame,
    cfg: &SolverConfig,
) -> Result<QuantumBiasResult, QsdpError> {
    let xi_c = classical_bias(game, &EnumerationCaps::default())
        .ok()
        .map(|r| to_f64(&r.xi_c));
    solve_quantum_bias_with(game, cfg, xi_c)
}

/// Solves the SDP with a caller-supplied classical bias (or none).
///
/// All restarts run; each is single-threaded and seeded independently, and
/// the winner is chosen by [`better`], so the outcome does not depend on the
/// thread count.
pub fn solve_quantum_bias_with(
    game: &XorGame,
    cfg: &SolverConfig,
    xi_c: Option<f64>,
) -> Result<QuantumBiasResult, QsdpError> {
    let solver = Solver::new(game, cfg)?;
    let restarts = cfg.restarts.max(1);
    let results: Vec<QuantumBiasResult> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = solver.optimize(solver.random_start(cfg.seed, k as u64));
            r.restart = k;
            r.xi_c = xi_c;
            r
        })
        .collect();
    let mut best = results
        .into_iter()
        .reduce(|a, b| if better(&b, &a, cfg) { b } else { a })
        .expect("at least one restart");
    best.classification = classify(&best, cfg);
    if !best.cert.min_eig.is_finite() || best.cert.min_eig < -cfg.feas_tol {
        return Err(QsdpError::DualInfeasible {
            best: Box::new(best),
        });
    }
    if !best.is_certified(cfg) {
        return Err(QsdpError::NotConverged {
            best: Box::new(best),
        });
    }
    Ok(best)
}

/// `F = Λ⁻¹Φᵀ`, i.e. `F_yx = Φ_xy / (2 t_{m_a+y})`, shape `m_b × m_a`.
pub fn extract_f(
    cert: &DualCertificate,
    game: &XorGame,
    feas_tol: f64,
) -> Result<DMatrix<f64>, QsdpError> {
    let (ma, mb) = (game.m_a(), game.m_b());
    if cert.t.len() != ma + mb {
        return Err(QsdpError::ShapeMismatch(format!(
            "certificate has {} multipliers, game needs {}",
            cert.t.len(),
            ma + mb
        )));
    }
    if let Some(y) = (0..mb).find(|&y| cert.t[ma + y] <= feas_tol) {
        return Err(QsdpError::SingularLambda {
            index: y,
            value: cert.t[ma + y],
        });
    }
    let phi = game.game_matrix();
    Ok(DMatrix::from_fn(mb, ma, |y, x| {
        to_f64(phi.get(x, y)) / (2.0 * cert.t[ma + y])
    }))
}

/// `‖(Γ − Φ̃)s‖_∞` with `s = α ⊕ β` and `Γ = diag(t)`.
pub fn slackness_residual_classical(
    cert: &DualCertificate,
    game: &XorGame,
    strategy: &DeterministicStrategy,
) -> f64 {
    let phi_tilde = build_phi_tilde(game).matrix;
    let s = DVector::from_iterator(
        strategy.alpha.len() + strategy.beta.len(),
        strategy
            .alpha
            .iter()
            .chain(&strategy.beta)
            .map(|&v| f64::from(v)),
    );
    let gamma = DMatrix::from_diagonal(&DVector::from_vec(cert.t.clone()));
    ((gamma - phi_tilde) * s).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumSlacknessReport {
    pub max_residual: f64,
    pub pass: bool,
}

/// `max_y ‖v_y − Σ_x F_yx u_x‖₂` on the Gram factor.
pub fn quantum_slackness_check(
    result: &QuantumBiasResult,
    f: &DMatrix<f64>,
    tol: f64,
) -> Result<QuantumSlacknessReport, QsdpError> {
    if result.classification != Classification::NoAdvantage {
        return Err(QsdpError::NotApplicable(result.classification));
    }
    let (u, v) = (result.gram.alice(), result.gram.bob());
    if f.nrows() != v.nrows() || f.ncols() != u.nrows() {
        return Err(QsdpError::ShapeMismatch(format!(
            "F is {}x{}, expected {}x{}",
            f.nrows(),
            f.ncols(),
            v.nrows(),
            u.nrows()
        )));
    }
    let residual = v - f * u;
    let max_residual = residual
        .row_iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    Ok(QuantumSlacknessReport {
        max_residual,
        pass: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{make_named, NamedGame};

    const SQRT2_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn phi_tilde_blocks() {
        let single = build_phi_tilde(&make_named(NamedGame::SingleEntry).unwrap());
        assert_eq!(single.matrix, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));

        let chsh = build_phi_tilde(&make_named(NamedGame::Chsh).unwrap()).matrix;
        assert_eq!(chsh.view((0, 2), (2, 2)), DMatrix::from_row_slice(2, 2, &[0.125, 0.125, 0.125, -0.125]));
        assert_eq!(chsh, chsh.transpose());
        assert_eq!(chsh.view((0, 0), (2, 2)), DMatrix::<f64>::zeros(2, 2));

        let id1 = build_phi_tilde(&make_named(NamedGame::Identity(1)).unwrap()).matrix;
        let mut eig: Vec<f64> = id1.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([-0.25, -0.25, 0.25, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn chsh_tsirelson() {
        let g = make_named(NamedGame::Chsh).unwrap();
        let res = solve_quantum_bias(&g, &SolverConfig::default()).unwrap();
        assert!((res.xi_q - SQRT2_2).abs() < 1e-6, "{}", res.xi_q);
        assert!(res.gap <= 1e-7 && res.gap >= 0.0);
        assert!(res.cert.min_eig >= -1e-8);
        assert_eq!(res.classification, Classification::Advantage);
        for t in &res.cert.t {
            assert!((t - 2f64.sqrt() / 8.0).abs() < 1e-6);
        }
        assert!(res.gram.max_norm_error() <= 1e-12);
    }

    #[test]
    fn analytic_chsh_dual_is_feasible_and_tight() {
        // diag(√2/8) − Φ̃ has smallest eigenvalue 0 since ‖Φ̃‖ = √2/8.
        let phi_tilde = build_phi_tilde(&make_named(NamedGame::Chsh).unwrap()).matrix;
        let t = 2f64.sqrt() / 8.0;
        let slack = DMatrix::from_diagonal_element(4, 4, t) - phi_tilde;
        assert!(min_eigenvalue(&slack).abs() < 1e-15);
    }

    #[test]
    fn identity_games_have_no_advantage() {
        for n in 1..=3 {
            let g = make_named(NamedGame::Identity(n)).unwrap();
            let res = solve_quantum_bias(&g, &SolverConfig::default()).unwrap();
            assert!((res.xi_q - 1.0).abs() <= 1e-8);
            assert!(res.gap <= 1e-8);
            assert_eq!(res.classification, Classification::NoAdvantage);
            let f = extract_f(&res.cert, &g, 1e-8).unwrap();
            assert!((f - DMatrix::identity(1 << n, 1 << n)).amax() < 1e-8);
        }
    }

    #[test]
    fn nlc_and_has_no_advantage() {
        let g = make_named(NamedGame::NlcAnd(2)).unwrap();
        let res = solve_quantum_bias(&g, &SolverConfig::default()).unwrap();
        assert!((res.xi_q - 0.5).abs() <= 1e-6);
        assert_eq!(res.classification, Classification::NoAdvantage);
        let f = extract_f(&res.cert, &g, 1e-8).unwrap();
        let report = quantum_slackness_check(&res, &f, 1e-5).unwrap();
        assert!(report.pass, "{}", report.max_residual);
    }

    #[test]
    fn appendix_d_f_matrix() {
        let g = make_named(NamedGame::AppendixD(2)).unwrap();
        let res = solve_quantum_bias(&g, &SolverConfig::default()).unwrap();
        let f = extract_f(&res.cert, &g, 1e-8).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.5 } else { -0.5 });
        assert!((f - expected).amax() < 1e-6);
    }

    #[test]
    fn single_entry_f_matches_predicate() {
        for bit in [0u8, 1] {
            let g = XorGame::new(vec![vec![crate::rational::ratio(1, 1)]], vec![vec![bit]]).unwrap();
            let res = solve_quantum_bias(&g, &SolverConfig::default()).unwrap();
            let f = extract_f(&res.cert, &g, 1e-8).unwrap();
            let sign = if bit == 0 { 1.0 } else { -1.0 };
            assert!((f[(0, 0)] - sign).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_slackness() {
        let id = make_named(NamedGame::Identity(1)).unwrap();
        let res = solve_quantum_bias(&id, &SolverConfig::default()).unwrap();
        let perfect = DeterministicStrategy::new(vec![1, 1], vec![1, 1]).unwrap();
        assert!(slackness_residual_classical(&res.cert, &id, &perfect) <= 1e-8);

        let chsh = make_named(NamedGame::Chsh).unwrap();
        let res = solve_quantum_bias(&chsh, &SolverConfig::default()).unwrap();
        let vs = crate::classical::optimal_vertices(&chsh, &EnumerationCaps::default()).unwrap();
        for v in &vs.vertices {
            assert!(slackness_residual_classical(&res.cert, &chsh, v) >= 0.05);
        }
        assert!(matches!(
            quantum_slackness_check(&res, &DMatrix::identity(2, 2), 1e-5),
            Err(QsdpError::NotApplicable(Classification::Advantage))
        ));
    }

    #[test]
    fn singular_lambda_is_reported() {
        let cert = DualCertificate {
            t: vec![0.5, 0.0],
            sigma: vec![1.0],
            lambda_diag: vec![0.0],
            min_eig: 0.0,
            raw_min_eig: 0.0,
            shift: 0.0,
            dual_value: 0.5,
        };
        let g = make_named(NamedGame::SingleEntry).unwrap();
        assert!(matches!(
            extract_f(&cert, &g, 1e-8),
            Err(QsdpError::SingularLambda { index: 0, .. })
        ));
    }

    #[test]
    fn deterministic_for_equal_seeds() {
        let g = make_named(NamedGame::Chsh).unwrap();
        let cfg = SolverConfig {
            seed: 42,
            ..SolverConfig::default()
        };
        let a = solve_quantum_bias(&g, &cfg).unwrap();
        let b = solve_quantum_bias(&g, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn starved_solver_reports_not_converged() {
        let g = make_named(NamedGame::Chsh).unwrap();
        let cfg = SolverConfig {
            max_iters: 0,
            restarts: 1,
            ..SolverConfig::default()
        };
        let err = solve_quantum_bias(&g, &cfg).unwrap_err();
        let best = err.best_result().expect("carries the best attempt");
        assert_eq!(best.classification, Classification::Undecided);
        assert!(matches!(err, QsdpError::NotConverged { .. }));
    }
}
