//! Two-player XOR games, their game matrices, strategies and behaviours.
//!
//! A game is a prior `q(x, y)` over question pairs together with a predicate
//! `f(x, y)`; the players win when their answer bits satisfy `a ⊕ b = f(x, y)`.
//! Everything downstream consumes the game matrix
//! `Φ_xy = (−1)^{f(x,y)} q(x, y)`, whose entries have absolute values summing
//! to one.
//!
//! Matrices are stored row-major with Alice's input as the row index.

use crate::rational::{abs_sum, ratio, Rational};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("prior entry q[{x}][{y}] is negative")]
    NegativePrior { x: usize, y: usize },
    #[error("prior sums to {0}, expected exactly 1")]
    NotNormalized(String),
    #[error("predicate entry f[{x}][{y}] = {value} is not a bit")]
    InvalidPredicate { x: usize, y: usize, value: u8 },
    #[error("game has no question pair with positive probability")]
    EmptyGame,
    #[error("unknown game name `{0}`")]
    UnknownName(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A validated XOR game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorGame {
    m_a: usize,
    m_b: usize,
    q: Vec<Rational>,
    f: Vec<bool>,
}

impl XorGame {
    /// Validates and builds a game. The prior must already sum to one; it is
    /// never rescaled.
    pub fn new(q: Vec<Vec<Rational>>, f: Vec<Vec<u8>>) -> Result<Self, GameError> {
        let m_a = q.len();
        if m_a == 0 {
            return Err(GameError::ShapeMismatch("prior has no rows".into()));
        }
        let m_b = q[0].len();
        if m_b == 0 {
            return Err(GameError::ShapeMismatch("prior has no columns".into()));
        }
        if q.iter().any(|row| row.len() != m_b) {
            return Err(GameError::ShapeMismatch("prior rows differ in length".into()));
        }
        if f.len() != m_a || f.iter().any(|row| row.len() != m_b) {
            return Err(GameError::ShapeMismatch(format!(
                "predicate must be {m_a}x{m_b} like the prior"
            )));
        }
        for (x, row) in q.iter().enumerate() {
            if let Some(y) = row.iter().position(|v| v.is_negative()) {
                return Err(GameError::NegativePrior { x, y });
            }
        }
        let mut bits = Vec::with_capacity(m_a * m_b);
        for (x, row) in f.iter().enumerate() {
            for (y, &value) in row.iter().enumerate() {
                match value {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => return Err(GameError::InvalidPredicate { x, y, value }),
                }
            }
        }
        let q: Vec<Rational> = q.into_iter().flatten().collect();
        let total = q.iter().fold(Rational::zero(), |acc, v| acc + v);
        if !total.is_one() {
            return Err(GameError::NotNormalized(crate::rational::format_rational(&total)));
        }
        Ok(Self { m_a, m_b, q, f: bits })
    }

    /// Builds a game directly from flat row-major data.
    pub fn from_flat(
        m_a: usize,
        m_b: usize,
        q: Vec<Rational>,
        f: Vec<bool>,
    ) -> Result<Self, GameError> {
        if q.len() != m_a * m_b || f.len() != m_a * m_b {
            return Err(GameError::ShapeMismatch(format!(
                "expected {} entries for a {m_a}x{m_b} game",
                m_a * m_b
            )));
        }
        let rows_q = q.chunks(m_b.max(1)).map(<[_]>::to_vec).collect();
        let rows_f = f
            .chunks(m_b.max(1))
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect();
        Self::new(rows_q, rows_f)
    }

    pub fn m_a(&self) -> usize {
        self.m_a
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn q(&self, x: usize, y: usize) -> &Rational {
        &self.q[x * self.m_b + y]
    }

    pub fn f(&self, x: usize, y: usize) -> bool {
        self.f[x * self.m_b + y]
    }

    pub fn prior(&self) -> &[Rational] {
        &self.q
    }

    pub fn predicate(&self) -> &[bool] {
        &self.f
    }

    pub fn game_matrix(&self) -> GameMatrix {
        let phi = self
            .q
            .iter()
            .zip(&self.f)
            .map(|(q, &f)| if f { -q.clone() } else { q.clone() })
            .collect();
        GameMatrix {
            m_a: self.m_a,
            m_b: self.m_b,
            phi,
        }
    }

    /// The same game with the roles of Alice and Bob exchanged.
    pub fn transpose(&self) -> Self {
        let mut q = Vec::with_capacity(self.q.len());
        let mut f = Vec::with_capacity(self.f.len());
        for y in 0..self.m_b {
            for x in 0..self.m_a {
                q.push(self.q(x, y).clone());
                f.push(self.f(x, y));
            }
        }
        Self {
            m_a: self.m_b,
            m_b: self.m_a,
            q,
            f,
        }
    }

    fn row_has_mass(&self, x: usize) -> bool {
        (0..self.m_b).any(|y| !self.q(x, y).is_zero())
    }

    fn col_has_mass(&self, y: usize) -> bool {
        (0..self.m_a).any(|x| !self.q(x, y).is_zero())
    }

    /// True when every input of both players is asked with positive probability.
    pub fn is_exhaustive(&self) -> bool {
        (0..self.m_a).all(|x| self.row_has_mass(x)) && (0..self.m_b).all(|y| self.col_has_mass(y))
    }

    /// Drops the inputs that are never asked.
    pub fn reduce_exhaustive(&self) -> Result<(XorGame, ReductionMap), GameError> {
        let kept_rows: Vec<usize> = (0..self.m_a).filter(|&x| self.row_has_mass(x)).collect();
        let kept_cols: Vec<usize> = (0..self.m_b).filter(|&y| self.col_has_mass(y)).collect();
        if kept_rows.is_empty() || kept_cols.is_empty() {
            return Err(GameError::EmptyGame);
        }
        let mut q = Vec::with_capacity(kept_rows.len() * kept_cols.len());
        let mut f = Vec::with_capacity(q.capacity());
        for &x in &kept_rows {
            for &y in &kept_cols {
                q.push(self.q(x, y).clone());
                f.push(self.f(x, y));
            }
        }
        let reduced = XorGame {
            m_a: kept_rows.len(),
            m_b: kept_cols.len(),
            q,
            f,
        };
        let map = ReductionMap {
            kept_rows,
            kept_cols,
            original_dims: (self.m_a, self.m_b),
        };
        Ok((reduced, map))
    }

    /// The perfect no-signalling behaviour: uniformly random local bits with
    /// `a ⊕ b = f(x, y)` always.
    pub fn ns_perfect_behaviour(&self) -> Behaviour {
        Behaviour {
            m_a: self.m_a,
            m_b: self.m_b,
            alpha: vec![0.0; self.m_a],
            beta: vec![0.0; self.m_b],
            c: self.f.iter().map(|&f| if f { -1.0 } else { 1.0 }).collect(),
        }
    }

    /// Bias `ξ = Σ Φ_xy c_xy`; the winning probability is `(1 + ξ)/2`.
    pub fn bias_of_behaviour(&self, behaviour: &Behaviour) -> Result<f64, GameError> {
        if behaviour.m_a != self.m_a || behaviour.m_b != self.m_b {
            return Err(GameError::ShapeMismatch(format!(
                "behaviour is {}x{}, game is {}x{}",
                behaviour.m_a, behaviour.m_b, self.m_a, self.m_b
            )));
        }
        let phi = self.game_matrix().to_f64();
        Ok(phi.iter().zip(&behaviour.c).map(|(p, c)| p * c).sum())
    }
}

/// `Φ_xy = (−1)^{f(x,y)} q(x, y)`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameMatrix {
    pub m_a: usize,
    pub m_b: usize,
    pub phi: Vec<Rational>,
}

impl GameMatrix {
    pub fn get(&self, x: usize, y: usize) -> &Rational {
        &self.phi[x * self.m_b + y]
    }

    pub fn abs_sum(&self) -> Rational {
        abs_sum(&self.phi)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.phi.iter().map(crate::rational::to_f64).collect()
    }

    /// `⟨α|Φ|β⟩` in exact arithmetic.
    pub fn bias(&self, strategy: &DeterministicStrategy) -> Rational {
        let mut total = Rational::zero();
        for (x, &a) in strategy.alpha.iter().enumerate() {
            for (y, &b) in strategy.beta.iter().enumerate() {
                let v = self.get(x, y);
                if a * b > 0 {
                    total += v;
                } else {
                    total -= v;
                }
            }
        }
        total
    }
}

/// A deterministic local strategy: `α_x, β_y ∈ {−1, +1}` are the players'
/// outputs `(−1)^a`, `(−1)^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub alpha: Vec<i8>,
    pub beta: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn new(alpha: Vec<i8>, beta: Vec<i8>) -> Result<Self, GameError> {
        if alpha.iter().chain(&beta).any(|&s| s != 1 && s != -1) {
            return Err(GameError::InvalidParameter(
                "strategy entries must be +1 or -1".into(),
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn negated(&self) -> Self {
        Self {
            alpha: self.alpha.iter().map(|s| -s).collect(),
            beta: self.beta.iter().map(|s| -s).collect(),
        }
    }

    /// The behaviour `(α, β, αβᵀ)` induced by the strategy.
    pub fn behaviour(&self) -> Behaviour {
        let c = self
            .alpha
            .iter()
            .flat_map(|&a| self.beta.iter().map(move |&b| f64::from(a * b)))
            .collect();
        Behaviour {
            m_a: self.alpha.len(),
            m_b: self.beta.len(),
            alpha: self.alpha.iter().map(|&a| f64::from(a)).collect(),
            beta: self.beta.iter().map(|&b| f64::from(b)).collect(),
            c,
        }
    }
}

/// A correlation-form behaviour `(α, β, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behaviour {
    pub m_a: usize,
    pub m_b: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Row-major `m_a × m_b` correlators.
    pub c: Vec<f64>,
}

impl Behaviour {
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.c[x * self.m_b + y]
    }

    /// `p(a, b | x, y)` indexed `[a][b]`, from
    /// `4p = 1 + (−1)^a α_x + (−1)^b β_y + (−1)^{a+b} c_xy`.
    pub fn probabilities(&self, x: usize, y: usize) -> [[f64; 2]; 2] {
        let mut p = [[0.0; 2]; 2];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let sa = if a == 0 { 1.0 } else { -1.0 };
                let sb = if b == 0 { 1.0 } else { -1.0 };
                *entry = (1.0 + sa * self.alpha[x] + sb * self.beta[y]
                    + sa * sb * self.correlator(x, y))
                    / 4.0;
            }
        }
        p
    }

    /// Largest violation of the two no-signalling marginal conditions:
    /// Alice's marginal must not depend on `y`, Bob's not on `x`.
    pub fn no_signalling_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..self.m_a {
            let base = self.probabilities(x, 0);
            for y in 1..self.m_b {
                let p = self.probabilities(x, y);
                for a in 0..2 {
                    let d = (p[a][0] + p[a][1]) - (base[a][0] + base[a][1]);
                    worst = worst.max(d.abs());
                }
            }
        }
        for y in 0..self.m_b {
            let base = self.probabilities(0, y);
            for x in 1..self.m_a {
                let p = self.probabilities(x, y);
                for b in 0..2 {
                    let d = (p[0][b] + p[1][b]) - (base[0][b] + base[1][b]);
                    worst = worst.max(d.abs());
                }
            }
        }
        worst
    }

    /// True when every reconstructed probability is nonnegative and each
    /// `(x, y)` table sums to one (within `tol`).
    pub fn is_physical(&self, tol: f64) -> bool {
        (0..self.m_a).all(|x| {
            (0..self.m_b).all(|y| {
                let p = self.probabilities(x, y);
                let sum: f64 = p.iter().flatten().sum();
                p.iter().flatten().all(|&v| v >= -tol) && (sum - 1.0).abs() <= tol
            })
        })
    }
}

/// Records which inputs survived [`XorGame::reduce_exhaustive`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    pub kept_rows: Vec<usize>,
    pub kept_cols: Vec<usize>,
    pub original_dims: (usize, usize),
}

impl ReductionMap {
    pub fn is_identity(&self) -> bool {
        self.kept_rows.len() == self.original_dims.0 && self.kept_cols.len() == self.original_dims.1
    }

    pub fn dropped_rows(&self) -> Vec<usize> {
        (0..self.original_dims.0)
            .filter(|x| !self.kept_rows.contains(x))
            .collect()
    }

    pub fn dropped_cols(&self) -> Vec<usize> {
        (0..self.original_dims.1)
            .filter(|y| !self.kept_cols.contains(y))
            .collect()
    }

    /// Lifts a strategy of the reduced game to the original index set, filling
    /// the dropped inputs from `fill_a` and `fill_b` (in increasing index order).
    pub fn lift(
        &self,
        reduced: &DeterministicStrategy,
        fill_a: &[i8],
        fill_b: &[i8],
    ) -> DeterministicStrategy {
        fn scatter(kept: &[usize], total: usize, values: &[i8], fill: &[i8]) -> Vec<i8> {
            let mut out = Vec::with_capacity(total);
            let (mut k, mut d) = (0, 0);
            for i in 0..total {
                if k < kept.len() && kept[k] == i {
                    out.push(values[k]);
                    k += 1;
                } else {
                    out.push(fill[d]);
                    d += 1;
                }
            }
            out
        }
        DeterministicStrategy {
            alpha: scatter(&self.kept_rows, self.original_dims.0, &reduced.alpha, fill_a),
            beta: scatter(&self.kept_cols, self.original_dims.1, &reduced.beta, fill_b),
        }
    }
}

/// Built-in game families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGame {
    Chsh,
    /// `Φ = 2⁻ⁿ·I` on `2ⁿ × 2ⁿ`: Bob receives Alice's question and they must agree.
    Identity(u32),
    /// Non-local AND of `n` bits with a uniform distribution over `z`.
    NlcAnd(u32),
    /// `Φ = λ(I − 2^{1−n}J)`, `λ = 1/(3·2ⁿ − 4)`.
    AppendixD(u32),
    SingleEntry,
}

impl NamedGame {
    /// Parses CLI-style names (`chsh`, `identity`, `nlc-and`, `appendixd`,
    /// `single-entry`); `n` is required by the parametrized families.
    pub fn parse(name: &str, n: Option<u32>) -> Result<Self, GameError> {
        let need_n = || n.ok_or_else(|| GameError::InvalidParameter(format!("`{name}` needs n")));
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "chsh" => Ok(Self::Chsh),
            "identity" => Ok(Self::Identity(need_n()?)),
            "nlc-and" | "and" => Ok(Self::NlcAnd(need_n()?)),
            "appendixd" | "appendix-d" => Ok(Self::AppendixD(need_n()?)),
            "single-entry" | "single" => Ok(Self::SingleEntry),
            _ => Err(GameError::UnknownName(name.to_string())),
        }
    }

    pub fn build(self) -> Result<XorGame, GameError> {
        match self {
            Self::Chsh => {
                let quarter = ratio(1, 4);
                XorGame::new(
                    vec![vec![quarter.clone(); 2], vec![quarter.clone(); 2]],
                    vec![vec![0, 0], vec![0, 1]],
                )
            }
            Self::SingleEntry => XorGame::new(vec![vec![Rational::one()]], vec![vec![0]]),
            Self::Identity(n) => {
                let size = family_size(n, 1)?;
                let weight = ratio(1, size as i64);
                let q = (0..size)
                    .map(|x| {
                        (0..size)
                            .map(|y| if x == y { weight.clone() } else { Rational::zero() })
                            .collect()
                    })
                    .collect();
                XorGame::new(q, vec![vec![0; size]; size])
            }
            Self::NlcAnd(n) => {
                let size = family_size(n, 1)?;
                let spec = crate::nlc::NlcSpec::new(
                    n,
                    vec![ratio(1, size as i64); size],
                    (0..size).map(|z| u8::from(z == size - 1)).collect(),
                )
                .map_err(|e| GameError::InvalidParameter(e.to_string()))?;
                Ok(crate::nlc::build_nlc(&spec))
            }
            Self::AppendixD(n) => {
                let size = family_size(n, 2)? as i64;
                // λ(1 − 2^{1−n}) on the diagonal, −λ·2^{1−n} elsewhere.
                let lambda = ratio(1, 3 * size - 4);
                let diag = &lambda * ratio(size - 2, size);
                let off = &lambda * ratio(2, size);
                let size = size as usize;
                let q = (0..size)
                    .map(|x| {
                        (0..size)
                            .map(|y| if x == y { diag.clone() } else { off.clone() })
                            .collect()
                    })
                    .collect();
                let f = (0..size)
                    .map(|x| (0..size).map(|y| u8::from(x != y)).collect())
                    .collect();
                XorGame::new(q, f)
            }
        }
    }
}

fn family_size(n: u32, min_n: u32) -> Result<usize, GameError> {
    if n < min_n {
        return Err(GameError::InvalidParameter(format!("n must be at least {min_n}, got {n}")));
    }
    if n > 20 {
        return Err(GameError::InvalidParameter(format!("n = {n} is too large")));
    }
    Ok(1usize << n)
}

pub fn make_named(name: NamedGame) -> Result<XorGame, GameError> {
    name.build()
}
