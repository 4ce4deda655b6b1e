//! Non-local computation (NLC) games.
//!
//! Alice gets `x`, Bob gets `y`, with `z = x ⊕ y` drawn from `q̃` and the two
//! halves uniformly random; they win when `a ⊕ b = f(z)`. The game prior is
//! `q(x, y) = 2⁻ⁿ q̃(x ⊕ y)`.
//!
//! Two normalizations of the game matrix are in use. This module always builds
//! the real game (entries `2⁻ⁿ q̃`), and reports the Hadamard spectrum of the
//! `q̃`-normalized matrix `Φ_NLC(x, y) = (−1)^{f(x⊕y)} q̃(x ⊕ y)`:
//!
//! ```text
//! ĝ(u) = Σ_z (−1)^{u·z} (−1)^{f(z)} q̃(z),   Φ_NLC h_u = ĝ(u) h_u
//! ```
//!
//! with `h_u(x) = (−1)^{u·x}`. The operator norm of the real game matrix is
//! `‖Φ‖ = 2⁻ⁿ max|ĝ|`, and the bias bound is `ξ* = 2ⁿ‖Φ‖ = max|ĝ|`. Running
//! the brute-force classical oracle on uniform-`q̃` games for `n = 1, 2, 3`
//! confirms `ξ_c = ξ*` under this convention; a `2ⁿ⁻¹` prefactor on the
//! `q̃`-normalized norm does not match it (the 2-bit AND game has
//! `ξ_c = 1/2 = max|ĝ|`).

use crate::classical::{classical_bias, ClassicalError, EnumerationCaps};
use crate::exact::affine_dimension;
use crate::game::XorGame;
use crate::rational::{common_denominator, Rational};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NlcError {
    #[error("invalid NLC definition: {0}")]
    InvalidSpec(String),
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("enumeration of {count} vectors exceeds the cap of {cap}")]
    TooLarge { count: u64, cap: u64 },
    #[error("game is not an NLC game: {0}")]
    NotNlc(String),
}

/// Largest `n` for which the spectrum is computed.
pub const MAX_SPECTRUM_BITS: u32 = 16;
/// Largest `n` for which `HΦH` is formed explicitly to check diagonality.
pub const MAX_VERIFY_BITS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlcSpec {
    n: u32,
    q_tilde: Vec<Rational>,
    f_z: Vec<u8>,
}

impl NlcSpec {
    pub fn new(n: u32, q_tilde: Vec<Rational>, f_z: Vec<u8>) -> Result<Self, NlcError> {
        if n == 0 || n > MAX_SPECTRUM_BITS {
            return Err(NlcError::InvalidSpec(format!(
                "n must be in 1..={MAX_SPECTRUM_BITS}, got {n}"
            )));
        }
        let size = 1usize << n;
        if q_tilde.len() != size || f_z.len() != size {
            return Err(NlcError::InvalidSpec(format!(
                "q_tilde and f_z need {size} entries"
            )));
        }
        if let Some(z) = q_tilde.iter().position(|v| v.is_negative()) {
            return Err(NlcError::InvalidSpec(format!("q_tilde[{z}] is negative")));
        }
        if let Some(z) = f_z.iter().position(|&b| b > 1) {
            return Err(NlcError::InvalidSpec(format!("f_z[{z}] is not a bit")));
        }
        let total = q_tilde.iter().fold(Rational::zero(), |acc, v| acc + v);
        if !total.is_one() {
            return Err(NlcError::InvalidSpec(format!(
                "q_tilde sums to {}, expected 1",
                crate::rational::format_rational(&total)
            )));
        }
        Ok(Self { n, q_tilde, f_z })
    }

    /// Recovers the NLC structure of a game, if it has one: `q(x, y)` and
    /// `f(x, y)` must depend on `x ⊕ y` only, on a `2ⁿ × 2ⁿ` board.
    pub fn from_game(game: &XorGame) -> Result<Self, NlcError> {
        let size = game.m_a();
        if size != game.m_b() || !size.is_power_of_two() || size < 2 {
            return Err(NlcError::NotNlc(format!(
                "{}x{} is not a square power-of-two board",
                game.m_a(),
                game.m_b()
            )));
        }
        let n = size.trailing_zeros();
        let scale = Rational::from_integer((size as i64).into());
        let q_tilde: Vec<Rational> = (0..size).map(|z| game.q(0, z) * &scale).collect();
        let f_z: Vec<u8> = (0..size).map(|z| u8::from(game.f(0, z))).collect();
        for x in 0..size {
            for y in 0..size {
                let z = x ^ y;
                if game.q(x, y) * &scale != q_tilde[z] {
                    return Err(NlcError::NotNlc(format!("q({x},{y}) breaks XOR structure")));
                }
                if !q_tilde[z].is_zero() && u8::from(game.f(x, y)) != f_z[z] {
                    return Err(NlcError::NotNlc(format!("f({x},{y}) breaks XOR structure")));
                }
            }
        }
        Self::new(n, q_tilde, f_z)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q_tilde(&self) -> &[Rational] {
        &self.q_tilde
    }

    pub fn f_z(&self) -> &[u8] {
        &self.f_z
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    /// Signed weights `g(z) = (−1)^{f(z)} q̃(z)`.
    fn signed_weights(&self) -> Vec<Rational> {
        self.q_tilde
            .iter()
            .zip(&self.f_z)
            .map(|(q, &f)| if f == 1 { -q.clone() } else { q.clone() })
            .collect()
    }
}

pub fn build_nlc(spec: &NlcSpec) -> XorGame {
    let size = spec.size();
    let scale = Rational::new(One::one(), (size as i64).into());
    let mut q = Vec::with_capacity(size * size);
    let mut f = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            q.push(&spec.q_tilde[x ^ y] * &scale);
            f.push(spec.f_z[x ^ y] == 1);
        }
    }
    XorGame::from_flat(size, size, q, f).expect("a valid NLC spec always yields a valid game")
}

/// In-place Walsh–Hadamard butterfly: `v[u] ← Σ_z (−1)^{u·z} v[z]`.
pub fn fwht<T>(values: &mut [T])
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let len = values.len();
    assert!(len.is_power_of_two(), "transform length must be a power of two");
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let a = values[i].clone();
                let b = values[i + half].clone();
                values[i] = a.clone() + b.clone();
                values[i + half] = a - b;
            }
        }
        half *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlcAnalysis {
    pub n: u32,
    /// `ĝ(u)` indexed by `u`: the eigenvalues of the `q̃`-normalized matrix.
    pub spectrum: Vec<Rational>,
    /// `max_u |ĝ(u)|`.
    pub lambda_norm: Rational,
    /// Multiplicity of `+lambda_norm`.
    pub k: usize,
    /// Multiplicity of `−lambda_norm`.
    pub l: usize,
    /// `ξ* = 2ⁿ‖Φ‖ = lambda_norm`.
    pub xi_star: Rational,
    pub kl_dim_bound: usize,
    /// Whether `H·Φ_NLC·H` was checked to be exactly diagonal; `None` above
    /// [`MAX_VERIFY_BITS`].
    pub diagonal_verified: Option<bool>,
}

impl NlcAnalysis {
    /// Operator norm of the actual game matrix, `2⁻ⁿ·lambda_norm`.
    pub fn game_matrix_norm(&self) -> Rational {
        &self.lambda_norm / Rational::from_integer((1i64 << self.n).into())
    }

    /// Which extremal eigenspace of `Φ_NLC` contains `alpha`, exactly:
    /// `Some(+1)` for `Eig(+λ)`, `Some(−1)` for `Eig(−λ)`, `None` otherwise.
    pub fn eigenspace_sign(&self, alpha: &[i8]) -> Option<i8> {
        assert_eq!(alpha.len(), self.spectrum.len());
        let mut coeffs: Vec<i64> = alpha.iter().map(|&a| i64::from(a)).collect();
        fwht(&mut coeffs);
        let neg = -self.lambda_norm.clone();
        [1i8, -1].into_iter().find(|&sign| {
            let target = if sign == 1 { &self.lambda_norm } else { &neg };
            coeffs
                .iter()
                .zip(&self.spectrum)
                .all(|(&c, g)| c == 0 || g == target)
        })
    }
}

pub fn hadamard_spectrum(spec: &NlcSpec) -> NlcAnalysis {
    let mut spectrum = spec.signed_weights();
    fwht(&mut spectrum);
    let lambda_norm = spectrum
        .iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let k = spectrum.iter().filter(|v| **v == lambda_norm).count();
    let neg = -lambda_norm.clone();
    let l = if lambda_norm.is_zero() {
        0
    } else {
        spectrum.iter().filter(|v| **v == neg).count()
    };
    let diagonal_verified = (spec.n <= MAX_VERIFY_BITS).then(|| verify_diagonal(spec, &spectrum));
    NlcAnalysis {
        n: spec.n,
        kl_dim_bound: kl_dimension_bound(k, l).unwrap_or(0),
        xi_star: lambda_norm.clone(),
        spectrum,
        lambda_norm,
        k,
        l,
        diagonal_verified,
    }
}

/// Forms `H·Φ_NLC·H` on integer-scaled entries and checks that it equals
/// `2ⁿ·diag(ĝ)` exactly.
fn verify_diagonal(spec: &NlcSpec, spectrum: &[Rational]) -> bool {
    let size = spec.size();
    let Some((g, scale)) = common_denominator(&spec.signed_weights()) else {
        return false;
    };
    if scale.checked_mul((size * size) as i128).is_none() {
        return false;
    }
    let mut m: Vec<Vec<i128>> = (0..size)
        .map(|x| (0..size).map(|y| g[x ^ y]).collect())
        .collect();
    for row in m.iter_mut() {
        fwht(row);
    }
    let mut column = vec![0i128; size];
    for y in 0..size {
        for (c, row) in column.iter_mut().zip(&m) {
            *c = row[y];
        }
        fwht(&mut column);
        for (row, c) in m.iter_mut().zip(&column) {
            row[y] = *c;
        }
    }
    (0..size).all(|u| {
        (0..size).all(|v| {
            let entry = Rational::new(m[u][v].into(), scale.into());
            if u == v {
                entry == &spectrum[u] * Rational::from_integer((size as i64).into())
            } else {
                entry.is_zero()
            }
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlcBiasBound {
    pub xi_star: Rational,
    pub xi_c: Rational,
    pub matches_classical: bool,
}

/// Compares `ξ* = 2ⁿ‖Φ‖` with the exact classical bias of `game`.
pub fn nlc_bias_bound(
    analysis: &NlcAnalysis,
    game: &XorGame,
    caps: &EnumerationCaps,
) -> Result<NlcBiasBound, ClassicalError> {
    let size = Rational::from_integer((1i64 << analysis.n).into());
    let xi_star = analysis.game_matrix_norm() * size;
    let xi_c = classical_bias(game, caps)?.xi_c;
    Ok(NlcBiasBound {
        matches_classical: xi_star == xi_c,
        xi_star,
        xi_c,
    })
}

/// `k + l + k(k+1)/2 + l(l+1)/2 − 1`.
pub fn kl_dimension_bound(k: usize, l: usize) -> Result<usize, NlcError> {
    if k + l == 0 {
        return Err(NlcError::InvalidDims("k + l must be positive".into()));
    }
    Ok(k + l + k * (k + 1) / 2 + l * (l + 1) / 2 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G0Dimension {
    /// `2ⁿ⁻¹(2ⁿ − 3)`.
    pub formula_value: usize,
    /// Exact affine dimension of `{ααᵀ : α ∈ {±1}^{2ⁿ}, Σα = 0}`.
    pub verified_value: usize,
    /// The same with `−J` added (the correlation face of the all-ones/balanced family).
    pub with_all_ones: usize,
}

/// Number of balanced sign vectors of length `2ⁿ`, i.e. `C(2ⁿ, 2ⁿ⁻¹)`.
fn balanced_count(size: usize) -> Option<u64> {
    let half = size / 2;
    let mut c: u128 = 1;
    for i in 0..half {
        c = c * (size - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return None;
        }
    }
    Some(c as u64)
}

pub fn g0_dimension(n: u32, cap: u64) -> Result<G0Dimension, NlcError> {
    if n < 2 {
        return Err(NlcError::InvalidDims(format!("n must be at least 2, got {n}")));
    }
    if n > 6 {
        return Err(NlcError::TooLarge {
            count: u64::MAX,
            cap,
        });
    }
    let size = 1usize << n;
    let count = balanced_count(size).unwrap_or(u64::MAX);
    if count > cap {
        return Err(NlcError::TooLarge { count, cap });
    }
    let formula_value = (size / 2) * (size - 3);
    let mut points: Vec<Vec<i64>> = Vec::with_capacity(count as usize);
    for pattern in 0u64..(1u64 << size) {
        if pattern.count_ones() as usize != size / 2 || pattern & 1 == 1 {
            // α and −α share a Gram matrix; keep the one with α_0 = +1.
            continue;
        }
        let alpha: Vec<i64> = (0..size)
            .map(|x| if pattern >> x & 1 == 1 { -1 } else { 1 })
            .collect();
        points.push(
            alpha
                .iter()
                .flat_map(|&a| alpha.iter().map(move |&b| a * b))
                .collect(),
        );
    }
    let verified_value = affine_dimension(&points).unwrap_or(0);
    points.push(vec![-1; size * size]);
    let with_all_ones = affine_dimension(&points).unwrap_or(0);
    Ok(G0Dimension {
        formula_value,
        verified_value,
        with_all_ones,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorollaryBound {
    /// `2ⁿ + 2ⁿ⁻¹(2ⁿ − 1)`.
    pub dim_bound: usize,
    /// `2ⁿ⁻¹(2ⁿ − 1)`.
    pub dim_bound_corr: usize,
    /// `2ⁿ + 2ⁿ⁻¹(2ⁿ + 1)`.
    pub codim_bound_full: usize,
    /// `2ⁿ⁻¹(2ⁿ + 1)`.
    pub codim_bound_corr: usize,
}

/// Face dimension and codimension bounds valid for every `n`-bit NLC game.
pub fn corollary_bound(n: u32) -> Result<CorollaryBound, NlcError> {
    if n == 0 || n > 30 {
        return Err(NlcError::InvalidDims(format!("n must be in 1..=30, got {n}")));
    }
    let size = 1usize << n;
    let half = size / 2;
    Ok(CorollaryBound {
        dim_bound: size + half * (size - 1),
        dim_bound_corr: half * (size - 1),
        codim_bound_full: size + half * (size + 1),
        codim_bound_corr: half * (size + 1),
    })
}
