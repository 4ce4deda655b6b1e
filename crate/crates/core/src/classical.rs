//! Exact classical bias and the complete set of optimal deterministic
//! strategies.
//!
//! For a fixed Alice vector `α` the best Bob reply is `β_y = sign((Φᵀα)_y)`,
//! so `ξ_c = max_α Σ_y |(Φᵀα)_y|`. The maximum is found by enumerating `α`
//! over the smaller side of the game in Gray-code order on integer-scaled
//! entries; every comparison is exact.
//!
//! `α` and `−α` give the same value, so only patterns with `α_0 = +1` are
//! scanned. A pattern is a bit mask where bit `x` set means `α_x = −1`.

use crate::game::{DeterministicStrategy, GameMatrix, XorGame};
use crate::rational::{common_denominator, Rational};
use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("enumerating 2^{side} strategies exceeds the cap of {cap}")]
    TooLarge { side: usize, cap: u64 },
    #[error("vertex set was truncated at {cap} entries")]
    Truncated { cap: usize },
    #[error("game entries do not fit a 128-bit common denominator")]
    Overflow,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    /// Maximum number of `α` vectors (`2^m` for the enumerated side `m`).
    pub enum_cap: u64,
    /// Maximum number of stored optimal vertices.
    pub vertex_cap: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self {
            enum_cap: DEFAULT_ENUM_CAP,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalBiasResult {
    pub xi_c: Rational,
    pub witness: DeterministicStrategy,
    /// Number of optimal vectors on the enumerated side, counting `±α` separately.
    pub num_alpha_optimal: u64,
    /// True when Bob's side was enumerated because it is smaller.
    pub transposed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalVertexSet {
    pub xi_c: Rational,
    pub vertices: Vec<DeterministicStrategy>,
    pub truncated: bool,
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FRelationReport {
    pub max_residual: f64,
    pub all_pass: bool,
}

/// Integer form of the game matrix, oriented so that rows are the enumerated side.
struct Scaled {
    rows: usize,
    cols: usize,
    entries: Vec<i128>,
    scale: i128,
    transposed: bool,
}

impl Scaled {
    fn new(phi: &GameMatrix, caps: &EnumerationCaps) -> Result<Self, ClassicalError> {
        let transposed = phi.m_a > phi.m_b;
        let (rows, cols) = if transposed {
            (phi.m_b, phi.m_a)
        } else {
            (phi.m_a, phi.m_b)
        };
        if rows >= 64 || (1u64 << rows) > caps.enum_cap {
            return Err(ClassicalError::TooLarge {
                side: rows,
                cap: caps.enum_cap,
            });
        }
        let (ints, scale) = common_denominator(&phi.phi).ok_or(ClassicalError::Overflow)?;
        // |partial sums| ≤ Σ|N| = scale, so doubling stays in range.
        if scale > i128::MAX / 4 {
            return Err(ClassicalError::Overflow);
        }
        let entries = if transposed {
            let mut t = Vec::with_capacity(ints.len());
            for y in 0..phi.m_b {
                for x in 0..phi.m_a {
                    t.push(ints[x * phi.m_b + y]);
                }
            }
            t
        } else {
            ints
        };
        Ok(Self {
            rows,
            cols,
            entries,
            scale,
            transposed,
        })
    }

    fn row(&self, x: usize) -> &[i128] {
        &self.entries[x * self.cols..(x + 1) * self.cols]
    }

    /// `Nᵀα` for the given pattern.
    fn column_sums(&self, pattern: u64) -> Vec<i128> {
        let mut sums = vec![0i128; self.cols];
        for x in 0..self.rows {
            let sign = if pattern >> x & 1 == 1 { -1 } else { 1 };
            for (s, v) in sums.iter_mut().zip(self.row(x)) {
                *s += sign * v;
            }
        }
        sums
    }
}

fn alpha_of(pattern: u64, len: usize) -> Vec<i8> {
    (0..len)
        .map(|x| if pattern >> x & 1 == 1 { -1 } else { 1 })
        .collect()
}

#[derive(Debug, Default)]
struct ChunkScan {
    best: i128,
    min_pattern: u64,
    count: u64,
    patterns: Vec<u64>,
    overflow: bool,
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn scan_chunk(s: &Scaled, lo: u64, hi: u64, collect: Option<usize>) -> ChunkScan {
    let mut out = ChunkScan {
        best: -1,
        ..Default::default()
    };
    let mut pattern = gray(lo) << 1;
    let mut sums = s.column_sums(pattern);
    let mut i = lo;
    loop {
        let value: i128 = sums.iter().map(|v| v.abs()).sum();
        if value > out.best {
            out.best = value;
            out.min_pattern = pattern;
            out.count = 1;
            out.patterns.clear();
            out.overflow = false;
            if collect.is_some() {
                out.patterns.push(pattern);
            }
        } else if value == out.best {
            out.count += 1;
            out.min_pattern = out.min_pattern.min(pattern);
            if let Some(cap) = collect {
                if out.patterns.len() <= cap {
                    out.patterns.push(pattern);
                } else {
                    out.overflow = true;
                }
            }
        }
        i += 1;
        if i >= hi {
            break;
        }
        let bit = i.trailing_zeros() as usize + 1;
        pattern ^= 1 << bit;
        let row = s.row(bit);
        if pattern >> bit & 1 == 1 {
            sums.iter_mut().zip(row).for_each(|(v, r)| *v -= 2 * r);
        } else {
            sums.iter_mut().zip(row).for_each(|(v, r)| *v += 2 * r);
        }
    }
    out
}

/// Scans every pattern with `α_0 = +1`, in parallel over contiguous index
/// ranges; the merge depends only on the values, never on scheduling.
fn scan(s: &Scaled, collect: Option<usize>) -> ChunkScan {
    let total: u64 = 1 << (s.rows - 1);
    let chunk: u64 = (total / 256).max(1 << 10).min(total);
    let chunks: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|k| (k * chunk, ((k + 1) * chunk).min(total)))
        .collect();
    let parts: Vec<ChunkScan> = chunks
        .par_iter()
        .map(|&(lo, hi)| scan_chunk(s, lo, hi, collect))
        .collect();
    let best = parts.iter().map(|p| p.best).max().unwrap_or(-1);
    let mut merged = ChunkScan {
        best,
        min_pattern: u64::MAX,
        ..Default::default()
    };
    for part in parts.into_iter().filter(|p| p.best == best) {
        merged.count += part.count;
        merged.min_pattern = merged.min_pattern.min(part.min_pattern);
        merged.overflow |= part.overflow;
        merged.patterns.extend(part.patterns);
    }
    merged.patterns.sort_unstable();
    if let Some(cap) = collect {
        if merged.patterns.len() > cap {
            merged.overflow = true;
        }
    }
    merged
}

fn best_reply(sums: &[i128]) -> Vec<i8> {
    sums.iter().map(|&v| if v < 0 { -1 } else { 1 }).collect()
}

fn orient(s: &Scaled, enumerated: Vec<i8>, reply: Vec<i8>) -> DeterministicStrategy {
    if s.transposed {
        DeterministicStrategy {
            alpha: reply,
            beta: enumerated,
        }
    } else {
        DeterministicStrategy {
            alpha: enumerated,
            beta: reply,
        }
    }
}

/// Maximum classical bias `ξ_c`, exact.
///
/// The witness is the optimal vector with the smallest pattern on the
/// enumerated side, with ties in the reply broken to `+1`.
pub fn classical_bias(
    game: &XorGame,
    caps: &EnumerationCaps,
) -> Result<ClassicalBiasResult, ClassicalError> {
    let s = Scaled::new(&game.game_matrix(), caps)?;
    let result = scan(&s, None);
    let sums = s.column_sums(result.min_pattern);
    let witness = orient(&s, alpha_of(result.min_pattern, s.rows), best_reply(&sums));
    Ok(ClassicalBiasResult {
        xi_c: Rational::new(result.best.into(), s.scale.into()),
        witness,
        num_alpha_optimal: 2 * result.count,
        transposed: s.transposed,
    })
}

/// Every optimal deterministic strategy pair.
///
/// Coordinates where `(Φᵀα)_y = 0` leave Bob indifferent; both signs are
/// emitted there. `(α, β)` and `(−α, −β)` are listed as distinct vertices.
/// Vertices are sorted. When more than `caps.vertex_cap` exist the first
/// `vertex_cap` (in sorted pattern order) are kept and `truncated` is set.
pub fn optimal_vertices(
    game: &XorGame,
    caps: &EnumerationCaps,
) -> Result<OptimalVertexSet, ClassicalError> {
    let s = Scaled::new(&game.game_matrix(), caps)?;
    let cap = caps.vertex_cap;
    let result = scan(&s, Some(cap));
    let mut truncated = result.overflow;
    let mut vertices = Vec::new();
    'outer: for &pattern in &result.patterns {
        let alpha = alpha_of(pattern, s.rows);
        let sums = s.column_sums(pattern);
        let zeros: Vec<usize> = (0..s.cols).filter(|&y| sums[y] == 0).collect();
        let base = best_reply(&sums);
        if zeros.len() >= 40 {
            truncated = true;
            break;
        }
        for mask in 0u64..(1 << zeros.len()) {
            let mut reply = base.clone();
            for (k, &y) in zeros.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    reply[y] = -1;
                }
            }
            let v = orient(&s, alpha.clone(), reply);
            let neg = v.negated();
            for vertex in [v, neg] {
                if vertices.len() == cap {
                    truncated = true;
                    break 'outer;
                }
                vertices.push(vertex);
            }
        }
    }
    vertices.sort();
    Ok(OptimalVertexSet {
        xi_c: Rational::new(result.best.into(), s.scale.into()),
        vertices,
        truncated,
        cap,
    })
}

/// Checks `β = Fα` on every vertex, with `F` of shape `m_b × m_a`.
pub fn verify_f_relation(
    vertices: &OptimalVertexSet,
    f: &DMatrix<f64>,
    tol: f64,
) -> Result<FRelationReport, ClassicalError> {
    if vertices.truncated {
        return Err(ClassicalError::Truncated {
            cap: vertices.cap,
        });
    }
    let mut max_residual: f64 = 0.0;
    for v in &vertices.vertices {
        if f.nrows() != v.beta.len() || f.ncols() != v.alpha.len() {
            return Err(ClassicalError::ShapeMismatch(format!(
                "F is {}x{}, strategies are {}/{}",
                f.nrows(),
                f.ncols(),
                v.beta.len(),
                v.alpha.len()
            )));
        }
        for (y, &b) in v.beta.iter().enumerate() {
            let image: f64 = v
                .alpha
                .iter()
                .enumerate()
                .map(|(x, &a)| f[(y, x)] * f64::from(a))
                .sum();
            max_residual = max_residual.max((f64::from(b) - image).abs());
        }
    }
    Ok(FRelationReport {
        max_residual,
        all_pass: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{make_named, NamedGame};
    use crate::rational::ratio;

    /// Double loop over all `2^{m_a + m_b}` pairs.
    fn brute_force(game: &XorGame) -> (Rational, Vec<DeterministicStrategy>) {
        let phi = game.game_matrix();
        let (ma, mb) = (game.m_a(), game.m_b());
        let mut best: Option<Rational> = None;
        let mut optimal = Vec::new();
        for pa in 0u64..(1 << ma) {
            for pb in 0u64..(1 << mb) {
                let s = DeterministicStrategy {
                    alpha: alpha_of(pa, ma),
                    beta: alpha_of(pb, mb),
                };
                let v = phi.bias(&s);
                match &best {
                    Some(b) if &v < b => {}
                    Some(b) if &v == b => optimal.push(s),
                    _ => {
                        best = Some(v);
                        optimal = vec![s];
                    }
                }
            }
        }
        optimal.sort();
        (best.unwrap(), optimal)
    }

    #[test]
    fn chsh_bias_and_vertices() {
        let g = make_named(NamedGame::Chsh).unwrap();
        let res = classical_bias(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(res.xi_c, ratio(1, 2));
        assert_eq!(g.game_matrix().bias(&res.witness), ratio(1, 2));
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(vs.vertices.len(), 8);
        assert!(!vs.truncated);
        assert_eq!(vs.vertices, brute_force(&g).1);
    }

    #[test]
    fn chsh_zero_branching_is_complete() {
        // α = (1, 1) gives Φᵀα = (1/2, 0); both signs of β_1 must appear.
        let g = make_named(NamedGame::Chsh).unwrap();
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        let with_ones: Vec<_> = vs.vertices.iter().filter(|v| v.alpha == vec![1, 1]).collect();
        assert_eq!(with_ones.len(), 2);
        assert!(with_ones.iter().any(|v| v.beta[1] == 1));
        assert!(with_ones.iter().any(|v| v.beta[1] == -1));
    }

    #[test]
    fn identity_games() {
        for n in 1..=3 {
            let g = make_named(NamedGame::Identity(n)).unwrap();
            let res = classical_bias(&g, &EnumerationCaps::default()).unwrap();
            assert_eq!(res.xi_c, ratio(1, 1));
            assert_eq!(res.witness.alpha, vec![1; 1 << n]);
            assert_eq!(res.witness.beta, vec![1; 1 << n]);
        }
        let g = make_named(NamedGame::Identity(1)).unwrap();
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(vs.vertices.len(), 4);
        assert!(vs.vertices.iter().all(|v| v.alpha == v.beta));
    }

    #[test]
    fn appendix_d_vertices() {
        let g = make_named(NamedGame::AppendixD(2)).unwrap();
        let res = classical_bias(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(res.xi_c, ratio(1, 2));
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        // Six balanced α with β = α (closed under negation) plus ±(1, −1).
        assert_eq!(vs.vertices.len(), 8);
        assert_eq!(vs.vertices, brute_force(&g).1);
        let f = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.5 } else { -0.5 });
        let report = verify_f_relation(&vs, &f, 1e-12).unwrap();
        assert_eq!(report.max_residual, 0.0);
        assert!(report.all_pass);
    }

    #[test]
    fn chsh_has_no_single_f() {
        // Two replies for α = (1, 1) rule out any linear β = Fα.
        let g = make_named(NamedGame::Chsh).unwrap();
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        let f = DMatrix::from_element(2, 2, 0.5);
        assert!(!verify_f_relation(&vs, &f, 1e-6).unwrap().all_pass);
    }

    #[test]
    fn identity_f_relation() {
        let g = make_named(NamedGame::Identity(2)).unwrap();
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        let report = verify_f_relation(&vs, &DMatrix::identity(4, 4), 0.0).unwrap();
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn transposed_games_report_original_orientation() {
        let q = vec![
            vec![ratio(1, 6), ratio(1, 6)],
            vec![ratio(1, 6), ratio(1, 6)],
            vec![ratio(1, 6), ratio(1, 6)],
        ];
        let g = XorGame::new(q, vec![vec![0, 1], vec![1, 1], vec![0, 0]]).unwrap();
        let res = classical_bias(&g, &EnumerationCaps::default()).unwrap();
        assert!(res.transposed);
        assert_eq!(res.witness.alpha.len(), 3);
        assert_eq!(g.game_matrix().bias(&res.witness), res.xi_c);
        let (oracle, optimal) = brute_force(&g);
        assert_eq!(res.xi_c, oracle);
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(vs.vertices, optimal);
    }

    #[test]
    fn caps_are_enforced() {
        let g = make_named(NamedGame::Identity(3)).unwrap();
        let tight = EnumerationCaps {
            enum_cap: 1 << 7,
            vertex_cap: 10,
        };
        assert!(matches!(
            classical_bias(&g, &tight),
            Err(ClassicalError::TooLarge { side: 8, .. })
        ));
        let caps = EnumerationCaps {
            enum_cap: 1 << 8,
            vertex_cap: 10,
        };
        let vs = optimal_vertices(&g, &caps).unwrap();
        assert!(vs.truncated);
        assert_eq!(vs.vertices.len(), 10);
        assert!(matches!(
            verify_f_relation(&vs, &DMatrix::identity(8, 8), 1e-9),
            Err(ClassicalError::Truncated { cap: 10 })
        ));
    }

    #[test]
    fn single_entry() {
        let g = make_named(NamedGame::SingleEntry).unwrap();
        let vs = optimal_vertices(&g, &EnumerationCaps::default()).unwrap();
        assert_eq!(vs.xi_c, ratio(1, 1));
        assert_eq!(vs.vertices.len(), 2);
    }
}
