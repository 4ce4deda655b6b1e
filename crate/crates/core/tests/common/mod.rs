#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tightbell::game::{DeterministicStrategy, XorGame};
use tightbell::nlc::NlcSpec;
use tightbell::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalize(weights: &[u32]) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights
        .iter()
        .map(|&w| Rational::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

/// Random game with integer weights `1..=20` (and a few zeros when `sparse`),
/// always exhaustive.
pub fn random_game(rng: &mut ChaCha8Rng, m_a: usize, m_b: usize, sparse: bool) -> XorGame {
    loop {
        let weights: Vec<u32> = (0..m_a * m_b)
            .map(|_| {
                if sparse && rng.random_bool(0.25) {
                    0
                } else {
                    rng.random_range(1..=20)
                }
            })
            .collect();
        let rows_ok = (0..m_a).all(|x| (0..m_b).any(|y| weights[x * m_b + y] > 0));
        let cols_ok = (0..m_b).all(|y| (0..m_a).any(|x| weights[x * m_b + y] > 0));
        if !(rows_ok && cols_ok) {
            continue;
        }
        let q = normalize(&weights);
        let f: Vec<bool> = (0..m_a * m_b).map(|_| rng.random_bool(0.5)).collect();
        return XorGame::from_flat(m_a, m_b, q, f).unwrap();
    }
}

pub fn random_nlc_spec(rng: &mut ChaCha8Rng, n: u32) -> NlcSpec {
    let size = 1usize << n;
    loop {
        let weights: Vec<u32> = (0..size)
            .map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=12) })
            .collect();
        if weights.iter().all(|&w| w == 0) {
            continue;
        }
        let f: Vec<u8> = (0..size).map(|_| u8::from(rng.random_bool(0.5))).collect();
        return NlcSpec::new(n, normalize(&weights), f).unwrap();
    }
}

fn signs(pattern: u64, len: usize) -> Vec<i8> {
    (0..len).map(|i| if pattern >> i & 1 == 1 { -1 } else { 1 }).collect()
}

/// Plain double loop over all `2^{m_a+m_b}` deterministic strategies.
pub fn brute_force_bias(game: &XorGame) -> Rational {
    let phi = game.game_matrix();
    let (ma, mb) = (game.m_a(), game.m_b());
    let mut best: Option<Rational> = None;
    for pa in 0u64..(1 << ma) {
        let alpha = signs(pa, ma);
        for pb in 0u64..(1 << mb) {
            let beta = signs(pb, mb);
            let value = phi.bias(&DeterministicStrategy::new(alpha.clone(), beta).unwrap());
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
        }
    }
    best.unwrap()
}

/// All optimal strategies by the same double loop, sorted.
pub fn brute_force_vertices(game: &XorGame) -> Vec<DeterministicStrategy> {
    let phi = game.game_matrix();
    let (ma, mb) = (game.m_a(), game.m_b());
    let best = brute_force_bias(game);
    let mut out = Vec::new();
    for pa in 0u64..(1 << ma) {
        for pb in 0u64..(1 << mb) {
            let s = DeterministicStrategy::new(signs(pa, ma), signs(pb, mb)).unwrap();
            if phi.bias(&s) == best {
                out.push(s);
            }
        }
    }
    out.sort();
    out
}

/// `Σ_xy Φ_xy c_xy` with `c` given as exact rationals.
pub fn exact_bias(game: &XorGame, c: &[Rational]) -> Rational {
    let phi = game.game_matrix();
    let mut total = Rational::zero();
    for x in 0..game.m_a() {
        for y in 0..game.m_b() {
            total += phi.get(x, y) * &c[x * game.m_b() + y];
        }
    }
    total
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}
