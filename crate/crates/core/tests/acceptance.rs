//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use tightbell::classical::{classical_bias, optimal_vertices, EnumerationCaps};
use tightbell::facegeom::{
    face_report, quantum_face_probe, trivial_facet_check, FaceConfig, ProbeConfig,
};
use tightbell::game::{make_named, NamedGame, XorGame};
use tightbell::io::CertificateExport;
use tightbell::nlc::build_nlc;
use tightbell::qsdp::{
    extract_f, quantum_slackness_check, slackness_residual_classical, solve_quantum_bias,
    Classification, SolverConfig,
};
use tightbell::rational::{ratio, to_f64};
use tightbell::Rational;

const XI_TOL: f64 = 1e-6;
const GAP_TOL: f64 = 1e-7;
const EIG_TOL: f64 = 1e-8;
const SLACK_TOL: f64 = 1e-6;
const QSLACK_TOL: f64 = 1e-5;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration, what: Outcome) -> Outcome {
    if what.ok && elapsed > limit {
        return fail(format!("{} but took {elapsed:.2?} > {limit:?}", what.detail));
    }
    Outcome {
        ok: what.ok,
        detail: format!("{} [{elapsed:.2?}]", what.detail),
    }
}

fn named(g: NamedGame) -> XorGame {
    make_named(g).expect("named game")
}

fn random_nlc_games() -> Vec<XorGame> {
    let mut rng = common::rng(2024);
    (0..50)
        .map(|i| build_nlc(&common::random_nlc_spec(&mut rng, 1 + (i % 3) as u32)))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let chsh = named(NamedGame::Chsh);
    let xi_c = classical_bias(&chsh, &EnumerationCaps::default()).unwrap().xi_c;
    let r = match solve_quantum_bias(&chsh, &SolverConfig::default()) {
        Ok(r) => r,
        Err(e) => return fail(format!("solver: {e}")),
    };
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let ok = xi_c == ratio(1, 2)
        && (r.xi_q - target).abs() <= XI_TOL
        && r.gap <= GAP_TOL
        && r.cert.min_eig >= -EIG_TOL
        && r.cert.raw_min_eig >= -EIG_TOL
        && r.classification == Classification::Advantage;
    let detail = format!(
        "xi_c={xi_c} xi_q={:.9} gap={:.1e} min_eig={:.1e} raw_min_eig={:.1e} {}",
        r.xi_q,
        r.gap,
        r.cert.min_eig,
        r.cert.raw_min_eig,
        r.classification.as_str()
    );
    within(start.elapsed(), Duration::from_secs(1), if ok { pass(detail) } else { fail(detail) })
}

fn criterion_2(games: &[XorGame]) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (i, g) in games.iter().enumerate() {
        let xi_c = to_f64(&classical_bias(g, &EnumerationCaps::default()).unwrap().xi_c);
        match solve_quantum_bias(g, &SolverConfig::default()) {
            Ok(r) => worst = worst.max((r.xi_q - xi_c).abs()),
            Err(e) => return fail(format!("game {i}: {e}")),
        }
    }
    let detail = format!("{} NLC games, max |xi_q - xi_c| = {worst:.2e}", games.len());
    let o = if worst <= XI_TOL { pass(detail) } else { fail(detail) };
    within(start.elapsed(), Duration::from_secs(120), o)
}

fn criterion_3(games: &[XorGame]) -> Outcome {
    let mut tested = 0;
    let cases = games
        .iter()
        .cloned()
        .chain((1..=3).map(|n| named(NamedGame::Identity(n))));
    for (i, g) in cases.enumerate() {
        let r = match face_report(&g, &FaceConfig::default()) {
            Ok(r) => r,
            Err(e) => return fail(format!("case {i}: {e}")),
        };
        if r.classification != Classification::NoAdvantage || r.truncated {
            return fail(format!("case {i}: classification {:?}", r.classification));
        }
        let (ma, mb) = (g.m_a().min(g.m_b()), g.m_a().max(g.m_b()));
        let bound = ma + ma * (ma - 1) / 2;
        let codim = mb + ma * mb - ma * (ma - 1) / 2;
        let ok = r.dim_full <= bound
            && r.is_facet_full == Some(false)
            && r.is_facet_corr == Some(false)
            && r.codim_full >= codim;
        if !ok {
            return fail(format!(
                "case {i} ({}x{}): dim {} bound {bound}, codim {} need {codim}",
                g.m_a(),
                g.m_b(),
                r.dim_full,
                r.codim_full
            ));
        }
        tested += 1;
    }
    pass(format!("{tested} no-advantage games within the dimension and codimension bounds, none a facet"))
}

fn criterion_4() -> Outcome {
    let cfg = FaceConfig::default();
    let r2 = face_report(&named(NamedGame::Identity(2)), &cfg).unwrap();
    let r1 = face_report(&named(NamedGame::Identity(1)), &cfg).unwrap();
    let detail = format!(
        "identity(2) dim_full={} dim_corr={}; identity(1) dim_full={} dim_corr={}",
        r2.dim_full, r2.dim_corr, r1.dim_full, r1.dim_corr
    );
    let ok = r2.dim_full == 10 && r1.dim_full == 3 && r2.dim_corr == 6 && r1.dim_corr == 1;
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = FaceConfig::default();
    let g2 = named(NamedGame::AppendixD(2));
    // Off-diagonal prior entries are 2λ/2ⁿ.
    let lambda = g2.q(0, 1) * ratio(4, 2);
    let vertices = optimal_vertices(&g2, &cfg.caps).unwrap();
    let r2 = face_report(&g2, &cfg).unwrap();
    let r3 = face_report(&named(NamedGame::AppendixD(3)), &cfg).unwrap();
    let expected_xi = ratio(4, 3 * 4 - 4);
    let detail = format!(
        "lambda={lambda} xi_c={} vertices={} (expected 14) dim_corr(n=2)={} dim_corr(n=3)={}",
        vertices.xi_c,
        vertices.vertices.len(),
        r2.dim_corr,
        r3.dim_corr
    );
    let ok = lambda == ratio(1, 8)
        && vertices.xi_c == ratio(1, 2)
        && vertices.xi_c == expected_xi
        && vertices.vertices.len() == 14
        && r2.dim_corr == 3
        && r3.dim_corr == 21;
    within(start.elapsed(), Duration::from_secs(10), if ok { pass(detail) } else { fail(detail) })
}

fn criterion_6(games: &[XorGame]) -> Outcome {
    let cfg = FaceConfig::default();
    let mut cases: Vec<XorGame> = (1..=3).map(|n| named(NamedGame::Identity(n))).collect();
    cases.extend([2, 3].map(|n| named(NamedGame::AppendixD(n))));
    cases.extend(games.iter().cloned());
    let mut worst_f: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    for (i, g) in cases.iter().enumerate() {
        let r = match face_report(g, &cfg) {
            Ok(r) => r,
            Err(e) => return fail(format!("case {i}: {e}")),
        };
        let (Some(f), Some(s)) = (r.f_relation, r.max_slackness_residual) else {
            return fail(format!("case {i}: no F-relation report"));
        };
        worst_f = worst_f.max(f.max_residual);
        worst_s = worst_s.max(s);
    }
    let chsh = named(NamedGame::Chsh);
    let cert = solve_quantum_bias(&chsh, &SolverConfig::default()).unwrap().cert;
    let chsh_vertices = optimal_vertices(&chsh, &cfg.caps).unwrap().vertices;
    let chsh_min = chsh_vertices
        .iter()
        .map(|v| slackness_residual_classical(&cert, &chsh, v))
        .fold(f64::INFINITY, f64::min);
    let detail = format!(
        "{} games: max F residual {worst_f:.1e}, max slackness {worst_s:.1e}; CHSH min slackness {chsh_min:.3}",
        cases.len()
    );
    if worst_f <= SLACK_TOL && worst_s <= SLACK_TOL && chsh_min > 0.05 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_7() -> Outcome {
    let solver_cfg = SolverConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, g) in [
        ("identity(2)", named(NamedGame::Identity(2))),
        ("nlc_and(2)", named(NamedGame::NlcAnd(2))),
        ("appendix_d(3)", named(NamedGame::AppendixD(3))),
    ] {
        let r = solve_quantum_bias(&g, &solver_cfg).unwrap();
        let f = extract_f(&r.cert, &g, solver_cfg.feas_tol).unwrap();
        let q = quantum_slackness_check(&r, &f, QSLACK_TOL).unwrap();
        let probe = quantum_face_probe(&g, &ProbeConfig::default(), &solver_cfg);
        let (lb, bound) = match &probe {
            Ok(p) => (p.dim_lower_bound, p.thm3_bound),
            Err(e) => return fail(format!("{label}: probe failed: {e}")),
        };
        ok &= q.pass && q.max_residual <= QSLACK_TOL && lb <= bound;
        parts.push(format!("{label} residual {:.1e} probe {lb}<={bound}", q.max_residual));
    }
    let detail = parts.join("; ");
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_8() -> Outcome {
    let mut rng = common::rng(8);
    for i in 0..100 {
        let m_a = 1 + i % 8;
        let m_b = 1 + (i * 5 + 3) % 8;
        let g = common::random_game(&mut rng, m_a, m_b, true);
        let b = g.ns_perfect_behaviour();
        let c: Vec<Rational> = b.c.iter().map(|&v| Rational::from_integer((v as i64).into())).collect();
        let exact = common::exact_bias(&g, &c);
        let marginals_zero = b.alpha.iter().chain(&b.beta).all(|&v| v == 0.0);
        // With zero marginals every p(a|x) is exactly 1/2 whatever y is.
        let ns_exact = marginals_zero
            && (0..m_a).all(|x| {
                (0..m_b).all(|y| {
                    let p = b.probabilities(x, y);
                    p[0][0] + p[0][1] == 0.5 && p[0][0] + p[1][0] == 0.5
                })
            });
        if !ns_exact || !exact.is_one() || b.no_signalling_violation() != 0.0 {
            return fail(format!("game {i} ({m_a}x{m_b}): bias {exact}"));
        }
    }
    let mut facets = 0;
    for m_a in 1..=3 {
        for m_b in 1..=3 {
            for x0 in 0..m_a {
                for y0 in 0..m_b {
                    for sign in [1i8, -1] {
                        let r = trivial_facet_check(m_a, m_b, x0, y0, sign, 1 << 20).unwrap();
                        if r.dim != m_a * m_b - 1 || !r.is_facet {
                            return fail(format!(
                                "trivial face ({m_a},{m_b},{x0},{y0},{sign}) has dim {}",
                                r.dim
                            ));
                        }
                        facets += 1;
                    }
                }
            }
        }
    }
    pass(format!("100 random games with exact ns-perfect behaviour; {facets} trivial facets verified"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut rng = common::rng(9);
    let mut worst_gap: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for i in 0..100 {
        let m_a = 1 + (i * 7) % 16;
        let m_b = 1 + (i * 11 + 5) % 16;
        let g = common::random_game(&mut rng, m_a, m_b, i % 3 == 0);
        let xi_c = to_f64(&classical_bias(&g, &EnumerationCaps::default()).unwrap().xi_c);
        let r = match solve_quantum_bias(&g, &cfg) {
            Ok(r) => r,
            Err(e) => return fail(format!("game {i} ({m_a}x{m_b}): {e}")),
        };
        let again = solve_quantum_bias(&g, &cfg).unwrap();
        let a = serde_json::to_string(&CertificateExport::from(&r)).unwrap();
        let b = serde_json::to_string(&CertificateExport::from(&again)).unwrap();
        if a != b || r.gram != again.gram {
            return fail(format!("game {i}: repeated runs differ"));
        }
        worst_gap = worst_gap.max(r.gap);
        worst_eig = worst_eig.min(r.cert.min_eig);
        let ok = r.gap <= GAP_TOL
            && r.cert.min_eig >= -EIG_TOL
            && r.xi_q >= xi_c - 1e-9
            && r.xi_q <= 1.0 + 1e-8;
        if !ok {
            return fail(format!(
                "game {i} ({m_a}x{m_b}): gap {:.1e} min_eig {:.1e} xi_q {} xi_c {xi_c}",
                r.gap, r.cert.min_eig, r.xi_q
            ));
        }
    }
    let detail = format!("100 games up to 16x16: max gap {worst_gap:.1e}, min eig {worst_eig:.1e}, reproducible");
    within(start.elapsed(), Duration::from_secs(300), pass(detail))
}

fn criterion_10() -> Outcome {
    let mut rng = common::rng(10);
    for i in 0..200 {
        let m_a = 1 + i % 11;
        let m_b = 1 + (i * 7 + 2) % (12 - m_a);
        let g = common::random_game(&mut rng, m_a, m_b, i % 2 == 0);
        let fast = classical_bias(&g, &EnumerationCaps::default()).unwrap().xi_c;
        let slow = common::brute_force_bias(&g);
        if fast != slow || fast <= Rational::zero() {
            return fail(format!("game {i} ({m_a}x{m_b}): {fast} vs {slow}"));
        }
    }
    pass("200 random games agree exactly with the double-loop oracle")
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let nlc_games = random_nlc_games();
    let criteria: Vec<Criterion> = vec![
        ("CHSH classical and certified quantum bias", Box::new(criterion_1)),
        ("NLC games show no quantum advantage", Box::new(|| criterion_2(&nlc_games))),
        ("no-advantage face dimension bound", Box::new(|| criterion_3(&nlc_games))),
        ("identity games attain the bound", Box::new(criterion_4)),
        ("appendixd family", Box::new(criterion_5)),
        ("F-relation and classical slackness", Box::new(|| criterion_6(&nlc_games))),
        ("quantum slackness and face probe", Box::new(criterion_7)),
        ("no-signalling perfect behaviour and trivial facets", Box::new(criterion_8)),
        ("solver certification and reproducibility", Box::new(criterion_9)),
        ("classical oracle equivalence", Box::new(criterion_10)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.ok {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
