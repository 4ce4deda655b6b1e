//! `tightbell`: classical and quantum biases, dual certificates and Bell
//! polytope face dimensions of XOR games.
//!
//! Exit codes: 0 success, 1 invalid input, 2 resource cap exceeded,
//! 3 certification failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tightbell::classical::{classical_bias, ClassicalError, EnumerationCaps};
use tightbell::facegeom::{
    face_report, quantum_face_probe, trivial_facet_check, FaceConfig, FaceError, ProbeConfig,
};
use tightbell::game::{GameError, NamedGame, XorGame};
use tightbell::io::{read_game, read_text, FaceReportExport, GameFile, InputFile, IoError, NlcFile};
use tightbell::nlc::{
    build_nlc, corollary_bound, g0_dimension, hadamard_spectrum, nlc_bias_bound, NlcError,
    NlcSpec,
};
use tightbell::qsdp::{solve_quantum_bias_with, QsdpError, SolverConfig};
use tightbell::rational::{format_rational, parse_rational, to_f64};

use report::*;

/// Largest `n` whose `2ⁿ × 2ⁿ` games are comfortably enumerable downstream.
const ENUMERATION_WARN_BITS: u32 = 5;

#[derive(Debug, Parser)]
#[command(name = "tightbell", version, about = "XOR game bias and Bell polytope face analysis")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Seed for the solver's random restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    #[arg(long, global = true, default_value_t = 1e-7)]
    gap_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    feas_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    adv_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    slack_tol: f64,
    /// Largest number of sign patterns enumerated on one side.
    #[arg(long, global = true, default_value_t = tightbell::classical::DEFAULT_ENUM_CAP)]
    enum_cap: u64,
    /// Largest number of optimal vertices kept.
    #[arg(long, global = true, default_value_t = tightbell::classical::DEFAULT_VERTEX_CAP)]
    vertex_cap: usize,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Full,
    Correlation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BiasKind {
    Classical,
    Quantum,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a named game: chsh, identity, nlc-and, appendixd, single-entry.
    Make {
        name: String,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Classical (exact) or quantum (certified) bias of a game file.
    Bias { kind: BiasKind, file: PathBuf },
    /// Face dimensions, bounds and facet verdicts.
    Face {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Space::Full)]
        space: Space,
    },
    /// Dimension of the face c_{x0 y0} = sign of the correlation polytope.
    TrivialFacet {
        #[arg(long)]
        ma: usize,
        #[arg(long)]
        mb: usize,
        #[arg(long)]
        x0: usize,
        #[arg(long)]
        y0: usize,
        /// `+` or `-`.
        #[arg(long, allow_hyphen_values = true)]
        sign: String,
    },
    /// Sampled lower bound on the optimal quantum face dimension.
    Probe {
        file: PathBuf,
        #[arg(long, default_value_t = 24)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        perturb_scale: f64,
        #[arg(long, default_value_t = 1e-6)]
        rank_tol: f64,
    },
    /// Non-local computation games.
    Nlc {
        #[command(subcommand)]
        command: NlcCommand,
    },
    /// Face dimensions across a game family, as a points array.
    Family {
        /// identity, nlc-and or appendixd.
        name: String,
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
    },
}

#[derive(Debug, Subcommand)]
enum NlcCommand {
    /// Hadamard spectrum, multiplicities and the (k, l) bound.
    Spectrum { file: PathBuf },
    /// The bias bound compared with the exact classical bias.
    Bound { file: PathBuf },
    /// Dimension of the balanced Gram family, formula against exact rank.
    G0 {
        #[arg(long)]
        n: u32,
    },
    /// Dimension and codimension bounds for n-bit NLC games.
    Corollary {
        #[arg(long)]
        n: u32,
    },
    /// Build the game of an NLC definition.
    Build {
        #[arg(long)]
        n: u32,
        /// Comma-separated rationals, 2ⁿ entries.
        #[arg(long, value_delimiter = ',')]
        q_tilde: Vec<String>,
        /// Comma-separated bits, 2ⁿ entries.
        #[arg(long, value_delimiter = ',')]
        f_z: Vec<u8>,
        /// Write the NLC definition file instead of the game file.
        #[arg(long)]
        definition: bool,
    },
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub restarts: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub adv_tol: f64,
    pub slack_tol: f64,
    pub enum_cap: u64,
    pub vertex_cap: usize,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Result<Self, Failure> {
        let tols = [
            ("gap-tol", a.gap_tol),
            ("feas-tol", a.feas_tol),
            ("adv-tol", a.adv_tol),
            ("slack-tol", a.slack_tol),
        ];
        if let Some((name, v)) = tols.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Failure::invalid(anyhow!("--{name} must be positive, got {v}")));
        }
        if a.enum_cap == 0 || a.vertex_cap == 0 || a.restarts == 0 {
            return Err(Failure::invalid(anyhow!(
                "--enum-cap, --vertex-cap and --restarts must be positive"
            )));
        }
        Ok(Self {
            seed: a.seed,
            restarts: a.restarts,
            gap_tol: a.gap_tol,
            feas_tol: a.feas_tol,
            adv_tol: a.adv_tol,
            slack_tol: a.slack_tol,
            enum_cap: a.enum_cap,
            vertex_cap: a.vertex_cap,
            output_path: a.output.clone(),
        })
    }

    fn caps(&self) -> EnumerationCaps {
        EnumerationCaps {
            enum_cap: self.enum_cap,
            vertex_cap: self.vertex_cap,
        }
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            restarts: self.restarts,
            seed: self.seed,
            gap_tol: self.gap_tol,
            feas_tol: self.feas_tol,
            adv_tol: self.adv_tol,
            ..SolverConfig::default()
        }
    }

    fn face(&self) -> FaceConfig {
        FaceConfig {
            caps: self.caps(),
            solver: self.solver(),
            slack_tol: self.slack_tol,
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    const INVALID: u8 = 1;
    const CAP: u8 = 2;
    const CERTIFICATION: u8 = 3;

    fn invalid(error: anyhow::Error) -> Self {
        Self {
            code: Self::INVALID,
            error,
        }
    }
}

fn classical_code(e: &ClassicalError) -> u8 {
    match e {
        ClassicalError::TooLarge { .. } | ClassicalError::Truncated { .. } => Failure::CAP,
        _ => Failure::INVALID,
    }
}

fn qsdp_code(e: &QsdpError) -> u8 {
    match e {
        QsdpError::NotConverged { .. } | QsdpError::DualInfeasible { .. } => Failure::CERTIFICATION,
        QsdpError::TooLarge { .. } => Failure::CAP,
        _ => Failure::INVALID,
    }
}

impl From<ClassicalError> for Failure {
    fn from(e: ClassicalError) -> Self {
        Self {
            code: classical_code(&e),
            error: e.into(),
        }
    }
}

impl From<QsdpError> for Failure {
    fn from(e: QsdpError) -> Self {
        Self {
            code: qsdp_code(&e),
            error: e.into(),
        }
    }
}

impl From<FaceError> for Failure {
    fn from(e: FaceError) -> Self {
        let code = match &e {
            FaceError::TooLarge { .. } => Failure::CAP,
            FaceError::Classical(c) => classical_code(c),
            FaceError::Quantum(q) => qsdp_code(q),
            _ => Failure::INVALID,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<NlcError> for Failure {
    fn from(e: NlcError) -> Self {
        let code = match e {
            NlcError::TooLarge { .. } => Failure::CAP,
            _ => Failure::INVALID,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Self::invalid(e.into())
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        Self::invalid(e.into())
    }
}

fn emit<T: Serialize>(value: &T, cfg: &RunConfig) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::invalid(anyhow!("serializing report: {e}")))?;
    text.push('\n');
    match &cfg.output_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(anyhow!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<XorGame, Failure> {
    Ok(read_game(path)?)
}

fn load_nlc(path: &Path) -> Result<NlcSpec, Failure> {
    match InputFile::parse(&read_text(path)?)? {
        InputFile::Nlc(f) => Ok(f.to_spec()?),
        InputFile::Game(g) => Ok(NlcSpec::from_game(&g.to_game()?)?),
    }
}

fn warn_large(n: u32) {
    if n > ENUMERATION_WARN_BITS {
        eprintln!(
            "warning: 2^{n} inputs per side; classical enumeration and face analysis may exceed caps"
        );
    }
}

fn cmd_make(name: &str, n: Option<u32>, cfg: &RunConfig) -> Result<(), Failure> {
    let named = NamedGame::parse(name, n)?;
    if let Some(n) = n {
        warn_large(n);
    }
    emit(&GameFile::from_game(&named.build()?), cfg)
}

fn cmd_bias(kind: BiasKind, file: &Path, cfg: &RunConfig) -> Result<(), Failure> {
    let game = load(file)?;
    let classical = classical_bias(&game, &cfg.caps());
    match kind {
        BiasKind::Classical => {
            let r = classical?;
            emit(&ClassicalReport::new(game.m_a(), game.m_b(), &r), cfg)
        }
        BiasKind::Quantum => {
            // The quantum bias does not need the classical one; it only sharpens
            // the classification.
            let xi_c = classical.ok().map(|r| r.xi_c);
            let xi_c_text = xi_c.as_ref().map(format_rational);
            let result = solve_quantum_bias_with(&game, &cfg.solver(), xi_c.as_ref().map(to_f64));
            match result {
                Ok(r) => emit(
                    &QuantumReport::new(game.m_a(), game.m_b(), &r, xi_c_text, true, cfg),
                    cfg,
                ),
                Err(e) => {
                    if let Some(best) = e.best_result() {
                        emit(
                            &QuantumReport::new(game.m_a(), game.m_b(), best, xi_c_text, false, cfg),
                            cfg,
                        )?;
                    }
                    Err(e.into())
                }
            }
        }
    }
}

fn cmd_face(file: &Path, space: Space, cfg: &RunConfig) -> Result<(), Failure> {
    let game = load(file)?;
    let report = face_report(&game, &cfg.face())?;
    let export = FaceReportExport::from(&report);
    let mut value = serde_json::to_value(&export)
        .map_err(|e| Failure::invalid(anyhow!("serializing report: {e}")))?;
    let (dim, codim, facet, ambient) = match space {
        Space::Full => (
            export.dim_full,
            export.codim_full,
            export.is_facet_full,
            export.ambient_dim,
        ),
        Space::Correlation => (
            export.dim_corr,
            export.codim_corr,
            export.is_facet_corr,
            export.m_a * export.m_b,
        ),
    };
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert(
        "space".into(),
        match space {
            Space::Full => "full",
            Space::Correlation => "correlation",
        }
        .into(),
    );
    obj.insert("dim".into(), dim.into());
    obj.insert("codim".into(), codim.into());
    obj.insert("space_dim".into(), ambient.into());
    obj.insert("is_facet".into(), facet.into());
    emit(&value, cfg)
}

fn cmd_trivial_facet(
    ma: usize,
    mb: usize,
    x0: usize,
    y0: usize,
    sign: &str,
    cfg: &RunConfig,
) -> Result<(), Failure> {
    let sign: i8 = match sign {
        "+" | "+1" | "1" => 1,
        "-" | "-1" => -1,
        other => return Err(Failure::invalid(anyhow!("--sign must be + or -, got {other:?}"))),
    };
    let r = trivial_facet_check(ma, mb, x0, y0, sign, cfg.enum_cap)?;
    emit(
        &TrivialFacetReport {
            m_a: ma,
            m_b: mb,
            x0,
            y0,
            sign,
            dim: r.dim,
            is_facet: r.is_facet,
            num_vertices: r.num_vertices,
        },
        cfg,
    )
}

fn cmd_probe(file: &Path, probe: ProbeConfig, cfg: &RunConfig) -> Result<(), Failure> {
    let game = load(file)?;
    let r = quantum_face_probe(&game, &probe, &cfg.solver())?;
    emit(
        &ProbeReport {
            dim_lower_bound: r.dim_lower_bound,
            thm3_bound: r.thm3_bound,
            samples_accepted: r.samples_accepted,
            rank_tol: probe.rank_tol,
            singular_values: r.singular_values,
            note: "sampled optima only: dim_lower_bound is a lower bound on the optimal quantum face dimension",
        },
        cfg,
    )
}

fn cmd_nlc(command: &NlcCommand, cfg: &RunConfig) -> Result<(), Failure> {
    match command {
        NlcCommand::Spectrum { file } => {
            let spec = load_nlc(file)?;
            emit(&SpectrumReport::from(&hadamard_spectrum(&spec)), cfg)
        }
        NlcCommand::Bound { file } => {
            let spec = load_nlc(file)?;
            let analysis = hadamard_spectrum(&spec);
            let bound = nlc_bias_bound(&analysis, &build_nlc(&spec), &cfg.caps())?;
            emit(&BoundReport::from(&bound), cfg)
        }
        NlcCommand::G0 { n } => {
            let g = g0_dimension(*n, cfg.enum_cap)?;
            emit(&G0Report::new(*n, &g), cfg)
        }
        NlcCommand::Corollary { n } => emit(&CorollaryReport::new(*n, &corollary_bound(*n)?), cfg),
        NlcCommand::Build {
            n,
            q_tilde,
            f_z,
            definition,
        } => {
            let q = q_tilde
                .iter()
                .map(|s| parse_rational(s.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::invalid(e.into()))?;
            let parsed = NlcSpec::new(*n, q, f_z.clone())?;
            warn_large(*n);
            if *definition {
                emit(&NlcFile::from_spec(&parsed), cfg)
            } else {
                emit(&GameFile::from_game(&build_nlc(&parsed)), cfg)
            }
        }
    }
}

fn cmd_family(name: &str, n_min: u32, n_max: u32, cfg: &RunConfig) -> Result<(), Failure> {
    if n_min == 0 || n_min > n_max {
        return Err(Failure::invalid(anyhow!("need 1 <= --n-min <= --n-max")));
    }
    warn_large(n_max);
    let mut points = Vec::new();
    for n in n_min..=n_max {
        let game = NamedGame::parse(name, Some(n))?.build()?;
        let r = face_report(&game, &cfg.face())?;
        points.push(FamilyPoint {
            n,
            size: game.m_a(),
            xi_c: format_rational(&r.xi_c),
            xi_q: r.xi_q,
            classification: r.classification.as_str(),
            num_vertices: r.num_vertices,
            dim_full: r.dim_full,
            dim_corr: r.dim_corr,
            codim_full: r.codim_full,
            codim_corr: r.codim_corr,
            dim_bound: r.bound_thm1_dim,
            provenance: r.provenance.as_str(),
        });
    }
    emit(
        &FamilyReport {
            family: name.to_string(),
            points,
        },
        cfg,
    )
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("TIGHTBELL_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::invalid(anyhow!("TIGHTBELL_THREADS must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::invalid(e.into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let cfg = RunConfig::from_args(&cli.run)?;
    match &cli.command {
        Command::Make { name, n } => cmd_make(name, *n, &cfg),
        Command::Bias { kind, file } => cmd_bias(*kind, file, &cfg),
        Command::Face { file, space } => cmd_face(file, *space, &cfg),
        Command::TrivialFacet {
            ma,
            mb,
            x0,
            y0,
            sign,
        } => cmd_trivial_facet(*ma, *mb, *x0, *y0, sign, &cfg),
        Command::Probe {
            file,
            samples,
            perturb_scale,
            rank_tol,
        } => cmd_probe(
            file,
            ProbeConfig {
                samples: *samples,
                perturb_scale: *perturb_scale,
                rank_tol: *rank_tol,
            },
            &cfg,
        ),
        Command::Nlc { command } => cmd_nlc(command, &cfg),
        Command::Family { name, n_min, n_max } => cmd_family(name, *n_min, *n_max, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Failure::INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
