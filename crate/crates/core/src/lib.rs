//! Analysis of two-player XOR games (correlation Bell inequalities).
//!
//! * [`game`]: games, game matrices, strategies, behaviours, named families.
//! * [`classical`]: exact classical bias and the complete optimal vertex set.
//! * [`qsdp`]: certified quantum bias via the unit-diagonal SDP and its dual.
//! * [`facegeom`]: exact face dimensions of the Bell polytope and the
//!   dimension/codimension bounds for games without quantum advantage.
//! * [`nlc`]: non-local computation games and their Hadamard spectrum.
//! * [`io`]: JSON file formats and report schemas.

pub mod classical;
pub mod exact;
pub mod facegeom;
pub mod game;
pub mod io;
pub mod nlc;
pub mod qsdp;
pub mod rational;

pub use classical::{classical_bias, optimal_vertices, EnumerationCaps};
pub use facegeom::{face_report, FaceConfig, FaceReport};
pub use game::{make_named, Behaviour, DeterministicStrategy, GameMatrix, NamedGame, XorGame};
pub use nlc::{build_nlc, hadamard_spectrum, NlcSpec};
pub use qsdp::{solve_quantum_bias, Classification, QuantumBiasResult, SolverConfig};
pub use rational::Rational;
