//! Parity-game solving by lifting attractor decompositions embedded in
//! ordered trees.
//!
//! The crate provides the game model and PGSolver I/O, attractors, ordered
//! levelled trees and their lazification, labellings with validity and
//! destinations, the asymmetric lifting solver, the symmetric two-labelling
//! solver with its short-lift/reset variant, the generic attractor-based
//! recursion, classic Zielonka, and a cross-checking harness.

pub mod asym;
pub mod attractor;
pub mod error;
pub mod game;
pub mod generate;
pub mod harness;
pub mod labelling;
pub mod lazy;
pub mod pgsolver;
pub mod recursive;
pub mod strategy;
pub mod symmetric;
pub mod tree;
pub mod universal_graph;
pub mod vertex_set;

pub use asym::{lift_to_fixpoint, solve_asymmetric, LiftPolicy, SolveStats, TargetRule, VertexSelection};
pub use attractor::{attractor, attractor_in, attractor_through, one_step_reach, AttractorResult};
pub use error::{GameError, LabellingError, SolveError, TreeError};
pub use game::{ParityGame, Player, PositionalStrategy, Priority, Vertex, WinningPartition};
pub use generate::{enumerate_tiny_games, random_game};
pub use harness::{cross_check, cross_check_batch, oracle_enumerate, CrossCheckOptions, CrossCheckReport};
pub use labelling::{Labelling, LabellingPair};
pub use lazy::{LazySpace, Pos, PosKind};
pub use pgsolver::{parse_pgsolver, serialize_pgsolver, NormalizationNote, PriorityMode};
pub use recursive::{check_frame_correspondence, solve_universal, solve_variant, zielonka, FrameReport, UniversalRun};
pub use strategy::{verify_strategy_wins, StrategyVerdict};
pub use symmetric::{
    solve_symmetric, EngineOptions, InterleavingNode, Mode, PairLift, SymmetricResult, SymmetricStats, Trace,
    TraceEvent,
};
pub use tree::{tree_inclusion, OrderedLevelledTree, Shape, TreeChoice};
pub use universal_graph::{check_labelling_correspondence, LinearGraph};
pub use vertex_set::VertexSet;
