//! Desk-scale toolkit for modeling the time-to-solution of a program split
//! between a conventional CPU and a quantum annealer.
//!
//! The pieces, in pipeline order:
//!
//! - [`chimera`]: the annealer's hardware connectivity graph, with
//!   fabrication-fault masks.
//! - [`qubo_ising`]: QUBO and Ising problem forms, exact translation
//!   between them, parameter quantization, and embedded parameter setting.
//! - [`embedding`]: minor embedding of logical graphs into hardware with a
//!   randomized shortest-path heuristic, plus a strict validator.
//! - [`aspen`]: a small analytical performance-model language (machine and
//!   application models) with parser, linker, printer and evaluator.
//! - [`perf`]: built-in closed forms of the three application stages
//!   (pre-processing, quantum execution, post-processing) and the scaling
//!   sweep that exposes where the time goes.
//! - [`sampler`]: Bernoulli repetition simulation and readout
//!   post-processing (heapsort, unembedding).

pub mod aspen;
pub mod chimera;
pub mod embedding;
pub mod perf;
pub mod qubo_ising;
pub mod sampler;

pub use aspen::{MachineRates, TimingReport};
pub use chimera::{build_chimera, ChimeraGraph, FaultMask, QubitId};
pub use embedding::{find_embedding_cmr, validate_embedding, CmrParams, Embedding, LogicalGraph};
pub use perf::{repetitions, stage1_time, stage2_time, stage3_time, sweep, StageParams};
pub use qubo_ising::{qubo_to_ising, IsingModel, QuboInstance};
