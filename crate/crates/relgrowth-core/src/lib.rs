//! Exact counting and spectral analysis for strongly Markov automata.
//!
//! Given a finite labeled directed graph whose paths from a distinguished
//! initial vertex enumerate the elements of a group (one path per element,
//! path length equal to word length), together with a homomorphism to
//! `Z^nu` supplied on the generators, this crate computes:
//!
//! * exact counts `N(n, w)` of length-`n` elements mapping to each lattice
//!   point `w`, by arbitrary-precision dynamic programming
//!   ([`counting`]);
//! * the structural decomposition of the transition matrix into strongly
//!   connected components, their spectral radii, periods and the masked
//!   matrices attached to each maximal component ([`automaton`],
//!   [`components`]);
//! * character-twisted transfer matrices, their maximal eigendata and
//!   torus scans locating the characters of maximal spectral radius
//!   ([`spectral`]);
//! * the integer lattices generated by cycle weights and by differences of
//!   equal-length cycle weights, their quotient data and dual character
//!   sets ([`lattice`]);
//! * exact minimal linear recurrences and power-corrected exponential fits
//!   of the resulting sequences ([`series`]).
//!
//! A brute-force free-group oracle ([`oracle`]) provides an independent
//! cross-check of every count. All integer results are exact; floating
//! point appears only in spectral quantities and fits, never in counts.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `relgrowth` binary crate.

#![cfg_attr(not(test), no_std)]
// Index loops mirror the matrix algebra throughout the numeric modules.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod automaton;
pub mod components;
pub mod counting;
pub mod eig;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod series;
pub mod spectral;
pub mod weights;

pub use automaton::{Automaton, GeneratorSet, ParseError, ParsedAutomaton, ValidationReport};
pub use components::{Component, ComponentAnalysis, MaskedMatrix};
pub use counting::CountTable;
pub use lattice::{IntegerLattice, LatticeReport};
pub use oracle::{FreeGroupSpec, OracleBall};
pub use series::{FitResult, RecurrenceResult};
pub use spectral::{EigenData, SpectralScan, WeightedMatrix};
pub use weights::{EdgeWeighting, Homomorphism, WeightVec, MAX_DIM};
