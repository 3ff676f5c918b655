//! Word-equation systems over free semigroups and the combinatorial
//! machinery around them: a brute-force/Levi solution oracle, positive bases
//! of integer lattices under generic length functionals, exact-rational band
//! pseudogroups with the interval moves and their scheduler, and verifiable
//! solution-graph / resolution / diagram data checked against the oracle.
//!
//! Everything is exact: words are interned symbol sequences, lattice data is
//! arbitrary-precision integers and rationals, and band systems use rational
//! interval arithmetic with no floating point anywhere.

pub mod diagrams;
pub mod jsonio;
pub mod lattice;
pub mod oracle;
pub mod parse;
pub mod pseudogroup;
pub mod rng;
pub mod systems;
pub mod words;

pub use oracle::{SearchBudget, SolutionSet};
pub use systems::{EquationSystem, Substitution};
pub use words::{Alphabet, GroupWord, PositiveWord};
