//! Solution sets of systems of equations in virtually abelian groups.
//!
//! A virtually abelian group is presented as an extension of `Z^k` by a
//! finite coset set (action matrices, cocycle, coset multiplication table).
//! Systems of group equations are reduced coset tuple by coset tuple to
//! twisted equations over `Z^k` and then to integer linear systems. From the
//! linear systems the crate builds EDT0L systems (L-systems with rational
//! control) accepting the solution language in normal form, multi-tape
//! automata accepting solution tuples, polyhedral witnesses for the solution
//! sets, and exact weighted growth series with verified rational fits.

pub mod edt0l;
pub mod equations;
pub mod format;
pub mod group;
pub mod growth;
pub mod matrix;
pub mod polyhedral;

pub use equations::{CosetDecomposition, GroupEquationSystem, LinearSystem, TwistedSystem};
pub use group::{GroupElement, GroupSpec, WeightedGeneratingSet};
pub use matrix::{IntMatrix, UnimodularDecomposition};
pub use polyhedral::{ElementarySet, PolyhedralSet, WeightVector};
