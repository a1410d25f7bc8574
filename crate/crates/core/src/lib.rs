//! Exact engine for parameterized similarity games on finite structures.
//!
//! The game `DG^β_{θ,α}(M₀, M₁)` is played between Adam and Eve on two
//! finite structures: Adam plays a strictly descending ordinal below `β`
//! plus challenge sets of size ≤ `θ` on either board, and Eve answers with
//! extended position sets, strictly decreasing element heights below `α`,
//! and a partial isomorphism matching every height-0 element. This crate
//! decides the winner exactly, extracts and verifies positional strategies,
//! composes winning strategies along natural ordinal sums, computes
//! back-and-forth families, and partitions structure catalogs into the
//! induced equivalence classes.
//!
//! Modules:
//! - [`ordinal`]: Cantor-normal-form ordinal arithmetic below ε₀,
//!   including the natural (Hessenberg) sum.
//! - [`structure`]: finite structures, vocabularies, partial isomorphisms,
//!   generators, and the JSON wire format.
//! - [`game`]: the game itself — position validation, move enumeration,
//!   the exact solver, positional strategies (extraction, verification,
//!   composition), winning-height levels, and the unbounded-length game.
//! - [`backforth`]: back-and-forth families of size-bounded partial
//!   isomorphisms and their refinement ranks.
//! - [`logic`]: catalog partitions under the induced equivalence,
//!   sentences as unions of classes with boolean and particularization
//!   operations, the substructure-agreement test, and the transitivity
//!   counterexample search.

pub mod backforth;
pub mod game;
pub mod logic;
pub mod ordinal;
pub mod structure;
