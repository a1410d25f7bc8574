//! The parameterized similarity game and its exact solver.
//!
//! Two finite structures over a shared vocabulary are compared in a
//! two-player game. A position carries a height (an ordinal round budget),
//! one bounded element set per structure, a partial isomorphism between the
//! two sets, and a clock value below α for every picked element. The
//! challenger lowers the height and throws in up to θ elements per side; the
//! defender answers with a successor position whose sets cover the
//! challenge, whose match extends the old one, and whose clocks weakly
//! decrease — strictly while positive. A clock that reaches zero pins its
//! element: zero-height elements must be matched. Whoever cannot move
//! loses; at height zero the challenger is stuck and the defender wins.
//!
//! The solver works over packed canonical cores (matched elements at clock
//! zero, unmatched clocks capped by the residual round count) with a
//! memoized alternating search. Three move-space modes are exposed:
//!
//! * `normalized` — the challenger drops the height by exactly one and
//!   always throws maximal-size sets (sufficient by a domination argument);
//! * `lazy` — additionally the defender only answers with canonical cores:
//!   standing clocks tick down by exactly one, matches happen exactly where
//!   forced, and the element sets may be padded arbitrarily (the default);
//! * `full` — both players range over their entire legal move spaces, with
//!   no canonicalization; exact but much slower, useful as a cross-check.
//!
//! Each solve call is internally sequential and deterministic; independent
//! calls are safe to run in parallel.

mod heights;
mod intern;
mod moves;
mod solve;
mod verify;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::structure::{is_partial_isomorphism, PartialMap, Structure, StructureError};

pub use verify::{compose, eve_trivial_strategy, verify_eve_strategy};

/// Errors from game operations.
#[derive(Debug, Error)]
pub enum GameError {
    #[error("the two structures have different vocabularies")]
    VocabularyMismatch,
    #[error("unknown element id {id:?}")]
    UnknownElement { id: String },
    #[error("inadmissible parameters: {reason}")]
    InadmissibleParams { reason: String },
    #[error("work budget exhausted after {nodes} solver steps")]
    BudgetExceeded { nodes: u64 },
    #[error("{which} strategy failed verification")]
    UnverifiableStrategy { which: String },
    #[error("middle structure mismatch: {detail}")]
    MiddleMismatch { detail: String },
    #[error("parameter mismatch: {detail}")]
    ParamMismatch { detail: String },
    #[error("invalid position: {reason}")]
    InvalidPosition { reason: String },
    #[error("internal solver invariant violated: {detail}")]
    Internal { detail: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Game parameters: the starting height β, the per-side set bound θ ≥ 1,
/// and the clock bound α ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameParams {
    pub beta: Ordinal,
    pub theta: u32,
    pub alpha: Ordinal,
}

impl GameParams {
    pub fn new(beta: Ordinal, theta: u32, alpha: Ordinal) -> GameParams {
        GameParams { beta, theta, alpha }
    }

    /// θ and α must be positive.
    pub fn validate(&self) -> Result<(), GameError> {
        if self.theta == 0 {
            return Err(GameError::InadmissibleParams {
                reason: "theta must be at least 1".to_string(),
            });
        }
        if self.alpha.is_zero() {
            return Err(GameError::InadmissibleParams {
                reason: "alpha must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Which player wins under optimal play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Eve,
    Adam,
}

/// Move-space selection for solving and enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Normalized,
    Full,
    #[default]
    Lazy,
}

impl Mode {
    pub fn adam(self) -> AdamMode {
        match self {
            Mode::Full => AdamMode::Full,
            Mode::Normalized | Mode::Lazy => AdamMode::Normalized,
        }
    }

    pub fn eve(self) -> EveMode {
        match self {
            Mode::Lazy => EveMode::Lazy,
            Mode::Normalized | Mode::Full => EveMode::Full,
        }
    }
}

/// Challenger move-space flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdamMode {
    Normalized,
    Full,
}

/// Defender move-space flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EveMode {
    Lazy,
    Full,
}

/// A game position. Clocks are stored per side (`h0` for elements of the
/// first structure, `h1` for the second) since element ids may collide
/// across the two universes; together they form the single clock function
/// on the disjoint union of the A-sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub height: Ordinal,
    pub a0: BTreeSet<String>,
    pub a1: BTreeSet<String>,
    pub g: PartialMap,
    pub h0: BTreeMap<String, Ordinal>,
    pub h1: BTreeMap<String, Ordinal>,
}

impl Position {
    /// The starting position: empty sets at height β.
    pub fn start(beta: Ordinal) -> Position {
        Position {
            height: beta,
            a0: BTreeSet::new(),
            a1: BTreeSet::new(),
            g: PartialMap::new(),
            h0: BTreeMap::new(),
            h1: BTreeMap::new(),
        }
    }
}

/// A position with the height stripped: the state that recurs across
/// heights in the fixpoint computations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CorePosition {
    pub a0: BTreeSet<String>,
    pub a1: BTreeSet<String>,
    pub g: PartialMap,
    pub h0: BTreeMap<String, Ordinal>,
    pub h1: BTreeMap<String, Ordinal>,
}

impl From<Position> for CorePosition {
    fn from(p: Position) -> CorePosition {
        CorePosition {
            a0: p.a0,
            a1: p.a1,
            g: p.g,
            h0: p.h0,
            h1: p.h1,
        }
    }
}

/// A challenger move: the next height and the two challenge sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AdamMove {
    pub height: Ordinal,
    pub b0: BTreeSet<String>,
    pub b1: BTreeSet<String>,
}

/// A positional defender strategy: a set of positions closed under
/// answering challenges (see [`verify_eve_strategy`]).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalStrategy {
    pub positions: BTreeSet<Position>,
}

/// One refutation entry: at `position` the challenger plays `refuting_move`
/// and every defender reply stays inside the table (or is dominated by one
/// that does).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationEntry {
    pub position: Position,
    pub refuting_move: AdamMove,
}

/// A table of refuting challenger moves covering the defender's undominated
/// replies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationTable {
    pub entries: Vec<RefutationEntry>,
}

/// Solver counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes_expanded: u64,
    pub memo_hits: u64,
}

/// Solver outcome. `strategy` is present when the defender wins at a finite
/// height and extraction was requested; `refutation` when the challenger
/// wins at a finite height and extraction was requested.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub winner: Winner,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<PositionalStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<RefutationTable>,
    pub stats: SolveStats,
}

/// Solver options.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Bound on elementary solver steps (position expansions plus candidate
    /// replies generated).
    pub node_budget: u64,
    /// Memoize verdicts per orbit under the two automorphism groups. Off by
    /// default; never changes verdicts.
    pub symmetry_reduction: bool,
    /// Extract a positional strategy on a defender win.
    pub extract_strategy: bool,
    /// Extract a refutation table on a challenger win.
    pub extract_refutation: bool,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            mode: Mode::default(),
            node_budget: 10_000_000,
            symmetry_reduction: false,
            extract_strategy: true,
            extract_refutation: false,
        }
    }
}

/// The winning-height level sequence over canonical cores: `levels[n]` is
/// the set of cores from which the defender survives n more rounds, listed
/// up to and including the stabilization rank.
#[derive(Debug, Clone, Serialize)]
pub struct WinningHeights {
    pub levels: Vec<BTreeSet<CorePosition>>,
    pub rank: usize,
}

/// Largest finite round count the packed solver accepts.
const MAX_ROUNDS: u64 = 200;

fn finite_rounds(beta: &Ordinal) -> Result<u8, GameError> {
    let n = beta.to_nat().ok_or_else(|| GameError::InadmissibleParams {
        reason: format!("height {beta} is not finite"),
    })?;
    if n > MAX_ROUNDS {
        return Err(GameError::InadmissibleParams {
            reason: format!("height {beta} exceeds the solver bound of {MAX_ROUNDS} rounds"),
        });
    }
    Ok(n as u8)
}

/// Effective finite clock bound for enumeration contexts that must range
/// over every height below α.
fn exact_alpha(alpha: &Ordinal) -> Result<u8, GameError> {
    let n = alpha.to_nat().ok_or_else(|| GameError::InadmissibleParams {
        reason: format!("clock bound {alpha} must be finite for full enumeration"),
    })?;
    if n == 0 || n > MAX_ROUNDS + 1 {
        return Err(GameError::InadmissibleParams {
            reason: format!("clock bound {alpha} is outside the supported range"),
        });
    }
    Ok(n as u8)
}

/// Clamped finite clock bound for lazy contexts, where entry heights are
/// capped by the residual anyway; an infinite α behaves like a very large
/// finite one there.
fn clamped_alpha(alpha: &Ordinal) -> Result<u8, GameError> {
    if alpha.is_zero() {
        return Err(GameError::InadmissibleParams {
            reason: "alpha must be at least 1".to_string(),
        });
    }
    Ok(match alpha.to_nat() {
        Some(n) if n <= u8::MAX as u64 => n as u8,
        _ => u8::MAX,
    })
}

/// Validates the full position invariant list against the parameters and
/// the two boards. Unknown element ids are errors; everything else reports
/// as a plain `false`.
pub fn validate_position(
    p: &Position,
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
) -> Result<bool, GameError> {
    if m0.vocabulary() != m1.vocabulary() {
        return Err(GameError::VocabularyMismatch);
    }
    let known0 = |id: &str| m0.universe().iter().any(|e| e == id);
    let known1 = |id: &str| m1.universe().iter().any(|e| e == id);
    for id in p
        .a0
        .iter()
        .map(String::as_str)
        .chain(p.h0.keys().map(String::as_str))
        .chain(p.g.sources())
    {
        if !known0(id) {
            return Err(GameError::UnknownElement { id: id.to_string() });
        }
    }
    for id in p
        .a1
        .iter()
        .map(String::as_str)
        .chain(p.h1.keys().map(String::as_str))
        .chain(p.g.targets())
    {
        if !known1(id) {
            return Err(GameError::UnknownElement { id: id.to_string() });
        }
    }
    if p.height > params.beta {
        return Ok(false);
    }
    if p.a0.len() > params.theta as usize || p.a1.len() > params.theta as usize {
        return Ok(false);
    }
    if p.h0.keys().cloned().collect::<BTreeSet<_>>() != p.a0
        || p.h1.keys().cloned().collect::<BTreeSet<_>>() != p.a1
    {
        return Ok(false);
    }
    for (a, b) in p.g.iter() {
        if !p.a0.contains(a) || !p.a1.contains(b) {
            return Ok(false);
        }
    }
    if !is_partial_isomorphism(m0, m1, &p.g)? {
        return Ok(false);
    }
    for (a, h) in &p.h0 {
        if *h >= params.alpha {
            return Ok(false);
        }
        if h.is_zero() && !p.g.contains_source(a) {
            return Ok(false);
        }
    }
    for (b, h) in &p.h1 {
        if *h >= params.alpha {
            return Ok(false);
        }
        if h.is_zero() && !p.g.contains_target(b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is `q` a legal successor of `p`: lower height, grown sets, extended
/// match, clocks weakly decreasing and strictly while positive?
pub fn extends(q: &Position, p: &Position) -> bool {
    if q.height >= p.height {
        return false;
    }
    if !q.a0.is_superset(&p.a0) || !q.a1.is_superset(&p.a1) {
        return false;
    }
    if !q.g.is_extension_of(&p.g) {
        return false;
    }
    for (a, hp) in &p.h0 {
        let Some(hq) = q.h0.get(a) else {
            return false;
        };
        if hq > hp || (!hp.is_zero() && hq == hp) {
            return false;
        }
    }
    for (b, hp) in &p.h1 {
        let Some(hq) = q.h1.get(b) else {
            return false;
        };
        if hq > hp || (!hp.is_zero() && hq == hp) {
            return false;
        }
    }
    true
}

/// Challenger moves at a valid position with finite height. In normalized
/// mode the height drops by exactly one and both challenge sets have
/// maximal size; in full mode every height drop and every θ-respecting set
/// pair is listed. Positions at limit heights are not enumerable here: the
/// unbounded game is handled by the stabilization solver instead.
pub fn adam_moves(
    p: &Position,
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
    mode: AdamMode,
) -> Result<Vec<AdamMove>, GameError> {
    params.validate()?;
    if p.height.is_zero() {
        return Ok(Vec::new());
    }
    let n = finite_rounds(&p.height)?;
    let alpha = clamped_alpha(&params.alpha)?;
    let ctx = intern::Ctx::build(m0, m1, params.theta, alpha, false)?;
    let core = ctx.core_of_position(p)?;
    let engine = solve::Engine::new(&ctx, mode, EveMode::Lazy, false, u64::MAX);
    Ok(moves::adam_challenges(&ctx, &core, n, mode)
        .into_iter()
        .map(|ch| engine.challenge_to_move(&ch))
        .collect())
}

/// Defender replies to a challenger move at a valid position. Replies to an
/// illegal move (height not below the position's, or a challenge set that
/// would overflow θ) come back empty. Lazy mode lists exactly the canonical
/// (undominated) replies; full mode lists every legal successor position
/// and therefore needs a finite α.
pub fn eve_replies(
    p: &Position,
    mv: &AdamMove,
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
    mode: EveMode,
) -> Result<Vec<Position>, GameError> {
    params.validate()?;
    let alpha = match mode {
        EveMode::Lazy => clamped_alpha(&params.alpha)?,
        EveMode::Full => exact_alpha(&params.alpha)?,
    };
    let ctx = intern::Ctx::build(m0, m1, params.theta, alpha, false)?;
    let core = ctx.core_of_position(p)?;
    let mut b0: u32 = 0;
    for id in &mv.b0 {
        b0 |= 1 << ctx.index0(id)?;
    }
    let mut b1: u32 = 0;
    for id in &mv.b1 {
        b1 |= 1 << ctx.index1(id)?;
    }
    if mv.height >= p.height {
        return Ok(Vec::new());
    }
    let residual = finite_rounds(&mv.height)?;
    let union0 = core.a0_mask() | b0;
    let union1 = core.a1_mask() | b1;
    if union0.count_ones() > params.theta || union1.count_ones() > params.theta {
        return Ok(Vec::new());
    }
    let ch = moves::Challenge { residual, b0, b1 };
    let new_cap = match mode {
        EveMode::Lazy => (alpha - 1).min(residual.saturating_add(1)),
        EveMode::Full => 0, // unused in full mode
    };
    Ok(moves::eve_reply_cores(&ctx, &core, &ch, mode, new_cap)
        .into_iter()
        .map(|c| ctx.position_of_core(mv.height.clone(), &c))
        .collect())
}

/// Winner of the game continued from an arbitrary valid position, under
/// the same move-generation mode and budget as `solve`. Requires a finite
/// height and a finite clock bound; callers holding an unbounded bound
/// reduce it first (α = ω plays like α = β + 1, and the ω-height game is
/// decided by the stabilized level sequence). Interactive front ends use
/// this to pick winning moves online.
pub fn position_winner(
    p: &Position,
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
    options: &SolveOptions,
) -> Result<Winner, GameError> {
    params.validate()?;
    if !validate_position(p, params, m0, m1)? {
        return Err(GameError::InvalidPosition {
            reason: "the position violates the ruleset for these parameters".to_string(),
        });
    }
    let n = finite_rounds(&p.height)?;
    let alpha = exact_alpha(&params.alpha)?;
    let ctx = intern::Ctx::build(m0, m1, params.theta, alpha, options.symmetry_reduction)?;
    let core = ctx.core_of_position(p)?;
    let mut engine = solve::Engine::new(
        &ctx,
        options.mode.adam(),
        options.mode.eve(),
        options.symmetry_reduction,
        options.node_budget,
    );
    let eve = engine.eve_wins(n, &core)?;
    Ok(if eve { Winner::Eve } else { Winner::Adam })
}

/// Solves the game: β finite or ω, α finite or ω.
///
/// Finite β runs the memoized alternating search. An infinite α is
/// equivalent to α = β + 1 there (clocks above the round budget never force
/// a match). At β = ω the defender wins iff the empty core survives the
/// stabilized winning-height level; no finite strategy object is emitted.
/// At β = ω with α = ω the defender always wins outright.
pub fn solve(
    m0: &Structure,
    m1: &Structure,
    params: &GameParams,
    options: &SolveOptions,
) -> Result<SolveResult, GameError> {
    params.validate()?;
    if m0.vocabulary() != m1.vocabulary() {
        return Err(GameError::VocabularyMismatch);
    }
    let omega = Ordinal::omega();
    if params.beta > omega || params.alpha > omega {
        return Err(GameError::InadmissibleParams {
            reason: "solving requires beta ≤ w and alpha ≤ w".to_string(),
        });
    }
    if params.beta == omega {
        if params.alpha == omega {
            // The defender survives forever by keeping every clock one above
            // the announced height and never matching.
            return Ok(SolveResult {
                winner: Winner::Eve,
                strategy: None,
                refutation: None,
                stats: SolveStats::default(),
            });
        }
        let alpha = exact_alpha(&params.alpha)?;
        let ctx = intern::Ctx::build(m0, m1, params.theta, alpha, options.symmetry_reduction)?;
        let (levels, rank, work) = heights::level_sequence(&ctx, options.node_budget)?;
        let empty = intern::Core::empty();
        let winner = if levels[rank].binary_search(&empty).is_ok() {
            Winner::Eve
        } else {
            Winner::Adam
        };
        return Ok(SolveResult {
            winner,
            strategy: None,
            refutation: None,
            stats: SolveStats {
                nodes_expanded: work,
                memo_hits: 0,
            },
        });
    }

    let beta = finite_rounds(&params.beta)?;
    let alpha = if params.alpha == omega {
        beta + 1
    } else {
        exact_alpha(&params.alpha)?
    };
    let ctx = intern::Ctx::build(m0, m1, params.theta, alpha, options.symmetry_reduction)?;
    let mut engine = solve::Engine::new(
        &ctx,
        options.mode.adam(),
        options.mode.eve(),
        options.symmetry_reduction,
        options.node_budget,
    );
    let start = intern::Core::empty();
    let eve = engine.eve_wins(beta, &start)?;
    let strategy = if eve && options.extract_strategy {
        Some(PositionalStrategy {
            positions: engine.extract_strategy(beta)?,
        })
    } else {
        None
    };
    let refutation = if !eve && options.extract_refutation {
        Some(engine.extract_refutation(beta)?)
    } else {
        None
    };
    Ok(SolveResult {
        winner: if eve { Winner::Eve } else { Winner::Adam },
        strategy,
        refutation,
        stats: SolveStats {
            nodes_expanded: engine.nodes,
            memo_hits: engine.hits,
        },
    })
}

/// The winning-height level sequence S(0) ⊇ S(1) ⊇ … over canonical cores,
/// up to and including the stabilization rank. Requires a finite α.
pub fn winning_heights(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    alpha: &Ordinal,
    options: &SolveOptions,
) -> Result<WinningHeights, GameError> {
    let alpha = exact_alpha(alpha)?;
    let ctx = intern::Ctx::build(m0, m1, theta, alpha, false)?;
    let (levels, rank, _work) = heights::level_sequence(&ctx, options.node_budget)?;
    Ok(WinningHeights {
        levels: levels
            .into_iter()
            .map(|level| {
                level
                    .iter()
                    .map(|c| ctx.core_position_of_core(c))
                    .collect()
            })
            .collect(),
        rank,
    })
}

/// Solves the unbounded-length game (the challenger never announces a
/// height and play lasts for ever) by computing the greatest fixpoint of
/// the survival transition with a deletion pass — an implementation
/// independent of [`winning_heights`]. Requires a finite α.
pub fn solve_infinite(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    alpha: &Ordinal,
    options: &SolveOptions,
) -> Result<Winner, GameError> {
    let alpha = exact_alpha(alpha)?;
    let ctx = intern::Ctx::build(m0, m1, theta, alpha, false)?;
    let fixpoint = heights::greatest_fixpoint(&ctx, options.node_budget)?;
    let empty = intern::Core::empty();
    Ok(if fixpoint.binary_search(&empty).is_ok() {
        Winner::Eve
    } else {
        Winner::Adam
    })
}

/// The greatest fixpoint of the survival transition, as core positions.
/// Exposed so the level sequence and the fixpoint can be compared directly.
pub fn infinite_fixpoint(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    alpha: &Ordinal,
    options: &SolveOptions,
) -> Result<BTreeSet<CorePosition>, GameError> {
    let alpha = exact_alpha(alpha)?;
    let ctx = intern::Ctx::build(m0, m1, theta, alpha, false)?;
    let fixpoint = heights::greatest_fixpoint(&ctx, options.node_budget)?;
    Ok(fixpoint
        .iter()
        .map(|c| ctx.core_position_of_core(c))
        .collect())
}
