//! Back-and-forth families of partial isomorphisms with a size bound.
//!
//! Level 0 holds every partial isomorphism of size at most θ between the
//! two boards. A map survives to the next level if, for every subset `A`
//! of size at most θ on *either* board, some map of the current level
//! extends it and covers `A` — where covering means `A ⊆ dom(g)` when `A`
//! lives on the left board and `A ⊆ ran(g)` when it lives on the right.
//! Because the levels shrink monotonically, requiring witnesses in every
//! earlier level is the same as requiring them one level down, so the
//! refinement is a plain fixpoint iteration.
//!
//! The size bound applies to the witnesses too: they are drawn from the
//! previous level. With a finite bound this has teeth — on a board larger
//! than θ, a nonempty map always faces a challenge set disjoint from part
//! of its domain, and any covering extension would exceed θ elements. So
//! nonempty maps die at level 1 there, and only boards of size ≤ θ exhibit
//! the classical behavior where the families stabilize to the restrictions
//! of full isomorphisms.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::structure::{is_partial_isomorphism, PartialMap, Structure, StructureError};

/// Errors from family computations.
#[derive(Debug, Error)]
pub enum KarpError {
    /// The two structures interpret different vocabularies.
    #[error("the structures have different vocabularies")]
    VocabularyMismatch,
    /// The queried map does not belong to level 0.
    #[error("the map does not pass level 0: {reason}")]
    NotInLevelZero { reason: String },
    /// The work counter crossed the caller's budget.
    #[error("work budget exceeded after {work} units")]
    BudgetExceeded { work: u64 },
    /// A structure-level failure (unknown element, bad vocabulary, …).
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// One level of the family: the set of surviving maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KarpLevel {
    pub gamma: Ordinal,
    pub maps: BTreeSet<PartialMap>,
}

/// The computed prefix of the level sequence.
///
/// `levels[k]` is level `k`. When the iteration reaches a level equal to
/// its predecessor within the requested range, `stabilized_at` records the
/// first such stationary index and the sequence stops there; every later
/// level equals `levels[stabilized_at]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KarpLevels {
    pub levels: Vec<KarpLevel>,
    pub stabilized_at: Option<u64>,
}

impl KarpLevels {
    /// The level at index `gamma`, reading past the stabilization point if
    /// necessary.
    pub fn level(&self, gamma: u64) -> Option<&KarpLevel> {
        let idx = usize::try_from(gamma).ok()?;
        if idx < self.levels.len() {
            return self.levels.get(idx);
        }
        if self.stabilized_at.is_some() {
            return self.levels.last();
        }
        None
    }
}

/// The largest level a map belongs to, or `Stable` if it survives past
/// stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KarpRank {
    Level(u64),
    Stable,
}

impl std::fmt::Display for KarpRank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KarpRank::Level(n) => write!(f, "{n}"),
            KarpRank::Stable => write!(f, "stable"),
        }
    }
}

impl Serialize for KarpRank {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            KarpRank::Level(n) => serializer.serialize_u64(*n),
            KarpRank::Stable => serializer.serialize_str("stable"),
        }
    }
}

impl<'de> Deserialize<'de> for KarpRank {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = KarpRank;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a level number or the string \"stable\"")
            }
            fn visit_u64<E: serde::de::Error>(self, n: u64) -> Result<KarpRank, E> {
                Ok(KarpRank::Level(n))
            }
            fn visit_str<E: serde::de::Error>(self, s: &str) -> Result<KarpRank, E> {
                if s == "stable" {
                    Ok(KarpRank::Stable)
                } else {
                    Err(E::custom(format!("expected \"stable\", found {s:?}")))
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

struct Budget {
    work: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self, amount: u64) -> Result<(), KarpError> {
        self.work = self.work.saturating_add(amount);
        if self.work > self.limit {
            Err(KarpError::BudgetExceeded { work: self.work })
        } else {
            Ok(())
        }
    }
}

/// All maps of level 0: injective, atomic-fact-preserving, size ≤ θ.
fn level_zero(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    budget: &mut Budget,
) -> Result<BTreeSet<PartialMap>, KarpError> {
    let u0 = m0.universe();
    let u1 = m1.universe();
    let theta = theta as usize;
    let mut out = BTreeSet::new();
    // Depth-first growth, taking sources in increasing order; a map that
    // fails the atomic check cannot be repaired by adding pairs, so the
    // whole branch is pruned.
    let mut stack: Vec<(usize, Vec<(String, String)>)> = vec![(0, Vec::new())];
    while let Some((from, pairs)) = stack.pop() {
        budget.spend(1)?;
        let map = PartialMap::from_pairs(pairs.clone())?;
        if !is_partial_isomorphism(m0, m1, &map)? {
            continue;
        }
        if pairs.len() < theta {
            for (i, source) in u0.iter().enumerate().skip(from) {
                for target in u1 {
                    if pairs.iter().any(|(_, t)| t == target) {
                        continue;
                    }
                    let mut next = pairs.clone();
                    next.push((source.clone(), target.clone()));
                    stack.push((i + 1, next));
                }
            }
        }
        out.insert(map);
    }
    Ok(out)
}

/// All nonempty subsets of `universe` of size ≤ θ. The empty challenge is
/// omitted: any map covers it by extending itself.
fn challenge_sets(universe: &[String], theta: u32) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut partial: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..theta.min(universe.len() as u32) {
        let mut next = Vec::new();
        for prefix in &partial {
            let from = prefix
                .last()
                .map_or(0, |last| universe.iter().position(|u| u == last).unwrap() + 1);
            for item in &universe[from..] {
                let mut set = prefix.clone();
                set.push(item.clone());
                next.push(set);
            }
        }
        out.extend(next.iter().cloned());
        partial = next;
    }
    out
}

fn covers_dom(g: &PartialMap, a: &[String]) -> bool {
    a.iter().all(|x| g.contains_source(x))
}

fn covers_ran(g: &PartialMap, a: &[String]) -> bool {
    a.iter().all(|x| g.contains_target(x))
}

/// One refinement round: keep the maps for which every challenge set on
/// either board has a covering extension in the current level.
fn refine(
    current: &BTreeSet<PartialMap>,
    side0: &[Vec<String>],
    side1: &[Vec<String>],
    budget: &mut Budget,
) -> Result<BTreeSet<PartialMap>, KarpError> {
    let mut next = BTreeSet::new();
    'maps: for f in current {
        for a in side0 {
            budget.spend(1)?;
            let mut found = false;
            for g in current {
                budget.spend(1)?;
                if g.is_extension_of(f) && covers_dom(g, a) {
                    found = true;
                    break;
                }
            }
            if !found {
                continue 'maps;
            }
        }
        for a in side1 {
            budget.spend(1)?;
            let mut found = false;
            for g in current {
                budget.spend(1)?;
                if g.is_extension_of(f) && covers_ran(g, a) {
                    found = true;
                    break;
                }
            }
            if !found {
                continue 'maps;
            }
        }
        next.insert(f.clone());
    }
    Ok(next)
}

/// Computes levels `0..=up_to`, stopping early at the first stationary
/// level. Stabilization is always reached within |level 0| rounds, so a
/// generous `up_to` yields the full sequence.
pub fn karp_levels(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    up_to: u64,
    budget: u64,
) -> Result<KarpLevels, KarpError> {
    if m0.vocabulary() != m1.vocabulary() {
        return Err(KarpError::VocabularyMismatch);
    }
    let mut budget = Budget { work: 0, limit: budget };
    let side0 = challenge_sets(m0.universe(), theta);
    let side1 = challenge_sets(m1.universe(), theta);
    let mut levels = vec![KarpLevel {
        gamma: Ordinal::zero(),
        maps: level_zero(m0, m1, theta, &mut budget)?,
    }];
    let mut stabilized_at = None;
    while (levels.len() as u64) <= up_to {
        let current = &levels.last().unwrap().maps;
        let next = refine(current, &side0, &side1, &mut budget)?;
        if next == *current {
            stabilized_at = Some(levels.len() as u64 - 1);
            break;
        }
        levels.push(KarpLevel {
            gamma: Ordinal::from_nat(levels.len() as u64),
            maps: next,
        });
    }
    Ok(KarpLevels { levels, stabilized_at })
}

/// Whether level `beta` of the family is nonempty.
pub fn karp_equiv(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    beta: u64,
    budget: u64,
) -> Result<bool, KarpError> {
    let levels = karp_levels(m0, m1, theta, beta, budget)?;
    Ok(levels
        .level(beta)
        .map_or(false, |level| !level.maps.is_empty()))
}

/// The largest level containing `f`, or `Stable` if `f` survives the
/// stationary level. Errors when `f` is not a partial isomorphism of size
/// at most θ (i.e. not a member of level 0).
pub fn karp_rank(
    m0: &Structure,
    m1: &Structure,
    theta: u32,
    f: &PartialMap,
    budget: u64,
) -> Result<KarpRank, KarpError> {
    if m0.vocabulary() != m1.vocabulary() {
        return Err(KarpError::VocabularyMismatch);
    }
    if f.len() > theta as usize {
        return Err(KarpError::NotInLevelZero {
            reason: format!("the map has {} pairs, above the bound {theta}", f.len()),
        });
    }
    if !is_partial_isomorphism(m0, m1, f)? {
        return Err(KarpError::NotInLevelZero {
            reason: "the map is not a partial isomorphism".to_string(),
        });
    }
    let levels = karp_levels(m0, m1, theta, u64::MAX, budget)?;
    let mut rank = 0;
    for (idx, level) in levels.levels.iter().enumerate() {
        if level.maps.contains(f) {
            rank = idx as u64;
        } else {
            break;
        }
    }
    match levels.stabilized_at {
        Some(stable) if rank == stable => Ok(KarpRank::Stable),
        _ => Ok(KarpRank::Level(rank)),
    }
}
