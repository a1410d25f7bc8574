//! Winning-height levels over the canonical core space, and an independent
//! greatest-fixpoint computation for the unbounded-length game.
//!
//! Both computations use the same one-step transition (maximal challenges
//! answered by lazy replies with new elements entering at α−1) but iterate
//! differently: the level sequence recomputes each level from the previous
//! one synchronously, while the fixpoint solver deletes unsupported cores
//! from a sorted universe until a full pass makes no change.

use std::collections::HashSet;

use super::intern::{Core, Ctx, Pairs};
use super::moves::{eve_reply_cores, maximal_challenge_sets, Challenge};
use super::{EveMode, GameError};

/// Every canonical core: A-sets of size ≤ θ, a partial isomorphism matching
/// exactly the height-zero elements, unmatched heights in 1..α.
pub(crate) fn all_canonical_cores(ctx: &Ctx) -> Vec<Core> {
    let mut out = Vec::new();
    let sets0 = super::moves::subsets_within(ctx.full0, ctx.theta);
    let sets1 = super::moves::subsets_within(ctx.full1, ctx.theta);
    for &a0 in &sets0 {
        for &a1 in &sets1 {
            // All partial-isomorphism matchings inside a0 × a1.
            let sources: Vec<u8> = (0..32u8).filter(|b| a0 & (1 << b) != 0).collect();
            let mut g = Pairs::new();
            let mut matchings: Vec<Pairs> = Vec::new();
            fn rec(
                ctx: &Ctx,
                g: &mut Pairs,
                sources: &[u8],
                a1: u32,
                matchings: &mut Vec<Pairs>,
            ) {
                let Some((&s, rest)) = sources.split_first() else {
                    matchings.push(g.clone());
                    return;
                };
                rec(ctx, g, rest, a1, matchings);
                let taken: u32 = g.iter().fold(0, |m, (_, b)| m | (1 << b));
                for t in 0..32u8 {
                    if a1 & !taken & (1 << t) == 0 || !ctx.can_add(g, s, t) {
                        continue;
                    }
                    g.push((s, t));
                    rec(ctx, g, rest, a1, matchings);
                    g.pop();
                }
            }
            rec(ctx, &mut g, &sources, a1, &mut matchings);

            for matching in matchings {
                let dom: u32 = matching.iter().fold(0, |m, (a, _)| m | (1 << a));
                let ran: u32 = matching.iter().fold(0, |m, (_, b)| m | (1 << b));
                let un0: Vec<u8> = (0..32u8).filter(|b| a0 & !dom & (1 << b) != 0).collect();
                let un1: Vec<u8> = (0..32u8).filter(|b| a1 & !ran & (1 << b) != 0).collect();
                if (ctx.alpha == 1) && (!un0.is_empty() || !un1.is_empty()) {
                    continue;
                }
                // Heights for unmatched elements: all tuples over 1..α.
                let slots = un0.len() + un1.len();
                let choices = (ctx.alpha - 1) as usize;
                let mut counter = vec![0usize; slots];
                loop {
                    let mut core = Core::empty();
                    core.g = matching.clone();
                    for (i, &e) in un0.iter().enumerate() {
                        core.push_h0(e, (counter[i] + 1) as u8);
                    }
                    for (i, &e) in un1.iter().enumerate() {
                        core.push_h1(e, (counter[un0.len() + i] + 1) as u8);
                    }
                    for &(a, _) in &matching {
                        core.push_h0(a, 0);
                    }
                    for &(_, b) in &matching {
                        core.push_h1(b, 0);
                    }
                    out.push(core);
                    let mut k = 0;
                    loop {
                        if k == slots {
                            break;
                        }
                        counter[k] += 1;
                        if counter[k] < choices {
                            break;
                        }
                        counter[k] = 0;
                        k += 1;
                    }
                    if k == slots {
                        break;
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// One transition check: does `core` survive when every maximal challenge
/// has some lazy reply inside `alive`?
fn survives<F: Fn(&Core) -> bool>(
    ctx: &Ctx,
    core: &Core,
    alive: &F,
    work: &mut u64,
    budget: u64,
) -> Result<bool, GameError> {
    for (b0, b1) in maximal_challenge_sets(ctx, core) {
        *work += 1;
        if *work > budget {
            return Err(GameError::BudgetExceeded { nodes: *work });
        }
        let ch = Challenge {
            residual: 0,
            b0,
            b1,
        };
        let replies = eve_reply_cores(ctx, core, &ch, EveMode::Lazy, ctx.alpha - 1);
        *work += replies.len() as u64;
        if *work > budget {
            return Err(GameError::BudgetExceeded { nodes: *work });
        }
        if !replies.iter().any(|r| alive(r)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The decreasing level sequence S(0) ⊇ S(1) ⊇ …, stopped at the first
/// repeat. Returns the levels up to and including the stabilization rank.
pub(crate) fn level_sequence(
    ctx: &Ctx,
    budget: u64,
) -> Result<(Vec<Vec<Core>>, usize, u64), GameError> {
    let mut work: u64 = 0;
    let s0 = all_canonical_cores(ctx);
    work += s0.len() as u64;
    if work > budget {
        return Err(GameError::BudgetExceeded { nodes: work });
    }
    let mut levels: Vec<Vec<Core>> = vec![s0];
    loop {
        let current = levels.last().expect("at least one level");
        let member: HashSet<&Core> = current.iter().collect();
        let mut next: Vec<Core> = Vec::new();
        for core in current {
            if survives(ctx, core, &|c: &Core| member.contains(c), &mut work, budget)? {
                next.push(core.clone());
            }
        }
        if next.len() == current.len() {
            let rank = levels.len() - 1;
            return Ok((levels, rank, work));
        }
        levels.push(next);
    }
}

/// The greatest fixpoint of the transition on the canonical core space,
/// computed by repeatedly deleting cores with an unanswered challenge.
pub(crate) fn greatest_fixpoint(ctx: &Ctx, budget: u64) -> Result<Vec<Core>, GameError> {
    let mut work: u64 = 0;
    let universe = all_canonical_cores(ctx);
    work += universe.len() as u64;
    if work > budget {
        return Err(GameError::BudgetExceeded { nodes: work });
    }
    let mut alive = vec![true; universe.len()];
    loop {
        let mut changed = false;
        for idx in 0..universe.len() {
            if !alive[idx] {
                continue;
            }
            let lookup = |c: &Core| -> bool {
                universe
                    .binary_search(c)
                    .map(|pos| alive[pos])
                    .unwrap_or(false)
            };
            if !survives(ctx, &universe[idx], &lookup, &mut work, budget)? {
                alive[idx] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(universe
        .into_iter()
        .zip(alive)
        .filter_map(|(c, a)| a.then_some(c))
        .collect())
}
