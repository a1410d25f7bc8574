//! The finite-height solver: memoized alternating search over packed cores,
//! plus extraction of a positional defender strategy (on a win) or a table
//! of refuting challenger moves (on a loss).

use std::collections::{BTreeSet, HashMap};

use crate::ordinal::Ordinal;

use super::intern::{Core, Ctx};
use super::moves::{adam_challenges, eve_reply_cores, Challenge};
use super::{AdamMode, AdamMove, EveMode, GameError, Position, RefutationEntry, RefutationTable};

pub(crate) struct Engine<'a> {
    pub ctx: &'a Ctx<'a>,
    pub adam_mode: AdamMode,
    pub eve_mode: EveMode,
    /// Lazy mode caps entry heights by the residual; full mode must not.
    pub cap_by_residual: bool,
    pub symmetry_reduction: bool,
    pub budget: u64,
    pub work: u64,
    pub nodes: u64,
    pub hits: u64,
    memo: HashMap<(u8, Core), bool>,
}

impl<'a> Engine<'a> {
    pub fn new(
        ctx: &'a Ctx<'a>,
        adam_mode: AdamMode,
        eve_mode: EveMode,
        symmetry_reduction: bool,
        budget: u64,
    ) -> Engine<'a> {
        Engine {
            ctx,
            adam_mode,
            eve_mode,
            cap_by_residual: eve_mode == EveMode::Lazy,
            symmetry_reduction,
            budget,
            work: 0,
            nodes: 0,
            hits: 0,
            memo: HashMap::new(),
        }
    }

    fn spend(&mut self, amount: u64) -> Result<(), GameError> {
        self.work += amount;
        if self.work > self.budget {
            Err(GameError::BudgetExceeded { nodes: self.work })
        } else {
            Ok(())
        }
    }

    fn new_cap(&self, residual: u8) -> u8 {
        if self.cap_by_residual {
            (self.ctx.alpha - 1).min(residual.saturating_add(1))
        } else {
            self.ctx.alpha - 1
        }
    }

    /// Does the defender win with `n` rounds remaining from `core`?
    pub fn eve_wins(&mut self, n: u8, core: &Core) -> Result<bool, GameError> {
        if n == 0 {
            return Ok(true);
        }
        let key_core = if self.symmetry_reduction {
            self.ctx.orbit_min(core)
        } else {
            core.clone()
        };
        if let Some(&v) = self.memo.get(&(n, key_core.clone())) {
            self.hits += 1;
            return Ok(v);
        }
        self.nodes += 1;
        self.spend(1)?;
        let mut result = true;
        for ch in adam_challenges(self.ctx, core, n, self.adam_mode) {
            self.spend(1)?;
            let replies = eve_reply_cores(
                self.ctx,
                core,
                &ch,
                self.eve_mode,
                self.new_cap(ch.residual),
            );
            self.spend(replies.len() as u64)?;
            let mut answered = false;
            for reply in &replies {
                if self.eve_wins(ch.residual, reply)? {
                    answered = true;
                    break;
                }
            }
            if !answered {
                result = false;
                break;
            }
        }
        self.memo.insert((n, key_core), result);
        Ok(result)
    }

    /// Extracts a positional strategy from the winning region, starting at
    /// the empty core with `beta` rounds remaining. Challenges are taken
    /// from the normalized space and replies from the lazy family; the
    /// closure chains make the result answer arbitrary legal challenges.
    pub fn extract_strategy(&mut self, beta: u8) -> Result<BTreeSet<Position>, GameError> {
        let mut seen: BTreeSet<(u8, Core)> = BTreeSet::new();
        let mut queue: Vec<(u8, Core)> = vec![(beta, Core::empty())];
        while let Some((n, core)) = queue.pop() {
            if !seen.insert((n, core.clone())) || n == 0 {
                continue;
            }
            for ch in adam_challenges(self.ctx, &core, n, AdamMode::Normalized) {
                let cap = (self.ctx.alpha - 1).min(ch.residual.saturating_add(1));
                let replies = eve_reply_cores(self.ctx, &core, &ch, EveMode::Lazy, cap);
                self.spend(replies.len() as u64)?;
                let mut chosen = None;
                for reply in &replies {
                    if self.eve_wins(ch.residual, reply)? {
                        chosen = Some(reply.clone());
                        break;
                    }
                }
                let Some(reply) = chosen else {
                    return Err(GameError::Internal {
                        detail: "winning position has a challenge with no winning reply"
                            .to_string(),
                    });
                };
                queue.push((ch.residual, reply));
            }
        }
        Ok(seen
            .into_iter()
            .map(|(n, core)| {
                self.ctx
                    .position_of_core(Ordinal::from_nat(n as u64), &core)
            })
            .collect())
    }

    /// Extracts a table of refuting challenger moves from the losing region,
    /// starting at the empty core with `beta` rounds remaining. Refuting
    /// moves are drawn from the normalized space; the recursion covers every
    /// lazy (undominated) reply to the chosen move, so dominated replies
    /// lose a fortiori.
    pub fn extract_refutation(&mut self, beta: u8) -> Result<RefutationTable, GameError> {
        let mut entries: Vec<(u8, Core, Challenge)> = Vec::new();
        let mut seen: BTreeSet<(u8, Core)> = BTreeSet::new();
        let mut queue: Vec<(u8, Core)> = vec![(beta, Core::empty())];
        while let Some((n, core)) = queue.pop() {
            if !seen.insert((n, core.clone())) {
                continue;
            }
            debug_assert!(n > 0, "the challenger cannot be winning with no rounds left");
            let mut refuting = None;
            for ch in adam_challenges(self.ctx, &core, n, AdamMode::Normalized) {
                let cap = (self.ctx.alpha - 1).min(ch.residual.saturating_add(1));
                let replies = eve_reply_cores(self.ctx, &core, &ch, EveMode::Lazy, cap);
                self.spend(replies.len() as u64)?;
                let mut all_lose = true;
                for reply in &replies {
                    if self.eve_wins(ch.residual, reply)? {
                        all_lose = false;
                        break;
                    }
                }
                if all_lose {
                    refuting = Some((ch, replies));
                    break;
                }
            }
            let Some((ch, replies)) = refuting else {
                return Err(GameError::Internal {
                    detail: "losing position has no refuting challenge".to_string(),
                });
            };
            entries.push((n, core, ch));
            for reply in replies {
                queue.push((ch.residual, reply));
            }
        }
        let mut out: Vec<RefutationEntry> = entries
            .into_iter()
            .map(|(n, core, ch)| RefutationEntry {
                position: self
                    .ctx
                    .position_of_core(Ordinal::from_nat(n as u64), &core),
                refuting_move: self.challenge_to_move(&ch),
            })
            .collect();
        out.sort_by(|a, b| a.position.cmp(&b.position));
        Ok(RefutationTable { entries: out })
    }

    pub fn challenge_to_move(&self, ch: &Challenge) -> AdamMove {
        AdamMove {
            height: Ordinal::from_nat(ch.residual as u64),
            b0: (0..32u8)
                .filter(|b| ch.b0 & (1 << b) != 0)
                .map(|b| self.ctx.id0(b).to_string())
                .collect(),
            b1: (0..32u8)
                .filter(|b| ch.b1 & (1 << b) != 0)
                .map(|b| self.ctx.id1(b).to_string())
                .collect(),
        }
    }
}
