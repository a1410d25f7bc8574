//! Strategy verification, the uniform non-committal strategy, and strategy
//! composition across a shared middle structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::ordinal::Ordinal;
use crate::structure::{PartialMap, Structure};

use super::{
    adam_moves, extends, validate_position, AdamMode, GameError, GameParams, Position,
    PositionalStrategy,
};

/// Checks that `k` is a winning positional defender strategy: every member
/// is a valid position, the starting position is present, and every member
/// with positive height answers every challenger move (from the given move
/// space) with some member that extends it and covers the challenge.
pub fn verify_eve_strategy(
    k: &PositionalStrategy,
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
    mode: AdamMode,
) -> Result<bool, GameError> {
    params.validate()?;
    let start = Position::start(params.beta.clone());
    if !k.positions.contains(&start) {
        return Ok(false);
    }
    for p in &k.positions {
        if !validate_position(p, params, m0, m1)? {
            return Ok(false);
        }
    }
    // Group members by height for candidate lookup.
    let mut by_height: BTreeMap<&Ordinal, Vec<&Position>> = BTreeMap::new();
    for p in &k.positions {
        by_height.entry(&p.height).or_default().push(p);
    }
    for p in &k.positions {
        if p.height.is_zero() {
            continue;
        }
        for mv in adam_moves(p, params, m0, m1, mode)? {
            let candidates = by_height.get(&mv.height).map_or(&[][..], |v| &v[..]);
            let answered = candidates.iter().any(|q| {
                extends(q, p)
                    && mv.b0.iter().all(|e| q.a0.contains(e))
                    && mv.b1.iter().all(|e| q.a1.contains(e))
            });
            if !answered {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The uniform non-committal strategy for β ≤ α: besides the start, one
/// position per height n < β and per pair of maximal-size element sets,
/// with the empty match and every clock at n + 1. The defender then always
/// pads to full sets and never matches anything, so later challenges bring
/// nothing new.
///
/// When β < α (or α is infinite) the clocks n + 1 stay below α and the
/// family verifies. When β equals a finite α the clocks are capped at
/// α − 1; the returned family is the natural candidate but genuinely fails
/// verification — with clocks forced to reach zero the defender must match
/// maximal sets across boards of different sizes.
pub fn eve_trivial_strategy(
    params: &GameParams,
    m0: &Structure,
    m1: &Structure,
) -> Result<PositionalStrategy, GameError> {
    params.validate()?;
    if m0.vocabulary() != m1.vocabulary() {
        return Err(GameError::VocabularyMismatch);
    }
    if params.beta > params.alpha {
        return Err(GameError::InadmissibleParams {
            reason: "the uniform strategy requires beta ≤ alpha".to_string(),
        });
    }
    let beta = params.beta.to_nat().ok_or_else(|| GameError::InadmissibleParams {
        reason: "the uniform strategy needs a finite beta".to_string(),
    })?;
    let mut positions = BTreeSet::new();
    positions.insert(Position::start(params.beta.clone()));
    let t0 = (params.theta as usize).min(m0.universe().len());
    let t1 = (params.theta as usize).min(m1.universe().len());
    let sets0 = fixed_size_subsets(m0.universe(), t0);
    let sets1 = fixed_size_subsets(m1.universe(), t1);
    for n in 0..beta {
        let clock = {
            let natural = Ordinal::from_nat(n + 1);
            if natural < params.alpha {
                natural
            } else {
                // β equals a finite α: cap at α − 1.
                params
                    .alpha
                    .pred()
                    .expect("a finite positive alpha is a successor")
            }
        };
        for s0 in &sets0 {
            for s1 in &sets1 {
                positions.insert(Position {
                    height: Ordinal::from_nat(n),
                    a0: s0.clone(),
                    a1: s1.clone(),
                    g: PartialMap::new(),
                    h0: s0.iter().map(|e| (e.clone(), clock.clone())).collect(),
                    h1: s1.iter().map(|e| (e.clone(), clock.clone())).collect(),
                });
            }
        }
    }
    Ok(PositionalStrategy { positions })
}

fn fixed_size_subsets(universe: &[String], size: usize) -> Vec<BTreeSet<String>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn rec(
        universe: &[String],
        size: usize,
        from: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<String>>,
    ) {
        if current.len() == size {
            out.push(current.iter().map(|&i| universe[i].clone()).collect());
            return;
        }
        for i in from..universe.len() {
            current.push(i);
            rec(universe, size, i + 1, current, out);
            current.pop();
        }
    }
    rec(universe, size, 0, &mut current, &mut out);
    out
}

/// Composes two winning defender strategies across the shared middle
/// structure. Both inputs must verify (normalized space) at their own
/// parameters, which must agree on β and θ. The result is a winning
/// strategy for the outer pair at the natural-sum clock bound α ⊕ α′, built
/// by composing every compatible pair of member positions.
pub fn compose(
    kab: &PositionalStrategy,
    params_ab: &GameParams,
    kbc: &PositionalStrategy,
    params_bc: &GameParams,
    m0: &Structure,
    m1: &Structure,
    m2: &Structure,
) -> Result<PositionalStrategy, GameError> {
    if params_ab.beta != params_bc.beta {
        return Err(GameError::ParamMismatch {
            detail: format!(
                "strategy heights differ: {} vs {}",
                params_ab.beta, params_bc.beta
            ),
        });
    }
    if params_ab.theta != params_bc.theta {
        return Err(GameError::ParamMismatch {
            detail: format!(
                "strategy set bounds differ: {} vs {}",
                params_ab.theta, params_bc.theta
            ),
        });
    }
    for p in &kab.positions {
        for e in &p.a1 {
            if !m1.universe().contains(e) {
                return Err(GameError::MiddleMismatch {
                    detail: format!("left strategy mentions {e:?}, not in the middle universe"),
                });
            }
        }
    }
    for q in &kbc.positions {
        for e in &q.a0 {
            if !m1.universe().contains(e) {
                return Err(GameError::MiddleMismatch {
                    detail: format!("right strategy mentions {e:?}, not in the middle universe"),
                });
            }
        }
    }
    if !verify_eve_strategy(kab, params_ab, m0, m1, AdamMode::Normalized)? {
        return Err(GameError::UnverifiableStrategy {
            which: "left".to_string(),
        });
    }
    if !verify_eve_strategy(kbc, params_bc, m1, m2, AdamMode::Normalized)? {
        return Err(GameError::UnverifiableStrategy {
            which: "right".to_string(),
        });
    }
    let mut positions = BTreeSet::new();
    for p in &kab.positions {
        for q in &kbc.positions {
            if p.height != q.height {
                continue;
            }
            if !p.a1.is_subset(&q.a0) {
                continue;
            }
            positions.insert(compose_pair(p, q, &params_ab.alpha, &params_bc.alpha));
        }
    }
    Ok(PositionalStrategy { positions })
}

/// Composes one compatible pair of positions. Side-0 clocks: a standing
/// positive clock gains the whole right budget (h ⊕ α′); a matched element
/// inherits the clock of its image. Side-2 clocks mirror this (α ⊕ h); a
/// matched element inherits the clock of its preimage when the left
/// position knows it, and otherwise sits at α — strictly below α ⊕ α′, and
/// resolved one round later once the preimage enters the left position.
fn compose_pair(p: &Position, q: &Position, alpha_ab: &Ordinal, alpha_bc: &Ordinal) -> Position {
    let mut g = PartialMap::new();
    for (a, w) in p.g.iter() {
        if let Some(x) = q.g.get(w) {
            g.insert(a.to_string(), x.to_string())
                .expect("composition of injective maps is injective");
        }
    }
    let mut h0 = BTreeMap::new();
    for (a, h) in &p.h0 {
        let value = if h.is_zero() {
            let w = p.g.get(a).expect("zero clocks are matched in valid positions");
            q.h0
                .get(w)
                .expect("the left image set is inside the right domain set")
                .clone()
        } else {
            h.nat_sum(alpha_bc)
        };
        h0.insert(a.clone(), value);
    }
    let mut h1 = BTreeMap::new();
    for (x, h) in &q.h1 {
        let value = if h.is_zero() {
            let w = q
                .g
                .get_inverse(x)
                .expect("zero clocks are matched in valid positions");
            match p.h1.get(w) {
                Some(hw) => hw.clone(),
                None => alpha_ab.clone(),
            }
        } else {
            alpha_ab.nat_sum(h)
        };
        h1.insert(x.clone(), value);
    }
    Position {
        height: p.height.clone(),
        a0: p.a0.clone(),
        a1: q.a1.clone(),
        g,
        h0,
        h1,
    }
}
