//! Challenge and reply enumeration over packed core positions.
//!
//! Challenger moves come in two flavours: the *normalized* space (drop the
//! height by exactly one and demand maximal-size element sets — sufficient by
//! a domination argument) and the *full* space (every legal height drop and
//! every legal pair of challenge sets). Defender replies likewise come as the
//! *lazy* family (canonical cores only: decrement-by-one on standing heights,
//! matches exactly where forced, arbitrary padding of the A-sets) and the
//! *full* family (every legal successor position, no canonicalization).

use super::intern::{Core, Ctx, Pairs};
use super::{AdamMode, EveMode};

/// A challenger move in packed form: the next height (as a residual round
/// count) and the two challenge masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Challenge {
    pub residual: u8,
    pub b0: u32,
    pub b1: u32,
}

fn bits_of(mask: u32) -> Vec<u8> {
    (0..32u8).filter(|b| mask & (1 << b) != 0).collect()
}

/// All subsets of `pool` with at most `max_bits` bits, in ascending order.
pub(crate) fn subsets_within(pool: u32, max_bits: usize) -> Vec<u32> {
    let mut out: Vec<u32> = vec![0];
    for bit in bits_of(pool) {
        let bit = 1u32 << bit;
        let snapshot = out.len();
        for k in 0..snapshot {
            let s = out[k];
            if (s.count_ones() as usize) < max_bits {
                out.push(s | bit);
            }
        }
    }
    out.sort_unstable();
    out
}

/// All supersets of `base` with total popcount exactly `size`, drawing extra
/// bits from `pool` (which must be disjoint from `base`), ascending.
pub(crate) fn supersets_of_size(base: u32, pool: u32, size: usize) -> Vec<u32> {
    let have = base.count_ones() as usize;
    if size < have {
        return Vec::new();
    }
    let need = size - have;
    let mut out = Vec::new();
    for s in subsets_within(pool, need) {
        if (s.count_ones() as usize) == need {
            out.push(base | s);
        }
    }
    out.sort_unstable();
    out
}

/// Maximal challenge-set pairs at a core: every superset of each A-set of
/// size `min(θ, |universe|)`. Shared by the normalized challenger and the
/// fixpoint computations.
pub(crate) fn maximal_challenge_sets(ctx: &Ctx, core: &Core) -> Vec<(u32, u32)> {
    let a0 = core.a0_mask();
    let a1 = core.a1_mask();
    let t0 = ctx.theta.min(ctx.n0);
    let t1 = ctx.theta.min(ctx.n1);
    let b0s = supersets_of_size(a0, ctx.full0 & !a0, t0);
    let b1s = supersets_of_size(a1, ctx.full1 & !a1, t1);
    let mut out = Vec::with_capacity(b0s.len() * b1s.len());
    for &b0 in &b0s {
        for &b1 in &b1s {
            out.push((b0, b1));
        }
    }
    out
}

/// Challenger moves at a core with `n` rounds remaining (n ≥ 1).
pub(crate) fn adam_challenges(ctx: &Ctx, core: &Core, n: u8, mode: AdamMode) -> Vec<Challenge> {
    match mode {
        AdamMode::Normalized => maximal_challenge_sets(ctx, core)
            .into_iter()
            .map(|(b0, b1)| Challenge {
                residual: n - 1,
                b0,
                b1,
            })
            .collect(),
        AdamMode::Full => {
            let a0 = core.a0_mask();
            let a1 = core.a1_mask();
            let slack0 = ctx.theta - a0.count_ones() as usize;
            let slack1 = ctx.theta - a1.count_ones() as usize;
            // Any subset whose union with the A-set stays within θ. Bits
            // already in the A-set are free; list subsets of the complement
            // and then re-attach every subset of the A-set itself.
            let fresh0 = subsets_within(ctx.full0 & !a0, slack0);
            let olds0 = subsets_within(a0, ctx.theta);
            let fresh1 = subsets_within(ctx.full1 & !a1, slack1);
            let olds1 = subsets_within(a1, ctx.theta);
            let mut b0s: Vec<u32> = Vec::new();
            for &f in &fresh0 {
                for &o in &olds0 {
                    b0s.push(f | o);
                }
            }
            b0s.sort_unstable();
            b0s.dedup();
            let mut b1s: Vec<u32> = Vec::new();
            for &f in &fresh1 {
                for &o in &olds1 {
                    b1s.push(f | o);
                }
            }
            b1s.sort_unstable();
            b1s.dedup();
            let mut out = Vec::new();
            for residual in (0..n).rev() {
                for &b0 in &b0s {
                    for &b1 in &b1s {
                        out.push(Challenge { residual, b0, b1 });
                    }
                }
            }
            out
        }
    }
}

/// Defender replies to a challenge, as packed cores.
///
/// `new_cap` is the height assigned to unforced new elements in lazy mode
/// (the finite solver passes `min(α−1, residual+1)`, the fixpoint
/// computations pass `α−1`). Full mode ignores it and enumerates every legal
/// height.
pub(crate) fn eve_reply_cores(
    ctx: &Ctx,
    core: &Core,
    ch: &Challenge,
    mode: EveMode,
    new_cap: u8,
) -> Vec<Core> {
    let a0 = core.a0_mask();
    let a1 = core.a1_mask();
    let base0 = a0 | ch.b0;
    let base1 = a1 | ch.b1;
    if base0.count_ones() as usize > ctx.theta || base1.count_ones() as usize > ctx.theta {
        // The challenge overflows θ on one side: no legal replies.
        return Vec::new();
    }
    let exts0 = subsets_within(
        ctx.full0 & !base0,
        ctx.theta - base0.count_ones() as usize,
    );
    let exts1 = subsets_within(
        ctx.full1 & !base1,
        ctx.theta - base1.count_ones() as usize,
    );
    let mut out = Vec::new();
    for &e0 in &exts0 {
        let a0q = base0 | e0;
        for &e1 in &exts1 {
            let a1q = base1 | e1;
            match mode {
                EveMode::Lazy => lazy_replies_into(ctx, core, a0q, a1q, new_cap, &mut out),
                EveMode::Full => full_replies_into(ctx, core, a0q, a1q, &mut out),
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Lazy replies for fixed successor A-sets. Standing positive heights drop
/// by exactly one; elements that reach zero (and, when the cap is zero, all
/// new elements) must be matched now; everything else stays unmatched, new
/// elements entering at the cap. Match partners may be forced elements of
/// the other side, fresh elements, or standing positive elements taken to
/// zero early.
fn lazy_replies_into(ctx: &Ctx, core: &Core, a0q: u32, a1q: u32, new_cap: u8, out: &mut Vec<Core>) {
    let dom = core.dom_mask();
    let ran = core.ran_mask();
    let a0 = core.a0_mask();
    let a1 = core.a1_mask();
    let mut forced0: Vec<u8> = Vec::new();
    let mut forced1: Vec<u8> = Vec::new();
    for (e, h) in &core.h0 {
        if dom & (1 << e) == 0 && *h == 1 {
            forced0.push(*e);
        }
    }
    for (e, h) in &core.h1 {
        if ran & (1 << e) == 0 && *h == 1 {
            forced1.push(*e);
        }
    }
    if new_cap == 0 {
        forced0.extend(bits_of(a0q & !a0));
        forced1.extend(bits_of(a1q & !a1));
        forced0.sort_unstable();
        forced1.sort_unstable();
    }

    let mut g = core.g.clone();
    let mut matchings: Vec<Vec<(u8, u8)>> = Vec::new();
    let mut acc: Vec<(u8, u8)> = Vec::new();

    // Backtracking over partners for the forced elements of side 0, then for
    // the still-unmatched forced elements of side 1.
    fn rec0(
        ctx: &Ctx,
        g: &mut Pairs,
        forced0: &[u8],
        forced1: &[u8],
        a0q: u32,
        a1q: u32,
        acc: &mut Vec<(u8, u8)>,
        matchings: &mut Vec<Vec<(u8, u8)>>,
    ) {
        if let Some((&f, rest)) = forced0.split_first() {
            let taken: u32 = g.iter().fold(0, |m, (_, b)| m | (1 << b));
            for t in bits_of(a1q & !taken) {
                if g.len() == g.capacity() || !ctx.can_add(g, f, t) {
                    continue;
                }
                g.push((f, t));
                acc.push((f, t));
                rec0(ctx, g, rest, forced1, a0q, a1q, acc, matchings);
                acc.pop();
                g.pop();
            }
            return;
        }
        rec1(ctx, g, forced1, a0q, acc, matchings);
    }

    fn rec1(
        ctx: &Ctx,
        g: &mut Pairs,
        forced1: &[u8],
        a0q: u32,
        acc: &mut Vec<(u8, u8)>,
        matchings: &mut Vec<Vec<(u8, u8)>>,
    ) {
        let Some((&f, rest)) = forced1.split_first() else {
            matchings.push(acc.clone());
            return;
        };
        let taken_ran: u32 = g.iter().fold(0, |m, (_, b)| m | (1 << b));
        if taken_ran & (1 << f) != 0 {
            // Already matched as a partner of a forced side-0 element.
            rec1(ctx, g, rest, a0q, acc, matchings);
            return;
        }
        let taken_dom: u32 = g.iter().fold(0, |m, (a, _)| m | (1 << a));
        for s in bits_of(a0q & !taken_dom) {
            if g.len() == g.capacity() || !ctx.can_add(g, s, f) {
                continue;
            }
            g.push((s, f));
            acc.push((s, f));
            rec1(ctx, g, rest, a0q, acc, matchings);
            acc.pop();
            g.pop();
        }
    }

    rec0(
        ctx,
        &mut g,
        &forced0,
        &forced1,
        a0q,
        a1q,
        &mut acc,
        &mut matchings,
    );

    for matching in matchings {
        let mut q = Core::empty();
        q.g = core.g.clone();
        for &(s, t) in &matching {
            q.push_pair(s, t);
        }
        let domq = q.dom_mask();
        let ranq = q.ran_mask();
        let mut ok = true;
        for e in bits_of(a0q) {
            let h = if domq & (1 << e) != 0 {
                0
            } else if a0 & (1 << e) != 0 {
                let old = core.height0(e).expect("element of the old A-set");
                // Forced elements were matched above; unmatched old elements
                // have height ≥ 2 here unless they were already at 0+matched.
                if old == 0 {
                    ok = false;
                    break;
                }
                old - 1
            } else {
                new_cap
            };
            q.push_h0(e, h);
        }
        if !ok {
            continue;
        }
        for e in bits_of(a1q) {
            let h = if ranq & (1 << e) != 0 {
                0
            } else if a1 & (1 << e) != 0 {
                let old = core.height1(e).expect("element of the old A-set");
                if old == 0 {
                    ok = false;
                    break;
                }
                old - 1
            } else {
                new_cap
            };
            q.push_h1(e, h);
        }
        if ok {
            out.push(q);
        }
    }
}

/// Full replies for fixed successor A-sets: every partial-isomorphism
/// extension of the standing match inside the A-sets, combined with every
/// legal height assignment (strict drops on standing positive heights, any
/// value below α on new elements, zero only on matched elements).
fn full_replies_into(ctx: &Ctx, core: &Core, a0q: u32, a1q: u32, out: &mut Vec<Core>) {
    let dom = core.dom_mask();
    let ran = core.ran_mask();
    let sources = bits_of(a0q & !dom);
    let targets_pool = a1q & !ran;

    let mut g = core.g.clone();
    let mut extensions: Vec<Pairs> = Vec::new();

    fn rec(
        ctx: &Ctx,
        g: &mut Pairs,
        sources: &[u8],
        targets_pool: u32,
        extensions: &mut Vec<Pairs>,
    ) {
        let Some((&s, rest)) = sources.split_first() else {
            extensions.push(g.clone());
            return;
        };
        // Leave `s` unmatched.
        rec(ctx, g, rest, targets_pool, extensions);
        let taken: u32 = g.iter().fold(0, |m, (_, b)| m | (1 << b));
        for t in bits_of(targets_pool & !taken) {
            if g.len() == g.capacity() || !ctx.can_add(g, s, t) {
                continue;
            }
            g.push((s, t));
            rec(ctx, g, rest, targets_pool, extensions);
            g.pop();
        }
    }
    rec(ctx, &mut g, &sources, targets_pool, &mut extensions);

    let a0 = core.a0_mask();
    let a1 = core.a1_mask();
    for ext in extensions {
        let mut q_base = Core::empty();
        q_base.g = ext.clone();
        q_base.g.sort_unstable();
        let domq = q_base.dom_mask();
        let ranq = q_base.ran_mask();

        // Per-element candidate heights.
        let mut slots: Vec<(bool, u8, Vec<u8>)> = Vec::new(); // (side1?, elem, options)
        let mut feasible = true;
        for e in bits_of(a0q) {
            let matched = domq & (1 << e) != 0;
            let opts: Vec<u8> = if a0 & (1 << e) != 0 {
                let old = core.height0(e).expect("element of the old A-set");
                if old == 0 {
                    if matched {
                        vec![0]
                    } else {
                        feasible = false;
                        break;
                    }
                } else {
                    let lo = if matched { 0 } else { 1 };
                    (lo..old).collect()
                }
            } else {
                let lo = if matched { 0 } else { 1 };
                (lo..ctx.alpha).collect()
            };
            if opts.is_empty() {
                feasible = false;
                break;
            }
            slots.push((false, e, opts));
        }
        if feasible {
            for e in bits_of(a1q) {
                let matched = ranq & (1 << e) != 0;
                let opts: Vec<u8> = if a1 & (1 << e) != 0 {
                    let old = core.height1(e).expect("element of the old A-set");
                    if old == 0 {
                        if matched {
                            vec![0]
                        } else {
                            feasible = false;
                            break;
                        }
                    } else {
                        let lo = if matched { 0 } else { 1 };
                        (lo..old).collect()
                    }
                } else {
                    let lo = if matched { 0 } else { 1 };
                    (lo..ctx.alpha).collect()
                };
                if opts.is_empty() {
                    feasible = false;
                    break;
                }
                slots.push((true, e, opts));
            }
        }
        if !feasible {
            continue;
        }

        // Cartesian product over the candidate heights.
        let mut choice = vec![0usize; slots.len()];
        loop {
            let mut q = q_base.clone();
            for (idx, (side1, e, opts)) in slots.iter().enumerate() {
                let h = opts[choice[idx]];
                if *side1 {
                    q.push_h1(*e, h);
                } else {
                    q.push_h0(*e, h);
                }
            }
            out.push(q);
            // Advance the mixed-radix counter.
            let mut k = 0;
            loop {
                if k == slots.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < slots[k].2.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == slots.len() {
                break;
            }
        }
    }
}
