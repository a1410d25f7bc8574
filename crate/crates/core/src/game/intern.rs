//! Interned instance data for the solver: elements as small integers, element
//! sets as bitmasks, precomputed atomic-compatibility tables for incremental
//! partial-isomorphism checks, and the packed core-position representation
//! shared by the finite-height solver and the fixpoint computations.

use std::collections::{BTreeMap, HashSet};

use arrayvec::ArrayVec;

use super::{CorePosition, GameError, Position};
use crate::ordinal::Ordinal;
use crate::structure::{PartialMap, Structure};

/// Hard cap on universe sizes for the interned solver (bitmask width).
pub(crate) const MAX_ELEMS: usize = 32;
/// Hard cap on θ for the interned solver (packed vector capacity).
pub(crate) const MAX_THETA: usize = 8;

/// A packed list of matched index pairs.
pub(crate) type Pairs = ArrayVec<(u8, u8), MAX_THETA>;

/// A core position in packed form. `g` holds the matched pairs; `h0`/`h1`
/// hold `(element, height)` for every element of the A-sets (including
/// matched elements, whose stored height is 0 in canonical form but may be
/// positive in full mode). All three lists are sorted by element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Core {
    pub g: Pairs,
    pub h0: Pairs,
    pub h1: Pairs,
}

impl Core {
    pub fn empty() -> Core {
        Core::default()
    }

    pub fn a0_mask(&self) -> u32 {
        self.h0.iter().fold(0, |m, (e, _)| m | (1 << e))
    }

    pub fn a1_mask(&self) -> u32 {
        self.h1.iter().fold(0, |m, (e, _)| m | (1 << e))
    }

    pub fn dom_mask(&self) -> u32 {
        self.g.iter().fold(0, |m, (a, _)| m | (1 << a))
    }

    pub fn ran_mask(&self) -> u32 {
        self.g.iter().fold(0, |m, (_, b)| m | (1 << b))
    }

    pub fn height0(&self, e: u8) -> Option<u8> {
        self.h0.iter().find(|(x, _)| *x == e).map(|(_, h)| *h)
    }

    pub fn height1(&self, e: u8) -> Option<u8> {
        self.h1.iter().find(|(x, _)| *x == e).map(|(_, h)| *h)
    }

    /// Inserts `(element, height)` keeping the list sorted by element.
    pub fn push_h0(&mut self, e: u8, h: u8) {
        let at = self.h0.partition_point(|(x, _)| *x < e);
        self.h0.insert(at, (e, h));
    }

    pub fn push_h1(&mut self, e: u8, h: u8) {
        let at = self.h1.partition_point(|(x, _)| *x < e);
        self.h1.insert(at, (e, h));
    }

    pub fn push_pair(&mut self, a: u8, b: u8) {
        let at = self.g.partition_point(|(x, _)| *x < a);
        self.g.insert(at, (a, b));
    }

}

/// One relation of arity ≥ 3, with tuples packed 5 bits per component.
pub(crate) struct HigherRelation {
    pub arity: usize,
    pub tuples0: HashSet<u64>,
    pub tuples1: HashSet<u64>,
}

pub(crate) fn pack_tuple(tuple: &[u8]) -> u64 {
    tuple.iter().fold(0u64, |acc, &c| (acc << 5) | c as u64)
}

/// The interned instance: index maps, bit universes, compatibility tables,
/// and (optionally) the automorphism lists used for orbit canonicalization.
pub(crate) struct Ctx<'a> {
    pub m0: &'a Structure,
    pub m1: &'a Structure,
    pub n0: usize,
    pub n1: usize,
    pub full0: u32,
    pub full1: u32,
    pub theta: usize,
    /// Effective finite height bound: stored heights are < alpha.
    pub alpha: u8,
    pair_ok: Vec<bool>,
    pair2_ok: Vec<bool>,
    higher: Vec<HigherRelation>,
    pub auts: Option<(Vec<Vec<u8>>, Vec<Vec<u8>>)>,
}

impl<'a> Ctx<'a> {
    pub fn build(
        m0: &'a Structure,
        m1: &'a Structure,
        theta: u32,
        alpha: u8,
        symmetry_reduction: bool,
    ) -> Result<Ctx<'a>, GameError> {
        if m0.vocabulary() != m1.vocabulary() {
            return Err(GameError::VocabularyMismatch);
        }
        let n0 = m0.universe().len();
        let n1 = m1.universe().len();
        if n0 > MAX_ELEMS || n1 > MAX_ELEMS {
            return Err(GameError::InadmissibleParams {
                reason: format!("universe sizes above {MAX_ELEMS} are not supported by the solver"),
            });
        }
        if theta == 0 {
            return Err(GameError::InadmissibleParams {
                reason: "theta must be at least 1".to_string(),
            });
        }
        if theta as usize > MAX_THETA {
            return Err(GameError::InadmissibleParams {
                reason: format!("theta above {MAX_THETA} is not supported by the solver"),
            });
        }
        if alpha == 0 {
            return Err(GameError::InadmissibleParams {
                reason: "alpha must be at least 1".to_string(),
            });
        }
        let idx = |m: &Structure, id: &str| -> u8 {
            m.universe()
                .iter()
                .position(|e| e == id)
                .expect("interpreted element is in the universe") as u8
        };

        // Constant pairs (same vocabulary, so names align).
        let constants: Vec<(u8, u8)> = m0
            .vocabulary()
            .constants()
            .iter()
            .map(|c| {
                (
                    idx(m0, m0.constant(c).expect("constants are total")),
                    idx(m1, m1.constant(c).expect("constants are total")),
                )
            })
            .collect();

        // Split relations by arity.
        let mut unary: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
        let mut binary: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
        let mut higher: Vec<HigherRelation> = Vec::new();
        for (name, &arity) in m0.vocabulary().relations() {
            let t0 = &m0.relations()[name];
            let t1 = &m1.relations()[name];
            match arity {
                1 => {
                    let mut f0 = vec![false; n0];
                    let mut f1 = vec![false; n1];
                    for t in t0 {
                        f0[idx(m0, &t[0]) as usize] = true;
                    }
                    for t in t1 {
                        f1[idx(m1, &t[0]) as usize] = true;
                    }
                    unary.push((f0, f1));
                }
                2 => {
                    let mut f0 = vec![false; n0 * n0];
                    let mut f1 = vec![false; n1 * n1];
                    for t in t0 {
                        f0[idx(m0, &t[0]) as usize * n0 + idx(m0, &t[1]) as usize] = true;
                    }
                    for t in t1 {
                        f1[idx(m1, &t[0]) as usize * n1 + idx(m1, &t[1]) as usize] = true;
                    }
                    binary.push((f0, f1));
                }
                _ => {
                    let tuples0 = t0
                        .iter()
                        .map(|t| {
                            pack_tuple(&t.iter().map(|c| idx(m0, c)).collect::<Vec<_>>())
                        })
                        .collect();
                    let tuples1 = t1
                        .iter()
                        .map(|t| {
                            pack_tuple(&t.iter().map(|c| idx(m1, c)).collect::<Vec<_>>())
                        })
                        .collect();
                    higher.push(HigherRelation {
                        arity,
                        tuples0,
                        tuples1,
                    });
                }
            }
        }

        // pair_ok: constants, unary facts, and binary self-loops.
        let mut pair_ok = vec![true; n0 * n1];
        for i in 0..n0 {
            for j in 0..n1 {
                let mut ok = true;
                for &(c0, c1) in &constants {
                    if (i as u8 == c0) != (j as u8 == c1) {
                        ok = false;
                    }
                }
                for (f0, f1) in &unary {
                    if f0[i] != f1[j] {
                        ok = false;
                    }
                }
                for (f0, f1) in &binary {
                    if f0[i * n0 + i] != f1[j * n1 + j] {
                        ok = false;
                    }
                }
                pair_ok[i * n1 + j] = ok;
            }
        }

        // pair2_ok: binary facts between two distinct pairs (both directions).
        let mut pair2_ok = vec![true; n0 * n1 * n0 * n1];
        for i in 0..n0 {
            for j in 0..n1 {
                for k in 0..n0 {
                    for l in 0..n1 {
                        let mut ok = true;
                        for (f0, f1) in &binary {
                            if f0[i * n0 + k] != f1[j * n1 + l] || f0[k * n0 + i] != f1[l * n1 + j]
                            {
                                ok = false;
                            }
                        }
                        pair2_ok[((i * n1 + j) * n0 + k) * n1 + l] = ok;
                    }
                }
            }
        }

        let auts = if symmetry_reduction {
            Some((automorphisms(m0)?, automorphisms(m1)?))
        } else {
            None
        };

        Ok(Ctx {
            m0,
            m1,
            n0,
            n1,
            full0: if n0 == 32 { u32::MAX } else { (1u32 << n0) - 1 },
            full1: if n1 == 32 { u32::MAX } else { (1u32 << n1) - 1 },
            theta: theta as usize,
            alpha,
            pair_ok,
            pair2_ok,
            higher,
            auts,
        })
    }

    pub fn index0(&self, id: &str) -> Result<u8, GameError> {
        self.m0
            .universe()
            .iter()
            .position(|e| e == id)
            .map(|i| i as u8)
            .ok_or_else(|| GameError::UnknownElement { id: id.to_string() })
    }

    pub fn index1(&self, id: &str) -> Result<u8, GameError> {
        self.m1
            .universe()
            .iter()
            .position(|e| e == id)
            .map(|i| i as u8)
            .ok_or_else(|| GameError::UnknownElement { id: id.to_string() })
    }

    pub fn id0(&self, i: u8) -> &str {
        &self.m0.universe()[i as usize]
    }

    pub fn id1(&self, j: u8) -> &str {
        &self.m1.universe()[j as usize]
    }

    /// Can the pair `(i, j)` be added to the partial isomorphism `g`?
    /// Checks constants, all atomic facts touching the new pair, and (for
    /// arity ≥ 3 relations) all tuples over dom(g) ∪ {i} containing `i`.
    pub fn can_add(&self, g: &[(u8, u8)], i: u8, j: u8) -> bool {
        if !self.pair_ok[i as usize * self.n1 + j as usize] {
            return false;
        }
        for &(k, l) in g {
            if !self.pair2_ok
                [((i as usize * self.n1 + j as usize) * self.n0 + k as usize) * self.n1 + l as usize]
            {
                return false;
            }
        }
        if !self.higher.is_empty() && !self.higher_ok(g, i, j) {
            return false;
        }
        true
    }

    fn higher_ok(&self, g: &[(u8, u8)], i: u8, j: u8) -> bool {
        let mut dom: Vec<(u8, u8)> = g.to_vec();
        dom.push((i, j));
        for rel in &self.higher {
            let r = rel.arity;
            // Enumerate all tuples over the extended domain containing the
            // new source at least once.
            let count = dom.len();
            let total = count.pow(r as u32);
            for code in 0..total {
                let mut c = code;
                let mut t0 = [0u8; 12];
                let mut t1 = [0u8; 12];
                let mut has_new = false;
                for slot in 0..r {
                    let (a, b) = dom[c % count];
                    c /= count;
                    if a == i {
                        has_new = true;
                    }
                    t0[slot] = a;
                    t1[slot] = b;
                }
                if !has_new {
                    continue;
                }
                if rel.tuples0.contains(&pack_tuple(&t0[..r]))
                    != rel.tuples1.contains(&pack_tuple(&t1[..r]))
                {
                    return false;
                }
            }
        }
        true
    }

    /// The minimal image of `core` under the automorphism pair group
    /// (identity when symmetry reduction is disabled).
    pub fn orbit_min(&self, core: &Core) -> Core {
        let Some((aut0, aut1)) = &self.auts else {
            return core.clone();
        };
        let mut best: Option<Core> = None;
        for s0 in aut0 {
            for s1 in aut1 {
                let mut mapped = Core::empty();
                for (a, b) in &core.g {
                    mapped.push_pair(s0[*a as usize], s1[*b as usize]);
                }
                for (e, h) in &core.h0 {
                    mapped.push_h0(s0[*e as usize], *h);
                }
                for (e, h) in &core.h1 {
                    mapped.push_h1(s1[*e as usize], *h);
                }
                if best.as_ref().map_or(true, |b| mapped < *b) {
                    best = Some(mapped);
                }
            }
        }
        best.expect("automorphism lists contain the identity")
    }

    // -- conversions ------------------------------------------------------

    pub fn core_of_position(&self, p: &Position) -> Result<Core, GameError> {
        let mut core = Core::empty();
        for (a, b) in p.g.iter() {
            core.push_pair(self.index0(a)?, self.index1(b)?);
        }
        for (e, h) in &p.h0 {
            core.push_h0(self.index0(e)?, ordinal_to_height(h)?);
        }
        for (e, h) in &p.h1 {
            core.push_h1(self.index1(e)?, ordinal_to_height(h)?);
        }
        if core.h0.len() != p.a0.len() || core.h1.len() != p.a1.len() {
            return Err(GameError::InadmissibleParams {
                reason: "position height maps must cover the A-sets exactly".to_string(),
            });
        }
        for e in &p.a0 {
            let i = self.index0(e)?;
            if core.height0(i).is_none() {
                return Err(GameError::InadmissibleParams {
                    reason: format!("element {e:?} is in a0 but has no height"),
                });
            }
        }
        for e in &p.a1 {
            let i = self.index1(e)?;
            if core.height1(i).is_none() {
                return Err(GameError::InadmissibleParams {
                    reason: format!("element {e:?} is in a1 but has no height"),
                });
            }
        }
        Ok(core)
    }

    pub fn position_of_core(&self, height: Ordinal, core: &Core) -> Position {
        let c = self.core_position_of_core(core);
        Position {
            height,
            a0: c.a0,
            a1: c.a1,
            g: c.g,
            h0: c.h0,
            h1: c.h1,
        }
    }

    pub fn core_position_of_core(&self, core: &Core) -> CorePosition {
        let mut g = PartialMap::new();
        for (a, b) in &core.g {
            g.insert(self.id0(*a).to_string(), self.id1(*b).to_string())
                .expect("packed cores are injective");
        }
        let mut h0 = BTreeMap::new();
        let mut a0 = std::collections::BTreeSet::new();
        for (e, h) in &core.h0 {
            h0.insert(self.id0(*e).to_string(), Ordinal::from_nat(*h as u64));
            a0.insert(self.id0(*e).to_string());
        }
        let mut h1 = BTreeMap::new();
        let mut a1 = std::collections::BTreeSet::new();
        for (e, h) in &core.h1 {
            h1.insert(self.id1(*e).to_string(), Ordinal::from_nat(*h as u64));
            a1.insert(self.id1(*e).to_string());
        }
        CorePosition { a0, a1, g, h0, h1 }
    }
}

pub(crate) fn ordinal_to_height(h: &Ordinal) -> Result<u8, GameError> {
    let n = h.to_nat().ok_or_else(|| GameError::InadmissibleParams {
        reason: format!("height value {h} is not finite"),
    })?;
    u8::try_from(n).map_err(|_| GameError::InadmissibleParams {
        reason: format!("height value {h} is too large for the solver"),
    })
}

/// All automorphisms of a structure (as index permutations), found by
/// backtracking with incremental atomic-compatibility pruning. Small
/// universes only; used by the optional symmetry reduction.
pub(crate) fn automorphisms(s: &Structure) -> Result<Vec<Vec<u8>>, GameError> {
    let n = s.universe().len();
    if n > 10 {
        return Err(GameError::InadmissibleParams {
            reason: "symmetry reduction supports universes of at most 10 elements".to_string(),
        });
    }
    // Reuse the pair tables with the structure on both sides.
    let ctx = Ctx::build(s, s, MAX_THETA as u32, 1, false)?;
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut pairs: Vec<(u8, u8)> = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        ctx: &Ctx,
        n: usize,
        i: usize,
        pairs: &mut Vec<(u8, u8)>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if i == n {
            let mut perm = vec![0u8; n];
            for &(a, b) in pairs.iter() {
                perm[a as usize] = b;
            }
            out.push(perm);
            return;
        }
        for j in 0..n {
            if used[j] || !ctx.can_add(pairs, i as u8, j as u8) {
                continue;
            }
            used[j] = true;
            pairs.push((i as u8, j as u8));
            rec(ctx, n, i + 1, pairs, used, out);
            pairs.pop();
            used[j] = false;
        }
    }
    rec(&ctx, n, 0, &mut pairs, &mut used, &mut out);
    Ok(out)
}
