//! A reference solver written directly from the position and move
//! definitions: exhaustive move spaces, no normalization, no domination
//! pruning, no packed representation, and its own atomic-compatibility
//! check. Exponentially slow, usable only on very small instances — its
//! point is to be independent of every argument the engine's enumeration
//! relies on, so that agreement is meaningful evidence.
//!
//! Shared by several test binaries, each of which uses a different subset.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use dg_core::structure::Structure;

pub type Set = BTreeSet<String>;
pub type Map = BTreeMap<String, String>;
pub type Heights = BTreeMap<String, u64>;

/// A position with a finite height.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RefPos {
    pub height: u64,
    pub a0: Set,
    pub a1: Set,
    pub g: Map,
    pub h0: Heights,
    pub h1: Heights,
}

impl RefPos {
    pub fn start(height: u64) -> RefPos {
        RefPos {
            height,
            a0: Set::new(),
            a1: Set::new(),
            g: Map::new(),
            h0: Heights::new(),
            h1: Heights::new(),
        }
    }

    /// The heightless part, for level computations.
    pub fn core(&self) -> RefPos {
        RefPos {
            height: 0,
            ..self.clone()
        }
    }
}

/// Injectivity, all atomic facts over the domain in both directions, and
/// the constants condition — checked directly against the structures.
pub fn atomic_ok(m0: &Structure, m1: &Structure, g: &Map) -> bool {
    let mut seen_targets = BTreeSet::new();
    for target in g.values() {
        if !seen_targets.insert(target) {
            return false;
        }
    }
    let dom: Vec<&String> = g.keys().collect();
    for (name, &arity) in m0.vocabulary().relations() {
        let mut stack = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == arity {
                let t0: Vec<String> = prefix.iter().map(|e: &&String| (*e).clone()).collect();
                let t1: Vec<String> = prefix.iter().map(|e| g[*e].clone()).collect();
                if m0.holds(name, &t0) != m1.holds(name, &t1) {
                    return false;
                }
                continue;
            }
            for e in &dom {
                let mut next = prefix.clone();
                next.push(*e);
                stack.push(next);
            }
        }
    }
    for c in m0.vocabulary().constants() {
        let c0 = m0.constant(c).unwrap();
        let c1 = m1.constant(c).unwrap();
        if let Some(image) = g.get(c0) {
            if image != c1 {
                return false;
            }
        }
        if g.values().any(|v| v == c1) && g.get(c0).map(String::as_str) != Some(c1) {
            return false;
        }
    }
    true
}

fn subsets(pool: &[String], max: usize) -> Vec<Set> {
    let mut out: Vec<Set> = vec![Set::new()];
    for e in pool {
        let snapshot = out.len();
        for k in 0..snapshot {
            if out[k].len() < max {
                let mut s = out[k].clone();
                s.insert(e.clone());
                out.push(s);
            }
        }
    }
    out
}

pub struct RefSolver<'a> {
    pub m0: &'a Structure,
    pub m1: &'a Structure,
    pub theta: usize,
    pub alpha: u64,
    memo: HashMap<RefPos, bool>,
}

impl<'a> RefSolver<'a> {
    pub fn new(m0: &'a Structure, m1: &'a Structure, theta: usize, alpha: u64) -> RefSolver<'a> {
        RefSolver {
            m0,
            m1,
            theta,
            alpha,
            memo: HashMap::new(),
        }
    }

    /// Is this position valid (ignoring the height bound)?
    pub fn valid(&self, p: &RefPos) -> bool {
        if p.a0.len() > self.theta || p.a1.len() > self.theta {
            return false;
        }
        if p.h0.keys().cloned().collect::<Set>() != p.a0
            || p.h1.keys().cloned().collect::<Set>() != p.a1
        {
            return false;
        }
        for (a, b) in &p.g {
            if !p.a0.contains(a) || !p.a1.contains(b) {
                return false;
            }
        }
        if !atomic_ok(self.m0, self.m1, &p.g) {
            return false;
        }
        for (a, h) in &p.h0 {
            if *h >= self.alpha {
                return false;
            }
            if *h == 0 && !p.g.contains_key(a) {
                return false;
            }
        }
        for (b, h) in &p.h1 {
            if *h >= self.alpha {
                return false;
            }
            if *h == 0 && !p.g.values().any(|v| v == b) {
                return false;
            }
        }
        true
    }

    /// All successor cores of `p` covering the challenge `(b0, b1)` —
    /// every grown pair of A-sets, every extension of the match, every
    /// height assignment that weakly decreases and strictly decreases
    /// positive old heights.
    fn replies(&self, p: &RefPos, next_height: u64, b0: &Set, b1: &Set) -> Vec<RefPos> {
        let mut out = Vec::new();
        let base0: Set = p.a0.union(b0).cloned().collect();
        let base1: Set = p.a1.union(b1).cloned().collect();
        if base0.len() > self.theta || base1.len() > self.theta {
            return out;
        }
        let pool0: Vec<String> = self
            .m0
            .universe()
            .iter()
            .filter(|e| !base0.contains(*e))
            .cloned()
            .collect();
        let pool1: Vec<String> = self
            .m1
            .universe()
            .iter()
            .filter(|e| !base1.contains(*e))
            .cloned()
            .collect();
        for ext0 in subsets(&pool0, self.theta - base0.len()) {
            let a0q: Set = base0.union(&ext0).cloned().collect();
            for ext1 in subsets(&pool1, self.theta - base1.len()) {
                let a1q: Set = base1.union(&ext1).cloned().collect();
                // Every injective extension of g inside a0q × a1q.
                let new_sources: Vec<String> = a0q
                    .iter()
                    .filter(|e| !p.g.contains_key(*e))
                    .cloned()
                    .collect();
                let mut maps: Vec<Map> = vec![p.g.clone()];
                for s in &new_sources {
                    let snapshot = maps.len();
                    for k in 0..snapshot {
                        for t in &a1q {
                            if maps[k].values().any(|v| v == t) {
                                continue;
                            }
                            let mut g = maps[k].clone();
                            g.insert(s.clone(), t.clone());
                            maps.push(g);
                        }
                    }
                }
                for g in maps {
                    if !atomic_ok(self.m0, self.m1, &g) {
                        continue;
                    }
                    // Candidate heights per element.
                    let mut slots: Vec<(bool, String, Vec<u64>)> = Vec::new();
                    let mut feasible = true;
                    for e in &a0q {
                        let matched = g.contains_key(e);
                        let options: Vec<u64> = match p.h0.get(e) {
                            Some(0) => {
                                if matched {
                                    vec![0]
                                } else {
                                    feasible = false;
                                    break;
                                }
                            }
                            Some(&old) => (if matched { 0 } else { 1 }..old).collect(),
                            None => (if matched { 0 } else { 1 }..self.alpha).collect(),
                        };
                        if options.is_empty() {
                            feasible = false;
                            break;
                        }
                        slots.push((false, e.clone(), options));
                    }
                    if feasible {
                        for e in &a1q {
                            let matched = g.values().any(|v| v == e);
                            let options: Vec<u64> = match p.h1.get(e) {
                                Some(0) => {
                                    if matched {
                                        vec![0]
                                    } else {
                                        feasible = false;
                                        break;
                                    }
                                }
                                Some(&old) => (if matched { 0 } else { 1 }..old).collect(),
                                None => (if matched { 0 } else { 1 }..self.alpha).collect(),
                            };
                            if options.is_empty() {
                                feasible = false;
                                break;
                            }
                            slots.push((true, e.clone(), options));
                        }
                    }
                    if !feasible {
                        continue;
                    }
                    let mut choice = vec![0usize; slots.len()];
                    loop {
                        let mut q = RefPos {
                            height: next_height,
                            a0: a0q.clone(),
                            a1: a1q.clone(),
                            g: g.clone(),
                            h0: Heights::new(),
                            h1: Heights::new(),
                        };
                        for (idx, (side1, e, options)) in slots.iter().enumerate() {
                            let h = options[choice[idx]];
                            if *side1 {
                                q.h1.insert(e.clone(), h);
                            } else {
                                q.h0.insert(e.clone(), h);
                            }
                        }
                        out.push(q);
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
        }
        out
    }

    /// Exhaustive alternating search: the challenger tries every height
    /// drop and every pair of challenge sets.
    pub fn eve_wins(&mut self, p: &RefPos) -> bool {
        if p.height == 0 {
            return true;
        }
        if let Some(&v) = self.memo.get(p) {
            return v;
        }
        let b0s = subsets(self.m0.universe(), self.theta);
        let b1s = subsets(self.m1.universe(), self.theta);
        let mut result = true;
        'adam: for next_height in 0..p.height {
            for b0 in &b0s {
                if p.a0.union(b0).count() > self.theta {
                    continue;
                }
                for b1 in &b1s {
                    if p.a1.union(b1).count() > self.theta {
                        continue;
                    }
                    let replies = self.replies(p, next_height, b0, b1);
                    let mut answered = false;
                    for q in replies {
                        if self.eve_wins(&q) {
                            answered = true;
                            break;
                        }
                    }
                    if !answered {
                        result = false;
                        break 'adam;
                    }
                }
            }
        }
        self.memo.insert(p.clone(), result);
        result
    }

    /// All valid heightless cores (including non-canonical ones).
    pub fn all_cores(&self) -> Vec<RefPos> {
        let mut out = Vec::new();
        for a0 in subsets(self.m0.universe(), self.theta) {
            for a1 in subsets(self.m1.universe(), self.theta) {
                let sources: Vec<String> = a0.iter().cloned().collect();
                let mut maps: Vec<Map> = vec![Map::new()];
                for s in &sources {
                    let snapshot = maps.len();
                    for k in 0..snapshot {
                        for t in &a1 {
                            if maps[k].values().any(|v| v == t) {
                                continue;
                            }
                            let mut g = maps[k].clone();
                            g.insert(s.clone(), t.clone());
                            maps.push(g);
                        }
                    }
                }
                for g in maps {
                    let mut heights: Vec<(bool, String, Vec<u64>)> = Vec::new();
                    for e in &a0 {
                        let matched = g.contains_key(e);
                        let options: Vec<u64> =
                            (if matched { 0 } else { 1 }..self.alpha).collect();
                        heights.push((false, e.clone(), options));
                    }
                    for e in &a1 {
                        let matched = g.values().any(|v| v == e);
                        let options: Vec<u64> =
                            (if matched { 0 } else { 1 }..self.alpha).collect();
                        heights.push((true, e.clone(), options));
                    }
                    if heights.iter().any(|(_, _, o)| o.is_empty()) {
                        continue;
                    }
                    let mut choice = vec![0usize; heights.len()];
                    loop {
                        let mut c = RefPos {
                            height: 0,
                            a0: a0.clone(),
                            a1: a1.clone(),
                            g: g.clone(),
                            h0: Heights::new(),
                            h1: Heights::new(),
                        };
                        for (idx, (side1, e, options)) in heights.iter().enumerate() {
                            let h = options[choice[idx]];
                            if *side1 {
                                c.h1.insert(e.clone(), h);
                            } else {
                                c.h0.insert(e.clone(), h);
                            }
                        }
                        if self.valid(&c) {
                            out.push(c);
                        }
                        let mut k = 0;
                        loop {
                            if k == heights.len() {
                                break;
                            }
                            choice[k] += 1;
                            if choice[k] < heights[k].2.len() {
                                break;
                            }
                            choice[k] = 0;
                            k += 1;
                        }
                        if k == heights.len() {
                            break;
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The level sequence over all valid cores, by direct filtering: a core
    /// survives one more level iff every challenge pair has some successor
    /// core in the previous level. Returns the levels up to and including
    /// the first repeat.
    pub fn level_sequence(&mut self) -> Vec<Vec<RefPos>> {
        let universe = self.all_cores();
        let mut levels: Vec<Vec<RefPos>> = vec![universe];
        let b0s = subsets(self.m0.universe(), self.theta);
        let b1s = subsets(self.m1.universe(), self.theta);
        loop {
            let current = levels.last().unwrap().clone();
            let member: BTreeSet<&RefPos> = current.iter().collect();
            let mut next = Vec::new();
            'core: for c in &current {
                for b0 in &b0s {
                    if c.a0.union(b0).count() > self.theta {
                        continue;
                    }
                    for b1 in &b1s {
                        if c.a1.union(b1).count() > self.theta {
                            continue;
                        }
                        let replies = self.replies(c, 0, b0, b1);
                        if !replies.iter().any(|q| member.contains(&q.core())) {
                            continue 'core;
                        }
                    }
                }
                next.push(c.clone());
            }
            if next.len() == current.len() {
                return levels;
            }
            levels.push(next);
        }
    }
}

/// Convenience entry point: does the defender win from the start?
pub fn ref_solve(m0: &Structure, m1: &Structure, beta: u64, theta: usize, alpha: u64) -> bool {
    let mut solver = RefSolver::new(m0, m1, theta, alpha);
    solver.eve_wins(&RefPos::start(beta))
}
