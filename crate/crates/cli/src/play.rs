//! Interactive play against the engine, plus batch replay of recorded
//! transcripts.
//!
//! A session alternates challenges (announce a lower height and two
//! challenge sets) and replies (grow the sets, extend the match, tick the
//! clocks). The human plays one side; the engine answers optimally from
//! the solved game. Every session can be recorded with `--json-out` and
//! replayed with `--replay`, which recomputes the engine's moves and fails
//! with exit code 2 if anything diverges from the recording.
//!
//! Unbounded bounds are resolved at the table: with height w the first
//! challenge fixes a finite height h and the rest of the session is the
//! h-round game; with clock bound w the session plays with the finite
//! bound h + 2, under which every clock a player could usefully assign is
//! available (anything larger can never reach zero in h rounds anyway).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write as _};
use std::path::Path;
use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use dg_core::game::{
    adam_moves, eve_replies, extends, position_winner, solve, validate_position, winning_heights,
    AdamMove, CorePosition, EveMode, GameParams, Mode, Position, Winner,
};
use dg_core::ordinal::Ordinal;
use dg_core::structure::{is_partial_isomorphism, PartialMap, Structure};

use crate::{
    check_admissible, mode_from_name, mode_name, msg, options, parse_params, read_structure,
    read_text, winner_exit, CliError, SideArg, SCHEMA_VERSION,
};

/// Largest finite height a player may announce (the solver's own bound).
const MAX_HEIGHT: u64 = 200;

pub struct PlayArgs<'a> {
    pub m0: Option<&'a Path>,
    pub m1: Option<&'a Path>,
    pub beta: Option<&'a str>,
    pub theta: Option<u32>,
    pub alpha: Option<&'a str>,
    pub side: SideArg,
    pub replay: Option<&'a Path>,
    pub mode: Mode,
    pub node_budget: u64,
    pub json_out: Option<&'a Path>,
}

// ---------------------------------------------------------------------------
// Transcript format.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Actor {
    Human,
    Engine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Event {
    Challenge {
        actor: Actor,
        height: Ordinal,
        b0: BTreeSet<String>,
        b1: BTreeSet<String>,
    },
    Reply {
        actor: Actor,
        position: Position,
    },
    Resign {
        actor: Actor,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Outcome {
    winner: Winner,
    reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Transcript {
    schema_version: String,
    command: String,
    m0: Structure,
    m1: Structure,
    params: GameParams,
    mode: String,
    human_side: String,
    solved_winner: Winner,
    events: Vec<Event>,
    outcome: Outcome,
}

fn side_string(side: SideArg) -> &'static str {
    match side {
        SideArg::Adam => "adam",
        SideArg::Eve => "eve",
    }
}

fn side_from_string(text: &str) -> Result<SideArg, CliError> {
    match text {
        "adam" => Ok(SideArg::Adam),
        "eve" => Ok(SideArg::Eve),
        other => Err(msg(format!(
            "unknown side {other:?} in the transcript: expected adam or eve"
        ))),
    }
}

fn player_name(w: Winner) -> &'static str {
    match w {
        Winner::Eve => "defender",
        Winner::Adam => "challenger",
    }
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

fn fmt_ids(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "-".to_string()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(",")
    }
}

fn fmt_side(ids: &BTreeSet<String>, clocks: &BTreeMap<String, Ordinal>) -> String {
    if ids.is_empty() {
        return "-".to_string();
    }
    ids.iter()
        .map(|id| match clocks.get(id) {
            Some(h) => format!("{id}[{h}]"),
            None => id.clone(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_match(g: &PartialMap) -> String {
    if g.is_empty() {
        return "-".to_string();
    }
    g.iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_position_line(p: &Position) -> String {
    format!(
        "height {} | A0 {} | A1 {} | match {}",
        p.height,
        fmt_side(&p.a0, &p.h0),
        fmt_side(&p.a1, &p.h1),
        fmt_match(&p.g)
    )
}

fn fmt_challenge(mv: &AdamMove) -> String {
    format!(
        "move {} b0={} b1={}",
        mv.height,
        fmt_ids(&mv.b0),
        fmt_ids(&mv.b1)
    )
}

const HELP: &str = "\
commands:
  move H b0=IDS b1=IDS    announce height H (a natural number below the
                          current height) and the two challenge sets;
                          IDS is a comma-separated id list, or - for none
  reply [pad0=IDS] [pad1=IDS] [match=A:X,...] [h0=A:N,...] [h1=X:N,...]
                          answer the pending challenge: voluntarily pad the
                          sets, extend the match, set clocks; defaults:
                          standing clocks tick down by one, newly matched
                          elements get clock 0, new unmatched elements get
                          the largest useful clock
  take K                  play entry K from the `moves` listing
  moves                   list the canonical moves available here
  show                    print the current position
  hint                    ask the engine what it would play here
  resign                  concede the play
  help                    show this text";

// ---------------------------------------------------------------------------
// Session state.
// ---------------------------------------------------------------------------

struct Session<'a> {
    m0: &'a Structure,
    m1: &'a Structure,
    params: GameParams,
    alpha_is_omega: bool,
    mode: Mode,
    budget: u64,
    human: SideArg,
    solved: Winner,
    position: Position,
    pending: Option<AdamMove>,
    /// Finite working parameters; `None` only while the session still sits
    /// at height w waiting for the first announcement.
    eff: Option<GameParams>,
    events: Vec<Event>,
    outcome: Option<Outcome>,
}

enum Parsed {
    /// A meta command was handled (something was printed); read again.
    Meta,
    Challenge(AdamMove),
    Reply(Position),
    Resign,
}

impl<'a> Session<'a> {
    fn new(
        m0: &'a Structure,
        m1: &'a Structure,
        params: GameParams,
        mode: Mode,
        budget: u64,
        human: SideArg,
    ) -> Result<Session<'a>, CliError> {
        check_admissible(&params)?;
        let solved = solve(m0, m1, &params, &options(mode, budget))?.winner;
        let alpha_is_omega = params.alpha == Ordinal::omega();
        let eff = if params.beta.is_finite() {
            let alpha = if alpha_is_omega {
                params.beta.successor()
            } else {
                params.alpha.clone()
            };
            Some(GameParams::new(params.beta.clone(), params.theta, alpha))
        } else {
            None
        };
        Ok(Session {
            m0,
            m1,
            position: Position::start(params.beta.clone()),
            params,
            alpha_is_omega,
            mode,
            budget,
            human,
            solved,
            pending: None,
            eff,
            events: Vec::new(),
            outcome: None,
        })
    }

    fn eff(&self) -> &GameParams {
        self.eff
            .as_ref()
            .expect("working parameters are fixed before any reply")
    }

    /// Fixes the finite working parameters on the first announcement.
    fn ensure_eff(&mut self, announced: &Ordinal) {
        if self.eff.is_some() {
            return;
        }
        let h = announced
            .to_nat()
            .expect("announced heights are validated finite");
        let alpha = if self.alpha_is_omega {
            Ordinal::from_nat(h + 2)
        } else {
            self.params.alpha.clone()
        };
        self.eff = Some(GameParams::new(
            Ordinal::from_nat(h),
            self.params.theta,
            alpha,
        ));
    }

    fn finish(&mut self, winner: Winner, reason: &str) {
        println!("result: the {} wins this play ({reason})", player_name(winner));
        self.outcome = Some(Outcome {
            winner,
            reason: reason.to_string(),
        });
    }

    fn apply_challenge(&mut self, actor: Actor, mv: AdamMove) -> Result<(), CliError> {
        self.ensure_eff(&mv.height);
        self.events.push(Event::Challenge {
            actor,
            height: mv.height.clone(),
            b0: mv.b0.clone(),
            b1: mv.b1.clone(),
        });
        let replies = eve_replies(
            &self.position,
            &mv,
            self.eff(),
            self.m0,
            self.m1,
            EveMode::Lazy,
        )?;
        self.pending = Some(mv);
        if replies.is_empty() {
            self.finish(Winner::Adam, "the defender has no legal reply to this challenge");
        }
        Ok(())
    }

    fn apply_reply(&mut self, actor: Actor, q: Position) {
        self.events.push(Event::Reply {
            actor,
            position: q.clone(),
        });
        println!("now: {}", fmt_position_line(&q));
        self.position = q;
        self.pending = None;
        if self.position.height.is_zero() {
            self.finish(Winner::Eve, "the height reached 0 with the match intact");
        }
    }

    fn resign(&mut self, actor: Actor) {
        self.events.push(Event::Resign { actor });
        let resigning = match actor {
            Actor::Human => self.human,
            Actor::Engine => match self.human {
                SideArg::Adam => SideArg::Eve,
                SideArg::Eve => SideArg::Adam,
            },
        };
        match resigning {
            SideArg::Adam => self.finish(Winner::Eve, "the challenger resigned"),
            SideArg::Eve => self.finish(Winner::Adam, "the defender resigned"),
        }
    }

    // -- move validation ----------------------------------------------------

    fn known0(&self, id: &str) -> bool {
        self.m0.universe().iter().any(|e| e == id)
    }

    fn known1(&self, id: &str) -> bool {
        self.m1.universe().iter().any(|e| e == id)
    }

    fn validate_challenge(&self, mv: &AdamMove) -> Result<(), String> {
        let Some(h) = mv.height.to_nat() else {
            return Err("the announced height must be a natural number".to_string());
        };
        if h > MAX_HEIGHT {
            return Err(format!("the engine handles heights up to {MAX_HEIGHT}"));
        }
        if mv.height >= self.position.height {
            return Err(format!(
                "the height must drop below the current height {}",
                self.position.height
            ));
        }
        for id in &mv.b0 {
            if !self.known0(id) {
                return Err(format!("element {id} is not in the first structure"));
            }
        }
        for id in &mv.b1 {
            if !self.known1(id) {
                return Err(format!("element {id} is not in the second structure"));
            }
        }
        let theta = self.params.theta as usize;
        let n0 = self.position.a0.union(&mv.b0).count();
        if n0 > theta {
            return Err(format!(
                "the first side would hold {n0} elements, over the cap theta={}",
                self.params.theta
            ));
        }
        let n1 = self.position.a1.union(&mv.b1).count();
        if n1 > theta {
            return Err(format!(
                "the second side would hold {n1} elements, over the cap theta={}",
                self.params.theta
            ));
        }
        Ok(())
    }

    /// Checks a fully formed reply position against the pending challenge,
    /// naming the violated clause on failure.
    fn check_reply(&self, q: &Position) -> Result<(), String> {
        let p = &self.position;
        let mv = self.pending.as_ref().expect("a challenge is pending");
        let eff = self.eff();
        for id in q.a0.iter().chain(q.h0.keys()) {
            if !self.known0(id) {
                return Err(format!("element {id} is not in the first structure"));
            }
        }
        for id in q.a1.iter().chain(q.h1.keys()) {
            if !self.known1(id) {
                return Err(format!("element {id} is not in the second structure"));
            }
        }
        for (a, b) in q.g.iter() {
            if !self.known0(a) {
                return Err(format!("element {a} is not in the first structure"));
            }
            if !self.known1(b) {
                return Err(format!("element {b} is not in the second structure"));
            }
        }
        if q.height != mv.height {
            return Err(format!(
                "the reply must sit at the announced height {}",
                mv.height
            ));
        }
        if !q.a0.is_superset(&mv.b0) || !q.a1.is_superset(&mv.b1) {
            return Err("the reply must include every challenged element".to_string());
        }
        if !q.a0.is_superset(&p.a0) || !q.a1.is_superset(&p.a1) {
            return Err("the reply cannot drop elements already in play".to_string());
        }
        let theta = eff.theta as usize;
        if q.a0.len() > theta {
            return Err(format!(
                "the first set holds {} elements, over the cap theta={}",
                q.a0.len(),
                eff.theta
            ));
        }
        if q.a1.len() > theta {
            return Err(format!(
                "the second set holds {} elements, over the cap theta={}",
                q.a1.len(),
                eff.theta
            ));
        }
        if q.h0.keys().cloned().collect::<BTreeSet<_>>() != q.a0
            || q.h1.keys().cloned().collect::<BTreeSet<_>>() != q.a1
        {
            return Err("every element in play needs exactly one clock".to_string());
        }
        for (id, h) in q.h0.iter().chain(q.h1.iter()) {
            if *h >= eff.alpha {
                return Err(format!(
                    "the clock {h} of {id} must lie below the bound alpha={}",
                    eff.alpha
                ));
            }
        }
        for (a, old) in &p.h0 {
            let new = q.h0.get(a).expect("supersets were checked");
            if new > old {
                return Err(format!("the clock of {a} cannot increase (it was {old})"));
            }
            if !old.is_zero() && new == old {
                return Err(format!(
                    "the standing clock of {a} must decrease strictly (it was {old})"
                ));
            }
        }
        for (b, old) in &p.h1 {
            let new = q.h1.get(b).expect("supersets were checked");
            if new > old {
                return Err(format!("the clock of {b} cannot increase (it was {old})"));
            }
            if !old.is_zero() && new == old {
                return Err(format!(
                    "the standing clock of {b} must decrease strictly (it was {old})"
                ));
            }
        }
        if !q.g.is_extension_of(&p.g) {
            return Err("the reply must keep every existing match pair".to_string());
        }
        for (a, b) in q.g.iter() {
            if !q.a0.contains(a) || !q.a1.contains(b) {
                return Err(format!("the match pair {a}->{b} reaches outside the sets"));
            }
        }
        match is_partial_isomorphism(self.m0, self.m1, &q.g) {
            Ok(true) => {}
            Ok(false) => {
                return Err(
                    "the extended match is not a partial isomorphism of the two structures"
                        .to_string(),
                )
            }
            Err(e) => return Err(e.to_string()),
        }
        for (a, h) in &q.h0 {
            if h.is_zero() && !q.g.contains_source(a) {
                return Err(format!("element {a} has clock 0 but is unmatched"));
            }
        }
        for (b, h) in &q.h1 {
            if h.is_zero() && !q.g.contains_target(b) {
                return Err(format!("element {b} has clock 0 but is unmatched"));
            }
        }
        let valid = validate_position(q, eff, self.m0, self.m1)
            .map_err(|e| format!("internal flaw while validating the reply: {e}"))?;
        if !valid || !extends(q, p) {
            return Err("internal flaw: the reply passed every clause but not the ruleset".to_string());
        }
        Ok(())
    }

    // -- engine play --------------------------------------------------------

    /// Canonical challenges at the current (finite-height) position.
    fn listed_challenges(&self) -> Result<Vec<AdamMove>, CliError> {
        Ok(adam_moves(
            &self.position,
            self.eff(),
            self.m0,
            self.m1,
            self.mode.adam(),
        )?)
    }

    /// Canonical replies to the pending challenge.
    fn listed_replies(&self) -> Result<Vec<Position>, CliError> {
        let mv = self.pending.as_ref().expect("a challenge is pending");
        Ok(eve_replies(
            &self.position,
            mv,
            self.eff(),
            self.m0,
            self.m1,
            EveMode::Lazy,
        )?)
    }

    fn reply_wins(&self, q: &Position) -> Result<Winner, CliError> {
        Ok(position_winner(
            q,
            self.eff(),
            self.m0,
            self.m1,
            &options(self.mode, self.budget),
        )?)
    }

    /// Picks a challenge from a finite-height position: the first one whose
    /// replies are all losing for the defender, else the first one at all.
    fn choose_challenge_from(
        &self,
        from: &Position,
        params: &GameParams,
    ) -> Result<AdamMove, CliError> {
        let mvs = adam_moves(from, params, self.m0, self.m1, self.mode.adam())?;
        for mv in &mvs {
            let replies = eve_replies(from, mv, params, self.m0, self.m1, EveMode::Lazy)?;
            if replies.is_empty() {
                return Ok(mv.clone());
            }
            let mut all_lost = true;
            for q in &replies {
                let w = position_winner(q, params, self.m0, self.m1, &options(self.mode, self.budget))?;
                if w == Winner::Eve {
                    all_lost = false;
                    break;
                }
            }
            if all_lost {
                return Ok(mv.clone());
            }
        }
        mvs.into_iter()
            .next()
            .ok_or_else(|| msg("no challenge exists at this height".to_string()))
    }

    /// The engine's challenge at the current position. At height w this
    /// picks the least finite height at which the empty position is already
    /// lost for the defender (when one exists) and challenges as in that
    /// finite game; if the defender survives every level, any opening is as
    /// good as any other.
    fn engine_challenge(&self) -> Result<AdamMove, CliError> {
        if self.position.height.is_finite() {
            return self.choose_challenge_from(&self.position, self.eff());
        }
        let virtual_rounds = if self.alpha_is_omega {
            1
        } else {
            let wh = winning_heights(
                self.m0,
                self.m1,
                self.params.theta,
                &self.params.alpha,
                &options(self.mode, self.budget),
            )?;
            let empty = CorePosition {
                a0: BTreeSet::new(),
                a1: BTreeSet::new(),
                g: PartialMap::new(),
                h0: BTreeMap::new(),
                h1: BTreeMap::new(),
            };
            (1..wh.levels.len())
                .find(|&n| !wh.levels[n].contains(&empty))
                .unwrap_or(wh.rank.max(1))
        };
        let vbeta = Ordinal::from_nat(virtual_rounds as u64);
        let valpha = if self.alpha_is_omega {
            vbeta.successor()
        } else {
            self.params.alpha.clone()
        };
        let vparams = GameParams::new(vbeta.clone(), self.params.theta, valpha);
        self.choose_challenge_from(&Position::start(vbeta), &vparams)
    }

    /// The engine's reply: the first canonical reply that still wins, else
    /// the first canonical reply. Returns the listing index as well.
    fn engine_reply(&self) -> Result<(usize, Position), CliError> {
        let replies = self.listed_replies()?;
        for (k, q) in replies.iter().enumerate() {
            if self.reply_wins(q)? == Winner::Eve {
                return Ok((k, q.clone()));
            }
        }
        Ok((0, replies
            .into_iter()
            .next()
            .expect("stuck positions end the play before a reply is requested")))
    }

    // -- human input --------------------------------------------------------

    fn parse_challenge_line(&self, tokens: &[&str]) -> Result<AdamMove, String> {
        let [height_txt, rest @ ..] = tokens else {
            return Err("usage: move H b0=IDS b1=IDS".to_string());
        };
        let Ok(h) = height_txt.parse::<u64>() else {
            return Err("the announced height must be a natural number".to_string());
        };
        let mut b0 = None;
        let mut b1 = None;
        for token in rest {
            let Some((key, value)) = token.split_once('=') else {
                return Err(format!("cannot read {token:?}: expected KEY=VALUE"));
            };
            let slot = match key {
                "b0" => &mut b0,
                "b1" => &mut b1,
                other => return Err(format!("unknown key {other:?}: expected b0 or b1")),
            };
            if slot.replace(parse_id_list(value)).is_some() {
                return Err(format!("the key {key} appears twice"));
            }
        }
        let (Some(b0), Some(b1)) = (b0, b1) else {
            return Err("both challenge sets are needed (use b0=- or b1=- for none)".to_string());
        };
        let mv = AdamMove {
            height: Ordinal::from_nat(h),
            b0,
            b1,
        };
        self.validate_challenge(&mv)?;
        Ok(mv)
    }

    fn parse_reply_line(&self, tokens: &[&str]) -> Result<Position, String> {
        let mv = self.pending.as_ref().expect("a challenge is pending");
        let eff = self.eff();
        let mut pad0 = BTreeSet::new();
        let mut pad1 = BTreeSet::new();
        let mut matches: Vec<(String, String)> = Vec::new();
        let mut over0: BTreeMap<String, u64> = BTreeMap::new();
        let mut over1: BTreeMap<String, u64> = BTreeMap::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for token in tokens {
            let Some((key, value)) = token.split_once('=') else {
                return Err(format!("cannot read {token:?}: expected KEY=VALUE"));
            };
            if !seen.insert(key) {
                return Err(format!("the key {key} appears twice"));
            }
            match key {
                "pad0" => pad0 = parse_id_list(value),
                "pad1" => pad1 = parse_id_list(value),
                "match" => {
                    for pair in value.split(',').filter(|s| !s.is_empty()) {
                        let Some((a, b)) = pair.split_once(':') else {
                            return Err(format!("cannot read match pair {pair:?}: expected A:X"));
                        };
                        matches.push((a.to_string(), b.to_string()));
                    }
                }
                "h0" | "h1" => {
                    let slot = if key == "h0" { &mut over0 } else { &mut over1 };
                    for entry in value.split(',').filter(|s| !s.is_empty()) {
                        let Some((id, n)) = entry.split_once(':') else {
                            return Err(format!("cannot read clock entry {entry:?}: expected ID:N"));
                        };
                        let Ok(n) = n.parse::<u64>() else {
                            return Err(format!("the clock for {id} must be a natural number"));
                        };
                        slot.insert(id.to_string(), n);
                    }
                }
                other => {
                    return Err(format!(
                        "unknown key {other:?}: expected pad0, pad1, match, h0, or h1"
                    ))
                }
            }
        }

        let mut a0: BTreeSet<String> = self.position.a0.union(&mv.b0).cloned().collect();
        a0.extend(pad0);
        let mut a1: BTreeSet<String> = self.position.a1.union(&mv.b1).cloned().collect();
        a1.extend(pad1);
        let mut g = self.position.g.clone();
        for (a, b) in matches {
            a0.insert(a.clone());
            a1.insert(b.clone());
            if let Err(e) = g.insert(a, b) {
                return Err(e.to_string());
            }
        }

        let alpha_max = eff
            .alpha
            .to_nat()
            .expect("working clock bounds are finite")
            - 1;
        let residual = mv.height.to_nat().expect("announced heights are finite");
        let entry_default = alpha_max.min(residual + 1);
        let clock =
            |id: &String, standing: &BTreeMap<String, Ordinal>, over: &BTreeMap<String, u64>, matched: bool| -> Result<Ordinal, String> {
                if let Some(n) = over.get(id) {
                    let n = if self.alpha_is_omega {
                        (*n).min(alpha_max)
                    } else if *n > alpha_max {
                        return Err(format!(
                            "the clock {n} of {id} must lie below the bound alpha={}",
                            eff.alpha
                        ));
                    } else {
                        *n
                    };
                    return Ok(Ordinal::from_nat(n));
                }
                if let Some(old) = standing.get(id) {
                    let old = old.to_nat().expect("session clocks are finite");
                    return Ok(Ordinal::from_nat(old.saturating_sub(1)));
                }
                Ok(Ordinal::from_nat(if matched { 0 } else { entry_default }))
            };
        for id in over0.keys() {
            if !a0.contains(id) {
                return Err(format!("clock given for {id}, which is not in the first set"));
            }
        }
        for id in over1.keys() {
            if !a1.contains(id) {
                return Err(format!(
                    "clock given for {id}, which is not in the second set"
                ));
            }
        }
        let mut h0 = BTreeMap::new();
        for id in &a0 {
            let h = clock(id, &self.position.h0, &over0, g.contains_source(id))?;
            h0.insert(id.clone(), h);
        }
        let mut h1 = BTreeMap::new();
        for id in &a1 {
            let h = clock(id, &self.position.h1, &over1, g.contains_target(id))?;
            h1.insert(id.clone(), h);
        }
        let q = Position {
            height: mv.height.clone(),
            a0,
            a1,
            g,
            h0,
            h1,
        };
        self.check_reply(&q)?;
        Ok(q)
    }

    fn show_moves(&self) -> Result<(), CliError> {
        const LIMIT: usize = 24;
        match &self.pending {
            None => {
                if !self.position.height.is_finite() {
                    println!(
                        "at height w there is no finite listing: announce any finite height \
                         with `move H b0=IDS b1=IDS`"
                    );
                    return Ok(());
                }
                let mvs = self.listed_challenges()?;
                println!("{} canonical challenge(s):", mvs.len());
                for (k, mv) in mvs.iter().take(LIMIT).enumerate() {
                    println!("  [{k}] {}", fmt_challenge(mv));
                }
                if mvs.len() > LIMIT {
                    println!("  ... and {} more", mvs.len() - LIMIT);
                }
            }
            Some(_) => {
                let replies = self.listed_replies()?;
                println!("{} canonical repl(ies):", replies.len());
                for (k, q) in replies.iter().take(LIMIT).enumerate() {
                    println!("  [{k}] {}", fmt_position_line(q));
                }
                if replies.len() > LIMIT {
                    println!("  ... and {} more", replies.len() - LIMIT);
                }
            }
        }
        Ok(())
    }

    fn show_hint(&self) -> Result<(), CliError> {
        match &self.pending {
            None => {
                let mv = self.engine_challenge()?;
                println!("hint: {}", fmt_challenge(&mv));
            }
            Some(_) => {
                let (k, q) = self.engine_reply()?;
                println!("hint: take {k}  ({})", fmt_position_line(&q));
            }
        }
        Ok(())
    }

    /// Interprets one line of human input. `Ok(Parsed::Meta)` means a
    /// side-effect-only command ran; read another line.
    fn interpret(&self, line: &str) -> Result<Parsed, String> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((&head, rest)) = tokens.split_first() else {
            return Ok(Parsed::Meta);
        };
        match head {
            "help" => {
                println!("{HELP}");
                Ok(Parsed::Meta)
            }
            "show" => {
                println!("{}", fmt_position_line(&self.position));
                if let Some(mv) = &self.pending {
                    println!("pending challenge: {}", fmt_challenge(mv));
                }
                Ok(Parsed::Meta)
            }
            "moves" => {
                self.show_moves().map_err(|e| e.to_string())?;
                Ok(Parsed::Meta)
            }
            "hint" => {
                self.show_hint().map_err(|e| e.to_string())?;
                Ok(Parsed::Meta)
            }
            "resign" => Ok(Parsed::Resign),
            "move" => {
                if self.pending.is_some() {
                    return Err("a challenge is pending: answer it with `reply`".to_string());
                }
                if self.human != SideArg::Adam {
                    return Err("you play the defender: answer challenges with `reply`".to_string());
                }
                Ok(Parsed::Challenge(self.parse_challenge_line(rest)?))
            }
            "reply" => {
                if self.pending.is_none() {
                    return Err("no challenge is pending: the challenger moves first".to_string());
                }
                if self.human != SideArg::Eve {
                    return Err("you play the challenger: make challenges with `move`".to_string());
                }
                Ok(Parsed::Reply(self.parse_reply_line(rest)?))
            }
            "take" => {
                let [k_txt] = rest else {
                    return Err("usage: take K".to_string());
                };
                let Ok(k) = k_txt.parse::<usize>() else {
                    return Err("the entry number must be a natural number".to_string());
                };
                match &self.pending {
                    None => {
                        if self.human != SideArg::Adam {
                            return Err(
                                "you play the defender: answer challenges with `reply`".to_string()
                            );
                        }
                        if !self.position.height.is_finite() {
                            return Err(
                                "at height w, announce a finite height with `move`".to_string()
                            );
                        }
                        let mvs = self.listed_challenges().map_err(|e| e.to_string())?;
                        let mv = mvs
                            .get(k)
                            .ok_or_else(|| format!("no entry {k}: see `moves`"))?;
                        Ok(Parsed::Challenge(mv.clone()))
                    }
                    Some(_) => {
                        if self.human != SideArg::Eve {
                            return Err(
                                "you play the challenger: make challenges with `move`".to_string()
                            );
                        }
                        let replies = self.listed_replies().map_err(|e| e.to_string())?;
                        let q = replies
                            .get(k)
                            .ok_or_else(|| format!("no entry {k}: see `moves`"))?;
                        Ok(Parsed::Reply(q.clone()))
                    }
                }
            }
            other => Err(format!("unknown command {other:?}; type help")),
        }
    }

    // -- transcript ---------------------------------------------------------

    fn transcript(&self) -> Transcript {
        Transcript {
            schema_version: SCHEMA_VERSION.to_string(),
            command: "play".to_string(),
            m0: self.m0.clone(),
            m1: self.m1.clone(),
            params: self.params.clone(),
            mode: mode_name(self.mode).to_string(),
            human_side: side_string(self.human).to_string(),
            solved_winner: self.solved,
            events: self.events.clone(),
            outcome: self
                .outcome
                .clone()
                .expect("transcripts are taken from finished plays"),
        }
    }
}

fn parse_id_list(text: &str) -> BTreeSet<String> {
    if text == "-" {
        return BTreeSet::new();
    }
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

// ---------------------------------------------------------------------------
// Live session.
// ---------------------------------------------------------------------------

fn announce(session: &Session) {
    println!(
        "boards: {} vs {} element(s); parameters: beta={}, theta={}, alpha={}",
        session.m0.universe().len(),
        session.m1.universe().len(),
        session.params.beta,
        session.params.theta,
        session.params.alpha
    );
    println!(
        "you play the {}; with best play the {} wins this game",
        player_name(match session.human {
            SideArg::Adam => Winner::Adam,
            SideArg::Eve => Winner::Eve,
        }),
        player_name(session.solved)
    );
}

fn run_live(
    session: &mut Session,
    lines: &mut dyn Iterator<Item = io::Result<String>>,
) -> Result<(), CliError> {
    announce(session);
    println!("start: {}", fmt_position_line(&session.position));
    if session.position.height.is_zero() {
        session.finish(Winner::Eve, "the height reached 0 with the match intact");
    }
    while session.outcome.is_none() {
        let human_turn = match session.pending {
            None => session.human == SideArg::Adam,
            Some(_) => session.human == SideArg::Eve,
        };
        if human_turn {
            let prompt = if session.pending.is_none() {
                "challenger"
            } else {
                "defender"
            };
            print!("{prompt}> ");
            io::stdout().flush().ok();
            let Some(line) = lines.next() else {
                return Err(msg("input ended before the play finished".to_string()));
            };
            let line = line.map_err(|e| msg(format!("cannot read input: {e}")))?;
            match session.interpret(&line) {
                Ok(Parsed::Meta) => {}
                Ok(Parsed::Resign) => session.resign(Actor::Human),
                Ok(Parsed::Challenge(mv)) => {
                    println!("challenge accepted: {}", fmt_challenge(&mv));
                    session.apply_challenge(Actor::Human, mv)?;
                }
                Ok(Parsed::Reply(q)) => {
                    println!("reply accepted");
                    session.apply_reply(Actor::Human, q);
                }
                Err(clause) => {
                    let what = if session.pending.is_none() {
                        "illegal move"
                    } else {
                        "illegal reply"
                    };
                    println!("{what}: {clause}");
                }
            }
        } else if session.pending.is_none() {
            let mv = session.engine_challenge()?;
            println!("engine challenges: {}", fmt_challenge(&mv));
            session.apply_challenge(Actor::Engine, mv)?;
        } else {
            let (_, q) = session.engine_reply()?;
            println!("engine replies");
            session.apply_reply(Actor::Engine, q);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Replay.
// ---------------------------------------------------------------------------

fn run_replay(session: &mut Session, recorded: &Transcript) -> Result<(), CliError> {
    if session.solved != recorded.solved_winner {
        return Err(msg(format!(
            "replay diverged: the game solves for the {} but the transcript says the {}",
            player_name(session.solved),
            player_name(recorded.solved_winner)
        )));
    }
    if session.position.height.is_zero() {
        session.finish(Winner::Eve, "the height reached 0 with the match intact");
    }
    for (k, event) in recorded.events.iter().enumerate() {
        if session.outcome.is_some() {
            return Err(msg(format!(
                "the transcript continues after the play ended (event {k})"
            )));
        }
        match event {
            Event::Challenge {
                actor,
                height,
                b0,
                b1,
            } => {
                if session.pending.is_some() {
                    return Err(msg(format!("challenge out of turn at event {k}")));
                }
                let mv = AdamMove {
                    height: height.clone(),
                    b0: b0.clone(),
                    b1: b1.clone(),
                };
                match actor {
                    Actor::Human => {
                        if session.human != SideArg::Adam {
                            return Err(msg(format!(
                                "event {k}: the human challenges but plays the defender"
                            )));
                        }
                        session.validate_challenge(&mv).map_err(|clause| {
                            msg(format!("event {k} is an illegal move: {clause}"))
                        })?;
                    }
                    Actor::Engine => {
                        let computed = session.engine_challenge()?;
                        if computed != mv {
                            return Err(msg(format!(
                                "replay diverged at event {k}: the engine plays `{}`, \
                                 the transcript records `{}`",
                                fmt_challenge(&computed),
                                fmt_challenge(&mv)
                            )));
                        }
                    }
                }
                session.apply_challenge(*actor, mv)?;
            }
            Event::Reply { actor, position } => {
                if session.pending.is_none() {
                    return Err(msg(format!("reply out of turn at event {k}")));
                }
                match actor {
                    Actor::Human => {
                        if session.human != SideArg::Eve {
                            return Err(msg(format!(
                                "event {k}: the human replies but plays the challenger"
                            )));
                        }
                        session.check_reply(position).map_err(|clause| {
                            msg(format!("event {k} is an illegal reply: {clause}"))
                        })?;
                    }
                    Actor::Engine => {
                        let (_, computed) = session.engine_reply()?;
                        if computed != *position {
                            return Err(msg(format!(
                                "replay diverged at event {k}: the engine replies `{}`, \
                                 the transcript records `{}`",
                                fmt_position_line(&computed),
                                fmt_position_line(position)
                            )));
                        }
                    }
                }
                session.apply_reply(*actor, position.clone());
            }
            Event::Resign { actor } => session.resign(*actor),
        }
    }
    let Some(outcome) = session.outcome.clone() else {
        return Err(msg("the transcript ends before the play finished".to_string()));
    };
    if outcome != recorded.outcome {
        return Err(msg(format!(
            "replay diverged: the play ends with the {} ({}), the transcript records the {} ({})",
            player_name(outcome.winner),
            outcome.reason,
            player_name(recorded.outcome.winner),
            recorded.outcome.reason
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------------

pub fn cmd_play(args: PlayArgs) -> Result<ExitCode, CliError> {
    if let Some(replay_path) = args.replay {
        let text = read_text(replay_path)?;
        let recorded: Transcript =
            serde_json::from_str(&text).map_err(|source| CliError::Json {
                path: replay_path.display().to_string(),
                source,
            })?;
        if recorded.schema_version != SCHEMA_VERSION || recorded.command != "play" {
            return Err(msg(format!(
                "{} is not a play transcript with schema version {SCHEMA_VERSION}",
                replay_path.display()
            )));
        }
        recorded.params.validate()?;
        let side = side_from_string(&recorded.human_side)?;
        let mode = mode_from_name(&recorded.mode)?;
        let mut session = Session::new(
            &recorded.m0,
            &recorded.m1,
            recorded.params.clone(),
            mode,
            args.node_budget,
            side,
        )?;
        run_replay(&mut session, &recorded)?;
        let outcome = session.outcome.clone().expect("replay finished");
        println!(
            "replayed {} event(s); the {} wins this play ({})",
            recorded.events.len(),
            player_name(outcome.winner),
            outcome.reason
        );
        if let Some(path) = args.json_out {
            write_transcript(path, &session.transcript())?;
        }
        return Ok(winner_exit(outcome.winner));
    }

    let (Some(m0), Some(m1)) = (args.m0, args.m1) else {
        return Err(msg(
            "play needs two structure files (or --replay FILE)".to_string(),
        ));
    };
    let (Some(beta), Some(theta), Some(alpha)) = (args.beta, args.theta, args.alpha) else {
        return Err(msg(
            "play needs --beta, --theta, and --alpha (or --replay FILE)".to_string(),
        ));
    };
    let m0 = read_structure(m0)?;
    let m1 = read_structure(m1)?;
    let params = parse_params(beta, theta, alpha)?;
    let mut session = Session::new(&m0, &m1, params, args.mode, args.node_budget, args.side)?;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    run_live(&mut session, &mut lines)?;
    let outcome = session.outcome.clone().expect("the live loop ended on an outcome");
    if let Some(path) = args.json_out {
        write_transcript(path, &session.transcript())?;
    }
    Ok(winner_exit(outcome.winner))
}

fn write_transcript(path: &Path, transcript: &Transcript) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(transcript).expect("transcript serialization cannot fail");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
