//! `dg` — command-line front end for the similarity-game engine.
//!
//! Subcommands: `gen`, `solve`, `karp`, `classify`, `compose`,
//! `search-intransitive`, `play`. Every machine-readable output carries a
//! `schema_version` field and is byte-reproducible given identical inputs,
//! flags, and seed. Exit codes are a stable contract: 0 means the defender
//! wins (or a neutral command succeeded), 1 means the challenger wins, and
//! 2 means an error, including an exhausted work budget.

mod play;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dg_core::backforth::{karp_levels, karp_rank, KarpError, KarpLevels, KarpRank};
use dg_core::game::{
    compose, solve, verify_eve_strategy, GameError, GameParams, Mode, PositionalStrategy,
    RefutationTable, SolveOptions, SolveStats, Winner,
};
use dg_core::logic::{partition, search_intransitivity, Catalog, LogicError};
use dg_core::ordinal::Ordinal;
use dg_core::structure::{
    cycle, full_tree, linear_order, pure_set, random_structure, Structure, StructureError,
    Vocabulary,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Msg(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Karp(#[from] KarpError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn msg(text: impl Into<String>) -> CliError {
    CliError::Msg(text.into())
}

#[derive(Parser)]
#[command(
    name = "dg",
    version,
    about = "Exact solver and toolkit for parameterized similarity games on finite structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bound on elementary solver steps before giving up with exit code 2.
    #[arg(long, global = true, value_name = "N", default_value_t = 10_000_000)]
    node_budget: u64,

    /// Move-generation mode (defaults to lazy; an instance file may also
    /// carry a mode, which this flag overrides).
    #[arg(long, global = true, value_enum, value_name = "MODE")]
    mode: Option<ModeArg>,

    /// Seed for the randomized generator specs.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,

    /// Also write the machine-readable report (or transcript) to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Normalized,
    Full,
    Lazy,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Normalized => Mode::Normalized,
            ModeArg::Full => Mode::Full,
            ModeArg::Lazy => Mode::Lazy,
        }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Normalized => "normalized",
        Mode::Full => "full",
        Mode::Lazy => "lazy",
    }
}

fn mode_from_name(name: &str) -> Result<Mode, CliError> {
    match name {
        "normalized" => Ok(Mode::Normalized),
        "full" => Ok(Mode::Full),
        "lazy" => Ok(Mode::Lazy),
        other => Err(msg(format!(
            "unknown mode {other:?}: expected normalized, full, or lazy"
        ))),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate structures from generator specs and write them as JSON.
    ///
    /// Specs: "pure_set N", "linear_order N", "full_tree B D", "cycle N",
    /// "random N [REL:ARITY ...]". One spec produces a single structure
    /// object; several produce a JSON array usable as a catalog. The
    /// `random` spec derives from the global --seed (same seed, same
    /// bytes).
    Gen {
        /// Generator specs, one quoted string each.
        #[arg(required = true)]
        specs: Vec<String>,
        /// Output file (defaults to stdout).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Solve a game and print the winner. Exit 0 = defender, 1 = challenger.
    Solve {
        /// Left structure (JSON file).
        m0: Option<PathBuf>,
        /// Right structure (JSON file).
        m1: Option<PathBuf>,
        /// Height bound β, in normal-form text ("3", "w").
        #[arg(long, value_name = "ORD")]
        beta: Option<String>,
        /// Per-side set cap θ ≥ 1.
        #[arg(long, value_name = "N")]
        theta: Option<u32>,
        /// Clock bound α ≥ 1, in normal-form text ("1", "w").
        #[arg(long, value_name = "ORD")]
        alpha: Option<String>,
        /// Bundled instance file {"m0":…,"m1":…,"params":…,"mode":…}
        /// (replaces the positional arguments and parameter flags).
        #[arg(long, value_name = "PATH", conflicts_with_all = ["m0", "m1", "beta", "theta", "alpha"])]
        instance: Option<PathBuf>,
        /// Include the positional strategy in the report on a defender win.
        #[arg(long)]
        strategy: bool,
        /// Include a refuting-move table in the report on a challenger win.
        #[arg(long)]
        refutation: bool,
    },
    /// Compute the back-and-forth family levels for a pair of structures.
    Karp {
        m0: PathBuf,
        m1: PathBuf,
        /// Per-side set cap θ ≥ 1.
        #[arg(long, value_name = "N")]
        theta: u32,
        /// Compute levels up to this index (stops early on stabilization).
        #[arg(long, value_name = "N", default_value_t = 64)]
        up_to: u64,
        /// Also report whether level B is nonempty.
        #[arg(long, value_name = "N")]
        equiv_at: Option<u64>,
        /// Also report the rank of this map, given as a JSON pair list
        /// like [["e0","e0"],["e1","e2"]].
        #[arg(long, value_name = "JSON")]
        rank_of: Option<String>,
    },
    /// Partition a catalog (JSON array of structures) by mutual wins.
    Classify {
        catalog: PathBuf,
        #[arg(long, value_name = "ORD")]
        beta: String,
        #[arg(long, value_name = "N")]
        theta: u32,
        #[arg(long, value_name = "ORD")]
        alpha: String,
    },
    /// Solve two legs a→b and b→c, compose the winning strategies, and
    /// verify the composite at the natural sum of the clock bounds.
    /// Exit 0 = composite verified, 1 = a leg is challenger-won.
    Compose {
        m0: PathBuf,
        m1: PathBuf,
        m2: PathBuf,
        /// Shared height bound β for both legs.
        #[arg(long, value_name = "ORD")]
        beta: String,
        /// Shared set cap θ for both legs.
        #[arg(long, value_name = "N")]
        theta: u32,
        /// Clock bound for the a→b leg.
        #[arg(long, value_name = "ORD")]
        alpha_ab: String,
        /// Clock bound for the b→c leg.
        #[arg(long, value_name = "ORD")]
        alpha_bc: String,
    },
    /// Search a catalog for three members witnessing a failure of
    /// transitivity of mutual wins at fixed parameters.
    SearchIntransitive {
        catalog: PathBuf,
        #[arg(long, value_name = "ORD")]
        beta: String,
        #[arg(long, value_name = "N")]
        theta: u32,
        #[arg(long, value_name = "ORD")]
        alpha: String,
    },
    /// Play the game interactively against the engine, or replay a
    /// transcript in batch mode. Exit 0 = defender won the session,
    /// 1 = challenger won.
    Play {
        m0: Option<PathBuf>,
        m1: Option<PathBuf>,
        #[arg(long, value_name = "ORD")]
        beta: Option<String>,
        #[arg(long, value_name = "N")]
        theta: Option<u32>,
        #[arg(long, value_name = "ORD")]
        alpha: Option<String>,
        /// Which side the human plays.
        #[arg(long, value_enum, value_name = "SIDE", default_value_t = SideArg::Adam)]
        side: SideArg,
        /// Replay a recorded transcript instead of reading stdin.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["m0", "m1", "beta", "theta", "alpha", "side"])]
        replay: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Adam,
    Eve,
}

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_structure(path: &Path) -> Result<Structure, CliError> {
    let text = read_text(path)?;
    Structure::from_json(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn read_catalog(path: &Path) -> Result<Catalog, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_ordinal(text: &str, what: &str) -> Result<Ordinal, CliError> {
    text.parse::<Ordinal>()
        .map_err(|e| msg(format!("cannot parse {what} {text:?}: {e}")))
}

/// Parameter admissibility for solving and playing: both ordinal bounds
/// stay at or below the first infinite ordinal.
fn check_admissible(params: &GameParams) -> Result<(), CliError> {
    params.validate()?;
    let omega = Ordinal::omega();
    if params.beta > omega || params.alpha > omega {
        return Err(msg(format!(
            "inadmissible parameters: solving requires beta <= w and alpha <= w \
             (got beta={}, alpha={})",
            params.beta, params.alpha
        )));
    }
    Ok(())
}

fn parse_params(beta: &str, theta: u32, alpha: &str) -> Result<GameParams, CliError> {
    let params = GameParams::new(
        parse_ordinal(beta, "height bound")?,
        theta,
        parse_ordinal(alpha, "clock bound")?,
    );
    check_admissible(&params)?;
    Ok(params)
}

fn pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn emit_report(json_out: Option<&Path>, report: &impl Serialize) -> Result<(), CliError> {
    if let Some(path) = json_out {
        write_text(path, &pretty(report))?;
    }
    Ok(())
}

fn options(mode: Mode, node_budget: u64) -> SolveOptions {
    SolveOptions {
        mode,
        node_budget,
        symmetry_reduction: false,
        extract_strategy: false,
        extract_refutation: false,
    }
}

fn winner_exit(winner: Winner) -> ExitCode {
    match winner {
        Winner::Eve => ExitCode::from(0),
        Winner::Adam => ExitCode::from(1),
    }
}

/// A bundled game instance, as written and read by the front end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m0: Structure,
    pub m1: Structure,
    pub params: GameParams,
    pub mode: String,
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SolveReport {
    schema_version: &'static str,
    command: &'static str,
    params: GameParams,
    mode: &'static str,
    winner: Winner,
    stats: SolveStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<PositionalStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refutation: Option<RefutationTable>,
}

#[derive(Serialize)]
struct KarpReport {
    schema_version: &'static str,
    command: &'static str,
    theta: u32,
    up_to: u64,
    levels: KarpLevels,
    #[serde(skip_serializing_if = "Option::is_none")]
    equiv_at: Option<KarpEquivReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank_of: Option<KarpRankReport>,
}

#[derive(Serialize)]
struct KarpEquivReport {
    beta: u64,
    equivalent: bool,
}

#[derive(Serialize)]
struct KarpRankReport {
    map: dg_core::structure::PartialMap,
    rank: KarpRank,
}

#[derive(Serialize)]
struct ClassifyReport {
    schema_version: &'static str,
    command: &'static str,
    catalog_hash: String,
    catalog_size: usize,
    params: GameParams,
    eve_matrix: Vec<Vec<bool>>,
    classes: Vec<BTreeSet<usize>>,
}

#[derive(Serialize)]
struct ComposeReport {
    schema_version: &'static str,
    command: &'static str,
    params_ab: GameParams,
    params_bc: GameParams,
    composed_params: GameParams,
    verified: bool,
    strategy: PositionalStrategy,
}

#[derive(Serialize)]
struct SearchReport {
    schema_version: &'static str,
    command: &'static str,
    params: GameParams,
    catalog_hash: String,
    catalog_size: usize,
    pairs_checked: u64,
    triples_checked: u64,
    exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<SearchWitnessReport>,
}

#[derive(Serialize)]
struct SearchWitnessReport {
    ids: [usize; 3],
    structures: Vec<Structure>,
    /// Replayable single-game instances for the three legs a→b, b→c, a→c.
    instances: Vec<InstanceFile>,
}

// ---------------------------------------------------------------------------
// Command implementations.
// ---------------------------------------------------------------------------

fn generate_one(spec: &str, seed: u64) -> Result<Structure, CliError> {
    let tokens: Vec<&str> = spec.split_whitespace().collect();
    let usage = "expected \"pure_set N\", \"linear_order N\", \"full_tree B D\", \
                 \"cycle N\", or \"random N [REL:ARITY ...]\"";
    let nat = |t: &str, what: &str| -> Result<usize, CliError> {
        t.parse::<usize>()
            .map_err(|_| msg(format!("bad {what} {t:?} in generator spec {spec:?}")))
    };
    match tokens.as_slice() {
        ["pure_set", n] => Ok(pure_set(nat(n, "size")?)?),
        ["linear_order", n] => Ok(linear_order(nat(n, "size")?)?),
        ["full_tree", b, d] => Ok(full_tree(nat(b, "branching")?, nat(d, "depth")?)?),
        ["cycle", n] => Ok(cycle(nat(n, "size")?)?),
        ["random", n, rels @ ..] => {
            let mut relations = BTreeMap::new();
            for r in rels {
                let (name, arity) = r.split_once(':').ok_or_else(|| {
                    msg(format!(
                        "bad relation spec {r:?} in {spec:?}: expected NAME:ARITY"
                    ))
                })?;
                relations.insert(name.to_string(), nat(arity, "arity")?);
            }
            let vocabulary = Vocabulary::new(relations, BTreeSet::new())?;
            Ok(random_structure(&vocabulary, nat(n, "size")?, seed)?)
        }
        _ => Err(msg(format!("cannot parse generator spec {spec:?}: {usage}"))),
    }
}

fn cmd_gen(
    specs: &[String],
    out: Option<&Path>,
    json_out: Option<&Path>,
    seed: u64,
) -> Result<ExitCode, CliError> {
    let mut structures = Vec::new();
    for spec in specs {
        structures.push(generate_one(spec, seed)?);
    }
    let text = if structures.len() == 1 {
        pretty(&structures[0])
    } else {
        pretty(&structures)
    };
    match out {
        Some(path) => {
            write_text(path, &text)?;
            println!(
                "wrote {} structure{} to {}",
                structures.len(),
                if structures.len() == 1 { "" } else { "s" },
                path.display()
            );
        }
        None => print!("{text}"),
    }
    if let Some(path) = json_out {
        write_text(path, &text)?;
    }
    Ok(ExitCode::from(0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    m0: Option<&Path>,
    m1: Option<&Path>,
    beta: Option<&str>,
    theta: Option<u32>,
    alpha: Option<&str>,
    instance: Option<&Path>,
    strategy: bool,
    refutation: bool,
    mode_flag: Option<ModeArg>,
    node_budget: u64,
    json_out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let (m0, m1, params, file_mode) = match instance {
        Some(path) => {
            let text = read_text(path)?;
            let inst: InstanceFile =
                serde_json::from_str(&text).map_err(|source| CliError::Json {
                    path: path.display().to_string(),
                    source,
                })?;
            let mode = mode_from_name(&inst.mode)?;
            (inst.m0, inst.m1, inst.params, Some(mode))
        }
        None => {
            let (Some(m0), Some(m1)) = (m0, m1) else {
                return Err(msg(
                    "solve needs two structure files (or --instance FILE)".to_string(),
                ));
            };
            let (Some(beta), Some(theta), Some(alpha)) = (beta, theta, alpha) else {
                return Err(msg(
                    "solve needs --beta, --theta, and --alpha (or --instance FILE)".to_string(),
                ));
            };
            (
                read_structure(m0)?,
                read_structure(m1)?,
                parse_params(beta, theta, alpha)?,
                None,
            )
        }
    };
    check_admissible(&params)?;
    let mode = mode_flag.map(Mode::from).or(file_mode).unwrap_or_default();
    let opts = SolveOptions {
        extract_strategy: strategy,
        extract_refutation: refutation,
        ..options(mode, node_budget)
    };
    let result = solve(&m0, &m1, &params, &opts)?;
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        command: "solve",
        params: params.clone(),
        mode: mode_name(mode),
        winner: result.winner,
        stats: result.stats,
        strategy: result.strategy,
        refutation: result.refutation,
    };
    match result.winner {
        Winner::Eve => println!(
            "defender wins at (beta={}, theta={}, alpha={}) [{} nodes]",
            params.beta, params.theta, params.alpha, result.stats.nodes_expanded
        ),
        Winner::Adam => println!(
            "challenger wins at (beta={}, theta={}, alpha={}) [{} nodes]",
            params.beta, params.theta, params.alpha, result.stats.nodes_expanded
        ),
    }
    emit_report(json_out, &report)?;
    Ok(winner_exit(result.winner))
}

#[allow(clippy::too_many_arguments)]
fn cmd_karp(
    m0: &Path,
    m1: &Path,
    theta: u32,
    up_to: u64,
    equiv_at: Option<u64>,
    rank_of: Option<&str>,
    node_budget: u64,
    json_out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let m0 = read_structure(m0)?;
    let m1 = read_structure(m1)?;
    let levels = karp_levels(&m0, &m1, theta, up_to, node_budget)?;
    match levels.stabilized_at {
        Some(k) => println!(
            "computed {} level(s); stabilized at level {k} with {} map(s)",
            levels.levels.len(),
            levels.levels.last().map_or(0, |l| l.maps.len())
        ),
        None => println!(
            "computed {} level(s); not yet stationary at the requested bound",
            levels.levels.len()
        ),
    }
    let equiv_report = match equiv_at {
        Some(beta) => {
            let equivalent = levels
                .level(beta)
                .map_or(false, |level| !level.maps.is_empty());
            println!(
                "level {beta} is {}",
                if equivalent { "nonempty" } else { "empty" }
            );
            Some(KarpEquivReport { beta, equivalent })
        }
        None => None,
    };
    let rank_report = match rank_of {
        Some(text) => {
            let map: dg_core::structure::PartialMap =
                serde_json::from_str(text).map_err(|source| CliError::Json {
                    path: "--rank-of".to_string(),
                    source,
                })?;
            let rank = karp_rank(&m0, &m1, theta, &map, node_budget)?;
            println!("rank of the given map: {rank}");
            Some(KarpRankReport { map, rank })
        }
        None => None,
    };
    let report = KarpReport {
        schema_version: SCHEMA_VERSION,
        command: "karp",
        theta,
        up_to,
        levels,
        equiv_at: equiv_report,
        rank_of: rank_report,
    };
    emit_report(json_out, &report)?;
    Ok(ExitCode::from(0))
}

fn cmd_classify(
    catalog: &Path,
    beta: &str,
    theta: u32,
    alpha: &str,
    mode_flag: Option<ModeArg>,
    node_budget: u64,
    json_out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let catalog = read_catalog(catalog)?;
    let params = parse_params(beta, theta, alpha)?;
    let mode = mode_flag.map(Mode::from).unwrap_or_default();
    let part = partition(&catalog, &params, &options(mode, node_budget))?;
    println!(
        "{} structure(s) fall into {} class(es) at (beta={}, theta={}, alpha={})",
        catalog.structures().len(),
        part.classes.len(),
        params.beta,
        params.theta,
        params.alpha
    );
    for (k, class) in part.classes.iter().enumerate() {
        let members: Vec<String> = class.iter().map(|i| i.to_string()).collect();
        println!("  class {k}: members {{{}}}", members.join(", "));
    }
    let report = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        command: "classify",
        catalog_hash: catalog.hash_hex(),
        catalog_size: catalog.structures().len(),
        params: part.params.clone(),
        eve_matrix: part.eve_matrix.clone(),
        classes: part.classes.clone(),
    };
    emit_report(json_out, &report)?;
    Ok(ExitCode::from(0))
}

#[allow(clippy::too_many_arguments)]
fn cmd_compose(
    m0: &Path,
    m1: &Path,
    m2: &Path,
    beta: &str,
    theta: u32,
    alpha_ab: &str,
    alpha_bc: &str,
    mode_flag: Option<ModeArg>,
    node_budget: u64,
    json_out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let m0 = read_structure(m0)?;
    let m1 = read_structure(m1)?;
    let m2 = read_structure(m2)?;
    let params_ab = parse_params(beta, theta, alpha_ab)?;
    let params_bc = parse_params(beta, theta, alpha_bc)?;
    let mode = mode_flag.map(Mode::from).unwrap_or_default();
    let opts = SolveOptions {
        extract_strategy: true,
        ..options(mode, node_budget)
    };
    let left = solve(&m0, &m1, &params_ab, &opts)?;
    if left.winner == Winner::Adam {
        println!(
            "challenger wins the first leg at (beta={}, theta={}, alpha={}); nothing to compose",
            params_ab.beta, params_ab.theta, params_ab.alpha
        );
        return Ok(ExitCode::from(1));
    }
    let right = solve(&m1, &m2, &params_bc, &opts)?;
    if right.winner == Winner::Adam {
        println!(
            "challenger wins the second leg at (beta={}, theta={}, alpha={}); nothing to compose",
            params_bc.beta, params_bc.theta, params_bc.alpha
        );
        return Ok(ExitCode::from(1));
    }
    let kab = left.strategy.expect("defender win with extraction requested");
    let kbc = right.strategy.expect("defender win with extraction requested");
    let composed = compose(&kab, &params_ab, &kbc, &params_bc, &m0, &m1, &m2)?;
    let composed_params = GameParams::new(
        params_ab.beta.clone(),
        theta,
        params_ab.alpha.nat_sum(&params_bc.alpha),
    );
    let verified = verify_eve_strategy(
        &composed,
        &composed_params,
        &m0,
        &m2,
        dg_core::game::AdamMode::Normalized,
    )?;
    if !verified {
        return Err(msg(
            "internal flaw: the composed strategy failed verification".to_string(),
        ));
    }
    println!(
        "composed strategy with {} position(s) verifies at (beta={}, theta={}, alpha={})",
        composed.positions.len(),
        composed_params.beta,
        composed_params.theta,
        composed_params.alpha
    );
    let report = ComposeReport {
        schema_version: SCHEMA_VERSION,
        command: "compose",
        params_ab,
        params_bc,
        composed_params,
        verified,
        strategy: composed,
    };
    emit_report(json_out, &report)?;
    Ok(ExitCode::from(0))
}

fn cmd_search(
    catalog: &Path,
    beta: &str,
    theta: u32,
    alpha: &str,
    mode_flag: Option<ModeArg>,
    node_budget: u64,
    json_out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let catalog = read_catalog(catalog)?;
    let params = parse_params(beta, theta, alpha)?;
    let mode = mode_flag.map(Mode::from).unwrap_or_default();
    let report = search_intransitivity(&catalog, &params, &options(mode, node_budget))?;
    let witness = match &report.witness {
        Some(w) => {
            let (a, b, c) = w.ids;
            println!(
                "counterexample to transitivity: members {a} and {b} tie, {b} and {c} tie, \
                 but {a} and {c} do not (checked in exhaustive-move mode)"
            );
            let (sa, sb, sc) = &w.structures;
            let leg = |m0: &Structure, m1: &Structure| InstanceFile {
                m0: m0.clone(),
                m1: m1.clone(),
                params: params.clone(),
                mode: mode_name(Mode::Full).to_string(),
            };
            Some(SearchWitnessReport {
                ids: [a, b, c],
                structures: vec![sa.clone(), sb.clone(), sc.clone()],
                instances: vec![leg(sa, sb), leg(sb, sc), leg(sa, sc)],
            })
        }
        None => {
            if report.exhausted {
                println!(
                    "exhausted, no counterexample: {} ordered triple(s) over {} pair(s) \
                     at (beta={}, theta={}, alpha={})",
                    report.triples_checked,
                    report.pairs_checked,
                    params.beta,
                    params.theta,
                    params.alpha
                );
            } else {
                println!("search stopped before exhausting the catalog");
            }
            None
        }
    };
    let out = SearchReport {
        schema_version: SCHEMA_VERSION,
        command: "search-intransitive",
        params: report.params.clone(),
        catalog_hash: catalog.hash_hex(),
        catalog_size: report.catalog_size,
        pairs_checked: report.pairs_checked,
        triples_checked: report.triples_checked,
        exhausted: report.exhausted,
        witness,
    };
    emit_report(json_out, &out)?;
    Ok(ExitCode::from(0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { specs, out } => cmd_gen(
            specs,
            out.as_deref(),
            cli.json_out.as_deref(),
            cli.seed,
        ),
        Command::Solve {
            m0,
            m1,
            beta,
            theta,
            alpha,
            instance,
            strategy,
            refutation,
        } => cmd_solve(
            m0.as_deref(),
            m1.as_deref(),
            beta.as_deref(),
            *theta,
            alpha.as_deref(),
            instance.as_deref(),
            *strategy,
            *refutation,
            cli.mode,
            cli.node_budget,
            cli.json_out.as_deref(),
        ),
        Command::Karp {
            m0,
            m1,
            theta,
            up_to,
            equiv_at,
            rank_of,
        } => cmd_karp(
            m0,
            m1,
            *theta,
            *up_to,
            *equiv_at,
            rank_of.as_deref(),
            cli.node_budget,
            cli.json_out.as_deref(),
        ),
        Command::Classify {
            catalog,
            beta,
            theta,
            alpha,
        } => cmd_classify(
            catalog,
            beta,
            *theta,
            alpha,
            cli.mode,
            cli.node_budget,
            cli.json_out.as_deref(),
        ),
        Command::Compose {
            m0,
            m1,
            m2,
            beta,
            theta,
            alpha_ab,
            alpha_bc,
        } => cmd_compose(
            m0,
            m1,
            m2,
            beta,
            *theta,
            alpha_ab,
            alpha_bc,
            cli.mode,
            cli.node_budget,
            cli.json_out.as_deref(),
        ),
        Command::SearchIntransitive {
            catalog,
            beta,
            theta,
            alpha,
        } => cmd_search(
            catalog,
            beta,
            *theta,
            alpha,
            cli.mode,
            cli.node_budget,
            cli.json_out.as_deref(),
        ),
        Command::Play {
            m0,
            m1,
            beta,
            theta,
            alpha,
            side,
            replay,
        } => play::cmd_play(play::PlayArgs {
            m0: m0.as_deref(),
            m1: m1.as_deref(),
            beta: beta.as_deref(),
            theta: *theta,
            alpha: alpha.as_deref(),
            side: *side,
            replay: replay.as_deref(),
            mode: cli.mode.map(Mode::from).unwrap_or_default(),
            node_budget: cli.node_budget,
            json_out: cli.json_out.as_deref(),
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
