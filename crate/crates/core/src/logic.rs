//! Catalog-relative sentences.
//!
//! A finite catalog of structures over one vocabulary stands in for the
//! class of all structures. Solving the game between every ordered pair
//! of members yields a win matrix; the transitive closure of the mutual
//! wins partitions the catalog, and a sentence denotes a union of those
//! classes. Membership of an outside structure is decided by adjoining it
//! to the catalog and re-partitioning, which keeps every answer grounded
//! in actual solved games.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backforth::{karp_equiv, KarpError};
use crate::game::{solve, GameError, GameParams, Mode, SolveOptions, Winner};
use crate::structure::{
    cartesian_power, is_induced_substructure, Structure, StructureError, Vocabulary,
};

/// Errors from catalog and sentence operations.
#[derive(Debug, Error)]
pub enum LogicError {
    /// A catalog must contain at least one structure.
    #[error("the catalog is empty")]
    EmptyCatalog,
    /// Catalog members must share one vocabulary.
    #[error("catalog members have different vocabularies")]
    MixedVocabulary,
    /// The operation requires both sentences to live on the same catalog.
    #[error("the sentences are over different catalogs")]
    CatalogMismatch,
    /// The structure's vocabulary does not fit the sentence's.
    #[error("vocabulary mismatch: {detail}")]
    VocabularyMismatch { detail: String },
    /// Adjoining the structure merged a selected class with an unselected
    /// one, so membership is not well defined.
    #[error("the structure bridges classes the catalog kept apart: {detail}")]
    NotComparable { detail: String },
    /// A derived model set failed to be a union of whole classes.
    #[error("the model set is not a union of classes: {detail}")]
    ClosureViolation { detail: String },
    /// A class index outside the partition.
    #[error("class id {id} out of range: the partition has {classes} classes")]
    BadClassId { id: usize, classes: usize },
    /// A structure index outside the catalog.
    #[error("structure id {id} out of range: the catalog has {len} members")]
    BadStructureId { id: usize, len: usize },
    /// The pointed catalog lacks a required expansion.
    #[error("missing expansion: {detail}")]
    MissingExpansion { detail: String },
    /// The first structure is not an induced substructure of the second.
    #[error("the first structure is not an induced substructure of the second")]
    NotSubstructure,
    /// The tuple space alone exceeds the work budget.
    #[error("work budget exceeded: {detail}")]
    BudgetExceeded { detail: String },
    /// Two solver modes disagreed while re-verifying a candidate witness.
    #[error("internal inconsistency: {detail}")]
    Internal { detail: String },
    /// A game solve failed for a specific matrix cell.
    #[error("solving pair ({i}, {j}): {source}")]
    SolverFailed {
        i: usize,
        j: usize,
        #[source]
        source: GameError,
    },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Karp(#[from] KarpError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A nonempty, fixed-order list of structures over one vocabulary.
/// Structure ids are positions in the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Structure>")]
#[serde(into = "Vec<Structure>")]
pub struct Catalog {
    structures: Vec<Structure>,
}

impl TryFrom<Vec<Structure>> for Catalog {
    type Error = LogicError;
    fn try_from(structures: Vec<Structure>) -> Result<Self, LogicError> {
        Catalog::new(structures)
    }
}

impl From<Catalog> for Vec<Structure> {
    fn from(catalog: Catalog) -> Vec<Structure> {
        catalog.structures
    }
}

impl Catalog {
    pub fn new(structures: Vec<Structure>) -> Result<Self, LogicError> {
        let first = structures.first().ok_or(LogicError::EmptyCatalog)?;
        if structures
            .iter()
            .any(|s| s.vocabulary() != first.vocabulary())
        {
            return Err(LogicError::MixedVocabulary);
        }
        Ok(Catalog { structures })
    }

    pub fn structures(&self) -> &[Structure] {
        &self.structures
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        self.structures[0].vocabulary()
    }

    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    pub fn get(&self, id: usize) -> Option<&Structure> {
        self.structures.get(id)
    }

    /// SHA-256 of the canonical JSON of the member list, as lowercase hex.
    pub fn hash_hex(&self) -> String {
        let bytes = serde_json::to_vec(&self.structures).expect("structures serialize");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The win matrix and the induced partition of a catalog.
///
/// `eve_matrix[i][j]` records whether the defender wins the game from
/// member `i` to member `j`; `classes` are the connected components of the
/// matrix (its reflexive–symmetric–transitive closure), sorted by least
/// member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivPartition {
    pub params: GameParams,
    pub eve_matrix: Vec<Vec<bool>>,
    pub classes: Vec<BTreeSet<usize>>,
}

impl EquivPartition {
    /// The index of the class containing structure `id`.
    pub fn class_of(&self, id: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&id))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Solves every ordered pair of the list. Cells run in parallel; each
/// solve is itself deterministic and strategies are not extracted.
fn eve_matrix(
    structures: &[Structure],
    params: &GameParams,
    options: &SolveOptions,
) -> Result<Vec<Vec<bool>>, LogicError> {
    let n = structures.len();
    let opts = SolveOptions {
        extract_strategy: false,
        extract_refutation: false,
        ..options.clone()
    };
    let cells: Vec<bool> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            solve(&structures[i], &structures[j], params, &opts)
                .map(|r| r.winner == Winner::Eve)
                .map_err(|source| LogicError::SolverFailed { i, j, source })
        })
        .collect::<Result<Vec<bool>, LogicError>>()?;
    Ok(cells.chunks(n).map(|row| row.to_vec()).collect())
}

fn classes_of_matrix(matrix: &[Vec<bool>]) -> Vec<BTreeSet<usize>> {
    let n = matrix.len();
    let mut uf = UnionFind::new(n);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &win) in row.iter().enumerate() {
            if win {
                uf.union(i, j);
            }
        }
    }
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..n {
        let root = uf.find(i);
        match classes.iter_mut().find(|c| c.contains(&root)) {
            Some(class) => {
                class.insert(i);
            }
            None => classes.push(BTreeSet::from([root, i])),
        }
    }
    classes.sort_by_key(|c| *c.iter().next().unwrap());
    classes
}

/// Partitions the catalog by the transitive closure of mutual wins at the
/// given parameters.
pub fn partition(
    catalog: &Catalog,
    params: &GameParams,
    options: &SolveOptions,
) -> Result<EquivPartition, LogicError> {
    params.validate()?;
    let eve_matrix = eve_matrix(catalog.structures(), params, options)?;
    let classes = classes_of_matrix(&eve_matrix);
    Ok(EquivPartition {
        params: params.clone(),
        eve_matrix,
        classes,
    })
}

/// A sentence: a union of partition classes of one catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceDenotation {
    catalog: Catalog,
    partition: EquivPartition,
    class_ids: BTreeSet<usize>,
}

/// The serializable face of a sentence: the catalog is referenced by hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceReport {
    pub catalog_hash: String,
    pub params: GameParams,
    pub class_ids: BTreeSet<usize>,
}

impl SentenceDenotation {
    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn params(&self) -> &GameParams {
        &self.partition.params
    }

    pub fn partition(&self) -> &EquivPartition {
        &self.partition
    }

    pub fn class_ids(&self) -> &BTreeSet<usize> {
        &self.class_ids
    }

    /// The sentence's vocabulary: the catalog's.
    pub fn vocabulary(&self) -> &Vocabulary {
        self.catalog.vocabulary()
    }

    /// The structure ids inside the selected classes.
    pub fn selected_ids(&self) -> BTreeSet<usize> {
        self.class_ids
            .iter()
            .flat_map(|c| self.partition.classes[*c].iter().copied())
            .collect()
    }

    pub fn to_report(&self) -> SentenceReport {
        SentenceReport {
            catalog_hash: self.catalog.hash_hex(),
            params: self.partition.params.clone(),
            class_ids: self.class_ids.clone(),
        }
    }
}

/// Builds a sentence selecting the given classes of the partition at
/// `params`.
pub fn sentence_from_classes(
    catalog: &Catalog,
    params: &GameParams,
    class_ids: impl IntoIterator<Item = usize>,
    options: &SolveOptions,
) -> Result<SentenceDenotation, LogicError> {
    let partition = partition(catalog, params, options)?;
    let class_ids: BTreeSet<usize> = class_ids.into_iter().collect();
    for &id in &class_ids {
        if id >= partition.classes.len() {
            return Err(LogicError::BadClassId {
                id,
                classes: partition.classes.len(),
            });
        }
    }
    Ok(SentenceDenotation {
        catalog: catalog.clone(),
        partition,
        class_ids,
    })
}

/// The sentence "equivalent to catalog member `member`" — the single class
/// containing it.
pub fn sentence_of(
    catalog: &Catalog,
    params: &GameParams,
    member: usize,
    options: &SolveOptions,
) -> Result<SentenceDenotation, LogicError> {
    if member >= catalog.len() {
        return Err(LogicError::BadStructureId {
            id: member,
            len: catalog.len(),
        });
    }
    let partition = partition(catalog, params, options)?;
    let class = partition.class_of(member).expect("member is classified");
    Ok(SentenceDenotation {
        catalog: catalog.clone(),
        partition,
        class_ids: BTreeSet::from([class]),
    })
}

/// Whether `m` models the sentence: its reduct is adjoined to the catalog,
/// the partition is recomputed, and the verdict is read off the class the
/// newcomer lands in. Errors when the newcomer's class contains both
/// selected and unselected old members — then the sentence's model class
/// is not closed over the extended catalog and membership is undefined.
/// No such instance is known on the shipped generators (whether the
/// underlying equivalence is transitive is exactly the open search this
/// crate's counterexample hunt probes), but the check keeps the answer
/// honest if one appears.
pub fn models(
    phi: &SentenceDenotation,
    m: &Structure,
    options: &SolveOptions,
) -> Result<bool, LogicError> {
    let tau = phi.vocabulary();
    if !tau.is_sub_vocabulary_of(m.vocabulary()) {
        return Err(LogicError::VocabularyMismatch {
            detail: "the structure's vocabulary does not contain the sentence's".to_string(),
        });
    }
    let reduct = m.reduct(tau)?;
    let mut structures = phi.catalog.structures().to_vec();
    let new_id = structures.len();
    structures.push(reduct);
    let matrix = eve_matrix(&structures, phi.params(), options)?;
    let classes = classes_of_matrix(&matrix);
    let home = classes
        .iter()
        .find(|c| c.contains(&new_id))
        .expect("the newcomer is classified");
    let selected = phi.selected_ids();
    let old_members: BTreeSet<usize> =
        home.iter().copied().filter(|&i| i != new_id).collect();
    let hits = old_members.intersection(&selected).count();
    if hits == 0 {
        return Ok(false);
    }
    if hits == old_members.len() {
        return Ok(true);
    }
    Err(LogicError::NotComparable {
        detail: format!(
            "the newcomer's class contains {hits} selected and {} unselected members",
            old_members.len() - hits
        ),
    })
}

/// The complement sentence on the same catalog and parameters.
pub fn sentence_not(phi: &SentenceDenotation) -> SentenceDenotation {
    let class_ids = (0..phi.partition.classes.len())
        .filter(|c| !phi.class_ids.contains(c))
        .collect();
    SentenceDenotation {
        catalog: phi.catalog.clone(),
        partition: phi.partition.clone(),
        class_ids,
    }
}

/// The conjunction: parameters move coordinatewise toward the finer
/// partition (larger height and set bounds, smaller clock bound), the
/// catalog is re-partitioned there, and the intersection of the two model
/// sets is re-read as a union of the finer classes.
pub fn sentence_and(
    phi0: &SentenceDenotation,
    phi1: &SentenceDenotation,
    options: &SolveOptions,
) -> Result<SentenceDenotation, LogicError> {
    if phi0.catalog != phi1.catalog {
        return Err(LogicError::CatalogMismatch);
    }
    let p0 = phi0.params();
    let p1 = phi1.params();
    let params = GameParams::new(
        p0.beta.clone().max(p1.beta.clone()),
        p0.theta.max(p1.theta),
        p0.alpha.clone().min(p1.alpha.clone()),
    );
    let partition = partition(&phi0.catalog, &params, options)?;
    let wanted: BTreeSet<usize> = phi0
        .selected_ids()
        .intersection(&phi1.selected_ids())
        .copied()
        .collect();
    let class_ids: BTreeSet<usize> = partition
        .classes
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_subset(&wanted))
        .map(|(i, _)| i)
        .collect();
    let covered: BTreeSet<usize> = class_ids
        .iter()
        .flat_map(|c| partition.classes[*c].iter().copied())
        .collect();
    if covered != wanted {
        return Err(LogicError::ClosureViolation {
            detail: format!(
                "{} member(s) of the intersection sit in classes straddling it",
                wanted.difference(&covered).count()
            ),
        });
    }
    Ok(SentenceDenotation {
        catalog: phi0.catalog.clone(),
        partition,
        class_ids,
    })
}

/// Particularization: `phi` lives over the pointed catalog (the base
/// vocabulary plus constant `c`, with every one-point expansion of every
/// base member present). A base structure is selected when some expansion
/// of it models `phi`; the result is re-closed over the base catalog at
/// height `β + α + 1` by taking every class meeting the selected set.
pub fn exists_const(
    phi: &SentenceDenotation,
    c: &str,
    base: &Catalog,
    options: &SolveOptions,
) -> Result<SentenceDenotation, LogicError> {
    let base_vocab = base.vocabulary();
    let mut constants = base_vocab.constants().clone();
    constants.insert(c.to_string());
    let pointed_vocab = Vocabulary::new(base_vocab.relations().clone(), constants)?;
    if phi.vocabulary() != &pointed_vocab {
        return Err(LogicError::VocabularyMismatch {
            detail: format!(
                "the sentence is not over the base vocabulary extended by the constant {c:?}"
            ),
        });
    }
    let phi_selected = phi.selected_ids();
    let mut selected_base: BTreeSet<usize> = BTreeSet::new();
    for (base_id, structure) in base.structures().iter().enumerate() {
        for element in structure.universe() {
            let expansion = structure.expand_constant(c, element)?;
            let Some(id) = phi
                .catalog
                .structures()
                .iter()
                .position(|s| *s == expansion)
            else {
                return Err(LogicError::MissingExpansion {
                    detail: format!(
                        "no expansion of base member {base_id} with {c} = {element} in the pointed catalog"
                    ),
                });
            };
            if phi_selected.contains(&id) {
                selected_base.insert(base_id);
            }
        }
    }
    let phi_params = phi.params();
    let params = GameParams::new(
        phi_params.beta.add(&phi_params.alpha).successor(),
        phi_params.theta,
        phi_params.alpha.clone(),
    );
    let partition = partition(base, &params, options)?;
    let class_ids = partition
        .classes
        .iter()
        .enumerate()
        .filter(|(_, class)| class.iter().any(|i| selected_base.contains(i)))
        .map(|(i, _)| i)
        .collect();
    Ok(SentenceDenotation {
        catalog: base.clone(),
        partition,
        class_ids,
    })
}

/// Whether `m`, an induced substructure of `n`, agrees with `n` on every
/// θ-tuple of its own elements: each tuple is adjoined as fresh constants
/// on both sides and the two expansions must be back-and-forth equivalent
/// to level 2β.
pub fn phi_submodel(
    m: &Structure,
    n: &Structure,
    theta: u32,
    beta: u64,
    budget: u64,
) -> Result<bool, LogicError> {
    if !is_induced_substructure(m, n)? {
        return Err(LogicError::NotSubstructure);
    }
    let tuple_count = (m.universe().len() as u128).pow(theta);
    if tuple_count > budget as u128 {
        return Err(LogicError::BudgetExceeded {
            detail: format!("{tuple_count} tuples at set bound {theta}"),
        });
    }
    // Fresh constant names: underscores are not used by the generators,
    // and more are prepended until any clash disappears.
    let mut prefix = "_c".to_string();
    while (0..theta).any(|i| m.vocabulary().has_symbol(&format!("{prefix}{i}"))) {
        prefix.insert(0, '_');
    }
    let universe: Vec<String> = m.universe().to_vec();
    for tuple in cartesian_power(&universe, theta as usize) {
        let mut em = m.clone();
        let mut en = n.clone();
        for (i, element) in tuple.iter().enumerate() {
            let name = format!("{prefix}{i}");
            em = em.expand_constant(&name, element)?;
            en = en.expand_constant(&name, element)?;
        }
        if !karp_equiv(&em, &en, theta, 2 * beta, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A verified counterexample to transitivity: mutual wins on the first two
/// pairs, a challenger win on the outer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntransitivityWitness {
    pub ids: (usize, usize, usize),
    pub structures: (Structure, Structure, Structure),
}

/// The outcome of a transitivity counterexample search over a catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntransitivityReport {
    pub params: GameParams,
    pub catalog_size: usize,
    pub pairs_checked: u64,
    pub triples_checked: u64,
    pub witness: Option<IntransitivityWitness>,
    pub exhausted: bool,
}

/// Searches the catalog for a triple with wins on (i,j) and (j,k) but not
/// (i,k). Any candidate is re-verified by solving all three games again in
/// full (non-normalized) mode before it is reported.
pub fn search_intransitivity(
    catalog: &Catalog,
    params: &GameParams,
    options: &SolveOptions,
) -> Result<IntransitivityReport, LogicError> {
    params.validate()?;
    let structures = catalog.structures();
    let matrix = eve_matrix(structures, params, options)?;
    let n = structures.len();
    let mut triples_checked = 0u64;
    let full_opts = SolveOptions {
        mode: Mode::Full,
        extract_strategy: false,
        extract_refutation: false,
        ..options.clone()
    };
    let verify_full = |i: usize, j: usize| -> Result<bool, LogicError> {
        solve(&structures[i], &structures[j], params, &full_opts)
            .map(|r| r.winner == Winner::Eve)
            .map_err(|source| LogicError::SolverFailed { i, j, source })
    };
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                triples_checked += 1;
                if !(matrix[i][j] && matrix[j][k] && !matrix[i][k]) {
                    continue;
                }
                let confirmed = verify_full(i, j)? && verify_full(j, k)? && !verify_full(i, k)?;
                if !confirmed {
                    return Err(LogicError::Internal {
                        detail: format!(
                            "candidate ({i}, {j}, {k}) did not re-verify in full mode"
                        ),
                    });
                }
                return Ok(IntransitivityReport {
                    params: params.clone(),
                    catalog_size: n,
                    pairs_checked: (n * n) as u64,
                    triples_checked,
                    witness: Some(IntransitivityWitness {
                        ids: (i, j, k),
                        structures: (
                            structures[i].clone(),
                            structures[j].clone(),
                            structures[k].clone(),
                        ),
                    }),
                    exhausted: false,
                });
            }
        }
    }
    Ok(IntransitivityReport {
        params: params.clone(),
        catalog_size: n,
        pairs_checked: (n * n) as u64,
        triples_checked,
        witness: None,
        exhausted: true,
    })
}
