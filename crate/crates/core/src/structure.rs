//! Finite relational structures over finite vocabularies: reducts, symbol
//! renamings, constant expansions, partial-isomorphism checking, a bit-exact
//! JSON format, and the example generators used throughout the test suites.
//!
//! Function symbols are not native; encode an n-ary function as its
//! (n+1)-ary graph relation.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from vocabulary/structure construction and the operations on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("symbol {name:?} is declared more than once in the vocabulary")]
    DuplicateSymbol { name: String },
    #[error("relation {name:?} must have arity at least 1")]
    ZeroArity { name: String },
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("element id {id:?} appears more than once in the universe")]
    DuplicateElement { id: String },
    #[error("unknown element id {id:?}")]
    UnknownElement { id: String },
    #[error("unknown symbol {name:?}")]
    UnknownSymbol { name: String },
    #[error("missing interpretation for symbol {name:?}")]
    MissingInterpretation { name: String },
    #[error("tuple {tuple:?} has length {got} but relation {name:?} has arity {expected}")]
    ArityMismatch {
        name: String,
        tuple: Vec<String>,
        got: usize,
        expected: usize,
    },
    #[error("the two structures have different vocabularies")]
    VocabularyMismatch,
    #[error("map is not functional/injective at {element:?}")]
    NotInjective { element: String },
    #[error("symbol renaming is invalid: {reason}")]
    BadRenaming { reason: String },
    #[error("invalid generator parameter: {reason}")]
    InvalidParameter { reason: String },
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVocabulary {
    relations: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

/// A finite vocabulary: relation symbols with positive arities plus constant
/// symbols. Symbol names are unique across both kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVocabulary")]
pub struct Vocabulary {
    relations: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

impl TryFrom<RawVocabulary> for Vocabulary {
    type Error = StructureError;
    fn try_from(raw: RawVocabulary) -> Result<Self, Self::Error> {
        Vocabulary::new(raw.relations, raw.constants)
    }
}

impl Vocabulary {
    pub fn new(
        relations: BTreeMap<String, usize>,
        constants: BTreeSet<String>,
    ) -> Result<Self, StructureError> {
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(StructureError::ZeroArity { name: name.clone() });
            }
            if constants.contains(name) {
                return Err(StructureError::DuplicateSymbol { name: name.clone() });
            }
        }
        Ok(Vocabulary {
            relations,
            constants,
        })
    }

    /// The empty vocabulary (pure sets).
    pub fn empty() -> Self {
        Vocabulary {
            relations: BTreeMap::new(),
            constants: BTreeSet::new(),
        }
    }

    /// A vocabulary with a single binary relation symbol.
    pub fn single_binary(name: &str) -> Self {
        Vocabulary {
            relations: BTreeMap::from([(name.to_string(), 2)]),
            constants: BTreeSet::new(),
        }
    }

    pub fn relations(&self) -> &BTreeMap<String, usize> {
        &self.relations
    }

    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations.get(relation).copied()
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.relations.contains_key(name) || self.constants.contains(name)
    }

    /// True iff every symbol of `self` occurs in `other` with the same kind
    /// and arity.
    pub fn is_sub_vocabulary_of(&self, other: &Vocabulary) -> bool {
        self.relations
            .iter()
            .all(|(name, arity)| other.relations.get(name) == Some(arity))
            && self.constants.iter().all(|c| other.constants.contains(c))
    }
}

// ---------------------------------------------------------------------------
// Structure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    vocabulary: Vocabulary,
    universe: Vec<String>,
    relations: BTreeMap<String, BTreeSet<Vec<String>>>,
    constants: BTreeMap<String, String>,
}

/// A finite structure: an ordered universe of opaque element ids plus
/// interpretations for every vocabulary symbol.
///
/// The JSON form is a bit-exact contract, e.g.
/// `{"vocabulary":{"relations":{"<":2},"constants":["c"]},"universe":["e0","e1"],"relations":{"<":[["e0","e1"]]},"constants":{"c":"e0"}}`;
/// unknown fields are rejected, element ids are opaque strings, and the
/// order of components within a tuple is significant. The optional `tag`
/// (a disjointness label for game boards) is runtime-only and never
/// serialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure")]
pub struct Structure {
    vocabulary: Vocabulary,
    universe: Vec<String>,
    relations: BTreeMap<String, BTreeSet<Vec<String>>>,
    constants: BTreeMap<String, String>,
    #[serde(skip)]
    tag: Option<String>,
}

impl TryFrom<RawStructure> for Structure {
    type Error = StructureError;
    fn try_from(raw: RawStructure) -> Result<Self, Self::Error> {
        Structure::new(raw.vocabulary, raw.universe, raw.relations, raw.constants)
    }
}

impl Structure {
    pub fn new(
        vocabulary: Vocabulary,
        universe: Vec<String>,
        relations: BTreeMap<String, BTreeSet<Vec<String>>>,
        constants: BTreeMap<String, String>,
    ) -> Result<Self, StructureError> {
        if universe.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for id in &universe {
            if !seen.insert(id) {
                return Err(StructureError::DuplicateElement { id: id.clone() });
            }
        }
        for name in relations.keys() {
            if !vocabulary.relations.contains_key(name) {
                return Err(StructureError::UnknownSymbol { name: name.clone() });
            }
        }
        for (name, arity) in &vocabulary.relations {
            let Some(tuples) = relations.get(name) else {
                return Err(StructureError::MissingInterpretation { name: name.clone() });
            };
            for tuple in tuples {
                if tuple.len() != *arity {
                    return Err(StructureError::ArityMismatch {
                        name: name.clone(),
                        tuple: tuple.clone(),
                        got: tuple.len(),
                        expected: *arity,
                    });
                }
                for id in tuple {
                    if !seen.contains(id.as_str()) {
                        return Err(StructureError::UnknownElement { id: id.clone() });
                    }
                }
            }
        }
        for name in constants.keys() {
            if !vocabulary.constants.contains(name) {
                return Err(StructureError::UnknownSymbol { name: name.clone() });
            }
        }
        for name in &vocabulary.constants {
            let Some(id) = constants.get(name) else {
                return Err(StructureError::MissingInterpretation { name: name.clone() });
            };
            if !seen.contains(id.as_str()) {
                return Err(StructureError::UnknownElement { id: id.clone() });
            }
        }
        Ok(Structure {
            vocabulary,
            universe,
            relations,
            constants,
            tag: None,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn relations(&self) -> &BTreeMap<String, BTreeSet<Vec<String>>> {
        &self.relations
    }

    pub fn constants(&self) -> &BTreeMap<String, String> {
        &self.constants
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    /// Attaches a disjointness label (runtime-only; not serialized).
    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }

    pub fn contains(&self, id: &str) -> bool {
        self.universe.iter().any(|e| e == id)
    }

    /// True iff `tuple` is in the interpretation of `relation`.
    pub fn holds(&self, relation: &str, tuple: &[String]) -> bool {
        self.relations
            .get(relation)
            .is_some_and(|tuples| tuples.contains(tuple))
    }

    pub fn constant(&self, name: &str) -> Option<&str> {
        self.constants.get(name).map(String::as_str)
    }

    /// Compact JSON rendering (the bit-exact wire format).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Restricts the structure to a sub-vocabulary ("forgetting" the other
    /// symbols). The universe is unchanged.
    pub fn reduct(&self, tau0: &Vocabulary) -> Result<Structure, StructureError> {
        if !tau0.is_sub_vocabulary_of(&self.vocabulary) {
            let missing = tau0
                .relations
                .keys()
                .find(|n| self.vocabulary.relations.get(*n) != tau0.relations.get(*n))
                .or_else(|| {
                    tau0.constants
                        .iter()
                        .find(|c| !self.vocabulary.constants.contains(*c))
                });
            return Err(StructureError::UnknownSymbol {
                name: missing.cloned().unwrap_or_default(),
            });
        }
        let relations = self
            .relations
            .iter()
            .filter(|(name, _)| tau0.relations.contains_key(*name))
            .map(|(name, tuples)| (name.clone(), tuples.clone()))
            .collect();
        let constants = self
            .constants
            .iter()
            .filter(|(name, _)| tau0.constants.contains(*name))
            .map(|(name, id)| (name.clone(), id.clone()))
            .collect();
        Ok(Structure {
            vocabulary: tau0.clone(),
            universe: self.universe.clone(),
            relations,
            constants,
            tag: self.tag.clone(),
        })
    }

    /// Relabels symbols along `rho` (symbols absent from `rho` keep their
    /// names). The result must again be a valid vocabulary: targets may not
    /// collide and kinds are preserved.
    pub fn rename(&self, rho: &BTreeMap<String, String>) -> Result<Structure, StructureError> {
        for name in rho.keys() {
            if !self.vocabulary.has_symbol(name) {
                return Err(StructureError::UnknownSymbol { name: name.clone() });
            }
        }
        let map_name =
            |name: &String| -> String { rho.get(name).cloned().unwrap_or_else(|| name.clone()) };

        let mut relations_vocab: BTreeMap<String, usize> = BTreeMap::new();
        for (name, arity) in &self.vocabulary.relations {
            if relations_vocab.insert(map_name(name), *arity).is_some() {
                return Err(StructureError::BadRenaming {
                    reason: format!("two relation symbols map to {:?}", map_name(name)),
                });
            }
        }
        let mut constants_vocab: BTreeSet<String> = BTreeSet::new();
        for name in &self.vocabulary.constants {
            if !constants_vocab.insert(map_name(name)) {
                return Err(StructureError::BadRenaming {
                    reason: format!("two constant symbols map to {:?}", map_name(name)),
                });
            }
        }
        let vocabulary =
            Vocabulary::new(relations_vocab, constants_vocab).map_err(|e| match e {
                StructureError::DuplicateSymbol { name } => StructureError::BadRenaming {
                    reason: format!("renamed symbols collide at {name:?}"),
                },
                other => other,
            })?;
        let relations = self
            .relations
            .iter()
            .map(|(name, tuples)| (map_name(name), tuples.clone()))
            .collect();
        let constants = self
            .constants
            .iter()
            .map(|(name, id)| (map_name(name), id.clone()))
            .collect();
        Ok(Structure {
            vocabulary,
            universe: self.universe.clone(),
            relations,
            constants,
            tag: self.tag.clone(),
        })
    }

    /// Expands the structure with a fresh constant symbol `c` naming `e`.
    pub fn expand_constant(&self, c: &str, e: &str) -> Result<Structure, StructureError> {
        if self.vocabulary.has_symbol(c) {
            return Err(StructureError::DuplicateSymbol {
                name: c.to_string(),
            });
        }
        if !self.contains(e) {
            return Err(StructureError::UnknownElement { id: e.to_string() });
        }
        let mut out = self.clone();
        out.vocabulary.constants.insert(c.to_string());
        out.constants.insert(c.to_string(), e.to_string());
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Partial maps and partial isomorphisms
// ---------------------------------------------------------------------------

/// A finite injective partial function between element-id sets, kept in both
/// directions for O(log n) lookups either way. Serialized as a sorted list of
/// `[source, target]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialMap {
    forward: BTreeMap<String, String>,
    backward: BTreeMap<String, String>,
}

// Order and hash by the forward map alone; the backward map is derived.
impl PartialOrd for PartialMap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PartialMap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.forward.cmp(&other.forward)
    }
}

impl std::hash::Hash for PartialMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.forward.hash(state);
    }
}

impl PartialMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut map = PartialMap::new();
        for (a, b) in pairs {
            map.insert(a.into(), b.into())?;
        }
        Ok(map)
    }

    /// Adds the pair `(source, target)`; rejects anything that would break
    /// functionality or injectivity (re-adding an existing pair is fine).
    pub fn insert(&mut self, source: String, target: String) -> Result<(), StructureError> {
        match (self.forward.get(&source), self.backward.get(&target)) {
            (Some(t), _) if *t != target => {
                return Err(StructureError::NotInjective { element: source })
            }
            (_, Some(s)) if *s != source => {
                return Err(StructureError::NotInjective { element: target })
            }
            _ => {}
        }
        self.backward.insert(target.clone(), source.clone());
        self.forward.insert(source, target);
        Ok(())
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.forward.get(source).map(String::as_str)
    }

    pub fn get_inverse(&self, target: &str) -> Option<&str> {
        self.backward.get(target).map(String::as_str)
    }

    pub fn contains_source(&self, source: &str) -> bool {
        self.forward.contains_key(source)
    }

    pub fn contains_target(&self, target: &str) -> bool {
        self.backward.contains_key(target)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.forward.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.forward.keys().map(String::as_str)
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.backward.keys().map(String::as_str)
    }

    pub fn inverse(&self) -> PartialMap {
        PartialMap {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn is_extension_of(&self, other: &PartialMap) -> bool {
        other
            .forward
            .iter()
            .all(|(a, b)| self.forward.get(a) == Some(b))
    }
}

impl Serialize for PartialMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.forward.iter())
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<(String, String)> = Vec::deserialize(deserializer)?;
        PartialMap::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

/// All tuples of the given length over `items`, with repetition, in
/// lexicographic order of index sequences.
pub(crate) fn cartesian_power<T: Clone>(items: &[T], arity: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for item in items {
                let mut tuple = prefix.clone();
                tuple.push(item.clone());
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

/// Checks that `g` is a partial isomorphism from `m0` to `m1`:
/// every atomic fact over dom(g) is preserved and reflected, and every
/// constant with an endpoint inside dom(g)/ran(g) is paired exactly by `g`.
///
/// Errors when the vocabularies differ or `g` mentions unknown elements;
/// a legal-but-failing map returns `Ok(false)`.
pub fn is_partial_isomorphism(
    m0: &Structure,
    m1: &Structure,
    g: &PartialMap,
) -> Result<bool, StructureError> {
    if m0.vocabulary != m1.vocabulary {
        return Err(StructureError::VocabularyMismatch);
    }
    for source in g.sources() {
        if !m0.contains(source) {
            return Err(StructureError::UnknownElement {
                id: source.to_string(),
            });
        }
    }
    for target in g.targets() {
        if !m1.contains(target) {
            return Err(StructureError::UnknownElement {
                id: target.to_string(),
            });
        }
    }
    let domain: Vec<String> = g.sources().map(str::to_string).collect();
    for (relation, arity) in m0.vocabulary.relations.iter() {
        for tuple in cartesian_power(&domain, *arity) {
            let image: Vec<String> = tuple
                .iter()
                .map(|a| g.get(a).expect("tuple is over dom(g)").to_string())
                .collect();
            if m0.holds(relation, &tuple) != m1.holds(relation, &image) {
                return Ok(false);
            }
        }
    }
    for name in &m0.vocabulary.constants {
        let c0 = m0.constant(name).expect("constants are total");
        let c1 = m1.constant(name).expect("constants are total");
        if (g.contains_source(c0) || g.contains_target(c1)) && g.get(c0) != Some(c1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `sub` is an induced substructure of `sup`: its universe is a
/// subset, every relation is the restriction of `sup`'s to that subset, and
/// all constants agree.
pub fn is_induced_substructure(sub: &Structure, sup: &Structure) -> Result<bool, StructureError> {
    if sub.vocabulary != sup.vocabulary {
        return Err(StructureError::VocabularyMismatch);
    }
    if !sub.universe.iter().all(|e| sup.contains(e)) {
        return Ok(false);
    }
    for (relation, arity) in sub.vocabulary.relations.iter() {
        for tuple in cartesian_power(&sub.universe, *arity) {
            if sub.holds(relation, &tuple) != sup.holds(relation, &tuple) {
                return Ok(false);
            }
        }
    }
    for name in &sub.vocabulary.constants {
        if sub.constant(name) != sup.constant(name) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn element_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// `n` elements, empty vocabulary.
pub fn pure_set(n: usize) -> Result<Structure, StructureError> {
    if n == 0 {
        return Err(StructureError::EmptyUniverse);
    }
    Structure::new(
        Vocabulary::empty(),
        element_ids(n),
        BTreeMap::new(),
        BTreeMap::new(),
    )
}

/// Elements `e0 < e1 < … < e{n-1}` with the full strict order `<`
/// (every pair `(ei, ej)` with `i < j`).
pub fn linear_order(n: usize) -> Result<Structure, StructureError> {
    if n == 0 {
        return Err(StructureError::EmptyUniverse);
    }
    let universe = element_ids(n);
    let mut tuples = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            tuples.insert(vec![universe[i].clone(), universe[j].clone()]);
        }
    }
    Structure::new(
        Vocabulary::single_binary("<"),
        universe,
        BTreeMap::from([("<".to_string(), tuples)]),
        BTreeMap::new(),
    )
}

/// The complete `k`-ary tree of depth `d` under the reflexive prefix order
/// `<=`: nodes are the sequences over `{0..k-1}` of length ≤ `d`, written
/// `r`, `r0`, `r1`, …, `r00`, …; `s <= t` iff `s` is an initial segment of
/// `t` (including `s = t`). Branching is limited to 10 so that one digit
/// encodes one level.
pub fn full_tree(branching: usize, depth: usize) -> Result<Structure, StructureError> {
    if branching == 0 {
        return Err(StructureError::InvalidParameter {
            reason: "branching must be at least 1".to_string(),
        });
    }
    if branching > 10 {
        return Err(StructureError::InvalidParameter {
            reason: "branching above 10 is not supported (one digit per level)".to_string(),
        });
    }
    let mut universe = vec!["r".to_string()];
    let mut frontier = vec!["r".to_string()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for node in &frontier {
            for child in 0..branching {
                let id = format!("{node}{child}");
                universe.push(id.clone());
                next.push(id);
            }
        }
        frontier = next;
    }
    let mut tuples = BTreeSet::new();
    for s in &universe {
        for t in &universe {
            if t.starts_with(s.as_str()) {
                tuples.insert(vec![s.clone(), t.clone()]);
            }
        }
    }
    Structure::new(
        Vocabulary::single_binary("<="),
        universe,
        BTreeMap::from([("<=".to_string(), tuples)]),
        BTreeMap::new(),
    )
}

/// The directed `n`-cycle under the successor relation `E`
/// (`ei E e{i+1 mod n}`); `cycle(1)` is a single self-loop.
pub fn cycle(n: usize) -> Result<Structure, StructureError> {
    if n == 0 {
        return Err(StructureError::EmptyUniverse);
    }
    let universe = element_ids(n);
    let mut tuples = BTreeSet::new();
    for i in 0..n {
        tuples.insert(vec![universe[i].clone(), universe[(i + 1) % n].clone()]);
    }
    Structure::new(
        Vocabulary::single_binary("E"),
        universe,
        BTreeMap::from([("E".to_string(), tuples)]),
        BTreeMap::new(),
    )
}

/// A pseudorandom structure over `vocabulary` with `n` elements,
/// deterministic per `seed`: every possible tuple of every relation is
/// included independently with probability 1/2 (relations in sorted order,
/// tuples in lexicographic order), then every constant (sorted order) picks
/// a uniform element.
pub fn random_structure(
    vocabulary: &Vocabulary,
    n: usize,
    seed: u64,
) -> Result<Structure, StructureError> {
    if n == 0 {
        return Err(StructureError::EmptyUniverse);
    }
    let universe = element_ids(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut relations = BTreeMap::new();
    for (name, arity) in vocabulary.relations() {
        let mut tuples = BTreeSet::new();
        for tuple in cartesian_power(&universe, *arity) {
            if rng.gen_bool(0.5) {
                tuples.insert(tuple);
            }
        }
        relations.insert(name.clone(), tuples);
    }
    let mut constants = BTreeMap::new();
    for name in vocabulary.constants() {
        let pick = rng.gen_range(0..n);
        constants.insert(name.clone(), universe[pick].clone());
    }
    Structure::new(vocabulary.clone(), universe, relations, constants)
}
