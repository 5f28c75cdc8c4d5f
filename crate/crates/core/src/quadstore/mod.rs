//! In-memory quad store with named graphs.
//!
//! Terms are interned to dense [`TermId`]s. Four permutation indexes (SPOG,
//! POSG, OSPG, GSPO) answer any quad pattern with a prefix scan, and a
//! separate adjacency map serves `neighbors()` for the walker. Every public
//! result is ordered by canonical N-Quads serialization so output never
//! depends on interning order.

mod log;
pub mod nquads;
pub mod term;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::Bound;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use self::log::LogError;
use self::log::LogWriter;
pub use nquads::NQuadsError;
pub use term::{is_absolute_iri, Literal, Quad, QuadError, Term};

pub type TermId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    AlreadyPresent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemoveOutcome {
    Removed,
    Absent,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("rejected quad {quad}: {source}")]
    Invalid {
        quad: String,
        #[source]
        source: QuadError,
    },
    #[error(transparent)]
    Parse(#[from] NQuadsError),
    #[error(transparent)]
    Log(#[from] LogError),
}

// Index slot orders: each array lists which quad position (0=s,1=p,2=o,3=g)
// sits at each key slot.
const PERMUTATIONS: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 2, 0, 3], [2, 0, 1, 3], [3, 0, 1, 2]];

#[derive(Default, Clone)]
struct Adjacent {
    // neighbor -> number of graphs asserting the edge
    out: BTreeMap<TermId, u32>,
    inc: BTreeMap<TermId, u32>,
}

#[derive(Default)]
pub struct QuadStore {
    terms: Vec<Term>,
    keys: Vec<String>,
    ids: HashMap<Term, TermId>,
    indexes: [BTreeSet<[TermId; 4]>; 4],
    adjacency: HashMap<(TermId, TermId), Adjacent>,
    predicate_counts: BTreeMap<TermId, usize>,
    blank_counter: u64,
    log: Option<LogWriter>,
}

impl QuadStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens (or creates) an append-only log at `path`, replays it, and
    /// records every subsequent write to it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let mut store = QuadStore::new();
        let (writer, ops) = LogWriter::open(path.as_ref())?;
        for (insert, quad) in ops {
            if insert {
                store.insert(quad)?;
            } else {
                store.remove(&quad)?;
            }
        }
        store.log = Some(writer);
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.indexes[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.indexes[0].is_empty()
    }

    pub fn insert(&mut self, quad: Quad) -> Result<InsertOutcome, StoreError> {
        quad.validate().map_err(|source| StoreError::Invalid {
            quad: quad.to_nquads(),
            source,
        })?;
        let key = [
            self.intern(&quad.s),
            self.intern(&quad.p),
            self.intern(&quad.o),
            self.intern(&quad.g),
        ];
        if self.indexes[0].contains(&key) {
            return Ok(InsertOutcome::AlreadyPresent);
        }
        if let Some(log) = &mut self.log {
            log.append(true, &quad)?;
        }
        for (index, perm) in self.indexes.iter_mut().zip(PERMUTATIONS) {
            index.insert(permute(key, perm));
        }
        let [s, p, o, _] = key;
        let adj = self.adjacency.entry((s, p)).or_default();
        *adj.out.entry(o).or_insert(0) += 1;
        let adj = self.adjacency.entry((o, p)).or_default();
        *adj.inc.entry(s).or_insert(0) += 1;
        *self.predicate_counts.entry(p).or_insert(0) += 1;
        Ok(InsertOutcome::Inserted)
    }

    pub fn remove(&mut self, quad: &Quad) -> Result<RemoveOutcome, StoreError> {
        let Some(key) = self.key_of(quad) else {
            return Ok(RemoveOutcome::Absent);
        };
        if !self.indexes[0].contains(&key) {
            return Ok(RemoveOutcome::Absent);
        }
        if let Some(log) = &mut self.log {
            log.append(false, quad)?;
        }
        for (index, perm) in self.indexes.iter_mut().zip(PERMUTATIONS) {
            index.remove(&permute(key, perm));
        }
        let [s, p, o, _] = key;
        decrement(self.adjacency.get_mut(&(s, p)).map(|a| &mut a.out), o);
        decrement(self.adjacency.get_mut(&(o, p)).map(|a| &mut a.inc), s);
        for node in [s, o] {
            if self
                .adjacency
                .get(&(node, p))
                .is_some_and(|a| a.out.is_empty() && a.inc.is_empty())
            {
                self.adjacency.remove(&(node, p));
            }
        }
        if let Some(count) = self.predicate_counts.get_mut(&p) {
            *count -= 1;
            if *count == 0 {
                self.predicate_counts.remove(&p);
            }
        }
        Ok(RemoveOutcome::Removed)
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.key_of(quad)
            .is_some_and(|key| self.indexes[0].contains(&key))
    }

    /// All quads agreeing with every bound position, in SPOG order of
    /// canonical serialization.
    pub fn match_quads(
        &self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
        g: Option<&Term>,
    ) -> Vec<Quad> {
        let mut pattern = [None; 4];
        for (slot, term) in pattern.iter_mut().zip([s, p, o, g]) {
            if let Some(term) = term {
                match self.ids.get(term) {
                    Some(id) => *slot = Some(*id),
                    None => return Vec::new(),
                }
            }
        }
        let mut keys = self.match_ids(pattern);
        self.sort_keys(&mut keys);
        keys.into_iter().map(|k| self.quad_of(k)).collect()
    }

    /// Pattern match over interned ids; results come in index order.
    pub fn match_ids(&self, pattern: [Option<TermId>; 4]) -> Vec<[TermId; 4]> {
        // Pick the index whose key order gives the longest bound prefix.
        let (which, prefix_len) = PERMUTATIONS
            .iter()
            .enumerate()
            .map(|(i, perm)| (i, perm.iter().take_while(|&&pos| pattern[pos].is_some()).count()))
            .max_by_key(|&(i, len)| (len, std::cmp::Reverse(i)))
            .unwrap_or((0, 0));
        let perm = PERMUTATIONS[which];
        let mut lo = [TermId::MIN; 4];
        let mut hi = [TermId::MAX; 4];
        for slot in 0..prefix_len {
            let id = pattern[perm[slot]].unwrap_or_default();
            lo[slot] = id;
            hi[slot] = id;
        }
        self.indexes[which]
            .range((Bound::Included(lo), Bound::Included(hi)))
            .map(|k| unpermute(*k, perm))
            .filter(|k| pattern.iter().zip(k).all(|(want, got)| want.is_none_or(|w| w == *got)))
            .collect()
    }

    /// Distinct neighbors across all graphs: objects of `⟨n,p,?,*⟩` for
    /// [`Direction::Out`], subjects of `⟨?,p,n,*⟩` for [`Direction::In`].
    pub fn neighbors(&self, node: &Term, predicate: &Term, dir: Direction) -> Vec<Term> {
        let (Some(n), Some(p)) = (self.ids.get(node), self.ids.get(predicate)) else {
            return Vec::new();
        };
        let mut ids: Vec<TermId> = self.neighbor_ids(*n, *p, dir).collect();
        self.sort_ids(&mut ids);
        ids.into_iter().map(|id| self.terms[id as usize].clone()).collect()
    }

    pub fn neighbor_ids(
        &self,
        node: TermId,
        predicate: TermId,
        dir: Direction,
    ) -> impl Iterator<Item = TermId> + '_ {
        self.adjacency
            .get(&(node, predicate))
            .into_iter()
            .flat_map(move |adj| match dir {
                Direction::Out => adj.out.keys(),
                Direction::In => adj.inc.keys(),
            })
            .copied()
    }

    /// Distinct `(predicate, neighbor)` pairs touching `node` in `dir`.
    pub fn edges_of(&self, node: TermId, dir: Direction) -> Vec<(TermId, TermId)> {
        let mut edges: Vec<(TermId, TermId)> = match dir {
            Direction::Out => self
                .match_ids([Some(node), None, None, None])
                .into_iter()
                .map(|[_, p, o, _]| (p, o))
                .collect(),
            Direction::In => self
                .match_ids([None, None, Some(node), None])
                .into_iter()
                .map(|[s, p, _, _]| (p, s))
                .collect(),
        };
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn has_predicate(&self, predicate: &Term) -> bool {
        self.ids
            .get(predicate)
            .is_some_and(|id| self.predicate_counts.contains_key(id))
    }

    /// Whether the term appears in any stored quad.
    pub fn mentions(&self, term: &Term) -> bool {
        let Some(&id) = self.ids.get(term) else {
            return false;
        };
        (0..4).any(|pos| {
            let mut pattern = [None; 4];
            pattern[pos] = Some(id);
            !self.match_ids(pattern).is_empty()
        })
    }

    pub fn term_id(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    /// Canonical serialization of an interned term.
    pub fn key(&self, id: TermId) -> &str {
        &self.keys[id as usize]
    }

    /// Number of interned terms; ids are dense in `0..term_count()`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn sort_ids(&self, ids: &mut [TermId]) {
        ids.sort_by(|a, b| self.key(*a).cmp(self.key(*b)));
    }

    /// Every quad in SPOG order.
    pub fn quads(&self) -> Vec<Quad> {
        self.match_quads(None, None, None, None)
    }

    /// Named graphs holding at least one quad.
    pub fn graphs(&self) -> Vec<Term> {
        let mut seen = HashSet::new();
        let mut ids: Vec<TermId> = self.indexes[3]
            .iter()
            .map(|k| k[0])
            .filter(|g| seen.insert(*g))
            .collect();
        self.sort_ids(&mut ids);
        ids.into_iter().map(|id| self.term(id).clone()).collect()
    }

    /// A blank node label not yet used in this store.
    pub fn fresh_blank(&mut self) -> Term {
        loop {
            self.blank_counter += 1;
            let term = Term::blank(format!("b{}", self.blank_counter));
            if !self.ids.contains_key(&term) {
                // Reserve the label so two calls never hand out the same node.
                self.intern(&term);
                return term;
            }
        }
    }

    /// Loads an N-Quads document. The whole document is parsed before any
    /// quad is inserted. Blank labels that already exist in the store are
    /// renamed so imported nodes never merge with existing ones.
    pub fn load_nquads(&mut self, input: &str) -> Result<usize, StoreError> {
        let quads = nquads::parse_document(input)?;
        let mut renames: HashMap<String, Term> = HashMap::new();
        let mut count = 0;
        for mut quad in quads {
            for term in [&mut quad.s, &mut quad.o, &mut quad.g] {
                let Term::Blank { label } = &*term else {
                    continue;
                };
                let renamed = match renames.get(label.as_str()) {
                    Some(t) => t.clone(),
                    None => {
                        let label = label.clone();
                        let target = if self.ids.contains_key(&*term) {
                            self.fresh_blank()
                        } else {
                            term.clone()
                        };
                        renames.insert(label, target.clone());
                        target
                    }
                };
                *term = renamed;
            }
            if self.insert(quad)? == InsertOutcome::Inserted {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn export_nquads(&self) -> String {
        nquads::write_document(&self.quads())
    }

    fn intern(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.ids.get(term) {
            return *id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term id space exhausted");
        self.terms.push(term.clone());
        self.keys.push(term.to_nquads());
        self.ids.insert(term.clone(), id);
        id
    }

    fn key_of(&self, quad: &Quad) -> Option<[TermId; 4]> {
        Some([
            *self.ids.get(&quad.s)?,
            *self.ids.get(&quad.p)?,
            *self.ids.get(&quad.o)?,
            *self.ids.get(&quad.g)?,
        ])
    }

    fn quad_of(&self, [s, p, o, g]: [TermId; 4]) -> Quad {
        Quad::new(
            self.term(s).clone(),
            self.term(p).clone(),
            self.term(o).clone(),
            self.term(g).clone(),
        )
    }

    fn sort_keys(&self, keys: &mut [[TermId; 4]]) {
        keys.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| self.key(*x).cmp(self.key(*y)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
}

fn permute(key: [TermId; 4], perm: [usize; 4]) -> [TermId; 4] {
    perm.map(|pos| key[pos])
}

fn unpermute(permuted: [TermId; 4], perm: [usize; 4]) -> [TermId; 4] {
    let mut key = [0; 4];
    for (slot, pos) in perm.into_iter().enumerate() {
        key[pos] = permuted[slot];
    }
    key
}

fn decrement(map: Option<&mut BTreeMap<TermId, u32>>, id: TermId) {
    if let Some(map) = map {
        if let Some(count) = map.get_mut(&id) {
            *count -= 1;
            if *count == 0 {
                map.remove(&id);
            }
        }
    }
}
