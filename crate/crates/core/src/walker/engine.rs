use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use chrono::Utc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grammar::{Filter, Grammar, GrammarError, GrammarStep, PredicateSel, StepDirection};
use super::ranked::RankedList;
use crate::ns;
use crate::quadstore::{Direction, QuadStore, Term, TermId};
use crate::schema::Vocabulary;
use crate::timestamp::{self, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Diffusion,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct WalkerConfig {
    pub mode: Mode,
    pub walkers_per_seed: u32,
    pub initial_energy: f64,
    /// Per-edge decay for grammars without a loop.
    pub decay: f64,
    pub energy_threshold: f64,
    pub max_steps: usize,
    pub rng_seed: u64,
    /// Clock for time-decaying steps; wall clock when absent.
    pub now: Option<Timestamp>,
}

impl Default for WalkerConfig {
    fn default() -> Self {
        WalkerConfig {
            mode: Mode::Diffusion,
            walkers_per_seed: 1000,
            initial_energy: 1.0,
            decay: 0.85,
            energy_threshold: 1e-4,
            max_steps: 12,
            rng_seed: 0,
            now: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WalkerError {
    #[error("no seeds given")]
    EmptySeeds,
    #[error("seed {0} is not in the store")]
    UnknownSeed(String),
    #[error("grammar uses unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("grammar uses unknown class {0}")]
    UnknownClass(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("invalid walker config: {0}")]
    Config(String),
}

impl WalkerConfig {
    pub fn validate(&self, grammar: &Grammar) -> Result<(), WalkerError> {
        let fail = |m: String| Err(WalkerError::Config(m));
        if !(self.initial_energy > 0.0 && self.initial_energy.is_finite()) {
            return fail(format!("initial energy must be positive, got {}", self.initial_energy));
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return fail(format!("decay {} outside [0, 1]", self.decay));
        }
        if !(self.energy_threshold > 0.0 && self.energy_threshold < self.initial_energy) {
            return fail(format!(
                "energy threshold {} must lie in (0, initial energy)",
                self.energy_threshold
            ));
        }
        if self.max_steps < grammar.steps.len() {
            return fail(format!(
                "max steps {} shorter than the grammar ({} steps)",
                self.max_steps,
                grammar.steps.len()
            ));
        }
        if self.mode == Mode::MonteCarlo && self.walkers_per_seed == 0 {
            return fail("walkers per seed must be positive".into());
        }
        Ok(())
    }
}

/// Scores plus, in Monte Carlo mode, the standard error of each score.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub ranked: RankedList,
    pub standard_errors: BTreeMap<String, f64>,
    /// Edge traversals performed.
    pub transitions: usize,
}

/// One traversed edge, reported to observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: TermId,
    pub to: TermId,
    pub step: usize,
    /// Edges traversed so far by this parcel, including this one.
    pub hops: usize,
    pub energy_before: f64,
    pub energy_after: f64,
}

#[derive(Clone, Copy)]
struct Edge {
    target: TermId,
    factor: f64,
}

enum StepKind {
    Named(Option<TermId>),
    Association,
    Any,
}

struct Compiled {
    kind: StepKind,
    dirs: &'static [Direction],
    time_decay: Option<f64>,
}

#[derive(Clone, Copy)]
struct Parcel {
    node: TermId,
    prev: Option<TermId>,
    step: usize,
    hops: usize,
    energy: f64,
}

/// Grammar-constrained walks over a store snapshot.
pub struct Walker<'a> {
    store: &'a QuadStore,
    vocab: &'a Vocabulary,
    ids: Ids,
}

struct Ids {
    rdf_type: Option<TermId>,
    related: Option<TermId>,
    subject: Option<TermId>,
    object: Option<TermId>,
    insert_time: Option<TermId>,
}

struct Run<'r> {
    grammar: &'r Grammar,
    compiled: Vec<Compiled>,
    cfg: &'r WalkerConfig,
    seeds: HashSet<TermId>,
    now: Timestamp,
}

impl<'a> Walker<'a> {
    pub fn new(store: &'a QuadStore, vocab: &'a Vocabulary) -> Self {
        let id = |iri: String| store.term_id(&Term::iri(iri));
        let ids = Ids {
            rdf_type: id(ns::rdf("type")),
            related: id(ns::relation("related")),
            subject: id(ns::core("subject")),
            object: id(ns::core("object")),
            insert_time: id(ns::core("insertTime")),
        };
        Walker { store, vocab, ids }
    }

    pub fn store(&self) -> &QuadStore {
        self.store
    }

    pub fn vocab(&self) -> &Vocabulary {
        self.vocab
    }

    pub fn execute(
        &self,
        grammar: &Grammar,
        seeds: &[Term],
        cfg: &WalkerConfig,
    ) -> Result<RankedList, WalkerError> {
        Ok(self.execute_detailed(grammar, seeds, cfg, |_| {})?.ranked)
    }

    /// Like [`Walker::execute`], reporting every edge traversal to `observe`.
    pub fn execute_detailed(
        &self,
        grammar: &Grammar,
        seeds: &[Term],
        cfg: &WalkerConfig,
        mut observe: impl FnMut(&Transition),
    ) -> Result<WalkOutcome, WalkerError> {
        grammar.validate()?;
        cfg.validate(grammar)?;
        if seeds.is_empty() {
            return Err(WalkerError::EmptySeeds);
        }
        let mut seed_ids = Vec::with_capacity(seeds.len());
        for seed in seeds {
            match self.store.term_id(seed).filter(|_| self.store.mentions(seed)) {
                Some(id) => seed_ids.push(id),
                None => return Err(WalkerError::UnknownSeed(seed.to_string())),
            }
        }
        let run = Run {
            grammar,
            compiled: self.compile(grammar)?,
            cfg,
            seeds: seed_ids.iter().copied().collect(),
            now: cfg.now.unwrap_or_else(Utc::now),
        };
        let mut scores: HashMap<TermId, f64> = HashMap::new();
        let mut errors = BTreeMap::new();
        let mut transitions = 0;
        match cfg.mode {
            Mode::Diffusion => {
                for &seed in &seed_ids {
                    transitions += self.diffuse(&run, seed, &mut scores, &mut observe);
                }
            }
            Mode::MonteCarlo => {
                let mut variance: HashMap<TermId, f64> = HashMap::new();
                for (index, &seed) in seed_ids.iter().enumerate() {
                    transitions +=
                        self.monte_carlo(&run, seed, index as u64, &mut scores, &mut variance, &mut observe);
                }
                for (id, var) in variance {
                    if let Some(iri) = self.store.term(id).as_iri() {
                        errors.insert(iri.to_string(), var.sqrt());
                    }
                }
            }
        }
        Ok(WalkOutcome {
            ranked: RankedList::from_scores(self.store, &scores),
            standard_errors: errors,
            transitions,
        })
    }

    fn compile(&self, grammar: &Grammar) -> Result<Vec<Compiled>, WalkerError> {
        let related = ns::relation("related");
        let mut out = Vec::with_capacity(grammar.steps.len());
        for step in &grammar.steps {
            let kind = match &step.predicate {
                PredicateSel::Any(_) => StepKind::Any,
                PredicateSel::Named(p) if *p == related => StepKind::Association,
                PredicateSel::Named(p) => {
                    let term = Term::iri(p.as_str());
                    if self.vocab.property(p).is_none() && !self.store.has_predicate(&term) {
                        return Err(WalkerError::UnknownPredicate(p.clone()));
                    }
                    StepKind::Named(self.store.term_id(&term))
                }
            };
            for class in step_classes(step) {
                if !self.vocab.is_class(class) {
                    return Err(WalkerError::UnknownClass(class.to_string()));
                }
            }
            let dirs: &'static [Direction] = match step.direction {
                StepDirection::Out => &[Direction::Out],
                StepDirection::In => &[Direction::In],
                StepDirection::Both => &[Direction::Out, Direction::In],
            };
            out.push(Compiled {
                kind,
                dirs,
                time_decay: step.time_decay.as_ref().map(|t| t.half_life_secs),
            });
        }
        Ok(out)
    }

    /// Qualifying edges for a parcel at its current step, in canonical
    /// target order.
    fn edges(&self, run: &Run, parcel: &Parcel) -> Vec<Edge> {
        let step = &run.grammar.steps[parcel.step];
        let compiled = &run.compiled[parcel.step];
        let base = if run.grammar.repeat.is_some() { 1.0 } else { run.cfg.decay };
        let mut edges: Vec<(TermId, Option<Timestamp>)> = Vec::new();
        let n = parcel.node;
        for &dir in compiled.dirs {
            match compiled.kind {
                StepKind::Named(Some(p)) => {
                    edges.extend(self.store.neighbor_ids(n, p, dir).map(|t| (t, None)));
                }
                StepKind::Named(None) => {}
                StepKind::Any => {
                    for (p, t) in self.store.edges_of(n, dir) {
                        if !ns::is_schema_predicate(self.store.term(p).value()) && !self.is_vocab_node(t) {
                            edges.push((t, None));
                        }
                    }
                }
                StepKind::Association => {
                    let concept = step.filters.iter().find_map(|f| match f {
                        Filter::RequireTagConcept(k) => Some(k.as_str()),
                        _ => None,
                    });
                    edges.extend(self.associations(n, dir, concept));
                }
            }
        }
        let mut out: Vec<(TermId, f64)> = edges
            .into_iter()
            .filter(|(t, _)| !self.store.term(*t).is_literal())
            .filter(|(t, _)| self.passes(run, step, parcel, *t, &compiled.kind))
            .map(|(t, at)| {
                let factor = match (compiled.time_decay, at) {
                    (Some(half_life), Some(at)) => {
                        let delta = (run.now - at).num_milliseconds().max(0) as f64 / 1000.0;
                        (-delta / half_life).exp2()
                    }
                    (Some(_), None) => 1.0,
                    (None, _) => base,
                };
                (t, factor)
            })
            .collect();
        out.sort_by(|a, b| {
            self.store
                .key(a.0)
                .cmp(self.store.key(b.0))
                .then(a.1.total_cmp(&b.1))
        });
        out.into_iter()
            .map(|(target, factor)| Edge { target, factor })
            .collect()
    }

    fn passes(&self, run: &Run, step: &GrammarStep, parcel: &Parcel, t: TermId, kind: &StepKind) -> bool {
        step.filters.iter().all(|f| match f {
            Filter::ExcludePrevious => parcel.prev != Some(t),
            Filter::ExcludeSeeds => !run.seeds.contains(&t),
            Filter::NotSelf => t != parcel.node,
            Filter::RequireType(c) => self.vocab.is_instance(self.store, self.store.term(t), c),
            // Association steps already matched the concept.
            Filter::RequireTagConcept(_) if matches!(kind, StepKind::Association) => true,
            Filter::RequireTagConcept(k) => self.tagged_with(t, k),
        })
    }

    fn tagged_with(&self, target: TermId, concept: &str) -> bool {
        let (Some(subject), Some(object), Some(k)) = (
            self.ids.subject,
            self.ids.object,
            self.store.term_id(&Term::iri(concept)),
        ) else {
            return false;
        };
        self.store
            .match_ids([None, Some(object), Some(target), None])
            .into_iter()
            .any(|[r, _, _, g]| {
                self.is_related(r, g) && !self.store.match_ids([Some(r), Some(subject), Some(k), Some(g)]).is_empty()
            })
    }

    fn is_related(&self, node: TermId, graph: TermId) -> bool {
        match (self.ids.rdf_type, self.ids.related) {
            (Some(ty), Some(rel)) => self.store.match_ids([Some(node), Some(ty), Some(rel), Some(graph)]).len() == 1,
            _ => false,
        }
    }

    /// Tag associations as edges. Out: from the owner (graph) to each
    /// resource it tagged. In: from a tagged resource back to each owner.
    fn associations(&self, n: TermId, dir: Direction, concept: Option<&str>) -> Vec<(TermId, Option<Timestamp>)> {
        let (Some(ty), Some(rel), Some(subject), Some(object)) =
            (self.ids.rdf_type, self.ids.related, self.ids.subject, self.ids.object)
        else {
            return Vec::new();
        };
        let concept_id = match concept {
            Some(k) => match self.store.term_id(&Term::iri(k)) {
                Some(id) => Some(id),
                None => return Vec::new(),
            },
            None => None,
        };
        let nodes: Vec<(TermId, TermId)> = match dir {
            Direction::Out => self
                .store
                .match_ids([None, Some(ty), Some(rel), Some(n)])
                .into_iter()
                .map(|[r, _, _, g]| (r, g))
                .collect(),
            Direction::In => self
                .store
                .match_ids([None, Some(object), Some(n), None])
                .into_iter()
                .filter(|[r, _, _, g]| self.is_related(*r, *g))
                .map(|[r, _, _, g]| (r, g))
                .collect(),
        };
        let mut out = Vec::new();
        for (r, g) in nodes {
            if let Some(k) = concept_id {
                if self.store.match_ids([Some(r), Some(subject), Some(k), Some(g)]).is_empty() {
                    continue;
                }
            }
            let at = self.ids.insert_time.and_then(|p| {
                self.store
                    .match_ids([Some(r), Some(p), None, Some(g)])
                    .into_iter()
                    .find_map(|[_, _, o, _]| timestamp::parse(self.store.term(o).value()))
            });
            match dir {
                Direction::Out => {
                    for [_, _, o, _] in self.store.match_ids([Some(r), Some(object), None, Some(g)]) {
                        out.push((o, at));
                    }
                }
                Direction::In => out.push((g, at)),
            }
        }
        out
    }

    fn is_vocab_node(&self, id: TermId) -> bool {
        self.store
            .term(id)
            .as_iri()
            .is_some_and(|iri| self.vocab.is_class(iri) || self.vocab.property(iri).is_some())
    }

    fn emits(&self, run: &Run, step: usize, target: TermId) -> Option<f64> {
        let emit = run.grammar.steps[step].emit.as_ref()?;
        if let Some(class) = &emit.type_restriction {
            if !self.vocab.is_instance(self.store, self.store.term(target), class) {
                return None;
            }
        }
        Some(emit.sign.factor())
    }

    /// Step index after `step`, and the extra decay for getting there.
    fn advance(run: &Run, step: usize) -> Option<(usize, f64)> {
        let next = if step + 1 < run.grammar.steps.len() {
            step + 1
        } else {
            run.grammar.repeat.as_ref()?.back_to_step
        };
        let factor = match &run.grammar.repeat {
            Some(l) if l.back_to_step == next => l.decay,
            _ => 1.0,
        };
        Some((next, factor))
    }

    fn diffuse(
        &self,
        run: &Run,
        seed: TermId,
        scores: &mut HashMap<TermId, f64>,
        observe: &mut impl FnMut(&Transition),
    ) -> usize {
        let mut queue = VecDeque::from([Parcel {
            node: seed,
            prev: None,
            step: 0,
            hops: 0,
            energy: run.cfg.initial_energy,
        }]);
        let mut transitions = 0;
        while let Some(parcel) = queue.pop_front() {
            let edges = self.edges(run, &parcel);
            if edges.is_empty() {
                continue;
            }
            let share = parcel.energy / edges.len() as f64;
            for edge in edges {
                let energy = share * edge.factor;
                transitions += 1;
                observe(&Transition {
                    from: parcel.node,
                    to: edge.target,
                    step: parcel.step,
                    hops: parcel.hops + 1,
                    energy_before: parcel.energy,
                    energy_after: energy,
                });
                if let Some(sign) = self.emits(run, parcel.step, edge.target) {
                    *scores.entry(edge.target).or_insert(0.0) += sign * energy;
                }
                let hops = parcel.hops + 1;
                if hops >= run.cfg.max_steps {
                    continue;
                }
                if let Some((next, loop_factor)) = Self::advance(run, parcel.step) {
                    let energy = energy * loop_factor;
                    if energy >= run.cfg.energy_threshold {
                        queue.push_back(Parcel {
                            node: edge.target,
                            prev: Some(parcel.node),
                            step: next,
                            hops,
                            energy,
                        });
                    }
                }
            }
        }
        transitions
    }

    fn monte_carlo(
        &self,
        run: &Run,
        seed: TermId,
        stream: u64,
        scores: &mut HashMap<TermId, f64>,
        variance: &mut HashMap<TermId, f64>,
        observe: &mut impl FnMut(&Transition),
    ) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(run.cfg.rng_seed);
        rng.set_stream(stream);
        let walkers = run.cfg.walkers_per_seed as usize;
        let mut sum: HashMap<TermId, f64> = HashMap::new();
        let mut sum_sq: HashMap<TermId, f64> = HashMap::new();
        let mut transitions = 0;
        let mut local: BTreeMap<TermId, f64> = BTreeMap::new();
        for _ in 0..walkers {
            local.clear();
            let mut parcel = Parcel {
                node: seed,
                prev: None,
                step: 0,
                hops: 0,
                energy: run.cfg.initial_energy,
            };
            loop {
                let edges = self.edges(run, &parcel);
                if edges.is_empty() {
                    break;
                }
                let edge = edges[rng.random_range(0..edges.len())];
                let energy = parcel.energy * edge.factor;
                transitions += 1;
                observe(&Transition {
                    from: parcel.node,
                    to: edge.target,
                    step: parcel.step,
                    hops: parcel.hops + 1,
                    energy_before: parcel.energy,
                    energy_after: energy,
                });
                if let Some(sign) = self.emits(run, parcel.step, edge.target) {
                    *local.entry(edge.target).or_insert(0.0) += sign * energy;
                }
                let hops = parcel.hops + 1;
                if hops >= run.cfg.max_steps {
                    break;
                }
                let Some((next, loop_factor)) = Self::advance(run, parcel.step) else {
                    break;
                };
                let energy = energy * loop_factor;
                if energy < run.cfg.energy_threshold {
                    break;
                }
                parcel = Parcel {
                    node: edge.target,
                    prev: Some(parcel.node),
                    step: next,
                    hops,
                    energy,
                };
            }
            for (&id, &x) in &local {
                *sum.entry(id).or_insert(0.0) += x;
                *sum_sq.entry(id).or_insert(0.0) += x * x;
            }
        }
        let w = walkers as f64;
        let mut ids: Vec<TermId> = sum.keys().copied().collect();
        self.store.sort_ids(&mut ids);
        for id in ids {
            let mean = sum[&id] / w;
            *scores.entry(id).or_insert(0.0) += mean;
            // Variance of the mean: sample variance / W.
            let var = if walkers > 1 {
                ((sum_sq[&id] - w * mean * mean) / (w - 1.0)).max(0.0) / w
            } else {
                0.0
            };
            *variance.entry(id).or_insert(0.0) += var;
        }
        transitions
    }
}

fn step_classes(step: &GrammarStep) -> impl Iterator<Item = &str> {
    step.filters
        .iter()
        .filter_map(|f| match f {
            Filter::RequireType(c) => Some(c.as_str()),
            _ => None,
        })
        .chain(step.emit.iter().filter_map(|e| e.type_restriction.as_deref()))
}
