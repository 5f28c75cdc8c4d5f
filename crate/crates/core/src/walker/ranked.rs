use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::quadstore::{QuadStore, TermId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub resource: String,
    pub score: f64,
}

/// Resources sorted by score descending, ties by IRI.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

fn by_rank(a: &RankedEntry, b: &RankedEntry) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.resource.cmp(&b.resource))
}

impl RankedList {
    /// Builds a list from `(resource, score)` pairs. Later duplicates add to
    /// earlier ones; non-finite scores are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut merged: HashMap<String, f64> = HashMap::new();
        let mut order = Vec::new();
        for (resource, score) in pairs {
            match merged.get_mut(&resource) {
                Some(s) => *s += score,
                None => {
                    order.push(resource.clone());
                    merged.insert(resource, score);
                }
            }
        }
        let mut entries: Vec<RankedEntry> = order
            .into_iter()
            .filter_map(|resource| {
                let score = merged[&resource];
                score.is_finite().then_some(RankedEntry { resource, score })
            })
            .collect();
        entries.sort_by(by_rank);
        RankedList { entries }
    }

    /// Keeps IRI resources with nonzero score.
    pub(crate) fn from_scores(store: &QuadStore, scores: &HashMap<TermId, f64>) -> Self {
        let pairs = scores.iter().filter_map(|(&id, &score)| {
            let iri = store.term(id).as_iri()?;
            (score != 0.0).then(|| (iri.to_string(), score))
        });
        Self::from_pairs(pairs)
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score(&self, resource: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.resource == resource)
            .map(|e| e.score)
    }

    pub fn contains(&self, resource: &str) -> bool {
        self.score(resource).is_some()
    }

    pub fn resources(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.resource.as_str()).collect()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&RankedEntry) -> bool) {
        self.entries.retain(|e| keep(e));
    }

    /// Drops entries with score ≤ 0.
    pub fn positive(mut self) -> Self {
        self.retain(|e| e.score > 0.0);
        self
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }

    /// Plain-text table: rank, score, resource.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(out, "{:>4}  {:>14.9}  {}", i + 1, e.score, e.resource);
        }
        out
    }
}
