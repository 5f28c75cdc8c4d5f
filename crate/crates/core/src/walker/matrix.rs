//! Sparse matrices over interned term ids, for checking walker output
//! against explicit path algebra.

use std::collections::BTreeMap;

use crate::ns;
use crate::quadstore::{QuadStore, Term, TermId};

/// Square sparse matrix indexed by [`TermId`], stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    dim: usize,
    rows: BTreeMap<TermId, BTreeMap<TermId, f64>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: TermId, j: TermId) -> f64 {
        self.rows
            .get(&i)
            .and_then(|r| r.get(&j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, i: TermId, j: TermId, value: f64) {
        if value == 0.0 {
            if let Some(r) = self.rows.get_mut(&i) {
                r.remove(&j);
                if r.is_empty() {
                    self.rows.remove(&i);
                }
            }
        } else {
            self.rows.entry(i).or_default().insert(j, value);
        }
    }

    /// Nonzero entries of row `i`.
    pub fn row(&self, i: TermId) -> impl Iterator<Item = (TermId, f64)> + '_ {
        self.rows.get(&i).into_iter().flatten().map(|(&j, &v)| (j, v))
    }

    pub fn nnz(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut t = SparseMatrix::zeros(self.dim);
        for (&i, row) in &self.rows {
            for (&j, &v) in row {
                t.set(j, i, v);
            }
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> Self {
        let mut out = SparseMatrix::zeros(self.dim.max(other.dim));
        for (&i, row) in &self.rows {
            let mut acc: BTreeMap<TermId, f64> = BTreeMap::new();
            for (&k, &a) in row {
                for (j, b) in other.row(k) {
                    *acc.entry(j).or_insert(0.0) += a * b;
                }
            }
            for (j, v) in acc {
                out.set(i, j, v);
            }
        }
        out
    }

    /// Entry-wise product with `𝟏 − I`.
    pub fn zero_diagonal(&self) -> Self {
        let mut out = self.clone();
        for i in self.rows.keys() {
            out.set(*i, *i, 0.0);
        }
        out
    }

    /// Divides each row by `divisor(row)`; rows with a zero divisor become zero.
    pub fn scale_rows(&self, mut divisor: impl FnMut(TermId) -> f64) -> Self {
        let mut out = SparseMatrix::zeros(self.dim);
        for (&i, row) in &self.rows {
            let d = divisor(i);
            if d == 0.0 {
                continue;
            }
            for (&j, &v) in row {
                out.set(i, j, v / d);
            }
        }
        out
    }
}

/// `A^p[s,o] = 1` iff some graph holds `⟨s,p,o⟩`.
pub fn adjacency_matrix(store: &QuadStore, predicate: &str) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(store.term_count());
    let Some(p) = store.term_id(&Term::iri(predicate)) else {
        return m;
    };
    for [s, _, o, _] in store.match_ids([None, Some(p), None, None]) {
        m.set(s, o, 1.0);
    }
    m
}

/// `A^created` agent→item, and `A^createdBy` item→agent as its transpose
/// joined with any explicit `core:createdBy` edges.
fn authorship(store: &QuadStore) -> (SparseMatrix, SparseMatrix) {
    let created = adjacency_matrix(store, &ns::core("created"));
    let mut created_by = created.transpose();
    let explicit = adjacency_matrix(store, &ns::core("createdBy"));
    for (&i, row) in &explicit.rows {
        for &j in row.keys() {
            created_by.set(i, j, 1.0);
        }
    }
    (created, created_by)
}

/// `(A^created · A^createdBy) ∘ (𝟏 − I)`: shared-item counts between
/// distinct agents.
pub fn coauthorship_oracle(store: &QuadStore) -> SparseMatrix {
    let (created, created_by) = authorship(store);
    created.mul(&created_by).zero_diagonal()
}

/// Degree-normalized variant that matches a two-step diffusion walk with
/// exclude-previous on the second step: each factor's rows are divided by
/// the number of qualifying edges a parcel would split across.
pub fn coauthorship_transition(store: &QuadStore) -> SparseMatrix {
    let (created, created_by) = authorship(store);
    let out_degree = |m: &SparseMatrix, i: TermId| m.row(i).count() as f64;
    let first = created.scale_rows(|i| out_degree(&created, i));
    let second = created_by.scale_rows(|i| out_degree(&created_by, i) - 1.0);
    first.mul(&second).zero_diagonal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadstore::Quad;

    fn store(edges: &[(&str, &str, &str)]) -> QuadStore {
        let mut s = QuadStore::new();
        for (a, p, b) in edges {
            s.insert(Quad::new(
                Term::iri(format!("http://x/{a}")),
                Term::iri(ns::expand(p)),
                Term::iri(format!("http://x/{b}")),
                Term::iri("http://x/g"),
            ))
            .unwrap();
        }
        s
    }

    fn id(s: &QuadStore, name: &str) -> TermId {
        s.term_id(&Term::iri(format!("http://x/{name}"))).unwrap()
    }

    #[test]
    fn indicator_matrix() {
        let s = store(&[("a", "core:cites", "b")]);
        let m = adjacency_matrix(&s, &ns::core("cites"));
        assert_eq!(m.get(id(&s, "a"), id(&s, "b")), 1.0);
        assert_eq!(m.nnz(), 1);
        assert!(adjacency_matrix(&s, &ns::core("created")).is_zero());
    }

    #[test]
    fn symmetric_store_gives_symmetric_matrix() {
        let s = store(&[("a", "core:cites", "b"), ("b", "core:cites", "a")]);
        let m = adjacency_matrix(&s, &ns::core("cites"));
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn coauthor_counts() {
        let s = store(&[
            ("a", "core:created", "x"),
            ("b", "core:created", "x"),
            ("a", "core:created", "y"),
            ("b", "core:created", "y"),
            ("c", "core:created", "z"),
        ]);
        let m = coauthorship_oracle(&s);
        let (a, b, c) = (id(&s, "a"), id(&s, "b"), id(&s, "c"));
        assert_eq!(m.get(a, b), 2.0);
        assert_eq!(m.get(b, a), 2.0);
        assert_eq!(m.get(a, a), 0.0);
        assert!(m.row(c).next().is_none());
    }

    #[test]
    fn sole_author_gives_zero_matrix() {
        let s = store(&[("a", "core:created", "x")]);
        assert!(coauthorship_oracle(&s).is_zero());
    }
}
