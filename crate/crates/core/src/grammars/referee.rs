use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{GrammarRegistry, RecommendError};
use crate::ns;
use crate::quadstore::{Direction, QuadStore, Term};
use crate::walker::{Grammar, RankedList, Walker, WalkerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RefereeRequest {
    pub article: String,
    #[serde(default = "default_depth")]
    pub max_depth_coauthor: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_depth() -> usize {
    2
}

fn default_delta() -> f64 {
    0.5
}

impl RefereeRequest {
    pub fn new(article: impl Into<String>) -> Self {
        RefereeRequest {
            article: article.into(),
            max_depth_coauthor: default_depth(),
            delta: default_delta(),
        }
    }
}

/// The positive (competence) and negative (conflict) grammars for a
/// request, with the step budget each needs for the coauthor depth.
pub fn referee_grammars(req: &RefereeRequest) -> ((Grammar, usize), (Grammar, usize)) {
    let registry = GrammarRegistry::builtin();
    let mut positive = registry.load("referee").expect("built-in referee grammar");
    let mut negative = registry.load("referee-coi").expect("built-in referee-coi grammar");
    for g in [&mut positive, &mut negative] {
        if let Some(l) = g.repeat.as_mut() {
            l.decay = req.delta;
        }
    }
    let depth = req.max_depth_coauthor;
    if depth == 0 {
        positive.steps.truncate(2);
        positive.repeat = None;
        negative.steps.truncate(1);
        negative.repeat = None;
    }
    ((positive, 2 + 2 * depth), (negative, 1 + 2 * depth))
}

/// Authors of `article`, and (when `with_coauthors`) everyone who shares
/// an item with one of them.
pub fn conflicts_of_interest(store: &QuadStore, article: &Term, with_coauthors: bool) -> BTreeSet<Term> {
    let created = Term::iri(ns::core("created"));
    let authors = store.neighbors(article, &created, Direction::In);
    let mut coi: BTreeSet<Term> = authors.iter().cloned().collect();
    if with_coauthors {
        for author in &authors {
            for item in store.neighbors(author, &created, Direction::Out) {
                coi.extend(store.neighbors(&item, &created, Direction::In));
            }
        }
    }
    coi
}

/// Ranks referees for an article. The competence walk runs from the
/// article through its citations; the conflict walk runs from the article
/// through its authors. Authors (and, for δ > 0, their direct coauthors)
/// are removed outright; anyone else the conflict walk reaches has their
/// score multiplied by `exp(conflict)`, where `conflict ≤ 0` is the
/// energy the conflict walk left there.
pub fn referees(walker: &Walker, req: &RefereeRequest, cfg: &WalkerConfig) -> Result<RankedList, RecommendError> {
    if !(0.0..=1.0).contains(&req.delta) {
        return Err(RecommendError::Invalid(format!("delta {} outside [0, 1]", req.delta)));
    }
    let store = walker.store();
    let article = Term::iri(req.article.as_str());
    if !store.mentions(&article) {
        return Err(RecommendError::UnknownResource(req.article.clone()));
    }
    if !walker.vocab().is_instance(store, &article, &ns::core("Article")) {
        return Err(RecommendError::Invalid(format!("{} is not a core:Article", req.article)));
    }
    let ((positive, pos_steps), (negative, neg_steps)) = referee_grammars(req);
    let run = |g: &Grammar, steps: usize| {
        let cfg = WalkerConfig {
            max_steps: steps,
            ..cfg.clone()
        };
        walker.execute(g, std::slice::from_ref(&article), &cfg)
    };
    let competence = run(&positive, pos_steps)?;
    let conflict = run(&negative, neg_steps)?;
    let penalty: HashMap<&str, f64> = conflict
        .entries()
        .iter()
        .map(|e| (e.resource.as_str(), e.score.min(0.0)))
        .collect();
    let masked = conflicts_of_interest(store, &article, req.delta > 0.0);
    let masked: BTreeSet<&str> = masked.iter().filter_map(Term::as_iri).collect();
    let ranked = RankedList::from_pairs(
        competence
            .entries()
            .iter()
            .filter(|e| !masked.contains(e.resource.as_str()))
            .map(|e| {
                let p = penalty.get(e.resource.as_str()).copied().unwrap_or(0.0);
                (e.resource.clone(), e.score * p.exp())
            }),
    );
    Ok(ranked.positive())
}
