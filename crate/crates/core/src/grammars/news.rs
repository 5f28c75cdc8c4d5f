use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::RecommendError;
use crate::ns;
use crate::quadstore::Term;
use crate::schema::{relations, RelationKind};
use crate::timestamp::Timestamp;
use crate::walker::{Filter, Grammar, GrammarStep, RankedList, Sign, StepDirection, Walker, WalkerConfig};

/// One week.
pub const DEFAULT_HALF_LIFE_SECS: f64 = 7.0 * 24.0 * 3600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewsRequest {
    pub user: String,
    pub concept: String,
    pub now: Timestamp,
    pub half_life_secs: f64,
}

/// Follows `concept` tags from each tagger to what it tagged, repeatedly,
/// with each tag's weight halving every `half_life_secs` of age.
pub fn news_grammar(concept: &str, half_life_secs: f64) -> Grammar {
    Grammar::new(
        "resources recently tagged with the concept by the user's community",
        vec![GrammarStep::new(ns::relation("related"), StepDirection::Out)
            .filter(Filter::RequireTagConcept(ns::expand(concept)))
            .filter(Filter::NotSelf)
            .time_decay(half_life_secs)
            .emit(Sign::Plus, None)],
    )
    .looping(0, 1.0)
}

/// Resources `user` tagged with `concept`, in canonical order.
pub fn tagged_by(walker: &Walker, user: &Term, concept: &Term) -> Vec<Term> {
    let tagged: BTreeSet<Term> = relations(walker.store(), RelationKind::Related, Some(user))
        .into_iter()
        .filter(|r| &r.subject == concept)
        .map(|r| r.object)
        .collect();
    tagged.into_iter().collect()
}

/// The user's feed for a concept. Never includes the user, the resources
/// they tagged with the concept, or anything with a non-positive score.
pub fn news(walker: &Walker, req: &NewsRequest, cfg: &WalkerConfig) -> Result<RankedList, RecommendError> {
    if !(req.half_life_secs > 0.0 && req.half_life_secs.is_finite()) {
        return Err(RecommendError::Invalid(format!(
            "half-life must be positive, got {}",
            req.half_life_secs
        )));
    }
    let user = Term::iri(req.user.as_str());
    if !walker.store().mentions(&user) {
        return Err(RecommendError::UnknownResource(req.user.clone()));
    }
    let concept = Term::iri(ns::expand(&req.concept));
    let seeds = tagged_by(walker, &user, &concept);
    if seeds.is_empty() {
        return Ok(RankedList::default());
    }
    let cfg = WalkerConfig {
        now: Some(req.now),
        ..cfg.clone()
    };
    let grammar = news_grammar(concept.value(), req.half_life_secs);
    let mut list = walker.execute(&grammar, &seeds, &cfg)?;
    let excluded: BTreeSet<&str> = seeds
        .iter()
        .chain(std::iter::once(&user))
        .filter_map(Term::as_iri)
        .collect();
    list.retain(|e| !excluded.contains(e.resource.as_str()));
    Ok(list.positive())
}
