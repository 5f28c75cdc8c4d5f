use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{GrammarRegistry, RecommendError};
use crate::ns;
use crate::quadstore::Term;
use crate::walker::{Filter, Grammar, GrammarStep, RankedList, Sign, StepDirection, Walker, WalkerConfig};

/// Weight of composite paths relative to the generic walk.
pub const COMPOSITE_BOOST: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiscoverRequest {
    pub seeds: Vec<String>,
    #[serde(default)]
    pub return_types: Vec<String>,
}

fn pair(first: (&str, StepDirection), second: (&str, StepDirection)) -> Vec<GrammarStep> {
    vec![
        GrammarStep::new(first.0, first.1),
        GrammarStep::new(second.0, second.1)
            .filter(Filter::ExcludePrevious)
            .filter(Filter::ExcludeSeeds)
            .emit(Sign::Plus, None),
    ]
}

/// Composite paths whose endpoints are accentuated: coauthorship,
/// co-citation, co-event and co-usage.
pub fn composite_grammars() -> Vec<Grammar> {
    use StepDirection::{In, Out};
    let mut coauthors_of_item = vec![GrammarStep::new("core:created", In)];
    coauthors_of_item.extend(pair(("core:created", Out), ("core:created", In)));
    vec![
        Grammar::new("coauthorship", pair(("core:created", Out), ("core:created", In))),
        Grammar::new("coauthorship via item", coauthors_of_item),
        Grammar::new("co-citation", pair(("core:cites", In), ("core:cites", Out))),
        Grammar::new("bibliographic coupling", pair(("core:cites", Out), ("core:cites", In))),
        Grammar::new("co-event", pair(("core:presents", In), ("core:presents", Out))),
        Grammar::new("co-attendance", pair(("core:attends", Out), ("core:attends", In))),
        Grammar::new("co-usage forward", pair(("core:subject", In), ("core:object", Out))),
        Grammar::new("co-usage backward", pair(("core:object", In), ("core:subject", Out))),
    ]
}

/// Resources related to the seeds, restricted to instances of
/// `return_types` (any type when empty). Seeds are never returned.
pub fn discover(walker: &Walker, req: &DiscoverRequest, cfg: &WalkerConfig) -> Result<RankedList, RecommendError> {
    if req.seeds.is_empty() {
        return Err(RecommendError::Invalid("discover needs at least one seed".into()));
    }
    let vocab = walker.vocab();
    let types: Vec<String> = req.return_types.iter().map(|t| ns::expand(t)).collect();
    if let Some(unknown) = types.iter().find(|t| !vocab.is_class(t)) {
        return Err(RecommendError::UnknownType(unknown.clone()));
    }
    let seeds: Vec<Term> = req.seeds.iter().map(|s| Term::iri(s.as_str())).collect();

    let mut generic = GrammarRegistry::builtin().load("discover").expect("built-in discover grammar");
    if let Some(l) = generic.repeat.as_mut() {
        l.decay = cfg.decay;
    }
    let mut pairs: Vec<(String, f64)> = walker
        .execute(&generic, &seeds, cfg)?
        .entries()
        .iter()
        .map(|e| (e.resource.clone(), e.score))
        .collect();
    for grammar in composite_grammars() {
        let cfg = WalkerConfig {
            max_steps: cfg.max_steps.max(grammar.steps.len()),
            ..cfg.clone()
        };
        let list = walker.execute(&grammar, &seeds, &cfg)?;
        pairs.extend(list.entries().iter().map(|e| (e.resource.clone(), COMPOSITE_BOOST * e.score)));
    }

    let seed_set: BTreeSet<&str> = req.seeds.iter().map(String::as_str).collect();
    let mut list = RankedList::from_pairs(pairs);
    list.retain(|e| {
        let term = Term::iri(e.resource.as_str());
        !seed_set.contains(e.resource.as_str())
            && !vocab.is_class(&e.resource)
            && vocab.property(&e.resource).is_none()
            && (types.is_empty() || types.iter().any(|t| vocab.is_instance(walker.store(), &term, t)))
    });
    Ok(list.positive())
}
