//! Citation and usage statistics read straight off the store.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::ns;
use crate::quadstore::{Direction, QuadStore, Term};
use crate::schema::{relations, RelationKind};
use crate::timestamp::{self, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    HIndex,
    CitationCount,
    CoUsage,
    ImpactFactor,
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "h_index" => Ok(Metric::HIndex),
            "citation_count" => Ok(Metric::CitationCount),
            "co_usage" => Ok(Metric::CoUsage),
            "impact_factor" => Ok(Metric::ImpactFactor),
            _ => Err(format!("unknown metric {s:?}")),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::HIndex => "h_index",
            Metric::CitationCount => "citation_count",
            Metric::CoUsage => "co_usage",
            Metric::ImpactFactor => "impact_factor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub resource: String,
    pub metric: Metric,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(Timestamp, Timestamp)>,
}

fn core(local: &str) -> Term {
    Term::iri(ns::core(local))
}

/// Distinct items citing `item` (self-citations included).
pub fn citation_count(store: &QuadStore, item: &Term) -> usize {
    store.neighbors(item, &core("cites"), Direction::In).len()
}

/// Largest h such that at least h of the counts are ≥ h.
pub fn h_index_of(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, &c)| c > *i)
        .count()
}

/// Items an agent created, via `core:created` or `core:createdBy`.
pub fn created_items(store: &QuadStore, agent: &Term) -> BTreeSet<Term> {
    let mut items: BTreeSet<Term> = store
        .neighbors(agent, &core("created"), Direction::Out)
        .into_iter()
        .collect();
    items.extend(store.neighbors(agent, &core("createdBy"), Direction::In));
    items
}

pub fn h_index(store: &QuadStore, agent: &Term) -> usize {
    let counts: Vec<usize> = created_items(store, agent)
        .iter()
        .map(|item| citation_count(store, item))
        .collect();
    h_index_of(&counts)
}

/// Total recorded transitions between `i` and `j`, both directions, all users.
pub fn co_usage(store: &QuadStore, i: &Term, j: &Term) -> usize {
    relations(store, RelationKind::Usage, None)
        .into_iter()
        .filter(|r| (&r.subject == i && &r.object == j) || (&r.subject == j && &r.object == i))
        .map(|r| r.usage_stamps.len())
        .sum()
}

fn creation_year(store: &QuadStore, item: &Term) -> Option<i32> {
    store
        .match_quads(Some(item), Some(&core("creationTime")), None, None)
        .iter()
        .filter_map(|q| timestamp::parse(q.o.value()))
        .map(|ts| ts.year())
        .min()
}

/// Items in a collection, via `core:contains` or `core:containedIn`.
pub fn collection_items(store: &QuadStore, collection: &Term) -> BTreeSet<Term> {
    let mut items: BTreeSet<Term> = store
        .neighbors(collection, &core("contains"), Direction::Out)
        .into_iter()
        .collect();
    items.extend(store.neighbors(collection, &core("containedIn"), Direction::In));
    items
}

/// Citations made in `year` to the collection's items from the two prior
/// years, per such item. Undated items and citers are left out.
pub fn impact_factor(store: &QuadStore, collection: &Term, year: i32) -> f64 {
    let window: Vec<Term> = collection_items(store, collection)
        .into_iter()
        .filter(|item| matches!(creation_year(store, item), Some(y) if y == year - 1 || y == year - 2))
        .collect();
    if window.is_empty() {
        return 0.0;
    }
    let citations: usize = window
        .iter()
        .map(|item| {
            store
                .neighbors(item, &core("cites"), Direction::In)
                .iter()
                .filter(|citer| creation_year(store, citer) == Some(year))
                .count()
        })
        .sum();
    citations as f64 / window.len() as f64
}

/// `[Jan 1 of year−2, Jan 1 of year+1)`: publication window start to the
/// end of the citing year.
pub fn impact_window(year: i32) -> Option<(Timestamp, Timestamp)> {
    let start = NaiveDate::from_ymd_opt(year - 2, 1, 1)?.and_hms_opt(0, 0, 0)?.and_utc();
    let end = NaiveDate::from_ymd_opt(year + 1, 1, 1)?.and_hms_opt(0, 0, 0)?.and_utc();
    Some((start, end))
}

/// Computes one metric as a report. `other` is the second resource for
/// co-usage; `year` is required for the impact factor.
pub fn report(
    store: &QuadStore,
    metric: Metric,
    resource: &Term,
    other: Option<&Term>,
    year: Option<i32>,
) -> Result<MetricReport, String> {
    let (value, window) = match metric {
        Metric::HIndex => (h_index(store, resource) as f64, None),
        Metric::CitationCount => (citation_count(store, resource) as f64, None),
        Metric::CoUsage => {
            let other = other.ok_or("co_usage needs a second resource")?;
            (co_usage(store, resource, other) as f64, None)
        }
        Metric::ImpactFactor => {
            let year = year.ok_or("impact_factor needs a year")?;
            let window = impact_window(year).ok_or("year out of range")?;
            (impact_factor(store, resource, year), Some(window))
        }
    };
    Ok(MetricReport {
        resource: resource.value().to_string(),
        metric,
        value,
        window,
    })
}
