//! Identity keys for harvested resources. Equal keys mean the same resource.

use std::fmt::Write;

use crate::ns;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DedupKey {
    Guid(String),
    TitleType { title: String, type_tag: String },
    Person(String),
    Concept(String),
}

/// Lowercase, drop punctuation, collapse whitespace.
pub fn normalize(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Articles: by guid when present, else by normalized title and type.
pub fn article_key(guid: Option<&str>, title: &str, type_tag: Option<&str>) -> DedupKey {
    match guid.map(str::trim).filter(|g| !g.is_empty()) {
        Some(guid) => DedupKey::Guid(guid.to_string()),
        None => DedupKey::TitleType {
            title: normalize(title),
            type_tag: normalize(type_tag.unwrap_or("")),
        },
    }
}

pub fn person_key(full_name: &str) -> DedupKey {
    DedupKey::Person(normalize(full_name))
}

pub fn concept_key(label: &str) -> DedupKey {
    DedupKey::Concept(normalize(label))
}

/// `"Rodriguez, Marko A."` splits into last name `"Rodriguez"` and first
/// name `"Marko A."`; names without a comma are all last name.
pub fn split_name(full_name: &str) -> (Option<String>, String) {
    match full_name.split_once(',') {
        Some((last, first)) if !first.trim().is_empty() => {
            (Some(first.trim().to_string()), last.trim().to_string())
        }
        Some((last, _)) => (None, last.trim().to_string()),
        None => (None, full_name.trim().to_string()),
    }
}

/// Display form: `"Marko A. Rodriguez"`.
pub fn display_name(full_name: &str) -> String {
    match split_name(full_name) {
        (Some(first), last) => format!("{first} {last}"),
        (None, last) => last,
    }
}

impl DedupKey {
    /// Deterministic IRI minted from the key.
    pub fn iri(&self) -> String {
        let (kind, body) = match self {
            DedupKey::Guid(g) => ("item", g.clone()),
            DedupKey::TitleType { title, type_tag } => ("item", format!("{type_tag}|{title}")),
            DedupKey::Person(n) => ("person", n.clone()),
            DedupKey::Concept(c) => ("concept", c.clone()),
        };
        format!("{}{kind}:{}", ns::RESOURCE_BASE, percent_encode(&body))
    }
}

fn percent_encode(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for b in text.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            let _ = write!(out, "%{b:02X}");
        }
    }
    out
}
