use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ns;

/// An RDF term: IRI, blank node or literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Iri { iri: String },
    Blank { label: String },
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri { iri: iri.into() }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank {
            label: label.into(),
        }
    }

    /// Plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, ns::xsd("string"))
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
            lang: None,
        })
    }

    pub fn lang_string(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: ns::rdf("langString"),
            lang: Some(lang.into()),
        })
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { iri } => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    /// Lexical form for literals, IRI text for IRIs, label for blank nodes.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri { iri } => iri,
            Term::Blank { label } => label,
            Term::Literal(l) => &l.lexical,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri { .. })
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank { .. })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Canonical N-Quads serialization; also the sort key for every ordering
    /// the store exposes.
    pub fn to_nquads(&self) -> String {
        let mut out = String::new();
        write_term(&mut out, self);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_nquads())
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_nquads().cmp(&other.to_nquads())
    }
}

/// Absolute IRIs start with a scheme: `ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"`.
pub fn is_absolute_iri(iri: &str) -> bool {
    let Some((scheme, _)) = iri.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !iri.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"'))
}

pub(crate) fn is_valid_blank_label(label: &str) -> bool {
    let mut chars = label.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_alphanumeric() || first == '_')
        && label
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !label.ends_with('.')
}

/// One `⟨s, p, o, g⟩` statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quad {
    pub s: Term,
    pub p: Term,
    pub o: Term,
    pub g: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadError {
    #[error("{position} must not be a literal: {term}")]
    LiteralInPosition { position: &'static str, term: String },
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
    #[error("IRI is not absolute: <{0}>")]
    RelativeIri(String),
    #[error("invalid blank node label: _:{0}")]
    BadBlankLabel(String),
}

impl Quad {
    pub fn new(s: Term, p: Term, o: Term, g: Term) -> Self {
        Quad { s, p, o, g }
    }

    /// Checks `G ⊆ (U∪B) × U × (U∪B∪L) × (U∪B)` plus IRI absoluteness.
    pub fn validate(&self) -> Result<(), QuadError> {
        for (position, term) in [("subject", &self.s), ("graph", &self.g)] {
            if term.is_literal() {
                return Err(QuadError::LiteralInPosition {
                    position,
                    term: term.to_nquads(),
                });
            }
        }
        if !self.p.is_iri() {
            return Err(QuadError::NonIriPredicate(self.p.to_nquads()));
        }
        for term in [&self.s, &self.p, &self.o, &self.g] {
            match term {
                Term::Iri { iri } if !is_absolute_iri(iri) => {
                    return Err(QuadError::RelativeIri(iri.clone()))
                }
                Term::Blank { label } if !is_valid_blank_label(label) => {
                    return Err(QuadError::BadBlankLabel(label.clone()))
                }
                Term::Literal(l) if !is_absolute_iri(&l.datatype) => {
                    return Err(QuadError::RelativeIri(l.datatype.clone()))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// One N-Quads statement without the trailing newline.
    pub fn to_nquads(&self) -> String {
        let mut out = String::new();
        write_term(&mut out, &self.s);
        out.push(' ');
        write_term(&mut out, &self.p);
        out.push(' ');
        write_term(&mut out, &self.o);
        out.push(' ');
        write_term(&mut out, &self.g);
        out.push_str(" .");
        out
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_nquads())
    }
}

fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri { iri } => write_iri(out, iri),
        Term::Blank { label } => {
            out.push_str("_:");
            out.push_str(label);
        }
        Term::Literal(l) => {
            out.push('"');
            for c in l.lexical.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    '\u{8}' => out.push_str("\\b"),
                    '\u{c}' => out.push_str("\\f"),
                    c if (c as u32) < 0x20 || c == '\u{7f}' => {
                        out.push_str(&format!("\\u{:04X}", c as u32))
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
            if let Some(lang) = &l.lang {
                out.push('@');
                out.push_str(lang);
            } else if l.datatype != ns::xsd("string") {
                out.push_str("^^");
                write_iri(out, &l.datatype);
            }
        }
    }
}

fn write_iri(out: &mut String, iri: &str) {
    out.push('<');
    for c in iri.chars() {
        if (c as u32) <= 0x20 || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        {
            out.push_str(&format!("\\u{:04X}", c as u32));
        } else {
            out.push(c);
        }
    }
    out.push('>');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: Term, o: Term) -> Quad {
        Quad::new(s, Term::iri("http://x.org/p"), o, Term::iri("http://x.org/g"))
    }

    #[test]
    fn literal_subject_rejected() {
        let quad = q(Term::string("lit"), Term::iri("http://x.org/o"));
        assert!(matches!(
            quad.validate(),
            Err(QuadError::LiteralInPosition { position: "subject", .. })
        ));
    }

    #[test]
    fn literal_graph_and_blank_predicate_rejected() {
        let mut quad = q(Term::iri("http://x.org/s"), Term::string("fine"));
        assert!(quad.validate().is_ok());
        quad.g = Term::string("g");
        assert!(quad.validate().is_err());
        quad.g = Term::iri("http://x.org/g");
        quad.p = Term::blank("p");
        assert!(matches!(quad.validate(), Err(QuadError::NonIriPredicate(_))));
    }

    #[test]
    fn relative_iri_rejected() {
        let quad = q(Term::iri("relative/thing"), Term::iri("http://x.org/o"));
        assert!(matches!(quad.validate(), Err(QuadError::RelativeIri(_))));
        assert!(is_absolute_iri("urn:isbn:123"));
        assert!(is_absolute_iri("oai:arXiv.org:0807.2466"));
        assert!(!is_absolute_iri("1http://x"));
        assert!(!is_absolute_iri("http://a b"));
    }

    #[test]
    fn serialization_forms() {
        assert_eq!(Term::iri("http://x.org/a").to_nquads(), "<http://x.org/a>");
        assert_eq!(Term::blank("b1").to_nquads(), "_:b1");
        assert_eq!(Term::string("say \"hi\"\n").to_nquads(), r#""say \"hi\"\n""#);
        assert_eq!(Term::lang_string("chat", "fr").to_nquads(), "\"chat\"@fr");
        assert_eq!(
            Term::typed("3", ns::xsd("int")).to_nquads(),
            "\"3\"^^<http://www.w3.org/2001/XMLSchema#int>"
        );
    }

    #[test]
    fn ordering_is_by_serialization() {
        let mut terms = [
            Term::string("z"),
            Term::iri("http://b.org"),
            Term::blank("a"),
            Term::iri("http://a.org"),
        ];
        terms.sort();
        let keys: Vec<_> = terms.iter().map(Term::to_nquads).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
