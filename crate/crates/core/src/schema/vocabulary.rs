use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ns;
use crate::quadstore::{Direction, Quad, QuadStore, Term};

use super::SchemaError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub parents: Vec<String>,
    pub abbrev: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub domain: String,
    pub range: String,
    pub parents: Vec<String>,
}

/// Class and property declarations plus their precomputed RDFS closures.
///
/// Immutable once built; the only inference performed anywhere is
/// `rdfs:subClassOf` / `rdfs:subPropertyOf` transitivity.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    classes: BTreeMap<String, ClassDef>,
    properties: BTreeMap<String, PropertyDef>,
    class_closure: HashMap<String, BTreeSet<String>>,
    property_closure: HashMap<String, BTreeSet<String>>,
}

#[derive(Debug, Default, Clone)]
pub struct VocabularyBuilder {
    classes: BTreeMap<String, ClassDef>,
    properties: BTreeMap<String, PropertyDef>,
}

impl VocabularyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn class(mut self, iri: impl Into<String>, parents: &[&str], abbrev: Option<&str>) -> Self {
        self.classes.insert(
            iri.into(),
            ClassDef {
                parents: parents.iter().map(|p| p.to_string()).collect(),
                abbrev: abbrev.map(str::to_string),
            },
        );
        self
    }

    pub fn property(
        mut self,
        iri: impl Into<String>,
        domain: impl Into<String>,
        range: impl Into<String>,
        parents: &[&str],
    ) -> Self {
        self.properties.insert(
            iri.into(),
            PropertyDef {
                domain: domain.into(),
                range: range.into(),
                parents: parents.iter().map(|p| p.to_string()).collect(),
            },
        );
        self
    }

    pub fn build(self) -> Result<Vocabulary, SchemaError> {
        let mut seen_abbrev: BTreeMap<&str, &str> = BTreeMap::new();
        for (iri, def) in &self.classes {
            if let Some(abbrev) = &def.abbrev {
                if abbrev.chars().count() != 2 {
                    return Err(SchemaError::BadAbbreviation(iri.clone(), abbrev.clone()));
                }
                if let Some(other) = seen_abbrev.insert(abbrev, iri) {
                    return Err(SchemaError::DuplicateAbbreviation(
                        abbrev.clone(),
                        other.to_string(),
                        iri.clone(),
                    ));
                }
            }
            for parent in &def.parents {
                if !self.classes.contains_key(parent) {
                    return Err(SchemaError::UnknownClass(parent.clone()));
                }
            }
        }
        for def in self.properties.values() {
            for parent in &def.parents {
                if !self.properties.contains_key(parent) {
                    return Err(SchemaError::UnknownProperty(parent.clone()));
                }
            }
        }
        let class_parents: BTreeMap<&str, &[String]> = self
            .classes
            .iter()
            .map(|(k, v)| (k.as_str(), v.parents.as_slice()))
            .collect();
        let property_parents: BTreeMap<&str, &[String]> = self
            .properties
            .iter()
            .map(|(k, v)| (k.as_str(), v.parents.as_slice()))
            .collect();
        let class_closure = closures(&class_parents)?;
        let property_closure = closures(&property_parents)?;
        Ok(Vocabulary {
            classes: self.classes,
            properties: self.properties,
            class_closure,
            property_closure,
        })
    }
}

/// Reflexive-transitive ancestor sets; fails on a cycle.
fn closures(parents: &BTreeMap<&str, &[String]>) -> Result<HashMap<String, BTreeSet<String>>, SchemaError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        parents: &BTreeMap<&'a str, &'a [String]>,
        marks: &mut HashMap<&'a str, Mark>,
        out: &mut HashMap<String, BTreeSet<String>>,
    ) -> Result<(), SchemaError> {
        match marks.get(node) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Visiting) => return Err(SchemaError::Cycle(node.to_string())),
            None => {}
        }
        marks.insert(node, Mark::Visiting);
        let mut set = BTreeSet::from([node.to_string()]);
        for parent in parents.get(node).copied().unwrap_or_default() {
            visit(parent, parents, marks, out)?;
            set.extend(out[parent.as_str()].iter().cloned());
        }
        marks.insert(node, Mark::Done);
        out.insert(node.to_string(), set);
        Ok(())
    }
    let mut marks = HashMap::new();
    let mut out = HashMap::new();
    for node in parents.keys() {
        visit(node, parents, &mut marks, &mut out)?;
    }
    Ok(out)
}

impl Vocabulary {
    pub fn classes(&self) -> impl Iterator<Item = (&str, &ClassDef)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn properties(&self) -> impl Iterator<Item = (&str, &PropertyDef)> {
        self.properties.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_class(&self, iri: &str) -> bool {
        self.classes.contains_key(iri)
    }

    pub fn property(&self, iri: &str) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn domain(&self, property: &str) -> Option<&str> {
        self.properties.get(property).map(|p| p.domain.as_str())
    }

    pub fn range(&self, property: &str) -> Option<&str> {
        self.properties.get(property).map(|p| p.range.as_str())
    }

    /// `c` plus every transitive `rdfs:subClassOf` ancestor.
    pub fn subclass_closure(&self, class: &str) -> Result<&BTreeSet<String>, SchemaError> {
        self.class_closure
            .get(class)
            .ok_or_else(|| SchemaError::UnknownClass(class.to_string()))
    }

    /// `p` plus every transitive `rdfs:subPropertyOf` ancestor.
    pub fn subproperty_closure(&self, property: &str) -> Result<&BTreeSet<String>, SchemaError> {
        self.property_closure
            .get(property)
            .ok_or_else(|| SchemaError::UnknownProperty(property.to_string()))
    }

    pub fn is_subclass_of(&self, class: &str, ancestor: &str) -> bool {
        class == ancestor
            || self
                .class_closure
                .get(class)
                .is_some_and(|c| c.contains(ancestor))
    }

    /// Two-character badge of a class, inherited from the nearest ancestor
    /// that has one.
    pub fn abbrev(&self, class: &str) -> Option<&str> {
        if let Some(a) = self.classes.get(class).and_then(|c| c.abbrev.as_deref()) {
            return Some(a);
        }
        // Deepest ancestor first: larger closure means further from the root.
        let mut ancestors: Vec<&String> = self.class_closure.get(class)?.iter().collect();
        ancestors.sort_by_key(|a| std::cmp::Reverse(self.class_closure[a.as_str()].len()));
        ancestors
            .into_iter()
            .find_map(|a| self.classes[a.as_str()].abbrev.as_deref())
    }

    /// Subclass-aware instance check. `owl:Thing` holds for everything;
    /// otherwise only asserted `rdf:type` edges count (no domain/range
    /// entailment).
    pub fn is_instance(&self, store: &QuadStore, resource: &Term, class: &str) -> bool {
        if class == ns::owl("Thing") {
            return true;
        }
        let rdf_type = Term::iri(ns::rdf("type"));
        store
            .neighbors(resource, &rdf_type, Direction::Out)
            .iter()
            .filter_map(Term::as_iri)
            .any(|t| self.is_subclass_of(t, class))
    }

    /// Asserted types ordered most specific first (ties by IRI).
    pub fn types_of(&self, store: &QuadStore, resource: &Term) -> Vec<String> {
        let rdf_type = Term::iri(ns::rdf("type"));
        let mut types: Vec<String> = store
            .neighbors(resource, &rdf_type, Direction::Out)
            .iter()
            .filter_map(|t| t.as_iri().map(str::to_string))
            .collect();
        types.sort_by(|a, b| {
            let depth = |c: &str| self.class_closure.get(c).map_or(0, BTreeSet::len);
            depth(b).cmp(&depth(a)).then_with(|| a.cmp(b))
        });
        types
    }

    /// Whether `⟨s, p', o⟩` holds for `p` or any of its sub-properties.
    pub fn holds(&self, store: &QuadStore, s: &Term, property: &str, o: &Term) -> bool {
        let mut candidates: Vec<&str> = self
            .properties
            .keys()
            .filter(|p| self.property_closure[p.as_str()].contains(property))
            .map(String::as_str)
            .collect();
        if candidates.is_empty() {
            candidates.push(property);
        }
        candidates.into_iter().any(|p| {
            !store
                .match_quads(Some(s), Some(&Term::iri(p)), Some(o), None)
                .is_empty()
        })
    }

    /// Domain/range mismatches for a quad. Advisory only: nothing is
    /// inferred from domain or range declarations.
    pub fn check_quad(&self, store: &QuadStore, quad: &Quad) -> Vec<String> {
        let mut warnings = Vec::new();
        let Some(p) = quad.p.as_iri() else {
            return warnings;
        };
        let Some(def) = self.properties.get(p) else {
            return warnings;
        };
        let typed = |t: &Term| !self.types_of(store, t).is_empty();
        if typed(&quad.s) && !self.is_instance(store, &quad.s, &def.domain) {
            warnings.push(format!(
                "{} used on {} which is not a {}",
                ns::compact(p),
                quad.s,
                ns::compact(&def.domain)
            ));
        }
        let datatype_range = def.range.starts_with(ns::XSD);
        match &quad.o {
            Term::Literal(_) if !datatype_range => warnings.push(format!(
                "{} expects a {} but got a literal",
                ns::compact(p),
                ns::compact(&def.range)
            )),
            Term::Iri { .. } | Term::Blank { .. } if datatype_range => warnings.push(format!(
                "{} expects a literal but got {}",
                ns::compact(p),
                quad.o
            )),
            o @ (Term::Iri { .. } | Term::Blank { .. })
                if typed(o) && !self.is_instance(store, o, &def.range) =>
            {
                warnings.push(format!(
                    "{} points at {} which is not a {}",
                    ns::compact(p),
                    o,
                    ns::compact(&def.range)
                ))
            }
            _ => {}
        }
        warnings
    }

    /// The vocabulary as RDF, in the schema graph.
    pub fn to_quads(&self) -> Vec<Quad> {
        let g = Term::iri(ns::SCHEMA_GRAPH);
        let t = |p: String| Term::iri(p);
        let mut quads = Vec::new();
        for (iri, def) in &self.classes {
            let class = Term::iri(iri.as_str());
            quads.push(Quad::new(class.clone(), t(ns::rdf("type")), t(ns::owl("Class")), g.clone()));
            for parent in &def.parents {
                quads.push(Quad::new(
                    class.clone(),
                    t(ns::rdfs("subClassOf")),
                    Term::iri(parent.as_str()),
                    g.clone(),
                ));
            }
            if let Some(abbrev) = &def.abbrev {
                quads.push(Quad::new(
                    class.clone(),
                    t(ns::core("abbreviation")),
                    Term::string(abbrev.as_str()),
                    g.clone(),
                ));
            }
        }
        for (iri, def) in &self.properties {
            let prop = Term::iri(iri.as_str());
            let kind = if def.range.starts_with(ns::XSD) {
                "DatatypeProperty"
            } else {
                "ObjectProperty"
            };
            quads.push(Quad::new(prop.clone(), t(ns::rdf("type")), t(ns::owl(kind)), g.clone()));
            quads.push(Quad::new(prop.clone(), t(ns::rdfs("domain")), Term::iri(def.domain.as_str()), g.clone()));
            quads.push(Quad::new(prop.clone(), t(ns::rdfs("range")), Term::iri(def.range.as_str()), g.clone()));
            for parent in &def.parents {
                quads.push(Quad::new(
                    prop.clone(),
                    t(ns::rdfs("subPropertyOf")),
                    Term::iri(parent.as_str()),
                    g.clone(),
                ));
            }
        }
        quads
    }
}

/// Built-in `core` + `relation` vocabulary.
pub fn load_vocabulary() -> Vocabulary {
    let c = ns::core;
    let r = ns::relation;
    let x = ns::xsd;
    let thing = ns::owl("Thing");

    let mut b = VocabularyBuilder::new().class(thing.clone(), &[], None);
    let classes: &[(String, String, &str)] = &[
        (c("Reefsource"), thing.clone(), "Rs"),
        (c("Agent"), c("Reefsource"), "Ag"),
        (c("Person"), c("Agent"), "Pe"),
        (c("Group"), c("Agent"), "Gr"),
        (c("Institution"), c("Group"), "In"),
        (c("Item"), c("Reefsource"), "It"),
        (c("Document"), c("Item"), "Do"),
        (c("Article"), c("Document"), "Ar"),
        (c("Book"), c("Document"), "Bo"),
        (c("Thesis"), c("Document"), "Th"),
        (c("Report"), c("Document"), "Rp"),
        (c("Webpage"), c("Document"), "Wp"),
        (c("Software"), c("Item"), "Sw"),
        (c("Dataset"), c("Item"), "Ds"),
        (c("Collection"), c("Item"), "Co"),
        (c("Journal"), c("Collection"), "Jo"),
        (c("Proceedings"), c("Collection"), "Pr"),
        (c("Library"), c("Collection"), "Li"),
        (c("Call"), c("Item"), "Ca"),
        (c("FundingOpportunity"), c("Call"), "Fo"),
        (c("CallForPapers"), c("Call"), "Cp"),
        (c("Event"), c("Reefsource"), "Ev"),
        (c("Conference"), c("Event"), "Cf"),
        (c("Workshop"), c("Event"), "Wk"),
        (c("Presentation"), c("Event"), "Ps"),
        (c("Concept"), c("Reefsource"), "Cn"),
        (c("Gender"), c("Reefsource"), "Ge"),
        (r("Relation"), c("Reefsource"), "Rl"),
        (r("related"), r("Relation"), "Rr"),
        (r("usage"), r("Relation"), "Us"),
    ];
    for (iri, parent, abbrev) in classes {
        b = b.class(iri.clone(), &[parent.as_str()], Some(abbrev));
    }

    let props: &[(String, String, String)] = &[
        // Reefsource
        (c("title"), c("Reefsource"), x("string")),
        (c("abstract"), c("Reefsource"), x("string")),
        (c("guid"), c("Reefsource"), x("string")),
        (c("url"), c("Reefsource"), x("anyURI")),
        // Agent
        (c("attends"), c("Agent"), c("Event")),
        (c("created"), c("Agent"), c("Item")),
        (c("member"), c("Group"), c("Person")),
        (c("subGroup"), c("Group"), c("Group")),
        (c("firstName"), c("Person"), x("string")),
        (c("lastName"), c("Person"), x("string")),
        (c("occupation"), c("Person"), x("string")),
        (c("sex"), c("Person"), c("Gender")),
        // Item
        (c("createdBy"), c("Item"), c("Agent")),
        (c("cites"), c("Item"), c("Item")),
        (c("containedIn"), c("Item"), c("Collection")),
        (c("creationTime"), c("Item"), x("dateTime")),
        (c("doi"), c("Item"), x("anyURI")),
        (c("publisher"), c("Item"), c("Group")),
        (c("dueDate"), c("Call"), x("dateTime")),
        (c("callFor"), c("Call"), c("Reefsource")),
        (c("contains"), c("Collection"), c("Item")),
        (c("editor"), c("Collection"), c("Agent")),
        (c("isbn"), c("Collection"), x("anyURI")),
        (c("issn"), c("Collection"), x("anyURI")),
        (c("oaipmh"), c("Library"), x("anyURI")),
        (c("startPage"), c("Article"), x("int")),
        (c("endPage"), c("Article"), x("int")),
        (c("number"), c("Article"), x("int")),
        (c("volume"), c("Article"), x("int")),
        // Event
        (c("startTime"), c("Event"), x("dateTime")),
        (c("endTime"), c("Event"), x("dateTime")),
        (c("presents"), c("Event"), c("Item")),
        (c("organizedBy"), c("Event"), c("Agent")),
        (c("subEvent"), c("Event"), c("Event")),
        // relation
        (c("subject"), r("Relation"), c("Reefsource")),
        (c("object"), r("Relation"), c("Reefsource")),
        (c("weight"), r("related"), x("float")),
        (c("insertTime"), r("related"), x("dateTime")),
        (c("usageStamps"), r("usage"), x("string")),
    ];
    for (iri, domain, range) in props {
        b = b.property(iri.clone(), domain.clone(), range.clone(), &[]);
    }
    b.build().expect("built-in vocabulary is well formed")
}
