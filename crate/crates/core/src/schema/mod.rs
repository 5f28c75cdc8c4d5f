//! Core and relation vocabularies, RDFS closure, and the reified
//! tag/usage associations users write into their own graphs.

pub mod relations;
mod vocabulary;

pub use relations::{
    find_relation, read_relation, record_usage, relations, tag, RelationKind, RelationResource,
};
pub use vocabulary::{load_vocabulary, ClassDef, PropertyDef, Vocabulary, VocabularyBuilder};

use crate::quadstore::StoreError;

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("unknown class <{0}>")]
    UnknownClass(String),
    #[error("unknown property <{0}>")]
    UnknownProperty(String),
    #[error("hierarchy cycle through <{0}>")]
    Cycle(String),
    #[error("abbreviation {1:?} of <{0}> is not exactly two characters")]
    BadAbbreviation(String, String),
    #[error("abbreviation {0:?} used by both <{1}> and <{2}>")]
    DuplicateAbbreviation(String, String, String),
    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error(transparent)]
    Store(#[from] StoreError),
}
