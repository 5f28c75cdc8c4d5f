pub mod analytics;
pub mod grammars;
pub mod ingest;
pub mod ns;
pub mod quadstore;
pub mod schema;
pub mod timestamp;
pub mod walker;
