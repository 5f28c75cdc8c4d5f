use std::collections::BTreeMap;
use std::path::Path;

use crate::walker::{Grammar, GrammarError};

const BUILTIN: &[(&str, &str)] = &[
    ("coauthorship", include_str!("../../grammars/coauthorship.json")),
    ("collaborator", include_str!("../../grammars/collaborator.json")),
    ("discover", include_str!("../../grammars/discover.json")),
    ("funding", include_str!("../../grammars/funding.json")),
    ("referee", include_str!("../../grammars/referee.json")),
    ("referee-coi", include_str!("../../grammars/referee-coi.json")),
    ("venue", include_str!("../../grammars/venue.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown grammar {0:?}")]
    Unknown(String),
    #[error("grammar {name:?}: {source}")]
    Invalid {
        name: String,
        #[source]
        source: GrammarError,
    },
    #[error("reading grammar directory: {0}")]
    Io(#[from] std::io::Error),
}

/// Named grammar sources. Files are parsed on load so a broken file only
/// fails the request that names it.
#[derive(Debug, Clone)]
pub struct GrammarRegistry {
    sources: BTreeMap<String, String>,
}

impl Default for GrammarRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl GrammarRegistry {
    pub fn builtin() -> Self {
        GrammarRegistry {
            sources: BUILTIN
                .iter()
                .map(|(n, s)| (n.to_string(), s.to_string()))
                .collect(),
        }
    }

    /// Built-ins plus every `*.json` in `dir`; a file named like a built-in
    /// replaces it.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let mut registry = Self::builtin();
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            registry.insert(name, std::fs::read_to_string(&path)?);
        }
        Ok(registry)
    }

    pub fn insert(&mut self, name: &str, source: impl Into<String>) {
        self.sources.insert(name.to_string(), source.into());
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(String::as_str)
    }

    pub fn load(&self, name: &str) -> Result<Grammar, RegistryError> {
        let source = self
            .sources
            .get(name)
            .ok_or_else(|| RegistryError::Unknown(name.to_string()))?;
        Grammar::from_json(source).map_err(|source| RegistryError::Invalid {
            name: name.to_string(),
            source,
        })
    }
}
