//! The Discover, Referee and News recommenders, and the named grammars
//! the service can run directly.

mod discover;
mod news;
mod referee;
mod registry;

pub use discover::{composite_grammars, discover, DiscoverRequest, COMPOSITE_BOOST};
pub use news::{news, news_grammar, tagged_by, NewsRequest, DEFAULT_HALF_LIFE_SECS};
pub use referee::{conflicts_of_interest, referee_grammars, referees, RefereeRequest};
pub use registry::{GrammarRegistry, RegistryError};

use crate::walker::WalkerError;

#[derive(Debug, thiserror::Error)]
pub enum RecommendError {
    #[error(transparent)]
    Walker(#[from] WalkerError),
    #[error("unknown resource {0}")]
    UnknownResource(String),
    #[error("unknown class {0}")]
    UnknownType(String),
    #[error("{0}")]
    Invalid(String),
}
