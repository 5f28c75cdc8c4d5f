//! HTTP JSON API and command line front end for the recommender.

pub mod api;
pub mod cli;
pub mod view;

pub use api::{router, AppState};
