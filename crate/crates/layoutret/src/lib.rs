//! Layout-feature extraction and retrieval for OOXML office documents.

pub mod container;
pub mod eval;
pub mod extractor;
pub mod feature;
pub mod matcher;
pub mod query;
pub mod store;
pub mod units;
