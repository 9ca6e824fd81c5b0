//! Hypernym intersection similarity (HIS) over WordNet noun and verb
//! taxonomies, the three path-based baseline similarities, and dense
//! "sense spectrum" embeddings whose overlap algebra reproduces the HIS
//! scalars.

pub mod checkpoint;
pub mod error;
pub mod eval;
mod graph;
pub mod similarity;
pub mod spectrum;
pub mod taxonomy;
pub mod trainer;
pub mod wordnet;

pub use error::{Error, Result};
pub use similarity::{Convention, HisParams, Measure, SimilarityScore};
pub use spectrum::{Spectrum, SpectrumScalars, SpectrumTriple};
pub use taxonomy::{build_taxonomy, HisScalars, Taxonomy, TaxonomyOptions};
pub use trainer::{SpectrumTable, TrainConfig};
pub use wordnet::{Database, PartOfSpeech, SynsetId};
