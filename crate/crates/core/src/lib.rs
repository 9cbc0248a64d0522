//! Rule-based information extraction.
//!
//! Text goes through four chained tasks: named entity recognition
//! ([`ne`]), coreference ([`coref`]), template elements ([`template`]) and
//! scenario templates ([`scenario`]). Results are fixed-format entity and
//! event records ([`records`]) that can be scored against a gold set
//! ([`eval`]) or rendered for another locale ([`localize`]).

pub mod config;
pub mod coref;
pub mod error;
pub mod eval;
pub mod localize;
pub mod ne;
pub mod pipeline;
pub mod records;
pub mod scenario;
pub mod template;
pub mod text;

pub use config::PipelineConfig;
pub use error::{Error, ParseError, SpanError};
pub use pipeline::{ExtractionResult, Pipeline};
