pub mod bio;
pub mod bits;
pub mod cli;
pub mod error;
pub mod kv;
pub mod lsh;
pub mod ndb;
pub mod rng;
pub mod synth;

pub use bio::{AuthNdb, BioNdb, BioNdbParams, BuildOptions, Decision, Variant, Verdict};
pub use bits::{BinaryTemplate, Symbol, TriPattern};
pub use error::{Error, Result};
pub use ndb::{BuildReport, NegativeDatabase};
