pub mod eval;
pub mod metrics;
pub mod mlcore;
pub mod phonetics;
pub mod semantics;
pub mod textsim;
