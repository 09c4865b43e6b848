pub mod bench;
pub mod gen;
pub mod ingest;
pub mod learn;
pub mod sketch;
