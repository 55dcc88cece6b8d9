//! Front end for `ncr-core`: argument parsing, seeded corpora and the
//! verification suites behind `ncr verify`.

pub mod app;
pub mod corpus;
pub mod input;
pub mod suites;
