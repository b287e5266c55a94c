//! JSON schemas, seeded generators, property audits and the `dualutil`
//! command line over [`dualutil_core`].

pub mod audit;
pub mod cli;
pub mod gen;
pub mod json;
