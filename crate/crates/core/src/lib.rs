//! Minimal volume entropy toolkit for free-by-cyclic groups and
//! two-dimensional right-angled Artin groups.

pub mod cli;
pub mod entropy;
pub mod fbz;
pub mod gog;
pub mod growth;
pub mod raag;
pub mod snf;
pub mod verdict;
pub mod words;
