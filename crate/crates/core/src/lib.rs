//! Exact-arithmetic engine for topological quantum mechanics on linear
//! symplectic orbifolds: twisted correlation maps, twisted Hochschild and
//! cyclic operators, configuration-space weights and the universal trace.

pub mod exactnum;
pub mod model;
pub mod weyl;
pub mod forms;
pub mod chains;
pub mod simplex;
pub mod correlate;
pub mod corpus;
pub mod charclass;
pub mod cli;
