pub mod arith;
pub mod duals;
pub mod error;
pub mod exec;
pub mod golden;
pub mod matclass;
pub mod matrices;
pub mod sequences;
pub mod spaces;
pub mod subset;
pub mod verdict;
