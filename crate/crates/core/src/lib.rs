//! Behaviour-plan toolchain core: plan model, textual format, primitive
//! registry, reactive planner engine, feature board, plan linter, and a
//! deterministic grid-world stealth harness.

pub mod dsl;
pub mod engine;
pub mod model;
pub mod registry;
