//! Model checking for TSL(T) and HyperTSL(T) over symbolic program automata.

pub mod surface;
pub mod syntax;
pub mod terms;
pub mod buchi;
pub mod logic;
pub mod ltl;
pub mod program;
pub mod feasibility;
pub mod checker;
pub mod cli;
