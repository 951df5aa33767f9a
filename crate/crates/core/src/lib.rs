//! Stream functions, trajectory tracing, argument oscillation and arc
//! calculus for planar steady Euler flows.
//!
//! The modules build on each other: [`expr`] parses and differentiates the
//! formulas, [`field`] turns them into velocity fields with stream
//! functions, [`tracer`] integrates streamlines and gradient orbits,
//! [`argument`] follows the direction of the flow, [`arcs`] classifies
//! curve excursions, and [`lemma_lab`] and [`suite`] assemble the checks
//! run by the `flowlab` binary ([`cli`]).

pub mod expr;
pub mod field;
pub mod geom;
pub mod quad;
pub mod tracer;
pub mod argument;
pub mod lemma_lab;
pub mod arcs;
pub mod config;
pub mod report;
pub mod suite;
pub mod cli;
