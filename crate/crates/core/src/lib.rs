//! Model checking for networks whose nodes carry XML payloads.
//!
//! Formulas combine CTL path quantifiers (with inverse, predecessor-facing
//! variants) and XPath filters as atomic node properties. Checking runs in
//! three stages: every distinct filter is evaluated once over all node
//! payloads, filters are replaced by generated propositions, and the
//! resulting CTL formula is checked over the labelled graph in time linear
//! in formula length and network size.
//!
//! The [`metrics`] module adds the usual topology statistics: clustering
//! coefficient, components, diameter, mean geodesic distance, degree
//! distribution and the Eulerian-path criterion.

pub mod cli;
pub mod ctl;
pub mod metrics;
pub mod network;
pub mod xml;
pub mod xpath;
pub mod xpl;
