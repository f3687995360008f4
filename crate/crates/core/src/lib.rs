//! Disaster recovery for software-defined networks.
//!
//! The data plane reroutes around regional failures using multiple backup
//! topologies whose backup routes avoid the primary route's geographic
//! neighbourhood. Flows the data plane cannot save are escalated to the
//! controller, which splices surviving backup routes while balancing load.

pub mod controller;
pub mod dataplane;
pub mod error;
pub mod experiments;
pub mod failure;
pub mod fixtures;
pub mod geometry;
pub mod mrc;
pub mod routes;
pub mod topology;

pub use error::*;
pub use geometry::{Point, Segment, VulnerableZone};
pub use topology::{LinkId, NetworkGraph, NodeId};
