//! Small hand-built networks used by the tests and examples.

use std::sync::Arc;

use crate::failure::RegionalFailure;
use crate::geometry::Point;
use crate::mrc::{parse_backup_topologies, BackupTopologySet};
use crate::topology::{parse_topology, NetworkGraph, NodeId};

pub const EIGHT_NODE_TOPOLOGY: &str = include_str!("../fixtures/eight_node.topo");
pub const EIGHT_NODE_BACKUPS: &str = include_str!("../fixtures/eight_node.backups");

/// Eight-node network with the flows (1,3) and (6,3) used in the worked examples.
pub fn eight_node() -> NetworkGraph {
    parse_topology(EIGHT_NODE_TOPOLOGY).expect("bundled fixture is valid")
}

/// Three backup topologies for [`eight_node`]: G1 isolates {2,5}, G2 {1,7}, G3 {3,4,6,8}.
pub fn eight_node_backups(g: Arc<NetworkGraph>) -> BackupTopologySet {
    parse_backup_topologies(g, EIGHT_NODE_BACKUPS).expect("bundled fixture is valid")
}

/// A disk that destroys exactly nodes 5 and 8 of [`eight_node`] and their links.
pub fn eight_node_disk() -> RegionalFailure {
    RegionalFailure::new(Point::new(450.0, 175.0), 95.0).expect("positive radius")
}

/// Seven-node splice scenario: two s-t paths `s-a-e-d-t` and `s-c-e-b-t`
/// crossing at `e`.
///
/// Node ids: s=0, a=1, e=2, b=3, t=4, c=5, d=6.
pub fn crossing_paths() -> NetworkGraph {
    parse_topology(
        "area 600 400\n\
         node 0 0 200\n\
         node 1 150 350\n\
         node 2 300 200\n\
         node 3 450 350\n\
         node 4 600 200\n\
         node 5 150 50\n\
         node 6 450 50\n\
         link 0 1\nlink 1 2\nlink 2 6\nlink 6 4\n\
         link 0 5\nlink 5 2\nlink 2 3\nlink 3 4\n",
    )
    .expect("bundled fixture is valid")
}

pub const CROSSING_S: NodeId = NodeId(0);
pub const CROSSING_A: NodeId = NodeId(1);
pub const CROSSING_E: NodeId = NodeId(2);
pub const CROSSING_B: NodeId = NodeId(3);
pub const CROSSING_T: NodeId = NodeId(4);
pub const CROSSING_C: NodeId = NodeId(5);
pub const CROSSING_D: NodeId = NodeId(6);

/// `p1 = s-a-e-d-t`, `p2 = s-c-e-b-t`.
pub fn crossing_paths_routes() -> [Vec<NodeId>; 2] {
    [
        vec![CROSSING_S, CROSSING_A, CROSSING_E, CROSSING_D, CROSSING_T],
        vec![CROSSING_S, CROSSING_C, CROSSING_E, CROSSING_B, CROSSING_T],
    ]
}

pub const RANDOM50_TOPOLOGY: &str = include_str!("../fixtures/random50.topo");

/// 50 nodes, 120 links in a 1200 x 1200 area (generator seed 7).
pub fn random50() -> NetworkGraph {
    parse_topology(RANDOM50_TOPOLOGY).expect("bundled fixture is valid")
}
