//! Control-flow graphs, the inter-program call graph and code regions.

mod callgraph;
mod cfg;
mod dot;
mod region;

pub use callgraph::{build_call_graph, CallEdge, CallGraph, UnresolvedCall};
pub use cfg::{build_cfg, post_order, Branch, Cfg};
pub use dot::{call_graph_to_dot, cfg_to_dot};
pub use region::CodeRegion;
