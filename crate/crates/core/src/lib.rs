//! Heterogeneous coded distributed computing: storage placement, XOR
//! shuffle planning, converse bounds, brute-force verification and an exact
//! LP for achievable loads with any number of nodes.

pub mod cli;
pub mod coding_k3;
pub mod converse_bounds;
pub mod error;
pub mod lp_general;
pub mod model;
pub mod oracle;
pub mod placement_k3;
pub mod shuffle_sim;
pub mod simplex;

pub use error::{Error, Result};
pub use model::{FileAllocation, Load, NodeSet, SubsetProfile, SystemConfig};
