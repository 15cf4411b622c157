//! Number-theoretic core: real quadratic fields, orders in quartic CM fields,
//! isogeny graph models and the depth-first local endomorphism ring search.

pub mod lattice;
pub mod realquad;
pub mod cmorder;
pub mod pairingmodel;
pub mod graphmodel;
pub mod dfs;
