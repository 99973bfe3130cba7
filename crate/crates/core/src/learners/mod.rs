//! Combinatorial baselines that search over causal orders.

mod gds;
mod lasso;
mod order;

pub use gds::{mse_gds, mse_gds_from_cov, GDS_TOL_REL};
pub use lasso::{lasso_bic_parents, ParentSearchConfig};
pub use order::{ascending_variance_order, randomregress, regress_along_order, sortnregress, variance_sort_full};
