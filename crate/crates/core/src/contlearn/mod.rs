mod analysis;
mod golem;
mod landscape;
pub mod lbfgsb;
mod notears;
mod objectives;
mod settings;
mod threshold;

pub use analysis::first_step_residual_variances;
pub use golem::golem_fit;
pub use landscape::{
    correlation, landscape_3node, landscape_3node_standardized, landscape_from_covariance, landscape_study, truth_wins,
    LandscapeRecord, LandscapeStudyRow,
};
pub use notears::notears_fit;
pub use objectives::{
    acyclicity_h, acyclicity_h_grad, golem_grads, golem_losses, golem_objective, logdet, logdet_grad, mse, mse_grad,
    zero_diagonal, GolemVariant, Moments,
};
pub use settings::{FitTrace, OptimizerSettings, TraceRow};
pub use threshold::{threshold_and_break_cycles, threshold_weights};
