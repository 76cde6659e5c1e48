//! Frobenius metrics on standard blocks and their products, in canonical
//! coordinates: the potential, unit and Euler conditions, the `ψ → β → γ`
//! chain with the generalized Darboux–Egoroff equations, and a Levi-Civita
//! curvature computation that checks the chain independently.

mod curvature;
mod gamma;
mod metric;
mod oneform;
mod verdict;

pub use curvature::{levi_civita_curvature, CurvatureReport, LeviCivita};
pub use gamma::{
    check_gamma, darboux_egoroff_residual, gamma_operator, gamma_single_block,
    gamma_standard_blocks, ConstantAlgebra, DarbouxEgoroffTable, GammaReport,
};
pub use metric::{
    check_coidentity_closed, check_euler_rescaling, check_unit_flat, epsilon_metric,
    metric_from_potential, solve_euler_rescaling, EulerFit, InvariantMetric, UnitFlatReport,
};
pub use oneform::{
    invert_oneform, metric_from_psi, oneform_product, principal_sqrt, psi_from_metric,
};
pub use verdict::{
    frobenius_verdict, EulerCheck, EulerMode, FrobeniusVerdict, GammaChain, VerdictSettings,
};
