//! Solver and verification suite for the one-phase free boundary problem of
//! the diffusion-convection equation u_t = u^2 (D u_xx - u_x).

pub mod certificate;
pub mod data_model;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod outer_fixed_point;
pub mod quadrature;
pub mod reconstruction;
pub mod transform_chain;
pub mod verification;
pub mod volterra_core;

pub use certificate::{
    check_hypotheses, compute_certificate, sigma_admissible, Certificate, HypothesisFlags,
};
pub use data_model::{
    build_initial_profiles, derive_constants, DerivedData, FunctionSpec, InitialProfiles,
    ProblemData,
};
pub use error::{FbError, Result};
pub use grid::{FieldFunction, GridFunction, GridSpec, Interp, Slice};
pub use kernels::{green, heat_kernel, neumann, Deriv, KernelQuery};
pub use outer_fixed_point::{
    pi_membership, solve_outer, z_map, PiReport, PiSpec, PiViolation, SolutionBundle, SolverParams,
    ZResult,
};
pub use quadrature::{
    cumulative_integral, integrate_abel, integrate_smooth, integrate_smooth_fn,
    integrate_volterra_kernel, SingularityClass,
};
pub use reconstruction::{reconstruct_solution, ParametricSolution};
pub use transform_chain::{
    galilean_shift, hodograph_forward, hodograph_inverse, hopf_cole_forward, hopf_cole_inverse,
    CSource, Direction, HopfColeState,
};
pub use verification::{
    field_pde_residual, hprime_equivalence_check, jump_relation_check, measured_order,
    mms_representation_check, residual_suite, ManufacturedHeat, Norm, PdeKind, ResidualReport,
    Side,
};
pub use volterra_core::{
    assemble_boundaries, assemble_w_field, assemble_y0, assemble_y1, chi_map, eval_w, picard_solve,
    picard_solve_from, Boundaries, Densities, EvalDeriv, InnerSolution, TraceFn,
};
