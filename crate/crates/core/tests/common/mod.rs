//! Shared fixtures for the integration and acceptance suites.

use fbsolve_core::{FunctionSpec, ProblemData};

/// Hermite-cubic initial profile as polynomial coefficients: value and
/// slope prescribed at both ends of [0, b].
pub fn hermite_profile(b: f64, p0: f64, m0: f64, p1: f64, m1: f64) -> FunctionSpec {
    let c2 = 3.0 * (p1 - p0) / (b * b) - (2.0 * m0 + m1) / b;
    let c3 = 2.0 * (p0 - p1) / (b * b * b) + (m0 + m1) / (b * b);
    FunctionSpec::Polynomial(vec![p0, m0, c2, c3])
}

/// The reference dataset used across the end-to-end checks.
///
/// Chosen so that every existence hypothesis passes and so that the
/// Volterra system is exactly consistent with the trace relations at the
/// initial instant: D = 1 aligns the jump prefactor with the layer
/// normalization, and the initial slope of u0 solves
/// V0'(C1) = V0^2/D - 2 beta^2 V0 / (f0 - D beta),
/// making the phi2 equation's t -> 0 limit reproduce F'(C1).
pub fn certified_dataset(sigma_request: f64) -> ProblemData {
    let beta = 0.3;
    let f0 = 0.46;
    let d = 1.0;
    let b = 0.125;
    let c1 = 0.09;
    let v0 = f0 - beta;
    let v0_slope = v0 * v0 / d - 2.0 * beta * beta * v0 / (f0 - d * beta);
    let m0 = v0_slope / f0;
    let u0 = hermite_profile(b, f0, m0, beta, -0.5);
    ProblemData::new(
        d,
        beta,
        b,
        c1,
        u0,
        FunctionSpec::constant(f0),
        sigma_request,
    )
    .unwrap()
}
