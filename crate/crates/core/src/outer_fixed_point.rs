//! The outer fixed point for the Dirichlet trace h: the compact convex set
//! Pi, the map Z(h) = w_h(y0h(t), t) evaluated through its integral
//! formula, and a damped Picard iteration realizing the existence argument
//! constructively.
//!
//! The existence theory only guarantees a fixed point (not contraction), so
//! the iteration's convergence is monitored, never assumed; non-convergence
//! is a structured result.

use crate::certificate::Certificate;
use crate::data_model::{InitialProfiles, ProblemData};
use crate::error::{FbError, Result};
use crate::grid::{FieldFunction, GridFunction, GridSpec, Interp};
use crate::kernels;
use crate::quadrature::{
    cumulative_integral, gauss, integrate_volterra_kernel, SingularityClass, GAUSS_8,
};
use crate::volterra_core::{
    assemble_w_field, picard_solve, Boundaries, Densities, InnerSolution, TraceFn,
};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

/// The defining bounds of the set Pi(H, R, S, sigma).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PiSpec {
    /// Lower bound H > 0 on h.
    pub h_floor: f64,
    /// Sup-norm bound R.
    pub r: f64,
    /// Derivative bound S.
    pub s: f64,
    pub sigma: f64,
}

impl PiSpec {
    pub fn new(h_floor: f64, r: f64, s: f64, sigma: f64) -> Result<Self> {
        if !(0.0 < h_floor && h_floor <= r && s >= 0.0 && sigma > 0.0 && sigma <= 1.0) {
            return Err(FbError::InvalidArgument(format!(
                "Pi bounds need 0 < H <= R, S >= 0, 0 < sigma <= 1; got H={h_floor}, R={r}, S={s}, sigma={sigma}"
            )));
        }
        Ok(Self {
            h_floor,
            r,
            s,
            sigma,
        })
    }

    /// The certificate's (H, R, S) at its admissible horizon.
    pub fn from_certificate(cert: &Certificate) -> Result<Self> {
        Self::new(
            cert.h,
            cert.r,
            cert.s,
            cert.sigma_max.min(1.0).max(f64::MIN_POSITIVE),
        )
    }
}

/// One violated Pi bound at one grid node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiViolation {
    pub node: usize,
    pub bound: String,
    pub value: f64,
    pub limit: f64,
}

/// Membership report for a trace against a Pi specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiReport {
    pub member: bool,
    pub violations: Vec<PiViolation>,
}

/// Check h >= H, ||h|| <= R and ||h'|| <= S node by node.
pub fn pi_membership(trace: &crate::volterra_core::TraceFn, pi: &PiSpec) -> PiReport {
    let mut violations = Vec::new();
    for k in 0..trace.h.len() {
        let h = trace.h.values[k];
        if h < pi.h_floor {
            violations.push(PiViolation {
                node: k,
                bound: "h >= H".into(),
                value: h,
                limit: pi.h_floor,
            });
        }
        if h.abs() > pi.r {
            violations.push(PiViolation {
                node: k,
                bound: "|h| <= R".into(),
                value: h,
                limit: pi.r,
            });
        }
        let hp = trace.hprime.values[k];
        if hp.abs() > pi.s {
            violations.push(PiViolation {
                node: k,
                bound: "|h'| <= S".into(),
                value: hp,
                limit: pi.s,
            });
        }
    }
    PiReport {
        member: violations.is_empty(),
        violations,
    }
}

/// Solver tolerances and budgets shared by the nested iterations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverParams {
    pub picard_tol: f64,
    pub outer_tol: f64,
    pub max_iter: usize,
    pub max_outer: usize,
    /// Damping of the outer update; 1 is plain Picard on Z.
    pub relaxation: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            picard_tol: 1e-10,
            outer_tol: 1e-8,
            max_iter: 200,
            max_outer: 100,
            relaxation: 1.0,
        }
    }
}

/// The result of one Z evaluation.
#[derive(Debug, Clone)]
pub struct ZResult {
    pub trace: TraceFn,
    pub inner: InnerSolution,
}

/// Integral of the Green function over the slice [a, b] in its field
/// argument, for a source at (c, tau): closed erf form.
fn green_slice_integral(a: f64, b: f64, c: f64, d: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let sd = (4.0 * d * s).sqrt();
    let window = |center: f64| 0.5 * (erf((b - center) / sd) - erf((a - center) / sd));
    window(c) - window(-c)
}

/// Z(h)(t) = (f - beta)(1 - int phi1 + (1/D) int_{y0}^{y1} w), the slice
/// integral of w taken with the spatial kernel integrals in closed form.
/// The attached derivative is the analytic expression obtained by
/// differentiating the formula along the heat flow.
pub fn z_map(
    trace: &TraceFn,
    data: &ProblemData,
    profiles: &InitialProfiles,
    grid: &GridSpec,
    params: &SolverParams,
) -> Result<ZResult> {
    let inner = picard_solve(
        trace,
        profiles,
        data,
        grid,
        params.picard_tol,
        params.max_iter,
    )?;
    let z = z_of_inner(trace, &inner, data, profiles, grid)?;
    Ok(ZResult { trace: z, inner })
}

/// The Z formula for an already-computed inner solution.
fn z_of_inner(
    trace: &TraceFn,
    inner: &InnerSolution,
    data: &ProblemData,
    profiles: &InitialProfiles,
    grid: &GridSpec,
) -> Result<TraceFn> {
    let d = data.d;
    let beta = data.beta;
    let cum_phi1 = cumulative_integral(&inner.densities.phi1);
    let y0c = &inner.boundaries.y0;
    let y1c = &inner.boundaries.y1;

    let ratio = |num: &GridFunction| {
        let values = (0..=grid.n)
            .map(|k| num.values[k] / data.f.eval(grid.node(k)))
            .collect();
        GridFunction {
            grid: *grid,
            values,
            interp: Interp::PiecewiseLinear,
        }
    };
    let h_over_f = ratio(&trace.h);
    let phi2_over_f = ratio(&inner.densities.phi2);

    let fi = &profiles.f_init;
    let mut h_new = Vec::with_capacity(grid.len());
    let mut hp_new = Vec::with_capacity(grid.len());
    for k in 0..=grid.n {
        let t = grid.node(k);
        let f = data.f.eval(t);
        let (a, b) = (y0c.values[k], y1c.values[k]);

        let iw = if k == 0 {
            crate::quadrature::integrate_smooth(fi, fi.grid.start, fi.grid.end())?
        } else {
            // initial-datum term: integrate F against the erf window of G
            let mut acc = 0.0;
            for j in 0..fi.grid.n {
                let (x1, x2) = (fi.grid.node(j), fi.grid.node(j + 1));
                acc += gauss(&GAUSS_8, x1, x2, |zeta| {
                    fi.eval(zeta) * green_slice_integral(a, b, zeta, d, t)
                });
            }
            // moving-curve layers with the field integral in closed form
            acc += d * integrate_volterra_kernel(
                &inner.densities.phi1,
                |tau| green_slice_integral(a, b, y1c.eval(tau), d, t - tau),
                SingularityClass::Bounded,
                k,
            )?;
            acc += beta
                * beta
                * integrate_volterra_kernel(
                    &h_over_f,
                    |tau| green_slice_integral(a, b, y0c.eval(tau), d, t - tau),
                    SingularityClass::Bounded,
                    k,
                )?;
            acc -= d
                * beta
                * integrate_volterra_kernel(
                    &phi2_over_f,
                    |tau| green_slice_integral(a, b, y0c.eval(tau), d, t - tau),
                    SingularityClass::Bounded,
                    k,
                )?;
            // dipole term: int_a^b N_y dxi = N(b) - N(a); the lower-curve
            // piece carries the inverse-sqrt diagonal
            acc -= d * integrate_volterra_kernel(
                &trace.h,
                |tau| kernels::n_value(b, t, y0c.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            acc += d * integrate_volterra_kernel(
                &trace.h,
                |tau| kernels::n_value(a, t, y0c.eval(tau), tau, d),
                SingularityClass::InverseSqrt,
                k,
            )?;
            acc
        };

        let z = (f - beta) * (1.0 - cum_phi1.values[k] + iw / d);
        h_new.push(z);

        // analytic derivative from the trace relation along the heat flow
        let fp = data.f.derivative(t);
        let phi2k = inner.densities.phi2.values[k];
        let h_in = trace.h.values[k];
        let zp = fp * z / (f - beta)
            + (f - beta)
                * (z * beta * beta / (d * f)
                    + phi2k
                        * (if h_in != 0.0 { z / h_in } else { 0.0 } - 1.0 - z * beta / (d * f)));
        hp_new.push(zp);
    }

    Ok(TraceFn::new(
        GridFunction::new(*grid, h_new, Interp::PiecewiseLinear)?,
        GridFunction::new(*grid, hp_new, Interp::PiecewiseLinear)?,
    ))
}

/// The converged solution of the coupled system: densities, trace, curves,
/// C(t), the sampled heat field, and the iteration diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub densities: Densities,
    pub trace: TraceFn,
    pub boundaries: Boundaries,
    /// C(t) = 1 - int_0^t phi1.
    pub c_of_t: GridFunction,
    pub w: FieldFunction,
    pub outer_residuals: Vec<f64>,
    pub inner_iterations: Vec<usize>,
    /// Pi membership of every outer iterate, when a specification is given.
    pub pi_reports: Vec<PiReport>,
    pub outer_iterations: usize,
}

/// Outer iteration h <- (1 - theta) h + theta Z(h) from h0 = f - beta,
/// stopping when ||Z(h) - h|| <= outer_tol. Pi membership of each iterate
/// is recorded (a warning, not a failure, for uncertified data).
pub fn solve_outer(
    data: &ProblemData,
    profiles: &InitialProfiles,
    grid: &GridSpec,
    n_space: usize,
    params: &SolverParams,
    pi: Option<&PiSpec>,
) -> Result<SolutionBundle> {
    let mut trace = TraceFn::new(
        GridFunction::from_fn(*grid, |t| data.f.eval(t) - data.beta),
        GridFunction::from_fn(*grid, |t| data.f.derivative(t)),
    );
    let mut residuals = Vec::new();
    let mut inner_iterations = Vec::new();
    let mut pi_reports = Vec::new();

    for iter in 1..=params.max_outer {
        let z = z_map(&trace, data, profiles, grid, params)?;
        let residual = z.trace.h.sup_distance(&trace.h);
        residuals.push(residual);
        inner_iterations.push(z.inner.iterations);
        if let Some(pi) = pi {
            pi_reports.push(pi_membership(&z.trace, pi));
        }
        if residual <= params.outer_tol {
            let w = assemble_w_field(
                &z.inner.densities,
                &trace,
                &z.inner.boundaries,
                profiles,
                data,
                n_space,
            )?;
            let cum = cumulative_integral(&z.inner.densities.phi1);
            let c_of_t = GridFunction::new(
                *grid,
                cum.values.iter().map(|&v| 1.0 - v).collect(),
                Interp::PiecewiseLinear,
            )?;
            return Ok(SolutionBundle {
                densities: z.inner.densities,
                trace,
                boundaries: z.inner.boundaries,
                c_of_t,
                w,
                outer_residuals: residuals,
                inner_iterations,
                pi_reports,
                outer_iterations: iter,
            });
        }
        let theta = params.relaxation;
        let mix = |old: &GridFunction, new: &GridFunction| {
            let values = old
                .values
                .iter()
                .zip(&new.values)
                .map(|(&a, &b)| (1.0 - theta) * a + theta * b)
                .collect();
            GridFunction {
                grid: *grid,
                values,
                interp: Interp::PiecewiseLinear,
            }
        };
        trace = TraceFn::new(
            mix(&trace.h, &z.trace.h),
            mix(&trace.hprime, &z.trace.hprime),
        );
    }

    let pi_note = match pi_reports.last() {
        Some(r) if !r.member => format!(
            " (last iterate violates Pi at {} nodes)",
            r.violations.len()
        ),
        Some(_) => " (last iterate inside Pi)".to_string(),
        None => String::new(),
    };
    Err(FbError::NonConvergence {
        what: format!("outer trace iteration{pi_note}"),
        iterations: params.max_outer,
        last: residuals.last().copied().unwrap_or(f64::NAN),
        history: residuals,
    })
}
