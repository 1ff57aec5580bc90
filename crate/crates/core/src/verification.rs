//! Everything checkable about a solve: PDE and boundary residuals in every
//! frame, Green-identity representation tests against manufactured heat
//! solutions, and numerical jump-relation checks.
//!
//! Jump sign convention, fixed by the static-curve closed form: for the
//! single layer u(y, t) = int_0^t psi(tau) K(y, t; c, tau) dtau on the
//! static curve y = c with psi = 1,
//!     u_y(y, t) = -sign(y - c) / (2D) * erfc(|y - c| / (2 sqrt(D t))),
//! so the one-sided limits of the derivative are -psi/(2D) from above and
//! +psi/(2D) from below, each plus the convergent on-curve integral.

use crate::data_model::{InitialProfiles, ProblemData};
use crate::error::{FbError, Result};
use crate::grid::{FieldFunction, GridFunction, GridSpec};
use crate::kernels;
use crate::outer_fixed_point::SolutionBundle;
use crate::quadrature::{
    integrate_pwlinear_gaussian, integrate_volterra_kernel, GaussianTerm, SingularityClass,
};
use crate::reconstruction::ParametricSolution;
use crate::volterra_core::WEvaluator;
use serde::{Deserialize, Serialize};

/// A residual in sup and discrete-L2 (root mean square) norm.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Norm {
    pub sup: f64,
    pub l2: f64,
    pub points: usize,
}

impl Norm {
    fn from_samples(samples: &[f64]) -> Self {
        let sup = samples.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let l2 = if samples.is_empty() {
            0.0
        } else {
            (samples.iter().map(|r| r * r).sum::<f64>() / samples.len() as f64).sqrt()
        };
        Norm {
            sup,
            l2,
            points: samples.len(),
        }
    }
}

/// Residual norms of a converged run, all frames.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    /// w_t - D w_yy on interior nodes of the heat field.
    pub heat_w: Norm,
    /// u_t - u^2 (D u_xx - u_x) on the parametric interior.
    pub u_pde: Norm,
    /// |w(y1(t), t)| evaluated through the representation.
    pub dirichlet_top: Norm,
    /// |w(y0(t), t) - h(t)|, the trace relation.
    pub trace_mismatch: Norm,
    /// |u(0, t) - f(t)|.
    pub face_value: Norm,
    /// |u(s(t), t) - beta|.
    pub front_value: Norm,
    /// |D u_x(s, t) - u(s, t) + s'(t)| with s' by differencing.
    pub stefan: Norm,
    pub n_time: usize,
    pub n_space: usize,
    pub sigma: f64,
    /// Set when a stencil had too few interior nodes to evaluate.
    pub partial: bool,
}

/// Which equation a field is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeKind {
    Heat,
    Burgers,
    DiffusionConvection,
}

fn nonuniform_first(xm: f64, x0: f64, xp: f64, fm: f64, f0: f64, fp: f64) -> f64 {
    fm * (x0 - xp) / ((xm - x0) * (xm - xp))
        + f0 * (2.0 * x0 - xm - xp) / ((x0 - xm) * (x0 - xp))
        + fp * (x0 - xm) / ((xp - xm) * (xp - x0))
}

fn nonuniform_second(xm: f64, x0: f64, xp: f64, fm: f64, f0: f64, fp: f64) -> f64 {
    2.0 * (fm / ((xm - x0) * (xm - xp))
        + f0 / ((x0 - xm) * (x0 - xp))
        + fp / ((xp - xm) * (xp - x0)))
}

/// Finite-difference PDE residual of a field on a moving domain: central in
/// time with monotone-cubic cross-slice sampling, three-point stencils in
/// space. Points whose time neighbors do not cover them are skipped.
pub fn field_pde_residual(field: &FieldFunction, d: f64, kind: PdeKind) -> Norm {
    let n = field.times.n;
    let dt = field.times.step;
    let mut samples = Vec::new();
    for k in 1..n {
        let (prev, cur, next) = (&field.slices[k - 1], &field.slices[k], &field.slices[k + 1]);
        let m = cur.nodes.len();
        for j in 1..m - 1 {
            let y = cur.nodes[j];
            let margin_p = (prev.hi() - prev.lo()) / (m - 1) as f64;
            let margin_n = (next.hi() - next.lo()) / (m - 1) as f64;
            if y < prev.lo() + margin_p
                || y > prev.hi() - margin_p
                || y < next.lo() + margin_n
                || y > next.hi() - margin_n
            {
                continue;
            }
            let wt = (next.eval_cubic(y) - prev.eval_cubic(y)) / (2.0 * dt);
            let (xm, x0, xp) = (cur.nodes[j - 1], cur.nodes[j], cur.nodes[j + 1]);
            let (fm, f0, fp) = (cur.values[j - 1], cur.values[j], cur.values[j + 1]);
            let wy = nonuniform_first(xm, x0, xp, fm, f0, fp);
            let wyy = nonuniform_second(xm, x0, xp, fm, f0, fp);
            let r = match kind {
                PdeKind::Heat => wt - d * wyy,
                PdeKind::Burgers => wt - d * wyy + 2.0 * f0 * wy,
                PdeKind::DiffusionConvection => wt - f0 * f0 * (d * wyy - wy),
            };
            samples.push(r);
        }
    }
    Norm::from_samples(&samples)
}

/// Derivative of grid samples: second-order central with one-sided closures.
pub(crate) fn differentiate_samples(g: &GridFunction) -> Vec<f64> {
    let n = g.grid.n;
    let h = g.grid.step;
    let v = &g.values;
    let mut out = Vec::with_capacity(n + 1);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    for k in 1..n {
        out.push((v[k + 1] - v[k - 1]) / (2.0 * h));
    }
    out.push((3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h));
    out
}

/// All residuals of a converged bundle and its reconstruction.
pub fn residual_suite(
    bundle: &SolutionBundle,
    parametric: &ParametricSolution,
    data: &ProblemData,
    profiles: &InitialProfiles,
) -> Result<ResidualReport> {
    let grid = bundle.densities.phi1.grid;
    let n = grid.n;
    let n_space = bundle.w.slices[0].nodes.len() - 1;
    let mut partial = n < 4 || n_space < 4;

    let heat_w = field_pde_residual(&bundle.w, data.d, PdeKind::Heat);
    if heat_w.points == 0 {
        partial = true;
    }

    // parametric field as (x, u) slices for the physical-frame residual
    let u_field = FieldFunction::new(
        parametric.times,
        parametric
            .x
            .iter()
            .zip(&parametric.u)
            .map(|(x, u)| crate::grid::Slice {
                nodes: x.clone(),
                values: u.clone(),
            })
            .collect(),
    )?;
    let u_pde = field_pde_residual(&u_field, data.d, PdeKind::DiffusionConvection);

    // boundary values through the representation
    let ev = WEvaluator::new(
        &bundle.densities,
        &bundle.trace,
        &bundle.boundaries,
        profiles,
        data,
    );
    let mut top = Vec::with_capacity(n);
    let mut trace_mm = Vec::with_capacity(n);
    for k in 1..=n {
        top.push(ev.value(bundle.boundaries.y1.values[k], k)?);
        trace_mm.push(ev.value(bundle.boundaries.y0.values[k], k)? - bundle.trace.h.values[k]);
    }

    let mut face = Vec::with_capacity(n + 1);
    let mut front = Vec::with_capacity(n + 1);
    for k in 0..=n {
        face.push(parametric.u[k][0] - data.f.eval(grid.node(k)));
        front.push(parametric.u[k].last().unwrap() - data.beta);
    }

    // Stefan balance with s' by differencing and u_x one-sided at the front
    let sdot = differentiate_samples(&parametric.s);
    let mut stefan = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let x = &parametric.x[k];
        let u = &parametric.u[k];
        let m = x.len();
        if m < 3 {
            partial = true;
            break;
        }
        let ux = nonuniform_first(x[m - 1], x[m - 2], x[m - 3], u[m - 1], u[m - 2], u[m - 3]);
        // reversed node order flips nothing: the formula is symmetric in
        // its interpolation nodes, evaluated at x[m-2]; shift to the front
        let ux_front = {
            let (a, b, c) = (x[m - 3], x[m - 2], x[m - 1]);
            let (fa, fb, fc) = (u[m - 3], u[m - 2], u[m - 1]);
            // derivative at c of the quadratic through the last three nodes
            fa * (c - b) / ((a - b) * (a - c))
                + fb * (c - a) / ((b - a) * (b - c))
                + fc * (2.0 * c - a - b) / ((c - a) * (c - b))
        };
        let _ = ux;
        stefan.push(data.d * ux_front - u[m - 1] + sdot[k]);
    }

    Ok(ResidualReport {
        heat_w,
        u_pde,
        dirichlet_top: Norm::from_samples(&top),
        trace_mismatch: Norm::from_samples(&trace_mm),
        face_value: Norm::from_samples(&face),
        front_value: Norm::from_samples(&front),
        stefan: Norm::from_samples(&stefan),
        n_time: n,
        n_space,
        sigma: grid.end(),
        partial,
    })
}

/// Built-in manufactured heat solutions (verified exact below).
#[derive(Debug, Clone, Copy)]
pub enum ManufacturedHeat {
    /// w = a + b y.
    Affine { a: f64, b: f64 },
    /// w = 2 D t + y^2.
    ParabolicTime { d: f64 },
}

impl ManufacturedHeat {
    pub fn w(&self, y: f64, t: f64) -> f64 {
        match *self {
            ManufacturedHeat::Affine { a, b } => a + b * y,
            ManufacturedHeat::ParabolicTime { d } => 2.0 * d * t + y * y,
        }
    }

    pub fn w_y(&self, y: f64, _t: f64) -> f64 {
        match *self {
            ManufacturedHeat::Affine { b, .. } => b,
            ManufacturedHeat::ParabolicTime { .. } => 2.0 * y,
        }
    }

    fn w_t(&self) -> f64 {
        match *self {
            ManufacturedHeat::Affine { .. } => 0.0,
            ManufacturedHeat::ParabolicTime { d } => 2.0 * d,
        }
    }

    fn w_yy(&self) -> f64 {
        match *self {
            ManufacturedHeat::Affine { .. } => 0.0,
            ManufacturedHeat::ParabolicTime { .. } => 2.0,
        }
    }

    fn check_heat_exact(&self, d: f64) -> Result<()> {
        if (self.w_t() - d * self.w_yy()).abs() > 1e-12 {
            return Err(FbError::InvalidManufactured(format!(
                "w_t - D w_yy = {} for {:?} at D = {d}",
                self.w_t() - d * self.w_yy(),
                self
            )));
        }
        Ok(())
    }
}

/// Evaluate the general Green-identity representation against a
/// manufactured heat solution on prescribed Lipschitz curves and return the
/// sup error over interior probe points.
///
/// All traces and densities are read off the manufactured solution; the
/// curve derivatives come from differencing the sampled curves (exact for
/// the straight boundaries used in the acceptance checks).
pub fn mms_representation_check(
    manufactured: &ManufacturedHeat,
    y0: &GridFunction,
    y1: &GridFunction,
    data: &ProblemData,
    n_space: usize,
) -> Result<f64> {
    manufactured.check_heat_exact(data.d)?;
    let grid = y0.grid;
    let d = data.d;

    let phi1 = GridFunction::from_fn(grid, |t| manufactured.w_y(y1.eval(t), t));
    let phi2 = GridFunction::from_fn(grid, |t| manufactured.w_y(y0.eval(t), t));
    let w_top = GridFunction::from_fn(grid, |t| manufactured.w(y1.eval(t), t));
    let w_bot = GridFunction::from_fn(grid, |t| manufactured.w(y0.eval(t), t));
    let y0p = differentiate_samples(y0);
    let y1p = differentiate_samples(y1);
    // transport bracket at the lower curve; together with the source-point
    // derivative terms below this is the form the Green identity produces,
    // and the one whose trace reduction recovers the field representation
    let mut bot_moment = w_bot.clone();
    for k in 0..=grid.n {
        bot_moment.values[k] = w_bot.values[k] * y0p[k] + d * phi2.values[k];
    }
    let mut top_moment = w_top.clone();
    for k in 0..=grid.n {
        top_moment.values[k] = w_top.values[k] * y1p[k];
    }

    // initial datum on the starting interval
    let f_grid = GridSpec::new(y0.values[0], y1.values[0], n_space)?;
    let f_init = GridFunction::from_fn(f_grid, |xi| manufactured.w(xi, 0.0));
    let f_nodes: Vec<f64> = f_grid.nodes().collect();

    let mut worst = 0.0_f64;
    for k in [grid.n / 4, grid.n / 2, (3 * grid.n) / 4, grid.n] {
        if k == 0 {
            continue;
        }
        let t = grid.node(k);
        let (a, b) = (y0.values[k], y1.values[k]);
        for frac in [0.3, 0.5, 0.7] {
            let y = a + frac * (b - a);
            let mut acc = integrate_pwlinear_gaussian(
                &f_nodes,
                &f_init.values,
                d,
                t,
                &[
                    GaussianTerm {
                        center: y,
                        coef: 1.0,
                        first_moment: false,
                    },
                    GaussianTerm {
                        center: -y,
                        coef: -1.0,
                        first_moment: false,
                    },
                ],
            );
            acc += d * integrate_volterra_kernel(
                &phi1,
                |tau| kernels::g_value(y, t, y1.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            acc -= d * integrate_volterra_kernel(
                &w_top,
                |tau| kernels::g_dsource(y, t, y1.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            acc += integrate_volterra_kernel(
                &top_moment,
                |tau| kernels::g_value(y, t, y1.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            acc -= integrate_volterra_kernel(
                &bot_moment,
                |tau| kernels::g_value(y, t, y0.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            acc += d * integrate_volterra_kernel(
                &w_bot,
                |tau| kernels::g_dsource(y, t, y0.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
            worst = worst.max((acc - manufactured.w(y, t)).abs());
        }
    }
    Ok(worst)
}

/// Which side of the curve the limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Numerical check of the single-layer derivative jump: the one-sided
/// limit of d/dy int psi K, extrapolated from offsets {4, 2, 1} eps,
/// compared against +-psi/(2D) plus the direct on-curve integral.
pub fn jump_relation_check(
    density: &GridFunction,
    curve: &GridFunction,
    side: Side,
    data: &ProblemData,
) -> Result<f64> {
    let grid = density.grid;
    let d = data.d;
    let sign = match side {
        Side::Above => -1.0,
        Side::Below => 1.0,
    };
    let eps_base = 2.0 * (d * grid.step).sqrt();
    let mut worst = 0.0_f64;
    for k in [grid.n / 2, grid.n] {
        if k < 2 {
            continue;
        }
        let t = grid.node(k);
        let yc = curve.values[k];
        let layer_slope = |y: f64| {
            integrate_volterra_kernel(
                density,
                |tau| kernels::k_dfield(y, t, curve.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )
        };
        let v4 = layer_slope(yc - sign * 4.0 * eps_base)?;
        let v2 = layer_slope(yc - sign * 2.0 * eps_base)?;
        let v1 = layer_slope(yc - sign * eps_base)?;
        if (v1 - v2).abs() > (v2 - v4).abs() * 1.5 + 1e-12 {
            return Err(FbError::NumericalFailure {
                what: "one-sided limit extrapolation is not Cauchy".into(),
                index: k,
            });
        }
        // quadratic extrapolation to eps = 0 from offsets {1, 2, 4}
        let limit = (8.0 * v1 - 6.0 * v2 + v4) / 3.0;
        let direct = integrate_volterra_kernel(
            density,
            |tau| kernels::k_dfield(yc, t, curve.eval(tau), tau, d),
            SingularityClass::InverseSqrt,
            k,
        )?;
        let target = sign * density.values[k] / (2.0 * d) + direct;
        worst = worst.max((limit - target).abs());
    }
    Ok(worst)
}

/// Numerical equivalence of the two published forms of the trace term on
/// the upper curve: -int h' N(y1(t), t; y0(tau), tau) dtau against its
/// integration-by-parts counterpart
/// -D int h N_yy + int h N_xi y0' + h(0) N(y1(t), t; y0(0), 0).
/// (The lower-curve counterpart is hypersingular and has no proper-integral
/// form, so the check is stated for the separated curves.)
pub fn hprime_equivalence_check(
    h: &GridFunction,
    hprime: &GridFunction,
    y0: &GridFunction,
    y1: &GridFunction,
    data: &ProblemData,
) -> Result<f64> {
    let grid = h.grid;
    let d = data.d;
    let y0p = differentiate_samples(y0);
    let mut moment = h.clone();
    for k in 0..=grid.n {
        moment.values[k] = h.values[k] * y0p[k];
    }
    let mut worst = 0.0_f64;
    for k in 1..=grid.n {
        let t = grid.node(k);
        let y = y1.values[k];
        let direct = -integrate_volterra_kernel(
            hprime,
            |tau| kernels::n_value(y, t, y0.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        let mut counterpart = -d
            * integrate_volterra_kernel(
                h,
                |tau| kernels::n_d2field(y, t, y0.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
        counterpart += integrate_volterra_kernel(
            &moment,
            |tau| kernels::n_dsource(y, t, y0.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        counterpart += h.values[0] * kernels::n_value(y, t, y0.values[0], 0.0, d);
        worst = worst.max((direct - counterpart).abs());
    }
    Ok(worst)
}

/// Observed convergence order from two errors at grid ratio `ratio`.
pub fn measured_order(err_coarse: f64, err_fine: f64, ratio: f64) -> f64 {
    (err_coarse / err_fine).ln() / ratio.ln()
}
