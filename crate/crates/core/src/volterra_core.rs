//! The boundary-integral core: free-boundary curves, the five-term
//! representation of the heat field w, the chi map of the Volterra system
//! for the boundary flux densities, and the inner Picard solver.
//!
//! Jump bookkeeping: the chi map's diagonal jump contributions are already
//! extracted analytically into the prefactors 2/(2-D) and 2f/(2f - D beta);
//! the remaining self-curve integrals are principal-value-free one-sided
//! limits of inverse-sqrt class. Field evaluation on the lower curve adds
//! the dipole's interior-limit jump h(t)/2 explicitly.

use crate::data_model::{InitialProfiles, ProblemData};
use crate::error::{FbError, Result};
use crate::grid::{FieldFunction, GridFunction, GridSpec, Interp, Slice};
use crate::kernels;
use crate::quadrature::{
    cumulative_integral, integrate_pwlinear_gaussian, integrate_volterra_kernel, GaussianTerm,
    SingularityClass,
};
use rayon::prelude::*;

/// The boundary flux densities phi1 = w_y(y1(t), t) and phi2 = w_y(y0(t), t).
#[derive(Debug, Clone)]
pub struct Densities {
    pub phi1: GridFunction,
    pub phi2: GridFunction,
}

impl Densities {
    pub fn zero(grid: GridSpec) -> Self {
        Self {
            phi1: GridFunction::constant(grid, 0.0),
            phi2: GridFunction::constant(grid, 0.0),
        }
    }

    /// The norm of the contraction argument: ||phi1|| + ||phi2||.
    pub fn norm(&self) -> f64 {
        self.phi1.sup_norm() + self.phi2.sup_norm()
    }

    pub fn distance(&self, other: &Densities) -> f64 {
        self.phi1.sup_distance(&other.phi1) + self.phi2.sup_distance(&other.phi2)
    }
}

/// The Dirichlet trace h(t) = w(y0(t), t) with its attached derivative.
/// h' is carried analytically (never by differencing h samples) because it
/// enters the chi integrands directly.
#[derive(Debug, Clone)]
pub struct TraceFn {
    pub h: GridFunction,
    pub hprime: GridFunction,
}

impl TraceFn {
    pub fn new(h: GridFunction, hprime: GridFunction) -> Self {
        Self { h, hprime }
    }
}

/// The moving boundaries of the heat-equation domain.
#[derive(Debug, Clone)]
pub struct Boundaries {
    pub y0: GridFunction,
    pub y1: GridFunction,
}

/// Result of the inner Picard iteration.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub densities: Densities,
    pub boundaries: Boundaries,
    pub iterations: usize,
    /// Successive-iterate distances, one per sweep.
    pub residual_history: Vec<f64>,
}

/// Lower curve y0(t) = C1 - beta^2 int 1/f - D int (phi2/h)(1 - beta/f).
pub fn assemble_y0(
    phi2: &GridFunction,
    trace: &TraceFn,
    data: &ProblemData,
) -> Result<GridFunction> {
    let grid = phi2.grid;
    let mut integrand = Vec::with_capacity(grid.len());
    for k in 0..=grid.n {
        let t = grid.node(k);
        let h = trace.h.values[k];
        let f = data.f.eval(t);
        // the flux ratio phi2/h only enters where the flux is nonzero, so
        // the all-zero degenerate problem stays admissible
        let ratio = if phi2.values[k] == 0.0 {
            0.0
        } else if h <= 0.0 {
            return Err(FbError::InvalidTrace(format!(
                "h(t) = {h} at node {k}; the trace must stay positive"
            )));
        } else {
            phi2.values[k] / h
        };
        integrand.push(data.beta * data.beta / f + data.d * ratio * (1.0 - data.beta / f));
    }
    let cum = cumulative_integral(&GridFunction::new(
        grid,
        integrand,
        Interp::PiecewiseLinear,
    )?);
    GridFunction::new(
        grid,
        cum.values.iter().map(|&v| data.c1 - v).collect(),
        Interp::PiecewiseLinear,
    )
}

/// Upper curve y1(t) = C2 + (1 - beta) t + (D (beta+1)/beta^2) ln(1 - int phi1).
pub fn assemble_y1(phi1: &GridFunction, data: &ProblemData, c2: f64) -> Result<GridFunction> {
    let grid = phi1.grid;
    let cum = cumulative_integral(phi1);
    let coef = data.d * (data.beta + 1.0) / (data.beta * data.beta);
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..=grid.n {
        let arg = 1.0 - cum.values[k];
        if arg <= 0.0 {
            return Err(FbError::HorizonExceeded {
                what: format!("int phi1 reached 1 (log argument {arg})"),
                index: k,
            });
        }
        values.push(c2 + (1.0 - data.beta) * grid.node(k) + coef * arg.ln());
    }
    GridFunction::new(grid, values, Interp::PiecewiseLinear)
}

/// Which value eval_w returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalDeriv {
    Value,
    /// d/dy; valid strictly inside the domain.
    DY,
}

/// Shared evaluation state for the representation of w: the density
/// products are sampled once so repeated field evaluations stay cheap.
pub(crate) struct WEvaluator<'a> {
    data: &'a ProblemData,
    profiles: &'a InitialProfiles,
    boundaries: &'a Boundaries,
    phi1: &'a GridFunction,
    h_over_f: GridFunction,
    phi2_over_f: GridFunction,
    h: &'a GridFunction,
}

impl<'a> WEvaluator<'a> {
    pub(crate) fn new(
        densities: &'a Densities,
        trace: &'a TraceFn,
        boundaries: &'a Boundaries,
        profiles: &'a InitialProfiles,
        data: &'a ProblemData,
    ) -> Self {
        let grid = densities.phi1.grid;
        let ratio = |num: &GridFunction| {
            let values = (0..=grid.n)
                .map(|k| num.values[k] / data.f.eval(grid.node(k)))
                .collect();
            GridFunction {
                grid,
                values,
                interp: Interp::PiecewiseLinear,
            }
        };
        Self {
            data,
            profiles,
            boundaries,
            phi1: &densities.phi1,
            h_over_f: ratio(&trace.h),
            phi2_over_f: ratio(&densities.phi2),
            h: &trace.h,
        }
    }

    fn spatial_term(&self, y: f64, t: f64, deriv: EvalDeriv) -> f64 {
        let d = self.data.d;
        let fi = &self.profiles.f_init;
        let nodes: Vec<f64> = fi.grid.nodes().collect();
        match deriv {
            EvalDeriv::Value => integrate_pwlinear_gaussian(
                &nodes,
                &fi.values,
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
            ),
            EvalDeriv::DY => {
                let c = 1.0 / (2.0 * d * t);
                integrate_pwlinear_gaussian(
                    &nodes,
                    &fi.values,
                    d,
                    t,
                    &[
                        GaussianTerm {
                            center: y,
                            coef: c,
                            first_moment: true,
                        },
                        GaussianTerm {
                            center: -y,
                            coef: c,
                            first_moment: true,
                        },
                    ],
                )
            }
        }
    }

    /// w(y, t_k) with the interior-limit convention on the curves.
    pub(crate) fn value(&self, y: f64, k: usize) -> Result<f64> {
        let grid = self.phi1.grid;
        let t = grid.node(k);
        let (y0t, y1t) = (self.boundaries.y0.values[k], self.boundaries.y1.values[k]);
        let span_tol = 1e-9 * (1.0 + y1t.abs().max(y0t.abs()));
        if y < y0t - span_tol || y > y1t + span_tol {
            return Err(FbError::OutOfDomain {
                y,
                t,
                lo: y0t,
                hi: y1t,
            });
        }
        if k == 0 {
            // t -> 0 limit: the kernel collapses onto the initial datum
            return Ok(self.profiles.f_init.eval(y));
        }
        let d = self.data.d;
        let beta = self.data.beta;
        let on_y1 = (y - y1t).abs() <= span_tol;
        let on_y0 = (y - y0t).abs() <= span_tol;
        let y0c = &self.boundaries.y0;
        let y1c = &self.boundaries.y1;

        let mut acc = self.spatial_term(y, t, EvalDeriv::Value);
        let class = |on: bool| {
            if on {
                SingularityClass::InverseSqrt
            } else {
                SingularityClass::Bounded
            }
        };

        acc += d * integrate_volterra_kernel(
            self.phi1,
            |tau| kernels::g_value(y, t, y1c.eval(tau), tau, d),
            class(on_y1),
            k,
        )?;
        acc += beta
            * beta
            * integrate_volterra_kernel(
                &self.h_over_f,
                |tau| kernels::g_value(y, t, y0c.eval(tau), tau, d),
                class(on_y0),
                k,
            )?;
        acc -= d
            * beta
            * integrate_volterra_kernel(
                &self.phi2_over_f,
                |tau| kernels::g_value(y, t, y0c.eval(tau), tau, d),
                class(on_y0),
                k,
            )?;
        acc -= d * integrate_volterra_kernel(
            self.h,
            |tau| kernels::n_dfield(y, t, y0c.eval(tau), tau, d),
            class(on_y0),
            k,
        )?;
        if on_y0 {
            // interior limit of the dipole layer jumps by h(t)/2 from above
            acc += 0.5 * self.h.values[k];
        }
        Ok(acc)
    }

    /// w_y(y, t_k), strictly inside the domain.
    pub(crate) fn d_y(&self, y: f64, k: usize) -> Result<f64> {
        let grid = self.phi1.grid;
        let t = grid.node(k);
        let (y0t, y1t) = (self.boundaries.y0.values[k], self.boundaries.y1.values[k]);
        let span_tol = 1e-9 * (1.0 + y1t.abs().max(y0t.abs()));
        if (y - y1t).abs() <= span_tol || (y - y0t).abs() <= span_tol {
            return Err(FbError::InvalidArgument(
                "d/dy of the representation is one-sided on the curves; evaluate inside".into(),
            ));
        }
        if y < y0t || y > y1t {
            return Err(FbError::OutOfDomain {
                y,
                t,
                lo: y0t,
                hi: y1t,
            });
        }
        if k == 0 {
            return Ok(self.profiles.f_init_prime.eval(y));
        }
        let d = self.data.d;
        let beta = self.data.beta;
        let y0c = &self.boundaries.y0;
        let y1c = &self.boundaries.y1;

        let mut acc = self.spatial_term(y, t, EvalDeriv::DY);
        acc += d * integrate_volterra_kernel(
            self.phi1,
            |tau| kernels::g_dfield(y, t, y1c.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        acc += beta
            * beta
            * integrate_volterra_kernel(
                &self.h_over_f,
                |tau| kernels::g_dfield(y, t, y0c.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
        acc -= d
            * beta
            * integrate_volterra_kernel(
                &self.phi2_over_f,
                |tau| kernels::g_dfield(y, t, y0c.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
        acc -= d * integrate_volterra_kernel(
            self.h,
            |tau| kernels::n_d2field(y, t, y0c.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        Ok(acc)
    }
}

/// The five-term boundary-integral representation of w at (y, t), t on the
/// grid. `deriv = DY` differentiates the kernels analytically and is valid
/// strictly inside the domain.
#[allow(clippy::too_many_arguments)]
pub fn eval_w(
    y: f64,
    t: f64,
    densities: &Densities,
    trace: &TraceFn,
    boundaries: &Boundaries,
    profiles: &InitialProfiles,
    data: &ProblemData,
    deriv: EvalDeriv,
) -> Result<f64> {
    let k = densities.phi1.grid.index_of(t)?;
    let ev = WEvaluator::new(densities, trace, boundaries, profiles, data);
    match deriv {
        EvalDeriv::Value => ev.value(y, k),
        EvalDeriv::DY => ev.d_y(y, k),
    }
}

/// One application of the chi map: the right-hand sides of the Volterra
/// system evaluated on the curves induced by the given densities.
#[allow(clippy::too_many_arguments)]
pub fn chi_map(
    phi1: &GridFunction,
    phi2: &GridFunction,
    trace: &TraceFn,
    boundaries: &Boundaries,
    profiles: &InitialProfiles,
    data: &ProblemData,
    grid: &GridSpec,
) -> Result<(GridFunction, GridFunction)> {
    let d = data.d;
    let beta = data.beta;
    if !(0.0 < d && d < 2.0) {
        return Err(FbError::InvalidData(format!(
            "the jump prefactor needs 0 < D < 2, got D = {d}"
        )));
    }
    let fp = &profiles.f_init_prime;
    let fp_nodes: Vec<f64> = fp.grid.nodes().collect();
    let (c1, c2) = (profiles.y.start, profiles.y.end());

    let h_over_f = |k: usize| trace.h.values[k] / data.f.eval(grid.node(k));
    let ratio_grid = |num: &GridFunction| {
        let values = (0..=grid.n)
            .map(|k| num.values[k] / data.f.eval(grid.node(k)))
            .collect();
        GridFunction {
            grid: *grid,
            values,
            interp: Interp::PiecewiseLinear,
        }
    };
    let h_over_f_grid = ratio_grid(&trace.h);
    let phi2_over_f_grid = ratio_grid(phi2);

    let mut chi1 = Vec::with_capacity(grid.len());
    let mut chi2 = Vec::with_capacity(grid.len());
    for k in 0..=grid.n {
        let t = grid.node(k);
        let f = data.f.eval(t);
        if 2.0 * f <= d * beta {
            return Err(FbError::InvalidData(format!(
                "prefactor needs 2 f(t) > D beta, got f({t}) = {f}"
            )));
        }
        let (y0t, y1t) = (boundaries.y0.values[k], boundaries.y1.values[k]);
        let y0c = &boundaries.y0;
        let y1c = &boundaries.y1;

        let (sp1, sp0) = if k == 0 {
            // one-sided limit of the initial-layer integral: the kernel
            // collapses onto half the endpoint density
            (0.5 * fp.values[fp.grid.n], 0.5 * fp.values[0])
        } else {
            let spatial = |yb: f64| {
                integrate_pwlinear_gaussian(
                    &fp_nodes,
                    &fp.values,
                    d,
                    t,
                    &[
                        GaussianTerm {
                            center: yb,
                            coef: 1.0,
                            first_moment: false,
                        },
                        GaussianTerm {
                            center: -yb,
                            coef: 1.0,
                            first_moment: false,
                        },
                    ],
                )
            };
            (spatial(y1t), spatial(y0t))
        };
        let _ = (c1, c2);

        // chi1: field point on the upper curve
        let mut acc1 = sp1;
        acc1 += d * integrate_volterra_kernel(
            phi1,
            |tau| kernels::g_dfield(y1t, t, y1c.eval(tau), tau, d),
            SingularityClass::InverseSqrt,
            k,
        )?;
        acc1 += beta
            * beta
            * integrate_volterra_kernel(
                &h_over_f_grid,
                |tau| kernels::g_dfield(y1t, t, y0c.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
        acc1 -= d
            * beta
            * integrate_volterra_kernel(
                &phi2_over_f_grid,
                |tau| kernels::g_dfield(y1t, t, y0c.eval(tau), tau, d),
                SingularityClass::Bounded,
                k,
            )?;
        acc1 -= integrate_volterra_kernel(
            &trace.hprime,
            |tau| kernels::n_value(y1t, t, y0c.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        chi1.push(2.0 / (2.0 - d) * acc1);

        // chi2: field point on the lower curve
        let mut acc2 = -beta * beta * h_over_f(k) + sp0;
        acc2 += d * integrate_volterra_kernel(
            phi1,
            |tau| kernels::g_dfield(y0t, t, y1c.eval(tau), tau, d),
            SingularityClass::Bounded,
            k,
        )?;
        acc2 += beta
            * beta
            * integrate_volterra_kernel(
                &h_over_f_grid,
                |tau| kernels::g_dfield(y0t, t, y0c.eval(tau), tau, d),
                SingularityClass::InverseSqrt,
                k,
            )?;
        acc2 -= d
            * beta
            * integrate_volterra_kernel(
                &phi2_over_f_grid,
                |tau| kernels::g_dfield(y0t, t, y0c.eval(tau), tau, d),
                SingularityClass::InverseSqrt,
                k,
            )?;
        acc2 -= integrate_volterra_kernel(
            &trace.hprime,
            |tau| kernels::n_value(y0t, t, y0c.eval(tau), tau, d),
            SingularityClass::InverseSqrt,
            k,
        )?;
        chi2.push(2.0 * f / (2.0 * f - d * beta) * acc2);
    }

    Ok((
        GridFunction::new(*grid, chi1, Interp::PiecewiseLinear)?,
        GridFunction::new(*grid, chi2, Interp::PiecewiseLinear)?,
    ))
}

/// Assemble both curves from the current densities.
pub fn assemble_boundaries(
    densities: &Densities,
    trace: &TraceFn,
    data: &ProblemData,
    c2: f64,
) -> Result<Boundaries> {
    Ok(Boundaries {
        y0: assemble_y0(&densities.phi2, trace, data)?,
        y1: assemble_y1(&densities.phi1, data, c2)?,
    })
}

/// Inner Picard iteration for (phi1, phi2) at fixed trace h: iterate
/// phi <- chi(phi) from (0, 0), reassembling both curves every sweep,
/// until successive iterates are closer than `picard_tol` in the
/// ||phi1|| + ||phi2|| norm.
pub fn picard_solve(
    trace: &TraceFn,
    profiles: &InitialProfiles,
    data: &ProblemData,
    grid: &GridSpec,
    picard_tol: f64,
    max_iter: usize,
) -> Result<InnerSolution> {
    picard_solve_from(
        &Densities::zero(*grid),
        trace,
        profiles,
        data,
        grid,
        picard_tol,
        max_iter,
    )
}

/// Same iteration from an explicit starting point (the fixed point is
/// unique inside the contraction ball, so this is used for testing).
pub fn picard_solve_from(
    start: &Densities,
    trace: &TraceFn,
    profiles: &InitialProfiles,
    data: &ProblemData,
    grid: &GridSpec,
    picard_tol: f64,
    max_iter: usize,
) -> Result<InnerSolution> {
    let c2 = profiles.y.end();
    let mut densities = start.clone();
    let mut history = Vec::new();
    for iter in 1..=max_iter {
        let boundaries = assemble_boundaries(&densities, trace, data, c2)?;
        let (chi1, chi2) = chi_map(
            &densities.phi1,
            &densities.phi2,
            trace,
            &boundaries,
            profiles,
            data,
            grid,
        )?;
        let next = Densities {
            phi1: chi1,
            phi2: chi2,
        };
        let residual = next.distance(&densities);
        history.push(residual);
        densities = next;
        if residual <= picard_tol {
            let boundaries = assemble_boundaries(&densities, trace, data, c2)?;
            return Ok(InnerSolution {
                densities,
                boundaries,
                iterations: iter,
                residual_history: history,
            });
        }
    }
    Err(FbError::NonConvergence {
        what: "inner Picard iteration".into(),
        iterations: max_iter,
        last: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Sample the representation of w on per-slice uniform grids between the
/// curves. The t = 0 slice carries the initial datum, the curve endpoints
/// carry their boundary values (0 above, h below) by construction.
pub fn assemble_w_field(
    densities: &Densities,
    trace: &TraceFn,
    boundaries: &Boundaries,
    profiles: &InitialProfiles,
    data: &ProblemData,
    n_space: usize,
) -> Result<FieldFunction> {
    let grid = densities.phi1.grid;
    let ev = WEvaluator::new(densities, trace, boundaries, profiles, data);
    let slices: Vec<Result<Slice>> = (0..=grid.n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (boundaries.y0.values[k], boundaries.y1.values[k]);
            let h = (b - a) / n_space as f64;
            let nodes: Vec<f64> = (0..=n_space).map(|j| a + h * j as f64).collect();
            let mut values = Vec::with_capacity(n_space + 1);
            for (j, &y) in nodes.iter().enumerate() {
                let v = if k == 0 {
                    profiles.f_init.eval(y)
                } else if j == 0 {
                    trace.h.values[k]
                } else if j == n_space {
                    0.0
                } else {
                    ev.value(y, k)?
                };
                values.push(v);
            }
            Ok(Slice { nodes, values })
        })
        .collect();
    let slices = slices.into_iter().collect::<Result<Vec<_>>>()?;
    FieldFunction::new(grid, slices)
}
