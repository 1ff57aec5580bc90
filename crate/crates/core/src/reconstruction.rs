//! Parametric reconstruction of the physical solution from the converged
//! heat-equation bundle: u(y, t) = w/Cden + beta, x(y, t) the accumulated
//! area, s(t) = x(y1(t), t).
//!
//! The published parametric formulas shift both integration limits by
//! 2 beta t; the integrand depends on the parameter only through w, so the
//! integral is carried out in the unshifted frame and the offset cancels.
//! Cden is accumulated from the upper curve downward, matching the tail
//! rule of the inverse Hopf-Cole map.

use crate::data_model::ProblemData;
use crate::error::{FbError, Result};
use crate::grid::{pchip_nonuniform, FieldFunction, GridFunction, GridSpec, Interp, Slice};
use crate::outer_fixed_point::SolutionBundle;
use serde::{Deserialize, Serialize};

/// The reconstructed solution: per-time parametric samples (y, x, u), the
/// front s(t), and a resampling of u onto uniform x grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParametricSolution {
    pub times: GridSpec,
    /// Parameter nodes per slice (the y grid of the bundle field).
    pub y: Vec<Vec<f64>>,
    /// Physical positions x(y, t).
    pub x: Vec<Vec<f64>>,
    /// Concentration u(y, t).
    pub u: Vec<Vec<f64>>,
    /// Front position s(t) = x(y1(t), t).
    pub s: GridFunction,
    /// u resampled onto a uniform x grid per slice by monotone cubic
    /// interpolation, for plotting and residual stencils.
    pub u_uniform: FieldFunction,
    /// Monitor: u stayed strictly above beta away from the front. The
    /// existence theory does not prove this bound, so a violation is
    /// reported rather than asserted.
    pub u_above_beta: bool,
}

/// Invert the transform chain on a converged bundle.
pub fn reconstruct_solution(
    bundle: &SolutionBundle,
    data: &ProblemData,
) -> Result<ParametricSolution> {
    let times = bundle.w.times;
    let d = data.d;
    let beta = data.beta;
    let n_slices = times.len();
    let mut ys = Vec::with_capacity(n_slices);
    let mut xs = Vec::with_capacity(n_slices);
    let mut us = Vec::with_capacity(n_slices);
    let mut front = Vec::with_capacity(n_slices);
    let mut u_uniform = Vec::with_capacity(n_slices);
    let mut u_above_beta = true;

    for (k, slice) in bundle.w.slices.iter().enumerate() {
        let n = slice.nodes.len();
        // Cden(y, t) = C(t) + (1/D) int_y^{y1} w, accumulated from the top
        let mut cden = vec![bundle.c_of_t.values[k]; n];
        for j in (0..n - 1).rev() {
            let dy = slice.nodes[j + 1] - slice.nodes[j];
            cden[j] = cden[j + 1] + dy * 0.5 * (slice.values[j] + slice.values[j + 1]) / d;
        }
        let mut u = Vec::with_capacity(n);
        for j in 0..n {
            if cden[j] <= 0.0 {
                return Err(FbError::HorizonExceeded {
                    what: format!("Hopf-Cole denominator vanished at slice node {j}"),
                    index: k,
                });
            }
            u.push(slice.values[j] / cden[j] + beta);
        }
        let mut x = Vec::with_capacity(n);
        x.push(0.0);
        for j in 0..n - 1 {
            let dy = slice.nodes[j + 1] - slice.nodes[j];
            let step = dy * 0.5 * (u[j] + u[j + 1]);
            if step <= 0.0 {
                return Err(FbError::InvalidField(format!(
                    "reconstructed x is not strictly increasing at slice {k}, node {j}"
                )));
            }
            x.push(x[j] + step);
        }
        if u[..n - 1].iter().any(|&v| v <= beta) {
            u_above_beta = false;
        }
        front.push(*x.last().unwrap());

        // resample onto a uniform x grid
        let s = *x.last().unwrap();
        let hu = s / (n - 1) as f64;
        let xg: Vec<f64> = (0..n).map(|j| hu * j as f64).collect();
        let ug: Vec<f64> = xg.iter().map(|&q| pchip_nonuniform(&x, &u, q)).collect();
        u_uniform.push(Slice {
            nodes: xg,
            values: ug,
        });

        ys.push(slice.nodes.clone());
        xs.push(x);
        us.push(u);
    }

    Ok(ParametricSolution {
        times,
        y: ys,
        x: xs,
        u: us,
        s: GridFunction::new(times, front, Interp::PiecewiseLinear)?,
        u_uniform: FieldFunction::new(times, u_uniform)?,
        u_above_beta,
    })
}
