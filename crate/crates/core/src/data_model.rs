//! Problem inputs, derived constants, and the initial-data profiles that
//! seed the heat-equation formulation.

use crate::error::{FbError, Result};
use crate::grid::{GridFunction, GridSpec, Interp};
use serde::{Deserialize, Serialize};

/// An evaluable scalar function of one variable: either polynomial
/// coefficients (constant term first) or a uniform sample table with
/// optional derivative samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FunctionSpec {
    Polynomial(Vec<f64>),
    Table {
        start: f64,
        end: f64,
        values: Vec<f64>,
        derivatives: Option<Vec<f64>>,
    },
}

impl FunctionSpec {
    pub fn constant(c: f64) -> Self {
        FunctionSpec::Polynomial(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FunctionSpec::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            FunctionSpec::Table {
                start, end, values, ..
            } => table_fn(*start, *end, values).eval(x),
        }
    }

    /// Analytic derivative for polynomials, derivative of the monotone
    /// cubic interpolant for tables (or interpolated derivative samples
    /// when the table carries them).
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            FunctionSpec::Polynomial(c) => {
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * x + ck * k as f64;
                }
                acc
            }
            FunctionSpec::Table {
                start,
                end,
                values,
                derivatives,
            } => match derivatives {
                Some(d) => table_fn(*start, *end, d).eval(x),
                None => table_fn(*start, *end, values).eval_derivative(x),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            FunctionSpec::Polynomial(c) => !c.is_empty() && c.iter().all(|v| v.is_finite()),
            FunctionSpec::Table {
                start,
                end,
                values,
                derivatives,
            } => {
                start.is_finite()
                    && end.is_finite()
                    && end > start
                    && values.len() >= 2
                    && values.iter().all(|v| v.is_finite())
                    && derivatives.as_ref().map_or(true, |d| {
                        d.len() == values.len() && d.iter().all(|v| v.is_finite())
                    })
            }
        };
        if ok {
            Ok(())
        } else {
            Err(FbError::InvalidData("malformed function spec".into()))
        }
    }
}

fn table_fn(start: f64, end: f64, values: &[f64]) -> GridFunction {
    let grid = GridSpec::new(start, end, values.len() - 1).expect("validated table");
    GridFunction {
        grid,
        values: values.to_vec(),
        interp: Interp::MonotoneCubic,
    }
}

/// Physical inputs of the free boundary problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemData {
    /// Diffusivity.
    pub d: f64,
    /// Concentration held at the moving front.
    pub beta: f64,
    /// Initial front position.
    pub b: f64,
    /// Origin constant of the hodograph coordinate.
    pub c1: f64,
    /// Initial concentration on [0, b].
    pub u0: FunctionSpec,
    /// Dirichlet concentration at x = 0 on [0, sigma_request].
    pub f: FunctionSpec,
    pub sigma_request: f64,
}

impl ProblemData {
    pub fn new(
        d: f64,
        beta: f64,
        b: f64,
        c1: f64,
        u0: FunctionSpec,
        f: FunctionSpec,
        sigma_request: f64,
    ) -> Result<Self> {
        for (v, name) in [
            (d, "D"),
            (beta, "beta"),
            (b, "b"),
            (c1, "C1"),
            (sigma_request, "sigma"),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(FbError::InvalidData(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        u0.validate()?;
        f.validate()?;
        Ok(Self {
            d,
            beta,
            b,
            c1,
            u0,
            f,
            sigma_request,
        })
    }

    /// Horizon over which f-norms are taken; the existence analysis never
    /// looks past sigma = 1.
    pub fn norm_horizon(&self) -> f64 {
        self.sigma_request.min(1.0)
    }
}

/// Constants derived from the problem data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedData {
    /// U0 = integral of 1/u0 over [0, b].
    pub u0_integral: f64,
    /// C2 = C1 + U0.
    pub c2: f64,
    pub norm_u0: f64,
    pub norm_u0prime_over_u0: f64,
    pub norm_f: f64,
    pub norm_fprime: f64,
}

const COMPAT_RTOL: f64 = 1e-8;

/// Number of fine subintervals used for the profile quadratures.
fn fine_subdivisions(n_space: usize) -> usize {
    4 * n_space.max(256)
}

/// Compute U0, C2 and the sup norms entering the certificate constants.
///
/// Rejects data whose initial profile is non-positive or incompatible with
/// the boundary data (u0(b) = beta and u0(0) = f(0) are structural: the
/// transform chain needs them). Softer existence hypotheses are reported by
/// [`crate::certificate::check_hypotheses`] instead.
pub fn derive_constants(data: &ProblemData, n_space: usize) -> Result<DerivedData> {
    let m = fine_subdivisions(n_space);
    let h = data.b / m as f64;

    let mut norm_u0 = 0.0_f64;
    let mut norm_ratio = 0.0_f64;
    for j in 0..=m {
        let x = h * j as f64;
        let u = data.u0.eval(x);
        if !(u.is_finite() && u > 0.0) {
            return Err(FbError::InvalidData(format!(
                "u0({x}) = {u}; the initial profile must stay positive"
            )));
        }
        norm_u0 = norm_u0.max(u.abs());
        norm_ratio = norm_ratio.max((data.u0.derivative(x) / u).abs());
    }

    let u0_b = data.u0.eval(data.b);
    if (u0_b - data.beta).abs() > COMPAT_RTOL * data.beta.abs().max(1.0) {
        return Err(FbError::InvalidData(format!(
            "u0(b) = {u0_b} but beta = {}; front compatibility fails",
            data.beta
        )));
    }
    let f0 = data.f.eval(0.0);
    let u0_0 = data.u0.eval(0.0);
    if (u0_0 - f0).abs() > COMPAT_RTOL * f0.abs().max(1.0) {
        return Err(FbError::InvalidData(format!(
            "u0(0) = {u0_0} but f(0) = {f0}; corner compatibility fails"
        )));
    }

    // composite Simpson for U0 = int 1/u0
    let mut u0_integral = 0.0;
    for j in 0..m {
        let a = h * j as f64;
        u0_integral += h / 6.0
            * (1.0 / data.u0.eval(a) + 4.0 / data.u0.eval(a + 0.5 * h) + 1.0 / data.u0.eval(a + h));
    }

    let horizon = data.norm_horizon();
    let mf = 2 * m.max(512);
    let ht = horizon / mf as f64;
    let mut norm_f = 0.0_f64;
    let mut norm_fprime = 0.0_f64;
    for j in 0..=mf {
        let t = ht * j as f64;
        let fv = data.f.eval(t);
        if !fv.is_finite() || fv <= 0.0 {
            return Err(FbError::InvalidData(format!(
                "f({t}) = {fv} must be positive"
            )));
        }
        norm_f = norm_f.max(fv.abs());
        norm_fprime = norm_fprime.max(data.f.derivative(t).abs());
    }

    Ok(DerivedData {
        u0_integral,
        c2: data.c1 + u0_integral,
        norm_u0,
        norm_u0prime_over_u0: norm_ratio,
        norm_f,
        norm_fprime,
    })
}

/// Initial-data profiles on the hodograph interval [C1, C2]: the coordinate
/// map g with its inverse, v0 = u0 o g^-1, the shifted profile V0, and the
/// heat initial datum F with its derivative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialProfiles {
    /// Uniform grid on [C1, C2].
    pub y: GridSpec,
    pub v0: GridFunction,
    pub cap_v0: GridFunction,
    pub f_init: GridFunction,
    pub f_init_prime: GridFunction,
    /// Uniform step of the fine x grid on [0, b] carrying the map g.
    x_step: f64,
    g_fine: Vec<f64>,
    g_slopes: Vec<f64>,
}

impl InitialProfiles {
    /// The coordinate map g(x) = C1 + int_0^x 1/u0, by monotone cubic
    /// interpolation of the fine accumulated samples.
    pub fn g_eval(&self, x: f64) -> f64 {
        let m = self.g_fine.len() - 1;
        let raw = x / self.x_step;
        if raw <= 0.0 {
            return self.g_fine[0];
        }
        if raw >= m as f64 {
            return self.g_fine[m];
        }
        let j = (raw.floor() as usize).min(m - 1);
        let s = raw - j as f64;
        let s2 = s * s;
        let s3 = s2 * s;
        let h = self.x_step;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.g_fine[j]
            + (s3 - 2.0 * s2 + s) * h * self.g_slopes[j]
            + (-2.0 * s3 + 3.0 * s2) * self.g_fine[j + 1]
            + (s3 - s2) * h * self.g_slopes[j + 1]
    }

    /// Verification constructor: carry explicit F and F' samples on the
    /// given grid with a linear placeholder coordinate map. Used by the
    /// manufactured-solution harness and by unit tests that drive the
    /// integral formulation directly.
    pub fn synthetic(y: GridSpec, f: impl Fn(f64) -> f64, fprime: impl Fn(f64) -> f64) -> Self {
        let span = y.end() - y.start;
        let cap_v0 = GridFunction::constant(y, 0.0);
        Self {
            y,
            v0: cap_v0.clone(),
            cap_v0,
            f_init: GridFunction::from_fn(y, &f),
            f_init_prime: GridFunction::from_fn(y, &fprime),
            x_step: 0.125,
            g_fine: (0..=8).map(|j| y.start + span * j as f64 / 8.0).collect(),
            g_slopes: vec![span; 9],
        }
    }

    /// Monotone inversion of g by bisection.
    pub fn g_inverse(&self, z: f64) -> f64 {
        let b = self.x_step * (self.g_fine.len() - 1) as f64;
        if z <= self.g_fine[0] {
            return 0.0;
        }
        if z >= *self.g_fine.last().unwrap() {
            return b;
        }
        let (mut lo, mut hi) = (0.0, b);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if self.g_eval(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Build g, v0, V0, F and F' from validated data.
pub fn build_initial_profiles(
    data: &ProblemData,
    derived: &DerivedData,
    n_space: usize,
) -> Result<InitialProfiles> {
    let m = fine_subdivisions(n_space);
    let h = data.b / m as f64;
    let mut g_fine = Vec::with_capacity(m + 1);
    let mut g_slopes = Vec::with_capacity(m + 1);
    g_fine.push(data.c1);
    g_slopes.push(1.0 / data.u0.eval(0.0));
    for j in 0..m {
        let a = h * j as f64;
        let cell = h / 6.0
            * (1.0 / data.u0.eval(a) + 4.0 / data.u0.eval(a + 0.5 * h) + 1.0 / data.u0.eval(a + h));
        if !(cell.is_finite() && cell > 0.0) {
            return Err(FbError::InvalidData(
                "coordinate map g is not strictly increasing".into(),
            ));
        }
        g_fine.push(g_fine[j] + cell);
        // g' = 1/u0 exactly, so the Hermite interpolant is quartic-accurate
        g_slopes.push(1.0 / data.u0.eval(a + h));
    }
    let c2 = *g_fine.last().unwrap();
    if (c2 - derived.c2).abs() > 1e-9 * derived.c2.abs().max(1.0) {
        return Err(FbError::InvalidData(format!(
            "derived constants were computed for different data (C2 {} vs {c2})",
            derived.c2
        )));
    }

    let y = GridSpec::new(data.c1, c2, n_space)?;
    let profiles = InitialProfiles {
        y,
        v0: GridFunction::constant(y, 0.0),
        cap_v0: GridFunction::constant(y, 0.0),
        f_init: GridFunction::constant(y, 0.0),
        f_init_prime: GridFunction::constant(y, 0.0),
        x_step: h,
        g_fine,
        g_slopes,
    };

    let mut v0 = Vec::with_capacity(y.len());
    let mut v0_prime = Vec::with_capacity(y.len());
    for k in 0..=y.n {
        let z = y.node(k);
        let x = if k == y.n {
            data.b
        } else {
            profiles.g_inverse(z)
        };
        let u = data.u0.eval(x);
        v0.push(u);
        // dv0/dz = u0'(x) * u0(x) since dz/dx = 1/u0
        v0_prime.push(data.u0.derivative(x) * u);
    }

    let cap_v0: Vec<f64> = v0.iter().map(|&v| v - data.beta).collect();
    let v0_gf = GridFunction::new(y, v0, Interp::PiecewiseLinear)?;
    let cap_v0_gf = GridFunction::new(y, cap_v0.clone(), Interp::PiecewiseLinear)?;

    // tail integral int_y^C2 V0 via the cumulative integral
    let cum = crate::quadrature::cumulative_integral(&cap_v0_gf);
    let total = *cum.values.last().unwrap();
    let mut f_vals = Vec::with_capacity(y.len());
    let mut fp_vals = Vec::with_capacity(y.len());
    for k in 0..=y.n {
        let eta0 = ((total - cum.values[k]) / data.d).exp();
        f_vals.push(cap_v0[k] * eta0);
        fp_vals.push(eta0 * (v0_prime[k] - cap_v0[k] * cap_v0[k] / data.d));
    }

    Ok(InitialProfiles {
        v0: v0_gf,
        cap_v0: cap_v0_gf,
        f_init: GridFunction::new(y, f_vals, Interp::PiecewiseLinear)?,
        f_init_prime: GridFunction::new(y, fp_vals, Interp::PiecewiseLinear)?,
        ..profiles
    })
}
