//! Uniform-grid scalar functions and space-time fields on moving domains.

use crate::error::{FbError, Result};
use serde::{Deserialize, Serialize};

/// A uniform grid `start + k*step`, `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    /// Number of subintervals; the grid has `n + 1` nodes.
    pub n: usize,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start || n == 0 {
            return Err(FbError::InvalidArgument(format!(
                "grid [{start}, {end}] with {n} steps"
            )));
        }
        Ok(Self {
            start,
            step: (end - start) / n as f64,
            n,
        })
    }

    /// Time grid on `[0, sigma]`.
    pub fn time(sigma: f64, n: usize) -> Result<Self> {
        Self::new(0.0, sigma, n)
    }

    pub fn node(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn end(&self) -> f64 {
        self.node(self.n)
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|k| self.node(k))
    }

    /// Index of the node nearest to `t`, provided `t` lies on the grid up
    /// to a relative tolerance.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let raw = (t - self.start) / self.step;
        let k = raw.round();
        if k < 0.0 || k > self.n as f64 || (raw - k).abs() > 1e-6 {
            return Err(FbError::InvalidArgument(format!(
                "t = {t} is not a grid node (grid start {}, step {})",
                self.start, self.step
            )));
        }
        Ok(k as usize)
    }
}

/// Interpolation rule attached to a [`GridFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interp {
    PiecewiseLinear,
    /// Fritsch-Carlson monotone cubic.
    MonotoneCubic,
}

/// A scalar function sampled on a uniform grid, with an interpolation rule.
///
/// Carries the per-time densities and curves of the solver (phi1, phi2, h,
/// h', y0, y1, s, C) and doubles as a spatial profile carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub interp: Interp,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>, interp: Interp) -> Result<Self> {
        if values.len() != grid.len() || values.len() < 2 {
            return Err(FbError::InvalidArgument(format!(
                "grid function needs {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            interp,
        })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self {
            grid,
            values,
            interp: Interp::PiecewiseLinear,
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Interpolated value; clamps to the grid span.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        let raw = (x - g.start) / g.step;
        if raw <= 0.0 {
            return self.values[0];
        }
        if raw >= g.n as f64 {
            return self.values[g.n];
        }
        let j = (raw.floor() as usize).min(g.n - 1);
        let s = raw - j as f64;
        match self.interp {
            Interp::PiecewiseLinear => self.values[j] + s * (self.values[j + 1] - self.values[j]),
            Interp::MonotoneCubic => {
                let d = self.pchip_slopes();
                let h = g.step;
                hermite(self.values[j], self.values[j + 1], d[j], d[j + 1], h, s)
            }
        }
    }

    /// Derivative of the interpolant at `x`.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        let g = &self.grid;
        let raw = ((x - g.start) / g.step).clamp(0.0, g.n as f64);
        let j = (raw.floor() as usize).min(g.n - 1);
        let s = raw - j as f64;
        match self.interp {
            Interp::PiecewiseLinear => (self.values[j + 1] - self.values[j]) / g.step,
            Interp::MonotoneCubic => {
                let d = self.pchip_slopes();
                hermite_derivative(
                    self.values[j],
                    self.values[j + 1],
                    d[j],
                    d[j + 1],
                    g.step,
                    s,
                )
            }
        }
    }

    /// Sup norm over the stored samples.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Largest absolute node-wise difference; grids must agree.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    fn pchip_slopes(&self) -> Vec<f64> {
        pchip_slopes_uniform(&self.values, self.grid.step)
    }
}

/// Fritsch-Carlson slopes for monotone cubic interpolation on a uniform grid.
pub(crate) fn pchip_slopes_uniform(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut delta = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        delta.push((v[j + 1] - v[j]) / h);
    }
    let mut d = vec![0.0; n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for j in 1..n - 1 {
        if delta[j - 1] * delta[j] > 0.0 {
            // harmonic mean keeps the interpolant monotone
            d[j] = 2.0 * delta[j - 1] * delta[j] / (delta[j - 1] + delta[j]);
        }
    }
    d
}

fn hermite(v0: f64, v1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * v0 + h10 * h * d0 + h01 * v1 + h11 * h * d1
}

fn hermite_derivative(v0: f64, v1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    (dh00 * v0 + dh01 * v1) / h + dh10 * d0 + dh11 * d1
}

/// Monotone cubic interpolation on arbitrary sorted knots. Used to resample
/// parametric output onto a uniform x grid.
pub fn pchip_nonuniform(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2 && vs.len() == n);
    if x <= xs[0] {
        return vs[0];
    }
    if x >= xs[n - 1] {
        return vs[n - 1];
    }
    let j = match xs.partition_point(|&p| p <= x) {
        0 => 0,
        p => (p - 1).min(n - 2),
    };
    let h = xs[j + 1] - xs[j];
    let mut delta = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        delta.push((vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]));
    }
    let slope_at = |i: usize| -> f64 {
        if i == 0 {
            delta[0]
        } else if i == n - 1 {
            delta[n - 2]
        } else if delta[i - 1] * delta[i] > 0.0 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
        } else {
            0.0
        }
    };
    let s = (x - xs[j]) / h;
    hermite(vs[j], vs[j + 1], slope_at(j), slope_at(j + 1), h, s)
}

/// One time slice of a field: sorted spatial nodes and the values there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl Slice {
    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Piecewise-linear value at `y`, clamped to the slice span.
    pub fn eval(&self, y: f64) -> f64 {
        let n = self.nodes.len();
        if y <= self.nodes[0] {
            return self.values[0];
        }
        if y >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let j = match self.nodes.partition_point(|&p| p <= y) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let s = (y - self.nodes[j]) / (self.nodes[j + 1] - self.nodes[j]);
        self.values[j] + s * (self.values[j + 1] - self.values[j])
    }

    /// Monotone-cubic value at `y`, for cross-slice residual stencils.
    pub fn eval_cubic(&self, y: f64) -> f64 {
        pchip_nonuniform(&self.nodes, &self.values, y)
    }
}

/// A scalar function of (y, t) sampled per time slice on a moving domain.
///
/// Nodes are stored explicitly so coordinate maps (hodograph, Galilean
/// shift) can reindex without resampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFunction {
    pub times: GridSpec,
    pub slices: Vec<Slice>,
}

impl FieldFunction {
    pub fn new(times: GridSpec, slices: Vec<Slice>) -> Result<Self> {
        if slices.len() != times.len() {
            return Err(FbError::InvalidArgument(format!(
                "field needs {} slices, got {}",
                times.len(),
                slices.len()
            )));
        }
        for (i, s) in slices.iter().enumerate() {
            if s.nodes.len() < 2 || s.nodes.len() != s.values.len() {
                return Err(FbError::InvalidArgument(format!(
                    "slice {i} has {} nodes and {} values",
                    s.nodes.len(),
                    s.values.len()
                )));
            }
            if !s.nodes.windows(2).all(|w| w[0] < w[1]) {
                return Err(FbError::InvalidArgument(format!(
                    "slice {i} nodes are not strictly increasing"
                )));
            }
        }
        Ok(Self { times, slices })
    }

    /// Build a field with `n_space + 1` uniform nodes per slice between the
    /// given moving endpoints.
    pub fn sample(
        times: GridSpec,
        lo: impl Fn(f64) -> f64,
        hi: impl Fn(f64) -> f64,
        n_space: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let slices = times
            .nodes()
            .map(|t| {
                let (a, b) = (lo(t), hi(t));
                let h = (b - a) / n_space as f64;
                let nodes: Vec<f64> = (0..=n_space).map(|j| a + h * j as f64).collect();
                let values = nodes.iter().map(|&y| f(y, t)).collect();
                Slice { nodes, values }
            })
            .collect();
        Self::new(times, slices)
    }

    pub fn sup_distance(&self, other: &FieldFunction) -> f64 {
        let mut m = 0.0_f64;
        for (a, b) in self.slices.iter().zip(&other.slices) {
            for (x, y) in a.values.iter().zip(&b.values) {
                m = m.max((x - y).abs());
            }
        }
        m
    }
}
