//! Heat kernel, Green and Neumann functions of the half line, with analytic
//! spatial derivatives.
//!
//! All three vanish identically for t <= tau. The Green function is the odd
//! image combination K(x) - K(-x), the Neumann function the even one.

use crate::error::{FbError, Result};

/// Which derivative of the kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    Value,
    /// d/dx, x the field point.
    DField,
    /// d/dxi, xi the source point.
    DSource,
}

/// Arguments of a kernel evaluation.
#[derive(Debug, Clone, Copy)]
pub struct KernelQuery {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub tau: f64,
    pub d: f64,
    pub deriv: Deriv,
}

impl KernelQuery {
    pub fn value(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> Self {
        Self {
            x,
            t,
            xi,
            tau,
            d,
            deriv: Deriv::Value,
        }
    }

    fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.x, "x"),
            (self.t, "t"),
            (self.xi, "xi"),
            (self.tau, "tau"),
            (self.d, "D"),
        ] {
            if !v.is_finite() {
                return Err(FbError::InvalidArgument(format!("{name} is not finite")));
            }
        }
        if self.d <= 0.0 {
            return Err(FbError::InvalidArgument(format!(
                "diffusivity D = {} must be positive",
                self.d
            )));
        }
        Ok(())
    }
}

/// Exponents below this evaluate to zero rather than risking underflow noise.
const EXP_FLOOR: f64 = -700.0;

/// Raw Gaussian kernel value for center `c`: exp(-(x-c)^2/(4Ds)) / (2 sqrt(pi D s)).
#[inline]
fn gaussian(x: f64, c: f64, d: f64, s: f64) -> f64 {
    let r = x - c;
    let e = -r * r / (4.0 * d * s);
    if e < EXP_FLOOR {
        return 0.0;
    }
    e.exp() / (2.0 * (std::f64::consts::PI * d * s).sqrt())
}

/// K and its requested derivative; `sign_x` mirrors the field point so the
/// same routine serves the image term.
#[inline]
fn kernel_piece(q: &KernelQuery, sign_x: f64) -> f64 {
    let s = q.t - q.tau;
    if s <= 0.0 {
        return 0.0;
    }
    let x = sign_x * q.x;
    let k = gaussian(x, q.xi, q.d, s);
    match q.deriv {
        Deriv::Value => k,
        // chain rule through the mirroring: d/dx K(sign*x, ...; xi)
        Deriv::DField => sign_x * (-(x - q.xi) / (2.0 * q.d * s)) * k,
        Deriv::DSource => ((x - q.xi) / (2.0 * q.d * s)) * k,
    }
}

/// Fundamental solution of w_t = D w_yy, cut off to zero for t <= tau.
pub fn heat_kernel(q: KernelQuery) -> Result<f64> {
    q.validate()?;
    Ok(kernel_piece(&q, 1.0))
}

/// Green function G = K(x,...) - K(-x,...).
pub fn green(q: KernelQuery) -> Result<f64> {
    q.validate()?;
    Ok(kernel_piece(&q, 1.0) - kernel_piece(&q, -1.0))
}

/// Neumann function N = K(x,...) + K(-x,...).
pub fn neumann(q: KernelQuery) -> Result<f64> {
    q.validate()?;
    Ok(kernel_piece(&q, 1.0) + kernel_piece(&q, -1.0))
}

// Unchecked fast paths for the integral assembly loops. The solver validates
// D once up front; these keep exp() the only cost per evaluation.

#[inline]
pub(crate) fn k_value(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    gaussian(x, xi, d, s)
}

#[inline]
pub(crate) fn g_value(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    k_value(x, t, xi, tau, d) - k_value(-x, t, xi, tau, d)
}

#[inline]
pub(crate) fn n_value(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    k_value(x, t, xi, tau, d) + k_value(-x, t, xi, tau, d)
}

#[inline]
pub(crate) fn g_dfield(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    let a = -(x - xi) / (2.0 * d * s) * gaussian(x, xi, d, s);
    let b = -(-x - xi) / (2.0 * d * s) * gaussian(-x, xi, d, s);
    a + b
}

#[inline]
pub(crate) fn n_dfield(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    let a = -(x - xi) / (2.0 * d * s) * gaussian(x, xi, d, s);
    let b = -(-x - xi) / (2.0 * d * s) * gaussian(-x, xi, d, s);
    a - b
}

#[inline]
pub(crate) fn g_dsource(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    let a = (x - xi) / (2.0 * d * s) * gaussian(x, xi, d, s);
    let b = (-x - xi) / (2.0 * d * s) * gaussian(-x, xi, d, s);
    a - b
}

#[inline]
pub(crate) fn k_dfield(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    -(x - xi) / (2.0 * d * s) * gaussian(x, xi, d, s)
}

#[inline]
pub(crate) fn n_dsource(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    let a = (x - xi) / (2.0 * d * s) * gaussian(x, xi, d, s);
    let b = (-x - xi) / (2.0 * d * s) * gaussian(-x, xi, d, s);
    a + b
}

/// d^2/dx^2 of the Neumann function. Needed for the y-derivative of the
/// dipole term of the field representation; only valid strictly inside the
/// domain where the integral it feeds converges.
#[inline]
pub(crate) fn n_d2field(x: f64, t: f64, xi: f64, tau: f64, d: f64) -> f64 {
    let s = t - tau;
    if s <= 0.0 {
        return 0.0;
    }
    let piece = |xx: f64| -> f64 {
        let r = xx - xi;
        let q = 2.0 * d * s;
        (r * r / (q * q) - 1.0 / q) * gaussian(xx, xi, d, s)
    };
    piece(x) + piece(-x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn heat_kernel_closed_form_values() {
        // direct substitution at x = xi = 0, t - tau = 1, D = 1
        let v = heat_kernel(KernelQuery::value(0.0, 1.0, 0.0, 0.0, 1.0)).unwrap();
        assert!((v - 1.0 / (2.0 * SQRT_PI)).abs() < 1e-15);
        assert!((v - 0.2820948).abs() < 1e-6);
    }

    #[test]
    fn kernels_vanish_for_t_not_after_tau() {
        for deriv in [Deriv::Value, Deriv::DField, Deriv::DSource] {
            for (t, tau) in [(1.0, 1.0), (0.5, 1.0)] {
                let q = KernelQuery {
                    x: 0.3,
                    t,
                    xi: -2.0,
                    tau,
                    d: 0.7,
                    deriv,
                };
                assert_eq!(heat_kernel(q).unwrap(), 0.0);
                assert_eq!(green(q).unwrap(), 0.0);
                assert_eq!(neumann(q).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn field_derivative_vanishes_at_the_center() {
        let q = KernelQuery {
            x: 0.4,
            t: 2.0,
            xi: 0.4,
            tau: 0.5,
            d: 1.3,
            deriv: Deriv::DField,
        };
        assert_eq!(heat_kernel(q).unwrap(), 0.0);
    }

    #[test]
    fn green_and_neumann_closed_form_values() {
        let g = green(KernelQuery::value(1.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        let n = neumann(KernelQuery::value(1.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        let e = (-1.0_f64).exp();
        assert!((g - (1.0 - e) / (2.0 * SQRT_PI)).abs() < 1e-15);
        assert!((n - (1.0 + e) / (2.0 * SQRT_PI)).abs() < 1e-15);
        assert!((g - 0.1783184).abs() < 1e-6);
        assert!((n - 0.3858710).abs() < 1e-6);
    }

    #[test]
    fn green_vanishes_on_the_axis_and_neumann_has_flat_slope() {
        let v = green(KernelQuery::value(0.0, 2.0, 0.7, 0.3, 0.9)).unwrap();
        assert_eq!(v, 0.0);
        let q = KernelQuery {
            x: 0.0,
            t: 2.0,
            xi: 0.7,
            tau: 0.3,
            d: 0.9,
            deriv: Deriv::DField,
        };
        assert!(neumann(q).unwrap().abs() < 1e-18);
    }

    #[test]
    fn reflection_symmetries_hold_exactly() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let x = rng.gen_range(-2.0..2.0);
            let xi = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(0.1..2.0);
            let tau = rng.gen_range(0.0..0.09);
            let d = rng.gen_range(0.2..1.8);
            let g1 = green(KernelQuery::value(x, t, xi, tau, d)).unwrap();
            let g2 = green(KernelQuery::value(-x, t, xi, tau, d)).unwrap();
            let n1 = neumann(KernelQuery::value(x, t, xi, tau, d)).unwrap();
            let n2 = neumann(KernelQuery::value(-x, t, xi, tau, d)).unwrap();
            assert_eq!(g1, -g2, "G must be odd in x");
            assert_eq!(n1, n2, "N must be even in x");
        }
    }

    #[test]
    fn analytic_field_derivative_matches_differencing() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.5..1.5);
            let xi = rng.gen_range(-1.5..1.5);
            let t = rng.gen_range(0.3..2.0);
            let d = rng.gen_range(0.3..1.7);
            let h = 1e-6;
            let fns: [(fn(KernelQuery) -> Result<f64>, &str); 2] = [(green, "G"), (neumann, "N")];
            for (f, name) in fns {
                let num = (f(KernelQuery::value(x + h, t, xi, 0.0, d)).unwrap()
                    - f(KernelQuery::value(x - h, t, xi, 0.0, d)).unwrap())
                    / (2.0 * h);
                let q = KernelQuery {
                    x,
                    t,
                    xi,
                    tau: 0.0,
                    d,
                    deriv: Deriv::DField,
                };
                let ana = f(q).unwrap();
                assert!(
                    (num - ana).abs() < 1e-6 * (1.0 + ana.abs()),
                    "{name}_x mismatch at x={x}, xi={xi}"
                );
            }
        }
    }

    #[test]
    fn analytic_source_derivative_matches_differencing() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.5..1.5);
            let xi = rng.gen_range(-1.5..1.5);
            let t = rng.gen_range(0.3..2.0);
            let d = rng.gen_range(0.3..1.7);
            let h = 1e-6;
            let num = (green(KernelQuery::value(x, t, xi + h, 0.0, d)).unwrap()
                - green(KernelQuery::value(x, t, xi - h, 0.0, d)).unwrap())
                / (2.0 * h);
            let q = KernelQuery {
                x,
                t,
                xi,
                tau: 0.0,
                d,
                deriv: Deriv::DSource,
            };
            let ana = green(q).unwrap();
            assert!((num - ana).abs() < 1e-6 * (1.0 + ana.abs()));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(heat_kernel(KernelQuery::value(0.0, 1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(heat_kernel(KernelQuery::value(0.0, 1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(heat_kernel(KernelQuery::value(f64::NAN, 1.0, 0.0, 0.0, 1.0)).is_err());
        assert!(green(KernelQuery::value(0.0, f64::INFINITY, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn underflow_guard_returns_zero() {
        let v = heat_kernel(KernelQuery::value(1e6, 1.0, 0.0, 0.999999, 1.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kernel_satisfies_the_heat_equation() {
        // finite differences, relative tolerance 1e-6, at separations >= 0.01
        let d = 0.8;
        for &(x, xi, s) in &[
            (0.3_f64, 0.1_f64, 0.05_f64),
            (0.0, 0.4, 0.01),
            (-0.7, 0.2, 0.5),
        ] {
            let t = 1.0 + s;
            let tau = 1.0;
            let ht = 1e-7 * s;
            let hx = 1e-4 * (d * s).sqrt();
            let at = |x: f64, t: f64| heat_kernel(KernelQuery::value(x, t, xi, tau, d)).unwrap();
            let kt = (at(x, t + ht) - at(x, t - ht)) / (2.0 * ht);
            let kxx = (at(x + hx, t) - 2.0 * at(x, t) + at(x - hx, t)) / (hx * hx);
            let scale = at(x, t).abs().max(1e-300);
            assert!(
                (kt - d * kxx).abs() / (scale / s) < 1e-6,
                "K_t != D K_xx at x={x}, s={s}"
            );
        }
    }

    #[test]
    fn classical_exponential_bound_holds_on_samples() {
        // exp(-x^2/(alpha s)) / s^(n/2) <= (n alpha / (2 e x^2))^(n/2)
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for _ in 0..1000 {
            let alpha = rng.gen_range(0.05..4.0);
            let x = rng.gen_range(0.01..3.0);
            let s: f64 = rng.gen_range(1e-6..2.0);
            let n = rng.gen_range(1..=3) as f64;
            let lhs = (-x * x / (alpha * s)).exp() / s.powf(n / 2.0);
            let rhs = (n * alpha / (2.0 * std::f64::consts::E * x * x)).powf(n / 2.0);
            assert!(
                lhs <= rhs * (1.0 + 1e-12),
                "bound fails: alpha={alpha} x={x} s={s} n={n}"
            );
        }
    }
}
