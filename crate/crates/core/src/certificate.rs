//! The explicit constants of the small-time existence result and the
//! admissible horizon they certify.
//!
//! Every formula is evaluated literally as printed in the source analysis,
//! including the duplicated derivative term inside the H1 bracket. The two
//! published variants of the A1 exponent are both reported; the derivation
//! in the proof fixes the primary one.

use crate::data_model::{DerivedData, ProblemData};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Pass/fail state of each existence hypothesis, with measured margins
/// (positive margin = satisfied).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// f > 3 beta / 2 on the horizon.
    pub hip: bool,
    pub hip_margin: f64,
    /// u0 > beta strictly inside [0, b).
    pub u0_above_beta: bool,
    /// 0 < D < 2.
    pub d_range: bool,
    pub d_range_margin: f64,
    /// 0 < C1 < U0 / 2.
    pub c1_range: bool,
    pub c1_range_margin: f64,
    /// (||f|| + beta)(2 C1 + 3 U0) < 2 D.
    pub ipp: bool,
    pub ipp_margin: f64,
    /// 4 D ||f|| (||f|| + beta) < (3 - D) [2D - (||f|| + beta)(2 C1 + 3 U0)],
    /// equivalently E2 E3 < 1.
    pub ip: bool,
    pub ip_margin: f64,
    /// Corner and front compatibility (checked structurally at
    /// derive_constants; reported here for completeness).
    pub compatibility: bool,
}

impl HypothesisFlags {
    pub fn all_pass(&self) -> bool {
        self.hip
            && self.u0_above_beta
            && self.d_range
            && self.c1_range
            && self.ipp
            && self.ip
            && self.compatibility
    }
}

/// Evaluate every hypothesis with its measured margin.
pub fn check_hypotheses(data: &ProblemData, derived: &DerivedData) -> HypothesisFlags {
    let beta = data.beta;
    let d = data.d;
    let horizon = data.norm_horizon();
    let m = 2048;
    let mut hip_margin = f64::INFINITY;
    for j in 0..=m {
        let t = horizon * j as f64 / m as f64;
        hip_margin = hip_margin.min(data.f.eval(t) - 1.5 * beta);
    }

    let mut u0_above = true;
    for j in 0..m {
        let x = data.b * j as f64 / m as f64;
        if data.u0.eval(x) <= beta && data.b - x > 1e-9 * data.b {
            u0_above = false;
            break;
        }
    }

    let d_range_margin = (2.0 - d).min(d);
    let c1_range_margin = derived.u0_integral / 2.0 - data.c1;
    let ipp_lhs = (derived.norm_f + beta) * (2.0 * data.c1 + 3.0 * derived.u0_integral);
    let ipp_margin = 2.0 * d - ipp_lhs;
    let ip_value = if ipp_margin > 0.0 && d < 3.0 {
        4.0 * d * derived.norm_f * (derived.norm_f + beta) / (ipp_margin * (3.0 - d))
    } else {
        f64::INFINITY
    };

    HypothesisFlags {
        hip: hip_margin > 0.0,
        hip_margin,
        u0_above_beta: u0_above,
        d_range: d > 0.0 && d < 2.0,
        d_range_margin,
        c1_range: data.c1 > 0.0 && c1_range_margin > 0.0,
        c1_range_margin,
        ipp: ipp_margin > 0.0,
        ipp_margin,
        ip: ip_value < 1.0,
        ip_margin: 1.0 - ip_value,
        compatibility: true,
    }
}

/// The full constant set of the existence certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub valid: bool,
    pub invalid_reasons: Vec<String>,

    /// Primary A1 (exponent (||u0|| + beta) U0 / D, the proof version).
    pub a1: f64,
    /// A1 with the exponent as printed in the lemma statement,
    /// (||u0|| + beta U0) / D. Reported for comparison only.
    pub a1_statement_variant: f64,
    pub a2: f64,
    pub a3: f64,
    pub a31: f64,
    pub a32: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub a7: f64,

    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p31: f64,
    pub p32: f64,
    pub p4: f64,
    pub p41: f64,
    pub p5: f64,
    pub p6: f64,
    pub p7: f64,

    pub e1: f64,
    pub e2: f64,
    pub e3: f64,

    pub h: f64,
    pub r: f64,
    pub s: f64,
    pub m: f64,

    /// H1 and H2 are coefficient * sqrt(sigma); the coefficients are stored
    /// so the sigma caps are exactly 1/coefficient^2.
    pub h1_coefficient: f64,
    pub h2_coefficient: f64,
    /// sigma_max with the duplicated 2S/sqrt(pi D) term removed from H1,
    /// reported to show the sensitivity to the suspected misprint.
    pub sigma_max_dedup_h1: f64,

    pub flags: HypothesisFlags,
    pub sigma_caps: SigmaCaps,
    pub sigma_max: f64,
}

/// The individual horizon caps whose minimum is sigma_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaCaps {
    pub unit: f64,
    pub y1_excursion: f64,
    pub y0_excursion: f64,
    pub y0_kernel_variation: f64,
    pub h1: f64,
    pub h2: f64,
}

impl SigmaCaps {
    pub fn min(&self) -> f64 {
        self.unit
            .min(self.y1_excursion)
            .min(self.y0_excursion)
            .min(self.y0_kernel_variation)
            .min(self.h1)
            .min(self.h2)
    }
}

/// Evaluate the constant chain A -> E -> (H, R, M, S) -> P -> H1/H2.
pub fn compute_certificate(
    data: &ProblemData,
    derived: &DerivedData,
    flags: &HypothesisFlags,
) -> Certificate {
    let d = data.d;
    let beta = data.beta;
    let c1 = data.c1;
    let c2 = derived.c2;
    let u0n = derived.norm_u0;
    let fp = derived.norm_fprime;
    let fnorm = derived.norm_f;
    let u0i = derived.u0_integral;
    let ratio = derived.norm_u0prime_over_u0;
    let sqrt_pi = PI.sqrt();

    let bracket_a1 = ratio + (u0n + beta) / d;
    let a1 = ((u0n + beta) * u0i / d).exp() * bracket_a1;
    let a1_statement = ((u0n + beta * u0i) / d).exp() * bracket_a1;

    let mut invalid = Vec::new();
    if !flags.d_range {
        invalid.push("D outside (0, 2)".to_string());
    }
    if !flags.c1_range {
        invalid.push("C1 not in (0, U0/2)".to_string());
    }
    if !flags.ipp {
        invalid.push("ipp violated: (||f||+beta)(2C1+3U0) >= 2D".to_string());
    }

    let e1 = 1.0 + 2.0 * (1.0 / (2.0 - d) + fnorm / (beta * (3.0 - d))) * a1;
    let e2 = 2.0 * fnorm / (3.0 - d);
    let ipp_den = 2.0 * d - (fnorm + beta) * (2.0 * c1 + 3.0 * u0i);
    let e3 = 2.0 * d * (fnorm + beta) / ipp_den;

    if flags.ipp && e2 * e3 >= 1.0 {
        invalid.push("ip violated: E2 E3 >= 1".to_string());
    }

    if !invalid.is_empty() {
        let nan = f64::NAN;
        return Certificate {
            valid: false,
            invalid_reasons: invalid,
            a1,
            a1_statement_variant: a1_statement,
            a2: nan,
            a3: nan,
            a31: nan,
            a32: nan,
            a4: nan,
            a5: nan,
            a6: nan,
            a7: nan,
            p1: nan,
            p2: nan,
            p3: nan,
            p31: nan,
            p32: nan,
            p4: nan,
            p41: nan,
            p5: nan,
            p6: nan,
            p7: nan,
            e1,
            e2,
            e3,
            h: nan,
            r: nan,
            s: nan,
            m: nan,
            h1_coefficient: nan,
            h2_coefficient: nan,
            sigma_max_dedup_h1: 0.0,
            flags: flags.clone(),
            sigma_caps: SigmaCaps {
                unit: 0.0,
                y1_excursion: 0.0,
                y0_excursion: 0.0,
                y0_kernel_variation: 0.0,
                h1: 0.0,
                h2: 0.0,
            },
            sigma_max: 0.0,
        };
    }

    let h = beta / 2.0;
    let r = e3 * (1.0 + e1) / (1.0 - e3 * e2);
    let m = (e1 + e2 * e3) / (1.0 - e3 * e2);
    let s = e3 * (2.0 * fp / beta + (fnorm + beta) * (beta / d + m * (2.0 / beta + 1.0 / d)));

    let gauss_bound = |c: f64| 2.0 * m + 3.0 / (c * c) * (2.0 * d / (3.0 * E)).powf(1.5);
    let a2 = m * d.sqrt() / (2.0 * sqrt_pi) * gauss_bound(c2);
    let a31 = (3.0 * c2 - c1) / 2.0 * (24.0 * d / (E * (c2 - 3.0 * c1).powi(2))).powf(1.5);
    let a32 = 18.0 * 6.0_f64.sqrt() / (E.powf(1.5) * (c1 + c2).powi(2));
    let a3 = r * beta / (2.0 * (d * PI).sqrt()) * (a31 + a32);
    let a4 = m * d.sqrt() / (2.0 * sqrt_pi) * (a31 + a32);
    let a5 = 2.0 * s / (d * PI).sqrt();
    let a6 = beta * r * m * d.sqrt() / (2.0 * sqrt_pi) * gauss_bound(c1);
    let a7 = d * m * gauss_bound(c1);

    let p1 = 2.0 / (d * sqrt_pi)
        * ((u0n + beta) * ((u0i / beta) * (u0n + beta)).exp() + (u0n + beta).powi(2) / d);
    let p_bracket = |c: f64| {
        6.0 * m
            + 3.0 / (c * c) * (2.0 / (3.0 * E)).powf(1.5)
            + 6.0 * m / (c * c) * (6.0 / E).powf(1.5)
    };
    let p2 = d.sqrt() / (4.0 * sqrt_pi) * p_bracket(c2);
    let s6 = 6.0_f64.sqrt();
    let s3 = 3.0_f64.sqrt();
    let dc = c2 - 3.0 * c1;
    let sc = c2 + c1;
    let p31 = 1.0 / (sqrt_pi * E.powf(1.5))
        * (s6 * (3.0 * c2 - c1).powi(2) / (16.0 * dc.powi(3))
            + 27.0 * s3 / 4.0
            + 12.0 * s6 / dc.powi(3)
            + 6.0 * s3 / sc.powi(3));
    let p32 = 12.0 * s6 / (sqrt_pi * E.powf(1.5))
        * (1.0 / dc.powi(3)
            + 9.0 / 8.0
            + (3.0 * c2 - c1).powi(2) / (8.0 * dc.powi(3))
            + 1.0 / sc.powi(2));
    let p3 = r * beta * (p31 + p32);
    let p41 = s6 / (PI * E).sqrt() * (1.0 / dc.powi(2) + 1.0 / sc.powi(2));
    let p4 = d * (m * (p31 + p32) + p41);
    let p5 = 6.0_f64.powf(1.5) * s * d / (sqrt_pi * E.powf(1.5))
        * ((3.0 * c2 - c1) / dc.powi(3) + 3.0 / sc.powi(2));
    let p6 = beta
        * r
        * (1.0 / (2.0 * d) / (d * PI).sqrt()
            * (2.0 * d / h + 2.0 / h * (beta + 2.0 * d * m / h).powi(2))
            + (6.0 / (E * c1 * c1)).powf(1.5) * (18.0 * c1 * c1 + 1.0) / (4.0 * sqrt_pi)
                * (4.0 * d / h));
    let p7 = d.sqrt() / (4.0 * sqrt_pi) * p_bracket(c1);

    let w1 = 2.0 / (2.0 - d);
    let w2 = 2.0 * fnorm / (beta * (3.0 - d));
    let dup = 2.0 * s / (PI * d).sqrt();
    let h1_coefficient = w1 * (a2 + a3 + a4 + dup) + w2 * (a4 + a5 + a6 + dup);
    let h2_coefficient = w1 * (p1 + p2 + p3 + p4 + p5) + w2 * (p1 + p4 + p5 + p6 + p7);

    let caps = SigmaCaps {
        unit: 1.0,
        y1_excursion: c2 / (2.0 * (1.0 + beta) * (1.0 + m / (beta * beta))),
        y0_excursion: c1 / (beta + 2.0 * m * d / h),
        y0_kernel_variation: h / (4.0 * m * (beta + 2.0 * d * m / h)),
        h1: 1.0 / (h1_coefficient * h1_coefficient),
        h2: 1.0 / (h2_coefficient * h2_coefficient),
    };
    let sigma_max = caps.min().max(0.0);

    // sensitivity of sigma_max to dropping the duplicated 2S/sqrt(pi D)
    let h1_dedup = w1 * (a2 + a3 + a4 + dup) + w2 * (a4 + a6 + dup);
    let sigma_max_dedup_h1 = caps
        .unit
        .min(caps.y1_excursion)
        .min(caps.y0_excursion)
        .min(caps.y0_kernel_variation)
        .min(1.0 / (h1_dedup * h1_dedup))
        .min(caps.h2)
        .max(0.0);

    Certificate {
        valid: true,
        invalid_reasons: Vec::new(),
        a1,
        a1_statement_variant: a1_statement,
        a2,
        a3,
        a31,
        a32,
        a4,
        a5,
        a6,
        a7,
        p1,
        p2,
        p3,
        p31,
        p32,
        p4,
        p41,
        p5,
        p6,
        p7,
        e1,
        e2,
        e3,
        h,
        r,
        s,
        m,
        h1_coefficient,
        h2_coefficient,
        sigma_max_dedup_h1,
        flags: flags.clone(),
        sigma_caps: caps,
        sigma_max,
    }
}

/// The admissible horizon: minimum of the unit cap, the two geometric
/// excursion caps, the kernel-variation cap, and the two contraction caps.
pub fn sigma_admissible(cert: &Certificate) -> f64 {
    if !cert.valid {
        return 0.0;
    }
    cert.sigma_caps.min().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{derive_constants, FunctionSpec, ProblemData};

    fn sample_data() -> (ProblemData, DerivedData) {
        // a dataset passing every hypothesis: small front, moderate beta
        let beta = 0.3;
        let f0 = 0.46;
        let b = 0.125;
        let u0 = FunctionSpec::Polynomial(vec![f0, -(f0 - beta) / b]);
        let data =
            ProblemData::new(1.0, beta, b, 0.09, u0, FunctionSpec::constant(f0), 0.5).unwrap();
        let derived = derive_constants(&data, 256).unwrap();
        (data, derived)
    }

    #[test]
    fn hypotheses_pass_on_the_sample_dataset() {
        let (data, derived) = sample_data();
        let flags = check_hypotheses(&data, &derived);
        assert!(flags.hip, "f = 0.46 > 0.45 = 3 beta / 2");
        assert!((flags.hip_margin - 0.01).abs() < 1e-12);
        assert!(flags.d_range && flags.c1_range && flags.ipp && flags.ip);
        assert!(flags.all_pass());
    }

    #[test]
    fn d_out_of_range_is_flagged() {
        let (data, derived) = sample_data();
        let mut data = data;
        data.d = 2.5;
        let flags = check_hypotheses(&data, &derived);
        assert!(!flags.d_range);
        assert!(flags.d_range_margin < 0.0);
        let cert = compute_certificate(&data, &derived, &flags);
        assert!(!cert.valid);
        assert_eq!(cert.sigma_max, 0.0);
    }

    #[test]
    fn ipp_violation_matches_hand_arithmetic() {
        // ||f|| = 2, beta = 0.1, C1 = 0.2, U0 = 1.5767:
        // (2.1)(0.4 + 4.7301) = 10.773 > 2D for D = 1
        let derived = DerivedData {
            u0_integral: 1.5767,
            c2: 0.2 + 1.5767,
            norm_u0: 2.0,
            norm_u0prime_over_u0: 1.0,
            norm_f: 2.0,
            norm_fprime: 0.0,
        };
        let data = ProblemData::new(
            1.0,
            0.1,
            1.0,
            0.2,
            FunctionSpec::constant(2.0),
            FunctionSpec::constant(2.0),
            0.5,
        )
        .unwrap();
        let flags = check_hypotheses(&data, &derived);
        assert!(!flags.ipp);
        assert!((flags.ipp_margin - (2.0 - 10.77321)).abs() < 1e-3);
        let cert = compute_certificate(&data, &derived, &flags);
        assert!(!cert.valid);
        assert!(cert.invalid_reasons.iter().any(|r| r.contains("ipp")));
    }

    #[test]
    fn e2_closed_form() {
        // ||f|| = 2, D = 1 gives E2 = 2
        let (data, mut derived) = sample_data();
        derived.norm_f = 2.0;
        let flags = check_hypotheses(&data, &derived);
        let cert = compute_certificate(&data, &derived, &flags);
        assert!((cert.e2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn certificate_is_internally_consistent() {
        let (data, derived) = sample_data();
        let flags = check_hypotheses(&data, &derived);
        let cert = compute_certificate(&data, &derived, &flags);
        assert!(cert.valid);
        assert!(cert.sigma_max > 0.0);
        // M = E1 + E2 R must hold by construction
        assert!((cert.m - (cert.e1 + cert.e2 * cert.r)).abs() < 1e-10 * cert.m);
        // the contraction coefficients certify their own caps
        assert!(cert.h1_coefficient * cert.sigma_caps.h1.sqrt() <= 1.0 + 1e-12);
        assert!(cert.h2_coefficient * cert.sigma_caps.h2.sqrt() <= 1.0 + 1e-12);
        assert!(cert.h1_coefficient * cert.sigma_max.sqrt() <= 1.0 + 1e-12);
        assert!(cert.h2_coefficient * cert.sigma_max.sqrt() <= 1.0 + 1e-12);
        assert_eq!(sigma_admissible(&cert), cert.sigma_max);
        // dropping the duplicated H1 term can only widen the horizon
        assert!(cert.sigma_max_dedup_h1 >= cert.sigma_max);
    }

    #[test]
    fn sigma_max_shrinks_as_f_grows() {
        let (data, derived) = sample_data();
        let mut last = f64::INFINITY;
        for scale in [1.0, 1.02, 1.05, 1.1] {
            let mut d2 = derived.clone();
            d2.norm_f = derived.norm_f * scale;
            let flags = check_hypotheses(&data, &d2);
            let cert = compute_certificate(&data, &d2, &flags);
            if !cert.valid {
                break;
            }
            assert!(
                cert.sigma_max <= last * (1.0 + 1e-12),
                "sigma_max must not increase with ||f||"
            );
            last = cert.sigma_max;
        }
    }

    #[test]
    fn certificate_serialization_roundtrip_is_lossless() {
        let (data, derived) = sample_data();
        let flags = check_hypotheses(&data, &derived);
        let cert = compute_certificate(&data, &derived, &flags);
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(cert, back);
    }
}
