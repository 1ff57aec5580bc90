//! Command implementations: pipeline orchestration, CSV emission, and the
//! JSON run manifest.

use crate::config::RunConfig;
use fbsolve_core::*;
use serde::Serialize;
// the core prelude exports its own Result alias; command plumbing wants std's
use std::fmt::Write as _;
use std::path::Path;
use std::result::Result;

/// Failure modes mapped to process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Exit 1: configuration or usage problems.
    Usage(String),
    /// Exit 2: certification failed (hypothesis violated or data
    /// structurally incompatible).
    Hypothesis(String),
    /// Exit 3: the solver did not converge or left its validity region.
    Solver(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) => 1,
            RunError::Hypothesis(_) => 2,
            RunError::Solver(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Usage(m) | RunError::Hypothesis(m) | RunError::Solver(m) => m,
        }
    }
}

fn solver_error(e: FbError) -> RunError {
    match e {
        FbError::NonConvergence { .. } | FbError::HorizonExceeded { .. } => {
            RunError::Solver(e.to_string())
        }
        other => RunError::Usage(other.to_string()),
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    derived: Option<&'a DerivedData>,
    hypothesis_flags: Option<&'a HypothesisFlags>,
    certificate: Option<&'a Certificate>,
    sigma_max: Option<f64>,
    /// True only when the certificate is valid and the run horizon stays
    /// inside the admissible one.
    certified_run: Option<bool>,
    convergence: Option<Convergence>,
    residuals: Option<&'a ResidualReport>,
    mms: Option<&'a [MmsRow]>,
    failure: Option<String>,
}

#[derive(Debug, Serialize)]
struct Convergence {
    outer_iterations: usize,
    outer_residuals: Vec<f64>,
    inner_iterations: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct MmsRow {
    pub case: String,
    pub n_time: usize,
    pub error: f64,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), RunError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| RunError::Usage(format!("cannot create output directory: {e}")))?;
    std::fs::write(dir.join(name), contents)
        .map_err(|e| RunError::Usage(format!("cannot write {name}: {e}")))
}

fn write_manifest(dir: &Path, manifest: &Manifest<'_>) -> Result<(), RunError> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| RunError::Usage(format!("manifest serialization failed: {e}")))?;
    write_file(dir, "manifest.json", &(json + "\n"))
}

struct Prepared {
    data: ProblemData,
    derived: DerivedData,
    profiles: InitialProfiles,
    flags: HypothesisFlags,
    certificate: Certificate,
}

fn prepare(config: &RunConfig) -> Result<Prepared, RunError> {
    let data = ProblemData::new(
        config.d,
        config.beta,
        config.b,
        config.c1,
        config.u0.clone(),
        config.f.clone(),
        config.sigma,
    )
    .map_err(|e| RunError::Usage(e.to_string()))?;
    let derived =
        derive_constants(&data, config.n_space).map_err(|e| RunError::Hypothesis(e.to_string()))?;
    let profiles = build_initial_profiles(&data, &derived, config.n_space)
        .map_err(|e| RunError::Usage(e.to_string()))?;
    let flags = check_hypotheses(&data, &derived);
    let certificate = compute_certificate(&data, &derived, &flags);
    Ok(Prepared {
        data,
        derived,
        profiles,
        flags,
        certificate,
    })
}

pub fn run_certify(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let p = match prepare(config) {
        Ok(p) => p,
        Err(e) => {
            // structural incompatibilities still produce a manifest
            let manifest = Manifest {
                version: VERSION,
                command: "certify",
                config,
                derived: None,
                hypothesis_flags: None,
                certificate: None,
                sigma_max: None,
                certified_run: None,
                convergence: None,
                residuals: None,
                mms: None,
                failure: Some(e.message().to_string()),
            };
            write_manifest(out, &manifest)?;
            return Err(e);
        }
    };
    let sigma_max = sigma_admissible(&p.certificate);
    let manifest = Manifest {
        version: VERSION,
        command: "certify",
        config,
        derived: Some(&p.derived),
        hypothesis_flags: Some(&p.flags),
        certificate: Some(&p.certificate),
        sigma_max: Some(sigma_max),
        certified_run: Some(p.certificate.valid && config.sigma <= sigma_max),
        convergence: None,
        residuals: None,
        mms: None,
        failure: None,
    };
    write_manifest(out, &manifest)?;
    if !p.flags.all_pass() || !p.certificate.valid {
        let failed: Vec<&str> = [
            (!p.flags.hip, "hip"),
            (!p.flags.u0_above_beta, "u0 > beta"),
            (!p.flags.d_range, "D range"),
            (!p.flags.c1_range, "C1 range"),
            (!p.flags.ipp, "ipp"),
            (!p.flags.ip, "ip"),
        ]
        .iter()
        .filter(|(bad, _)| *bad)
        .map(|(_, name)| *name)
        .collect();
        return Err(RunError::Hypothesis(format!(
            "existence hypotheses failed: {}",
            failed.join(", ")
        )));
    }
    println!("certified: sigma_max = {}", fmt17(sigma_max));
    Ok(())
}

struct Solved {
    bundle: SolutionBundle,
    parametric: ParametricSolution,
}

fn solve(config: &RunConfig, p: &Prepared) -> Result<Solved, RunError> {
    let grid =
        GridSpec::time(config.sigma, config.n_time).map_err(|e| RunError::Usage(e.to_string()))?;
    let params = SolverParams {
        picard_tol: config.picard_tol,
        outer_tol: config.outer_tol,
        max_iter: config.max_iter,
        max_outer: config.max_outer,
        relaxation: config.relaxation,
    };
    let pi = if p.certificate.valid {
        Some(PiSpec::from_certificate(&p.certificate).map_err(|e| RunError::Usage(e.to_string()))?)
    } else {
        None
    };
    let bundle = solve_outer(
        &p.data,
        &p.profiles,
        &grid,
        config.n_space,
        &params,
        pi.as_ref(),
    )
    .map_err(solver_error)?;
    let parametric = reconstruct_solution(&bundle, &p.data).map_err(solver_error)?;
    Ok(Solved { bundle, parametric })
}

fn boundaries_csv(s: &Solved) -> String {
    let grid = s.bundle.densities.phi1.grid;
    let mut out = String::from("t,y0,y1,phi1,phi2,h\n");
    for k in 0..=grid.n {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(grid.node(k)),
            fmt17(s.bundle.boundaries.y0.values[k]),
            fmt17(s.bundle.boundaries.y1.values[k]),
            fmt17(s.bundle.densities.phi1.values[k]),
            fmt17(s.bundle.densities.phi2.values[k]),
            fmt17(s.bundle.trace.h.values[k]),
        );
    }
    out
}

fn front_csv(s: &Solved) -> String {
    let grid = s.parametric.times;
    let mut out = String::from("t,s\n");
    for k in 0..=grid.n {
        let _ = writeln!(
            out,
            "{},{}",
            fmt17(grid.node(k)),
            fmt17(s.parametric.s.values[k])
        );
    }
    out
}

fn parametric_csv(s: &Solved) -> String {
    let grid = s.parametric.times;
    let mut out = String::from("t,x,u\n");
    for k in 0..=grid.n {
        let t = fmt17(grid.node(k));
        for (x, u) in s.parametric.x[k].iter().zip(&s.parametric.u[k]) {
            let _ = writeln!(out, "{},{},{}", t, fmt17(*x), fmt17(*u));
        }
    }
    out
}

fn field_csv(s: &Solved) -> String {
    let grid = s.bundle.w.times;
    let mut out = String::from("t,y,w\n");
    for (k, slice) in s.bundle.w.slices.iter().enumerate() {
        let t = fmt17(grid.node(k));
        for (y, w) in slice.nodes.iter().zip(&slice.values) {
            let _ = writeln!(out, "{},{},{}", t, fmt17(*y), fmt17(*w));
        }
    }
    out
}

fn emit_solution(config: &RunConfig, s: &Solved, out: &Path) -> Result<(), RunError> {
    write_file(out, "boundaries.csv", &boundaries_csv(s))?;
    write_file(out, "front.csv", &front_csv(s))?;
    write_file(out, "parametric.csv", &parametric_csv(s))?;
    if config.emit_field {
        write_file(out, "field.csv", &field_csv(s))?;
    }
    Ok(())
}

pub fn run_solve(config: &RunConfig, out: &Path, with_residuals: bool) -> Result<(), RunError> {
    let command = if with_residuals { "verify" } else { "solve" };
    let p = prepare(config)?;
    let sigma_max = sigma_admissible(&p.certificate);
    let solved = match solve(config, &p) {
        Ok(s) => s,
        Err(e) => {
            let manifest = Manifest {
                version: VERSION,
                command,
                config,
                derived: Some(&p.derived),
                hypothesis_flags: Some(&p.flags),
                certificate: Some(&p.certificate),
                sigma_max: Some(sigma_max),
                certified_run: Some(false),
                convergence: None,
                residuals: None,
                mms: None,
                failure: Some(e.message().to_string()),
            };
            write_manifest(out, &manifest)?;
            return Err(e);
        }
    };
    emit_solution(config, &solved, out)?;

    let residuals = if with_residuals {
        Some(
            residual_suite(&solved.bundle, &solved.parametric, &p.data, &p.profiles)
                .map_err(solver_error)?,
        )
    } else {
        None
    };
    let manifest = Manifest {
        version: VERSION,
        command,
        config,
        derived: Some(&p.derived),
        hypothesis_flags: Some(&p.flags),
        certificate: Some(&p.certificate),
        sigma_max: Some(sigma_max),
        certified_run: Some(p.certificate.valid && config.sigma <= sigma_max),
        convergence: Some(Convergence {
            outer_iterations: solved.bundle.outer_iterations,
            outer_residuals: solved.bundle.outer_residuals.clone(),
            inner_iterations: solved.bundle.inner_iterations.clone(),
        }),
        residuals: residuals.as_ref(),
        mms: None,
        failure: None,
    };
    write_manifest(out, &manifest)?;
    println!(
        "{command}: converged in {} outer iterations (last residual {})",
        solved.bundle.outer_iterations,
        fmt17(*solved.bundle.outer_residuals.last().unwrap()),
    );
    Ok(())
}

pub fn run_mms(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let data = ProblemData::new(
        config.d,
        config.beta,
        config.b,
        config.c1,
        config.u0.clone(),
        config.f.clone(),
        config.sigma,
    )
    .map_err(|e| RunError::Usage(e.to_string()))?;
    let grid = GridSpec::time(1.0, config.n_time).map_err(|e| RunError::Usage(e.to_string()))?;
    let y0 = GridFunction::from_fn(grid, |t| 0.5 - 0.1 * t);
    let y1 = GridFunction::from_fn(grid, |t| 1.0 + 0.2 * t);

    let mut rows = Vec::new();
    for (name, m) in [
        ("affine", ManufacturedHeat::Affine { a: 0.0, b: 1.0 }),
        (
            "parabolic_time",
            ManufacturedHeat::ParabolicTime { d: config.d },
        ),
    ] {
        let e = mms_representation_check(&m, &y0, &y1, &data, config.n_space)
            .map_err(|e| RunError::Usage(e.to_string()))?;
        rows.push(MmsRow {
            case: name.to_string(),
            n_time: config.n_time,
            error: e,
        });
    }
    for (name, side) in [("jump_above", Side::Above), ("jump_below", Side::Below)] {
        let psi = GridFunction::constant(grid, 1.0);
        let curve = GridFunction::constant(grid, 0.8);
        let e = jump_relation_check(&psi, &curve, side, &data)
            .map_err(|e| RunError::Usage(e.to_string()))?;
        rows.push(MmsRow {
            case: name.to_string(),
            n_time: config.n_time,
            error: e,
        });
    }

    let mut table = String::from("case,n_time,error\n");
    for row in &rows {
        let _ = writeln!(table, "{},{},{}", row.case, row.n_time, fmt17(row.error));
    }
    write_file(out, "mms.csv", &table)?;

    let manifest = Manifest {
        version: VERSION,
        command: "mms",
        config,
        derived: None,
        hypothesis_flags: None,
        certificate: None,
        sigma_max: None,
        certified_run: None,
        convergence: None,
        residuals: None,
        mms: Some(&rows),
        failure: None,
    };
    write_manifest(out, &manifest)?;
    for row in &rows {
        println!("{}: error {}", row.case, fmt17(row.error));
    }
    Ok(())
}
