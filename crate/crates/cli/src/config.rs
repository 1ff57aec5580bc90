//! Flat key-value run configuration: one `key = value` pair per line,
//! `#` comments, unknown keys rejected with their line number.

use fbsolve_core::FunctionSpec;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub d: f64,
    pub beta: f64,
    pub b: f64,
    pub c1: f64,
    pub u0: FunctionSpec,
    pub f: FunctionSpec,
    pub n_time: usize,
    pub n_space: usize,
    pub sigma: f64,
    pub picard_tol: f64,
    pub outer_tol: f64,
    pub max_iter: usize,
    pub max_outer: usize,
    pub relaxation: f64,
    pub emit_field: bool,
}

#[derive(Debug)]
pub struct ParseError {
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn err(message: impl Into<String>) -> ParseError {
    ParseError {
        message: message.into(),
    }
}

fn parse_f64(key: &str, line_no: usize, raw: &str) -> Result<f64, ParseError> {
    raw.trim().parse::<f64>().map_err(|_| {
        err(format!(
            "line {line_no}: key \"{key}\" expects a number, got \"{raw}\""
        ))
    })
}

fn parse_usize(key: &str, line_no: usize, raw: &str) -> Result<usize, ParseError> {
    raw.trim().parse::<usize>().map_err(|_| {
        err(format!(
            "line {line_no}: key \"{key}\" expects an integer, got \"{raw}\""
        ))
    })
}

fn parse_bool(key: &str, line_no: usize, raw: &str) -> Result<bool, ParseError> {
    match raw.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(format!(
            "line {line_no}: key \"{key}\" expects true or false, got \"{other}\""
        ))),
    }
}

/// `poly c0 c1 ...` or `table <start> <end> : v0 v1 ...`
fn parse_function(key: &str, line_no: usize, raw: &str) -> Result<FunctionSpec, ParseError> {
    let raw = raw.trim();
    if let Some(rest) = raw.strip_prefix("poly") {
        let coeffs: Result<Vec<f64>, _> = rest
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect();
        let coeffs = coeffs.map_err(|_| {
            err(format!(
                "line {line_no}: key \"{key}\": malformed polynomial coefficients"
            ))
        })?;
        if coeffs.is_empty() {
            return Err(err(format!(
                "line {line_no}: key \"{key}\": a polynomial needs at least one coefficient"
            )));
        }
        return Ok(FunctionSpec::Polynomial(coeffs));
    }
    if let Some(rest) = raw.strip_prefix("table") {
        let (head, body) = rest.split_once(':').ok_or_else(|| {
            err(format!(
                "line {line_no}: key \"{key}\": table syntax is `table <start> <end> : v0 v1 ...`"
            ))
        })?;
        let bounds: Vec<&str> = head.split_whitespace().collect();
        if bounds.len() != 2 {
            return Err(err(format!(
                "line {line_no}: key \"{key}\": table needs exactly a start and an end"
            )));
        }
        let start = parse_f64(key, line_no, bounds[0])?;
        let end = parse_f64(key, line_no, bounds[1])?;
        let values: Result<Vec<f64>, _> = body
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect();
        let values = values.map_err(|_| {
            err(format!(
                "line {line_no}: key \"{key}\": malformed table values"
            ))
        })?;
        if values.len() < 2 {
            return Err(err(format!(
                "line {line_no}: key \"{key}\": a table needs at least two samples"
            )));
        }
        return Ok(FunctionSpec::Table {
            start,
            end,
            values,
            derivatives: None,
        });
    }
    Err(err(format!(
        "line {line_no}: key \"{key}\": expected `poly ...` or `table ...`, got \"{raw}\""
    )))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ParseError> {
    let mut d = None;
    let mut beta = None;
    let mut b = None;
    let mut c1 = None;
    let mut u0 = None;
    let mut f = None;
    let mut n_time = None;
    let mut n_space = None;
    let mut sigma = None;
    let mut picard_tol = 1e-10;
    let mut outer_tol = 1e-8;
    let mut max_iter = 200usize;
    let mut max_outer = 100usize;
    let mut relaxation = 1.0;
    let mut emit_field = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.split_once('#') {
            Some((head, _)) => head,
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            err(format!(
                "line {line_no}: expected `key = value`, got \"{line}\""
            ))
        })?;
        let key = key.trim();
        match key {
            "D" => d = Some(parse_f64(key, line_no, value)?),
            "beta" => beta = Some(parse_f64(key, line_no, value)?),
            "b" => b = Some(parse_f64(key, line_no, value)?),
            "C1" => c1 = Some(parse_f64(key, line_no, value)?),
            "u0" => u0 = Some(parse_function(key, line_no, value)?),
            "f" => f = Some(parse_function(key, line_no, value)?),
            "n_time" => n_time = Some(parse_usize(key, line_no, value)?),
            "n_space" => n_space = Some(parse_usize(key, line_no, value)?),
            "sigma" => sigma = Some(parse_f64(key, line_no, value)?),
            "picard_tol" => picard_tol = parse_f64(key, line_no, value)?,
            "outer_tol" => outer_tol = parse_f64(key, line_no, value)?,
            "max_iter" => max_iter = parse_usize(key, line_no, value)?,
            "max_outer" => max_outer = parse_usize(key, line_no, value)?,
            "relaxation" => relaxation = parse_f64(key, line_no, value)?,
            "emit_field" => emit_field = parse_bool(key, line_no, value)?,
            other => return Err(err(format!("line {line_no}: unknown key: {other}"))),
        }
    }

    let require =
        |name: &str, v: Option<f64>| v.ok_or_else(|| err(format!("missing required key: {name}")));
    let config = RunConfig {
        d: require("D", d)?,
        beta: require("beta", beta)?,
        b: require("b", b)?,
        c1: require("C1", c1)?,
        u0: u0.ok_or_else(|| err("missing required key: u0"))?,
        f: f.ok_or_else(|| err("missing required key: f"))?,
        n_time: n_time.ok_or_else(|| err("missing required key: n_time"))?,
        n_space: n_space.ok_or_else(|| err("missing required key: n_space"))?,
        sigma: require("sigma", sigma)?,
        picard_tol,
        outer_tol,
        max_iter,
        max_outer,
        relaxation,
        emit_field,
    };

    for (name, v) in [
        ("picard_tol", config.picard_tol),
        ("outer_tol", config.outer_tol),
        ("sigma", config.sigma),
        ("relaxation", config.relaxation),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(err(format!(
                "invariant violated: {name} must be positive, got {v}"
            )));
        }
    }
    for (name, v) in [("n_time", config.n_time), ("n_space", config.n_space)] {
        if v < 16 {
            return Err(err(format!(
                "invariant violated: {name} must be at least 16, got {v}"
            )));
        }
    }
    Ok(config)
}
