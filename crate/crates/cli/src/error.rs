use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    /// Rejected before any computation ran.
    Config { violations: Vec<String> },
    Numerical(tzlab::Error),
    Io(String),
}

impl CliError {
    pub fn config(violations: Vec<String>) -> Self {
        CliError::Config { violations }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match self {
            CliError::Config { violations } => json!({
                "kind": "config",
                "message": format!("{} configuration problem(s)", violations.len()),
                "violations": violations,
            }),
            CliError::Numerical(e) => json!({
                "kind": "numerical",
                "message": e.to_string(),
                "diagnostics": diagnostics(e),
            }),
            CliError::Io(msg) => json!({"kind": "io", "message": msg}),
        };
        json!({ "error": body })
    }
}

fn diagnostics(e: &tzlab::Error) -> Value {
    use tzlab::Error as E;
    match e {
        E::InvalidParameter { name, reason } => json!({"variant": "invalid_parameter", "name": name, "reason": reason}),
        E::AsymmetricBand { upper, lower } => json!({"variant": "asymmetric_band", "upper": upper, "lower": lower}),
        E::BandTooWide { gamma, limit } => json!({"variant": "band_too_wide", "gamma": gamma, "limit": limit}),
        E::Domain { what, value, lo, hi } => json!({"variant": "domain", "what": what, "value": value, "lo": lo, "hi": hi}),
        E::NoRoot { reason } => json!({"variant": "no_root", "reason": reason}),
        E::NoConvergence {
            solver,
            iterations,
            residuals,
        } => json!({"variant": "no_convergence", "solver": solver, "iterations": iterations, "residuals": residuals}),
        E::StepTooLarge { bound } => json!({"variant": "step_too_large", "bound": bound}),
        E::Peclet {
            cell_peclet,
            limit,
            suggested_dx,
        } => json!({"variant": "peclet", "cell_peclet": cell_peclet, "limit": limit, "suggested_dx": suggested_dx}),
        E::ClaimNotNeumann { at, slope } => json!({"variant": "claim_not_neumann", "at": at, "slope": slope}),
        E::Unsupported(msg) => json!({"variant": "unsupported", "reason": msg}),
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { violations } => write!(f, "invalid configuration: {}", violations.join("; ")),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tzlab::Error> for CliError {
    fn from(e: tzlab::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
