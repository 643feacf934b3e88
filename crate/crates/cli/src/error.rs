use std::fmt;

use serde::Serialize;

/// Failure of a command, split by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input. Exit code 2.
    Input {
        message: String,
        line: Option<u64>,
        column: Option<u64>,
    },
    /// A numerical cross-check failed. Exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// One JSON line for standard error.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: i32,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<u64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            column: Option<u64>,
        }
        let (kind, line, column) = match self {
            CliError::Input { line, column, .. } => ("input", *line, *column),
            CliError::Numerical(_) => ("numerical", None, None),
        };
        let l = Line {
            error: kind,
            exit_code: self.exit_code(),
            message: self.message(),
            line,
            column,
        };
        serde_json::to_string(&l).expect("plain struct serializes")
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Input { message, .. } | CliError::Numerical(message) => message.clone(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message())
    }
}

impl std::error::Error for CliError {}

impl From<jnr_core::Error> for CliError {
    fn from(e: jnr_core::Error) -> Self {
        use jnr_core::Error as E;
        match e {
            E::NoConvergence { .. } | E::BandInconsistency(_) | E::NotUnitary { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        CliError::Input {
            message: format!("CSV: {e}"),
            line,
            column: None,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_map_to_exit_three() {
        let e: CliError = jnr_core::Error::BandInconsistency("x".into()).into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = jnr_core::Error::InvalidArgument("x".into()).into();
        assert_eq!(e.exit_code(), 2);
        let line: serde_json::Value = serde_json::from_str(&e.to_json_line()).unwrap();
        assert_eq!(line["error"], "input");
    }
}
