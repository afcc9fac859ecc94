use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    #[error("invalid k-grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The fixed step must resolve the shortest delay: `dt <= min(delay) / 8`.
    #[error("step dt = {dt} exceeds the bound {bound} (shortest delay / 8)")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("t = {t} lies beyond the end of the trajectory (t_end = {t_end})")]
    OutOfRange { t: f64, t_end: f64 },

    #[error("field snapshot does not contain the mirror position z = 0")]
    MissingOrigin,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{}", fmt_parse(.line, .field, .message))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_parse(line: &Option<usize>, field: &Option<String>, message: &str) -> String {
    let mut out = String::from("parse error");
    if let Some(line) = line {
        out.push_str(&format!(" at line {line}"));
    }
    if let Some(field) = field {
        out.push_str(&format!(" in field `{field}`"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }
}
