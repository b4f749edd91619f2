use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the metrics pipeline can report.
///
/// Variants that relate to missing or insufficient telemetry are grouped by
/// [`Error::is_coverage`] so frontends can distinguish data-quality problems
/// from malformed input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate device id `{0}`")]
    DuplicateDevice(String),

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("unknown device `{0}`")]
    UnknownDevice(String),

    #[error("device `{device}` attributed to run `{run}` is not IT equipment")]
    NotItDevice { run: String, device: String },

    #[error("invalid power sample for `{device}`: {reason}")]
    InvalidSample { device: String, reason: String },

    #[error("invalid power trace for `{device}`: {reason}")]
    InvalidTrace { device: String, reason: String },

    #[error("no power samples for device `{0}`")]
    NoSamples(String),

    #[error("coverage gap of {gap} s at t={at} for device `{device}` (max gap {max_gap} s)")]
    CoverageGap {
        device: String,
        at: f64,
        gap: f64,
        max_gap: f64,
    },

    #[error("invalid window [{start}, {end}]{}", line_suffix(*.line))]
    InvalidWindow {
        start: f64,
        end: f64,
        line: Option<usize>,
    },

    #[error("run `{run}`: work measure {work} does not match category {category}")]
    CategoryMismatch {
        run: String,
        category: String,
        work: String,
    },

    #[error("invalid run `{run}`: {reason}")]
    InvalidRun { run: String, reason: String },

    #[error("runs `{first}` and `{second}` overlap in time and share device `{device}`")]
    SharedDeviceConflict {
        device: String,
        first: String,
        second: String,
    },

    #[error("IT equipment energy is zero")]
    ZeroItEnergy,

    #[error("IT equipment power is zero")]
    ZeroItPower,

    #[error("total facility power is zero")]
    ZeroFacilityPower,

    #[error("no application runs")]
    NoRuns,

    #[error("shape mismatch: {0} values vs {1} weights")]
    ShapeMismatch(usize, usize),

    #[error("mixed performance units cannot be aggregated ({0} vs {1})")]
    UnitMismatch(String, String),

    #[error("invalid metric inputs: {0}")]
    InvalidInputs(String),

    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: negative or non-finite power")]
    InvalidPower { line: usize },

    #[error("line {line}: duplicate sample for device and timestamp")]
    DuplicateSample { line: usize },

    #[error("line {line}: schema error: {message}")]
    Schema { line: usize, message: String },

    #[error("invalid report: {0}")]
    InvalidReport(String),

    #[error("simulation model error: {0}")]
    Model(String),

    #[error("I/O error: {0}")]
    Io(String),
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

impl Error {
    /// True for telemetry coverage failures (missing samples or gaps).
    pub fn is_coverage(&self) -> bool {
        matches!(self, Error::NoSamples(_) | Error::CoverageGap { .. })
    }

    pub(crate) fn window(start: f64, end: f64) -> Self {
        Error::InvalidWindow {
            start,
            end,
            line: None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
