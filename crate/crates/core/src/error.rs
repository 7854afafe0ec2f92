use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid chirp configuration: {0}")]
    InvalidChirp(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("insufficient slow-time: need at least 2 frames, got {0}")]
    InsufficientSlowTime(usize),
    #[error("angle not supported: {0} deg")]
    AngleNotSupported(f64),
    #[error("payload must be exactly {expected} bits, got {got}")]
    PayloadLength { expected: usize, got: usize },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("no packet found (best correlation {best:.3}, need {required:.3})")]
    NoPacketFound { best: f64, required: f64 },
    #[error("frequency {0} Hz outside the open band (0, fs/2)")]
    FrequencyOutOfBand(f64),
    #[error("calibration required: OOK levels have not been trained")]
    CalibrationRequired,
    #[error("infeasible schedule: speed bound admits at most {max_feasible_d_scan} sensing slots, need {required}")]
    InfeasibleSchedule { max_feasible_d_scan: u32, required: u32 },
    #[error("insufficient snapshots: {0}")]
    InsufficientSnapshots(String),
    #[error("IRS not found")]
    IrsNotFound,
    #[error("negative leg: total path {total} m is shorter than D_RS {d_rs} m")]
    NegativeLeg { total: f64, d_rs: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
