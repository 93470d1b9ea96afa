use semiflat_core::asymptotics::AsymptoticsError;
use semiflat_core::curvature::CurvatureError;
use semiflat_core::fiber::ModelError;
use semiflat_core::ma::MaError;
use semiflat_core::sl2z::Sl2zError;
use semiflat_core::sobolev::SobolevError;
use thiserror::Error;

/// Failure of a command, classified by exit code.
#[derive(Debug, Error)]
pub enum LabError {
    /// Exit code 1.
    #[error("check failed: {0}")]
    Check(String),
    /// Exit code 2.
    #[error("invalid input: {0}")]
    Input(String),
    /// Exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Check(_) => 1,
            LabError::Input(_) | LabError::Io { .. } => 2,
            LabError::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        LabError::Input(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        LabError::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<ModelError> for LabError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonFinite | ModelError::NonPositivePairing => LabError::Numerical(e.to_string()),
            _ => LabError::Input(e.to_string()),
        }
    }
}

impl From<Sl2zError> for LabError {
    fn from(e: Sl2zError) -> Self {
        match e {
            Sl2zError::Overflow => LabError::Numerical(e.to_string()),
            _ => LabError::Input(e.to_string()),
        }
    }
}

impl From<MaError> for LabError {
    fn from(e: MaError) -> Self {
        match e {
            MaError::MaxIterations { .. }
            | MaError::DampingUnderflow(_)
            | MaError::NotPositive
            | MaError::LinearSolver { .. } => LabError::Numerical(e.to_string()),
            _ => LabError::Input(e.to_string()),
        }
    }
}

impl From<AsymptoticsError> for LabError {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Model(m) => m.into(),
            AsymptoticsError::Quad(_) | AsymptoticsError::Fit(_) => LabError::Numerical(e.to_string()),
            _ => LabError::Input(e.to_string()),
        }
    }
}

impl From<CurvatureError> for LabError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::Model(m) => m.into(),
            CurvatureError::WrongModel(_) => LabError::Input(e.to_string()),
        }
    }
}

impl From<SobolevError> for LabError {
    fn from(e: SobolevError) -> Self {
        match e {
            SobolevError::Quad(_) => LabError::Numerical(e.to_string()),
            _ => LabError::Input(e.to_string()),
        }
    }
}
