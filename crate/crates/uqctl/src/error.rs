use conformal_cal::CalError;
use grid_core::GridError;
use mri_sim::SimError;
use quantile_model::ModelError;
use thiserror::Error;
use uq_metrics::MetricsError;

/// Pipeline failure classified by scriptable exit code: 2 config, 3 data,
/// 4 training, 5 infeasible calibration.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("calibration infeasible: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Training(_) => 4,
            CliError::Infeasible(_) => 5,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Parameter(_) | SimError::AcsBudget { .. } => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Diverged { .. } | ModelError::Numeric { .. } => {
                CliError::Training(e.to_string())
            }
            ModelError::Parameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<CalError> for CliError {
    fn from(e: CalError) -> Self {
        match e {
            CalError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            CalError::Parameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Parameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub(crate) fn io_data(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Data("x".into()).exit_code(), 3);
        assert_eq!(CliError::Training("x".into()).exit_code(), 4);
        assert_eq!(CliError::Infeasible("x".into()).exit_code(), 5);
    }

    #[test]
    fn upstream_errors_classify_by_kind() {
        let e: CliError = ModelError::Diverged { step: 3 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = ModelError::Parameter("bad".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = CalError::Infeasible {
            lambda_lo: 0.0,
            lambda_hi: 5.0,
            r_plus_at_hi: 0.4,
            alpha: 0.1,
        }
        .into();
        assert_eq!(e.exit_code(), 5);
        let e: CliError = SimError::Parameter("bad".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
