use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("calibration set is empty")]
    EmptyCalibrationSet,

    #[error("case {case}: {context} does not match the shape of x ({height}x{width})")]
    CaseShape {
        case: usize,
        context: &'static str,
        height: usize,
        width: usize,
    },

    #[error(
        "no lambda in [{lambda_lo}, {lambda_hi}] satisfies the risk bound: \
         upper risk bound at lambda={lambda_hi} is {r_plus_at_hi} > alpha={alpha}"
    )]
    Infeasible {
        lambda_lo: f64,
        lambda_hi: f64,
        r_plus_at_hi: f64,
        alpha: f64,
    },
}
