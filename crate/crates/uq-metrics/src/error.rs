use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {context} is {actual_height}x{actual_width}, expected {height}x{width}")]
    Shape {
        context: &'static str,
        height: usize,
        width: usize,
        actual_height: usize,
        actual_width: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
