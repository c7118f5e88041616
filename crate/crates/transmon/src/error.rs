use thiserror::Error;

/// Errors produced while building or calibrating a transmon model.
#[derive(Debug, Error)]
pub enum TransmonError {
    #[error("E_J and E_C must be positive (got E_J = {ej_ghz} GHz, E_C = {ec_ghz} GHz)")]
    NonPositiveEnergy { ej_ghz: f64, ec_ghz: f64 },
    #[error("charge cutoff must be at least 20 (got {0})")]
    CutoffTooSmall(usize),
    #[error("need at least 3 retained levels (got {0})")]
    TooFewLevels(usize),
    #[error("{requested} levels requested from a basis of {basis} charge states")]
    LevelsExceedBasis { requested: usize, basis: usize },
    #[error("parameter {name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("calibration target of {target_ghz} GHz cannot be bracketed")]
    NoBracket { target_ghz: f64 },
    #[error("calibration failed to converge within {0} iterations")]
    NoConvergence(usize),
}
