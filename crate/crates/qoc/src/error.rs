use thiserror::Error;

/// Failures of gate-target construction, cost evaluation, or optimization.
#[derive(Debug, Error)]
pub enum QocError {
    /// A task field violates its contract.
    #[error("bad task: {0}")]
    BadTask(String),

    /// A gate specification string could not be parsed.
    #[error("unknown gate spec '{0}'")]
    BadGateSpec(String),

    /// Every restart produced a non-finite cost.
    #[error("all {0} restarts diverged")]
    AllRestartsDiverged(usize),

    /// Graph construction failed.
    #[error(transparent)]
    Autodiff(#[from] mlqoc_autodiff::AutodiffError),

    /// Model forward pass failed.
    #[error(transparent)]
    Model(#[from] mlqoc_model::ModelError),

    /// Device evolution failed.
    #[error(transparent)]
    Device(#[from] mlqoc_device::DeviceError),

    /// Pulse construction failed.
    #[error(transparent)]
    Pulse(#[from] mlqoc_pulse::PulseError),
}
