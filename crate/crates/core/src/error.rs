use thiserror::Error;

/// Errors surfaced by engine construction and run loops.
///
/// Engines never panic on bad input; parameter-domain violations and internal
/// invariant breaches are reported through this type so callers can map them
/// to diagnostics and exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its accepted domain.
    #[error("{name} = {value} is outside the accepted range {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Exact particle-count conservation was violated mid-run.
    #[error("conservation violated at step {time}: expected {expected} particles, found {found}")]
    ConservationViolation {
        time: u32,
        expected: u64,
        found: u64,
    },
}
