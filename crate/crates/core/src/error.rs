use num_complex::Complex64;
use thiserror::Error;

use crate::model::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse {what} from {text:?}")]
    Parse { what: &'static str, text: String },

    #[error("potential iteration did not contract after {iterations} steps (last iterate {last})")]
    Divergence { iterations: usize, last: f64 },

    #[error("address is infeasible: backward potentials exceed {guard}")]
    InfeasibleAddress { guard: f64 },

    #[error("{z} lies on a strip boundary (nearest strips {below} / {above})")]
    StripBoundary {
        z: Complex64,
        below: Symbol,
        above: Symbol,
    },

    #[error("no preimage of {w} in strip {strip}")]
    Branch { strip: Symbol, w: Complex64 },

    #[error("{w} is a critical value")]
    CriticalValue { w: Complex64 },

    #[error("address {address} is not realisable by the sinh family at entry {index}")]
    Inadmissible { address: String, index: usize },

    #[error("potential {t} does not exceed the endpoint potential {t_s}")]
    BelowEndpoint { t: f64, t_s: f64 },

    #[error("ray trace did not converge (residuals {residuals:?})")]
    RayNonConvergence { residuals: Vec<f64> },

    #[error("landing point iteration did not converge (last step {last_step})")]
    LandingNonConvergence { last_step: f64 },

    #[error("ray sample at {z} is within the guard distance of a domain boundary")]
    ItineraryAmbiguous { z: Complex64 },

    #[error("{z} is not in the fundamental-domain region (|z| or |f(z)| below {radius})")]
    Label { z: Complex64, radius: f64 },

    #[error("configuration check failed: {0}")]
    Config(String),

    #[error("branch continuation ambiguous near {at} after {refinements} refinements")]
    Continuation { at: Complex64, refinements: usize },

    #[error("orbit point {w} entered the disk of radius {radius}")]
    OrbitTooSmall { w: Complex64, radius: f64 },

    #[error("{0} is outside the domain of the estimate")]
    Domain(String),

    #[error("mark sequence too short to select comparison points for |z| = {modulus}")]
    SequenceTooShort { modulus: f64 },

    #[error("{z} needs at least {required} functional-equation steps, got {given}")]
    InsufficientSteps { z: Complex64, required: u32, given: u32 },

    #[error("no critical point with vanishing value found in the search box")]
    SearchFailure,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
