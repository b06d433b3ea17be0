use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("length mismatch for `{name}`: expected {expected}, got {got}")]
    LengthMismatch {
        name: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("grid of {m} points aliases a polynomial with cutoff {fc} (need m >= 2*fc+1)")]
    GridTooCoarse { m: usize, fc: usize },

    #[error("real-valuedness violated: {context} has imaginary residue {residue:.3e} (tolerance {tol:.3e})")]
    ImaginaryResidue {
        context: &'static str,
        residue: f64,
        tol: f64,
    },

    #[error("point set is not Rayleigh-regular for (d={d}, r={r}): {detail}")]
    NotRayleighRegular { d: f64, r: usize, detail: String },

    #[error("interpolation system is ill-conditioned (estimate {cond:.3e}): closest pair ({a}, {b}) at wrap distance {dist:.3e}")]
    IllConditioned { cond: f64, a: f64, b: f64, dist: f64 },

    #[error("interpolation constraints out of range after rescaling: |{which}| = {value:.3e} exceeds {limit:.3e} at node {node}")]
    ConstraintOutOfRange {
        which: &'static str,
        value: f64,
        limit: f64,
        node: f64,
    },

    #[error("could not draw a feasible support after {attempts} attempts: {detail}")]
    InfeasibleGeometry { attempts: usize, detail: String },

    #[error("neighborhoods overlap: points {a} and {b} are {dist:.3e} apart, need >= {min:.3e}")]
    OverlappingNeighborhoods { a: f64, b: f64, dist: f64, min: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
