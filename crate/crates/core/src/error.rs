use thiserror::Error;

/// Errors raised by the distribution engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StableError {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("degenerate law (point mass at 0): lambda = 0 has no canonical theta")]
    Degenerate,
    #[error("left Poisson shift by {shift} does not exist: delta would become {delta}")]
    LeftShiftNonexistent { shift: f64, delta: f64 },
    #[error("series coefficient {index} is {value}, below the -1e-10 floor")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("series coefficient {index} is not finite")]
    SeriesOverflow { index: usize },
    #[error("need at least {required} samples, got {got}")]
    InsufficientData { required: usize, got: usize },
    #[error("copy count n = {0} is outside 1..={max}", max = crate::stability::MAX_PMF_COPIES)]
    CopyCount(u32),
}

pub type Result<T> = std::result::Result<T, StableError>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(StableError::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

pub(crate) fn check_apgf_arg(t: f64) -> Result<()> {
    if (0.0..=2.0).contains(&t) {
        Ok(())
    } else {
        Err(StableError::Domain {
            name: "t",
            value: t,
            domain: "[0, 2]",
        })
    }
}
