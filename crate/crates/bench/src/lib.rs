//! Shared fixtures for the criterion benches.

use countstable::CompoundParams;

/// Representative laws: heavy tail, log form, finite-mean heavy tail, Hermite.
pub fn fixtures() -> Vec<(&'static str, CompoundParams)> {
    [
        ("alpha0.3", 0.3),
        ("alpha1", 1.0),
        ("alpha1.5", 1.5),
        ("hermite", 2.0),
    ]
    .into_iter()
    .map(|(name, alpha)| {
        (
            name,
            CompoundParams::new(1.0, 0.4, alpha).expect("valid fixture"),
        )
    })
    .collect()
}
