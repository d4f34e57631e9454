use serde::{Deserialize, Serialize};

use super::autocorr::AutocorrEstimate;
use crate::error::{Error, Result};

/// First time the autocorrelator falls to the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lifetime {
    Crossed(f64),
    /// Still above threshold at the last time point.
    Censored { horizon: f64 },
}

impl Lifetime {
    pub fn value(self) -> Option<f64> {
        match self {
            Lifetime::Crossed(t) => Some(t),
            Lifetime::Censored { .. } => None,
        }
    }
}

pub fn lifetime(est: &AutocorrEstimate, threshold: f64) -> Result<Lifetime> {
    lifetime_from_series(&est.times, &est.values, threshold)
}

/// Linear interpolation between the last sample above `threshold` and the
/// first at or below it.
pub fn lifetime_from_series(times: &[f64], values: &[f64], threshold: f64) -> Result<Lifetime> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    if values[0] <= threshold {
        return Err(Error::InvalidArgument(format!(
            "G(0) = {} is not above the threshold {threshold}",
            values[0]
        )));
    }
    for k in 1..times.len() {
        if values[k] <= threshold {
            let (t0, t1) = (times[k - 1], times[k]);
            let (g0, g1) = (values[k - 1], values[k]);
            let frac = (g0 - threshold) / (g0 - g1);
            return Ok(Lifetime::Crossed(t0 + frac * (t1 - t0)));
        }
    }
    Ok(Lifetime::Censored {
        horizon: *times.last().unwrap(),
    })
}
