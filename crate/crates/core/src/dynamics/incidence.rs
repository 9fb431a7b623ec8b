use crate::error::{Error, Result};

use super::state::EMPTY_POPULATION;

/// Standard incidence `SI/N`, set to zero where the population vanishes.
pub fn incidence(s: &[f64], i: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    if i.len() != s.len() || r.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            got: i.len().min(r.len()),
        });
    }
    for (field, u) in [("S", s), ("I", i), ("R", r)] {
        if let Some((index, &value)) = u.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
            return Err(Error::NegativeInput { field, index, value });
        }
    }
    Ok(incidence_unchecked(s, i, r))
}

pub(crate) fn incidence_unchecked(s: &[f64], i: &[f64], r: &[f64]) -> Vec<f64> {
    s.iter()
        .zip(i)
        .zip(r)
        .map(|((&s, &i), &r)| {
            let n = s + i + r;
            if n < EMPTY_POPULATION {
                0.0
            } else {
                s * i / n
            }
        })
        .collect()
}
