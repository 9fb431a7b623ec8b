use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::runner::RunManifest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Some(Self {
            count: n,
            min: v[0],
            median,
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassRate {
    pub passed: usize,
    pub total: usize,
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub scenario: String,
    pub scenario_hash: String,
    pub seeds: usize,
    pub failed_seeds: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub checks: BTreeMap<String, PassRate>,
    pub m_estimate: Option<Spread>,
    pub tail_min_int_i: Option<Spread>,
    pub passed: bool,
}

/// Aggregates one or more manifests of the same scenario.
pub fn ensemble_summary(manifests: &[RunManifest]) -> Result<EnsembleSummary> {
    let first = manifests
        .first()
        .ok_or_else(|| Error::MissingData("at least one manifest is required".into()))?;
    if let Some(other) = manifests.iter().find(|m| m.scenario.name != first.scenario.name) {
        return Err(Error::MixedScenarios {
            first: first.scenario.name.clone(),
            other: other.scenario.name.clone(),
        });
    }
    let seeds: Vec<_> = manifests.iter().flat_map(|m| &m.seeds).collect();
    let mut verdicts = BTreeMap::new();
    let mut checks: BTreeMap<String, PassRate> = BTreeMap::new();
    let mut m_values = Vec::new();
    let mut tails = Vec::new();
    for s in &seeds {
        if let Some(t) = &s.threshold {
            *verdicts.entry(t.verdict.to_string()).or_insert(0) += 1;
        }
        for c in &s.checks {
            let e = checks.entry(c.name.clone()).or_insert(PassRate {
                passed: 0,
                total: 0,
                informational: c.informational,
            });
            e.total += 1;
            e.passed += c.passed as usize;
            e.informational &= c.informational;
        }
        if let Some(m) = &s.metrics {
            m_values.push(m.m_estimate);
            if let Some(t) = m.tail_min_int_i {
                tails.push(t);
            }
        }
    }
    Ok(EnsembleSummary {
        scenario: first.scenario.name.clone(),
        scenario_hash: first.scenario_hash.clone(),
        seeds: seeds.len(),
        failed_seeds: seeds.iter().filter(|s| !s.passed()).count(),
        verdicts,
        checks,
        m_estimate: Spread::of(&m_values),
        tail_min_int_i: Spread::of(&tails),
        passed: manifests.iter().all(|m| m.passed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_statistics() {
        let s = Spread::of(&[3.0, 1.0, 2.0, f64::NAN]).unwrap();
        assert_eq!((s.count, s.min, s.median, s.max), (3, 1.0, 2.0, 3.0));
        let s = Spread::of(&[4.0, 1.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert!(Spread::of(&[]).is_none());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(ensemble_summary(&[]).is_err());
    }
}
