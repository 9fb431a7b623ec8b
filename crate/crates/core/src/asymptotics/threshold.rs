use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::spatial::SpectralData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EradicationPredicted,
    PersistencePredicted,
    Gap,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::EradicationPredicted => "eradication-predicted",
            Verdict::PersistencePredicted => "persistence-predicted",
            Verdict::Gap => "gap",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub m_estimate: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub a0: f64,
    pub a1: f64,
    pub alpha: f64,
    /// `λ₀ + α`.
    pub eradication_bound: f64,
    /// `λ₁ a₁ + α`.
    pub persistence_bound: f64,
    /// `m / (λ₁ + α)`, only defined for `a ≡ 1`.
    pub r0: Option<f64>,
    pub ratio_to_eradication_bound: f64,
    pub ratio_to_persistence_bound: f64,
    pub verdict: Verdict,
}

pub fn threshold_report(params: &ModelParams, spectral: &SpectralData, a0: f64, a1: f64, m_estimate: f64) -> ThresholdReport {
    let alpha = params.alpha();
    let lambda1 = spectral.lambda1;
    let lambda0 = a0 * lambda1;
    let eradication_bound = lambda0 + alpha;
    let persistence_bound = lambda1 * a1 + alpha;
    let verdict = if m_estimate < eradication_bound {
        Verdict::EradicationPredicted
    } else if m_estimate > persistence_bound {
        Verdict::PersistencePredicted
    } else {
        Verdict::Gap
    };
    ThresholdReport {
        m_estimate,
        lambda0,
        lambda1,
        a0,
        a1,
        alpha,
        eradication_bound,
        persistence_bound,
        r0: (a0 == 1.0 && a1 == 1.0).then(|| m_estimate / (lambda1 + alpha)),
        ratio_to_eradication_bound: m_estimate / eradication_bound,
        ratio_to_persistence_bound: m_estimate / persistence_bound,
        verdict,
    }
}
