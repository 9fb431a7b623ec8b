use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{
    absorbing_radius, attractor_seeds, box_counting_dimension, disease_free_invariance_residual,
    disease_free_solution, gronwall_envelope_check, growth_epsilon, persistence_functional, project_state,
    pullback_attractor_sample, threshold_report, w_growth_check, AttractorSample, BoxDimension, ThresholdReport,
    Verdict,
};
use crate::dynamics::{stationary_total_population, Integrator, SimOptions, Trajectory};
use crate::error::{Error, Result};
use crate::randomness::{mean_value_m, MeanValueEstimate, RandomEnvironment};
use crate::spatial::{assemble_diffusion, first_eigenpair, Eigenpair, Grid, SpectralData};

use super::export;
use super::scenario::{CheckKind, Scenario};
use super::summary::{ensemble_summary, EnsembleSummary};

pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Observed statistic; `None` when it is not a finite number.
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    /// Reported without a theoretical claim behind it; does not affect the
    /// exit status.
    pub informational: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, value: f64, threshold: f64, passed: bool, claim: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            value: value.is_finite().then_some(value),
            threshold: threshold.is_finite().then_some(threshold),
            informational: !claim,
            detail: detail.into(),
        }
    }

    /// Counts towards the run status: claimed and failed.
    pub fn is_failure(&self) -> bool {
        !self.informational && !self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SeedOutputs {
    pub trajectory: Option<String>,
    pub noise: Option<String>,
    pub threshold: Option<String>,
    pub attractor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub m_estimate: f64,
    pub clamp_fraction: f64,
    pub final_norm_i: f64,
    pub tail_min_int_i: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub index: usize,
    pub noise_seed: u64,
    pub outputs: SeedOutputs,
    pub threshold: Option<ThresholdReport>,
    pub metrics: Option<SeedMetrics>,
    pub checks: Vec<CheckResult>,
    pub error: Option<String>,
}

impl SeedResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.iter().any(CheckResult::is_failure)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario_hash: String,
    pub scenario: Scenario,
    pub software_version: String,
    /// Discrete `λ₁ʰ` and the continuum value it approximates.
    pub lambda1_discrete: f64,
    pub lambda1_continuum: f64,
    pub seeds: Vec<SeedResult>,
    pub passed: bool,
}

impl RunManifest {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Hex SHA-256 of the canonical scenario JSON.
pub fn scenario_hash(scenario: &Scenario) -> String {
    hex::encode(Sha256::digest(scenario.canonical_json().as_bytes()))
}

/// Everything one ensemble member produced, kept in memory.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub index: usize,
    pub env: RandomEnvironment,
    pub mean_value: MeanValueEstimate,
    pub threshold: ThresholdReport,
    pub trajectory: Trajectory,
    pub attractor: Option<AttractorSample>,
    pub dimension: Option<BoxDimension>,
    pub checks: Vec<CheckResult>,
}

/// Shared per-scenario data.
pub struct Prepared {
    pub scenario: Scenario,
    pub grid: Grid,
    pub eigen: Eigenpair,
    pub hash: String,
}

impl Prepared {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let grid = scenario.build_grid()?;
        let eigen = first_eigenpair(&grid)?;
        let hash = scenario_hash(&scenario);
        Ok(Self {
            scenario,
            grid,
            eigen,
            hash,
        })
    }

    pub fn spectral(&self) -> SpectralData {
        SpectralData::new(&self.eigen, self.scenario.noise.a0)
    }

    /// Runs every requested analysis for ensemble member `index`.
    pub fn run_seed(&self, index: usize) -> Result<SeedRun> {
        let sc = &self.scenario;
        let grid = &self.grid;
        let an = &sc.analysis;
        let tol = &an.tolerances;
        let env = RandomEnvironment::sample(&sc.noise_spec(index))?;
        let spectral = self.spectral();
        let lambda0 = spectral.lambda0;
        let params = sc.params;
        let alpha = params.alpha();

        let mean_value = mean_value_m(&env.gamma, an.m_horizons.t0, &an.horizons())?;
        let threshold = threshold_report(&params, &spectral, sc.noise.a0, sc.noise.a1, mean_value.value);
        let verdict = threshold.verdict;
        let mut checks = Vec::new();

        if let Some(expected) = sc.expected_verdict {
            checks.push(CheckResult::new(
                "verdict",
                threshold.m_estimate,
                f64::NAN,
                verdict == expected,
                true,
                format!("predicted {verdict}, expected {expected}"),
            ));
        }

        let integ = Integrator::new(grid, params, &env, sc.dt(), sc.run.solver)?.with_eigenvector(&self.eigen.v1);
        let u0 = sc.initial_state(grid);
        let opts = SimOptions {
            record_every: sc.record_every(),
            snapshot_times: sc.run.snapshot_times.clone(),
            track_total: an.wants(CheckKind::SumCancellation),
        };
        let t1 = sc.t1();
        let trajectory = integ.simulate(&u0, sc.run.t0, t1, &opts)?;

        if an.wants(CheckKind::SumCancellation) {
            let worst = trajectory.sum_defect.iter().copied().fold(0.0, f64::max);
            checks.push(CheckResult::new(
                "sum-cancellation",
                worst,
                tol.sum_cancellation,
                worst <= tol.sum_cancellation,
                true,
                "max relative ‖(S+I+R) − N_linear‖₂ over recorded times",
            ));
        }
        if an.wants(CheckKind::Positivity) {
            let worst = trajectory.max_clamp_ratio;
            checks.push(CheckResult::new(
                "positivity",
                worst,
                tol.clamp,
                worst <= tol.clamp,
                true,
                "largest clamped negative mass relative to ‖u‖_X per step",
            ));
        }

        let eradication = verdict == Verdict::EradicationPredicted;
        let persistence = verdict == Verdict::PersistencePredicted;
        let first = trajectory.rows.first().expect("trajectory has rows");
        let last = trajectory.rows.last().expect("trajectory has rows");

        if an.wants(CheckKind::EradicationCheck) {
            let i0 = first.norm_i;
            let i_rel = if i0 > 0.0 { last.norm_i / i0 } else { last.norm_i };
            checks.push(CheckResult::new(
                "infected-decay",
                i_rel,
                tol.infected_decay,
                i_rel <= tol.infected_decay,
                eradication,
                "‖I(t1)‖₂ / ‖I₀‖₂",
            ));
            let env_rep = gronwall_envelope_check(&trajectory, &env.gamma, lambda0, alpha)?;
            checks.push(CheckResult::new(
                "envelope",
                env_rep.min_margin_relative,
                -tol.envelope,
                env_rep.min_margin_relative >= -tol.envelope,
                eradication,
                format!("min (envelope − ‖I‖₂)/‖I₀‖₂, attained at t = {}", env_rep.worst_t),
            ));
            let ri0: Vec<f64> = u0.r.iter().zip(&u0.i).map(|(r, i)| r + i).collect();
            let ri0 = grid.norm(&ri0);
            let r_rel = if ri0 > 0.0 { last.norm_r / ri0 } else { last.norm_r };
            checks.push(CheckResult::new(
                "recovered-decay",
                r_rel,
                tol.recovered_decay,
                r_rel <= tol.recovered_decay,
                eradication,
                "‖R(t1)‖₂ / ‖R₀ + I₀‖₂",
            ));
            let nstar = disease_free_solution(&integ, t1, lambda0, tol.nstar)?;
            let diff: Vec<f64> = trajectory.final_state.s.iter().zip(&nstar.n).map(|(s, n)| s - n).collect();
            let scale = grid.norm(&nstar.n);
            let s_rel = if scale > 0.0 { grid.norm(&diff) / scale } else { grid.norm(&diff) };
            checks.push(CheckResult::new(
                "susceptible-limit",
                s_rel,
                tol.susceptible,
                s_rel <= tol.susceptible,
                eradication,
                "‖S(t1) − N*(t1)‖₂ / ‖N*(t1)‖₂",
            ));
        }

        if an.wants(CheckKind::PersistenceCheck) {
            let delta = an
                .delta
                .unwrap_or_else(|| 1e-4 * params.lambda_norm(grid) / (lambda0 + params.d));
            let pers = persistence_functional(&trajectory, delta)?;
            checks.push(CheckResult::new(
                "persistence",
                pers.tail_min_int_i,
                delta,
                pers.persistent,
                persistence,
                "min ∫I dx over the second half of the run against δ",
            ));
            let eps = growth_epsilon(mean_value.value, spectral.lambda1, sc.noise.a1, alpha);
            if eps > 0.0 {
                let growth =
                    w_growth_check(&trajectory, &env.gamma, spectral.lambda1, sc.noise.a1, alpha, eps, tol.growth_slack)?;
                checks.push(CheckResult::new(
                    "w-growth",
                    growth.min_ratio,
                    1.0 - tol.growth_slack,
                    growth.holds,
                    persistence,
                    format!(
                        "min w/bound on {} points in {} stretches with (I+R)/N ≤ {eps:.4}; τ₀ = {}",
                        growth.checked,
                        growth.intervals.len(),
                        growth.tau0.map_or("none".to_string(), |t| t.to_string()),
                    ),
                ));
            } else {
                checks.push(CheckResult::new(
                    "w-growth",
                    eps,
                    0.0,
                    false,
                    persistence,
                    "ε is not positive for this m, so there is nothing to monitor",
                ));
            }
        }

        if an.wants(CheckKind::DiseaseFree) {
            let residual = disease_free_invariance_residual(&integ, sc.run.t0, t1, lambda0, tol.nstar)?;
            checks.push(CheckResult::new(
                "disease-free-invariance",
                residual,
                2.0 * tol.nstar,
                residual <= 2.0 * tol.nstar,
                true,
                "‖N(t1; t0, N*(t0)) − N*(t1)‖₂ / ‖N*(t1)‖₂",
            ));
            if env.field.is_constant() {
                let nstar = disease_free_solution(&integ, t1, lambda0, tol.nstar)?;
                let op = assemble_diffusion(grid, &env.field, 0);
                let stat = stationary_total_population(&op, params.lambda, params.d)?;
                let diff: Vec<f64> = nstar.n.iter().zip(&stat).map(|(a, b)| a - b).collect();
                let scale = grid.norm(&stat);
                let rel = if scale > 0.0 { grid.norm(&diff) / scale } else { grid.norm(&diff) };
                checks.push(CheckResult::new(
                    "disease-free-stationary",
                    rel,
                    1e-8,
                    rel <= 1e-8,
                    true,
                    "N* against the direct solve of (d − A) N = Λ",
                ));
            }
        }

        let mut attractor = None;
        let mut dimension = None;
        if an.wants(CheckKind::Attractor) || an.wants(CheckKind::Dimension) {
            let ainteg = Integrator::new(grid, params, &env, sc.attractor_dt(), sc.run.solver)?;
            let radius = absorbing_radius(params.lambda_norm(grid), lambda0, params.d);
            let seeds = attractor_seeds(grid, radius, an.attractor_extra_seeds);
            let nstar0 = disease_free_solution(&ainteg, 0.0, lambda0, tol.nstar)?;
            let sample = pullback_attractor_sample(&ainteg, &seeds, &an.t_list, Some(&nstar0.n))?;
            let d0 = sample.diameters[0];
            let dl = *sample.diameters.last().unwrap();
            if an.wants(CheckKind::Attractor) {
                let ratio = if d0 > 0.0 { dl / d0 } else { dl };
                checks.push(CheckResult::new(
                    "attractor-collapse",
                    ratio,
                    tol.collapse,
                    ratio <= tol.collapse,
                    eradication,
                    format!(
                        "cloud diameter at T = {} relative to T = {}",
                        an.t_list.last().unwrap(),
                        an.t_list[0]
                    ),
                ));
                let slab = *sample.slab_residuals.last().unwrap();
                checks.push(CheckResult::new(
                    "attractor-slab",
                    slab,
                    tol.slab,
                    slab <= tol.slab,
                    eradication,
                    "largest ‖(S+I+R) − N*(0)‖₂ in the final cloud",
                ));
            }
            if an.wants(CheckKind::Dimension) {
                let cloud = sample.clouds.last().unwrap();
                let points: Vec<Vec<f64>> = cloud.iter().map(|u| project_state(grid, u, &self.eigen.v1)).collect();
                let dim = box_counting_dimension(&points, &an.eps())?;
                checks.push(CheckResult::new(
                    "box-dimension",
                    dim.slope,
                    tol.dimension,
                    dim.slope <= tol.dimension,
                    eradication,
                    format!("slope of log N_ε over the final projected cloud, counts {:?}", dim.counts),
                ));
                dimension = Some(dim);
            }
            attractor = Some(sample);
        }

        Ok(SeedRun {
            index,
            env,
            mean_value,
            threshold,
            trajectory,
            attractor,
            dimension,
            checks,
        })
    }

    fn seed_result(&self, index: usize, out_dir: Option<&Path>) -> SeedResult {
        let noise_seed = self.scenario.noise_seed(index);
        let mut result = SeedResult {
            index,
            noise_seed,
            outputs: SeedOutputs::default(),
            threshold: None,
            metrics: None,
            checks: Vec::new(),
            error: None,
        };
        let run = match self.run_seed(index) {
            Ok(run) => run,
            Err(e) => {
                result.error = Some(e.to_string());
                return result;
            }
        };
        let tail = run.checks.iter().find(|c| c.name == "persistence").and_then(|c| c.value);
        result.metrics = Some(SeedMetrics {
            m_estimate: run.mean_value.value,
            clamp_fraction: run.env.gamma.clamp_fraction,
            final_norm_i: run.trajectory.rows.last().map_or(f64::NAN, |r| r.norm_i),
            tail_min_int_i: tail,
            steps: run.trajectory.steps,
        });
        result.threshold = Some(run.threshold.clone());
        result.checks = run.checks.clone();
        if let Some(dir) = out_dir {
            match export::write_seed(dir, self, &run) {
                Ok(outputs) => result.outputs = outputs,
                Err(e) => result.error = Some(e.to_string()),
            }
        }
        result
    }
}

/// Runs every ensemble member in parallel and, with `out_dir`, writes the
/// per-seed files, `manifest.json` and `ensemble_summary.json`.
pub fn run_scenario(scenario: &Scenario, out_dir: Option<&Path>) -> Result<RunManifest> {
    let prepared = Prepared::new(scenario.clone())?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let seeds: Vec<SeedResult> = (0..scenario.ensemble.seeds)
        .into_par_iter()
        .map(|k| prepared.seed_result(k, out_dir))
        .collect();
    let passed = seeds.iter().all(SeedResult::passed);
    let manifest = RunManifest {
        scenario_hash: prepared.hash.clone(),
        scenario: scenario.clone(),
        software_version: SOFTWARE_VERSION.to_string(),
        lambda1_discrete: prepared.eigen.lambda1,
        lambda1_continuum: crate::spatial::continuum_lambda1(&prepared.grid),
        seeds,
        passed,
    };
    if let Some(dir) = out_dir {
        export::write_json(&dir.join("manifest.json"), &manifest)?;
        let summary: EnsembleSummary = ensemble_summary(std::slice::from_ref(&manifest))?;
        export::write_json(&dir.join("ensemble_summary.json"), &summary)?;
    }
    Ok(manifest)
}

/// Per-seed output directory layout relative to the run directory.
pub(crate) fn seed_file(scenario: &Scenario, index: usize, kind: &str, ext: &str) -> PathBuf {
    PathBuf::from(format!("{}_seed{index:03}_{kind}.{ext}", scenario.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Scenario {
        Scenario::from_json_str(
            r#"{
            "name": "tiny",
            "expected_verdict": "eradication-predicted",
            "grid": {"dimension": 1, "lengths": [1.0], "n": [19]},
            "params": {"lambda": 1.0, "d": 0.1, "b": 0.05, "c": 0.2},
            "noise": {"seed": 4, "dt": 0.001, "window": [-20.0, 4.0], "kappa": 1.0, "sigma": 0.2,
                      "gamma0": 2.0, "gamma_max": 4.0},
            "run": {"t1": 2.0, "dt": 0.002, "record_every": 10},
            "analysis": {"checks": ["sum-cancellation", "positivity", "eradication-check", "N*", "attractor", "dimension"],
                         "tolerances": {"infected_decay": 0.5, "recovered_decay": 0.5, "susceptible": 0.5},
                         "m_horizons": {"n0": 0.25, "count": 3},
                         "t_list": [0.0, 2.0, 6.0]},
            "ensemble": {"seeds": 2}
        }"#,
            &[],
        )
        .unwrap()
    }

    #[test]
    fn small_eradication_run_passes() {
        let m = run_scenario(&tiny(), None).unwrap();
        assert_eq!(m.seeds.len(), 2);
        for s in &m.seeds {
            assert!(s.error.is_none(), "{:?}", s.error);
            assert_eq!(s.threshold.as_ref().unwrap().verdict, Verdict::EradicationPredicted);
            for c in &s.checks {
                assert!(c.passed, "{c:?}");
            }
        }
        assert!(m.passed);
        assert_ne!(m.seeds[0].noise_seed, m.seeds[1].noise_seed);
    }

    #[test]
    fn seed_errors_are_recorded_not_raised() {
        let mut sc = tiny();
        sc.analysis.tolerances.nstar = 1e-300;
        let m = run_scenario(&sc, None).unwrap();
        assert!(m.seeds.iter().all(|s| s.error.is_some()));
        assert!(!m.passed);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = tiny();
        let mut b = tiny();
        assert_eq!(scenario_hash(&a), scenario_hash(&b));
        b.noise.seed += 1;
        assert_ne!(scenario_hash(&a), scenario_hash(&b));
        assert_eq!(scenario_hash(&a).len(), 64);
    }
}
