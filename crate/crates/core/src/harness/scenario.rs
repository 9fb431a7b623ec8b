use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::asymptotics::{dyadic_schedule, Verdict};
use crate::dynamics::{default_dt, ModelParams, SolverConfig, StateField};
use crate::error::{Error, Result};
use crate::randomness::{geometric_horizons, snap_to_grid, NoiseSpec, Profile};
use crate::spatial::{build_grid, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub dimension: usize,
    pub lengths: Vec<f64>,
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    /// Base seed; ensemble member `k` uses `seed + k`.
    pub seed: u64,
    pub dt: f64,
    pub window: [f64; 2],
    pub kappa: f64,
    pub sigma: f64,
    #[serde(default)]
    pub phi0: f64,
    pub gamma0: f64,
    pub gamma_max: f64,
    #[serde(default = "one")]
    pub a0: f64,
    #[serde(default = "one")]
    pub a1: f64,
    #[serde(default)]
    pub profile: Profile,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Constant at every interior point.
    #[default]
    Flat,
    /// `Π sin(π x_i / L_i)`.
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialBlock {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub shape: Shape,
}

impl Default for InitialBlock {
    fn default() -> Self {
        Self {
            s: 1.0,
            i: 0.1,
            r: 0.0,
            shape: Shape::Flat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    pub t0: f64,
    /// Defaults to the end of the noise window.
    pub t1: Option<f64>,
    /// Defaults to the rule in [`default_dt`], rounded down to the noise grid.
    pub dt: Option<f64>,
    pub record_every: Option<usize>,
    pub snapshot_times: Vec<f64>,
    pub solver: SolverConfig,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            t0: 0.0,
            t1: None,
            dt: None,
            record_every: None,
            snapshot_times: Vec::new(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    SumCancellation,
    Positivity,
    EradicationCheck,
    PersistenceCheck,
    Attractor,
    Dimension,
    #[serde(alias = "N*")]
    DiseaseFree,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(v.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HorizonBlock {
    pub t0: f64,
    pub n0: f64,
    pub count: usize,
}

impl Default for HorizonBlock {
    fn default() -> Self {
        Self {
            t0: 0.0,
            n0: 1.0,
            count: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub sum_cancellation: f64,
    pub clamp: f64,
    pub infected_decay: f64,
    pub envelope: f64,
    pub recovered_decay: f64,
    pub susceptible: f64,
    pub growth_slack: f64,
    pub nstar: f64,
    pub slab: f64,
    pub collapse: f64,
    pub dimension: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sum_cancellation: 1e-8,
            clamp: 1e-10,
            infected_decay: 1e-6,
            envelope: 1e-6,
            recovered_decay: 1e-4,
            susceptible: 1e-4,
            growth_slack: 1e-3,
            nstar: 1e-10,
            slab: 1e-6,
            collapse: 1e-6,
            dimension: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisBlock {
    pub checks: Vec<CheckKind>,
    pub tolerances: Tolerances,
    pub m_horizons: HorizonBlock,
    /// Pullback times for the attractor cloud.
    pub t_list: Vec<f64>,
    /// Step for the attractor runs; defaults to `run.dt`.
    pub attractor_dt: Option<f64>,
    /// Mixed-composition seeds on top of the three pure corners.
    pub attractor_extra_seeds: usize,
    /// Box sizes as dyadic exponents `[lo, hi]`, i.e. `2^{-lo} … 2^{-hi}`.
    pub eps_schedule: [i32; 2],
    /// Persistence detection floor; defaults to `10⁻⁴ ‖Λ‖₂/(λ₀ + d)`.
    pub delta: Option<f64>,
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self {
            checks: vec![CheckKind::SumCancellation, CheckKind::Positivity],
            tolerances: Tolerances::default(),
            m_horizons: HorizonBlock::default(),
            t_list: vec![0.0, 5.0, 10.0, 20.0],
            attractor_dt: None,
            attractor_extra_seeds: 5,
            eps_schedule: [3, 7],
            delta: None,
        }
    }
}

impl AnalysisBlock {
    pub fn wants(&self, kind: CheckKind) -> bool {
        self.checks.contains(&kind)
    }

    pub fn eps(&self) -> Vec<f64> {
        dyadic_schedule(self.eps_schedule[0], self.eps_schedule[1])
    }

    pub fn horizons(&self) -> Vec<f64> {
        geometric_horizons(self.m_horizons.n0, self.m_horizons.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleBlock {
    pub seeds: usize,
}

impl Default for EnsembleBlock {
    fn default() -> Self {
        Self { seeds: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_verdict: Option<Verdict>,
    pub grid: GridBlock,
    pub params: ModelParams,
    pub noise: NoiseBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub ensemble: EnsembleBlock,
}

const BUILTINS: [(&str, &str); 3] = [
    ("eradication-1d", include_str!("../../scenarios/eradication-1d.json")),
    ("endemic-1d", include_str!("../../scenarios/endemic-1d.json")),
    ("gap-1d", include_str!("../../scenarios/gap-1d.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Sets `dotted.key` in a JSON tree; the value is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::validation(assignment, "override must look like key=value"))?;
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| Error::validation(parts[..depth].join("."), "is not an object"))?;
        if depth + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(Error::validation(key, "empty key"))
}

impl Scenario {
    /// Parses, applies overrides, fills defaults and validates.
    pub fn from_json_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut tree: Value = serde_json::from_str(text)?;
        for o in overrides {
            apply_override(&mut tree, o)?;
        }
        let mut sc: Scenario = serde_json::from_value(tree)?;
        sc.resolve()?;
        Ok(sc)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let src = builtin_source(name).ok_or_else(|| {
            Error::validation("name", format!("unknown built-in scenario `{name}`; have {:?}", builtin_names()))
        })?;
        Self::from_json_str(src, &[])
    }

    /// Loads a scenario file; a bare built-in name is accepted when no such
    /// file exists.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => match path.to_str().and_then(builtin_source) {
                Some(src) => src.to_string(),
                None => return Err(Error::io(path, e)),
            },
        };
        Self::from_json_str(&text, overrides)
    }

    /// Canonical JSON of the resolved scenario.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    pub fn build_grid(&self) -> Result<Grid> {
        build_grid(self.grid.dimension, &self.grid.lengths, &self.grid.n)
            .map_err(|e| Error::validation("grid", e.to_string()))
    }

    pub fn noise_seed(&self, member: usize) -> u64 {
        self.noise.seed.wrapping_add(member as u64)
    }

    pub fn noise_spec(&self, member: usize) -> NoiseSpec {
        let n = &self.noise;
        NoiseSpec {
            seed: self.noise_seed(member),
            dt: n.dt,
            t_lo: n.window[0],
            t_hi: n.window[1],
            kappa: n.kappa,
            sigma: n.sigma,
            phi0: n.phi0,
            gamma0: n.gamma0,
            gamma_max: n.gamma_max,
            a0: n.a0,
            a1: n.a1,
            profile: n.profile,
        }
    }

    pub fn t1(&self) -> f64 {
        self.run.t1.unwrap_or(self.noise.window[1])
    }

    pub fn dt(&self) -> f64 {
        self.run.dt.expect("resolved scenario has a step")
    }

    pub fn record_every(&self) -> usize {
        self.run.record_every.unwrap_or(1)
    }

    pub fn attractor_dt(&self) -> f64 {
        self.analysis.attractor_dt.unwrap_or_else(|| self.dt())
    }

    pub fn initial_state(&self, grid: &Grid) -> StateField {
        let init = &self.initial;
        let shape = |x: &[f64]| match init.shape {
            Shape::Flat => 1.0,
            Shape::Sine => x
                .iter()
                .zip(grid.lengths())
                .map(|(&xi, &l)| (std::f64::consts::PI * xi / l).sin())
                .product(),
        };
        StateField {
            s: grid.sample(|x| init.s * shape(x)),
            i: grid.sample(|x| init.i * shape(x)),
            r: grid.sample(|x| init.r * shape(x)),
            tick: 0,
            t: 0.0,
        }
    }

    fn within_window(&self, key: &str, t: f64) -> Result<()> {
        let [lo, hi] = self.noise.window;
        if !(t >= lo && t <= hi) {
            return Err(Error::validation(key, format!("time {t} is outside the noise window [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn positive(key: &str, v: f64) -> Result<()> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::validation(key, format!("must be positive, got {v}")));
        }
        Ok(())
    }

    fn on_noise_grid(&self, key: &str, t: f64) -> Result<i64> {
        snap_to_grid(t, self.noise.dt)
            .map_err(|_| Error::validation(key, format!("{t} is not a multiple of noise.dt = {}", self.noise.dt)))
    }

    /// Fills defaults and checks every invariant, naming the offending key.
    pub fn resolve(&mut self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        let grid = self.build_grid()?;

        let p = &self.params;
        if !(p.d > 0.0) || !p.d.is_finite() {
            return Err(Error::validation("params.d", "d must be positive"));
        }
        for (key, v) in [("params.lambda", p.lambda), ("params.b", p.b), ("params.c", p.c)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(key, format!("{} must be non-negative", &key[7..])));
            }
        }

        let n = &self.noise;
        Self::positive("noise.dt", n.dt)?;
        Self::positive("noise.kappa", n.kappa)?;
        if !(n.window[0] < 0.0 && n.window[1] > 0.0) {
            return Err(Error::validation("noise.window", "must satisfy lo < 0 < hi"));
        }
        if !(n.sigma >= 0.0) {
            return Err(Error::validation("noise.sigma", "must be non-negative"));
        }
        if !(n.gamma0 >= 0.0) || !(n.gamma_max >= n.gamma0) {
            return Err(Error::validation("noise.gamma_max", "need 0 ≤ gamma0 ≤ gamma_max"));
        }
        if !(n.a0 > 0.0) || !(n.a1 >= n.a0) {
            return Err(Error::validation("noise.a1", "need 0 < a0 ≤ a1"));
        }

        for (key, v) in [
            ("initial.s", self.initial.s),
            ("initial.i", self.initial.i),
            ("initial.r", self.initial.r),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(key, "must be non-negative"));
            }
        }

        // run block
        let t1 = self.t1();
        self.run.t1 = Some(t1);
        self.within_window("run.t0", self.run.t0)?;
        self.within_window("run.t1", t1)?;
        if !(t1 > self.run.t0) {
            return Err(Error::validation("run.t1", format!("must exceed run.t0 = {}", self.run.t0)));
        }
        let k0 = self.on_noise_grid("run.t0", self.run.t0)?;
        let k1 = self.on_noise_grid("run.t1", t1)?;
        let dt = match self.run.dt {
            Some(dt) => {
                Self::positive("run.dt", dt)?;
                self.on_noise_grid("run.dt", dt)?;
                dt
            }
            None => {
                // largest step below the stability rule that divides the run
                let h = grid.h().iter().copied().fold(f64::INFINITY, f64::min);
                let raw = default_dt(h, self.noise.a1, self.noise.gamma_max);
                let cap = ((raw / self.noise.dt).floor() as i64).max(1);
                let stride = (1..=cap).rev().find(|s| (k1 - k0) % s == 0).unwrap_or(1);
                stride as f64 * self.noise.dt
            }
        };
        self.run.dt = Some(dt);
        let stride = self.on_noise_grid("run.dt", dt)?;
        if (k1 - k0) % stride != 0 {
            return Err(Error::validation("run.t1", "run length must be a multiple of run.dt"));
        }
        let steps = ((k1 - k0) / stride) as usize;
        let every = self.run.record_every.unwrap_or_else(|| (steps / 2000).max(1));
        if every == 0 {
            return Err(Error::validation("run.record_every", "must be at least 1"));
        }
        self.run.record_every = Some(every);
        for (k, &t) in self.run.snapshot_times.iter().enumerate() {
            let key = format!("run.snapshot_times[{k}]");
            if !(t >= self.run.t0 && t <= t1) {
                return Err(Error::validation(key, format!("{t} is outside [run.t0, run.t1]")));
            }
            let kt = self.on_noise_grid(&key, t)?;
            if (kt - k0) % stride != 0 {
                return Err(Error::validation(key, "must fall on a step of the run"));
            }
        }
        if self.run.solver.cg_tol <= 0.0 || self.run.solver.cg_max_iter == 0 {
            return Err(Error::validation("run.solver", "cg_tol and cg_max_iter must be positive"));
        }

        // analysis block
        let a = &self.analysis;
        let tol = &a.tolerances;
        for (key, v) in [
            ("sum_cancellation", tol.sum_cancellation),
            ("clamp", tol.clamp),
            ("infected_decay", tol.infected_decay),
            ("envelope", tol.envelope),
            ("recovered_decay", tol.recovered_decay),
            ("susceptible", tol.susceptible),
            ("growth_slack", tol.growth_slack),
            ("nstar", tol.nstar),
            ("slab", tol.slab),
            ("collapse", tol.collapse),
            ("dimension", tol.dimension),
        ] {
            Self::positive(&format!("analysis.tolerances.{key}"), v)?;
        }
        if let Some(delta) = a.delta {
            Self::positive("analysis.delta", delta)?;
        }
        let horizons = a.horizons();
        if horizons.is_empty() || !(a.m_horizons.n0 > 0.0) {
            return Err(Error::validation("analysis.m_horizons", "need n0 > 0 and count ≥ 1"));
        }
        self.within_window("analysis.m_horizons.t0", a.m_horizons.t0)?;
        let span = self.noise.window[1] - a.m_horizons.t0;
        if *horizons.last().unwrap() >= span {
            return Err(Error::validation(
                "analysis.m_horizons",
                format!("largest horizon {} needs more than the {span} time units left in the noise window", horizons.last().unwrap()),
            ));
        }
        if a.eps_schedule[1] - a.eps_schedule[0] < 2 {
            return Err(Error::validation("analysis.eps_schedule", "need at least 3 box sizes"));
        }
        if a.wants(CheckKind::Attractor) || a.wants(CheckKind::Dimension) {
            if a.t_list.is_empty() || a.t_list[0] < 0.0 || a.t_list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::validation("analysis.t_list", "must be non-negative and strictly increasing"));
            }
            let adt = self.attractor_dt();
            Self::positive("analysis.attractor_dt", adt)?;
            let astride = self.on_noise_grid("analysis.attractor_dt", adt)?;
            for (k, &t) in a.t_list.iter().enumerate() {
                let key = format!("analysis.t_list[{k}]");
                self.within_window(&key, -t)?;
                if self.on_noise_grid(&key, t)? % astride != 0 {
                    return Err(Error::validation(key, "must be a multiple of the attractor step"));
                }
            }
        }
        if self.ensemble.seeds == 0 {
            return Err(Error::validation("ensemble.seeds", "seed count must be at least 1"));
        }
        Ok(())
    }
}
