use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::asymptotics::project_state;
use crate::error::{Error, Result};

use super::runner::{seed_file, Prepared, SeedOutputs, SeedRun};

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn header(hash: &str, columns: &[&str]) -> String {
    format!("# scenario_hash={hash}\n{}\n", columns.join(","))
}

fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{v:e}").expect("writing to a string");
    }
    out.push('\n');
}

pub fn trajectory_csv(hash: &str, run: &SeedRun) -> String {
    let mut out = header(
        hash,
        &["t", "norm_S", "norm_I", "norm_R", "norm_N", "int_I", "w", "ratio_IR_over_N", "gamma"],
    );
    for r in &run.trajectory.rows {
        push_row(
            &mut out,
            &[r.t, r.norm_s, r.norm_i, r.norm_r, r.norm_n, r.int_i, r.w, r.ratio_ir_over_n, r.gamma],
        );
    }
    out
}

/// Noise traces on the recorded ticks of the run.
pub fn noise_csv(hash: &str, run: &SeedRun) -> String {
    let mut out = header(hash, &["t", "W", "Phi", "gamma"]);
    let env = &run.env;
    let dt = env.dt();
    for &k in &run.trajectory.ticks {
        push_row(
            &mut out,
            &[k as f64 * dt, env.path.value(k), env.phi.series.at(k), env.gamma.at(k)],
        );
    }
    out
}

pub fn attractor_csv(hash: &str, prepared: &Prepared, run: &SeedRun) -> Option<String> {
    let sample = run.attractor.as_ref()?;
    let mut out = header(
        hash,
        &["T", "member", "norm_S", "norm_I", "norm_R", "w", "S_dot_v1", "cloud_diameter"],
    );
    for ((t, cloud), diam) in sample.t_list.iter().zip(&sample.clouds).zip(&sample.diameters) {
        for (j, u) in cloud.iter().enumerate() {
            let p = project_state(&prepared.grid, u, &prepared.eigen.v1);
            let mut row = vec![*t, j as f64];
            row.extend(p);
            row.push(*diam);
            push_row(&mut out, &row);
        }
    }
    Some(out)
}

#[derive(Serialize)]
struct ThresholdFile<'a> {
    scenario_hash: &'a str,
    noise_seed: u64,
    lambda1_continuum: f64,
    clamp_fraction: f64,
    mean_value: &'a crate::randomness::MeanValueEstimate,
    report: &'a crate::asymptotics::ThresholdReport,
    box_dimension: Option<&'a crate::asymptotics::BoxDimension>,
}

pub(crate) fn write_seed(dir: &Path, prepared: &Prepared, run: &SeedRun) -> Result<SeedOutputs> {
    let sc = &prepared.scenario;
    let hash = prepared.hash.as_str();
    let rel = |kind: &str, ext: &str| seed_file(sc, run.index, kind, ext);
    let mut outputs = SeedOutputs::default();

    let p = rel("trajectory", "csv");
    write_text(&dir.join(&p), &trajectory_csv(hash, run))?;
    outputs.trajectory = Some(p.display().to_string());

    let p = rel("noise", "csv");
    write_text(&dir.join(&p), &noise_csv(hash, run))?;
    outputs.noise = Some(p.display().to_string());

    let p = rel("threshold", "json");
    write_json(
        &dir.join(&p),
        &ThresholdFile {
            scenario_hash: hash,
            noise_seed: run.env.path.seed(),
            lambda1_continuum: crate::spatial::continuum_lambda1(&prepared.grid),
            clamp_fraction: run.env.gamma.clamp_fraction,
            mean_value: &run.mean_value,
            report: &run.threshold,
            box_dimension: run.dimension.as_ref(),
        },
    )?;
    outputs.threshold = Some(p.display().to_string());

    if let Some(text) = attractor_csv(hash, prepared, run) {
        let p = rel("attractor", "csv");
        write_text(&dir.join(&p), &text)?;
        outputs.attractor = Some(p.display().to_string());
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip_exactly() {
        let mut s = String::new();
        let v = [0.1, 1.0 / 3.0, -2.5e-300, f64::NAN];
        push_row(&mut s, &v);
        let back: Vec<f64> = s.trim().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(back[..3], v[..3]);
        assert!(back[3].is_nan());
    }

    #[test]
    fn header_carries_the_hash() {
        let h = header("abc", &["t", "x"]);
        assert_eq!(h, "# scenario_hash=abc\nt,x\n");
    }
}
