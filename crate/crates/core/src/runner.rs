// SPDX-License-Identifier: Apache-2.0

//! End-to-end scenario runs, parameter sweeps and their file outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Scenario;
use crate::dynamics::{integrate, TrajectorySample};
use crate::entanglement::{
    negativity_series, transfer_report, NegativitySeries, PairId, Pattern, TransferReport,
};
use crate::error::{Error, Result};
use crate::params::{derive_params, DerivedParams};
use crate::steady::{fixed_points, threshold_report, SteadyState, ThresholdReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const SAMPLES_HEADER: [&str; 13] = [
    "t_s", "q", "p", "re_aL", "im_aL", "re_aR", "im_aR", "EN_ML", "EN_MR", "EN_LR", "vmin_ML",
    "vmin_MR", "vmin_LR",
];

pub const SERIES_HEADER: [&str; 3] = ["t_s", "EN", "v_minus"];

pub const SAMPLES_FILE: &str = "samples.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: Scenario,
    pub derived: DerivedParams,
    pub steady_states: Vec<SteadyState>,
    /// Present for left/right symmetric configurations only.
    pub threshold: Option<ThresholdReport>,
    pub samples: Vec<TrajectorySample>,
    /// One per pair, in `PairId::ALL` order.
    pub series: Vec<NegativitySeries>,
    /// One per pair, in `PairId::ALL` order.
    pub reports: Vec<TransferReport>,
    pub samples_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

impl RunResult {
    pub fn series(&self, pair: PairId) -> &NegativitySeries {
        &self.series[pair as usize]
    }

    pub fn report(&self, pair: PairId) -> &TransferReport {
        &self.reports[pair as usize]
    }
}

/// Format used for every number written to CSV: shortest round-trip
/// decimal in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

/// Runs the pipeline without writing files.
pub fn simulate(s: &Scenario) -> Result<RunResult> {
    let derived = derive_params(&s.physical_params())?;
    let steady_states = fixed_points(&derived)?;
    let threshold = threshold_report(&derived).ok();
    let cfg = s.trajectory_config(&derived);
    let samples = integrate(&derived, &cfg)?;
    let criteria = s.transfer_criteria(&derived);
    let mut series = Vec::with_capacity(3);
    let mut reports = Vec::with_capacity(3);
    for pair in PairId::ALL {
        let ser = negativity_series(&samples, pair)?;
        reports.push(transfer_report(&ser, &criteria)?);
        series.push(ser);
    }
    Ok(RunResult {
        scenario: s.clone(),
        derived,
        steady_states,
        threshold,
        samples,
        series,
        reports,
        samples_path: None,
        summary_path: None,
    })
}

/// Runs the pipeline and writes `samples.csv` and `summary.json` into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> Result<RunResult> {
    let mut r = simulate(s)?;
    write_outputs(&mut r, out_dir)?;
    Ok(r)
}

fn write_outputs(r: &mut RunResult, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let samples_path = out_dir.join(SAMPLES_FILE);
    write_file(&samples_path, &samples_csv(r)?)?;
    let summary_path = out_dir.join(SUMMARY_FILE);
    write_file(&summary_path, &summary_json(r)?)?;
    r.samples_path = Some(samples_path);
    r.summary_path = Some(summary_path);
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}")),
        ),
    }
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| csv_error(Path::new("<memory>"), e);
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(&row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Oracle(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Oracle(e.to_string()))
}

pub fn samples_csv(r: &RunResult) -> Result<String> {
    let rows = r.samples.iter().enumerate().map(|(i, s)| {
        let mut row = vec![
            s.t,
            s.mean.q,
            s.mean.p,
            s.mean.alpha_l.re,
            s.mean.alpha_l.im,
            s.mean.alpha_r.re,
            s.mean.alpha_r.im,
        ];
        row.extend(r.series.iter().map(|ser| ser.en[i]));
        row.extend(r.series.iter().map(|ser| ser.v_minus[i]));
        row.into_iter().map(fmt_num).collect()
    });
    csv_string(&SAMPLES_HEADER, rows)
}

#[derive(Debug, Clone, Serialize)]
struct SteadyStateSummary {
    q: f64,
    alpha_l: [f64; 2],
    alpha_r: [f64; 2],
    stable: bool,
    marginal: bool,
    residual: f64,
    multiplicity: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub scenario: String,
    pub drive_mode: &'static str,
    pub frequency_convention: &'static str,
    pub derived: DerivedParams,
    pub dt_s: f64,
    pub samples: usize,
    pub onset_time_s: BTreeMap<PairId, Option<f64>>,
    pub pattern: BTreeMap<PairId, Pattern>,
    pub saturation: BTreeMap<PairId, Option<f64>>,
    pub zero_interval_count: BTreeMap<PairId, usize>,
    pub insufficient_horizon: BTreeMap<PairId, bool>,
    pub nonphysical_samples: BTreeMap<PairId, usize>,
    steady_states: Vec<SteadyStateSummary>,
    pub stable_count: usize,
    pub threshold: Option<ThresholdReport>,
}

pub fn summary(r: &RunResult) -> Summary {
    let per_pair = |f: &dyn Fn(&TransferReport) -> _| -> BTreeMap<PairId, _> {
        r.reports.iter().map(|rep| (rep.pair, f(rep))).collect()
    };
    Summary {
        schema_version: SCHEMA_VERSION,
        scenario: r.scenario.name.clone(),
        drive_mode: r.scenario.drive_mode.as_str(),
        frequency_convention: r.scenario.convention.as_str(),
        derived: r.derived,
        dt_s: r.scenario.trajectory_config(&r.derived).dt,
        samples: r.samples.len(),
        onset_time_s: per_pair(&|rep| rep.onset_time),
        pattern: r
            .reports
            .iter()
            .map(|rep| (rep.pair, rep.pattern))
            .collect(),
        saturation: per_pair(&|rep| rep.saturation_value),
        zero_interval_count: r
            .reports
            .iter()
            .map(|rep| (rep.pair, rep.zero_interval_count))
            .collect(),
        insufficient_horizon: r
            .reports
            .iter()
            .map(|rep| (rep.pair, rep.insufficient_horizon))
            .collect(),
        nonphysical_samples: r
            .series
            .iter()
            .map(|s| (s.pair, s.nonphysical.iter().filter(|&&b| b).count()))
            .collect(),
        steady_states: r
            .steady_states
            .iter()
            .map(|s| SteadyStateSummary {
                q: s.q,
                alpha_l: [s.alpha_l.re, s.alpha_l.im],
                alpha_r: [s.alpha_r.re, s.alpha_r.im],
                stable: s.stable,
                marginal: s.marginal,
                residual: s.residual,
                multiplicity: s.multiplicity,
            })
            .collect(),
        stable_count: r.steady_states.iter().filter(|s| s.stable).count(),
        threshold: r.threshold,
    }
}

pub fn summary_json(r: &RunResult) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(&summary(r)).map_err(|e| Error::Oracle(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn pattern_name(p: Pattern) -> &'static str {
    match p {
        Pattern::NeverEntangled => "never_entangled",
        Pattern::Saturating => "saturating",
        Pattern::DeathRevival => "death_revival",
        Pattern::Decayed => "decayed",
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// One-line-per-pair report table.
pub fn report_csv(r: &RunResult) -> Result<String> {
    let rows = r.reports.iter().map(|rep| {
        vec![
            rep.pair.as_str().to_string(),
            opt_num(rep.onset_time),
            pattern_name(rep.pattern).to_string(),
            opt_num(rep.saturation_value),
            rep.zero_interval_count.to_string(),
            rep.insufficient_horizon.to_string(),
        ]
    });
    csv_string(
        &[
            "pair",
            "onset_time_s",
            "pattern",
            "saturation",
            "zero_interval_count",
            "insufficient_horizon",
        ],
        rows,
    )
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub key: String,
    pub values: Vec<f64>,
    pub runs: Vec<RunResult>,
    pub table_path: Option<PathBuf>,
}

/// `steps` uniform values from `start` to `stop` inclusive.
pub fn sweep_grid(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Usage("sweep needs at least 2 steps".into()));
    }
    if !(start.is_finite() && stop.is_finite()) || start == stop {
        return Err(Error::Usage(format!(
            "sweep endpoints must be finite and distinct, got {start} and {stop}"
        )));
    }
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

/// Runs `base` with `key` set to each grid value. Scenarios run in parallel;
/// results and outputs are ordered by grid index. With `out_dir`, run `i`
/// writes into `out_dir/<i>` and the table goes to `out_dir/sweep.csv`.
pub fn sweep(
    base: &Scenario,
    key: &str,
    start: f64,
    stop: f64,
    steps: usize,
    out_dir: Option<&Path>,
) -> Result<SweepResult> {
    if !Scenario::is_numeric_key(key) {
        return Err(Error::UnknownKey(key.to_string()));
    }
    let values = sweep_grid(start, stop, steps)?;
    let mut scenarios = Vec::with_capacity(steps);
    for (i, v) in values.iter().enumerate() {
        let mut s = base.clone();
        s.set(key, &fmt_num(*v)).map_err(|reason| Error::Config {
            key: key.to_string(),
            line: 0,
            reason,
        })?;
        s.name = format!("{}-{i:03}", base.name);
        scenarios.push(s);
    }
    let runs: Vec<Result<RunResult>> = scenarios
        .par_iter()
        .enumerate()
        .map(|(i, s)| match out_dir {
            Some(dir) => run_scenario(s, &dir.join(format!("{i:03}"))),
            None => simulate(s),
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut result = SweepResult {
        key: key.to_string(),
        values,
        runs,
        table_path: None,
    };
    if let Some(dir) = out_dir {
        let path = dir.join(SWEEP_FILE);
        write_file(&path, &sweep_table_csv(&result)?)?;
        result.table_path = Some(path);
    }
    Ok(result)
}

pub fn sweep_table_csv(s: &SweepResult) -> Result<String> {
    let mut header = vec![s.key.clone()];
    for what in ["onset_s", "pattern", "saturation"] {
        for p in PairId::ALL {
            header.push(format!("{what}_{p}"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = s.values.iter().zip(&s.runs).map(|(v, r)| {
        let mut row = vec![fmt_num(*v)];
        row.extend(r.reports.iter().map(|rep| opt_num(rep.onset_time)));
        row.extend(
            r.reports
                .iter()
                .map(|rep| pattern_name(rep.pattern).to_string()),
        );
        row.extend(r.reports.iter().map(|rep| opt_num(rep.saturation_value)));
        row
    });
    csv_string(&header_refs, rows)
}

/// Writes `EN_<pair>.csv` for each pair and a gnuplot script `plot.gp`
/// that draws the three negativities against time in microseconds.
pub fn emit_plot_data(r: &RunResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut paths = Vec::new();
    for ser in &r.series {
        if ser.is_empty() {
            return Err(Error::invalid("series", "cannot emit an empty series"));
        }
        let path = out_dir.join(format!("EN_{}.csv", ser.pair));
        let rows = (0..ser.len()).map(|i| {
            vec![
                fmt_num(ser.times[i]),
                fmt_num(ser.en[i]),
                fmt_num(ser.v_minus[i]),
            ]
        });
        write_file(&path, &csv_string(&SERIES_HEADER, rows)?)?;
        paths.push(path);
    }
    let mut script = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't (us)'\nset multiplot layout 3,1\n",
    );
    for ser in &r.series {
        script.push_str(&format!(
            "set ylabel 'E_N ({p})'\nplot 'EN_{p}.csv' using ($1*1e6):2 with lines title '{p}'\n",
            p = ser.pair
        ));
    }
    script.push_str("unset multiplot\n");
    let path = out_dir.join("plot.gp");
    write_file(&path, &script)?;
    paths.push(path);
    Ok(paths)
}

/// Reads a file written by [`emit_plot_data`] back as `(t, E_N, v_minus)`.
pub fn read_series_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let bad = |what: String| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, what),
        )
    };
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != SERIES_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let (mut t, mut en, mut v) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(format!("bad number in column {i}")))
        };
        t.push(num(0)?);
        en.push(num(1)?);
        v.push(num(2)?);
    }
    Ok((t, en, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_validation() {
        let g = sweep_grid(1.0, 2.0, 5).unwrap();
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(sweep_grid(1.0, 1.0, 2).is_err());
        assert!(sweep_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.0,
            1.0,
            -2.5e-7,
            89e-6,
            std::f64::consts::PI,
            1e-300,
            f64::MAX,
        ] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_rejects_unknown_key() {
        let base = crate::config::preset("fig2-sym").unwrap();
        let err = sweep(&base, "left.colour", 1.0, 2.0, 3, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(sweep(&base, "drive.mode", 1.0, 2.0, 3, None).is_err());
    }
}
