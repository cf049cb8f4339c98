// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mxpbf::linalg::derive_seed;
use mxpbf::simgen::generate;
use mxpbf::{
    calibrate_alpha, detect_combined, detect_covariance_centered, detect_ladder, f1_score, hausdorff, scale_mad,
    AlphaChoice, CalibrationConfig, CovHyper, DataMatrix, DetectorConfig, LadderDetection, MetricConfig, ScanKind,
    WindowLadder,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::{
    AlphaArg, CalibrateArgs, Cli, CombinedArgs, Command, CovArgs, DetectArgs, EvaluateArgs, FormatArg, SimulateArgs,
};
use crate::csvio::{load_csv, write_csv, write_profile};
use crate::error::{CliError, CliResult};
use crate::report::{
    method_label, scenario_label, CalibrateReport, ConfigEcho, DetectReport, EvaluateReport, FprRow, MetricRow,
    SegmentReport, StageReport, Timing, TruthFile,
};

/// Runs one parsed command line, on a pool of `--workers` threads if given.
pub fn run(cli: &Cli) -> CliResult<()> {
    match cli.workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {w} workers: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::DetectMean(a) => detect_mean(a),
        Command::DetectCov(a) => detect_cov(a),
        Command::DetectCombined(a) => detect_combined_cmd(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Loads the input and applies MAD scaling when asked.
fn load_input(path: &Path, mad: bool, warnings: &mut Vec<String>) -> CliResult<DataMatrix> {
    let data = load_csv(path)?;
    if !mad {
        return Ok(data);
    }
    let (scaled, unscaled) = scale_mad(&data)?;
    if !unscaled.is_empty() {
        let cols: Vec<String> = unscaled.iter().map(|c| c.to_string()).collect();
        warnings.push(format!("zero MAD, left unscaled: columns {}", cols.join(",")));
    }
    Ok(scaled)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format {
        path: path.map_or_else(|| "<stdout>".into(), Path::to_path_buf),
        message: e.to_string(),
    })?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format {
        path: path.into(),
        message: e.to_string(),
    })
}

/// `dir/stem.tag.ext` for `dir/stem.ext`.
fn tagged(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// One profile CSV per rung; `prefix` is prepended to the `w<n_w>` tag.
fn write_profiles(base: &Path, det: &LadderDetection, prefix: &str, always_tag: bool) -> CliResult<()> {
    for rung in &det.rungs {
        let rows: Vec<(usize, f64)> = rung
            .profile
            .rows()
            .into_iter()
            .map(|(c, v)| (c + det.row_offset, v))
            .collect();
        let path = if det.rungs.len() == 1 && !always_tag {
            base.to_path_buf()
        } else {
            tagged(base, &format!("{prefix}w{}", rung.n_w))
        };
        write_profile(&path, &rows)?;
    }
    Ok(())
}

fn detector_config(a: &DetectArgs, hyper: CovHyper) -> DetectorConfig {
    let log_threshold = a.threshold.ln();
    let alpha = match a.alpha {
        AlphaArg::Fixed(v) => AlphaChoice::Fixed(v),
        AlphaArg::Auto => AlphaChoice::Calibrated(CalibrationConfig {
            target_fpr: a.fpr,
            n_sim: a.nsim as usize,
            log_threshold,
            seed: a.seed,
            cov_hyper: hyper,
            ..CalibrationConfig::default()
        }),
    };
    DetectorConfig {
        log_threshold,
        alpha,
        cov_hyper: hyper,
    }
}

fn config_echo(a: &DetectArgs, hyper: Option<CovHyper>, rolling_center: Option<bool>) -> ConfigEcho {
    ConfigEcho {
        windows: a.windows.0.clone(),
        alpha: a.alpha.to_string(),
        threshold: a.threshold,
        log_threshold: a.threshold.ln(),
        fpr: a.fpr,
        nsim: a.nsim,
        seed: a.seed,
        scale_mad: a.scale_mad,
        hyper,
        rolling_center,
    }
}

fn base_report(command: &str, a: &DetectArgs, data: &DataMatrix, config: ConfigEcho) -> DetectReport {
    DetectReport {
        command: command.into(),
        input: a.input.display().to_string(),
        config,
        n: data.n(),
        p: data.p(),
        points: Vec::new(),
        stage: None,
        covariance: None,
        segments: Vec::new(),
        merge_radius: None,
        merged: Vec::new(),
        warnings: Vec::new(),
        timing: Timing { seconds: 0.0 },
    }
}

fn finish_detect(
    mut report: DetectReport,
    warnings: Vec<String>,
    start: Instant,
    output: Option<&Path>,
) -> CliResult<()> {
    warn(&warnings);
    report.warnings = warnings;
    report.timing.seconds = start.elapsed().as_secs_f64();
    write_json(output, &report)
}

fn detect_mean(a: &DetectArgs) -> CliResult<()> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let data = load_input(&a.input, a.scale_mad, &mut warnings)?;
    let ladder = WindowLadder::new(a.windows.0.clone())?;
    let det = detect_ladder(&data, &ladder, ScanKind::Mean, &detector_config(a, CovHyper::default()))?;
    if let Some(base) = &a.profile {
        write_profiles(base, &det, "", false)?;
    }
    let mut report = base_report("detect-mean", a, &data, config_echo(a, None, None));
    report.points = det.result.points.clone();
    report.stage = Some(StageReport::from_detection(&det));
    finish_detect(report, warnings, start, a.output.as_deref())
}

fn detect_cov(a: &CovArgs) -> CliResult<()> {
    let start = Instant::now();
    let d = &a.detect;
    let mut warnings = Vec::new();
    let data = load_input(&d.input, d.scale_mad, &mut warnings)?;
    let ladder = WindowLadder::new(d.windows.0.clone())?;
    let hyper = a.hyper.to_hyper();
    let config = detector_config(d, hyper);
    let det = if a.rolling_center {
        detect_covariance_centered(&data, &ladder, &config)?
    } else {
        detect_ladder(&data, &ladder, ScanKind::Covariance, &config)?
    };
    if let Some(base) = &d.profile {
        write_profiles(base, &det, "", false)?;
    }
    let mut report = base_report(
        "detect-cov",
        d,
        &data,
        config_echo(d, Some(hyper), Some(a.rolling_center)),
    );
    report.points = det.result.points.clone();
    report.stage = Some(StageReport::from_detection(&det));
    finish_detect(report, warnings, start, d.output.as_deref())
}

fn detect_combined_cmd(a: &CombinedArgs) -> CliResult<()> {
    let start = Instant::now();
    let d = &a.detect;
    let mut warnings = Vec::new();
    let data = load_input(&d.input, d.scale_mad, &mut warnings)?;
    let ladder = WindowLadder::new(d.windows.0.clone())?;
    let hyper = a.hyper.to_hyper();
    let result = detect_combined(&data, &ladder, &detector_config(d, hyper))?;
    if let Some(base) = &d.profile {
        write_profiles(base, &result.covariance, "cov.", true)?;
        for seg in &result.segments {
            if let Some(det) = &seg.detection {
                write_profiles(base, det, &format!("mean.s{}.", seg.start), true)?;
            }
        }
    }
    for seg in result.segments.iter().filter(|s| s.detection.is_none()) {
        warnings.push(format!(
            "segment {}..={} is shorter than twice the smallest window; mean stage skipped",
            seg.start, seg.end
        ));
    }
    let mut report = base_report("detect-combined", d, &data, config_echo(d, Some(hyper), None));
    report.points = result.merged_locations();
    report.covariance = Some(StageReport::from_detection(&result.covariance));
    report.segments = result
        .segments
        .iter()
        .map(|s| SegmentReport {
            start: s.start,
            end: s.end,
            mean: s.detection.as_ref().map(StageReport::from_detection),
        })
        .collect();
    report.merge_radius = Some(result.merge_radius);
    report.merged = result.merged.clone();
    finish_detect(report, warnings, start, d.output.as_deref())
}

fn calibrate(a: &CalibrateArgs) -> CliResult<()> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let data = load_input(&a.input, a.scale_mad, &mut warnings)?;
    let kind: ScanKind = a.kind.into();
    // Same per-window seed as the detect commands use for this window.
    let config = CalibrationConfig {
        target_fpr: a.fpr,
        n_sim: a.nsim as usize,
        log_threshold: a.threshold.ln(),
        seed: derive_seed(a.seed, &[a.window as u64]),
        cov_hyper: a.hyper.to_hyper(),
        ..CalibrationConfig::default()
    };
    let cal = calibrate_alpha(&data, a.window, kind, &config)?;
    warn(&warnings);
    let report = CalibrateReport {
        command: "calibrate".into(),
        input: a.input.display().to_string(),
        kind,
        window: a.window,
        threshold: a.threshold,
        target_fpr: a.fpr,
        nsim: a.nsim,
        seed: a.seed,
        scale_mad: a.scale_mad,
        n: data.n(),
        p: data.p(),
        alpha: cal.alpha,
        fpr: cal.fpr,
        repair_shift: cal.repair_shift,
        curve: cal
            .curve
            .iter()
            .map(|pt| FprRow {
                alpha: pt.alpha,
                fpr: pt.fpr,
            })
            .collect(),
        warnings,
        timing: Timing {
            seconds: start.elapsed().as_secs_f64(),
        },
    };
    write_json(a.output.as_deref(), &report)
}

fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let scenario = a.scenario();
    let ds = generate(&scenario)?;
    write_csv(&a.output, &ds.data)?;
    let truth_path = a.truth.clone().unwrap_or_else(|| a.output.with_extension("truth.json"));
    let truth = TruthFile {
        scenario,
        n: ds.data.n(),
        p: ds.data.p(),
        truth: ds.truth,
    };
    write_json(Some(&truth_path), &truth)
}

fn evaluate(a: &EvaluateArgs) -> CliResult<()> {
    let truth: TruthFile = read_json(&a.truth)?;
    let margin = a.margin as usize;
    let metric = MetricConfig::new(margin, truth.n)?;
    let label = scenario_label(&truth.scenario);
    let rows = a
        .report
        .iter()
        .map(|path| {
            let report: DetectReport = read_json(path)?;
            if report.n != truth.n {
                return Err(CliError::Format {
                    path: path.clone(),
                    message: format!("report covers n = {}, truth file has n = {}", report.n, truth.n),
                });
            }
            let score = f1_score(&truth.truth, &report.points, &metric);
            Ok(MetricRow {
                scenario: label.clone(),
                method: method_label(&report),
                f1: score.f1,
                hausdorff: hausdorff(&truth.truth, &report.points, &metric),
                precision: score.precision,
                recall: score.recall,
                true_positives: score.true_positives,
                truth: truth.truth.clone(),
                detected: report.points,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match a.format {
        FormatArg::Json => write_json(
            a.output.as_deref(),
            &EvaluateReport {
                command: "evaluate".into(),
                margin,
                n: truth.n,
                rows,
            },
        ),
        FormatArg::Csv => write_metric_csv(a.output.as_deref(), &rows),
    }
}

fn write_metric_csv(path: Option<&Path>, rows: &[MetricRow]) -> CliResult<()> {
    let target = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let fail = |e: csv::Error| CliError::Format {
        path: target.clone(),
        message: e.to_string(),
    };
    w.write_record([
        "scenario",
        "method",
        "f1",
        "hausdorff",
        "precision",
        "recall",
        "true_positives",
    ])
    .map_err(fail)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.method.clone(),
            r.f1.to_string(),
            r.hausdorff.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.true_positives.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(&target, e))
}
