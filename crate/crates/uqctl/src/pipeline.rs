use std::path::Path;

use conformal_cal::{calibrate, interval, CalibrationCase, CalibrationResult};
use grid_core::{load_image, save_image, Image};
use mri_sim::{read_case, CaseMeta};
use quantile_model::{
    forward, load_checkpoint, save_checkpoint, train, ConvModel, Mode, TrainConfig,
};
use rayon::prelude::*;
use uq_metrics::{
    build_eval_maps, coverage, mean_relative_width_pct, metrics_csv, pearson,
    region_correlations, spearman, ssim_default, threshold_overlay_mask, uncertainty_width,
    MetricsRecord, DEFAULT_REGION_GRID,
};

use crate::config::{mode_name, ExperimentConfig};
use crate::dataset::{generate_dataset, split_case_dirs};
use crate::error::{io_data, CliError};
use crate::manifest::RunManifest;
use crate::pgm::export_pgm;
use crate::seeds::derive_seed;

fn write_text(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_data(parent, e))?;
    }
    std::fs::write(path, body).map_err(|e| io_data(path, e))
}

/// Builds the dataset splits. Refuses to clobber an existing non-empty
/// dataset unless `force` is set; with `force` it clears this run's
/// artifacts (never unrelated files in out_dir).
pub fn cmd_generate(cfg: &ExperimentConfig, force: bool) -> Result<(), CliError> {
    let dataset = cfg.dataset_dir();
    let non_empty = dataset
        .read_dir()
        .map(|mut it| it.next().is_some())
        .unwrap_or(false);
    if non_empty {
        if !force {
            return Err(CliError::Data(format!(
                "{} already contains a dataset; pass --force to regenerate",
                dataset.display()
            )));
        }
        std::fs::remove_dir_all(&dataset).map_err(|e| io_data(&dataset, e))?;
        for mode in [Mode::Qr, Mode::Resm] {
            let dir = cfg.mode_dir(mode);
            if dir.exists() {
                std::fs::remove_dir_all(&dir).map_err(|e| io_data(&dir, e))?;
            }
        }
        for stale in ["manifest.json", "table1.csv", "table2.csv", "histogram.csv"] {
            let path = cfg.out_dir().join(stale);
            if path.exists() {
                std::fs::remove_file(&path).map_err(|e| io_data(&path, e))?;
            }
        }
    }

    let outputs = generate_dataset(cfg)?;
    let mut manifest = RunManifest::new(cfg.hash());
    manifest.record_stage("generate", cfg.seed, outputs, Vec::new());
    manifest.save(&cfg.out_dir())
}

fn load_pairs(cfg: &ExperimentConfig, split: &str) -> Result<Vec<(Image, Image)>, CliError> {
    let mut pairs = Vec::new();
    for dir in split_case_dirs(cfg, split)? {
        let case = read_case(&dir)?;
        pairs.push((case.recon, case.ground_truth));
    }
    Ok(pairs)
}

/// Trains one mode on the train split with validation-best selection, then
/// writes the checkpoint and the loss curves.
pub fn cmd_train(cfg: &ExperimentConfig, mode: Mode) -> Result<(), CliError> {
    let mut manifest = RunManifest::load_checked(&cfg.out_dir(), &cfg.hash())?;
    let train_pairs = load_pairs(cfg, "train")?;
    let val_pairs = if cfg.val_size == 0 {
        Vec::new()
    } else {
        load_pairs(cfg, "val")?
    };

    let seed = derive_seed(cfg.seed, &format!("train-{}", mode_name(mode)), 0);
    let model = ConvModel::init(mode, &ConvModel::DEFAULT_HIDDEN, seed)?;
    let tc = TrainConfig {
        coverage_target: cfg.coverage_target,
        learning_rate: cfg.learning_rate,
        steps: cfg.steps,
        batch: cfg.batch,
        seed,
        mode,
    };
    let outcome = train(model, &train_pairs, &val_pairs, &tc)?;

    let mode_dir = cfg.mode_dir(mode);
    let ckpt_dir = mode_dir.join("checkpoint");
    save_checkpoint(&ckpt_dir, &outcome.model, seed, cfg.steps)?;

    let mut loss_csv = String::from("step,train_loss,train_loss_running_min\n");
    let mut running_min = f64::INFINITY;
    for (i, &loss) in outcome.train_losses.iter().enumerate() {
        running_min = running_min.min(loss);
        loss_csv.push_str(&format!("{},{},{}\n", i + 1, loss, running_min));
    }
    write_text(&mode_dir.join("loss.csv"), &loss_csv)?;

    let mut val_csv = String::from("step,val_loss\n");
    for (step, loss) in &outcome.val_losses {
        val_csv.push_str(&format!("{step},{loss}\n"));
    }
    write_text(&mode_dir.join("val_loss.csv"), &val_csv)?;

    manifest.record_stage(
        &format!("train:{}", mode_name(mode)),
        seed,
        vec![
            ckpt_dir.display().to_string(),
            mode_dir.join("loss.csv").display().to_string(),
            mode_dir.join("val_loss.csv").display().to_string(),
        ],
        Vec::new(),
    );
    manifest.save(&cfg.out_dir())
}

fn load_mode_checkpoint(cfg: &ExperimentConfig, mode: Mode) -> Result<ConvModel, CliError> {
    let ckpt_dir = cfg.mode_dir(mode).join("checkpoint");
    let (model, meta) = load_checkpoint(&ckpt_dir)?;
    if meta.mode != mode {
        return Err(CliError::Data(format!(
            "checkpoint in {} was trained in {} mode",
            ckpt_dir.display(),
            mode_name(meta.mode)
        )));
    }
    Ok(model)
}

/// Runs the risk scan on the calibration split and stores the selected
/// scaling factor with its risk curve.
pub fn cmd_calibrate(cfg: &ExperimentConfig, mode: Mode) -> Result<(), CliError> {
    let mut manifest = RunManifest::load_checked(&cfg.out_dir(), &cfg.hash())?;
    let model = load_mode_checkpoint(cfg, mode)?;
    let dirs = split_case_dirs(cfg, "calib")?;
    let cases: Vec<CalibrationCase> = dirs
        .par_iter()
        .map(|dir| -> Result<CalibrationCase, CliError> {
            let case = read_case(dir)?;
            let fields = forward(&model, &case.recon)?;
            Ok(CalibrationCase {
                x: case.recon,
                fields,
                y: case.ground_truth,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let result = calibrate(&cases, cfg.alpha(), cfg.delta, cfg.lambda_grid())?;

    let path = cfg.mode_dir(mode).join("calibration.json");
    let body = serde_json::to_string_pretty(&result)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    write_text(&path, &body)?;

    manifest.record_stage(
        &format!("calibrate:{}", mode_name(mode)),
        cfg.seed,
        vec![path.display().to_string()],
        Vec::new(),
    );
    manifest.save(&cfg.out_dir())
}

fn load_calibration(cfg: &ExperimentConfig, mode: Mode) -> Result<CalibrationResult, CliError> {
    let path = cfg.mode_dir(mode).join("calibration.json");
    let body = std::fs::read_to_string(&path).map_err(|e| {
        CliError::Data(format!(
            "{}: {e} (run `uqctl calibrate` first)",
            path.display()
        ))
    })?;
    serde_json::from_str(&body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_meta(dir: &Path) -> Result<CaseMeta, CliError> {
    let path = dir.join("meta.json");
    let body = std::fs::read_to_string(&path).map_err(|e| io_data(&path, e))?;
    serde_json::from_str(&body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

struct CaseEval {
    record: MetricsRecord,
    log: Vec<String>,
    q_map: Image,
    acceleration: u32,
    case_id: String,
}

fn positive_window(img: &Image) -> f64 {
    img.max_value().max(1e-12)
}

/// Evaluates every test case: writes the uncertainty map strictly before
/// touching ground truth, then computes the reliability metrics.
pub fn cmd_evaluate(cfg: &ExperimentConfig, mode: Mode) -> Result<(), CliError> {
    let mut manifest = RunManifest::load_checked(&cfg.out_dir(), &cfg.hash())?;
    let model = load_mode_checkpoint(cfg, mode)?;
    let calibration = load_calibration(cfg, mode)?;
    let lambda_star = calibration.lambda_star;
    let mode_dir = cfg.mode_dir(mode);
    let maps_dir = mode_dir.join("maps");
    std::fs::create_dir_all(&maps_dir).map_err(|e| io_data(&maps_dir, e))?;

    let dirs = split_case_dirs(cfg, "test")?;
    let evals: Vec<CaseEval> = dirs
        .par_iter()
        .map(|dir| -> Result<CaseEval, CliError> {
            let case_id = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "case".into());
            let mut log = Vec::new();
            let meta = read_meta(dir)?;

            // Phase 1: uncertainty from the reconstruction alone.
            let x = load_image(&dir.join("x.t"))?;
            let fields = forward(&model, &x)?;
            let maps = interval(&x, &fields, lambda_star)?;
            let q_map = uncertainty_width(&maps)?;
            save_image(&maps_dir.join(format!("{case_id}.q.t")), &q_map)?;
            export_pgm(
                &q_map,
                &maps_dir.join(format!("{case_id}.q.pgm")),
                0.0,
                positive_window(&q_map),
            )?;
            log.push(format!("{case_id}: q_map written"));

            // Phase 2: ground truth may now be read.
            let y = load_image(&dir.join("y.t"))?;
            log.push(format!("{case_id}: ground_truth loaded"));

            let eval_maps = build_eval_maps(&x, &y, &maps)?;
            save_image(&maps_dir.join(format!("{case_id}.e.t")), &eval_maps.e_map)?;
            export_pgm(
                &eval_maps.e_map,
                &maps_dir.join(format!("{case_id}.e.pgm")),
                0.0,
                positive_window(&eval_maps.e_map),
            )?;
            export_pgm(&x, &maps_dir.join(format!("{case_id}.x.pgm")), 0.0, positive_window(&x))?;
            export_pgm(&y, &maps_dir.join(format!("{case_id}.y.pgm")), 0.0, positive_window(&y))?;

            let pearson_blur = pearson(&eval_maps.q_blur, &eval_maps.e_blur)?;
            let spearman_blur = spearman(&eval_maps.q_blur, &eval_maps.e_blur)?;
            let region = region_correlations(
                &eval_maps.q_blur,
                &eval_maps.e_blur,
                DEFAULT_REGION_GRID,
                DEFAULT_REGION_GRID,
            )?;
            let cov = coverage(&y, &maps)?;
            let ssim_val = ssim_default(&x, &y)?;
            let width_pct = mean_relative_width_pct(&q_map, &x)?;

            let record = MetricsRecord {
                case_id: case_id.clone(),
                acceleration: meta.acceleration.round() as usize,
                mode: mode_name(mode).to_string(),
                pearson: pearson_blur,
                spearman: spearman_blur,
                pearson_region: region.pearson_mean,
                spearman_region: region.spearman_mean,
                coverage: cov,
                ssim: ssim_val,
                mean_rel_width_pct: width_pct,
                skipped_patches: region.skipped_patches,
            };
            record.validate()?;
            Ok(CaseEval {
                record,
                log,
                q_map,
                acceleration: meta.acceleration.round() as u32,
                case_id,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let records: Vec<MetricsRecord> = evals.iter().map(|e| e.record.clone()).collect();
    let metrics_path = mode_dir.join("metrics.csv");
    write_text(&metrics_path, &metrics_csv(&records))?;

    let hist_path = mode_dir.join("histogram.csv");
    write_text(
        &hist_path,
        &pearson_histogram_csv(records.iter().map(|r| (r.mode.clone(), r.pearson))),
    )?;

    // Anomaly overlays: the brightest width seen at the reference
    // acceleration thresholds the maps of more aggressive accelerations.
    let mut outputs = vec![
        metrics_path.display().to_string(),
        hist_path.display().to_string(),
        maps_dir.display().to_string(),
    ];
    let reference = cfg.overlay_acceleration;
    let distinct: std::collections::BTreeSet<u32> =
        evals.iter().map(|e| e.acceleration).collect();
    if distinct.len() > 1 && distinct.contains(&reference) {
        let threshold = evals
            .iter()
            .filter(|e| e.acceleration == reference)
            .map(|e| e.q_map.max_value())
            .fold(0.0f64, f64::max);
        let overlays_dir = mode_dir.join("overlays");
        for eval in evals.iter().filter(|e| e.acceleration > reference) {
            let mask = threshold_overlay_mask(&eval.q_map, threshold);
            export_pgm(
                &mask,
                &overlays_dir.join(format!("{}.pgm", eval.case_id)),
                0.0,
                1.0,
            )?;
        }
        outputs.push(overlays_dir.display().to_string());
    }

    let access_log: Vec<String> = evals.into_iter().flat_map(|e| e.log).collect();
    manifest.record_stage(
        &format!("evaluate:{}", mode_name(mode)),
        cfg.seed,
        outputs,
        access_log,
    );
    manifest.save(&cfg.out_dir())
}

fn pearson_histogram_csv(values: impl Iterator<Item = (String, f64)>) -> String {
    const BINS: usize = 20;
    let mut counts: std::collections::BTreeMap<String, [usize; BINS]> = Default::default();
    for (mode, p) in values {
        let idx = (((p + 1.0) / 2.0 * BINS as f64).floor() as usize).min(BINS - 1);
        counts.entry(mode).or_insert([0; BINS])[idx] += 1;
    }
    let mut out = String::from("mode,bin_lo,bin_hi,count\n");
    for (mode, bins) in counts {
        for (i, count) in bins.iter().enumerate() {
            let lo = -1.0 + 2.0 * i as f64 / BINS as f64;
            let hi = -1.0 + 2.0 * (i + 1) as f64 / BINS as f64;
            out.push_str(&format!("{mode},{lo},{hi},{count}\n"));
        }
    }
    out
}

struct ParsedRow {
    acceleration: usize,
    mode: String,
    pearson: f64,
    spearman: f64,
    pearson_region: f64,
    spearman_region: f64,
    coverage: f64,
    ssim: f64,
    width: f64,
}

fn parse_metrics_csv(path: &Path) -> Result<Vec<ParsedRow>, CliError> {
    let body = std::fs::read_to_string(path).map_err(|e| {
        CliError::Data(format!(
            "{}: {e} (run `uqctl evaluate` first)",
            path.display()
        ))
    })?;
    let bad = |line: usize| CliError::Data(format!("{}:{line}: malformed row", path.display()));
    let mut rows = Vec::new();
    for (i, line) in body.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(bad(i + 1));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1));
        rows.push(ParsedRow {
            acceleration: fields[1].parse().map_err(|_| bad(i + 1))?,
            mode: fields[2].to_string(),
            pearson: num(fields[3])?,
            spearman: num(fields[4])?,
            pearson_region: num(fields[5])?,
            spearman_region: num(fields[6])?,
            coverage: num(fields[7])?,
            ssim: num(fields[8])?,
            width: num(fields[9])?,
        });
    }
    Ok(rows)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates per-case metrics into per-(acceleration, mode) summary tables
/// and a pooled per-mode correlation histogram.
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut manifest = RunManifest::load_checked(&cfg.out_dir(), &cfg.hash())?;
    let mut rows = Vec::new();
    for &mode in &cfg.modes {
        rows.extend(parse_metrics_csv(&cfg.mode_dir(mode).join("metrics.csv"))?);
    }
    if rows.is_empty() {
        return Err(CliError::Data("no metric rows to aggregate".into()));
    }

    let mut groups: std::collections::BTreeMap<(usize, String), Vec<&ParsedRow>> =
        Default::default();
    for row in &rows {
        groups
            .entry((row.acceleration, row.mode.clone()))
            .or_default()
            .push(row);
    }

    let mut table1 =
        String::from("acceleration,mode,n_cases,ssim_mean,ssim_std,width_mean,width_std\n");
    let mut table2 = String::from(
        "acceleration,mode,n_cases,pearson_mean,pearson_std,spearman_mean,spearman_std,\
         pearson_region_mean,pearson_region_std,spearman_region_mean,spearman_region_std,\
         coverage_mean\n",
    );
    for ((accel, mode), group) in &groups {
        let col = |f: fn(&ParsedRow) -> f64| -> Vec<f64> { group.iter().map(|r| f(r)).collect() };
        let (ssim_m, ssim_s) = mean_std(&col(|r| r.ssim));
        let (width_m, width_s) = mean_std(&col(|r| r.width));
        table1.push_str(&format!(
            "{accel},{mode},{},{ssim_m},{ssim_s},{width_m},{width_s}\n",
            group.len()
        ));
        let (p_m, p_s) = mean_std(&col(|r| r.pearson));
        let (s_m, s_s) = mean_std(&col(|r| r.spearman));
        let (pr_m, pr_s) = mean_std(&col(|r| r.pearson_region));
        let (sr_m, sr_s) = mean_std(&col(|r| r.spearman_region));
        let (cov_m, _) = mean_std(&col(|r| r.coverage));
        table2.push_str(&format!(
            "{accel},{mode},{},{p_m},{p_s},{s_m},{s_s},{pr_m},{pr_s},{sr_m},{sr_s},{cov_m}\n",
            group.len()
        ));
    }

    let out = cfg.out_dir();
    write_text(&out.join("table1.csv"), &table1)?;
    write_text(&out.join("table2.csv"), &table2)?;
    write_text(
        &out.join("histogram.csv"),
        &pearson_histogram_csv(rows.iter().map(|r| (r.mode.clone(), r.pearson))),
    )?;

    manifest.record_stage(
        "report",
        cfg.seed,
        vec![
            out.join("table1.csv").display().to_string(),
            out.join("table2.csv").display().to_string(),
            out.join("histogram.csv").display().to_string(),
        ],
        Vec::new(),
    );
    manifest.save(&out)
}

/// Convenience driver: generate once, then train/calibrate/evaluate every
/// configured mode and write the report tables.
pub fn run_all(cfg: &ExperimentConfig, force: bool) -> Result<(), CliError> {
    cmd_generate(cfg, force)?;
    for &mode in &cfg.modes {
        cmd_train(cfg, mode)?;
        cmd_calibrate(cfg, mode)?;
        cmd_evaluate(cfg, mode)?;
    }
    cmd_report(cfg)
}
