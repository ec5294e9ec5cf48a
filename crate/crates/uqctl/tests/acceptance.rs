//! Acceptance suite: one test per release gate, each printing a single
//! PASS/FAIL line with the measured numbers next to the required bounds.
//! Heavy end-to-end runs are shared between tests through `OnceLock`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use conformal_cal::{empirical_risk, hoeffding_upper, interval, CalibrationCase};
use grid_core::{fft2, ifft2, load_image, save_image, ComplexGrid, Image};
use mri_sim::{acquire, default_head_phantom, make_cartesian_mask, shepp_logan};
use num_complex::Complex64;
use quantile_model::{
    forward, grad_check, kink_margin, train, ConvModel, Mode, QuantileFields, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uq_metrics::{coverage, pearson, region_correlations, spearman};
use uqctl::{
    cmd_calibrate, cmd_evaluate, cmd_generate, cmd_train, run_all, ExperimentConfig,
};

fn check(label: &str, ok: bool, detail: String) {
    println!("[{label}] {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "[{label}] FAIL ({detail})");
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

// ---------------------------------------------------------------------------
// metrics.csv plumbing

struct MetricRow {
    acceleration: f64,
    mode: String,
    pearson: f64,
    coverage: f64,
    ssim: f64,
    width: f64,
}

fn metric_rows(path: &Path) -> Vec<MetricRow> {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    let mut lines = text.lines();
    let header = lines.next().expect("metrics.csv has a header");
    assert!(header.starts_with("case_id,acceleration,mode,pearson"), "unexpected header");
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            MetricRow {
                acceleration: f[1].parse().unwrap(),
                mode: f[2].to_string(),
                pearson: f[3].parse().unwrap(),
                coverage: f[7].parse().unwrap(),
                ssim: f[8].parse().unwrap(),
                width: f[9].parse().unwrap(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// shared end-to-end runs

/// Stock configuration run twice into the same directory; keeps the raw
/// metric bytes of both passes plus the parsed rows of the second.
struct DefaultRun {
    qr_first: Vec<u8>,
    resm_first: Vec<u8>,
    qr_second: Vec<u8>,
    resm_second: Vec<u8>,
    rows: Vec<MetricRow>,
    _dir: tempfile::TempDir,
}

static DEFAULT_RUN: OnceLock<DefaultRun> = OnceLock::new();

fn default_run() -> &'static DefaultRun {
    DEFAULT_RUN.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let out = dir.path().join("run");
        let cfg = ExperimentConfig {
            out_dir: out.to_string_lossy().into_owned(),
            ..Default::default()
        };
        run_all(&cfg, true).expect("first stock run");
        let qr_first = fs::read(out.join("qr/metrics.csv")).unwrap();
        let resm_first = fs::read(out.join("resm/metrics.csv")).unwrap();
        run_all(&cfg, true).expect("second stock run");
        let qr_second = fs::read(out.join("qr/metrics.csv")).unwrap();
        let resm_second = fs::read(out.join("resm/metrics.csv")).unwrap();
        let mut rows = metric_rows(&out.join("qr/metrics.csv"));
        rows.extend(metric_rows(&out.join("resm/metrics.csv")));
        DefaultRun { qr_first, resm_first, qr_second, resm_second, rows, _dir: dir }
    })
}

/// Acceleration-ladder run sized for per-level statistics. The ACS fractions
/// are tuned for the 128-line grid so that consecutive levels stay separated
/// after the integer rounding of ACS line counts; with the stock fractions
/// neighbouring levels can swap difficulty at desk-scale grids.
struct LadderRun {
    rows: Vec<MetricRow>,
    _dir: tempfile::TempDir,
}

static LADDER_RUN: OnceLock<LadderRun> = OnceLock::new();

fn ladder_run() -> &'static LadderRun {
    LADDER_RUN.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let out = dir.path().join("run");
        let acs: BTreeMap<String, f64> = [
            ("2", 0.16),
            ("4", 0.055),
            ("6", 0.035),
            ("8", 0.0235),
            ("10", 0.017),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let cfg = ExperimentConfig {
            grid_size: 128,
            acs_fractions: acs,
            steps: 1200,
            test_size: 250,
            out_dir: out.to_string_lossy().into_owned(),
            ..Default::default()
        };
        run_all(&cfg, true).expect("ladder run");
        let mut rows = metric_rows(&out.join("qr/metrics.csv"));
        rows.extend(metric_rows(&out.join("resm/metrics.csv")));
        LadderRun { rows, _dir: dir }
    })
}

// ---------------------------------------------------------------------------
// randomized inputs

fn smooth_bright_field(rng: &mut ChaCha8Rng, h: usize, w: usize) -> Image {
    let tau = std::f64::consts::TAU;
    let fx = 0.5 + 2.0 * rng.random::<f64>();
    let fy = 0.5 + 2.0 * rng.random::<f64>();
    let px = tau * rng.random::<f64>();
    let py = tau * rng.random::<f64>();
    let mut data = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let u = r as f64 / h as f64;
            let v = c as f64 / w as f64;
            data.push(0.8 + 0.1 * (tau * fx * u + px).sin() * (tau * fy * v + py).cos());
        }
    }
    Image::new(h, w, data).unwrap()
}

fn laplace_draw(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    let t = (1.0 - 2.0 * u.abs()).max(1e-300);
    -scale * u.signum() * t.ln()
}

fn laplace_pair(rng: &mut ChaCha8Rng, h: usize, w: usize, scale: f64) -> (Image, Image) {
    let x = smooth_bright_field(rng, h, w);
    let y_data: Vec<f64> = x.data().iter().map(|&v| v + laplace_draw(rng, scale)).collect();
    let y = Image::new(h, w, y_data).unwrap();
    (x, y)
}

fn random_calibration_case(rng: &mut ChaCha8Rng, h: usize, w: usize) -> CalibrationCase {
    let n = h * w;
    let x_data: Vec<f64> = (0..n).map(|_| 0.05 + 0.95 * rng.random::<f64>()).collect();
    let o_l: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let o_u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let y_data: Vec<f64> = x_data
        .iter()
        .map(|&x| (x + 0.4 * (rng.random::<f64>() - 0.5)).max(0.0))
        .collect();
    let l_tilde: Vec<f64> = x_data.iter().zip(&o_l).map(|(&x, &o)| x * (1.0 - o)).collect();
    let u_tilde: Vec<f64> = x_data.iter().zip(&o_u).map(|(&x, &o)| x * (1.0 + o)).collect();
    CalibrationCase {
        x: Image::new(h, w, x_data).unwrap(),
        fields: QuantileFields {
            o_l: Image::new(h, w, o_l).unwrap(),
            o_u: Image::new(h, w, o_u).unwrap(),
            l_tilde: Image::new(h, w, l_tilde).unwrap(),
            u_tilde: Image::new(h, w, u_tilde).unwrap(),
        },
        y: Image::new(h, w, y_data).unwrap(),
    }
}

// ---------------------------------------------------------------------------
// independent oracles

fn pearson_oracle(a: &[f64], b: &[f64]) -> f64 {
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let mb = b.iter().sum::<f64>() / b.len() as f64;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Average ranks by double loop: 1 + (#smaller) + (#equal - 1) / 2.
fn ranks_oracle(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&vi| {
            let smaller = v.iter().filter(|&&vj| vj < vi).count();
            let equal = v.iter().filter(|&&vj| vj == vi).count();
            smaller as f64 + 1.0 + (equal as f64 - 1.0) / 2.0
        })
        .collect()
}

fn spearman_oracle(a: &[f64], b: &[f64]) -> f64 {
    pearson_oracle(&ranks_oracle(a), &ranks_oracle(b))
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// One-sided Mann-Whitney test of `a` tending larger than `b`: normal
/// approximation with midranks, tie correction, and continuity correction.
fn rank_test_greater(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = ranks_oracle(&pooled);
    let rank_sum_a: f64 = ranks.iter().take(a.len()).sum();
    let u_a = rank_sum_a - na * (na + 1.0) / 2.0;
    let n = na + nb;
    pooled.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let z = (u_a - na * nb / 2.0 - 0.5) / variance.sqrt();
    (z, 1.0 - normal_cdf(z))
}

fn normal_cdf(z: f64) -> f64 {
    // Abramowitz & Stegun 7.1.26 rational approximation of erf.
    let x = z / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.3275911 * x.abs());
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-x * x).exp();
    let erf = if x < 0.0 { -erf } else { erf };
    0.5 * (1.0 + erf)
}

// ---------------------------------------------------------------------------
// gates

#[test]
fn a01_calibrated_intervals_keep_coverage_across_seeded_runs() {
    let mut miscoverages = Vec::new();
    for k in 0..20u64 {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            accelerations: vec![4],
            acs_fractions: BTreeMap::from([("4".to_string(), 0.08)]),
            train_size: 20,
            val_size: 5,
            calib_size: 200,
            test_size: 100,
            steps: 60,
            seed: 1000 + k,
            modes: vec![Mode::Qr],
            out_dir: dir.path().join("run").to_string_lossy().into_owned(),
            ..Default::default()
        };
        cmd_generate(&cfg, false).unwrap();
        cmd_train(&cfg, Mode::Qr).unwrap();
        cmd_calibrate(&cfg, Mode::Qr).unwrap();
        cmd_evaluate(&cfg, Mode::Qr).unwrap();
        let rows = metric_rows(&Path::new(&cfg.out_dir).join("qr/metrics.csv"));
        assert_eq!(rows.len(), 100, "expected 100 scored test cases");
        miscoverages.push(1.0 - mean(&rows.iter().map(|r| r.coverage).collect::<Vec<_>>()));
    }
    let mean_miss = mean(&miscoverages);
    let high = miscoverages.iter().filter(|&&m| m > 0.12).count();
    check(
        "a01 coverage guarantee",
        mean_miss <= 0.10 && high <= 2,
        format!("mean miscoverage {mean_miss:.4} (need <= 0.10), runs above 0.12: {high}/20 (need <= 2)"),
    );
}

#[test]
fn a02_risk_falls_and_coverage_rises_with_the_scale_factor() {
    let mut checked = 0usize;
    for fixture in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + fixture);
        let cases: Vec<CalibrationCase> =
            (0..3).map(|_| random_calibration_case(&mut rng, 12, 12)).collect();
        let lambdas: Vec<f64> = (0..=60).map(|k| k as f64 * 0.05).collect();
        let mut prev_risk = f64::INFINITY;
        let mut prev_cov = -1.0;
        for &lambda in &lambdas {
            let risk = empirical_risk(&cases, lambda).unwrap();
            let cov = mean(
                &cases
                    .iter()
                    .map(|c| coverage(&c.y, &interval(&c.x, &c.fields, lambda).unwrap()).unwrap())
                    .collect::<Vec<_>>(),
            );
            assert!(
                risk <= prev_risk,
                "fixture {fixture}: risk rose from {prev_risk} to {risk} at lambda {lambda}"
            );
            assert!(
                cov >= prev_cov,
                "fixture {fixture}: coverage fell from {prev_cov} to {cov} at lambda {lambda}"
            );
            prev_risk = risk;
            prev_cov = cov;
            checked += 1;
        }
    }
    check(
        "a02 scale monotonicity",
        checked == 50 * 61,
        format!("{checked} grid points over 50 random fixtures, exact ordering held"),
    );
}

#[test]
fn a03_trained_upper_quantile_recovers_the_laplace_offset() {
    let scale = 0.05;
    let target = scale * 10f64.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (h, w) = (32, 32);
    let train_pairs: Vec<(Image, Image)> =
        (0..12).map(|_| laplace_pair(&mut rng, h, w, scale)).collect();
    let mut config = TrainConfig::new(Mode::Qr, 4000, 33);
    config.learning_rate = 3e-3;
    config.batch = 2;
    let model = ConvModel::init(Mode::Qr, &ConvModel::DEFAULT_HIDDEN, 33).unwrap();
    let outcome = train(model, &train_pairs, &[], &config).unwrap();
    let mut offsets = Vec::new();
    for _ in 0..4 {
        let (x, _) = laplace_pair(&mut rng, h, w, scale);
        let fields = forward(&outcome.model, &x).unwrap();
        for (i, &xv) in x.data().iter().enumerate() {
            if xv >= 0.5 {
                offsets.push(fields.u_tilde.data()[i] - xv);
            }
        }
    }
    let mean_offset = mean(&offsets);
    let rel = (mean_offset - target).abs() / target;
    check(
        "a03 quantile recovery",
        rel <= 0.15,
        format!(
            "mean upper offset {mean_offset:.5} vs Laplace 0.95 quantile {target:.5}, relative error {rel:.3} (need <= 0.15)"
        ),
    );
}

#[test]
fn a04_analytic_gradients_match_finite_differences() {
    let epsilon = 1e-3;
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        for mode in [Mode::Qr, Mode::Resm] {
            let config = TrainConfig::new(mode, 1, seed);
            let mut attempts = 0u64;
            // The losses are piecewise differentiable, so draws whose
            // activations or residuals sit near a kink are re-rolled; the
            // model is redrawn with the images to move the pre-activations.
            let (model, x, y) = loop {
                attempts += 1;
                assert!(attempts <= 500, "no kink-free sample after 500 draws");
                let mut rng = ChaCha8Rng::seed_from_u64(
                    500 + seed * 1000 + 400 * u64::from(mode == Mode::Resm) + attempts,
                );
                let model = ConvModel::init(mode, &[2, 2], rng.random()).unwrap();
                let n = 4;
                let x_data: Vec<f64> = (0..n * n).map(|_| 0.2 + rng.random::<f64>()).collect();
                let y_data: Vec<f64> = x_data
                    .iter()
                    .map(|&v| (v + 0.3 * (rng.random::<f64>() - 0.5)).max(0.0))
                    .collect();
                let x = Image::new(n, n, x_data).unwrap();
                let y = Image::new(n, n, y_data).unwrap();
                if kink_margin(&model, &x, &y, &config).unwrap() >= 10.0 * epsilon {
                    break (model, x, y);
                }
            };
            let report = grad_check(&model, &x, &y, &config, epsilon).unwrap();
            worst = worst.max(report.max_rel_error);
        }
    }
    check(
        "a04 gradient exactness",
        worst <= 1e-4,
        format!("max relative error {worst:.2e} over 5 seeds x 2 modes (need <= 1e-4)"),
    );
}

#[test]
fn a05_correlations_match_double_loop_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 100;
        let quantize = i % 3 == 0;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            loop {
                let v: Vec<f64> = (0..n)
                    .map(|_| {
                        let x = rng.random::<f64>();
                        if quantize { (x * 5.0).round() / 5.0 } else { x }
                    })
                    .collect();
                if !is_constant(&v) {
                    return v;
                }
            }
        };
        let a_data = draw(&mut rng);
        let b_data = draw(&mut rng);
        let a = Image::new(10, 10, a_data.clone()).unwrap();
        let b = Image::new(10, 10, b_data.clone()).unwrap();
        worst = worst.max((pearson(&a, &b).unwrap() - pearson_oracle(&a_data, &b_data)).abs());
        worst = worst.max((spearman(&a, &b).unwrap() - spearman_oracle(&a_data, &b_data)).abs());
    }

    let mut region_worst = 0.0f64;
    for t in 0..3u64 {
        let mut prng = ChaCha8Rng::seed_from_u64(600 + t);
        let (h, w, g) = (30, 30, 3);
        let mut a_data: Vec<f64> = (0..h * w).map(|_| prng.random::<f64>()).collect();
        let b_data: Vec<f64> = (0..h * w).map(|_| prng.random::<f64>()).collect();
        if t == 0 {
            // Force one constant patch so the skip policy is exercised.
            for r in 0..10 {
                for c in 0..10 {
                    a_data[r * w + c] = 0.25;
                }
            }
        }
        let a = Image::new(h, w, a_data.clone()).unwrap();
        let b = Image::new(h, w, b_data.clone()).unwrap();
        let got = region_correlations(&a, &b, g, g).unwrap();
        let (mut ps, mut ss, mut kept, mut skipped) = (0.0, 0.0, 0usize, 0usize);
        for gr in 0..g {
            for gc in 0..g {
                let mut pa = Vec::new();
                let mut pb = Vec::new();
                for r in (gr * 10)..((gr + 1) * 10) {
                    for c in (gc * 10)..((gc + 1) * 10) {
                        pa.push(a_data[r * w + c]);
                        pb.push(b_data[r * w + c]);
                    }
                }
                if is_constant(&pa) || is_constant(&pb) {
                    skipped += 1;
                } else {
                    ps += pearson_oracle(&pa, &pb);
                    ss += spearman_oracle(&pa, &pb);
                    kept += 1;
                }
            }
        }
        assert_eq!((got.retained_patches, got.skipped_patches), (kept, skipped));
        region_worst = region_worst.max((got.pearson_mean - ps / kept as f64).abs());
        region_worst = region_worst.max((got.spearman_mean - ss / kept as f64).abs());
    }
    check(
        "a05 correlation oracles",
        worst <= 1e-12 && region_worst <= 1e-12,
        format!(
            "max whole-map deviation {worst:.2e}, max region deviation {region_worst:.2e} (need <= 1e-12)"
        ),
    );
}

#[test]
fn a06_risk_bound_matches_the_high_precision_fixture() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/hoeffding_grid.csv");
    let text = fs::read_to_string(path).unwrap();
    let mut rows = 0usize;
    let mut worst = 0.0f64;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let r_hat: f64 = f[0].parse().unwrap();
        let n: usize = f[1].parse().unwrap();
        let delta: f64 = f[2].parse().unwrap();
        let expected: f64 = f[3].parse().unwrap();
        worst = worst.max((hoeffding_upper(r_hat, n, delta) - expected).abs());
        rows += 1;
    }
    check(
        "a06 risk bound precision",
        rows == 1000 && worst <= 1e-12,
        format!("{rows} grid points, max absolute deviation {worst:.2e} (need <= 1e-12)"),
    );
}

#[test]
fn a07_qr_widths_track_error_better_than_resm_at_4x() {
    let run = default_run();
    let qr: Vec<f64> = run
        .rows
        .iter()
        .filter(|r| r.mode == "qr" && r.acceleration == 4.0)
        .map(|r| r.pearson)
        .collect();
    let resm: Vec<f64> = run
        .rows
        .iter()
        .filter(|r| r.mode == "resm" && r.acceleration == 4.0)
        .map(|r| r.pearson)
        .collect();
    assert!(qr.len() >= 50 && resm.len() >= 50, "need at least 50 cases per mode");
    let gap = mean(&qr) - mean(&resm);
    let (z, p) = rank_test_greater(&qr, &resm);
    check(
        "a07 width-error correlation gap at 4x",
        gap >= 0.05 && p < 0.05,
        format!(
            "qr mean {:.4}, resm mean {:.4}, gap {gap:+.4} (need >= 0.05); one-sided rank test z {z:.2}, p {p:.4} (need < 0.05); n {}/{}",
            mean(&qr),
            mean(&resm),
            qr.len(),
            resm.len()
        ),
    );
}

#[test]
fn a08_widths_grow_and_ssim_falls_with_acceleration() {
    let run = ladder_run();
    let levels = [2.0, 4.0, 6.0, 8.0, 10.0];
    let mut widths = Vec::new();
    let mut ssims = Vec::new();
    let mut counts = Vec::new();
    for &level in &levels {
        let rows: Vec<&MetricRow> = run
            .rows
            .iter()
            .filter(|r| r.mode == "qr" && r.acceleration == level)
            .collect();
        counts.push(rows.len());
        widths.push(mean(&rows.iter().map(|r| r.width).collect::<Vec<_>>()));
        ssims.push(mean(&rows.iter().map(|r| r.ssim).collect::<Vec<_>>()));
    }
    let enough = counts.iter().all(|&n| n >= 50);
    let widths_up = widths.windows(2).all(|p| p[0] < p[1]);
    let ssim_down = ssims.windows(2).all(|p| p[0] > p[1]);
    check(
        "a08 acceleration trends",
        enough && widths_up && ssim_down,
        format!(
            "cases per level {counts:?}; mean widths {:?} strictly increasing: {widths_up}; mean ssim {:?} strictly decreasing: {ssim_down}",
            widths.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>(),
            ssims.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn a09_rerunning_the_stock_config_reproduces_metric_bytes() {
    let run = default_run();
    let qr_ok = run.qr_first == run.qr_second;
    let resm_ok = run.resm_first == run.resm_second;
    check(
        "a09 rerun determinism",
        qr_ok && resm_ok,
        format!(
            "qr metrics identical: {qr_ok} ({} bytes), resm metrics identical: {resm_ok} ({} bytes)",
            run.qr_first.len(),
            run.resm_first.len()
        ),
    );
}

#[test]
fn a10_transforms_and_file_io_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let grid = ComplexGrid::new(
        64,
        64,
        (0..64 * 64)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect(),
    )
    .unwrap();
    let round_trip = ifft2(&fft2(&grid).unwrap()).unwrap();
    let fft_err = grid
        .data()
        .iter()
        .zip(round_trip.data())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);

    let img = Image::new(9, 7, (0..63).map(|_| rng.random::<f64>() * 3.0).collect()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.t");
    save_image(&path, &img).unwrap();
    let back = load_image(&path).unwrap();
    let bitwise = img
        .data()
        .iter()
        .zip(back.data())
        .all(|(&a, &b)| (a as f32).to_bits() == (b as f32).to_bits());

    let truth = shepp_logan(64, 64, &default_head_phantom()).unwrap();
    let mask = make_cartesian_mask(64, 1.0, 0.1, 0).unwrap();
    let recon = acquire(&truth, &mask, 0.0, 9).unwrap().recon;
    let recon_err = truth
        .data()
        .iter()
        .zip(recon.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    check(
        "a10 transform and io exactness",
        fft_err <= 1e-9 && bitwise && recon_err <= 1e-6,
        format!(
            "fft round trip {fft_err:.2e} (need <= 1e-9); tensor round trip bitwise: {bitwise}; fully sampled recon error {recon_err:.2e} (need <= 1e-6)"
        ),
    );
}
