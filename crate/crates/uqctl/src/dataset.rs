use std::path::PathBuf;

use mri_sim::{
    acquire, default_head_phantom, inject_lesion, make_cartesian_mask, shepp_logan, write_case,
    CaseData, CaseMeta, Ellipse,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{io_data, CliError};
use crate::seeds::derive_seed;

pub const SPLITS: [&str; 4] = ["train", "val", "calib", "test"];

pub fn split_size(cfg: &ExperimentConfig, split: &str) -> usize {
    match split {
        "train" => cfg.train_size,
        "val" => cfg.val_size,
        "calib" => cfg.calib_size,
        "test" => cfg.test_size,
        other => panic!("unknown split {other}"),
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

/// Per-case anatomy: each ellipse of the standard head phantom gets a small
/// random perturbation of position, size, tilt, and contrast. Draws a fixed
/// number of variates per ellipse so the stream stays aligned, and falls back
/// to the unperturbed ellipse if the jittered one fails validation.
pub fn jittered_phantom(rng: &mut ChaCha8Rng, jitter: f64) -> Vec<Ellipse> {
    default_head_phantom()
        .into_iter()
        .map(|e| {
            let (dx, dy) = (uniform(rng), uniform(rng));
            let (da, db) = (uniform(rng), uniform(rng));
            let (dr, di) = (uniform(rng), uniform(rng));
            if jitter == 0.0 {
                return e;
            }
            let (cx, cy) = e.center();
            let (a, b) = e.semi_axes();
            Ellipse::new(
                cx + 0.5 * jitter * dx,
                cy + 0.5 * jitter * dy,
                (a * (1.0 + jitter * da)).clamp(1e-3, 1.0),
                (b * (1.0 + jitter * db)).clamp(1e-3, 1.0),
                e.rotation() + 0.5 * jitter * dr,
                e.intensity_delta() * (1.0 + 0.5 * jitter * di),
            )
            .unwrap_or(e)
        })
        .collect()
}

/// Small bright ellipse placed well inside the head outline.
fn random_lesion(rng: &mut ChaCha8Rng) -> Ellipse {
    let cx = 0.45 * uniform(rng);
    let cy = 0.45 * uniform(rng);
    let a = 0.03 + 0.06 * rng.random::<f64>();
    let b = 0.03 + 0.06 * rng.random::<f64>();
    let rot = std::f64::consts::PI * rng.random::<f64>();
    let delta = 0.18 + 0.17 * rng.random::<f64>();
    Ellipse::new(cx, cy, a, b, rot, delta).expect("lesion geometry is always valid")
}

/// Writes all four splits under `<out>/dataset/<split>/case_NNNN/`.
/// Acceleration cycles through the configured list; each acceleration reuses
/// one fixed mask (offset 0). Lesions appear only in calib/test cases.
pub fn generate_dataset(cfg: &ExperimentConfig) -> Result<Vec<String>, CliError> {
    let root = cfg.seed;
    let mut outputs = Vec::new();
    for split in SPLITS {
        let split_dir = cfg.dataset_dir().join(split);
        std::fs::create_dir_all(&split_dir).map_err(|e| io_data(&split_dir, e))?;
        let lesions_allowed = split == "calib" || split == "test";
        for i in 0..split_size(cfg, split) {
            let case_seed = derive_seed(root, split, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(case_seed);

            let ellipses = jittered_phantom(&mut rng, cfg.phantom_jitter);
            let mut ground_truth = shepp_logan(cfg.grid_size, cfg.grid_size, &ellipses)?;
            let lesioned = lesions_allowed && rng.random::<f64>() < cfg.lesion_probability;
            if lesioned {
                let lesion = random_lesion(&mut rng);
                let texture_seed = derive_seed(root, "lesion-texture", case_seed);
                ground_truth = inject_lesion(&ground_truth, &lesion, texture_seed)?;
            }

            let acceleration = cfg.accelerations[i % cfg.accelerations.len()];
            let acs_fraction = cfg.acs_fraction_for(acceleration);
            let mask = make_cartesian_mask(cfg.grid_size, acceleration as f64, acs_fraction, 0)?;
            let acq_seed = derive_seed(root, "acquire", case_seed);
            let record = acquire(&ground_truth, &mask, cfg.noise_std, acq_seed)?;

            let case_dir = split_dir.join(format!("case_{i:04}"));
            write_case(
                &case_dir,
                &CaseData {
                    ground_truth,
                    recon: record.recon,
                    mask_row: mask.to_row_image(),
                    meta: CaseMeta {
                        acceleration: acceleration as f64,
                        acs_fraction,
                        noise_std: cfg.noise_std,
                        seed: case_seed,
                        lesioned,
                    },
                },
            )?;
        }
        outputs.push(split_dir.display().to_string());
    }
    Ok(outputs)
}

/// Case directories of one split in deterministic (name) order.
pub fn split_case_dirs(cfg: &ExperimentConfig, split: &str) -> Result<Vec<PathBuf>, CliError> {
    let dir = cfg.dataset_dir().join(split);
    let entries = std::fs::read_dir(&dir).map_err(|e| {
        CliError::Data(format!(
            "{}: {e} (run `uqctl generate` first)",
            dir.display()
        ))
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(CliError::Data(format!(
            "{} contains no case directories",
            dir.display()
        )));
    }
    Ok(dirs)
}
