use grid_core::Image;

use crate::error::MetricsError;
use crate::maps::check_shape;

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Two-pass population Pearson correlation on raw slices. `None` when either
/// side is constant (mathematically zero variance).
fn pearson_slice(a: &[f64], b: &[f64]) -> Option<f64> {
    if is_constant(a) || is_constant(b) {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..a.len() {
        let da = a[i] - ma;
        let db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    Some(cov / (va.sqrt() * vb.sqrt()))
}

/// Ranks 1..=n with ties sharing the average of their positions; smaller
/// values receive smaller ranks.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite pixels"));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) hold one tied run; 1-based ranks
        // start+1 ..= end average to (start + end + 1) / 2.
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

fn spearman_slice(a: &[f64], b: &[f64]) -> Option<f64> {
    if is_constant(a) || is_constant(b) {
        return None;
    }
    pearson_slice(&average_ranks(a), &average_ranks(b))
}

pub fn pearson(a: &Image, b: &Image) -> Result<f64, MetricsError> {
    check_shape("b", a, b)?;
    pearson_slice(a.data(), b.data()).ok_or_else(|| {
        MetricsError::Degenerate("pearson requires nonzero variance in both inputs".into())
    })
}

pub fn spearman(a: &Image, b: &Image) -> Result<f64, MetricsError> {
    check_shape("b", a, b)?;
    spearman_slice(a.data(), b.data()).ok_or_else(|| {
        MetricsError::Degenerate("spearman requires at least two distinct values per input".into())
    })
}

/// Per-patch correlation means over a balanced grid partition.
#[derive(Debug, Clone, Copy)]
pub struct RegionCorrelations {
    pub pearson_mean: f64,
    pub spearman_mean: f64,
    pub retained_patches: usize,
    pub skipped_patches: usize,
}

pub const DEFAULT_REGION_GRID: usize = 10;

/// Splits both images into `grid_rows` x `grid_cols` non-overlapping patches
/// whose side lengths differ by at most one pixel, correlates each patch, and
/// averages over patches where both maps vary. Constant patches are skipped
/// and counted rather than scored as zero.
pub fn region_correlations(
    a: &Image,
    b: &Image,
    grid_rows: usize,
    grid_cols: usize,
) -> Result<RegionCorrelations, MetricsError> {
    check_shape("b", a, b)?;
    if grid_rows == 0 || grid_cols == 0 {
        return Err(MetricsError::Parameter("grid must have at least one cell".into()));
    }
    if a.height() < grid_rows || a.width() < grid_cols {
        return Err(MetricsError::Parameter(format!(
            "image {}x{} too small for a {}x{} patch grid",
            a.height(),
            a.width(),
            grid_rows,
            grid_cols
        )));
    }
    let (h, w) = (a.height(), a.width());
    let mut pearson_sum = 0.0;
    let mut spearman_sum = 0.0;
    let mut retained = 0usize;
    let mut skipped = 0usize;
    for gr in 0..grid_rows {
        let r0 = gr * h / grid_rows;
        let r1 = (gr + 1) * h / grid_rows;
        for gc in 0..grid_cols {
            let c0 = gc * w / grid_cols;
            let c1 = (gc + 1) * w / grid_cols;
            let mut pa = Vec::with_capacity((r1 - r0) * (c1 - c0));
            let mut pb = Vec::with_capacity((r1 - r0) * (c1 - c0));
            for r in r0..r1 {
                for c in c0..c1 {
                    pa.push(a[(r, c)]);
                    pb.push(b[(r, c)]);
                }
            }
            match (pearson_slice(&pa, &pb), spearman_slice(&pa, &pb)) {
                (Some(p), Some(s)) => {
                    pearson_sum += p;
                    spearman_sum += s;
                    retained += 1;
                }
                _ => skipped += 1,
            }
        }
    }
    if retained == 0 {
        return Err(MetricsError::Degenerate(
            "every patch was constant in at least one map".into(),
        ));
    }
    Ok(RegionCorrelations {
        pearson_mean: pearson_sum / retained as f64,
        spearman_mean: spearman_sum / retained as f64,
        retained_patches: retained,
        skipped_patches: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(v: Vec<f64>) -> Image {
        let n = v.len();
        Image::new(1, n, v).expect("row image")
    }

    #[test]
    fn pearson_textbook_examples() {
        let a = img(vec![1.0, 2.0, 3.0, 4.0]);
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let neg = a.map(|v| -2.0 * v + 3.0);
        assert!((pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
        // cov = 0.75, both variances 1.25, so r = 0.6 exactly.
        let b = img(vec![2.0, 1.0, 4.0, 3.0]);
        assert!((pearson(&a, &b).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let a = img(vec![1.0, 2.0, 3.0]);
        let flat = img(vec![0.5, 0.5, 0.5]);
        assert!(matches!(pearson(&a, &flat), Err(MetricsError::Degenerate(_))));
        assert!(matches!(pearson(&flat, &a), Err(MetricsError::Degenerate(_))));
        assert!(matches!(spearman(&flat, &a), Err(MetricsError::Degenerate(_))));
    }

    #[test]
    fn average_ranks_handle_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0, 5.0]), vec![3.0, 1.0, 3.0, 3.0]);
        assert_eq!(average_ranks(&[0.3, 0.1, 0.2]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn spearman_is_rank_based() {
        let a = img(vec![0.5, 1.0, 2.0, 3.5]);
        let cubed = a.map(|v| v * v * v);
        assert!((spearman(&a, &cubed).unwrap() - 1.0).abs() < 1e-12);
        let reversed = img(vec![3.5, 2.0, 1.0, 0.5]);
        assert!((spearman(&a, &reversed).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_tie_example_matches_rank_table() {
        // a = [1,2,2,3] ranks to [1, 2.5, 2.5, 4]; b = [1,2,3,4] ranks to
        // itself. Pearson of those rank vectors is 1.125 / sqrt(1.125 * 1.25).
        let a = img(vec![1.0, 2.0, 2.0, 3.0]);
        let b = img(vec![1.0, 2.0, 3.0, 4.0]);
        let expected = 1.125 / (1.125f64 * 1.25).sqrt();
        assert!((spearman(&a, &b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn balanced_grid_covers_image_with_near_equal_patches() {
        // 64 rows over a 10-way split: boundaries i*64/10 give sizes in {6,7}.
        let bounds: Vec<usize> = (0..=10).map(|i| i * 64 / 10).collect();
        assert_eq!(bounds[0], 0);
        assert_eq!(bounds[10], 64);
        for pair in bounds.windows(2) {
            let size = pair[1] - pair[0];
            assert!(size == 6 || size == 7);
        }
    }

    #[test]
    fn region_means_are_one_for_identical_varying_maps() {
        let a = Image::new(20, 20, (0..400).map(|i| (i * 7 % 31) as f64).collect()).unwrap();
        let r = region_correlations(&a, &a, 10, 10).unwrap();
        assert!((r.pearson_mean - 1.0).abs() < 1e-12);
        assert!((r.spearman_mean - 1.0).abs() < 1e-12);
        assert_eq!(r.retained_patches, 100);
        assert_eq!(r.skipped_patches, 0);
    }

    #[test]
    fn constant_patches_are_skipped_and_counted() {
        // Left half constant in `a`: those 50 patches drop out.
        let mut a = Image::zeros(20, 20);
        let mut b = Image::zeros(20, 20);
        for r in 0..20 {
            for c in 0..20 {
                b[(r, c)] = (r * 20 + c) as f64;
                a[(r, c)] = if c < 10 { 1.0 } else { ((r + 2 * c) % 7) as f64 };
            }
        }
        let res = region_correlations(&a, &b, 10, 10).unwrap();
        assert_eq!(res.retained_patches + res.skipped_patches, 100);
        assert_eq!(res.skipped_patches, 50);
        let flat = Image::zeros(20, 20);
        assert!(matches!(
            region_correlations(&flat, &b, 10, 10),
            Err(MetricsError::Degenerate(_))
        ));
    }

    #[test]
    fn too_small_image_is_rejected() {
        let a = Image::zeros(4, 4);
        assert!(matches!(
            region_correlations(&a, &a, 10, 10),
            Err(MetricsError::Parameter(_))
        ));
    }
}
