use crate::error::MetricsError;

/// One evaluated case, ready to serialize as a CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub case_id: String,
    pub acceleration: usize,
    pub mode: String,
    pub pearson: f64,
    pub spearman: f64,
    pub pearson_region: f64,
    pub spearman_region: f64,
    pub coverage: f64,
    pub ssim: f64,
    pub mean_rel_width_pct: f64,
    pub skipped_patches: usize,
}

pub const METRICS_CSV_HEADER: &str = "case_id,acceleration,mode,pearson,spearman,\
pearson_region,spearman_region,coverage,ssim,mean_rel_width_pct,skipped_patches";

impl MetricsRecord {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let values = [
            ("pearson", self.pearson),
            ("spearman", self.spearman),
            ("pearson_region", self.pearson_region),
            ("spearman_region", self.spearman_region),
            ("coverage", self.coverage),
            ("ssim", self.ssim),
            ("mean_rel_width_pct", self.mean_rel_width_pct),
        ];
        for (name, v) in values {
            if !v.is_finite() {
                return Err(MetricsError::Degenerate(format!("{name} is not finite: {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.coverage) {
            return Err(MetricsError::Degenerate(format!(
                "coverage must lie in [0, 1], got {}",
                self.coverage
            )));
        }
        Ok(())
    }

    /// CSV row without trailing newline. Rust float formatting always uses a
    /// '.' decimal separator, independent of locale.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.case_id,
            self.acceleration,
            self.mode,
            self.pearson,
            self.spearman,
            self.pearson_region,
            self.spearman_region,
            self.coverage,
            self.ssim,
            self.mean_rel_width_pct,
            self.skipped_patches
        )
    }
}

/// Full CSV document with header, '\n' line endings, trailing newline.
pub fn metrics_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&rec.csv_row());
        out.push('\n');
    }
    out
}
