use crate::error::SimError;

/// Ellipse in the [-1,1] x [-1,1] scene frame. `semi_axis_a` runs along x
/// and `semi_axis_b` along y before the counter-clockwise rotation is
/// applied. `intensity_delta` is added to every covered pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipse {
    center_x: f64,
    center_y: f64,
    semi_axis_a: f64,
    semi_axis_b: f64,
    rotation: f64,
    intensity_delta: f64,
}

impl Ellipse {
    pub fn new(
        center_x: f64,
        center_y: f64,
        semi_axis_a: f64,
        semi_axis_b: f64,
        rotation: f64,
        intensity_delta: f64,
    ) -> Result<Self, SimError> {
        if !(semi_axis_a > 0.0 && semi_axis_a <= 1.0 && semi_axis_b > 0.0 && semi_axis_b <= 1.0) {
            return Err(SimError::Parameter(format!(
                "semi-axes must lie in (0, 1], got {semi_axis_a} and {semi_axis_b}"
            )));
        }
        for (name, v) in [
            ("center_x", center_x),
            ("center_y", center_y),
            ("rotation", rotation),
            ("intensity_delta", intensity_delta),
        ] {
            if !v.is_finite() {
                return Err(SimError::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        // Bounding-circle check: support must reach into the unit square.
        let r = semi_axis_a.max(semi_axis_b);
        if center_x.abs() - r > 1.0 || center_y.abs() - r > 1.0 {
            return Err(SimError::Parameter(format!(
                "ellipse centered at ({center_x}, {center_y}) with max semi-axis {r} \
                 lies outside the unit square"
            )));
        }
        Ok(Self {
            center_x,
            center_y,
            semi_axis_a,
            semi_axis_b,
            rotation,
            intensity_delta,
        })
    }

    /// Point-in-ellipse test: rotate the offset into the ellipse frame and
    /// evaluate the quadratic form (boundary counts as inside).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center_x;
        let dy = y - self.center_y;
        let (sin, cos) = self.rotation.sin_cos();
        let xr = dx * cos + dy * sin;
        let yr = -dx * sin + dy * cos;
        let qa = xr / self.semi_axis_a;
        let qb = yr / self.semi_axis_b;
        qa * qa + qb * qb <= 1.0
    }

    /// Half-extents of the axis-aligned bounding box of the rotated ellipse.
    pub fn bounding_half_extents(&self) -> (f64, f64) {
        let (sin, cos) = self.rotation.sin_cos();
        let hx = ((self.semi_axis_a * cos).powi(2) + (self.semi_axis_b * sin).powi(2)).sqrt();
        let hy = ((self.semi_axis_a * sin).powi(2) + (self.semi_axis_b * cos).powi(2)).sqrt();
        (hx, hy)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.center_x, self.center_y)
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        (self.semi_axis_a, self.semi_axis_b)
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn intensity_delta(&self) -> f64 {
        self.intensity_delta
    }
}
