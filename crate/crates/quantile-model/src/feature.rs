//! Channel-major feature maps and the 3x3 convolution kernels used by both
//! the forward and reverse passes. Zero padding of one pixel throughout.

/// `data` holds `channels` planes of `height * width` scalars back to back.
#[derive(Debug, Clone)]
pub(crate) struct FeatureMap {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    #[inline]
    pub fn plane(&self, ch: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[ch * n..(ch + 1) * n]
    }

    #[inline]
    pub fn plane_mut(&mut self, ch: usize) -> &mut [f64] {
        let n = self.height * self.width;
        &mut self.data[ch * n..(ch + 1) * n]
    }
}

/// dst += src (*) k, where k is a 3x3 kernel in row-major order and src is
/// implicitly zero-padded by one pixel.
pub(crate) fn conv3x3_add(src: &[f64], h: usize, w: usize, k: &[f64], dst: &mut [f64]) {
    debug_assert_eq!(src.len(), h * w);
    debug_assert_eq!(dst.len(), h * w);
    debug_assert_eq!(k.len(), 9);
    for r in 0..h {
        let up = r > 0;
        let down = r + 1 < h;
        for c in 0..w {
            let left = c > 0;
            let right = c + 1 < w;
            let i = r * w + c;
            let mut acc = k[4] * src[i];
            if up {
                let j = i - w;
                acc += k[1] * src[j];
                if left {
                    acc += k[0] * src[j - 1];
                }
                if right {
                    acc += k[2] * src[j + 1];
                }
            }
            if left {
                acc += k[3] * src[i - 1];
            }
            if right {
                acc += k[5] * src[i + 1];
            }
            if down {
                let j = i + w;
                acc += k[7] * src[j];
                if left {
                    acc += k[6] * src[j - 1];
                }
                if right {
                    acc += k[8] * src[j + 1];
                }
            }
            dst[i] += acc;
        }
    }
}

/// Accumulates the weight gradient of one (out, in) channel pair:
/// dk[t] += sum over valid pixels of dz[r,c] * src[r+dr-1, c+dc-1].
pub(crate) fn conv3x3_weight_grad(src: &[f64], h: usize, w: usize, dz: &[f64], dk: &mut [f64]) {
    debug_assert_eq!(dk.len(), 9);
    for dr in 0..3usize {
        // Valid output rows: 0 <= r + dr - 1 < h.
        let r_lo = 1usize.saturating_sub(dr);
        let r_hi = (h + 1 - dr).min(h);
        for dc in 0..3usize {
            let c_lo = 1usize.saturating_sub(dc);
            let c_hi = (w + 1 - dc).min(w);
            let mut acc = 0.0;
            for r in r_lo..r_hi {
                let sr = r + dr - 1;
                let dz_row = &dz[r * w + c_lo..r * w + c_hi];
                let src_row = &src[sr * w + (c_lo + dc - 1)..sr * w + (c_hi + dc - 1)];
                for (a, b) in dz_row.iter().zip(src_row) {
                    acc += a * b;
                }
            }
            dk[dr * 3 + dc] += acc;
        }
    }
}

/// 180-degree rotation of a 3x3 kernel; convolving the output-side gradient
/// with this gives the input-side gradient of a zero-padded convolution.
pub(crate) fn rotate180(k: &[f64]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for t in 0..9 {
        out[t] = k[8 - t];
    }
    out
}
