/// Splitmix64 finalizer: one bijective scramble step.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Stable per-stage, per-case seed derivation: independent streams for
/// distinct (tag, index) pairs under one root seed.
pub fn derive_seed(root: u64, tag: &str, index: u64) -> u64 {
    mix(mix(root ^ fnv1a64(tag)) ^ index)
}
