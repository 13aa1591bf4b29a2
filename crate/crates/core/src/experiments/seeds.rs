//! Splittable seed tree: every random stream is addressed by a path of
//! integers below the root seed, so results do not depend on thread scheduling.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed at `path` below `root`.
pub fn derive(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix(root.wrapping_add(GAMMA)), |s, &p| mix(s ^ mix(p.wrapping_add(GAMMA))))
}

/// Stream labels used as the first path element.
pub mod stream {
    pub const ANGLES: u64 = 1;
    pub const TRIAL: u64 = 2;
    pub const CHANNEL: u64 = 3;
    pub const SNAPSHOTS: u64 = 4;
}
