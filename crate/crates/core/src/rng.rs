use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible random stream identified by `(root_seed, key, stream_id)`.
///
/// Backed by ChaCha, whose 64-bit stream parameter makes distinct stream ids
/// independent by construction. The ChaCha key is built from `root_seed` and
/// an optional `key` (used to separate e.g. power-study rows), so replicate
/// `r` always sees the same numbers no matter which thread runs it.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    key: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        Self::keyed(root_seed, 0, stream_id)
    }

    pub fn keyed(root_seed: u64, key: u64, stream_id: u64) -> Self {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&root_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&key.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(stream_id);
        Self {
            root_seed,
            key,
            stream_id,
            rng,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// FNV-1a, used to turn labels into stable stream keys.
pub(crate) fn label_key(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
