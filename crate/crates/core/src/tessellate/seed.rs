use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hierarchical seed: a master seed plus a path of indices.
///
/// Every random draw in the crate comes from [`SeedStream::rng`] on some
/// path, so results depend only on `(master, path)` and never on the order
/// in which work is scheduled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeedStream {
    master: u64,
    path: Vec<u64>,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream { master, path: Vec::new() }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Stream one level further down the tree.
    pub fn child(&self, index: u64) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(index);
        SeedStream { master: self.master, path }
    }

    /// 64-bit digest of `(master, path)`.
    pub fn seed(&self) -> u64 {
        let mut h = splitmix64(self.master);
        for (depth, &i) in self.path.iter().enumerate() {
            h = splitmix64(h ^ splitmix64(i.wrapping_add((depth as u64 + 1) << 56)));
        }
        h
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}
