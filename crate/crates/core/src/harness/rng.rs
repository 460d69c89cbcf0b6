use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which experiment a random stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    Ber = 1,
    FadingPdf = 2,
}

/// ChaCha8 keyed by `seed`, with the 64-bit stream id packing
/// `domain (4 bits) | point (12 bits) | attempt (8 bits) | trial (40 bits)`.
///
/// Every trial owns its stream, so results do not depend on how trials are
/// scheduled across threads.
pub fn substream(seed: u64, domain: StreamDomain, point: u64, trial: u64, attempt: u64) -> ChaCha8Rng {
    debug_assert!(point < 1 << 12 && attempt < 1 << 8 && trial < 1 << 40);
    let id = (domain as u64) << 60
        | (point & 0xfff) << 48
        | (attempt & 0xff) << 40
        | (trial & ((1 << 40) - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
