//! Seed splitting.
//!
//! Every random stream derives from one master seed: stream `k` is a
//! ChaCha8 generator keyed by the master seed with stream id `k`. Streams
//! are independent of evaluation order, so parallel and serial runs agree
//! bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
