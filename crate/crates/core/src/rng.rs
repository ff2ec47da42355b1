use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for stream `stream` of base seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for replication `rep` of cell `cell` in a parameter sweep.
pub fn cell_stream(cell: usize, rep: usize) -> u64 {
    ((cell as u64) << 32) | rep as u64
}
