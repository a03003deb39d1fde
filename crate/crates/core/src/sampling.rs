//! Seed derivation and connected-graph sampling shared by the experiment drivers.

use rand::Rng;

use crate::generators::{rng_from_seed, ModelParams, ModelRng};
use crate::graph::{Graph, GraphError};

/// Attempts before giving up on drawing a connected graph.
pub const MAX_REGENERATIONS: usize = 10_000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a root seed with a path of identifiers (model, n, sample index, ...) into an
/// independent stream seed. Independent of evaluation order, so worker count never matters.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

/// A connected graph drawn from a model together with the RNG stream that produced it, so
/// later choices (vertices, configurations) continue the same reproducible stream.
#[derive(Debug)]
pub struct ConnectedSample {
    pub graph: Graph,
    pub regenerations: usize,
    pub rng: ModelRng,
}

/// Draws graphs from `params` until one is connected, counting the rejected draws.
pub fn sample_connected(
    params: &ModelParams,
    n: usize,
    sample_seed: u64,
) -> Result<ConnectedSample, GraphError> {
    let mut rng = rng_from_seed(sample_seed);
    for regenerations in 0..MAX_REGENERATIONS {
        let graph = params.generate(n, rng.gen())?;
        if graph.is_connected() {
            return Ok(ConnectedSample {
                graph,
                regenerations,
                rng,
            });
        }
    }
    Err(GraphError::InvalidParameter(format!(
        "no connected {} graph on {n} vertices after {MAX_REGENERATIONS} draws",
        params.model
    )))
}
