use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use univnc::network::{random_dag, Network};

/// Seeded random DAGs with 7 to 10 nodes, 2 or 3 sinks and min-cut at
/// least 2 at every sink.
pub fn dag_corpus(count: usize, base: u64) -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    (0..count)
        .map(|i| {
            let nodes = rng.gen_range(7..=10);
            let sinks = rng.gen_range(2..=3);
            random_dag(base.wrapping_mul(1000) + i as u64, nodes, 0.4, sinks, 2).expect("valid parameters")
        })
        .collect()
}

/// Returns `Err(msg)` from the enclosing check when `cond` is false.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}
pub(crate) use ensure;
