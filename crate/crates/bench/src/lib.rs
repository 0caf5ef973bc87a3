//! Fixtures shared by the benchmarks in `benches/`.

use ftbeam::{sample_scenario, ChannelRealization, SystemConfig};

/// Default geometry with the given power budget and throughput target.
pub fn config(pmax_dbm: f64, rbar_bits: f64) -> SystemConfig {
    SystemConfig { pmax_dbm, rbar_bits, ..SystemConfig::default() }
}

/// The first `n` scenarios drawn under `config`, seeds `0..n`.
pub fn scenarios(config: &SystemConfig, n: u64) -> Vec<ChannelRealization> {
    (0..n).map(|s| sample_scenario(s, config).expect("valid config")).collect()
}
