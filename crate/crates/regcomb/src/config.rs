//! Work bounds and precision knobs, overridable via environment variables.

pub const ENV_PRECISION_BITS: &str = "REGCOMB_PRECISION_BITS";
pub const ENV_WORK_BOUND: &str = "REGCOMB_WORK_BOUND";
pub const ENV_THREADS: &str = "REGCOMB_THREADS";

pub const DEFAULT_PRECISION_BITS: usize = 200;
pub const DEFAULT_WORK_BOUND: u64 = 10_000_000;

fn env_parse<T: std::str::FromStr>(name: &str) -> Option<T> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

pub fn precision_bits() -> usize {
    env_parse(ENV_PRECISION_BITS).unwrap_or(DEFAULT_PRECISION_BITS)
}

/// Generic work bound: enumeration nodes, DP states, matrix cells.
pub fn work_bound() -> u64 {
    env_parse(ENV_WORK_BOUND).unwrap_or(DEFAULT_WORK_BOUND)
}
