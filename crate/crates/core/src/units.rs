//! dB / dBm boundary conversions.
//!
//! The model works exclusively in linear SI units; configuration files speak
//! dB (dimensionless gains) and dBm (powers). These helpers are the only
//! sanctioned crossing point.

/// Dimensionless ratio from decibels: `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Decibels from a dimensionless ratio.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Watts from dBm: `10^((dbm - 30)/10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// dBm from Watts.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
