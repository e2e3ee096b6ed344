//! Plain-text `key=value` pipeline configuration files.
//!
//! Keys match the pipeline configuration field names one to one;
//! absent keys keep their defaults, unknown keys are errors. Angles
//! are radians, lengths meters. Blank lines and `#` comments are
//! skipped. Command-line flags override file values.

use crate::numfmt::fmt_f64;
use graspforge_core::pipeline::PipelineConfig;

/// Failure modes of configuration parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// A line without a `key=value` separator.
    MissingSeparator { line: usize },
    /// A key that is not a configuration field.
    UnknownKey { line: usize, key: String },
    /// A value that does not parse for its field.
    BadValue { line: usize, key: String },
    /// A parsed configuration violating a field invariant.
    Invalid { reason: &'static str },
}

impl core::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConfigError::MissingSeparator { line } => {
                write!(f, "line {line}: expected key=value")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(f, "line {line}: unknown key `{key}`")
            }
            ConfigError::BadValue { line, key } => {
                write!(f, "line {line}: bad value for `{key}`")
            }
            ConfigError::Invalid { reason } => write!(f, "invalid config: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_field<T: core::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
    })
}

/// Parses a configuration; fields not named keep their defaults.
pub fn parse_config(text: &str) -> Result<PipelineConfig, ConfigError> {
    let mut cfg = PipelineConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or(ConfigError::MissingSeparator { line })?;
        let key = key.trim();
        match key {
            "gamma" => cfg.gamma = parse_field(value, key, line)?,
            "cone_facets" => cfg.cone_facets = parse_field(value, key, line)?,
            "candidates_per_object" => cfg.candidates_per_object = parse_field(value, key, line)?,
            "pitch_count" => cfg.pitch_count = parse_field(value, key, line)?,
            "max_width" => cfg.max_width = parse_field(value, key, line)?,
            "ground_clearance" => cfg.ground_clearance = parse_field(value, key, line)?,
            "dedup_center" => cfg.dedup_center = parse_field(value, key, line)?,
            "dedup_angle" => cfg.dedup_angle = parse_field(value, key, line)?,
            "seed" => cfg.seed = parse_field(value, key, line)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Checks the field invariants: positive quantities, dedup angle
/// under a half turn.
pub fn validate(cfg: &PipelineConfig) -> Result<(), ConfigError> {
    let positive = [
        (cfg.gamma, "gamma must be positive"),
        (cfg.max_width, "max_width must be positive"),
        (cfg.ground_clearance, "ground_clearance must be positive"),
        (cfg.dedup_center, "dedup_center must be positive"),
        (cfg.dedup_angle, "dedup_angle must be positive"),
    ];
    for (value, reason) in positive {
        if !(value > 0.0) || !value.is_finite() {
            return Err(ConfigError::Invalid { reason });
        }
    }
    if cfg.dedup_angle >= core::f64::consts::PI {
        return Err(ConfigError::Invalid {
            reason: "dedup_angle must be below pi",
        });
    }
    let counts = [
        (cfg.cone_facets, "cone_facets must be positive"),
        (cfg.candidates_per_object, "candidates_per_object must be positive"),
        (cfg.pitch_count, "pitch_count must be positive"),
    ];
    for (value, reason) in counts {
        if value == 0 {
            return Err(ConfigError::Invalid { reason });
        }
    }
    Ok(())
}

/// The resolved configuration as ordered `(key, value)` text pairs.
pub fn config_entries(cfg: &PipelineConfig) -> Vec<(&'static str, String)> {
    vec![
        ("gamma", fmt_f64(cfg.gamma)),
        ("cone_facets", cfg.cone_facets.to_string()),
        ("candidates_per_object", cfg.candidates_per_object.to_string()),
        ("pitch_count", cfg.pitch_count.to_string()),
        ("max_width", fmt_f64(cfg.max_width)),
        ("ground_clearance", fmt_f64(cfg.ground_clearance)),
        ("dedup_center", fmt_f64(cfg.dedup_center)),
        ("dedup_angle", fmt_f64(cfg.dedup_angle)),
        ("seed", cfg.seed.to_string()),
    ]
}

/// Renders a configuration as a loadable `key=value` file.
pub fn write_config(cfg: &PipelineConfig) -> String {
    let mut out = String::new();
    for (key, value) in config_entries(cfg) {
        out.push_str(key);
        out.push('=');
        out.push_str(&value);
        out.push('\n');
    }
    out
}
