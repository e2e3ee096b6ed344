//! ASCII XYZ point-cloud files: one `x y z` triple per line, meters,
//! nine significant digits.

use crate::numfmt::fmt_triple;
use graspforge_core::nalgebra::Point3;
use std::fmt::Write as _;

/// Failure modes of cloud parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum CloudError {
    /// A line without exactly three finite coordinates.
    BadLine { line: usize },
}

impl core::fmt::Display for CloudError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CloudError::BadLine { line } => {
                write!(f, "line {line}: expected three finite coordinates")
            }
        }
    }
}

impl std::error::Error for CloudError {}

/// Parses cloud text; blank lines and `#` comments are skipped.
pub fn parse_cloud(text: &str) -> Result<Vec<Point3<f64>>, CloudError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut coords = [0.0; 3];
        let mut tokens = trimmed.split_whitespace();
        for c in &mut coords {
            *c = tokens
                .next()
                .and_then(|t| t.parse::<f64>().ok())
                .filter(|x| x.is_finite())
                .ok_or(CloudError::BadLine { line })?;
        }
        if tokens.next().is_some() {
            return Err(CloudError::BadLine { line });
        }
        points.push(Point3::new(coords[0], coords[1], coords[2]));
    }
    Ok(points)
}

/// Renders points as cloud text.
pub fn write_cloud(points: &[Point3<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let _ = writeln!(out, "{}", fmt_triple(p.x, p.y, p.z));
    }
    out
}
