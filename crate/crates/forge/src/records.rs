//! Line-delimited JSON for annotation records, ranked predictions,
//! labeled proposals, and evaluation reports.
//!
//! One record per line, field names fixed, floats printed with nine
//! significant digits. Quaternions are stored as `[x, y, z, w]`
//! (vector part first, scalar last). Prediction files carry the same
//! fields as annotation files plus a trailing `confidence`.

use crate::numfmt::fmt_f64;
use graspforge_core::evaluation::{EvalReport, REPORT_KS};
use graspforge_core::grasp::Grasp;
use graspforge_core::nalgebra::{Point3, Quaternion, UnitQuaternion};
use graspforge_core::pipeline::{AnnotationRecord, GraspLabel};
use graspforge_core::proposal::Proposal;
use serde::Deserialize;
use std::fmt::Write as _;

/// An annotation record ranked by a confidence score.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub record: AnnotationRecord,
    pub confidence: f64,
}

/// Failure modes of record parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordError {
    /// A line that is not a well-formed record object.
    Json { line: usize, message: String },
    /// A `label` value other than `positive` or `negative`.
    BadLabel { line: usize },
    /// A quaternion whose norm strays from one by more than 1e-3.
    BadQuaternion { line: usize },
    /// A prediction line without a `confidence` field.
    MissingConfidence { line: usize },
}

impl core::fmt::Display for RecordError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RecordError::Json { line, message } => write!(f, "line {line}: {message}"),
            RecordError::BadLabel { line } => {
                write!(f, "line {line}: label must be `positive` or `negative`")
            }
            RecordError::BadQuaternion { line } => {
                write!(f, "line {line}: quaternion is not unit length")
            }
            RecordError::MissingConfidence { line } => {
                write!(f, "line {line}: prediction lacks a confidence field")
            }
        }
    }
}

impl std::error::Error for RecordError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordWire {
    object_id: String,
    c1: [f64; 3],
    c2: [f64; 3],
    center: [f64; 3],
    quaternion: [f64; 4],
    pitch: f64,
    width: f64,
    antipodal: bool,
    force_closure: bool,
    score: f64,
    label: String,
    #[serde(default)]
    confidence: Option<f64>,
}

fn point(c: [f64; 3]) -> Point3<f64> {
    Point3::new(c[0], c[1], c[2])
}

fn wire_to_record(wire: RecordWire, line: usize) -> Result<(AnnotationRecord, Option<f64>), RecordError> {
    let label = match wire.label.as_str() {
        "positive" => GraspLabel::Positive,
        "negative" => GraspLabel::Negative,
        _ => return Err(RecordError::BadLabel { line }),
    };
    let [x, y, z, w] = wire.quaternion;
    let raw = Quaternion::new(w, x, y, z);
    if (raw.norm() - 1.0).abs() > 1e-3 {
        return Err(RecordError::BadQuaternion { line });
    }
    let record = AnnotationRecord {
        object_id: wire.object_id,
        c1: point(wire.c1),
        c2: point(wire.c2),
        center: point(wire.center),
        quaternion: UnitQuaternion::from_quaternion(raw),
        pitch: wire.pitch,
        width: wire.width,
        antipodal: wire.antipodal,
        force_closure: wire.force_closure,
        score: wire.score,
        label,
    };
    Ok((record, wire.confidence))
}

fn parse_lines(text: &str) -> Result<Vec<(AnnotationRecord, Option<f64>, usize)>, RecordError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let wire: RecordWire = serde_json::from_str(raw).map_err(|e| RecordError::Json {
            line,
            message: e.to_string(),
        })?;
        let (record, confidence) = wire_to_record(wire, line)?;
        out.push((record, confidence, line));
    }
    Ok(out)
}

/// Parses annotation records; a `confidence` field is tolerated and
/// dropped so prediction files also load as plain records.
pub fn parse_records(text: &str) -> Result<Vec<AnnotationRecord>, RecordError> {
    Ok(parse_lines(text)?.into_iter().map(|(r, _, _)| r).collect())
}

/// Parses predictions; every line must carry `confidence`.
pub fn parse_predictions(text: &str) -> Result<Vec<Prediction>, RecordError> {
    parse_lines(text)?
        .into_iter()
        .map(|(record, confidence, line)| match confidence {
            Some(confidence) => Ok(Prediction { record, confidence }),
            None => Err(RecordError::MissingConfidence { line }),
        })
        .collect()
}

fn push_point(out: &mut String, p: &Point3<f64>) {
    let _ = write!(out, "[{},{},{}]", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z));
}

fn push_record_fields(out: &mut String, r: &AnnotationRecord) {
    let _ = write!(
        out,
        "{{\"object_id\":{},\"c1\":",
        serde_json::to_string(&r.object_id).expect("string encodes")
    );
    push_point(out, &r.c1);
    out.push_str(",\"c2\":");
    push_point(out, &r.c2);
    out.push_str(",\"center\":");
    push_point(out, &r.center);
    let q = r.quaternion.coords;
    let _ = write!(
        out,
        ",\"quaternion\":[{},{},{},{}],\"pitch\":{},\"width\":{},\"antipodal\":{},\"force_closure\":{},\"score\":{},\"label\":\"{}\"",
        fmt_f64(q.x),
        fmt_f64(q.y),
        fmt_f64(q.z),
        fmt_f64(q.w),
        fmt_f64(r.pitch),
        fmt_f64(r.width),
        r.antipodal,
        r.force_closure,
        fmt_f64(r.score),
        match r.label {
            GraspLabel::Positive => "positive",
            GraspLabel::Negative => "negative",
        }
    );
}

/// Renders annotation records as JSONL.
pub fn write_records(records: &[AnnotationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        push_record_fields(&mut out, r);
        out.push_str("}\n");
    }
    out
}

/// Renders predictions as JSONL.
pub fn write_predictions(predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for p in predictions {
        push_record_fields(&mut out, &p.record);
        let _ = writeln!(out, ",\"confidence\":{}}}", fmt_f64(p.confidence));
    }
    out
}

/// Renders labeled proposals as JSONL.
///
/// Unlabeled and negative proposals carry `null` regression fields.
pub fn write_proposals(proposals: &[Proposal]) -> String {
    let mut out = String::new();
    for p in proposals {
        out.push_str("{\"point\":");
        push_point(&mut out, &p.point);
        out.push_str(",\"anchor\":");
        push_point(&mut out, &p.anchor);
        out.push_str(",\"label\":");
        match p.antipodal_label {
            Some(true) => out.push_str("true"),
            Some(false) => out.push_str("false"),
            None => out.push_str("null"),
        }
        out.push_str(",\"offset\":");
        match &p.regression_target {
            Some(t) => {
                let _ = write!(
                    out,
                    "[{},{},{}],\"pitches\":[",
                    fmt_f64(t.offset.x),
                    fmt_f64(t.offset.y),
                    fmt_f64(t.offset.z)
                );
                for (i, pitch) in t.pitches.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&fmt_f64(*pitch));
                }
                out.push(']');
            }
            None => out.push_str("null,\"pitches\":null"),
        }
        out.push_str("}\n");
    }
    out
}

/// Renders an evaluation report as a single JSON object.
pub fn write_report(report: &EvalReport) -> String {
    let mut out = String::from("{");
    for (i, k) in REPORT_KS.iter().enumerate() {
        let _ = write!(out, "\"success_at_{k}\":{},", fmt_f64(report.success_at[i]));
    }
    for (i, k) in REPORT_KS.iter().enumerate() {
        let _ = write!(out, "\"coverage_at_{k}\":{},", fmt_f64(report.coverage_at[i]));
    }
    let _ = write!(out, "\"nms_survivors\":{}}}", report.nms_survivors);
    out.push('\n');
    out
}

/// The pose a record asserts, as a grasp for matching and NMS.
pub fn record_grasp(r: &AnnotationRecord) -> Grasp {
    Grasp {
        center: r.center,
        orientation: r.quaternion,
        width: Some(r.width),
        score: Some(r.score),
    }
}
