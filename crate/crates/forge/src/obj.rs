//! Minimal Wavefront OBJ import and export.
//!
//! Only `v x y z` and triangular `f i j k` records carry geometry;
//! every other record type is skipped and reported in the import
//! warnings. Face indices are 1-based, and `f` entries of the
//! `i/t/n` form keep their leading vertex index.

use crate::numfmt::fmt_triple;
use graspforge_core::mesh::{MeshError, TriMesh};
use graspforge_core::nalgebra::Point3;
use std::fmt::Write as _;

/// A parsed mesh plus the record types the parser skipped.
#[derive(Debug)]
pub struct ObjImport {
    pub mesh: TriMesh,
    /// One entry per skipped record type, e.g. `"vn x12"`.
    pub warnings: Vec<String>,
}

/// Failure modes of OBJ parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjError {
    /// A `v` record without three finite coordinates.
    BadVertex { line: usize },
    /// An `f` record with an index outside `1..=vertex_count`.
    BadIndex { line: usize },
    /// An `f` record with more or fewer than three vertices.
    NonTriangularFace { line: usize, arity: usize },
    /// The records parsed but do not form a valid mesh.
    Mesh(MeshError),
}

impl core::fmt::Display for ObjError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ObjError::BadVertex { line } => {
                write!(f, "line {line}: vertex needs three finite coordinates")
            }
            ObjError::BadIndex { line } => {
                write!(f, "line {line}: face index out of range")
            }
            ObjError::NonTriangularFace { line, arity } => {
                write!(f, "line {line}: face has {arity} vertices, expected 3")
            }
            ObjError::Mesh(e) => write!(f, "invalid mesh: {e}"),
        }
    }
}

impl std::error::Error for ObjError {}

impl From<MeshError> for ObjError {
    fn from(e: MeshError) -> ObjError {
        ObjError::Mesh(e)
    }
}

/// Parses OBJ text into a mesh.
pub fn parse_obj(text: &str) -> Result<ObjImport, ObjError> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut skipped: Vec<(String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "v" => {
                let mut coords = [0.0; 3];
                for c in &mut coords {
                    *c = tokens
                        .next()
                        .and_then(|t| t.parse::<f64>().ok())
                        .filter(|x| x.is_finite())
                        .ok_or(ObjError::BadVertex { line })?;
                }
                // A fourth numeric token is the optional homogeneous
                // weight; anything beyond that is malformed.
                let rest: Vec<&str> = tokens.collect();
                let weight_ok = match rest.as_slice() {
                    [] => true,
                    [w] => w.parse::<f64>().is_ok(),
                    _ => false,
                };
                if !weight_ok {
                    return Err(ObjError::BadVertex { line });
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            "f" => {
                let entries: Vec<&str> = tokens.collect();
                if entries.len() != 3 {
                    return Err(ObjError::NonTriangularFace {
                        line,
                        arity: entries.len(),
                    });
                }
                let mut face = [0u32; 3];
                for (slot, entry) in face.iter_mut().zip(&entries) {
                    let index_text = entry.split('/').next().unwrap_or("");
                    let index: i64 = index_text
                        .parse()
                        .map_err(|_| ObjError::BadIndex { line })?;
                    if index < 1 || index as usize > vertices.len() {
                        return Err(ObjError::BadIndex { line });
                    }
                    *slot = (index - 1) as u32;
                }
                faces.push(face);
            }
            "#" => {}
            other => match skipped.iter_mut().find(|(k, _)| k == other) {
                Some((_, n)) => *n += 1,
                None => skipped.push((other.to_string(), 1)),
            },
        }
    }

    let warnings = skipped
        .into_iter()
        .map(|(k, n)| format!("skipped {n} `{k}` record{}", if n == 1 { "" } else { "s" }))
        .collect();
    Ok(ObjImport {
        mesh: TriMesh::new(vertices, faces)?,
        warnings,
    })
}

/// Renders a mesh as OBJ text with nine-digit coordinates.
pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {}", fmt_triple(v.x, v.y, v.z));
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}
