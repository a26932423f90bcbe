//! Triangle meshes and the ASCII Wavefront OBJ loader.
//!
//! Only `v` and `f` records are interpreted. Faces with more than three
//! indices are fan-triangulated, negative indices resolve against the
//! vertex count seen so far, and everything else (`vn`, `vt`, `usemtl`,
//! comments, ...) is ignored.

use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::MeshError;
use crate::scalar::Scalar;

/// Indexed triangle soup in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh<S: Scalar> {
    pub vertices: Vec<[S; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl<S: Scalar> TriangleMesh<S> {
    /// Builds a mesh, checking index bounds and coordinate finiteness.
    pub fn new(vertices: Vec<[S; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(MeshError::MalformedMesh {
                    line: 0,
                    reason: format!("vertex {i} has a non-finite coordinate"),
                });
            }
        }
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&ix| ix >= vertices.len()) {
                return Err(MeshError::MalformedMesh {
                    line: 0,
                    reason: format!("triangle {i} references a missing vertex"),
                });
            }
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounds(&self) -> Option<([S; 3], [S; 3])> {
        let first = self.vertices.first()?;
        let mut lo = *first;
        let mut hi = *first;
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some((lo, hi))
    }

    /// Translates every vertex by `(dx, dy, dz)`.
    pub fn translated(&self, dx: S, dy: S, dz: S) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] + dx, v[1] + dy, v[2] + dz])
                .collect(),
            triangles: self.triangles.clone(),
        }
    }
}

/// Loads an ASCII OBJ file.
pub fn load_mesh<S: Scalar>(path: &Path) -> Result<TriangleMesh<S>, MeshError> {
    let file = std::fs::File::open(path)?;
    parse_obj(BufReader::new(file))
}

/// Parses OBJ text from any reader; used directly by tests on in-memory input.
pub fn parse_obj<S: Scalar, R: BufRead>(reader: R) -> Result<TriangleMesh<S>, MeshError> {
    let mut vertices: Vec<[S; 3]> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coord = [S::zero(); 3];
                for c in coord.iter_mut() {
                    let tok = fields.next().ok_or_else(|| MeshError::MalformedMesh {
                        line: lineno,
                        reason: "vertex record has fewer than 3 coordinates".into(),
                    })?;
                    let val: f64 = tok.parse().map_err(|_| MeshError::MalformedMesh {
                        line: lineno,
                        reason: format!("bad vertex coordinate '{tok}'"),
                    })?;
                    if !val.is_finite() {
                        return Err(MeshError::MalformedMesh {
                            line: lineno,
                            reason: format!("non-finite vertex coordinate '{tok}'"),
                        });
                    }
                    *c = S::cast_f64(val);
                }
                // An optional w component is permitted and ignored.
                vertices.push(coord);
            }
            Some("f") => {
                let mut indices = Vec::new();
                for tok in fields {
                    indices.push(parse_face_index(tok, vertices.len(), lineno)?);
                }
                if indices.len() < 3 {
                    return Err(MeshError::MalformedMesh {
                        line: lineno,
                        reason: "face record has fewer than 3 indices".into(),
                    });
                }
                for k in 1..indices.len() - 1 {
                    triangles.push([indices[0], indices[k], indices[k + 1]]);
                }
            }
            _ => {} // non-geometry record
        }
    }

    TriangleMesh::new(vertices, triangles).map_err(|e| match e {
        // Re-point index errors at the file rather than the builder.
        MeshError::MalformedMesh { reason, .. } => MeshError::MalformedMesh { line: 0, reason },
        other => other,
    })
}

/// Resolves one face token (`7`, `7/1`, `7//3`, `-2`) to a 0-based index.
fn parse_face_index(tok: &str, vertex_count: usize, lineno: usize) -> Result<usize, MeshError> {
    let first = tok.split('/').next().unwrap_or("");
    let raw: i64 = first.parse().map_err(|_| MeshError::MalformedMesh {
        line: lineno,
        reason: format!("bad face index '{tok}'"),
    })?;
    let idx = if raw > 0 {
        (raw - 1) as usize
    } else if raw < 0 {
        // Negative indices count back from the vertices defined so far.
        let back = (-raw) as usize;
        if back > vertex_count {
            return Err(MeshError::MalformedMesh {
                line: lineno,
                reason: format!("face index '{tok}' out of range"),
            });
        }
        vertex_count - back
    } else {
        return Err(MeshError::MalformedMesh {
            line: lineno,
            reason: "face index 0 is not valid in OBJ".into(),
        });
    };
    if idx >= vertex_count {
        return Err(MeshError::MalformedMesh {
            line: lineno,
            reason: format!("face index '{tok}' out of range"),
        });
    }
    Ok(idx)
}

/// A hand-built axis-aligned unit cube: 8 vertices, 12 triangles.
/// Shared by tests and the slicing examples.
pub fn unit_cube_obj() -> &'static str {
    "\
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 2 3
f 1 3 4
f 5 7 6
f 5 8 7
f 1 5 6
f 1 6 2
f 2 6 7
f 2 7 3
f 3 7 8
f 3 8 4
f 4 8 5
f 4 5 1
"
}
