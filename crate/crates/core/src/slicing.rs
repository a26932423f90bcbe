//! Horizontal cross-sections of a triangle mesh.
//!
//! Each slicing plane intersects the mesh in a set of 2D segments (projected
//! to the xy plane). Those per-plane segment lists are later aggregated into
//! a single occupancy grid.

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::mesh::TriangleMesh;
use crate::scalar::Scalar;

/// A 2D segment in meters. Degenerate (zero-length) segments are valid and
/// arise when a triangle touches a plane at a single vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Segment2D<S: Scalar> {
    pub a: [S; 2],
    pub b: [S; 2],
}

impl<S: Scalar> Segment2D<S> {
    pub fn new(a: [S; 2], b: [S; 2]) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> S {
        let dx = self.b[0] - self.a[0];
        let dy = self.b[1] - self.a[1];
        (dx * dx + dy * dy).sqrt()
    }
}

/// Slicing and rasterization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SliceConfig<S: Scalar> {
    /// Height of the lowest slicing plane (m).
    pub z_min: S,
    /// Height ceiling; planes are placed at `z_min + k*z_step` up to here (m).
    pub z_max: S,
    /// Vertical distance between consecutive planes (m).
    pub z_step: S,
    /// Grid cell edge (m/cell).
    pub resolution: S,
    /// Border margin around the geometry bounds (cells).
    pub padding: usize,
}

impl<S: Scalar> Default for SliceConfig<S> {
    fn default() -> Self {
        Self {
            z_min: S::cast_f64(0.1),
            z_max: S::cast_f64(1.8),
            z_step: S::cast_f64(0.1),
            resolution: S::cast_f64(0.05),
            padding: 2,
        }
    }
}

impl<S: Scalar> SliceConfig<S> {
    pub fn validate(&self) -> Result<(), GridError> {
        let finite = self.z_min.is_finite()
            && self.z_max.is_finite()
            && self.z_step.is_finite()
            && self.resolution.is_finite();
        if !finite {
            return Err(GridError::InvalidConfig("non-finite parameter".into()));
        }
        if self.z_min >= self.z_max {
            return Err(GridError::InvalidConfig("z_min must be below z_max".into()));
        }
        if self.z_step <= S::zero() {
            return Err(GridError::InvalidConfig("z_step must be positive".into()));
        }
        if self.resolution <= S::zero() {
            return Err(GridError::InvalidConfig(
                "resolution must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Plane heights `z_min + k*z_step <= z_max`. A relative epsilon absorbs
    /// accumulated rounding so the nominal top plane is not dropped.
    pub fn planes(&self) -> Vec<S> {
        let eps = self.z_step * S::cast_f64(1e-9);
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let z = self.z_min + S::cast_usize(k) * self.z_step;
            if z > self.z_max + eps {
                break;
            }
            out.push(z);
            k += 1;
        }
        out
    }
}

/// Segments produced by one slicing plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSlice<S: Scalar> {
    pub z: S,
    pub segments: Vec<Segment2D<S>>,
}

/// Intersects the mesh with every plane of `cfg`.
///
/// A triangle coplanar with a plane contributes its three edges; a triangle
/// touching at a single vertex contributes a degenerate segment; a straddling
/// triangle contributes the segment between its edge crossings.
pub fn slice_mesh<S: Scalar>(
    mesh: &TriangleMesh<S>,
    cfg: &SliceConfig<S>,
) -> Result<Vec<PlaneSlice<S>>, GridError> {
    cfg.validate()?;
    Ok(cfg
        .planes()
        .into_iter()
        .map(|z| PlaneSlice {
            z,
            segments: slice_plane(mesh, z),
        })
        .collect())
}

/// Intersects the mesh with a single plane `z = plane_z`.
pub fn slice_plane<S: Scalar>(mesh: &TriangleMesh<S>, plane_z: S) -> Vec<Segment2D<S>> {
    let mut segments = Vec::new();
    for tri in &mesh.triangles {
        let v = [
            mesh.vertices[tri[0]],
            mesh.vertices[tri[1]],
            mesh.vertices[tri[2]],
        ];
        slice_triangle(&v, plane_z, &mut segments);
    }
    segments
}

fn slice_triangle<S: Scalar>(v: &[[S; 3]; 3], z: S, out: &mut Vec<Segment2D<S>>) {
    let side = [v[0][2] - z, v[1][2] - z, v[2][2] - z];

    if side.iter().all(|s| *s == S::zero()) {
        // Coplanar: the whole triangle lies in the plane; keep its outline.
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            out.push(Segment2D::new(xy(&v[i]), xy(&v[j])));
        }
        return;
    }

    let mut pts: Vec<[S; 2]> = Vec::with_capacity(2);
    for (i, s) in side.iter().enumerate() {
        if *s == S::zero() {
            pts.push(xy(&v[i]));
        }
    }
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        if (side[i] < S::zero() && side[j] > S::zero())
            || (side[i] > S::zero() && side[j] < S::zero())
        {
            let t = (z - v[i][2]) / (v[j][2] - v[i][2]);
            pts.push([
                v[i][0] + t * (v[j][0] - v[i][0]),
                v[i][1] + t * (v[j][1] - v[i][1]),
            ]);
        }
    }

    match pts.len() {
        0 => {}
        1 => out.push(Segment2D::new(pts[0], pts[0])),
        _ => out.push(Segment2D::new(pts[0], pts[1])),
    }
}

fn xy<S: Scalar>(v: &[S; 3]) -> [S; 2] {
    [v[0], v[1]]
}
