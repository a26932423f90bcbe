//! Exact Euclidean clearance field of an occupancy grid.
//!
//! Distances are center-to-center and kept as exact squared cell counts
//! internally; meters only appear at the query surface. Every cell also
//! carries a witness: the nearest occupied cell, ties broken by smallest
//! (row, column).

use crate::error::GraphError;
use crate::grid::{CellState, OccupancyGrid};
use crate::scalar::Scalar;

/// Per-cell distance to the nearest occupied cell, plus that cell's index.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceField<S: Scalar> {
    pub width: usize,
    pub height: usize,
    pub resolution: S,
    pub origin: [S; 2],
    dist2: Vec<u64>,
    witness: Vec<u32>,
}

impl<S: Scalar> ClearanceField<S> {
    #[inline]
    fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.width && iy < self.height);
        iy * self.width + ix
    }

    /// Squared distance in cell units (exact).
    #[inline]
    pub fn dist2_cells(&self, ix: usize, iy: usize) -> u64 {
        self.dist2[self.index(ix, iy)]
    }

    /// Clearance in meters.
    pub fn clearance(&self, ix: usize, iy: usize) -> S {
        let d2 =
            num_traits::FromPrimitive::from_u64(self.dist2_cells(ix, iy)).expect("d2 fits scalar");
        let d: S = d2;
        d.sqrt() * self.resolution
    }

    /// Nearest occupied cell as `(ix, iy)`.
    pub fn witness(&self, ix: usize, iy: usize) -> (usize, usize) {
        let w = self.witness[self.index(ix, iy)] as usize;
        (w % self.width, w / self.width)
    }

    /// World position of a cell center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> [S; 2] {
        let half = S::cast_f64(0.5);
        [
            self.origin[0] + (S::cast_usize(ix) + half) * self.resolution,
            self.origin[1] + (S::cast_usize(iy) + half) * self.resolution,
        ]
    }
}

/// Computes the exact clearance field.
///
/// Row-by-row scan over per-column vertical distances: O(W^2 * H), exact and
/// fully deterministic, comfortably fast at mapping resolutions.
pub fn distance_transform<S: Scalar>(
    grid: &OccupancyGrid<S>,
) -> Result<ClearanceField<S>, GraphError> {
    let (w, h) = (grid.width, grid.height);
    if grid.occupied_count() == 0 {
        return Err(GraphError::NoObstacles);
    }

    // Nearest occupied row within each column (tie -> smaller row), encoded
    // as the row index, or u32::MAX for columns without obstacles.
    let mut col_row = vec![u32::MAX; w * h];
    for ix in 0..w {
        let mut last: Option<usize> = None;
        for iy in 0..h {
            if grid.state(ix, iy) == CellState::Occupied {
                last = Some(iy);
            }
            if let Some(r) = last {
                col_row[iy * w + ix] = r as u32;
            }
        }
        let mut next: Option<usize> = None;
        for iy in (0..h).rev() {
            if grid.state(ix, iy) == CellState::Occupied {
                next = Some(iy);
            }
            if let Some(r) = next {
                let cur = col_row[iy * w + ix];
                let below = iy.saturating_sub(cur as usize); // distance to candidate above
                let above = r - iy;
                // Prefer strictly closer; on equal distance keep the smaller
                // row, which is the earlier (above) candidate.
                if cur == u32::MAX || above < below {
                    col_row[iy * w + ix] = r as u32;
                }
            }
        }
    }

    let mut dist2 = vec![u64::MAX; w * h];
    let mut witness = vec![0u32; w * h];
    for iy in 0..h {
        for ix in 0..w {
            let mut best = (u64::MAX, u32::MAX, u32::MAX); // (d2, row, col)
            for cx in 0..w {
                let r = col_row[iy * w + cx];
                if r == u32::MAX {
                    continue;
                }
                let dx = ix.abs_diff(cx) as u64;
                let dy = iy.abs_diff(r as usize) as u64;
                let d2 = dx * dx + dy * dy;
                let cand = (d2, r, cx as u32);
                if cand < best {
                    best = cand;
                }
            }
            debug_assert_ne!(best.0, u64::MAX);
            dist2[iy * w + ix] = best.0;
            witness[iy * w + ix] = best.1 * w as u32 + best.2;
        }
    }

    Ok(ClearanceField {
        width: w,
        height: h,
        resolution: grid.resolution,
        origin: grid.origin,
        dist2,
        witness,
    })
}
