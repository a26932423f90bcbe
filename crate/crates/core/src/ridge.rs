//! Generalized Voronoi ridge of the free space.
//!
//! A free cell belongs to the ridge when two of its antipodal 8-neighbors
//! see *different* obstacle generators (witnesses farther than 2 cells
//! apart) and the cell is a non-strict clearance maximum along the line
//! joining that neighbor pair. All tests are exact integer arithmetic on
//! squared cell distances.

use std::collections::BTreeSet;

use crate::clearance::ClearanceField;
use crate::grid::{CellState, OccupancyGrid};
use crate::scalar::Scalar;

/// Ridge cells as `(ix, iy)` pairs in deterministic order.
pub type RidgeSet = BTreeSet<(usize, usize)>;

const ANTIPODAL_DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Extracts the Voronoi ridge cells of `grid`'s free space.
pub fn extract_voronoi_ridge<S: Scalar>(
    field: &ClearanceField<S>,
    grid: &OccupancyGrid<S>,
) -> RidgeSet {
    assert_eq!(
        (field.width, field.height),
        (grid.width, grid.height),
        "clearance field and grid must share geometry"
    );
    let mut ridge = RidgeSet::new();
    for iy in 0..grid.height {
        for ix in 0..grid.width {
            if grid.state(ix, iy) != CellState::Free {
                continue;
            }
            if is_ridge_cell(field, grid, ix, iy) {
                ridge.insert((ix, iy));
            }
        }
    }
    ridge
}

fn is_ridge_cell<S: Scalar>(
    field: &ClearanceField<S>,
    grid: &OccupancyGrid<S>,
    ix: usize,
    iy: usize,
) -> bool {
    let in_bounds = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < grid.width && (y as usize) < grid.height
    };
    let center_d2 = field.dist2_cells(ix, iy);
    for (dx, dy) in ANTIPODAL_DIRS {
        let (x1, y1) = (ix as i64 + dx, iy as i64 + dy);
        let (x2, y2) = (ix as i64 - dx, iy as i64 - dy);
        if !in_bounds(x1, y1) || !in_bounds(x2, y2) {
            continue;
        }
        let (x1, y1, x2, y2) = (x1 as usize, y1 as usize, x2 as usize, y2 as usize);
        let w1 = field.witness(x1, y1);
        let w2 = field.witness(x2, y2);
        let sep2 = sq_dist(w1, w2);
        // Distinct generators: witnesses farther than 2 cells apart.
        if sep2 <= 4 {
            continue;
        }
        // Non-strict clearance maximum along the joining line.
        if center_d2 >= field.dist2_cells(x1, y1) && center_d2 >= field.dist2_cells(x2, y2) {
            return true;
        }
    }
    false
}

fn sq_dist(a: (usize, usize), b: (usize, usize)) -> u64 {
    let dx = a.0.abs_diff(b.0) as u64;
    let dy = a.1.abs_diff(b.1) as u64;
    dx * dx + dy * dy
}
