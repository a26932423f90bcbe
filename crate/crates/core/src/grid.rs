//! 2D occupancy grids and their construction from slice segments.
//!
//! Cells are row-major with `(ix, iy)` = (column, row); cell `(ix, iy)`
//! covers the half-open world square
//! `[origin + ix*res, origin + (ix+1)*res) x [..iy..)`. Rasterization is
//! conservative: every cell whose *closed* square a segment touches is
//! marked, so boundary contact counts on both sides.

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::scalar::Scalar;
use crate::slicing::{PlaneSlice, Segment2D};

/// Fallback cell budget for [`rasterize_slices`].
pub const DEFAULT_CELL_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

/// Metric occupancy grid. `origin` is the world position of the corner of
/// cell `(0, 0)`; row 0 is the *bottom* of the map (y grows with `iy`).
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid<S: Scalar> {
    pub width: usize,
    pub height: usize,
    pub resolution: S,
    pub origin: [S; 2],
    cells: Vec<CellState>,
}

impl<S: Scalar> OccupancyGrid<S> {
    pub fn new_unknown(width: usize, height: usize, resolution: S, origin: [S; 2]) -> Self {
        Self {
            width,
            height,
            resolution,
            origin,
            cells: vec![CellState::Unknown; width * height],
        }
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: S,
        origin: [S; 2],
        cells: Vec<CellState>,
    ) -> Self {
        assert_eq!(cells.len(), width * height, "cell count must match shape");
        Self {
            width,
            height,
            resolution,
            origin,
            cells,
        }
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.width && iy < self.height);
        iy * self.width + ix
    }

    #[inline]
    pub fn state(&self, ix: usize, iy: usize) -> CellState {
        self.cells[self.index(ix, iy)]
    }

    #[inline]
    pub fn set_state(&mut self, ix: usize, iy: usize, state: CellState) {
        let i = self.index(ix, iy);
        self.cells[i] = state;
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// Cell containing a world point, if inside the grid.
    pub fn world_to_cell(&self, p: [S; 2]) -> Option<(usize, usize)> {
        let fx = ((p[0] - self.origin[0]) / self.resolution).floor();
        let fy = ((p[1] - self.origin[1]) / self.resolution).floor();
        if fx < S::zero() || fy < S::zero() {
            return None;
        }
        let ix = fx.to_usize()?;
        let iy = fy.to_usize()?;
        (ix < self.width && iy < self.height).then_some((ix, iy))
    }

    /// World position of a cell center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> [S; 2] {
        let half = S::cast_f64(0.5);
        [
            self.origin[0] + (S::cast_usize(ix) + half) * self.resolution,
            self.origin[1] + (S::cast_usize(iy) + half) * self.resolution,
        ]
    }

    pub fn state_at_world(&self, p: [S; 2]) -> Option<CellState> {
        self.world_to_cell(p).map(|(ix, iy)| self.state(ix, iy))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| **c == CellState::Occupied)
            .count()
    }
}

/// Inclusive cell-index range touched by the closed interval `[lo, hi]`
/// along one axis, honoring the closed-square rule: a value exactly on a
/// cell boundary touches the cells on both sides.
fn touched_range<S: Scalar>(lo: S, hi: S, origin: S, res: S, n: usize) -> Option<(usize, usize)> {
    let lo_f = (lo - origin) / res;
    let hi_f = (hi - origin) / res;
    let mut lo_cell = lo_f.floor();
    if lo_f == lo_cell {
        lo_cell = lo_cell - S::one();
    }
    let hi_cell = hi_f.floor();
    let lo_i = lo_cell.to_f64_lossy().max(0.0) as i64;
    let hi_i = hi_cell.to_f64_lossy().min((n as f64) - 1.0) as i64;
    if hi_cell < S::zero() || lo_i > hi_i || lo_i >= n as i64 {
        return None;
    }
    Some((lo_i as usize, hi_i as usize))
}

/// Aggregates all per-plane segments into one grid (union across planes)
/// with the default cell budget.
pub fn rasterize_slices<S: Scalar>(
    slices: &[PlaneSlice<S>],
    resolution: S,
    padding: usize,
) -> Result<OccupancyGrid<S>, GridError> {
    rasterize_slices_bounded(slices, resolution, padding, DEFAULT_CELL_BUDGET)
}

/// As [`rasterize_slices`] with an explicit cell budget.
pub fn rasterize_slices_bounded<S: Scalar>(
    slices: &[PlaneSlice<S>],
    resolution: S,
    padding: usize,
    cell_budget: u64,
) -> Result<OccupancyGrid<S>, GridError> {
    if !(resolution.is_finite() && resolution > S::zero()) {
        return Err(GridError::InvalidConfig(
            "resolution must be positive".into(),
        ));
    }

    let mut bounds: Option<([S; 2], [S; 2])> = None;
    for plane in slices {
        for seg in &plane.segments {
            for p in [seg.a, seg.b] {
                bounds = Some(match bounds {
                    None => (p, p),
                    Some((lo, hi)) => (
                        [lo[0].min(p[0]), lo[1].min(p[1])],
                        [hi[0].max(p[0]), hi[1].max(p[1])],
                    ),
                });
            }
        }
    }
    // No geometry at all: an all-Unknown grid of just the padding margin.
    let (lo, hi) = bounds.unwrap_or(([S::zero(); 2], [S::zero(); 2]));

    let span_cells = |lo: S, hi: S| -> u64 { ((hi - lo) / resolution).floor().to_f64_lossy() as u64 + 1 };
    let width = span_cells(lo[0], hi[0]) + 2 * padding as u64;
    let height = span_cells(lo[1], hi[1]) + 2 * padding as u64;
    let total = width as u128 * height as u128;
    if total > cell_budget as u128 {
        return Err(GridError::GridTooLarge {
            cells: total,
            budget: cell_budget,
        });
    }

    let pad = S::cast_usize(padding) * resolution;
    let origin = [lo[0] - pad, lo[1] - pad];
    let mut grid =
        OccupancyGrid::new_unknown(width as usize, height as usize, resolution, origin);

    for plane in slices {
        for seg in &plane.segments {
            mark_segment(&mut grid, seg);
        }
    }
    Ok(grid)
}

/// Marks every cell whose closed square `seg` touches as Occupied.
fn mark_segment<S: Scalar>(grid: &mut OccupancyGrid<S>, seg: &Segment2D<S>) {
    let res = grid.resolution;
    let (ox, oy) = (grid.origin[0], grid.origin[1]);

    if seg.a == seg.b {
        if let (Some((cx0, cx1)), Some((cy0, cy1))) = (
            touched_range(seg.a[0], seg.a[0], ox, res, grid.width),
            touched_range(seg.a[1], seg.a[1], oy, res, grid.height),
        ) {
            for iy in cy0..=cy1 {
                for ix in cx0..=cx1 {
                    grid.set_state(ix, iy, CellState::Occupied);
                }
            }
        }
        return;
    }

    let (ax, ay) = (seg.a[0], seg.a[1]);
    let dx = seg.b[0] - ax;
    let dy = seg.b[1] - ay;
    let (x_lo, x_hi) = if ax <= seg.b[0] {
        (ax, seg.b[0])
    } else {
        (seg.b[0], ax)
    };
    let Some((cx0, cx1)) = touched_range(x_lo, x_hi, ox, res, grid.width) else {
        return;
    };

    for ix in cx0..=cx1 {
        let slab_lo = ox + S::cast_usize(ix) * res;
        let slab_hi = ox + S::cast_usize(ix + 1) * res;
        // Clip the segment parameter to the closed column slab.
        let (t_lo, t_hi) = if dx == S::zero() {
            if ax < slab_lo || ax > slab_hi {
                continue;
            }
            (S::zero(), S::one())
        } else {
            let t0 = (slab_lo - ax) / dx;
            let t1 = (slab_hi - ax) / dx;
            let (mut lo, mut hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            lo = lo.max(S::zero());
            hi = hi.min(S::one());
            if lo > hi {
                continue;
            }
            (lo, hi)
        };
        let y0 = ay + t_lo * dy;
        let y1 = ay + t_hi * dy;
        let (y_lo, y_hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
        if let Some((cy0, cy1)) = touched_range(y_lo, y_hi, oy, res, grid.height) {
            for iy in cy0..=cy1 {
                grid.set_state(ix, iy, CellState::Occupied);
            }
        }
    }
}

/// Flood-fills reachable free space from `seed` (4-connected over
/// non-Occupied cells). Reached cells become Free, unreached non-Occupied
/// cells stay Unknown.
pub fn classify_free_space<S: Scalar>(
    grid: &OccupancyGrid<S>,
    seed: [S; 2],
) -> Result<OccupancyGrid<S>, GridError> {
    let (sx, sy) = grid.world_to_cell(seed).ok_or_else(|| GridError::SeedInvalid {
        reason: format!(
            "({}, {}) is outside the grid",
            seed[0].to_f64_lossy(),
            seed[1].to_f64_lossy()
        ),
    })?;
    if grid.state(sx, sy) == CellState::Occupied {
        return Err(GridError::SeedInvalid {
            reason: format!("cell ({sx}, {sy}) is occupied"),
        });
    }

    let mut out = grid.clone();
    for c in out.cells.iter_mut() {
        if *c == CellState::Free {
            *c = CellState::Unknown;
        }
    }
    let mut queue = std::collections::VecDeque::new();
    out.set_state(sx, sy, CellState::Free);
    queue.push_back((sx, sy));
    while let Some((x, y)) = queue.pop_front() {
        let mut visit = |nx: usize, ny: usize, out: &mut OccupancyGrid<S>| {
            if out.state(nx, ny) == CellState::Unknown {
                out.set_state(nx, ny, CellState::Free);
                queue.push_back((nx, ny));
            }
        };
        if x > 0 {
            visit(x - 1, y, &mut out);
        }
        if x + 1 < out.width {
            visit(x + 1, y, &mut out);
        }
        if y > 0 {
            visit(x, y - 1, &mut out);
        }
        if y + 1 < out.height {
            visit(x, y + 1, &mut out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plane(segments: Vec<Segment2D<f64>>) -> Vec<PlaneSlice<f64>> {
        vec![PlaneSlice { z: 0.5, segments }]
    }

    #[test]
    fn horizontal_segment_marks_five_cells() {
        let seg = Segment2D::new([0.0, 0.0], [1.0, 0.0]);
        let grid = rasterize_slices(&one_plane(vec![seg]), 0.25, 0).unwrap();
        assert_eq!((grid.width, grid.height), (5, 1));
        for ix in 0..5 {
            assert_eq!(grid.state(ix, 0), CellState::Occupied);
        }
        assert_eq!(grid.occupied_count(), 5);
    }

    #[test]
    fn unit_square_perimeter_is_closed_ring_with_unknown_interior() {
        use crate::mesh::{parse_obj, unit_cube_obj};
        use crate::slicing::slice_plane;
        let cube = parse_obj::<f64, _>(std::io::Cursor::new(unit_cube_obj())).unwrap();
        let segs = slice_plane(&cube, 0.5);
        let grid = rasterize_slices(&one_plane(segs), 0.25, 0).unwrap();
        assert_eq!((grid.width, grid.height), (5, 5));
        for iy in 0..5 {
            for ix in 0..5 {
                let interior = (1..=2).contains(&ix) && (1..=2).contains(&iy);
                let expect = if interior {
                    CellState::Unknown
                } else {
                    CellState::Occupied
                };
                assert_eq!(grid.state(ix, iy), expect, "cell ({ix}, {iy})");
            }
        }
    }

    #[test]
    fn union_across_planes_is_idempotent() {
        let seg = Segment2D::new([0.0, 0.0], [1.0, 0.7]);
        let once = rasterize_slices(&one_plane(vec![seg]), 0.1, 1).unwrap();
        let twice = rasterize_slices(
            &[
                PlaneSlice {
                    z: 0.5,
                    segments: vec![seg],
                },
                PlaneSlice {
                    z: 1.0,
                    segments: vec![seg],
                },
            ],
            0.1,
            1,
        )
        .unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn no_segments_yields_padding_only_unknown_grid() {
        let grid = rasterize_slices::<f64>(&[], 0.5, 2).unwrap();
        assert_eq!((grid.width, grid.height), (5, 5));
        assert!(grid.cells().iter().all(|c| *c == CellState::Unknown));
    }

    #[test]
    fn cell_budget_is_enforced() {
        let seg = Segment2D::new([0.0, 0.0], [1000.0, 1000.0]);
        let err = rasterize_slices_bounded(&one_plane(vec![seg]), 0.001, 0, 1_000_000).unwrap_err();
        assert!(matches!(err, GridError::GridTooLarge { .. }));
    }

    fn ring_grid() -> OccupancyGrid<f64> {
        // 9x9, occupied ring at distance 2 from the center cell (4,4).
        let mut grid = OccupancyGrid::new_unknown(9, 9, 1.0, [0.0, 0.0]);
        for k in 2..=6 {
            grid.set_state(k, 2, CellState::Occupied);
            grid.set_state(k, 6, CellState::Occupied);
            grid.set_state(2, k, CellState::Occupied);
            grid.set_state(6, k, CellState::Occupied);
        }
        grid
    }

    #[test]
    fn flood_fill_inside_ring_frees_interior_only() {
        let grid = ring_grid();
        let filled = classify_free_space(&grid, [4.5, 4.5]).unwrap();
        for iy in 0..9 {
            for ix in 0..9 {
                let expect = if (3..=5).contains(&ix) && (3..=5).contains(&iy) {
                    CellState::Free
                } else if grid.state(ix, iy) == CellState::Occupied {
                    CellState::Occupied
                } else {
                    CellState::Unknown
                };
                assert_eq!(filled.state(ix, iy), expect, "cell ({ix}, {iy})");
            }
        }
    }

    #[test]
    fn flood_fill_with_no_obstacles_frees_everything() {
        let grid = OccupancyGrid::<f64>::new_unknown(4, 3, 0.5, [0.0, 0.0]);
        let filled = classify_free_space(&grid, [0.1, 0.1]).unwrap();
        assert!(filled.cells().iter().all(|c| *c == CellState::Free));
    }

    #[test]
    fn seed_on_occupied_cell_is_invalid() {
        let mut grid = OccupancyGrid::<f64>::new_unknown(3, 3, 1.0, [0.0, 0.0]);
        grid.set_state(1, 1, CellState::Occupied);
        assert!(matches!(
            classify_free_space(&grid, [1.5, 1.5]),
            Err(GridError::SeedInvalid { .. })
        ));
        assert!(matches!(
            classify_free_space(&grid, [-5.0, 0.5]),
            Err(GridError::SeedInvalid { .. })
        ));
    }

    #[test]
    fn world_cell_round_trip() {
        let grid = OccupancyGrid::<f64>::new_unknown(10, 8, 0.05, [-1.0, 2.0]);
        for iy in 0..8 {
            for ix in 0..10 {
                let c = grid.cell_center(ix, iy);
                assert_eq!(grid.world_to_cell(c), Some((ix, iy)));
            }
        }
        assert_eq!(grid.world_to_cell([-1.01, 2.1]), None);
    }
}
