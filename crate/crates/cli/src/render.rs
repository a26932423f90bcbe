//! Deterministic renderers: occupancy grids, navigation graphs and pose
//! sets as SVG (layered in that order), grids alone also as PGM. Identical
//! inputs produce byte-identical output; every float is printed at fixed
//! precision and all iteration orders are fixed.

use doorscape_core::{CameraPose64, CellState, NavGraph64, OccupancyGrid64};

use crate::CliError;

pub struct RenderLayers<'a> {
    pub grid: Option<&'a OccupancyGrid64>,
    pub graph: Option<&'a NavGraph64>,
    pub poses: Option<&'a [CameraPose64]>,
}

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

/// Renders the given layers into a standalone SVG document.
pub fn render_svg(layers: &RenderLayers) -> Result<String, CliError> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut seen = false;
    let mut cover = |x: f64, y: f64| {
        lo[0] = lo[0].min(x);
        lo[1] = lo[1].min(y);
        hi[0] = hi[0].max(x);
        hi[1] = hi[1].max(y);
    };

    if let Some(grid) = layers.grid {
        cover(grid.origin[0], grid.origin[1]);
        cover(
            grid.origin[0] + grid.width as f64 * grid.resolution,
            grid.origin[1] + grid.height as f64 * grid.resolution,
        );
        seen = true;
    }
    if let Some(graph) = layers.graph {
        for node in &graph.nodes {
            cover(node.wx, node.wy);
            seen = true;
        }
    }
    if let Some(poses) = layers.poses {
        for pose in poses {
            cover(pose.x, pose.y);
            seen = true;
        }
    }
    if !seen {
        return Err(CliError::validation("render", "nothing to render"));
    }

    let margin = 0.5;
    let (min_x, min_y) = (lo[0] - margin, lo[1] - margin);
    let (max_x, max_y) = (hi[0] + margin, hi[1] + margin);
    let (width, height) = (max_x - min_x, max_y - min_y);
    // SVG y grows downward; map y up. Mirror about the bounds midline.
    let flip = |wy: f64| (min_y + max_y) - wy;

    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"900\">\n",
        fmt(min_x),
        fmt(min_y),
        fmt(width),
        fmt(height)
    );
    svg.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f4f4f4\"/>\n",
        fmt(min_x),
        fmt(min_y),
        fmt(width),
        fmt(height)
    ));

    if let Some(grid) = layers.grid {
        render_grid_layer(&mut svg, grid, flip);
    }
    if let Some(graph) = layers.graph {
        render_graph_layer(&mut svg, graph, flip);
    }
    if let Some(poses) = layers.poses {
        render_pose_layer(&mut svg, poses, flip);
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn render_grid_layer(svg: &mut String, grid: &OccupancyGrid64, flip: impl Fn(f64) -> f64) {
    let res = grid.resolution;
    svg.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#cdcdcd\"/>\n",
        fmt(grid.origin[0]),
        fmt(flip(grid.origin[1] + grid.height as f64 * res)),
        fmt(grid.width as f64 * res),
        fmt(grid.height as f64 * res),
    ));
    // Horizontal runs of equal state keep the file small and the byte
    // stream deterministic.
    for iy in 0..grid.height {
        let mut ix = 0;
        while ix < grid.width {
            let state = grid.state(ix, iy);
            let mut end = ix + 1;
            while end < grid.width && grid.state(end, iy) == state {
                end += 1;
            }
            let color = match state {
                CellState::Occupied => Some("#1a1a1a"),
                CellState::Free => Some("#ffffff"),
                CellState::Unknown => None,
            };
            if let Some(color) = color {
                let x = grid.origin[0] + ix as f64 * res;
                let y_top = grid.origin[1] + (iy + 1) as f64 * res;
                svg.push_str(&format!(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                    fmt(x),
                    fmt(flip(y_top)),
                    fmt((end - ix) as f64 * res),
                    fmt(res),
                    color
                ));
            }
            ix = end;
        }
    }
}

fn render_graph_layer(svg: &mut String, graph: &NavGraph64, flip: impl Fn(f64) -> f64) {
    for edge in &graph.edges {
        let points: Vec<String> = graph
            .edge_world_polyline(edge)
            .iter()
            .map(|p| format!("{},{}", fmt(p[0]), fmt(flip(p[1]))))
            .collect();
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#2c7fb8\" stroke-width=\"0.03\"/>\n",
            points.join(" ")
        ));
    }
    for node in &graph.nodes {
        // Marker radius scales with clearance so wide-open junctions stand out.
        let radius = (node.clearance * 0.4).clamp(0.04, 0.6);
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#d95f02\"/>\n",
            fmt(node.wx),
            fmt(flip(node.wy)),
            fmt(radius)
        ));
    }
}

fn render_pose_layer(svg: &mut String, poses: &[CameraPose64], flip: impl Fn(f64) -> f64) {
    // One arrow length per distinct height, shortest first, so both camera
    // heights of a position stay distinguishable.
    let mut heights: Vec<f64> = poses.iter().map(|p| p.height).collect();
    heights.sort_by(|a, b| a.partial_cmp(b).expect("finite heights"));
    heights.dedup();
    for pose in poses {
        let rank = heights
            .iter()
            .position(|h| *h == pose.height)
            .unwrap_or(0);
        let len = 0.12 + 0.08 * rank as f64;
        let yaw = pose.yaw_deg.to_radians();
        let (tip_x, tip_y) = (pose.x + len * yaw.cos(), pose.y + len * yaw.sin());
        let head = len * 0.35;
        let left = yaw + std::f64::consts::PI * 5.0 / 6.0;
        let right = yaw - std::f64::consts::PI * 5.0 / 6.0;
        svg.push_str("  <g class=\"pose\" stroke=\"#1b9e77\" stroke-width=\"0.02\" fill=\"none\">\n");
        svg.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
            fmt(pose.x),
            fmt(flip(pose.y)),
            fmt(tip_x),
            fmt(flip(tip_y))
        ));
        for angle in [left, right] {
            svg.push_str(&format!(
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
                fmt(tip_x),
                fmt(flip(tip_y)),
                fmt(tip_x + head * angle.cos()),
                fmt(flip(tip_y + head * angle.sin()))
            ));
        }
        svg.push_str("  </g>\n");
    }
}
