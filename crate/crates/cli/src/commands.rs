//! One function per subcommand. Each loads its inputs, delegates to the
//! core pipeline, and writes every output atomically under the output
//! directory.

use std::path::{Path, PathBuf};

use doorscape_core::{
    build_graph, classify_free_space, compare_reports, compose_finetune_sets, distance_transform,
    enumerate_camera_poses, evaluate, extract_voronoi_ridge, leave_one_out, load_mesh,
    load_records, poses_from_jsonl, poses_to_csv, poses_to_jsonl, rasterize_slices_bounded,
    read_map, render_counts_table, sample_positions, slice_mesh, split_environment,
    sweep_confidence, to_pgm_bytes, to_yaml_string, CameraPose64, CellState, EvalConfig64,
    EvalReport64, FinetuneSets, GraphConfig64, NavGraph64, OccupancyGrid64, RecordKind,
    SamplerConfig64, SliceConfig64, SplitPlan, SweepPoint,
};
use serde::{Deserialize, Serialize};

use crate::{write_atomic, CliError};

fn write_out(stage: &'static str, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|e| CliError::internal(stage, format!("{}: {e}", path.display())))
}

/// Mesh -> occupancy map (`map.pgm` + `map.yaml`).
///
/// Without an explicit free-space seed the cell with maximum clearance is
/// used, which lands well inside the building.
pub fn cmd_slice(
    mesh_path: &Path,
    cfg: &SliceConfig64,
    cell_budget: u64,
    free_seed: Option<[f64; 2]>,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let stage = "slice";
    let mesh = load_mesh::<f64>(mesh_path)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", mesh_path.display())))?;
    let slices = slice_mesh(&mesh, cfg).map_err(|e| CliError::validation(stage, e))?;
    let grid = rasterize_slices_bounded(&slices, cfg.resolution, cfg.padding, cell_budget)
        .map_err(|e| CliError::validation(stage, e))?;

    let seed = match free_seed {
        Some(seed) => seed,
        None => auto_seed(&grid).ok_or_else(|| {
            CliError::validation(stage, "grid has no non-occupied cell to seed free space")
        })?,
    };
    let grid = classify_free_space(&grid, seed).map_err(|e| CliError::validation(stage, e))?;

    let pgm_path = out_dir.join("map.pgm");
    let yaml_path = out_dir.join("map.yaml");
    write_out(stage, &pgm_path, &to_pgm_bytes(&grid))?;
    write_out(stage, &yaml_path, to_yaml_string(&grid).as_bytes())?;
    Ok((pgm_path, yaml_path))
}

/// Picks the non-occupied cell farthest from any obstacle (ties toward the
/// smaller row/column); on an obstacle-free grid, the center cell.
fn auto_seed(grid: &OccupancyGrid64) -> Option<[f64; 2]> {
    if grid.width == 0 || grid.height == 0 {
        return None;
    }
    if grid.occupied_count() == 0 {
        return Some(grid.cell_center(grid.width / 2, grid.height / 2));
    }
    let field = distance_transform(grid).ok()?;
    let mut best: Option<(u64, usize, usize)> = None;
    for iy in 0..grid.height {
        for ix in 0..grid.width {
            if grid.state(ix, iy) == CellState::Occupied {
                continue;
            }
            let d2 = field.dist2_cells(ix, iy);
            if best.is_none_or(|(bd, _, _)| d2 > bd) {
                best = Some((d2, ix, iy));
            }
        }
    }
    best.map(|(_, ix, iy)| grid.cell_center(ix, iy))
}

/// Occupancy map -> navigation graph (`graph.json`).
pub fn cmd_graph(
    map_pgm: &Path,
    map_yaml: &Path,
    cfg: &GraphConfig64,
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    let stage = "graph";
    let grid = read_map::<f64>(map_pgm, map_yaml)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", map_pgm.display())))?;
    let field = distance_transform(&grid).map_err(|e| CliError::validation(stage, e))?;
    let ridge = extract_voronoi_ridge(&field, &grid);
    let graph = build_graph(&ridge, &field, cfg).map_err(|e| CliError::validation(stage, e))?;

    let graph_path = out_dir.join("graph.json");
    write_out(stage, &graph_path, graph.to_json_string().as_bytes())?;
    Ok(graph_path)
}

/// Navigation graph -> camera poses (`poses.jsonl`, optionally `poses.csv`).
pub fn cmd_sample(
    graph_path: &Path,
    cfg: &SamplerConfig64,
    also_csv: bool,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let stage = "sample";
    let graph = NavGraph64::load(graph_path)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", graph_path.display())))?;
    let positions = sample_positions(&graph, cfg).map_err(|e| CliError::validation(stage, e))?;
    let poses = enumerate_camera_poses(&positions, cfg).map_err(|e| CliError::validation(stage, e))?;

    let mut written = Vec::new();
    let jsonl_path = out_dir.join("poses.jsonl");
    write_out(stage, &jsonl_path, poses_to_jsonl(&poses).as_bytes())?;
    written.push(jsonl_path);
    if also_csv {
        let csv_path = out_dir.join("poses.csv");
        write_out(stage, &csv_path, poses_to_csv(&poses).as_bytes())?;
        written.push(csv_path);
    }
    Ok(written)
}

/// The split ledger written by `doorscape split`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SplitDocument {
    pub plan: SplitPlan,
    pub sets: FinetuneSets,
    pub general_train: Vec<String>,
}

/// Records + environment -> leave-one-out pool and quarter splits.
pub fn cmd_split(
    records_path: &Path,
    env_id: &str,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    let stage = "split";
    let records = load_records::<f64>(records_path, RecordKind::Any)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", records_path.display())))?;
    let (general_train, env_set) =
        leave_one_out(&records, env_id).map_err(|e| CliError::validation(stage, e))?;
    let plan = split_environment(&env_set, seed).map_err(|e| CliError::validation(stage, e))?;
    let sets = compose_finetune_sets(&plan);
    let doc = SplitDocument {
        plan,
        sets,
        general_train: general_train.into_iter().map(|r| r.image_id).collect(),
    };

    let path = out_dir.join(format!("split_{env_id}.json"));
    let json = serde_json::to_string_pretty(&doc).expect("split document serializes") + "\n";
    write_out(stage, &path, json.as_bytes())?;
    Ok(path)
}

fn load_eval_inputs(
    stage: &'static str,
    gt_path: &Path,
    pred_path: &Path,
) -> Result<
    (
        Vec<doorscape_core::ImageRecord64>,
        Vec<doorscape_core::ImageRecord64>,
    ),
    CliError,
> {
    let gt = load_records::<f64>(gt_path, RecordKind::GroundTruth)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", gt_path.display())))?;
    let pred = load_records::<f64>(pred_path, RecordKind::Predictions)
        .map_err(|e| CliError::validation(stage, format!("{}: {e}", pred_path.display())))?;
    Ok((gt, pred))
}

/// Ground truth + predictions -> evaluation report (`report.json` + `.md`).
pub fn cmd_eval(
    gt_path: &Path,
    pred_path: &Path,
    cfg: &EvalConfig64,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let stage = "eval";
    let (gt, pred) = load_eval_inputs(stage, gt_path, pred_path)?;
    let report = evaluate(&pred, &gt, cfg).map_err(|e| CliError::validation(stage, e))?;

    let json_path = out_dir.join("report.json");
    write_out(stage, &json_path, report.to_json_string().as_bytes())?;
    let md_path = out_dir.join("report.md");
    let md = render_counts_table(&[("detector".to_string(), &report)]);
    write_out(stage, &md_path, md.as_bytes())?;
    Ok((json_path, md_path))
}

/// Confidence sweep (`sweep.json`): base report plus totals per threshold.
pub fn cmd_sweep(
    gt_path: &Path,
    pred_path: &Path,
    base: &EvalConfig64,
    thresholds: &[f64],
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    let stage = "sweep";
    let (gt, pred) = load_eval_inputs(stage, gt_path, pred_path)?;
    let series = sweep_confidence(&pred, &gt, thresholds, base)
        .map_err(|e| CliError::validation(stage, e))?;
    let mut report = evaluate(&pred, &gt, base).map_err(|e| CliError::validation(stage, e))?;
    report.sweep = Some(
        series
            .iter()
            .map(|r| SweepPoint {
                confidence_threshold: r.config.confidence_threshold,
                totals: r.totals,
            })
            .collect(),
    );

    let path = out_dir.join("sweep.json");
    write_out(stage, &path, report.to_json_string().as_bytes())?;
    Ok(path)
}

/// Ordered per-detector reports -> comparison table (`comparison.json` + `.md`).
pub fn cmd_report(
    inputs: &[PathBuf],
    labels: &[String],
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let stage = "report";
    if inputs.len() != labels.len() {
        return Err(CliError::validation(
            stage,
            format!("{} inputs but {} labels", inputs.len(), labels.len()),
        ));
    }
    let mut entries: Vec<(String, EvalReport64)> = Vec::new();
    for (path, label) in inputs.iter().zip(labels) {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(stage, format!("{}: {e}", path.display())))?;
        let report = EvalReport64::from_json_str(&text)
            .map_err(|e| CliError::validation(stage, format!("{}: {e}", path.display())))?;
        entries.push((label.clone(), report));
    }
    let table = compare_reports(&entries).map_err(|e| CliError::validation(stage, e))?;

    let json_path = out_dir.join("comparison.json");
    write_out(stage, &json_path, table.to_json_string().as_bytes())?;
    let md_path = out_dir.join("comparison.md");
    let borrowed: Vec<(String, &EvalReport64)> =
        entries.iter().map(|(l, r)| (l.clone(), r)).collect();
    let md = format!(
        "{}\n{}",
        table.to_markdown(),
        render_counts_table(&borrowed)
    );
    write_out(stage, &md_path, md.as_bytes())?;
    Ok((json_path, md_path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Pgm,
}

/// Renders any combination of map, graph and poses.
pub fn cmd_render(
    map: Option<(&Path, &Path)>,
    graph_path: Option<&Path>,
    poses_path: Option<&Path>,
    format: RenderFormat,
    out_dir: &Path,
) -> Result<PathBuf, CliError> {
    let stage = "render";
    let grid = map
        .map(|(pgm, yaml)| {
            read_map::<f64>(pgm, yaml)
                .map_err(|e| CliError::validation(stage, format!("{}: {e}", pgm.display())))
        })
        .transpose()?;
    let graph = graph_path
        .map(|p| {
            NavGraph64::load(p)
                .map_err(|e| CliError::validation(stage, format!("{}: {e}", p.display())))
        })
        .transpose()?;
    let poses: Option<Vec<CameraPose64>> = poses_path
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::validation(stage, format!("{}: {e}", p.display())))?;
            poses_from_jsonl(&text)
                .map_err(|e| CliError::validation(stage, format!("{}: {e}", p.display())))
        })
        .transpose()?;

    match format {
        RenderFormat::Svg => {
            let svg = crate::render::render_svg(&crate::render::RenderLayers {
                grid: grid.as_ref(),
                graph: graph.as_ref(),
                poses: poses.as_deref(),
            })?;
            let path = out_dir.join("render.svg");
            write_out(stage, &path, svg.as_bytes())?;
            Ok(path)
        }
        RenderFormat::Pgm => {
            if graph.is_some() || poses.is_some() {
                return Err(CliError::validation(
                    stage,
                    "unknown format combination: pgm output renders a map only",
                ));
            }
            let grid = grid.ok_or_else(|| {
                CliError::validation(stage, "pgm output needs --map")
            })?;
            let path = out_dir.join("render.pgm");
            write_out(stage, &path, &to_pgm_bytes(&grid))?;
            Ok(path)
        }
    }
}
