//! Acceptance suite: one test per shipping criterion. Each prints a
//! `[acceptance] criterion N (...): PASS` line on success; run with
//! `cargo test -p doorscape-cli --test acceptance -- --nocapture` to see
//! them.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use doorscape_core::{
    average_precision, build_graph, classify_free_space, compare_reports, compose_finetune_sets,
    distance_transform, enumerate_camera_poses, extract_voronoi_ridge, iou, load_mesh,
    match_image, pr_curve, rasterize_slices, sample_positions, slice_mesh, split_environment,
    sweep_confidence, BBox, CellState, ClassAp, Counts, DoorStatus, EnvBreakdown, EvalConfig,
    EvalReport, GraphConfig, ImageRecord, MatchOutcome, NavGraph, OccupancyGrid, SamplerConfig,
    SliceConfig,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Record = ImageRecord<f64>;
type Box64 = BBox<f64>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn pass(n: usize, name: &str) {
    println!("[acceptance] criterion {n} ({name}): PASS");
}

// ---------------------------------------------------------------------------
// Random detection instances
// ---------------------------------------------------------------------------

fn rand_status(rng: &mut ChaCha8Rng) -> DoorStatus {
    if rng.random_bool(0.5) {
        DoorStatus::Closed
    } else {
        DoorStatus::Open
    }
}

fn rand_gt_box(rng: &mut ChaCha8Rng) -> Box64 {
    let x = rng.random_range(0.0..76.0);
    let y = rng.random_range(0.0..76.0);
    let w = rng.random_range(12.0..24.0);
    let h = rng.random_range(12.0..24.0);
    Box64 {
        x_min: x,
        y_min: y,
        x_max: x + w,
        y_max: y + h,
        status: rand_status(rng),
        confidence: None,
    }
}

fn rand_free_box(rng: &mut ChaCha8Rng) -> Box64 {
    Box64 {
        confidence: Some(rng.random_range(0.0..=1.0)),
        ..rand_gt_box(rng)
    }
}

/// Jittered copy of a door box; the shift is small enough to keep IOU
/// with the source above 0.5.
fn jittered(rng: &mut ChaCha8Rng, gt: &Box64, status: DoorStatus) -> Box64 {
    let dx = rng.random_range(-1.0..=1.0);
    let dy = rng.random_range(-1.0..=1.0);
    Box64 {
        x_min: gt.x_min + dx,
        y_min: gt.y_min + dy,
        x_max: gt.x_max + dx,
        y_max: gt.y_max + dy,
        status,
        confidence: Some(rng.random_range(0.0..=1.0)),
    }
}

/// Small instance: up to 5 images, up to 4 doors and 6 predictions each.
fn small_instance(rng: &mut ChaCha8Rng) -> (Vec<Record>, Vec<Record>) {
    let n_images = rng.random_range(1..=5);
    let mut preds = Vec::new();
    let mut gts = Vec::new();
    for i in 0..n_images {
        let image_id = format!("img{i}");
        let env_id = format!("e{}", i % 2);
        let gt_boxes: Vec<Box64> = (0..rng.random_range(0..=4))
            .map(|_| rand_gt_box(rng))
            .collect();
        let mut pred_boxes = Vec::new();
        for gt in &gt_boxes {
            if rng.random_bool(0.6) {
                let status = if rng.random_bool(0.75) {
                    gt.status
                } else {
                    rand_status(rng)
                };
                pred_boxes.push(jittered(rng, gt, status));
            }
        }
        for _ in 0..rng.random_range(0..=3) {
            pred_boxes.push(rand_free_box(rng));
        }
        pred_boxes.truncate(6);
        gts.push(Record {
            image_id: image_id.clone(),
            env_id: env_id.clone(),
            width: 100,
            height: 100,
            boxes: gt_boxes,
        });
        preds.push(Record {
            image_id,
            env_id,
            width: 100,
            height: 100,
            boxes: pred_boxes,
        });
    }
    (preds, gts)
}

// ---------------------------------------------------------------------------
// Criterion 1: matcher, PR curve and IOU against brute-force references
// ---------------------------------------------------------------------------

/// Literal transcription of the matching rule, written independently of
/// the library implementation.
fn reference_match(preds: &[Box64], gts: &[Box64], cfg: &EvalConfig<f64>) -> MatchOutcome {
    fn iou_ref(a: &Box64, b: &Box64) -> f64 {
        let iw = a.x_max.min(b.x_max) - a.x_min.max(b.x_min);
        let ih = a.y_max.min(b.y_max) - a.y_min.max(b.y_min);
        if iw <= 0.0 || ih <= 0.0 {
            return 0.0;
        }
        let inter = iw * ih;
        let area = |b: &Box64| (b.x_max - b.x_min) * (b.y_max - b.y_min);
        inter / (area(a) + area(b) - inter)
    }

    let mut kept: Vec<usize> = (0..preds.len())
        .filter(|&i| preds[i].confidence.unwrap() >= cfg.confidence_threshold)
        .collect();
    kept.sort_by(|&i, &j| {
        preds[j]
            .confidence
            .unwrap()
            .partial_cmp(&preds[i].confidence.unwrap())
            .unwrap()
    });
    kept.truncate(cfg.max_detections);

    let mut per_door: Vec<Vec<usize>> = vec![Vec::new(); gts.len()];
    let mut outcome = MatchOutcome::default();
    for &p in &kept {
        let mut best_iou = f64::NEG_INFINITY;
        let mut best_door = usize::MAX;
        for (g, gt) in gts.iter().enumerate() {
            let overlap = iou_ref(&preds[p], gt);
            if overlap > best_iou {
                best_iou = overlap;
                best_door = g;
            }
        }
        if best_door != usize::MAX && best_iou >= cfg.iou_threshold {
            per_door[best_door].push(p);
        } else {
            outcome.background_false_detections.push(p);
        }
    }
    for (g, candidates) in per_door.into_iter().enumerate() {
        if candidates.is_empty() {
            continue;
        }
        let selected = *candidates
            .iter()
            .max_by(|&&i, &&j| {
                preds[i]
                    .confidence
                    .unwrap()
                    .partial_cmp(&preds[j].confidence.unwrap())
                    .unwrap()
                    // On equal confidence, the earlier candidate in rank
                    // order wins; max_by keeps the last maximal element,
                    // so order equal elements by reversed position.
                    .then(candidates.iter().position(|&c| c == j).unwrap().cmp(
                        &candidates.iter().position(|&c| c == i).unwrap(),
                    ))
            })
            .unwrap();
        let m = doorscape_core::MatchRef {
            gt_index: g,
            pred_index: selected,
        };
        if preds[selected].status == gts[g].status {
            outcome.true_positives.push(m);
        } else {
            outcome.false_positives.push(m);
        }
        for &c in &candidates {
            if c != selected {
                outcome.suppressed.push(doorscape_core::MatchRef {
                    gt_index: g,
                    pred_index: c,
                });
            }
        }
    }
    outcome
}

/// Independent PR accumulation following the stated per-class rule.
fn reference_pr_curve(
    preds: &[Record],
    gts: &[Record],
    class: DoorStatus,
    rho_a: f64,
) -> Option<Vec<(f64, f64)>> {
    let mut gt_total = 0usize;
    for r in gts {
        gt_total += r.boxes.iter().filter(|b| b.status == class).count();
    }
    if gt_total == 0 {
        return None;
    }
    let mut ranked: Vec<(&str, usize, &Box64)> = Vec::new();
    for r in preds {
        for (i, b) in r.boxes.iter().enumerate() {
            if b.status == class {
                ranked.push((r.image_id.as_str(), i, b));
            }
        }
    }
    ranked.sort_by(|a, b| {
        b.2.confidence
            .unwrap()
            .partial_cmp(&a.2.confidence.unwrap())
            .unwrap()
            .then(a.0.cmp(b.0))
            .then(a.1.cmp(&b.1))
    });

    let mut taken: std::collections::BTreeMap<&str, Vec<bool>> = gts
        .iter()
        .map(|r| {
            (
                r.image_id.as_str(),
                vec![false; r.boxes.iter().filter(|b| b.status == class).count()],
            )
        })
        .collect();
    let class_boxes = |id: &str| -> Vec<&Box64> {
        gts.iter()
            .find(|r| r.image_id == id)
            .map(|r| r.boxes.iter().filter(|b| b.status == class).collect())
            .unwrap_or_default()
    };
    let mut curve = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    for (image_id, _, bbox) in &ranked {
        let doors = class_boxes(image_id);
        let flags = taken.get_mut(image_id).unwrap();
        let mut best: Option<(f64, usize)> = None;
        for (g, door) in doors.iter().enumerate() {
            if flags[g] {
                continue;
            }
            let overlap = iou(bbox, door);
            if best.map_or(true, |(bo, _)| overlap > bo) {
                best = Some((overlap, g));
            }
        }
        match best {
            Some((overlap, g)) if overlap >= rho_a => {
                flags[g] = true;
                tp += 1;
            }
            _ => fp += 1,
        }
        curve.push((tp as f64 / gt_total as f64, tp as f64 / (tp + fp) as f64));
    }
    Some(curve)
}

fn outcome_key(o: &MatchOutcome) -> (Vec<(usize, usize)>, Vec<(usize, usize)>, Vec<usize>, Vec<(usize, usize)>) {
    let pairs = |v: &[doorscape_core::MatchRef]| {
        let mut out: Vec<(usize, usize)> = v.iter().map(|m| (m.gt_index, m.pred_index)).collect();
        out.sort_unstable();
        out
    };
    let mut bfd = o.background_false_detections.clone();
    bfd.sort_unstable();
    (
        pairs(&o.true_positives),
        pairs(&o.false_positives),
        bfd,
        pairs(&o.suppressed),
    )
}

#[test]
fn criterion_1_metric_oracle_equivalence() {
    let start = Instant::now();
    let cfg = EvalConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    for _ in 0..500 {
        let (preds, gts) = small_instance(&mut rng);
        for (p, g) in preds.iter().zip(&gts) {
            let ours = match_image(&p.boxes, &g.boxes, &cfg);
            let reference = reference_match(&p.boxes, &g.boxes, &cfg);
            assert_eq!(outcome_key(&ours), outcome_key(&reference));
        }
        for class in DoorStatus::ALL {
            let reference = reference_pr_curve(&preds, &gts, class, cfg.iou_threshold);
            match pr_curve(&preds, &gts, class, cfg.iou_threshold) {
                Ok(curve) => assert_eq!(Some(curve), reference),
                Err(_) => assert_eq!(reference, None),
            }
        }
    }

    // IOU against pixel counting on integer boxes.
    for _ in 0..1000 {
        let int_box = |rng: &mut ChaCha8Rng| {
            let x = rng.random_range(0i64..60);
            let y = rng.random_range(0i64..60);
            let w = rng.random_range(1i64..40);
            let h = rng.random_range(1i64..40);
            (x, y, x + w, y + h)
        };
        let a = int_box(&mut rng);
        let b = int_box(&mut rng);
        let mut inter = 0u64;
        let mut union = 0u64;
        for px in 0..100 {
            for py in 0..100 {
                let in_a = px >= a.0 && px < a.2 && py >= a.1 && py < a.3;
                let in_b = px >= b.0 && px < b.2 && py >= b.1 && py < b.3;
                inter += (in_a && in_b) as u64;
                union += (in_a || in_b) as u64;
            }
        }
        let pixel_iou = inter as f64 / union as f64;
        let to_box = |(x0, y0, x1, y1): (i64, i64, i64, i64)| Box64 {
            x_min: x0 as f64,
            y_min: y0 as f64,
            x_max: x1 as f64,
            y_max: y1 as f64,
            status: DoorStatus::Open,
            confidence: None,
        };
        assert!((iou(&to_box(a), &to_box(b)) - pixel_iou).abs() <= 1e-9);
    }

    assert!(start.elapsed() < Duration::from_secs(10));
    pass(1, "metric oracle equivalence");
}

// ---------------------------------------------------------------------------
// Criterion 2: all-point AP never exceeds the 11-point score
// ---------------------------------------------------------------------------

/// 11-point interpolated AP (reference implementation).
fn eleven_point_ap(curve: &[(f64, f64)]) -> f64 {
    if curve.is_empty() {
        return 0.0;
    }
    let p_interp = |r: f64| {
        curve
            .iter()
            .filter(|(recall, _)| *recall >= r)
            .map(|(_, p)| *p)
            .fold(0.0f64, f64::max)
    };
    (0..=10).map(|k| p_interp(k as f64 / 10.0)).sum::<f64>() / 11.0
}

/// Instance whose per-class door counts divide 10, so every recall level
/// lands exactly on an interpolation grid point. In that regime the
/// all-point integral equals the right-Riemann mean of the envelope,
/// which the 11-point average (it adds the maximal r = 0 sample) always
/// dominates; off the grid the two scores can order either way.
fn grid_aligned_instance(rng: &mut ChaCha8Rng) -> (Vec<Record>, Vec<Record>) {
    let n_images = rng.random_range(2..=6);
    let mut gts: Vec<Record> = (0..n_images)
        .map(|i| Record {
            image_id: format!("img{i}"),
            env_id: "e0".into(),
            width: 100,
            height: 100,
            boxes: vec![],
        })
        .collect();
    let mut preds: Vec<Record> = gts.clone();

    for class in DoorStatus::ALL {
        let n_gt = [1usize, 2, 5, 10][rng.random_range(0..4)];
        let hit_p = rng.random_range(0.25..0.95);
        for k in 0..n_gt {
            let img = k % n_images;
            let gt = Box64 {
                status: class,
                ..rand_gt_box(rng)
            };
            if rng.random_bool(hit_p) {
                let status = if rng.random_bool(0.85) {
                    class
                } else {
                    rand_status(rng)
                };
                let hit = jittered(rng, &gt, status);
                preds[img].boxes.push(hit);
            }
            gts[img].boxes.push(gt);
        }
    }
    let n_fp = rng.random_range(0..=20);
    for k in 0..n_fp {
        let img = k % n_images;
        preds[img].boxes.push(rand_free_box(rng));
    }
    (preds, gts)
}

#[test]
fn criterion_2_all_point_ap_is_conservative() {
    // Hand-checked integrals first.
    assert_eq!(average_precision(&[(0.5, 1.0), (0.5, 0.5)]), 0.5);
    assert_eq!(average_precision(&[(0.5, 1.0), (1.0, 0.4)]), 0.7);
    assert_eq!(average_precision(&[(1.0, 1.0)]), 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0usize;
    for _ in 0..200 {
        let (preds, gts) = grid_aligned_instance(&mut rng);
        for class in DoorStatus::ALL {
            let Ok(curve) = pr_curve(&preds, &gts, class, 0.5) else {
                continue;
            };
            let all_point = average_precision(&curve);
            let eleven = eleven_point_ap(&curve);
            assert!(
                all_point <= eleven + 1e-12,
                "all-point {all_point} > 11-point {eleven}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 200, "only {checked} curves exercised");
    pass(2, "AP conservatism vs 11-point interpolation");
}

// ---------------------------------------------------------------------------
// Criterion 3: threshold sweeps are monotone
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_threshold_monotonicity() {
    let thresholds: Vec<f64> = (0..21).map(|k| k as f64 * 0.05).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..60 {
        let (preds, gts) = small_instance(&mut rng);
        let series = sweep_confidence(&preds, &gts, &thresholds, &EvalConfig::default()).unwrap();
        assert_eq!(series.len(), 21);
        for pair in series.windows(2) {
            assert!(pair[1].totals.tp <= pair[0].totals.tp);
            assert!(pair[1].totals.fp <= pair[0].totals.fp);
            assert!(pair[1].totals.bfd <= pair[0].totals.bfd);
        }
        for report in &series {
            assert!(report.totals.tp + report.totals.fp <= report.totals.gt);
        }
    }
    pass(3, "confidence-threshold monotonicity");
}

// ---------------------------------------------------------------------------
// Criterion 4: clearance field and ridge against brute force
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_distance_transform_and_ridge_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    for round in 0..50 {
        let w = rng.random_range(20..=100);
        let h = rng.random_range(20..=100);
        let density = rng.random_range(0.005..0.03);
        let n_obstacles = ((w * h) as f64 * density).ceil() as usize;
        let mut grid = OccupancyGrid::new_unknown(w, h, 0.05, [0.0, 0.0]);
        for _ in 0..n_obstacles.max(1) {
            let ix = rng.random_range(0..w);
            let iy = rng.random_range(0..h);
            grid.set_state(ix, iy, CellState::Occupied);
        }
        let field = distance_transform(&grid).unwrap();

        let mut obstacles = Vec::new();
        for iy in 0..h {
            for ix in 0..w {
                if grid.state(ix, iy) == CellState::Occupied {
                    obstacles.push((ix, iy));
                }
            }
        }
        for iy in 0..h {
            for ix in 0..w {
                let mut best = (u64::MAX, (usize::MAX, usize::MAX));
                for &(ox, oy) in &obstacles {
                    let dx = ix.abs_diff(ox) as u64;
                    let dy = iy.abs_diff(oy) as u64;
                    let cand = (dx * dx + dy * dy, (oy, ox));
                    if cand < best {
                        best = cand;
                    }
                }
                assert_eq!(field.dist2_cells(ix, iy), best.0, "round {round}");
                let witness = field.witness(ix, iy);
                assert_eq!((witness.1, witness.0), best.1, "round {round}");
            }
        }

        // Generator-distance agreement for every ridge cell.
        let seed = (0..w * h).find_map(|i| {
            let (ix, iy) = (i % w, i / w);
            (grid.state(ix, iy) != CellState::Occupied).then(|| grid.cell_center(ix, iy))
        });
        let Some(seed) = seed else { continue };
        let free = classify_free_space(&grid, seed).unwrap();
        let field = distance_transform(&free).unwrap();
        let ridge = extract_voronoi_ridge(&field, &free);
        let bound = free.resolution * 2f64.sqrt() + 1e-12;
        for &(ix, iy) in &ridge {
            for (dx, dy) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                let inb = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h;
                let (x1, y1) = (ix as i64 + dx, iy as i64 + dy);
                let (x2, y2) = (ix as i64 - dx, iy as i64 - dy);
                if !inb(x1, y1) || !inb(x2, y2) {
                    continue;
                }
                let w1 = field.witness(x1 as usize, y1 as usize);
                let w2 = field.witness(x2 as usize, y2 as usize);
                let sep2 = {
                    let dx = w1.0.abs_diff(w2.0) as u64;
                    let dy = w1.1.abs_diff(w2.1) as u64;
                    dx * dx + dy * dy
                };
                let qualifying = sep2 > 4
                    && field.dist2_cells(ix, iy) >= field.dist2_cells(x1 as usize, y1 as usize)
                    && field.dist2_cells(ix, iy) >= field.dist2_cells(x2 as usize, y2 as usize);
                if !qualifying {
                    continue;
                }
                let dist = |w: (usize, usize)| {
                    let dx = (ix as f64 - w.0 as f64) * free.resolution;
                    let dy = (iy as f64 - w.1 as f64) * free.resolution;
                    (dx * dx + dy * dy).sqrt()
                };
                assert!((dist(w1) - dist(w2)).abs() <= bound);
            }
        }
    }

    // Corridor fixture: the ridge is exactly the midline row.
    let mut corridor = OccupancyGrid::new_unknown(30, 7, 0.1, [0.0, 0.0]);
    for ix in 0..30 {
        corridor.set_state(ix, 0, CellState::Occupied);
        corridor.set_state(ix, 6, CellState::Occupied);
    }
    let corridor = classify_free_space(&corridor, corridor.cell_center(15, 3)).unwrap();
    let field = distance_transform(&corridor).unwrap();
    let ridge = extract_voronoi_ridge(&field, &corridor);
    let expected: doorscape_core::RidgeSet = (0..30).map(|ix| (ix, 3)).collect();
    assert_eq!(ridge, expected);

    assert!(start.elapsed() < Duration::from_secs(30));
    pass(4, "distance-transform and Voronoi ridge oracle");
}

// ---------------------------------------------------------------------------
// Criterion 5: pose sampling on the two-room pipeline
// ---------------------------------------------------------------------------

fn two_room_graph() -> NavGraph<f64> {
    let mesh = load_mesh::<f64>(&fixture("two_rooms.obj")).unwrap();
    let slice_cfg = SliceConfig::default();
    let slices = slice_mesh(&mesh, &slice_cfg).unwrap();
    let grid = rasterize_slices(&slices, slice_cfg.resolution, slice_cfg.padding).unwrap();
    let grid = classify_free_space(&grid, [2.5, 2.5]).unwrap();
    let field = distance_transform(&grid).unwrap();
    let ridge = extract_voronoi_ridge(&field, &grid);
    build_graph(&ridge, &field, &GraphConfig::default()).unwrap()
}

/// Candidate re-enumeration from public graph data: nodes plus the first
/// polyline vertex at or past each D/2 multiple (terminals excluded).
fn reference_candidates(graph: &NavGraph<f64>, min_distance: f64) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = graph.nodes.iter().map(|n| [n.wx, n.wy]).collect();
    let step = min_distance / 2.0;
    for edge in &graph.edges {
        let Some(res) = graph.edge_cell_size(edge) else {
            continue;
        };
        let world = graph.edge_world_polyline(edge);
        let mut cum = 0.0;
        let mut m = 1usize;
        for k in 1..edge.polyline.len() {
            let diag = edge.polyline[k - 1][0] != edge.polyline[k][0]
                && edge.polyline[k - 1][1] != edge.polyline[k][1];
            cum += if diag { res * 2f64.sqrt() } else { res };
            if k == edge.polyline.len() - 1 {
                break;
            }
            let mut emit = false;
            while step * m as f64 <= cum {
                emit = true;
                m += 1;
            }
            if emit {
                out.push(world[k]);
            }
        }
    }
    out
}

#[test]
fn criterion_5_pose_sampling_constants_and_spacing() {
    let cfg = SamplerConfig::<f64>::default();
    assert_eq!(cfg.min_distance, 1.0);
    assert_eq!(cfg.heights, vec![0.1, 0.7]);
    assert_eq!(cfg.yaw_count, 8);
    assert_eq!(cfg.yaw_start, 0.0);

    let graph = two_room_graph();
    let positions = sample_positions(&graph, &cfg).unwrap();
    assert!(!positions.is_empty());
    for (i, p) in positions.iter().enumerate() {
        for q in &positions[i + 1..] {
            let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
            assert!(d >= cfg.min_distance, "positions {d} m apart");
        }
    }
    for cand in reference_candidates(&graph, cfg.min_distance) {
        let covered = positions.iter().any(|p| {
            ((p.x - cand[0]).powi(2) + (p.y - cand[1]).powi(2)).sqrt() < cfg.min_distance
                || (p.x == cand[0] && p.y == cand[1])
        });
        assert!(covered, "candidate {cand:?} escapes the greedy cover");
    }

    let poses = enumerate_camera_poses(&positions, &cfg).unwrap();
    assert_eq!(poses.len(), positions.len() * 16);
    let expected_yaws = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0];
    for (i, _) in positions.iter().enumerate() {
        let block = &poses[i * 16..(i + 1) * 16];
        assert!(block[..8].iter().all(|p| p.height == 0.1));
        assert!(block[8..].iter().all(|p| p.height == 0.7));
        for half in [&block[..8], &block[8..]] {
            let yaws: Vec<f64> = half.iter().map(|p| p.yaw_deg).collect();
            assert_eq!(yaws, expected_yaws);
        }
    }
    pass(5, "pose sampling spacing, maximality and acquisition constants");
}

// ---------------------------------------------------------------------------
// Criterion 6: split protocol
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_split_protocol() {
    let records: Vec<Record> = (0..100)
        .map(|i| Record {
            image_id: format!("img{i:03}"),
            env_id: "env".into(),
            width: 64,
            height: 64,
            boxes: vec![],
        })
        .collect();

    let plan = split_environment(&records, 17).unwrap();
    assert!(plan.quarters.iter().all(|q| q.len() == 25));
    let mut all: Vec<&String> = plan.quarters.iter().flatten().collect();
    all.sort();
    all.dedup();
    assert_eq!(all.len(), 100, "quarters must be disjoint and exhaustive");

    let sets = compose_finetune_sets(&plan);
    assert_eq!(
        (sets.train_25.len(), sets.train_50.len(), sets.train_75.len(), sets.test.len()),
        (25, 50, 75, 25)
    );
    let contains = |sub: &[String], sup: &[String]| sub.iter().all(|x| sup.contains(x));
    assert!(contains(&sets.train_25, &sets.train_50));
    assert!(contains(&sets.train_50, &sets.train_75));
    assert!(sets.test.iter().all(|x| !sets.train_75.contains(x)));

    // Identical seeds reproduce byte-identical plans.
    let again = split_environment(&records, 17).unwrap();
    assert_eq!(
        serde_json::to_string(&plan).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
    let other = split_environment(&records, 18).unwrap();
    assert_ne!(plan.quarters, other.quarters);
    pass(6, "quarter-split protocol and reproducibility");
}

// ---------------------------------------------------------------------------
// Criterion 7: comparison-table format and increment convention
// ---------------------------------------------------------------------------

fn report_with_aps(aps: &[(&str, f64, f64)]) -> EvalReport<f64> {
    let counts = Counts {
        gt: 100,
        tp: 50,
        fp: 5,
        bfd: 10,
        tp_pct: 0.5,
        fp_pct: 0.05,
        bfd_pct: 0.1,
    };
    EvalReport {
        config: EvalConfig::default(),
        totals: counts,
        per_env: aps
            .iter()
            .map(|(env, closed, open)| {
                (
                    env.to_string(),
                    EnvBreakdown {
                        counts,
                        ap_closed: Some(*closed),
                        ap_open: Some(*open),
                    },
                )
            })
            .collect(),
        per_class_ap: ClassAp {
            closed: Some(0.5),
            open: Some(0.5),
        },
        sweep: None,
    }
}

#[test]
fn criterion_7_report_format_and_increment_convention() {
    // Closed AP rises 60% in e1 and 80% in e2: the mean of per-environment
    // increments is exactly 70 even though the increment between the mean
    // APs would be 66.67.
    let base = report_with_aps(&[("e1", 0.3125, 0.5), ("e2", 0.15625, 0.25)]);
    let tuned = report_with_aps(&[("e1", 0.5, 0.625), ("e2", 0.28125, 0.3125)]);
    let table = compare_reports(&[("GD".into(), base), ("QD25".into(), tuned)]).unwrap();

    let qd_closed = table
        .rows
        .iter()
        .find(|r| r.label == "QD25" && r.class == DoorStatus::Closed)
        .unwrap();
    assert_eq!(qd_closed.stat.increment_mean, Some(70.0));
    assert_eq!(qd_closed.stat.increment_sigma, Some(10.0));

    let md = table.to_markdown();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines[0], "| Exp. | Label | AP | σ | Increment | σ |");
    assert!(lines[1].starts_with("|---"));
    assert_eq!(lines.len(), 2 + 4, "two detectors x two classes");
    // Whole-percent rounding: mean closed AP of GD is 23.4375% -> 23.
    assert_eq!(lines[2], "| GD | Closed | 23 | 8 | -- | -- |");
    assert!(lines[4].contains("| QD25 | Closed | 39 |"));
    assert!(lines[4].contains("| 70% | 10 |"));
    pass(7, "comparison-table structure and increment convention");
}

// ---------------------------------------------------------------------------
// Criterion 8: end-to-end golden run through the binary
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_golden_run_is_deterministic_and_spans_rooms() {
    let start = Instant::now();
    let mesh = fixture("two_rooms.obj");
    let run = |dir: &Path| {
        let stepwise = [
            vec![
                "slice".to_string(),
                "--mesh".into(),
                mesh.to_str().unwrap().into(),
                "-o".into(),
                dir.to_str().unwrap().into(),
            ],
            vec![
                "graph".into(),
                "--map".into(),
                dir.join("map.pgm").to_str().unwrap().into(),
                "-o".into(),
                dir.to_str().unwrap().into(),
            ],
            vec![
                "sample".into(),
                "--graph".into(),
                dir.join("graph.json").to_str().unwrap().into(),
                "-o".into(),
                dir.to_str().unwrap().into(),
            ],
        ];
        for args in stepwise {
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_doorscape"))
                .args(&args)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "{:?}: {}",
                args,
                String::from_utf8_lossy(&out.stderr)
            );
        }
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run(dir_a.path());
    run(dir_b.path());

    for name in ["map.pgm", "map.yaml", "graph.json", "poses.jsonl"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }

    // The graph must span both rooms through the doorway at x = 5.
    let graph =
        NavGraph::<f64>::load(&dir_a.path().join("graph.json")).expect("graph parses");
    let components = graph.components();
    let left = graph.nodes.iter().find(|n| n.wx < 4.5).expect("left-room node");
    let right = graph.nodes.iter().find(|n| n.wx > 5.5).expect("right-room node");
    assert_eq!(
        components[left.id], components[right.id],
        "rooms are not connected in the graph"
    );

    let poses = std::fs::read_to_string(dir_a.path().join("poses.jsonl")).unwrap();
    assert_eq!(poses.lines().count() % 16, 0, "16 poses per position");
    assert!(poses.lines().count() >= 16);

    assert!(start.elapsed() < Duration::from_secs(60));
    pass(8, "end-to-end golden run");
}
