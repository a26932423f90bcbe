//! `doorscape` — indoor meshes to occupancy maps, navigation graphs and
//! camera-pose datasets, plus door-status detector evaluation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use doorscape_cli::commands::{self, RenderFormat};
use doorscape_cli::manifest::Manifest;
use doorscape_cli::CliError;
use doorscape_core::DEFAULT_CELL_BUDGET;

#[derive(Parser)]
#[command(name = "doorscape", version, about = "Indoor mesh to robot camera-pose pipeline and door-status detector evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML manifest; explicit flags override its values.
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    /// Output directory for all artifacts.
    #[arg(short = 'o', long)]
    out_dir: Option<PathBuf>,
    /// Seed for the randomized steps.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Slice a mesh into an occupancy map (map.pgm + map.yaml).
    Slice {
        #[command(flatten)]
        common: Common,
        /// ASCII OBJ mesh.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        z_min: Option<f64>,
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long)]
        z_step: Option<f64>,
        /// Cell edge in meters.
        #[arg(long)]
        resolution: Option<f64>,
        /// Border margin in cells.
        #[arg(long)]
        padding: Option<usize>,
        /// Abort when the grid would exceed this many cells.
        #[arg(long)]
        cell_budget: Option<u64>,
        /// Free-space seed as "X,Y" in meters; defaults to the max-clearance cell.
        #[arg(long)]
        free_seed: Option<String>,
    },
    /// Extract the navigation graph from an occupancy map.
    Graph {
        #[command(flatten)]
        common: Common,
        /// map.pgm produced by `slice`.
        #[arg(long)]
        map: PathBuf,
        /// Sidecar; defaults to the map path with a .yaml extension.
        #[arg(long)]
        map_yaml: Option<PathBuf>,
        #[arg(long)]
        min_clearance: Option<f64>,
        #[arg(long)]
        spur_prune_length: Option<f64>,
    },
    /// Sample spaced positions and enumerate camera poses.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        /// Minimum pairwise distance D in meters.
        #[arg(long)]
        min_distance: Option<f64>,
        /// Comma-separated camera heights in meters.
        #[arg(long)]
        heights: Option<String>,
        #[arg(long)]
        yaw_count: Option<usize>,
        #[arg(long)]
        yaw_start: Option<f64>,
        /// Randomize the order of equal-clearance candidates (seeded).
        #[arg(long)]
        shuffle_ties: bool,
        /// Also write poses.csv.
        #[arg(long)]
        csv: bool,
    },
    /// Build the leave-one-out pool and quarter splits for one environment.
    Split {
        #[command(flatten)]
        common: Common,
        /// JSON Lines records of the full dataset.
        #[arg(long)]
        records: PathBuf,
        /// Environment to hold out and split.
        #[arg(long)]
        env: String,
    },
    /// Evaluate predictions against ground truth.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// IOU acceptance threshold.
        #[arg(long = "rho-a")]
        rho_a: Option<f64>,
        /// Confidence threshold.
        #[arg(long = "rho-c")]
        rho_c: Option<f64>,
        #[arg(long)]
        max_detections: Option<usize>,
    },
    /// Evaluate across a series of confidence thresholds.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long = "rho-a")]
        rho_a: Option<f64>,
        #[arg(long)]
        max_detections: Option<usize>,
        /// Comma-separated thresholds; overrides --steps.
        #[arg(long)]
        thresholds: Option<String>,
        /// Number of evenly spaced thresholds over [0, 1].
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Aggregate several report.json files into a comparison table.
    Report {
        #[command(flatten)]
        common: Common,
        /// report.json files, ordered with the baseline first.
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated labels matching --inputs.
        #[arg(long)]
        labels: String,
    },
    /// Render map/graph/poses to SVG (or a map to PGM).
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        map_yaml: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        poses: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Svg)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Svg,
    Pgm,
}

fn parse_pair(s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::validation("config", format!("expected \"X,Y\", got '{s}'")));
    }
    let x = parts[0].trim().parse().map_err(|_| {
        CliError::validation("config", format!("bad coordinate '{}'", parts[0]))
    })?;
    let y = parts[1].trim().parse().map_err(|_| {
        CliError::validation("config", format!("bad coordinate '{}'", parts[1]))
    })?;
    Ok([x, y])
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::validation("config", format!("bad number '{p}'")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Slice {
            common,
            mesh,
            z_min,
            z_max,
            z_step,
            resolution,
            padding,
            cell_budget,
            free_seed,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let mesh = mesh.or_else(|| manifest.mesh.clone()).ok_or_else(|| {
                CliError::validation("slice", "no mesh given (--mesh or manifest `mesh`)")
            })?;
            let cfg = manifest.slice_config(z_min, z_max, z_step, resolution, padding);
            let budget = cell_budget
                .or(manifest.slice.cell_budget)
                .unwrap_or(DEFAULT_CELL_BUDGET);
            let seed_point = match free_seed {
                Some(s) => Some(parse_pair(&s)?),
                None => manifest.slice.free_seed,
            };
            let out = out_dir(&common, &manifest);
            let (pgm, yaml) = commands::cmd_slice(&mesh, &cfg, budget, seed_point, &out)?;
            println!("wrote {}", pgm.display());
            println!("wrote {}", yaml.display());
        }
        Command::Graph {
            common,
            map,
            map_yaml,
            min_clearance,
            spur_prune_length,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let cfg = manifest.graph_config(min_clearance, spur_prune_length);
            let yaml = map_yaml.unwrap_or_else(|| map.with_extension("yaml"));
            let out = out_dir(&common, &manifest);
            let path = commands::cmd_graph(&map, &yaml, &cfg, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Sample {
            common,
            graph,
            min_distance,
            heights,
            yaw_count,
            yaw_start,
            shuffle_ties,
            csv,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let heights = heights.map(|h| parse_list(&h)).transpose()?;
            let cfg = manifest.sampler_config(
                min_distance,
                heights,
                yaw_count,
                yaw_start,
                shuffle_ties,
                seed(&common, &manifest),
            );
            let out = out_dir(&common, &manifest);
            for path in commands::cmd_sample(&graph, &cfg, csv, &out)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Split {
            common,
            records,
            env,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let out = out_dir(&common, &manifest);
            let path = commands::cmd_split(&records, &env, seed(&common, &manifest), &out)?;
            println!("wrote {}", path.display());
        }
        Command::Eval {
            common,
            gt,
            pred,
            rho_a,
            rho_c,
            max_detections,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let cfg = manifest.eval_config(rho_a, rho_c, max_detections);
            let out = out_dir(&common, &manifest);
            let (json, md) = commands::cmd_eval(&gt, &pred, &cfg, &out)?;
            println!("wrote {}", json.display());
            println!("wrote {}", md.display());
        }
        Command::Sweep {
            common,
            gt,
            pred,
            rho_a,
            max_detections,
            thresholds,
            steps,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let cfg = manifest.eval_config(rho_a, None, max_detections);
            let thresholds = match thresholds {
                Some(t) => parse_list(&t)?,
                None => {
                    if steps < 2 {
                        return Err(CliError::validation("sweep", "--steps must be at least 2"));
                    }
                    (0..steps)
                        .map(|k| k as f64 / (steps - 1) as f64)
                        .collect()
                }
            };
            let out = out_dir(&common, &manifest);
            let path = commands::cmd_sweep(&gt, &pred, &cfg, &thresholds, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Report {
            common,
            inputs,
            labels,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let labels: Vec<String> = labels.split(',').map(|s| s.trim().to_string()).collect();
            let out = out_dir(&common, &manifest);
            let (json, md) = commands::cmd_report(&inputs, &labels, &out)?;
            println!("wrote {}", json.display());
            println!("wrote {}", md.display());
        }
        Command::Render {
            common,
            map,
            map_yaml,
            graph,
            poses,
            format,
        } => {
            let manifest = Manifest::load(common.config.as_deref())?;
            let yaml_owned = map
                .as_ref()
                .map(|m| map_yaml.unwrap_or_else(|| m.with_extension("yaml")));
            let map_pair = map
                .as_ref()
                .zip(yaml_owned.as_ref())
                .map(|(p, y)| (p.as_path(), y.as_path()));
            let format = match format {
                FormatArg::Svg => RenderFormat::Svg,
                FormatArg::Pgm => RenderFormat::Pgm,
            };
            let out = out_dir(&common, &manifest);
            let path =
                commands::cmd_render(map_pair, graph.as_deref(), poses.as_deref(), format, &out)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn out_dir(common: &Common, manifest: &Manifest) -> PathBuf {
    common
        .out_dir
        .clone()
        .or_else(|| manifest.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn seed(common: &Common, manifest: &Manifest) -> u64 {
    common.seed.or(manifest.seed).unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("doorscape: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
