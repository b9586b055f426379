//! Command-line front end for the dead-reckoning pipeline.
//!
//! Exit codes: 0 success, 1 usage, 2 data/configuration error, 3 numerical
//! fault in a running network.

mod commands;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mcan", version, about = "Multiscale attractor dead reckoning pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tune network parameters with the genetic algorithm.
    Tune {
        /// Target network: the head-direction ring (1d) or the position stack (2d).
        #[arg(long, value_parser = ["1d", "2d"])]
        topology: String,
        /// Tuner configuration file (JSON); defaults match the topology.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output genome file.
        #[arg(long, default_value = "genome.json")]
        out: PathBuf,
        /// Per-generation history CSV.
        #[arg(long, default_value = "tuning_history.csv")]
        history: PathBuf,
        /// Tune the single-scale baseline stack instead of the multiscale one
        /// (2d only).
        #[arg(long)]
        single_scale: bool,
    },
    /// Generate trajectory datasets from an OSM road-network extract.
    Simulate {
        /// OSM XML extract.
        #[arg(long)]
        osm: PathBuf,
        /// Output directory for tracks and the occupancy artifact.
        #[arg(long, default_value = "sim_out")]
        out_dir: PathBuf,
        /// Number of tracks to generate.
        #[arg(long, default_value_t = 1)]
        tracks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Occupancy-grid resolution, meters per cell.
        #[arg(long, default_value_t = 10.0)]
        resolution: f64,
        /// Region bounds as min_lat,min_lon,max_lat,max_lon (defaults to the
        /// extract's extent).
        #[arg(long, value_delimiter = ',', num_args = 4)]
        bbox: Option<Vec<f64>>,
        /// Sample interval, seconds.
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        /// Vehicle wheelbase, meters.
        #[arg(long, default_value_t = 2.5)]
        wheelbase: f64,
        /// Pure-pursuit lookahead, cells.
        #[arg(long, default_value_t = 3.0)]
        lookahead: f64,
    },
    /// Integrate a velocity dataset into a trajectory estimate.
    Track {
        /// Input dataset CSV (t,v,omega,gt_x,gt_y,gt_theta) or Kitti pose file.
        #[arg(long)]
        input: PathBuf,
        /// Input kind: a dataset CSV or a Kitti odometry ground-truth file.
        #[arg(long, default_value = "csv", value_parser = ["csv", "kitti"])]
        input_format: String,
        /// Frame interval for Kitti pose files, seconds.
        #[arg(long, default_value_t = 0.1)]
        kitti_dt: f64,
        /// Also write the (possibly converted) input dataset as CSV, for
        /// later evaluate/plot calls.
        #[arg(long)]
        export_dataset: Option<PathBuf>,
        /// Tuned genome for the 2D sheets.
        #[arg(long)]
        genome_2d: PathBuf,
        /// Tuned genome for the head-direction ring.
        #[arg(long)]
        genome_1d: PathBuf,
        /// Output estimate CSV (t,x,y,theta).
        #[arg(long, default_value = "estimate.csv")]
        out: PathBuf,
        /// Use one equal-neuron 200x200 sheet instead of the multiscale stack.
        #[arg(long)]
        single_scale: bool,
        /// Sheet side length (defaults: 100 multiscale, 200 single-scale).
        #[arg(long)]
        side: Option<usize>,
        /// Scale resolutions in m/neuron (default 0.25,1,4,16; single-scale 1).
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
    },
    /// Score estimates against ground truth (ATE, ATE/m, SAD, segments).
    Evaluate {
        /// Estimate CSV; repeat for a comparison table.
        #[arg(long, required = true)]
        estimate: Vec<PathBuf>,
        /// Ground-truth dataset CSV; one per estimate.
        #[arg(long, required = true)]
        truth: Vec<PathBuf>,
        /// Report output (JSON; an array when multiple pairs are given).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Segment length for per-segment ATE, meters.
        #[arg(long, default_value_t = 1000.0)]
        segment_length: f64,
    },
    /// Render trajectory CSVs (datasets or estimates) as an SVG overlay.
    Plot {
        /// Output SVG path.
        #[arg(long, default_value = "trajectories.svg")]
        out: PathBuf,
        /// Input CSVs; the kind is detected from the header.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    let result = match cli.command {
        Command::Tune { topology, config, seed, out, history, single_scale } => {
            commands::tune(&topology, config.as_deref(), seed, &out, &history, single_scale)
        }
        Command::Simulate { osm, out_dir, tracks, seed, resolution, bbox, dt, wheelbase, lookahead } => {
            commands::simulate(commands::SimulateArgs {
                osm,
                out_dir,
                tracks,
                seed,
                resolution,
                bbox,
                dt,
                wheelbase,
                lookahead,
            })
        }
        Command::Track {
            input,
            input_format,
            kitti_dt,
            export_dataset,
            genome_2d,
            genome_1d,
            out,
            single_scale,
            side,
            scales,
        } => commands::track(commands::TrackArgs {
            input,
            input_format,
            kitti_dt,
            export_dataset,
            genome_2d,
            genome_1d,
            out,
            single_scale,
            side,
            scales,
        }),
        Command::Evaluate { estimate, truth, out, segment_length } => {
            commands::evaluate(&estimate, &truth, out.as_deref(), segment_length)
        }
        Command::Plot { out, inputs } => commands::plot(&inputs, &out),
    };

    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(if e.is_numerical() { 3 } else { 2 });
    }
}
