//! Implementations behind the CLI subcommands.

use mcan_core::error::{CoreError, Result};
use mcan_core::eval::dataset::{read_estimates_csv, write_estimates_csv, TrajectoryDataset};
use mcan_core::eval::metrics::MetricReport;
use mcan_core::eval::svg::{emit_plot, PlotSeries};
use mcan_core::multiscale::{track_trajectory, StackConfig};
use mcan_core::seed::{derive_seed, derive_seed_indexed};
use mcan_core::sim::{parse_osm_file, plan_route, rasterize, sample_endpoints, traverse, BicycleConfig};
use mcan_core::tuning::{
    fitness_path_integration, run_ga, write_history_csv, GaConfig, Genome, TrialTopology,
};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

pub fn tune(
    topology: &str,
    config_path: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
    history: &Path,
    single_scale: bool,
) -> Result<()> {
    let mut config = match config_path {
        Some(path) => GaConfig::load(path)?,
        None if topology == "1d" => GaConfig::defaults_1d(),
        None => GaConfig::defaults_2d(),
    };
    let is_ring = matches!(config.trial.topology, TrialTopology::Ring { .. });
    if (topology == "1d") != is_ring {
        return Err(CoreError::Config(format!(
            "--topology {topology} does not match the configured trial topology"
        )));
    }
    if single_scale {
        if topology != "2d" {
            return Err(CoreError::Config("--single-scale applies to --topology 2d".into()));
        }
        config.trial.topology = TrialTopology::Stack { side: 200, scales: vec![1.0] };
    }
    if let Some(s) = seed {
        config.rng_seed = s;
    }

    let trial = config.trial.clone();
    let trial_seed = derive_seed(config.rng_seed, "trial");
    let outcome = run_ga(&config, |g| fitness_path_integration(g, &trial, trial_seed).fitness)?;

    outcome.best.save(out)?;
    write_history_csv(&outcome.history, history)?;
    println!(
        "tuned {} over {} generations: best fitness {:.3}",
        topology,
        outcome.history.len(),
        outcome.best_fitness
    );
    println!(
        "best genome: A={:.0} E={:.0} gamma={:.4} phi={:.6}",
        outcome.best.a.round(),
        outcome.best.e.round(),
        outcome.best.gamma,
        outcome.best.phi
    );
    println!("wrote {} and {}", out.display(), history.display());
    Ok(())
}

pub struct SimulateArgs {
    pub osm: PathBuf,
    pub out_dir: PathBuf,
    pub tracks: usize,
    pub seed: u64,
    pub resolution: f64,
    pub bbox: Option<Vec<f64>>,
    pub dt: f64,
    pub wheelbase: f64,
    pub lookahead: f64,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let bbox = match &args.bbox {
        Some(v) if v.len() == 4 => Some([v[0], v[1], v[2], v[3]]),
        Some(_) => return Err(CoreError::Config("--bbox needs 4 values".into())),
        None => None,
    };
    let network = parse_osm_file(&args.osm, bbox)?;
    let grid = rasterize(&network, args.resolution)?;
    std::fs::create_dir_all(&args.out_dir)?;
    grid.write_pgm(&args.out_dir.join("occupancy.pgm"))?;
    grid.write_sidecar(&args.out_dir.join("occupancy.json"))?;

    let vehicle = BicycleConfig {
        wheelbase_m: args.wheelbase,
        lookahead_cells: args.lookahead,
        dt: args.dt,
        ..BicycleConfig::default()
    };

    type TrackRun = std::result::Result<(PathBuf, f64, bool), String>;
    let results: Vec<(usize, TrackRun)> = (0..args.tracks)
        .into_par_iter()
        .map(|i| {
            let run = || -> Result<(PathBuf, f64, bool)> {
                use rand::SeedableRng;
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed_indexed(args.seed, "track", i as u64));
                let (start, goal) = sample_endpoints(&grid, &mut rng)?;
                let path = plan_route(&grid, start, goal)?;
                let outcome = traverse(&path, &grid, &vehicle, format!("track_{i:03}"))?;
                let file = args.out_dir.join(format!("track_{i:03}.csv"));
                outcome.dataset.write_csv(&file)?;
                Ok((file, outcome.dataset.total_distance_m(), outcome.timed_out))
            };
            (i, run().map_err(|e| e.to_string()))
        })
        .collect();

    let mut total_m = 0.0;
    let mut written = 0usize;
    let mut rows = Vec::new();
    for (i, res) in &results {
        match res {
            Ok((file, dist, timed_out)) => {
                total_m += dist;
                written += 1;
                rows.push(serde_json::json!({
                    "track": i,
                    "file": file.file_name().unwrap().to_string_lossy(),
                    "distance_m": dist,
                    "status": if *timed_out { "timeout (partial)" } else { "ok" },
                }));
                if *timed_out {
                    eprintln!("track {i}: step budget exhausted, wrote partial data");
                }
            }
            Err(msg) => {
                rows.push(serde_json::json!({ "track": i, "status": "failed", "error": msg }));
                eprintln!("track {i}: {msg}");
            }
        }
    }

    let summary = serde_json::json!({
        "osm": args.osm.display().to_string(),
        "resolution_m": args.resolution,
        "grid": { "width": grid.width, "height": grid.height },
        "road_length_km": network.total_length_m() / 1000.0,
        "tracks_requested": args.tracks,
        "tracks_written": written,
        "total_distance_km": total_m / 1000.0,
        "tracks": rows,
    });
    std::fs::write(
        args.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).unwrap() + "\n",
    )?;
    println!(
        "{} of {} tracks written to {}, total {:.2} km",
        written,
        args.tracks,
        args.out_dir.display(),
        total_m / 1000.0
    );
    if args.tracks > 0 && written == 0 {
        return Err(CoreError::Input("every requested track failed".into()));
    }
    Ok(())
}

pub struct TrackArgs {
    pub input: PathBuf,
    pub input_format: String,
    pub kitti_dt: f64,
    pub export_dataset: Option<PathBuf>,
    pub genome_2d: PathBuf,
    pub genome_1d: PathBuf,
    pub out: PathBuf,
    pub single_scale: bool,
    pub side: Option<usize>,
    pub scales: Option<Vec<f64>>,
}

pub fn track(args: TrackArgs) -> Result<()> {
    let dataset = match args.input_format.as_str() {
        "kitti" => mcan_core::eval::kitti::load_kitti_poses(&args.input, args.kitti_dt)?,
        _ => TrajectoryDataset::read_csv(&args.input)?,
    };
    if let Some(path) = &args.export_dataset {
        dataset.write_csv(path)?;
    }
    let genome_2d = Genome::load(&args.genome_2d)?;
    let genome_1d = Genome::load(&args.genome_1d)?;

    let mut stack_config = if args.single_scale {
        StackConfig::single_scale(genome_2d.to_params()?)
    } else {
        StackConfig::multiscale(genome_2d.to_params()?)
    };
    if let Some(side) = args.side {
        stack_config.side = side;
    }
    if let Some(scales) = args.scales.clone() {
        stack_config.scales = scales;
    }

    let Some(initial) = dataset.initial_pose() else {
        write_estimates_csv(&[], &args.out)?;
        println!("empty dataset; wrote empty estimate {}", args.out.display());
        return Ok(());
    };

    let (estimates, report) =
        track_trajectory(&dataset.samples, initial, &stack_config, genome_1d.to_params()?)?;
    write_estimates_csv(&estimates, &args.out)?;
    if report.faults > 0 {
        eprintln!("warning: {} network stability faults during tracking", report.faults);
    }
    if report.speed_clamps > 0 {
        eprintln!("warning: {} samples exceeded the operating speed range", report.speed_clamps);
    }
    println!(
        "tracked {} samples ({}) -> {}",
        estimates.len(),
        if args.single_scale { "single-scale" } else { "multiscale" },
        args.out.display()
    );
    Ok(())
}

pub fn evaluate(
    estimates: &[PathBuf],
    truths: &[PathBuf],
    out: Option<&Path>,
    segment_length: f64,
) -> Result<()> {
    if estimates.len() != truths.len() {
        return Err(CoreError::Input(format!(
            "{} estimates but {} truth files",
            estimates.len(),
            truths.len()
        )));
    }
    let mut reports = Vec::new();
    println!("{:<28} {:>10} {:>10} {:>12} {:>10}", "track", "ATE [m]", "ATE/m", "SAD", "dist [km]");
    for (est_path, truth_path) in estimates.iter().zip(truths) {
        let est = read_estimates_csv(est_path)?;
        let truth = TrajectoryDataset::read_csv(truth_path)?;
        let est_points: Vec<(f64, f64)> = est.iter().map(|p| (p.x, p.y)).collect();
        let report = MetricReport::compute(&est_points, &truth.gt_points(), segment_length)?;
        println!(
            "{:<28} {:>10.3} {:>10.4} {:>12.1} {:>10.2}",
            est_path.file_name().unwrap_or_default().to_string_lossy(),
            report.ate_m,
            report.ate_per_meter,
            report.sad,
            report.distance_m / 1000.0
        );
        reports.push(report);
    }
    if reports.len() > 1 {
        let vals: Vec<f64> = reports.iter().map(|r| r.ate_per_meter).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        println!("ATE/m over {} tracks: {:.4} +- {:.4}", vals.len(), mean, var.sqrt());
    }
    if let Some(path) = out {
        let json = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .map_err(|e| CoreError::Config(format!("report serialization: {e}")))?;
        std::fs::write(path, json + "\n")?;
    }
    Ok(())
}

pub fn plot(inputs: &[PathBuf], out: &Path) -> Result<()> {
    let mut named: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for path in inputs {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let header = first_header(path)?;
        let points = if header.starts_with("t,v,omega") {
            TrajectoryDataset::read_csv(path)?.gt_points()
        } else {
            read_estimates_csv(path)?.iter().map(|p| (p.x, p.y)).collect()
        };
        named.push((name, points));
    }
    let series: Vec<PlotSeries> = named
        .iter()
        .map(|(name, points)| PlotSeries { name, points })
        .collect();
    emit_plot(&series, out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn first_header(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path)?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        return Ok(line.to_string());
    }
    Err(CoreError::parse(path.display().to_string(), Some(1), "empty file"))
}
