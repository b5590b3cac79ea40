use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use gnmn::engine::{self, EngineError};
use gnmn::scenario::ScenarioError;

use crate::manifest::ManifestBuilder;
use crate::CliError;

fn engine_error(err: EngineError) -> CliError {
    match err {
        EngineError::Scenario(ScenarioError::Config(e)) => CliError::config(e),
        other => CliError::runtime(other),
    }
}

const PLOT_SCRIPT: &str = "set datafile separator ','
set key autotitle columnhead
set xlabel 'tick (days)'
set ylabel 'individuals'
plot 'trajectory.csv' using 1:2 with lines title 'S', \\
     '' using 1:3 with lines title 'I', \\
     '' using 1:4 with lines title 'R'
";

pub fn run(
    config_path: &Path,
    seed: Option<u64>,
    out_dir: &Path,
    snapshots: bool,
    plot_script: bool,
) -> Result<(), CliError> {
    let started = Instant::now();
    let config = super::load_config(config_path, seed)?;
    super::ensure_dir(out_dir)?;

    let run = engine::run_scenario(&config, snapshots).map_err(engine_error)?;

    let config_json = serde_json::to_string(&config).map_err(CliError::runtime)?;
    let mut manifest = ManifestBuilder::new(&config_json, config.seed);

    let trajectory_path = out_dir.join("trajectory.csv");
    super::write_file(&trajectory_path, &run.trajectory.to_csv_string())?;
    manifest.add_output(trajectory_path);

    let metrics_path = out_dir.join("metrics.json");
    let report = run.metrics_report();
    super::write_file(
        &metrics_path,
        &serde_json::to_string_pretty(&report).map_err(CliError::runtime)?,
    )?;
    manifest.add_output(metrics_path);

    if let Some(snaps) = &run.snapshots {
        let path = out_dir.join("snapshots.csv");
        let file = File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))
            .map_err(CliError::runtime)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "tick,i,j,d_ij").map_err(CliError::runtime)?;
        for snap in snaps {
            for p in &snap.pairs {
                writeln!(w, "{},{},{},{:.6}", snap.tick, p.i, p.j, p.distance)
                    .map_err(CliError::runtime)?;
            }
        }
        w.flush().map_err(CliError::runtime)?;
        manifest.add_output(path);
    }

    if plot_script {
        let path = out_dir.join("trajectory.gp");
        super::write_file(&path, PLOT_SCRIPT)?;
        manifest.add_output(path);
    }

    if !run.clamp_events.is_empty() {
        let total: usize = run.clamp_events.iter().map(|(_, c)| c).sum();
        eprintln!(
            "note: clamp guard engaged at {} tick(s), {} node updates rescaled",
            run.clamp_events.len(),
            total
        );
    }

    manifest
        .write(out_dir, started.elapsed().as_secs_f64())
        .map_err(CliError::runtime)?;
    Ok(())
}
