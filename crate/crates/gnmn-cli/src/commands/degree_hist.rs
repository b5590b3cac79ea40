use std::path::Path;
use std::time::Instant;

use gnmn::engine::{self, EngineError};
use gnmn::network;
use gnmn::scenario::ScenarioError;

use crate::manifest::ManifestBuilder;
use crate::CliError;

const PLOT_SCRIPT: &str = "set datafile separator ','
set key autotitle columnhead
set xlabel 'contact degree'
set ylabel 'probability'
set style fill solid 0.6
plot 'degree_hist.csv' using 1:3 with boxes title 'degree distribution'
";

pub fn run(
    config_path: &Path,
    seed: Option<u64>,
    bin_width: u64,
    out_dir: &Path,
    plot_script: bool,
) -> Result<(), CliError> {
    let started = Instant::now();
    let config = super::load_config(config_path, seed)?;
    super::ensure_dir(out_dir)?;

    let snapshots = engine::run_mobility_snapshots(&config).map_err(|err| match err {
        EngineError::Scenario(ScenarioError::Config(e)) => CliError::config(e),
        other => CliError::runtime(other),
    })?;
    let hist = network::degree_histogram(&snapshots, bin_width).map_err(CliError::config)?;

    let config_json = serde_json::to_string(&config).map_err(CliError::runtime)?;
    let mut manifest = ManifestBuilder::new(&config_json, config.seed);

    let mut buf = Vec::new();
    network::write_histogram_csv(&mut buf, &hist).map_err(CliError::runtime)?;
    let csv_path = out_dir.join("degree_hist.csv");
    super::write_file(&csv_path, &String::from_utf8(buf).expect("ASCII CSV"))?;
    manifest.add_output(csv_path);

    if plot_script {
        let path = out_dir.join("degree_hist.gp");
        super::write_file(&path, PLOT_SCRIPT)?;
        manifest.add_output(path);
    }

    manifest
        .write(out_dir, started.elapsed().as_secs_f64())
        .map_err(CliError::runtime)?;
    Ok(())
}
