use std::path::Path;

use gnmn::ingest::{self, SampleReport, SampleSpec};

use crate::CliError;

pub fn run(
    population: &Path,
    z: f64,
    p: f64,
    e: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let spec = SampleSpec { z, p, e };
    spec.validate().map_err(CliError::config)?;
    let mut records = ingest::load_population_csv(population).map_err(CliError::ingest)?;
    let mut reports: Vec<SampleReport> = Vec::with_capacity(records.len());
    for record in &mut records {
        ingest::apply_sampling(record, &spec).map_err(CliError::ingest)?;
        reports.push(SampleReport::from_record(record, spec));
    }
    let json = serde_json::to_string_pretty(&reports).map_err(CliError::runtime)?;
    match out {
        Some(path) => super::write_file(&path.to_path_buf(), &json)?,
        None => println!("{json}"),
    }
    Ok(())
}
