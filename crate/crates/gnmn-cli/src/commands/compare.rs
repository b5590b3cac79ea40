use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use gnmn::ingest;

use crate::CliError;

/// Parse the R_t column of a trajectory CSV, indexed by tick.
fn read_model_rt(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read trajectory {}", path.display()))
        .map_err(CliError::ingest)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "tick,S,I,R,k_mean,R_t,beta_critical,spreading_speed" {
        return Err(CliError::ingest(anyhow!(
            "unexpected trajectory header: `{header}`"
        )));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::ingest(anyhow!(
                "trajectory line {}: expected 8 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        let rt: f64 = fields[5].parse().map_err(|_| {
            CliError::ingest(anyhow!(
                "trajectory line {}: cannot parse R_t `{}`",
                idx + 2,
                fields[5]
            ))
        })?;
        out.push(rt);
    }
    Ok(out)
}

/// Emit `day,rt_empirical,rt_model` where the day index is days since the
/// start of the case series and the model series is indexed by tick.
pub fn run(
    cases: &Path,
    trajectory: &Path,
    window: u32,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let series = ingest::load_cases_csv(cases).map_err(CliError::ingest)?;
    let empirical = ingest::empirical_rt(&series, window).map_err(CliError::ingest)?;
    let model = read_model_rt(trajectory)?;
    let start = series
        .entries
        .first()
        .map(|e| e.date)
        .ok_or_else(|| CliError::ingest(anyhow!("case series is empty")))?;

    let mut text = String::from("day,rt_empirical,rt_model\n");
    for (date, rt_emp) in &empirical {
        let day = (*date - start).num_days();
        let Ok(idx) = usize::try_from(day) else {
            continue;
        };
        let Some(rt_model) = model.get(idx) else {
            continue;
        };
        text.push_str(&format!("{day},{rt_emp:.6},{rt_model:.6}\n"));
    }
    match out {
        Some(path) => super::write_file(&path.to_path_buf(), &text)?,
        None => print!("{text}"),
    }
    Ok(())
}
