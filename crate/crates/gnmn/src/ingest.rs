//! Census/migration ingestion, survey sampling, and case-series handling.
//!
//! Population files carry `region,total_population,migrated_population`
//! rows; case files carry `date,confirmed,recovered` rows for one region.
//! Sampling uses the finite-population formula
//!
//! ```text
//! n = [z^2 p (1-p) / e^2] / [1 + z^2 p (1-p) / (e^2 N)]
//! ```
//!
//! rounded half away from zero and clamped to `[1, N]`. The default spec
//! (z = 2.576, p = 0.03, e = 0.005) reproduces the published state-level
//! sample of 7724; e = 0.01 is selectable but yields 1931, so the 0.5%
//! margin is the default. Migrated cohorts are allocated proportionally to
//! the census migration share.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("file not found: {0}")]
    MissingFile(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("bad header: expected `{expected}`, got `{got}`")]
    BadHeader { expected: String, got: String },
    #[error("line {line}: cannot parse `{value}` in column {column}")]
    BadCell {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: {message}")]
    InvariantViolation { line: usize, message: String },
    #[error("population size must be >= 1")]
    EmptyPopulation,
    #[error("sample spec out of range: z > 0, 0 < p < 1, 0 < e < 1 required")]
    BadSpec,
    #[error("window must be >= 1 day")]
    BadWindow,
    #[error("series spans {days} days but the estimator needs at least {needed}")]
    SeriesTooShort { days: i64, needed: i64 },
}

/// Survey sampling parameters: normal quantile, proportion, margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSpec {
    pub z: f64,
    pub p: f64,
    pub e: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            z: 2.576,
            p: 0.03,
            e: 0.005,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.z > 0.0 && (0.0..1.0).contains(&self.p) && self.p > 0.0 && (0.0..1.0).contains(&self.e) && self.e > 0.0
        {
            Ok(())
        } else {
            Err(IngestError::BadSpec)
        }
    }
}

/// Finite-population sample size for a cohort of `population` people.
pub fn sample_size(population: u64, spec: &SampleSpec) -> Result<u64, IngestError> {
    spec.validate()?;
    if population == 0 {
        return Err(IngestError::EmptyPopulation);
    }
    let x = spec.z * spec.z * spec.p * (1.0 - spec.p) / (spec.e * spec.e);
    let n = x / (1.0 + x / population as f64);
    let rounded = n.round() as u64;
    Ok(rounded.clamp(1, population))
}

/// One region of the census table, with sampled counterparts once
/// [`apply_sampling`] has run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationRecord {
    pub region: String,
    pub total: u64,
    pub migrated: u64,
    pub sampled_total: u64,
    pub sampled_migrated: u64,
}

/// Migrated share of the sampled cohort, proportional to the census
/// migration share, rounded to nearest.
pub fn allocate_migrated_sample(record: &PopulationRecord) -> u64 {
    if record.total == 0 {
        return 0;
    }
    (record.sampled_total as f64 * record.migrated as f64 / record.total as f64).round() as u64
}

/// Fill `sampled_total` and `sampled_migrated`.
pub fn apply_sampling(record: &mut PopulationRecord, spec: &SampleSpec) -> Result<(), IngestError> {
    record.sampled_total = sample_size(record.total, spec)?;
    record.sampled_migrated = allocate_migrated_sample(record);
    Ok(())
}

const POPULATION_HEADER: &str = "region,total_population,migrated_population";
const CASES_HEADER: &str = "date,confirmed,recovered";

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    if !path.exists() {
        return Err(IngestError::MissingFile(path.display().to_string()));
    }
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IngestError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
}

fn check_header(
    reader: &mut csv::Reader<std::fs::File>,
    path: &Path,
    expected: &str,
) -> Result<(), IngestError> {
    let headers = reader.headers().map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let got = headers.iter().collect::<Vec<_>>().join(",");
    if got != expected {
        return Err(IngestError::BadHeader {
            expected: expected.to_string(),
            got,
        });
    }
    Ok(())
}

fn parse_u64(field: &str, line: usize, column: &str) -> Result<u64, IngestError> {
    field.parse().map_err(|_| IngestError::BadCell {
        line,
        column: column.to_string(),
        value: field.to_string(),
    })
}

/// Load and validate a population CSV. Sampled fields start at zero.
pub fn load_population_csv(path: &Path) -> Result<Vec<PopulationRecord>, IngestError> {
    let mut reader = open_reader(path)?;
    check_header(&mut reader, path, POPULATION_HEADER)?;
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let row = row.map_err(|e| IngestError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if row.len() != 3 {
            return Err(IngestError::InvariantViolation {
                line,
                message: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let region = row[0].to_string();
        let total = parse_u64(&row[1], line, "total_population")?;
        let migrated = parse_u64(&row[2], line, "migrated_population")?;
        if migrated > total {
            return Err(IngestError::InvariantViolation {
                line,
                message: format!(
                    "region {region}: migrated_population {migrated} exceeds total_population {total}"
                ),
            });
        }
        out.push(PopulationRecord {
            region,
            total,
            migrated,
            sampled_total: 0,
            sampled_migrated: 0,
        });
    }
    Ok(out)
}

/// Write records back in the input format (three columns).
pub fn write_population_csv<W: Write>(
    w: &mut W,
    records: &[PopulationRecord],
) -> io::Result<()> {
    writeln!(w, "{POPULATION_HEADER}")?;
    for r in records {
        writeln!(w, "{},{},{}", r.region, r.total, r.migrated)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseEntry {
    pub date: NaiveDate,
    pub confirmed: u64,
    pub recovered: u64,
}

/// Daily confirmed/recovered counts for one region, dates strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSeries {
    pub region: String,
    pub entries: Vec<CaseEntry>,
}

/// Load a case CSV; the region name is the file stem.
pub fn load_cases_csv(path: &Path) -> Result<CaseSeries, IngestError> {
    let mut reader = open_reader(path)?;
    check_header(&mut reader, path, CASES_HEADER)?;
    let region = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut entries: Vec<CaseEntry> = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| IngestError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if row.len() != 3 {
            return Err(IngestError::InvariantViolation {
                line,
                message: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&row[0], "%Y-%m-%d").map_err(|_| {
            IngestError::BadCell {
                line,
                column: "date".to_string(),
                value: row[0].to_string(),
            }
        })?;
        let confirmed = parse_u64(&row[1], line, "confirmed")?;
        let recovered = parse_u64(&row[2], line, "recovered")?;
        if let Some(last) = entries.last() {
            if date <= last.date {
                return Err(IngestError::InvariantViolation {
                    line,
                    message: format!("dates must be strictly increasing ({} after {})", date, last.date),
                });
            }
        }
        entries.push(CaseEntry {
            date,
            confirmed,
            recovered,
        });
    }
    Ok(CaseSeries { region, entries })
}

/// Window-ratio reproduction number estimate:
/// `R_t(d) = sum of confirmed over (d, d+window] / sum over (d-window, d]`,
/// evaluated where both windows are fully covered and the denominator is
/// positive. Undefined anchors are omitted.
pub fn empirical_rt(
    series: &CaseSeries,
    window: u32,
) -> Result<Vec<(NaiveDate, f64)>, IngestError> {
    if window == 0 {
        return Err(IngestError::BadWindow);
    }
    let Some(first) = series.entries.first() else {
        return Err(IngestError::SeriesTooShort {
            days: 0,
            needed: 2 * window as i64,
        });
    };
    let last = series.entries.last().expect("nonempty");
    let span = (last.date - first.date).num_days() + 1;
    if span < 2 * window as i64 {
        return Err(IngestError::SeriesTooShort {
            days: span,
            needed: 2 * window as i64,
        });
    }
    let by_date: BTreeMap<NaiveDate, u64> = series
        .entries
        .iter()
        .map(|e| (e.date, e.confirmed))
        .collect();
    let w = window as i64;
    let mut out = Vec::new();
    for entry in &series.entries {
        let d = entry.date;
        let mut denominator = 0u64;
        let mut numerator = 0u64;
        let mut covered = true;
        for offset in 1..=w {
            match (
                by_date.get(&(d - chrono::Duration::days(offset - 1))),
                by_date.get(&(d + chrono::Duration::days(offset))),
            ) {
                (Some(&past), Some(&future)) => {
                    denominator += past;
                    numerator += future;
                }
                _ => {
                    covered = false;
                    break;
                }
            }
        }
        if covered && denominator > 0 {
            out.push((d, numerator as f64 / denominator as f64));
        }
    }
    Ok(out)
}

/// JSON payload of the sampling command, one object per region.
#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub region: String,
    pub total: u64,
    pub sampled_total: u64,
    pub migrated: u64,
    pub sampled_migrated: u64,
    pub spec: SampleSpec,
}

impl SampleReport {
    pub fn from_record(record: &PopulationRecord, spec: SampleSpec) -> Self {
        Self {
            region: record.region.clone(),
            total: record.total,
            sampled_total: record.sampled_total,
            migrated: record.migrated,
            sampled_migrated: record.sampled_migrated,
            spec,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn sample_size_reproduces_state_table() {
        let spec = SampleSpec::default();
        assert_eq!(sample_size(112_374_333, &spec).unwrap(), 7724);
        assert_eq!(sample_size(199_812_341, &spec).unwrap(), 7724);
    }

    #[test]
    fn sample_size_small_and_large_limits() {
        let spec = SampleSpec::default();
        assert_eq!(sample_size(1, &spec).unwrap(), 1);
        // infinite-population limit: z^2 p (1-p) / e^2 = 7724.04...
        assert_eq!(sample_size(u64::MAX / 2, &spec).unwrap(), 7724);
    }

    #[test]
    fn sample_size_one_percent_margin() {
        let spec = SampleSpec {
            e: 0.01,
            ..SampleSpec::default()
        };
        assert_eq!(sample_size(112_374_333, &spec).unwrap(), 1931);
    }

    #[test]
    fn sample_size_rejects_bad_inputs() {
        assert_eq!(
            sample_size(0, &SampleSpec::default()),
            Err(IngestError::EmptyPopulation)
        );
        let bad = SampleSpec {
            p: 0.0,
            ..SampleSpec::default()
        };
        assert_eq!(sample_size(10, &bad), Err(IngestError::BadSpec));
    }

    #[test]
    fn allocation_reproduces_state_table() {
        let mut mh = PopulationRecord {
            region: "Maharashtra".into(),
            total: 112_374_333,
            migrated: 57_376_776,
            sampled_total: 0,
            sampled_migrated: 0,
        };
        apply_sampling(&mut mh, &SampleSpec::default()).unwrap();
        assert_eq!(mh.sampled_total, 7724);
        assert_eq!(mh.sampled_migrated, 3944);

        let mut up = PopulationRecord {
            region: "Uttar Pradesh".into(),
            total: 199_812_341,
            migrated: 56_452_083,
            sampled_total: 0,
            sampled_migrated: 0,
        };
        apply_sampling(&mut up, &SampleSpec::default()).unwrap();
        assert_eq!(up.sampled_total, 7724);
        assert_eq!(up.sampled_migrated, 2182);
    }

    #[test]
    fn allocation_zero_migration() {
        let rec = PopulationRecord {
            region: "X".into(),
            total: 100,
            migrated: 0,
            sampled_total: 50,
            sampled_migrated: 0,
        };
        assert_eq!(allocate_migrated_sample(&rec), 0);
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_population_empty_data_section() {
        let f = write_tmp("region,total_population,migrated_population\n");
        assert_eq!(load_population_csv(f.path()).unwrap(), vec![]);
    }

    #[test]
    fn load_population_missing_file() {
        let err = load_population_csv(Path::new("/definitely/not/here.csv")).unwrap_err();
        assert!(matches!(err, IngestError::MissingFile(_)));
    }

    #[test]
    fn load_population_bad_header() {
        let f = write_tmp("region,population\nX,5\n");
        assert!(matches!(
            load_population_csv(f.path()).unwrap_err(),
            IngestError::BadHeader { .. }
        ));
    }

    #[test]
    fn load_population_bad_cell_names_line() {
        let f = write_tmp("region,total_population,migrated_population\nX,abc,1\n");
        assert_eq!(
            load_population_csv(f.path()).unwrap_err(),
            IngestError::BadCell {
                line: 2,
                column: "total_population".into(),
                value: "abc".into()
            }
        );
    }

    #[test]
    fn load_population_invariant_names_line() {
        let f = write_tmp(
            "region,total_population,migrated_population\nA,10,5\nB,10,20\n",
        );
        match load_population_csv(f.path()).unwrap_err() {
            IngestError::InvariantViolation { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("B"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn population_rows_round_trip() {
        let text = "region,total_population,migrated_population\n\
                    Maharashtra,112374333,57376776\n\
                    Uttar Pradesh,199812341,56452083\n";
        let f = write_tmp(text);
        let records = load_population_csv(f.path()).unwrap();
        let mut buf = Vec::new();
        write_population_csv(&mut buf, &records).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
        let f2 = write_tmp(text);
        assert_eq!(load_population_csv(f2.path()).unwrap(), records);
    }

    fn synthetic_series(values: &[u64]) -> CaseSeries {
        let start = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
        CaseSeries {
            region: "synthetic".into(),
            entries: values
                .iter()
                .enumerate()
                .map(|(k, &confirmed)| CaseEntry {
                    date: start + chrono::Duration::days(k as i64),
                    confirmed,
                    recovered: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn rt_constant_cases_is_one() {
        let series = synthetic_series(&[50; 30]);
        let rt = empirical_rt(&series, 7).unwrap();
        assert!(!rt.is_empty());
        for (_, v) in rt {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn rt_doubling_series_is_two() {
        let series = synthetic_series(&[1, 2, 4, 8, 16, 32, 64, 128, 256, 512]);
        let rt = empirical_rt(&series, 1).unwrap();
        for (_, v) in rt {
            assert_eq!(v, 2.0);
        }
    }

    #[test]
    fn rt_exponential_matches_closed_form() {
        // c(d) = 1e9 * e^{0.1 d}: the window ratio telescopes to e^{0.7}.
        let values: Vec<u64> = (0..40)
            .map(|d| (1e9 * (0.1 * d as f64).exp()).round() as u64)
            .collect();
        let series = synthetic_series(&values);
        let rt = empirical_rt(&series, 7).unwrap();
        assert!(!rt.is_empty());
        for (_, v) in rt {
            assert!((v - 2.0137527074704766).abs() < 1e-3);
        }
    }

    #[test]
    fn rt_omits_uncovered_anchors() {
        let series = synthetic_series(&[10; 20]);
        let rt = empirical_rt(&series, 7).unwrap();
        // anchors exist only where both 7-day windows fit
        assert_eq!(rt.len(), 20 - 13);
        assert_eq!(rt[0].0, NaiveDate::from_ymd_opt(2020, 3, 7).unwrap());
    }

    #[test]
    fn rt_rejects_short_series_and_zero_window() {
        let series = synthetic_series(&[10; 10]);
        assert!(matches!(
            empirical_rt(&series, 7),
            Err(IngestError::SeriesTooShort { .. })
        ));
        assert_eq!(empirical_rt(&series, 0), Err(IngestError::BadWindow));
    }

    #[test]
    fn cases_loader_validates_dates() {
        let f = write_tmp("date,confirmed,recovered\n2020-03-02,5,0\n2020-03-01,6,0\n");
        assert!(matches!(
            load_cases_csv(f.path()).unwrap_err(),
            IngestError::InvariantViolation { line: 3, .. }
        ));
        let f = write_tmp("date,confirmed,recovered\nnot-a-date,5,0\n");
        assert!(matches!(
            load_cases_csv(f.path()).unwrap_err(),
            IngestError::BadCell { line: 2, .. }
        ));
    }
}
