//! Per-tick aggregate record of a simulation run.

use std::io::{self, Write};

use serde::Serialize;

/// Aggregates and per-tick metrics for one recorded tick. `S`, `I`, `R`
/// are in individuals (sum of per-node fractions over the cohort).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TickRow {
    pub tick: u32,
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub k_mean: f64,
    pub r_t: f64,
    pub beta_critical: f64,
    pub spreading_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    /// Cohort size.
    pub n: usize,
    /// Area of the region, square meters.
    pub area: f64,
    /// Tick length, days.
    pub dt: f64,
    pub rows: Vec<TickRow>,
}

impl TrajectoryRecord {
    pub fn infected(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.i).collect()
    }

    pub fn susceptible(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s).collect()
    }

    /// `tick,S,I,R,k_mean,R_t,beta_critical,spreading_speed` to six
    /// decimal places.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "tick,S,I,R,k_mean,R_t,beta_critical,spreading_speed")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                row.tick,
                row.s,
                row.i,
                row.r,
                row.k_mean,
                row.r_t,
                row.beta_critical,
                row.spreading_speed
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}
