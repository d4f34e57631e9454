//! CSV tables and run metadata.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;

/// A named table written as `<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(name: &str, header: &[S]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column `name` parsed as numbers; non-numeric cells become NaN.
    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::error::HarnessError::Output(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(format!("{}.csv", self.name)), self.to_csv()?)?;
        Ok(())
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Serialize)]
pub struct Meta<'a, C: Serialize, N: Serialize> {
    pub experiment: &'a str,
    pub config: &'a C,
    pub seed: u64,
    pub threads: usize,
    pub versions: Versions,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub notes: &'a N,
}

#[derive(Serialize)]
pub struct Versions {
    pub dahsim: &'static str,
    pub dahsim_core: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            dahsim: env!("CARGO_PKG_VERSION"),
            dahsim_core: dahsim_core::VERSION,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn write_meta<C: Serialize, N: Serialize>(
    dir: &Path,
    experiment: &str,
    config: &C,
    seed: u64,
    threads: usize,
    wall: Duration,
    tables: &[Table],
    notes: &N,
) -> Result<()> {
    let meta = Meta {
        experiment,
        config,
        seed,
        threads,
        versions: Versions::default(),
        wall_time_s: wall.as_secs_f64(),
        outputs: tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
        notes,
    };
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}
