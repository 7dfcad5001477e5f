//! CSV and JSON writers. Every CSV has a header row and a fixed column
//! order; floats use the shortest representation that round-trips.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::discretize::DiscretePath;
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Table with a fixed header. Rows must match the header width.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(io_err(path))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// `k, s, sdot, sddot, dt, tau_1..tau_n, violation_flag`. `dt` is empty on
/// the last row; the flag is empty when no verdicts are given.
pub fn trajectory_table(traj: &Trajectory, dp: &DiscretePath, verdicts: Option<&[bool]>) -> Table {
    let dof = traj.torques.first().map_or(0, |t| t.len());
    let mut header: Vec<String> = ["k", "s", "sdot", "sddot", "dt"].map(String::from).to_vec();
    header.extend((1..=dof).map(|i| format!("tau_{i}")));
    header.push("violation_flag".into());
    let mut table = Table::new(header);
    for k in 0..traj.len() {
        let mut row = vec![
            k.to_string(),
            fmt_f64(dp.s(k)),
            fmt_f64(traj.sdot[k]),
            fmt_f64(traj.sddot[k]),
            fmt_opt(traj.dt.get(k)),
        ];
        row.extend(traj.torques[k].iter().map(|t| fmt_f64(*t)));
        row.push(fmt_opt(verdicts.map(|v| u8::from(v[k]))));
        table.push(row);
    }
    table
}

pub fn history_table(history: &[(u64, f64)]) -> Table {
    let mut table = Table::new(["episode", "return"]);
    for (e, r) in history {
        table.push(vec![e.to_string(), fmt_f64(*r)]);
    }
    table
}

pub fn discretization_table(dp: &DiscretePath) -> Table {
    let dof = dp.point(0).q.len();
    let mut header = vec!["k".to_string(), "s".to_string()];
    header.extend((1..=dof).map(|i| format!("q_{i}")));
    let mut table = Table::new(header);
    for (k, p) in dp.points().iter().enumerate() {
        let mut row = vec![k.to_string(), fmt_f64(p.s)];
        row.extend(p.q.iter().map(|x| fmt_f64(*x)));
        table.push(row);
    }
    table
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}
