//! Snapshot and time-series serialization: grid snapshots as CSV, probe
//! series as CSV, optional grayscale PGM heatmaps, and the sinks the engine
//! writes through.
//!
//! Numbers are formatted with the shortest representation that parses back
//! to the same `f64`, so identical frames always produce identical bytes and
//! comparisons against recorded output can be exact.

use crate::lattice::Lattice;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("pgm range must satisfy lo < hi (got {lo}..{hi})")]
    EmptyPgmRange { lo: f64, hi: f64 },
    #[error("snapshot parse: {0}")]
    BadSnapshot(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One captured temperature field at a simulated time.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFrame {
    /// Simulated time, seconds.
    pub t: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major values, `ny` rows of `nx` columns.
    pub values: Vec<f64>,
}

impl SnapshotFrame {
    pub fn from_lattice(t: f64, lattice: &Lattice) -> Self {
        Self {
            t,
            nx: lattice.spec().nx,
            ny: lattice.spec().ny,
            values: lattice.temperatures().to_vec(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }
}

/// Render a snapshot as CSV: a `# t=<seconds>` header line, then `ny` lines
/// of `nx` comma-separated values, row `j = 0` first, column `i = 0`
/// leftmost.
pub fn snapshot_csv(frame: &SnapshotFrame) -> String {
    debug_assert_eq!(frame.values.len(), frame.nx * frame.ny);
    let mut out = String::with_capacity(frame.values.len() * 8 + 16);
    out.push_str("# t=");
    out.push_str(&frame.t.to_string());
    out.push('\n');
    for row in frame.values.chunks(frame.nx) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parse a document produced by [`snapshot_csv`] back into a frame. Since
/// the writer uses round-trip formatting this is exact.
pub fn parse_snapshot_csv(text: &str) -> Result<SnapshotFrame, OutputError> {
    let bad = |msg: String| OutputError::BadSnapshot(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty document".into()))?;
    let t = header
        .strip_prefix("# t=")
        .ok_or_else(|| bad(format!("expected `# t=<seconds>` header, got {header:?}")))?
        .parse::<f64>()
        .map_err(|e| bad(format!("bad time in header {header:?}: {e}")))?;

    let mut values = Vec::new();
    let mut nx = 0usize;
    let mut ny = 0usize;
    for (line_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|e| bad(format!("row {}: bad value {field:?}: {e}", line_no + 2)))
            })
            .collect::<Result<_, _>>()?;
        if ny == 0 {
            nx = row.len();
        } else if row.len() != nx {
            return Err(bad(format!(
                "row {} has {} values, expected {nx}",
                line_no + 2,
                row.len()
            )));
        }
        values.extend_from_slice(&row);
        ny += 1;
    }
    if ny == 0 {
        return Err(bad("no data rows".into()));
    }
    Ok(SnapshotFrame { t, nx, ny, values })
}

/// CSV header for a probe series: `t` followed by the probe names in
/// declaration order.
pub fn probe_header(names: &[String]) -> String {
    let mut out = String::from("t");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    out
}

/// One probe-series row: the time followed by the probe temperatures in
/// declaration order.
pub fn probe_row(t: f64, values: &[f64]) -> String {
    let mut out = t.to_string();
    for v in values {
        out.push(',');
        out.push_str(&v.to_string());
    }
    out.push('\n');
    out
}

/// Render a snapshot as an 8-bit binary PGM (`P5`), `nx` wide and `ny` tall.
/// Pixel value is `round(255 * clamp((T - t_lo) / (t_hi - t_lo), 0, 1))`;
/// NaN temperatures map to 0.
pub fn pgm(frame: &SnapshotFrame, t_lo: f64, t_hi: f64) -> Result<Vec<u8>, OutputError> {
    if !(t_lo < t_hi) {
        return Err(OutputError::EmptyPgmRange { lo: t_lo, hi: t_hi });
    }
    let mut out = format!("P5\n{} {}\n255\n", frame.nx, frame.ny).into_bytes();
    let span = t_hi - t_lo;
    out.extend(frame.values.iter().map(|&v| {
        let scaled = 255.0 * ((v - t_lo) / span).clamp(0.0, 1.0);
        scaled.round() as u8
    }));
    Ok(out)
}

/// Destination for engine output: snapshot frames at the configured cadence
/// and one probe row per step.
pub trait Sink {
    fn snapshot(&mut self, step: u64, frame: &SnapshotFrame) -> io::Result<()>;
    fn probe_row(&mut self, t: f64, values: &[f64]) -> io::Result<()>;

    /// Flush anything buffered. Called once at the end of a run.
    fn finish(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Discards everything.
pub struct NullSink;

impl Sink for NullSink {
    fn snapshot(&mut self, _step: u64, _frame: &SnapshotFrame) -> io::Result<()> {
        Ok(())
    }
    fn probe_row(&mut self, _t: f64, _values: &[f64]) -> io::Result<()> {
        Ok(())
    }
}

/// Keeps everything in memory. Used by tests and library callers that want
/// frames without touching the filesystem.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub snapshots: Vec<(u64, SnapshotFrame)>,
    pub probe_rows: Vec<(f64, Vec<f64>)>,
}

impl Sink for MemorySink {
    fn snapshot(&mut self, step: u64, frame: &SnapshotFrame) -> io::Result<()> {
        self.snapshots.push((step, frame.clone()));
        Ok(())
    }
    fn probe_row(&mut self, t: f64, values: &[f64]) -> io::Result<()> {
        self.probe_rows.push((t, values.to_vec()));
        Ok(())
    }
}

/// Writes snapshot files and a probe series under one directory.
///
/// File names sort lexically in step order:
/// `<base>_step<k padded to 8 digits>.csv` / `.pgm`, plus `<base>_probes.csv`
/// when probes are declared and CSV output is on.
pub struct DirectorySink {
    dir: PathBuf,
    base: String,
    csv: bool,
    pgm_range: Option<(f64, f64)>,
    probe_out: Option<BufWriter<fs::File>>,
}

impl DirectorySink {
    pub fn create(
        dir: &Path,
        base: &str,
        csv: bool,
        pgm_range: Option<(f64, f64)>,
        probe_names: &[String],
    ) -> Result<Self, OutputError> {
        if let Some((lo, hi)) = pgm_range {
            if !(lo < hi) {
                return Err(OutputError::EmptyPgmRange { lo, hi });
            }
        }
        fs::create_dir_all(dir)?;
        let probe_out = if csv && !probe_names.is_empty() {
            let file = fs::File::create(dir.join(format!("{base}_probes.csv")))?;
            let mut w = BufWriter::new(file);
            w.write_all(probe_header(probe_names).as_bytes())?;
            Some(w)
        } else {
            None
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            base: base.to_string(),
            csv,
            pgm_range,
            probe_out,
        })
    }
}

impl Sink for DirectorySink {
    fn snapshot(&mut self, step: u64, frame: &SnapshotFrame) -> io::Result<()> {
        if self.csv {
            let path = self.dir.join(format!("{}_step{step:08}.csv", self.base));
            fs::write(path, snapshot_csv(frame))?;
        }
        if let Some((lo, hi)) = self.pgm_range {
            let bytes = pgm(frame, lo, hi).expect("range validated at construction");
            let path = self.dir.join(format!("{}_step{step:08}.pgm", self.base));
            fs::write(path, bytes)?;
        }
        Ok(())
    }

    fn probe_row(&mut self, t: f64, values: &[f64]) -> io::Result<()> {
        if let Some(w) = self.probe_out.as_mut() {
            w.write_all(probe_row(t, values).as_bytes())?;
        }
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        if let Some(w) = self.probe_out.as_mut() {
            w.flush()?;
        }
        Ok(())
    }
}
