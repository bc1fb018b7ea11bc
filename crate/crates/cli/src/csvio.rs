//! CSV persistence. Every file has a fixed header row, comma delimiters and
//! `\n` line endings; floats are written in shortest round-trip form.

use std::path::{Path, PathBuf};

use bec_entanglement::scaling::CollapsePlot;
use bec_entanglement::sweep::{CriticalPoint, DelayRecord, SweepCurve, SweepSample};
use bec_entanglement::{CouplingConvention, SystemSize};

use crate::error::{CliError, Result};

pub const SWEEP_HEADER: [&str; 5] = [
    "omega",
    "entropy",
    "susceptibility",
    "jz_fluct",
    "jz_fluct_deriv",
];
pub const CRITICAL_HEADER: [&str; 4] = ["n", "omega_m", "peak_susceptibility", "resolution"];
pub const DELAY_HEADER: [&str; 2] = ["n", "delta_omega"];
pub const COLLAPSE_HEADER: [&str; 3] = ["n", "x_reduced", "y_reduced"];

pub const CRITICAL_FILE: &str = "critical.csv";
pub const DELAY_FILE: &str = "delay.csv";
pub const COLLAPSE_FILE: &str = "collapse.csv";

pub fn sweep_file_name(n: SystemSize) -> String {
    format!("sweep_N{n}.csv")
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(err) => CliError::io(path, err),
        other => CliError::input(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Raw rows of a CSV with the given header, each tagged with its line number.
fn read_table(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(err) => CliError::io(path, err),
            other => CliError::input(format!("{}: {other:?}", path.display())),
        })?;
    let found = r.headers().map_err(|e| parse_error(path, 1, e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            format!("expected header {:?}, found {:?}", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_error(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        rows.push((line, rec));
    }
    Ok(rows)
}

fn parse_error(path: &Path, line: u64, message: String) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn float_field(path: &Path, line: u64, rec: &csv::StringRecord, idx: usize, name: &str) -> Result<f64> {
    let raw = rec.get(idx).unwrap_or("");
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_error(path, line, format!("column {name}: not a number: {raw:?}")))
}

fn size_field(path: &Path, line: u64, rec: &csv::StringRecord) -> Result<SystemSize> {
    let raw = rec.get(0).unwrap_or("");
    raw.parse::<SystemSize>()
        .map_err(|e| parse_error(path, line, format!("column n: {e}")))
}

pub fn write_sweep(dir: &Path, curve: &SweepCurve) -> Result<PathBuf> {
    let path = dir.join(sweep_file_name(curve.n_particles));
    write_table(
        &path,
        &SWEEP_HEADER,
        curve.samples.iter().map(|s| {
            vec![
                fmt_float(s.omega),
                fmt_float(s.entropy),
                fmt_float(s.susceptibility),
                fmt_float(s.jz_fluct),
                fmt_float(s.jz_fluct_deriv),
            ]
        }),
    )?;
    Ok(path)
}

pub fn read_sweep(path: &Path, n: SystemSize, convention: CouplingConvention) -> Result<SweepCurve> {
    let rows = read_table(path, &SWEEP_HEADER)?;
    let mut samples = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        let f = |i: usize| float_field(path, *line, rec, i, SWEEP_HEADER[i]);
        let sample = SweepSample {
            omega: f(0)?,
            entropy: f(1)?,
            susceptibility: f(2)?,
            jz_fluct: f(3)?,
            jz_fluct_deriv: f(4)?,
        };
        if let Some(prev) = samples.last().map(|s: &SweepSample| s.omega) {
            if sample.omega <= prev {
                return Err(parse_error(path, *line, "omega column is not strictly increasing".into()));
            }
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    Ok(SweepCurve {
        n_particles: n,
        convention,
        samples,
    })
}

pub fn write_critical(path: &Path, points: &[CriticalPoint]) -> Result<()> {
    write_table(
        path,
        &CRITICAL_HEADER,
        points.iter().map(|c| {
            vec![
                c.n_particles.to_string(),
                fmt_float(c.omega_m),
                fmt_float(c.peak_susceptibility),
                fmt_float(c.resolution),
            ]
        }),
    )
}

pub fn read_critical(path: &Path) -> Result<Vec<CriticalPoint>> {
    read_table(path, &CRITICAL_HEADER)?
        .iter()
        .map(|(line, rec)| {
            let f = |i: usize| float_field(path, *line, rec, i, CRITICAL_HEADER[i]);
            Ok(CriticalPoint {
                n_particles: size_field(path, *line, rec)?,
                omega_m: f(1)?,
                peak_susceptibility: f(2)?,
                resolution: f(3)?,
            })
        })
        .collect()
}

pub fn write_delay(path: &Path, records: &[DelayRecord]) -> Result<()> {
    write_table(
        path,
        &DELAY_HEADER,
        records
            .iter()
            .map(|d| vec![d.n_particles.to_string(), fmt_float(d.delta_omega)]),
    )
}

pub fn read_delay(path: &Path) -> Result<Vec<(SystemSize, f64)>> {
    read_table(path, &DELAY_HEADER)?
        .iter()
        .map(|(line, rec)| {
            Ok((
                size_field(path, *line, rec)?,
                float_field(path, *line, rec, 1, DELAY_HEADER[1])?,
            ))
        })
        .collect()
}

pub fn write_collapse(path: &Path, plot: &CollapsePlot) -> Result<()> {
    write_table(
        path,
        &COLLAPSE_HEADER,
        plot.curves.iter().flat_map(|c| {
            c.points
                .iter()
                .map(move |&(x, y)| vec![c.n_particles.to_string(), fmt_float(x), fmt_float(y)])
        }),
    )
}
