//! CSV serialization for curve tables.
//!
//! Layout: `#key=value` metadata lines, then a header row, then one row
//! per n. Values are rendered with Rust's shortest round-trip float
//! formatting, so re-parsing a file reproduces the exact bits that were
//! written. Cells are blank where a column has no point at that n
//! (time-averaged columns start at n=1, for example).

use crate::error::Error;
use crate::series::{CurveKind, CurvePoint, CurveSeries, CurveTable, SeriesMeta};
use crate::Result;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Write a table to one CSV stream.
pub fn write_curve_table<W: Write>(mut w: W, table: &CurveTable) -> Result<()> {
    let meta = &table.meta;
    if !meta.dist_spec.is_empty() {
        writeln!(w, "#dist_spec={}", meta.dist_spec)?;
    }
    if let Some(runs) = meta.runs_k {
        writeln!(w, "#runs_k={runs}")?;
    }
    if let Some(seed) = meta.seed {
        writeln!(w, "#seed={seed}")?;
    }
    writeln!(w, "#tail_mass_bound={}", meta.tail_mass_bound)?;

    let with_se: Vec<bool> = table
        .columns
        .iter()
        .map(|c| {
            c.kind.se_column_name().is_some() && c.points.iter().any(|p| p.se.is_some())
        })
        .collect();
    write!(w, "n")?;
    for (col, &se) in table.columns.iter().zip(&with_se) {
        write!(w, ",{}", col.kind.column_name())?;
        if se {
            write!(w, ",{}", col.kind.se_column_name().expect("checked"))?;
        }
    }
    writeln!(w)?;

    for n in table.n_axis() {
        write!(w, "{n}")?;
        for (col, &se) in table.columns.iter().zip(&with_se) {
            match col.points.binary_search_by_key(&n, |p| p.n) {
                Ok(i) => {
                    let p = &col.points[i];
                    write!(w, ",{}", p.value)?;
                    if se {
                        match p.se {
                            Some(s) => write!(w, ",{s}")?,
                            None => write!(w, ",")?,
                        }
                    }
                }
                Err(_) => {
                    write!(w, ",")?;
                    if se {
                        write!(w, ",")?;
                    }
                }
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_curve_table_file(path: impl AsRef<Path>, table: &CurveTable) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_curve_table(&mut w, table)?;
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::CsvParse {
        line,
        reason: reason.into(),
    }
}

/// One header slot: the n axis, a value column, or an SE column.
enum Slot {
    N,
    Value(CurveKind),
    Se(CurveKind),
}

fn slot_for(name: &str) -> Option<Slot> {
    if name == "n" {
        return Some(Slot::N);
    }
    if let Some(kind) = CurveKind::from_column_name(name) {
        return Some(Slot::Value(kind));
    }
    const ALL: [CurveKind; 3] = [
        CurveKind::McInstMean,
        CurveKind::McTimeAvgMean,
        CurveKind::McCumulativeMean,
    ];
    ALL.into_iter()
        .find(|k| k.se_column_name() == Some(name))
        .map(Slot::Se)
}

/// Read a table back; exact inverse of [`write_curve_table`].
pub fn read_curve_table<R: BufRead>(r: R) -> Result<CurveTable> {
    let mut meta = SeriesMeta::default();
    let mut slots: Option<Vec<Slot>> = None;
    // Points per value column, and SE cells to attach afterwards.
    let mut columns: Vec<(CurveKind, Vec<CurvePoint>)> = Vec::new();
    let mut se_cells: Vec<(CurveKind, Vec<(u64, f64)>)> = Vec::new();

    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(lineno, "metadata line without '='"))?;
            match key {
                "dist_spec" => meta.dist_spec = value.to_string(),
                "runs_k" => {
                    meta.runs_k = Some(value.parse().map_err(|_| {
                        parse_err(lineno, format!("bad runs_k '{value}'"))
                    })?)
                }
                "seed" => {
                    meta.seed = Some(value.parse().map_err(|_| {
                        parse_err(lineno, format!("bad seed '{value}'"))
                    })?)
                }
                "tail_mass_bound" => {
                    meta.tail_mass_bound = value.parse().map_err(|_| {
                        parse_err(lineno, format!("bad tail_mass_bound '{value}'"))
                    })?
                }
                _ => {} // unknown metadata is carried by future writers; skip
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match &slots {
            None => {
                // Header row.
                let mut parsed = Vec::with_capacity(cells.len());
                for (i, name) in cells.iter().enumerate() {
                    let slot = slot_for(name)
                        .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
                    match &slot {
                        Slot::N if i != 0 => {
                            return Err(parse_err(lineno, "n must be the first column"))
                        }
                        Slot::Value(kind) => columns.push((*kind, Vec::new())),
                        Slot::Se(kind) => se_cells.push((*kind, Vec::new())),
                        Slot::N => {}
                    }
                    parsed.push(slot);
                }
                if !matches!(parsed.first(), Some(Slot::N)) {
                    return Err(Error::CsvMissingColumn("n"));
                }
                slots = Some(parsed);
            }
            Some(slots) => {
                if cells.len() != slots.len() {
                    return Err(parse_err(
                        lineno,
                        format!("expected {} cells, got {}", slots.len(), cells.len()),
                    ));
                }
                let n: u64 = cells[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad n '{}'", cells[0])))?;
                for (cell, slot) in cells[1..].iter().zip(&slots[1..]) {
                    if cell.is_empty() {
                        continue;
                    }
                    let value: f64 = cell
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad value '{cell}'")))?;
                    match slot {
                        Slot::Value(kind) => {
                            let col = columns
                                .iter_mut()
                                .find(|(k, _)| k == kind)
                                .expect("registered at header");
                            if col.1.last().is_some_and(|p| p.n >= n) {
                                return Err(parse_err(lineno, "n not strictly increasing"));
                            }
                            col.1.push(CurvePoint { n, value, se: None });
                        }
                        Slot::Se(kind) => {
                            let col = se_cells
                                .iter_mut()
                                .find(|(k, _)| k == kind)
                                .expect("registered at header");
                            col.1.push((n, value));
                        }
                        Slot::N => unreachable!(),
                    }
                }
            }
        }
    }
    if slots.is_none() {
        return Err(Error::CsvMissingColumn("n"));
    }

    let mut series: Vec<CurveSeries> = columns
        .into_iter()
        .map(|(kind, points)| CurveSeries {
            kind,
            points,
            meta: meta.clone(),
        })
        .collect();
    for (kind, cells) in se_cells {
        let col = series
            .iter_mut()
            .find(|s| s.kind == kind)
            .ok_or(Error::CsvMissingColumn("mean column for an se column"))?;
        for (n, se) in cells {
            let i = col
                .points
                .binary_search_by_key(&n, |p| p.n)
                .map_err(|_| parse_err(0, format!("se at n={n} without a value")))?;
            col.points[i].se = Some(se);
        }
    }
    Ok(CurveTable::new(meta, series))
}

pub fn read_curve_table_file(path: impl AsRef<Path>) -> Result<CurveTable> {
    read_curve_table(BufReader::new(File::open(path)?))
}
