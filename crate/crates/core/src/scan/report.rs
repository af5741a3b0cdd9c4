use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::norms::Exponent;

use super::config::{Family, Operator};

pub const CSV_HEADER: [&str; 11] =
    ["operator", "d", "p", "q", "family", "n_members", "input_norm", "output_norm", "ratio", "wall_ms", "extra"];

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub operator: Operator,
    pub d: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub family: Family,
    pub n_members: usize,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    pub wall_ms: f64,
    /// `key=value` pairs separated by `;`.
    pub extra: String,
}

impl ScanRow {
    fn record(&self) -> [String; 11] {
        [
            self.operator.to_string(),
            self.d.to_string(),
            self.p.to_string(),
            self.q.to_string(),
            self.family.to_string(),
            self.n_members.to_string(),
            self.input_norm.to_string(),
            self.output_norm.to_string(),
            self.ratio.to_string(),
            self.wall_ms.to_string(),
            self.extra.clone(),
        ]
    }

    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("malformed CSV field {what}"));
        let get = |i: usize| r.get(i).ok_or_else(|| bad(CSV_HEADER[i]));
        let num = |i: usize| get(i)?.parse::<f64>().map_err(|_| bad(CSV_HEADER[i]));
        Ok(Self {
            operator: get(0)?.parse()?,
            d: get(1)?.parse().map_err(|_| bad("d"))?,
            p: get(2)?.parse()?,
            q: get(3)?.parse()?,
            family: get(4)?.parse()?,
            n_members: get(5)?.parse().map_err(|_| bad("n_members"))?,
            input_norm: num(6)?,
            output_norm: num(7)?,
            ratio: num(8)?,
            wall_ms: num(9)?,
            extra: get(10)?.to_string(),
        })
    }

    /// Value of `key` in the extra field.
    pub fn extra_value(&self, key: &str) -> Option<&str> {
        self.extra.split(';').find_map(|kv| kv.split_once('=').filter(|(k, _)| *k == key).map(|(_, v)| v))
    }
}

/// Rows of a sweep with free-form notes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub notes: Vec<String>,
}

impl ScanReport {
    /// Orders rows by `(operator, d, p, q)`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.operator, a.d)
                .cmp(&(b.operator, b.d))
                .then(a.p.value().total_cmp(&b.p.value()))
                .then(a.q.value().total_cmp(&b.q.value()))
        });
    }

    /// Copy with every `wall_ms` set to zero.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.rows.iter_mut().for_each(|r| r.wall_ms = 0.0);
        out
    }
}

pub fn write_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    r.records().map(|rec| ScanRow::from_record(&rec?)).collect()
}

pub fn emit_csv(report: &ScanReport, path: &Path) -> Result<()> {
    write_csv(report, BufWriter::new(File::create(path)?))
}

/// Per-`(p, q)` blocks of `d ratio` lines, blocks separated by two blank lines.
pub fn write_plotdata<W: Write>(report: &ScanReport, mut out: W) -> Result<()> {
    for note in &report.notes {
        writeln!(out, "# {note}")?;
    }
    let mut series: BTreeMap<(String, String, String), Vec<(usize, f64)>> = BTreeMap::new();
    for row in &report.rows {
        series
            .entry((row.operator.to_string(), row.p.to_string(), row.q.to_string()))
            .or_default()
            .push((row.d, row.ratio));
    }
    for (i, ((op, p, q), points)) in series.iter().enumerate() {
        if i > 0 {
            writeln!(out, "\n")?;
        }
        writeln!(out, "# operator={op} p={p} q={q}")?;
        writeln!(out, "# d ratio")?;
        for (d, ratio) in points {
            writeln!(out, "{d} {ratio}")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn emit_plotdata(report: &ScanReport, path: &Path) -> Result<()> {
    write_plotdata(report, BufWriter::new(File::create(path)?))
}
