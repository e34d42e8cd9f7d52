//! JSON / CSV emission. Both formats carry the same rows with the same values.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use charscan_core::experiments::CounterexampleRecord;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes `rows` to `out`, or to stdout when no path is given.
pub fn write_rows<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> io::Result<()> {
    let bytes = render(rows, format)?;
    match out {
        Some(path) => {
            let mut f = File::create(path)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
            f.write_all(&bytes)
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()
        }
    }
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(rows).map_err(io::Error::other)?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(io::Error::other)?;
            }
            w.into_inner().map_err(|e| io::Error::other(e.to_string()))
        }
    }
}

/// Flat CSV form of a [`CounterexampleRecord`]; primes are `;`-separated.
#[derive(Debug, Serialize)]
pub struct CounterexampleRow {
    pub flipped_primes: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "mean_at_N")]
    pub mean_at_n: f64,
    #[serde(rename = "log_mean_at_N")]
    pub log_mean_at_n: f64,
}

impl From<&CounterexampleRecord> for CounterexampleRow {
    fn from(r: &CounterexampleRecord) -> Self {
        CounterexampleRow {
            flipped_primes: r
                .flipped_primes
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            n: r.n,
            mean_at_n: r.mean_at_n,
            log_mean_at_n: r.log_mean_at_n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::ScanRecord;

    #[test]
    fn csv_column_order_is_fixed() {
        let r = ScanRecord {
            conductor: 7,
            family: "legendre".into(),
            max_abs: 2,
            argmax: 2,
            ratio_log: 0.5,
            ratio_loglog: None,
            timestamp: 1,
        };
        let text = String::from_utf8(render(&[r], Format::Csv).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("conductor,family,max_abs,argmax,ratio_log,ratio_loglog,timestamp")
        );
        assert_eq!(lines.next(), Some("7,legendre,2,2,0.5,,1"));
    }
}
