//! CSV and JSON serialization of trajectories.
//!
//! Numbers are written with 12 significant digits in `%.12g` style so that the
//! files are stable across platforms and easy to diff.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::{EventReport, TrajectoryRecord};
use crate::correlations::{Branch, XState};
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 15] = [
    "t",
    "a",
    "b",
    "d",
    "w",
    "z",
    "mutual_info",
    "classical_corr",
    "d1",
    "d2",
    "discord",
    "branch",
    "concurrence",
    "eof",
    "purity",
];

/// Positivity slack for X states read back from 12-digit text.
const TEXT_STATE_SLACK: f64 = 1e-10;

/// `printf("%.12g", v)`.
pub fn format_sig12(v: f64) -> String {
    const P: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Parse(e.to_string())
    }
}

fn row(r: &TrajectoryRecord) -> [String; 15] {
    let f = format_sig12;
    [
        f(r.t),
        f(r.x.a()),
        f(r.x.b()),
        f(r.x.d()),
        f(r.x.w()),
        f(r.x.z()),
        f(r.mutual_info),
        f(r.classical_corr),
        f(r.d1),
        f(r.d2),
        f(r.discord),
        r.branch.as_str().to_string(),
        f(r.concurrence),
        f(r.eof),
        f(r.purity),
    ]
}

pub fn write_csv<W: Write>(out: W, records: &[TrajectoryRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in records {
        w.write_record(row(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_csv`]; values are taken as stored.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Parse(format!("unexpected CSV header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: column {}: {e}", line + 1, COLUMNS[i])))
        };
        let x = XState::with_slack(num(1)?, num(2)?, num(3)?, num(4)?, num(5)?, TEXT_STATE_SLACK)
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        out.push(TrajectoryRecord {
            t: num(0)?,
            x,
            mutual_info: num(6)?,
            classical_corr: num(7)?,
            d1: num(8)?,
            d2: num(9)?,
            discord: num(10)?,
            branch: rec[11].parse::<Branch>()?,
            concurrence: num(12)?,
            eof: num(13)?,
            purity: num(14)?,
        });
    }
    Ok(out)
}

fn json_row(r: &TrajectoryRecord) -> Vec<serde_json::Value> {
    use serde_json::Value;
    let n = |v: f64| serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
    vec![
        n(r.t),
        n(r.x.a()),
        n(r.x.b()),
        n(r.x.d()),
        n(r.x.w()),
        n(r.x.z()),
        n(r.mutual_info),
        n(r.classical_corr),
        n(r.d1),
        n(r.d2),
        n(r.discord),
        Value::String(r.branch.as_str().into()),
        n(r.concurrence),
        n(r.eof),
        n(r.purity),
    ]
}

/// One JSON object: `{config, columns, data, events}` with row-major data.
pub fn write_json<W: Write, C: Serialize>(
    out: W,
    config: &C,
    records: &[TrajectoryRecord],
    events: Option<&EventReport>,
) -> Result<()> {
    let doc = serde_json::json!({
        "config": config,
        "columns": COLUMNS,
        "data": records.iter().map(json_row).collect::<Vec<_>>(),
        "events": events,
    });
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_events_json<W: Write>(out: W, events: &EventReport) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, events).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub value: f64,
    pub file: String,
}

/// Written once after every sweep point has finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub param: String,
    pub base: serde_json::Value,
    pub entries: Vec<SweepEntry>,
}

impl SweepManifest {
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independent::propagate_independent;
    use crate::reservoir::{BellLikeInitial, ReservoirParams};
    use proptest::prelude::*;

    fn sample_records() -> Vec<TrajectoryRecord> {
        let init = BellLikeInitial::new(0.1).unwrap();
        let r = ReservoirParams::scaled(0.01).unwrap();
        (0..200)
            .map(|k| {
                let t = 0.25 * k as f64;
                TrajectoryRecord::from_xstate(t, propagate_independent(&init, &r, t).unwrap()).unwrap()
            })
            .collect()
    }

    #[test]
    fn sig12_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1e-300, "1e-300"),
            (23.27350000001, "23.2735"),
            (f64::NAN, "nan"),
            (f64::INFINITY, "inf"),
            (999999999999.5, "1e+12"),
        ];
        for (v, s) in cases {
            assert_eq!(format_sig12(v), s, "{v:e}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let records = sample_records();
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with("t,a,b,d,w,z,mutual_info,classical_corr,d1,d2,discord,branch,concurrence,eof,purity\n")
        );
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.branch, b.branch);
            for (u, v) in [(a.t, b.t), (a.discord, b.discord), (a.x.w(), b.x.w()), (a.eof, b.eof)] {
                assert!((u - v).abs() <= 1e-11 * u.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(matches!(read_csv("x,y\n1,2\n".as_bytes()), Err(Error::Parse(_))));
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample_records()[..2]).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("D1", "D3");
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn json_and_csv_agree() {
        let records = sample_records();
        let mut csv_buf = Vec::new();
        write_csv(&mut csv_buf, &records).unwrap();
        let mut json_buf = Vec::new();
        write_json(&mut json_buf, &serde_json::json!({"alpha2": 0.1}), &records, None).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&json_buf).unwrap();
        assert_eq!(doc["columns"].as_array().unwrap().len(), COLUMNS.len());
        assert!(doc["events"].is_null());
        let data = doc["data"].as_array().unwrap();
        let from_csv = read_csv(csv_buf.as_slice()).unwrap();
        for (row, r) in data.iter().zip(&from_csv) {
            let row = row.as_array().unwrap();
            assert_eq!(row[11].as_str().unwrap(), r.branch.as_str());
            assert_eq!(format_sig12(row[10].as_f64().unwrap()), format_sig12(r.discord));
            assert_eq!(format_sig12(row[0].as_f64().unwrap()), format_sig12(r.t));
        }
    }

    proptest! {
        #[test]
        fn sig12_round_trips_to_twelve_digits(v in prop::num::f64::NORMAL) {
            let parsed: f64 = format_sig12(v).parse().unwrap();
            prop_assert!((parsed - v).abs() <= 5e-12 * v.abs());
        }
    }
}
