//! CSV interchange for rate points and threshold tables.

use std::io::{Read, Write};

use crate::codegraph::CodeKind;
use crate::decoders::DecoderKind;
use crate::error::{Error, Result};
use crate::montecarlo::{wilson_interval, RatePoint};

pub const RATE_HEADER: [&str; 11] = [
    "code", "decoder", "dim", "distance", "p", "trials", "failures", "rate", "ci_low", "ci_high", "seed",
];

pub const THRESHOLD_HEADER: [&str; 2] = ["dim", "p_thresh"];

/// `printf("%g")`: six significant digits, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (5 - exp) as usize))
    }
}

/// Rounds to the six significant digits `fmt_g` keeps.
pub fn round_g(x: f64) -> f64 {
    fmt_g(x).parse().unwrap_or(x)
}

/// Rows sorted by (distance, p).
pub fn write_rates<W: Write>(out: W, points: &[RatePoint]) -> Result<()> {
    let mut rows: Vec<&RatePoint> = points.iter().collect();
    rows.sort_by(|a, b| a.distance.cmp(&b.distance).then(a.p.total_cmp(&b.p)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.code.as_str().to_string(),
            r.decoder.as_str().to_string(),
            r.dim.to_string(),
            r.distance.to_string(),
            fmt_g(r.p),
            r.trials.to_string(),
            r.failures.to_string(),
            fmt_g(r.rate),
            fmt_g(r.ci_low),
            fmt_g(r.ci_high),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    for (i, want) in expected.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got.trim() == *want => {}
            Some(got) => {
                return Err(Error::Parse(format!("column {}: expected `{want}`, found `{got}`", i + 1)));
            }
            None => return Err(Error::Parse(format!("column {}: missing `{want}`", i + 1))),
        }
    }
    if headers.len() > expected.len() {
        return Err(Error::Parse(format!(
            "column {}: unexpected `{}`",
            expected.len() + 1,
            &headers[expected.len()]
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, row: usize, col: usize, name: &str) -> Result<T> {
    let raw = rec.get(col).ok_or_else(|| Error::Parse(format!("row {row}: missing `{name}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {row}, column `{name}`: cannot parse `{raw}`")))
}

/// Parses a rate CSV. Rates and intervals are recomputed from the counts.
pub fn read_rates<R: Read>(input: R) -> Result<Vec<RatePoint>> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    check_header(r.headers()?, &RATE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let code: String = field(&rec, row, 0, "code")?;
        let decoder: String = field(&rec, row, 1, "decoder")?;
        let trials: u64 = field(&rec, row, 5, "trials")?;
        let failures: u64 = field(&rec, row, 6, "failures")?;
        if trials == 0 || failures > trials {
            return Err(Error::Parse(format!("row {row}, column `failures`: {failures} of {trials} trials")));
        }
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        out.push(RatePoint {
            code: code
                .parse::<CodeKind>()
                .map_err(|_| Error::Parse(format!("row {row}, column `code`: unknown code `{code}`")))?,
            decoder: decoder
                .parse::<DecoderKind>()
                .map_err(|_| Error::Parse(format!("row {row}, column `decoder`: unknown decoder `{decoder}`")))?,
            dim: field(&rec, row, 2, "dim")?,
            distance: field(&rec, row, 3, "distance")?,
            p: field(&rec, row, 4, "p")?,
            trials,
            failures,
            rate: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            seed: field(&rec, row, 10, "seed")?,
        });
        // rate columns are validated for shape only
        for (col, name) in [(7, "rate"), (8, "ci_low"), (9, "ci_high")] {
            field::<f64>(&rec, row, col, name)?;
        }
    }
    Ok(out)
}

/// Parses `dim,p_thresh` rows.
pub fn read_thresholds<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    check_header(r.headers()?, &THRESHOLD_HEADER)?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            Ok((field(&rec, i + 2, 0, "dim")?, field(&rec, i + 2, 1, "p_thresh")?))
        })
        .collect()
}

pub fn write_thresholds<W: Write>(out: W, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THRESHOLD_HEADER)?;
    for &(d, p) in rows {
        w.write_record([fmt_g(d), fmt_g(p)])?;
    }
    w.flush()?;
    Ok(())
}
