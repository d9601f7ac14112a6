//! Matrix-list files: a `dim: <d>` header, then `d` rows of `d` complex
//! entries per matrix. Entries look like `0.5`, `-i`, `1e-3-0.25i` or `1/6`.
//! Blank lines and `#` comments are ignored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::ComplexMatrix;

fn real(s: &str) -> Option<f64> {
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (f64, f64) = (n.parse().ok()?, d.parse().ok()?);
        return (d != 0.0).then(|| n / d);
    }
    s.parse().ok()
}

pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return real(s).map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other.strip_prefix('+').unwrap_or(other))?,
    };
    Some(Complex64::new(re, im))
}

pub fn parse_matrix_file(text: &str) -> Result<Vec<ComplexMatrix>> {
    let mut rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect::<Vec<_>>();
    if rows.is_empty() {
        return Err(Error::parse(1, "empty file; expected `dim: <d>`"));
    }
    let (n0, header) = rows.remove(0);
    let d: usize = header
        .strip_prefix("dim:")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::parse(n0, "expected `dim: <positive integer>`"))?;
    if rows.is_empty() || rows.len() % d != 0 {
        let line = rows.last().map_or(n0, |r| r.0);
        return Err(Error::parse(line, format!("{} matrix rows is not a positive multiple of {d}", rows.len())));
    }
    let mut out = Vec::new();
    for chunk in rows.chunks(d) {
        let mut entries = Vec::with_capacity(d * d);
        for &(n, line) in chunk {
            let row: Vec<Complex64> = line
                .split_whitespace()
                .map(|t| parse_complex(t).ok_or_else(|| Error::parse(n, format!("bad complex entry `{t}`"))))
                .collect::<Result<_>>()?;
            if row.len() != d {
                return Err(Error::parse(n, format!("row has {} entries, expected {d}", row.len())));
            }
            entries.extend(row);
        }
        out.push(ComplexMatrix::new(d, d, entries)?);
    }
    Ok(out)
}

pub fn matrix_file_text(ms: &[ComplexMatrix]) -> String {
    let d = ms.first().map_or(0, ComplexMatrix::rows);
    let mut out = format!("dim: {d}\n");
    for m in ms {
        out.push('\n');
        for r in 0..d {
            let row: Vec<String> = (0..d)
                .map(|c| {
                    let z = m.get(r, c);
                    format!("{:.17e}{:+.17e}i", z.re, z.im)
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}
