//! Deterministic CSV/JSON emission with values rounded to a fixed number of significant digits.

use crate::error::Result;
use serde_json::Value;
use std::io::Write;

pub const DEFAULT_DIGITS: usize = 12;

/// `v` rounded to `digits` significant digits.
pub fn round_f64(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v)
}

/// Shortest text of the rounded value.
pub fn round_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_f64(v, digits);
    if r == 0.0 { "0".into() } else { format!("{r:?}") }
}

/// Rounds every number in a JSON tree; non-finite values become `null`.
pub fn round_json(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().unwrap_or(f64::NAN);
                serde_json::Number::from_f64(round_f64(f, digits)).map_or(Value::Null, Value::Number)
            } else {
                v.clone()
            }
        }
        Value::Array(a) => Value::Array(a.iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, x)| (k.clone(), round_json(x, digits))).collect()),
        _ => v.clone(),
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// RFC 4180 table (CRLF line endings, mandatory header row).
pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: &[Vec<Cell>], digits: usize) -> Result<()> {
    let head: Vec<String> = header.iter().map(|h| escape(h)).collect();
    write!(w, "{}\r\n", head.join(","))?;
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => round_sig(*v, digits),
                Cell::Int(v) => v.to_string(),
                Cell::Bool(b) => b.to_string(),
                Cell::Text(s) => escape(s),
            })
            .collect();
        write!(w, "{}\r\n", cells.join(","))?;
    }
    Ok(())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2, 12), "0.3");
        assert_eq!(round_sig(1.0 / 3.0, 4), "0.3333");
        assert_eq!(round_sig(-2.5e-30, 12), "-2.5e-30");
        assert_eq!(round_sig(0.0, 12), "0");
        let j = serde_json::json!({"a": [0.1 + 0.2, 1, f64::NAN.to_string()]});
        assert_eq!(round_json(&j, 12)["a"][0], serde_json::json!(0.3));
    }

    #[test]
    fn csv_escaping() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec![Cell::from("x,y"), Cell::from(1.5)]], 12).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\r\n\"x,y\",1.5\r\n");
    }

    #[test]
    fn slope_of_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
        assert!((loglog_slope(&x, &y) - 2.0).abs() < 1e-12);
    }
}
