//! Text output for measure series: CSV rows and 17-significant-digit JSON
//! numbers.

use super::MeasureSeries;
use serde_json::value::RawValue;
use std::io::{self, Write};

/// Round-trip representation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number with 17 significant digits; non-finite values become null.
pub fn json_number(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { fmt_float(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// f64 that serializes through [`json_number`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float(pub f64);

impl serde::Serialize for Float {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        json_number(self.0).serialize(s)
    }
}

/// Rows `r,t,E,dE_dr,dE_dt,I`, every `r_stride`-th radius and `t_stride`-th
/// time (the last time is always kept).
pub fn write_series_csv(series: &MeasureSeries, r_stride: usize, t_stride: usize, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "r,t,E,dE_dr,dE_dt,I")?;
    let nt = series.t.len();
    let times: Vec<usize> = (0..nt)
        .filter(|&n| n % t_stride.max(1) == 0 || n + 1 == nt)
        .collect();
    for ri in (0..series.r.len()).step_by(r_stride.max(1)) {
        for &n in &times {
            let vals = [
                series.r[ri],
                series.t[n],
                series.e[ri][n],
                series.de_dr[ri][n],
                series.de_dt[ri][n],
                series.i[ri][n],
            ];
            let row: Vec<String> = vals.iter().map(|v| fmt_float(*v)).collect();
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_csv() {
        assert_eq!(json_number(0.1).get(), "1.0000000000000001e-1");
        assert_eq!(json_number(f64::NAN).get(), "null");
        let v = vec![Float(2.0), Float(f64::INFINITY)];
        assert_eq!(serde_json::to_string(&v).unwrap(), "[2.0000000000000000e0,null]");
        let s = MeasureSeries::zeros(1.0, 1.0, vec![0.0, 0.5], vec![0.0, 1.0, 2.0]);
        let mut buf = Vec::new();
        write_series_csv(&s, 2, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("r,t,E,dE_dr,dE_dt,I\n"));
    }
}
