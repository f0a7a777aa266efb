//! Summary reports and CSV tables.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "shellkit-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within([f64; 2]),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(t) => v <= t,
            Bound::AtLeast(t) => v >= t,
            Bound::Within([lo, hi]) => v >= lo && v <= hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// `null` when the quantity is not finite.
    pub measured: Option<f64>,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Check {
            name: name.into(),
            passed: measured.is_finite() && bound.holds(measured),
            measured: measured.is_finite().then_some(measured),
            bound,
        }
    }

    /// All values must satisfy the bound; the worst offender is reported.
    pub fn all(name: impl Into<String>, values: &[f64], bound: Bound) -> Self {
        let worst = values.iter().copied().fold(None::<f64>, |w, v| {
            let badness = |x: f64| match bound {
                Bound::AtMost(_) => x,
                Bound::AtLeast(_) => -x,
                Bound::Within([lo, hi]) => (lo - x).max(x - hi),
            };
            match w {
                _ if !v.is_finite() => Some(f64::NAN),
                Some(w) if w.is_nan() || badness(w) >= badness(v) => Some(w),
                _ => Some(v),
            }
        });
        match worst {
            Some(v) => Check::new(name, v, bound),
            None => Check::new(name, f64::NAN, bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub verb: &'static str,
    pub seed: u64,
    pub tol_scale: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub summary: Value,
    pub artifacts: Vec<String>,
    pub error: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// 17 significant digits, `.` decimal.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// In-memory CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Column names `prefix_ij` for the 9 entries of a matrix, row-major.
pub fn matrix_columns(prefix: &str) -> Vec<String> {
    (0..3)
        .flat_map(|i| (0..3).map(move |j| format!("{prefix}_{}{}", i + 1, j + 1)))
        .collect()
}

pub fn vector_columns(prefix: &str) -> Vec<String> {
    (0..3).map(|i| format!("{prefix}_{}", i + 1)).collect()
}

pub fn matrix_cells(m: &crate::tensor::Mat3) -> Vec<String> {
    (0..3).flat_map(|i| (0..3).map(move |j| num(m[(i, j)]))).collect()
}

pub fn vector_cells(v: &crate::tensor::Vec3) -> Vec<String> {
    v.iter().map(|x| num(*x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn checks_report_the_worst_value() {
        let c = Check::all("x", &[1.0, 3.0, 2.0], Bound::AtMost(2.5));
        assert!(!c.passed && c.measured == Some(3.0));
        let c = Check::all("x", &[13.0, 19.0, 12.5], Bound::Within([12.0, 20.0]));
        assert!(c.passed);
        let c = Check::all("x", &[1.0, f64::NAN], Bound::AtMost(2.0));
        assert!(!c.passed && c.measured.is_none());
        assert!(!Check::all("x", &[], Bound::AtMost(1.0)).passed);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![num(1.5), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n1.5000000000000000e0,x\n");
    }
}
