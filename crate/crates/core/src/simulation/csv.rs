//! Tabular output of the experiments.

use std::fs;
use std::io;
use std::path::Path;

/// Medians of every method at one index (K or hypothesis id).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub index: usize,
    /// One value per method, in the order of [`Series::methods`].
    pub values: Vec<f64>,
}

/// A table of [`SeriesResult`] rows with named method columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    methods: Vec<String>,
    rows: Vec<SeriesResult>,
}

impl Series {
    pub(crate) fn new(methods: Vec<String>, rows: Vec<(usize, Vec<f64>)>) -> Self {
        Series {
            methods,
            rows: rows
                .into_iter()
                .map(|(index, values)| SeriesResult { index, values })
                .collect(),
        }
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn rows(&self) -> &[SeriesResult] {
        &self.rows
    }

    /// All values of one method, in row order.
    pub fn column(&self, method: &str) -> Option<Vec<f64>> {
        let at = self.methods.iter().position(|m| m == method)?;
        Some(self.rows.iter().map(|r| r.values[at]).collect())
    }

    /// CSV text: header `index,<method>...`, values with 6 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index");
        for m in &self.methods {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.index.to_string());
            for &v in &row.values {
                out.push(',');
                out.push_str(&format_significant(v));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_csv())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Six significant digits in the style of C's `%g`: fixed notation for
/// decimal exponents in [−5, 6), scientific otherwise, trailing zeros
/// removed.
pub fn format_significant(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(1.0), "1");
        assert_eq!(format_significant(2.25), "2.25");
        assert_eq!(format_significant(21.714724), "21.7147");
        assert_eq!(format_significant(123456.7), "123457");
        assert_eq!(format_significant(1234567.0), "1.23457e+06");
        assert_eq!(format_significant(9.999996), "10");
        assert_eq!(format_significant(999999.7), "1e+06");
        assert_eq!(format_significant(0.0001234567), "0.000123457");
        assert_eq!(format_significant(1.5e-7), "1.5e-07");
        assert_eq!(format_significant(-2.5), "-2.5");
        assert_eq!(format_significant(f64::INFINITY), "inf");
        assert_eq!(format_significant(5.2e40), "5.2e+40");
    }

    #[test]
    fn csv_layout() {
        let s = Series::new(
            vec!["a".into(), "b".into()],
            vec![(1, vec![1.0, 0.5]), (2, vec![2.0, 1e10])],
        );
        assert_eq!(s.to_csv(), "index,a,b\n1,1,0.5\n2,2,1e+10\n");
        assert_eq!(s.column("b"), Some(vec![0.5, 1e10]));
        assert_eq!(s.column("c"), None);
    }
}
