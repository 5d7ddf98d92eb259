//! Number rendering and the table/CSV writers.

use serde_json::Value;

/// Round to 9 significant digits.
pub fn round9(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

/// JSON number at 9 significant digits; `+∞` becomes the string "inf".
pub fn num(v: f64) -> Value {
    if v == f64::INFINITY {
        Value::from("inf")
    } else if v == f64::NEG_INFINITY {
        Value::from("-inf")
    } else if v.is_nan() {
        Value::Null
    } else {
        Value::from(round9(v))
    }
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

pub fn text(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{}", round9(v))
    }
}

pub fn join_nums(vs: &[f64], sep: &str) -> String {
    vs.iter().map(|&v| text(v)).collect::<Vec<_>>().join(sep)
}

/// Rows for the CSV and table renderings.
#[derive(Debug, Clone, Default)]
pub struct Tabular {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Tabular {
    pub fn new(headers: &[&str]) -> Self {
        Tabular {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Two-column `field,value` listing.
    pub fn fields(pairs: Vec<(&str, String)>) -> Self {
        let mut t = Tabular::new(&["field", "value"]);
        for (k, v) in pairs {
            t.push(vec![k.to_string(), v]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| csv_cell(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{c:<w$}", w = widths[i]))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(text(1.0 - 0.65f64.sqrt()), "0.193774225");
        assert_eq!(text(0.35f64.sqrt()), "0.591607978");
        assert_eq!(text(f64::INFINITY), "inf");
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(text(-0.0), "0");
        assert_eq!(text(2.0), "2");
    }

    #[test]
    fn csv_quotes_cells_with_commas() {
        let mut t = Tabular::new(&["a", "b"]);
        t.push(vec!["1,2".into(), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n\"1,2\",x\n");
    }
}
