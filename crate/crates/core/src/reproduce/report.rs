use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{RowStatus, TableRow};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

pub fn format_text(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let mut current = 0;
    for r in rows {
        if r.table != current {
            current = r.table;
            let _ = writeln!(out, "table {} ({}, {:?})", r.table, r.family, r.regime);
            let _ = writeln!(
                out,
                "  {:>8} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>9}",
                "param", "p", "q", "lower", "published", "upper", "published", "status"
            );
        }
        let _ = writeln!(
            out,
            "  {:>8} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>9}",
            r.param,
            r.p,
            r.q,
            opt(r.computed_lower),
            r.published_lower,
            opt(r.computed_upper),
            r.published_upper,
            r.status.name()
        );
        if let Some(p) = r.suggested_p {
            let _ = writeln!(out, "           lower reproduced at p = {p:.4}");
        }
        if let Some(q) = r.suggested_q {
            let _ = writeln!(out, "           upper reproduced at q = {q:.4}");
        }
        if let Some(x) = r.required_x {
            let _ = writeln!(out, "           lower needs X = {x:.4} (K = {:.4})", r.strength);
        }
        if let Some(n) = &r.note {
            let _ = writeln!(out, "           {n}");
        }
    }
    let matched = rows.iter().filter(|r| r.matches()).count();
    let _ = writeln!(out, "{matched}/{} rows reproduced", rows.len());
    out
}

#[derive(Serialize)]
struct CsvRow {
    table: usize,
    param: f64,
    p: f64,
    q: f64,
    computed_lower: Option<f64>,
    computed_upper: Option<f64>,
    paper_lower: f64,
    paper_upper: f64,
    delta_lower: Option<f64>,
    delta_upper: Option<f64>,
    status: &'static str,
}

pub fn format_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow {
            table: r.table,
            param: r.param,
            p: r.p,
            q: r.q,
            computed_lower: r.computed_lower,
            computed_upper: r.computed_upper,
            paper_lower: r.published_lower,
            paper_upper: r.published_upper,
            delta_lower: r.delta_lower,
            delta_upper: r.delta_upper,
            status: r.status.name(),
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErratumEntry {
    pub table: usize,
    pub param: f64,
    pub p: f64,
    pub q: f64,
    pub published_lower: f64,
    pub published_upper: f64,
    pub computed_lower: Option<f64>,
    pub computed_upper: Option<f64>,
    pub suggested_p: Option<f64>,
    pub suggested_q: Option<f64>,
    pub required_x: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Erratum {
    pub rows_checked: usize,
    pub rows_reproduced: usize,
    pub entries: Vec<ErratumEntry>,
}

/// Rows that did not reproduce, with the parameter values that would.
pub fn erratum(rows: &[TableRow]) -> Erratum {
    let entries = rows
        .iter()
        .filter(|r| r.status != RowStatus::Match)
        .map(|r| ErratumEntry {
            table: r.table,
            param: r.param,
            p: r.p,
            q: r.q,
            published_lower: r.published_lower,
            published_upper: r.published_upper,
            computed_lower: r.computed_lower,
            computed_upper: r.computed_upper,
            suggested_p: r.suggested_p,
            suggested_q: r.suggested_q,
            required_x: r.required_x,
            note: r.note.clone(),
        })
        .collect();
    Erratum {
        rows_checked: rows.len(),
        rows_reproduced: rows.iter().filter(|r| r.matches()).count(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::super::reproduce_table;
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let rows = reproduce_table(1, 5e-3).unwrap();
        let csv = format_csv(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "table,param,p,q,computed_lower,computed_upper,paper_lower,paper_upper,delta_lower,delta_upper,status"
        );
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn erratum_lists_mismatches() {
        let rows = reproduce_table(1, 5e-3).unwrap();
        let e = erratum(&rows);
        assert_eq!((e.rows_checked, e.rows_reproduced, e.entries.len()), (4, 3, 1));
        assert_eq!(e.entries[0].param, 0.94);
        assert!(format_text(&rows).contains("3/4 rows reproduced"));
    }
}
