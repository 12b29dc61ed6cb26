use std::fmt::Write as _;

use super::MetricsReport;

pub const COLUMNS: [&str; 6] = ["Model", "MRR", "AMRI", "Hits@10", "Hits@5", "Hits@1"];

/// Plain-text grid with one row per report and columns
/// `Model | MRR | AMRI | Hits@10 | Hits@5 | Hits@1`.
pub fn render_table(reports: &[MetricsReport]) -> String {
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format!("{:.3}", r.mrr),
                format!("{:.3}", r.amri),
                format!("{:.3}", r.hits_at(10)),
                format!("{:.3}", r.hits_at(5)),
                format!("{:.3}", r.hits_at(1)),
            ]
        })
        .collect();
    grid(&COLUMNS.map(String::from), &rows)
}

/// Left-aligned first column, right-aligned others, ` | ` separators.
pub(crate) fn grid(header: &[String; 6], rows: &[[String; 6]]) -> String {
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String; 6]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let mut out = String::new();
    writeln!(out, "{}", line(header)).expect("write to string");
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    writeln!(out, "{}", rule.join("-|-")).expect("write to string");
    for row in rows {
        writeln!(out, "{}", line(row)).expect("write to string");
    }
    out
}
