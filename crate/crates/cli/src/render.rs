//! Stable table renderings: markdown mirroring the printed layout, flat CSV,
//! and canonical key-sorted JSON. Identical flags produce identical bytes.

use fano72_core::arith::Rational;
use fano72_core::basket::IndexMultiset;
use fano72_core::pipeline::{Certificate, Table1Row, Table2Entry, Table5Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

pub fn render_table(cert: &Certificate, which: u8, format: Format) -> String {
    match (which, format) {
        (1, Format::Markdown) => table1_markdown(&cert.table1),
        (1, Format::Csv) => table1_csv(&cert.table1),
        (2, Format::Markdown) => table2_markdown(&cert.table2),
        (2, Format::Csv) => table2_csv(&cert.table2),
        (3, Format::Markdown) => table3_markdown(cert),
        (3, Format::Csv) => table3_csv(cert),
        (4, Format::Markdown) => table4_markdown(cert),
        (4, Format::Csv) => table4_csv(cert),
        (5, Format::Markdown) => table5_markdown(cert.table5()),
        (5, Format::Csv) => table5_csv(cert.table5()),
        (which, Format::Json) => table_json(cert, which),
        _ => unreachable!("selector validated by the CLI"),
    }
}

fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let format_row = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, cell)| format!("{:<width$}", cell, width = widths[i]))
            .collect();
        format!("| {} |", padded.join(" | "))
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let separator: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let mut out = String::new();
    out.push_str(&format_row(&header_cells));
    out.push('\n');
    out.push_str(&format_row(&separator));
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    out
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("csv header");
    for row in rows {
        writer.write_record(row).expect("csv row");
    }
    String::from_utf8(writer.into_inner().expect("csv buffer")).expect("csv utf8")
}

fn join_u64(values: &[u64], separator: &str) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(separator)
}

/// Kept and crossed J values merged ascending, crossed ones struck through.
fn ja_cell(kept: &[u64], crossed: &[u64]) -> String {
    let mut all: Vec<(u64, bool)> = kept
        .iter()
        .map(|&j| (j, false))
        .chain(crossed.iter().map(|&j| (j, true)))
        .collect();
    all.sort_unstable();
    all.iter()
        .map(|&(j, is_crossed)| {
            if is_crossed {
                format!("~~{j}~~")
            } else {
                j.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn bound_cell(budget: Rational, crossed_nonempty: bool) -> String {
    if crossed_nonempty {
        budget.decimal_or_fraction()
    } else {
        String::new()
    }
}

fn table1_markdown(rows: &[Table1Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let candidates = if row.candidates.is_empty() {
                "NO".to_string()
            } else {
                join_u64(&row.candidates, ", ")
            };
            let bound = match row.j1_budget_max {
                Some(b) if row.candidates.len() > 1 => format!("<= {}", b.decimal_or_fraction()),
                Some(b) => b.decimal_or_fraction(),
                None => String::new(),
            };
            vec![
                row.r.to_string(),
                row.r_x.to_string(),
                row.rx_c2c1.to_string(),
                candidates,
                bound,
            ]
        })
        .collect();
    markdown_table(
        &["R_X", "r_X", "r_X c2c1", "r_X c1^3", "r_X c2c1 - r_X c1^3/4"],
        &body,
    )
}

fn table1_csv(rows: &[Table1Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                row.r.to_string(),
                row.r_x.to_string(),
                row.rx_c2c1.to_string(),
                join_u64(&row.candidates, ";"),
                row.j1_budget_max.map(|b| b.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    csv_string(&["r", "rx", "rx_c2c1", "candidates", "j1_budget_max"], &body)
}

type Table2Group = (IndexMultiset, u64, u64, u64, Vec<u64>);

fn group_table2(entries: &[Table2Entry]) -> Vec<Table2Group> {
    let mut grouped: Vec<Table2Group> = Vec::new();
    for entry in entries {
        match grouped.last_mut() {
            Some(last) if last.0 == entry.r && last.3 == entry.n => last.4.push(entry.q),
            _ => grouped.push((
                entry.r.clone(),
                entry.r_x,
                entry.rx_c2c1,
                entry.n,
                vec![entry.q],
            )),
        }
    }
    grouped
}

fn table2_markdown(entries: &[Table2Entry]) -> String {
    let body: Vec<Vec<String>> = group_table2(entries)
        .iter()
        .map(|(r, r_x, c, n, qs)| {
            vec![
                r.to_string(),
                r_x.to_string(),
                c.to_string(),
                n.to_string(),
                join_u64(qs, ", "),
            ]
        })
        .collect();
    markdown_table(&["R_X", "r_X", "r_X c2c1", "r_X c1^3", "q"], &body)
}

fn table2_csv(entries: &[Table2Entry]) -> String {
    let body: Vec<Vec<String>> = entries
        .iter()
        .map(|e| {
            vec![
                e.r.to_string(),
                e.r_x.to_string(),
                e.rx_c2c1.to_string(),
                e.n.to_string(),
                e.q.to_string(),
            ]
        })
        .collect();
    csv_string(&["r", "rx", "rx_c2c1", "n", "q"], &body)
}

fn table3_markdown(cert: &Certificate) -> String {
    let body: Vec<Vec<String>> = cert
        .table3
        .iter()
        .map(|row| {
            vec![
                row.r.to_string(),
                row.r_x.to_string(),
                row.rx_c2c1.to_string(),
                format!("{}={}", row.n, row.n_factorization),
                row.m.to_string(),
                ja_cell(&row.kept, &row.crossed),
                bound_cell(row.j1_budget, !row.crossed.is_empty()),
            ]
        })
        .collect();
    markdown_table(
        &[
            "R_X",
            "r_X",
            "r_X c2c1",
            "r_X c1^3",
            "q/J_A",
            "J_A",
            "r_X c2c1 - r_X c1^3/4",
        ],
        &body,
    )
}

fn table3_csv(cert: &Certificate) -> String {
    let body: Vec<Vec<String>> = cert
        .table3
        .iter()
        .map(|row| {
            vec![
                row.r.to_string(),
                row.r_x.to_string(),
                row.rx_c2c1.to_string(),
                row.n.to_string(),
                row.n_factorization.clone(),
                row.m.to_string(),
                join_u64(&row.kept, ";"),
                join_u64(&row.crossed, ";"),
                row.j1_budget.to_string(),
            ]
        })
        .collect();
    csv_string(
        &[
            "r",
            "rx",
            "rx_c2c1",
            "n",
            "factorization",
            "m",
            "kept",
            "crossed",
            "j1_budget",
        ],
        &body,
    )
}

fn table4_markdown(cert: &Certificate) -> String {
    let body: Vec<Vec<String>> = cert
        .table4
        .iter()
        .map(|row| {
            let pairs: Vec<String> = row
                .pairs
                .iter()
                .map(|p| format!("({}, {})", p.q, p.ja))
                .collect();
            vec![
                row.r.to_string(),
                row.r_x.to_string(),
                row.rx_c2c1.to_string(),
                row.n.to_string(),
                pairs.join(", "),
            ]
        })
        .collect();
    markdown_table(&["R_X", "r_X", "r_X c2c1", "r_X c1^3", "(q, J_A)"], &body)
}

fn table4_csv(cert: &Certificate) -> String {
    let body: Vec<Vec<String>> = cert
        .table4
        .iter()
        .flat_map(|row| {
            row.pairs.iter().map(move |p| {
                vec![
                    row.r.to_string(),
                    row.r_x.to_string(),
                    row.rx_c2c1.to_string(),
                    row.n.to_string(),
                    p.q.to_string(),
                    p.ja.to_string(),
                ]
            })
        })
        .collect();
    csv_string(&["r", "rx", "rx_c2c1", "n", "q", "ja"], &body)
}

fn table5_markdown(rows: &[Table5Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                format!("{}={}", row.c1_cubed, row.factorization),
                row.m.to_string(),
                ja_cell(&row.kept, &row.crossed),
                bound_cell(row.j1_budget, !row.crossed.is_empty()),
            ]
        })
        .collect();
    let mut out = markdown_table(&["c1^3", "q/J_A", "J_A", "c2c1 - c1^3/4"], &body);
    for row in rows {
        if let Some(note) = &row.divergence {
            out.push_str(&format!("note (c1^3={}, m={}): {note}\n", row.c1_cubed, row.m));
        }
    }
    out
}

fn table5_csv(rows: &[Table5Row]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                row.c1_cubed.to_string(),
                row.factorization.clone(),
                row.m.to_string(),
                join_u64(&row.kept, ";"),
                join_u64(&row.crossed, ";"),
                row.j1_budget.to_string(),
                row.divergence.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_string(
        &[
            "c1_cubed",
            "factorization",
            "m",
            "kept",
            "crossed",
            "j1_budget",
            "divergence",
        ],
        &body,
    )
}

fn table_json(cert: &Certificate, which: u8) -> String {
    let rows = match which {
        1 => serde_json::to_value(&cert.table1),
        2 => serde_json::to_value(&cert.table2),
        3 => serde_json::to_value(&cert.table3),
        4 => serde_json::to_value(&cert.table4),
        5 => serde_json::to_value(cert.table5()),
        _ => unreachable!("selector validated by the CLI"),
    }
    .expect("table rows serialize");
    let value = serde_json::json!({
        "mode": cert.mode,
        "table": which,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("value prints");
    text.push('\n');
    text
}
