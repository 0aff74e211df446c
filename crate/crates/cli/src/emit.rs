//! JSON, CSV and terminal-table rendering.

use serde::Serialize;

pub fn json<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn csv<T: Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Columns constant across all rows are printed once as `key: value` lines,
/// the rest as an aligned table. Columns named in `body` always stay in the
/// table when there is more than one row.
pub fn table<T: Serialize>(rows: &[T], body: &[&str]) -> anyhow::Result<String> {
    let text = csv(rows)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let records: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    if records.is_empty() {
        return Ok("(no rows)\n".to_string());
    }
    let constant: Vec<bool> = (0..headers.len())
        .map(|c| {
            records.len() == 1
                || (!body.contains(&headers[c].as_str()) && records.iter().all(|r| r[c] == records[0][c]))
        })
        .collect();

    let mut out = String::new();
    let key_width = headers.iter().map(String::len).max().unwrap_or(0);
    for (c, h) in headers.iter().enumerate() {
        if constant[c] && !records[0][c].is_empty() {
            out.push_str(&format!("{h:<key_width$}  {}\n", records[0][c]));
        }
    }
    let varying: Vec<usize> = (0..headers.len()).filter(|&c| !constant[c]).collect();
    if varying.is_empty() {
        return Ok(out);
    }
    out.push('\n');
    let widths: Vec<usize> = varying
        .iter()
        .map(|&c| records.iter().map(|r| r[c].len()).chain([headers[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    out.push_str(&line(varying.iter().map(|&c| headers[c].as_str()).collect()));
    for r in &records {
        out.push_str(&line(varying.iter().map(|&c| r[c].as_str()).collect()));
    }
    Ok(out)
}
