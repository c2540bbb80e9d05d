//! Plain-text rendering of a [`Summary`], and the inverse parser.
//!
//! Layout:
//!
//! ```text
//! # thm1 config_hash=... seed=7 generator=...
//! n  quasinorm  argmax_lambda
//! 10 1.234000e1 5.000000e-1
//! check max/min quasinorm 1.06e0 <= 1.5e0 PASS
//! verdict PASS bounded in N
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so parsing a
//! rendered table and rendering again is byte-stable.

use crate::experiment::{Check, Row, Summary};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReportError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

fn malformed(line: usize, reason: impl Into<String>) -> ReportError {
    ReportError::Malformed {
        line,
        reason: reason.into(),
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

fn parse_value(s: &str, line: usize) -> Result<f64, ReportError> {
    if s == "nan" {
        return Ok(f64::NAN);
    }
    s.parse().map_err(|_| malformed(line, format!("bad number {s:?}")))
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Renders the table. Column names must not contain whitespace.
pub fn render(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} config_hash={} seed={} generator={}",
        s.experiment,
        s.config_hash,
        s.seed,
        s.generator.replace(' ', "_")
    );
    let mut header = vec!["n".to_string()];
    header.extend(s.columns.iter().cloned());
    let body: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.n.to_string()];
            cells.extend(r.values.iter().map(|&v| fmt_value(v)));
            cells
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            body.iter()
                .filter_map(|c| c.get(i))
                .map(String::len)
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    for cells in std::iter::once(&header).chain(&body) {
        let line: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join(" ").trim_end());
    }
    for c in &s.checks {
        let _ = writeln!(
            out,
            "check {} {} {} {} {}",
            c.name.replace(' ', "_"),
            fmt_value(c.value),
            c.relation,
            fmt_value(c.threshold),
            pass_word(c.pass)
        );
    }
    let _ = writeln!(out, "verdict {} {}", pass_word(s.pass), s.verdict);
    out
}

fn key<'a>(field: &'a str, name: &str, line: usize) -> Result<&'a str, ReportError> {
    field
        .strip_prefix(name)
        .and_then(|f| f.strip_prefix('='))
        .ok_or_else(|| malformed(line, format!("expected {name}=")))
}

/// Parses the output of [`render`]. Underscores stand in for spaces in check
/// names and the generator description.
pub fn parse(text: &str) -> Result<Summary, ReportError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, title) = lines.next().ok_or_else(|| malformed(1, "empty report"))?;
    let fields: Vec<&str> = title
        .strip_prefix("# ")
        .ok_or_else(|| malformed(ln, "missing title"))?
        .split_whitespace()
        .collect();
    if fields.len() != 4 {
        return Err(malformed(ln, "title needs four fields"));
    }
    let experiment = fields[0].to_string();
    let config_hash = key(fields[1], "config_hash", ln)?.to_string();
    let seed = key(fields[2], "seed", ln)?
        .parse()
        .map_err(|_| malformed(ln, "bad seed"))?;
    let generator = key(fields[3], "generator", ln)?.replace('_', " ");

    let (ln, header) = lines.next().ok_or_else(|| malformed(ln + 1, "missing header"))?;
    let mut columns: Vec<String> = header.split_whitespace().map(String::from).collect();
    if columns.first().map(String::as_str) != Some("n") {
        return Err(malformed(ln, "header must start with n"));
    }
    columns.remove(0);

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (ln, line) in lines {
        let cells: Vec<&str> = line.split_whitespace().collect();
        match cells.first() {
            None => continue,
            Some(&"check") => {
                if cells.len() != 6 {
                    return Err(malformed(ln, "check needs five fields"));
                }
                checks.push(Check {
                    name: cells[1].replace('_', " "),
                    value: parse_value(cells[2], ln)?,
                    relation: cells[3].to_string(),
                    threshold: parse_value(cells[4], ln)?,
                    pass: cells[5] == "PASS",
                });
            }
            Some(&"verdict") => {
                let rest = line.strip_prefix("verdict ").unwrap_or("");
                let (word, verdict) = rest.split_once(' ').unwrap_or((rest, ""));
                return Ok(Summary {
                    experiment,
                    config_hash,
                    seed,
                    generator,
                    columns,
                    rows,
                    checks,
                    verdict: verdict.to_string(),
                    pass: word == "PASS",
                });
            }
            Some(n) => {
                if cells.len() != columns.len() + 1 {
                    return Err(malformed(ln, "row width differs from header"));
                }
                let n = n.parse().map_err(|_| malformed(ln, "bad n"))?;
                let values = cells[1..]
                    .iter()
                    .map(|c| parse_value(c, ln))
                    .collect::<Result<_, _>>()?;
                rows.push(Row { n, values });
            }
        }
    }
    Err(malformed(text.lines().count(), "missing verdict"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Summary {
        Summary {
            experiment: "thm1".into(),
            config_hash: "ab12".into(),
            seed: 7,
            generator: "geometric c=1 delta=0.5".into(),
            columns: vec!["quasinorm".into(), "jensen_gap".into()],
            rows: vec![
                Row {
                    n: 10,
                    values: vec![14.893_1, f64::NAN],
                },
                Row {
                    n: 1000,
                    values: vec![1.0 / 3.0, 2.5e-17],
                },
            ],
            checks: vec![Check {
                name: "max/min quasinorm".into(),
                value: 1.062,
                relation: "<=".into(),
                threshold: 1.5,
                pass: true,
            }],
            verdict: "bounded in N".into(),
            pass: true,
        }
    }

    #[test]
    fn render_parse_render_is_stable() {
        let text = render(&sample());
        let back = parse(&text).unwrap();
        assert_eq!(render(&back), text);
        assert_eq!(back.rows[1].values[0], 1.0 / 3.0);
        assert!(back.rows[0].values[1].is_nan());
        assert_eq!(back.checks, sample().checks);
    }

    #[test]
    fn empty_summary_is_header_only() {
        let s = Summary {
            columns: vec![],
            rows: vec![],
            checks: vec![],
            ..sample()
        };
        let text = render(&s);
        assert_eq!(text.lines().nth(1), Some("n"));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(parse(&text).unwrap(), s);
    }

    #[test]
    fn ragged_row_is_rejected() {
        let text = render(&sample()).replace("1000 ", "1000 1.0 ");
        assert!(matches!(parse(&text), Err(ReportError::Malformed { line: 4, .. })));
    }
}
