//! Tableau output: aligned text in the figures' layout, and line records
//! that parse back to the same tableau.
//!
//! Text rows read `sources ⇒ step | cells | … | note`, numbers right-aligned
//! in their columns and trailing blanks trimmed. The structured form is one
//! tab-separated record per line:
//!
//! ```text
//! layout	dwyer
//! kind	fixed frac=4
//! columns	x1	x2	…
//! rules	0	4	5
//! row	<step>	<sources, comma-separated>	<label>	<note>	<cell>…
//! end
//! ```
//!
//! An absent step, label or note is an empty field; a present label or note
//! is written with a leading `=`. Cells are empty, `v:<value>`, `t:<text>`
//! or `s:<value>:<name>`. Tabs, newlines and backslashes in text are escaped
//! as `\t`, `\n` and `\\`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::compact::{Cell, Layout, Tableau, TableauRow};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Text,
    Structured,
}

impl FromStr for Style {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Style::Text),
            "structured" => Ok(Style::Structured),
            other => Err(Error::InvalidArgument(format!("unknown style {other:?}"))),
        }
    }
}

pub fn render_tableau(t: &Tableau, style: Style) -> String {
    match style {
        Style::Text => render_text(t),
        Style::Structured => render_structured(t),
    }
}

/// `5, 2 ⇒ 6`, `6`, or the row label.
pub fn row_prefix(row: &TableauRow) -> String {
    match (row.step, row.sources.is_empty(), &row.label) {
        (Some(step), false, _) => {
            let sources: Vec<String> = row.sources.iter().map(usize::to_string).collect();
            format!("{} \u{21d2} {step}", sources.join(", "))
        }
        (Some(step), true, _) => step.to_string(),
        (None, _, Some(label)) => label.clone(),
        (None, _, None) => String::new(),
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad_left(s: &str, w: usize) -> String {
    format!("{}{s}", " ".repeat(w.saturating_sub(width(s))))
}

fn text_line(prefix: &str, prefix_width: usize, cells: &[String], widths: &[usize], rules: &[usize], note: Option<&str>) -> String {
    let mut line = pad_left(prefix, prefix_width);
    for (j, cell) in cells.iter().enumerate() {
        line.push_str(if rules.contains(&j) { " | " } else { " " });
        line.push_str(&pad_left(cell, widths[j]));
    }
    if rules.contains(&cells.len()) {
        line.push_str(" |");
    }
    if let Some(note) = note {
        line.push(' ');
        line.push_str(note);
    }
    line.trim_end().to_string()
}

fn render_text(t: &Tableau) -> String {
    let rows: Vec<(String, Vec<String>)> = t
        .rows
        .iter()
        .map(|r| (row_prefix(r), r.cells.iter().map(Cell::render).collect()))
        .collect();
    let mut widths: Vec<usize> = t.columns.iter().map(|c| width(c)).collect();
    for (_, cells) in &rows {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(width(c));
        }
    }
    let prefix_width = rows.iter().map(|(p, _)| width(p)).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(t.layout.title());
    out.push('\n');
    out.push_str(&text_line("", prefix_width, &t.columns, &widths, &t.rules, None));
    out.push('\n');
    for ((prefix, cells), row) in rows.iter().zip(&t.rows) {
        out.push_str(&text_line(prefix, prefix_width, cells, &widths, &t.rules, row.note.as_deref()));
        out.push('\n');
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            other => return Err(Error::InvalidArgument(format!("bad escape \\{}", other.unwrap_or(' ')))),
        }
    }
    Ok(out)
}

fn optional(v: &Option<String>) -> String {
    v.as_ref().map_or(String::new(), |s| format!("={}", escape(s)))
}

fn render_structured(t: &Tableau) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "layout\t{}", t.layout.tag());
    let _ = writeln!(out, "kind\t{}", t.kind);
    let _ = writeln!(out, "columns\t{}", t.columns.iter().map(|c| escape(c)).collect::<Vec<_>>().join("\t"));
    let rules: Vec<String> = t.rules.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "rules\t{}", rules.join("\t"));
    for row in &t.rows {
        let sources: Vec<String> = row.sources.iter().map(usize::to_string).collect();
        let mut fields = vec![
            "row".to_string(),
            row.step.map_or(String::new(), |s| s.to_string()),
            sources.join(","),
            optional(&row.label),
            optional(&row.note),
        ];
        for cell in &row.cells {
            fields.push(match cell {
                Cell::Empty => String::new(),
                Cell::Value(v) => format!("v:{}", v.render_plain()),
                Cell::Text(s) => format!("t:{}", escape(s)),
                Cell::Sum(name, v) => format!("s:{}:{}", v.render_plain(), escape(name)),
            });
        }
        let _ = writeln!(out, "{}", fields.join("\t"));
    }
    out.push_str("end\n");
    out
}

fn record_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads the structured form back.
pub fn parse_structured(text: &str) -> Result<Tableau> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut field = |key: &str| -> Result<(usize, Vec<String>)> {
        let (n, line) = lines.next().ok_or_else(|| record_err(0, format!("missing `{key}` record")))?;
        let mut parts = line.split('\t');
        if parts.next() != Some(key) {
            return Err(record_err(n, format!("expected `{key}` record")));
        }
        Ok((n, parts.map(str::to_string).collect()))
    };
    let (n, layout) = field("layout")?;
    let layout: Layout = layout.first().ok_or_else(|| record_err(n, "empty layout"))?.parse()?;
    let (n, kind) = field("kind")?;
    let kind: ScalarKind = kind.first().ok_or_else(|| record_err(n, "empty kind"))?.parse()?;
    let (_, columns) = field("columns")?;
    let columns = columns.iter().map(|c| unescape(c)).collect::<Result<Vec<_>>>()?;
    let (n, rules) = field("rules")?;
    let rules = rules
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.parse::<usize>().map_err(|_| record_err(n, format!("bad rule {r:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tableau::new(layout, kind, columns, rules);
    let mut ended = false;
    for (n, line) in text.lines().enumerate().skip(4).map(|(i, l)| (i + 1, l)) {
        if line == "end" {
            ended = true;
            break;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 5 + t.columns.len() || parts[0] != "row" {
            return Err(record_err(n, "malformed row record"));
        }
        let step = if parts[1].is_empty() {
            None
        } else {
            Some(parts[1].parse().map_err(|_| record_err(n, "bad step"))?)
        };
        let sources = if parts[2].is_empty() {
            Vec::new()
        } else {
            parts[2]
                .split(',')
                .map(|s| s.parse().map_err(|_| record_err(n, "bad source")))
                .collect::<Result<Vec<usize>>>()?
        };
        let opt = |s: &str| -> Result<Option<String>> {
            match s.strip_prefix('=') {
                Some(rest) => Ok(Some(unescape(rest)?)),
                None if s.is_empty() => Ok(None),
                None => Err(record_err(n, "label and note fields start with `=`")),
            }
        };
        let cells = parts[5..]
            .iter()
            .map(|c| -> Result<Cell> {
                if c.is_empty() {
                    return Ok(Cell::Empty);
                }
                if let Some(v) = c.strip_prefix("v:") {
                    return Ok(Cell::Value(Scalar::parse(v, kind)?));
                }
                if let Some(s) = c.strip_prefix("t:") {
                    return Ok(Cell::Text(unescape(s)?));
                }
                if let Some(rest) = c.strip_prefix("s:") {
                    let (v, name) = rest.split_once(':').ok_or_else(|| record_err(n, "bad sum cell"))?;
                    return Ok(Cell::Sum(unescape(name)?, Scalar::parse(v, kind)?));
                }
                Err(record_err(n, format!("bad cell {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        t.rows.push(TableauRow {
            step,
            sources,
            note: opt(parts[4])?,
            label: opt(parts[3])?,
            cells,
        });
    }
    if !ended {
        return Err(record_err(0, "missing `end` record"));
    }
    Ok(t)
}

/// Collapses runs of whitespace and trims each line, for comparisons that
/// ignore alignment.
pub fn normalize_whitespace(text: &str) -> String {
    text.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact::dwyer_single_division;
    use crate::matrix::Matrix;
    use crate::scalar::PrecisionSpec;

    fn dwyer_tableau() -> Tableau {
        let kind = ScalarKind::Fixed(PrecisionSpec::fractional(4).unwrap());
        let rows = [
            ["1", ".4", ".5", ".6", ".2"],
            [".4", "1", ".3", ".4", ".4"],
            [".5", ".3", "1", ".2", ".6"],
            [".6", ".4", ".2", "1", ".8"],
        ];
        let m = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| Scalar::parse(s, kind).unwrap()).collect())
                .collect(),
        )
        .unwrap();
        let (a, b) = m.split_last_column();
        dwyer_single_division(&a, &b).unwrap().tableau
    }

    #[test]
    fn dwyer_row_twelve() {
        let text = normalize_whitespace(&render_tableau(&dwyer_tableau(), Style::Text));
        assert!(text.contains("12 | 1.0000 \u{2212}.1612 | .6258"));
        assert!(text.contains("10 \u{21d2} 12 | 1.0000 \u{2212}.1612 | .6258 | elimination, part 3"));
    }

    #[test]
    fn empty_tableau_is_header_only() {
        let t = Tableau::new(Layout::Crout, ScalarKind::Exact, vec!["x".into(), "r.h.s.".into()], vec![1]);
        assert_eq!(render_tableau(&t, Style::Text), "Crout's table\n x | r.h.s.\n");
    }

    #[test]
    fn structured_round_trip() {
        let t = dwyer_tableau();
        let s = render_tableau(&t, Style::Structured);
        let back = parse_structured(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(render_tableau(&back, Style::Structured), s);
    }

    #[test]
    fn odd_text_round_trips() {
        let mut t = Tableau::new(Layout::DoolittleD, ScalarKind::Exact, vec!["a\tb".into()], vec![]);
        t.push(TableauRow::new(vec![Cell::Sum("w".into(), Scalar::exact(-3, 7))]).label("back\\slash").note("x\ny"));
        t.push(TableauRow::new(vec![Cell::Text("w =".into())]).step(3).sources(vec![1, 2]));
        t.push(TableauRow::new(vec![Cell::Empty]));
        let back = parse_structured(&render_tableau(&t, Style::Structured)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn deterministic() {
        let t = dwyer_tableau();
        assert_eq!(render_tableau(&t, Style::Text), render_tableau(&t, Style::Text));
    }
}
