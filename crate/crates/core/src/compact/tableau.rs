//! Labelled tables of intermediate values in the layouts of the historical
//! hand computers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    DoolittleA,
    DoolittleB,
    DoolittleC,
    DoolittleD,
    DoolittleE,
    DoolittleF,
    Benoit,
    Crout,
    Dwyer,
}

impl Layout {
    pub const ALL: [Layout; 9] = [
        Layout::DoolittleA,
        Layout::DoolittleB,
        Layout::DoolittleC,
        Layout::DoolittleD,
        Layout::DoolittleE,
        Layout::DoolittleF,
        Layout::Benoit,
        Layout::Crout,
        Layout::Dwyer,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Layout::DoolittleA => "doolittle-A",
            Layout::DoolittleB => "doolittle-B",
            Layout::DoolittleC => "doolittle-C",
            Layout::DoolittleD => "doolittle-D",
            Layout::DoolittleE => "doolittle-E",
            Layout::DoolittleF => "doolittle-F",
            Layout::Benoit => "benoit",
            Layout::Crout => "crout",
            Layout::Dwyer => "dwyer",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Layout::DoolittleA => "Table A",
            Layout::DoolittleB => "Table B",
            Layout::DoolittleC => "Table C",
            Layout::DoolittleD => "Table D",
            Layout::DoolittleE => "Table E",
            Layout::DoolittleF => "Table F",
            Layout::Benoit => "Cholesky's method, Benoit's table",
            Layout::Crout => "Crout's table",
            Layout::Dwyer => "method of single division",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Layout::ALL
            .into_iter()
            .find(|l| l.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown layout {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Value(Scalar),
    /// Fixed text such as `w =`.
    Text(String),
    /// A column sum that yields the named unknown.
    Sum(String, Scalar),
}

impl Cell {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Cell::Value(v) | Cell::Sum(_, v) => Some(v),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Cell::Empty)
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Value(v) => v.render_table(),
            Cell::Text(t) => t.clone(),
            Cell::Sum(name, v) => format!("{name}={}", v.render_table()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauRow {
    /// Order in which the row was formed.
    pub step: Option<usize>,
    /// Step numbers of the rows it was formed from.
    pub sources: Vec<usize>,
    /// Section heading attached to the row.
    pub note: Option<String>,
    /// Row label where there is no step number (e.g. `y`, or a row index).
    pub label: Option<String>,
    pub cells: Vec<Cell>,
}

impl TableauRow {
    pub fn new(cells: Vec<Cell>) -> Self {
        Self {
            step: None,
            sources: Vec::new(),
            note: None,
            label: None,
            cells,
        }
    }

    pub fn step(mut self, step: usize) -> Self {
        self.step = Some(step);
        self
    }

    pub fn sources(mut self, sources: Vec<usize>) -> Self {
        self.sources = sources;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Values of the non-empty numeric cells, left to right.
    pub fn values(&self) -> Vec<&Scalar> {
        self.cells.iter().filter_map(Cell::value).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub layout: Layout,
    pub kind: ScalarKind,
    pub columns: Vec<String>,
    /// Column positions (0..=columns.len()) preceded by a vertical rule.
    pub rules: Vec<usize>,
    pub rows: Vec<TableauRow>,
}

impl Tableau {
    pub fn new(layout: Layout, kind: ScalarKind, columns: Vec<String>, rules: Vec<usize>) -> Self {
        Self {
            layout,
            kind,
            columns,
            rules,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: TableauRow) {
        debug_assert_eq!(row.cells.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn by_step(&self, step: usize) -> Option<&TableauRow> {
        self.rows.iter().find(|r| r.step == Some(step))
    }

    /// Step numbers strictly increase and every source names an earlier
    /// step.
    pub fn check_numbering(&self) -> Result<()> {
        let mut last = 0;
        for row in &self.rows {
            if let Some(s) = row.step {
                if s <= last {
                    return Err(Error::InvalidStep(format!("step {s} follows step {last}")));
                }
                last = s;
                if let Some(&bad) = row.sources.iter().find(|&&src| src >= s) {
                    return Err(Error::InvalidStep(format!("step {s} cites later step {bad}")));
                }
            }
        }
        Ok(())
    }
}
