//! Minimal CSV: header row, comma separated, LF endings, reals with 17
//! significant digits.

use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Cell {
    Real(f64),
    Int(usize),
    Text(&'static str),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

pub struct Table {
    header: Vec<&'static str>,
    text: String,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            header: header.to_vec(),
            text,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match *cell {
                // adding 0.0 turns −0 into +0
                Cell::Real(v) => write!(self.text, "{:.16e}", v + 0.0).unwrap(),
                Cell::Int(v) => write!(self.text, "{v}").unwrap(),
                Cell::Text(s) => self.text.push_str(s),
                Cell::Empty => {}
            }
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
