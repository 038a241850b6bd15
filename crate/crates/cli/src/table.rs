use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// How a column is written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    /// Stored as a power ratio, written as `10 log10`.
    Decibel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub scale: Scale,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column { name: name.into(), unit: unit.into(), scale: Scale::Linear }
    }

    pub fn db(name: &str) -> Self {
        Column { name: name.into(), unit: "dB".into(), scale: Scale::Decibel }
    }

    pub fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{}[{}]", self.name, self.unit)
        }
    }
}

/// A failure at one grid point; the row is kept with NaN values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridError {
    pub point: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Scalar results such as fitted exponents.
    pub extras: BTreeMap<String, Value>,
    pub errors: Vec<GridError>,
}

impl ResultTable {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        ResultTable { name: name.into(), columns, rows: vec![], extras: BTreeMap::new(), errors: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table `{}`", self.name);
        self.rows.push(row);
    }

    pub fn extra(&mut self, key: &str, value: impl Into<Value>) {
        self.extras.insert(key.into(), value.into());
    }

    pub fn is_partial(&self) -> bool {
        !self.errors.is_empty()
    }

    /// Values as written, with decibel columns converted.
    pub fn emitted_row(&self, k: usize) -> Vec<f64> {
        self.rows[k]
            .iter()
            .zip(&self.columns)
            .map(|(&v, col)| match col.scale {
                Scale::Linear => v,
                Scale::Decibel => 10.0 * v.log10(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decibel_columns_convert_on_emission() {
        let mut t = ResultTable::new("t", vec![Column::new("n", ""), Column::db("gain")]);
        t.push(vec![3.0, 100.0]);
        assert_eq!(t.emitted_row(0), vec![3.0, 20.0]);
        assert_eq!(t.rows[0][1], 100.0);
        assert_eq!(t.columns[1].header(), "gain[dB]");
        assert_eq!(t.columns[0].header(), "n");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_refused() {
        let mut t = ResultTable::new("t", vec![Column::new("a", "")]);
        t.push(vec![1.0, 2.0]);
    }
}
