//! Solver-independent sparse mixed-integer program.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    /// Amount by which `activity` violates `activity sense rhs`; zero if satisfied.
    pub fn violation(self, activity: f64, rhs: f64) -> f64 {
        match self {
            Sense::Le => (activity - rhs).max(0.0),
            Sense::Ge => (rhs - activity).max(0.0),
            Sense::Eq => (activity - rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub sense: Sense,
    pub rhs: f64,
    /// `(column, coefficient)` pairs, each column at most once.
    pub coefs: Vec<(usize, f64)>,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * values[j]).sum()
    }
}

/// Minimize `objective . x + objective_constant` subject to the rows and
/// column bounds; columns flagged `integer` must take integral values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseMip {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub objective_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    Row { row: usize, name: String, amount: f64 },
    Bound { column: usize, name: String, amount: f64 },
    Integrality { column: usize, name: String, value: f64 },
}

impl SparseMip {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_column(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
        objective: f64,
    ) -> usize {
        self.columns.push(Column {
            name: name.into(),
            lower,
            upper,
            integer,
            objective,
        });
        self.columns.len() - 1
    }

    /// Adds a row, merging repeated columns and dropping zero coefficients.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coefs: impl IntoIterator<Item = (usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for (j, a) in coefs {
            debug_assert!(j < self.columns.len(), "row references unknown column {j}");
            match merged.iter_mut().find(|(c, _)| *c == j) {
                Some(entry) => entry.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row {
            name: name.into(),
            sense,
            rhs,
            coefs: merged,
        });
        self.rows.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Non-zeros as `(row, column, coefficient)` triplets in row order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.coefs.iter().map(move |&(j, a)| (i, j, a)))
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant
            + self
                .columns
                .iter()
                .zip(values)
                .map(|(c, v)| c.objective * v)
                .sum::<f64>()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Row, bound and integrality violations above `tol` (absolute).
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let amount = row.sense.violation(row.activity(values), row.rhs);
            if amount > tol {
                out.push(Violation::Row {
                    row: i,
                    name: row.name.clone(),
                    amount,
                });
            }
        }
        for (j, (col, &v)) in self.columns.iter().zip(values).enumerate() {
            let amount = (col.lower - v).max(v - col.upper).max(0.0);
            if amount > tol {
                out.push(Violation::Bound {
                    column: j,
                    name: col.name.clone(),
                    amount,
                });
            }
            if col.integer && (v - v.round()).abs() > tol {
                out.push(Violation::Integrality {
                    column: j,
                    name: col.name.clone(),
                    value: v,
                });
            }
        }
        out
    }

    /// Checks structural invariants: finite data and valid column references.
    pub fn is_well_formed(&self) -> bool {
        let cols_ok = self.columns.iter().all(|c| {
            c.objective.is_finite() && !c.lower.is_nan() && !c.upper.is_nan() && c.lower <= c.upper
        });
        let rows_ok = self.rows.iter().all(|r| {
            r.rhs.is_finite()
                && r
                    .coefs
                    .iter()
                    .all(|&(j, a)| j < self.columns.len() && a.is_finite())
        });
        cols_ok && rows_ok && self.objective_constant.is_finite()
    }
}
