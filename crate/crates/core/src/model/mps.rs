//! Free-format MPS writer and reader.
//!
//! The objective row is `OBJ`; its RHS entry holds the negated objective
//! constant. Integer columns are bracketed by `INTORG`/`INTEND` markers and
//! every bound is written explicitly.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Row, Sense, SparseMip};

const OBJECTIVE_ROW: &str = "OBJ";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown row `{name}`")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: unknown column `{name}`")]
    UnknownColumn { line: usize, name: String },
    #[error("line {line}: section {section} is not supported")]
    Unsupported { line: usize, section: String },
    #[error("missing ENDATA")]
    MissingEnd,
}

/// Serializes `mip` as free-format MPS.
pub fn write_mps(mip: &SparseMip) -> String {
    let mut out = String::new();
    let name = if mip.name.is_empty() { "model" } else { &mip.name };
    writeln!(out, "NAME {name}").unwrap();
    out.push_str("ROWS\n");
    writeln!(out, " N  {OBJECTIVE_ROW}").unwrap();
    for row in &mip.rows {
        let tag = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(out, " {tag}  {}", row.name).unwrap();
    }

    let mut by_column: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mip.num_columns()];
    for (i, j, a) in mip.triplets() {
        by_column[j].push((i, a));
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut markers = 0;
    for (j, col) in mip.columns.iter().enumerate() {
        if col.integer != in_int {
            let tag = if col.integer { "INTORG" } else { "INTEND" };
            writeln!(out, "    MARKER{markers}  'MARKER'  '{tag}'").unwrap();
            markers += 1;
            in_int = col.integer;
        }
        let mut wrote = false;
        if col.objective != 0.0 {
            writeln!(out, "    {}  {OBJECTIVE_ROW}  {}", col.name, col.objective).unwrap();
            wrote = true;
        }
        for &(i, a) in &by_column[j] {
            writeln!(out, "    {}  {}  {}", col.name, mip.rows[i].name, a).unwrap();
            wrote = true;
        }
        if !wrote {
            writeln!(out, "    {}  {OBJECTIVE_ROW}  0", col.name).unwrap();
        }
    }
    if in_int {
        writeln!(out, "    MARKER{markers}  'MARKER'  'INTEND'").unwrap();
    }

    out.push_str("RHS\n");
    if mip.objective_constant != 0.0 {
        writeln!(out, "    RHS  {OBJECTIVE_ROW}  {}", -mip.objective_constant).unwrap();
    }
    for row in &mip.rows {
        if row.rhs != 0.0 {
            writeln!(out, "    RHS  {}  {}", row.name, row.rhs).unwrap();
        }
    }

    out.push_str("BOUNDS\n");
    for col in &mip.columns {
        let (lo, up) = (col.lower, col.upper);
        if lo == up {
            writeln!(out, " FX BND  {}  {}", col.name, lo).unwrap();
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            writeln!(out, " FR BND  {}", col.name).unwrap();
            continue;
        }
        if lo == f64::NEG_INFINITY {
            writeln!(out, " MI BND  {}", col.name).unwrap();
        } else {
            writeln!(out, " LO BND  {}  {}", col.name, lo).unwrap();
        }
        if up == f64::INFINITY {
            writeln!(out, " PL BND  {}", col.name).unwrap();
        } else {
            writeln!(out, " UP BND  {}  {}", col.name, up).unwrap();
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

/// Parses free-format MPS into a [`SparseMip`]. Row coefficients are ordered
/// by column.
pub fn read_mps(text: &str) -> Result<SparseMip, MpsError> {
    let mut mip = SparseMip::default();
    let mut section = Section::Start;
    let mut objective: Option<String> = None;
    let mut free_rows: Vec<String> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut in_int = false;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let syntax = |message: String| MpsError::Syntax { line, message };
        let number = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| MpsError::Syntax { line, message: format!("bad number `{s}`") })
        };
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(char::is_whitespace) {
            section = match fields[0] {
                "NAME" => {
                    mip.name = fields.get(1).copied().unwrap_or("").to_string();
                    Section::Start
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => {
                    return Err(MpsError::Unsupported {
                        line,
                        section: other.to_string(),
                    })
                }
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::Start | Section::End => {
                return Err(syntax("data outside of a section".into()));
            }
            Section::Rows => {
                let [tag, name] = fields[..] else {
                    return Err(syntax("expected `<type> <name>`".into()));
                };
                let sense = match tag {
                    "N" => {
                        if objective.is_none() {
                            objective = Some(name.to_string());
                        } else {
                            free_rows.push(name.to_string());
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => return Err(syntax(format!("unknown row type `{other}`"))),
                };
                row_index.insert(name.to_string(), mip.rows.len());
                mip.rows.push(Row {
                    name: name.to_string(),
                    sense,
                    rhs: 0.0,
                    coefs: Vec::new(),
                });
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1].trim_matches('\'') == "MARKER" {
                    match fields[2].trim_matches('\'') {
                        "INTORG" => in_int = true,
                        "INTEND" => in_int = false,
                        other => return Err(syntax(format!("unknown marker `{other}`"))),
                    }
                    continue;
                }
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(syntax("expected `<column> <row> <value> [<row> <value>]`".into()));
                }
                let name = fields[0];
                let j = match col_index.get(name) {
                    Some(&j) => j,
                    None => {
                        let j = mip.add_column(name, 0.0, f64::INFINITY, in_int, 0.0);
                        col_index.insert(name.to_string(), j);
                        entries.push(Vec::new());
                        j
                    }
                };
                for pair in fields[1..].chunks(2) {
                    let value = number(pair[1])?;
                    if Some(pair[0]) == objective.as_deref() {
                        mip.columns[j].objective += value;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        entries[j].push((i, value));
                    } else if !free_rows.iter().any(|r| r == pair[0]) {
                        return Err(MpsError::UnknownRow {
                            line,
                            name: pair[0].to_string(),
                        });
                    }
                }
            }
            Section::Rhs => {
                let pairs = match fields.len() {
                    2 | 4 => &fields[..],
                    3 | 5 => &fields[1..],
                    _ => return Err(syntax("expected `[<set>] <row> <value> ...`".into())),
                };
                for pair in pairs.chunks(2) {
                    let value = number(pair[1])?;
                    if Some(pair[0]) == objective.as_deref() {
                        mip.objective_constant = -value;
                    } else if let Some(&i) = row_index.get(pair[0]) {
                        mip.rows[i].rhs = value;
                    } else if !free_rows.iter().any(|r| r == pair[0]) {
                        return Err(MpsError::UnknownRow {
                            line,
                            name: pair[0].to_string(),
                        });
                    }
                }
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(syntax("expected `<type> <set> <column> [<value>]`".into()));
                }
                let (tag, name) = (fields[0], fields[2]);
                let j = *col_index.get(name).ok_or_else(|| MpsError::UnknownColumn {
                    line,
                    name: name.to_string(),
                })?;
                let value = || {
                    fields
                        .get(3)
                        .ok_or_else(|| syntax(format!("bound `{tag}` needs a value")))
                        .and_then(|v| number(v))
                };
                let col = &mut mip.columns[j];
                match tag {
                    "LO" => col.lower = value()?,
                    "UP" => {
                        let v = value()?;
                        if v < 0.0 && col.lower == 0.0 {
                            col.lower = f64::NEG_INFINITY;
                        }
                        col.upper = v;
                    }
                    "FX" => {
                        let v = value()?;
                        col.lower = v;
                        col.upper = v;
                    }
                    "FR" => {
                        col.lower = f64::NEG_INFINITY;
                        col.upper = f64::INFINITY;
                    }
                    "MI" => col.lower = f64::NEG_INFINITY,
                    "PL" => col.upper = f64::INFINITY,
                    "BV" => {
                        col.integer = true;
                        col.lower = 0.0;
                        col.upper = 1.0;
                    }
                    "LI" => {
                        col.integer = true;
                        col.lower = value()?;
                    }
                    "UI" => {
                        col.integer = true;
                        col.upper = value()?;
                    }
                    other => return Err(syntax(format!("unknown bound type `{other}`"))),
                }
            }
        }
    }
    if section != Section::End {
        return Err(MpsError::MissingEnd);
    }
    for (j, col_entries) in entries.into_iter().enumerate() {
        for (i, a) in col_entries {
            mip.rows[i].coefs.push((j, a));
        }
    }
    Ok(mip)
}

/// Same model with each row's coefficients ordered by column, for comparison
/// with a model read back from MPS.
pub fn canonical(mip: &SparseMip) -> SparseMip {
    let mut out = mip.clone();
    for row in &mut out.rows {
        row.coefs.sort_by_key(|&(j, _)| j);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseMip {
        let mut m = SparseMip::new("sample");
        let x = m.add_column("x", 0.0, 4.0, true, 1.5);
        let y = m.add_column("y", 0.0, 1.0, true, -2.0);
        let z = m.add_column("z", 0.0, 10.0, false, 0.1);
        let f = m.add_column("f", 3.0, 3.0, false, 0.0);
        m.add_row("c1", [(y, 1.0), (x, 2.0)], Sense::Le, 5.0);
        m.add_row("c2", [(x, 1.0), (z, -1.0)], Sense::Ge, -0.25);
        m.add_row("c3", [(z, 1.0), (f, 1.0)], Sense::Eq, 3.0);
        m.objective_constant = 123.456;
        m
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let text = write_mps(&m);
        assert!(text.contains("'INTORG'") && text.contains("'INTEND'"));
        assert!(text.contains(" FX BND  f  3"));
        let back = read_mps(&text).unwrap();
        assert_eq!(back, canonical(&m));
    }

    #[test]
    fn reads_foreign_conventions() {
        let text = "\
NAME test
ROWS
 N  COST
 N  FREE
 L  lim
COLUMNS
    a  COST  1  lim  1
    a  FREE  3
    b  lim  2
RHS
    lim  4
BOUNDS
 BV BND  a
 MI BND  b
ENDATA
";
        let m = read_mps(text).unwrap();
        assert!(m.columns[0].integer);
        assert_eq!((m.columns[0].lower, m.columns[0].upper), (0.0, 1.0));
        assert_eq!(m.columns[1].lower, f64::NEG_INFINITY);
        assert_eq!(m.rows.len(), 1);
        assert_eq!(m.rows[0].rhs, 4.0);
        assert_eq!(m.rows[0].coefs, vec![(0, 1.0), (1, 2.0)]);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(read_mps("NAME x\nROWS\n N OBJ\n"), Err(MpsError::MissingEnd)));
        let bad = "ROWS\n N OBJ\nCOLUMNS\n    x  nope  1\nENDATA\n";
        assert!(matches!(read_mps(bad), Err(MpsError::UnknownRow { line: 4, .. })));
        let bad = "ROWS\n N OBJ\nRANGES\nENDATA\n";
        assert!(matches!(read_mps(bad), Err(MpsError::Unsupported { line: 3, .. })));
    }
}
