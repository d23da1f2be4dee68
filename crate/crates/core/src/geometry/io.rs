//! JSON and headerless CSV forms of point sets. Both write 17 significant
//! digits, so every coordinate reads back bit-exactly.

use super::PointSet;
use crate::error::{Error, Result};
use crate::format;

impl PointSet {
    pub fn to_json_string(&self) -> String {
        format::to_json(self).expect("point sets serialize")
    }

    pub fn from_json_str(text: &str) -> Result<PointSet> {
        Ok(serde_json::from_str(text)?)
    }

    /// One point per line, coordinates separated by commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|&v| format::g17(v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<PointSet> {
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut n: Option<usize> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (field, raw) in line.split(',').enumerate() {
                let raw = raw.trim();
                let v: f64 = raw.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    field: field + 1,
                    message: format!("invalid number {:?}", raw),
                })?;
                row.push(v);
            }
            match n {
                None => n = Some(row.len()),
                Some(k) if k != row.len() => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        field: row.len().min(k) + 1,
                        message: format!("expected {} coordinates, found {}", k, row.len()),
                    })
                }
                _ => {}
            }
            points.push(row);
        }
        let n = n.ok_or_else(|| Error::InvalidArgument("CSV input contains no points".into()))?;
        PointSet::new(n, points)
    }
}
