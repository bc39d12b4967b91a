//! Sectioned comma-separated text tables shared by the network and
//! distribution file formats.
//!
//! ```text
//! # comment
//! [nodes]
//! id,x,y
//! 0,0.0,0.0
//! ```
//!
//! Each `[section]` header is followed by one header row naming the columns,
//! then data rows. Blank lines and `#` comments are ignored.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Row {
    pub line: usize,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Section {
    /// Checks that the header row matches `expected` exactly.
    pub fn expect_columns(&self, source: &str, expected: &[&str]) -> Result<()> {
        if self.columns.iter().map(String::as_str).eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(Error::Parse {
                path: source.to_string(),
                line: self.line + 1,
                message: format!(
                    "section [{}] expects columns `{}`, found `{}`",
                    self.name,
                    expected.join(","),
                    self.columns.join(",")
                ),
            })
        }
    }
}

impl Row {
    pub fn parse<T: FromStr>(&self, source: &str, index: usize, column: &str) -> Result<T> {
        let raw = self.fields.get(index).ok_or_else(|| Error::Parse {
            path: source.to_string(),
            line: self.line,
            message: format!("missing field `{column}`"),
        })?;
        raw.parse().map_err(|_| Error::Parse {
            path: source.to_string(),
            line: self.line,
            message: format!("cannot parse `{raw}` as `{column}`"),
        })
    }
}

pub fn parse(source: &str, text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(inner) = content.strip_prefix('[') {
            let name = inner.strip_suffix(']').ok_or_else(|| Error::Parse {
                path: source.to_string(),
                line,
                message: "unterminated section header".into(),
            })?;
            sections.push(Section {
                name: name.trim().to_string(),
                line,
                columns: Vec::new(),
                rows: Vec::new(),
            });
            continue;
        }
        let section = sections.last_mut().ok_or_else(|| Error::Parse {
            path: source.to_string(),
            line,
            message: "row outside of any [section]".into(),
        })?;
        let fields: Vec<String> = content.split(',').map(|f| f.trim().to_string()).collect();
        if section.columns.is_empty() {
            section.columns = fields;
        } else {
            if fields.len() != section.columns.len() {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line,
                    message: format!(
                        "expected {} fields, found {}",
                        section.columns.len(),
                        fields.len()
                    ),
                });
            }
            section.rows.push(Row { line, fields });
        }
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_rows() {
        let text = "# hi\n[nodes]\nid,x,y\n0,1.5,2\n\n[segments]\nid,from\n3,0 # trailing\n";
        let sections = parse("t", text).unwrap();
        assert_eq!(sections.len(), 2);
        assert_eq!(sections[0].columns, ["id", "x", "y"]);
        assert_eq!(sections[0].rows[0].line, 4);
        let x: f64 = sections[0].rows[0].parse("t", 1, "x").unwrap();
        assert_eq!(x, 1.5);
        assert_eq!(sections[1].rows[0].fields, ["3", "0"]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse("f.net", "[nodes]\nid,x,y\n0,1\n").unwrap_err();
        assert!(err.to_string().starts_with("f.net:3:"), "{err}");
        let err = parse("f.net", "0,1\n").unwrap_err();
        assert!(err.to_string().starts_with("f.net:1:"), "{err}");
    }
}
