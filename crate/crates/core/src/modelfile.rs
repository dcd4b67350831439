//! Reader for the line-oriented sectioned text format shared by model and
//! solution files.
//!
//! ```text
//! # comment
//! name = grade2
//! [balance mass]
//! phi = rho
//! psi = rho*v
//!     + 0          # indented lines continue the previous value
//! ```

use thiserror::Error;

use crate::expr::ParseError;

/// One `key = value` entry, or a bare line (`key` empty) in list sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// 1-based line and column where `value` starts.
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    /// Section name without brackets (`balance mass`), empty for the preamble.
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    /// First word of the header (`balance` for `[balance mass]`).
    pub fn kind(&self) -> &str {
        self.name.split_whitespace().next().unwrap_or("")
    }

    /// Header text after the first word (`mass` for `[balance mass]`).
    pub fn label(&self) -> &str {
        self.name
            .split_once(char::is_whitespace)
            .map(|(_, l)| l.trim())
            .unwrap_or("")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct FileError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl FileError {
    pub fn at(line: usize, col: usize, message: impl Into<String>) -> Self {
        FileError {
            line,
            col,
            message: message.into(),
        }
    }

    /// Moves an expression error into file coordinates.
    pub fn from_expr(e: &ParseError, entry: &Entry) -> Self {
        let line = entry.line + e.line - 1;
        let col = if e.line == 1 { entry.col + e.col - 1 } else { e.col };
        FileError {
            line,
            col,
            message: e.message.clone(),
        }
    }
}

/// Lists sections in file order. `list_sections` names sections whose lines
/// are bare items rather than `key = value` pairs.
pub fn read_sections(text: &str, list_sections: &[&str]) -> Result<Vec<Section>, FileError> {
    let mut sections = vec![Section {
        name: String::new(),
        line: 1,
        entries: Vec::new(),
    }];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let indented = content.starts_with(' ') || content.starts_with('\t');
        let sec = sections.last_mut().unwrap();
        if indented {
            if let Some(last) = sec.entries.last_mut() {
                last.value.push('\n');
                last.value.push_str(content.trim_end());
                continue;
            }
        }
        let trimmed = content.trim();
        let lead = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(FileError::at(lineno, lead + trimmed.len() + 1, "expected `]`"));
            };
            let name = name.split_whitespace().collect::<Vec<_>>().join(" ");
            if name.is_empty() {
                return Err(FileError::at(lineno, lead + 1, "empty section name"));
            }
            sections.push(Section {
                name,
                line: lineno,
                entries: Vec::new(),
            });
            continue;
        }
        let is_list = list_sections.contains(&sec.kind());
        if is_list {
            sec.entries.push(Entry {
                key: String::new(),
                value: trimmed.to_string(),
                line: lineno,
                col: lead + 1,
            });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(FileError::at(lineno, lead + 1, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(FileError::at(lineno, lead + 1, "missing key before `=`"));
        }
        let after = &content[eq + 1..];
        let vlead = after.len() - after.trim_start().len();
        if sec.get(key).is_some() {
            return Err(FileError::at(lineno, lead + 1, format!("duplicate key `{key}`")));
        }
        sec.entries.push(Entry {
            key: key.to_string(),
            value: after.trim().to_string(),
            line: lineno,
            col: eq + 2 + vlead,
        });
    }
    Ok(sections)
}

/// Splits a comma-separated list, ignoring commas inside parentheses.
pub fn split_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                cur.push(c);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_entries_and_continuations() {
        let text = "name = demo # trailing\n[fields]\nnames = a, b\n[balance mass]\nphi = a\n  + b\n[unknowns]\nT\nq(a)\n";
        let s = read_sections(text, &["unknowns"]).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].get("name").unwrap().value, "demo");
        assert_eq!(s[2].kind(), "balance");
        assert_eq!(s[2].label(), "mass");
        assert_eq!(s[2].get("phi").unwrap().value, "a\n  + b");
        assert_eq!(s[3].entries.len(), 2);
        assert_eq!(s[3].entries[1].value, "q(a)");
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(read_sections("[fields\n", &[]).unwrap_err().line, 1);
        assert_eq!(read_sections("\nfoo\n", &[]).unwrap_err().line, 2);
        assert!(read_sections("a = 1\na = 2\n", &[]).is_err());
    }

    #[test]
    fn list_splitting() {
        assert_eq!(split_list("rho, q(rho, eps), v"), ["rho", "q(rho, eps)", "v"]);
        assert!(split_list("  ").is_empty());
    }
}
