//! Command implementations behind the `neighborhood-bound` binary.
//!
//! Every command returns a serializable report plus a verdict; the binary
//! only parses flags, picks an output format and maps verdicts to exit codes.

pub mod fuzz;
pub mod reports;
pub mod sweep;

use anyhow::{anyhow, bail, Result};

/// Process outcome: `Holds` exits 0, `Violation` exits 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violation,
}

impl Verdict {
    pub fn from_holds(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Violation => 1,
        }
    }
}

/// Splits a comma-separated list of element names, keeping commas inside
/// parentheses (product elements are written `(a,b)`).
pub fn split_names(list: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in list.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| anyhow!("unbalanced ')' in {list:?}"))?
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut current));
                continue;
            }
            _ => {}
        }
        current.push(ch);
    }
    if depth != 0 {
        bail!("unbalanced '(' in {list:?}");
    }
    out.push(current);
    let out: Vec<String> = out.into_iter().map(|s| s.trim().to_string()).collect();
    if out.len() == 1 && out[0].is_empty() {
        return Ok(Vec::new());
    }
    if let Some(pos) = out.iter().position(String::is_empty) {
        bail!("empty element name at position {} in {list:?}", pos + 1);
    }
    Ok(out)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_names_respects_parentheses() {
        assert_eq!(split_names("e,a").unwrap(), ["e", "a"]);
        assert_eq!(split_names("(0,1), (1,0)").unwrap(), ["(0,1)", "(1,0)"]);
        assert_eq!(split_names("(12)(3),e").unwrap(), ["(12)(3)", "e"]);
        assert!(split_names("").unwrap().is_empty());
        assert!(split_names("a,,b").is_err());
        assert!(split_names("(a,b").is_err());
    }
}
