//! Text format for equation systems.
//!
//! ```text
//! # a comment
//! alphabet: a b
//! XY = YX
//! ```
//!
//! Lowercase letters are coefficients, uppercase letters are variables. The
//! `alphabet:` header is optional; without it the coefficients are inferred
//! from the lowercase letters occurring in the equations, defaulting to
//! `a b` when none occur (a system must be solved over some `FS_k`, k >= 1).

use std::fmt;

use crate::systems::EquationSystem;
use crate::words::{Alphabet, PositiveWord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: expected {}", self.line, self.col, self.expected)
    }
}

impl std::error::Error for SyntaxError {}

fn err(line: usize, col: usize, expected: &str) -> SyntaxError {
    SyntaxError {
        line,
        col,
        expected: expected.to_string(),
    }
}

/// Parses an equation file into a system. Duplicate equations are
/// deduplicated; errors carry 1-based line and column.
type RawSide = Vec<(usize, char)>;

pub fn parse_equations(text: &str) -> Result<EquationSystem, SyntaxError> {
    let mut declared: Option<Vec<String>> = None;
    let mut raw_equations: Vec<(usize, RawSide, RawSide)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let stripped = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        if let Some(rest) = stripped.trim_start().strip_prefix("alphabet:") {
            if declared.is_some() {
                return Err(err(lineno, 1, "at most one alphabet header"));
            }
            let names: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
            if names.is_empty() {
                return Err(err(lineno, stripped.len(), "at least one coefficient name"));
            }
            for n in &names {
                if n.chars().count() != 1 || !n.chars().next().unwrap().is_ascii_lowercase() {
                    return Err(err(lineno, 1, "single lowercase coefficient letters"));
                }
            }
            declared = Some(names);
            continue;
        }

        let eq_pos = match stripped.find('=') {
            Some(i) => i,
            None => return Err(err(lineno, stripped.len().max(1), "'=' between two words")),
        };
        let lhs = letters_of(stripped, 0, eq_pos, lineno)?;
        let rhs = letters_of(stripped, eq_pos + 1, stripped.len(), lineno)?;
        if lhs.is_empty() {
            return Err(err(lineno, 1, "nonempty left-hand side"));
        }
        if rhs.is_empty() {
            return Err(err(lineno, eq_pos + 2, "nonempty right-hand side"));
        }
        raw_equations.push((lineno, lhs, rhs));
    }

    let strict = declared.is_some();
    let mut coefficients: Vec<String> = declared.unwrap_or_default();
    let mut variables: Vec<String> = Vec::new();
    for (lineno, lhs, rhs) in &raw_equations {
        for &(col, c) in lhs.iter().chain(rhs.iter()) {
            let name = c.to_string();
            if c.is_ascii_lowercase() {
                if !coefficients.contains(&name) {
                    if strict {
                        return Err(err(
                            *lineno,
                            col + 1,
                            &format!("coefficient {name:?} declared in the alphabet header"),
                        ));
                    }
                    coefficients.push(name);
                }
            } else if c.is_ascii_uppercase() {
                if !variables.contains(&name) {
                    variables.push(name);
                }
            } else {
                return Err(err(*lineno, col + 1, "an ASCII letter"));
            }
        }
    }
    if coefficients.is_empty() {
        coefficients = vec!["a".to_string(), "b".to_string()];
    }

    let alphabet = Alphabet::new(&coefficients, &variables)
        .map_err(|e| err(1, 1, &format!("valid alphabet ({e})")))?;
    let equations = raw_equations
        .into_iter()
        .map(|(_, lhs, rhs)| {
            let to_word = |letters: Vec<(usize, char)>| {
                PositiveWord::new(
                    letters
                        .into_iter()
                        .map(|(_, c)| alphabet.lookup(&c.to_string()).unwrap())
                        .collect(),
                )
            };
            (to_word(lhs), to_word(rhs))
        })
        .collect();
    EquationSystem::new(alphabet, equations).map_err(|e| err(1, 1, &format!("valid system ({e})")))
}

fn letters_of(line: &str, start: usize, end: usize, lineno: usize) -> Result<RawSide, SyntaxError> {
    let mut out = Vec::new();
    for (i, c) in line[start..end].char_indices() {
        let col = start + i;
        if c.is_whitespace() {
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(err(lineno, col + 1, "an ASCII letter"));
        }
        out.push((col, c));
    }
    Ok(out)
}

/// Renders a system back into the text format; `parse ∘ print` is the
/// identity on canonical forms.
pub fn print_equations(sys: &EquationSystem) -> String {
    let mut out = String::from("alphabet:");
    for &c in sys.alphabet().coefficients() {
        out.push(' ');
        out.push_str(sys.alphabet().name(c));
    }
    out.push('\n');
    for eq in sys.equations() {
        out.push_str(&format!(
            "{} = {}\n",
            eq.lhs.display(sys.alphabet()),
            eq.rhs.display(sys.alphabet())
        ));
    }
    out
}
