//! DIMACS CNF reading and writing.
//!
//! The writer is bit-exact: comment lines `c <text>`, one `p cnf V C` header,
//! then one clause per line terminated by ` 0`. The reader accepts clauses
//! spread across lines but is otherwise strict.

use std::io::{self, Write};

use thiserror::Error;

use super::{CnfFormula, Lit};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: missing `p cnf` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid literal {token:?}")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {variables}")]
    LiteralOutOfRange {
        line: usize,
        lit: Lit,
        variables: u32,
    },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: last clause is not terminated by 0")]
    Unterminated { line: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("no `p cnf` header found")]
    NoHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_dimacs<W: Write>(formula: &CnfFormula, sink: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(sink);
    for comment in formula.comments() {
        if comment.is_empty() {
            writeln!(out, "c")?;
        } else {
            writeln!(out, "c {comment}")?;
        }
    }
    writeln!(
        out,
        "p cnf {} {}",
        formula.variable_count(),
        formula.clause_count()
    )?;
    for clause in formula.clauses() {
        for lit in clause {
            write!(out, "{lit} ")?;
        }
        writeln!(out, "0")?;
    }
    out.flush()
}

pub fn parse_dimacs(source: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<CnfFormula> = None;
    let mut comments = Vec::new();
    let mut declared = 0;
    let mut pending: Vec<Lit> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if text == "c" || text.starts_with("c ") || text.starts_with("c\t") {
            comments.push(text[1..].trim_start().to_owned());
            continue;
        }
        if text.starts_with('p') {
            if formula.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let bad = || DimacsError::BadHeader {
                line,
                text: text.to_owned(),
            };
            let fields: Vec<&str> = text.split_whitespace().collect();
            let [p, cnf, vars, clauses] = fields[..] else {
                return Err(bad());
            };
            if p != "p" || cnf != "cnf" {
                return Err(bad());
            }
            let vars: u32 = vars.parse().map_err(|_| bad())?;
            if vars > Lit::MAX as u32 {
                return Err(bad());
            }
            declared = clauses.parse().map_err(|_| bad())?;
            formula = Some(CnfFormula::new(vars));
            continue;
        }
        let Some(f) = formula.as_mut() else {
            return Err(DimacsError::MissingHeader { line });
        };
        for token in text.split_whitespace() {
            let lit: Lit = token.parse().map_err(|_| DimacsError::BadLiteral {
                line,
                token: token.to_owned(),
            })?;
            if lit == 0 {
                if pending.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                f.add_clause(std::mem::take(&mut pending));
            } else if lit.unsigned_abs() > f.variable_count() {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    lit,
                    variables: f.variable_count(),
                });
            } else {
                pending.push(lit);
            }
        }
    }

    let mut formula = formula.ok_or(DimacsError::NoHeader)?;
    if !pending.is_empty() {
        return Err(DimacsError::Unterminated { line: last_line });
    }
    if formula.clause_count() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: formula.clause_count(),
        });
    }
    for comment in comments {
        formula.add_comment(comment);
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(f: &CnfFormula) -> String {
        let mut buf = Vec::new();
        write_dimacs(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn writes_exact_bytes() {
        let mut f = CnfFormula::new(2);
        f.add_clause(vec![1, -2]);
        assert_eq!(render(&f), "p cnf 2 1\n1 -2 0\n");
        f.add_comment("n=1 m=2");
        assert_eq!(render(&f), "c n=1 m=2\np cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn empty_formula() {
        let f = CnfFormula::new(0);
        assert_eq!(render(&f), "p cnf 0 0\n");
        assert_eq!(parse_dimacs("p cnf 0 0\n").unwrap(), f);
    }

    #[test]
    fn parses_multiline_clauses_and_comments() {
        let f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(f.clauses(), &[vec![1, -2, 3], vec![-1]]);
        assert_eq!(f.comments(), &["hello".to_string()]);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            parse_dimacs("p cnf x 1\n1 0\n"),
            Err(DimacsError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("p dnf 1 1\n1 0\n"),
            Err(DimacsError::BadHeader { .. })
        ));
        assert!(matches!(
            parse_dimacs("1 0\n"),
            Err(DimacsError::MissingHeader { line: 1 })
        ));
        assert!(matches!(
            parse_dimacs("c only\n"),
            Err(DimacsError::NoHeader)
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\np cnf 1 1\n"),
            Err(DimacsError::DuplicateHeader { line: 2 })
        ));
    }

    #[test]
    fn body_errors() {
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange {
                line: 2,
                lit: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 0\n0\n"),
            Err(DimacsError::EmptyClause { line: 3 })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(DimacsError::Unterminated { line: 2 })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 2 0\n"),
            Err(DimacsError::ClauseCount {
                declared: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 two 0\n"),
            Err(DimacsError::BadLiteral { line: 2, .. })
        ));
    }
}
