//! SAT-competition solver output: an `s` status line plus `v` value lines.

use thiserror::Error;

use super::{Assignment, Lit, SolveOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("no status line in solver output")]
    NoStatus,
    #[error("conflicting status lines")]
    ConflictingStatus,
    #[error("unknown status {0:?}")]
    UnknownStatus(String),
    #[error("invalid value token {0:?}")]
    BadValue(String),
    #[error("value for variable {0} outside 1..={1}")]
    ValueOutOfRange(u32, u32),
    #[error("variable {0} assigned twice")]
    DuplicateValue(u32),
    #[error("model is missing variable {0}")]
    MissingValue(u32),
    #[error("value lines are not terminated by 0")]
    Unterminated,
    #[error("value lines present for an unsatisfiable answer")]
    ValuesWithoutModel,
}

/// Parses solver output for a formula over `variable_count` variables.
///
/// `s UNKNOWN` maps to [`SolveOutcome::TimedOut`]: the solver gave up.
pub fn parse_solver_output(text: &str, variable_count: u32) -> Result<SolveOutcome, ProtocolError> {
    let mut status: Option<&str> = None;
    let mut values: Vec<Option<bool>> = vec![None; variable_count as usize];
    let mut saw_values = false;
    let mut terminated = false;

    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let rest = rest.trim();
            match status {
                Some(prev) if prev != rest => return Err(ProtocolError::ConflictingStatus),
                _ => status = Some(rest),
            }
        } else if line == "v" || line.starts_with("v ") {
            saw_values = true;
            for token in line[1..].split_whitespace() {
                let lit: Lit = token
                    .parse()
                    .map_err(|_| ProtocolError::BadValue(token.to_owned()))?;
                if lit == 0 {
                    terminated = true;
                    continue;
                }
                let var = lit.unsigned_abs();
                if var > variable_count {
                    return Err(ProtocolError::ValueOutOfRange(var, variable_count));
                }
                let slot = &mut values[var as usize - 1];
                if slot.is_some() {
                    return Err(ProtocolError::DuplicateValue(var));
                }
                *slot = Some(lit > 0);
            }
        }
    }

    match status.ok_or(ProtocolError::NoStatus)? {
        "SATISFIABLE" => {
            if !terminated && variable_count > 0 {
                return Err(ProtocolError::Unterminated);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(idx, v)| v.ok_or(ProtocolError::MissingValue(idx as u32 + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SolveOutcome::Satisfiable(Assignment::new(values)))
        }
        "UNSATISFIABLE" if saw_values => Err(ProtocolError::ValuesWithoutModel),
        "UNSATISFIABLE" => Ok(SolveOutcome::Unsatisfiable),
        "UNKNOWN" => Ok(SolveOutcome::TimedOut),
        other => Err(ProtocolError::UnknownStatus(other.to_owned())),
    }
}
