//! Adapter for SAT-competition style solver executables.

use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::cnf::{parse_solver_output, write_dimacs, CnfFormula, SolveOutcome};

use super::SolverError;

/// Placeholder replaced by the DIMACS file path.
pub const CNF_PLACEHOLDER: &str = "{cnf}";

const POLL_INTERVAL: Duration = Duration::from_millis(5);

/// Whitespace-separated command line containing [`CNF_PLACEHOLDER`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplate {
    words: Vec<String>,
}

impl CommandTemplate {
    pub fn parse(template: &str) -> Result<Self, SolverError> {
        let words: Vec<String> = template.split_whitespace().map(str::to_owned).collect();
        if words.is_empty() {
            return Err(SolverError::Config("empty solver command".into()));
        }
        if !words.iter().any(|w| w.contains(CNF_PLACEHOLDER)) {
            return Err(SolverError::Config(format!(
                "solver command {template:?} has no {CNF_PLACEHOLDER} placeholder"
            )));
        }
        Ok(Self { words })
    }

    fn command(&self, cnf: &Path) -> Command {
        let path = cnf.to_string_lossy();
        let mut words = self.words.iter().map(|w| w.replace(CNF_PLACEHOLDER, &path));
        let mut cmd = Command::new(words.next().expect("nonempty"));
        cmd.args(words);
        cmd
    }
}

impl std::fmt::Display for CommandTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.words.join(" "))
    }
}

/// Kills the solver together with anything it spawned, e.g. when the
/// template names a wrapper script.
fn kill_group(child: &mut Child) {
    if let Ok(pid) = i32::try_from(child.id()) {
        // SAFETY: plain syscall; the group id is the child's pid.
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
    let _ = child.wait();
}

pub(super) fn solve_external(
    formula: &CnfFormula,
    template: &CommandTemplate,
    timeout: Option<Duration>,
) -> Result<SolveOutcome, SolverError> {
    let mut file = tempfile::Builder::new()
        .prefix("condim-")
        .suffix(".cnf")
        .tempfile()?;
    write_dimacs(formula, file.as_file_mut())?;

    let deadline = timeout.map(|t| Instant::now() + t);
    let mut child = template
        .command(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn()
        .map_err(|e| SolverError::Environment(format!("cannot launch `{template}`: {e}")))?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut text = String::new();
        stdout.read_to_string(&mut text).map(|_| text)
    });

    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            kill_group(&mut child);
            // Not joined: a surviving descendant may still hold the pipe.
            drop(reader);
            return Ok(SolveOutcome::TimedOut);
        }
        thread::sleep(POLL_INTERVAL);
    };
    let text = reader
        .join()
        .map_err(|_| SolverError::Environment("solver output reader panicked".into()))??;

    let outcome = parse_solver_output(&text, formula.variable_count())
        .map_err(|e| SolverError::Integrity(format!("solver output: {e}")))?;
    match (status.code(), &outcome) {
        (Some(10), SolveOutcome::Satisfiable(_)) | (Some(20), SolveOutcome::Unsatisfiable) => {}
        (Some(code @ (10 | 20)), _) => {
            return Err(SolverError::Integrity(format!(
                "exit code {code} contradicts the reported status"
            )))
        }
        _ => {}
    }
    drop(file);
    Ok(outcome)
}
