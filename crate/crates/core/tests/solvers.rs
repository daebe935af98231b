mod common;

use std::os::unix::fs::PermissionsExt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use condim::cnf::{CnfFormula, SolveOutcome};
use condim::encoder::{build_instance, EncodeOptions};
use condim::solver::{solve, SolverConfig, SolverError};

use common::pysat_template;

fn self_template() -> String {
    format!("{} solve-dimacs {{cnf}}", env!("CARGO_BIN_EXE_condim"))
}

fn sat(outcome: &SolveOutcome) -> bool {
    match outcome {
        SolveOutcome::Satisfiable(_) => true,
        SolveOutcome::Unsatisfiable => false,
        SolveOutcome::TimedOut => panic!("no deadline was set"),
    }
}

fn random_3sat(rng: &mut ChaCha8Rng, vars: u32, clauses: usize) -> CnfFormula {
    let mut f = CnfFormula::new(vars);
    for _ in 0..clauses {
        let clause = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars) as i32;
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        f.add_clause(clause);
    }
    f
}

#[test]
fn builtin_agrees_with_external_on_small_grid() {
    let Some(template) = pysat_template() else {
        eprintln!("python-sat unavailable; skipping");
        return;
    };
    let external = SolverConfig::external(&template).unwrap();
    for n in 1..=6 {
        for m in 2..=6 {
            for k in [2, 3].into_iter().filter(|&k| k <= m) {
                let (formula, _) = build_instance(&EncodeOptions::new(n, m, k)).unwrap();
                let ours = solve(&formula, &SolverConfig::builtin()).unwrap();
                let theirs = solve(&formula, &external).unwrap();
                assert_eq!(sat(&ours), sat(&theirs), "n={n} m={m} k={k}");
            }
        }
    }
}

#[test]
fn builtin_agrees_with_external_on_random_3sat() {
    let Some(template) = pysat_template() else {
        eprintln!("python-sat unavailable; skipping");
        return;
    };
    let external = SolverConfig::external(&template).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0; 2];
    for _ in 0..40 {
        // Near the 4.26 clause/variable phase transition.
        let f = random_3sat(&mut rng, 60, 256);
        let ours = sat(&solve(&f, &SolverConfig::builtin()).unwrap());
        assert_eq!(ours, sat(&solve(&f, &external).unwrap()));
        seen[usize::from(ours)] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn solve_dimacs_subcommand_speaks_the_protocol() {
    let external = SolverConfig::external(&self_template()).unwrap();
    for (n, m, k, expected) in [
        (3, 3, 2, true),
        (1, 3, 2, false),
        (6, 6, 3, true),
        (5, 6, 3, false),
    ] {
        let (formula, _) = build_instance(&EncodeOptions::new(n, m, k)).unwrap();
        assert_eq!(
            sat(&solve(&formula, &external).unwrap()),
            expected,
            "n={n} m={m} k={k}"
        );
    }
}

#[test]
fn seeds_do_not_change_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let f = random_3sat(&mut rng, 40, 170);
        let answers: Vec<bool> = (0..4)
            .map(|seed| sat(&solve(&f, &SolverConfig::builtin().with_seed(seed)).unwrap()))
            .collect();
        assert!(answers.windows(2).all(|w| w[0] == w[1]), "{answers:?}");
    }
}

fn script(dir: &tempfile::TempDir, body: &str) -> SolverConfig {
    let path = dir.path().join("solver.sh");
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    SolverConfig::external(&format!("{} {{cnf}}", path.display())).unwrap()
}

#[test]
fn adapter_failures_are_classified() {
    let formula = condim::cnf::parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
    let dir = tempfile::tempdir().unwrap();

    let lying = script(&dir, "echo 's SATISFIABLE'; echo 'v 1 -2 0'; exit 20");
    assert!(matches!(
        solve(&formula, &lying),
        Err(SolverError::Integrity(_))
    ));

    let garbage = script(&dir, "echo 'hello'; exit 0");
    assert!(matches!(
        solve(&formula, &garbage),
        Err(SolverError::Integrity(_))
    ));

    let missing = SolverConfig::external("/definitely/not/a/solver {cnf}").unwrap();
    assert!(matches!(
        solve(&formula, &missing),
        Err(SolverError::Environment(_))
    ));

    assert!(matches!(
        SolverConfig::external("kissat -q"),
        Err(SolverError::Config(_))
    ));
}

#[test]
fn adapter_reads_the_cnf_file() {
    let formula = condim::cnf::parse_dimacs("p cnf 2 2\n1 0\n-2 0\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    // Reports SAT only if the file it was handed holds the expected header.
    let probe = script(
        &dir,
        "grep -q '^p cnf 2 2' \"$1\" && { echo 's SATISFIABLE'; echo 'v 1 -2 0'; exit 10; }; exit 1",
    );
    assert_eq!(
        solve(&formula, &probe).unwrap(),
        SolveOutcome::Satisfiable(condim::Assignment::new(vec![true, false]))
    );
}

#[test]
fn adapter_timeout_kills_wrapper_and_children() {
    let formula = condim::cnf::parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let slow = script(&dir, "sleep 20").with_timeout(Some(Duration::from_millis(200)));
    let start = Instant::now();
    assert_eq!(solve(&formula, &slow).unwrap(), SolveOutcome::TimedOut);
    assert!(start.elapsed() < Duration::from_secs(5));
}
