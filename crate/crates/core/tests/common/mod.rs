#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use condim::PreferenceProfile;

pub fn data(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn profile(name: &str) -> PreferenceProfile {
    data(name).parse().expect("fixture profile parses")
}

/// Command template for the python-sat fixture, if python and pysat are present.
pub fn pysat_template() -> Option<String> {
    let ok = Command::new("python3")
        .args(["-c", "import pysat.solvers"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pysat_solver.py");
    ok.then(|| format!("python3 {} {{cnf}}", script.display()))
}

/// All permutations of `0..m`, lexicographic.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Sets of the given size as sorted member lists, by plain recursion.
pub fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if size > m {
        return vec![];
    }
    let mut out = subsets(m - 1, size);
    for mut s in subsets(m - 1, size - 1) {
        s.push(m - 1);
        out.push(s);
    }
    out
}

/// Whether `S` leaves some outside alternative without a strict majority of
/// agents ranking a member of `S` above it. `pos[i][a]` is agent i's rank of a.
fn set_fails(pos: &[&[usize]], set: &[usize], m: usize) -> bool {
    let n = pos.len();
    (0..m).filter(|y| !set.contains(y)).any(|y| {
        let count = pos
            .iter()
            .filter(|p| set.iter().any(|&x| p[x] < p[y]))
            .count();
        2 * count <= n
    })
}

/// Brute force over all `(m!)^n` profiles: does one exist in which no set of
/// `k - 1` alternatives is a majority winning set?
pub fn brute_force_exists(n: usize, m: usize, k: usize) -> bool {
    if k <= 1 {
        return true;
    }
    if k > m {
        return false;
    }
    let positions: Vec<Vec<usize>> = permutations(m)
        .into_iter()
        .map(|perm| {
            let mut pos = vec![0; m];
            for (rank, &a) in perm.iter().enumerate() {
                pos[a] = rank;
            }
            pos
        })
        .collect();
    let sets = subsets(m, k - 1);
    let mut idx = vec![0usize; n];
    loop {
        let pos: Vec<&[usize]> = idx.iter().map(|&i| positions[i].as_slice()).collect();
        if sets.iter().all(|s| set_fails(&pos, s, m)) {
            return true;
        }
        let mut d = 0;
        loop {
            if d == n {
                return false;
            }
            idx[d] += 1;
            if idx[d] < positions.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Smallest majority winning set size of `profile`, by the same counting.
pub fn brute_force_dimension(profile: &PreferenceProfile) -> usize {
    let m = profile.alternative_count();
    let positions: Vec<Vec<usize>> = profile
        .rankings()
        .iter()
        .map(|r| {
            let mut pos = vec![0; m];
            for (rank, &a) in r.iter().enumerate() {
                pos[a] = rank;
            }
            pos
        })
        .collect();
    let pos: Vec<&[usize]> = positions.iter().map(Vec::as_slice).collect();
    (1..=m)
        .find(|&size| subsets(m, size).iter().any(|s| !set_fails(&pos, s, m)))
        .unwrap_or(m)
}
