//! Conflict-driven clause learning solver.
//!
//! - two-watched-literal unit propagation with blocker literals
//! - first-UIP conflict analysis with recursive clause minimization
//! - VSIDS branching over an indexed binary heap
//! - phase saving
//! - geometric restarts
//! - LBD-based learnt clause database reduction

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Assignment, CnfFormula};

const NO_REASON: u32 = u32::MAX;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_FIRST: f64 = 100.0;
const RESTART_GROWTH: f64 = 1.5;
const REDUCE_FIRST: u64 = 2000;
const REDUCE_STEP: u64 = 300;
// Conflicts between clock reads.
const CLOCK_INTERVAL: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(lit: i32) -> Self {
        let var = lit.unsigned_abs() - 1;
        Lit(var << 1 | u32::from(lit < 0))
    }

    fn new(var: usize, negative: bool) -> Self {
        Lit((var as u32) << 1 | u32::from(negative))
    }

    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    fn negative(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Undef,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

/// Max-heap of variables keyed by activity, with position index.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<usize>,
    index: Vec<usize>,
}

impl VarHeap {
    const ABSENT: usize = usize::MAX;

    fn with_vars(n: usize, activity: &[f64]) -> Self {
        let mut h = VarHeap {
            heap: Vec::with_capacity(n),
            index: vec![Self::ABSENT; n],
        };
        for v in 0..n {
            h.insert(v, activity);
        }
        h
    }

    fn contains(&self, v: usize) -> bool {
        self.index[v] != Self::ABSENT
    }

    fn insert(&mut self, v: usize, activity: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.index[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, activity);
    }

    fn pop(&mut self, activity: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.index[top] = Self::ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn increased(&mut self, v: usize, activity: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.index[v], activity);
        }
    }

    fn sift_up(&mut self, mut pos: usize, activity: &[f64]) {
        let v = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            let pv = self.heap[parent];
            if activity[pv] >= activity[v] {
                break;
            }
            self.heap[pos] = pv;
            self.index[pv] = pos;
            pos = parent;
        }
        self.heap[pos] = v;
        self.index[v] = pos;
    }

    fn sift_down(&mut self, mut pos: usize, activity: &[f64]) {
        let v = self.heap[pos];
        let len = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && activity[self.heap[right]] > activity[self.heap[left]] {
                right
            } else {
                left
            };
            let cv = self.heap[child];
            if activity[cv] <= activity[v] {
                break;
            }
            self.heap[pos] = cv;
            self.index[cv] = pos;
            pos = child;
        }
        self.heap[pos] = v;
        self.index[v] = pos;
    }
}

/// Search statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
    pub deleted_clauses: u64,
}

/// Raw result of the search, before model verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Sat(Assignment),
    Unsat,
    Interrupted,
}

#[derive(Debug)]
pub struct CdclSolver {
    num_vars: usize,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    level_stamp: Vec<u64>,
    stamp: u64,
    to_clear: Vec<Lit>,
    inconsistent: bool,
    stats: SolverStats,
}

impl CdclSolver {
    pub fn new(formula: &CnfFormula, seed: u64) -> Self {
        let num_vars = formula.variable_count() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Tiny seeded noise only breaks ties between equal activities.
        let activity: Vec<f64> = (0..num_vars).map(|_| rng.gen::<f64>() * 1e-6).collect();
        let heap = VarHeap::with_vars(num_vars, &activity);
        let mut solver = CdclSolver {
            num_vars,
            clauses: Vec::with_capacity(formula.clause_count()),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![Value::Undef; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            polarity: vec![true; num_vars],
            seen: vec![false; num_vars],
            level_stamp: vec![0; num_vars + 1],
            stamp: 0,
            to_clear: Vec::new(),
            inconsistent: false,
            stats: SolverStats::default(),
        };

        let mut units = Vec::new();
        for clause in formula.clauses() {
            let mut lits: Vec<Lit> = clause.iter().map(|&l| Lit::from_dimacs(l)).collect();
            lits.sort_unstable_by_key(|l| l.0);
            lits.dedup();
            if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue; // tautology
            }
            match lits.len() {
                0 => solver.inconsistent = true,
                1 => units.push(lits[0]),
                _ => {
                    solver.attach(Clause {
                        lits,
                        learnt: false,
                        deleted: false,
                        lbd: 0,
                        activity: 0.0,
                    });
                }
            }
        }
        for unit in units {
            match solver.value(unit) {
                Value::True => {}
                Value::False => solver.inconsistent = true,
                Value::Undef => solver.enqueue(unit, NO_REASON),
            }
        }
        solver
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    fn attach(&mut self, clause: Clause) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[(!clause.lits[0]).code()].push(Watcher {
            cref,
            blocker: clause.lits[1],
        });
        self.watches[(!clause.lits[1]).code()].push(Watcher {
            cref,
            blocker: clause.lits[0],
        });
        self.clauses.push(clause);
        cref
    }

    #[inline]
    fn value(&self, lit: Lit) -> Value {
        lit_value(&self.assigns, lit)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, lit: Lit, reason: u32) {
        let v = lit.var();
        self.assigns[v] = if lit.negative() {
            Value::False
        } else {
            Value::True
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let lits = &mut self.clauses[cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let moved = Watcher {
                    cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == Value::True {
                    ws[j] = moved;
                    j += 1;
                    continue;
                }
                let replacement =
                    (2..lits.len()).find(|&k| lit_value(&self.assigns, lits[k]) != Value::False);
                if let Some(k) = replacement {
                    lits.swap(1, k);
                    let watch_on = !lits[1];
                    self.watches[watch_on.code()].push(moved);
                    continue;
                }
                ws[j] = moved;
                j += 1;
                if lit_value(&self.assigns, first) == Value::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut conflict: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut index = self.trail.len();
        let mut uip: Option<Lit> = None;

        loop {
            self.bump_clause(conflict);
            let start = usize::from(uip.is_some());
            let len = self.clauses[conflict as usize].lits.len();
            for k in start..len {
                let q = self.clauses[conflict as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var()] = false;
            pending -= 1;
            uip = Some(p);
            if pending == 0 {
                break;
            }
            conflict = self.reason[p.var()];
        }
        learnt[0] = !uip.expect("conflict at positive level");

        // Recursive minimization.
        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learnt);
        let levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            if self.reason[l.var()] == NO_REASON || !self.redundant(l, levels) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for k in 0..self.to_clear.len() {
            let v = self.to_clear[k].var();
            self.seen[v] = false;
        }

        let backjump = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.level[l.var()])
                .expect("at least two literals");
            learnt.swap(1, best);
            self.level[learnt[1].var()]
        };
        (learnt, backjump)
    }

    fn redundant(&mut self, lit: Lit, levels: u32) -> bool {
        let mut stack = vec![lit];
        let top = self.to_clear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var()] as usize;
            for k in 1..self.clauses[cref].lits.len() {
                let l = self.clauses[cref].lits[k];
                let v = l.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && self.abstract_level(v) & levels != 0 {
                    self.seen[v] = true;
                    stack.push(l);
                    self.to_clear.push(l);
                } else {
                    for k in top..self.to_clear.len() {
                        let v = self.to_clear[k].var();
                        self.seen[v] = false;
                    }
                    self.to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for l in lits {
            let lvl = self.level[l.var()] as usize;
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                count += 1;
            }
        }
        count
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let bound = self.trail_lim[level as usize];
        for k in (bound..self.trail.len()).rev() {
            let lit = self.trail[k];
            let v = lit.var();
            self.assigns[v] = Value::Undef;
            self.reason[v] = NO_REASON;
            self.polarity[v] = lit.negative();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(bound);
        self.trail_lim.truncate(level as usize);
        self.qhead = bound;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == Value::Undef {
                return Some(Lit::new(v, self.polarity[v]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clauses[cref as usize].lits[0];
        self.reason[first.var()] == cref && self.value(first) == Value::True
    }

    fn reduce_db(&mut self) {
        let mut candidates: Vec<u32> = Vec::with_capacity(self.learnts.len());
        let mut keep: Vec<u32> = Vec::with_capacity(self.learnts.len());
        for &cref in &self.learnts {
            let c = &self.clauses[cref as usize];
            if c.lbd <= 2 || self.locked(cref) {
                keep.push(cref);
            } else {
                candidates.push(cref);
            }
        }
        // Worst first: high LBD, then low activity.
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let remove = candidates.len() / 2;
        for &cref in &candidates[..remove] {
            let c = &mut self.clauses[cref as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.stats.deleted_clauses += 1;
        }
        keep.extend_from_slice(&candidates[remove..]);
        self.learnts = keep;
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn model(&self) -> Assignment {
        Assignment::new(self.assigns.iter().map(|&v| v == Value::True).collect())
    }

    /// Runs the search until a model is found, unsatisfiability is proven,
    /// or `deadline` passes.
    pub fn solve(&mut self, deadline: Option<Instant>) -> SearchResult {
        if self.inconsistent {
            return SearchResult::Unsat;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return SearchResult::Interrupted;
        }
        let mut restart_limit = RESTART_FIRST;
        let mut conflicts_since_restart = 0u64;
        let mut next_reduce = REDUCE_FIRST;
        let mut reduce_rounds = 0u64;

        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_since_restart += 1;
                if self.decision_level() == 0 {
                    return SearchResult::Unsat;
                }
                let (learnt, backjump) = self.analyze(conflict);
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let cref = self.attach(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        lbd,
                        activity: 0.0,
                    });
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.stats.learnt_clauses += 1;
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;

                if self.stats.conflicts.is_multiple_of(CLOCK_INTERVAL)
                    && deadline.is_some_and(|d| Instant::now() >= d)
                {
                    return SearchResult::Interrupted;
                }
            } else {
                if conflicts_since_restart as f64 >= restart_limit {
                    conflicts_since_restart = 0;
                    restart_limit *= RESTART_GROWTH;
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                }
                if self.stats.conflicts >= next_reduce {
                    reduce_rounds += 1;
                    next_reduce = self.stats.conflicts + REDUCE_FIRST + REDUCE_STEP * reduce_rounds;
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return SearchResult::Sat(self.model()),
                    Some(lit) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(lit, NO_REASON);
                    }
                }
            }
        }
    }

    pub fn variable_count(&self) -> usize {
        self.num_vars
    }
}

#[inline]
fn lit_value(assigns: &[Value], lit: Lit) -> Value {
    match assigns[lit.var()] {
        Value::Undef => Value::Undef,
        Value::True if lit.negative() => Value::False,
        Value::False if lit.negative() => Value::True,
        v => v,
    }
}
