//! A small conflict-driven clause-learning solver specialised for the
//! coloring instances built by the engine.
//!
//! Decisions always pick the lowest-index unassigned variable and give it its
//! preferred phase, and the solver never restarts. Under that regime the first
//! model found is the lexicographically least model in the order
//! (variable index, preferred phase first): every assignment on the trail is
//! either a decision on the smallest free variable or implied by the formula
//! plus earlier decisions, so a model that differed from the least one at its
//! first differing variable would contradict how that variable was assigned.
//! Learned clauses are implied by the formula and never change this.

use std::time::Instant;

pub type Var = usize;

/// `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: Var) -> Self {
        Lit((v as u32) << 1)
    }

    pub fn neg(v: Var) -> Self {
        Lit(((v as u32) << 1) | 1)
    }

    pub fn new(v: Var, value: bool) -> Self {
        if value {
            Self::pos(v)
        } else {
            Self::neg(v)
        }
    }

    pub fn var(self) -> Var {
        (self.0 >> 1) as usize
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: i8 = -1;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    /// The deadline passed before a verdict.
    Unknown,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    clause: u32,
    blocker: Lit,
}

#[derive(Debug, Default, Clone)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub learned: u64,
}

#[derive(Debug, Clone)]
pub struct Solver {
    // clause arena
    lits: Vec<Lit>,
    starts: Vec<u32>,
    lens: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    next_decision: usize,
    inconsistent: bool,
    pub stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self {
            lits: Vec::new(),
            starts: Vec::new(),
            lens: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            next_decision: 0,
            inconsistent: false,
            stats: Stats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.starts.len()
    }

    /// Adds a variable whose decisions try `preferred` first.
    pub fn new_var(&mut self, preferred: bool) -> Var {
        let v = self.assign.len();
        self.assign.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.phase.push(preferred);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.next_decision = self.next_decision.min(v);
        v
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assign[l.var()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (l.is_neg() as i8)
        }
    }

    pub fn model_value(&self, v: Var) -> Option<bool> {
        match self.assign[v] {
            UNDEF => None,
            a => Some(a == 1),
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.assign[v] = (!l.is_neg()) as i8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.next_decision = self.next_decision.min(v);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn attach(&mut self, lits: &[Lit]) -> u32 {
        let id = self.starts.len() as u32;
        self.starts.push(self.lits.len() as u32);
        self.lens.push(lits.len() as u32);
        self.lits.extend_from_slice(lits);
        self.watches[lits[0].idx()].push(Watch { clause: id, blocker: lits[1] });
        self.watches[lits[1].idx()].push(Watch { clause: id, blocker: lits[0] });
        id
    }

    /// Adds a problem clause. Must be called between solves; it rewinds the
    /// trail to level 0 first.
    pub fn add_clause(&mut self, clause: &[Lit]) {
        if self.inconsistent {
            return;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = clause.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        let mut kept = Vec::with_capacity(c.len());
        for &l in &c {
            match self.value(l) {
                1 => return,
                0 => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                self.attach(&kept);
            }
        }
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let start = self.starts[w.clause as usize] as usize;
                let len = self.lens[w.clause as usize] as usize;
                if self.lits[start] == false_lit {
                    self.lits.swap(start, start + 1);
                }
                let first = self.lits[start];
                let nw = Watch { clause: w.clause, blocker: first };
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..len {
                    let l = self.lits[start + k];
                    if self.value(l) != 0 {
                        self.lits.swap(start + 1, start + k);
                        self.watches[l.idx()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// First-UIP learning; returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let cur = self.decision_level();
        loop {
            let start = self.starts[confl as usize] as usize;
            let len = self.lens[confl as usize] as usize;
            let skip = usize::from(p.is_some());
            for k in skip..len {
                let q = self.lits[start + k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var()];
        }
        learnt[0] = !p.expect("conflict has a literal at the current level");

        // drop literals whose reason is entirely inside the clause
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let r = self.reason[l.var()];
            let redundant = r != NO_REASON && {
                let s = self.starts[r as usize] as usize;
                let n = self.lens[r as usize] as usize;
                self.lits[s + 1..s + n].iter().all(|q| self.seen[q.var()] || self.level[q.var()] == 0)
            };
            if !redundant {
                keep.push(l);
            }
        }
        for &l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut learnt = keep;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while self.next_decision < self.assign.len() {
            let v = self.next_decision;
            if self.assign[v] == UNDEF {
                return Some(Lit::new(v, self.phase[v]));
            }
            self.next_decision += 1;
        }
        None
    }

    /// Runs to a verdict, or until `deadline` passes.
    pub fn solve(&mut self, deadline: Option<Instant>) -> SolveStatus {
        if self.inconsistent {
            return SolveStatus::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.inconsistent = true;
            return SolveStatus::Unsat;
        }
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.inconsistent = true;
                    return SolveStatus::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let id = self.attach(&learnt);
                    self.stats.learned += 1;
                    self.enqueue(learnt[0], id);
                }
                if self.stats.conflicts.is_multiple_of(1024) {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            self.cancel_until(0);
                            return SolveStatus::Unknown;
                        }
                    }
                }
            } else {
                match self.pick_branch() {
                    None => return SolveStatus::Sat,
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}
