//! Weighted Max Ones instances, solvers, the ILP-2 translation and the
//! executable reductions between problems.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::clone::{resolve_relation, ConstraintLanguage};
use crate::delta::{in_q, QKind};
use crate::error::{Error, Result};
use crate::gadget::{nand_chain, verify_gadget, Gadget, LinkKind, Var};
use crate::relation::{c0, c1, eq, extract, impl_rel, nand, substitute, Relation};

pub type Weight = Rational64;

/// Default cap on memo entries (exact solver) or search nodes (ILP-2).
pub const DEFAULT_SOLVER_BUDGET: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub relation: String,
    pub scope: Vec<usize>,
}

/// `(V, C, w)` with variables addressed by index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Instance {
    pub names: Vec<String>,
    pub weights: Vec<Weight>,
    pub constraints: Vec<Constraint>,
    pub relations: BTreeMap<String, Relation>,
    pub bound: Option<usize>,
}

pub fn parse_weight(text: &str) -> Option<Weight> {
    if let Some((int, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let den = 10i64.pow(digits);
        let whole: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        return Some(Weight::new(whole * den + part, den));
    }
    text.parse().ok()
}

impl Instance {
    pub fn new() -> Self {
        Instance::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add_var(&mut self, name: &str, weight: Weight) -> Result<usize> {
        if weight.is_negative() {
            return Err(Error::arg(format!("negative weight for {name}")));
        }
        if self.index_of(name).is_some() {
            return Err(Error::arg(format!("variable {name} declared twice")));
        }
        self.names.push(name.to_string());
        self.weights.push(weight);
        Ok(self.names.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn add_relation(&mut self, name: &str, r: Relation) {
        self.relations.insert(name.to_string(), r);
    }

    pub fn add_constraint(&mut self, relation: &str, scope: Vec<usize>) -> Result<()> {
        let r = self
            .relations
            .get(relation)
            .ok_or_else(|| Error::reference(format!("unknown relation {relation}")))?;
        if r.arity() != scope.len() {
            return Err(Error::arg(format!(
                "{relation} has arity {} but the scope has {} variables",
                r.arity(),
                scope.len()
            )));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.names.len()) {
            return Err(Error::reference(format!("undeclared variable index {v}")));
        }
        self.constraints.push(Constraint {
            relation: relation.to_string(),
            scope,
        });
        Ok(())
    }

    pub fn relation(&self, c: &Constraint) -> &Relation {
        &self.relations[&c.relation]
    }

    /// Occurrence count of every variable, repeats within a scope included.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.len()];
        for c in &self.constraints {
            for &v in &c.scope {
                occ[v] += 1;
            }
        }
        occ
    }

    pub fn max_occurrence(&self) -> usize {
        self.occurrences().into_iter().max().unwrap_or(0)
    }

    pub fn check_bound(&self) -> Result<()> {
        if let Some(k) = self.bound {
            let occ = self.occurrences();
            if let Some((v, &n)) = occ.iter().enumerate().find(|(_, &n)| n > k) {
                return Err(Error::OccurrenceCap {
                    var: self.names[v].clone(),
                    count: n,
                    cap: k,
                });
            }
        }
        Ok(())
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.len()
            && self.constraints.iter().all(|c| {
                let code = c.scope.iter().fold(0u32, |acc, &v| (acc << 1) | assignment[v] as u32);
                self.relation(c).contains_code(code)
            })
    }

    pub fn measure(&self, assignment: &[bool]) -> Weight {
        self.weights
            .iter()
            .zip(assignment)
            .filter(|(_, &b)| b)
            .map(|(w, _)| *w)
            .sum()
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.iter().copied().sum()
    }

    /// Parses `var NAME weight W`, `con REL NAME..` and `bound K` lines.
    /// Relation names resolve against `table`, then the named relations.
    pub fn parse(text: &str, table: &BTreeMap<String, Relation>) -> Result<Instance> {
        let mut inst = Instance::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "var" => {
                    let (name, w) = match words.as_slice() {
                        [_, name] => (*name, Weight::from_integer(1)),
                        [_, name, "weight", w] => (
                            *name,
                            parse_weight(w).ok_or_else(|| Error::parse(ln, format!("bad weight {w}")))?,
                        ),
                        _ => return Err(Error::parse(ln, "expected: var NAME weight W")),
                    };
                    inst.add_var(name, w).map_err(|e| Error::parse(ln, e.to_string()))?;
                }
                "con" => {
                    let rel = *words.get(1).ok_or_else(|| Error::parse(ln, "missing relation"))?;
                    if !inst.relations.contains_key(rel) {
                        let r = resolve_relation(rel, table)
                            .ok_or_else(|| Error::reference(format!("line {ln}: unknown relation {rel}")))?;
                        inst.add_relation(rel, r);
                    }
                    let scope = words[2..]
                        .iter()
                        .map(|n| {
                            inst.index_of(n)
                                .ok_or_else(|| Error::reference(format!("line {ln}: undeclared variable {n}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    inst.add_constraint(rel, scope).map_err(|e| match e {
                        Error::Argument(m) => Error::parse(ln, m),
                        other => other,
                    })?;
                }
                "bound" => {
                    let k = words
                        .get(1)
                        .and_then(|k| k.parse().ok())
                        .ok_or_else(|| Error::parse(ln, "expected: bound K"))?;
                    inst.bound = Some(k);
                }
                w => return Err(Error::parse(ln, format!("unknown directive {w}"))),
            }
        }
        inst.check_bound()?;
        Ok(inst)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.bound {
            writeln!(f, "bound {k}")?;
        }
        for (n, w) in self.names.iter().zip(&self.weights) {
            writeln!(f, "var {n} weight {w}")?;
        }
        for c in &self.constraints {
            write!(f, "con {}", c.relation)?;
            for &v in &c.scope {
                write!(f, " {}", self.names[v])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Vec<bool>,
    pub measure: Weight,
}

impl Solution {
    pub fn new(inst: &Instance, assignment: Vec<bool>) -> Self {
        let measure = inst.measure(&assignment);
        Solution { assignment, measure }
    }

    pub fn ones(&self, inst: &Instance) -> Vec<String> {
        self.assignment
            .iter()
            .zip(&inst.names)
            .filter(|(&b, _)| b)
            .map(|(_, n)| n.clone())
            .collect()
    }
}

struct Plan {
    /// For each layer `i`, the variables `j < i` still needed later.
    active: Vec<Vec<usize>>,
    /// Constraints whose largest variable is `i`.
    closing: Vec<Vec<usize>>,
}

fn plan(inst: &Instance) -> Result<Plan> {
    let n = inst.len();
    let mut last: Vec<usize> = (0..n).collect();
    let mut closing = vec![Vec::new(); n];
    for (ci, c) in inst.constraints.iter().enumerate() {
        let hi = *c.scope.iter().max().expect("non-empty scope");
        closing[hi].push(ci);
        for &v in &c.scope {
            last[v] = last[v].max(hi);
        }
    }
    let mut active = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let a: Vec<usize> = (0..i).filter(|&j| last[j] >= i).collect();
        if a.len() > 63 {
            return Err(Error::capacity(format!(
                "frontier of {} variables is too wide for the exact solver",
                a.len()
            )));
        }
        active.push(a);
    }
    Ok(Plan { active, closing })
}

struct Exact<'a> {
    inst: &'a Instance,
    plan: Plan,
    memo: HashMap<(usize, u64), Option<Weight>>,
    budget: u64,
}

impl Exact<'_> {
    fn value(&self, i: usize, state: u64, var: usize, b: bool) -> bool {
        if var == i {
            b
        } else {
            let pos = self.plan.active[i].iter().position(|&j| j == var).expect("active");
            state >> pos & 1 == 1
        }
    }

    fn step(&self, i: usize, state: u64, b: bool) -> Option<u64> {
        for &ci in &self.plan.closing[i] {
            let c = &self.inst.constraints[ci];
            let code = c
                .scope
                .iter()
                .fold(0u32, |acc, &v| (acc << 1) | self.value(i, state, v, b) as u32);
            if !self.inst.relation(c).contains_code(code) {
                return None;
            }
        }
        let next = self.plan.active[i + 1]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (p, &v)| acc | (self.value(i, state, v, b) as u64) << p);
        Some(next)
    }

    fn best(&mut self, i: usize, state: u64) -> Result<Option<Weight>> {
        if i == self.inst.len() {
            return Ok(Some(Weight::zero()));
        }
        if let Some(v) = self.memo.get(&(i, state)) {
            return Ok(*v);
        }
        if self.memo.len() as u64 >= self.budget {
            return Err(Error::capacity("exact solver exceeded its state budget"));
        }
        let mut out: Option<Weight> = None;
        for b in [true, false] {
            if let Some(next) = self.step(i, state, b) {
                if let Some(rest) = self.best(i + 1, next)? {
                    let v = rest + if b { self.inst.weights[i] } else { Weight::zero() };
                    if out.is_none_or(|o| v > o) {
                        out = Some(v);
                    }
                }
            }
        }
        self.memo.insert((i, state), out);
        Ok(out)
    }
}

/// A maximum-measure solution; among optima the lexicographically greatest
/// assignment (first variable most significant). `None` if infeasible.
pub fn solve_exact(inst: &Instance) -> Result<Option<Solution>> {
    solve_exact_with_budget(inst, DEFAULT_SOLVER_BUDGET)
}

pub fn solve_exact_with_budget(inst: &Instance, budget: u64) -> Result<Option<Solution>> {
    let mut ex = Exact {
        inst,
        plan: plan(inst)?,
        memo: HashMap::new(),
        budget,
    };
    let Some(opt) = ex.best(0, 0)? else {
        return Ok(None);
    };
    let mut assignment = Vec::with_capacity(inst.len());
    let (mut state, mut remaining) = (0u64, opt);
    for i in 0..inst.len() {
        let mut chosen = false;
        for b in [true, false] {
            let Some(next) = ex.step(i, state, b) else { continue };
            let gain = if b { inst.weights[i] } else { Weight::zero() };
            if ex.best(i + 1, next)? == Some(remaining - gain) {
                assignment.push(b);
                state = next;
                remaining -= gain;
                chosen = true;
                break;
            }
        }
        assert!(chosen, "reconstruction lost the optimum");
    }
    let sol = Solution::new(inst, assignment);
    debug_assert!(inst.satisfies(&sol.assignment) && sol.measure == opt);
    Ok(Some(sol))
}

fn nand_width(r: &Relation) -> Option<usize> {
    let m = r.arity();
    (*r == nand(m)).then_some(m)
}

/// The greedy `1/(l+1)`-approximation for instances over NAND^m and the
/// constants: fix constants, then repeatedly set a heaviest free variable
/// to 1 and zero the partners of clauses shrunk to two members.
pub fn greedy_apx(inst: &Instance, l: usize) -> Result<Solution> {
    let n = inst.len();
    let occ = inst.occurrences();
    if let Some(v) = (0..n).find(|&v| occ[v] > l) {
        return Err(Error::OccurrenceCap {
            var: inst.names[v].clone(),
            count: occ[v],
            cap: l,
        });
    }
    let mut value: Vec<Option<bool>> = vec![None; n];
    let mut clauses: Vec<Vec<usize>> = Vec::new();
    let mut units: Vec<(usize, bool)> = Vec::new();
    for c in &inst.constraints {
        let r = inst.relation(c);
        if *r == c1() {
            units.push((c.scope[0], true));
        } else if *r == c0() {
            units.push((c.scope[0], false));
        } else if nand_width(r).is_some() {
            let mut vars = c.scope.clone();
            vars.sort_unstable();
            vars.dedup();
            clauses.push(vars);
        } else {
            return Err(Error::domain(format!(
                "{} is neither NAND nor a constant",
                c.relation
            )));
        }
    }
    let infeasible = || Error::domain("instance is infeasible");
    let set = |value: &mut Vec<Option<bool>>, v: usize, b: bool| -> Result<bool> {
        match value[v] {
            Some(old) if old != b => Err(infeasible()),
            Some(_) => Ok(false),
            None => {
                value[v] = Some(b);
                Ok(true)
            }
        }
    };
    for (v, b) in units {
        set(&mut value, v, b)?;
    }
    // unit propagation over the clauses
    let mut live: Vec<bool> = vec![true; clauses.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (ci, cl) in clauses.iter().enumerate() {
            if !live[ci] {
                continue;
            }
            if cl.iter().any(|&v| value[v] == Some(false)) {
                live[ci] = false;
                continue;
            }
            let free: Vec<usize> = cl.iter().copied().filter(|&v| value[v].is_none()).collect();
            match free.len() {
                0 => return Err(infeasible()),
                1 => {
                    set(&mut value, free[0], false)?;
                    live[ci] = false;
                    changed = true;
                }
                _ => {}
            }
        }
    }
    loop {
        let pick = (0..n)
            .filter(|&v| value[v].is_none())
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if inst.weights[b] >= inst.weights[v] => Some(b),
                _ => Some(v),
            });
        let Some(x) = pick else { break };
        value[x] = Some(true);
        for (ci, cl) in clauses.iter().enumerate() {
            if !live[ci] || !cl.contains(&x) {
                continue;
            }
            if cl.iter().any(|&v| value[v] == Some(false)) {
                live[ci] = false;
                continue;
            }
            let free: Vec<usize> = cl.iter().copied().filter(|&v| value[v].is_none()).collect();
            if free.len() == 1 {
                value[free[0]] = Some(false);
                live[ci] = false;
            }
        }
    }
    let assignment: Vec<bool> = value.into_iter().map(|v| v.unwrap_or(false)).collect();
    let sol = Solution::new(inst, assignment);
    assert!(inst.satisfies(&sol.assignment), "greedy produced an infeasible assignment");
    Ok(sol)
}

/// `lo ≤ Σ coeff·x ≤ hi`; a missing side is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ilp2Row {
    pub coeffs: Vec<(usize, i64)>,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Ilp2Row {
    fn holds(&self, x: &[bool]) -> bool {
        let s: i64 = self.coeffs.iter().map(|&(v, a)| a * x[v] as i64).sum();
        self.lo.is_none_or(|lo| s >= lo) && self.hi.is_none_or(|hi| s <= hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ilp2Model {
    pub names: Vec<String>,
    pub weights: Vec<Weight>,
    /// Per-variable `(lower, upper)` bounds within `0..=1`.
    pub bounds: Vec<(u8, u8)>,
    pub rows: Vec<Ilp2Row>,
}

impl Ilp2Model {
    pub fn column_sums(&self) -> Vec<i64> {
        let mut s = vec![0; self.names.len()];
        for r in &self.rows {
            for &(v, a) in &r.coeffs {
                s[v] += a.abs();
            }
        }
        s
    }

    pub fn satisfies(&self, x: &[bool]) -> bool {
        x.iter()
            .zip(&self.bounds)
            .all(|(&b, &(lo, hi))| (b as u8) >= lo && (b as u8) <= hi)
            && self.rows.iter().all(|r| r.holds(x))
    }
}

impl fmt::Display for Ilp2Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, w)) in self.names.iter().zip(&self.weights).enumerate() {
            let (lo, hi) = self.bounds[i];
            writeln!(f, "var {n} weight {w} bounds {lo}..{hi}")?;
        }
        for r in &self.rows {
            let mut terms = String::new();
            for (k, &(v, a)) in r.coeffs.iter().enumerate() {
                let sign = if a < 0 { "-" } else if k > 0 { "+" } else { "" };
                let mag = if a.abs() == 1 { String::new() } else { format!("{} ", a.abs()) };
                if k > 0 {
                    terms.push(' ');
                }
                terms.push_str(&format!("{sign}{}{}", if sign.is_empty() || k == 0 { "" } else { " " }, mag));
                terms.push_str(&self.names[v]);
            }
            if terms.is_empty() {
                terms.push('0');
            }
            match (r.lo, r.hi) {
                (Some(a), Some(b)) if a == b => writeln!(f, "row {terms} = {a}")?,
                (Some(a), Some(b)) => writeln!(f, "row {a} <= {terms} <= {b}")?,
                (Some(a), None) => writeln!(f, "row {terms} >= {a}")?,
                (None, Some(b)) => writeln!(f, "row {terms} <= {b}")?,
                (None, None) => writeln!(f, "row {terms} free")?,
            }
        }
        Ok(())
    }
}

/// Translates an instance whose relations are all in Q and whose variables
/// occur at most twice into an ILP with column absolute sums at most 2.
pub fn to_ilp2(inst: &Instance) -> Result<Ilp2Model> {
    let occ = inst.occurrences();
    if let Some(v) = (0..inst.len()).find(|&v| occ[v] > 2) {
        return Err(Error::domain(format!(
            "{} occurs {} times, more than two",
            inst.names[v], occ[v]
        )));
    }
    let mut m = Ilp2Model {
        names: inst.names.clone(),
        weights: inst.weights.clone(),
        bounds: vec![(0, 1); inst.len()],
        rows: Vec::new(),
    };
    for c in &inst.constraints {
        let mut vars = c.scope.clone();
        vars.sort_unstable();
        vars.dedup();
        let map: Vec<usize> = c
            .scope
            .iter()
            .map(|v| vars.iter().position(|u| u == v).expect("present") + 1)
            .collect();
        let r = substitute(inst.relation(c), &map, vars.len())?;
        let q = in_q(&r).ok_or_else(|| Error::domain(format!("{} is not in Q", c.relation)))?;
        for fac in &q.factors {
            let cv: Vec<usize> = fac.coords.iter().map(|i| vars[i - 1]).collect();
            let row = |coeffs: Vec<(usize, i64)>, lo, hi| Ilp2Row { coeffs, lo, hi };
            let mut fix = |v: usize, b: u8| {
                let (lo, hi) = m.bounds[v];
                m.bounds[v] = (lo.max(b), hi.min(b));
            };
            match &fac.kind {
                QKind::Empty => m.rows.push(row(Vec::new(), Some(1), None)),
                QKind::C0 => fix(cv[0], 0),
                QKind::C1 => fix(cv[0], 1),
                QKind::Eq2 => m.rows.push(row(vec![(cv[0], 1), (cv[1], -1)], Some(0), Some(0))),
                QKind::Neq2 => m.rows.push(row(vec![(cv[0], 1), (cv[1], 1)], Some(1), Some(1))),
                QKind::AtMostOneFlipped(neg) => {
                    if cv.len() == 1 {
                        continue;
                    }
                    let coeffs = fac
                        .coords
                        .iter()
                        .zip(&cv)
                        .map(|(i, &v)| (v, if neg.contains(i) { -1 } else { 1 }))
                        .collect();
                    m.rows.push(row(coeffs, None, Some(1 - neg.len() as i64)));
                }
            }
        }
    }
    if let Some((v, s)) = m.column_sums().into_iter().enumerate().find(|&(_, s)| s > 2) {
        return Err(Error::domain(format!("column {} has absolute sum {s}", m.names[v])));
    }
    Ok(m)
}

struct Bnb<'a> {
    m: &'a Ilp2Model,
    x: Vec<bool>,
    best: Option<(Weight, Vec<bool>)>,
    suffix: Vec<Weight>,
    rows_of: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl Bnb<'_> {
    /// Whether row `r` can still be met once variables `>= i` are free.
    fn row_ok(&self, r: usize, i: usize) -> bool {
        let row = &self.m.rows[r];
        let (mut lo, mut hi) = (0i64, 0i64);
        for &(v, a) in &row.coeffs {
            if v < i {
                lo += a * self.x[v] as i64;
                hi += a * self.x[v] as i64;
            } else {
                let (bl, bh) = self.m.bounds[v];
                lo += (a * bl as i64).min(a * bh as i64);
                hi += (a * bl as i64).max(a * bh as i64);
            }
        }
        row.lo.is_none_or(|l| hi >= l) && row.hi.is_none_or(|h| lo <= h)
    }

    fn go(&mut self, i: usize, acc: Weight) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::capacity("ILP-2 search exceeded its node budget"));
        }
        if let Some((b, _)) = &self.best {
            if acc + self.suffix[i] <= *b {
                return Ok(());
            }
        }
        if i == self.x.len() {
            self.best = Some((acc, self.x.clone()));
            return Ok(());
        }
        let (lo, hi) = self.m.bounds[i];
        for b in [true, false] {
            if (b as u8) < lo || (b as u8) > hi {
                continue;
            }
            self.x[i] = b;
            if self.rows_of[i].iter().all(|&r| self.row_ok(r, i + 1)) {
                let gain = if b { self.m.weights[i] } else { Weight::zero() };
                self.go(i + 1, acc + gain)?;
            }
        }
        self.x[i] = false;
        Ok(())
    }
}

/// Exact branch-and-bound over the 0/1 variables, bounded by the remaining
/// positive weight. Ties favour the lexicographically greatest assignment.
pub fn solve_ilp2(m: &Ilp2Model) -> Result<Option<Solution>> {
    solve_ilp2_with_budget(m, DEFAULT_SOLVER_BUDGET)
}

pub fn solve_ilp2_with_budget(m: &Ilp2Model, budget: u64) -> Result<Option<Solution>> {
    let n = m.names.len();
    if m.rows.iter().any(|r| r.coeffs.is_empty() && !r.holds(&[])) {
        return Ok(None);
    }
    if m.bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(None);
    }
    let mut suffix = vec![Weight::zero(); n + 1];
    for i in (0..n).rev() {
        let w = if m.bounds[i].1 == 1 { m.weights[i] } else { Weight::zero() };
        suffix[i] = suffix[i + 1] + w;
    }
    let mut rows_of = vec![Vec::new(); n];
    for (ri, r) in m.rows.iter().enumerate() {
        for &(v, _) in &r.coeffs {
            if !rows_of[v].contains(&ri) {
                rows_of[v].push(ri);
            }
        }
    }
    let mut s = Bnb {
        m,
        x: vec![false; n],
        best: None,
        suffix,
        rows_of,
        nodes: 0,
        budget,
    };
    s.go(0, Weight::zero())?;
    Ok(s.best.map(|(measure, assignment)| {
        debug_assert!(m.satisfies(&assignment));
        Solution { assignment, measure }
    }))
}

/// Replaces every variable with more than three occurrences by a cycle of
/// copies joined through `gadget`, a 3-representation of `link` over `env`.
/// The first copy keeps the name and weight; copies and auxiliaries weigh 0.
pub fn cycle_reduction(
    inst: &Instance,
    link: LinkKind,
    gadget: &Gadget,
    env: &ConstraintLanguage,
) -> Result<Instance> {
    let target = match link {
        LinkKind::Eq2 => eq(2),
        LinkKind::Impl => impl_rel(),
    };
    match verify_gadget(&target, gadget, env) {
        Ok(true) if gadget.cap <= 3 && gadget.primary_count == 2 => {}
        Ok(_) => return Err(Error::reference(format!("link gadget does not represent {link}"))),
        Err(e) => return Err(Error::reference(format!("link gadget rejected: {e}"))),
    }
    let occ = inst.occurrences();
    let mut out = Instance {
        bound: Some(3),
        relations: inst.relations.clone(),
        ..Instance::default()
    };
    for (name, r) in env.iter() {
        match out.relations.get(name) {
            Some(old) if old != r => {
                return Err(Error::arg(format!("relation {name} differs between instance and gadget language")))
            }
            _ => out.add_relation(name, r.clone()),
        }
    }
    // copies[v] lists the output variables standing for v
    let mut copies: Vec<Vec<usize>> = Vec::with_capacity(inst.len());
    for v in 0..inst.len() {
        let first = out.add_var(&inst.names[v], inst.weights[v])?;
        let mut list = vec![first];
        if occ[v] > 3 {
            for k in 2..=occ[v] {
                list.push(out.add_var(&format!("{}#{k}", inst.names[v]), Weight::zero())?);
            }
        }
        copies.push(list);
    }
    let mut used = vec![0usize; inst.len()];
    for c in &inst.constraints {
        let scope = c
            .scope
            .iter()
            .map(|&v| {
                let list = &copies[v];
                let pick = if list.len() > 1 { list[used[v]] } else { list[0] };
                used[v] += 1;
                pick
            })
            .collect();
        out.add_constraint(&c.relation, scope)?;
    }
    for v in 0..inst.len() {
        let list = copies[v].clone();
        if list.len() < 2 {
            continue;
        }
        for k in 0..list.len() {
            let (a, b) = (list[k], list[(k + 1) % list.len()]);
            let aux: Vec<usize> = (1..=gadget.aux_count)
                .map(|j| out.add_var(&format!("{}#{}.y{j}", inst.names[v], k + 1), Weight::zero()))
                .collect::<Result<_>>()?;
            for gc in &gadget.constraints {
                let scope = gc
                    .scope
                    .iter()
                    .map(|var| match *var {
                        Var::Primary(1) => a,
                        Var::Primary(_) => b,
                        Var::Aux(j) => aux[j - 1],
                    })
                    .collect();
                out.add_constraint(&gc.relation, scope)?;
            }
        }
    }
    out.check_bound()?;
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    pub names: Vec<String>,
    pub weights: Vec<Weight>,
    pub edges: Vec<(usize, usize)>,
}

impl WeightedGraph {
    pub fn add_node(&mut self, name: &str, w: Weight) -> usize {
        self.names.push(name.to_string());
        self.weights.push(w);
        self.names.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::arg(format!("self-loop at {}", self.names[a])));
        }
        self.edges.push((a, b));
        Ok(())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.names.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_independent(&self, set: &[bool]) -> bool {
        self.edges.iter().all(|&(a, b)| !(set[a] && set[b]))
    }

    pub fn weight_of(&self, set: &[bool]) -> Weight {
        self.weights
            .iter()
            .zip(set)
            .filter(|(_, &b)| b)
            .map(|(w, _)| *w)
            .sum()
    }

    /// `node NAME weight W` and `edge A B` lines.
    pub fn parse(text: &str) -> Result<WeightedGraph> {
        let mut g = WeightedGraph::default();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["node", name] => {
                    g.add_node(name, Weight::from_integer(1));
                }
                ["node", name, "weight", w] => {
                    let w = parse_weight(w).ok_or_else(|| Error::parse(ln, format!("bad weight {w}")))?;
                    if w.is_negative() {
                        return Err(Error::parse(ln, "negative weight"));
                    }
                    g.add_node(name, w);
                }
                ["edge", a, b] => {
                    let find = |n: &str| {
                        g.names
                            .iter()
                            .position(|x| x == n)
                            .ok_or_else(|| Error::reference(format!("line {ln}: unknown node {n}")))
                    };
                    let (a, b) = (find(a)?, find(b)?);
                    g.add_edge(a, b).map_err(|e| Error::parse(ln, e.to_string()))?;
                }
                _ => return Err(Error::parse(ln, "expected node or edge")),
            }
        }
        Ok(g)
    }
}

impl fmt::Display for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, w) in self.names.iter().zip(&self.weights) {
            writeln!(f, "node {n} weight {w}")?;
        }
        for &(a, b) in &self.edges {
            writeln!(f, "edge {} {}", self.names[a], self.names[b])?;
        }
        Ok(())
    }
}

/// Weighted independent set as Max Ones over NAND², one constraint per
/// edge.
pub fn mis_to_maxones(g: &WeightedGraph, k: usize) -> Result<Instance> {
    let deg = g.degrees();
    if let Some(v) = (0..deg.len()).find(|&v| deg[v] > k) {
        return Err(Error::domain(format!(
            "node {} has degree {}, above {k}",
            g.names[v], deg[v]
        )));
    }
    let mut inst = Instance {
        bound: Some(k),
        ..Instance::default()
    };
    inst.add_relation("NAND2", nand(2));
    for (n, w) in g.names.iter().zip(&g.weights) {
        inst.add_var(n, *w)?;
    }
    for &(a, b) in &g.edges {
        inst.add_constraint("NAND2", vec![a, b])?;
    }
    Ok(inst)
}

/// A 2-CNF formula; literal `v` or `-v` for variable `v ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub vars: usize,
    pub clauses: Vec<[i32; 2]>,
}

impl Formula {
    /// `clause A B` lines, optionally `vars N`.
    pub fn parse(text: &str) -> Result<Formula> {
        let mut f = Formula {
            vars: 0,
            clauses: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["vars", n] => {
                    f.vars = f.vars.max(n.parse().map_err(|_| Error::parse(ln, "bad variable count"))?)
                }
                ["clause", rest @ ..] => {
                    if rest.len() != 2 {
                        return Err(Error::parse(ln, "a clause needs exactly two literals"));
                    }
                    let mut lits = [0i32; 2];
                    for (j, w) in rest.iter().enumerate() {
                        let l: i32 = w.parse().map_err(|_| Error::parse(ln, format!("bad literal {w}")))?;
                        if l == 0 {
                            return Err(Error::parse(ln, "literal 0"));
                        }
                        lits[j] = l;
                        f.vars = f.vars.max(l.unsigned_abs() as usize);
                    }
                    f.clauses.push(lits);
                }
                _ => return Err(Error::parse(ln, "expected clause or vars")),
            }
        }
        Ok(f)
    }

    pub fn satisfied(&self, s: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|&l| s[l.unsigned_abs() as usize - 1] == (l > 0)))
            .count()
    }

    /// Best number of satisfied clauses, by enumeration (`vars ≤ 24`).
    pub fn max_satisfied(&self) -> Result<usize> {
        if self.vars > 24 {
            return Err(Error::capacity("too many variables to enumerate"));
        }
        Ok((0u32..1 << self.vars)
            .map(|m| {
                let s: Vec<bool> = (0..self.vars).map(|i| m >> i & 1 == 1).collect();
                self.satisfied(&s)
            })
            .max()
            .unwrap_or(0))
    }
}

/// The graph of the 2SAT-3 reduction plus its Max Ones({c0, R})-2 cover.
#[derive(Clone, Debug)]
pub struct GadgetChain {
    pub graph: WeightedGraph,
    pub instance: Instance,
    /// Per variable, the roots of trees A, B, C (leaves at path positions
    /// 1, 2, 3).
    pub roots: Vec<[usize; 3]>,
    /// Whether trees A and C stand for the unnegated literal.
    pub majority_positive: Vec<bool>,
    /// Per clause, its two literal nodes.
    pub clause_nodes: Vec<[usize; 2]>,
    /// Per clause, the root each literal node is attached to.
    pub clause_roots: Vec<[usize; 2]>,
}

/// Optimum of the isolated variable gadget.
pub const GADGET_OPTIMUM: i64 = 14;

pub fn max2sat3_gadget_chain(f: &Formula) -> Result<GadgetChain> {
    let mut pos = vec![Vec::new(); f.vars];
    let mut neg = vec![Vec::new(); f.vars];
    for (ci, c) in f.clauses.iter().enumerate() {
        for (j, &l) in c.iter().enumerate() {
            let v = l.unsigned_abs() as usize - 1;
            if l > 0 {
                pos[v].push((ci, j));
            } else {
                neg[v].push((ci, j));
            }
        }
    }
    for v in 0..f.vars {
        let total = pos[v].len() + neg[v].len();
        if total > 3 {
            return Err(Error::domain(format!("variable {} occurs {total} times", v + 1)));
        }
        if pos[v].is_empty() || neg[v].is_empty() {
            return Err(Error::domain(format!(
                "variable {} must occur both negated and unnegated",
                v + 1
            )));
        }
    }
    let one = Weight::from_integer(1);
    let mut g = WeightedGraph::default();
    let mut inst = Instance {
        bound: Some(2),
        ..Instance::default()
    };
    inst.add_relation("R", nand_chain());
    inst.add_relation("C0", c0());
    let mut roots = Vec::new();
    let mut majority_positive = Vec::new();
    let mut attach = vec![[usize::MAX; 2]; f.clauses.len()];
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for v in 0..f.vars {
        let name = |s: &str| format!("v{}.{s}", v + 1);
        // p[x][y] for path x (0..4), position y (0..3)
        let mut p = [[0usize; 3]; 4];
        for (x, row) in p.iter_mut().enumerate() {
            for (y, slot) in row.iter_mut().enumerate() {
                let w = if y == 1 { Weight::new(9, 4) } else { one };
                *slot = g.add_node(&name(&format!("p{}{}", x + 1, y + 1)), w);
            }
        }
        let mut r = [0usize; 3];
        for t in 0..3 {
            let w = if t == 1 { Weight::from_integer(2) } else { one };
            let a = g.add_node(&name(&format!("x{}1", t + 1)), w);
            let b = g.add_node(&name(&format!("x{}2", t + 1)), w);
            r[t] = g.add_node(&name(&format!("r{}", ["A", "B", "C"][t])), one);
            for (leaf, mid) in [(p[0][t], a), (p[1][t], a), (p[2][t], b), (p[3][t], b), (a, r[t]), (b, r[t])] {
                g.add_edge(leaf, mid)?;
            }
            triples.push([p[0][t], a, p[1][t]]);
            triples.push([p[2][t], b, p[3][t]]);
            triples.push([a, r[t], b]);
        }
        for row in &p {
            g.add_edge(row[0], row[1])?;
            g.add_edge(row[1], row[2])?;
            triples.push(*row);
        }
        let maj_pos = pos[v].len() >= neg[v].len();
        let (maj, min) = if maj_pos { (&pos[v], &neg[v]) } else { (&neg[v], &pos[v]) };
        for (k, &(ci, j)) in maj.iter().enumerate() {
            attach[ci][j] = r[if k == 0 { 0 } else { 2 }];
        }
        attach[min[0].0][min[0].1] = r[1];
        roots.push(r);
        majority_positive.push(maj_pos);
    }
    let mut clause_nodes = Vec::new();
    let mut links = Vec::new();
    for ci in 0..f.clauses.len() {
        let a = g.add_node(&format!("c{}.l1", ci + 1), one);
        let b = g.add_node(&format!("c{}.l2", ci + 1), one);
        g.add_edge(a, b)?;
        g.add_edge(a, attach[ci][0])?;
        g.add_edge(b, attach[ci][1])?;
        links.extend([(a, b), (a, attach[ci][0]), (b, attach[ci][1])]);
        clause_nodes.push([a, b]);
    }
    for (n, w) in g.names.iter().zip(&g.weights) {
        inst.add_var(n, *w)?;
    }
    for t in triples {
        inst.add_constraint("R", t.to_vec())?;
    }
    for (k, (a, b)) in links.into_iter().enumerate() {
        let z = inst.add_var(&format!("z{}", k + 1), Weight::zero())?;
        inst.add_constraint("R", vec![a, b, z])?;
        inst.add_constraint("C0", vec![z])?;
    }
    inst.check_bound()?;
    Ok(GadgetChain {
        graph: g,
        instance: inst,
        roots,
        majority_positive,
        clause_nodes,
        clause_roots: attach,
    })
}

impl GadgetChain {
    /// The consistent independent set encoding `s`: an optimal gadget
    /// configuration per variable and one literal node per satisfied
    /// clause. Roots in the set are the literals `s` makes false.
    pub fn consistent_solution(&self, s: &[bool]) -> Vec<bool> {
        let mut set = vec![false; self.graph.names.len()];
        for (v, r) in self.roots.iter().enumerate() {
            // node layout per variable: 12 path nodes, then (x_t1, x_t2, root) per tree
            let base = r[0] - 14;
            let path = |x: usize, y: usize| base + 3 * x + y;
            let tree = |t: usize, k: usize| base + 12 + 3 * t + k;
            if s[v] == self.majority_positive[v] {
                for x in 0..4 {
                    set[path(x, 1)] = true;
                }
                for t in [0, 2] {
                    set[tree(t, 0)] = true;
                    set[tree(t, 1)] = true;
                }
                set[tree(1, 2)] = true;
            } else {
                for x in 0..4 {
                    set[path(x, 0)] = true;
                    set[path(x, 2)] = true;
                }
                set[tree(1, 0)] = true;
                set[tree(1, 1)] = true;
                set[tree(0, 2)] = true;
                set[tree(2, 2)] = true;
            }
        }
        for (ci, nodes) in self.clause_nodes.iter().enumerate() {
            if let Some(j) = (0..2).find(|&j| !set[self.clause_roots[ci][j]]) {
                set[nodes[j]] = true;
            }
        }
        set
    }

    /// `s(v)` is true iff no root of an unnegated literal of `v` is in the set.
    pub fn extract_assignment(&self, set: &[bool]) -> Vec<bool> {
        self.roots
            .iter()
            .zip(&self.majority_positive)
            .map(|(r, &maj)| {
                let positive: &[usize] = if maj { &[r[0], r[2]] } else { &[r[1]] };
                positive.iter().all(|&n| !set[n])
            })
            .collect()
    }
}

/// `K ↦ K + c·L` for the constant-dropping transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdMap {
    pub c: usize,
    pub l: Weight,
}

impl ThresholdMap {
    pub fn apply(&self, k: Weight) -> Result<Weight> {
        if k.is_negative() {
            return Err(Error::domain("thresholds must be non-negative"));
        }
        Ok(k + self.l * Weight::from_integer(self.c as i64))
    }
}

/// Removes the constant constraints from `inst`, using the non-1-valid
/// relation `rel_name` (whose maximal tuples have a single zero) to force
/// zeros and heavy weights to force ones.
pub fn drop_constants(inst: &Instance, rel_name: &str) -> Result<(Instance, ThresholdMap)> {
    let r = inst
        .relations
        .get(rel_name)
        .ok_or_else(|| Error::reference(format!("unknown relation {rel_name}")))?
        .clone();
    if r.is_1_valid() {
        return Err(Error::domain(format!("{rel_name} is 1-valid")));
    }
    if r == c0() || r == c1() {
        return Err(Error::domain("the forcing relation must not be a constant"));
    }
    let n = r.arity();
    let t = r
        .codes()
        .max_by_key(|c| (c.count_ones(), *c))
        .ok_or_else(|| Error::domain(format!("{rel_name} is empty")))?;
    if t.count_ones() as usize != n - 1 {
        return Err(Error::domain(format!(
            "the maximal tuples of {rel_name} have more than one zero"
        )));
    }
    let zero = n - (!t & ((1 << n) - 1)).trailing_zeros() as usize;
    let l = Weight::from_integer(1) + inst.total_weight();
    let mut out = Instance {
        bound: inst.bound,
        ..Instance::default()
    };
    for (name, rel) in &inst.relations {
        if *rel != c0() && *rel != c1() {
            out.add_relation(name, rel.clone());
        }
    }
    for (nm, w) in inst.names.iter().zip(&inst.weights) {
        out.add_var(nm, *w)?;
    }
    let mut forced_one = vec![false; inst.len()];
    let mut fresh = 0;
    for c in &inst.constraints {
        let rel = inst.relation(c);
        if *rel == c1() {
            forced_one[c.scope[0]] = true;
        } else if *rel == c0() {
            let v = c.scope[0];
            let mut scope = Vec::with_capacity(n);
            for i in 1..=n {
                if i == zero {
                    scope.push(v);
                } else {
                    fresh += 1;
                    let u = out.add_var(&format!("{}#c0.{fresh}", inst.names[v]), Weight::zero())?;
                    forced_one.push(true);
                    scope.push(u);
                }
            }
            out.add_constraint(rel_name, scope)?;
        } else {
            out.add_constraint(&c.relation, c.scope.clone())?;
        }
    }
    let mut count = 0;
    for (v, &f) in forced_one.iter().enumerate() {
        if f {
            out.weights[v] += l;
            count += 1;
        }
    }
    debug_assert_eq!(extract(t, n, &[zero]), 0);
    Ok((out, ThresholdMap { c: count, l }))
}

/// Seeded generators for randomized checks.
pub mod random {
    use super::*;
    use rand::Rng;

    use crate::relation::{at_most_one, neq, or2};

    fn with_vars(rng: &mut impl Rng, n: usize, max_w: i64) -> Instance {
        let mut inst = Instance::new();
        for i in 0..n {
            inst.add_var(&format!("v{}", i + 1), Weight::from_integer(rng.gen_range(0..=max_w)))
                .expect("fresh name");
        }
        inst
    }

    fn pick_scope(rng: &mut impl Rng, occ: &mut [usize], arity: usize, cap: usize) -> Option<Vec<usize>> {
        let free: Vec<usize> = (0..occ.len()).filter(|&v| occ[v] < cap).collect();
        if free.len() < arity {
            return None;
        }
        let mut scope = Vec::with_capacity(arity);
        while scope.len() < arity {
            let v = free[rng.gen_range(0..free.len())];
            if !scope.contains(&v) {
                scope.push(v);
            }
        }
        for &v in &scope {
            occ[v] += 1;
        }
        Some(scope)
    }

    /// NAND² and NAND³ clauses with every variable occurring at most `l`
    /// times.
    pub fn nand_instance(rng: &mut impl Rng, n: usize, l: usize) -> Instance {
        let mut inst = with_vars(rng, n, 9);
        inst.add_relation("NAND2", nand(2));
        inst.add_relation("NAND3", nand(3));
        let mut occ = vec![0; n];
        for _ in 0..rng.gen_range(1..=2 * n) {
            let m = rng.gen_range(2..=3usize);
            if let Some(s) = pick_scope(rng, &mut occ, m, l) {
                inst.add_constraint(&format!("NAND{m}"), s).expect("valid");
            }
        }
        inst.bound = Some(l);
        inst
    }

    /// Relations from Q, every variable occurring at most twice.
    pub fn q_instance(rng: &mut impl Rng, n: usize) -> Instance {
        let mut inst = with_vars(rng, n, 9);
        let pool: Vec<(&str, Relation)> = vec![
            ("NAND2", nand(2)),
            ("AMO3", at_most_one(3).expect("arity 3")),
            ("IMPL", impl_rel()),
            ("EQ2", eq(2)),
            ("NEQ", neq()),
            ("C0", c0()),
            ("C1", c1()),
            ("AMO3F", Relation::from_strs(3, &["011", "111", "001", "010"]).expect("literal")),
        ];
        for (name, r) in &pool {
            inst.add_relation(name, r.clone());
        }
        let mut occ = vec![0; n];
        for _ in 0..rng.gen_range(1..=n + 2) {
            let (name, r) = &pool[rng.gen_range(0..pool.len())];
            if let Some(s) = pick_scope(rng, &mut occ, r.arity(), 2) {
                inst.add_constraint(name, s).expect("valid");
            }
        }
        inst.bound = Some(2);
        inst
    }

    /// Mixed binary and ternary relations with occurrences up to `cap`.
    pub fn mixed_instance(rng: &mut impl Rng, n: usize, cap: usize) -> Instance {
        let mut inst = with_vars(rng, n, 9);
        let pool: Vec<(&str, Relation)> = vec![
            ("NAND2", nand(2)),
            ("OR2", or2()),
            ("IMPL", impl_rel()),
            ("EQ3", eq(3)),
            ("C1", c1()),
        ];
        for (name, r) in &pool {
            inst.add_relation(name, r.clone());
        }
        let mut occ = vec![0; n];
        for _ in 0..rng.gen_range(1..=2 * n) {
            let (name, r) = &pool[rng.gen_range(0..pool.len())];
            if let Some(s) = pick_scope(rng, &mut occ, r.arity(), cap) {
                inst.add_constraint(name, s).expect("valid");
            }
        }
        inst
    }

    /// A graph with maximum degree at most `k`.
    pub fn graph(rng: &mut impl Rng, n: usize, k: usize) -> WeightedGraph {
        let mut g = WeightedGraph::default();
        for i in 0..n {
            g.add_node(&format!("n{}", i + 1), Weight::from_integer(rng.gen_range(1..=5)));
        }
        let mut deg = vec![0; n];
        for _ in 0..2 * n {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && deg[a] < k && deg[b] < k && !g.edges.iter().any(|&e| e == (a, b) || e == (b, a)) {
                g.add_edge(a, b).expect("no loop");
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::or2;

    fn w(n: i64) -> Weight {
        Weight::from_integer(n)
    }

    fn inst(text: &str) -> Instance {
        Instance::parse(text, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn exact_examples() {
        let i = inst("var x weight 1\nvar y weight 1\ncon NAND2 x y\n");
        let s = solve_exact(&i).unwrap().unwrap();
        assert_eq!(s.measure, w(1));
        assert_eq!(s.assignment, vec![true, false]);
        let i = inst("var x weight 5\ncon C1 x\n");
        assert_eq!(solve_exact(&i).unwrap().unwrap().measure, w(5));
        let i = inst("var x weight 5\ncon C0 x\ncon C1 x\n");
        assert!(solve_exact(&i).unwrap().is_none());
        let i = inst("var x weight 1/2\nvar y weight 0.25\n");
        assert_eq!(solve_exact(&i).unwrap().unwrap().measure, Weight::new(3, 4));
    }

    #[test]
    fn greedy_examples() {
        let i = inst("var x weight 3\nvar y weight 1\ncon NAND2 x y\n");
        let s = greedy_apx(&i, 1).unwrap();
        assert_eq!((s.assignment.clone(), s.measure), (vec![true, false], w(3)));
        let i = inst("var x\nvar y\nvar z\ncon NAND3 x y z\n");
        assert_eq!(greedy_apx(&i, 1).unwrap().measure, w(2));
        let i = inst("var x\nvar y\ncon IMPL x y\n");
        assert!(matches!(greedy_apx(&i, 2), Err(Error::Domain(_))));
        let i = inst("var x weight 2\nvar y\nvar z\ncon C1 x\ncon NAND3 x y z\n");
        let s = greedy_apx(&i, 2).unwrap();
        assert_eq!(s.measure, w(3));
    }

    #[test]
    fn ilp2_examples() {
        let m = to_ilp2(&inst("var x\nvar y\ncon NAND2 x y\n")).unwrap();
        assert_eq!(m.rows, vec![Ilp2Row { coeffs: vec![(0, 1), (1, 1)], lo: None, hi: Some(1) }]);
        let m = to_ilp2(&inst("var x\nvar y\ncon IMPL x y\n")).unwrap();
        assert_eq!(m.rows, vec![Ilp2Row { coeffs: vec![(0, 1), (1, -1)], lo: None, hi: Some(0) }]);
        for (x, y) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(m.satisfies(&[x, y]), !x || y);
        }
        let m = to_ilp2(&inst("var x\nvar y\ncon NEQ x y\n")).unwrap();
        assert!(m.satisfies(&[true, false]) && m.satisfies(&[false, true]));
        assert!(!m.satisfies(&[true, true]) && !m.satisfies(&[false, false]));
        assert!(matches!(to_ilp2(&inst("var x\nvar y\nvar z\ncon EQ3 x y z\n")), Err(Error::Domain(_))));
        let thrice = inst("var x\nvar y\ncon NAND2 x y\ncon NAND2 x y\ncon NAND2 x y\n");
        assert!(matches!(to_ilp2(&thrice), Err(Error::Domain(_))));
        let m = to_ilp2(&inst("var x weight 2\nvar y\ncon C1 x\ncon NAND2 x y\n")).unwrap();
        assert_eq!(solve_ilp2(&m).unwrap().unwrap().measure, w(2));
    }

    #[test]
    fn cycle_reduction_links_copies() {
        let env = ConstraintLanguage::from_relations("l", [("NAND2", nand(2)), ("OR2", or2())]);
        let g = Gadget::parse("gadget target=IMPL k=3 primaries=2 aux=1\nNAND2 x1 y1\nOR2 y1 x2\n").unwrap();
        let mut i = inst("var a weight 3\nvar b weight 2\nvar c\n");
        i.add_relation("OR2", or2());
        i.add_relation("NAND2", nand(2));
        for other in [1, 2, 1, 2] {
            i.add_constraint("OR2", vec![0, other]).unwrap();
        }
        let out = cycle_reduction(&i, LinkKind::Impl, &g, &env).unwrap();
        assert!(out.max_occurrence() <= 3);
        assert_eq!(out.names[1], "a#2");
        let before = solve_exact(&i).unwrap().unwrap().measure;
        let after = solve_exact(&out).unwrap().unwrap();
        assert_eq!(before, after.measure);
        let copies: Vec<bool> = (0..out.len())
            .filter(|&v| out.names[v] == "a" || out.names[v].starts_with("a#") && !out.names[v].contains('.'))
            .map(|v| after.assignment[v])
            .collect();
        assert_eq!(copies.len(), 4);
        assert!(copies.iter().all(|&b| b == copies[0]));
        let bad = Gadget::parse("gadget target=IMPL k=3 primaries=2 aux=0\nNAND2 x1 x2\n").unwrap();
        assert!(matches!(cycle_reduction(&i, LinkKind::Impl, &bad, &env), Err(Error::Reference(_))));
    }

    #[test]
    fn mis_examples() {
        let tri = WeightedGraph::parse("node a\nnode b\nnode c\nedge a b\nedge b c\nedge a c\n").unwrap();
        assert_eq!(solve_exact(&mis_to_maxones(&tri, 2).unwrap()).unwrap().unwrap().measure, w(1));
        assert!(matches!(mis_to_maxones(&tri, 1), Err(Error::Domain(_))));
        let e = WeightedGraph::parse("node a weight 2\nnode b weight 3\nedge a b\n").unwrap();
        assert_eq!(solve_exact(&mis_to_maxones(&e, 1).unwrap()).unwrap().unwrap().measure, w(3));
        let p = WeightedGraph::parse("node a\nnode b\nnode c\nedge a b\nedge b c\n").unwrap();
        assert_eq!(solve_exact(&mis_to_maxones(&p, 2).unwrap()).unwrap().unwrap().measure, w(2));
    }

    #[test]
    fn isolated_gadget_optimum() {
        let f = Formula::parse("clause 1 -1\n").unwrap();
        let ch = max2sat3_gadget_chain(&f).unwrap();
        let mut g = ch.graph.clone();
        g.names.truncate(21);
        g.weights.truncate(21);
        g.edges.retain(|&(a, b)| a < 21 && b < 21);
        let opt = solve_exact(&mis_to_maxones(&g, 3).unwrap()).unwrap().unwrap();
        assert_eq!(opt.measure, w(GADGET_OPTIMUM));
        let weights: Vec<Weight> = ch.graph.weights[..21].to_vec();
        assert_eq!(weights.iter().filter(|&&x| x == Weight::new(9, 4)).count(), 4);
        assert_eq!(weights.iter().filter(|&&x| x == w(2)).count(), 2);
        for s in [true, false] {
            let set = ch.consistent_solution(&[s]);
            assert!(ch.graph.is_independent(&set));
            assert_eq!(g.weight_of(&set[..21]), w(GADGET_OPTIMUM));
            assert_eq!(ch.extract_assignment(&set), vec![s]);
        }
        assert!(ch.instance.max_occurrence() <= 2);
    }

    #[test]
    fn chain_instance_matches_graph() {
        let f = Formula::parse("clause 1 2\nclause -1 -2\nclause 1 -2\n").unwrap();
        let ch = max2sat3_gadget_chain(&f).unwrap();
        let mis = solve_exact(&mis_to_maxones(&ch.graph, 3).unwrap()).unwrap().unwrap();
        let cover = solve_exact(&ch.instance).unwrap().unwrap();
        assert_eq!(mis.measure, cover.measure);
        assert_eq!(mis.measure, w(2 * GADGET_OPTIMUM) + w(f.max_satisfied().unwrap() as i64));
    }

    #[test]
    fn drop_constants_example() {
        let mut i = inst("var x\nvar y\ncon C1 x\ncon NAND2 x y\n");
        i.add_relation("NAND2", nand(2));
        let (out, map) = drop_constants(&i, "NAND2").unwrap();
        assert!(out.constraints.iter().all(|c| c.relation == "NAND2"));
        let before = solve_exact(&i).unwrap().unwrap().measure;
        let after = solve_exact(&out).unwrap().unwrap();
        assert_eq!(after.assignment, vec![true, false]);
        for k in 0..=3 {
            let k = w(k);
            assert_eq!(before >= k, after.measure >= map.apply(k).unwrap());
        }
        let mut one = inst("var x\ncon OR2 x x\n");
        one.add_relation("OR2", or2());
        assert!(matches!(drop_constants(&one, "OR2"), Err(Error::Domain(_))));
    }
}
