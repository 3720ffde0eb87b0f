//! k-representations (gadgets): verification, the constructive gadgets,
//! a bounded search, and the catalog of ternary non-Δ-matroid relations.

use std::fmt;

use crate::clone::{coclone_member, h_function, is_invariant, BoolFunction, CoCloneLabel, ConstraintLanguage};
use crate::delta::{delta_matroid_witness, is_delta_matroid, DeltaWitness};
use crate::error::{Error, Result};
use crate::relation::{c0, c1, extract, nand, permute, project, CoordinateSet, Relation};

/// Default cap on the number of full assignments enumerated by
/// [`gadget_relation`].
pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// A gadget variable; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Primary(usize),
    Aux(usize),
}

impl Var {
    pub fn parse(text: &str) -> Option<Var> {
        let (kind, num) = text.split_at(1.min(text.len()));
        let i: usize = num.parse().ok().filter(|&i| i > 0)?;
        match kind {
            "x" => Some(Var::Primary(i)),
            "y" => Some(Var::Aux(i)),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Primary(i) => write!(f, "x{i}"),
            Var::Aux(i) => write!(f, "y{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetConstraint {
    pub relation: String,
    pub scope: Vec<Var>,
}

/// `∃ y1..ym: C1 ∧ ... ∧ Cc` over primaries `x1..xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub target: String,
    pub primary_count: usize,
    pub aux_count: usize,
    pub constraints: Vec<GadgetConstraint>,
    pub cap: usize,
}

impl Gadget {
    pub fn new(target: &str, primary_count: usize, aux_count: usize, cap: usize) -> Self {
        Gadget {
            target: target.to_string(),
            primary_count,
            aux_count,
            constraints: Vec::new(),
            cap,
        }
    }

    pub fn push(&mut self, relation: &str, scope: Vec<Var>) {
        self.constraints.push(GadgetConstraint {
            relation: relation.to_string(),
            scope,
        });
    }

    /// Occurrence counts of primaries and auxiliaries, repeats within one
    /// scope included.
    pub fn occurrences(&self) -> (Vec<usize>, Vec<usize>) {
        let mut p = vec![0; self.primary_count];
        let mut a = vec![0; self.aux_count];
        for c in &self.constraints {
            for v in &c.scope {
                match *v {
                    Var::Primary(i) if i <= p.len() => p[i - 1] += 1,
                    Var::Aux(i) if i <= a.len() => a[i - 1] += 1,
                    _ => {}
                }
            }
        }
        (p, a)
    }

    pub fn check_caps(&self) -> Result<()> {
        let (p, a) = self.occurrences();
        for (i, &n) in p.iter().enumerate() {
            if n > 1 {
                return Err(Error::OccurrenceCap {
                    var: Var::Primary(i + 1).to_string(),
                    count: n,
                    cap: 1,
                });
            }
        }
        for (i, &n) in a.iter().enumerate() {
            if n > self.cap {
                return Err(Error::OccurrenceCap {
                    var: Var::Aux(i + 1).to_string(),
                    count: n,
                    cap: self.cap,
                });
            }
        }
        Ok(())
    }

    fn check_scopes<'e>(&self, env: &'e ConstraintLanguage) -> Result<Vec<&'e Relation>> {
        let mut rels = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let r = env
                .get(&c.relation)
                .ok_or_else(|| Error::reference(format!("unknown relation {}", c.relation)))?;
            if r.arity() != c.scope.len() {
                return Err(Error::arg(format!(
                    "{} has arity {} but scope has {} variables",
                    c.relation,
                    r.arity(),
                    c.scope.len()
                )));
            }
            for v in &c.scope {
                let ok = match *v {
                    Var::Primary(i) => i <= self.primary_count,
                    Var::Aux(i) => i <= self.aux_count,
                };
                if !ok {
                    return Err(Error::reference(format!("undeclared variable {v}")));
                }
            }
            rels.push(r);
        }
        Ok(rels)
    }

    /// Parses the text form:
    /// `gadget target=NAME k=K primaries=N aux=M` then `REL v v ...` lines.
    pub fn parse(text: &str) -> Result<Gadget> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty gadget"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("gadget") {
            return Err(Error::parse(hl, "expected 'gadget' header"));
        }
        let (mut target, mut k, mut n, mut m) = (None, None, None, None);
        for w in words {
            let (key, val) = w
                .split_once('=')
                .ok_or_else(|| Error::parse(hl, format!("bad header field {w}")))?;
            let num = || val.parse::<usize>().map_err(|_| Error::parse(hl, format!("bad number in {w}")));
            match key {
                "target" => target = Some(val.to_string()),
                "k" => k = Some(num()?),
                "primaries" => n = Some(num()?),
                "aux" => m = Some(num()?),
                _ => return Err(Error::parse(hl, format!("unknown header field {key}"))),
            }
        }
        let missing = |f: &str| Error::parse(hl, format!("header lacks {f}"));
        let mut g = Gadget::new(
            &target.ok_or_else(|| missing("target"))?,
            n.ok_or_else(|| missing("primaries"))?,
            m.ok_or_else(|| missing("aux"))?,
            k.ok_or_else(|| missing("k"))?,
        );
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let rel = it.next().expect("non-empty line");
            let scope = it
                .map(|v| Var::parse(v).ok_or_else(|| Error::parse(ln, format!("bad variable {v}"))))
                .collect::<Result<Vec<_>>>()?;
            if scope.is_empty() {
                return Err(Error::parse(ln, "constraint without variables"));
            }
            g.push(rel, scope);
        }
        Ok(g)
    }
}

impl fmt::Display for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "gadget target={} k={} primaries={} aux={}",
            self.target, self.cap, self.primary_count, self.aux_count
        )?;
        for c in &self.constraints {
            f.write_str(&c.relation)?;
            for v in &c.scope {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn var_index(v: Var, n: usize) -> usize {
    match v {
        Var::Primary(i) => i,
        Var::Aux(i) => n + i,
    }
}

/// The relation defined on the primaries, by enumerating every full
/// assignment. Caps are not checked here.
pub fn gadget_relation(g: &Gadget, env: &ConstraintLanguage, budget: u64) -> Result<Relation> {
    let rels = g.check_scopes(env)?;
    let (n, m) = (g.primary_count, g.aux_count);
    let total = n + m;
    if total >= 63 || (1u64 << total) > budget {
        return Err(Error::capacity(format!(
            "gadget has {total} variables, beyond the enumeration budget {budget}"
        )));
    }
    if n == 0 {
        return Err(Error::arg("gadget without primaries"));
    }
    let scopes: Vec<Vec<usize>> = g
        .constraints
        .iter()
        .map(|c| c.scope.iter().map(|&v| var_index(v, n)).collect())
        .collect();
    let mut out = Vec::new();
    for p in 0u32..1 << n {
        let hit = (0u32..1 << m).any(|a| {
            let code = (p << m) | a;
            rels.iter()
                .zip(&scopes)
                .all(|(r, s)| r.contains_code(extract(code, total, s)))
        });
        if hit {
            out.push(p);
        }
    }
    Relation::from_codes(n, out)
}

/// Whether `g` is a cap-respecting representation of `target`.
///
/// Unknown relation names give a reference error, cap violations an
/// [`Error::OccurrenceCap`], and a semantic mismatch `Ok(false)`.
pub fn verify_gadget(target: &Relation, g: &Gadget, env: &ConstraintLanguage) -> Result<bool> {
    g.check_scopes(env)?;
    if g.primary_count != target.arity() {
        return Err(Error::arg(format!(
            "gadget has {} primaries, target arity is {}",
            g.primary_count,
            target.arity()
        )));
    }
    g.check_caps()?;
    Ok(gadget_relation(g, env, DEFAULT_BUDGET)? == *target)
}

/// Which binary relation a derivation produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkKind {
    Eq2,
    Impl,
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkKind::Eq2 => "EQ2",
            LinkKind::Impl => "IMPL",
        })
    }
}

/// `{"R": r, "C0", "C1"}`.
pub fn derivation_env(r: &Relation) -> ConstraintLanguage {
    ConstraintLanguage::from_relations("derivation", [("R", r.clone()), ("C0", c0()), ("C1", c1())])
}

/// A 3-representation of EQ² or IMPL from a relation in IE₂ outside the
/// IS₁₂ chain, over [`derivation_env`].
pub fn derive_eq_or_impl(r: &Relation) -> Result<(Gadget, LinkKind)> {
    if !coclone_member(r, CoCloneLabel::IE2) || coclone_member(r, CoCloneLabel::IS12Limit) {
        return Err(Error::domain(format!(
            "{r} must lie in IE2 and outside IS12"
        )));
    }
    let n = r.arity();
    let f = BoolFunction::and_or_not();
    let (idx, proj) = (1..=n)
        .flat_map(|size| CoordinateSet::subsets_of_size(n, size))
        .find_map(|s| {
            let p = project(r, &s).expect("valid subset");
            (!is_invariant(&p, &f)).then(|| (s.to_vec(), p))
        })
        .expect("some projection fails f");
    let codes: Vec<u32> = proj.codes().collect();
    let w = idx.len();
    let col = |c: u32, i: usize| (c >> (w - 1 - i)) & 1;
    let mut triple = None;
    'outer: for &a in &codes {
        for &b in &codes {
            for &c in &codes {
                if !proj.contains_code(a & (b | !c) & ((1 << w) - 1)) {
                    triple = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }
    let (t1, t2, t3) = triple.expect("failing triple exists");
    let pattern = |i: usize| (col(t1, i), col(t2, i), col(t3, i));
    let l1 = (0..w).find(|&i| pattern(i) == (1, 0, 1)).expect("coordinate l1");
    let l2 = (0..w).find(|&i| pattern(i) == (1, 0, 0)).expect("coordinate l2");

    let build = |swap: bool| {
        let (px, py) = if swap { (2, 1) } else { (1, 2) };
        let mut g = Gadget::new("", 2, 0, 3);
        let mut scope = Vec::with_capacity(n);
        let mut consts = Vec::new();
        for coord in 1..=n {
            match idx.iter().position(|&c| c == coord) {
                Some(i) if i == l1 => scope.push(Var::Primary(px)),
                Some(i) if i == l2 => scope.push(Var::Primary(py)),
                Some(i) => {
                    g.aux_count += 1;
                    scope.push(Var::Aux(g.aux_count));
                    let (a, b, c) = pattern(i);
                    let k = a == 1 && (b == 1 || c == 0);
                    consts.push((if k { "C1" } else { "C0" }, g.aux_count));
                }
                None => {
                    g.aux_count += 1;
                    scope.push(Var::Aux(g.aux_count));
                }
            }
        }
        g.push("R", scope);
        for (name, a) in consts {
            g.push(name, vec![Var::Aux(a)]);
        }
        g
    };
    let env = derivation_env(r);
    let mut g = build(false);
    let got = gadget_relation(&g, &env, DEFAULT_BUDGET)?;
    let kind = if got == crate::relation::eq(2) {
        LinkKind::Eq2
    } else if got == Relation::from_strs(2, &["00", "10", "11"]).expect("literal") {
        g = build(true);
        LinkKind::Impl
    } else {
        panic!("derived relation {got} is neither EQ2 nor a reversed IMPL");
    };
    g.target = kind.to_string();
    let target = match kind {
        LinkKind::Eq2 => crate::relation::eq(2),
        LinkKind::Impl => crate::relation::impl_rel(),
    };
    assert!(verify_gadget(&target, &g, &env).expect("well-formed"), "derived gadget fails verification");
    Ok((g, kind))
}

/// The first size-`m` coordinate set (lexicographic) whose projection is
/// NAND^m, for `R` invariant under h_m but not h_{m-1}.
pub fn derive_nand_m(r: &Relation, m: usize) -> Result<CoordinateSet> {
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    if !is_invariant(r, &h_function(m)?) || is_invariant(r, &h_function(m - 1)?) {
        return Err(Error::domain(format!(
            "{r} must be invariant under h_{m} and not under h_{}",
            m - 1
        )));
    }
    let target = nand(m);
    CoordinateSet::subsets_of_size(r.arity(), m)
        .into_iter()
        .find(|s| project(r, s).expect("valid subset") == target)
        .ok_or_else(|| Error::domain(format!("no projection of {r} equals NAND{m}")))
}

/// The 2-representation behind a projection: coordinates in `coords` become
/// the primaries (in order), the rest single-use auxiliaries.
pub fn projection_gadget(rel_name: &str, arity: usize, coords: &CoordinateSet, target: &str) -> Gadget {
    let mut g = Gadget::new(target, coords.len(), arity - coords.len(), 2);
    let mut aux = 0;
    let scope = (1..=arity)
        .map(|i| match coords.iter().position(|c| c == i) {
            Some(p) => Var::Primary(p + 1),
            None => {
                aux += 1;
                Var::Aux(aux)
            }
        })
        .collect();
    g.push(rel_name, scope);
    g
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_aux: usize,
    pub max_constraints: usize,
    pub node_budget: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_aux: 2,
            max_constraints: 3,
            node_budget: 4_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found,
    /// Every gadget within the bounds was tried; this does not prove that
    /// no representation exists.
    Exhausted,
    BudgetHit,
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchOutcome::Found => "found",
            SearchOutcome::Exhausted => "exhausted",
            SearchOutcome::BudgetHit => "budget",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub gadget: Option<Gadget>,
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

struct Candidate {
    rel: usize,
    scope: Vec<usize>,
    sat: Vec<u64>,
}

struct Search<'a> {
    n: usize,
    m: usize,
    cap: usize,
    target: u64,
    cands: Vec<Candidate>,
    nodes: u64,
    budget: u64,
    picked: Vec<usize>,
    occ: Vec<usize>,
    _env: &'a ConstraintLanguage,
}

fn words_for(total: usize) -> usize {
    (1usize << total).div_ceil(64)
}

fn projection_mask(sat: &[u64], n: usize, m: usize) -> u64 {
    let block = 1usize << m;
    let mut mask = 0u64;
    for p in 0..1usize << n {
        let lo = p * block;
        let hit = (lo..lo + block).any(|i| sat[i / 64] >> (i % 64) & 1 == 1);
        if hit {
            mask |= 1 << p;
        }
    }
    mask
}

impl Search<'_> {
    /// Returns `Some(found)` when finished, `None` when out of budget.
    fn dfs(&mut self, start: usize, left: usize, sat: &[u64]) -> Option<bool> {
        if left == 0 {
            let all_used = self.occ[self.n..].iter().all(|&c| c > 0);
            return Some(all_used && projection_mask(sat, self.n, self.m) == self.target);
        }
        for ci in start..self.cands.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let c = &self.cands[ci];
            let mut over = false;
            for &v in &c.scope {
                self.occ[v] += 1;
            }
            for (v, &cnt) in self.occ.iter().enumerate() {
                let cap = if v < self.n { 1 } else { self.cap };
                if cnt > cap {
                    over = true;
                }
            }
            let next: Vec<u64> = sat.iter().zip(&c.sat).map(|(a, b)| a & b).collect();
            let changed = next != sat;
            let ok = !over
                && changed
                && projection_mask(&next, self.n, self.m) & self.target == self.target;
            if ok {
                self.picked.push(ci);
                match self.dfs(ci, left - 1, &next) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.picked.pop();
            }
            for &v in &self.cands[ci].scope {
                self.occ[v] -= 1;
            }
        }
        Some(false)
    }
}

/// Searches for a `k`-representation of `target` over `env`, trying gadgets
/// by (constraint count, aux count) and returning the first hit.
pub fn search_gadget(
    target_name: &str,
    target: &Relation,
    env: &ConstraintLanguage,
    k: usize,
    bounds: SearchBounds,
) -> Result<SearchResult> {
    if bounds.max_aux > 6 {
        return Err(Error::arg("search is limited to 6 auxiliary variables"));
    }
    let n = target.arity();
    if n > 6 {
        return Err(Error::capacity("search targets are limited to arity 6"));
    }
    let target_mask = target.small_mask().expect("arity ≤ 6");
    let rels: Vec<(&str, &Relation)> = env.iter().collect();
    let mut nodes = 0;
    for c in 1..=bounds.max_constraints {
        for m in 0..=bounds.max_aux {
            let total = n + m;
            let mut cands = Vec::new();
            for (ri, (_, r)) in rels.iter().enumerate() {
                let a = r.arity();
                if (total as u32).pow(a as u32) > 1 << 20 {
                    continue;
                }
                for s in 0..total.pow(a as u32) {
                    let scope: Vec<usize> = (0..a)
                        .rev()
                        .map(|j| (s / total.pow(j as u32)) % total)
                        .collect();
                    let mut sat = vec![0u64; words_for(total)];
                    let coords: Vec<usize> = scope.iter().map(|v| v + 1).collect();
                    for code in 0u32..1 << total {
                        if r.contains_code(extract(code, total, &coords)) {
                            sat[code as usize / 64] |= 1 << (code % 64);
                        }
                    }
                    cands.push(Candidate { rel: ri, scope, sat });
                }
            }
            let mut full = vec![u64::MAX; words_for(total)];
            if (1usize << total) < 64 {
                full[0] = (1u64 << (1 << total)) - 1;
            }
            let mut st = Search {
                n,
                m,
                cap: k,
                target: target_mask,
                cands,
                nodes: 0,
                budget: bounds.node_budget.saturating_sub(nodes),
                picked: Vec::new(),
                occ: vec![0; total],
                _env: env,
            };
            let res = st.dfs(0, c, &full);
            nodes += st.nodes;
            match res {
                None => {
                    return Ok(SearchResult {
                        gadget: None,
                        outcome: SearchOutcome::BudgetHit,
                        nodes,
                    })
                }
                Some(true) => {
                    let mut g = Gadget::new(target_name, n, m, k);
                    for &ci in &st.picked {
                        let cand = &st.cands[ci];
                        let scope = cand
                            .scope
                            .iter()
                            .map(|&v| if v < n { Var::Primary(v + 1) } else { Var::Aux(v - n + 1) })
                            .collect();
                        g.push(rels[cand.rel].0, scope);
                    }
                    assert!(verify_gadget(target, &g, env)?, "search produced an invalid gadget");
                    return Ok(SearchResult {
                        gadget: Some(g),
                        outcome: SearchOutcome::Found,
                        nodes,
                    });
                }
                Some(false) => {}
            }
        }
    }
    Ok(SearchResult {
        gadget: None,
        outcome: SearchOutcome::Exhausted,
        nodes,
    })
}

/// How an entry of the ternary catalog is shown to be hard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogTag {
    NotInIE2,
    SelfEq3,
    WithNand2Eq3,
    SeeImplTable,
    SpecialABC1,
    SpecialABC5,
}

impl fmt::Display for CatalogTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CatalogTag::NotInIE2 => "not-in-IE2",
            CatalogTag::SelfEq3 => "eq3",
            CatalogTag::WithNand2Eq3 => "eq3-with-nand2",
            CatalogTag::SeeImplTable => "implements",
            CatalogTag::SpecialABC1 => "abc1",
            CatalogTag::SpecialABC5 => "abc5",
        })
    }
}

use CatalogTag::*;

const CATALOG: [(&str, &str, CatalogTag); 30] = [
    ("1", "111 000", SelfEq3),
    ("2", "110 001", NotInIE2),
    ("A1", "000 111 010", SelfEq3),
    ("A2", "100 011 110", NotInIE2),
    ("A3", "010 101 000", SeeImplTable),
    ("A4", "110 001 100", NotInIE2),
    ("A5", "101 010 111", WithNand2Eq3),
    ("A6", "111 000 101", SelfEq3),
    ("C1", "000 111 011", SelfEq3),
    ("C2", "100 011 111", WithNand2Eq3),
    ("C3", "010 101 001", NotInIE2),
    ("C4", "110 001 101", NotInIE2),
    ("C5", "011 100 011", NotInIE2),
    ("C6", "111 000 100", SelfEq3),
    ("BC1", "000 111 001 011", SelfEq3),
    ("BC2", "100 011 101 111", NotInIE2),
    ("BC3", "010 101 011 001", NotInIE2),
    ("BC4", "001 110 000 010", SeeImplTable),
    ("AB1", "000 111 010 001", SeeImplTable),
    ("AB2", "100 011 110 101", NotInIE2),
    ("AB3", "010 101 000 011", NotInIE2),
    ("AB4", "110 001 100 111", NotInIE2),
    ("AB5", "011 100 001 010", NotInIE2),
    ("AB6", "111 000 101 110", NotInIE2),
    ("ABC1", "000 111 010 001 011", SpecialABC1),
    ("ABC2", "100 011 110 101 111", NotInIE2),
    ("ABC3", "010 101 000 011 001", SeeImplTable),
    ("ABC4", "110 001 100 111 101", NotInIE2),
    ("ABC5", "011 100 001 010 000", SpecialABC5),
    ("ABC6", "111 000 101 110 100", SeeImplTable),
];

/// Implementations between catalog entries: (source, printed target,
/// gadget text).
const IMPL_TABLE: [(&str, &str, &str); 5] = [
    ("A3", "ABC5", "gadget target=ABC5 k=2 primaries=3 aux=1\nA3 x1 y1 x3\nNAND2 y1 x2\n"),
    (
        "AB1",
        "ABC5",
        "gadget target=ABC5 k=2 primaries=3 aux=2\nAB1 x1 y1 y2\nNAND2 y1 x2\nNAND2 y2 x3\n",
    ),
    ("BC4", "ABC5", "gadget target=ABC5 k=2 primaries=3 aux=1\nBC4 x1 y1 x2\nNAND2 y1 x3\n"),
    ("ABC3", "ABC5", "gadget target=ABC5 k=2 primaries=3 aux=1\nABC3 x1 y1 x3\nNAND2 y1 x2\n"),
    ("ABC6", "ABC1", "gadget target=ABC1 k=2 primaries=3 aux=1\nABC6 y1 x2 x3\nNAND2 y1 x1\n"),
];

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Tuples exactly as listed in the source table.
    pub tuples: &'static str,
    pub relation: Relation,
    pub tag: CatalogTag,
}

pub fn catalog() -> Vec<CatalogEntry> {
    CATALOG
        .iter()
        .map(|&(name, tuples, tag)| {
            let list: Vec<&str> = tuples.split_whitespace().collect();
            CatalogEntry {
                name,
                tuples,
                relation: Relation::from_strs(3, &list).expect("catalog literal"),
                tag,
            }
        })
        .collect()
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// `NAND²(x1,x2) ∧ NAND²(x2,x3)`.
pub fn nand_chain() -> Relation {
    Relation::from_predicate(3, |c| c & 0b110 != 0b110 && c & 0b011 != 0b011).expect("arity 3")
}

/// Matches a ternary relation against the catalog up to a coordinate
/// permutation. Returns the entry and `f` with `permute(entry, f) == r`.
pub fn match_catalog(r: &Relation) -> Option<(CatalogEntry, [usize; 3])> {
    if r.arity() != 3 {
        return None;
    }
    catalog().into_iter().find_map(|e| {
        let f = PERMS3.iter().map(|p| [p[0] + 1, p[1] + 1, p[2] + 1]).find(|f| {
            permute(&e.relation, f).expect("permutation") == *r
        })?;
        Some((e, f))
    })
}

fn eq3_cycle(name: &str, perm: &[usize; 3], with_nand: bool) -> Gadget {
    let aux = if with_nand { 6 } else { 3 };
    let mut g = Gadget::new("EQ3", 3, aux, 2);
    for i in 1..=3 {
        let next = i % 3 + 1;
        let base = if with_nand {
            [Var::Aux(i), Var::Primary(i), Var::Aux(3 + i)]
        } else {
            [Var::Aux(i), Var::Primary(i), Var::Aux(next)]
        };
        g.push(name, perm.iter().map(|&j| base[j]).collect());
        if with_nand {
            g.push("NAND2", vec![Var::Aux(3 + i), Var::Aux(next)]);
        }
    }
    g
}

#[derive(Clone, Debug)]
pub struct EntryCheck {
    pub name: &'static str,
    pub tag: CatalogTag,
    pub checks: Vec<(String, bool)>,
    pub gadget: Option<Gadget>,
    pub note: Option<String>,
}

impl EntryCheck {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogReport {
    pub entries: Vec<EntryCheck>,
}

impl CatalogReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.entries.len()
    }

    pub fn summary(&self) -> String {
        format!("{}/{} entries verified", self.passed(), self.entries.len())
    }
}

impl fmt::Display for CatalogReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let checks: Vec<String> = e
                .checks
                .iter()
                .map(|(c, ok)| format!("{c}={}", if *ok { "ok" } else { "FAIL" }))
                .collect();
            write!(f, "{:<5} {:<15} {}", e.name, e.tag.to_string(), checks.join(" "))?;
            if let Some(n) = &e.note {
                write!(f, "  ({n})")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "{}", self.summary())
    }
}

fn entry_env(e: &CatalogEntry) -> ConstraintLanguage {
    let mut env = ConstraintLanguage::from_relations("catalog", [(e.name, e.relation.clone())]);
    env.insert("NAND2", nand(2));
    env
}

fn check_entry(e: &CatalogEntry) -> EntryCheck {
    let mut checks = vec![("non-delta".to_string(), !is_delta_matroid(&e.relation))];
    let mut gadget = None;
    let mut note = None;
    let env = entry_env(e);
    let eq3 = crate::relation::eq(3);
    match e.tag {
        NotInIE2 => checks.push(("fails-and".into(), !is_invariant(&e.relation, &BoolFunction::and()))),
        SelfEq3 | WithNand2Eq3 => {
            let with_nand = e.tag == WithNand2Eq3;
            let hit = PERMS3.iter().find_map(|p| {
                let g = eq3_cycle(e.name, p, with_nand);
                verify_gadget(&eq3, &g, &env).ok().filter(|&ok| ok).map(|_| (g, *p))
            });
            checks.push(("eq3-cycle".into(), hit.is_some()));
            if let Some((g, p)) = hit {
                if p != [0, 1, 2] {
                    note = Some(format!("scope order {:?}", p.map(|i| i + 1)));
                }
                gadget = Some(g);
            }
        }
        SeeImplTable => {
            let (_, printed, text) = IMPL_TABLE.iter().find(|(s, _, _)| *s == e.name).expect("table row");
            let literal = Gadget::parse(text).expect("table gadget");
            let abc5 = catalog_entry("ABC5").expect("ABC5").relation;
            let printed_rel = catalog_entry(printed).expect("printed target").relation;
            let attempt = |target: &Relation| {
                PERMS3.iter().find_map(|p| {
                    let mut g = literal.clone();
                    let s = g.constraints[0].scope.clone();
                    g.constraints[0].scope = p.iter().map(|&j| s[j]).collect();
                    verify_gadget(target, &g, &env).ok().filter(|&ok| ok).map(|_| (g, *p))
                })
            };
            let mut hit = attempt(&printed_rel);
            if hit.is_none() && *printed != "ABC5" {
                if let Some((mut g, p)) = attempt(&abc5) {
                    g.target = "ABC5".into();
                    note = Some(format!("implements ABC5; listed target {printed} not reached"));
                    hit = Some((g, p));
                }
            }
            checks.push(("implements".into(), hit.is_some()));
            if let Some((g, p)) = hit {
                if p != [0, 1, 2] {
                    let order = format!("scope order {:?}", p.map(|i| i + 1));
                    note = Some(match note {
                        Some(n) => format!("{n}; {order}"),
                        None => order,
                    });
                }
                gadget = Some(g);
            }
        }
        SpecialABC1 => {
            let r = &e.relation;
            let ok = r.contains_code(0) && r.codes().all(|c| c & 0b100 == 0 || c == 0b111);
            checks.push(("first-forces-all".into(), ok));
        }
        SpecialABC5 => {
            let chain = nand_chain();
            let ok = PERMS3
                .iter()
                .any(|p| permute(&chain, &[p[0] + 1, p[1] + 1, p[2] + 1]).expect("perm") == e.relation);
            checks.push(("nand-chain".into(), ok));
        }
    }
    EntryCheck {
        name: e.name,
        tag: e.tag,
        checks,
        gadget,
        note,
    }
}

pub fn verify_catalog() -> CatalogReport {
    CatalogReport {
        entries: catalog().iter().map(check_entry).collect(),
    }
}

/// The ternary core of a non-Δ-matroid relation together with its
/// 2-representation over `{"R", "C0", "C1"}`.
#[derive(Clone, Debug)]
pub struct NondeltaCore {
    pub witness: DeltaWitness,
    /// Coordinates `k`, `a`, `b` of the source relation.
    pub coords: [usize; 3],
    pub relation: Relation,
    pub gadget: Gadget,
    pub catalog: Option<(&'static str, [usize; 3])>,
}

pub fn extract_nondelta_core(r: &Relation) -> Result<NondeltaCore> {
    let w = delta_matroid_witness(r)
        .ok_or_else(|| Error::domain(format!("{r} is a Δ-matroid relation")))?;
    let n = r.arity();
    let (t, tp, s) = (w.x.code(), w.y.code(), w.x_step.code());
    let coord_of = |bit: u32| n - bit.trailing_zeros() as usize;
    let k = coord_of(t ^ s);
    let x: Vec<usize> = (1..=n).filter(|&i| (t ^ tp) >> (n - i) & 1 == 1).collect();
    let mask_of = |set: &[usize]| set.iter().fold(0u32, |m, &i| m | 1 << (n - i));
    let xp: Vec<usize> = (1..=x.len())
        .flat_map(|size| CoordinateSet::subsets_of_size(x.len(), size))
        .map(|sub| sub.iter().map(|i| x[i - 1]).collect::<Vec<_>>())
        .find(|set| set.contains(&k) && r.contains_code(t ^ mask_of(set)))
        .expect("X itself qualifies");
    let rest: Vec<usize> = xp.iter().copied().filter(|&i| i != k).collect();
    let (a, b) = (rest[0], rest[1]);
    let mut g = Gadget::new("P", 3, 0, 2);
    let mut scope = Vec::with_capacity(n);
    let mut consts = Vec::new();
    for i in 1..=n {
        if i == k {
            scope.push(Var::Primary(1));
        } else if i == a {
            scope.push(Var::Primary(2));
        } else if i == b {
            scope.push(Var::Primary(3));
        } else {
            g.aux_count += 1;
            scope.push(Var::Aux(g.aux_count));
            if !xp.contains(&i) {
                let bit = t >> (n - i) & 1 == 1;
                consts.push((if bit { "C1" } else { "C0" }, g.aux_count));
            }
        }
    }
    g.push("R", scope);
    for (c, v) in consts {
        g.push(c, vec![Var::Aux(v)]);
    }
    let env = derivation_env(r);
    let p = gadget_relation(&g, &env, DEFAULT_BUDGET)?;
    assert!(verify_gadget(&p, &g, &env)?, "core gadget violates caps");
    assert!(!is_delta_matroid(&p), "extracted core is a Δ-matroid relation");
    let v = extract(t, n, &[k, a, b]);
    assert!(p.contains_code(v) && p.contains_code(extract(tp, n, &[k, a, b])));
    let catalog = match_catalog(&p).map(|(e, f)| (e.name, f));
    Ok(NondeltaCore {
        witness: w,
        coords: [k, a, b],
        relation: p,
        gadget: g,
        catalog,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{eq, flip, impl_rel, neq, or2, product};

    fn lang(rels: &[(&str, Relation)]) -> ConstraintLanguage {
        ConstraintLanguage::from_relations("t", rels.iter().cloned())
    }

    #[test]
    fn verify_examples() {
        let env = lang(&[("NAND2", nand(2)), ("OR2", or2()), ("NEQ", neq())]);
        let g = Gadget::parse("gadget target=IMPL k=3 primaries=2 aux=1\nNAND2 x1 y1\nOR2 y1 x2\n").unwrap();
        assert!(verify_gadget(&impl_rel(), &g, &env).unwrap());
        let g = Gadget::parse("gadget target=EQ2 k=3 primaries=2 aux=1\nNEQ x1 y1\nNEQ y1 x2\n").unwrap();
        assert!(verify_gadget(&eq(2), &g, &env).unwrap());
        assert!(!verify_gadget(&neq(), &g, &env).unwrap());
        let bad = Gadget::parse("gadget target=EQ2 k=3 primaries=2 aux=1\nNEQ x1 y1\nNEQ y1 x1\n").unwrap();
        assert!(matches!(verify_gadget(&eq(2), &bad, &env), Err(Error::OccurrenceCap { .. })));
        let unknown = Gadget::parse("gadget target=EQ2 k=3 primaries=2 aux=0\nFOO x1 x2\n").unwrap();
        assert!(matches!(verify_gadget(&eq(2), &unknown, &env), Err(Error::Reference(_))));
        assert_eq!(Gadget::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn a5_cycle_scope_orders() {
        let e = catalog_entry("A5").unwrap();
        assert_eq!(e.relation, Relation::from_strs(3, &["101", "010", "111"]).unwrap());
        let env = entry_env(&e);
        let literal = eq3_cycle("A5", &[0, 1, 2], true);
        assert!(!verify_gadget(&eq(3), &literal, &env).unwrap());
        let swapped = eq3_cycle("A5", &[0, 2, 1], true);
        assert!(verify_gadget(&eq(3), &swapped, &env).unwrap());
    }

    #[test]
    fn catalog_verifies() {
        let rep = verify_catalog();
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(rep.summary(), "30/30 entries verified");
        let abc6 = rep.entries.iter().find(|e| e.name == "ABC6").unwrap();
        assert_eq!(abc6.gadget.as_ref().unwrap().target, "ABC5");
    }

    #[test]
    fn eq_or_impl_examples() {
        assert!(matches!(derive_eq_or_impl(&eq(3)), Err(Error::Domain(_))));
        let r = Relation::from_strs(2, &["00", "11", "10"]).unwrap();
        let (g, kind) = derive_eq_or_impl(&r).unwrap();
        assert_eq!(kind, LinkKind::Impl);
        assert_eq!(g.aux_count, 0);
        let (g, kind) = derive_eq_or_impl(&product(&impl_rel(), &c1()).unwrap()).unwrap();
        assert_eq!(kind, LinkKind::Impl);
        assert_eq!(g.aux_count, 1);
    }

    #[test]
    fn nand_m_examples() {
        assert_eq!(derive_nand_m(&nand(2), 2).unwrap(), CoordinateSet::new(&[1, 2]).unwrap());
        let r = product(&c1(), &nand(3)).unwrap();
        assert_eq!(derive_nand_m(&r, 3).unwrap(), CoordinateSet::new(&[2, 3, 4]).unwrap());
        let f = flip(&nand(2), &CoordinateSet::new(&[1]).unwrap()).unwrap();
        assert!(matches!(derive_nand_m(&f, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn search_examples() {
        let env = lang(&[("NEQ", neq()), ("OR2", or2()), ("C0", c0()), ("C1", c1())]);
        let bounds = SearchBounds::default();
        let r = search_gadget("NAND2", &nand(2), &env, 3, bounds).unwrap();
        assert_eq!(r.outcome, SearchOutcome::Found);
        let env = lang(&[("NAND2", nand(2)), ("C0", c0()), ("C1", c1())]);
        let r = search_gadget("EQ2", &eq(2), &env, 3, bounds).unwrap();
        assert_eq!(r.outcome, SearchOutcome::Exhausted);
        assert!(r.gadget.is_none());
        let env = lang(&[("NEQ", neq())]);
        let r = search_gadget("EQ2", &eq(2), &env, 3, bounds).unwrap();
        let g = r.gadget.unwrap();
        assert_eq!(g.constraints.len(), 2);
        assert_eq!(g.aux_count, 1);
    }

    #[test]
    fn core_extraction() {
        let c = extract_nondelta_core(&eq(3)).unwrap();
        assert!(c.catalog.is_some());
        let abc5 = catalog_entry("ABC5").unwrap().relation;
        let c = extract_nondelta_core(&abc5).unwrap();
        assert_eq!(c.catalog.unwrap().0, "ABC5");
        let c = extract_nondelta_core(&nand_chain()).unwrap();
        assert_eq!(c.catalog.unwrap().0, "ABC5");
        assert!(extract_nondelta_core(&nand(3)).is_err());
    }
}
