//! Polymorphisms, co-clone membership and constraint languages.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::relation::{
    self, c0, c1, eq, full_mask, impl_rel, nand, neq, or2, project, substitute, BoolTuple,
    CoordinateSet, NamedRelation, Relation,
};

/// Largest arity accepted for truth-table functions.
pub const MAX_TABLE_ARITY: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    /// bit `c` holds f on the input whose first argument is the MSB of `c`
    Table(u64),
    /// `h_n`: true iff at most one input is 0
    AtMostOneZero,
}

/// A function `{0,1}^k → {0,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolFunction {
    arity: usize,
    kind: Kind,
    name: String,
}

impl BoolFunction {
    /// Builds a function from a truth table indexed by input code.
    pub fn from_table(name: &str, arity: usize, table: &[bool]) -> Result<Self> {
        if arity == 0 {
            return Err(Error::arg("function arity must be at least 1"));
        }
        if arity > MAX_TABLE_ARITY {
            return Err(Error::capacity(format!(
                "truth tables are limited to arity {MAX_TABLE_ARITY}"
            )));
        }
        if table.len() != 1 << arity {
            return Err(Error::arg(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1 << arity
            )));
        }
        let bits = table
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
        Ok(BoolFunction {
            arity,
            kind: Kind::Table(bits),
            name: name.to_string(),
        })
    }

    fn from_fn(name: &str, arity: usize, f: impl Fn(&[bool]) -> bool) -> Self {
        let table: Vec<bool> = (0..1u32 << arity)
            .map(|c| {
                let args: Vec<bool> = (0..arity).map(|i| (c >> (arity - 1 - i)) & 1 == 1).collect();
                f(&args)
            })
            .collect();
        Self::from_table(name, arity, &table).expect("built-in function table")
    }

    pub fn and() -> Self {
        Self::from_fn("and", 2, |a| a[0] && a[1])
    }

    pub fn or() -> Self {
        Self::from_fn("or", 2, |a| a[0] || a[1])
    }

    pub fn majority() -> Self {
        Self::from_fn("majority", 3, |a| (a[0] as u8 + a[1] as u8 + a[2] as u8) >= 2)
    }

    pub fn xor3() -> Self {
        Self::from_fn("xor3", 3, |a| a[0] ^ a[1] ^ a[2])
    }

    /// `x ∧ (y ∨ ¬z)`
    pub fn and_or_not() -> Self {
        Self::from_fn("x&(y|!z)", 3, |a| a[0] && (a[1] || !a[2]))
    }

    /// `x ∧ (y ∨ z)`
    pub fn and_or() -> Self {
        Self::from_fn("x&(y|z)", 3, |a| a[0] && (a[1] || a[2]))
    }

    /// `x ∧ (y ⊕ z ⊕ 1)`
    pub fn and_xnor() -> Self {
        Self::from_fn("x&(y^z^1)", 3, |a| a[0] && !(a[1] ^ a[2]))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, args: &[bool]) -> Result<bool> {
        if args.len() != self.arity {
            return Err(Error::arg(format!(
                "{} expects {} arguments, got {}",
                self.name,
                self.arity,
                args.len()
            )));
        }
        Ok(match &self.kind {
            Kind::Table(t) => {
                let c = args.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                (t >> c) & 1 == 1
            }
            Kind::AtMostOneZero => args.iter().filter(|&&b| !b).count() <= 1,
        })
    }

    /// Componentwise application on tuple codes of width `n`.
    fn apply_codes(&self, codes: &[u32], n: usize) -> u32 {
        let full = full_mask(n);
        match &self.kind {
            Kind::Table(t) => {
                let k = self.arity;
                let mut out = 0u32;
                for m in 0..1usize << k {
                    if (t >> m) & 1 == 0 {
                        continue;
                    }
                    let mut term = full;
                    for (i, &c) in codes.iter().enumerate() {
                        let bit = (m >> (k - 1 - i)) & 1 == 1;
                        term &= if bit { c } else { !c & full };
                    }
                    out |= term;
                }
                out
            }
            Kind::AtMostOneZero => {
                let (mut one, mut two) = (0u32, 0u32);
                for &c in codes {
                    let z = !c & full;
                    two |= one & z;
                    one |= z;
                }
                !two & full
            }
        }
    }

    #[cfg(test)]
    fn is_idempotent(&self) -> bool {
        let k = self.arity;
        match &self.kind {
            Kind::Table(t) => t & 1 == 0 && (t >> ((1usize << k) - 1)) & 1 == 1,
            Kind::AtMostOneZero => true,
        }
    }
}

impl fmt::Display for BoolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `h_n(x_1, ..., x_{n+1})`: true iff at least `n` of the inputs are 1.
pub fn h_function(n: usize) -> Result<BoolFunction> {
    if n == 0 {
        return Err(Error::arg("h_n needs n ≥ 1"));
    }
    if n + 1 > 64 {
        return Err(Error::capacity(format!("h_{n} exceeds the supported arity")));
    }
    Ok(BoolFunction {
        arity: n + 1,
        kind: Kind::AtMostOneZero,
        name: format!("h{n}"),
    })
}

/// `f(t_1, ..., t_k)` evaluated coordinate by coordinate.
pub fn apply_componentwise(f: &BoolFunction, tuples: &[BoolTuple]) -> Result<BoolTuple> {
    if tuples.len() != f.arity() {
        return Err(Error::arg(format!(
            "{} expects {} tuples, got {}",
            f.name(),
            f.arity(),
            tuples.len()
        )));
    }
    let n = tuples[0].arity();
    if tuples.iter().any(|t| t.arity() != n) {
        return Err(Error::arg("tuples of different arities"));
    }
    let codes: Vec<u32> = tuples.iter().map(|t| t.code()).collect();
    BoolTuple::from_code(n, f.apply_codes(&codes, n))
}

/// Whether `f` is a polymorphism of `R`.
pub fn is_invariant(r: &Relation, f: &BoolFunction) -> bool {
    let n = r.arity();
    let codes: Vec<u32> = r.codes().collect();
    if codes.is_empty() {
        return true;
    }
    match &f.kind {
        Kind::AtMostOneZero => h_invariant(r, &codes, f.arity()),
        Kind::Table(_) => {
            let k = f.arity();
            let mut idx = vec![0usize; k];
            let mut buf = vec![0u32; k];
            loop {
                for i in 0..k {
                    buf[i] = codes[idx[i]];
                }
                if !r.contains_code(f.apply_codes(&buf, n)) {
                    return false;
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        return true;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < codes.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
    }
}

/// Invariance under `h_{k-1}` without enumerating all `|R|^k` selections:
/// the image only depends on which columns saw zero, one, or more zeros,
/// and the order of the selected tuples is irrelevant.
fn h_invariant(r: &Relation, codes: &[u32], k: usize) -> bool {
    use std::collections::HashSet;
    let full = full_mask(r.arity());
    let mut states: HashSet<(u32, u32)> = HashSet::new();
    states.insert((0, 0));
    for _ in 0..k {
        let mut next = HashSet::with_capacity(states.len() * 2);
        for &(one, two) in &states {
            for &c in codes {
                let z = !c & full;
                next.insert((one | z, two | (one & z)));
            }
        }
        states = next;
    }
    states.iter().all(|&(_, two)| r.contains_code(!two & full))
}

/// Co-clone labels of the conservative fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoCloneLabel {
    IR2,
    IM2,
    ID1,
    ID2,
    IL2,
    IV2,
    IE2,
    IS10(usize),
    IS12(usize),
    IS10Limit,
    IS12Limit,
    BR,
}

impl fmt::Display for CoCloneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoCloneLabel::IS10(m) => write!(f, "IS10({m})"),
            CoCloneLabel::IS12(m) => write!(f, "IS12({m})"),
            CoCloneLabel::IS10Limit => f.write_str("IS10_limit"),
            CoCloneLabel::IS12Limit => f.write_str("IS12_limit"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl CoCloneLabel {
    pub fn parse(text: &str) -> Result<CoCloneLabel> {
        let t = text.trim();
        let simple = match t {
            "IR2" => Some(CoCloneLabel::IR2),
            "IM2" => Some(CoCloneLabel::IM2),
            "ID1" => Some(CoCloneLabel::ID1),
            "ID2" => Some(CoCloneLabel::ID2),
            "IL2" => Some(CoCloneLabel::IL2),
            "IV2" => Some(CoCloneLabel::IV2),
            "IE2" => Some(CoCloneLabel::IE2),
            "IS10_limit" => Some(CoCloneLabel::IS10Limit),
            "IS12_limit" => Some(CoCloneLabel::IS12Limit),
            "BR" => Some(CoCloneLabel::BR),
            _ => None,
        };
        if let Some(l) = simple {
            return Ok(l);
        }
        let param = |prefix: &str| {
            t.strip_prefix(prefix)
                .and_then(|s| s.strip_prefix('('))
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.parse::<usize>().ok())
        };
        let label = if let Some(m) = param("IS10") {
            CoCloneLabel::IS10(m)
        } else if let Some(m) = param("IS12") {
            CoCloneLabel::IS12(m)
        } else {
            return Err(Error::arg(format!("unknown co-clone label {t:?}")));
        };
        match label {
            CoCloneLabel::IS10(m) | CoCloneLabel::IS12(m) if m < 2 => {
                Err(Error::arg("parameterized labels need m ≥ 2"))
            }
            l => Ok(l),
        }
    }

    /// Non-strict containment `self ⊆ other` as encoded for least-label
    /// selection. Pairs not listed are treated as incomparable.
    pub fn is_contained_in(&self, other: &CoCloneLabel) -> bool {
        use CoCloneLabel::*;
        if self == other || *other == BR || *self == IR2 {
            return true;
        }
        match (*self, *other) {
            (IM2, IS10(_) | IS10Limit | IE2 | IV2 | ID2) => true,
            (ID1, ID2 | IL2) => true,
            (IS12(m), IS12(m2) | IS10(m2)) => m <= m2,
            (IS12(_), IS12Limit | IS10Limit | IE2) => true,
            (IS12(2) | IS10(2), ID2) => true,
            (IS10(m), IS10(m2)) => m <= m2,
            (IS10(_), IS10Limit | IE2) => true,
            (IS12Limit, IS10Limit | IE2) => true,
            (IS10Limit, IE2) => true,
            _ => false,
        }
    }
}

fn side_function_12() -> BoolFunction {
    BoolFunction::and_or_not()
}

fn side_function_10() -> BoolFunction {
    BoolFunction::and_or()
}

/// The functions whose invariance decides membership in `label`, for a
/// relation of arity `r`. `ID1` has no entry; it is decided structurally.
pub fn base_functions(label: CoCloneLabel, r: usize) -> Result<Vec<BoolFunction>> {
    use CoCloneLabel::*;
    Ok(match label {
        IE2 => vec![BoolFunction::and()],
        IV2 => vec![BoolFunction::or()],
        IL2 => vec![BoolFunction::xor3()],
        ID2 => vec![BoolFunction::majority()],
        IM2 => vec![BoolFunction::and(), BoolFunction::or()],
        IR2 => vec![BoolFunction::or(), BoolFunction::and_xnor()],
        IS12(m) => vec![side_function_12(), h_function(m)?],
        IS10(m) => vec![side_function_10(), h_function(m)?],
        IS12Limit => vec![side_function_12(), h_function(r + 1)?],
        IS10Limit => vec![side_function_10(), h_function(r + 1)?],
        ID1 | BR => vec![],
    })
}

/// `R ∈ ID1`: `R` is exactly the conjunction of its constant coordinates
/// and its binary equalities/disequalities.
pub fn in_id1(r: &Relation) -> bool {
    if r.is_empty() {
        return true;
    }
    let n = r.arity();
    let mut consts: Vec<(usize, bool)> = Vec::new();
    for i in 1..=n {
        let p = project(r, &CoordinateSet::singleton(i).expect("in range")).expect("valid");
        if p.len() == 1 {
            consts.push((i, p.contains_code(1)));
        }
    }
    let mut links: Vec<(usize, usize, bool)> = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let p = project(r, &CoordinateSet::new(&[i, j]).expect("in range")).expect("valid");
            if p == eq(2) {
                links.push((i, j, false));
            } else if p == neq() {
                links.push((i, j, true));
            }
        }
    }
    let bit = |c: u32, i: usize| (c >> (n - i)) & 1 == 1;
    let implied = Relation::from_predicate(n, |c| {
        consts.iter().all(|&(i, v)| bit(c, i) == v)
            && links.iter().all(|&(i, j, x)| (bit(c, i) ^ bit(c, j)) == x)
    })
    .expect("same arity");
    implied == *r
}

/// Whether `R` lies in the co-clone named by `label`.
pub fn coclone_member(r: &Relation, label: CoCloneLabel) -> bool {
    match label {
        CoCloneLabel::BR => true,
        CoCloneLabel::ID1 => in_id1(r),
        CoCloneLabel::IS10(m) | CoCloneLabel::IS12(m) if m < 2 => false,
        _ => match base_functions(label, r.arity()) {
            Ok(fs) => fs.iter().all(|f| is_invariant(r, f)),
            Err(_) => false,
        },
    }
}

/// A finite set of named relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLanguage {
    name: String,
    relations: BTreeMap<String, Relation>,
    order: Vec<String>,
    conservative: bool,
}

impl ConstraintLanguage {
    pub fn new(name: &str) -> Self {
        ConstraintLanguage {
            name: name.to_string(),
            relations: BTreeMap::new(),
            order: Vec::new(),
            conservative: false,
        }
    }

    pub fn from_relations<S: AsRef<str>>(name: &str, rels: impl IntoIterator<Item = (S, Relation)>) -> Self {
        let mut l = Self::new(name);
        for (n, r) in rels {
            l.insert(n.as_ref(), r);
        }
        l
    }

    /// Adds (or replaces) a relation. Adding both constants marks the
    /// language conservative.
    pub fn insert(&mut self, name: &str, r: Relation) {
        if self.relations.insert(name.to_string(), r).is_none() {
            self.order.push(name.to_string());
        }
        self.conservative = self.values().any(|r| *r == c0()) && self.values().any(|r| *r == c1());
    }

    /// Adds `C0` and `C1` if not already present.
    pub fn make_conservative(&mut self) {
        if !self.values().any(|r| *r == c0()) {
            self.insert("C0", c0());
        }
        if !self.values().any(|r| *r == c1()) {
            self.insert("C1", c1());
        }
    }

    pub fn with_constants(&self) -> Self {
        let mut l = self.clone();
        l.make_conservative();
        l
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    /// Relations in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.order.iter().map(move |n| (n.as_str(), &self.relations[n]))
    }

    pub fn values(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.values().map(|r| r.arity()).max().unwrap_or(0)
    }

    /// Every relation of the language lies in `label`.
    pub fn within(&self, label: CoCloneLabel) -> bool {
        match label {
            CoCloneLabel::IS10Limit | CoCloneLabel::IS12Limit => {
                let r = self.max_arity();
                let side = if label == CoCloneLabel::IS12Limit {
                    side_function_12()
                } else {
                    side_function_10()
                };
                let h = match h_function(r + 1) {
                    Ok(h) => h,
                    Err(_) => return false,
                };
                self.values().all(|rel| is_invariant(rel, &side) && is_invariant(rel, &h))
            }
            _ => self.values().all(|r| coclone_member(r, label)),
        }
    }
}

/// Resolves a relation name against an explicit table, then the fixed
/// names (`NAND3`, `IMPL`, ...).
pub fn resolve_relation(name: &str, table: &BTreeMap<String, Relation>) -> Option<Relation> {
    table
        .get(name)
        .cloned()
        .or_else(|| NamedRelation::parse(name).and_then(|n| relation::named_relation(n).ok()))
}

/// Parses a `language <NAME>` file. `use` lines are resolved with
/// [`resolve_relation`].
pub fn parse_language(text: &str, table: &BTreeMap<String, Relation>) -> Result<ConstraintLanguage> {
    let mut lang: Option<ConstraintLanguage> = None;
    let mut conservative = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or_default();
        let arg = parts.next();
        if parts.next().is_some() {
            return Err(Error::parse(line_no, "too many tokens"));
        }
        match (head, arg) {
            ("language", Some(name)) if lang.is_none() => lang = Some(ConstraintLanguage::new(name)),
            ("language", _) => return Err(Error::parse(line_no, "duplicate or malformed language header")),
            (_, _) if lang.is_none() => {
                return Err(Error::parse(line_no, "expected `language <NAME>` first"))
            }
            ("use", Some(name)) => {
                let r = resolve_relation(name, table)
                    .ok_or_else(|| Error::parse(line_no, format!("unknown relation {name:?}")))?;
                lang.as_mut().expect("checked").insert(name, r);
            }
            ("conservative", None) => conservative = true,
            _ => return Err(Error::parse(line_no, format!("unrecognized line {line:?}"))),
        }
    }
    let mut lang = lang.ok_or_else(|| Error::parse(1, "missing `language <NAME>` header"))?;
    if conservative {
        lang.make_conservative();
    }
    Ok(lang)
}

/// Renders a language file; relation definitions are not included.
pub fn render_language(lang: &ConstraintLanguage) -> String {
    let mut s = format!("language {}\n", lang.name());
    for (n, _) in lang.iter() {
        s.push_str(&format!("use {n}\n"));
    }
    s
}

fn candidate_labels(max_arity: usize) -> Vec<CoCloneLabel> {
    use CoCloneLabel::*;
    let mut out = vec![IR2, IM2, ID1, ID2, IL2, IV2, IE2];
    for m in 2..=max_arity.max(1) + 1 {
        out.push(IS12(m));
        out.push(IS10(m));
    }
    out.extend([IS12Limit, IS10Limit, BR]);
    out
}

/// The least supported label whose co-clone contains every relation of Γ.
pub fn locate_coclone(lang: &ConstraintLanguage) -> CoCloneLabel {
    let holding: Vec<CoCloneLabel> = candidate_labels(lang.max_arity())
        .into_iter()
        .filter(|&l| lang.within(l))
        .collect();
    let mut minimal: Vec<CoCloneLabel> = holding
        .iter()
        .copied()
        .filter(|l| !holding.iter().any(|o| o != l && o.is_contained_in(l) && !l.is_contained_in(o)))
        .collect();
    minimal.sort_by_key(|l| match l {
        CoCloneLabel::IS12(m) | CoCloneLabel::IS10(m) => (0, *m, l.to_string()),
        _ => (1, 0, l.to_string()),
    });
    minimal.first().copied().unwrap_or(CoCloneLabel::BR)
}

/// Largest arity accepted by [`closure_oracle`].
pub const CLOSURE_MAX_ARITY: usize = 4;

/// All relations of arity ≤ `max_arity` expressible from `Γ ∪ {EQ²}` by
/// conjunction, identification of variables and existential projection,
/// where every intermediate formula also stays within `max_arity`.
/// The empty and full relations of each arity are included by convention.
/// Relations of Γ wider than `max_arity` enter through their projections.
pub fn closure_oracle(lang: &ConstraintLanguage, max_arity: usize) -> Result<Vec<Relation>> {
    if max_arity == 0 {
        return Err(Error::arg("max_arity must be at least 1"));
    }
    if max_arity > CLOSURE_MAX_ARITY {
        return Err(Error::capacity(format!(
            "closure oracle is limited to arity {CLOSURE_MAX_ARITY}"
        )));
    }
    // seen[a][mask] for relations of arity a
    let mut seen: Vec<Vec<bool>> = (0..=max_arity)
        .map(|a| if a == 0 { Vec::new() } else { vec![false; 1usize << (1usize << a)] })
        .collect();
    let mut members: Vec<Vec<u64>> = vec![Vec::new(); max_arity + 1];
    let mut queue: Vec<Relation> = Vec::new();

    let push = |r: Relation, seen: &mut Vec<Vec<bool>>, members: &mut Vec<Vec<u64>>, queue: &mut Vec<Relation>| {
        let a = r.arity();
        let m = r.small_mask().expect("arity ≤ 4");
        if !seen[a][m as usize] {
            seen[a][m as usize] = true;
            members[a].push(m);
            queue.push(r);
        }
    };

    let mut seeds = Vec::new();
    for r in lang.values().chain(std::iter::once(&eq(2))) {
        if r.arity() <= max_arity {
            seeds.push(r.clone());
        } else {
            for size in 1..=max_arity {
                for s in CoordinateSet::subsets_of_size(r.arity(), size) {
                    seeds.push(project(r, &s)?);
                }
            }
        }
    }
    for a in 1..=max_arity {
        seeds.push(Relation::empty(a)?);
        seeds.push(Relation::full(a)?);
    }
    for s in seeds {
        push(s, &mut seen, &mut members, &mut queue);
    }

    while let Some(r) = queue.pop() {
        let a = r.arity();
        // substitution into b variables (identification, permutation, padding)
        for b in 1..=max_arity {
            let mut map = vec![1usize; a];
            loop {
                let s = substitute(&r, &map, b)?;
                push(s, &mut seen, &mut members, &mut queue);
                let mut pos = a;
                let mut done = true;
                while pos > 0 {
                    pos -= 1;
                    if map[pos] < b {
                        map[pos] += 1;
                        done = false;
                        break;
                    }
                    map[pos] = 1;
                }
                if done {
                    break;
                }
            }
        }
        if a > 1 {
            for drop in 1..=a {
                let keep = CoordinateSet::all(a).difference(&CoordinateSet::singleton(drop)?);
                push(project(&r, &keep)?, &mut seen, &mut members, &mut queue);
            }
        }
        let mask = r.small_mask().expect("small");
        let existing = members[a].clone();
        for m in existing {
            let inter = Relation::from_small_mask(a, mask & m)?;
            push(inter, &mut seen, &mut members, &mut queue);
        }
    }

    let mut out = Vec::new();
    for a in 1..=max_arity {
        let mut ms = members[a].clone();
        ms.sort_unstable();
        for m in ms {
            out.push(Relation::from_small_mask(a, m)?);
        }
    }
    Ok(out)
}

/// Plain bases for the labels that have one, restricted to arity ≤ 3.
pub fn plain_basis(label: CoCloneLabel) -> Option<Vec<Relation>> {
    use CoCloneLabel::*;
    let horn3 = Relation::from_predicate(3, |c| c != 0b110).expect("arity 3");
    let xor_eqs = || {
        let mut v = Vec::new();
        for k in 1..=3usize {
            for parity in [0u32, 1] {
                v.push(
                    Relation::from_predicate(k, |c| c.count_ones() % 2 == parity).expect("k ≤ 3"),
                );
            }
        }
        v
    };
    Some(match label {
        IE2 => vec![nand(1), nand(2), nand(3), c1(), impl_rel(), horn3],
        IS10Limit => vec![c1(), impl_rel(), nand(1), nand(2), nand(3)],
        IS10(m) if m <= 3 => vec![c1(), impl_rel(), nand(m)],
        IS12Limit => vec![eq(2), c1(), nand(1), nand(2), nand(3)],
        IS12(m) if m <= 3 => vec![eq(2), c1(), nand(m)],
        IL2 => xor_eqs(),
        ID2 => vec![c0(), c1(), or2(), impl_rel(), nand(2)],
        ID1 => vec![c0(), c1(), eq(2), neq()],
        IM2 => vec![c0(), c1(), impl_rel()],
        IR2 => vec![eq(2), c0(), c1()],
        _ => return None,
    })
}
