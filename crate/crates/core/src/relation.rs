//! Boolean tuples and finite relations over `{0,1}`.
//!
//! A relation of arity `n` is stored as a characteristic bitmask over the
//! `2^n` tuple codes. Coordinate 1 is the most significant bit of a code, so
//! ascending code order is the lexicographic order of the rendered tuples
//! (`"000" < "001" < ... < "111"`).

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported arity for tuples and relations.
pub const MAX_ARITY: usize = 16;

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 {
        return Err(Error::arg("arity must be at least 1"));
    }
    if arity > MAX_ARITY {
        return Err(Error::capacity(format!(
            "arity {arity} exceeds the supported bound {MAX_ARITY}"
        )));
    }
    Ok(())
}

/// A tuple in `{0,1}^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolTuple {
    arity: u8,
    code: u32,
}

impl BoolTuple {
    pub fn from_code(arity: usize, code: u32) -> Result<Self> {
        check_arity(arity)?;
        if (code as u64) >> arity != 0 {
            return Err(Error::arg(format!(
                "code {code} does not fit in arity {arity}"
            )));
        }
        Ok(BoolTuple {
            arity: arity as u8,
            code,
        })
    }

    pub(crate) fn from_code_unchecked(arity: usize, code: u32) -> Self {
        debug_assert!((1..=MAX_ARITY).contains(&arity));
        BoolTuple {
            arity: arity as u8,
            code,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        check_arity(bits.len())?;
        let code = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Ok(BoolTuple {
            arity: bits.len() as u8,
            code,
        })
    }

    /// Parses the juxtaposition form `"101"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::arg(format!("invalid tuple character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    pub fn zeros(arity: usize) -> Result<Self> {
        Self::from_code(arity, 0)
    }

    pub fn ones(arity: usize) -> Result<Self> {
        check_arity(arity)?;
        Ok(Self::from_code_unchecked(arity, full_mask(arity)))
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Component `i`, 1-based.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.arity(), "coordinate {i} out of range");
        (self.code >> (self.arity() - i)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.arity()).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.code.count_ones() as usize
    }

    /// `t ⊕ A`: complements the coordinates in `A`.
    pub fn flip(&self, coords: &CoordinateSet) -> Result<Self> {
        coords.check_within(self.arity())?;
        Ok(Self::from_code_unchecked(
            self.arity(),
            self.code ^ coords.code_mask(self.arity()),
        ))
    }

    /// The set of coordinates holding a 1.
    pub fn support(&self) -> CoordinateSet {
        CoordinateSet::from_code_mask(self.code, self.arity())
    }
}

impl fmt::Display for BoolTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoolTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

pub(crate) fn full_mask(arity: usize) -> u32 {
    if arity >= 32 {
        u32::MAX
    } else {
        (1u32 << arity) - 1
    }
}

/// Hamming distance `d_H(x, y)`.
pub fn hamming(x: &BoolTuple, y: &BoolTuple) -> Result<usize> {
    if x.arity() != y.arity() {
        return Err(Error::arg(format!(
            "arity mismatch: {} vs {}",
            x.arity(),
            y.arity()
        )));
    }
    Ok((x.code ^ y.code).count_ones() as usize)
}

/// `x'` is a step from `x` to `y` iff it is one flip away from `x` and that
/// flip brings it strictly closer to `y`.
pub fn is_step(x: &BoolTuple, x_step: &BoolTuple, y: &BoolTuple) -> Result<bool> {
    let a = hamming(x, x_step)?;
    let b = hamming(x_step, y)?;
    let c = hamming(x, y)?;
    Ok(a == 1 && a + b == c)
}

/// A set of 1-based coordinate indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CoordinateSet {
    // bit (i - 1) is set iff coordinate i is a member
    bits: u32,
}

impl CoordinateSet {
    pub fn empty() -> Self {
        CoordinateSet { bits: 0 }
    }

    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_ARITY {
                return Err(Error::arg(format!("coordinate {i} out of range")));
            }
            bits |= 1 << (i - 1);
        }
        Ok(CoordinateSet { bits })
    }

    /// `{1, ..., n}`.
    pub fn all(n: usize) -> Self {
        CoordinateSet {
            bits: full_mask(n),
        }
    }

    pub fn singleton(i: usize) -> Result<Self> {
        Self::new(&[i])
    }

    fn from_code_mask(code: u32, arity: usize) -> Self {
        let mut bits = 0;
        for i in 1..=arity {
            if (code >> (arity - i)) & 1 == 1 {
                bits |= 1 << (i - 1);
            }
        }
        CoordinateSet { bits }
    }

    /// The mask over tuple codes of the given arity that selects these
    /// coordinates.
    pub(crate) fn code_mask(&self, arity: usize) -> u32 {
        self.iter().fold(0, |acc, i| acc | 1 << (arity - i))
    }

    pub fn contains(&self, i: usize) -> bool {
        (1..=32).contains(&i) && (self.bits >> (i - 1)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn max(&self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(32 - self.bits.leading_zeros() as usize)
        }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (1..=32usize).filter(move |&i| (bits >> (i - 1)) & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn insert(&mut self, i: usize) {
        assert!((1..=MAX_ARITY).contains(&i));
        self.bits |= 1 << (i - 1);
    }

    pub fn union(&self, other: &CoordinateSet) -> CoordinateSet {
        CoordinateSet {
            bits: self.bits | other.bits,
        }
    }

    pub fn difference(&self, other: &CoordinateSet) -> CoordinateSet {
        CoordinateSet {
            bits: self.bits & !other.bits,
        }
    }

    pub fn is_subset(&self, other: &CoordinateSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn check_within(&self, arity: usize) -> Result<()> {
        match self.max() {
            Some(m) if m > arity => Err(Error::arg(format!(
                "coordinate {m} out of range for arity {arity}"
            ))),
            _ => Ok(()),
        }
    }

    /// All subsets of `{1..n}` of the given size, in lexicographic order of
    /// their sorted member lists.
    pub fn subsets_of_size(n: usize, size: usize) -> Vec<CoordinateSet> {
        fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<CoordinateSet>) {
            if left == 0 {
                out.push(CoordinateSet::new(cur).expect("indices in range"));
                return;
            }
            for i in start..=n {
                if n - i + 1 < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, n, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if size <= n {
            rec(1, n, size, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for CoordinateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for CoordinateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A relation `R ⊆ {0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: u8,
    words: Vec<u64>,
}

fn word_count(arity: usize) -> usize {
    (1usize << arity).div_ceil(64)
}

impl Relation {
    pub fn empty(arity: usize) -> Result<Self> {
        check_arity(arity)?;
        Ok(Relation {
            arity: arity as u8,
            words: vec![0; word_count(arity)],
        })
    }

    pub fn full(arity: usize) -> Result<Self> {
        let mut r = Self::empty(arity)?;
        for code in 0..(1u32 << arity) {
            r.set(code);
        }
        Ok(r)
    }

    pub fn from_codes(arity: usize, codes: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut r = Self::empty(arity)?;
        for code in codes {
            if (code as u64) >> arity != 0 {
                return Err(Error::arg(format!(
                    "code {code} does not fit in arity {arity}"
                )));
            }
            r.set(code);
        }
        Ok(r)
    }

    pub fn from_tuples<'a>(arity: usize, tuples: impl IntoIterator<Item = &'a BoolTuple>) -> Result<Self> {
        let mut r = Self::empty(arity)?;
        for t in tuples {
            if t.arity() != arity {
                return Err(Error::arg(format!(
                    "tuple {t} has arity {} but relation has arity {arity}",
                    t.arity()
                )));
            }
            r.set(t.code());
        }
        Ok(r)
    }

    /// Builds a relation from juxtaposed tuple strings, e.g. `["101", "010"]`.
    pub fn from_strs(arity: usize, tuples: &[&str]) -> Result<Self> {
        let parsed = tuples
            .iter()
            .map(|s| BoolTuple::parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tuples(arity, &parsed)
    }

    /// Builds a relation from a membership predicate over tuple codes.
    pub fn from_predicate(arity: usize, mut pred: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut r = Self::empty(arity)?;
        for code in 0..(1u32 << arity) {
            if pred(code) {
                r.set(code);
            }
        }
        Ok(r)
    }

    fn set(&mut self, code: u32) {
        self.words[(code / 64) as usize] |= 1 << (code % 64);
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn contains_code(&self, code: u32) -> bool {
        let idx = (code / 64) as usize;
        idx < self.words.len() && (self.words[idx] >> (code % 64)) & 1 == 1
    }

    pub fn contains(&self, t: &BoolTuple) -> bool {
        t.arity() == self.arity() && self.contains_code(t.code())
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member codes in ascending order.
    pub fn codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some(wi as u32 * 64 + b)
                }
            })
        })
    }

    pub fn tuples(&self) -> impl Iterator<Item = BoolTuple> + '_ {
        let n = self.arity();
        self.codes()
            .map(move |c| BoolTuple::from_code_unchecked(n, c))
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity {
            return Err(Error::arg("arity mismatch in intersection"));
        }
        Ok(Relation {
            arity: self.arity,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `(1, ..., 1) ∈ R`.
    pub fn is_1_valid(&self) -> bool {
        self.contains_code(full_mask(self.arity()))
    }

    /// Packs the single-word representation for arity ≤ 6, used as a
    /// compact key by exhaustive sweeps.
    pub fn small_mask(&self) -> Option<u64> {
        if self.arity() <= 6 {
            Some(self.words[0])
        } else {
            None
        }
    }

    pub fn from_small_mask(arity: usize, mask: u64) -> Result<Relation> {
        check_arity(arity)?;
        if arity > 6 {
            return Err(Error::arg("small masks cover arity ≤ 6 only"));
        }
        let limit = if arity == 6 { u64::MAX } else { (1u64 << (1 << arity)) - 1 };
        if mask & !limit != 0 {
            return Err(Error::arg("mask has bits beyond 2^arity"));
        }
        Ok(Relation {
            arity: arity as u8,
            words: vec![mask],
        })
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, t) in self.tuples().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

/// Relations with a fixed meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedRelation {
    Nand(usize),
    Eq(usize),
    Impl,
    C0,
    C1,
    Neq,
    Or2,
}

impl NamedRelation {
    /// Recognizes `NAND<m>`, `EQ<m>`, `IMPL`, `C0`, `C1`, `NEQ`, `OR2`
    /// (case-insensitive).
    pub fn parse(name: &str) -> Option<NamedRelation> {
        let upper = name.to_ascii_uppercase();
        let num = |prefix: &str| -> Option<usize> {
            upper
                .strip_prefix(prefix)
                .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
                .and_then(|s| s.parse().ok())
        };
        match upper.as_str() {
            "IMPL" => Some(NamedRelation::Impl),
            "C0" => Some(NamedRelation::C0),
            "C1" => Some(NamedRelation::C1),
            "NEQ" => Some(NamedRelation::Neq),
            "OR2" => Some(NamedRelation::Or2),
            _ => num("NAND")
                .map(NamedRelation::Nand)
                .or_else(|| num("EQ").map(NamedRelation::Eq)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            NamedRelation::Nand(m) => format!("NAND{m}"),
            NamedRelation::Eq(m) => format!("EQ{m}"),
            NamedRelation::Impl => "IMPL".into(),
            NamedRelation::C0 => "C0".into(),
            NamedRelation::C1 => "C1".into(),
            NamedRelation::Neq => "NEQ".into(),
            NamedRelation::Or2 => "OR2".into(),
        }
    }
}

/// The relation denoted by `name`.
pub fn named_relation(name: NamedRelation) -> Result<Relation> {
    match name {
        NamedRelation::Nand(m) => {
            check_arity(m)?;
            Relation::from_predicate(m, |c| c != full_mask(m))
        }
        NamedRelation::Eq(m) => {
            check_arity(m)?;
            Relation::from_codes(m, [0, full_mask(m)])
        }
        NamedRelation::Impl => Relation::from_strs(2, &["00", "01", "11"]),
        NamedRelation::C0 => Relation::from_strs(1, &["0"]),
        NamedRelation::C1 => Relation::from_strs(1, &["1"]),
        NamedRelation::Neq => Relation::from_strs(2, &["01", "10"]),
        NamedRelation::Or2 => Relation::from_strs(2, &["01", "10", "11"]),
    }
}

/// Shorthands for the fixed relations; these cannot fail.
pub fn nand(m: usize) -> Relation {
    named_relation(NamedRelation::Nand(m)).expect("NAND arity within bound")
}

pub fn eq(m: usize) -> Relation {
    named_relation(NamedRelation::Eq(m)).expect("EQ arity within bound")
}

pub fn impl_rel() -> Relation {
    named_relation(NamedRelation::Impl).expect("IMPL")
}

pub fn c0() -> Relation {
    named_relation(NamedRelation::C0).expect("c0")
}

pub fn c1() -> Relation {
    named_relation(NamedRelation::C1).expect("c1")
}

pub fn neq() -> Relation {
    named_relation(NamedRelation::Neq).expect("NEQ")
}

pub fn or2() -> Relation {
    named_relation(NamedRelation::Or2).expect("OR2")
}

/// `{ t | d_H(0, t) ≤ 1 }` of the given arity.
pub fn at_most_one(arity: usize) -> Result<Relation> {
    Relation::from_predicate(arity, |c| c.count_ones() <= 1)
}

/// Extracts the bits of `code` (arity `n`) at the 1-based `coords`, in order.
pub(crate) fn extract(code: u32, n: usize, coords: &[usize]) -> u32 {
    coords
        .iter()
        .fold(0, |acc, &i| (acc << 1) | ((code >> (n - i)) & 1))
}

/// Projection of `R` onto `I`, coordinates kept in ascending order.
pub fn project(r: &Relation, coords: &CoordinateSet) -> Result<Relation> {
    if coords.is_empty() {
        return Err(Error::arg("projection onto the empty coordinate set"));
    }
    coords.check_within(r.arity())?;
    let idx = coords.to_vec();
    Relation::from_codes(idx.len(), r.codes().map(|c| extract(c, r.arity(), &idx)))
}

/// `R ⊕ A`.
pub fn flip(r: &Relation, coords: &CoordinateSet) -> Result<Relation> {
    coords.check_within(r.arity())?;
    let mask = coords.code_mask(r.arity());
    Relation::from_codes(r.arity(), r.codes().map(|c| c ^ mask))
}

/// Cartesian product; the coordinates of `a` come first.
pub fn product(a: &Relation, b: &Relation) -> Result<Relation> {
    let n = a.arity() + b.arity();
    check_arity(n)?;
    let mut out = Relation::empty(n)?;
    for ca in a.codes() {
        for cb in b.codes() {
            out.set((ca << b.arity()) | cb);
        }
    }
    Ok(out)
}

/// `{ (t_f(1), ..., t_f(n)) | t ∈ R }` for a permutation `f` given as the
/// 1-based image list `[f(1), ..., f(n)]`.
pub fn permute(r: &Relation, f: &[usize]) -> Result<Relation> {
    let n = r.arity();
    if f.len() != n {
        return Err(Error::arg(format!(
            "permutation has {} entries, relation arity is {n}",
            f.len()
        )));
    }
    let mut seen = vec![false; n + 1];
    for &i in f {
        if i == 0 || i > n || seen[i] {
            return Err(Error::arg(format!("{f:?} is not a permutation of [{n}]")));
        }
        seen[i] = true;
    }
    Relation::from_codes(n, r.codes().map(|c| extract(c, n, f)))
}

/// The relation `{ t ∈ {0,1}^b | (t[map[0]], ..., t[map[a-1]]) ∈ R }`, i.e.
/// `R` applied to the variables `map` out of `b` fresh ones. Non-injective
/// maps identify coordinates; unused targets are unconstrained.
pub fn substitute(r: &Relation, map: &[usize], b: usize) -> Result<Relation> {
    if map.len() != r.arity() {
        return Err(Error::arg("substitution map length differs from arity"));
    }
    if map.iter().any(|&i| i == 0 || i > b) {
        return Err(Error::arg("substitution target out of range"));
    }
    Relation::from_predicate(b, |c| r.contains_code(extract(c, b, map)))
}

/// Renders a relation in the block text format.
pub fn render_relation(name: &str, r: &Relation) -> String {
    let mut s = format!("relation {name} arity={}\n", r.arity());
    for t in r.tuples() {
        s.push_str(&t.to_string());
        s.push('\n');
    }
    s.push('\n');
    s
}

/// Parses every `relation <NAME> arity=<r>` block in `text`.
pub fn parse_relations(text: &str) -> Result<Vec<(String, Relation)>> {
    let mut out = Vec::new();
    let mut current: Option<(String, usize, Vec<BoolTuple>)> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        match current.as_mut() {
            None => {
                if line.is_empty() {
                    continue;
                }
                let mut parts = line.split_whitespace();
                if parts.next() != Some("relation") {
                    return Err(Error::parse(line_no, format!("expected `relation`, found {line:?}")));
                }
                let name = parts
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "missing relation name"))?;
                let arity = parts
                    .next()
                    .and_then(|p| p.strip_prefix("arity="))
                    .ok_or_else(|| Error::parse(line_no, "missing arity=<r>"))?
                    .parse::<usize>()
                    .map_err(|e| Error::parse(line_no, format!("bad arity: {e}")))?;
                if parts.next().is_some() {
                    return Err(Error::parse(line_no, "trailing tokens after arity"));
                }
                check_arity(arity).map_err(|e| Error::parse(line_no, e.to_string()))?;
                current = Some((name.to_string(), arity, Vec::new()));
            }
            Some((name, arity, tuples)) => {
                if line.is_empty() {
                    let r = Relation::from_tuples(*arity, tuples.iter())
                        .map_err(|e| Error::parse(line_no, e.to_string()))?;
                    out.push((std::mem::take(name), r));
                    current = None;
                    continue;
                }
                if line.len() != *arity {
                    return Err(Error::parse(
                        line_no,
                        format!("tuple {line:?} has length {}, expected {arity}", line.len()),
                    ));
                }
                let t = BoolTuple::parse(line).map_err(|e| Error::parse(line_no, e.to_string()))?;
                tuples.push(t);
            }
        }
    }
    if let Some((name, arity, tuples)) = current {
        let r = Relation::from_tuples(arity, tuples.iter())
            .map_err(|e| Error::parse(text.lines().count(), e.to_string()))?;
        out.push((name, r));
    }
    Ok(out)
}
