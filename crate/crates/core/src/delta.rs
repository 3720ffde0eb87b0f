//! Δ-matroid relations, affine (GF(2)) structure and the Q class.

use std::fmt;

use rayon::prelude::*;

use crate::clone::{coclone_member, CoCloneLabel};
use crate::error::{Error, Result};
use crate::relation::{extract, full_mask, project, BoolTuple, CoordinateSet, Relation};

/// A violation of the two-step axiom: `x' ∉ R` is a step from `x` towards
/// `y` and no step from `x'` towards `y` lies in `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaWitness {
    pub x: BoolTuple,
    pub y: BoolTuple,
    pub x_step: BoolTuple,
}

impl DeltaWitness {
    /// Re-checks that the triple violates the axiom for `r`.
    pub fn violates(&self, r: &Relation) -> bool {
        let (x, y, s) = (self.x.code(), self.y.code(), self.x_step.code());
        let d = x ^ y;
        r.contains(&self.x)
            && r.contains(&self.y)
            && (x ^ s).count_ones() == 1
            && (x ^ s) & d != 0
            && !r.contains_code(s)
            && !single_bits(s ^ y).any(|b| r.contains_code(s ^ b))
    }
}

impl fmt::Display for DeltaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} y={} x'={}", self.x, self.y, self.x_step)
    }
}

fn single_bits(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).map(|i| 1u32 << i).filter(move |b| mask & b != 0)
}

/// The lexicographically least violating `(x, y, x')`, if any.
pub fn delta_matroid_witness(r: &Relation) -> Option<DeltaWitness> {
    let n = r.arity();
    let codes: Vec<u32> = r.codes().collect();
    for &x in &codes {
        for &y in &codes {
            let d = x ^ y;
            if d.count_ones() < 3 {
                // a step either lands on y or has y one step away
                continue;
            }
            let mut steps: Vec<u32> = single_bits(d).map(|b| x ^ b).collect();
            steps.sort_unstable();
            for s in steps {
                if r.contains_code(s) {
                    continue;
                }
                if single_bits(s ^ y).any(|b| r.contains_code(s ^ b)) {
                    continue;
                }
                return Some(DeltaWitness {
                    x: BoolTuple::from_code(n, x).expect("member code"),
                    y: BoolTuple::from_code(n, y).expect("member code"),
                    x_step: BoolTuple::from_code(n, s).expect("step code"),
                });
            }
        }
    }
    None
}

pub fn is_delta_matroid(r: &Relation) -> bool {
    delta_matroid_witness(r).is_none()
}

/// `A x = b` over GF(2) in reduced row echelon form. Row `i` is a mask
/// over coordinates in code order (coordinate 1 is the MSB); pivots are
/// chosen leftmost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2System {
    arity: usize,
    rows: Vec<(u32, bool)>,
}

impl Gf2System {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Rows as `(coefficients, constant)`, coefficients indexed 1..=n.
    pub fn rows(&self) -> Vec<(Vec<bool>, bool)> {
        let n = self.arity;
        self.rows
            .iter()
            .map(|&(m, b)| ((1..=n).map(|i| (m >> (n - i)) & 1 == 1).collect(), b))
            .collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|&(m, _)| self.leading(m)).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let p = self.pivots();
        (1..=self.arity).filter(|i| !p.contains(i)).collect()
    }

    fn leading(&self, m: u32) -> usize {
        self.arity - (31 - m.leading_zeros() as usize)
    }

    /// The `A'` block: for each pivot row, its coefficients on the free
    /// columns.
    pub fn free_block(&self) -> Vec<Vec<bool>> {
        let free = self.free_columns();
        let n = self.arity;
        self.rows
            .iter()
            .map(|&(m, _)| free.iter().map(|&j| (m >> (n - j)) & 1 == 1).collect())
            .collect()
    }

    /// Some free column has at least two ones in `A'`.
    pub fn is_coupled(&self) -> bool {
        let block = self.free_block();
        let cols = self.free_columns().len();
        (0..cols).any(|j| block.iter().filter(|row| row[j]).count() >= 2)
    }

    pub fn solutions(&self) -> Relation {
        let n = self.arity;
        Relation::from_predicate(n, |c| {
            self.rows
                .iter()
                .all(|&(m, b)| ((m & c).count_ones() % 2 == 1) == b)
        })
        .expect("arity already validated")
    }
}

impl fmt::Display for Gf2System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.arity;
        for (k, &(m, b)) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            let vars: Vec<String> = (1..=n)
                .filter(|i| (m >> (n - i)) & 1 == 1)
                .map(|i| format!("x{i}"))
                .collect();
            write!(f, "{} = {}", vars.join(" + "), b as u8)?;
        }
        Ok(())
    }
}

fn reduce_rows(n: usize, mut rows: Vec<(u32, bool)>) -> Vec<(u32, bool)> {
    let mut out: Vec<(u32, bool)> = Vec::new();
    for col in (0..n).rev() {
        let bit = 1u32 << col;
        let Some(pos) = rows.iter().position(|&(m, _)| m & bit != 0) else {
            continue;
        };
        let pivot = rows.swap_remove(pos);
        for r in rows.iter_mut().chain(out.iter_mut()) {
            if r.0 & bit != 0 {
                r.0 ^= pivot.0;
                r.1 ^= pivot.1;
            }
        }
        out.push(pivot);
    }
    out
}

/// The reduced linear system whose solution set is `R`.
pub fn affine_form(r: &Relation) -> Result<Gf2System> {
    if r.is_empty() {
        return Err(Error::domain("the empty relation has no affine form here"));
    }
    if !coclone_member(r, CoCloneLabel::IL2) {
        return Err(Error::domain(format!("{r} is not affine")));
    }
    let n = r.arity();
    let codes: Vec<u32> = r.codes().collect();
    let t0 = codes[0];
    // basis of the difference space
    let mut basis: Vec<u32> = Vec::new();
    for &c in &codes {
        let mut v = c ^ t0;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let parity = |a: u32, v: u32| (a & v).count_ones() % 2 == 1;
    let eqs: Vec<(u32, bool)> = (1..=full_mask(n))
        .filter(|&a| basis.iter().all(|&v| !parity(a, v)))
        .map(|a| (a, parity(a, t0)))
        .collect();
    let sys = Gf2System {
        arity: n,
        rows: reduce_rows(n, eqs),
    };
    assert_eq!(sys.solutions(), *r, "affine round trip failed");
    Ok(sys)
}

pub fn is_coupled(r: &Relation) -> Result<bool> {
    Ok(affine_form(r)?.is_coupled())
}

/// The finest partition of the coordinates such that `R` is the product of
/// its projections onto the parts. Parts are listed by smallest member.
pub fn decompose(r: &Relation) -> Vec<(CoordinateSet, Relation)> {
    let n = r.arity();
    if r.is_empty() || n == 1 {
        return vec![(CoordinateSet::all(n), r.clone())];
    }
    let mut parts = Vec::new();
    let mut rest = CoordinateSet::all(n);
    let mut current = r.clone();
    while !rest.is_empty() {
        let idx = rest.to_vec();
        let m = idx.len();
        let mut chosen = CoordinateSet::all(m);
        'search: for size in 1..m {
            for sub in CoordinateSet::subsets_of_size(m, size) {
                if !sub.contains(1) {
                    continue;
                }
                let comp = CoordinateSet::all(m).difference(&sub);
                let a = project(&current, &sub).expect("valid").len();
                let b = project(&current, &comp).expect("valid").len();
                if a * b == current.len() {
                    chosen = sub;
                    break 'search;
                }
            }
        }
        let global = CoordinateSet::new(&chosen.iter().map(|i| idx[i - 1]).collect::<Vec<_>>())
            .expect("in range");
        parts.push((global, project(&current, &chosen).expect("valid")));
        let comp = CoordinateSet::all(m).difference(&chosen);
        rest = rest.difference(&global);
        if !comp.is_empty() {
            current = project(&current, &comp).expect("valid");
        }
    }
    parts
}

/// Rebuilds a relation of arity `n` from parts covering `[n]`.
pub fn reassemble(n: usize, parts: &[(CoordinateSet, Relation)]) -> Result<Relation> {
    let mut cover = CoordinateSet::empty();
    for (s, p) in parts {
        if s.len() != p.arity() || !cover.difference(s).eq(&cover) || s.max().unwrap_or(0) > n {
            return Err(Error::arg("parts do not partition the coordinates"));
        }
        cover = cover.union(s);
    }
    if cover != CoordinateSet::all(n) {
        return Err(Error::arg("parts do not cover every coordinate"));
    }
    let idx: Vec<Vec<usize>> = parts.iter().map(|(s, _)| s.to_vec()).collect();
    Relation::from_predicate(n, |c| {
        parts
            .iter()
            .zip(&idx)
            .all(|((_, p), i)| p.contains_code(extract(c, n, i)))
    })
}

/// Base kinds of the Q class. `AtMostOneFlipped(N)` is
/// `{t | d_H(0, t) ≤ 1} ⊕ N` on the factor's coordinates, with `N` given
/// in the coordinates of the whole relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QKind {
    Empty,
    C0,
    C1,
    Eq2,
    Neq2,
    AtMostOneFlipped(CoordinateSet),
}

impl fmt::Display for QKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QKind::Empty => f.write_str("empty"),
            QKind::C0 => f.write_str("c0"),
            QKind::C1 => f.write_str("c1"),
            QKind::Eq2 => f.write_str("eq2"),
            QKind::Neq2 => f.write_str("neq2"),
            QKind::AtMostOneFlipped(n) => write!(f, "amo{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFactor {
    pub coords: CoordinateSet,
    pub kind: QKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFactorization {
    pub arity: usize,
    pub factors: Vec<QFactor>,
}

impl QFactor {
    /// Membership of a full tuple code (arity `n`) in this factor.
    pub fn accepts(&self, code: u32, n: usize) -> bool {
        let bit = |i: usize| (code >> (n - i)) & 1 == 1;
        let c: Vec<usize> = self.coords.to_vec();
        match &self.kind {
            QKind::Empty => false,
            QKind::C0 => !bit(c[0]),
            QKind::C1 => bit(c[0]),
            QKind::Eq2 => bit(c[0]) == bit(c[1]),
            QKind::Neq2 => bit(c[0]) != bit(c[1]),
            QKind::AtMostOneFlipped(neg) => {
                c.iter().filter(|&&i| bit(i) != neg.contains(i)).count() <= 1
            }
        }
    }
}

impl QFactorization {
    pub fn reassemble(&self) -> Relation {
        let n = self.arity;
        Relation::from_predicate(n, |c| self.factors.iter().all(|f| f.accepts(c, n)))
            .expect("arity validated")
    }
}

impl fmt::Display for QFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, fac) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{}:{}", fac.kind, fac.coords)?;
        }
        Ok(())
    }
}

fn match_factor(coords: CoordinateSet, p: &Relation) -> Option<QKind> {
    let m = p.arity();
    if p.is_empty() {
        return Some(QKind::Empty);
    }
    if m == 1 {
        return Some(match p.len() {
            2 => QKind::AtMostOneFlipped(CoordinateSet::empty()),
            _ if p.contains_code(0) => QKind::C0,
            _ => QKind::C1,
        });
    }
    if m == 2 && p.len() == 2 {
        if p.contains_code(0) && p.contains_code(3) {
            return Some(QKind::Eq2);
        }
        if p.contains_code(1) && p.contains_code(2) {
            return Some(QKind::Neq2);
        }
    }
    if p.len() != m + 1 {
        return None;
    }
    let idx = coords.to_vec();
    for centre in p.codes() {
        let ok = p.codes().all(|c| (c ^ centre).count_ones() <= 1);
        if ok {
            let neg: Vec<usize> = (1..=m)
                .filter(|i| (centre >> (m - i)) & 1 == 1)
                .map(|i| idx[i - 1])
                .collect();
            return Some(QKind::AtMostOneFlipped(CoordinateSet::new(&neg).expect("in range")));
        }
    }
    None
}

/// A factorization of `R` into flipped and permuted base kinds, if `R ∈ Q`.
pub fn in_q(r: &Relation) -> Option<QFactorization> {
    let n = r.arity();
    if r.is_empty() {
        return Some(QFactorization {
            arity: n,
            factors: vec![QFactor {
                coords: CoordinateSet::all(n),
                kind: QKind::Empty,
            }],
        });
    }
    let mut factors = Vec::new();
    for (coords, p) in decompose(r) {
        factors.push(QFactor {
            kind: match_factor(coords, &p)?,
            coords,
        });
    }
    let q = QFactorization { arity: n, factors };
    debug_assert_eq!(q.reassemble(), *r);
    Some(q)
}

/// Relations of arity `n` (n ≤ 4) that break "coupled iff not Δ-matroid"
/// among the affine ones.
pub fn sweep_coupled_vs_delta(n: usize) -> Vec<Relation> {
    all_relations(n)
        .filter_map(|r| {
            let s = affine_form(&r).ok()?;
            (s.is_coupled() == is_delta_matroid(&r)).then_some(r)
        })
        .collect()
}

/// Δ-matroid relations in ID2 of arity `n` (n ≤ 4) with no Q factorization,
/// or whose factorization does not reassemble to the relation.
pub fn sweep_q_factorization(n: usize) -> Vec<Relation> {
    all_relations(n)
        .filter(|r| coclone_member(r, CoCloneLabel::ID2) && is_delta_matroid(r))
        .filter(|r| in_q(r).is_none_or(|q| q.reassemble() != *r))
        .collect()
}

fn all_relations(n: usize) -> impl ParallelIterator<Item = Relation> {
    assert!((1..=4).contains(&n), "sweeps cover arity 1..=4");
    let count: u64 = 1 << (1u32 << n);
    (0..count)
        .into_par_iter()
        .map(move |m| Relation::from_small_mask(n, m).expect("arity ≤ 4"))
}

/// `NAND³(y,z,w) ∧ NAND³(x,z,w) ∧ NAND²(x,y)` on `(x,y,z,w)`.
pub fn open_arity4_relation() -> Relation {
    Relation::from_predicate(4, |c| {
        let b = |i: u32| (c >> (4 - i)) & 1 == 1;
        let (x, y, z, w) = (b(1), b(2), b(3), b(4));
        !(y && z && w) && !(x && z && w) && !(x && y)
    })
    .expect("arity 4")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{c0, c1, eq, flip, impl_rel, nand, neq, product};

    fn rel(arity: usize, tuples: &[&str]) -> Relation {
        Relation::from_strs(arity, tuples).unwrap()
    }

    fn chain() -> Relation {
        // NAND²(x1,x2) ∧ NAND²(x2,x3)
        Relation::from_predicate(3, |c| c & 0b110 != 0b110 && c & 0b011 != 0b011).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert!(is_delta_matroid(&nand(3)));
        assert!(!is_delta_matroid(&eq(3)));
        assert!(!is_delta_matroid(&chain()));
        let w = delta_matroid_witness(&eq(3)).unwrap();
        assert_eq!(w.to_string(), "x=000 y=111 x'=001");
        assert!(w.violates(&eq(3)));
        assert!(!w.violates(&Relation::full(3).unwrap()));
    }

    #[test]
    fn affine_examples() {
        let s = affine_form(&eq(2)).unwrap();
        assert_eq!(s.to_string(), "x1 + x2 = 0");
        assert!(!s.is_coupled());
        let s = affine_form(&neq()).unwrap();
        assert_eq!(s.to_string(), "x1 + x2 = 1");
        let s = affine_form(&eq(3)).unwrap();
        assert_eq!(s.rows().len(), 2);
        assert_eq!(s.free_columns(), vec![3]);
        assert!(s.is_coupled());
        assert!(!is_coupled(&product(&eq(2), &neq()).unwrap()).unwrap());
        assert!(matches!(affine_form(&nand(2)), Err(Error::Domain(_))));
        assert!(affine_form(&Relation::empty(2).unwrap()).is_err());
    }

    #[test]
    fn decompose_examples() {
        let r = product(&c0(), &nand(2)).unwrap();
        let d = decompose(&r);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], (CoordinateSet::new(&[1]).unwrap(), c0()));
        assert_eq!(d[1], (CoordinateSet::new(&[2, 3]).unwrap(), nand(2)));
        assert_eq!(decompose(&eq(2)).len(), 1);
        assert_eq!(decompose(&Relation::full(2).unwrap()).len(), 2);
        // interleaved factors
        let r = Relation::from_predicate(4, |c| ((c >> 3) & 1) == ((c >> 1) & 1)).unwrap();
        let d = decompose(&r);
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].0, CoordinateSet::new(&[1, 3]).unwrap());
        assert_eq!(reassemble(4, &d).unwrap(), r);
    }

    #[test]
    fn q_examples() {
        let q = in_q(&impl_rel()).unwrap();
        assert_eq!(q.factors.len(), 1);
        assert_eq!(q.factors[0].kind, QKind::AtMostOneFlipped(CoordinateSet::new(&[2]).unwrap()));
        let q = in_q(&nand(2)).unwrap();
        assert_eq!(q.factors[0].kind, QKind::AtMostOneFlipped(CoordinateSet::empty()));
        assert!(in_q(&eq(3)).is_none());
        let q = in_q(&product(&c1(), &neq()).unwrap()).unwrap();
        assert_eq!(q.to_string(), "c1:{1} x neq2:{2,3}");
        assert_eq!(in_q(&Relation::empty(3).unwrap()).unwrap().factors[0].kind, QKind::Empty);
        let amo = flip(&rel(3, &["000", "100", "010", "001"]), &CoordinateSet::new(&[1, 3]).unwrap()).unwrap();
        let q = in_q(&amo).unwrap();
        assert_eq!(q.reassemble(), amo);
    }

    #[test]
    fn coupled_iff_not_delta_up_to_arity_3() {
        for a in 1..=3usize {
            for mask in 1..1u64 << (1 << a) {
                let r = Relation::from_small_mask(a, mask).unwrap();
                if let Ok(s) = affine_form(&r) {
                    assert_eq!(s.is_coupled(), !is_delta_matroid(&r), "{r}");
                }
            }
        }
    }

    #[test]
    fn sweeps_at_arity_4() {
        assert!(sweep_coupled_vs_delta(4).is_empty());
        assert!(sweep_q_factorization(4).is_empty());
        for n in 1..=3 {
            assert!(sweep_q_factorization(n).is_empty());
        }
    }

    #[test]
    fn open_relation_is_delta() {
        let r = open_arity4_relation();
        assert_eq!(r.len(), 10);
        assert!(is_delta_matroid(&r));
    }
}
