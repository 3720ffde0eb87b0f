//! Complexity classification of bounded-occurrence weighted Max Ones,
//! with evidence that can be replayed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clone::{coclone_member, is_invariant, h_function, locate_coclone, CoCloneLabel, ConstraintLanguage};
use crate::delta::{affine_form, delta_matroid_witness, in_q, is_delta_matroid, DeltaWitness, Gf2System, QFactorization};
use crate::error::{Error, Result};
use crate::gadget::{
    catalog_entry, derivation_env, derive_eq_or_impl, derive_nand_m, extract_nondelta_core, projection_gadget,
    search_gadget, verify_gadget, Gadget, SearchBounds, SearchOutcome, Var,
};
use crate::relation::{c0, c1, eq, impl_rel, nand, permute, Relation};
use crate::solver::{drop_constants, mis_to_maxones, random, solve_exact, Instance, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Class {
    Po,
    ApxComplete,
    PolyApxComplete,
    ApxHard,
    FeasibilityNpHard,
    /// Same complexity as the unbounded problem over the co-clone; the
    /// unbounded class is given where it is known here.
    EquivToUnbounded {
        label: CoCloneLabel,
        annotation: Option<Box<Class>>,
    },
    Trivial1Valid,
    Conditional {
        if_eq2: Box<Class>,
        if_not: Box<Class>,
        outcome: SearchOutcome,
    },
    Open,
    /// NP-hardness carried over from the language with constants added.
    NpHard { from: Box<Class> },
}

impl Class {
    /// Whether the class implies NP-hardness of the optimisation problem.
    pub fn is_hard(&self) -> bool {
        match self {
            Class::ApxComplete | Class::PolyApxComplete | Class::ApxHard | Class::FeasibilityNpHard => true,
            Class::NpHard { .. } => true,
            Class::EquivToUnbounded { annotation, .. } => annotation.as_ref().is_some_and(|a| a.is_hard()),
            Class::Conditional { if_eq2, if_not, .. } => if_eq2.is_hard() && if_not.is_hard(),
            Class::Po | Class::Trivial1Valid | Class::Open => false,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Po => f.write_str("PO"),
            Class::ApxComplete => f.write_str("APX_COMPLETE"),
            Class::PolyApxComplete => f.write_str("POLY_APX_COMPLETE"),
            Class::ApxHard => f.write_str("APX_HARD"),
            Class::FeasibilityNpHard => f.write_str("FEASIBILITY_NP_HARD"),
            Class::EquivToUnbounded { label, annotation } => match annotation {
                Some(a) => write!(f, "EQUIV_TO_UNBOUNDED({label}; {a})"),
                None => write!(f, "EQUIV_TO_UNBOUNDED({label})"),
            },
            Class::Trivial1Valid => f.write_str("TRIVIAL_1VALID"),
            Class::Conditional { if_eq2, if_not, outcome } => {
                write!(f, "CONDITIONAL(eq2: {if_eq2}; otherwise: {if_not}; search {outcome})")
            }
            Class::Open => f.write_str("OPEN"),
            Class::NpHard { from } => write!(f, "NP_HARD(from {from})"),
        }
    }
}

/// A conjunction atom: NAND over the listed coordinates, or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Nand(Vec<usize>),
    Const(usize, bool),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Nand(c) => {
                let v: Vec<String> = c.iter().map(|i| format!("x{i}")).collect();
                write!(f, "NAND{}({})", c.len(), v.join(","))
            }
            Atom::Const(i, b) => write!(f, "c{}(x{i})", *b as u8),
        }
    }
}

/// The strongest conjunction of NAND and constant atoms implied by `r`,
/// if it defines `r` exactly.
pub fn plain_nand_form(r: &Relation) -> Option<Vec<Atom>> {
    let n = r.arity();
    let mut atoms = Vec::new();
    for i in 1..=n {
        let bit = |c: u32| (c >> (n - i)) & 1 == 1;
        if r.codes().all(|c| !bit(c)) {
            atoms.push(Atom::Const(i, false));
        } else if r.codes().all(bit) {
            atoms.push(Atom::Const(i, true));
        }
    }
    for size in 2..=n {
        for s in crate::relation::CoordinateSet::subsets_of_size(n, size) {
            let mask = s.iter().fold(0u32, |m, i| m | 1 << (n - i));
            let implied = r.codes().all(|c| c & mask != mask);
            let redundant = atoms.iter().any(|a| match a {
                Atom::Nand(t) => t.iter().all(|i| s.contains(*i)),
                Atom::Const(i, false) => s.contains(*i),
                _ => false,
            });
            if implied && !redundant {
                atoms.push(Atom::Nand(s.to_vec()));
            }
        }
    }
    (conjunction(n, &atoms) == *r).then_some(atoms)
}

fn conjunction(n: usize, atoms: &[Atom]) -> Relation {
    Relation::from_predicate(n, |c| {
        let bit = |i: usize| (c >> (n - i)) & 1 == 1;
        atoms.iter().all(|a| match a {
            Atom::Nand(s) => !s.iter().all(|&i| bit(i)),
            Atom::Const(i, b) => bit(*i) == *b,
        })
    })
    .expect("arity of an existing relation")
}

/// Name of the allowed special-case relation `r` matches up to a
/// coordinate permutation: NAND^m, IMPL or a constant.
pub fn special_case_match(r: &Relation) -> Option<String> {
    let n = r.arity();
    if *r == nand(n) {
        return Some(format!("NAND{n}"));
    }
    if *r == c0() {
        return Some("C0".into());
    }
    if *r == c1() {
        return Some("C1".into());
    }
    if n == 2 && (permute(&impl_rel(), &[1, 2]).ok()? == *r || permute(&impl_rel(), &[2, 1]).ok()? == *r) {
        return Some("IMPL".into());
    }
    None
}

#[derive(Clone, Debug)]
pub enum Evidence {
    /// Every relation of the language lies in the co-clone.
    CoClone {
        label: CoCloneLabel,
        relations: Vec<(String, Relation)>,
    },
    DeltaWitness {
        name: String,
        relation: Relation,
        witness: DeltaWitness,
    },
    DeltaMatroid { name: String, relation: Relation },
    Affine {
        name: String,
        relation: Relation,
        system: Gf2System,
        coupled: bool,
    },
    QFactorization {
        name: String,
        relation: Relation,
        factorization: QFactorization,
    },
    Gadget {
        target_name: String,
        target: Relation,
        gadget: Gadget,
        env: ConstraintLanguage,
    },
    CatalogMatch {
        name: String,
        relation: Relation,
        entry: String,
        permutation: [usize; 3],
        core: Relation,
        gadget: Gadget,
    },
    PlainNandForm {
        name: String,
        relation: Relation,
        atoms: Vec<Atom>,
    },
    NamedMatch {
        name: String,
        relation: Relation,
        matched: String,
    },
    /// Weighted independent set in degree-`k` graphs coincides with Max
    /// Ones over NAND², checked on seeded graphs.
    MisEmbedding { k: usize, seed: u64 },
    /// Decision answers survive constant removal through `relation`,
    /// checked on seeded instances over the language.
    ConstantDrop {
        name: String,
        relation: Relation,
        language: ConstraintLanguage,
        k: usize,
        seed: u64,
    },
    OnesValid { relations: Vec<(String, Relation)> },
    SearchExhausted {
        target_name: String,
        target: Relation,
        env: ConstraintLanguage,
        k: usize,
        bounds: SearchBounds,
        outcome: SearchOutcome,
    },
}

fn brute_mis(g: &crate::solver::WeightedGraph) -> Weight {
    let n = g.names.len();
    (0u32..1 << n)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| g.is_independent(s))
        .map(|s| g.weight_of(&s))
        .max()
        .unwrap_or_default()
}

fn random_language_instance(rng: &mut impl Rng, lang: &ConstraintLanguage, n: usize, k: usize) -> Instance {
    let mut inst = Instance::new();
    for i in 0..n {
        inst.add_var(&format!("v{}", i + 1), Weight::from_integer(rng.gen_range(0..=6)))
            .expect("fresh name");
    }
    let rels: Vec<(&str, &Relation)> = lang.iter().collect();
    for (name, r) in &rels {
        inst.add_relation(name, (*r).clone());
    }
    let mut occ = vec![0usize; n];
    for _ in 0..rng.gen_range(1..=n + 2) {
        let (name, r) = rels[rng.gen_range(0..rels.len())];
        let free: Vec<usize> = (0..n).filter(|&v| occ[v] < k).collect();
        if free.is_empty() {
            break;
        }
        let scope: Vec<usize> = (0..r.arity()).map(|_| free[rng.gen_range(0..free.len())]).collect();
        let mut tmp = occ.clone();
        for &v in &scope {
            tmp[v] += 1;
        }
        if tmp.iter().all(|&c| c <= k) {
            occ = tmp;
            inst.add_constraint(name, scope).expect("valid scope");
        }
    }
    inst.bound = Some(k);
    inst
}

fn constant_drop_holds(name: &str, lang: &ConstraintLanguage, k: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..3).all(|_| {
        let inst = random_language_instance(&mut rng, lang, 6, k);
        let Ok((out, map)) = drop_constants(&inst, name) else { return false };
        let (Ok(before), Ok(after)) = (solve_exact(&inst), solve_exact(&out)) else { return false };
        let total = inst.total_weight().to_integer();
        (0..=total + 1).all(|kk| {
            let kk = Weight::from_integer(kk);
            let b = before.as_ref().is_some_and(|s| s.measure >= kk);
            let a = after.as_ref().is_some_and(|s| s.measure >= map.apply(kk).expect("non-negative"));
            a == b
        })
    })
}

impl Evidence {
    pub fn tag(&self) -> &'static str {
        match self {
            Evidence::CoClone { .. } => "coclone",
            Evidence::DeltaWitness { .. } => "delta-witness",
            Evidence::DeltaMatroid { .. } => "delta-matroid",
            Evidence::Affine { .. } => "affine",
            Evidence::QFactorization { .. } => "q-factorization",
            Evidence::Gadget { .. } => "gadget",
            Evidence::CatalogMatch { .. } => "catalog-match",
            Evidence::PlainNandForm { .. } => "nand-form",
            Evidence::NamedMatch { .. } => "named-match",
            Evidence::MisEmbedding { .. } => "mis-embedding",
            Evidence::ConstantDrop { .. } => "constant-drop",
            Evidence::OnesValid { .. } => "ones-valid",
            Evidence::SearchExhausted { .. } => "search",
        }
    }

    /// One-line description.
    pub fn describe(&self) -> String {
        match self {
            Evidence::CoClone { label, relations } => {
                let names: Vec<&str> = relations.iter().map(|(n, _)| n.as_str()).collect();
                format!("{{{}}} within {label}", names.join(","))
            }
            Evidence::DeltaWitness { name, witness, .. } => format!("{name} fails the two-step axiom at {witness}"),
            Evidence::DeltaMatroid { name, .. } => format!("{name} satisfies the two-step axiom"),
            Evidence::Affine { name, system, coupled, .. } => {
                format!("{name}: {system} ({})", if *coupled { "coupled" } else { "uncoupled" })
            }
            Evidence::QFactorization { name, factorization, .. } => format!("{name} = {factorization}"),
            Evidence::Gadget { target_name, gadget, .. } => {
                format!("{target_name} is {}-represented: {}", gadget.cap, one_line(gadget))
            }
            Evidence::CatalogMatch { name, entry, permutation, .. } => {
                format!("{name} yields catalog entry {entry} under permutation {permutation:?}")
            }
            Evidence::PlainNandForm { name, atoms, .. } => {
                let a: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
                format!("{name} = {}", a.join(" & "))
            }
            Evidence::NamedMatch { name, matched, .. } => format!("{name} is {matched} up to permutation"),
            Evidence::MisEmbedding { k, seed } => {
                format!("independent set in degree-{k} graphs equals Max Ones over NAND2 (seed {seed})")
            }
            Evidence::ConstantDrop { name, seed, .. } => {
                format!("constants removed through {name}; decision answers agree (seed {seed})")
            }
            Evidence::OnesValid { relations } => {
                let names: Vec<&str> = relations.iter().map(|(n, _)| n.as_str()).collect();
                format!("all of {{{}}} contain the all-ones tuple", names.join(","))
            }
            Evidence::SearchExhausted {
                target_name,
                k,
                bounds,
                outcome,
                ..
            } => format!(
                "no {k}-representation of {target_name} with at most {} auxiliaries and {} constraints ({outcome})",
                bounds.max_aux, bounds.max_constraints
            ),
        }
    }

    /// Replays the check behind this item.
    pub fn reverify(&self) -> bool {
        match self {
            Evidence::CoClone { label, relations } => relations.iter().all(|(_, r)| coclone_member(r, *label)),
            Evidence::DeltaWitness { relation, witness, .. } => witness.violates(relation),
            Evidence::DeltaMatroid { relation, .. } => is_delta_matroid(relation),
            Evidence::Affine {
                relation,
                system,
                coupled,
                ..
            } => {
                system.solutions() == *relation
                    && system.is_coupled() == *coupled
                    && affine_form(relation).is_ok_and(|s| s == *system)
            }
            Evidence::QFactorization {
                relation,
                factorization,
                ..
            } => factorization.reassemble() == *relation,
            Evidence::Gadget {
                target, gadget, env, ..
            } => verify_gadget(target, gadget, env).unwrap_or(false),
            Evidence::CatalogMatch {
                relation,
                entry,
                permutation,
                core,
                gadget,
                ..
            } => {
                let Some(e) = catalog_entry(entry) else { return false };
                permute(&e.relation, permutation).is_ok_and(|p| p == *core)
                    && !is_delta_matroid(core)
                    && verify_gadget(core, gadget, &derivation_env(relation)).unwrap_or(false)
            }
            Evidence::PlainNandForm { relation, atoms, .. } => conjunction(relation.arity(), atoms) == *relation,
            Evidence::NamedMatch { relation, matched, .. } => special_case_match(relation).as_deref() == Some(matched),
            Evidence::MisEmbedding { k, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..3).all(|_| {
                    let g = random::graph(&mut rng, 9, *k);
                    let Ok(inst) = mis_to_maxones(&g, *k) else { return false };
                    matches!(solve_exact(&inst), Ok(Some(s)) if s.measure == brute_mis(&g))
                })
            }
            Evidence::ConstantDrop {
                name, language, k, seed, ..
            } => constant_drop_holds(name, language, *k, *seed),
            Evidence::OnesValid { relations } => relations.iter().all(|(_, r)| r.is_1_valid()),
            Evidence::SearchExhausted {
                target_name,
                target,
                env,
                k,
                bounds,
                outcome,
            } => search_gadget(target_name, target, env, *k, *bounds).is_ok_and(|r| r.outcome == *outcome),
        }
    }
}

fn one_line(g: &Gadget) -> String {
    let parts: Vec<String> = g
        .constraints
        .iter()
        .map(|c| {
            let vs: Vec<String> = c.scope.iter().map(|v| v.to_string()).collect();
            format!("{}({})", c.relation, vs.join(","))
        })
        .collect();
    parts.join(" & ")
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub class: Class,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(class: Class) -> Self {
        Verdict {
            class,
            evidence: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn with(mut self, e: Evidence) -> Self {
        self.evidence.push(e);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    /// Whether every evidence item replays successfully.
    pub fn reverify(&self) -> bool {
        self.evidence.iter().all(|e| e.reverify())
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.class)?;
        for e in &self.evidence {
            writeln!(f, "  [{}] {}", e.tag(), e.describe())?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub search: SearchBounds,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            search: SearchBounds::default(),
            seed: 0x5eed,
        }
    }
}

fn relations_of(lang: &ConstraintLanguage) -> Vec<(String, Relation)> {
    lang.iter().map(|(n, r)| (n.to_string(), r.clone())).collect()
}

fn coclone_evidence(lang: &ConstraintLanguage, label: CoCloneLabel) -> Evidence {
    Evidence::CoClone {
        label,
        relations: relations_of(lang),
    }
}

fn first_non_delta(lang: &ConstraintLanguage) -> Option<(String, Relation, DeltaWitness)> {
    lang.iter()
        .find_map(|(n, r)| delta_matroid_witness(r).map(|w| (n.to_string(), r.clone(), w)))
}

fn require_conservative(lang: &ConstraintLanguage) -> Result<()> {
    if lang.is_conservative() {
        Ok(())
    } else {
        Err(Error::arg(format!("language {} is not conservative", lang.name())))
    }
}

/// Classification for occurrence bounds `k ≥ 3`.
pub fn classify_k(lang: &ConstraintLanguage, k: usize, opts: &ClassifyOptions) -> Result<Verdict> {
    if k < 3 {
        return Err(Error::arg("classify_k needs k >= 3"));
    }
    require_conservative(lang)?;
    if lang.within(CoCloneLabel::IV2) {
        return Ok(Verdict::new(Class::Po).with(coclone_evidence(lang, CoCloneLabel::IV2)));
    }
    if lang.within(CoCloneLabel::IS12Limit) {
        let label = locate_coclone(lang);
        let mut v = Verdict::new(Class::Open).with(coclone_evidence(lang, label));
        let res = search_gadget("EQ2", &eq(2), lang, k, opts.search)?;
        if let Some(g) = res.gadget {
            v.class = Class::PolyApxComplete;
            return Ok(v.with(Evidence::Gadget {
                target_name: "EQ2".into(),
                target: eq(2),
                gadget: g,
                env: lang.clone(),
            }));
        }
        v.class = Class::Conditional {
            if_eq2: Box::new(Class::PolyApxComplete),
            if_not: Box::new(Class::ApxComplete),
            outcome: res.outcome,
        };
        v = v.with(Evidence::SearchExhausted {
            target_name: "EQ2".into(),
            target: eq(2),
            env: lang.clone(),
            k,
            bounds: opts.search,
            outcome: res.outcome,
        });
        if let Some(e) = nand2_evidence(lang, label) {
            v = v.with(e);
        }
        v = v.with(Evidence::MisEmbedding { k, seed: opts.seed });
        return Ok(v.note("no search result decides whether EQ2 is representable"));
    }
    let label = locate_coclone(lang);
    let annotation = match label {
        CoCloneLabel::IL2 => Some(Box::new(Class::ApxComplete)),
        CoCloneLabel::ID2 => Some(Box::new(Class::PolyApxComplete)),
        _ => None,
    };
    let mut v = Verdict::new(Class::EquivToUnbounded { label, annotation }).with(coclone_evidence(lang, label));
    let outside_is12 = lang
        .iter()
        .find(|(_, r)| coclone_member(r, CoCloneLabel::IE2) && !coclone_member(r, CoCloneLabel::IS12Limit));
    if lang.within(CoCloneLabel::IE2) {
        if let Some((name, r)) = outside_is12 {
            let (g, kind) = derive_eq_or_impl(r)?;
            let target = if kind == crate::gadget::LinkKind::Eq2 { eq(2) } else { impl_rel() };
            let mut env = derivation_env(r);
            env.insert("R", r.clone());
            v = v
                .with(Evidence::Gadget {
                    target_name: kind.to_string(),
                    target,
                    gadget: g,
                    env,
                })
                .note(format!("R = {name}"));
        }
        return Ok(v);
    }
    for (tname, target) in [("EQ2", eq(2)), ("IMPL", impl_rel())] {
        let res = search_gadget(tname, &target, lang, 3, opts.search)?;
        if let Some(g) = res.gadget {
            return Ok(v.with(Evidence::Gadget {
                target_name: tname.into(),
                target,
                gadget: g,
                env: lang.clone(),
            }));
        }
    }
    Ok(v.note("no EQ2 or IMPL gadget found within the search bounds"))
}

/// A 2-representation of NAND² for a language located at IS12(m).
fn nand2_evidence(lang: &ConstraintLanguage, label: CoCloneLabel) -> Option<Evidence> {
    let CoCloneLabel::IS12(m) = label else { return None };
    let hm1 = h_function(m - 1).ok()?;
    let (name, r) = lang.iter().find(|(_, r)| !is_invariant(r, &hm1))?;
    let x = derive_nand_m(r, m).ok()?;
    let mut g = projection_gadget(name, r.arity(), &x, "NAND2");
    // NAND^m(x1, x2, 1, ..., 1) is NAND²
    g.primary_count = 2;
    let mut extra = 0;
    let scope = &mut g.constraints[0].scope;
    for v in scope.iter_mut() {
        if let Var::Primary(i) = *v {
            if i > 2 {
                extra += 1;
                *v = Var::Aux(1000 + extra);
            }
        }
    }
    let base = g.aux_count;
    for v in scope.iter_mut() {
        if let Var::Aux(i) = *v {
            if i > 1000 {
                *v = Var::Aux(base + i - 1000);
            }
        }
    }
    g.aux_count += extra;
    for j in 1..=extra {
        g.push("C1", vec![Var::Aux(base + j)]);
    }
    let mut env = lang.clone();
    env.insert("C1", c1());
    Some(Evidence::Gadget {
        target_name: "NAND2".into(),
        target: nand(2),
        gadget: g,
        env,
    })
}

/// Classification for two occurrences per variable.
pub fn classify_2(lang: &ConstraintLanguage, opts: &ClassifyOptions) -> Result<Verdict> {
    require_conservative(lang)?;
    let _ = opts;
    for label in [CoCloneLabel::IV2, CoCloneLabel::ID1] {
        if lang.within(label) {
            return Ok(Verdict::new(Class::Po).with(coclone_evidence(lang, label)));
        }
    }
    let non_delta = first_non_delta(lang);
    let witness_evidence = non_delta.as_ref().map(|(n, r, w)| Evidence::DeltaWitness {
        name: n.clone(),
        relation: r.clone(),
        witness: *w,
    });
    if lang.within(CoCloneLabel::IL2) {
        let mut v = Verdict::new(if non_delta.is_some() { Class::ApxComplete } else { Class::Po })
            .with(coclone_evidence(lang, CoCloneLabel::IL2));
        for (name, r) in lang.iter() {
            if r.is_empty() {
                continue;
            }
            let system = affine_form(r)?;
            let coupled = system.is_coupled();
            if non_delta.is_none() || coupled {
                v = v.with(Evidence::Affine {
                    name: name.to_string(),
                    relation: r.clone(),
                    system,
                    coupled,
                });
            }
        }
        return Ok(match witness_evidence {
            Some(e) => v.with(e),
            None => v.note("uncoupled systems translate to ILP-2"),
        });
    }
    // hardness needs the whole of ID2; smaller languages inside it fall
    // through to the IE2 case
    if lang.within(CoCloneLabel::ID2) && locate_coclone(lang) == CoCloneLabel::ID2 {
        if let Some(e) = witness_evidence {
            return Ok(Verdict::new(Class::PolyApxComplete)
                .with(coclone_evidence(lang, CoCloneLabel::ID2))
                .with(e));
        }
        let mut v = Verdict::new(Class::Po).with(coclone_evidence(lang, CoCloneLabel::ID2));
        for (name, r) in lang.iter() {
            let q = in_q(r).expect("Δ-matroid relations in ID2 lie in Q");
            v = v.with(Evidence::QFactorization {
                name: name.to_string(),
                relation: r.clone(),
                factorization: q,
            });
        }
        return Ok(v);
    }
    if let Some((name, r, _)) = &non_delta {
        let e = witness_evidence.expect("non-delta relation present");
        if lang.within(CoCloneLabel::IE2) {
            let core = extract_nondelta_core(r)?;
            let mut v = Verdict::new(Class::ApxHard)
                .with(coclone_evidence(lang, CoCloneLabel::IE2))
                .with(e);
            v = match core.catalog {
                Some((entry, f)) => v.with(Evidence::CatalogMatch {
                    name: name.clone(),
                    relation: r.clone(),
                    entry: entry.to_string(),
                    permutation: f,
                    core: core.relation.clone(),
                    gadget: core.gadget.clone(),
                }),
                None => v.note(format!("core of {name} has no catalog match")),
            };
            let forms: Option<Vec<Evidence>> = lang
                .iter()
                .map(|(n, r)| {
                    plain_nand_form(r).map(|atoms| Evidence::PlainNandForm {
                        name: n.to_string(),
                        relation: r.clone(),
                        atoms,
                    })
                })
                .collect();
            if let Some(forms) = forms {
                v.class = Class::ApxComplete;
                v.evidence.extend(forms);
                v = v.note("every relation is a conjunction of NAND atoms and constants, so the greedy algorithm applies");
            }
            return Ok(v);
        }
        return Ok(Verdict::new(Class::FeasibilityNpHard).with(e));
    }
    let matches: Option<Vec<Evidence>> = lang
        .iter()
        .map(|(n, r)| {
            special_case_match(r).map(|m| Evidence::NamedMatch {
                name: n.to_string(),
                relation: r.clone(),
                matched: m,
            })
        })
        .collect();
    if let Some(ms) = matches {
        let mut v = Verdict::new(Class::Po);
        v.evidence = ms;
        return Ok(v.note("NAND and IMPL constraints translate to ILP-2"));
    }
    let label = locate_coclone(lang);
    let mut v = Verdict::new(Class::Open).with(coclone_evidence(lang, label));
    for (n, r) in lang.iter() {
        v = v.with(Evidence::DeltaMatroid {
            name: n.to_string(),
            relation: r.clone(),
        });
    }
    Ok(v.note("every relation is a Δ-matroid relation and no tractable case applies"))
}

/// Classification of a possibly non-conservative language.
pub fn classify_nonconservative(lang: &ConstraintLanguage, k: usize, opts: &ClassifyOptions) -> Result<Verdict> {
    if lang.values().all(|r| r.is_1_valid()) {
        return Ok(Verdict::new(Class::Trivial1Valid)
            .with(Evidence::OnesValid {
                relations: relations_of(lang),
            })
            .note("the all-ones assignment is optimal"));
    }
    let closed = lang.with_constants();
    let base = classify_conservative(&closed, k, opts)?;
    if !base.class.is_hard() {
        let mut v = base;
        v.notes.push("the language with constants added is not hard; nothing to transfer".into());
        return Ok(v);
    }
    let forcing = lang.iter().find(|(_, r)| {
        !r.is_1_valid() && r.codes().map(|c| c.count_ones() as usize).max() == Some(r.arity() - 1)
    });
    let Some((name, r)) = forcing else {
        let mut v = Verdict::new(Class::Open);
        v.notes.push(format!(
            "with constants: {}; no relation has a maximal tuple with a single zero",
            base.class
        ));
        return Ok(v);
    };
    let mut v = Verdict::new(Class::NpHard {
        from: Box::new(base.class.clone()),
    })
    .with(Evidence::ConstantDrop {
        name: name.to_string(),
        relation: r.clone(),
        language: closed,
        k,
        seed: opts.seed,
    });
    v.evidence.extend(base.evidence);
    Ok(v.note("approximation classes do not carry over, only NP-hardness"))
}

fn classify_conservative(lang: &ConstraintLanguage, k: usize, opts: &ClassifyOptions) -> Result<Verdict> {
    match k {
        0 | 1 => Err(Error::arg("the occurrence bound must be at least 2")),
        2 => classify_2(lang, opts),
        _ => classify_k(lang, k, opts),
    }
}

/// Dispatches on conservativeness and the occurrence bound.
pub fn classify(lang: &ConstraintLanguage, k: usize, opts: &ClassifyOptions) -> Result<Verdict> {
    if k < 2 {
        return Err(Error::arg("the occurrence bound must be at least 2"));
    }
    if lang.is_conservative() {
        classify_conservative(lang, k, opts)
    } else {
        classify_nonconservative(lang, k, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::nand_chain;
    use crate::relation::or2;

    fn lang(rels: &[(&str, Relation)]) -> ConstraintLanguage {
        let mut l = ConstraintLanguage::from_relations("t", rels.iter().cloned());
        l.make_conservative();
        l
    }

    fn run(l: &ConstraintLanguage, k: usize) -> Verdict {
        let v = classify(l, k, &ClassifyOptions::default()).unwrap();
        assert!(v.reverify(), "{v}");
        v
    }

    #[test]
    fn bounded_three_examples() {
        assert_eq!(run(&lang(&[("IMPL", impl_rel())]), 3).class, Class::Po);
        let v = run(&lang(&[("NAND2", nand(2))]), 3);
        assert_eq!(
            v.class,
            Class::Conditional {
                if_eq2: Box::new(Class::PolyApxComplete),
                if_not: Box::new(Class::ApxComplete),
                outcome: SearchOutcome::Exhausted
            }
        );
        assert!(v.evidence.iter().any(|e| e.tag() == "mis-embedding"));
        assert!(v.evidence.iter().any(|e| e.tag() == "gadget"));
        let v = run(&lang(&[("EQ2", eq(2)), ("NAND2", nand(2))]), 3);
        assert_eq!(v.class, Class::PolyApxComplete);
        let v = run(&lang(&[("NAND2", nand(2)), ("IMPL", impl_rel())]), 3);
        assert!(matches!(v.class, Class::EquivToUnbounded { .. }));
    }

    #[test]
    fn bounded_two_examples() {
        assert_eq!(run(&lang(&[("EQ3", eq(3))]), 2).class, Class::Po);
        assert_eq!(run(&lang(&[("R", nand_chain())]), 2).class, Class::ApxComplete);
        assert_eq!(run(&lang(&[("NAND3", nand(3))]), 2).class, Class::Po);
        let v = run(&lang(&[("NAND3", nand(3)), ("IMPL", impl_rel())]), 2);
        assert_eq!(v.class, Class::Po);
        let v = run(&lang(&[("R4", crate::delta::open_arity4_relation())]), 2);
        assert_eq!(v.class, Class::Open);
        let parity = Relation::from_predicate(3, |c| c.count_ones() % 2 == 1).unwrap();
        assert_eq!(run(&lang(&[("P", parity)]), 2).class, Class::Po);
        let a2 = catalog_entry("A2").unwrap().relation;
        let or3 = Relation::from_predicate(3, |c| c != 0).unwrap();
        let v = run(&lang(&[("A2", a2.clone())]), 2);
        assert_eq!(v.class, Class::PolyApxComplete);
        let v = run(&lang(&[("A2", a2), ("OR3", or3)]), 2);
        assert_eq!(v.class, Class::FeasibilityNpHard);
    }

    #[test]
    fn nonconservative_examples() {
        let l = ConstraintLanguage::from_relations("t", [("OR2", or2())]);
        assert_eq!(run(&l, 2).class, Class::Trivial1Valid);
        let l = ConstraintLanguage::from_relations("t", [("EQ2", eq(2))]);
        assert_eq!(run(&l, 3).class, Class::Trivial1Valid);
        let l = ConstraintLanguage::from_relations("t", [("NAND2", nand(2))]);
        let v = run(&l, 3);
        assert!(matches!(v.class, Class::NpHard { .. }), "{v}");
    }

    #[test]
    fn nand_forms() {
        assert_eq!(plain_nand_form(&nand_chain()).unwrap().len(), 2);
        assert!(plain_nand_form(&impl_rel()).is_none());
        assert_eq!(plain_nand_form(&c1()).unwrap(), vec![Atom::Const(1, true)]);
    }
}
