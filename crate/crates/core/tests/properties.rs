use std::collections::BTreeMap;

use maxones_core::clone::{coclone_member, CoCloneLabel};
use maxones_core::delta::{affine_form, decompose, delta_matroid_witness, in_q, reassemble};
use maxones_core::gadget::{Gadget, Var};
use maxones_core::relation::{flip, parse_relations, render_relation, CoordinateSet, Relation};
use maxones_core::solver::{random, solve_exact, to_ilp2, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relation() -> impl Strategy<Value = Relation> {
    (1usize..=5).prop_flat_map(|n| {
        let max = if n == 5 { u32::MAX as u64 } else { (1u64 << (1 << n)) - 1 };
        (Just(n), 0..=max).prop_map(|(n, m)| Relation::from_small_mask(n, m).unwrap())
    })
}

fn gadget() -> impl Strategy<Value = Gadget> {
    (1usize..=3, 0usize..=3, 1usize..=3).prop_flat_map(|(p, a, k)| {
        let var = (0..p + a).prop_map(move |i| if i < p { Var::Primary(i + 1) } else { Var::Aux(i - p + 1) });
        let con = (prop::sample::select(vec!["NAND2", "IMPL", "R"]), prop::collection::vec(var, 1..=3));
        prop::collection::vec(con, 0..=4).prop_map(move |cs| {
            let mut g = Gadget::new("T", p, a, k);
            for (r, scope) in cs {
                g.push(r, scope);
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn decompose_partitions_and_reassembles(r in relation()) {
        prop_assume!(!r.is_empty());
        let parts = decompose(&r);
        let covered: usize = parts.iter().map(|(c, _)| c.len()).sum();
        prop_assert_eq!(covered, r.arity());
        let product: usize = parts.iter().map(|(_, p)| p.len()).product();
        prop_assert_eq!(product, r.len());
        prop_assert_eq!(reassemble(r.arity(), &parts).unwrap(), r);
    }

    #[test]
    fn q_factorizations_reassemble(r in relation()) {
        if let Some(q) = in_q(&r) {
            prop_assert_eq!(q.reassemble(), r.clone());
            prop_assert!(delta_matroid_witness(&r).is_none());
        }
    }

    #[test]
    fn witnesses_violate(r in relation()) {
        if let Some(w) = delta_matroid_witness(&r) {
            prop_assert!(w.violates(&r));
        }
    }

    #[test]
    fn affine_systems_round_trip(r in relation()) {
        if !r.is_empty() && coclone_member(&r, CoCloneLabel::IL2) {
            prop_assert_eq!(affine_form(&r).unwrap().solutions(), r);
        }
    }

    #[test]
    fn is12_chain_is_monotone(r in relation(), m in 2usize..6) {
        if coclone_member(&r, CoCloneLabel::IS12(m)) {
            prop_assert!(coclone_member(&r, CoCloneLabel::IS12(m + 1)));
        }
    }

    #[test]
    fn flip_is_an_involution(r in relation(), bits in 1u32..32) {
        let idx: Vec<usize> = (1..=r.arity()).filter(|i| bits >> (i - 1) & 1 == 1).collect();
        prop_assume!(!idx.is_empty());
        let c = CoordinateSet::new(&idx).unwrap();
        prop_assert_eq!(flip(&flip(&r, &c).unwrap(), &c).unwrap(), r);
    }

    #[test]
    fn relation_text_round_trips(r in relation()) {
        let text = render_relation("R", &r);
        let back = parse_relations(&text).unwrap();
        prop_assert_eq!(back, vec![("R".to_string(), r)]);
    }

    #[test]
    fn gadget_text_round_trips(g in gadget()) {
        prop_assert_eq!(Gadget::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn exact_solutions_are_consistent(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random::mixed_instance(&mut rng, n, 3);
        if let Some(s) = solve_exact(&inst).unwrap() {
            prop_assert!(inst.satisfies(&s.assignment));
            prop_assert_eq!(inst.measure(&s.assignment), s.measure);
        }
        let text = inst.to_string();
        let back = Instance::parse(&text, &inst.relations).unwrap();
        prop_assert_eq!(&back.names, &inst.names);
        prop_assert_eq!(&back.weights, &inst.weights);
        prop_assert_eq!(&back.constraints, &inst.constraints);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn ilp2_columns_stay_small(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random::q_instance(&mut rng, n);
        let m = to_ilp2(&inst).unwrap();
        prop_assert!(m.column_sums().iter().all(|&s| s <= 2));
    }
}

#[test]
fn named_relations_resolve_in_instances() {
    let inst = Instance::parse("var a\nvar b\ncon NAND2 a b\n", &BTreeMap::new()).unwrap();
    assert_eq!(inst.constraints.len(), 1);
}
