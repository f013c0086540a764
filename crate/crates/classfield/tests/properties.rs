use std::cmp::Ordering;
use std::sync::Arc;

use classfield::abelian::{AbHom, FgAbGroup};
use classfield::catalog;
use classfield::gmodule::GModule;
use classfield::hrv::{rank_n_valuation, rlo_compare, LaurentElement, LaurentField, RloVec};
use classfield::mackey::{fixed_point_functor, full_check};
use classfield::system::SubgroupSystem;
use proptest::prelude::*;

fn rlo_pair(n: usize) -> impl Strategy<Value = (RloVec, RloVec, RloVec)> {
    let v = || proptest::collection::vec(-20i64..20, n).prop_map(RloVec);
    (v(), v(), v())
}

fn group() -> impl Strategy<Value = FgAbGroup> {
    (0usize..2, proptest::collection::vec(2i64..7, 0..3)).prop_map(|(free, orders)| {
        let torsion = FgAbGroup::from_cyclic_orders(&orders);
        FgAbGroup::new(free, torsion.invariant_factors().to_vec()).unwrap()
    })
}

fn element(g: &FgAbGroup) -> impl Strategy<Value = Vec<i64>> {
    let g = g.clone();
    proptest::collection::vec(-30i64..30, g.ngens()).prop_map(move |x| g.reduced(x))
}

fn terms(n: usize, p: u64) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    proptest::collection::vec((proptest::collection::vec(-2i64..=2, n), 1i64..p as i64), 1..5)
}

fn laurent(field: &LaurentField, t: Vec<(Vec<i64>, i64)>) -> LaurentElement {
    LaurentElement::from_terms(field, t.into_iter().map(|(e, c)| (RloVec(e), c))).unwrap()
}

proptest! {
    #[test]
    fn rlo_is_reverse_lexicographic((a, b, _) in rlo_pair(3)) {
        let by_reversed = a.0.iter().rev().cmp(b.0.iter().rev());
        prop_assert_eq!(rlo_compare(&a, &b), by_reversed);
    }

    #[test]
    fn rlo_is_translation_invariant((a, b, c) in rlo_pair(3)) {
        prop_assert_eq!(rlo_compare(&(&a + &c), &(&b + &c)), rlo_compare(&a, &b));
    }

    #[test]
    fn rlo_projection_is_monotone((a, b, _) in rlo_pair(4), r in 0usize..=4) {
        if rlo_compare(&a, &b) != Ordering::Greater {
            prop_assert_ne!(rlo_compare(&a.project(r), &b.project(r)), Ordering::Greater);
        }
    }

    #[test]
    fn abelian_group_laws((g, x, y, z) in group().prop_flat_map(|g| (Just(g.clone()), element(&g), element(&g), element(&g)))) {
        prop_assert_eq!(g.add(&g.add(&x, &y), &z), g.add(&x, &g.add(&y, &z)));
        prop_assert_eq!(g.add(&x, &y), g.add(&y, &x));
        prop_assert!(g.is_zero(&g.add(&x, &g.neg(&x))));
        let tripled = g.add(&x, &g.add(&x, &x));
        prop_assert_eq!(g.scale(3, &x), tripled);
        if let Some(k) = g.element_order(&x) {
            prop_assert!(g.is_zero(&g.scale(k, &x)));
        }
    }

    #[test]
    fn homomorphisms_are_additive(
        (target, images, a, b) in group().prop_flat_map(|t| {
            let imgs = proptest::collection::vec(element(&t), 2);
            let free = FgAbGroup::new(2, vec![]).unwrap();
            (Just(t), imgs, element(&free), element(&free))
        })
    ) {
        let source = FgAbGroup::new(2, vec![]).unwrap();
        let f = AbHom::from_images(source.clone(), target.clone(), &images).unwrap();
        prop_assert_eq!(f.apply(&source.add(&a, &b)), target.add(&f.apply(&a), &f.apply(&b)));
        let k = f.kernel();
        for j in 0..k.group.ngens() {
            prop_assert!(target.is_zero(&f.apply(&k.embedding.apply(&k.group.generator(j)))));
        }
        let c = f.cokernel();
        for j in 0..source.ngens() {
            prop_assert!(c.group.is_zero(&c.project(&f.apply(&source.generator(j)))));
        }
    }

    #[test]
    fn laurent_ring_laws(
        (p, n, ta, tb, tc) in (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3)
            .prop_flat_map(|(p, n)| (Just(p), Just(n), terms(n, p), terms(n, p), terms(n, p)))
    ) {
        let field = LaurentField::symmetric(p, n, 4).unwrap();
        let (a, b, c) = (laurent(&field, ta), laurent(&field, tb), laurent(&field, tc));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.mul(&a).unwrap());
        prop_assert!(ab.is_exact());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = ab.add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.sub(&a).unwrap().is_zero());
        if !a.is_zero() && !b.is_zero() {
            let va = rank_n_valuation(&a).unwrap();
            let vb = rank_n_valuation(&b).unwrap();
            prop_assert_eq!(rank_n_valuation(&ab).unwrap(), &va + &vb);
            let s = a.add(&b).unwrap();
            if !s.is_zero() {
                let min = if rlo_compare(&va, &vb) == Ordering::Greater { vb } else { va };
                prop_assert_ne!(rlo_compare(&rank_n_valuation(&s).unwrap(), &min), Ordering::Less);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fixed_points_of_random_modules_are_cohomological(index in 0usize..12, seed in any::<u64>()) {
        use rand::SeedableRng;
        let g = Arc::new(catalog::all().into_iter().filter(|g| g.order() <= 8).nth(index).unwrap());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = GModule::random(g.clone(), &mut rng);
        let s = Arc::new(SubgroupSystem::full(g));
        let f = fixed_point_functor(&m, s).unwrap().functor;
        let rep = full_check(&f);
        prop_assert!(rep.passed(), "{}", rep);
    }
}
