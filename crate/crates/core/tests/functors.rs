use ainf::ainf_core::{AInfCategory, Elem, Gen};
use ainf::ainf_fun::{check_functor, cohomology_map, compose_functors, formal_pushforward, inverse_diffeo, truncate, AInfFunctor, Hochschild, Prenat, TransformationSpace};
use ainf::coefficients::FieldTag;
use ainf::fixtures::{a2_quiver, fixture_d, named_units, random_diffeo, random_prenat, scaling_functor, DgMatrixCategory};
use ainf::graded::{GradedSpace, SparseVec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_pair(seed: u64, field: &FieldTag) -> (AInfCategory, AInfFunctor, AInfCategory) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DgMatrixCategory::random(&mut rng, field, 2, 3).to_ainf();
    let phi = random_diffeo(&mut rng, &a, 3);
    let (b, _) = formal_pushforward(&a, &phi, 4).unwrap();
    (a, phi, b)
}

#[test]
fn pushforward_makes_the_diffeo_a_functor() {
    for field in [FieldTag::F2, FieldTag::Q] {
        for seed in 0..6 {
            let (a, phi, b) = random_pair(seed, &field);
            assert!(b.check_relations(4).unwrap().pass, "seed {seed}");
            assert!(check_functor(&a, &b, &phi, 4).unwrap().pass, "seed {seed}");
        }
    }
}

#[test]
fn inverse_diffeo_composes_to_identity() {
    for seed in 0..6 {
        let (a, phi, b) = random_pair(seed, &FieldTag::Q);
        let g = inverse_diffeo(&a, &phi).unwrap();
        let comp = compose_functors(&a, &phi, &g);
        let id = AInfFunctor::identity(&a);
        for d in 1..=3 {
            for t in a.composable_tuples(d) {
                assert_eq!(comp.term(&t), id.term(&t), "seed {seed} d {d}");
            }
        }
        assert!(check_functor(&b, &a, &g, 3).unwrap().pass, "seed {seed}");
    }
}

#[test]
fn identity_functor_on_fixture_d() {
    let d = fixture_d(&FieldTag::F2);
    assert!(check_functor(&d, &d, &AInfFunctor::identity(&d), 5).unwrap().pass);
}

#[test]
fn transformation_differential_squares_to_zero() {
    for field in [FieldTag::F2, FieldTag::Q] {
        for seed in 0..6 {
            let (a, phi, b) = random_pair(seed, &field);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let space = TransformationSpace::new(&a, &b);
            for g in -1..=1 {
                let t = random_prenat(&mut rng, &a, &b, &phi, &phi, g, 3);
                let dt = space.differential(&phi, &phi, &t);
                let ddt = space.differential(&phi, &phi, &dt);
                assert!(truncate(&ddt, 3).is_zero(), "seed {seed} g {g}");
            }
        }
    }
}

#[test]
fn transformation_composition_satisfies_leibniz() {
    for field in [FieldTag::F2, FieldTag::Q] {
        for seed in 0..5 {
            let (a, phi, b) = random_pair(seed, &field);
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let space = TransformationSpace::new(&a, &b);
            let t1 = random_prenat(&mut rng, &a, &b, &phi, &phi, 0, 3);
            let t2 = random_prenat(&mut rng, &a, &b, &phi, &phi, 1, 3);
            // mu^1 mu^2(T2, T1) + (-1)^{|T1| - 1} mu^2(mu^1 T2, T1) + mu^2(T2, mu^1 T1) = 0
            let lhs = space.differential(&phi, &phi, &space.compose(&phi, &phi, &phi, &t2, &t1));
            let a2 = space.compose(&phi, &phi, &phi, &space.differential(&phi, &phi, &t2), &t1).scaled(&field.from_int(-1));
            let a3 = space.compose(&phi, &phi, &phi, &t2, &space.differential(&phi, &phi, &t1));
            let total = truncate(&lhs.add(&a2).add(&a3), 2);
            assert!(total.is_zero(), "seed {seed}: {total:?}");
        }
    }
}

#[test]
fn hochschild_differential_squares_to_zero() {
    for field in [FieldTag::F2, FieldTag::Q] {
        for seed in 0..6 {
            let (_, _, b) = random_pair(seed, &field);
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let id = AInfFunctor::identity(&b);
            let hh = Hochschild::new(&b, 3);
            for r in -1..=1 {
                let h = random_prenat(&mut rng, &b, &b, &id, &id, r, 3);
                let ddh = hh.differential(&hh.differential(&h));
                assert!(truncate(&ddh, 3).is_zero(), "{field:?} seed {seed} r {r}");
            }
        }
    }
}

#[test]
fn hochschild_differential_matches_identity_transformations() {
    for seed in 0..6 {
        let (_, _, b) = random_pair(seed, &FieldTag::Q);
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let id = AInfFunctor::identity(&b);
        let hh = Hochschild::new(&b, 3);
        let space = TransformationSpace::new(&b, &b);
        for r in -1..=1 {
            let h = random_prenat(&mut rng, &b, &b, &id, &id, r, 3);
            let x = truncate(&hh.differential(&h), 3);
            let y = truncate(&space.differential(&id, &id, &h), 3);
            assert_eq!(x, y, "seed {seed} r {r}");
        }
    }
}

fn scaled_pair(seed: u64) -> (AInfCategory, AInfFunctor, AInfFunctor, AInfCategory) {
    let (a, phi, b) = random_pair(seed, &FieldTag::Q);
    let q = FieldTag::Q;
    let lambda: Vec<_> = (0..a.num_objects()).map(|i| q.from_int(i as i64 + 1)).collect();
    let psi = scaling_functor(&a, &lambda);
    let f1 = compose_functors(&a, &psi, &phi);
    (a, phi, f1, b)
}

#[test]
fn composition_closure_and_associativity() {
    for seed in 0..4 {
        let (a, phi, f1, b) = scaled_pair(seed);
        assert!(check_functor(&a, &b, &f1, 3).unwrap().pass, "seed {seed}");
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let g = random_diffeo(&mut rng, &b, 3);
        let (c, _) = formal_pushforward(&b, &g, 4).unwrap();
        let h = random_diffeo(&mut rng, &c, 3);
        let left = compose_functors(&a, &phi, &compose_functors(&b, &g, &h));
        let right = compose_functors(&a, &compose_functors(&a, &phi, &g), &h);
        assert_eq!(left.terms, right.terms, "seed {seed}");
        let gf = compose_functors(&a, &phi, &g);
        assert!(check_functor(&a, &c, &gf, 3).unwrap().pass, "seed {seed}");
    }
}

#[test]
fn composition_in_length_two() {
    let (a, phi, b) = random_pair(7, &FieldTag::Q);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = random_diffeo(&mut rng, &b, 3);
    let gf = compose_functors(&a, &phi, &g);
    for t in a.composable_tuples(2) {
        let (e1, e2) = (Elem::gen(t[0], a.field.one()), Elem::gen(t[1], a.field.one()));
        let mut expected = g.apply(&[&phi.apply(&[&e1, &e2])]).vec;
        expected.add(&g.apply(&[&phi.apply(&[&e1]), &phi.apply(&[&e2])]).vec);
        assert_eq!(gf.term(&t), expected);
    }
    let id = AInfFunctor::identity(&a);
    assert_eq!(compose_functors(&a, &id, &phi).terms, phi.terms);
}

#[test]
fn difference_of_functors_is_closed() {
    let mut nontrivial = 0;
    for seed in 0..6 {
        let (a, f0, f1, b) = scaled_pair(seed);
        let space = TransformationSpace::new(&a, &b);
        let d = Prenat::difference(&f0, &f1, &a.field);
        nontrivial += usize::from(!d.is_zero());
        assert!(truncate(&space.differential(&f0, &f1, &d), 3).is_zero(), "seed {seed}");
    }
    assert!(nontrivial > 0);
}

#[test]
fn unit_transformation_is_closed_on_strictly_unital_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let dg = DgMatrixCategory::random(&mut rng, &FieldTag::Q, 3, 3);
        let a = dg.to_ainf();
        let units = dg.units(&a);
        let q = FieldTag::Q;
        let lambda: Vec<_> = (0..a.num_objects()).map(|i| q.from_int(2 * i as i64 + 1)).collect();
        let f = scaling_functor(&a, &lambda);
        let e = Prenat::unit(&f, &units, 3);
        let space = TransformationSpace::new(&a, &a);
        assert!(space.differential(&f, &f, &e).is_zero());
    }
}

#[test]
fn order_zero_composition_in_a_dg_target() {
    let (a, phi, b) = random_pair(3, &FieldTag::Q);
    let _ = b;
    let dg_b = a.clone();
    let id = AInfFunctor::identity(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = TransformationSpace::new(&a, &dg_b);
    let mut t1 = random_prenat(&mut rng, &a, &dg_b, &id, &id, 1, 3);
    let mut t2 = random_prenat(&mut rng, &a, &dg_b, &id, &id, 0, 3);
    t1.terms.clear();
    t2.terms.clear();
    let c = space.compose(&id, &id, &id, &t2, &t1);
    for x in 0..a.num_objects() {
        let e1 = Elem::new(x, x, t1.at_object(x));
        let e2 = Elem::new(x, x, t2.at_object(x));
        assert_eq!(c.at_object(x), a.mu2(&e2, &e1).vec);
    }
    assert_eq!(c.degree, 1);
    let _ = phi;
}

#[test]
fn unit_composition_is_cohomologous_to_the_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..4 {
        let dg = DgMatrixCategory::random(&mut rng, &FieldTag::Q, 2, 3);
        let a = dg.to_ainf();
        let units = dg.units(&a);
        let id = AInfFunctor::identity(&a);
        let space = TransformationSpace::new(&a, &a);
        let s = random_prenat(&mut rng, &a, &a, &id, &id, 0, 2);
        let t1 = truncate(&space.differential(&id, &id, &s), 2);
        let e = Prenat::unit(&id, &units, 2);
        let c = truncate(&space.compose(&id, &id, &id, &e, &t1), 2);
        let diff = c.add(&t1.scaled(&FieldTag::Q.from_int(-1)));
        assert!(space.find_primitive(&id, &id, 0, &diff, 2, true).unwrap().is_some());
    }
}

#[test]
fn primitive_solve_recovers_exact_targets() {
    for seed in 0..4 {
        let (a, phi, b) = random_pair(seed, &FieldTag::Q);
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let space = TransformationSpace::new(&a, &b);
        let s = random_prenat(&mut rng, &a, &b, &phi, &phi, 0, 2);
        let target = truncate(&space.differential(&phi, &phi, &s), 2);
        let t = space.find_primitive(&phi, &phi, 0, &target, 2, true).unwrap().unwrap();
        assert_eq!(truncate(&space.differential(&phi, &phi, &t), 2), target);
    }
}

#[test]
fn homotopy_checks() {
    let (a, phi, b) = random_pair(2, &FieldTag::Q);
    let space = TransformationSpace::new(&a, &b);
    assert!(space.check_homotopy(&phi, &phi, &Prenat::zero(0, 3), 3));
    let h = space.find_homotopy(&phi, &phi, 2).unwrap().unwrap();
    assert!(space.check_homotopy(&phi, &phi, &h, 2));
}

#[test]
fn functors_differing_on_cohomology_are_not_homotopic() {
    for seed in 0..6 {
        let (a, f0, f1, b) = scaled_pair(seed);
        let space = TransformationSpace::new(&a, &b);
        let mut differ = false;
        for x in 0..a.num_objects() {
            for y in 0..a.num_objects() {
                if cohomology_map(&a, &b, &f0, x, y).unwrap() != cohomology_map(&a, &b, &f1, x, y).unwrap() {
                    differ = true;
                }
            }
        }
        let found = space.find_homotopy(&f0, &f1, 2).unwrap();
        if differ {
            assert!(found.is_none(), "seed {seed}");
        }
        if let Some(t) = found {
            assert!(space.check_homotopy(&f0, &f1, &t, 2));
            for x in 0..a.num_objects() {
                for y in 0..a.num_objects() {
                    assert_eq!(cohomology_map(&a, &b, &f0, x, y).unwrap(), cohomology_map(&a, &b, &f1, x, y).unwrap());
                }
            }
        }
    }
}

#[test]
fn pushforward_examples() {
    let (a, _, _) = random_pair(4, &FieldTag::Q);
    let id = AInfFunctor::identity(&a);
    let (same, _) = formal_pushforward(&a, &id, a.max_d).unwrap();
    assert_eq!(same.comps(), a.comps());
    let c = FieldTag::Q.from_int(3);
    let mut scaled = id.clone();
    for v in scaled.terms.values_mut() {
        *v = v.scaled(&c);
    }
    let (b, _) = formal_pushforward(&a, &scaled, 2).unwrap();
    let cinv = c.inverse().unwrap();
    for t in a.composable_tuples(2) {
        let expected = a.mu_basis(&t).cloned().unwrap_or_default().scaled(&cinv);
        assert_eq!(b.mu_basis(&t).cloned().unwrap_or_default(), expected);
    }
    for seed in 0..4 {
        let (a, phi, b) = random_pair(seed, &FieldTag::Q);
        let g = inverse_diffeo(&a, &phi).unwrap();
        let (back, _) = formal_pushforward(&b, &g, 2).unwrap();
        for d in 1..=2 {
            for t in a.composable_tuples(d) {
                assert_eq!(back.mu_basis(&t).cloned().unwrap_or_default(), a.mu_basis(&t).cloned().unwrap_or_default(), "seed {seed}");
            }
        }
    }
}

#[test]
fn hochschild_examples() {
    let mut k = AInfCategory::new(&FieldTag::Q, vec!["K".into()], 2);
    k.set_hom(0, 0, GradedSpace::new(&FieldTag::Q, vec![("e".into(), 0)]).unwrap());
    k.set_comp(vec![Gen { src: 0, tgt: 0, idx: 0 }; 2], SparseVec::basis(0, FieldTag::Q.one()));
    let dims = Hochschild::new(&k, 3).cohomology(-1, 3).unwrap();
    for row in &dims {
        if row.exact {
            assert_eq!(row.dim, usize::from(row.degree == 0), "{row:?}");
        }
    }
    let quiver = a2_quiver(&FieldTag::F2);
    let dims = Hochschild::new(&quiver, 2).cohomology(-1, 1).unwrap();
    assert_eq!(dims.iter().find(|r| r.degree == 0).unwrap().dim, 1);
    let units = named_units(&quiver);
    let mut h = Prenat::zero(0, 2);
    for (x, e) in units {
        h.set_t0(x, e);
    }
    assert!(Hochschild::new(&quiver, 2).differential(&h).is_zero());
}

