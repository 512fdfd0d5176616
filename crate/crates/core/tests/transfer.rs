use ainf::ainf_core::{AInfCategory, Elem, Gen, UnitMode};
use ainf::ainf_fun::{check_functor, formal_pushforward, AInfFunctor};
use ainf::coefficients::FieldTag;
use ainf::fixtures::{named_units, random_diffeo, span_uv, DgMatrixCategory};
use ainf::graded::{Complex, GradedMap, GradedSpace, SparseVec};
use ainf::transfer::{auto_contraction, transfer, Contraction, HomContraction, TransferError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_transfer(b: &AInfCategory, cap: usize) -> ainf::transfer::TransferResult {
    let c = Contraction::auto(b).unwrap();
    let res = transfer(b, &c, cap).unwrap();
    assert!(res.warnings.is_empty(), "{:?}", res.warnings);
    let rel = res.a.check_relations(cap).unwrap();
    assert!(rel.pass, "{:?}", rel.failure);
    let fun = check_functor(&res.a, b, &res.f, cap).unwrap();
    assert!(fun.pass, "{:?}", fun.failure);
    res
}

#[test]
fn trivial_contraction_reproduces_the_category() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a0 = DgMatrixCategory::random(&mut rng, &FieldTag::Q, 2, 2).to_ainf();
    let phi = random_diffeo(&mut rng, &a0, 2);
    let (b, _) = formal_pushforward(&a0, &phi, 3).unwrap();
    let res = transfer(&b, &Contraction::trivial(&b), 3).unwrap();
    assert_eq!(res.a.comps(), b.comps());
    assert_eq!(res.f.terms, AInfFunctor::identity(&b).terms);
}

#[test]
fn span_uv_transfers_to_the_ground_field() {
    let b = span_uv(&FieldTag::F2);
    let c = Contraction::auto(&b).unwrap();
    let hc = &c.pairs[&(0, 0)];
    assert_eq!(hc.small.dim(), 1);
    assert_eq!(hc.small.name(0), "e_A");
    let u = b.hom(0, 0).index_of("u").unwrap();
    let v = b.hom(0, 0).index_of("v").unwrap();
    assert_eq!(hc.t1.column(v), &SparseVec::basis(u, FieldTag::F2.one()));
    let res = check_transfer(&b, 5);
    let e = Gen { src: 0, tgt: 0, idx: 0 };
    for (k, out) in res.a.comps() {
        if k.len() == 2 {
            assert_eq!(k, &vec![e, e]);
            assert_eq!(out, &SparseVec::basis(0, FieldTag::F2.one()));
        } else {
            panic!("unexpected nonzero mu^{}", k.len());
        }
    }
    assert!(res.a.check_units(&named_units(&res.a), UnitMode::Strict).unwrap().pass);
}

#[test]
fn random_dg_algebras_transfer_over_f2() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..8 {
        let b = DgMatrixCategory::random(&mut rng, &FieldTag::F2, 1, 2).to_ainf();
        check_transfer(&b, 5);
    }
}

#[test]
fn random_dg_categories_transfer_over_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let b = DgMatrixCategory::random(&mut rng, &FieldTag::Q, 2, 3).to_ainf();
        check_transfer(&b, 4);
    }
}

#[test]
fn non_dg_sources_transfer_over_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..4 {
        let a0 = DgMatrixCategory::random(&mut rng, &FieldTag::Q, 2, 2).to_ainf();
        let phi = random_diffeo(&mut rng, &a0, 3);
        let (b, _) = formal_pushforward(&a0, &phi, 4).unwrap();
        check_transfer(&b, 4);
    }
}

fn two_term(field: &FieldTag, d: Option<i64>) -> Complex {
    let space = GradedSpace::new(field, vec![("x".into(), 0), ("y".into(), 1)]).unwrap();
    let col = match d {
        Some(c) => SparseVec::basis(1, field.from_int(c)),
        None => SparseVec::new(),
    };
    Complex::new(GradedMap::new(space.clone(), space, 1, vec![col, SparseVec::new()]).unwrap()).unwrap()
}

#[test]
fn auto_contraction_examples() {
    let q = FieldTag::Q;
    let acyclic = auto_contraction(&two_term(&q, Some(2))).unwrap();
    assert_eq!(acyclic.small.dim(), 0);
    assert!(acyclic.f1.is_zero() && acyclic.g1.is_zero());
    assert_eq!(acyclic.t1.column(1), &SparseVec::basis(0, q.from_rational(&ainf::coefficients::rational(-1, 2)).unwrap()));
    let zero = two_term(&q, None);
    let triv = auto_contraction(&zero).unwrap();
    assert_eq!(triv.f1, GradedMap::identity(&zero.space));
    assert_eq!(triv.g1, GradedMap::identity(&zero.space));
    assert!(triv.t1.is_zero());
    assert!(matches!(auto_contraction(&two_term(&FieldTag::novikov_f2(ainf::coefficients::rational(4, 1)).unwrap(), None)), Err(TransferError::NovikovPrecision)));
}

#[test]
fn auto_contractions_satisfy_side_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for field in [FieldTag::F2, FieldTag::Q] {
        for _ in 0..6 {
            let b = DgMatrixCategory::random(&mut rng, &field, 2, 3).to_ainf();
            let c = Contraction::auto(&b).unwrap();
            for (&(x, y), hc) in &c.pairs {
                assert_eq!(hc.violation(&b.mu1_map(x, y)), None);
                assert!(hc.side_condition_failures().is_empty());
            }
        }
    }
}

#[test]
fn broken_contraction_is_rejected() {
    let b = span_uv(&FieldTag::Q);
    let mut c = Contraction::auto(&b).unwrap();
    let hc = c.pairs.get_mut(&(0, 0)).unwrap();
    *hc = HomContraction { t1: GradedMap::zero(&hc.t1.source, &hc.t1.target, -1), ..hc.clone() };
    let err = transfer(&b, &c, 3).unwrap_err();
    assert!(matches!(err, TransferError::Contraction { .. }), "{err}");
}

#[test]
fn transferred_structure_is_quasi_isomorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for field in [FieldTag::F2, FieldTag::Q] {
        for _ in 0..4 {
            let b = DgMatrixCategory::random(&mut rng, &field, 2, 3).to_ainf();
            let res = check_transfer(&b, 3);
            let ha = res.a.cohomological_category().unwrap();
            let hb = b.cohomological_category().unwrap();
            for (&(x, y), _) in b.homs() {
                assert_eq!(ha.dims(x, y), hb.dims(x, y));
                // H(F^1) sends the representative basis to a basis
                let images: Vec<Vec<_>> = ha
                    .reps(x, y)
                    .into_iter()
                    .map(|(_, r)| hb.classify(x, y, &res.f.apply(&[&Elem::new(x, y, r)]).vec).unwrap().unwrap())
                    .collect();
                let n = images.len();
                if n > 0 {
                    let m = ainf::graded::matrix_from_columns(&field, &images, n);
                    assert_eq!(m.rank().unwrap(), n);
                }
            }
            // products agree in cohomology
            for (&(x, y), _) in b.homs() {
                for (&(y2, z), _) in b.homs() {
                    if y2 != y {
                        continue;
                    }
                    for (_, r1) in ha.reps(x, y) {
                        for (_, r2) in ha.reps(y, z) {
                            let (e1, e2) = (Elem::new(x, y, r1.clone()), Elem::new(y, z, r2.clone()));
                            let lhs = res.f.apply(&[&res.a.mu2(&e2, &e1)]);
                            let rhs = b.mu2(&res.f.apply(&[&e2]), &res.f.apply(&[&e1]));
                            assert_eq!(hb.classify(x, z, &lhs.vec).unwrap(), hb.classify(x, z, &rhs.vec).unwrap());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn transfer_commutes_with_suspension_over_f2() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let b = DgMatrixCategory::random(&mut rng, &FieldTag::F2, 1, 2).to_ainf();
        let res = check_transfer(&b, 4);
        // over F2 the bar table of B is the mu table; rebuild B from it and transfer again
        let dict = b.suspend_dictionary();
        let mut b_bar = b.clone();
        for d in 1..=b.max_d {
            b_bar.clear_comps_of_length(d);
        }
        for (k, v) in &dict.b {
            b_bar.set_comp(k.clone(), v.clone());
        }
        let res_bar = transfer(&b_bar, &Contraction::auto(&b_bar).unwrap(), 4).unwrap();
        assert_eq!(res_bar.a.suspend_dictionary().b, res.a.suspend_dictionary().b);
    }
}
