use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grcalc::catprop::{catlie_compose, CatLieBasisElement, CatLieElement};
use grcalc::freealg::{expand_group_word, tt_exp, tt_log, GroupWord, Syllable, TruncTensorElement, Word};
use grcalc::freelie::{bch, bracket, from_tensor, to_passi_tensor, to_tensor, LieElement, LyndonBasis};
use grcalc::grfun::{compose_gr, word_log, FunctorInstance, FunctorKind, GrMorphism};
use grcalc::jacobi::{oriented_diagrams, prop_compose, CanonicalForm, ComponentRule, DiagramSpace, PropElement};
use grcalc::qlinalg::{kernel_basis, q, rank, Rational, SparseMatrix};
use grcalc::sample;
use grcalc::tower::{gamma_sample, project_hom, tower_compose};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn group_word(t: usize, max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((1..=t, any::<bool>()), 0..=max_len)
        .prop_map(|v| GroupWord::new(v.into_iter().map(|(l, inv)| Syllable::new(l, inv))))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..=4], c), r)
    })
}

fn to_matrix(rows: &[Vec<i64>]) -> SparseMatrix {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    SparseMatrix::from_i64(&refs)
}

fn tensor(d: usize, t: usize, constant: i64) -> impl Strategy<Value = TruncTensorElement> {
    prop::collection::vec((prop::collection::vec(1..=t, 1..=d), -3i64..=3, 1i64..=3), 0..5).prop_map(
        move |terms| {
            let mut all: Vec<(Word, Rational)> =
                terms.into_iter().map(|(w, a, b)| (Word::from_letters(&w), q(a, b))).collect();
            all.push((Word::empty(), Rational::from(constant)));
            TruncTensorElement::from_terms(d, t, all)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(rows in matrix()) {
        let m = to_matrix(&rows);
        prop_assert_eq!(rank(&m) + kernel_basis(&m).len(), m.cols());
    }

    #[test]
    fn rank_ignores_permutation_and_scaling(rows in matrix(), seed in any::<u64>(), scale in 1i64..=7) {
        let m = to_matrix(&rows);
        let mut r = rng(seed);
        let (rp, cp) = (sample::permutation(&mut r, m.rows()), sample::permutation(&mut r, m.cols()));
        let mut p = SparseMatrix::zeros(m.rows(), m.cols());
        for (i, j, x) in m.entries() {
            p.set(rp[i], cp[j], x * q(if i == 0 { scale } else { 1 }, 1));
        }
        prop_assert_eq!(rank(&p), rank(&m));
    }

    #[test]
    fn rationals_are_exact(a in 1i64..1_000_000_000, b in 1i64..1_000_000_000) {
        prop_assert!((q(a, b) * q(b, a)).is_one());
    }

    #[test]
    fn free_reduction(w in group_word(3, 10), d in 1usize..=4) {
        let e = expand_group_word(&w.mul(&w.inverse()), d, 3).unwrap();
        prop_assert_eq!(e, TruncTensorElement::unit(d, 3));
    }

    #[test]
    fn expansion_is_multiplicative(u in group_word(3, 6), v in group_word(3, 6), d in 1usize..=4) {
        let lhs = expand_group_word(&u.mul(&v), d, 3).unwrap();
        let rhs = expand_group_word(&u, d, 3).unwrap().mul(&expand_group_word(&v, d, 3).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn log_exp_inverse(x in tensor(5, 2, 0), u in tensor(5, 2, 1)) {
        prop_assert_eq!(tt_log(&tt_exp(&x).unwrap()).unwrap(), x);
        prop_assert_eq!(tt_exp(&tt_log(&u).unwrap()).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bch_is_associative(seed in any::<u64>(), d in 1usize..=4) {
        let b = LyndonBasis::shared(3, d);
        let mut r = rng(seed);
        let [x, y, z] = [0; 3].map(|_| sample::lie_element(&mut r, &b, 3));
        let lhs = bch(&bch(&x, &y).unwrap(), &z).unwrap();
        let rhs = bch(&x, &bch(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bch_inverse_and_unit(seed in any::<u64>(), d in 1usize..=5) {
        let b = LyndonBasis::shared(2, d);
        let u = sample::lie_element(&mut rng(seed), &b, 4);
        prop_assert!(bch(&u, &u.neg()).unwrap().is_zero());
        prop_assert_eq!(bch(&LieElement::zero(&b), &u).unwrap(), u);
    }

    #[test]
    fn lie_operations_stay_in_lie(seed in any::<u64>(), d in 2usize..=4) {
        let b = LyndonBasis::shared(3, d);
        let mut r = rng(seed);
        let (u, v) = (sample::lie_element(&mut r, &b, 3), sample::lie_element(&mut r, &b, 3));
        for z in [bracket(&u, &v).unwrap(), bch(&u, &v).unwrap()] {
            prop_assert_eq!(from_tensor(&b, &to_tensor(&z)).unwrap(), z);
        }
    }

    #[test]
    fn log_naturality(w in group_word(3, 8), d in 1usize..=4) {
        let lw = word_log(&w, d, 3).unwrap();
        prop_assert_eq!(to_passi_tensor(&lw), tt_log(&expand_group_word(&w, d, 3).unwrap()).unwrap());
    }

    #[test]
    fn functoriality(seed in any::<u64>(), d in 1usize..=4, kind in 0usize..4) {
        let kind = match kind {
            0 => FunctorKind::Passi(d),
            1 => FunctorKind::Malcev(d),
            2 => FunctorKind::Abelianization,
            _ => FunctorKind::power(FunctorKind::Passi(d.min(2)), 2, d.min(2)),
        };
        let f_inst = FunctorInstance::new(kind);
        let mut r = rng(seed);
        use rand::Rng;
        let (a, b, c) = (r.gen_range(0..=3), r.gen_range(0..=3), r.gen_range(0..=3));
        let f = sample::gr_morphism(&mut r, a, b, 4);
        let g = sample::gr_morphism(&mut r, b, c, 4);
        let lhs = f_inst.action(&compose_gr(&g, &f).unwrap()).unwrap();
        let rhs = f_inst.action(&g).unwrap().mul(&f_inst.action(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn slot_permutations_commute_with_actions(seed in any::<u64>(), d in 0usize..=3, s in 1usize..=3) {
        let fi = FunctorInstance::new(FunctorKind::power(FunctorKind::Passi(d), s, d));
        let mut r = rng(seed);
        let f = sample::gr_morphism(&mut r, 2, 2, 3);
        let perm = sample::permutation(&mut r, s);
        let lhs = fi.slot_permutation(2, &perm).mul(&fi.action(&f).unwrap()).unwrap();
        let rhs = fi.action(&f).unwrap().mul(&fi.slot_permutation(2, &perm)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn catlie_associative_and_unital(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let s = r.gen_range(1..=4);
        let a = r.gen_range(1..=s);
        let b = r.gen_range(1..=a);
        let c = r.gen_range(1..=b);
        let pick = |r: &mut ChaCha8Rng, x, y| CatLieElement::basis(sample::catlie_basis_element(r, x, y).unwrap());
        let (f, g, h) = (pick(&mut r, s, a), pick(&mut r, a, b), pick(&mut r, b, c));
        let lhs = catlie_compose(&catlie_compose(&h, &g).unwrap(), &f).unwrap();
        let rhs = catlie_compose(&h, &catlie_compose(&g, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let id = CatLieElement::basis(CatLieBasisElement::identity(s));
        prop_assert!(catlie_compose(&f, &id).unwrap() == f);
    }

    #[test]
    fn gamma_perturbation_is_invisible(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let f = sample::gr_morphism(&mut r, 2, 2, 3);
        let g = sample::gr_morphism(&mut r, 2, 2, 3);
        let gamma = gamma_sample(d + 1, 2, seed).word;
        let images = f.images().iter().map(|w| w.mul(&gamma)).collect();
        let f2 = GrMorphism::new(2, images).unwrap();
        prop_assert!(project_hom(&f, d) == project_hom(&f2, d));
        let a = tower_compose(&project_hom(&g, d), &project_hom(&f, d)).unwrap();
        let b = tower_compose(&project_hom(&g, d), &project_hom(&f2, d)).unwrap();
        prop_assert!(a == b);
    }

    #[test]
    fn tower_associative(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let f = project_hom(&sample::gr_morphism(&mut r, 1, 2, 3), d);
        let g = project_hom(&sample::gr_morphism(&mut r, 2, 2, 3), d);
        let h = project_hom(&sample::gr_morphism(&mut r, 2, 1, 3), d);
        let lhs = tower_compose(&tower_compose(&h, &g).unwrap(), &f).unwrap();
        let rhs = tower_compose(&h, &tower_compose(&g, &f).unwrap()).unwrap();
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn diagram_composition_associative(i in 0usize..200, j in 0usize..200, k in 0usize..200) {
        let pick = |s, t, m, i: usize| {
            let ds: Vec<_> = oriented_diagrams(s, t, m).into_iter().filter(|d| d.components_have_exits()).collect();
            PropElement::diagram(&ds[i % ds.len()])
        };
        let (x, y, z) = (pick(1, 2, 1, i), pick(2, 2, 2, j), pick(2, 1, 1, k));
        let lhs = prop_compose(&z, &prop_compose(&y, &x).unwrap()).unwrap();
        let rhs = prop_compose(&prop_compose(&z, &y).unwrap(), &x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_form_tracks_flips(i in 0usize..500, flips in any::<u8>()) {
        let ds = oriented_diagrams(1, 3, 2);
        let d = &ds[i % ds.len()];
        let mut x = d.clone();
        let mut sign = 1;
        for v in 0..d.vertices() {
            if flips & (1 << v) != 0 {
                x = x.flip(v);
                sign = -sign;
            }
        }
        match (d.canonical_form(), x.canonical_form()) {
            (CanonicalForm::Zero, CanonicalForm::Zero) => {}
            (CanonicalForm::Diagram { key: a, sign: sa }, CanonicalForm::Diagram { key: b, sign: sb }) => {
                prop_assert_eq!(a, b);
                prop_assert_eq!(sa, sb * sign);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn quotient_dims_ignore_enumeration_order(seed in any::<u64>()) {
        for (s, t, m) in [(0, 4, 4), (1, 2, 3), (2, 2, 2)] {
            let a = DiagramSpace::build(s, t, m, ComponentRule::ExitInEveryComponent, None).dim();
            let b = DiagramSpace::build(s, t, m, ComponentRule::ExitInEveryComponent, Some(seed)).dim();
            prop_assert_eq!(a, b);
        }
    }
}
