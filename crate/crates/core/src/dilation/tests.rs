use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::isometry::{all_signed_permutations, is_lp_isometry};
use crate::linalg::{block_diag, integer, lp_norm, lp_norm_pow_p, rational, Matrix, PNorm, Rational, SpaceNorm};

fn p3() -> PNorm {
    PNorm::from_integer(3).unwrap()
}

fn mq(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| integer(x)).collect()).collect()).unwrap()
}

fn id2() -> Matrix<Rational> {
    mq(&[&[1, 0], &[0, 1]])
}

fn swap() -> Matrix<Rational> {
    mq(&[&[0, 1], &[1, 0]])
}

fn flip() -> Matrix<Rational> {
    mq(&[&[1, 0], &[0, -1]])
}

fn named(pairs: &[(&str, Matrix<Rational>)]) -> Vec<(String, Matrix<Rational>)> {
    pairs.iter().map(|(l, m)| (l.to_string(), m.clone())).collect()
}

fn target_map(pairs: &[(&str, Matrix<Rational>)]) -> BTreeMap<String, Matrix<Rational>> {
    pairs.iter().map(|(l, m)| (l.to_string(), m.clone())).collect()
}

fn third_two_thirds() -> ConvexCombination<Rational> {
    ConvexCombination::new(vec![swap(), flip()], vec![rational(1, 3), rational(2, 3)], &p3()).unwrap()
}

#[test]
fn trivial_identity_and_swap() {
    let t = trivial_dilation(&named(&[("I", id2())]), &p3()).unwrap();
    assert_eq!(t.compress::<&str>(&[]).unwrap(), id2());
    assert_eq!(t.guarantee(), Guarantee::Infinite);

    let t = trivial_dilation(&named(&[("swap", swap())]), &p3()).unwrap();
    assert_eq!(t.operator("swap").unwrap().to_dense().unwrap(), swap());
    assert_eq!(t.compress::<&str>(&[]).unwrap(), id2());
}

#[test]
fn trivial_rejects_non_isometry() {
    let half = Matrix::from_rows(vec![vec![rational(1, 2)]]).unwrap();
    assert!(matches!(trivial_dilation(&named(&[("h", half)]), &p3()), Err(Error::NotAnIsometry(_))));
}

#[test]
fn trivial_signed_permutations_length_five() {
    let perms = all_signed_permutations(2, 5).unwrap();
    let pairs: Vec<(String, Matrix<Rational>)> = perms.iter().take(3).map(|s| (s.label(), s.to_matrix())).collect();
    let t = trivial_dilation(&pairs, &p3()).unwrap();
    let targets: BTreeMap<_, _> = pairs.into_iter().collect();
    let r = verify_dilation(&t, &targets, &VerifyOptions::new(5)).unwrap();
    assert!(r.pass && r.in_contract && !r.sampled);
    assert_eq!(r.checks.len(), 1 + 3 + 9 + 27 + 81 + 243);
    assert_eq!(r.max_residual, 0.0);
}

#[test]
fn one_dilation_is_block_diagonal() {
    let combo = third_two_thirds();
    let t = build_n_dilation(&combo, 1, &p3()).unwrap();
    let u = t.operator(DEFAULT_LABEL).unwrap().to_dense().unwrap();
    assert_eq!(u, block_diag(&[swap(), flip()]).unwrap());
    assert_eq!(t.embed().bases(), &[rational(1, 3), rational(2, 3)]);
    assert_eq!(t.readout().bases(), t.embed().bases());
    assert_eq!(t.space().dim, 4);
    assert_eq!(t.compress(&["T"]).unwrap(), combo.operator());
}

#[test]
fn single_isometry_dilates_every_power() {
    let combo = ConvexCombination::new(vec![swap()], vec![integer(1)], &p3()).unwrap();
    for n in 1..=3 {
        let t = build_n_dilation(&combo, n, &p3()).unwrap();
        for k in 0..=2 * n + 1 {
            assert_eq!(t.compress_power("T", k).unwrap(), swap().pow(k).unwrap());
        }
    }
}

#[test]
fn scalar_plus_minus_one() {
    let combo =
        ConvexCombination::new(vec![mq(&[&[1]]), mq(&[&[-1]])], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    let t = build_n_dilation(&combo, 1, &p3()).unwrap();
    assert_eq!(t.space().dim, 2);
    assert_eq!(t.compress_power("T", 1).unwrap(), mq(&[&[0]]));
    assert_eq!(t.compress_power("T", 0).unwrap(), mq(&[&[1]]));
}

#[test]
fn three_dilation_exact_and_out_of_contract() {
    let combo = third_two_thirds();
    let t = build_n_dilation(&combo, 3, &p3()).unwrap();
    assert_eq!(t.space().dim, 3 * 8 * 2);
    let targets = target_map(&[("T", combo.operator())]);
    let r = verify_dilation(&t, &targets, &VerifyOptions::new(3)).unwrap();
    assert!(r.pass && r.in_contract);
    assert_eq!(r.max_residual, 0.0);

    let beyond = verify_dilation(&t, &targets, &VerifyOptions::new(4)).unwrap();
    assert!(!beyond.in_contract);
    assert!(!beyond.pass);
    let failing: Vec<usize> = beyond.failures().map(|c| c.word.len()).collect();
    assert_eq!(failing, vec![4]);
}

#[test]
fn monotone_in_word_length() {
    let combo = third_two_thirds();
    let targets = target_map(&[("T", combo.operator())]);
    for n in 1..=4 {
        let t = build_n_dilation(&combo, n, &p3()).unwrap();
        for m in 0..=n {
            assert!(verify_dilation(&t, &targets, &VerifyOptions::new(m)).unwrap().pass, "N = {n}, M = {m}");
        }
    }
}

#[test]
fn non_integer_exponent_still_exact() {
    let p = PNorm::parse("3/2").unwrap();
    let combo =
        ConvexCombination::new(vec![swap(), flip(), id2()], vec![rational(1, 6), rational(1, 2), rational(1, 3)], &p)
            .unwrap();
    let t = build_n_dilation(&combo, 2, &p).unwrap();
    let r = verify_dilation(&t, &target_map(&[("T", combo.operator())]), &VerifyOptions::new(2)).unwrap();
    assert!(r.pass);
}

#[test]
fn float_mode_orthogonal_combination() {
    let p2 = PNorm::from_integer(2).unwrap();
    let (c, s) = (0.6f64, 0.8f64);
    let rot = Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap();
    let refl = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
    let combo = ConvexCombination::new(vec![rot, refl], vec![rational(1, 4), rational(3, 4)], &p2).unwrap();
    let t = build_n_dilation(&combo, 3, &p2).unwrap();
    let targets = BTreeMap::from([("T".to_string(), combo.operator())]);
    let r = verify_dilation(&t, &targets, &VerifyOptions::new(3)).unwrap();
    assert!(r.pass);
    assert!(r.max_residual <= 1e-12);
}

#[test]
fn exact_mode_refuses_mismatched_bases() {
    // a hand-made triple whose J and Q bases differ cannot compose exactly
    let embed = ScaledBlockMap::uniform_identity(MapKind::Embed, 1, vec![rational(1, 2), rational(1, 2)]).unwrap();
    let readout = ScaledBlockMap::uniform_identity(MapKind::Readout, 1, vec![rational(1, 3), rational(2, 3)]).unwrap();
    let u = BlockPermutation::<Rational>::permutation(1, vec![0, 1]).unwrap();
    let space = crate::linalg::SpaceDescriptor::new(2, SpaceNorm::Lp(p3()), "test").unwrap();
    let t = DilationTriple::new(space, embed, readout, BTreeMap::from([("U".to_string(), u)]), Guarantee::Finite(1))
        .unwrap();
    assert!(matches!(t.compress::<&str>(&[]), Err(Error::IrrationalComposition(_))));
}

#[test]
fn simultaneous_single_member_matches_n_dilation() {
    let combo = ConvexCombination::new(vec![swap(), flip()], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    let single = build_n_dilation(&combo, 2, &p3()).unwrap();
    let sim = build_simultaneous_n_dilation(&[("T".to_string(), combo)], 2, &p3()).unwrap();
    assert_eq!(single.embed(), sim.embed());
    assert_eq!(single.readout(), sim.readout());
    assert_eq!(single.operators(), sim.operators());
}

#[test]
fn simultaneous_pairs_exact() {
    let neg = id2().scale(&integer(-1));
    let half = vec![rational(1, 2), rational(1, 2)];
    let f1 = ConvexCombination::new(vec![id2(), swap()], half.clone(), &p3()).unwrap();
    let f2 = ConvexCombination::new(vec![swap(), neg], half, &p3()).unwrap();
    let targets = target_map(&[("F1", f1.operator()), ("F2", f2.operator())]);
    let t = build_simultaneous_n_dilation(&[("F1".to_string(), f1), ("F2".to_string(), f2)], 2, &p3()).unwrap();
    let r = verify_dilation(&t, &targets, &VerifyOptions::new(2)).unwrap();
    assert_eq!(r.checks.len(), 1 + 2 + 4);
    assert!(r.pass);
    assert_eq!(t.compress::<&str>(&[]).unwrap(), id2());
}

#[test]
fn simultaneous_preconditions() {
    let uneven = third_two_thirds();
    assert!(matches!(
        build_simultaneous_n_dilation(&[("F".to_string(), uneven.clone())], 2, &p3()),
        Err(Error::InvalidCombination(_))
    ));
    let even = rationalize_weights(&uneven, 10).unwrap();
    let two = ConvexCombination::new(vec![swap(), flip()], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    assert!(matches!(
        build_simultaneous_n_dilation(&[("F".to_string(), even.clone()), ("G".to_string(), two)], 2, &p3()),
        Err(Error::InvalidCombination(_))
    ));
    let t = build_simultaneous_n_dilation(&[("F".to_string(), even)], 2, &p3()).unwrap();
    let r = verify_dilation(&t, &target_map(&[("F", uneven.operator())]), &VerifyOptions::new(2)).unwrap();
    assert!(r.pass);
}

#[test]
fn rationalized_family_after_equalizing() {
    let f = third_two_thirds();
    let g = ConvexCombination::new(vec![id2(), swap()], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    let targets = target_map(&[("F", f.operator()), ("G", g.operator())]);
    let fam = equalize_family(&[("F".to_string(), f), ("G".to_string(), g)], 12).unwrap();
    let t = build_simultaneous_n_dilation(&fam, 2, &p3()).unwrap();
    assert!(verify_dilation(&t, &targets, &VerifyOptions::new(2)).unwrap().pass);
}

#[test]
fn zero_augmented_words() {
    let inner = trivial_dilation(&named(&[("S", swap()), ("F", flip())]), &p3()).unwrap();
    let aug = zero_augment(&inner, 3).unwrap();
    assert_eq!(aug.guarantee(), Guarantee::Finite(3));
    assert_eq!(aug.space().dim, 4 * 2);
    assert!(aug.compress(&["0"]).unwrap().is_zero_matrix());
    assert!(aug.compress(&["S", "0", "F"]).unwrap().is_zero_matrix());
    assert_eq!(aug.compress(&["S", "F"]).unwrap(), swap().matmul(&flip()).unwrap());

    let targets = with_zero_target(&target_map(&[("S", swap()), ("F", flip())]), 2);
    let r = verify_dilation(&aug, &targets, &VerifyOptions::new(3)).unwrap();
    assert!(r.pass && r.in_contract);
    // N + 1 zeros bring the read-out copy back
    assert_eq!(aug.compress(&["0"; 4]).unwrap(), id2());

    let v0 = aug.operator(ZERO_LABEL).unwrap();
    assert!(v0.is_isometry(&SpaceNorm::Lp(p3())));
    assert!(is_lp_isometry(&v0.to_dense().unwrap(), &p3()));
}

#[test]
fn zero_augment_on_n_dilation() {
    let combo = third_two_thirds();
    let inner = build_n_dilation(&combo, 2, &p3()).unwrap();
    let aug = zero_augment(&inner, 3).unwrap();
    assert_eq!(aug.guarantee(), Guarantee::Finite(2));
    let targets = with_zero_target(&target_map(&[("T", combo.operator())]), 2);
    assert!(verify_dilation(&aug, &targets, &VerifyOptions::new(2)).unwrap().pass);
    assert!(zero_augment(&aug, 2).is_err());
    assert!(zero_augment(&inner, 0).is_err());
}

#[test]
fn shift_examples() {
    let t = shift_dilation(&mq(&[&[1]]), 2).unwrap();
    for n in 0..=2 {
        assert_eq!(t.compress_power("T", n).unwrap(), mq(&[&[1]]));
    }
    let half = Matrix::from_rows(vec![vec![rational(1, 2)]]).unwrap();
    let t = shift_dilation(&half, 3).unwrap();
    for n in 0..=3 {
        assert_eq!(t.compress_power("T", n).unwrap(), half.pow(n).unwrap());
    }
    // window wraps around after W + 1 steps
    assert_ne!(t.compress_power("T", 4).unwrap(), half.pow(4).unwrap());
    assert_eq!(t.guarantee(), Guarantee::Finite(3));
}

#[test]
fn shift_readout_is_l1_contractive() {
    let t =
        Matrix::from_rows(vec![vec![rational(1, 2), rational(-1, 3)], vec![rational(1, 4), rational(2, 3)]]).unwrap();
    let d = shift_dilation(&t, 4).unwrap();
    let q = d.readout().to_exact_matrix().unwrap();
    assert!(q.max_abs_column_sum() <= integer(1));
    let u = d.operator("T").unwrap().to_dense().unwrap();
    assert!(crate::isometry::is_signed_permutation(&u));
    let r = verify_dilation(&d, &target_map(&[("T", t)]), &VerifyOptions::new(4)).unwrap();
    assert!(r.pass);
}

#[test]
fn shift_rejects_expansion() {
    let t = mq(&[&[1, 1], &[1, 0]]);
    assert!(matches!(shift_dilation(&t, 2), Err(Error::NotAContraction { .. })));
    assert!(shift_dilation(&mq(&[&[1]]), 0).is_err());
}

#[test]
fn unknown_labels_are_errors() {
    let t = trivial_dilation(&named(&[("S", swap())]), &p3()).unwrap();
    assert!(matches!(verify_dilation(&t, &BTreeMap::new(), &VerifyOptions::new(1)), Err(Error::UnknownLabel(_))));
    assert!(matches!(t.compress(&["X"]), Err(Error::UnknownLabel(_))));
}

#[test]
fn sampling_is_seeded() {
    let pairs: Vec<(String, Matrix<Rational>)> =
        all_signed_permutations(2, 5).unwrap().iter().map(|s| (s.label(), s.to_matrix())).collect();
    let t = trivial_dilation(&pairs, &p3()).unwrap();
    let targets: BTreeMap<_, _> = pairs.into_iter().collect();
    let mut opts = VerifyOptions::new(6);
    opts.word_cap = 200;
    let a = verify_dilation(&t, &targets, &opts).unwrap();
    let b = verify_dilation(&t, &targets, &opts).unwrap();
    assert!(a.sampled && a.pass);
    assert_eq!(a.checks.len(), 200);
    assert_eq!(a, b);
    assert_eq!(a.total_words, (0..=6).map(|n| 8u128.pow(n)).sum::<u128>());
}

fn random_rational_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| rational(rng.random_range(-20..=20), rng.random_range(1..=9))).collect()
}

fn builder_outputs() -> Vec<DilationTriple<Rational>> {
    let combo = third_two_thirds();
    let neg = id2().scale(&integer(-1));
    let f = ConvexCombination::new(vec![id2(), swap()], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    let g = ConvexCombination::new(vec![swap(), neg], vec![rational(1, 2), rational(1, 2)], &p3()).unwrap();
    let trivial = trivial_dilation(&named(&[("S", swap())]), &p3()).unwrap();
    vec![
        trivial.clone(),
        build_n_dilation(&combo, 1, &p3()).unwrap(),
        build_n_dilation(&combo, 3, &p3()).unwrap(),
        build_simultaneous_n_dilation(&[("F".into(), f), ("G".into(), g)], 2, &p3()).unwrap(),
        zero_augment(&trivial, 2).unwrap(),
    ]
}

#[test]
fn qj_is_identity_for_every_builder() {
    for t in builder_outputs() {
        assert_eq!(t.compress::<&str>(&[]).unwrap(), id2(), "{}", t.space().structure);
    }
    let s = shift_dilation(&Matrix::from_rows(vec![vec![rational(1, 2)]]).unwrap(), 3).unwrap();
    assert_eq!(s.compress::<&str>(&[]).unwrap(), mq(&[&[1]]));
}

#[test]
fn embedding_is_isometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in builder_outputs() {
        for _ in 0..50 {
            let x = random_rational_vector(&mut rng, 2);
            assert_eq!(t.embed().embed_norm_pow_p(&x, &p3()).unwrap(), lp_norm_pow_p(&x, &p3()).unwrap());
        }
    }
}

#[test]
fn readout_is_contractive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in builder_outputs() {
        let dim = t.space().dim;
        for _ in 0..1000 {
            let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let qy = t.readout().apply_readout_f64(&y, &t.space().norm).unwrap();
            assert!(lp_norm(&qy, &p3()) <= lp_norm(&y, &p3()) + 1e-12);
        }
    }
}

#[test]
fn produced_operators_are_block_isometries() {
    for t in builder_outputs() {
        assert!(t.is_isometric_family());
        for u in t.operators().values() {
            let dense = u.to_dense().unwrap();
            assert!(is_lp_isometry(&dense, &p3()));
            let back = dense.matmul(&u.inverse().to_dense().unwrap()).unwrap();
            assert_eq!(back, Matrix::identity(dense.rows()));
            for i in 0..u.num_blocks() {
                if let Some(f) = u.factor(i) {
                    assert!(u.pool().contains(f));
                }
            }
        }
    }
}
