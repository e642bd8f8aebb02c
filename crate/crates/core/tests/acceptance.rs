//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::One;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dilation_core::dilation::{
    build_n_dilation, build_simultaneous_n_dilation, equalize_family, shift_dilation, trivial_dilation,
    verify_dilation, with_zero_target, zero_augment, ConvexCombination, VerifyOptions, ZERO_LABEL,
};
use dilation_core::group_action::{
    check_orbit_identity, double_coset_count, lhs_word_sum, orbit_partition, rhs_word_sum,
};
use dilation_core::hull::{
    hull_membership, permutation_generators, positive_isometry_scan, snap_matrix, HullMode, SNAP_DENOMINATOR,
};
use dilation_core::isometry::{
    all_signed_permutations, decompose_contraction, is_signed_permutation, svd, DecompositionStrategy,
};
use dilation_core::linalg::{rational, Matrix, PNorm, Rational};
use dilation_core::oracle::{cross_validate, CrossValidateOptions};

type Criterion = (&'static str, fn() -> Outcome);

const EXACT_BUDGET: Duration = Duration::from_secs(60);
const HILBERT_BUDGET: Duration = Duration::from_secs(30);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn exponents() -> Vec<PNorm> {
    ["2", "3", "3/2"].iter().map(|p| PNorm::parse(p).unwrap()).collect()
}

fn random_isometries(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<Matrix<Rational>> {
    let all = all_signed_permutations(d, 5).unwrap();
    (0..m).map(|_| all.choose(rng).unwrap().to_matrix()).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, m: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..m).map(|_| rng.random_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| rational(x, total)).collect()
}

fn single_target(t: Matrix<Rational>) -> BTreeMap<String, Matrix<Rational>> {
    BTreeMap::from([("T".to_string(), t)])
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    let mut failures = Vec::new();
    let mut max_dim = 0;
    for p in exponents() {
        for m in 1..=3 {
            for n in 1..=4 {
                for d in 1..=3 {
                    for seed in 0..20u64 {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + (m * 100 + n * 10 + d) as u64);
                        let combo =
                            ConvexCombination::new(random_isometries(&mut rng, d, m), random_weights(&mut rng, m), &p)
                                .unwrap();
                        let triple = build_n_dilation(&combo, n, &p).unwrap();
                        max_dim = max_dim.max(triple.space().dim);
                        let report =
                            verify_dilation(&triple, &single_target(combo.operator()), &VerifyOptions::new(n)).unwrap();
                        triples += 1;
                        if !report.pass || report.max_residual != 0.0 {
                            failures.push(format!("p={p} m={m} N={n} d={d} seed={seed}"));
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < EXACT_BUDGET,
        format!(
            "{triples} triples, largest dim {max_dim}, {} failures {:?}, {:.1?}",
            failures.len(),
            failures.first(),
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = PNorm::from_integer(3).unwrap();
    let mut families = 0;
    let mut words = 0;
    let mut failures = Vec::new();
    for d in 1..=2 {
        for members in 1..=3 {
            for n in 1..=3 {
                for seed in 0..5u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed * 97 + (d * 31 + members * 7 + n) as u64);
                    let pool = random_isometries(&mut rng, d, 3);
                    let family: Vec<(String, ConvexCombination<Rational>)> = (0..members)
                        .map(|i| {
                            let m = *[1usize, 2, 3, 6].choose(&mut rng).unwrap();
                            let mut counts = vec![0i64; pool.len()];
                            for _ in 0..m {
                                counts[rng.random_range(0..pool.len())] += 1;
                            }
                            let weights = counts.iter().map(|&c| rational(c, m as i64)).collect();
                            (format!("F{}", i + 1), ConvexCombination::new(pool.clone(), weights, &p).unwrap())
                        })
                        .collect();
                    let targets: BTreeMap<String, Matrix<Rational>> =
                        family.iter().map(|(l, c)| (l.clone(), c.operator())).collect();
                    let equal = equalize_family(&family, 6).unwrap();
                    let triple = build_simultaneous_n_dilation(&equal, n, &p).unwrap();
                    let report = verify_dilation(&triple, &targets, &VerifyOptions::new(n)).unwrap();
                    families += 1;
                    words += report.checks.len();
                    if !report.pass || report.max_residual != 0.0 {
                        failures.push(format!("d={d} members={members} N={n} seed={seed}"));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < EXACT_BUDGET,
        format!(
            "{families} families, {words} words, {} failures {:?}, {:.1?}",
            failures.len(),
            failures.first(),
            elapsed
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut checks = 0;
    for m in 1..=3 {
        for n_cycle in 1..=5 {
            for _ in 0..10 {
                let lambda = random_weights(&mut rng, m);
                for n in 0..=n_cycle {
                    checks += 1;
                    if lhs_word_sum(m, n_cycle, n, &lambda).unwrap() != rhs_word_sum(m, n_cycle, n, &lambda).unwrap() {
                        failures += 1;
                    }
                }
            }
            for orbit in &orbit_partition(m, n_cycle).unwrap().orbits {
                for n in 0..=n_cycle {
                    checks += 1;
                    if !check_orbit_identity(orbit, m, n_cycle, n).unwrap() {
                        failures += 1;
                    }
                }
            }
        }
    }
    for n in 1..=8 {
        checks += 1;
        if !double_coset_count(n).unwrap().all_equal_to_order() {
            failures += 1;
        }
        for m in 1..=3 {
            checks += 1;
            let part = orbit_partition(m, n).unwrap();
            if !part.orbit_stabilizer_holds() || part.total_size() != m.pow(n as u32) {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{checks} checks, {failures} failures"))
}

fn all_words(labels: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|w| labels.iter().map(move |l| [w.clone(), vec![l.clone()]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn criterion_4() -> Outcome {
    let p = PNorm::from_integer(3).unwrap();
    let mut failures = Vec::new();
    let (mut zero_words, mut plain_words) = (0, 0);
    for n in 1..=4 {
        for k in 1..=3 {
            for d in 1..=3 {
                let mut rng = ChaCha8Rng::seed_from_u64((n * 100 + k * 10 + d) as u64);
                let named: Vec<(String, Matrix<Rational>)> = random_isometries(&mut rng, d, k)
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| (format!("U{i}"), t))
                    .collect();
                let targets: BTreeMap<_, _> = named.iter().cloned().collect();
                let aug = zero_augment(&trivial_dilation(&named, &p).unwrap(), n).unwrap();
                let mut labels: Vec<String> = named.iter().map(|(l, _)| l.clone()).collect();
                labels.push(ZERO_LABEL.to_string());
                for word in all_words(&labels, n) {
                    let got = aug.compress(&word).unwrap();
                    let ok = if word.iter().any(|l| l == ZERO_LABEL) {
                        zero_words += 1;
                        got.is_zero_matrix()
                    } else {
                        plain_words += 1;
                        let want = word.iter().fold(Matrix::identity(d), |acc, l| acc.matmul(&targets[l]).unwrap());
                        got == want
                    };
                    if !ok {
                        failures.push(format!("N={n} k={k} d={d} word={word:?}"));
                    }
                }
                let report = verify_dilation(&aug, &with_zero_target(&targets, d), &VerifyOptions::new(n)).unwrap();
                if !report.pass {
                    failures.push(format!("N={n} k={k} d={d} verify"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{zero_words} words with 0, {plain_words} without, {} failures {:?}", failures.len(), failures.first()),
    )
}

fn random_l1_contraction(rng: &mut ChaCha8Rng, d: usize) -> Matrix<Rational> {
    let t =
        Matrix::new(d, d, (0..d * d).map(|_| rational(rng.random_range(-6..=6), rng.random_range(1..=4))).collect())
            .unwrap();
    let norm = t.max_abs_column_sum();
    if norm > Rational::one() {
        t.scale(&(Rational::one() / norm))
    } else {
        t
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    for i in 0..20 {
        let d = rng.random_range(1..=4);
        let w = rng.random_range(1..=6);
        let t = random_l1_contraction(&mut rng, d);
        let triple = shift_dilation(&t, w).unwrap();
        let report = verify_dilation(&triple, &single_target(t.clone()), &VerifyOptions::new(w)).unwrap();
        let u = triple.operator("T").unwrap().to_dense().unwrap();
        let q = triple.readout().to_exact_matrix().unwrap();
        let ok = report.pass
            && report.max_residual == 0.0
            && is_signed_permutation(&u)
            && q.max_abs_column_sum() <= Rational::one();
        if !ok {
            failures.push(format!("draw {i}: d={d} W={w}"));
        }
    }
    outcome(failures.is_empty(), format!("20 contractions, {} failures {:?}", failures.len(), failures.first()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let (mut worst_block, mut worst_oracle, mut worst_recon) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let d = rng.random_range(1..=4);
        let t = Matrix::new(d, d, (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let top = svd(&t).unwrap().singular_values[0];
        let t = if top > 1.0 { t.scale(&(1.0 / top)) } else { t };
        let dec = decompose_contraction(&t, 1e-9, DecompositionStrategy::SignProduct).unwrap();
        worst_recon = worst_recon.max(dec.reconstruction_residual);
        let cv = cross_validate(&t, 3, &CrossValidateOptions::default()).unwrap();
        worst_block = cv.block_residuals.iter().fold(worst_block, |a, &b| a.max(b));
        worst_oracle = cv.oracle_residuals.iter().fold(worst_oracle, |a, &b| a.max(b));
        let ok = dec.reconstruction_residual <= 1e-9 && (dec.weight_sum() - 1.0).abs() <= 1e-12 && cv.pass;
        if !ok {
            failures.push(format!("draw {i}: d={d}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < HILBERT_BUDGET,
        format!(
            "100 contractions, reconstruction {worst_recon:.1e}, block construction {worst_block:.1e}, oracle {worst_oracle:.1e}, {} failures {:?}, {elapsed:.1?}",
            failures.len(),
            failures.first()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in ["3", "3/2", "4"] {
        let p = PNorm::parse(p).unwrap();
        for d in 1..=4 {
            let scan = positive_isometry_scan(d, &p).unwrap();
            pass &= scan.matches_permutations;
        }
    }
    notes.push("positive isometries are permutations for d <= 4".to_string());

    let p = PNorm::from_integer(3).unwrap();
    let a = 2f64.powf(-1.0 / p.q_f64());
    let (t, err) = snap_matrix(&Matrix::from_rows(vec![vec![a, a], vec![0.0, 0.0]]).unwrap(), SNAP_DENOMINATOR);
    let gens = permutation_generators(2, false).unwrap();
    let r = hull_membership(&t, &gens, HullMode::Subconvex).unwrap();
    let certified = !r.is_member() && r.certificate.as_ref().is_some_and(|c| c.verify(&t, &gens, HullMode::Subconvex));
    pass &= certified;
    notes.push(format!("snapped row matrix outside (snap error {err:.1e}, certificate verified {certified})"));

    let half = rational(1, 2);
    let avg = Matrix::from_rows(vec![vec![half.clone(), half.clone()], vec![half.clone(), half.clone()]]).unwrap();
    let r = hull_membership(&avg, &gens, HullMode::Convex).unwrap();
    let expected = vec![("id".to_string(), half.clone()), ("swap".to_string(), half)];
    pass &= r.is_member() && r.coefficients == expected;
    notes.push(format!(
        "average matrix coefficients {:?}",
        r.coefficients.iter().map(|(l, w)| format!("{l}:{w}")).collect::<Vec<_>>()
    ));
    outcome(pass, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let p = PNorm::from_integer(3).unwrap();
    let mut beyond_nonzero = 0;
    let mut monotone_failures = 0;
    let mut draws = 0;
    for n in 1..=3 {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + seed * 10 + n as u64);
            let isos = random_isometries(&mut rng, 2, 2);
            if isos[0] == isos[1] {
                continue;
            }
            let combo = ConvexCombination::new(isos, random_weights(&mut rng, 2), &p).unwrap();
            let triple = build_n_dilation(&combo, n, &p).unwrap();
            let targets = single_target(combo.operator());
            draws += 1;
            for m in 0..=n {
                if !verify_dilation(&triple, &targets, &VerifyOptions::new(m)).unwrap().pass {
                    monotone_failures += 1;
                }
            }
            let beyond = verify_dilation(&triple, &targets, &VerifyOptions::new(n + 1)).unwrap();
            if !beyond.in_contract && beyond.max_residual > 0.0 {
                beyond_nonzero += 1;
            }
        }
    }
    outcome(
        beyond_nonzero > 0 && monotone_failures == 0,
        format!(
            "{draws} strict combinations, {beyond_nonzero} nonzero at N+1, {monotone_failures} monotonicity failures"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact N-dilation of convex combinations", criterion_1),
        ("exact simultaneous N-dilation of families", criterion_2),
        ("word-sum and orbit identities", criterion_3),
        ("zero-operator augmentation", criterion_4),
        ("truncated shift dilation on l^1", criterion_5),
        ("Hilbert-space pipeline against the unitary oracle", criterion_6),
        ("positive isometries and hull certificates", criterion_7),
        ("contract boundary at N + 1", criterion_8),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("criterion {} ({name}): {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
