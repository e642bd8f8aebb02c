use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dilation_core::dilation::{
    build_n_dilation, build_simultaneous_n_dilation, equalize_family, shift_dilation, trivial_dilation,
    verify_dilation, verify_words, with_zero_target, zero_augment, ConvexCombination, DilationTriple, VerifyOptions,
    MAX_BLOCKS,
};
use dilation_core::group_action::{
    check_orbit_identity, double_coset_count, lhs_word_sum, orbit_partition, rhs_word_sum, WordSum,
};
use dilation_core::hull::{
    hull_membership, permutation_generators, snap_matrix, HullMode, GENERATOR_CAP, SNAP_DENOMINATOR,
};
use dilation_core::isometry::{decompose_contraction, DecompositionStrategy};
use dilation_core::linalg::{format_rational, integer, rational_to_f64, Matrix, PNorm, Rational, ScalarMode};
use dilation_core::oracle::{
    cross_validate, CrossValidateOptions, BLOCK_TOLERANCE, ORACLE_TOLERANCE, SIGN_PRODUCT_BLOCK_BUDGET,
};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::input::{detect_mode, read_json, resolve_p, weights_of, FromEntry, RawCombination, RawMatrix, Weights};
use crate::report::{Report, ReportBuilder};
use crate::triple_io::{guarantee_json, matrix_json, rational_json, scalar_json, triple_json, RawTriple};
use crate::{CliError, Command, Common, Generators, Mode, Strategy, Words};

type Family = Vec<(String, RawCombination)>;

/// Word length checked for triples whose guarantee is unbounded.
const UNBOUNDED_CHECK_LEN: usize = 4;

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Build { common, .. }
            | Command::Verify { common, .. }
            | Command::Simultaneous { common, .. }
            | Command::ZeroAugment { common, .. }
            | Command::Shift { common, .. }
            | Command::Decompose { common, .. }
            | Command::HullCheck { common, .. }
            | Command::IdentityCheck { common, .. }
            | Command::Oracle { common, .. }
            | Command::Orbit { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Build { .. } => "build",
            Command::Verify { .. } => "verify",
            Command::Simultaneous { .. } => "simultaneous",
            Command::ZeroAugment { .. } => "zero-augment",
            Command::Shift { .. } => "shift",
            Command::Decompose { .. } => "decompose",
            Command::HullCheck { .. } => "hull-check",
            Command::IdentityCheck { .. } => "identity-check",
            Command::Oracle { .. } => "oracle",
            Command::Orbit { .. } => "orbit",
        }
    }
}

impl From<Strategy> for DecompositionStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::SignProduct => DecompositionStrategy::SignProduct,
            Strategy::Staircase => DecompositionStrategy::Staircase,
        }
    }
}

fn strategy_name(s: DecompositionStrategy) -> &'static str {
    match s {
        DecompositionStrategy::SignProduct => "sign-product",
        DecompositionStrategy::Staircase => "staircase",
    }
}

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    let common = cmd.common();
    if !(common.tolerance.is_finite() && common.tolerance >= 0.0) {
        return Err(CliError::Input(format!("--tolerance must be a non-negative number, got {}", common.tolerance)));
    }
    let mut rb = ReportBuilder::new(cmd.name());
    rb.param("tolerance", common.tolerance);
    rb.param("seed", common.seed);
    match cmd {
        Command::Build { combo, n, p, triple_out, words, common } => {
            build(&mut rb, combo, *n, p.as_deref(), triple_out, words, common)?
        }
        Command::Verify { triple, words, common } => verify(&mut rb, triple, words, common)?,
        Command::Simultaneous { family, n, p, m, triple_out, words, common } => {
            simultaneous(&mut rb, family, *n, p.as_deref(), *m, triple_out, words, common)?
        }
        Command::ZeroAugment { combo, n, p, triple_out, words, common } => {
            zero_aug(&mut rb, combo, *n, p.as_deref(), triple_out, words, common)?
        }
        Command::Shift { matrix, n, triple_out, words, common } => {
            shift(&mut rb, matrix, *n, triple_out, words, common)?
        }
        Command::Decompose { matrix, strategy, common } => decompose(&mut rb, matrix, (*strategy).into(), common)?,
        Command::HullCheck { matrix, generators, mode, .. } => hull_check(&mut rb, matrix, *generators, *mode)?,
        Command::IdentityCheck { m, n, .. } => identity_check(&mut rb, *m, *n)?,
        Command::Oracle { matrix, n, snap, strategy, .. } => {
            oracle(&mut rb, matrix, *n, *snap, strategy.map(Into::into))?
        }
        Command::Orbit { m, n, .. } => orbit(&mut rb, *m, *n)?,
    }
    Ok(rb.finish())
}

fn load(path: &Path, rb: &mut ReportBuilder) -> Result<Value, CliError> {
    let mut bytes = Vec::new();
    let v = read_json(path, &mut bytes)?;
    rb.hash_input(&bytes);
    Ok(v)
}

fn load_matrix(path: &Path, rb: &mut ReportBuilder) -> Result<(RawMatrix, usize, ScalarMode), CliError> {
    let raw = RawMatrix::parse(&load(path, rb)?, "matrix")?;
    let d = raw.square_dim("matrix")?;
    let mode = detect_mode(&raw.entries, "matrix", &mut rb.warnings);
    Ok((raw, d, mode))
}

fn positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Input(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn combination<S: FromEntry>(raw: &RawCombination, p: &PNorm) -> Result<ConvexCombination<S>, CliError> {
    let weights = raw.weights.as_ref().ok_or_else(|| CliError::Input("combination has no weights".into()))?;
    let isos = raw.matrices::<S>()?;
    Ok(match weights_of(weights) {
        Weights::Exact(w) => ConvexCombination::with_labels(isos, w, raw.labels.clone(), p)?,
        Weights::Float(w) => ConvexCombination::from_float_weights(isos, &w, raw.labels.clone(), p)?,
    })
}

fn combination_json<S: FromEntry>(c: &ConvexCombination<S>) -> Value {
    json!({
        "m": c.m(),
        "d": c.dim(),
        "labels": c.labels(),
        "weights": c.weights().iter().map(rational_json).collect::<Vec<_>>(),
    })
}

fn describe_triple<S: FromEntry>(rb: &mut ReportBuilder, triple: &DilationTriple<S>) {
    let space = triple.space();
    rb.n_guarantee = guarantee_json(triple.guarantee());
    rb.detail("space", json!({"dim": space.dim, "norm": space.norm.to_string(), "structure": space.structure}));
    rb.detail("labels", json!(triple.labels()));
    rb.cap("max_blocks", MAX_BLOCKS);
    rb.check("operators are invertible isometries", 0.0, triple.is_isometric_family());
}

fn save_triple<S: FromEntry>(
    path: &Option<PathBuf>,
    triple: &DilationTriple<S>,
    targets: &BTreeMap<String, Matrix<S>>,
) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string(&triple_json(triple, targets)).expect("triples serialize");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn parse_word(w: &str) -> Vec<String> {
    if w.trim().is_empty() {
        Vec::new()
    } else {
        w.split(',').map(|l| l.trim().to_string()).collect()
    }
}

fn count_json(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn verify_into<S: FromEntry>(
    rb: &mut ReportBuilder,
    triple: &DilationTriple<S>,
    targets: &BTreeMap<String, Matrix<S>>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    rb.cap("word_cap", words.word_cap);
    let report = if words.word.is_empty() {
        let max_len = words.all_up_to.unwrap_or_else(|| triple.guarantee().finite().unwrap_or(UNBOUNDED_CHECK_LEN));
        rb.param("all_up_to", max_len);
        let opts = VerifyOptions { max_len, tolerance: common.tolerance, word_cap: words.word_cap, seed: common.seed };
        verify_dilation(triple, targets, &opts)?
    } else {
        if words.all_up_to.is_some() {
            return Err(CliError::Input("--word and --all-up-to are mutually exclusive".into()));
        }
        let list: Vec<Vec<String>> = words.word.iter().map(|w| parse_word(w)).collect();
        rb.param("words", json!(list));
        verify_words(triple, targets, &list, common.tolerance)?
    };
    for c in &report.checks {
        rb.word_check(c.word.clone(), c.residual, c.pass);
    }
    if report.sampled {
        rb.warnings.push(format!(
            "checked a seeded sample of {} out of {} words",
            report.checks.len(),
            report.total_words
        ));
    }
    if !report.in_contract {
        rb.warnings.push(format!(
            "words longer than the guarantee ({}) were checked; equality is not promised there",
            report.guarantee
        ));
    }
    rb.detail(
        "verification",
        json!({
            "total_words": count_json(report.total_words),
            "checked": report.checks.len(),
            "sampled": report.sampled,
            "in_contract": report.in_contract,
        }),
    );
    Ok(())
}

fn build(
    rb: &mut ReportBuilder,
    path: &Path,
    n: usize,
    p_flag: Option<&str>,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    positive("--N", n)?;
    let raw = RawCombination::parse(&load(path, rb)?, "combo")?;
    let p = PNorm::parse(&resolve_p(raw.p.as_deref(), p_flag)?)?;
    rb.param("N", n);
    rb.param("p", p.to_string());
    let mode = detect_mode(raw.entries(), "combo", &mut rb.warnings);
    rb.mode = mode.as_str().into();
    match mode {
        ScalarMode::Exact => build_with::<Rational>(rb, &raw, n, &p, triple_out, words, common),
        ScalarMode::Float => build_with::<f64>(rb, &raw, n, &p, triple_out, words, common),
    }
}

fn build_with<S: FromEntry>(
    rb: &mut ReportBuilder,
    raw: &RawCombination,
    n: usize,
    p: &PNorm,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    let combo = combination::<S>(raw, p)?;
    let triple = build_n_dilation(&combo, n, p)?;
    let targets = BTreeMap::from([("T".to_string(), combo.operator())]);
    rb.detail("combination", combination_json(&combo));
    rb.detail("target", matrix_json(&combo.operator()));
    describe_triple(rb, &triple);
    save_triple(triple_out, &triple, &targets)?;
    verify_into(rb, &triple, &targets, words, common)
}

fn verify(rb: &mut ReportBuilder, path: &Path, words: &Words, common: &Common) -> Result<(), CliError> {
    let raw = RawTriple::parse(load(path, rb)?, &mut rb.warnings)?;
    rb.mode = raw.mode.as_str().into();
    match raw.mode {
        ScalarMode::Exact => verify_with::<Rational>(rb, &raw, words, common),
        ScalarMode::Float => verify_with::<f64>(rb, &raw, words, common),
    }
}

fn verify_with<S: FromEntry>(
    rb: &mut ReportBuilder,
    raw: &RawTriple,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    let (triple, targets) = raw.build::<S>()?;
    describe_triple(rb, &triple);
    verify_into(rb, &triple, &targets, words, common)
}

fn parse_family(doc: &Value) -> Result<(Option<String>, Family), CliError> {
    let p = match doc.get("p") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(x)) => Some(x.to_string()),
        Some(other) => return Err(CliError::Input(format!("family.p: expected a string, got {other}"))),
    };
    let members = doc
        .get("members")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Input("family: missing \"members\" array".into()))?;
    if members.is_empty() {
        return Err(CliError::Input("family: no members".into()));
    }
    let mut out = Vec::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        let at = format!("members[{i}]");
        let label = match m.get("label") {
            None => format!("F{}", i + 1),
            Some(l) => l.as_str().ok_or_else(|| CliError::Input(format!("{at}.label: expected a string")))?.to_string(),
        };
        let combo = RawCombination::parse(m, &at)?;
        if combo.p.is_some() {
            return Err(CliError::Input(format!("{at}: set p once at the family level")));
        }
        if out.iter().any(|(l, _): &(String, RawCombination)| *l == label) {
            return Err(CliError::Input(format!("{at}: duplicate label {label}")));
        }
        out.push((label, combo));
    }
    Ok((p, out))
}

#[allow(clippy::too_many_arguments)]
fn simultaneous(
    rb: &mut ReportBuilder,
    path: &Path,
    n: usize,
    p_flag: Option<&str>,
    m_cap: usize,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    positive("--N", n)?;
    positive("--m", m_cap)?;
    let (p, family) = parse_family(&load(path, rb)?)?;
    let p = PNorm::parse(&resolve_p(p.as_deref(), p_flag)?)?;
    rb.param("N", n);
    rb.param("p", p.to_string());
    rb.cap("m", m_cap);
    let mode = detect_mode(family.iter().flat_map(|(_, c)| c.entries()), "family", &mut rb.warnings);
    rb.mode = mode.as_str().into();
    match mode {
        ScalarMode::Exact => simultaneous_with::<Rational>(rb, &family, n, &p, m_cap, triple_out, words, common),
        ScalarMode::Float => simultaneous_with::<f64>(rb, &family, n, &p, m_cap, triple_out, words, common),
    }
}

#[allow(clippy::too_many_arguments)]
fn simultaneous_with<S: FromEntry>(
    rb: &mut ReportBuilder,
    raw: &[(String, RawCombination)],
    n: usize,
    p: &PNorm,
    m_cap: usize,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    let family =
        raw.iter().map(|(l, c)| Ok((l.clone(), combination::<S>(c, p)?))).collect::<Result<Vec<_>, CliError>>()?;
    let targets: BTreeMap<String, Matrix<S>> = family.iter().map(|(l, c)| (l.clone(), c.operator())).collect();
    let equal = equalize_family(&family, m_cap)?;
    let triple = build_simultaneous_n_dilation(&equal, n, p)?;
    rb.detail(
        "family",
        family.iter().map(|(l, c)| (l.clone(), combination_json(c))).collect::<serde_json::Map<_, _>>(),
    );
    rb.detail("equal_weight_count", equal.first().map_or(0, |(_, c)| c.m()));
    describe_triple(rb, &triple);
    save_triple(triple_out, &triple, &targets)?;
    verify_into(rb, &triple, &targets, words, common)
}

fn zero_aug(
    rb: &mut ReportBuilder,
    path: &Path,
    n: usize,
    p_flag: Option<&str>,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    positive("--N", n)?;
    let raw = RawCombination::parse(&load(path, rb)?, "combo")?;
    let p = PNorm::parse(&resolve_p(raw.p.as_deref(), p_flag)?)?;
    rb.param("N", n);
    rb.param("p", p.to_string());
    let mode = detect_mode(raw.entries(), "combo", &mut rb.warnings);
    rb.mode = mode.as_str().into();
    match mode {
        ScalarMode::Exact => zero_aug_with::<Rational>(rb, &raw, n, &p, triple_out, words, common),
        ScalarMode::Float => zero_aug_with::<f64>(rb, &raw, n, &p, triple_out, words, common),
    }
}

/// With weights, the inner family is the N-dilation of the combination;
/// without, the isometries themselves.
fn zero_aug_with<S: FromEntry>(
    rb: &mut ReportBuilder,
    raw: &RawCombination,
    n: usize,
    p: &PNorm,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    let (inner, targets) = if raw.weights.is_some() {
        let combo = combination::<S>(raw, p)?;
        rb.detail("combination", combination_json(&combo));
        (build_n_dilation(&combo, n, p)?, BTreeMap::from([("T".to_string(), combo.operator())]))
    } else {
        let named: Vec<(String, Matrix<S>)> = raw.labels.iter().cloned().zip(raw.matrices::<S>()?).collect();
        (trivial_dilation(&named, p)?, named.into_iter().collect())
    };
    let d = inner.base_dim();
    let triple = zero_augment(&inner, n)?;
    let targets = with_zero_target(&targets, d);
    describe_triple(rb, &triple);
    save_triple(triple_out, &triple, &targets)?;
    verify_into(rb, &triple, &targets, words, common)
}

fn shift(
    rb: &mut ReportBuilder,
    path: &Path,
    w: usize,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    positive("--N", w)?;
    let (raw, _, mode) = load_matrix(path, rb)?;
    rb.param("N", w);
    rb.mode = mode.as_str().into();
    match mode {
        ScalarMode::Exact => shift_with(rb, raw.to_matrix::<Rational>()?, w, triple_out, words, common),
        ScalarMode::Float => shift_with(rb, raw.to_matrix::<f64>()?, w, triple_out, words, common),
    }
}

fn shift_with<S: FromEntry>(
    rb: &mut ReportBuilder,
    t: Matrix<S>,
    w: usize,
    triple_out: &Option<PathBuf>,
    words: &Words,
    common: &Common,
) -> Result<(), CliError> {
    rb.detail("input_l1_norm", scalar_json(&t.max_abs_column_sum()));
    let triple = shift_dilation(&t, w)?;
    if let Some(q) = triple.readout().to_exact_matrix() {
        rb.detail("readout_l1_norm", scalar_json(&q.max_abs_column_sum()));
    }
    let targets = BTreeMap::from([("T".to_string(), t)]);
    describe_triple(rb, &triple);
    save_triple(triple_out, &triple, &targets)?;
    verify_into(rb, &triple, &targets, words, common)
}

fn decompose(
    rb: &mut ReportBuilder,
    path: &Path,
    strategy: DecompositionStrategy,
    common: &Common,
) -> Result<(), CliError> {
    let (raw, _, _) = load_matrix(path, rb)?;
    rb.mode = ScalarMode::Float.as_str().into();
    rb.param("strategy", strategy_name(strategy));
    let t = raw.to_matrix::<f64>()?;
    let dec = decompose_contraction(&t, common.tolerance.max(1e-12), strategy)?;
    let tol = common.tolerance;
    rb.check("reconstruction", dec.reconstruction_residual, dec.reconstruction_residual <= tol);
    let sum_err = (dec.weight_sum() - 1.0).abs();
    rb.check("weights sum to one", sum_err, sum_err <= tol);
    let ortho = dec.max_orthogonality_defect();
    rb.check("terms are orthogonal", ortho, ortho <= tol);
    rb.detail("singular_values", json!(dec.singular_values));
    rb.detail(
        "terms",
        dec.terms
            .iter()
            .map(|x| json!({"weight": x.weight, "signs": x.signs, "matrix": matrix_json(&x.matrix)}))
            .collect::<Vec<_>>(),
    );
    Ok(())
}

fn hull_check(rb: &mut ReportBuilder, path: &Path, generators: Generators, mode: Mode) -> Result<(), CliError> {
    let (raw, d, input_mode) = load_matrix(path, rb)?;
    let t = match input_mode {
        ScalarMode::Exact => raw.to_matrix::<Rational>()?,
        ScalarMode::Float => {
            let (snapped, err) = snap_matrix(&raw.to_matrix::<f64>()?, SNAP_DENOMINATOR);
            rb.warnings.push(format!("float input snapped to denominators <= {SNAP_DENOMINATOR} (max error {err:e})"));
            rb.detail("snap_error", err);
            snapped
        }
    };
    let signed = generators == Generators::SignedPerms;
    let hull_mode = match mode {
        Mode::Convex => HullMode::Convex,
        Mode::Subconvex => HullMode::Subconvex,
    };
    rb.param("generators", if signed { "signed-perms" } else { "perms" });
    rb.param("mode", hull_mode.as_str());
    rb.cap("generators", GENERATOR_CAP);
    let gens = permutation_generators(d, signed)?;
    let r = hull_membership(&t, &gens, hull_mode)?;
    if r.is_member() {
        let total: Rational = r.coefficients.iter().map(|(_, w)| w.clone()).sum();
        let recon = r.reconstruct(&gens, d);
        let gap = recon.sub(&t)?.max_abs();
        let weights_ok = r.coefficients.iter().all(|(_, w)| w.is_positive())
            && match hull_mode {
                HullMode::Convex => total == integer(1),
                HullMode::Subconvex => total <= integer(1),
            };
        rb.check("coefficients reproduce the matrix", gap, gap == 0.0 && weights_ok);
        rb.detail("status", "member");
        rb.detail(
            "coefficients",
            r.coefficients.iter().map(|(l, w)| (l.clone(), rational_json(w))).collect::<serde_json::Map<_, _>>(),
        );
        if let Some(s) = &r.slack {
            rb.detail("slack", rational_json(s));
        }
    } else {
        let cert = r.certificate.as_ref().ok_or_else(|| CliError::Input("non-member without a certificate".into()))?;
        let ok = cert.verify(&t, &gens, hull_mode);
        let margin = rational_to_f64(&(&cert.target_value - &cert.bound));
        rb.check("separating functional certifies non-membership", 0.0, ok);
        rb.detail("status", "non-member");
        let mut c = json!({
            "functional": matrix_json(&cert.functional),
            "bound": rational_json(&cert.bound),
            "target_value": rational_json(&cert.target_value),
            "margin": margin,
        });
        if let Some(pair) = &cert.rank_one {
            c["rank_one"] = json!({
                "u": pair.u.iter().map(rational_json).collect::<Vec<_>>(),
                "v": pair.v.iter().map(rational_json).collect::<Vec<_>>(),
                "bound": rational_json(&pair.bound),
                "target_value": rational_json(&pair.target_value),
            });
        }
        rb.detail("certificate", c);
    }
    Ok(())
}

fn word_sum_gap(a: &WordSum, b: &WordSum) -> f64 {
    a.add(&b.scale(&integer(-1))).terms().map(|(_, c)| rational_to_f64(c).abs()).fold(0.0, f64::max)
}

fn identity_check(rb: &mut ReportBuilder, m: usize, n_cycle: usize) -> Result<(), CliError> {
    positive("--m", m)?;
    positive("--N", n_cycle)?;
    rb.hash_input(format!("identity-check m={m} N={n_cycle}").as_bytes());
    rb.param("m", m);
    rb.param("N", n_cycle);
    rb.n_guarantee = json!(n_cycle);
    let total: i64 = (1..=m as i64).sum();
    let lambdas = [
        ("uniform", (0..m).map(|_| Rational::new(1.into(), (m as i64).into())).collect::<Vec<_>>()),
        ("graded", (1..=m as i64).map(|i| Rational::new(i.into(), total.into())).collect()),
    ];
    for (name, lambda) in &lambdas {
        for n in 0..=n_cycle {
            let gap = word_sum_gap(&lhs_word_sum(m, n_cycle, n, lambda)?, &rhs_word_sum(m, n_cycle, n, lambda)?);
            rb.check(format!("word sums agree, n = {n}, {name} weights"), gap, gap == 0.0);
        }
    }
    let partition = orbit_partition(m, n_cycle)?;
    for orbit in &partition.orbits {
        let rep = orbit.members[0].one_based();
        for n in 0..=n_cycle {
            let ok = check_orbit_identity(orbit, m, n_cycle, n)?;
            rb.check(format!("orbit {rep:?}, n = {n}"), if ok { 0.0 } else { 1.0 }, ok);
        }
    }
    rb.detail(
        "lambdas",
        lambdas
            .iter()
            .map(|(k, l)| (k.to_string(), json!(l.iter().map(format_rational).collect::<Vec<_>>())))
            .collect::<serde_json::Map<_, _>>(),
    );
    rb.detail("orbits", partition.orbits.len());
    Ok(())
}

fn orbit(rb: &mut ReportBuilder, m: usize, n: usize) -> Result<(), CliError> {
    positive("--m", m)?;
    positive("--N", n)?;
    rb.hash_input(format!("orbit m={m} N={n}").as_bytes());
    rb.param("m", m);
    rb.param("N", n);
    let partition = orbit_partition(m, n)?;
    let mut listed = Vec::with_capacity(partition.orbits.len());
    for orbit in &partition.orbits {
        let rep = orbit.members[0].one_based();
        let gap = (orbit.size() * orbit.stabilizer).abs_diff(n);
        rb.check(format!("orbit {rep:?}: size times stabilizer equals N"), gap as f64, gap == 0);
        listed.push(json!({
            "representative": rep,
            "size": orbit.size(),
            "stabilizer": orbit.stabilizer,
            "members": orbit.members.iter().map(|a| a.one_based()).collect::<Vec<_>>(),
        }));
    }
    let expected = (m as u128).pow(n as u32);
    let gap = (partition.total_size() as u128).abs_diff(expected);
    rb.check("orbits partition all multi-indices", gap as f64, gap == 0);
    let pre = double_coset_count(n)?;
    rb.check("every rotation has N preimages", 0.0, pre.all_equal_to_order());
    rb.detail("orbits", listed);
    rb.detail("preimage_counts", json!(pre.counts));
    Ok(())
}

fn oracle(
    rb: &mut ReportBuilder,
    path: &Path,
    n: usize,
    snap: Option<u64>,
    strategy: Option<DecompositionStrategy>,
) -> Result<(), CliError> {
    positive("--N", n)?;
    let (raw, _, _) = load_matrix(path, rb)?;
    rb.mode = ScalarMode::Float.as_str().into();
    rb.param("N", n);
    rb.param("block_tolerance", BLOCK_TOLERANCE);
    rb.param("oracle_tolerance", ORACLE_TOLERANCE);
    if let Some(q) = snap {
        positive("--snap", q as usize)?;
        rb.param("snap", q);
    }
    rb.cap("sign_product_blocks", SIGN_PRODUCT_BLOCK_BUDGET);
    rb.n_guarantee = json!(n);
    let t = raw.to_matrix::<f64>()?;
    let cv = cross_validate(&t, n, &CrossValidateOptions { weight_denominator: snap, strategy })?;
    // with snapped weights the built operator differs from T, so the block
    // construction is judged against its own combination
    let curve = if snap.is_some() { &cv.combination_residuals } else { &cv.block_residuals };
    for (k, &r) in curve.iter().enumerate() {
        rb.check(format!("block construction, n = {k}"), r, r <= BLOCK_TOLERANCE);
    }
    for (k, &r) in cv.oracle_residuals.iter().enumerate() {
        rb.check(format!("unitary oracle, n = {k}"), r, r <= ORACLE_TOLERANCE);
    }
    rb.check("oracle is orthogonal", cv.oracle_orthogonality, cv.oracle_orthogonality <= ORACLE_TOLERANCE);
    rb.detail("strategy", strategy_name(cv.strategy));
    rb.detail("terms", cv.terms);
    rb.detail("weights", json!(cv.weights));
    rb.detail("weight_snap_error", cv.weight_snap_error);
    rb.detail("residuals_against_powers", json!(cv.block_residuals));
    rb.detail("residuals_against_combination", json!(cv.combination_residuals));
    rb.detail("oracle_residual_beyond_N", cv.oracle_beyond);
    Ok(())
}
