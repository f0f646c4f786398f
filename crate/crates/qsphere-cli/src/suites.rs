//! Verification suites: one per acceptance property, shared by the
//! `verify-lemmas` subcommand and the integration-test gate.
//!
//! Every suite is exact (rational / rational-function arithmetic, no
//! tolerances) and deterministic for a given seed. Failures are report
//! entries, never process errors: a suite that cannot even build its
//! objects reports FAIL with the engine diagnostic.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qsphere_core::coeffq::{parse_rat, QMode, Scalar};
use qsphere_core::descent::{
    run_descent, verify_nonvanishing_obstruction, DescentCase, DescentOutcome, GeneratorVerdict,
    ImageForm, ObstructionConclusion,
};
use qsphere_core::ncpoly::{Letter, NCPoly, Word};
use qsphere_core::quotients::{
    commutator_ideal_certificate, factor_through_ideal_generator, is_unitary_laurent,
    project_to_circle, unitary_defect, HomSpec, HomTarget, LaurentPoly, TargetElem,
    UnitaryVerdict,
};
use qsphere_core::rewrite::{defining_relations, RuleSet};
use qsphere_core::suq2::{alpha_power_product, word_to_basis, BasisTerm, BasisVector};

use crate::json::SuiteReportDto;
use crate::{CliError, CliResult};

/// All suite names, in report order.
pub const SUITE_NAMES: [&str; 10] = [
    "relations",
    "confluence",
    "basis",
    "alpha-products",
    "filtration",
    "ideal",
    "commutator-filtration",
    "circle-unitaries",
    "descent",
    "obstruction",
];

/// Bounds and parameters for a suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Deformation parameter for the parameter-generic suites. The descent
    /// and obstruction suites use their own built-in parameter grids.
    pub qmode: QMode,
    /// Upper arity for the multi-sphere suites (relations, confluence,
    /// ideal).
    pub arity_max: u32,
    /// Gap-schema width bound for the confluence audit.
    pub schema_bound: usize,
    /// Descent depth for the obstruction pipeline.
    pub depth: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            qmode: QMode::Symbolic,
            arity_max: 3,
            schema_bound: 3,
            depth: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail { detail: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub verdict: Verdict,
    pub checks: u64,
    pub millis: u128,
}

impl SuiteReport {
    /// FAIL is the only verdict that fails a run; SKIPPED is not a failure.
    pub fn failed(&self) -> bool {
        matches!(self.verdict, Verdict::Fail { .. })
    }

    pub fn to_dto(&self) -> SuiteReportDto {
        let (verdict, detail) = match &self.verdict {
            Verdict::Pass => ("pass", None),
            Verdict::Fail { detail } => ("fail", Some(detail.clone())),
            Verdict::Skipped { reason } => ("skipped", Some(reason.clone())),
        };
        SuiteReportDto {
            suite: self.suite.to_string(),
            verdict: verdict.to_string(),
            checks: self.checks,
            detail,
            millis: self.millis,
        }
    }

    /// One-line text rendering, e.g. `PASS relations (42 checks, 12 ms)`.
    pub fn line(&self) -> String {
        match &self.verdict {
            Verdict::Pass => format!(
                "PASS {} ({} checks, {} ms)",
                self.suite, self.checks, self.millis
            ),
            Verdict::Fail { detail } => format!(
                "FAIL {} after {} checks: {detail}",
                self.suite, self.checks
            ),
            Verdict::Skipped { reason } => format!("SKIPPED {}: {reason}", self.suite),
        }
    }
}

/// Progress of a suite body: checks performed so far plus the outcome.
struct Body {
    checks: u64,
    verdict: Verdict,
}

impl Body {
    fn pass(checks: u64) -> Body {
        Body {
            checks,
            verdict: Verdict::Pass,
        }
    }

    fn fail(checks: u64, detail: String) -> Body {
        Body {
            checks,
            verdict: Verdict::Fail { detail },
        }
    }

    fn skip(reason: String) -> Body {
        Body {
            checks: 0,
            verdict: Verdict::Skipped { reason },
        }
    }
}

/// Runs the named suite. Unknown names are usage errors; everything that
/// goes wrong inside a suite is reported as its FAIL verdict.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> CliResult<SuiteReport> {
    let Some(suite) = SUITE_NAMES.iter().find(|s| **s == name) else {
        return Err(CliError::Usage(format!(
            "unknown suite {name:?}; expected one of: {}",
            SUITE_NAMES.join(", ")
        )));
    };
    let start = Instant::now();
    let body = match name {
        "relations" => relations_suite(cfg),
        "confluence" => confluence_suite(cfg),
        "basis" => basis_suite(cfg),
        "alpha-products" => alpha_products_suite(cfg),
        "filtration" => filtration_suite(cfg),
        "ideal" => ideal_suite(cfg),
        "commutator-filtration" => commutator_filtration_suite(cfg),
        "circle-unitaries" => circle_unitaries_suite(cfg),
        "descent" => descent_suite(cfg),
        "obstruction" => obstruction_suite(cfg),
        _ => unreachable!("matched against SUITE_NAMES"),
    };
    let body = body.unwrap_or_else(|e| Body::fail(0, format!("engine error: {e}")));
    Ok(SuiteReport {
        suite,
        verdict: body.verdict,
        checks: body.checks,
        millis: start.elapsed().as_millis(),
    })
}

/// Runs every suite in order.
pub fn run_all(cfg: &SuiteConfig) -> CliResult<Vec<SuiteReport>> {
    SUITE_NAMES.iter().map(|n| run_suite(n, cfg)).collect()
}

type SuiteResult = CliResult<Body>;

fn skip_at_q_zero(cfg: &SuiteConfig, suite: &str) -> Option<Body> {
    if cfg.qmode.is_zero_fixed() {
        Some(Body::skip(format!("q = 0 unsupported for {suite}")))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Shared generators for the randomized suites
// ---------------------------------------------------------------------------

fn scalar_pool(sources: &[&str]) -> Vec<Scalar> {
    sources
        .iter()
        .map(|s| qsphere_core::parser::parse_scalar(s, true).expect("pool scalar"))
        .collect()
}

fn pick<'a>(rng: &mut StdRng, pool: &'a [Scalar]) -> &'a Scalar {
    &pool[rng.gen_range(0..pool.len())]
}

fn random_word(rng: &mut StdRng, arity: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| {
            let index = rng.gen_range(0..=arity);
            if rng.gen_bool(0.5) {
                Letter::starred(index)
            } else {
                Letter::plain(index)
            }
        })
        .collect();
    Word::from_letters(letters)
}

fn random_poly(rng: &mut StdRng, arity: u32, pool: &[Scalar]) -> NCPoly {
    let mut p = NCPoly::zero(arity);
    for _ in 0..rng.gen_range(1..=3) {
        p.add_term(random_word(rng, arity, 4), pick(rng, pool).clone());
    }
    p
}

/// The canonical basis element of one arity-1 letter.
fn letter_basis_term(l: Letter) -> BasisTerm {
    match (l.index, l.starred) {
        (0, false) => BasisTerm::new(1, 0, 0),
        (0, true) => BasisTerm::new(-1, 0, 0),
        (1, false) => BasisTerm::new(0, 1, 0),
        (1, true) => BasisTerm::new(0, 0, 1),
        _ => unreachable!("arity-1 letters only"),
    }
}

// ---------------------------------------------------------------------------
// 1. relations — every defining relation normalizes to zero
// ---------------------------------------------------------------------------

fn relations_suite(cfg: &SuiteConfig) -> SuiteResult {
    let mut checks = 0;
    for n in 1..=cfg.arity_max {
        let rules = RuleSet::new(n, cfg.qmode.clone())?;
        for (name, p) in defining_relations(n, &cfg.qmode)? {
            let nf = rules.normalize(&p)?;
            checks += 1;
            if !nf.poly.is_zero() {
                return Ok(Body::fail(
                    checks,
                    format!("relation {name} at n = {n} leaves residual {}", nf.poly),
                ));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 2. confluence — termination measure + all critical pairs join
// ---------------------------------------------------------------------------

fn confluence_suite(cfg: &SuiteConfig) -> SuiteResult {
    let mut checks = 0;
    for n in 1..=cfg.arity_max {
        let rules = RuleSet::new(n, cfg.qmode.clone())?;
        rules.verify_termination_measure()?;
        checks += 1;
        let report = rules.check_local_confluence(cfg.schema_bound)?;
        checks += report.pairs.len() as u64;
        if !report.all_joined {
            let p = report.unjoined().next().expect("an unjoined pair");
            return Ok(Body::fail(
                checks,
                format!(
                    "critical pair on {} ({} vs {}) does not join at n = {n}: {} != {}",
                    p.overlap, p.left_rule, p.right_rule, p.left_nf, p.right_nf
                ),
            ));
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 3. basis — rewriting and direct basis products agree on random words
// ---------------------------------------------------------------------------

fn basis_suite(cfg: &SuiteConfig) -> SuiteResult {
    if let Some(skip) = skip_at_q_zero(cfg, "basis") {
        return Ok(skip);
    }
    let rules = RuleSet::new(1, cfg.qmode.clone())?;
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(0xB0));
    let mut checks = 0;
    for _ in 0..500 {
        let w = random_word(&mut rng, 1, 6);
        let p = NCPoly::term(1, w.clone(), Scalar::one());
        let via_rewrite = word_to_basis(&rules.normalize(&p)?.poly, &cfg.qmode)?;
        let mut direct = BasisVector::one(cfg.qmode.clone())?;
        for &letter in w.letters() {
            let v = BasisVector::basis_term(cfg.qmode.clone(), letter_basis_term(letter))?;
            direct = direct.basis_product(&v)?;
        }
        checks += 1;
        if via_rewrite != direct {
            return Ok(Body::fail(
                checks,
                format!("word {w}: rewrite route {via_rewrite} != product route {direct}"),
            ));
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 4. alpha-products — closed form of α-power products vs. the rewriter
// ---------------------------------------------------------------------------

fn alpha_products_suite(cfg: &SuiteConfig) -> SuiteResult {
    if let Some(skip) = skip_at_q_zero(cfg, "alpha-products") {
        return Ok(skip);
    }
    let rules = RuleSet::new(1, cfg.qmode.clone())?;
    let mut checks = 0;
    for j in 0..=5u64 {
        for k in 0..=5u64 {
            let closed = alpha_power_product(j, k, &cfg.qmode)?;
            let mut letters = vec![Letter::plain(0); j as usize];
            letters.extend(std::iter::repeat_n(Letter::starred(0), k as usize));
            let p = NCPoly::term(1, Word::from_letters(letters), Scalar::one());
            let oracle = word_to_basis(&rules.normalize(&p)?.poly, &cfg.qmode)?;
            checks += 1;
            if closed != oracle {
                return Ok(Body::fail(
                    checks,
                    format!("alpha power product ({j},{k}): {closed} != oracle {oracle}"),
                ));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 5. filtration — superadditive degrees, star-invariance, involution table
// ---------------------------------------------------------------------------

fn filtration_suite(cfg: &SuiteConfig) -> SuiteResult {
    if let Some(skip) = skip_at_q_zero(cfg, "filtration") {
        return Ok(skip);
    }
    let qm = &cfg.qmode;
    let mut checks = 0;

    // Involution table (e_{j,k,l})* = e_{-j,l,k} and degree preservation
    // (which is exactly (V_m)* = V_m on basis vectors).
    for j in -3..=3i64 {
        for k in 0..=3u64 {
            for l in 0..=3u64 {
                let v = BasisVector::basis_term(qm.clone(), BasisTerm::new(j, k, l))?;
                let s = v.basis_star();
                let expected = BasisVector::basis_term(qm.clone(), BasisTerm::new(-j, l, k))?;
                checks += 1;
                if s != expected {
                    return Ok(Body::fail(
                        checks,
                        format!("involution of e({j},{k},{l}) is {s}, expected {expected}"),
                    ));
                }
                if s.filtration_degree() != v.filtration_degree() {
                    return Ok(Body::fail(
                        checks,
                        format!("involution changed the degree of e({j},{k},{l})"),
                    ));
                }
            }
        }
    }

    // Degree superadditivity of products over the full grid.
    let mut grid = Vec::new();
    for j in -3..=3i64 {
        for k in 0..=3u64 {
            for l in 0..=(3 - k) {
                grid.push(BasisTerm::new(j, k, l));
            }
        }
    }
    let vectors: Vec<(u64, BasisVector)> = grid
        .iter()
        .map(|t| Ok((t.degree(), BasisVector::basis_term(qm.clone(), *t)?)))
        .collect::<CliResult<_>>()?;
    for (dx, x) in &vectors {
        for (dy, y) in &vectors {
            let p = x.basis_product(y)?;
            checks += 1;
            if !p.filtration_degree().at_least(dx + dy) {
                return Ok(Body::fail(
                    checks,
                    format!("degree of {x} * {y} fell below {}", dx + dy),
                ));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 6. ideal — certificates re-evaluate; circle projection is a *-hom
// ---------------------------------------------------------------------------

fn ideal_suite(cfg: &SuiteConfig) -> SuiteResult {
    if let Some(skip) = skip_at_q_zero(cfg, "ideal") {
        return Ok(skip);
    }
    let mut checks = 0;
    let pool = scalar_pool(&["1", "-1", "2", "-1/2", "3/4", "i", "1+i"]);
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(0x1D));

    for n in 1..=cfg.arity_max {
        let rules = RuleSet::new(n, cfg.qmode.clone())?;

        // Certified targets: generators, exchange monomials, tail sums,
        // diagonal monomials.
        let mut targets: Vec<NCPoly> = Vec::new();
        for i in 1..=n {
            targets.push(NCPoly::generator(n, i, false)?);
        }
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    let w = Word::from_letters(vec![Letter::plain(j), Letter::starred(i)]);
                    targets.push(NCPoly::term(n, w, Scalar::one()));
                }
            }
        }
        for i in 1..=n {
            let mut tail = NCPoly::zero(n);
            for j in i..=n {
                let w = Word::from_letters(vec![Letter::plain(j), Letter::starred(j)]);
                tail.add_term(w, Scalar::one());
            }
            targets.push(tail);
        }
        for i in 1..=n {
            let w = Word::from_letters(vec![Letter::plain(i), Letter::starred(i)]);
            targets.push(NCPoly::term(n, w, Scalar::one()));
        }

        for target in &targets {
            let cert = commutator_ideal_certificate(target, &rules)?;
            checks += 1;
            if !cert.verify(&rules)? {
                return Ok(Body::fail(
                    checks,
                    format!("certificate for {target} at n = {n} fails re-evaluation"),
                ));
            }
        }

        // The circle projection is multiplicative and *-preserving.
        let samples = if n == 1 { 168 } else { 166 };
        for _ in 0..samples {
            let a = random_poly(&mut rng, n, &pool);
            let b = random_poly(&mut rng, n, &pool);
            let pa = project_to_circle(&a, &rules)?;
            let pb = project_to_circle(&b, &rules)?;
            let pab = project_to_circle(&a.checked_mul(&b)?, &rules)?;
            checks += 1;
            if pab != pa.mul(&pb) {
                return Ok(Body::fail(
                    checks,
                    format!("projection not multiplicative on {a} and {b}"),
                ));
            }
            let pstar = project_to_circle(&a.involution(), &rules)?;
            checks += 1;
            if pstar != pa.star() {
                return Ok(Body::fail(
                    checks,
                    format!("projection not *-preserving on {a}"),
                ));
            }
        }

        // The projection kills every positive-index generator.
        for i in 1..=n {
            let z = NCPoly::generator(n, i, false)?;
            checks += 1;
            if !project_to_circle(&z, &rules)?.is_zero() {
                return Ok(Body::fail(checks, format!("projection keeps z{i} alive")));
            }
            let zs = NCPoly::generator(n, i, true)?;
            checks += 1;
            if !project_to_circle(&zs, &rules)?.is_zero() {
                return Ok(Body::fail(checks, format!("projection keeps z{i}' alive")));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 7. commutator-filtration — ideal and filtration coincide at level one
// ---------------------------------------------------------------------------

fn commutator_filtration_suite(cfg: &SuiteConfig) -> SuiteResult {
    if let Some(skip) = skip_at_q_zero(cfg, "commutator-filtration") {
        return Ok(skip);
    }
    let qm = &cfg.qmode;
    let mut checks = 0;
    let rules = RuleSet::new(1, qm.clone())?;
    let ideal_generators = [BasisTerm::new(0, 1, 0), BasisTerm::new(0, 0, 1)];

    // Every positive-degree basis monomial factors through one of the two
    // degree-one ideal generators, exactly.
    for j in -3..=3i64 {
        for k in 0..=3u64 {
            for l in 0..=3u64 {
                if k + l == 0 {
                    continue;
                }
                let t = BasisTerm::new(j, k, l);
                let (scalar, left, gen) = factor_through_ideal_generator(&t, qm)?;
                checks += 1;
                if !ideal_generators.contains(&gen) {
                    return Ok(Body::fail(
                        checks,
                        format!("e({j},{k},{l}) factored through non-generator {gen}"),
                    ));
                }
                let lv = BasisVector::basis_term(qm.clone(), left)?;
                let gv = BasisVector::basis_term(qm.clone(), gen)?;
                let recomposed = lv.basis_product(&gv)?.scale(&scalar)?;
                if recomposed != BasisVector::basis_term(qm.clone(), t)? {
                    return Ok(Body::fail(
                        checks,
                        format!("factorization of e({j},{k},{l}) does not recompose"),
                    ));
                }

                // The same monomial, as a word, is certified inside the
                // commutator ideal: the level-one filtration sits in the
                // ideal.
                let p = NCPoly::term(1, t.word(), Scalar::one());
                let cert = commutator_ideal_certificate(&p, &rules)?;
                checks += 1;
                if !cert.verify(&rules)? {
                    return Ok(Body::fail(
                        checks,
                        format!("ideal certificate for e({j},{k},{l}) fails"),
                    ));
                }
            }
        }
    }

    // Conversely, every framed commutator term of the certificates for the
    // ideal generators (and the basic certified monomials) lands in the
    // level-one filtration.
    let ctx = qsphere_core::parser::ExprContext::new(1, true);
    for src in ["z1", "z1'", "z1 z0'", "z0 z1'", "z1 z1'"] {
        let target = qsphere_core::parser::parse_poly(src, &ctx)?;
        let cert = commutator_ideal_certificate(&target, &rules)?;
        checks += 1;
        if !cert.verify(&rules)? {
            return Ok(Body::fail(checks, format!("certificate for {src} fails")));
        }
        for term in cert.terms() {
            let comm = term.left.q_commutator(&term.right, &Scalar::one())?;
            let pre = NCPoly::term(1, term.pre.clone(), term.coeff.clone());
            let post = NCPoly::term(1, term.post.clone(), Scalar::one());
            let expansion = pre.checked_mul(&comm)?.checked_mul(&post)?;
            let v = word_to_basis(&rules.normalize(&expansion)?.poly, qm)?;
            checks += 1;
            if !v.filtration_degree().at_least(1) {
                return Ok(Body::fail(
                    checks,
                    format!("a commutator term for {src} has degree zero: {v}"),
                ));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 8. circle-unitaries — unitary classification vs. brute-force expansion
// ---------------------------------------------------------------------------

fn circle_unitaries_suite(cfg: &SuiteConfig) -> SuiteResult {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(0xC1));
    let pool = scalar_pool(&[
        "1",
        "-1",
        "2",
        "-1/2",
        "3/4",
        "i",
        "-i",
        "1+i",
        "3/5+(4/5)i",
        "5/13+(12/13)i",
        "-3/5+(4/5)i",
        "2/3",
    ]);
    let mut checks = 0;
    for _ in 0..1000 {
        let mut a = LaurentPoly::zero();
        for _ in 0..rng.gen_range(0..=5) {
            a.add_term(rng.gen_range(-6..=6), pick(&mut rng, &pool).clone());
        }
        let verdict = is_unitary_laurent(&a);
        let defect = unitary_defect(&a);
        let structural = a.num_terms() == 1 && {
            let (_, c) = a.terms().iter().next().expect("single term");
            (c * &c.conj()) == Scalar::one()
        };
        checks += 1;
        match &verdict {
            UnitaryVerdict::Unitary { lambda, exponent } => {
                if !structural {
                    return Ok(Body::fail(
                        checks,
                        format!("{a} classified unitary but is not a single unit term"),
                    ));
                }
                if !defect.is_zero() {
                    return Ok(Body::fail(
                        checks,
                        format!("{a} classified unitary but a a* - 1 = {defect}"),
                    ));
                }
                if a.coeff(*exponent) != *lambda {
                    return Ok(Body::fail(
                        checks,
                        format!("unitary witness for {a} names the wrong term"),
                    ));
                }
            }
            UnitaryVerdict::NotUnitary { exponent, coeff } => {
                if structural {
                    return Ok(Body::fail(
                        checks,
                        format!("{a} is a single unit term but was rejected"),
                    ));
                }
                if defect.is_zero() {
                    return Ok(Body::fail(
                        checks,
                        format!("{a} rejected but a a* - 1 = 0"),
                    ));
                }
                if defect.coeff(*exponent) != *coeff || coeff.is_zero() {
                    return Ok(Body::fail(
                        checks,
                        format!(
                            "witness coefficient for {a} at exponent {exponent} \
                             disagrees with the brute-force expansion"
                        ),
                    ));
                }
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 9. descent — factor tables vs. direct products; certificates and stalls
// ---------------------------------------------------------------------------

fn random_positive_degree_vector(
    rng: &mut StdRng,
    qm: &QMode,
    pool: &[Scalar],
) -> CliResult<BasisVector> {
    let mut terms = BTreeMap::new();
    let want = rng.gen_range(1..=4);
    while terms.len() < want {
        let j = rng.gen_range(-3..=3i64);
        let k = rng.gen_range(0..=4u64);
        let l = rng.gen_range(0..=4u64);
        if k + l == 0 || k + l > 4 {
            continue;
        }
        terms.insert(BasisTerm::new(j, k, l), pick(rng, pool).clone());
    }
    Ok(BasisVector::from_terms(qm.clone(), terms)?)
}

fn descent_suite(cfg: &SuiteConfig) -> SuiteResult {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(0xDE));
    let pool = scalar_pool(&["1", "-1", "2", "-1/2", "3/4", "i", "1+i", "3/5+(4/5)i"]);
    let mut checks = 0;

    for (q_src, qp_src) in [("1/3", "1/2"), ("0", "1/2"), ("2/3", "1/3")] {
        let q = parse_rat(q_src)?;
        let qm = QMode::Fixed(parse_rat(qp_src)?);
        for case in [DescentCase::Alpha, DescentCase::AlphaStar] {
            let shift = match case {
                DescentCase::Alpha => BasisTerm::new(1, 0, 0),
                DescentCase::AlphaStar => BasisTerm::new(-1, 0, 0),
            };
            let g = BasisVector::basis_term(qm.clone(), shift)?;
            for _ in 0..25 {
                let y = random_positive_degree_vector(&mut rng, &qm, &pool)?;
                let outcome = run_descent(&y, &q, case, 4)?;
                let DescentOutcome::ZeroCertificate {
                    steps,
                    fully_annihilated,
                    ..
                } = &outcome
                else {
                    return Ok(Body::fail(
                        checks,
                        format!("descent stalled for {y} at q = {q_src}, q' = {qp_src}, {case}"),
                    ));
                };
                if !fully_annihilated {
                    return Ok(Body::fail(
                        checks,
                        format!("support of {y} not exhausted at depth 4"),
                    ));
                }
                // Independent route: each step's forced part must equal the
                // twisted commutator of its input slice, computed by plain
                // basis multiplication, modulo the next-but-one level.
                let mut current = y.clone();
                for step in steps {
                    let slice = current.reduce_mod(step.m + 1);
                    let twisted = slice.basis_product(&g)?.checked_sub(
                        &g.basis_product(&slice)?
                            .scale(&Scalar::from_rat(q.clone()))?,
                    )?;
                    checks += 1;
                    if twisted.reduce_mod(step.m + 2) != step.forced_part {
                        return Ok(Body::fail(
                            checks,
                            format!(
                                "factor table at level {} for {y} disagrees with the \
                                 direct product route",
                                step.m
                            ),
                        ));
                    }
                    current = step.updated.clone();
                }
            }
        }
    }

    // Equal parameters: the level-one factor vanishes, so the descent must
    // stall rather than fabricate an obstruction against the identity.
    let q = parse_rat("1/2")?;
    let qm = QMode::Fixed(q.clone());
    let mut stall_inputs = vec![BasisVector::parse("e(0,1,0)", qm.clone(), true)?];
    for _ in 0..5 {
        let j = rng.gen_range(-3..=3i64);
        let (k, l) = if rng.gen_bool(0.5) { (1, 0) } else { (0, 1) };
        let mut v = BasisVector::basis_term(qm.clone(), BasisTerm::new(j, k, l))?;
        if rng.gen_bool(0.5) {
            v = v.checked_add(&random_positive_degree_vector(&mut rng, &qm, &pool)?)?;
        }
        stall_inputs.push(v);
    }
    for y in &stall_inputs {
        if !y.filtration_degree().at_least(1) || y.reduce_mod(2).is_zero() {
            continue;
        }
        checks += 1;
        match run_descent(y, &q, DescentCase::Alpha, 2)? {
            DescentOutcome::Stalled { m: 1, .. } => {}
            other => {
                return Ok(Body::fail(
                    checks,
                    format!("q = q' descent on {y} did not stall at level 1: {other:?}"),
                ));
            }
        }
    }
    Ok(Body::pass(checks))
}

// ---------------------------------------------------------------------------
// 10. obstruction — the full pipeline on its three canonical behaviors
// ---------------------------------------------------------------------------

fn pipeline_spec(
    n: u32,
    q: &str,
    qp: &str,
    image_srcs: &[&str],
) -> CliResult<(HomSpec, QMode)> {
    let qmode = QMode::Fixed(parse_rat(qp)?);
    let images = image_srcs
        .iter()
        .map(|s| {
            Ok(TargetElem::Basis(BasisVector::parse(
                s,
                qmode.clone(),
                true,
            )?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((
        HomSpec {
            source_arity: n,
            source_q: QMode::Fixed(parse_rat(q)?),
            target: HomTarget::Basis {
                qmode: qmode.clone(),
            },
            images,
        },
        qmode,
    ))
}

fn obstruction_suite(cfg: &SuiteConfig) -> SuiteResult {
    let mut checks = 0;
    for n in [1u32, 2] {
        let naive: Vec<&str> = match n {
            1 => vec!["e(1,0,0)", "e(0,1,0)"],
            _ => vec!["e(1,0,0)", "e(0,1,0)", "0"],
        };

        // (a) Equal parameters: a genuine homomorphism, no obstruction.
        let (spec, _) = pipeline_spec(n, "1/2", "1/2", &naive)?;
        let report = verify_nonvanishing_obstruction(&spec, cfg.depth)?;
        checks += 1;
        if !report.hom.holds() {
            return Ok(Body::fail(
                checks,
                format!("identity-parameter map at n = {n} flagged as non-homomorphism"),
            ));
        }
        if !matches!(
            report.conclusion,
            ObstructionConclusion::PowerRelation { m: 1 }
        ) {
            return Ok(Body::fail(
                checks,
                format!(
                    "identity-parameter map at n = {n} must end at the power test, got: {}",
                    report.conclusion
                ),
            ));
        }

        // (b) Naive cross-parameter map: relation violation with the exact
        // canonical residue.
        let (spec, qmode) = pipeline_spec(n, "1/3", "1/2", &naive)?;
        let report = verify_nonvanishing_obstruction(&spec, cfg.depth)?;
        checks += 1;
        if !matches!(
            report.conclusion,
            ObstructionConclusion::NotAHomomorphism { .. }
        ) {
            return Ok(Body::fail(
                checks,
                format!("naive cross-parameter map at n = {n} not flagged"),
            ));
        }
        let expected = TargetElem::Basis(BasisVector::parse(
            "(-5/36) e(0,1,1)",
            qmode.clone(),
            true,
        )?);
        match report.hom.violation("star-exchange(0)") {
            Some(v) if v.residue == expected => {}
            Some(v) => {
                return Ok(Body::fail(
                    checks,
                    format!("wrong residue for star-exchange(0) at n = {n}: {}", v.residue),
                ));
            }
            None => {
                return Ok(Body::fail(
                    checks,
                    format!("star-exchange(0) not among the violations at n = {n}"),
                ));
            }
        }

        // (c) A candidate of the admissible shape: every positive-index
        // image is forced to zero through depth `cfg.depth`.
        let candidate: Vec<&str> = match n {
            1 => vec!["e(1,0,0) + e(0,1,1)", "e(0,1,0) + e(2,1,1)"],
            _ => vec![
                "e(1,0,0) + e(0,1,1)",
                "e(0,1,0) + e(2,1,1)",
                "e(-1,2,0) + e(1,1,2)",
            ],
        };
        let (spec, qmode) = pipeline_spec(n, "1/3", "1/2", &candidate)?;
        let report = verify_nonvanishing_obstruction(&spec, cfg.depth)?;
        match &report.decomposition {
            ImageForm::Shift {
                case: DescentCase::Alpha,
                lambda,
                remainder,
            } if *lambda == Scalar::one()
                && *remainder == BasisVector::parse("e(0,1,1)", qmode.clone(), true)? => {}
            other => {
                return Ok(Body::fail(
                    checks,
                    format!("candidate decomposition at n = {n} unexpected: {other:?}"),
                ));
            }
        }
        for d in &report.descents {
            checks += 1;
            match &d.verdict {
                GeneratorVerdict::Descent(DescentOutcome::ZeroCertificate {
                    fully_annihilated: true,
                    ..
                }) => {}
                other => {
                    return Ok(Body::fail(
                        checks,
                        format!(
                            "candidate image of z{} at n = {n} not forced to zero: {other:?}",
                            d.index
                        ),
                    ));
                }
            }
        }
    }
    Ok(Body::pass(checks))
}
