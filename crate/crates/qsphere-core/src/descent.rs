//! Filtration descent: the computational engine behind the non-isomorphism
//! obstruction between sphere algebras at different parameters.
//!
//! Throughout, the ambient algebra is the arity-1 basis algebra at a fixed
//! parameter `q'` with filtration `V_m = span{ e(j,k,l) : k+l ≥ m }`, and
//! `q ∈ [0,1)` is the parameter of a source sphere algebra mapping into it.
//! For a candidate generator image `y ∈ V_m`, the twisted commutators
//!
//! * `T(y) = y·α − q·α·y` ([`DescentCase::Alpha`]), and
//! * `T(y) = y·α* − q·α*·y` ([`DescentCase::AlphaStar`])
//!
//! act on the degree-`m` slice of `y` term by term: each `e(j,k,l)` with
//! `k+l = m` is carried to a multiple of `e(j±1,k,l)` whose coefficient
//! picks up an explicit scalar factor in `q` and `q'`, modulo `V_{m+2}`.
//! Whenever such a factor is nonzero, the corresponding coefficient of any
//! solution of `T(y) ∈ V_{m+1}` must vanish — so `y` is forced one step
//! deeper into the filtration. Iterating yields a bounded-depth certificate
//! that a candidate image is zero ([`run_descent`]), and
//! [`verify_nonvanishing_obstruction`] chains this with the homomorphism
//! check, the parameter power test, and the unitary-shift decomposition of
//! the `z_0` image into the full obstruction report.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::coeffq::{rat_text, QMode, Rat, Scalar};
use crate::error::Error;
use crate::quotients::{
    check_homomorphism, is_unitary_laurent, HomSpec, HomTarget, HomVerdict, LaurentPoly,
    TargetElem, UnitaryVerdict,
};
use crate::suq2::{BasisTerm, BasisVector};
use crate::Result;

// ---------------------------------------------------------------------------
// Parameter power test
// ---------------------------------------------------------------------------

/// Decides exactly whether `q = q'^m` for some integer `m ≥ 1`, returning
/// that `m`. Requires `q ∈ [0,1)` and `q' ∈ (0,1)`; since the powers of
/// `q'` decrease strictly to zero, the search stops as soon as
/// `q'^m < q`, and `q = 0` is never a positive power.
pub fn is_power(q: &Rat, qp: &Rat) -> Result<Option<u64>> {
    validate_source_param(q)?;
    validate_target_param(qp)?;
    if q.is_zero() {
        return Ok(None);
    }
    let mut power = qp.clone();
    let mut m: u64 = 1;
    loop {
        if power == *q {
            return Ok(Some(m));
        }
        if power < *q {
            return Ok(None);
        }
        power *= qp;
        m += 1;
    }
}

fn validate_source_param(q: &Rat) -> Result<()> {
    if *q < Rat::zero() || *q >= Rat::one() {
        return Err(Error::InvalidRange {
            what: format!("source parameter {} must lie in [0,1)", rat_text(q)),
        });
    }
    Ok(())
}

fn validate_target_param(qp: &Rat) -> Result<()> {
    if *qp <= Rat::zero() || *qp >= Rat::one() {
        return Err(Error::InvalidRange {
            what: format!("target parameter {} must lie in (0,1)", rat_text(qp)),
        });
    }
    Ok(())
}

/// The fixed rational parameter carried by a basis vector's mode; the
/// descent arithmetic is exact rational, so a symbolic mode is rejected.
fn fixed_target_param(qmode: &QMode) -> Result<Rat> {
    match qmode {
        QMode::Fixed(r) => {
            validate_target_param(r)?;
            Ok(r.clone())
        }
        QMode::Symbolic => Err(Error::InvalidRange {
            what: String::from("descent requires a fixed rational target parameter"),
        }),
    }
}

fn rat_pow(base: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

// ---------------------------------------------------------------------------
// Descent cases and the unitary-shift decomposition
// ---------------------------------------------------------------------------

/// Which twisted commutator drives the descent: multiplication by `α`
/// (shifting `j` up) or by `α*` (shifting `j` down). These correspond to
/// the two possible shapes of a unitary `z_0` image, `λα + x` and
/// `λα* + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentCase {
    Alpha,
    AlphaStar,
}

impl core::fmt::Display for DescentCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DescentCase::Alpha => write!(f, "alpha"),
            DescentCase::AlphaStar => write!(f, "alpha-star"),
        }
    }
}

/// Decomposition of a candidate `z_0` image against the circle part of the
/// target algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum ImageForm {
    /// The circle part is a single unitary term `λu` or `λu^{-1}`:
    /// the image is `λα + remainder` resp. `λα* + remainder` with the
    /// remainder of filtration degree ≥ 1.
    Shift {
        case: DescentCase,
        lambda: Scalar,
        remainder: BasisVector,
    },
    /// The circle part is not of that form; it is returned as the witness.
    NotOfForm { circle_part: LaurentPoly },
}

/// Splits a candidate `z_0` image into its circle part and filtration
/// remainder, requiring the circle part to be a unitary first power
/// `λu^{±1}` — the shape every unitary generator of the circle quotient
/// must take. Any other circle part (wrong exponent, non-unit coefficient,
/// or several terms) yields [`ImageForm::NotOfForm`].
pub fn decompose_unitary_image(img: &BasisVector) -> Result<ImageForm> {
    let circle = LaurentPoly::from_terms(img.circle_coeffs());
    let (lambda, exponent) = match is_unitary_laurent(&circle) {
        UnitaryVerdict::Unitary { lambda, exponent } => (lambda, exponent),
        UnitaryVerdict::NotUnitary { .. } => {
            return Ok(ImageForm::NotOfForm {
                circle_part: circle,
            })
        }
    };
    let case = match exponent {
        1 => DescentCase::Alpha,
        -1 => DescentCase::AlphaStar,
        _ => {
            return Ok(ImageForm::NotOfForm {
                circle_part: circle,
            })
        }
    };
    let shift = BasisVector::basis_term(
        img.qmode().clone(),
        BasisTerm::new(exponent, 0, 0),
    )?;
    let remainder = img.checked_sub(&shift.scale(&lambda)?)?;
    debug_assert!(remainder.filtration_degree().at_least(1));
    Ok(ImageForm::Shift {
        case,
        lambda,
        remainder,
    })
}

// ---------------------------------------------------------------------------
// One descent step
// ---------------------------------------------------------------------------

/// One vanishing condition produced by a descent step: the coefficient of
/// `term` in any solution must vanish whenever `factor ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentCondition {
    pub term: BasisTerm,
    pub factor: Rat,
}

/// Outcome of one descent step at level `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DescentStep {
    pub m: u64,
    pub case: DescentCase,
    /// One condition per support term of degree exactly `m`.
    pub conditions: Vec<DescentCondition>,
    /// The image of the degree-`m` slice under the twisted commutator,
    /// reduced modulo `V_{m+2}`: each slice term contributes its factor
    /// times the shifted basis element.
    pub forced_part: BasisVector,
    /// True iff every factor is nonzero, forcing the degree-`m`
    /// coefficients of any solution to vanish.
    pub forced_zero: bool,
    /// The input with its degree-`m` slice removed when `forced_zero`,
    /// otherwise the input unchanged.
    pub updated: BasisVector,
}

/// The factor and index shift applied to one degree-`m` basis term by the
/// twisted commutator.
fn step_factor(case: DescentCase, t: &BasisTerm, q: &Rat, qp: &Rat) -> (Rat, BasisTerm) {
    let deg = (t.k + t.l) as i64;
    match case {
        DescentCase::Alpha => {
            let shifted = BasisTerm::new(t.j + 1, t.k, t.l);
            if t.j >= 0 {
                (rat_pow(qp, deg) - q, shifted)
            } else {
                (Rat::one() - q * rat_pow(qp, -deg), shifted)
            }
        }
        DescentCase::AlphaStar => {
            let shifted = BasisTerm::new(t.j - 1, t.k, t.l);
            if t.j <= 0 {
                (Rat::one() - q * rat_pow(qp, deg), shifted)
            } else {
                (rat_pow(qp, -deg) - q, shifted)
            }
        }
    }
}

/// Applies one descent step at level `m`: reads off the vanishing factor
/// for every support term of degree exactly `m` and cross-checks the whole
/// table against the twisted commutator computed independently by basis
/// multiplication (the two must agree modulo `V_{m+2}`).
pub fn descent_step(y: &BasisVector, m: u64, q: &Rat, case: DescentCase) -> Result<DescentStep> {
    validate_source_param(q)?;
    let qp = fixed_target_param(y.qmode())?;
    if !y.filtration_degree().at_least(m) {
        return Err(Error::FiltrationViolation {
            required: m,
            found: y.filtration_degree().to_string(),
        });
    }

    let slice = y.reduce_mod(m + 1);
    let mut conditions = Vec::new();
    let mut forced_part = BasisVector::zero(y.qmode().clone())?;
    for (t, c) in slice.terms() {
        let (factor, shifted) = step_factor(case, t, q, &qp);
        forced_part.add_term(shifted, c * &Scalar::from_rat(factor.clone()))?;
        conditions.push(DescentCondition { term: *t, factor });
    }

    // Independent route: the twisted commutator of the slice, computed by
    // basis multiplication, must reproduce the factor table mod V_{m+2}.
    let shift_gen = match case {
        DescentCase::Alpha => BasisTerm::new(1, 0, 0),
        DescentCase::AlphaStar => BasisTerm::new(-1, 0, 0),
    };
    let gen = BasisVector::basis_term(y.qmode().clone(), shift_gen)?;
    let twisted = slice
        .basis_product(&gen)?
        .checked_sub(&gen.basis_product(&slice)?.scale(&Scalar::from_rat(q.clone()))?)?;
    debug_assert_eq!(
        twisted.reduce_mod(m + 2),
        forced_part,
        "factor table must match the basis-product expansion"
    );

    let forced_zero = conditions.iter().all(|c| !c.factor.is_zero());
    let updated = if forced_zero {
        y.project_above(m + 1)
    } else {
        y.clone()
    };
    Ok(DescentStep {
        m,
        case,
        conditions,
        forced_part,
        forced_zero,
        updated,
    })
}

// ---------------------------------------------------------------------------
// Iterated descent
// ---------------------------------------------------------------------------

/// Result of running the descent to a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub enum DescentOutcome {
    /// Every step up to the requested depth forced its slice to vanish:
    /// any solution supported in the tested region with degree ≤ depth is
    /// zero. `residual` is the untested part of the support (degree >
    /// depth); `fully_annihilated` records that it is empty.
    ZeroCertificate {
        steps: Vec<DescentStep>,
        residual: BasisVector,
        fully_annihilated: bool,
    },
    /// A zero factor appeared at level `m` for `term`: the descent cannot
    /// force that coefficient and stops.
    Stalled {
        m: u64,
        term: BasisTerm,
        steps: Vec<DescentStep>,
    },
}

impl DescentOutcome {
    pub fn is_zero_certificate(&self) -> bool {
        matches!(self, DescentOutcome::ZeroCertificate { .. })
    }

    pub fn steps(&self) -> &[DescentStep] {
        match self {
            DescentOutcome::ZeroCertificate { steps, .. } => steps,
            DescentOutcome::Stalled { steps, .. } => steps,
        }
    }
}

/// The full `z_0` image alongside its unitary coefficient, used to verify
/// the remainder bookkeeping of each descent step against the complete
/// image rather than the bare shift generator.
#[derive(Clone, Copy, Debug)]
pub struct ImageContext<'a> {
    pub image: &'a BasisVector,
    pub lambda: &'a Scalar,
}

/// Runs [`descent_step`] for `m = 1..=depth`, feeding each step's updated
/// vector into the next. Stops at the first zero factor.
pub fn run_descent(
    y: &BasisVector,
    q: &Rat,
    case: DescentCase,
    depth: u64,
) -> Result<DescentOutcome> {
    run_descent_with_image(y, q, case, depth, None)
}

/// As [`run_descent`], additionally verifying at every level that the
/// twisted commutator taken with the **full** image `w = λ·(α or α*) + x`
/// differs from `λ` times the forced part only inside `V_{m+1}` — the
/// exact bookkeeping behind discarding the remainder terms, checked on the
/// concrete vectors instead of being assumed.
pub fn run_descent_with_image(
    y: &BasisVector,
    q: &Rat,
    case: DescentCase,
    depth: u64,
    image: Option<ImageContext<'_>>,
) -> Result<DescentOutcome> {
    if !y.filtration_degree().at_least(1) {
        return Err(Error::FiltrationViolation {
            required: 1,
            found: y.filtration_degree().to_string(),
        });
    }
    let mut current = y.clone();
    let mut steps = Vec::new();
    for m in 1..=depth {
        let step = descent_step(&current, m, q, case)?;
        if let Some(ctx) = &image {
            verify_full_image_consistency(&current, &step, ctx, q, m)?;
        }
        if !step.forced_zero {
            let term = step
                .conditions
                .iter()
                .find(|c| c.factor.is_zero())
                .map(|c| c.term)
                .expect("a step that is not forced has a zero factor");
            steps.push(step);
            return Ok(DescentOutcome::Stalled { m, term, steps });
        }
        current = step.updated.clone();
        steps.push(step);
    }
    Ok(DescentOutcome::ZeroCertificate {
        steps,
        fully_annihilated: current.is_zero(),
        residual: current,
    })
}

/// Checks `y·w − q·w·y ≡ λ·forced_part (mod V_{m+1})` for the full image
/// `w`: the difference collects exactly the remainder cross terms
/// `y·x − q·x·y` (degree ≥ m+1) plus the slice corrections (degree ≥ m+1
/// as well), so anything of lower degree exposes broken bookkeeping.
fn verify_full_image_consistency(
    y: &BasisVector,
    step: &DescentStep,
    ctx: &ImageContext<'_>,
    q: &Rat,
    m: u64,
) -> Result<()> {
    let w = ctx.image;
    let total = y
        .basis_product(w)?
        .checked_sub(&w.basis_product(y)?.scale(&Scalar::from_rat(q.clone()))?)?;
    let difference = total.checked_sub(&step.forced_part.scale(ctx.lambda)?)?;
    if difference.filtration_degree().at_least(m + 1) {
        Ok(())
    } else {
        Err(Error::FiltrationViolation {
            required: m + 1,
            found: difference.filtration_degree().to_string(),
        })
    }
}

// ---------------------------------------------------------------------------
// The full obstruction pipeline
// ---------------------------------------------------------------------------

/// Stage-4 verdict for one generator image.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorVerdict {
    /// The image lies in `V_1` and the descent ran.
    Descent(DescentOutcome),
    /// The image has a nonzero circle part, so it cannot lie in the
    /// commutator ideal and the descent does not apply to it.
    CirclePartNonzero { circle_part: LaurentPoly },
}

/// Stage-4 record for the generator `z_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorDescent {
    pub index: u32,
    pub verdict: GeneratorVerdict,
}

/// Overall conclusion of the obstruction pipeline: the first stage that
/// breaks the argument, or the certified obstruction.
#[derive(Clone, Debug, PartialEq)]
pub enum ObstructionConclusion {
    /// All stages passed: every candidate image of `z_1..z_n` is certified
    /// zero to the requested depth, so the candidate map cannot be onto —
    /// the circle quotient is commutative while the target algebra is not.
    Obstructed { depth: u64 },
    /// Stage 1: the images violate a defining relation.
    NotAHomomorphism { relation: String },
    /// Stage 2: `q = q'^m`, so the descent factors may vanish and no
    /// obstruction is certified (an isomorphism may exist, as it does for
    /// `q = q'`).
    PowerRelation { m: u64 },
    /// Stage 3: the `z_0` image is not a unitary shift `λα + x` or
    /// `λα* + x`.
    ImageNotUnitaryShift,
    /// Stage 4: the descent stalled or left untested support.
    DescentIncomplete { generator: u32, detail: String },
}

impl core::fmt::Display for ObstructionConclusion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ObstructionConclusion::Obstructed { depth } => write!(
                f,
                "images of every positive-index generator are certified zero to depth {depth}: \
                 a map with these images factors through the circle quotient, which is \
                 commutative, while the target algebra is not — no surjection exists"
            ),
            ObstructionConclusion::NotAHomomorphism { relation } => {
                write!(f, "the images violate the defining relation {relation}")
            }
            ObstructionConclusion::PowerRelation { m } => write!(
                f,
                "the source parameter satisfies q = q'^{m}; the descent factors may vanish \
                 and no obstruction is certified"
            ),
            ObstructionConclusion::ImageNotUnitaryShift => write!(
                f,
                "the z0 image does not decompose as a unit multiple of the shift generator \
                 plus a filtration remainder"
            ),
            ObstructionConclusion::DescentIncomplete { generator, detail } => {
                write!(f, "descent for the z{generator} image is incomplete: {detail}")
            }
        }
    }
}

/// The full four-stage report of [`verify_nonvanishing_obstruction`].
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub depth: u64,
    /// Stage 1: relation check of the candidate images.
    pub hom: HomVerdict,
    /// Stage 2: whether `q = q'^m`.
    pub power: Option<u64>,
    /// Stage 3: unitary-shift decomposition of the `z_0` image.
    pub decomposition: ImageForm,
    /// Stage 4: descent outcome per generator `z_i`, `i ≥ 1`.
    pub descents: Vec<GeneratorDescent>,
    pub conclusion: ObstructionConclusion,
}

/// Runs the complete obstruction pipeline against a candidate map into the
/// arity-1 basis algebra: (1) relation check, (2) parameter power test,
/// (3) unitary-shift decomposition of the `z_0` image, (4) bounded-depth
/// descent on every `z_i` image with `i ≥ 1`. All four stages always run
/// and are reported; the conclusion names the first failing stage, or
/// certifies the obstruction when none fails.
pub fn verify_nonvanishing_obstruction(spec: &HomSpec, depth: u64) -> Result<ObstructionReport> {
    spec.validate()?;
    let qp = match &spec.target {
        HomTarget::Basis { qmode } => fixed_target_param(qmode)?,
        _ => {
            return Err(Error::InvalidRange {
                what: String::from(
                    "the obstruction pipeline requires a basis-algebra target",
                ),
            })
        }
    };
    let q = match &spec.source_q {
        QMode::Fixed(r) => {
            validate_source_param(r)?;
            r.clone()
        }
        QMode::Symbolic => {
            return Err(Error::InvalidRange {
                what: String::from(
                    "the obstruction pipeline requires a fixed rational source parameter",
                ),
            })
        }
    };
    let images: Vec<&BasisVector> = spec
        .images
        .iter()
        .map(|img| match img {
            TargetElem::Basis(b) => Ok(b),
            _ => Err(Error::ModeMismatch {
                left: String::from("basis-vector"),
                right: String::from("non-basis image"),
            }),
        })
        .collect::<Result<_>>()?;

    // Stage 1: relation check.
    let hom = check_homomorphism(spec)?;

    // Stage 2: parameter power test.
    let power = is_power(&q, &qp)?;

    // Stage 3: decomposition of the z0 image.
    let decomposition = decompose_unitary_image(images[0])?;

    // Stage 4: descent per positive-index generator, with the full-image
    // bookkeeping check when stage 3 produced a decomposition.
    let (case, image_ctx) = match &decomposition {
        ImageForm::Shift { case, lambda, .. } => (
            *case,
            Some(ImageContext {
                image: images[0],
                lambda,
            }),
        ),
        ImageForm::NotOfForm { .. } => (DescentCase::Alpha, None),
    };
    let mut descents = Vec::new();
    for i in 1..=spec.source_arity {
        let y = images[i as usize];
        let verdict = if y.filtration_degree().at_least(1) {
            GeneratorVerdict::Descent(run_descent_with_image(y, &q, case, depth, image_ctx)?)
        } else {
            GeneratorVerdict::CirclePartNonzero {
                circle_part: LaurentPoly::from_terms(y.circle_coeffs()),
            }
        };
        descents.push(GeneratorDescent { index: i, verdict });
    }

    // Conclusion: first failing stage in pipeline order.
    let conclusion = if let HomVerdict::Violated(violations) = &hom {
        ObstructionConclusion::NotAHomomorphism {
            relation: violations[0].relation.clone(),
        }
    } else if let Some(m) = power {
        ObstructionConclusion::PowerRelation { m }
    } else if matches!(decomposition, ImageForm::NotOfForm { .. }) {
        ObstructionConclusion::ImageNotUnitaryShift
    } else if let Some((generator, detail)) = descents.iter().find_map(|d| {
        let detail = match &d.verdict {
            GeneratorVerdict::Descent(DescentOutcome::ZeroCertificate {
                fully_annihilated: true,
                ..
            }) => None,
            GeneratorVerdict::Descent(DescentOutcome::ZeroCertificate {
                residual, ..
            }) => Some(format!(
                "support of degree above {depth} remains untested: {residual}"
            )),
            GeneratorVerdict::Descent(DescentOutcome::Stalled { m, term, .. }) => {
                Some(format!("stalled at level {m} on {term}"))
            }
            GeneratorVerdict::CirclePartNonzero { circle_part } => {
                Some(format!("nonzero circle part {circle_part}"))
            }
        };
        detail.map(|detail| (d.index, detail))
    }) {
        ObstructionConclusion::DescentIncomplete { generator, detail }
    } else {
        ObstructionConclusion::Obstructed { depth }
    };

    Ok(ObstructionReport {
        depth,
        hom,
        power,
        decomposition,
        descents,
        conclusion,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
