//! JSON schemas for every element kind and report the tool emits, with
//! exact conversions to and from the engine types.
//!
//! Scalars are carried as their display strings (exact rational-function
//! syntax, re-parsed on input), words as arrays of `[index, starred]`
//! pairs, and deformation parameters as `"symbolic"` or a rational string
//! such as `"1/3"`. Every element schema round-trips: `from_core` followed
//! by `to_core` reproduces the element exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qsphere_core::coeffq::{parse_rat, rat_text, QMode, Scalar};
use qsphere_core::descent::{
    DescentCase, DescentOutcome, DescentStep, GeneratorVerdict, ImageForm, ObstructionConclusion,
    ObstructionReport,
};
use qsphere_core::ncpoly::{Letter, NCPoly, Word};
use qsphere_core::parser::{parse_poly, parse_scalar, ExprContext};
use qsphere_core::quotients::{
    CommutatorTerm, HomSpec, HomTarget, HomVerdict, IdealCertificate, LaurentPoly, TargetElem,
    UnitaryVerdict,
};
use qsphere_core::rewrite::ConfluenceReport;
use qsphere_core::suq2::{BasisTerm, BasisVector, FiltrationDegree};

use crate::{CliError, CliResult};

// ---------------------------------------------------------------------------
// Parameters and scalars
// ---------------------------------------------------------------------------

pub fn qmode_text(qm: &QMode) -> String {
    match qm {
        QMode::Symbolic => "symbolic".to_string(),
        QMode::Fixed(r) => rat_text(r),
    }
}

/// Parses `"symbolic"` or a rational in `[0, 1)`.
pub fn parse_qmode(s: &str) -> CliResult<QMode> {
    let qm = if s.trim() == "symbolic" {
        QMode::Symbolic
    } else {
        QMode::Fixed(parse_rat(s.trim())?)
    };
    qm.validate()?;
    Ok(qm)
}

fn scalar_text(s: &Scalar) -> String {
    s.to_string()
}

// ---------------------------------------------------------------------------
// Elements: word polynomials, basis vectors, Laurent polynomials
// ---------------------------------------------------------------------------

/// One generator occurrence as `[index, starred]`.
pub type LetterDto = (u32, bool);
pub type WordDto = Vec<LetterDto>;

fn word_to_dto(w: &Word) -> WordDto {
    w.letters().iter().map(|l| (l.index, l.starred)).collect()
}

fn word_from_dto(w: &WordDto, arity: u32) -> CliResult<Word> {
    let mut letters = Vec::with_capacity(w.len());
    for &(index, starred) in w {
        if index > arity {
            return Err(CliError::Usage(format!(
                "letter index {index} exceeds arity {arity}"
            )));
        }
        letters.push(if starred {
            Letter::starred(index)
        } else {
            Letter::plain(index)
        });
    }
    Ok(Word::from_letters(letters))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyTermDto {
    pub coeff: String,
    pub word: WordDto,
}

/// A polynomial in the generators `z0..zn` and their adjoints.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyDto {
    pub n: u32,
    pub q: String,
    pub terms: Vec<PolyTermDto>,
}

impl PolyDto {
    pub fn from_core(p: &NCPoly, qmode: &QMode) -> PolyDto {
        PolyDto {
            n: p.arity(),
            q: qmode_text(qmode),
            terms: p
                .terms()
                .map(|(w, c)| PolyTermDto {
                    coeff: scalar_text(c),
                    word: word_to_dto(w),
                })
                .collect(),
        }
    }

    pub fn to_core(&self) -> CliResult<(NCPoly, QMode)> {
        let qmode = parse_qmode(&self.q)?;
        let mut p = NCPoly::zero(self.n);
        for t in &self.terms {
            let w = word_from_dto(&t.word, self.n)?;
            p.add_term(w, parse_scalar(&t.coeff, true)?);
        }
        Ok((p, qmode))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BasisTermDto {
    pub j: i64,
    pub k: u64,
    pub l: u64,
    pub coeff: String,
}

/// A vector in the canonical basis of the arity-1 algebra.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BasisDto {
    pub q: String,
    pub terms: Vec<BasisTermDto>,
}

impl BasisDto {
    pub fn from_core(v: &BasisVector) -> BasisDto {
        BasisDto {
            q: qmode_text(v.qmode()),
            terms: v
                .terms()
                .map(|(t, c)| BasisTermDto {
                    j: t.j,
                    k: t.k,
                    l: t.l,
                    coeff: scalar_text(c),
                })
                .collect(),
        }
    }

    pub fn to_core(&self) -> CliResult<BasisVector> {
        let qmode = parse_qmode(&self.q)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok((
                    BasisTerm::new(t.j, t.k, t.l),
                    parse_scalar(&t.coeff, true)?,
                ))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(BasisVector::from_terms(qmode, terms)?)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LaurentTermDto {
    pub exp: i64,
    pub coeff: String,
}

/// A Laurent polynomial in the circle unitary `u`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LaurentDto {
    pub terms: Vec<LaurentTermDto>,
}

impl LaurentDto {
    pub fn from_core(p: &LaurentPoly) -> LaurentDto {
        LaurentDto {
            terms: p
                .terms()
                .iter()
                .map(|(e, c)| LaurentTermDto {
                    exp: *e,
                    coeff: scalar_text(c),
                })
                .collect(),
        }
    }

    pub fn to_core(&self) -> CliResult<LaurentPoly> {
        let mut p = LaurentPoly::zero();
        for t in &self.terms {
            p.add_term(t.exp, parse_scalar(&t.coeff, true)?);
        }
        Ok(p)
    }
}

// ---------------------------------------------------------------------------
// Simple command reports
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NormalizeDto {
    pub input: String,
    pub normal_form: PolyDto,
    /// Human-readable rendering of the normal form.
    pub text: String,
    /// Number of rewrite applications performed.
    pub steps: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BasisCmdDto {
    pub input: String,
    pub basis: BasisDto,
    pub text: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FiltrationDto {
    pub input: String,
    /// `null` encodes the infinite degree of the zero vector.
    pub degree: Option<u64>,
    pub text: String,
}

pub fn filtration_to_dto(input: &str, d: FiltrationDegree) -> FiltrationDto {
    FiltrationDto {
        input: input.to_string(),
        degree: match d {
            FiltrationDegree::Finite(m) => Some(m),
            FiltrationDegree::Infinite => None,
        },
        text: d.to_string(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CircleDto {
    pub input: String,
    pub image: LaurentDto,
    pub text: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct UnitaryDto {
    pub input: String,
    pub unitary: bool,
    /// Unit coefficient when unitary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// Power of `u` when unitary; witness exponent otherwise.
    pub exponent: i64,
    /// Witness coefficient of `a·a* − 1` at `exponent` when not unitary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect_coeff: Option<String>,
    /// Full brute-force expansion of `a·a* − 1`.
    pub defect: LaurentDto,
}

pub fn unitary_to_dto(input: &str, verdict: &UnitaryVerdict, defect: &LaurentPoly) -> UnitaryDto {
    match verdict {
        UnitaryVerdict::Unitary { lambda, exponent } => UnitaryDto {
            input: input.to_string(),
            unitary: true,
            lambda: Some(scalar_text(lambda)),
            exponent: *exponent,
            defect_coeff: None,
            defect: LaurentDto::from_core(defect),
        },
        UnitaryVerdict::NotUnitary { exponent, coeff } => UnitaryDto {
            input: input.to_string(),
            unitary: false,
            lambda: None,
            exponent: *exponent,
            defect_coeff: Some(scalar_text(coeff)),
            defect: LaurentDto::from_core(defect),
        },
    }
}

// ---------------------------------------------------------------------------
// Confluence report
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CriticalPairDto {
    pub overlap: String,
    pub left_rule: String,
    pub right_rule: String,
    pub left_nf: String,
    pub right_nf: String,
    pub joined: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ConfluenceDto {
    pub n: u32,
    pub q: String,
    pub schema_bound: usize,
    pub pairs_checked: usize,
    pub all_joined: bool,
    /// Only the failures are listed in full.
    pub unjoined: Vec<CriticalPairDto>,
}

pub fn confluence_to_dto(report: &ConfluenceReport, qmode: &QMode) -> ConfluenceDto {
    ConfluenceDto {
        n: report.arity,
        q: qmode_text(qmode),
        schema_bound: report.schema_bound,
        pairs_checked: report.pairs.len(),
        all_joined: report.all_joined,
        unjoined: report
            .unjoined()
            .map(|p| CriticalPairDto {
                overlap: p.overlap.to_string(),
                left_rule: p.left_rule.clone(),
                right_rule: p.right_rule.clone(),
                left_nf: p.left_nf.to_string(),
                right_nf: p.right_nf.to_string(),
                joined: p.joined,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Ideal certificates
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CommutatorTermDto {
    pub coeff: String,
    pub pre: WordDto,
    /// Left and right commutator entries as polynomial expressions.
    pub left: String,
    pub right: String,
    pub post: WordDto,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CertificateDto {
    pub n: u32,
    pub q: String,
    pub target: String,
    pub terms: Vec<CommutatorTermDto>,
    /// Result of re-evaluating the certificate against the target.
    pub verified: bool,
}

pub fn certificate_to_dto(
    cert: &IdealCertificate,
    qmode: &QMode,
    verified: bool,
) -> CertificateDto {
    CertificateDto {
        n: cert.arity(),
        q: qmode_text(qmode),
        target: cert.target().to_string(),
        terms: cert
            .terms()
            .iter()
            .map(|t: &CommutatorTerm| CommutatorTermDto {
                coeff: scalar_text(&t.coeff),
                pre: word_to_dto(&t.pre),
                left: t.left.to_string(),
                right: t.right.to_string(),
                post: word_to_dto(&t.post),
            })
            .collect(),
        verified,
    }
}

// ---------------------------------------------------------------------------
// Homomorphism specs and reports
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SourceDto {
    pub n: u32,
    pub q: String,
}

/// On-disk description of a candidate *-homomorphism. The generator images
/// are expression strings parsed in the target algebra's syntax: basis
/// terms `e(j,k,l)` for `"suq2"`, generator words for `"sphere"`, Laurent
/// polynomials in `u` for `"circle"`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HomSpecDto {
    pub source: SourceDto,
    /// `"suq2"`, `"sphere"`, or `"circle"`.
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_q: Option<String>,
    /// Target arity for `"sphere"`; defaults to the source arity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_n: Option<u32>,
    /// Keys `"z0"`, `"z1"`, …: one image per plain generator.
    pub images: BTreeMap<String, String>,
}

impl HomSpecDto {
    pub fn to_core(&self) -> CliResult<HomSpec> {
        let source_q = parse_qmode(&self.source.q)?;
        let n = self.source.n;

        let require_target_q = || -> CliResult<QMode> {
            match &self.target_q {
                Some(s) => parse_qmode(s),
                None => Err(CliError::Usage(format!(
                    "target \"{}\" requires a \"target_q\" parameter",
                    self.target
                ))),
            }
        };

        // Images in generator order z0..zn; every key must be present.
        let mut image_srcs = Vec::with_capacity(n as usize + 1);
        for i in 0..=n {
            let key = format!("z{i}");
            match self.images.get(&key) {
                Some(src) => image_srcs.push(src.as_str()),
                None => {
                    return Err(CliError::Usage(format!(
                        "missing image for generator {key}"
                    )))
                }
            }
        }
        if self.images.len() != n as usize + 1 {
            let extra: Vec<&str> = self
                .images
                .keys()
                .map(String::as_str)
                .filter(|k| {
                    k.strip_prefix('z')
                        .and_then(|d| d.parse::<u32>().ok())
                        .is_none_or(|i| i > n)
                })
                .collect();
            return Err(CliError::Usage(format!(
                "unexpected image keys beyond z0..z{n}: {}",
                extra.join(", ")
            )));
        }

        let (target, images) = match self.target.as_str() {
            "suq2" => {
                let qmode = require_target_q()?;
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
                (HomTarget::Basis { qmode }, images)
            }
            "sphere" => {
                let qmode = require_target_q()?;
                let arity = self.target_n.unwrap_or(n);
                let ctx = ExprContext::new(arity, true);
                let images = image_srcs
                    .iter()
                    .map(|s| Ok(TargetElem::Poly(parse_poly(s, &ctx)?)))
                    .collect::<CliResult<Vec<_>>>()?;
                (HomTarget::Sphere { arity, qmode }, images)
            }
            "circle" => {
                let images = image_srcs
                    .iter()
                    .map(|s| Ok(TargetElem::Laurent(LaurentPoly::parse(s, true)?)))
                    .collect::<CliResult<Vec<_>>>()?;
                (HomTarget::Circle, images)
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown target \"{other}\": expected \"suq2\", \"sphere\", or \"circle\""
                )))
            }
        };

        let spec = HomSpec {
            source_arity: n,
            source_q,
            target,
            images,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ViolationDto {
    pub relation: String,
    /// Residue in the target algebra, as an expression string.
    pub residue: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct HomReportDto {
    pub holds: bool,
    pub violations: Vec<ViolationDto>,
}

pub fn hom_verdict_to_dto(v: &HomVerdict) -> HomReportDto {
    match v {
        HomVerdict::Holds => HomReportDto {
            holds: true,
            violations: Vec::new(),
        },
        HomVerdict::Violated(vs) => HomReportDto {
            holds: false,
            violations: vs
                .iter()
                .map(|hv| ViolationDto {
                    relation: hv.relation.clone(),
                    residue: hv.residue.to_string(),
                })
                .collect(),
        },
    }
}

// ---------------------------------------------------------------------------
// Descent reports
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ConditionDto {
    pub j: i64,
    pub k: u64,
    pub l: u64,
    /// The vanishing factor as an exact rational string.
    pub factor: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DescentStepDto {
    pub m: u64,
    pub conditions: Vec<ConditionDto>,
    pub forced_zero: bool,
    /// Image of the degree-`m` slice under the twisted commutator,
    /// reduced modulo the next-but-one filtration level.
    pub forced_part: BasisDto,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct StallDto {
    pub m: u64,
    pub term: BasisTermDto,
}

/// Outcome part shared by the standalone command and the pipeline report.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DescentOutcomeDto {
    /// `"zero-certificate"` or `"stalled"`.
    pub outcome: String,
    pub steps: Vec<DescentStepDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<BasisDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fully_annihilated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stalled_at: Option<StallDto>,
}

fn step_to_dto(s: &DescentStep) -> DescentStepDto {
    DescentStepDto {
        m: s.m,
        conditions: s
            .conditions
            .iter()
            .map(|c| ConditionDto {
                j: c.term.j,
                k: c.term.k,
                l: c.term.l,
                factor: rat_text(&c.factor),
            })
            .collect(),
        forced_zero: s.forced_zero,
        forced_part: BasisDto::from_core(&s.forced_part),
    }
}

pub fn descent_outcome_to_dto(o: &DescentOutcome) -> DescentOutcomeDto {
    match o {
        DescentOutcome::ZeroCertificate {
            steps,
            residual,
            fully_annihilated,
        } => DescentOutcomeDto {
            outcome: "zero-certificate".to_string(),
            steps: steps.iter().map(step_to_dto).collect(),
            residual: Some(BasisDto::from_core(residual)),
            fully_annihilated: Some(*fully_annihilated),
            stalled_at: None,
        },
        DescentOutcome::Stalled { m, term, steps } => DescentOutcomeDto {
            outcome: "stalled".to_string(),
            steps: steps.iter().map(step_to_dto).collect(),
            residual: None,
            fully_annihilated: None,
            stalled_at: Some(StallDto {
                m: *m,
                term: BasisTermDto {
                    j: term.j,
                    k: term.k,
                    l: term.l,
                    coeff: "1".to_string(),
                },
            }),
        },
    }
}

/// Full report of the standalone `descent` command.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DescentRunDto {
    pub q: String,
    pub qprime: String,
    /// `"alpha"` or `"alpha-star"`.
    pub case: String,
    pub depth: u64,
    pub input: BasisDto,
    #[serde(flatten)]
    pub result: DescentOutcomeDto,
}

// ---------------------------------------------------------------------------
// Obstruction pipeline report
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DecompositionDto {
    /// `"shift"` or `"not-of-form"`.
    pub form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<BasisDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle_part: Option<LaurentDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GeneratorDescentDto {
    pub generator: u32,
    /// `"descent"` or `"circle-part-nonzero"`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentOutcomeDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle_part: Option<LaurentDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ConclusionDto {
    /// `"obstructed"`, `"not-a-homomorphism"`, `"power-relation"`,
    /// `"image-not-unitary-shift"`, or `"descent-incomplete"`.
    pub kind: String,
    /// Human-readable statement of the conclusion.
    pub detail: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ObstructionDto {
    pub depth: u64,
    pub hom: HomReportDto,
    /// Witness `m` with `q = q'^m`, when one exists.
    pub power: Option<u64>,
    pub decomposition: DecompositionDto,
    pub descents: Vec<GeneratorDescentDto>,
    pub conclusion: ConclusionDto,
    /// Whether the obstruction was certified (conclusion `"obstructed"`).
    pub obstructed: bool,
}

pub fn case_text(c: DescentCase) -> String {
    c.to_string()
}

fn decomposition_to_dto(d: &ImageForm) -> DecompositionDto {
    match d {
        ImageForm::Shift {
            case,
            lambda,
            remainder,
        } => DecompositionDto {
            form: "shift".to_string(),
            case: Some(case_text(*case)),
            lambda: Some(scalar_text(lambda)),
            remainder: Some(BasisDto::from_core(remainder)),
            circle_part: None,
        },
        ImageForm::NotOfForm { circle_part } => DecompositionDto {
            form: "not-of-form".to_string(),
            case: None,
            lambda: None,
            remainder: None,
            circle_part: Some(LaurentDto::from_core(circle_part)),
        },
    }
}

pub fn obstruction_to_dto(r: &ObstructionReport) -> ObstructionDto {
    let conclusion_kind = match &r.conclusion {
        ObstructionConclusion::Obstructed { .. } => "obstructed",
        ObstructionConclusion::NotAHomomorphism { .. } => "not-a-homomorphism",
        ObstructionConclusion::PowerRelation { .. } => "power-relation",
        ObstructionConclusion::ImageNotUnitaryShift => "image-not-unitary-shift",
        ObstructionConclusion::DescentIncomplete { .. } => "descent-incomplete",
    };
    ObstructionDto {
        depth: r.depth,
        hom: hom_verdict_to_dto(&r.hom),
        power: r.power,
        decomposition: decomposition_to_dto(&r.decomposition),
        descents: r
            .descents
            .iter()
            .map(|d| match &d.verdict {
                GeneratorVerdict::Descent(o) => GeneratorDescentDto {
                    generator: d.index,
                    kind: "descent".to_string(),
                    descent: Some(descent_outcome_to_dto(o)),
                    circle_part: None,
                },
                GeneratorVerdict::CirclePartNonzero { circle_part } => GeneratorDescentDto {
                    generator: d.index,
                    kind: "circle-part-nonzero".to_string(),
                    descent: None,
                    circle_part: Some(LaurentDto::from_core(circle_part)),
                },
            })
            .collect(),
        conclusion: ConclusionDto {
            kind: conclusion_kind.to_string(),
            detail: r.conclusion.to_string(),
        },
        obstructed: matches!(r.conclusion, ObstructionConclusion::Obstructed { .. }),
    }
}

// ---------------------------------------------------------------------------
// Suite reports
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SuiteReportDto {
    pub suite: String,
    /// `"PASS"`, `"FAIL"`, or `"SKIPPED"`.
    pub verdict: String,
    pub checks: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub millis: u128,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SuiteRunDto {
    pub reports: Vec<SuiteReportDto>,
    pub all_pass: bool,
}
