//! Quotients of the sphere algebras and maps between them.
//!
//! Three constructions live here, all exact:
//!
//! * **Circle quotient.** Dividing the arity-`n` sphere algebra by the
//!   two-sided ideal generated by all commutators kills every generator of
//!   index ≥ 1 and makes `z_0` a unitary; what remains is the Laurent
//!   algebra of a circle, with `z_0 ↦ u`. [`LaurentPoly`] models that
//!   quotient, [`project_to_circle`] computes the quotient map on normal
//!   forms, and [`character_eval`] composes it with evaluation at a unit
//!   scalar.
//! * **Commutator-ideal certificates.** Membership of an element in the
//!   commutator ideal is witnessed, not asserted: an [`IdealCertificate`]
//!   is a linear combination of framed commutators `c · A·[x,y]·B` whose
//!   expansion can be re-normalized and compared against the target by
//!   [`IdealCertificate::verify`]. [`commutator_ideal_certificate`]
//!   assembles certificates for the standard generators of the ideal and
//!   for arbitrary combinations of them.
//! * **Homomorphism checking.** A [`HomSpec`] names a generator-image
//!   assignment into a sphere algebra, the arity-1 basis algebra, or the
//!   circle; [`check_homomorphism`] substitutes the images into every
//!   defining relation of the source and reports each nonzero residue in
//!   canonical form.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::coeffq::{QMode, Scalar};
use crate::error::Error;
use crate::ncpoly::{Letter, NCPoly, Word};
use crate::Result;
use crate::parser;
use crate::rewrite::{defining_relations, RuleSet};
use crate::suq2::{BasisTerm, BasisVector};

// ---------------------------------------------------------------------------
// Laurent polynomials on the circle
// ---------------------------------------------------------------------------

/// A Laurent polynomial `Σ_j c_j u^j` in one unitary variable `u`
/// (`u* = u^{-1}`), with [`Scalar`] coefficients.
///
/// This is the coordinate algebra of the circle that the sphere algebras
/// project onto; see [`project_to_circle`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly::default()
    }

    pub fn one() -> LaurentPoly {
        LaurentPoly::unit_power(0)
    }

    /// The monomial `u^j`.
    pub fn unit_power(j: i64) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        terms.insert(j, Scalar::one());
        LaurentPoly { terms }
    }

    /// Builds from `(exponent, coefficient)` pairs, merging duplicates and
    /// dropping zeros.
    pub fn from_terms(it: impl IntoIterator<Item = (i64, Scalar)>) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (j, c) in it {
            p.add_term(j, c);
        }
        p
    }

    /// Parses expressions such as `-u^-2 + 7 + (3/5+(4/5)i) u`.
    pub fn parse(src: &str, gaussian: bool) -> Result<LaurentPoly> {
        let raw = parser::parse_laurent_terms(src, &parser::ExprContext::new(0, gaussian))?;
        Ok(LaurentPoly { terms: raw.terms })
    }

    pub fn terms(&self) -> &BTreeMap<i64, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, j: i64) -> Scalar {
        self.terms.get(&j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c·u^j` in place, cancelling to zero where needed.
    pub fn add_term(&mut self, j: i64, c: Scalar) {
        let sum = match self.terms.remove(&j) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(j, sum);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (j, c) in &other.terms {
            out.add_term(*j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(j, c)| (*j, -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> LaurentPoly {
        if s.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(j, c)| (*j, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (j1, c1) in &self.terms {
            for (j2, c2) in &other.terms {
                out.add_term(j1 + j2, c1 * c2);
            }
        }
        out
    }

    /// The involution determined by `u* = u^{-1}` and complex conjugation
    /// of coefficients.
    pub fn star(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(j, c)| (-j, c.conj())).collect(),
        }
    }

    /// Evaluates at `u = λ` for a constant unit scalar `λ` (`λ·conj(λ) = 1`);
    /// any other evaluation point is rejected with [`Error::NotUnit`].
    pub fn eval_at_unit(&self, lambda: &Scalar) -> Result<Scalar> {
        require_constant_unit(lambda)?;
        let mut acc = Scalar::zero();
        for (j, c) in &self.terms {
            acc = &acc + &(c * &lambda.pow(*j)?);
        }
        Ok(acc)
    }
}

impl core::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", parser::format_laurent_terms(&self.terms))
    }
}

fn require_constant_unit(lambda: &Scalar) -> Result<()> {
    if lambda.is_constant() && lambda.is_unit() {
        Ok(())
    } else {
        Err(Error::NotUnit {
            value: lambda.to_string(),
        })
    }
}

// ---------------------------------------------------------------------------
// Unitarity of Laurent polynomials
// ---------------------------------------------------------------------------

/// Outcome of the exact unitarity test for a Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitaryVerdict {
    /// The element is `λ·u^j` with `λ·conj(λ) = 1`, hence `a·a* = 1`.
    Unitary { lambda: Scalar, exponent: i64 },
    /// The element is not unitary; `coeff` is the (nonzero) coefficient of
    /// `u^exponent` in `a·a* − 1`, exhibiting the failure.
    NotUnitary { exponent: i64, coeff: Scalar },
}

/// The defect `a·a* − 1`, which vanishes exactly when `a` is unitary.
/// Computed by full expansion; serves as an independent cross-check of
/// [`is_unitary_laurent`].
pub fn unitary_defect(a: &LaurentPoly) -> LaurentPoly {
    a.mul(&a.star()).sub(&LaurentPoly::one())
}

/// Decides exactly whether `a·a* = 1`.
///
/// A Laurent polynomial is unitary iff it is a single term `λ·u^j` with
/// `λ·conj(λ) = 1`: for a multi-term element with extreme exponents
/// `j_max > j_min`, the coefficient of `u^{j_max − j_min}` in `a·a*` is the
/// product of two nonzero coefficients, hence nonzero, and its exponent is
/// nonzero — that coefficient is returned as the witness.
pub fn is_unitary_laurent(a: &LaurentPoly) -> UnitaryVerdict {
    if a.num_terms() == 1 {
        let (&j, c) = a.terms.iter().next().expect("nonempty");
        if c.is_unit() {
            return UnitaryVerdict::Unitary {
                lambda: c.clone(),
                exponent: j,
            };
        }
        // a·a* − 1 is the constant λ·conj(λ) − 1 ≠ 0.
        return UnitaryVerdict::NotUnitary {
            exponent: 0,
            coeff: &(c * &c.conj()) - &Scalar::one(),
        };
    }
    if a.is_zero() {
        return UnitaryVerdict::NotUnitary {
            exponent: 0,
            coeff: -&Scalar::one(),
        };
    }
    let hi = *a.terms.keys().next_back().expect("nonempty");
    let lo = *a.terms.keys().next().expect("nonempty");
    UnitaryVerdict::NotUnitary {
        exponent: hi - lo,
        coeff: &a.coeff(hi) * &a.coeff(lo).conj(),
    }
}

// ---------------------------------------------------------------------------
// The circle quotient and characters
// ---------------------------------------------------------------------------

/// Image of `a` under the quotient map onto the circle algebra.
///
/// The element is first normalized. Every normal word containing a letter of
/// index ≥ 1 lies in the commutator ideal and is deleted; the surviving
/// words are pure powers `z_0^a` or `(z_0^*)^b` (the rewrite system never
/// leaves `z_0` and `z_0^*` adjacent in a normal word) and map to `u^a`
/// resp. `u^{-b}`.
pub fn project_to_circle(a: &NCPoly, rules: &RuleSet) -> Result<LaurentPoly> {
    let nf = rules.normalize(a)?;
    let mut out = LaurentPoly::zero();
    'word: for (w, c) in nf.poly.terms() {
        let mut e: i64 = 0;
        for l in w.letters() {
            if l.index >= 1 {
                continue 'word;
            }
            e += if l.starred { -1 } else { 1 };
        }
        out.add_term(e, c.clone());
    }
    Ok(out)
}

/// Evaluates the circle projection of `a` at `u = λ` for a constant unit
/// scalar `λ`. Each such `λ` defines a one-dimensional representation of
/// the sphere algebra.
pub fn character_eval(a: &NCPoly, lambda: &Scalar, rules: &RuleSet) -> Result<Scalar> {
    require_constant_unit(lambda)?;
    project_to_circle(a, rules)?.eval_at_unit(lambda)
}

// ---------------------------------------------------------------------------
// Commutator-ideal certificates
// ---------------------------------------------------------------------------

/// One summand `coeff · pre·[left,right]·post` of an ideal certificate:
/// a commutator framed by monomials on either side.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorTerm {
    pub coeff: Scalar,
    pub pre: Word,
    pub left: NCPoly,
    pub right: NCPoly,
    pub post: Word,
}

impl CommutatorTerm {
    /// Expands this summand into the ambient algebra (no normalization).
    fn expand(&self, arity: u32) -> Result<NCPoly> {
        let comm = self.left.q_commutator(&self.right, &Scalar::one())?;
        let pre = NCPoly::term(arity, self.pre.clone(), self.coeff.clone());
        let post = NCPoly::term(arity, self.post.clone(), Scalar::one());
        pre.checked_mul(&comm)?.checked_mul(&post)
    }

    /// The involution `(c·A[x,y]B)* = conj(c)·B*[y*,x*]A*`.
    fn star(&self) -> CommutatorTerm {
        CommutatorTerm {
            coeff: self.coeff.conj(),
            pre: self.post.star(),
            left: self.right.involution(),
            right: self.left.involution(),
            post: self.pre.star(),
        }
    }
}

/// A machine-checkable witness that `target` lies in the two-sided ideal
/// generated by all commutators: a linear combination of framed commutators
/// whose expansion equals `target` in normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealCertificate {
    arity: u32,
    target: NCPoly,
    terms: Vec<CommutatorTerm>,
}

impl IdealCertificate {
    pub fn new(arity: u32, target: NCPoly, terms: Vec<CommutatorTerm>) -> IdealCertificate {
        IdealCertificate {
            arity,
            target,
            terms,
        }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn target(&self) -> &NCPoly {
        &self.target
    }

    pub fn terms(&self) -> &[CommutatorTerm] {
        &self.terms
    }

    /// Expands every summand and returns the normal form of the sum.
    pub fn evaluate(&self, rules: &RuleSet) -> Result<NCPoly> {
        let mut acc = NCPoly::zero(self.arity);
        for t in &self.terms {
            acc = acc.checked_add(&t.expand(self.arity)?)?;
        }
        Ok(rules.normalize(&acc)?.poly)
    }

    /// Re-derives the certificate's claim: expansion and target must agree
    /// in normal form.
    pub fn verify(&self, rules: &RuleSet) -> Result<bool> {
        Ok(self.evaluate(rules)? == rules.normalize(&self.target)?.poly)
    }

    /// Certificate for `target*`, obtained term by term.
    pub fn star(&self) -> IdealCertificate {
        IdealCertificate {
            arity: self.arity,
            target: self.target.involution(),
            terms: self.terms.iter().map(CommutatorTerm::star).collect(),
        }
    }
}

fn scale_terms(terms: &mut [CommutatorTerm], s: &Scalar) {
    for t in terms.iter_mut() {
        t.coeff = &t.coeff * s;
    }
}

fn frame_terms(terms: &mut [CommutatorTerm], pre: &Word, post: &Word) {
    for t in terms.iter_mut() {
        t.pre = pre.concat(&t.pre);
        t.post = t.post.concat(post);
    }
}

fn star_terms(terms: &[CommutatorTerm]) -> Vec<CommutatorTerm> {
    terms.iter().map(CommutatorTerm::star).collect()
}

/// `(1 − q)^{-1}` in the given mode.
fn inv_one_minus_q(qmode: &QMode) -> Result<Scalar> {
    (&Scalar::one() - &qmode.q_power(1)?).inv()
}

/// `(1 − q²)^{-1}` in the given mode.
fn inv_one_minus_q_sq(qmode: &QMode) -> Result<Scalar> {
    (&Scalar::one() - &qmode.q_power(2)?).inv()
}

fn gen_poly(arity: u32, index: u32, starred: bool) -> Result<NCPoly> {
    NCPoly::generator(arity, index, starred)
}

/// Terms certifying `z_j z_i^*` for `i ≠ j`: since `z_i^* z_j = q z_j z_i^*`,
/// the commutator `[z_j, z_i^*]` equals `(1 − q) z_j z_i^*`.
fn pair_terms(arity: u32, qmode: &QMode, j: u32, i: u32) -> Result<Vec<CommutatorTerm>> {
    Ok(alloc::vec![CommutatorTerm {
        coeff: inv_one_minus_q(qmode)?,
        pre: Word::empty(),
        left: gen_poly(arity, j, false)?,
        right: gen_poly(arity, i, true)?,
        post: Word::empty(),
    }])
}

/// Terms certifying the tail sum `Σ_{j ≥ i} z_j z_j^*` for `1 ≤ i ≤ n`:
/// the exchange relation gives `[z_{i−1}^*, z_{i−1}] = (1 − q²) Σ_{j ≥ i} z_j z_j^*`.
fn tail_sum_terms(arity: u32, qmode: &QMode, i: u32) -> Result<Vec<CommutatorTerm>> {
    debug_assert!((1..=arity).contains(&i));
    Ok(alloc::vec![CommutatorTerm {
        coeff: inv_one_minus_q_sq(qmode)?,
        pre: Word::empty(),
        left: gen_poly(arity, i - 1, true)?,
        right: gen_poly(arity, i - 1, false)?,
        post: Word::empty(),
    }])
}

/// Terms certifying `z_i z_i^*` for `i ≥ 1`, as the difference of the tail
/// sums at `i` and `i + 1`.
fn diag_terms(arity: u32, qmode: &QMode, i: u32) -> Result<Vec<CommutatorTerm>> {
    let mut terms = tail_sum_terms(arity, qmode, i)?;
    if i < arity {
        let mut tail = tail_sum_terms(arity, qmode, i + 1)?;
        scale_terms(&mut tail, &-&Scalar::one());
        terms.extend(tail);
    }
    Ok(terms)
}

/// Terms certifying the generator `z_i` itself for `i ≥ 1`, via
/// `z_i = (Σ_j z_j z_j^*) z_i`: the `j = 0` summand is
/// `z_0 z_0^* z_i = q (1 − q)^{-1} z_0 [z_i, z_0^*]`, and each `j ≥ 1`
/// summand is the `z_j z_j^*` certificate framed by `z_i` on the right.
fn generator_terms(arity: u32, qmode: &QMode, i: u32) -> Result<Vec<CommutatorTerm>> {
    debug_assert!((1..=arity).contains(&i));
    let mut terms = Vec::new();
    let coeff = &qmode.q_power(1)? * &inv_one_minus_q(qmode)?;
    terms.push(CommutatorTerm {
        coeff,
        pre: Word::single(Letter::plain(0)),
        left: gen_poly(arity, i, false)?,
        right: gen_poly(arity, 0, true)?,
        post: Word::empty(),
    });
    let post = Word::single(Letter::plain(i));
    for j in 1..=arity {
        let mut block = diag_terms(arity, qmode, j)?;
        frame_terms(&mut block, &Word::empty(), &post);
        terms.extend(block);
    }
    Ok(terms)
}

/// Detects whether a normal form is a scalar multiple of a tail sum
/// `Σ_{j ≥ i} z_j z_j^*` (`i ≥ 1`); returns `(i, common coefficient)`.
fn match_tail_sum(nf: &NCPoly, arity: u32) -> Option<(u32, Scalar)> {
    let mut indices: Vec<u32> = Vec::new();
    let mut common: Option<Scalar> = None;
    for (w, c) in nf.terms() {
        let ls = w.letters();
        if ls.len() != 2 || ls[0].starred || !ls[1].starred || ls[0].index != ls[1].index {
            return None;
        }
        match &common {
            Some(prev) if prev != c => return None,
            Some(_) => {}
            None => common = Some(c.clone()),
        }
        indices.push(ls[0].index);
    }
    let lo = *indices.first()?;
    if lo == 0 {
        return None; // would be the full unit sum, not an ideal element
    }
    let expected: Vec<u32> = (lo..=arity).collect();
    (indices == expected).then(|| (lo, common.expect("nonempty")))
}

/// Certificate terms for one normal word with its coefficient: the word is
/// split `P · g · S` at its first letter `g` of index ≥ 1, and the
/// single-generator certificate for `g` is framed by `P` and `S`.
fn split_word_terms(
    arity: u32,
    qmode: &QMode,
    w: &Word,
    coeff: &Scalar,
) -> Result<Vec<CommutatorTerm>> {
    let ls = w.letters();
    let p = ls.iter().position(|l| l.index >= 1).ok_or_else(|| {
        Error::NotCertifiable {
            detail: format!(
                "normal word {w} uses only index-0 letters, so its image on the circle is nonzero"
            ),
        }
    })?;
    let g = ls[p];
    let pre = Word::from_letters(ls[..p].to_owned());
    let post = Word::from_letters(ls[p + 1..].to_owned());
    let mut terms = if g.starred {
        star_terms(&generator_terms(arity, qmode, g.index)?)
    } else {
        generator_terms(arity, qmode, g.index)?
    };
    scale_terms(&mut terms, coeff);
    frame_terms(&mut terms, &pre, &post);
    Ok(terms)
}

/// Produces a verified-checkable certificate that `target` lies in the
/// two-sided commutator ideal, or [`Error::NotCertifiable`] when its image
/// on the circle is nonzero.
///
/// The target is normalized first. Recognized shapes get the direct
/// recipes — `z_j z_i^*` (`i ≠ j`), tail sums `Σ_{j ≥ i} z_j z_j^*`,
/// diagonal products `z_i z_i^*`, and single generators `z_i` / `z_i^*`
/// (`i ≥ 1`) — each up to a scalar. Every other element is handled word by
/// word: each normal word is split at its first letter of index ≥ 1 and
/// inherits that generator's certificate, framed by the remaining letters.
pub fn commutator_ideal_certificate(
    target: &NCPoly,
    rules: &RuleSet,
) -> Result<IdealCertificate> {
    let arity = rules.arity();
    let qmode = rules.qmode();
    let nf = rules.normalize(target)?.poly;
    let done = |terms: Vec<CommutatorTerm>| {
        Ok(IdealCertificate::new(arity, target.clone(), terms))
    };

    if nf.is_zero() {
        return done(Vec::new());
    }
    if let Some((i, c)) = match_tail_sum(&nf, arity) {
        let mut terms = tail_sum_terms(arity, qmode, i)?;
        scale_terms(&mut terms, &c);
        return done(terms);
    }
    if nf.num_terms() == 1 {
        let (w, c) = nf.terms().next().expect("nonempty");
        let ls = w.letters();
        let atomic = match ls {
            [g] if g.index >= 1 => {
                let base = generator_terms(arity, qmode, g.index)?;
                Some(if g.starred { star_terms(&base) } else { base })
            }
            [a, b] if !a.starred && b.starred => {
                if a.index == b.index && a.index >= 1 {
                    Some(diag_terms(arity, qmode, a.index)?)
                } else if a.index != b.index {
                    Some(pair_terms(arity, qmode, a.index, b.index)?)
                } else {
                    None
                }
            }
            _ => None,
        };
        if let Some(mut terms) = atomic {
            scale_terms(&mut terms, c);
            return done(terms);
        }
    }
    let mut terms = Vec::new();
    for (w, c) in nf.terms() {
        terms.extend(split_word_terms(arity, qmode, w, c)?);
    }
    done(terms)
}

// ---------------------------------------------------------------------------
// Basis-side factorization through the degree-one generators
// ---------------------------------------------------------------------------

/// Factors a basis element of filtration degree ≥ 1 through a degree-one
/// generator: returns `(c, left, gen)` with `gen ∈ {e(0,1,0), e(0,0,1)}`
/// and `e_t = c · e_left · e_gen` exactly. Together with the ideal
/// certificates for the two generators, this exhibits every basis element
/// of positive degree as a member of the commutator ideal.
pub fn factor_through_ideal_generator(
    t: &BasisTerm,
    qmode: &QMode,
) -> Result<(Scalar, BasisTerm, BasisTerm)> {
    if t.degree() == 0 {
        return Err(Error::FiltrationViolation {
            required: 1,
            found: t.to_string(),
        });
    }
    let (left, gen) = if t.k >= 1 {
        (BasisTerm::new(t.j, t.k - 1, t.l), BasisTerm::new(0, 1, 0))
    } else {
        (BasisTerm::new(t.j, t.k, t.l - 1), BasisTerm::new(0, 0, 1))
    };
    let prod = BasisVector::basis_term(qmode.clone(), left)?
        .basis_product(&BasisVector::basis_term(qmode.clone(), gen)?)?;
    debug_assert_eq!(prod.num_terms(), 1);
    let mu = prod.coeff(t);
    if mu.is_zero() {
        return Err(Error::NotCertifiable {
            detail: format!("product {left} · {gen} does not hit {t}"),
        });
    }
    Ok((mu.inv()?, left, gen))
}

// ---------------------------------------------------------------------------
// Homomorphism specifications and checking
// ---------------------------------------------------------------------------

/// The codomain of a generator-image assignment.
#[derive(Clone, Debug, PartialEq)]
pub enum HomTarget {
    /// A sphere algebra of the given arity, elements as word polynomials.
    Sphere { arity: u32, qmode: QMode },
    /// The arity-1 algebra in its canonical basis representation.
    Basis { qmode: QMode },
    /// The circle algebra (Laurent polynomials in one unitary).
    Circle,
}

/// An element of a [`HomTarget`] algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetElem {
    Poly(NCPoly),
    Basis(BasisVector),
    Laurent(LaurentPoly),
}

impl TargetElem {
    pub fn is_zero(&self) -> bool {
        match self {
            TargetElem::Poly(p) => p.is_zero(),
            TargetElem::Basis(b) => b.is_zero(),
            TargetElem::Laurent(l) => l.is_zero(),
        }
    }
}

impl core::fmt::Display for TargetElem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TargetElem::Poly(p) => write!(f, "{p}"),
            TargetElem::Basis(b) => write!(f, "{b}"),
            TargetElem::Laurent(l) => write!(f, "{l}"),
        }
    }
}

/// A candidate *-homomorphism out of a sphere algebra, given by one image
/// per plain generator (`images[i]` is the image of `z_i`; images of the
/// starred generators are forced by the involution).
#[derive(Clone, Debug, PartialEq)]
pub struct HomSpec {
    pub source_arity: u32,
    pub source_q: QMode,
    pub target: HomTarget,
    pub images: Vec<TargetElem>,
}

/// One defining relation of the source that the images fail to satisfy,
/// with the canonical nonzero residue.
#[derive(Clone, Debug, PartialEq)]
pub struct HomViolation {
    pub relation: String,
    pub residue: TargetElem,
}

/// Outcome of [`check_homomorphism`]: either every defining relation maps
/// to zero, or the complete list of violated relations.
#[derive(Clone, Debug, PartialEq)]
pub enum HomVerdict {
    Holds,
    Violated(Vec<HomViolation>),
}

impl HomVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, HomVerdict::Holds)
    }

    /// The violation entry for the named relation, if any.
    pub fn violation(&self, relation: &str) -> Option<&HomViolation> {
        match self {
            HomVerdict::Holds => None,
            HomVerdict::Violated(v) => v.iter().find(|hv| hv.relation == relation),
        }
    }
}

/// Target-algebra operations, with a rewrite system cached for sphere
/// codomains.
enum AlgebraCtx {
    Sphere(RuleSet),
    Basis(QMode),
    Circle,
}

impl AlgebraCtx {
    fn new(target: &HomTarget) -> Result<AlgebraCtx> {
        match target {
            HomTarget::Sphere { arity, qmode } => {
                Ok(AlgebraCtx::Sphere(RuleSet::new(*arity, qmode.clone())?))
            }
            HomTarget::Basis { qmode } => {
                qmode.validate()?;
                if qmode.is_zero_fixed() {
                    return Err(Error::QZeroUnsupported);
                }
                Ok(AlgebraCtx::Basis(qmode.clone()))
            }
            HomTarget::Circle => Ok(AlgebraCtx::Circle),
        }
    }

    fn zero(&self) -> Result<TargetElem> {
        Ok(match self {
            AlgebraCtx::Sphere(rules) => TargetElem::Poly(NCPoly::zero(rules.arity())),
            AlgebraCtx::Basis(qmode) => TargetElem::Basis(BasisVector::zero(qmode.clone())?),
            AlgebraCtx::Circle => TargetElem::Laurent(LaurentPoly::zero()),
        })
    }

    fn one(&self) -> Result<TargetElem> {
        Ok(match self {
            AlgebraCtx::Sphere(rules) => TargetElem::Poly(NCPoly::one(rules.arity())),
            AlgebraCtx::Basis(qmode) => TargetElem::Basis(BasisVector::one(qmode.clone())?),
            AlgebraCtx::Circle => TargetElem::Laurent(LaurentPoly::one()),
        })
    }

    fn mul(&self, a: &TargetElem, b: &TargetElem) -> Result<TargetElem> {
        match (a, b) {
            (TargetElem::Poly(x), TargetElem::Poly(y)) => {
                Ok(TargetElem::Poly(x.checked_mul(y)?))
            }
            (TargetElem::Basis(x), TargetElem::Basis(y)) => {
                Ok(TargetElem::Basis(x.basis_product(y)?))
            }
            (TargetElem::Laurent(x), TargetElem::Laurent(y)) => {
                Ok(TargetElem::Laurent(x.mul(y)))
            }
            _ => Err(elem_kind_mismatch(a, b)),
        }
    }

    fn add(&self, a: &TargetElem, b: &TargetElem) -> Result<TargetElem> {
        match (a, b) {
            (TargetElem::Poly(x), TargetElem::Poly(y)) => {
                Ok(TargetElem::Poly(x.checked_add(y)?))
            }
            (TargetElem::Basis(x), TargetElem::Basis(y)) => {
                Ok(TargetElem::Basis(x.checked_add(y)?))
            }
            (TargetElem::Laurent(x), TargetElem::Laurent(y)) => {
                Ok(TargetElem::Laurent(x.add(y)))
            }
            _ => Err(elem_kind_mismatch(a, b)),
        }
    }

    fn scale(&self, a: &TargetElem, s: &Scalar) -> Result<TargetElem> {
        Ok(match a {
            TargetElem::Poly(x) => TargetElem::Poly(x.scale(s)),
            TargetElem::Basis(x) => TargetElem::Basis(x.scale(s)?),
            TargetElem::Laurent(x) => TargetElem::Laurent(x.scale(s)),
        })
    }

    fn star(&self, a: &TargetElem) -> Result<TargetElem> {
        Ok(match a {
            TargetElem::Poly(x) => TargetElem::Poly(x.involution()),
            TargetElem::Basis(x) => TargetElem::Basis(x.basis_star()),
            TargetElem::Laurent(x) => TargetElem::Laurent(x.star()),
        })
    }

    /// Canonical representative: normal form for sphere codomains; basis
    /// vectors and Laurent polynomials are canonical already.
    fn canonical(&self, a: &TargetElem) -> Result<TargetElem> {
        match (self, a) {
            (AlgebraCtx::Sphere(rules), TargetElem::Poly(p)) => {
                Ok(TargetElem::Poly(rules.normalize(p)?.poly))
            }
            _ => Ok(a.clone()),
        }
    }
}

fn elem_kind_mismatch(a: &TargetElem, b: &TargetElem) -> Error {
    let kind = |e: &TargetElem| match e {
        TargetElem::Poly(_) => "word-polynomial",
        TargetElem::Basis(_) => "basis-vector",
        TargetElem::Laurent(_) => "laurent",
    };
    Error::ModeMismatch {
        left: kind(a).to_owned(),
        right: kind(b).to_owned(),
    }
}

impl HomSpec {
    /// Structural validation: image count, element kinds, arities, and
    /// parameter-mode compatibility. A symbolic source requires a symbolic
    /// sphere/basis target (the two algebras then share the formal
    /// parameter); a fixed source has constant relation coefficients and
    /// may map into any mode.
    pub fn validate(&self) -> Result<()> {
        self.source_q.validate()?;
        let expected = self.source_arity as usize + 1;
        if self.images.len() != expected {
            return Err(Error::InvalidRange {
                what: format!(
                    "expected {expected} generator images for arity {}, got {}",
                    self.source_arity,
                    self.images.len()
                ),
            });
        }
        let mode_compatible = |target_q: &QMode| -> Result<()> {
            target_q.validate()?;
            if matches!(self.source_q, QMode::Symbolic) && !matches!(target_q, QMode::Symbolic) {
                return Err(Error::ModeMismatch {
                    left: self.source_q.to_string(),
                    right: target_q.to_string(),
                });
            }
            Ok(())
        };
        match &self.target {
            HomTarget::Sphere { arity, qmode } => {
                mode_compatible(qmode)?;
                for img in &self.images {
                    match img {
                        TargetElem::Poly(p) if p.arity() == *arity => {}
                        TargetElem::Poly(p) => {
                            return Err(Error::ArityMismatch {
                                left: *arity,
                                right: p.arity(),
                            })
                        }
                        other => return Err(elem_kind_mismatch(&TargetElem::Poly(NCPoly::zero(*arity)), other)),
                    }
                }
            }
            HomTarget::Basis { qmode } => {
                mode_compatible(qmode)?;
                for img in &self.images {
                    match img {
                        TargetElem::Basis(b) => qmode.require_same(b.qmode())?,
                        other => {
                            return Err(elem_kind_mismatch(
                                &TargetElem::Basis(BasisVector::zero(QMode::Symbolic)?),
                                other,
                            ))
                        }
                    }
                }
            }
            HomTarget::Circle => {
                for img in &self.images {
                    if !matches!(img, TargetElem::Laurent(_)) {
                        return Err(elem_kind_mismatch(
                            &TargetElem::Laurent(LaurentPoly::zero()),
                            img,
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the generator-image assignment to an arbitrary element of
    /// the source algebra, returning a canonical element of the target.
    pub fn apply(&self, x: &NCPoly) -> Result<TargetElem> {
        self.validate()?;
        let ctx = AlgebraCtx::new(&self.target)?;
        self.apply_in(&ctx, x)
    }

    fn apply_in(&self, ctx: &AlgebraCtx, x: &NCPoly) -> Result<TargetElem> {
        if x.arity() != self.source_arity {
            return Err(Error::ArityMismatch {
                left: self.source_arity,
                right: x.arity(),
            });
        }
        let mut acc = ctx.zero()?;
        for (w, c) in x.terms() {
            let mut img = ctx.one()?;
            for l in w.letters() {
                let base = &self.images[l.index as usize];
                let li = if l.starred {
                    ctx.star(base)?
                } else {
                    base.clone()
                };
                img = ctx.mul(&img, &li)?;
            }
            let coeff = match &self.source_q {
                QMode::Fixed(r) => c.eval(r)?,
                QMode::Symbolic => c.clone(),
            };
            acc = ctx.add(&acc, &ctx.scale(&img, &coeff)?)?;
        }
        ctx.canonical(&acc)
    }
}

/// Substitutes the images into every defining relation of the source
/// algebra (taken with the source's parameter) and normalizes each residue
/// in the target. The verdict lists **all** violated relations — several
/// can fail at once, and downstream analyses single out specific entries.
pub fn check_homomorphism(spec: &HomSpec) -> Result<HomVerdict> {
    spec.validate()?;
    let ctx = AlgebraCtx::new(&spec.target)?;
    let mut violations = Vec::new();
    for (relation, rel) in defining_relations(spec.source_arity, &spec.source_q)? {
        let residue = spec.apply_in(&ctx, &rel)?;
        if !residue.is_zero() {
            violations.push(HomViolation { relation, residue });
        }
    }
    if violations.is_empty() {
        Ok(HomVerdict::Holds)
    } else {
        Ok(HomVerdict::Violated(violations))
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
