//! Arithmetic in the quantum-SU(2) coordinate algebra carried out directly
//! in its weighted basis.
//!
//! Basis monomials are indexed by `(j, k, l)`: for `j >= 0` the monomial is
//! `a^j b^k (b*)^l`, for `j < 0` it is `b^k (b*)^l (a*)^{-j}`, where `a`,
//! `b` are the two generators (aliased to `z0`, `z1` in word form). These
//! are a linear basis exactly when `q != 0`, so vectors reject a fixed
//! `q = 0`. Products are computed by a closed commutation formula for
//! `(a*)^s a^t`, star acts by `(j,k,l) -> (-j,l,k)` with conjugated
//! coefficients, and the filtration degree of a monomial is `k + l`.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::coeffq::{QMode, Scalar};
use crate::ncpoly::{Letter, NCPoly, Word};
use crate::parser;
use crate::{Error, Result};

/// Index triple of one basis monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisTerm {
    pub j: i64,
    pub k: u64,
    pub l: u64,
}

impl BasisTerm {
    pub fn new(j: i64, k: u64, l: u64) -> BasisTerm {
        BasisTerm { j, k, l }
    }

    pub fn one() -> BasisTerm {
        BasisTerm::new(0, 0, 0)
    }

    /// Filtration degree `k + l`.
    pub fn degree(&self) -> u64 {
        self.k + self.l
    }

    /// The adjoint index triple `(-j, l, k)`.
    pub fn star(&self) -> BasisTerm {
        BasisTerm::new(-self.j, self.l, self.k)
    }

    /// The canonical word representing this monomial.
    pub fn word(&self) -> Word {
        let mut ls = Vec::new();
        if self.j > 0 {
            for _ in 0..self.j {
                ls.push(Letter::plain(0));
            }
        }
        for _ in 0..self.k {
            ls.push(Letter::plain(1));
        }
        for _ in 0..self.l {
            ls.push(Letter::starred(1));
        }
        if self.j < 0 {
            for _ in 0..(-self.j) {
                ls.push(Letter::starred(0));
            }
        }
        Word::from_letters(ls)
    }
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({},{},{})", self.j, self.k, self.l)
    }
}

/// Degree of a vector in the descending filtration: the least `k + l` over
/// its support, or infinite for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationDegree {
    Finite(u64),
    Infinite,
}

impl FiltrationDegree {
    /// Membership in the span of monomials of degree at least `m`.
    pub fn at_least(&self, m: u64) -> bool {
        match self {
            FiltrationDegree::Infinite => true,
            FiltrationDegree::Finite(d) => *d >= m,
        }
    }
}

impl PartialOrd for FiltrationDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FiltrationDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        use FiltrationDegree::*;
        match (self, other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for FiltrationDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationDegree::Finite(d) => write!(f, "{d}"),
            FiltrationDegree::Infinite => write!(f, "infinity"),
        }
    }
}

/// A finitely supported linear combination of basis monomials, tagged with
/// the coefficient mode. Fixed mode requires `q != 0` (the monomials are
/// not linearly independent at zero) and keeps coefficients evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisVector {
    qmode: QMode,
    terms: BTreeMap<BasisTerm, Scalar>,
}

impl BasisVector {
    pub fn zero(qmode: QMode) -> Result<BasisVector> {
        qmode.validate()?;
        if qmode.is_zero_fixed() {
            return Err(Error::QZeroUnsupported);
        }
        Ok(BasisVector {
            qmode,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(
        qmode: QMode,
        it: impl IntoIterator<Item = (BasisTerm, Scalar)>,
    ) -> Result<BasisVector> {
        let mut out = BasisVector::zero(qmode)?;
        for (t, c) in it {
            out.add_term(t, c)?;
        }
        Ok(out)
    }

    /// The single monomial `e` with coefficient one.
    pub fn basis_term(qmode: QMode, t: BasisTerm) -> Result<BasisVector> {
        BasisVector::from_terms(qmode, [(t, Scalar::one())])
    }

    pub fn one(qmode: QMode) -> Result<BasisVector> {
        BasisVector::basis_term(qmode, BasisTerm::one())
    }

    /// Parse a basis expression such as `q e(1,1,0) - e(0,2,2)`.
    pub fn parse(src: &str, qmode: QMode, gaussian: bool) -> Result<BasisVector> {
        let raw = parser::parse_basis_terms(src, &parser::ExprContext::new(0, gaussian))?;
        BasisVector::from_terms(
            qmode,
            raw.terms
                .into_iter()
                .map(|((j, k, l), c)| (BasisTerm::new(j, k, l), c)),
        )
    }

    pub fn qmode(&self) -> &QMode {
        &self.qmode
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisTerm, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &BasisTerm) -> Scalar {
        self.terms.get(t).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisTerm> {
        self.terms.keys()
    }

    /// In fixed mode, evaluate a coefficient at the fixed value; symbolic
    /// coefficients pass through.
    fn coerce(&self, c: Scalar) -> Result<Scalar> {
        match &self.qmode {
            QMode::Symbolic => Ok(c),
            QMode::Fixed(r) => c.eval(r),
        }
    }

    /// Add `c·t`, evaluating the coefficient in fixed mode and dropping
    /// cancellations.
    pub fn add_term(&mut self, t: BasisTerm, c: Scalar) -> Result<()> {
        let c = self.coerce(c)?;
        if c.is_zero() {
            return Ok(());
        }
        let cur = self.terms.remove(&t);
        let sum = match cur {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(t, sum);
        }
        Ok(())
    }

    fn require_same_mode(&self, other: &BasisVector) -> Result<()> {
        self.qmode.require_same(&other.qmode)
    }

    pub fn checked_add(&self, other: &BasisVector) -> Result<BasisVector> {
        self.require_same_mode(other)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(*t, c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &BasisVector) -> Result<BasisVector> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> BasisVector {
        BasisVector {
            qmode: self.qmode.clone(),
            terms: self.terms.iter().map(|(t, c)| (*t, -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<BasisVector> {
        let s = self.coerce(s.clone())?;
        if s.is_zero() {
            return BasisVector::zero(self.qmode.clone());
        }
        Ok(BasisVector {
            qmode: self.qmode.clone(),
            terms: self.terms.iter().map(|(t, c)| (*t, c * &s)).collect(),
        })
    }

    /// Exact product, computed term-by-term through the closed commutation
    /// formulas.
    pub fn basis_product(&self, other: &BasisVector) -> Result<BasisVector> {
        self.require_same_mode(other)?;
        let mut out = BasisVector::zero(self.qmode.clone())?;
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                let c12 = c1 * c2;
                for (t, c) in term_product(t1, t2, &self.qmode)? {
                    out.add_term(t, &c12 * &c)?;
                }
            }
        }
        Ok(out)
    }

    /// The adjoint: `(j,k,l) -> (-j,l,k)` termwise with conjugated
    /// coefficients.
    pub fn basis_star(&self) -> BasisVector {
        BasisVector {
            qmode: self.qmode.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.star(), c.conj()))
                .collect(),
        }
    }

    pub fn filtration_degree(&self) -> FiltrationDegree {
        self.terms
            .keys()
            .map(|t| t.degree())
            .min()
            .map(FiltrationDegree::Finite)
            .unwrap_or(FiltrationDegree::Infinite)
    }

    /// The component lying in the span of monomials of degree at least `m`.
    pub fn project_above(&self, m: u64) -> BasisVector {
        BasisVector {
            qmode: self.qmode.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| t.degree() >= m)
                .map(|(t, c)| (*t, c.clone()))
                .collect(),
        }
    }

    /// The canonical representative modulo the span of monomials of degree
    /// at least `m` (keeps degrees below `m`).
    pub fn reduce_mod(&self, m: u64) -> BasisVector {
        BasisVector {
            qmode: self.qmode.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| t.degree() < m)
                .map(|(t, c)| (*t, c.clone()))
                .collect(),
        }
    }

    /// Coefficients of the `k = l = 0` monomials, indexed by `j`: the part
    /// that survives projection onto the circle algebra.
    pub fn circle_coeffs(&self) -> BTreeMap<i64, Scalar> {
        self.terms
            .iter()
            .filter(|(t, _)| t.k == 0 && t.l == 0)
            .map(|(t, c)| (t.j, c.clone()))
            .collect()
    }

    /// The word-form polynomial over `z0`, `z1`.
    pub fn to_poly(&self) -> NCPoly {
        let mut p = NCPoly::zero(1);
        for (t, c) in &self.terms {
            p.add_term(t.word(), c.clone());
        }
        p
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let map: BTreeMap<(i64, u64, u64), Scalar> = self
            .terms
            .iter()
            .map(|(t, c)| ((t.j, t.k, t.l), c.clone()))
            .collect();
        write!(f, "{}", parser::format_basis_terms(&map))
    }
}

/// Expand `prod_i (1 - q^{e_i} X)` as coefficients of `X^0, X^1, ...`,
/// where `X` stands for the central-in-the-b-block product `b b*`.
fn prod_one_minus(exps: impl Iterator<Item = i64>, qmode: &QMode) -> Result<Vec<Scalar>> {
    let mut coeffs = vec![Scalar::one()];
    for e in exps {
        let qe = qmode.q_power(e)?;
        let mut next = vec![Scalar::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] = &next[i] + c;
            next[i + 1] = &next[i + 1] - &(c * &qe);
        }
        coeffs = next;
    }
    Ok(coeffs)
}

/// Monomial form `a^x b^k (b*)^l (a*)^y` of a basis term: exactly one of
/// `x`, `y` is nonzero (or both are zero).
fn mono(t: &BasisTerm) -> (u64, u64, u64, u64) {
    if t.j >= 0 {
        (t.j as u64, t.k, t.l, 0)
    } else {
        (0, t.k, t.l, (-t.j) as u64)
    }
}

fn basis_from_mono(a: u64, k: u64, l: u64, b: u64) -> BasisTerm {
    debug_assert!(a == 0 || b == 0);
    BasisTerm::new(a as i64 - b as i64, k, l)
}

/// Product of two basis monomials as a combination of basis monomials.
///
/// Writing both factors in monomial form, the inner `(a*)^{y1} a^{x2}`
/// resolves through `(a*)^s a^t = (a*)^{s-c} a^{t-c} prod_{p=t-c+1}^{t}
/// (1 - q^{2p} b b*)` with `c = min(s,t)`; the leftover one-sided power
/// commutes across the `b`-block picking up `q^{±(moved block degree)}`
/// factors, and a final two-sided monomial `a^x ... (a*)^y` reduces by the
/// closed power-product formula (see [`alpha_power_product`]).
fn term_product(t1: &BasisTerm, t2: &BasisTerm, qmode: &QMode) -> Result<Vec<(BasisTerm, Scalar)>> {
    let (a1, k1, l1, b1) = mono(t1);
    let (a2, k2, l2, b2) = mono(t2);
    let c = a2.min(b1);
    let bm = b1 - c;
    let am = a2 - c;
    let mids = prod_one_minus(
        ((a2 - c + 1)..=a2).map(|p| 2 * p as i64),
        qmode,
    )?;

    let mut raw: Vec<((u64, u64, u64, u64), Scalar)> = Vec::new();
    for (i, m) in mids.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let i = i as u64;
        if bm == 0 {
            // ... a^{am} stays left of the b-block it crossed.
            let swap = qmode.q_power((am * (k1 + l1)) as i64)?;
            raw.push(((a1 + am, k1 + k2 + i, l1 + l2 + i, b2), m * &swap));
        } else {
            // (a*)^{bm} moves right across (b b*)^i and the second b-block.
            let swap = qmode.q_power((2 * i * bm + bm * (k2 + l2)) as i64)?;
            raw.push(((a1, k1 + k2 + i, l1 + l2 + i, bm + b2), m * &swap));
        }
    }

    let mut out = Vec::new();
    for ((a, k, l, b), c0) in raw {
        let two_sided = a.min(b);
        if two_sided == 0 {
            out.push((basis_from_mono(a, k, l, b), c0));
            continue;
        }
        // a^a b^k (b*)^l (a*)^b = q^{-b(k+l)} a^a (a*)^b b^k (b*)^l.
        let pre = qmode.q_power(-((b * (k + l)) as i64))?;
        for (t, c) in alpha_power_terms(a, b, qmode)? {
            let shifted = BasisTerm::new(t.j, t.k + k, t.l + l);
            // Any trailing (a*) power must pass the b-block leftward.
            let cross = if t.j < 0 {
                let s = (-t.j) as u64;
                qmode.q_power((s * (k + l)) as i64)?
            } else {
                Scalar::one()
            };
            out.push((shifted, &(&c0 * &pre) * &(&c * &cross)));
        }
    }
    Ok(out)
}

/// Closed-form expansion of `a^j (a*)^k` in the basis:
/// `a^{j-k} prod_{p=0}^{k-1} (1 - q^{-2p} b b*)` when `j >= k`, and
/// `(a*)^{k-j} prod_{p=k-j}^{k-1} (1 - q^{-2p} b b*)` when `j < k`
/// (with the product then commuted into place).
fn alpha_power_terms(j: u64, k: u64, qmode: &QMode) -> Result<Vec<(BasisTerm, Scalar)>> {
    let mut out = Vec::new();
    if j >= k {
        let mids = prod_one_minus((0..k).map(|p| -2 * (p as i64)), qmode)?;
        for (i, m) in mids.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let i = i as u64;
            out.push((BasisTerm::new((j - k) as i64, i, i), m.clone()));
        }
    } else {
        let s = k - j;
        let mids = prod_one_minus((s..k).map(|p| -2 * (p as i64)), qmode)?;
        for (i, m) in mids.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let i = i as u64;
            // (a*)^s (b b*)^i = q^{2 i s} (b b*)^i (a*)^s.
            let cross = qmode.q_power((2 * i * s) as i64)?;
            out.push((BasisTerm::new(-(s as i64), i, i), m * &cross));
        }
    }
    Ok(out)
}

/// `a^j (a*)^k` expanded in the basis via the closed product formula.
pub fn alpha_power_product(j: u64, k: u64, qmode: &QMode) -> Result<BasisVector> {
    BasisVector::from_terms(qmode.clone(), alpha_power_terms(j, k, qmode)?)
}

/// Re-index a normal-form polynomial over `z0`, `z1` into the basis: every
/// word must have the canonical shape `z0^x z1^k z1'^l z0'^y` with
/// `min(x,y) = 0`.
pub fn word_to_basis(p: &NCPoly, qmode: &QMode) -> Result<BasisVector> {
    if p.arity() != 1 {
        return Err(Error::ArityMismatch {
            left: p.arity(),
            right: 1,
        });
    }
    let mut out = BasisVector::zero(qmode.clone())?;
    for (w, c) in p.terms() {
        let t = word_shape(w).ok_or_else(|| Error::InvalidNormalWord {
            word: w.to_string(),
        })?;
        out.add_term(t, c.clone())?;
    }
    Ok(out)
}

/// `Some(term)` when the word has the canonical basis shape.
fn word_shape(w: &Word) -> Option<BasisTerm> {
    let mut x = 0u64;
    let mut k = 0u64;
    let mut l = 0u64;
    let mut y = 0u64;
    // Stages: z0 plains, z1 plains, z1 stars, z0 stars.
    let mut stage = 0u8;
    for letter in w.letters() {
        let s = match (letter.index, letter.starred) {
            (0, false) => 0,
            (1, false) => 1,
            (1, true) => 2,
            (0, true) => 3,
            _ => return None,
        };
        if s < stage {
            return None;
        }
        stage = s;
        match s {
            0 => x += 1,
            1 => k += 1,
            2 => l += 1,
            _ => y += 1,
        }
    }
    if x.min(y) > 0 {
        return None;
    }
    Some(BasisTerm::new(x as i64 - y as i64, k, l))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffq::rat;
    use crate::rewrite::RuleSet;
    use proptest::prelude::*;

    fn sym() -> QMode {
        QMode::Symbolic
    }

    fn bt(j: i64, k: u64, l: u64) -> BasisTerm {
        BasisTerm::new(j, k, l)
    }

    fn bv(terms: &[(i64, u64, u64, Scalar)]) -> BasisVector {
        BasisVector::from_terms(
            sym(),
            terms.iter().map(|&(j, k, l, ref c)| (bt(j, k, l), c.clone())),
        )
        .unwrap()
    }

    fn e(j: i64, k: u64, l: u64) -> BasisVector {
        BasisVector::basis_term(sym(), bt(j, k, l)).unwrap()
    }

    #[test]
    fn rejects_q_zero() {
        assert!(matches!(
            BasisVector::zero(QMode::Fixed(rat(0, 1))),
            Err(Error::QZeroUnsupported)
        ));
    }

    #[test]
    fn product_frozen_examples() {
        // b·a = q a b.
        let p = e(0, 1, 0).basis_product(&e(1, 0, 0)).unwrap();
        assert_eq!(p, bv(&[(1, 1, 0, Scalar::q_power(1))]));
        // a·a* = 1 - b b*.
        let p = e(1, 0, 0).basis_product(&e(-1, 0, 0)).unwrap();
        assert_eq!(
            p,
            bv(&[(0, 0, 0, Scalar::one()), (0, 1, 1, -&Scalar::one())])
        );
        // (a^2 b)·(b* a*) = q^-2 (e(1,1,1) - e(1,2,2)).
        let p = e(2, 1, 0).basis_product(&e(-1, 0, 1)).unwrap();
        assert_eq!(
            p,
            bv(&[
                (1, 1, 1, Scalar::q_power(-2)),
                (1, 2, 2, -&Scalar::q_power(-2)),
            ])
        );
    }

    #[test]
    fn alpha_power_product_frozen_examples() {
        let p = alpha_power_product(2, 1, &sym()).unwrap();
        assert_eq!(
            p,
            bv(&[(1, 0, 0, Scalar::one()), (1, 1, 1, -&Scalar::one())])
        );
        let p = alpha_power_product(1, 2, &sym()).unwrap();
        assert_eq!(
            p,
            bv(&[(-1, 0, 0, Scalar::one()), (-1, 1, 1, -&Scalar::one())])
        );
        let p = alpha_power_product(2, 2, &sym()).unwrap();
        assert_eq!(
            p,
            bv(&[
                (0, 0, 0, Scalar::one()),
                (0, 1, 1, -&(&Scalar::one() + &Scalar::q_power(-2))),
                (0, 2, 2, Scalar::q_power(-2)),
            ])
        );
    }

    #[test]
    fn star_frozen_examples() {
        assert_eq!(e(2, 1, 0).basis_star(), e(-2, 0, 1));
        assert_eq!(e(0, 0, 0).basis_star(), e(0, 0, 0));
        assert_eq!(e(-1, 2, 1).basis_star(), e(1, 1, 2));
        // Coefficients conjugate.
        let v = bv(&[(1, 0, 0, Scalar::i())]);
        assert_eq!(v.basis_star(), bv(&[(-1, 0, 0, -&Scalar::i())]));
    }

    #[test]
    fn filtration_degree_examples() {
        let aas = e(1, 0, 0).basis_product(&e(-1, 0, 0)).unwrap();
        assert_eq!(aas.filtration_degree(), FiltrationDegree::Finite(0));
        let one_minus = BasisVector::one(sym())
            .unwrap()
            .checked_sub(&aas)
            .unwrap();
        assert_eq!(one_minus, bv(&[(0, 1, 1, Scalar::one())]));
        assert_eq!(one_minus.filtration_degree(), FiltrationDegree::Finite(2));
        assert_eq!(
            BasisVector::zero(sym()).unwrap().filtration_degree(),
            FiltrationDegree::Infinite
        );
        assert!(FiltrationDegree::Infinite > FiltrationDegree::Finite(1_000_000));
    }

    #[test]
    fn word_conversion_round_trip_and_examples() {
        let rules = RuleSet::new(1, sym()).unwrap();
        // b a normalizes to q a b.
        let p = crate::parser::parse_poly("z1 z0", &crate::parser::ExprContext::new(1, false))
            .unwrap();
        let nf = rules.normalize(&p).unwrap().poly;
        let v = word_to_basis(&nf, &sym()).unwrap();
        assert_eq!(v, bv(&[(1, 1, 0, Scalar::q_power(1))]));
        // (a*)^2 is already a basis monomial.
        let p = crate::parser::parse_poly("z0' z0'", &crate::parser::ExprContext::new(1, false))
            .unwrap();
        let v = word_to_basis(&p, &sym()).unwrap();
        assert_eq!(v, e(-2, 0, 0));
        // a b b* a* expands to q^-2 (e(0,1,1) - e(0,2,2)).
        let p = crate::parser::parse_poly(
            "z0 z1 z1' z0'",
            &crate::parser::ExprContext::new(1, false),
        )
        .unwrap();
        let nf = rules.normalize(&p).unwrap().poly;
        let v = word_to_basis(&nf, &sym()).unwrap();
        assert_eq!(
            v,
            bv(&[
                (0, 1, 1, Scalar::q_power(-2)),
                (0, 2, 2, -&Scalar::q_power(-2)),
            ])
        );
        // Non-normal words are rejected.
        let p = crate::parser::parse_poly("z0' z0", &crate::parser::ExprContext::new(1, false))
            .unwrap();
        assert!(matches!(
            word_to_basis(&p, &sym()),
            Err(Error::InvalidNormalWord { .. })
        ));
    }

    #[test]
    fn basis_term_words_round_trip() {
        for j in -3i64..=3 {
            for k in 0u64..=2 {
                for l in 0u64..=2 {
                    let t = bt(j, k, l);
                    let p = NCPoly::term(1, t.word(), Scalar::one());
                    let v = word_to_basis(&p, &sym()).unwrap();
                    assert_eq!(v, BasisVector::basis_term(sym(), t).unwrap());
                }
            }
        }
    }

    #[test]
    fn power_products_modulo_degree_two() {
        // a (a*)^j, (a*)^j a, a^j a*, a* a^j all equal the one-step-shorter
        // power modulo filtration degree 2.
        for j in 1u64..=5 {
            let aj = alpha_power_product(1, j, &sym()).unwrap();
            let target = e(-(j as i64 - 1), 0, 0);
            let d = aj.checked_sub(&target).unwrap();
            assert!(d.filtration_degree().at_least(2), "a (a*)^{j}");

            let sja = e(-(j as i64), 0, 0).basis_product(&e(1, 0, 0)).unwrap();
            let d = sja.checked_sub(&target).unwrap();
            assert!(d.filtration_degree().at_least(2), "(a*)^{j} a");

            let ajs = alpha_power_product(j, 1, &sym()).unwrap();
            let target = e(j as i64 - 1, 0, 0);
            let d = ajs.checked_sub(&target).unwrap();
            assert!(d.filtration_degree().at_least(2), "a^{j} a*");

            let saj = e(-1, 0, 0).basis_product(&e(j as i64, 0, 0)).unwrap();
            let d = saj.checked_sub(&target).unwrap();
            assert!(d.filtration_degree().at_least(2), "a* a^{j}");
        }
    }

    #[test]
    fn fixed_mode_evaluates_coefficients() {
        let qm = QMode::Fixed(rat(1, 2));
        let v = BasisVector::from_terms(qm.clone(), [(bt(1, 0, 0), Scalar::q_power(2))]).unwrap();
        assert_eq!(v.coeff(&bt(1, 0, 0)), Scalar::from_rat(rat(1, 4)));
        let w = BasisVector::basis_term(qm.clone(), bt(-1, 0, 0)).unwrap();
        let p = v.basis_product(&w).unwrap();
        // (1/4) a a* = 1/4 - (1/4) b b*.
        assert_eq!(p.coeff(&bt(0, 0, 0)), Scalar::from_rat(rat(1, 4)));
        assert_eq!(p.coeff(&bt(0, 1, 1)), Scalar::from_rat(rat(-1, 4)));
    }

    #[test]
    fn parse_display_round_trip() {
        let v = BasisVector::parse("q e(1,1,0) - e(0,2,2) + e(-2,0,3)/q", sym(), false).unwrap();
        let text = v.to_string();
        let back = BasisVector::parse(&text, sym(), false).unwrap();
        assert_eq!(back, v);
    }

    fn letter_vector(l: &Letter) -> BasisVector {
        let t = match (l.index, l.starred) {
            (0, false) => bt(1, 0, 0),
            (0, true) => bt(-1, 0, 0),
            (1, false) => bt(0, 1, 0),
            _ => bt(0, 0, 1),
        };
        BasisVector::basis_term(sym(), t).unwrap()
    }

    fn arb_term(max_j: i64, max_deg: u64) -> impl Strategy<Value = BasisTerm> {
        (-max_j..=max_j, 0..=max_deg, 0..=max_deg).prop_map(|(j, k, l)| bt(j, k, l))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn products_match_the_rewrite_oracle(
            ls in proptest::collection::vec((0u32..=1, any::<bool>()), 0..5)
        ) {
            let rules = RuleSet::new(1, sym()).unwrap();
            let letters: Vec<Letter> = ls
                .iter()
                .map(|&(i, s)| Letter { index: i, starred: s })
                .collect();
            let word = Word::from_letters(letters.clone());
            let nf = rules.normalize_word(&word).unwrap();
            let via_rewrite = word_to_basis(&nf, &sym()).unwrap();
            let mut via_basis = BasisVector::one(sym()).unwrap();
            for l in &letters {
                via_basis = via_basis.basis_product(&letter_vector(l)).unwrap();
            }
            prop_assert_eq!(via_rewrite, via_basis);
        }

        #[test]
        fn filtration_is_multiplicative(
            t1 in arb_term(2, 2),
            t2 in arb_term(2, 2),
        ) {
            let x = BasisVector::basis_term(sym(), t1).unwrap();
            let y = BasisVector::basis_term(sym(), t2).unwrap();
            let p = x.basis_product(&y).unwrap();
            prop_assert!(p.filtration_degree().at_least(t1.degree() + t2.degree()));
        }

        #[test]
        fn star_is_an_involutive_antihomomorphism(
            t1 in arb_term(2, 2),
            t2 in arb_term(2, 2),
        ) {
            let x = BasisVector::basis_term(sym(), t1).unwrap();
            let y = BasisVector::basis_term(sym(), t2).unwrap();
            prop_assert_eq!(x.basis_star().basis_star(), x.clone());
            let left = x.basis_product(&y).unwrap().basis_star();
            let right = y.basis_star().basis_product(&x.basis_star()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(
                x.basis_star().filtration_degree(),
                x.filtration_degree()
            );
        }
    }
}
