//! Noncommutative *-polynomials in the generators `z0..zn` and their
//! adjoints.
//!
//! A [`Word`] is a finite product of [`Letter`]s; an [`NCPoly`] is a finite
//! linear combination of words with [`Scalar`] coefficients over a fixed
//! generator set (its *arity* `n`). Terms are kept in a [`BTreeMap`] under
//! the graded-lexicographic word order, so iteration (and hence printing and
//! serialization) is deterministic and zero coefficients are never stored.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::coeffq::Scalar;
use crate::{Error, Result};

/// One generator occurrence: `z{index}` or its adjoint `z{index}'`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Letter {
    pub index: u32,
    pub starred: bool,
}

impl Letter {
    pub fn plain(index: u32) -> Letter {
        Letter {
            index,
            starred: false,
        }
    }

    pub fn starred(index: u32) -> Letter {
        Letter {
            index,
            starred: true,
        }
    }

    /// The adjoint letter.
    pub fn star(self) -> Letter {
        Letter {
            index: self.index,
            starred: !self.starred,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{}{}", self.index, if self.starred { "'" } else { "" })
    }
}

/// A product of letters; the empty word is the identity.
///
/// Words are ordered by length first, then lexicographically by
/// `(index, starred)` — a total order compatible with printing and with the
/// rewrite system's choice of representatives.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn single(l: Letter) -> Word {
        Word(alloc::vec![l])
    }

    pub fn from_letters(ls: Vec<Letter>) -> Word {
        Word(ls)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Replaces `self[at .. at + len]` by `mid`.
    pub fn splice(&self, at: usize, len: usize, mid: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() - len + mid.len());
        v.extend_from_slice(&self.0[..at]);
        v.extend_from_slice(&mid.0);
        v.extend_from_slice(&self.0[at + len..]);
        Word(v)
    }

    /// The adjoint word: reversed order, every letter starred/unstarred.
    pub fn star(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.star()).collect())
    }

    /// Largest generator index occurring (None for the empty word).
    pub fn max_index(&self) -> Option<u32> {
        self.0.iter().map(|l| l.index).max()
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    /// Space-separated letters with runs collapsed into powers, e.g.
    /// `z0 z1^2 z1'`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Noncommutative *-polynomial over the generators `z0..zn`.
///
/// The arity `n` is part of the value; binary operations require equal
/// arities. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NCPoly {
    arity: u32,
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero(arity: u32) -> NCPoly {
        NCPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: u32) -> NCPoly {
        NCPoly::term(arity, Word::empty(), Scalar::one())
    }

    /// The generator `z{index}` (or its adjoint). Errors when `index > n`.
    pub fn generator(arity: u32, index: u32, starred: bool) -> Result<NCPoly> {
        if index > arity {
            return Err(Error::UnknownGenerator {
                pos: 0,
                index,
                arity,
            });
        }
        Ok(NCPoly::term(
            arity,
            Word::single(Letter {
                index,
                starred,
            }),
            Scalar::one(),
        ))
    }

    /// Single-term polynomial `coeff·word` (dropped when `coeff = 0`).
    pub fn term(arity: u32, word: Word, coeff: Scalar) -> NCPoly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        NCPoly { arity, terms }
    }

    pub fn from_terms(arity: u32, it: impl IntoIterator<Item = (Word, Scalar)>) -> NCPoly {
        let mut p = NCPoly::zero(arity);
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// Terms in the canonical word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `Some(c)` when the polynomial is the scalar `c` times the identity
    /// (including zero).
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (w, c) = self.terms.iter().next().unwrap();
                w.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Adds `coeff·word` in place, removing the entry if it cancels.
    pub fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &coeff;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn require_same_arity(&self, other: &NCPoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.require_same_arity(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> NCPoly {
        if s.is_zero() {
            return NCPoly::zero(self.arity);
        }
        NCPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c * s))
                .collect(),
        }
    }

    /// Bilinear product: words concatenate, coefficients multiply.
    pub fn checked_mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.require_same_arity(other)?;
        let mut out = NCPoly::zero(self.arity);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// The *-algebra involution: words reverse with letters starred,
    /// coefficients conjugate.
    pub fn involution(&self) -> NCPoly {
        NCPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.star(), c.conj()))
                .collect(),
        }
    }

    /// The t-deformed commutator `a·b − t·b·a`.
    pub fn q_commutator(&self, other: &NCPoly, t: &Scalar) -> Result<NCPoly> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        ab.checked_sub(&ba.scale(t))
    }

    /// Substitutes a fixed rational for `q` in every coefficient.
    pub fn eval_coeffs(&self, at: &crate::coeffq::Rat) -> Result<NCPoly> {
        let mut out = NCPoly::zero(self.arity);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.eval(at)?);
        }
        Ok(out)
    }
}

impl core::ops::Add for &NCPoly {
    type Output = NCPoly;
    /// Panics on arity mismatch; use [`NCPoly::checked_add`] for fallible
    /// addition of externally supplied operands.
    fn add(self, rhs: &NCPoly) -> NCPoly {
        self.checked_add(rhs).expect("arity mismatch in +")
    }
}

impl core::ops::Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self.checked_sub(rhs).expect("arity mismatch in -")
    }
}

impl core::ops::Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.checked_mul(rhs).expect("arity mismatch in *")
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffq::{rat, Scalar};

    fn z(i: u32) -> Letter {
        Letter::plain(i)
    }

    fn zs(i: u32) -> Letter {
        Letter::starred(i)
    }

    #[test]
    fn word_order_is_graded_lexicographic() {
        let a = Word::from_letters(alloc::vec![z(1)]);
        let b = Word::from_letters(alloc::vec![z(0), z(0)]);
        let c = Word::from_letters(alloc::vec![z(0), zs(0)]);
        assert!(a < b, "shorter words come first");
        assert!(b < c, "plain letter sorts before its adjoint");
        assert!(Word::empty() < a);
    }

    #[test]
    fn involution_is_an_antihomomorphism() {
        let n = 1;
        let a = NCPoly::generator(n, 0, false).unwrap();
        let b = NCPoly::generator(n, 1, false).unwrap();
        let ab = a.checked_mul(&b).unwrap();
        let expected = b.involution().checked_mul(&a.involution()).unwrap();
        assert_eq!(ab.involution(), expected);
        assert_eq!(ab.involution().involution(), ab);
    }

    #[test]
    fn involution_conjugates_coefficients() {
        let p = NCPoly::term(0, Word::single(z(0)), Scalar::i());
        let q = p.involution();
        assert_eq!(q.coeff(&Word::single(zs(0))), -&Scalar::i());
    }

    #[test]
    fn q_commutator_matches_definition() {
        let n = 1;
        let a = NCPoly::generator(n, 0, false).unwrap();
        let b = NCPoly::generator(n, 1, false).unwrap();
        let t = Scalar::q_power(1);
        let got = a.q_commutator(&b, &t).unwrap();
        let expected = a
            .checked_mul(&b)
            .unwrap()
            .checked_sub(&b.checked_mul(&a).unwrap().scale(&t))
            .unwrap();
        assert_eq!(got, expected);
        // [a, a]_1 = 0.
        assert!(a.q_commutator(&a, &Scalar::one()).unwrap().is_zero());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let a = NCPoly::one(1);
        let b = NCPoly::one(2);
        assert!(matches!(
            a.checked_add(&b),
            Err(crate::Error::ArityMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            NCPoly::generator(1, 2, false),
            Err(crate::Error::UnknownGenerator { .. })
        ));
    }

    #[test]
    fn cancelling_terms_vanish() {
        let n = 0;
        let w = Word::single(z(0));
        let mut p = NCPoly::term(n, w.clone(), Scalar::from_rat(rat(2, 3)));
        p.add_term(w.clone(), Scalar::from_rat(rat(-2, 3)));
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn word_display_collapses_runs() {
        let w = Word::from_letters(alloc::vec![z(0), z(1), z(1), zs(1)]);
        assert_eq!(w.to_string(), "z0 z1^2 z1'");
        assert_eq!(Word::empty().to_string(), "1");
    }
}
