//! Text grammar for noncommutative polynomials, together with the two small
//! companion grammars used on the command line: weighted-basis vectors
//! (`e(j,k,l)` atoms) and Laurent polynomials in a unitary circle generator
//! (`u` atoms). Formatting is deterministic and round-trips through the
//! parser.
//!
//! The expression grammar, shared by all three value kinds:
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := factor (factor | '/' factor)*        (products by juxtaposition)
//! factor  := primary ['^' ['-'] integer]
//! primary := atom | 'q' | 'i' | integer | '(' expr ')'
//! ```
//!
//! where `atom` is a generator `z<digits>` with optional `'` (star) suffix in
//! the polynomial grammar, `e(<int>,<nat>,<nat>)` in the basis grammar, and
//! `u` in the Laurent grammar. Division is defined only by scalar-valued
//! subexpressions, powers of generator words must be non-negative, and the
//! imaginary unit `i` is accepted only when Gaussian coefficients are
//! enabled.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeffq::Scalar;
use crate::ncpoly::NCPoly;
use crate::{Error, Result};

/// Ambient data needed to interpret an expression: how many `z` generator
/// pairs are in scope (indices `0..=arity`) and whether Gaussian (complex
/// rational) coefficients are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExprContext {
    pub arity: u32,
    pub gaussian: bool,
}

impl ExprContext {
    pub fn new(arity: u32, gaussian: bool) -> Self {
        ExprContext { arity, gaussian }
    }
}

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Gen { index: u32, starred: bool },
    Q,
    ImagUnit,
    BasisAtom,
    CircleAtom,
    Int(String),
    Plus,
    Minus,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct PTok {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<PTok>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let pos = i;
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                toks.push(PTok { tok: Tok::Plus, pos });
                i += 1;
            }
            b'-' => {
                toks.push(PTok { tok: Tok::Minus, pos });
                i += 1;
            }
            b'/' => {
                toks.push(PTok { tok: Tok::Slash, pos });
                i += 1;
            }
            b'^' => {
                toks.push(PTok { tok: Tok::Caret, pos });
                i += 1;
            }
            b'(' => {
                toks.push(PTok { tok: Tok::LParen, pos });
                i += 1;
            }
            b')' => {
                toks.push(PTok { tok: Tok::RParen, pos });
                i += 1;
            }
            b',' => {
                toks.push(PTok { tok: Tok::Comma, pos });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push(PTok {
                    tok: Tok::Int(src[start..i].to_string()),
                    pos,
                });
            }
            b'z' => {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(Error::Syntax {
                        pos,
                        msg: "generator `z` must be followed by an index".to_string(),
                    });
                }
                let index: u32 = src[start..i].parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: "generator index out of range".to_string(),
                })?;
                let starred = i < bytes.len() && bytes[i] == b'\'';
                if starred {
                    i += 1;
                }
                toks.push(PTok {
                    tok: Tok::Gen { index, starred },
                    pos,
                });
            }
            b'q' => {
                toks.push(PTok { tok: Tok::Q, pos });
                i += 1;
            }
            b'i' => {
                toks.push(PTok { tok: Tok::ImagUnit, pos });
                i += 1;
            }
            b'e' => {
                toks.push(PTok { tok: Tok::BasisAtom, pos });
                i += 1;
            }
            b'u' => {
                toks.push(PTok { tok: Tok::CircleAtom, pos });
                i += 1;
            }
            b'\'' => {
                return Err(Error::Syntax {
                    pos,
                    msg: "star mark `'` may only follow a generator".to_string(),
                });
            }
            _ => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{}`", &src[pos..pos + 1]),
                });
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Generic expression evaluation
// ---------------------------------------------------------------------------

/// Value kinds the shared expression grammar can evaluate into. Each atom
/// hook rejects atoms that its grammar does not contain.
trait ExprValue: Sized + Clone {
    fn from_scalar(s: Scalar, ctx: &ExprContext) -> Self;
    fn generator(index: u32, starred: bool, pos: usize, ctx: &ExprContext) -> Result<Self>;
    fn basis_atom(j: i64, k: u64, l: u64, pos: usize, ctx: &ExprContext) -> Result<Self>;
    fn circle_atom(pos: usize, ctx: &ExprContext) -> Result<Self>;
    /// `Some(c)` when the value is `c` times the identity.
    fn as_scalar(&self) -> Option<Scalar>;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self, pos: usize) -> Result<Self>;
    fn pow(&self, e: i64, pos: usize) -> Result<Self>;
}

struct Parser<'a> {
    toks: Vec<PTok>,
    i: usize,
    ctx: &'a ExprContext,
    len: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &str, ctx: &'a ExprContext) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            i: 0,
            ctx,
            len: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|p| &p.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|p| p.pos).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<PTok> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize> {
        let pos = self.pos();
        match self.bump() {
            Some(p) if p.tok == want => Ok(p.pos),
            _ => Err(Error::Syntax {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn parse_expr<V: ExprValue>(&mut self) -> Result<V> {
        let mut negate = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            negate = true;
        }
        let mut acc = self.parse_term::<V>()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.parse_term::<V>()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.parse_term::<V>()?;
                    acc = acc.add(&t.neg());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term<V: ExprValue>(&mut self) -> Result<V> {
        let mut acc = self.parse_factor::<V>()?;
        loop {
            match self.peek() {
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.bump();
                    let rhs = self.parse_factor::<V>()?;
                    let s = rhs.as_scalar().ok_or_else(|| Error::Syntax {
                        pos,
                        msg: "division is only defined by scalar-valued expressions".to_string(),
                    })?;
                    let inv = s.inv()?;
                    acc = acc.mul(&V::from_scalar(inv, self.ctx), pos)?;
                }
                Some(
                    Tok::Gen { .. }
                    | Tok::Q
                    | Tok::ImagUnit
                    | Tok::BasisAtom
                    | Tok::CircleAtom
                    | Tok::Int(_)
                    | Tok::LParen,
                ) => {
                    let pos = self.pos();
                    let rhs = self.parse_factor::<V>()?;
                    acc = acc.mul(&rhs, pos)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_factor<V: ExprValue>(&mut self) -> Result<V> {
        let base = self.parse_primary::<V>()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let caret_pos = self.pos();
            self.bump();
            let e = self.parse_signed_int(caret_pos)?;
            return base.pow(e, caret_pos);
        }
        Ok(base)
    }

    fn parse_signed_int(&mut self, caret_pos: usize) -> Result<i64> {
        let mut neg = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            neg = true;
        }
        let pos = self.pos();
        match self.bump() {
            Some(PTok {
                tok: Tok::Int(digits),
                ..
            }) => {
                let v: i64 = digits.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: "exponent out of range".to_string(),
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(Error::Syntax {
                pos: caret_pos,
                msg: "`^` must be followed by an integer exponent".to_string(),
            }),
        }
    }

    fn parse_primary<V: ExprValue>(&mut self) -> Result<V> {
        let pos = self.pos();
        match self.bump() {
            Some(PTok {
                tok: Tok::Gen { index, starred },
                pos,
            }) => V::generator(index, starred, pos, self.ctx),
            Some(PTok { tok: Tok::Q, .. }) => {
                Ok(V::from_scalar(Scalar::q_power(1), self.ctx))
            }
            Some(PTok {
                tok: Tok::ImagUnit,
                pos,
            }) => {
                if !self.ctx.gaussian {
                    return Err(Error::GaussianDisabled { pos });
                }
                Ok(V::from_scalar(Scalar::i(), self.ctx))
            }
            Some(PTok {
                tok: Tok::Int(digits),
                pos,
            }) => {
                let n = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| {
                    Error::Syntax {
                        pos,
                        msg: "invalid integer literal".to_string(),
                    }
                })?;
                Ok(V::from_scalar(
                    Scalar::from_rat(BigRational::from_integer(n)),
                    self.ctx,
                ))
            }
            Some(PTok {
                tok: Tok::BasisAtom,
                pos,
            }) => {
                self.expect(Tok::LParen, "`(` after `e`")?;
                let j = self.parse_signed_arg()?;
                self.expect(Tok::Comma, "`,` between basis indices")?;
                let k = self.parse_nat_arg()?;
                self.expect(Tok::Comma, "`,` between basis indices")?;
                let l = self.parse_nat_arg()?;
                self.expect(Tok::RParen, "`)` closing basis indices")?;
                V::basis_atom(j, k, l, pos, self.ctx)
            }
            Some(PTok {
                tok: Tok::CircleAtom,
                pos,
            }) => V::circle_atom(pos, self.ctx),
            Some(PTok {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.parse_expr::<V>()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(inner)
            }
            _ => Err(Error::Syntax {
                pos,
                msg: "expected a generator, number, or parenthesized expression".to_string(),
            }),
        }
    }

    fn parse_signed_arg(&mut self) -> Result<i64> {
        let mut neg = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            neg = true;
        }
        let pos = self.pos();
        match self.bump() {
            Some(PTok {
                tok: Tok::Int(digits),
                ..
            }) => {
                let v: i64 = digits.parse().map_err(|_| Error::Syntax {
                    pos,
                    msg: "index out of range".to_string(),
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(Error::Syntax {
                pos,
                msg: "expected an integer index".to_string(),
            }),
        }
    }

    fn parse_nat_arg(&mut self) -> Result<u64> {
        let pos = self.pos();
        match self.bump() {
            Some(PTok {
                tok: Tok::Int(digits),
                ..
            }) => digits.parse().map_err(|_| Error::Syntax {
                pos,
                msg: "index out of range".to_string(),
            }),
            _ => Err(Error::Syntax {
                pos,
                msg: "expected a non-negative integer index".to_string(),
            }),
        }
    }

    fn finish<V: ExprValue>(mut self) -> Result<V> {
        let v = self.parse_expr::<V>()?;
        if self.i < self.toks.len() {
            return Err(Error::Syntax {
                pos: self.pos(),
                msg: "unexpected trailing input".to_string(),
            });
        }
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Value-kind implementations
// ---------------------------------------------------------------------------

impl ExprValue for NCPoly {
    fn from_scalar(s: Scalar, ctx: &ExprContext) -> Self {
        NCPoly::term(ctx.arity, crate::ncpoly::Word::empty(), s)
    }

    fn generator(index: u32, starred: bool, pos: usize, ctx: &ExprContext) -> Result<Self> {
        if index > ctx.arity {
            return Err(Error::UnknownGenerator {
                pos,
                index,
                arity: ctx.arity,
            });
        }
        NCPoly::generator(ctx.arity, index, starred)
    }

    fn basis_atom(_j: i64, _k: u64, _l: u64, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "basis monomials are not part of the polynomial grammar".to_string(),
        })
    }

    fn circle_atom(pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "the circle generator is not part of the polynomial grammar".to_string(),
        })
    }

    fn as_scalar(&self) -> Option<Scalar> {
        NCPoly::as_scalar(self)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn neg(&self) -> Self {
        NCPoly::neg(self)
    }

    fn mul(&self, other: &Self, _pos: usize) -> Result<Self> {
        self.checked_mul(other)
    }

    fn pow(&self, e: i64, pos: usize) -> Result<Self> {
        if let Some(s) = NCPoly::as_scalar(self) {
            let ctx = ExprContext::new(self.arity(), true);
            return Ok(<Self as ExprValue>::from_scalar(s.pow(e)?, &ctx));
        }
        if e < 0 {
            return Err(Error::NegativeWordPower { pos });
        }
        let mut acc = <Self as ExprValue>::from_scalar(
            Scalar::one(),
            &ExprContext::new(self.arity(), true),
        );
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }
}

/// A parsed basis-grammar expression: finitely many `(j, k, l)` monomials
/// with scalar weights. Scalars embed as multiples of `(0, 0, 0)`, which
/// names the identity. The parser performs no algebra product between two
/// non-identity monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawBasisExpr {
    pub terms: BTreeMap<(i64, u64, u64), Scalar>,
}

impl RawBasisExpr {
    fn insert(&mut self, key: (i64, u64, u64), c: Scalar) {
        let cur = self.terms.remove(&key).unwrap_or_else(Scalar::zero);
        let sum = &cur + &c;
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return RawBasisExpr {
                terms: BTreeMap::new(),
            };
        }
        RawBasisExpr {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c * s))
                .collect(),
        }
    }
}

impl ExprValue for RawBasisExpr {
    fn from_scalar(s: Scalar, _ctx: &ExprContext) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert((0i64, 0u64, 0u64), s);
        }
        RawBasisExpr { terms }
    }

    fn generator(_index: u32, _starred: bool, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "generators are not part of the basis grammar".to_string(),
        })
    }

    fn basis_atom(j: i64, k: u64, l: u64, _pos: usize, _ctx: &ExprContext) -> Result<Self> {
        let mut terms = BTreeMap::new();
        terms.insert((j, k, l), Scalar::one());
        Ok(RawBasisExpr { terms })
    }

    fn circle_atom(pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "the circle generator is not part of the basis grammar".to_string(),
        })
    }

    fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let ((j, k, l), c) = self.terms.iter().next().unwrap();
                (*j == 0 && *k == 0 && *l == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        RawBasisExpr {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    fn mul(&self, other: &Self, pos: usize) -> Result<Self> {
        if let Some(s) = ExprValue::as_scalar(self) {
            return Ok(other.scale(&s));
        }
        if let Some(s) = ExprValue::as_scalar(other) {
            return Ok(self.scale(&s));
        }
        Err(Error::Syntax {
            pos,
            msg: "products of basis monomials are not part of the basis grammar".to_string(),
        })
    }

    fn pow(&self, e: i64, pos: usize) -> Result<Self> {
        if let Some(s) = ExprValue::as_scalar(self) {
            let ctx = ExprContext::new(0, true);
            return Ok(<Self as ExprValue>::from_scalar(s.pow(e)?, &ctx));
        }
        match e {
            0 => Ok(<Self as ExprValue>::from_scalar(
                Scalar::one(),
                &ExprContext::new(0, true),
            )),
            1 => Ok(self.clone()),
            _ => Err(Error::Syntax {
                pos,
                msg: "powers of basis monomials are not part of the basis grammar".to_string(),
            }),
        }
    }
}

/// A parsed Laurent-grammar expression: finitely many integer powers of the
/// circle generator with scalar weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLaurentExpr {
    pub terms: BTreeMap<i64, Scalar>,
}

impl RawLaurentExpr {
    fn insert(&mut self, key: i64, c: Scalar) {
        let cur = self.terms.remove(&key).unwrap_or_else(Scalar::zero);
        let sum = &cur + &c;
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }
}

impl ExprValue for RawLaurentExpr {
    fn from_scalar(s: Scalar, _ctx: &ExprContext) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(0i64, s);
        }
        RawLaurentExpr { terms }
    }

    fn generator(_index: u32, _starred: bool, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "generators are not part of the Laurent grammar".to_string(),
        })
    }

    fn basis_atom(_j: i64, _k: u64, _l: u64, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "basis monomials are not part of the Laurent grammar".to_string(),
        })
    }

    fn circle_atom(_pos: usize, _ctx: &ExprContext) -> Result<Self> {
        let mut terms = BTreeMap::new();
        terms.insert(1i64, Scalar::one());
        Ok(RawLaurentExpr { terms })
    }

    fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                (*e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        RawLaurentExpr {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    fn mul(&self, other: &Self, _pos: usize) -> Result<Self> {
        let mut out = RawLaurentExpr {
            terms: BTreeMap::new(),
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        Ok(out)
    }

    fn pow(&self, e: i64, pos: usize) -> Result<Self> {
        if e == 0 {
            return Ok(<Self as ExprValue>::from_scalar(
                Scalar::one(),
                &ExprContext::new(0, true),
            ));
        }
        if e < 0 {
            if self.terms.len() != 1 {
                return Err(Error::Syntax {
                    pos,
                    msg: "negative powers require a single-term Laurent expression".to_string(),
                });
            }
            let (exp, c) = self.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            terms.insert(exp * e, c.pow(e)?);
            return Ok(RawLaurentExpr { terms });
        }
        let mut acc = <Self as ExprValue>::from_scalar(Scalar::one(), &ExprContext::new(0, true));
        for _ in 0..e {
            acc = acc.mul(self, pos)?;
        }
        Ok(acc)
    }
}

/// Plain scalar expressions (no generators of any kind).
#[derive(Clone, Debug)]
struct ScalarExpr(Scalar);

impl ExprValue for ScalarExpr {
    fn from_scalar(s: Scalar, _ctx: &ExprContext) -> Self {
        ScalarExpr(s)
    }

    fn generator(_index: u32, _starred: bool, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "generators are not allowed in a scalar expression".to_string(),
        })
    }

    fn basis_atom(_j: i64, _k: u64, _l: u64, pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "basis monomials are not allowed in a scalar expression".to_string(),
        })
    }

    fn circle_atom(pos: usize, _ctx: &ExprContext) -> Result<Self> {
        Err(Error::Syntax {
            pos,
            msg: "the circle generator is not allowed in a scalar expression".to_string(),
        })
    }

    fn as_scalar(&self) -> Option<Scalar> {
        Some(self.0.clone())
    }

    fn add(&self, other: &Self) -> Self {
        ScalarExpr(&self.0 + &other.0)
    }

    fn neg(&self) -> Self {
        ScalarExpr(-&self.0)
    }

    fn mul(&self, other: &Self, _pos: usize) -> Result<Self> {
        Ok(ScalarExpr(&self.0 * &other.0))
    }

    fn pow(&self, e: i64, _pos: usize) -> Result<Self> {
        Ok(ScalarExpr(self.0.pow(e)?))
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Parse a noncommutative polynomial over generators `z0..z<arity>` and
/// their stars.
pub fn parse_poly(src: &str, ctx: &ExprContext) -> Result<NCPoly> {
    Parser::new(src, ctx)?.finish::<NCPoly>()
}

/// Parse a weighted sum of basis monomials `e(j,k,l)`.
pub fn parse_basis_terms(src: &str, ctx: &ExprContext) -> Result<RawBasisExpr> {
    Parser::new(src, ctx)?.finish::<RawBasisExpr>()
}

/// Parse a Laurent polynomial in the circle generator `u`.
pub fn parse_laurent_terms(src: &str, ctx: &ExprContext) -> Result<RawLaurentExpr> {
    Parser::new(src, ctx)?.finish::<RawLaurentExpr>()
}

/// Parse a scalar coefficient expression (rational functions of `q`, and
/// `i` when Gaussian coefficients are enabled).
pub fn parse_scalar(src: &str, gaussian: bool) -> Result<Scalar> {
    let ctx = ExprContext::new(0, gaussian);
    Ok(Parser::new(src, &ctx)?.finish::<ScalarExpr>()?.0)
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Render a coefficient for placement in front of a monomial: `None` for an
/// implicit `1`, a bare token when the scalar is a positive-integer multiple
/// of a power of `q`, and a parenthesized expression otherwise. The scalar
/// is assumed to be sign-normalized already.
pub(crate) fn coeff_prefix(c_abs: &Scalar) -> Option<String> {
    if c_abs.is_one() {
        None
    } else if c_abs.is_plain_monomial() {
        Some(c_abs.to_string())
    } else {
        Some(format!("({c_abs})"))
    }
}

fn push_term(out: &mut String, first: bool, neg: bool, coeff: Option<String>, body: Option<String>) {
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    match (coeff, body) {
        (None, None) => out.push('1'),
        (None, Some(b)) => out.push_str(&b),
        (Some(c), None) => out.push_str(&c),
        (Some(c), Some(b)) => {
            out.push_str(&c);
            out.push(' ');
            out.push_str(&b);
        }
    }
}

/// Deterministic text form of a polynomial; `parse_poly` inverts it.
pub fn format_poly(p: &NCPoly) -> String {
    if p.is_zero() {
        return String::from("0");
    }
    let mut out = String::new();
    let mut first = true;
    for (w, c) in p.terms() {
        let neg = c.display_sign() < 0;
        let c_abs = if neg { -c } else { c.clone() };
        let body = (!w.is_empty()).then(|| w.to_string());
        push_term(&mut out, first, neg, coeff_prefix(&c_abs), body);
        first = false;
    }
    out
}

/// Deterministic text form of a basis expression; `parse_basis_terms`
/// inverts it.
pub fn format_basis_terms(terms: &BTreeMap<(i64, u64, u64), Scalar>) -> String {
    if terms.is_empty() {
        return String::from("0");
    }
    let mut out = String::new();
    let mut first = true;
    for ((j, k, l), c) in terms {
        let neg = c.display_sign() < 0;
        let c_abs = if neg { -c } else { c.clone() };
        let body = if *j == 0 && *k == 0 && *l == 0 {
            None
        } else {
            Some(format!("e({j},{k},{l})"))
        };
        push_term(&mut out, first, neg, coeff_prefix(&c_abs), body);
        first = false;
    }
    out
}

/// Deterministic text form of a Laurent expression; `parse_laurent_terms`
/// inverts it.
pub fn format_laurent_terms(terms: &BTreeMap<i64, Scalar>) -> String {
    if terms.is_empty() {
        return String::from("0");
    }
    let mut out = String::new();
    let mut first = true;
    for (e, c) in terms {
        let neg = c.display_sign() < 0;
        let c_abs = if neg { -c } else { c.clone() };
        let body = match *e {
            0 => None,
            1 => Some(String::from("u")),
            k => Some(format!("u^{k}")),
        };
        push_term(&mut out, first, neg, coeff_prefix(&c_abs), body);
        first = false;
    }
    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffq::{rat, QPoly, QRat};
    use crate::ncpoly::{Letter, Word};
    use proptest::prelude::*;

    fn ctx(arity: u32) -> ExprContext {
        ExprContext::new(arity, false)
    }

    fn gctx(arity: u32) -> ExprContext {
        ExprContext::new(arity, true)
    }

    #[test]
    fn parses_products_and_sums() {
        let p = parse_poly("z0' z0 - q^2 z1 z1'", &ctx(1)).unwrap();
        assert_eq!(p.num_terms(), 2);
        let w1 = Word::from_letters(alloc::vec![Letter::starred(0), Letter::plain(0)]);
        let w2 = Word::from_letters(alloc::vec![Letter::plain(1), Letter::starred(1)]);
        assert!(p.coeff(&w1).is_one());
        assert_eq!(p.coeff(&w2), -&Scalar::q_power(2));
    }

    #[test]
    fn scalar_division_folds_into_coefficients() {
        let p = parse_poly("(1-q^2)/(1+q) z0", &ctx(1)).unwrap();
        let w = Word::single(Letter::plain(0));
        let one_minus_q = Scalar::from(
            QRat::new(
                QPoly::from_coeffs(alloc::vec![rat(1, 1), rat(-1, 1)]),
                QPoly::one(),
            )
            .unwrap(),
        );
        assert_eq!(p.coeff(&w), one_minus_q);
    }

    #[test]
    fn word_powers_expand() {
        let p = parse_poly("z1^3", &ctx(1)).unwrap();
        let w = Word::from_letters(alloc::vec![Letter::plain(1); 3]);
        assert!(p.coeff(&w).is_one());
        let q = parse_poly("z0^0", &ctx(1)).unwrap();
        assert!(NCPoly::as_scalar(&q).unwrap().is_one());
    }

    #[test]
    fn rejects_unknown_generator() {
        match parse_poly("z2", &ctx(1)) {
            Err(Error::UnknownGenerator { index: 2, arity: 1, .. }) => {}
            other => panic!("expected unknown-generator error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_word_power() {
        match parse_poly("z0^-1", &ctx(1)) {
            Err(Error::NegativeWordPower { .. }) => {}
            other => panic!("expected negative-power error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_imaginary_unit_without_gaussian_mode() {
        match parse_poly("i z0", &ctx(1)) {
            Err(Error::GaussianDisabled { pos: 0 }) => {}
            other => panic!("expected gaussian-disabled error, got {other:?}"),
        }
        let p = parse_poly("i z0", &gctx(1)).unwrap();
        let w = Word::single(Letter::plain(0));
        assert_eq!(p.coeff(&w), Scalar::i());
    }

    #[test]
    fn rejects_division_by_nonscalar_and_by_zero() {
        match parse_poly("z0 / z1", &ctx(1)) {
            Err(Error::Syntax { .. }) => {}
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_poly("z0 / 0", &ctx(1)) {
            Err(Error::DivisionByZero) => {}
            other => panic!("expected division-by-zero, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_poly("z0 + ", &ctx(1)) {
            Err(Error::Syntax { pos: 5, .. }) => {}
            other => panic!("expected syntax error at 5, got {other:?}"),
        }
        match parse_poly("z0 $", &ctx(1)) {
            Err(Error::Syntax { pos: 3, .. }) => {}
            other => panic!("expected syntax error at 3, got {other:?}"),
        }
    }

    #[test]
    fn formats_match_expected_shapes() {
        let p = parse_poly("z0 z0' + (1 - q^2) z1 z1'", &ctx(1)).unwrap();
        assert_eq!(format_poly(&p), "z0 z0' + (1-q^2) z1 z1'");
        let z = NCPoly::zero(1);
        assert_eq!(format_poly(&z), "0");
        let c = parse_poly("-3", &ctx(1)).unwrap();
        assert_eq!(format_poly(&c), "-3");
        let m = parse_poly("2 q^3 z0 z0", &ctx(1)).unwrap();
        assert_eq!(format_poly(&m), "2q^3 z0^2");
        let f = parse_poly("8/9 z1", &ctx(1)).unwrap();
        assert_eq!(format_poly(&f), "(8/9) z1");
    }

    #[test]
    fn laurent_grammar_roundtrip() {
        let v = parse_laurent_terms("(3/5 + (4/5)i) u - u^-2 + 7", &gctx(0)).unwrap();
        assert_eq!(v.terms.len(), 3);
        let text = format_laurent_terms(&v.terms);
        assert_eq!(text, "-u^-2 + 7 + (3/5+(4/5)i) u");
        let back = parse_laurent_terms(&text, &gctx(0)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn basis_grammar_roundtrip() {
        let v = parse_basis_terms("q e(1,1,0) - e(0,2,2) + e(-1,0,3)/q^2", &ctx(0)).unwrap();
        assert_eq!(v.terms.len(), 3);
        let text = format_basis_terms(&v.terms);
        let back = parse_basis_terms(&text, &ctx(0)).unwrap();
        assert_eq!(back, v);
        match parse_basis_terms("e(0,1,0) e(1,0,0)", &ctx(0)) {
            Err(Error::Syntax { .. }) => {}
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn laurent_negative_powers_invert_single_terms() {
        let v = parse_laurent_terms("(2 u)^-3", &ctx(0)).unwrap();
        assert_eq!(v.terms.len(), 1);
        let (e, c) = v.terms.iter().next().unwrap();
        assert_eq!(*e, -3);
        assert_eq!(c.clone(), Scalar::from_rat(rat(1, 8)));
        assert!(parse_laurent_terms("(u + 1)^-1", &ctx(0)).is_err());
    }

    fn arb_scalar(gaussian: bool) -> impl Strategy<Value = Scalar> {
        let small = || {
            (any::<i8>(), 1u8..5, 0u8..3).prop_map(|(n, d, e)| {
                let base = Scalar::from_rat(rat(n as i64, d as i64));
                &base * &Scalar::q_power(e as i64)
            })
        };
        (small(), small(), any::<bool>()).prop_map(move |(re, im, use_im)| {
            if gaussian && use_im {
                &re + &(&im * &Scalar::i())
            } else {
                re
            }
        })
    }

    fn arb_word(arity: u32) -> impl Strategy<Value = Word> {
        proptest::collection::vec((0..=arity, any::<bool>()), 0..4).prop_map(|ls| {
            Word::from_letters(
                ls.into_iter()
                    .map(|(i, s)| Letter { index: i, starred: s })
                    .collect(),
            )
        })
    }

    fn arb_poly(arity: u32, gaussian: bool) -> impl Strategy<Value = NCPoly> {
        proptest::collection::vec((arb_word(arity), arb_scalar(gaussian)), 0..5).prop_map(
            move |terms| {
                let mut p = NCPoly::zero(arity);
                for (w, c) in terms {
                    p.add_term(w, c);
                }
                p
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn format_then_parse_roundtrips(p in arb_poly(2, false)) {
            let text = format_poly(&p);
            let back = parse_poly(&text, &ctx(2)).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn format_then_parse_roundtrips_gaussian(p in arb_poly(1, true)) {
            let text = format_poly(&p);
            let back = parse_poly(&text, &gctx(1)).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
