//! Expression parser for tree-algebra, wreath-algebra and tensor expressions.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := leg ('ox' leg)*
//! leg     := atom ('*' atom)*
//! atom    := rational | 'a[' word ',' word ']' | 'p[' word ']' | '1_' n
//!          | 'P[' letter ',' letter ']' | 'N' letter '(' legexpr ')' | '(' legexpr ')'
//! legexpr := ['+'|'-'] leg (('+'|'-') leg)*
//! word    := 'e' | digit+
//! rational:= integer ['/' positive-integer]
//! ```
//!
//! `1` is the rational one, which doubles as the unit of every algebra.
//! Legs whose kind cannot be inferred (pure scalars) take the kind of the
//! same leg in other terms, or the caller's signature hint.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::{self, Element, EngineError, Generator, Monomial};
use crate::fincon::wreath::{self, WreathElement};
use crate::lincomb::{LinComb, Q};
use crate::tensor::{key, tensor_product, Leg, LegKind, TensorElement};
use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at byte {pos}: {source}")]
    Engine { pos: usize, source: EngineError },
    #[error("at byte {pos}: {source}")]
    Word { pos: usize, source: WordError },
    #[error("at byte {pos}: cannot combine {left} with {right}")]
    Kind { pos: usize, left: String, right: String },
    #[error("expected {expected}, found signature {found:?}")]
    Signature { expected: String, found: Vec<LegKind> },
}

#[derive(Clone)]
enum LegValue {
    Scalar(Q),
    Tree(Element),
    Wreath(WreathElement),
    Fun(usize, LinComb<Word>),
}

impl LegValue {
    fn name(&self) -> String {
        match self {
            LegValue::Scalar(_) => "scalar".into(),
            LegValue::Tree(_) => "tree element".into(),
            LegValue::Wreath(_) => "wreath element".into(),
            LegValue::Fun(n, _) => format!("function on level {n}"),
        }
    }

    fn kind(&self) -> Option<LegKind> {
        match self {
            LegValue::Scalar(_) => None,
            LegValue::Tree(_) => Some(LegKind::Tree),
            LegValue::Wreath(_) => Some(LegKind::Wreath),
            LegValue::Fun(n, _) => Some(LegKind::Fun(*n)),
        }
    }

    fn promote(self, kind: LegKind, alphabet: Alphabet) -> LegValue {
        match (self, kind) {
            (LegValue::Scalar(c), LegKind::Tree) => LegValue::Tree(engine::scalar(c)),
            (LegValue::Scalar(c), LegKind::Wreath) => LegValue::Wreath(wreath::wreath_one().scale(&c)),
            (LegValue::Scalar(c), LegKind::Fun(n)) => {
                LegValue::Fun(n, alphabet.words(n).into_iter().map(|w| (w, c.clone())).collect())
            }
            (v, _) => v,
        }
    }

    fn into_tensor(self, kind: LegKind, alphabet: Alphabet) -> TensorElement {
        match self.promote(kind, alphabet) {
            LegValue::Tree(e) => TensorElement::from_element(&e),
            LegValue::Wreath(e) => TensorElement::from_wreath(&e),
            LegValue::Fun(n, f) => TensorElement::from_terms(
                vec![LegKind::Fun(n)],
                f.iter().map(|(w, c)| (key([Leg::Fun(*w)]), c.clone())).collect(),
            ),
            LegValue::Scalar(_) => unreachable!("promoted"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: Alphabet,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn peek_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn digits(&mut self) -> PResult<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn word(&mut self) -> PResult<Word> {
        let pos = self.pos;
        if self.peek() == Some(b'e') {
            self.pos += 1;
            return Ok(Word::EMPTY);
        }
        let d = self.digits()?;
        self.alphabet.parse_word(d).map_err(|source| ParseError::Word { pos, source })
    }

    fn letter(&mut self) -> PResult<u8> {
        let pos = self.pos;
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_digit() => {
                self.pos += 1;
                let x = c - b'0';
                if (x as usize) < self.alphabet.size() {
                    Ok(x)
                } else {
                    Err(ParseError::Word {
                        pos,
                        source: WordError::LetterOutOfRange { letter: x, k: self.alphabet.size() },
                    })
                }
            }
            _ => self.err("expected a letter"),
        }
    }

    fn rational(&mut self) -> PResult<Q> {
        let n: BigInt = self.digits()?.parse().expect("digits");
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d: BigInt = self.digits()?.parse().expect("digits");
            if d.is_zero() {
                return self.err("zero denominator");
            }
            return Ok(Q::new(n, d));
        }
        Ok(Q::from_integer(n))
    }

    fn combine(&self, a: LegValue, b: LegValue, mul: bool) -> PResult<LegValue> {
        use LegValue::*;
        let kind_err = |a: &LegValue, b: &LegValue| ParseError::Kind { pos: self.pos, left: a.name(), right: b.name() };
        if mul {
            return Ok(match (a, b) {
                (Scalar(x), Scalar(y)) => Scalar(x * y),
                (Scalar(x), Tree(e)) | (Tree(e), Scalar(x)) => Tree(e.scale(&x)),
                (Scalar(x), Wreath(e)) | (Wreath(e), Scalar(x)) => Wreath(e.scale(&x)),
                (Scalar(x), Fun(n, f)) | (Fun(n, f), Scalar(x)) => Fun(n, f.scale(&x)),
                (Tree(x), Tree(y)) => Tree(engine::product(&x, &y)),
                (Wreath(x), Wreath(y)) => Wreath(wreath::wreath_product(&x, &y)),
                (Fun(n, f), Fun(m, g)) if n == m => {
                    Fun(n, f.bilinear(&g, |v, w| if v == w { LinComb::basis(*v) } else { LinComb::zero() }))
                }
                (a, b) => return Err(kind_err(&a, &b)),
            });
        }
        let (a, b) = match (a.kind(), b.kind()) {
            (None, Some(k)) => (a.promote(k, self.alphabet), b),
            (Some(k), None) => (a, b.promote(k, self.alphabet)),
            _ => (a, b),
        };
        Ok(match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(x + y),
            (Tree(x), Tree(y)) => Tree(x.add(&y)),
            (Wreath(x), Wreath(y)) => Wreath(x.add(&y)),
            (Fun(n, f), Fun(m, g)) if n == m => Fun(n, f.add(&g)),
            (a, b) => return Err(kind_err(&a, &b)),
        })
    }

    fn atom(&mut self) -> PResult<LegValue> {
        let pos = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.leg_expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b'a') => {
                self.pos += 1;
                self.expect(b'[')?;
                let u = self.word()?;
                self.expect(b',')?;
                let v = self.word()?;
                self.expect(b']')?;
                let g = Generator::new(u, v).map_err(|source| ParseError::Engine { pos, source })?;
                Ok(LegValue::Tree(engine::gen(g)))
            }
            Some(b'p') => {
                self.pos += 1;
                self.expect(b'[')?;
                let w = self.word()?;
                self.expect(b']')?;
                Ok(LegValue::Fun(w.len(), LinComb::basis(w)))
            }
            Some(b'P') => {
                self.pos += 1;
                self.expect(b'[')?;
                let x = self.letter()?;
                self.expect(b',')?;
                let y = self.letter()?;
                self.expect(b']')?;
                Ok(LegValue::Wreath(wreath::pgen(x, y)))
            }
            Some(b'N') => {
                self.pos += 1;
                let x = self.letter()?;
                self.expect(b'(')?;
                let inner = self.leg_expr()?;
                self.expect(b')')?;
                let e = match inner {
                    LegValue::Scalar(c) => engine::scalar(c),
                    LegValue::Tree(e) => e,
                    other => return Err(ParseError::Kind { pos, left: "N".into(), right: other.name() }),
                };
                Ok(LegValue::Wreath(wreath::nu(x, &e)))
            }
            Some(c) if c.is_ascii_digit() => {
                let r = self.rational()?;
                if self.src.get(self.pos) == Some(&b'_') {
                    if !r.is_one() {
                        return self.err("only 1_n denotes a function unit");
                    }
                    self.pos += 1;
                    let n: usize = self
                        .digits()?
                        .parse()
                        .map_err(|_| ParseError::Syntax { pos: self.pos, msg: "bad level".into() })?;
                    let f = self.alphabet.words(n).into_iter().map(|w| (w, Q::one())).collect();
                    return Ok(LegValue::Fun(n, f));
                }
                Ok(LegValue::Scalar(r))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn leg(&mut self) -> PResult<LegValue> {
        let mut v = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.atom()?;
            v = self.combine(v, rhs, true)?;
        }
        Ok(v)
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(false)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn leg_expr(&mut self) -> PResult<LegValue> {
        let negate = self.sign().unwrap_or(false);
        let mut v = self.leg()?;
        if negate {
            v = self.combine(LegValue::Scalar(-Q::one()), v, true)?;
        }
        while let Some(neg) = self.sign() {
            let mut rhs = self.leg()?;
            if neg {
                rhs = self.combine(LegValue::Scalar(-Q::one()), rhs, true)?;
            }
            v = self.combine(v, rhs, false)?;
        }
        if self.peek_str("ox") {
            return self.err("tensor separator inside parentheses");
        }
        Ok(v)
    }

    fn term(&mut self) -> PResult<Vec<LegValue>> {
        let mut legs = vec![self.leg()?];
        while self.peek_str("ox") {
            self.pos += 2;
            legs.push(self.leg()?);
        }
        Ok(legs)
    }

    fn expr(&mut self) -> PResult<Vec<(bool, usize, Vec<LegValue>)>> {
        let mut out = Vec::new();
        let negate = self.sign().unwrap_or(false);
        let pos = self.pos;
        out.push((negate, pos, self.term()?));
        while let Some(neg) = self.sign() {
            let pos = self.pos;
            out.push((neg, pos, self.term()?));
        }
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(out)
    }
}

/// Parses a tensor expression. `hint` fixes leg kinds that are scalar in
/// every term (e.g. `1 ox 1`).
pub fn parse_tensor(text: &str, alphabet: Alphabet, hint: Option<&[LegKind]>) -> Result<TensorElement, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, alphabet };
    let terms = p.expr()?;
    let arity = terms[0].2.len();
    if let Some((_, pos, _)) = terms.iter().find(|t| t.2.len() != arity) {
        return Err(ParseError::Syntax { pos: *pos, msg: "terms with different leg counts".into() });
    }
    if let Some(h) = hint {
        if h.len() != arity && !(arity == 1 && h.is_empty()) {
            return Err(ParseError::Signature { expected: format!("{} legs", h.len()), found: vec![] });
        }
    }
    let mut signature = Vec::with_capacity(arity);
    for i in 0..arity {
        let mut kind = hint.and_then(|h| h.get(i).copied());
        for (_, pos, legs) in &terms {
            if let Some(k) = legs[i].kind() {
                match kind {
                    None => kind = Some(k),
                    Some(prev) if prev != k => {
                        return Err(ParseError::Kind { pos: *pos, left: format!("{prev:?}"), right: format!("{k:?}") })
                    }
                    _ => {}
                }
            }
        }
        signature.push(kind.unwrap_or(LegKind::Tree));
    }
    if hint.is_some_and(|h| h.is_empty()) && terms.iter().all(|t| t.2[0].kind().is_none()) {
        let mut total = Q::zero();
        for (neg, _, legs) in terms {
            let LegValue::Scalar(c) = &legs[0] else { unreachable!() };
            total += if neg { -c.clone() } else { c.clone() };
        }
        return Ok(TensorElement::scalar(total));
    }
    let mut out = TensorElement::zero(signature.clone());
    for (neg, _, legs) in terms {
        let parts: Vec<TensorElement> =
            legs.into_iter().zip(&signature).map(|(v, &k)| v.into_tensor(k, alphabet)).collect();
        let t = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| tensor_product(&acc, p));
        let c = if neg { -Q::one() } else { Q::one() };
        out.add_assign_scaled(&t, &c).expect("signature unified");
    }
    Ok(out)
}

/// Parses a tree-algebra expression.
pub fn parse_element(text: &str, alphabet: Alphabet) -> Result<Element, ParseError> {
    let t = parse_tensor(text, alphabet, Some(&[LegKind::Tree]))?;
    t.to_element().ok_or_else(|| ParseError::Signature {
        expected: "a tree-algebra expression".into(),
        found: t.signature().to_vec(),
    })
}

/// Parses a wreath-algebra expression (`P[x,y]`, `N x (…)`).
pub fn parse_wreath(text: &str, alphabet: Alphabet) -> Result<WreathElement, ParseError> {
    let t = parse_tensor(text, alphabet, Some(&[LegKind::Wreath]))?;
    t.to_wreath().ok_or_else(|| ParseError::Signature {
        expected: "a wreath-algebra expression".into(),
        found: t.signature().to_vec(),
    })
}

pub fn parse_monomial(text: &str, alphabet: Alphabet) -> Result<Monomial, ParseError> {
    let e = parse_element(text, alphabet)?;
    match e.iter().collect::<Vec<_>>().as_slice() {
        [(m, c)] if c.is_one() => Ok((*m).clone()),
        _ => Err(ParseError::Syntax { pos: 0, msg: "expected a single monomial".into() }),
    }
}
