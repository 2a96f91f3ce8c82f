//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: `!`, `(.)`, `(+)`, `/\`, `\/`, `->`, `<->`.
//! `->` and `<->` associate to the right, the other binary connectives to
//! the left. `V{..;..}` is a finite disjunction, `W{..}` a finite
//! conjunction; `V[template; seq=..; mono=..]` and `W[..]` are schematic
//! families with `@s` marking the scalar hole.

use num::BigInt;
use std::str::FromStr;

use super::{CountableFamily, Formula, MonotoneHint, Scalar, SeqDescriptor};
use crate::rational::{Rat, Rational01};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Bang,
    Arrow,
    IffOp,
    OPlusOp,
    OTimesOp,
    OrOp,
    AndOp,
    Semi,
    Comma,
    EqSign,
    Slash,
    Hole,
    Int(BigInt),
    Ident(String),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lex = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(tok) = lex.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn peek(&self, offset: usize) -> Option<u8> {
        self.src.get(self.pos + offset).copied()
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while matches!(self.peek(0), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek(0) else {
            return Ok(None);
        };
        let tok = match c {
            b'(' => match (self.peek(1), self.peek(2)) {
                (Some(b'+'), Some(b')')) => {
                    self.pos += 3;
                    Tok::OPlusOp
                }
                (Some(b'.'), Some(b')')) => {
                    self.pos += 3;
                    Tok::OTimesOp
                }
                _ => {
                    self.pos += 1;
                    Tok::LParen
                }
            },
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'{' => {
                self.pos += 1;
                Tok::LBrace
            }
            b'}' => {
                self.pos += 1;
                Tok::RBrace
            }
            b'[' => {
                self.pos += 1;
                Tok::LBracket
            }
            b']' => {
                self.pos += 1;
                Tok::RBracket
            }
            b'!' => {
                self.pos += 1;
                Tok::Bang
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'=' => {
                self.pos += 1;
                Tok::EqSign
            }
            b'-' => {
                if self.peek(1) == Some(b'>') {
                    self.pos += 2;
                    Tok::Arrow
                } else {
                    return Err(ParseError::new(start, "expected `->`"));
                }
            }
            b'<' => {
                if self.peek(1) == Some(b'-') && self.peek(2) == Some(b'>') {
                    self.pos += 3;
                    Tok::IffOp
                } else {
                    return Err(ParseError::new(start, "expected `<->`"));
                }
            }
            b'\\' => {
                if self.peek(1) == Some(b'/') {
                    self.pos += 2;
                    Tok::OrOp
                } else {
                    return Err(ParseError::new(start, "expected `\\/`"));
                }
            }
            b'/' => {
                if self.peek(1) == Some(b'\\') {
                    self.pos += 2;
                    Tok::AndOp
                } else {
                    self.pos += 1;
                    Tok::Slash
                }
            }
            b'@' => {
                if self.peek(1) == Some(b's') {
                    self.pos += 2;
                    Tok::Hole
                } else {
                    return Err(ParseError::new(start, "expected `@s`"));
                }
            }
            b'0'..=b'9' => {
                let mut end = self.pos;
                while matches!(self.src.get(end), Some(b'0'..=b'9')) {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Int(BigInt::from_str(text).unwrap())
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while matches!(
                    self.src.get(end),
                    Some(b'a'..=b'z') | Some(b'A'..=b'Z') | Some(b'0'..=b'9') | Some(b'_')
                ) {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(ParseError::new(
                    start,
                    format!("unexpected character `{}`", other as char),
                ))
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

/// Parse a formula in the ASCII grammar.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = Lexer::tokenize(text)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        end: text.len(),
    };
    let formula = parser.iff()?;
    if let Some(&(pos, _)) = parser.current() {
        return Err(ParseError::new(pos, "trailing input after formula"));
    }
    Ok(formula)
}

impl Parser {
    fn current(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.idx)
    }

    fn pos(&self) -> usize {
        self.current().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.idx).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.idx += 1;
        }
        tok
    }

    fn eat(&mut self, expected: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some(t) if t == expected => Ok(()),
            _ => Err(ParseError::new(pos, format!("expected {what}"))),
        }
    }

    fn at(&self, tok: &Tok) -> bool {
        matches!(self.current(), Some((_, t)) if t == tok)
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let left = self.imp()?;
        if self.at(&Tok::IffOp) {
            self.advance();
            let right = self.iff()?;
            Ok(Formula::iff(left, right))
        } else {
            Ok(left)
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or_level()?;
        if self.at(&Tok::Arrow) {
            self.advance();
            let right = self.imp()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and_level()?;
        while self.at(&Tok::OrOp) {
            self.advance();
            let rhs = self.and_level()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.oplus_level()?;
        while self.at(&Tok::AndOp) {
            self.advance();
            let rhs = self.oplus_level()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn oplus_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.otimes_level()?;
        while self.at(&Tok::OPlusOp) {
            self.advance();
            let rhs = self.otimes_level()?;
            acc = Formula::oplus(acc, rhs);
        }
        Ok(acc)
    }

    fn otimes_level(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.at(&Tok::OTimesOp) {
            self.advance();
            let rhs = self.unary()?;
            acc = Formula::otimes(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.at(&Tok::Bang) {
            self.advance();
            Ok(Formula::neg(self.unary()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some(Tok::LParen) => {
                let inner = self.iff()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Int(n)) => {
                if n == BigInt::from(0) {
                    Ok(Formula::Bot)
                } else if n == BigInt::from(1) {
                    Ok(Formula::Top)
                } else {
                    Err(ParseError::new(pos, "only `0` and `1` are constants"))
                }
            }
            Some(Tok::Ident(name)) => self.ident_atom(pos, name),
            Some(other) => Err(ParseError::new(
                pos,
                format!("expected a formula, found {other:?}"),
            )),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }

    fn ident_atom(&mut self, pos: usize, name: String) -> Result<Formula, ParseError> {
        match name.as_str() {
            "nab" | "del" => {
                self.eat(Tok::LParen, "`(`")?;
                let scalar = self.scalar()?;
                self.eat(Tok::Comma, "`,`")?;
                let body = self.iff()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(if name == "nab" {
                    Formula::nabla(scalar, body)
                } else {
                    Formula::delta(scalar, body)
                })
            }
            "ramp" => {
                self.eat(Tok::LParen, "`(`")?;
                let lo = self.scalar()?;
                self.eat(Tok::Comma, "`,`")?;
                let hi = self.scalar()?;
                self.eat(Tok::Comma, "`,`")?;
                let body = self.iff()?;
                self.eat(Tok::RParen, "`)`")?;
                if let (Scalar::Const(a), Scalar::Const(b)) = (&lo, &hi) {
                    if a >= b {
                        return Err(ParseError::new(pos, "ramp requires lo < hi"));
                    }
                }
                Ok(Formula::ramp(lo, hi, body))
            }
            "V" | "W" => {
                let family = self.family(pos)?;
                Ok(if name == "V" {
                    Formula::sup(family)
                } else {
                    Formula::inf(family)
                })
            }
            var if var.starts_with('x') && var[1..].chars().all(|c| c.is_ascii_digit()) => {
                let index: u32 = var[1..]
                    .parse()
                    .map_err(|_| ParseError::new(pos, "variable index out of range"))?;
                if index == 0 {
                    return Err(ParseError::new(pos, "variable indices start at x1"));
                }
                Ok(Formula::Var(index))
            }
            other => Err(ParseError::new(pos, format!("unknown name `{other}`"))),
        }
    }

    fn family(&mut self, pos: usize) -> Result<CountableFamily, ParseError> {
        match self.advance() {
            Some(Tok::LBrace) => {
                let mut members = vec![self.iff()?];
                while self.at(&Tok::Semi) {
                    self.advance();
                    members.push(self.iff()?);
                }
                self.eat(Tok::RBrace, "`}`")?;
                CountableFamily::finite(members)
                    .map_err(|e| ParseError::new(pos, e.to_string()))
            }
            Some(Tok::LBracket) => {
                let template = self.iff()?;
                self.eat(Tok::Semi, "`;`")?;
                self.keyword("seq")?;
                self.eat(Tok::EqSign, "`=`")?;
                let seq = self.seq_descriptor()?;
                self.eat(Tok::Semi, "`;`")?;
                self.keyword("mono")?;
                self.eat(Tok::EqSign, "`=`")?;
                let mono = self.mono_hint()?;
                self.eat(Tok::RBracket, "`]`")?;
                Ok(CountableFamily::schema(template, seq, mono))
            }
            _ => Err(ParseError::new(pos, "expected `{` or `[` after family head")),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some(Tok::Ident(id)) if id == word => Ok(()),
            _ => Err(ParseError::new(pos, format!("expected `{word}`"))),
        }
    }

    fn seq_descriptor(&mut self) -> Result<SeqDescriptor, ParseError> {
        let pos = self.pos();
        let name = match self.advance() {
            Some(Tok::Ident(id)) => id,
            _ => return Err(ParseError::new(pos, "expected a sequence catalog name")),
        };
        match name.as_str() {
            "dyadic_complement" => Ok(SeqDescriptor::DyadicComplement),
            "dyadic_ramp_below" => {
                self.eat(Tok::LParen, "`(`")?;
                let r = self.unit_rational()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(SeqDescriptor::DyadicRampBelow(r))
            }
            "dyadic_gap_above" => {
                self.eat(Tok::LParen, "`(`")?;
                let r = self.unit_rational()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(SeqDescriptor::DyadicGapAbove(r))
            }
            "dyadic_levels" => {
                self.eat(Tok::LParen, "`(`")?;
                let pos = self.pos();
                let m = match self.advance() {
                    Some(Tok::Int(n)) => u32::try_from(n)
                        .map_err(|_| ParseError::new(pos, "level exponent out of range"))?,
                    _ => return Err(ParseError::new(pos, "expected an integer")),
                };
                self.eat(Tok::RParen, "`)`")?;
                Ok(SeqDescriptor::DyadicLevels(m))
            }
            "explicit" => {
                self.eat(Tok::LParen, "`(`")?;
                let mut prefix = Vec::new();
                while !self.at(&Tok::Semi) {
                    prefix.push(self.unit_rational()?);
                    if self.at(&Tok::Comma) {
                        self.advance();
                    } else {
                        break;
                    }
                }
                self.eat(Tok::Semi, "`;` before tail")?;
                self.keyword("tail")?;
                self.eat(Tok::EqSign, "`=`")?;
                let tail = self.unit_rational()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(SeqDescriptor::ExplicitEventuallyConstant { prefix, tail })
            }
            other => Err(ParseError::new(
                pos,
                format!("unknown sequence catalog entry `{other}`"),
            )),
        }
    }

    fn mono_hint(&mut self) -> Result<MonotoneHint, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Some(Tok::Ident(id)) => match id.as_str() {
                "inc" => Ok(MonotoneHint::Increasing),
                "dec" => Ok(MonotoneHint::Decreasing),
                "none" => Ok(MonotoneHint::None),
                other => Err(ParseError::new(pos, format!("unknown hint `{other}`"))),
            },
            _ => Err(ParseError::new(pos, "expected `inc`, `dec` or `none`")),
        }
    }

    fn scalar(&mut self) -> Result<Scalar, ParseError> {
        if self.at(&Tok::Hole) {
            self.advance();
            return Ok(Scalar::Hole);
        }
        Ok(Scalar::Const(self.unit_rational()?))
    }

    fn unit_rational(&mut self) -> Result<Rational01, ParseError> {
        let pos = self.pos();
        let num = match self.advance() {
            Some(Tok::Int(n)) => n,
            _ => return Err(ParseError::new(pos, "expected a rational `p/q`")),
        };
        let den = if self.at(&Tok::Slash) {
            self.advance();
            let dpos = self.pos();
            match self.advance() {
                Some(Tok::Int(d)) => d,
                _ => return Err(ParseError::new(dpos, "expected a denominator")),
            }
        } else {
            BigInt::from(1)
        };
        if den == BigInt::from(0) {
            return Err(ParseError::new(pos, "zero denominator"));
        }
        Rational01::new(Rat::new(num, den))
            .map_err(|e| ParseError::new(pos, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational01;

    fn x(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn parses_axiom_l1_shape() {
        let f = parse("x1 -> (x2 -> x1)").unwrap();
        assert_eq!(f, Formula::imp(x(1), Formula::imp(x(2), x(1))));
    }

    #[test]
    fn parses_top_as_neg_bot_sugar() {
        assert_eq!(parse("!0").unwrap(), Formula::neg(Formula::Bot));
        assert_eq!(parse("1").unwrap(), Formula::Top);
    }

    #[test]
    fn parses_graded_connectives() {
        let f = parse("del(1/2, x1)").unwrap();
        assert_eq!(f, Formula::delta(Rational01::from_ints(1, 2), x(1)));
        let expanded = super::super::expand_derived(&f);
        assert_eq!(
            expanded,
            Formula::neg(Formula::nabla(
                Rational01::from_ints(1, 2),
                Formula::neg(x(1))
            ))
        );
    }

    #[test]
    fn precedence_ordering() {
        // `!` > `(.)` > `(+)` > `/\` > `\/` > `->` > `<->`
        let f = parse("x1 (+) x2 (.) x3 -> x1 \\/ x2 /\\ x3").unwrap();
        let lhs = Formula::oplus(x(1), Formula::otimes(x(2), x(3)));
        let rhs = Formula::or(x(1), Formula::and(x(2), x(3)));
        assert_eq!(f, Formula::imp(lhs, rhs));
    }

    #[test]
    fn imp_right_associative() {
        let f = parse("x1 -> x2 -> x3").unwrap();
        assert_eq!(f, Formula::imp(x(1), Formula::imp(x(2), x(3))));
    }

    #[test]
    fn negation_binds_tightest() {
        let f = parse("!x1 (.) x2").unwrap();
        assert_eq!(f, Formula::otimes(Formula::neg(x(1)), x(2)));
    }

    #[test]
    fn finite_families() {
        let f = parse("V{x1; x2; 0}").unwrap();
        match f {
            Formula::Sup(CountableFamily::Finite(members)) => {
                assert_eq!(members, vec![x(1), x(2), Formula::Bot]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_family() {
        let f = parse("V[del(@s, x1); seq=dyadic_complement; mono=inc]").unwrap();
        match f {
            Formula::Sup(CountableFamily::Schema(schema)) => {
                assert_eq!(*schema.template, Formula::delta(Scalar::Hole, x(1)));
                assert_eq!(schema.seq, SeqDescriptor::DyadicComplement);
                assert_eq!(schema.monotone, MonotoneHint::Increasing);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ramp_schema_with_hole() {
        let f = parse("V[ramp(1/2, @s, x1); seq=dyadic_gap_above(1/2); mono=inc]").unwrap();
        match f {
            Formula::Sup(CountableFamily::Schema(schema)) => {
                assert!(schema.template.has_holes());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_positions() {
        let err = parse("x1 -> (x2").unwrap_err();
        assert!(err.pos > 0);
        assert!(parse("nab(3/2, x1)").is_err());
        assert!(parse("x0").is_err());
        assert!(parse("V{}").is_err());
    }
}
