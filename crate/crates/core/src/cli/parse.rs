//! Expression parser.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" exponent)?
//! exponent:= "-"? integer | "(" "-"? integer ")"
//! atom    := integer | name | "(" sum ")"
//! ```

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::{Rational, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown name `{name}` at offset {pos}")]
    UnknownName { name: String, pos: usize },
    #[error("division by zero at offset {pos}")]
    DivisionByZero { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Name(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    tokens: Vec<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            tokens: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: BigInt = lx.src[start..i].parse().expect("digits");
                lx.tokens.push((Token::Int(v), start));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                lx.tokens
                    .push((Token::Name(lx.src[start..i].to_string()), start));
            } else if b"+-*/^()".contains(&c) {
                lx.tokens.push((Token::Sym(c as char), i));
                i += 1;
            } else {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
        lx.tokens.push((Token::End, src.len()));
        Ok(lx.tokens)
    }
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    at: usize,
    names: &'a [&'a str],
    nvars: usize,
}

/// Parse `src` into an element of the field with `nvars` variables, where
/// `names[i]` denotes variable `i`. `names` may be a prefix of the variables.
pub fn parse_expression(
    src: &str,
    names: &[&str],
    nvars: usize,
) -> Result<RationalFunction, ParseError> {
    let tokens = Lexer::run(src)?;
    let mut p = Parser {
        tokens,
        at: 0,
        names,
        nvars,
    };
    let e = p.sum()?;
    match p.peek() {
        Token::End => Ok(e),
        _ => Err(p.unexpected()),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Token::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        let msg = match self.peek() {
            Token::End => "unexpected end of input".to_string(),
            Token::Int(v) => format!("unexpected number `{v}`"),
            Token::Name(n) => format!("unexpected name `{n}`"),
            Token::Sym(c) => format!("unexpected `{c}`"),
        };
        ParseError::Syntax {
            pos: self.pos(),
            msg,
        }
    }

    fn sum(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.product()?;
            } else if self.eat('-') {
                acc = &acc - &self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == &Token::Sym('/') {
                self.bump();
                let pos = self.pos();
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(ParseError::DivisionByZero { pos });
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base_pos = self.pos();
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let exp_pos = self.pos();
        let Token::Int(v) = self.peek().clone() else {
            return Err(ParseError::Syntax {
                pos: exp_pos,
                msg: "expected an integer exponent".to_string(),
            });
        };
        self.bump();
        let k = i32::try_from(v).map_err(|_| ParseError::Syntax {
            pos: exp_pos,
            msg: "exponent too large".to_string(),
        })?;
        if paren && !self.eat(')') {
            return Err(self.unexpected());
        }
        if self.peek() == &Token::Sym('^') {
            return Err(ParseError::Syntax {
                pos: self.pos(),
                msg: "chained exponents need parentheses".to_string(),
            });
        }
        let k = if neg { -k } else { k };
        if k < 0 && base.is_zero() {
            return Err(ParseError::DivisionByZero { pos: base_pos });
        }
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek().clone() {
            Token::Int(v) => {
                self.bump();
                Ok(RationalFunction::constant(
                    self.nvars,
                    Rational::from_integer(v),
                ))
            }
            Token::Name(name) => {
                let pos = self.pos();
                self.bump();
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(RationalFunction::var(self.nvars, i)),
                    None => Err(ParseError::UnknownName { name, pos }),
                }
            }
            Token::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAMES: [&str; 4] = ["x", "t1", "t2", "t3"];

    fn parse(s: &str) -> Result<RationalFunction, ParseError> {
        parse_expression(s, &NAMES, 4)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-x^2").unwrap(), -parse("x*x").unwrap());
        assert_eq!(parse("8/2/2").unwrap(), parse("2").unwrap());
        assert_eq!(parse("5-2-1").unwrap(), parse("2").unwrap());
        assert_eq!(parse("x^-1").unwrap(), parse("1/x").unwrap());
        assert_eq!(parse("x^(-2)").unwrap(), parse("1/(x*x)").unwrap());
        assert!(parse("0").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("(x"),
            Err(ParseError::Syntax {
                pos: 2,
                msg: "unexpected end of input".into()
            })
        );
        assert_eq!(
            parse("x + y"),
            Err(ParseError::UnknownName {
                name: "y".into(),
                pos: 4
            })
        );
        assert_eq!(parse("1/(x-x)"), Err(ParseError::DivisionByZero { pos: 2 }));
        assert!(matches!(
            parse("x^t1"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse("x $"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn example_element() {
        let f = parse("1/(t1*t2) + (t2 - 2*x*t1)/t1^2 + t3").unwrap();
        let g = parse("(t1 + t2^2 - 2*x*t1*t2 + t1^2*t2*t3)/(t1^2*t2)").unwrap();
        assert_eq!(f, g);
    }
}
