//! Recursive-descent parser.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    /// A `(` without its `)`, or a stray `)`.
    Unbalanced,
    UnknownIdentifier(String),
    Arity {
        func: &'static str,
        expected: usize,
        got: usize,
    },
    BadNumber(String),
}

/// Syntax error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character '{c}' at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(f, "unexpected '{t}' at offset {}", self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at offset {}", self.offset)
            }
            ParseErrorKind::Unbalanced => {
                write!(f, "unbalanced parentheses at offset {}", self.offset)
            }
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(f, "unknown identifier '{name}' at offset {}", self.offset)
            }
            ParseErrorKind::Arity {
                func,
                expected,
                got,
            } => write!(
                f,
                "{func} takes {expected} argument(s), got {got} (offset {})",
                self.offset
            ),
            ParseErrorKind::BadNumber(t) => {
                write!(f, "invalid number '{t}' at offset {}", self.offset)
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Sym(c) => c.to_string(),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s = &text[start..i];
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push((start, Tok::Num(v))),
                _ => {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::BadNumber(s.to_string()),
                    })
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                kind: ParseErrorKind::UnexpectedChar(ch),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::End => self.error(ParseErrorKind::UnexpectedEnd),
            Tok::Sym(')') => self.error(ParseErrorKind::Unbalanced),
            t => self.error(ParseErrorKind::UnexpectedToken(t.describe())),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        if self.eat(')') {
            return Ok(());
        }
        match self.peek() {
            Tok::End => Err(self.error(ParseErrorKind::Unbalanced)),
            t => Err(self.error(ParseErrorKind::UnexpectedToken(t.describe()))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = self.unary()?;
        if exp == Expr::Var(Var::N) && base == Expr::neg(Expr::Num(1.0)) {
            return Ok(Expr::AltSign);
        }
        Ok(Expr::bin(BinOp::Pow, base, exp))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "n" => return Ok(Expr::Var(Var::N)),
                    "x" => return Ok(Expr::Var(Var::X)),
                    "pi" => return Ok(Expr::Num(core::f64::consts::PI)),
                    "e" => return Ok(Expr::Num(core::f64::consts::E)),
                    _ => {}
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    });
                };
                if !self.eat('(') {
                    return Err(self.unexpected());
                }
                let mut args = Vec::new();
                if *self.peek() != Tok::Sym(')') {
                    args.push(self.expr()?);
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                }
                self.close_paren()?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::Arity {
                            func: func.name(),
                            expected: func.arity(),
                            got: args.len(),
                        },
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses formula text into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}
