use num_complex::Complex64;

use super::ast::Expr;
use crate::error::{Error, Result};

/// Grammar (whitespace-insensitive):
///
/// ```text
/// expr     := term (('+' | '-') term)*
/// term     := unary (('*' | '/') unary)*
/// unary    := '-' unary | power
/// power    := atom ('^' exponent)?
/// exponent := INT | '(' '-'? INT ')' | '-' INT
/// atom     := NUMBER | 'i' | 'z' | NAME '(' expr ')' | '(' expr ')'
/// NAME     := exp | log | sin | cos
/// ```
///
/// Exponents must be integer literals; anything else (e.g. `z^0.5`, `z^z`)
/// is rejected as unsupported rather than as a syntax error.
pub fn parse(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.parse_expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(syntax(t.start, format!("unexpected {}", t.kind.describe()))),
    }
}

fn syntax(position: usize, message: String) -> Error {
    Error::Syntax { position, message }
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Number(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number `{v}`"),
            TokenKind::Name(s) => format!("name `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    start: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                let kind = match c {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '^' => TokenKind::Caret,
                    '(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                };
                out.push(Token { kind, start });
                i += 1;
            }
            '0'..='9' | '.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                // Exponent part only if digits actually follow.
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lit = &text[i..j];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("bad number literal `{lit}`")))?;
                out.push(Token {
                    kind: TokenKind::Number(value),
                    start,
                });
                i = j;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                out.push(Token {
                    kind: TokenKind::Name(text[i..j].to_string()),
                    start,
                });
                i = j;
            }
            other => {
                return Err(syntax(start, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.start)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |t| t.kind.describe());
            Err(syntax(
                self.here(),
                format!("expected {}, found {}", kind.describe(), found),
            ))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                let rhs = self.parse_term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokenKind::Minus) {
                let rhs = self.parse_term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                let rhs = self.parse_unary()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&TokenKind::Slash) {
                let rhs = self.parse_unary()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus) {
            Ok(Expr::Neg(Box::new(self.parse_unary()?)))
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if !self.eat(&TokenKind::Caret) {
            return Ok(base);
        }
        let n = self.parse_exponent()?;
        if self.peek().map(|t| &t.kind) == Some(&TokenKind::Caret) {
            return Err(syntax(
                self.here(),
                "chained `^` is ambiguous; parenthesize".into(),
            ));
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn parse_exponent(&mut self) -> Result<i32> {
        let parenthesized = self.eat(&TokenKind::LParen);
        let neg = self.eat(&TokenKind::Minus);
        let at = self.here();
        match self.next() {
            Some(Token {
                kind: TokenKind::Number(v),
                ..
            }) => {
                if v.fract() != 0.0 || !v.is_finite() || v.abs() > f64::from(i32::MAX) {
                    return Err(Error::UnsupportedOperation {
                        position: at,
                        message: format!("exponent must be an integer literal, got `{v}`"),
                    });
                }
                if parenthesized {
                    self.expect(TokenKind::RParen)?;
                }
                let n = v as i32;
                Ok(if neg { -n } else { n })
            }
            Some(t) => Err(Error::UnsupportedOperation {
                position: t.start,
                message: format!(
                    "exponent must be an integer literal, found {}",
                    t.kind.describe()
                ),
            }),
            None => Err(syntax(at, "expected exponent, found end of input".into())),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.next() {
            Some(Token {
                kind: TokenKind::Number(v),
                ..
            }) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Some(Token {
                kind: TokenKind::Name(name),
                start,
            }) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                "exp" | "log" | "sin" | "cos" => {
                    self.expect(TokenKind::LParen)?;
                    let arg = Box::new(self.parse_expr()?);
                    self.expect(TokenKind::RParen)?;
                    Ok(match name.as_str() {
                        "exp" => Expr::Exp(arg),
                        "log" => Expr::Log(arg),
                        "sin" => Expr::Sin(arg),
                        _ => Expr::Cos(arg),
                    })
                }
                other => Err(syntax(start, format!("unknown name `{other}`"))),
            },
            Some(Token {
                kind: TokenKind::LParen,
                ..
            }) => {
                let e = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(t) => Err(syntax(
                t.start,
                format!("expected a value, found {}", t.kind.describe()),
            )),
            None => Err(syntax(at, "expected a value, found end of input".into())),
        }
    }
}
