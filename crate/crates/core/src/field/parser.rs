//! Pratt parser for the field expression language.
//!
//! Binding, tightest first: function calls, `^` (right-associative), unary
//! minus, `*` `/`, `+` `-`. So `-x^2` is `-(x^2)` and `x^-2` is `x^(-2)`.

use crate::error::{Error, Result};

use super::expr::{BinaryOp, Expression, Function};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
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
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((Token::Number(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Token::Op(c),
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", src[start..].chars().next().unwrap()),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

const PREFIX_MINUS_BP: u8 = 5;

fn infix_binding(op: char) -> Option<(u8, u8, BinaryOp)> {
    match op {
        '+' => Some((1, 2, BinaryOp::Add)),
        '-' => Some((1, 2, BinaryOp::Sub)),
        '*' => Some((3, 4, BinaryOp::Mul)),
        '/' => Some((3, 4, BinaryOp::Div)),
        '^' => Some((7, 6, BinaryOp::Pow)),
        _ => None,
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    dimension: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        let offset = self.offset();
        match self.next() {
            Some((t, _)) if t == want => Ok(()),
            _ => Err(Error::Syntax {
                offset,
                message: format!("expected {what}"),
            }),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expression> {
        let offset = self.offset();
        let mut lhs = match self.next() {
            Some((Token::Number(v), _)) => Expression::Constant(v),
            Some((Token::Ident(name), at)) => self.identifier(name, at)?,
            Some((Token::LParen, _)) => {
                let inner = self.expr(0)?;
                self.expect(Token::RParen, "`)`")?;
                inner
            }
            Some((Token::Op('-'), _)) => Expression::Neg(Box::new(self.expr(PREFIX_MINUS_BP)?)),
            Some((t, at)) => {
                return Err(Error::Syntax {
                    offset: at,
                    message: format!("unexpected token {t:?}"),
                })
            }
            None => {
                return Err(Error::Syntax {
                    offset,
                    message: "unexpected end of input".into(),
                })
            }
        };

        while let Some(Token::Op(c)) = self.peek() {
            let (lbp, rbp, op) = infix_binding(*c).expect("tokenizer only emits known operators");
            if lbp < min_bp {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(rbp)?;
            lhs = Expression::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expression> {
        if self.peek() == Some(&Token::LParen) {
            let func = Function::from_name(&name).ok_or(Error::UnknownFunction {
                name: name.clone(),
                offset: at,
            })?;
            self.pos += 1;
            let mut args = vec![self.expr(0)?];
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                args.push(self.expr(0)?);
            }
            self.expect(Token::RParen, "`)` after arguments")?;
            if args.len() != func.arity() {
                return Err(Error::Syntax {
                    offset: at,
                    message: format!(
                        "`{}` takes {} argument(s), got {}",
                        func.name(),
                        func.arity(),
                        args.len()
                    ),
                });
            }
            return Ok(Expression::Call(func, args));
        }
        if name == "pi" {
            return Ok(Expression::Constant(std::f64::consts::PI));
        }
        let index = match name.as_str() {
            "x" | "y" | "z" if self.dimension <= 3 => Some(match name.as_str() {
                "x" => 0,
                "y" => 1,
                _ => 2,
            }),
            _ => name
                .strip_prefix('x')
                .filter(|digits| !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|digits| digits.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(|k| k - 1),
        };
        match index {
            Some(i) if i < self.dimension => Ok(Expression::Variable(i)),
            Some(i) => Err(Error::VariableOutOfRange {
                name,
                index: i,
                dimension: self.dimension,
            }),
            None => Err(Error::UnknownIdentifier { name, offset: at }),
        }
    }
}

/// Parses `source` as a field of the given dimension.
///
/// Variables are `x1 … xd`; for `d <= 3` the names `x`, `y`, `z` are also
/// accepted. `pi` is the only named constant.
pub fn parse_expression(source: &str, dimension: usize) -> Result<Expression> {
    if dimension == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if source.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens: tokenize(source)?,
        pos: 0,
        end: source.len(),
        dimension,
    };
    let e = p.expr(0)?;
    if p.pos < p.tokens.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}
