use super::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' | '.' => {
                let mut end = i;
                let mut prev = ' ';
                while let Some(&(j, d)) = chars.peek() {
                    let exp_sign = (d == '+' || d == '-') && (prev == 'e' || prev == 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        end = j + d.len_utf8();
                        prev = d;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let text = &src[i..end];
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(i, format!("malformed number `{text}`")))?;
                out.push((i, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((i, Tok::Ident(src[i..end].to_string())));
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' | '\u{2212}' => Tok::Minus,
                    '*' | '\u{00d7}' | '\u{00b7}' => Tok::Star,
                    '/' | '\u{00f7}' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => return Err(syntax(i, format!("unexpected character `{other}`"))),
                };
                out.push((i, tok));
                chars.next();
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(off, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            // negated literals fold into the constant
            return Ok(match self.unary()? {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        let off = self.offset();
        let parenthesized = self.peek() == Some(&Tok::LParen);
        if parenthesized {
            self.bump();
        }
        let n_off = self.offset();
        let n = match self.bump() {
            Some(Tok::Num(v)) => {
                if v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(syntax(n_off, "exponent must be a non-negative integer"));
                }
                v as u32
            }
            Some(Tok::Minus) => return Err(syntax(n_off, "negative exponent")),
            _ => return Err(syntax(off, "expected integer exponent")),
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::Ident(name)) => {
                if name == "t" {
                    return Ok(Expr::Var);
                }
                let func = Func::from_name(&name)
                    .ok_or(Error::UnknownIdentifier { name, offset: off })?;
                self.expect(Tok::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(_) => Err(syntax(off, "expected a number, `t`, a function or `(`")),
            None => Err(syntax(off, "unexpected end of input")),
        }
    }
}

/// Parses an expression in the variable `t`.
pub fn parse(text: &str) -> Result<Expr> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.offset(), "trailing input"));
    }
    Ok(e)
}
