use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ExprError, Func, PhaseSpace, ScalarExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integral: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, message: &str) -> ExprError {
    ExprError::Syntax { pos, message: message.to_string() }
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut integral = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integral = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value = literal
                .parse::<f64>()
                .map_err(|_| syntax(start, "malformed number"))?;
            out.push(Token { tok: Tok::Num { value, integral }, pos: start });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos: start });
        } else {
            return Err(ExprError::Syntax { pos, message: alloc::format!("unexpected character `{c}`") });
        }
    }
    out.push(Token { tok: Tok::End, pos: chars.len() });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    space: &'a PhaseSpace,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<ScalarExpr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ScalarExpr::Add(lhs.into(), rhs.into());
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ScalarExpr::Sub(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = ScalarExpr::Mul(lhs.into(), rhs.into());
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = ScalarExpr::Div(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ExprError> {
        let negate = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut e = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let k = self.exponent()?;
            e = ScalarExpr::Pow(e.into(), k);
        }
        Ok(if negate { ScalarExpr::Neg(e.into()) } else { e })
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let pos = self.pos();
        let sign = if *self.peek() == Tok::Minus {
            self.bump();
            -1
        } else {
            1
        };
        match self.bump().tok {
            Tok::Num { value, integral: true } if value <= i32::MAX as f64 => Ok(sign * value as i32),
            Tok::End => Err(syntax(pos, "expected integer exponent")),
            _ => Err(ExprError::NonIntegerExponent { pos }),
        }
    }

    fn base(&mut self) -> Result<ScalarExpr, ExprError> {
        let Token { tok, pos } = self.bump();
        match tok {
            Tok::Num { value, .. } => Ok(ScalarExpr::Num(value)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        return Ok(ScalarExpr::Call(f, arg.into()));
                    }
                }
                self.space
                    .index_of(&name)
                    .map(ScalarExpr::Coord)
                    .ok_or(ExprError::UnknownIdentifier { pos, name })
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            _ => Err(syntax(pos, "expected number, identifier or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let pos = self.pos();
        match self.bump().tok {
            Tok::RParen => Ok(()),
            _ => Err(syntax(pos, "expected `)`")),
        }
    }
}

/// Parse `text` against the coordinates of `space`.
///
/// Grammar, loosest binding first: `+ -`, then `* /`, then an optional unary
/// minus applied to a base with an optional integer power (`-x^2` is
/// `-(x^2)`). Bases are numbers, coordinates, parenthesised expressions and
/// `sin`, `cos`, `exp`, `ln` calls.
pub fn parse(text: &str, space: &PhaseSpace) -> Result<ScalarExpr, ExprError> {
    let tokens = lex(text)?;
    if tokens.len() == 1 {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser { tokens, at: 0, space };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(syntax(p.pos(), "unexpected trailing input")),
    }
}
