//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          right associative, constant exponent
//! atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | ln | sqrt
//! ```
//!
//! Positions in errors are 0-based character offsets.

use crate::error::{Error, Result};
use crate::expr::{Expr, Func};

pub fn parse(text: &str) -> Result<Expr> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser { chars, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let exponent = self.unary()?;
        match exponent.constant_value() {
            Some(p) => Ok(Expr::Pow(Box::new(base), p)),
            None => Err(Error::Syntax {
                position: start,
                message: "exponent must be a constant".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            if name == "x" {
                return Ok(Expr::X);
            }
            let Some(f) = Func::from_name(&name) else {
                return Err(Error::UnknownIdentifier {
                    name,
                    position: start,
                });
            };
            if !self.eat('(') {
                return Err(self.error(format!("expected `(` after `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(Expr::Func(f, Box::new(arg)));
        }
        if self.eat('(') {
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        Err(self.error(format!("unexpected `{c}`")))
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax {
                position: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // not an exponent; leave `e` for the identifier reader to reject
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Syntax {
                position: start,
                message: "malformed number".into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn first_example_tree() {
        let want = Expr::Mul(
            b(Expr::Func(
                Func::Exp,
                b(Expr::Div(b(Expr::X), b(Expr::Const(5.0)))),
            )),
            b(Expr::Func(Func::Sin, b(Expr::X))),
        );
        assert_eq!(parse("exp(x/5)*sin(x)").unwrap(), want);
    }

    #[test]
    fn second_example_tree() {
        let want = Expr::Func(Func::Ln, b(Expr::Add(b(Expr::Const(1.0)), b(Expr::X))));
        assert_eq!(parse("ln(1+x)").unwrap(), want);
        assert_eq!(parse("  ln ( 1 + x ) ").unwrap(), want);
    }

    #[test]
    fn incomplete_power() {
        assert!(matches!(
            parse("x^"),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse("2*tan(x)"),
            Err(Error::UnknownIdentifier {
                name: "tan".into(),
                position: 2
            })
        );
        assert!(matches!(parse("y"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn other_syntax_errors() {
        assert!(matches!(parse(""), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(
            parse("(x"),
            Err(Error::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse("x)"),
            Err(Error::Syntax { position: 1, .. })
        ));
        assert!(matches!(
            parse("x^x"),
            Err(Error::Syntax { position: 2, .. })
        ));
        assert!(matches!(parse("sin x"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("3 $ x"),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        // -x^2 = -(x^2)
        assert_eq!(parse("-x^2").unwrap().eval(3.0).unwrap(), -9.0);
        // 2^3^2 = 2^9
        assert_eq!(parse("2^3^2").unwrap().eval(0.0).unwrap(), 512.0);
        // left-assoc subtraction and division
        assert_eq!(parse("10 - 4 - 3").unwrap().eval(0.0).unwrap(), 3.0);
        assert_eq!(parse("64/4/2").unwrap().eval(0.0).unwrap(), 8.0);
        assert_eq!(parse("1 + 2*3^2").unwrap().eval(0.0).unwrap(), 19.0);
        assert_eq!(parse("x^-1").unwrap().eval(4.0).unwrap(), 0.25);
    }

    #[test]
    fn numeric_literals() {
        assert_eq!(parse("2.5e-3").unwrap(), Expr::Const(2.5e-3));
        assert_eq!(parse(".5").unwrap(), Expr::Const(0.5));
        assert_eq!(parse("3.").unwrap(), Expr::Const(3.0));
        assert_eq!(parse("1E2").unwrap(), Expr::Const(100.0));
        assert!(parse(".").is_err());
    }
}
