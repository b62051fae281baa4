//! Expressions in x:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression error at position {position}: {message}")]
pub struct ParseError {
    /// Zero-based character offset.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Pi,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Pi => std::f64::consts::PI,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => a.eval(x).powf(b.eval(x)),
            Expr::Call(Func::Sin, a) => a.eval(x).sin(),
            Expr::Call(Func::Cos, a) => a.eval(x).cos(),
            Expr::Call(Func::Exp, a) => a.eval(x).exp(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v =
                s.parse::<f64>().map_err(|_| ParseError { position: start, message: format!("bad number '{s}'") })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError { position: i, message: format!("unexpected character '{c}'") });
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
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.here(), message: message.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
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

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.factor()?)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let start = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "pi" => return Ok(Expr::Pi),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => return Err(ParseError { position: start, message: format!("unknown identifier '{name}'") }),
                };
                if !self.eat('(') {
                    return self.err(format!("expected '(' after {name}"));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str, x: f64) -> f64 {
        parse_expression(s).unwrap().eval(x)
    }

    #[test]
    fn examples() {
        assert!((eval("sin(2*pi*x)", 0.25) - 1.0).abs() < 1e-15);
        assert_eq!(eval("2*(1-x)", 0.0), 2.0);
        assert_eq!(eval("x^2^3", 0.5), 0.003_906_25);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("2+3*4^2", 0.0), 50.0);
        assert_eq!(eval("exp(0)+cos(0)", 0.0), 2.0);
        assert_eq!(eval(" .5 * 4 ", 0.0), 2.0);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expression("2*y").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(e.message.contains("unknown identifier"));
        assert_eq!(parse_expression("sin(x").unwrap_err().position, 5);
        assert_eq!(parse_expression("1 + ").unwrap_err().position, 4);
        assert_eq!(parse_expression("3 $").unwrap_err().position, 2);
        assert!(parse_expression("1 2").is_err());
        assert!(parse_expression("-x").is_err());
    }

    #[test]
    fn display_round_trips() {
        let e = parse_expression("sin(2*pi*x)^2 - x/3").unwrap();
        let again = parse_expression(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }
}
