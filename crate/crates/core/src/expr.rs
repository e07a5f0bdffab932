//! Expression-string densities such as `"A01^2 - sqrt(1 + A12^2) * exp(s)"`.
//!
//! Coefficients are named `A` followed by one digit per axis. Any ordering of
//! the digits is accepted and resolved through the tuple parity, so `A10`
//! means `-A01` and `A11` is identically zero. `s` is the entropy; `pi` and `e`
//! are constants. Supported: `+ - * / ^` (also `**`), parentheses, and
//! `sqrt exp ln log sin cos tan sinh cosh tanh abs`.

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::exterior::{canonicalize, subset_rank, Parity};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Abs,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply<S: Scalar>(self, x: S) -> S {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Abs => x.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Coef { slot: usize, sign: f64 },
    Entropy,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval<S: Scalar>(&self, a: &[S], s: S) -> S {
        match self {
            Node::Num(v) => S::cst(*v),
            Node::Coef { slot, sign } => a[*slot] * *sign,
            Node::Entropy => s,
            Node::Neg(x) => -x.eval(a, s),
            Node::Bin(op, l, r) => {
                let (l, r) = (l.eval(a, s), r.eval(a, s));
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                }
            }
            Node::Pow(base, exponent) => {
                let b = base.eval(a, s);
                match **exponent {
                    Node::Num(e) if e.fract() == 0.0 && e.abs() < 1024.0 => b.powi(e as i32),
                    Node::Num(e) => b.powf(e),
                    _ => b.pow(exponent.eval(a, s)),
                }
            }
            Node::Call(f, x) => f.apply(x.eval(a, s)),
        }
    }

    fn uses_entropy(&self) -> bool {
        match self {
            Node::Entropy => true,
            Node::Num(_) | Node::Coef { .. } => false,
            Node::Neg(x) | Node::Call(_, x) => x.uses_entropy(),
            Node::Bin(_, l, r) | Node::Pow(l, r) => l.uses_entropy() || r.uses_entropy(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v = lit
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number `{lit}`")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Token::Op('^'));
            i += 2;
        } else if "+-*/^".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Token::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Token::RParen);
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    dim: usize,
    degree: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Node::Num(v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if let Some(Token::LParen) = self.peek() {
                    let f = Func::lookup(&name)
                        .ok_or_else(|| Error::Expression(format!("unknown function `{name}`")))?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                self.variable(&name)
            }
            Some(t) => Err(Error::Expression(format!("unexpected token {t:?}"))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next() {
            Some(Token::RParen) => Ok(()),
            _ => Err(Error::Expression("missing `)`".into())),
        }
    }

    fn variable(&self, name: &str) -> Result<Node> {
        match name {
            "s" => return Ok(Node::Entropy),
            "pi" => return Ok(Node::Num(std::f64::consts::PI)),
            "e" => return Ok(Node::Num(std::f64::consts::E)),
            _ => {}
        }
        let digits = name
            .strip_prefix('A')
            .filter(|rest| rest.chars().all(|c| c.is_ascii_digit()))
            .ok_or_else(|| Error::Expression(format!("unknown variable `{name}`")))?;
        let raw: Vec<usize> = digits
            .chars()
            .map(|c| c.to_digit(10).unwrap() as usize)
            .collect();
        if raw.len() != self.degree {
            return Err(Error::Expression(format!(
                "`{name}` has {} indices, the form has degree {}",
                raw.len(),
                self.degree
            )));
        }
        let (canon, parity) = canonicalize(&raw, self.dim)?;
        if parity == Parity::Zero {
            return Ok(Node::Num(0.0));
        }
        Ok(Node::Coef {
            slot: subset_rank(self.dim, canon.entries()),
            sign: parity.sign(),
        })
    }
}

/// A parsed density over the coefficients of a `p`-form on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExprDensity {
    source: String,
    root: Node,
    dim: usize,
    degree: usize,
}

impl ExprDensity {
    pub fn parse(source: &str, dim: usize, degree: usize) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            dim,
            degree,
        };
        let root = parser.expr()?;
        if parser.pos != tokens.len() {
            return Err(Error::Expression(format!(
                "trailing input after token {}",
                parser.pos
            )));
        }
        Ok(ExprDensity {
            source: source.to_string(),
            root,
            dim,
            degree,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn uses_entropy(&self) -> bool {
        self.root.uses_entropy()
    }

    pub fn eval<S: Scalar>(&self, a: &[S], s: S) -> S {
        self.root.eval(a, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::Dual;

    #[test]
    fn precedence_and_associativity() {
        let e = ExprDensity::parse("-2^2 + 3*4/2 - 2^3^2/256", 2, 1).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0], 0.0), -4.0 + 6.0 - 2.0);
        let e = ExprDensity::parse("2**-1 + 1.5e1 + pi - pi", 2, 1).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0], 0.0), 15.5);
    }

    #[test]
    fn coefficient_parity() {
        let e = ExprDensity::parse("A10 + 10*A11 + 100*A12", 3, 2).unwrap();
        // storage: A01, A02, A12
        assert_eq!(e.eval(&[1.0, 2.0, 3.0], 0.0), -1.0 + 300.0);
    }

    #[test]
    fn functions_and_entropy() {
        let e = ExprDensity::parse("sqrt(1 + A0^2) * exp(s) + ln(e)", 1, 1).unwrap();
        let v: f64 = e.eval(&[0.0], 0.0);
        assert!((v - 2.0).abs() < 1e-15);
        assert!(e.uses_entropy());
        let d = e.eval(&[Dual::variable(3.0)], Dual::constant(0.0));
        assert!((d.eps - 3.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["A0 +", "foo(A0)", "A01", "B0", "(A0", "A0 $ 2", "A0 A0", "A9"] {
            assert!(ExprDensity::parse(bad, 3, 1).is_err(), "{bad}");
        }
    }
}
