//! Parser for the compact expression syntax.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := int | '-' int | '(' '-'? int ')'
//! atom   := int | 'x' | 'p' | '(' expr ')'
//!         | 'spread' D '(' expr ')' | 'root' N ('[' int ']')? '(' expr ')'
//!         | 'compose' '(' expr ',' expr ')'
//!         | 'cases' '{' case (';' case)* '}'
//! case   := guard ':' expr
//! guard  := 'coset' '(' int ',' rational ')' | 'val' '(' int (',' int)* ')'
//!         | 'valmod' '(' int ',' int ')' | 'ball' '(' rational ',' int ')' | 'else'
//! ```

use num_bigint::BigInt;
use num_traits::One;

use super::expr::{Case, FuncExpr, Guard, Rational, RootBranch, ValuationSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(text.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()[]{},;:".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` at {i}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    prime: u32,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        let at = self.toks.get(self.pos).map_or(self.src.len(), |t| t.0);
        Error::Parse(format!("{what} at position {at} in `{}`", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Num(n)) => n.clone(),
            Some(Tok::Ident(s)) if s == "p" => BigInt::from(self.prime),
            _ => return Err(self.err("expected an integer")),
        };
        self.pos += 1;
        Ok(if neg { -n } else { n })
    }

    fn small_int(&mut self) -> Result<i64> {
        let n = self.int()?;
        i64::try_from(n).map_err(|_| self.err("integer out of range"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.int()?;
        let den = if self.eat('/') {
            self.int()?
        } else {
            BigInt::one()
        };
        if den == BigInt::from(0) {
            return Err(self.err("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }

    fn expr(&mut self) -> Result<FuncExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = FuncExpr::add(acc, self.term()?);
            } else if self.eat('-') {
                acc = FuncExpr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FuncExpr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = FuncExpr::mul(acc, self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.as_constant()
                    .is_some_and(|c| c == num_rational::BigRational::from_integer(0.into()))
                {
                    return Err(self.err("division by the constant 0"));
                }
                acc = FuncExpr::div(acc, d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FuncExpr> {
        if self.eat('-') {
            Ok(FuncExpr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<FuncExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = if self.eat('(') {
            let e = self.small_int()?;
            self.expect(')')?;
            e
        } else {
            self.small_int()?
        };
        if e < 0
            && base
                .as_constant()
                .is_some_and(|c| c == num_rational::BigRational::from_integer(0.into()))
        {
            return Err(self.err("negative power of the constant 0"));
        }
        Ok(FuncExpr::pow(base, e))
    }

    fn call_arg(&mut self) -> Result<FuncExpr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<FuncExpr> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(FuncExpr::int(n)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.named(&name),
            Tok::Sym(c) => {
                self.pos -= 1;
                Err(self.err(&format!("unexpected `{c}`")))
            }
        }
    }

    fn named(&mut self, name: &str) -> Result<FuncExpr> {
        if name == "x" {
            return Ok(FuncExpr::Var);
        }
        if name == "p" {
            return Ok(FuncExpr::int(self.prime));
        }
        if name == "cases" {
            return self.cases();
        }
        if name == "compose" {
            self.expect('(')?;
            let outer = self.expr()?;
            self.expect(',')?;
            let inner = self.expr()?;
            self.expect(')')?;
            return Ok(FuncExpr::compose(outer, inner));
        }
        if let Some(d) = name.strip_prefix("spread") {
            let d: u32 = d
                .parse()
                .map_err(|_| self.err("expected spreadD with an integer D"))?;
            if d < 1 {
                return Err(self.err("spread factor must be at least 1"));
            }
            let arg = self.call_arg()?;
            return Ok(FuncExpr::compose(FuncExpr::DigitSpread { d }, arg));
        }
        if let Some(n) = name.strip_prefix("root") {
            let n: u32 = n
                .parse()
                .map_err(|_| self.err("expected rootN with an integer N"))?;
            if n < 1 {
                return Err(self.err("root index must be at least 1"));
            }
            let branch = if self.eat('[') {
                let r = self.int()?;
                self.expect(']')?;
                let r =
                    u64::try_from(r).map_err(|_| self.err("branch residue must be nonnegative"))?;
                RootBranch::Residue(r)
            } else {
                RootBranch::Principal
            };
            let arg = self.call_arg()?;
            return Ok(FuncExpr::compose(
                FuncExpr::NthRootBranch { n, branch },
                arg,
            ));
        }
        self.pos -= 1;
        Err(self.err(&format!("unknown name `{name}`")))
    }

    fn cases(&mut self) -> Result<FuncExpr> {
        self.expect('{')?;
        let mut cases = Vec::new();
        loop {
            let guard = self.guard()?;
            self.expect(':')?;
            let expr = self.expr()?;
            cases.push(Case { guard, expr });
            if self.eat(';') {
                if self.eat('}') {
                    break;
                }
                continue;
            }
            self.expect('}')?;
            break;
        }
        Ok(FuncExpr::Piecewise(cases))
    }

    fn guard(&mut self) -> Result<Guard> {
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.err("expected a guard")),
        };
        self.pos += 1;
        match name.as_str() {
            "else" => Ok(Guard::Otherwise),
            "coset" => {
                self.expect('(')?;
                let n = self.small_int()?;
                let n = u32::try_from(n)
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| self.err("coset exponent must be positive"))?;
                self.expect(',')?;
                let lambda = self.rational()?;
                if lambda.num == BigInt::from(0) {
                    return Err(self.err("coset representative must be nonzero"));
                }
                self.expect(')')?;
                Ok(Guard::CosetIs { n, lambda })
            }
            "val" => {
                self.expect('(')?;
                let mut set = vec![self.small_int()?];
                while self.eat(',') {
                    set.push(self.small_int()?);
                }
                self.expect(')')?;
                Ok(Guard::ValuationIn(ValuationSet::Set(set)))
            }
            "valmod" => {
                self.expect('(')?;
                let modulus = self.small_int()?;
                if modulus < 1 {
                    return Err(self.err("valuation modulus must be positive"));
                }
                self.expect(',')?;
                let residue = self.small_int()?;
                self.expect(')')?;
                Ok(Guard::ValuationIn(ValuationSet::Congruence {
                    modulus,
                    residue,
                }))
            }
            "ball" => {
                self.expect('(')?;
                let center = self.rational()?;
                self.expect(',')?;
                let radius = self.small_int()?;
                self.expect(')')?;
                Ok(Guard::InBall { center, radius })
            }
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("unknown guard `{name}`")))
            }
        }
    }
}

/// Parses the compact expression syntax; `p` denotes the prime.
pub fn parse_expr(s: &str, prime: u32) -> Result<FuncExpr> {
    let mut parser = Parser {
        src: s,
        toks: tokenize(s)?,
        pos: 0,
        prime,
    };
    let e = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(e)
}

/// Reads a function given either as an expression or as `@path` to a JSON
/// AST file.
pub fn load_function(spec: &str, prime: u32) -> Result<FuncExpr> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read `{path}`: {e}")))?;
            from_json(&text)
        }
        None => parse_expr(spec, prime),
    }
}

/// Parses the JSON AST form.
pub fn from_json(text: &str) -> Result<FuncExpr> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("function JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse_expr("x^2 + 1", 5).unwrap().to_string(), "x^2 + 1");
        assert_eq!(parse_expr("-x^2", 5).unwrap().to_string(), "-1*x^2");
        assert_eq!(parse_expr("2*x/3", 5).unwrap().to_string(), "2*x/3");
        assert_eq!(
            parse_expr("x - (x - 1)", 5).unwrap().to_string(),
            "x - (x - 1)"
        );
        assert_eq!(
            parse_expr("x^-2", 5).unwrap(),
            parse_expr("x^(-2)", 5).unwrap()
        );
        assert_eq!(parse_expr("p*x", 7).unwrap().to_string(), "7*x");
        assert_eq!(
            parse_expr("1/3", 7).unwrap(),
            FuncExpr::RationalConst {
                num: 1.into(),
                den: 3.into()
            }
        );
    }

    #[test]
    fn builtins() {
        assert_eq!(
            parse_expr("spread2(x)", 3).unwrap(),
            FuncExpr::DigitSpread { d: 2 }
        );
        let r = parse_expr("root2[3](1 + x)", 7).unwrap();
        assert_eq!(r.to_string(), "root2[3](1 + x)");
        let c = parse_expr(
            "cases{coset(2,1): x; val(1,3): x^2; valmod(2,0): 0; ball(1/5,-1): 1; else: 2*x}",
            5,
        )
        .unwrap();
        assert_eq!(c, parse_expr(&c.to_string(), 5).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let f = parse_expr("cases{coset(2,1): root2(x); else: spread3(x + 1)/x^2}", 5).unwrap();
        let j = serde_json::to_string(&f).unwrap();
        assert_eq!(from_json(&j).unwrap(), f);
        let direct = from_json(
            r#"{"Add": [{"IntPow": ["Var", 2]}, {"RationalConst": {"num": 1, "den": 1}}]}"#,
        )
        .unwrap();
        assert_eq!(direct, parse_expr("x^2 + 1", 5).unwrap());
    }

    #[test]
    fn errors() {
        for s in [
            "",
            "x +",
            "y",
            "(x",
            "x^x",
            "spread(x)",
            "cases{}",
            "cases{foo: x}",
            "1/0",
            "x)",
        ] {
            assert!(matches!(parse_expr(s, 5), Err(Error::Parse(_))), "{s}");
        }
    }
}
