//! Parser for the component expression language:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom
//! atom   := number | 'x' | 'y' | 'sqrt(' int ')' | '(' expr ')'
//!         | 'e(' linear ')' | 'sinpi(' var ')' | 'cospi(' var ')'
//!         | 'abs(' expr ')' | 'conj(' expr ')' | 'chi(' scalar ',' scalar ')'
//! linear := lterm (('+' | '-') lterm)*     lterm := [number ['*']] ['x' | 'y']
//! ```
//!
//! Columns in errors are 1-based character positions.

use qhm_core::{ExactScalar, Expr, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct DslError {
    pub column: usize,
    pub message: String,
}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError { column, message: message.into() })
}

/// Parses `text`; surds must live in `Q(sqrt d)` (`d = 0` allows none).
pub fn parse_expr(text: &str, d: u64) -> Result<Expr, DslError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, d };
    let e = p.expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return err(p.col(), format!("unexpected `{c}`"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    d: u64,
}

impl Parser {
    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
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

    fn expect(&mut self, c: char) -> Result<(), DslError> {
        if self.eat(c) {
            return Ok(());
        }
        match self.peek() {
            Some(found) => err(self.col(), format!("expected `{c}`, found `{found}`")),
            None => err(self.col(), format!("expected `{c}` before end of input")),
        }
    }

    /// Runs `f` for the operand after an operator at `op_col`; running out
    /// of input is blamed on the operator.
    fn operand<T>(&mut self, op: char, op_col: usize, f: impl FnOnce(&mut Self) -> Result<T, DslError>) -> Result<T, DslError> {
        self.skip_ws();
        if self.peek().is_none() {
            return err(op_col, format!("`{op}` has no right operand"));
        }
        f(self)
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            let op_col = self.col();
            if self.eat('+') {
                terms.push(self.operand('+', op_col, Self::term)?);
            } else if self.eat('-') {
                let t = self.operand('-', op_col, Self::term)?;
                terms.push(t.scaled(ExactScalar::from_int(-1)));
            } else {
                return Ok(Expr::sum(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut factors = vec![self.factor()?];
        loop {
            self.skip_ws();
            let op_col = self.col();
            if self.eat('*') {
                factors.push(self.operand('*', op_col, Self::factor)?);
            } else {
                return Ok(Expr::product(factors));
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        self.skip_ws();
        let op_col = self.col();
        if self.eat('-') {
            let f = self.operand('-', op_col, Self::factor)?;
            return Ok(f.scaled(ExactScalar::from_int(-1)));
        }
        self.atom()
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<ExactScalar, DslError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.chars[s..p.pos].iter().collect::<String>()
        };
        let num = digits(self);
        if num.is_empty() {
            return err(start + 1, "expected a number");
        }
        let mut den = "1".to_string();
        if self.peek() == Some('/') {
            self.pos += 1;
            den = digits(self);
            if den.is_empty() {
                return err(self.col(), "expected a denominator after `/`");
            }
        }
        let text = format!("{num}/{den}");
        text.parse().map_err(|e| DslError { column: start + 1, message: format!("{e}") })
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        self.skip_ws();
        let col = self.col();
        match self.peek() {
            None => err(col, "unexpected end of input"),
            Some(c) if c.is_ascii_digit() => Ok(Expr::constant(self.number()?)),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    "sqrt" => Ok(Expr::constant(self.sqrt_call(col)?)),
                    "e" => {
                        self.expect('(')?;
                        let (q, r, s) = self.linear()?;
                        self.expect(')')?;
                        Ok(Expr::exp(q, r, s))
                    }
                    "sinpi" | "cospi" => {
                        self.expect('(')?;
                        let v = self.var()?;
                        self.expect(')')?;
                        Ok(if name == "sinpi" { Expr::SinPi(v) } else { Expr::CosPi(v) })
                    }
                    "abs" | "conj" => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(if name == "abs" { Expr::abs(e) } else { e.conj() })
                    }
                    "chi" => {
                        self.expect('(')?;
                        let a = self.scalar_arg(',')?;
                        self.expect(',')?;
                        let b = self.scalar_arg(')')?;
                        self.expect(')')?;
                        Ok(Expr::chi(a, b))
                    }
                    _ => err(col, format!("unknown identifier `{name}`")),
                }
            }
            Some(c) => err(col, format!("unexpected `{c}`")),
        }
    }

    fn var(&mut self) -> Result<Var, DslError> {
        self.skip_ws();
        let col = self.col();
        match self.ident().as_str() {
            "x" => Ok(Var::X),
            "y" => Ok(Var::Y),
            "" => err(col, "expected `x` or `y`"),
            other => err(col, format!("expected `x` or `y`, found `{other}`")),
        }
    }

    fn sqrt_call(&mut self, col: usize) -> Result<ExactScalar, DslError> {
        self.expect('(')?;
        self.skip_ws();
        let arg_col = self.col();
        let n = self.number()?;
        self.expect(')')?;
        let d = n.as_integer().and_then(|i| u64::try_from(i).ok());
        let Some(d) = d else { return err(arg_col, "sqrt takes a positive integer") };
        let s = ExactScalar::surd(1, 1, d).map_err(|e| DslError { column: arg_col, message: e.to_string() })?;
        self.check_field(&s, col)?;
        Ok(s)
    }

    fn check_field(&self, s: &ExactScalar, col: usize) -> Result<(), DslError> {
        if s.field() != 0 && s.field() != self.d {
            return err(col, format!("sqrt({}) does not belong to the parameter field", s.field()));
        }
        Ok(())
    }

    /// A raw scalar up to the next top-level `stop`, parsed as an exact scalar.
    fn scalar_arg(&mut self, stop: char) -> Result<ExactScalar, DslError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            match c {
                '(' => depth += 1,
                ')' if depth > 0 => depth -= 1,
                c if c == stop && depth == 0 => break,
                ')' | ',' if depth == 0 => break,
                _ => {}
            }
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if text.trim().is_empty() {
            return err(start + 1, "expected a scalar");
        }
        let s: ExactScalar = text.parse().map_err(|e| match e {
            qhm_core::Error::Parse { column, message } => DslError { column: start + column, message },
            other => DslError { column: start + 1, message: other.to_string() },
        })?;
        self.check_field(&s, start + 1)?;
        Ok(s)
    }

    /// `q x + r y + s` with rational coefficients in any order.
    fn linear(&mut self) -> Result<(ExactScalar, ExactScalar, ExactScalar), DslError> {
        let mut acc = [ExactScalar::zero(), ExactScalar::zero(), ExactScalar::zero()];
        let mut sign = 1;
        self.skip_ws();
        let lead_col = self.col();
        if self.eat('-') {
            sign = -1;
            self.operand('-', lead_col, |_| Ok(()))?;
        }
        loop {
            let (slot, v) = self.linear_term()?;
            acc[slot] = acc[slot].checked_add(&v.scale_int(sign)).expect("rational");
            self.skip_ws();
            let op_col = self.col();
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                let [q, r, s] = acc;
                return Ok((q, r, s));
            }
            let op = if sign > 0 { '+' } else { '-' };
            self.operand(op, op_col, |_| Ok(()))?;
        }
    }

    fn linear_term(&mut self) -> Result<(usize, ExactScalar), DslError> {
        self.skip_ws();
        let col = self.col();
        let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit()) { Some(self.number()?) } else { None };
        if coeff.is_some() {
            self.eat('*');
        }
        self.skip_ws();
        let slot = match self.peek() {
            Some('x') => Some(0),
            Some('y') => Some(1),
            _ => None,
        };
        match (coeff, slot) {
            (c, Some(slot)) => {
                self.pos += 1;
                Ok((slot, c.unwrap_or_else(ExactScalar::one)))
            }
            (Some(c), None) => Ok((2, c)),
            (None, None) => match self.peek() {
                Some(found) => err(col, format!("expected a linear term, found `{found}`")),
                None => err(col, "expected a linear term"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_expr("1", 0).unwrap(), Expr::one());
        let e = parse_expr("e(2x+0y+0)*sinpi(x)", 0).unwrap();
        let want = Expr::exp(ExactScalar::from_int(2), ExactScalar::zero(), ExactScalar::zero()).times(Expr::SinPi(Var::X));
        assert!(close(e.eval(0.3, 0.2), want.eval(0.3, 0.2)));
        let e = parse_expr("-1/2*x + 3*(y - 1)", 0).unwrap();
        assert!(close(e.eval(0.5, 0.25), Complex64::new(-0.25 - 2.25, 0.0)));
        let e = parse_expr("chi(0, -1+sqrt(2)) * abs(cospi(x)) + conj(e(y - 1/4))", 2).unwrap();
        assert!(close(e.eval(0.9, 0.0), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn linear_forms_in_any_order() {
        let a = parse_expr("e(1/4 - y + 3*x)", 0).unwrap();
        let b = parse_expr("e(3x-y+1/4)", 0).unwrap();
        assert_eq!(a, b);
        let c = parse_expr("e(-x)", 0).unwrap();
        assert!(close(c.eval(0.25, 0.0), Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn errors_point_at_the_problem() {
        assert_eq!(parse_expr("e(x+", 0).unwrap_err().column, 4);
        assert_eq!(parse_expr("x +", 0).unwrap_err().column, 3);
        let e = parse_expr("2*foo(x)", 0).unwrap_err();
        assert_eq!((e.column, e.message.as_str()), (3, "unknown identifier `foo`"));
        assert_eq!(parse_expr("(x", 0).unwrap_err().column, 3);
        assert_eq!(parse_expr("x y", 0).unwrap_err().column, 3);
        assert!(parse_expr("sqrt(4)", 4).unwrap_err().message.contains("squarefree"));
        assert!(parse_expr("sqrt(3)", 2).is_err());
        assert_eq!(parse_expr("chi(0, 1//2)", 0).unwrap_err().column, 10);
        assert_eq!(parse_expr("", 0).unwrap_err().column, 1);
    }
}
