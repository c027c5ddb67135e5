//! Pratt parser for the expression grammar.
//!
//! ```text
//! expr   := sum
//! primary:= number | ident | ident '[' vars ']' [ '(' args ')' ] | ident '\''* '(' args ')' | '(' expr ')'
//! ops    := '+' '-' (left) < '*' '/' (left) < unary '-' < '^' (right)
//! ```

use num_bigint::BigInt;

use super::atom::{Atom, JetIndex, Symbol};
use super::expr::Expr;
use super::poly::{q_to_exp, Q};
use super::{KernelError, SymbolTable};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, KernelError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, at) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), KernelError> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(ch) = trimmed.chars().next() else {
            return Ok((Tok::End, start));
        };
        if ch.is_ascii_digit() {
            let len = trimmed
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(trimmed.len());
            self.pos += len;
            let n: BigInt = trimmed[..len].parse().unwrap();
            return Ok((Tok::Num(n), start));
        }
        if ch.is_alphabetic() || ch == '_' {
            let len = trimmed
                .char_indices()
                .find(|(_, c)| !(c.is_alphanumeric() || *c == '_'))
                .map_or(trimmed.len(), |(i, _)| i);
            self.pos += len;
            let mut name = trimmed[..len].to_string();
            if name == "α" {
                name = "alpha".into();
            } else if name == "β" {
                name = "beta".into();
            }
            return Ok((Tok::Ident(name), start));
        }
        self.pos += ch.len_utf8();
        let op = match ch {
            '−' => '-',
            '·' => '*',
            '′' => '\'',
            c => c,
        };
        if "+-*/^()[],'".contains(op) {
            Ok((Tok::Op(op), start))
        } else {
            Err(KernelError::Syntax {
                offset: start,
                expected: vec!["expression".into()],
                found: ch.to_string(),
            })
        }
    }
}

struct Parser<'t> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    table: &'t SymbolTable,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => n.to_string(),
        Tok::Ident(s) => s.clone(),
        Tok::Op(c) => c.to_string(),
        Tok::End => "end of input".into(),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn unbump(&mut self, t: &Tok) {
        if *t != Tok::End {
            self.i -= 1;
        }
    }

    fn err(&self, expected: &[&str]) -> KernelError {
        KernelError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(self.peek()),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), KernelError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[&c.to_string()]))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, KernelError> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, lbp, rbp) = match self.peek() {
                Tok::Op('+') => ('+', 1, 2),
                Tok::Op('-') => ('-', 1, 2),
                Tok::Op('*') => ('*', 3, 4),
                Tok::Op('/') => ('/', 3, 4),
                Tok::Op('^') => ('^', 8, 7),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.bump();
            if op == '^' {
                let at = self.offset();
                let rhs = self.expr(rbp)?;
                let k = rhs.as_const().cloned().ok_or_else(|| KernelError::Syntax {
                    offset: at,
                    expected: vec!["rational exponent".into()],
                    found: rhs.to_string(),
                })?;
                let e = q_to_exp(&k).ok_or_else(|| {
                    KernelError::Unsupported(format!("exponent {k} out of range"))
                })?;
                lhs = lhs.pow(e);
                continue;
            }
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => lhs.add(&rhs),
                '-' => lhs.sub(&rhs),
                '*' => lhs.mul(&rhs),
                _ => {
                    if rhs.is_const_zero() {
                        return Err(KernelError::ZeroDenominator);
                    }
                    lhs.div(&rhs)
                }
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, KernelError> {
        match self.bump() {
            Tok::Num(n) => Ok(Expr::constant(Q::from_integer(n))),
            Tok::Op('-') => Ok(self.expr(5)?.neg()),
            Tok::Op('+') => self.expr(5),
            Tok::Op('(') => {
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name),
            t => {
                self.unbump(&t);
                Err(self.err(&["number", "identifier", "(", "-"]))
            }
        }
    }

    fn names(&mut self, close: char) -> Result<Vec<String>, KernelError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Op(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            match self.bump() {
                Tok::Ident(s) => out.push(s),
                t => {
                    self.unbump(&t);
                    return Err(self.err(&["variable name"]));
                }
            }
            match self.bump() {
                Tok::Op(',') => continue,
                Tok::Op(c) if c == close => return Ok(out),
                t => {
                    self.unbump(&t);
                    return Err(self.err(&[",", &close.to_string()]));
                }
            }
        }
    }

    fn unknown(&self, name: &str, at: usize) -> KernelError {
        KernelError::UnknownSymbol {
            name: name.to_string(),
            offset: at,
            table: self.table.to_string(),
        }
    }

    fn check_bases(&self, names: &[String], allowed: &[String], at: usize) -> Result<(), KernelError> {
        for n in names {
            if !allowed.contains(n) {
                return Err(self.unknown(n, at));
            }
        }
        Ok(())
    }

    fn ident(&mut self, name: String) -> Result<Expr, KernelError> {
        let at = self.toks[self.i - 1].1;
        let t = self.table;
        if t.is_param(&name) {
            return Ok(Atom::Param(Symbol::new(&name)).into());
        }
        if t.is_base(&name) {
            return Ok(Atom::Base(Symbol::new(&name)).into());
        }
        let is_func = t.funcs.contains_key(&name);
        let is_dep = t.is_dep(&name);
        if !is_func && !is_dep {
            return Err(self.unknown(&name, at));
        }
        let mut index: Vec<String> = Vec::new();
        let mut primes = 0usize;
        if *self.peek() == Tok::Op('[') {
            self.bump();
            index = self.names(']')?;
        }
        while *self.peek() == Tok::Op('\'') {
            self.bump();
            primes += 1;
        }
        let args = if *self.peek() == Tok::Op('(') {
            self.bump();
            Some(self.names(')')?)
        } else {
            None
        };
        if is_func {
            let declared = t.funcs[&name].clone();
            let args = args.ok_or_else(|| self.err(&["("]))?;
            if args != declared {
                return Err(KernelError::Syntax {
                    offset: at,
                    expected: vec![format!("{name}({})", declared.join(","))],
                    found: format!("{name}({})", args.join(",")),
                });
            }
            if primes > 0 {
                if declared.len() != 1 || !index.is_empty() {
                    return Err(KernelError::Syntax {
                        offset: at,
                        expected: vec![format!("{name}[vars]({})", declared.join(","))],
                        found: "primes on a multi-argument function".into(),
                    });
                }
                index = vec![declared[0].clone(); primes];
            }
            self.check_bases(&index, &declared, at)?;
            let idx = JetIndex::from_symbols(index.iter().map(|s| Symbol::new(s)));
            return Ok(t.func_atom(&name, idx).unwrap().into());
        }
        if primes > 0 {
            let args = match args {
                Some(a) if a.len() == 1 && index.is_empty() => a,
                _ => return Err(self.err(&["(variable)"])),
            };
            index = vec![args[0].clone(); primes];
        } else if let Some(args) = args {
            if !index.is_empty() || args.iter().any(|a| !t.is_base(a)) {
                return Err(self.err(&["jet index"]));
            }
        }
        self.check_bases(&index, &t.bases, at)?;
        Ok(Atom::Jet {
            dep: Symbol::new(&name),
            index: JetIndex::from_symbols(index.iter().map(|s| Symbol::new(s))),
        }
        .into())
    }
}

/// Parses `text` against the declared symbols.
pub fn parse(text: &str, table: &SymbolTable) -> Result<Expr, KernelError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, table };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.err(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tb() -> SymbolTable {
        SymbolTable::bk()
    }

    #[test]
    fn jets_are_multisets() {
        let a = parse("u[x,t]", &tb()).unwrap();
        let b = parse("u[t,x]", &tb()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constants_reduce() {
        assert_eq!(parse("3/6", &tb()).unwrap(), Expr::rational(1, 2));
        assert_eq!(parse("2^(1/2)*2^(1/2)", &tb()).unwrap(), Expr::int(2));
    }

    #[test]
    fn functions_and_primes() {
        let e = parse("b''(t)", &tb()).unwrap();
        assert_eq!(e.as_atom().unwrap(), &Atom::func1("b", "t", 2));
        let tbl = SymbolTable::ode("s", "w");
        let w = parse("w'(s) - w[s]", &tbl).unwrap();
        assert!(w.is_const_zero());
        assert_eq!(parse("w", &tbl).unwrap(), parse("w[]", &tbl).unwrap());
    }

    #[test]
    fn unicode_minus_and_greek() {
        let a = parse("α − β", &tb()).unwrap();
        let b = parse("alpha - beta", &tb()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("u[x] + * 2", &tb()) {
            Err(KernelError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 7);
                assert!(expected.contains(&"identifier".to_string()));
            }
            other => panic!("{other:?}"),
        }
        match parse("u[x] + zeta", &tb()) {
            Err(KernelError::UnknownSymbol { name, offset, table }) => {
                assert_eq!(name, "zeta");
                assert_eq!(offset, 7);
                assert!(table.contains("alpha"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("u[q]", &tb()).is_err());
    }

    #[test]
    fn precedence() {
        let a = parse("-x^2", &tb()).unwrap();
        let x = Expr::atom(Atom::base("x"));
        assert_eq!(a, x.powi(2).neg());
        let b = parse("x/y*t", &tb()).unwrap();
        assert_eq!(b, parse("t*x/y", &tb()).unwrap());
    }
}
