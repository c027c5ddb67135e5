//! Exact symbolic kernel over jet-space atoms.

pub mod atom;
pub mod emit;
pub mod expr;
pub mod parse;
pub mod poly;
pub mod ratfn;

use std::collections::BTreeMap;
use std::fmt;

pub use atom::{Atom, FuncArg, JetIndex, Symbol, DEFAULT_DERIVATIVE_CAP};
pub use emit::emit;
pub use expr::{Expr, Node};
pub use parse::parse;
pub use poly::{Exponent, Monomial, Poly, Q};
pub use ratfn::{CanonicalForm, RatFn};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown symbol `{name}` at byte {offset}; declared: {table}")]
    UnknownSymbol {
        name: String,
        offset: usize,
        table: String,
    },
    #[error("derivative order of {atom} exceeds cap {cap}")]
    DerivativeCap { atom: String, cap: usize },
    #[error("division by an expression that is identically zero")]
    ZeroDenominator,
    #[error("no numeric value bound for {0}")]
    UnboundAtom(String),
    #[error("negative base under a fractional exponent")]
    NegativeFractionalBase,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Names the parser may resolve, grouped by kind.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    pub params: Vec<String>,
    pub bases: Vec<String>,
    pub deps: Vec<String>,
    /// Function name to argument list (dependent-variable names become `FuncArg::Dep`).
    pub funcs: BTreeMap<String, Vec<String>>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn param(mut self, name: &str) -> Self {
        self.params.push(name.to_string());
        self
    }

    pub fn base(mut self, name: &str) -> Self {
        self.bases.push(name.to_string());
        self
    }

    pub fn dep(mut self, name: &str) -> Self {
        self.deps.push(name.to_string());
        self
    }

    pub fn func(mut self, name: &str, args: &[&str]) -> Self {
        self.funcs
            .insert(name.to_string(), args.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Parameters alpha, beta, c; bases t, x, y; dependent u; functions a(t), b(t).
    pub fn bk() -> Self {
        SymbolTable::new()
            .param("alpha")
            .param("beta")
            .param("c")
            .base("t")
            .base("x")
            .base("y")
            .dep("u")
            .func("a", &["t"])
            .func("b", &["t"])
    }

    /// Table for an ODE in `base` with one dependent variable.
    pub fn ode(base: &str, dep: &str) -> Self {
        SymbolTable::new()
            .param("alpha")
            .param("beta")
            .param("c")
            .base(base)
            .dep(dep)
    }

    pub fn is_param(&self, s: &str) -> bool {
        self.params.iter().any(|p| p == s)
    }

    pub fn is_base(&self, s: &str) -> bool {
        self.bases.iter().any(|p| p == s)
    }

    pub fn is_dep(&self, s: &str) -> bool {
        self.deps.iter().any(|p| p == s)
    }

    pub fn func_atom(&self, name: &str, index: JetIndex) -> Option<Atom> {
        let args = self.funcs.get(name)?;
        let args: Vec<FuncArg> = args
            .iter()
            .map(|a| {
                if self.is_dep(a) {
                    FuncArg::Dep(Symbol::new(a))
                } else {
                    FuncArg::Base(Symbol::new(a))
                }
            })
            .collect();
        Some(Atom::Func {
            name: Symbol::new(name),
            args: args.into(),
            index,
        })
    }
}

impl fmt::Display for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "params [{}], bases [{}], deps [{}], funcs [",
            self.params.join(", "),
            self.bases.join(", "),
            self.deps.join(", ")
        )?;
        for (i, (n, a)) in self.funcs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}({})", a.join(","))?;
        }
        write!(f, "]")
    }
}

/// Parses with the BK symbol table and panics on error; for catalogs and tests.
pub fn bk(text: &str) -> Expr {
    parse(text, &SymbolTable::bk()).unwrap_or_else(|e| panic!("{text}: {e}"))
}
