use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::KernelError;

/// Default cap on the order of any jet or function-derivative atom.
pub const DEFAULT_DERIVATIVE_CAP: usize = 8;

/// Interned-by-value identifier. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unordered multiset of differentiation variables, stored sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct JetIndex(SmallVec<[Symbol; 4]>);

impl JetIndex {
    pub fn empty() -> Self {
        JetIndex(SmallVec::new())
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(it: I) -> Self {
        let mut v: SmallVec<[Symbol; 4]> = it.into_iter().collect();
        v.sort();
        JetIndex(v)
    }

    pub fn parse_list(names: &[&str]) -> Self {
        Self::from_symbols(names.iter().map(|n| Symbol::new(n)))
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.0.iter()
    }

    pub fn count(&self, v: &Symbol) -> usize {
        self.0.iter().filter(|s| *s == v).count()
    }

    pub fn with(&self, v: &Symbol) -> Self {
        let mut out = self.0.clone();
        let pos = out.partition_point(|s| s <= v);
        out.insert(pos, v.clone());
        JetIndex(out)
    }

    /// Removes one copy of `v`; `None` if absent.
    pub fn without(&self, v: &Symbol) -> Option<Self> {
        let pos = self.0.iter().position(|s| s == v)?;
        let mut out = self.0.clone();
        out.remove(pos);
        Some(JetIndex(out))
    }

    /// Multiset containment: every symbol of `other` occurs here at least as often.
    pub fn contains(&self, other: &JetIndex) -> bool {
        other.0.iter().all(|s| self.count(s) >= other.count(s))
    }

    /// Multiset difference `self - other`; `None` unless `self` contains `other`.
    pub fn minus(&self, other: &JetIndex) -> Option<Self> {
        let mut out = self.clone();
        for s in other.iter() {
            out = out.without(s)?;
        }
        Some(out)
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }
}

impl fmt::Debug for JetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Argument slot of an undetermined scalar function: a base variable or the
/// undifferentiated value of a dependent variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FuncArg {
    Base(Symbol),
    Dep(Symbol),
}

impl FuncArg {
    pub fn name(&self) -> &Symbol {
        match self {
            FuncArg::Base(s) | FuncArg::Dep(s) => s,
        }
    }
}

/// An indeterminate of the jet space.
///
/// Variant order fixes the canonical factor order used when printing:
/// parameters, base variables, scalar functions, jet variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Param(Symbol),
    Base(Symbol),
    /// `name(args)` differentiated by the multiset `index` of argument names.
    Func {
        name: Symbol,
        args: Arc<[FuncArg]>,
        index: JetIndex,
    },
    /// Derivative of a dependent variable: `u[x,t]` is `u` with index `{t,x}`.
    Jet { dep: Symbol, index: JetIndex },
}

impl Atom {
    pub fn param(name: &str) -> Self {
        Atom::Param(Symbol::new(name))
    }

    pub fn base(name: &str) -> Self {
        Atom::Base(Symbol::new(name))
    }

    pub fn jet(dep: &str, index: &[&str]) -> Self {
        Atom::Jet {
            dep: Symbol::new(dep),
            index: JetIndex::parse_list(index),
        }
    }

    /// Single-argument function of a base variable differentiated `order` times.
    pub fn func1(name: &str, arg: &str, order: usize) -> Self {
        let a = Symbol::new(arg);
        Atom::Func {
            name: Symbol::new(name),
            args: Arc::from(vec![FuncArg::Base(a.clone())]),
            index: JetIndex::from_symbols(std::iter::repeat_n(a, order)),
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Atom::Jet { .. })
    }

    pub fn is_jet_of(&self, dep: &Symbol) -> bool {
        matches!(self, Atom::Jet { dep: d, .. } if d == dep)
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Atom::Param(_))
    }

    /// Differentiation order carried by the atom (0 for parameters and base variables).
    pub fn order(&self) -> usize {
        match self {
            Atom::Jet { index, .. } | Atom::Func { index, .. } => index.order(),
            _ => 0,
        }
    }

    pub(crate) fn check_cap(&self, cap: usize) -> Result<(), KernelError> {
        if self.order() > cap {
            Err(KernelError::DerivativeCap {
                atom: self.to_string(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Jet atom with one more derivative in `v`.
    pub fn jet_with(&self, v: &Symbol, cap: usize) -> Result<Atom, KernelError> {
        match self {
            Atom::Jet { dep, index } => {
                let a = Atom::Jet {
                    dep: dep.clone(),
                    index: index.with(v),
                };
                a.check_cap(cap)?;
                Ok(a)
            }
            Atom::Func { name, args, index } => {
                let a = Atom::Func {
                    name: name.clone(),
                    args: args.clone(),
                    index: index.with(v),
                };
                a.check_cap(cap)?;
                Ok(a)
            }
            _ => Ok(self.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(s) | Atom::Base(s) => write!(f, "{s}"),
            Atom::Jet { dep, index } => {
                write!(f, "{dep}[")?;
                for (i, s) in index.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
            Atom::Func { name, args, index } => {
                if args.len() == 1 {
                    write!(f, "{name}")?;
                    for _ in 0..index.order() {
                        write!(f, "'")?;
                    }
                } else {
                    write!(f, "{name}")?;
                    if index.order() > 0 {
                        write!(f, "[")?;
                        for (i, s) in index.iter().enumerate() {
                            if i > 0 {
                                write!(f, ",")?;
                            }
                            write!(f, "{s}")?;
                        }
                        write!(f, "]")?;
                    }
                }
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a.name())?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_partials_are_identified() {
        assert_eq!(Atom::jet("u", &["x", "t"]), Atom::jet("u", &["t", "x"]));
        assert_eq!(Atom::jet("u", &["x", "t"]).to_string(), "u[t,x]");
    }

    #[test]
    fn index_multiset_ops() {
        let s = JetIndex::parse_list(&["x", "x", "t", "y"]);
        let l = JetIndex::parse_list(&["x", "t"]);
        assert!(s.contains(&l));
        assert_eq!(s.minus(&l).unwrap(), JetIndex::parse_list(&["x", "y"]));
        assert!(!l.contains(&s));
        assert_eq!(s.count(&Symbol::new("x")), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let mut a = Atom::jet("u", &[]);
        let x = Symbol::new("x");
        for _ in 0..3 {
            a = a.jet_with(&x, 3).unwrap();
        }
        assert!(matches!(
            a.jet_with(&x, 3),
            Err(KernelError::DerivativeCap { .. })
        ));
    }

    #[test]
    fn function_atoms_print_with_primes() {
        assert_eq!(Atom::func1("b", "t", 2).to_string(), "b''(t)");
        assert_eq!(Atom::func1("a", "t", 0).to_string(), "a(t)");
    }
}
