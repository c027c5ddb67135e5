use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{Float, FromPrimitive, One, Signed, Zero};

use super::atom::{Atom, Symbol};
use super::poly::{rational_root_pow, Exponent, Monomial, Poly, Q};
use super::ratfn::{float_pow, q_to_float, RatFn};
use super::KernelError;

/// Immutable expression tree. Constructors keep it flattened, constant-folded
/// and sorted, so structurally equal trees compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Const(Q),
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Expr, Exponent),
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::emit::print(self))
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::emit::print(self))
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

fn wrap(n: Node) -> Expr {
    Expr(Arc::new(n))
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: Q) -> Expr {
        wrap(Node::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Q::from_integer(n.into()))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::constant(Q::new(n.into(), d.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn atom(a: Atom) -> Expr {
        wrap(Node::Atom(a))
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self.node() {
            Node::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    /// Splits a term into its rational coefficient and the remaining factor.
    fn split_coeff(&self) -> (Q, Option<Expr>) {
        match self.node() {
            Node::Const(c) => (c.clone(), None),
            Node::Product(fs) => match fs[0].as_const() {
                Some(c) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        wrap(Node::Product(rest))
                    };
                    (c.clone(), Some(rest))
                }
                None => (Q::one(), Some(self.clone())),
            },
            _ => (Q::one(), Some(self.clone())),
        }
    }

    fn split_power(&self) -> (Expr, Exponent) {
        match self.node() {
            Node::Power(b, e) => (b.clone(), *e),
            _ => (self.clone(), Exponent::one()),
        }
    }

    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Q::zero();
        let mut terms: BTreeMap<Expr, Q> = BTreeMap::new();
        let mut stack: Vec<Expr> = items.into_iter().collect();
        stack.reverse();
        while let Some(e) = stack.pop() {
            match e.node() {
                Node::Sum(ts) => stack.extend(ts.iter().rev().cloned()),
                _ => match e.split_coeff() {
                    (c, None) => constant += c,
                    (c, Some(rest)) => *terms.entry(rest).or_insert_with(Q::zero) += c,
                },
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for (rest, c) in terms {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::scaled(c, rest));
        }
        out.sort_by_key(term_key);
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => wrap(Node::Sum(out)),
        }
    }

    fn scaled(c: Q, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        let mut fs = vec![Expr::constant(c)];
        match rest.node() {
            Node::Product(inner) => fs.extend(inner.iter().cloned()),
            _ => fs.push(rest),
        }
        wrap(Node::Product(fs))
    }

    pub fn product(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Q::one();
        let mut factors: BTreeMap<Expr, Exponent> = BTreeMap::new();
        let mut stack: Vec<Expr> = items.into_iter().collect();
        while let Some(e) = stack.pop() {
            match e.node() {
                Node::Product(fs) => stack.extend(fs.iter().cloned()),
                Node::Const(c) => constant *= c,
                _ => {
                    let (b, k) = e.split_power();
                    *factors.entry(b).or_insert_with(Exponent::zero) += k;
                }
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::new();
        for (b, k) in factors {
            if k.is_zero() {
                continue;
            }
            let p = Expr::power_raw(b, k);
            match p.node() {
                Node::Const(c) => constant *= c,
                Node::Product(fs) => {
                    for f in fs {
                        match f.node() {
                            Node::Const(c) => constant *= c,
                            _ => out.push(f.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        out.sort_by_key(factor_key);
        if out.is_empty() {
            return Expr::constant(constant);
        }
        if constant.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !constant.is_one() {
            out.insert(0, Expr::constant(constant));
        }
        wrap(Node::Product(out))
    }

    fn power_raw(base: Expr, e: Exponent) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base;
        }
        match base.node() {
            Node::Const(c) => {
                if c.is_zero() {
                    return if e > Exponent::zero() {
                        Expr::zero()
                    } else {
                        wrap(Node::Power(base.clone(), e))
                    };
                }
                match rational_root_pow(c, e) {
                    Some(v) => Expr::constant(v),
                    None => wrap(Node::Power(base.clone(), e)),
                }
            }
            Node::Power(b, k) => Expr::power_raw(b.clone(), *k * e),
            Node::Product(fs) => {
                Expr::product(fs.iter().map(|f| Expr::power_raw(f.clone(), e)))
            }
            _ => wrap(Node::Power(base, e)),
        }
    }

    /// Power with rational exponent. Powers of products are distributed and
    /// nested powers collapse (bases are assumed positive where it matters).
    pub fn pow(&self, e: Exponent) -> Expr {
        if let Node::Const(c) = self.node() {
            if c.is_zero() && e < Exponent::zero() {
                return wrap(Node::Power(self.clone(), e));
            }
        }
        Expr::product([Expr::power_raw(self.clone(), e)])
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(Exponent::from_integer(n))
    }

    pub fn add(&self, o: &Expr) -> Expr {
        Expr::sum([self.clone(), o.clone()])
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        Expr::sum([self.clone(), o.neg()])
    }

    pub fn mul(&self, o: &Expr) -> Expr {
        Expr::product([self.clone(), o.clone()])
    }

    pub fn neg(&self) -> Expr {
        Expr::product([Expr::int(-1), self.clone()])
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn div(&self, o: &Expr) -> Expr {
        self.mul(&o.recip())
    }

    pub fn scale(&self, c: &Q) -> Expr {
        Expr::product([Expr::constant(c.clone()), self.clone()])
    }

    /// Post-order rebuild through the simplifying constructors.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Atom(a) => f(a).unwrap_or_else(|| self.clone()),
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.map_atoms(f)).collect::<Vec<_>>()),
            Node::Product(fs) => {
                Expr::product(fs.iter().map(|t| t.map_atoms(f)).collect::<Vec<_>>())
            }
            Node::Power(b, e) => b.map_atoms(f).pow(*e),
        }
    }

    /// Simultaneous substitution.
    pub fn substitute(&self, bindings: &BTreeMap<Atom, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        self.map_atoms(&mut |a| bindings.get(a).cloned())
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.clone());
        });
        out
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self.node() {
            Node::Const(_) => {}
            Node::Atom(a) => f(a),
            Node::Sum(ts) | Node::Product(ts) => ts.iter().for_each(|t| t.visit_atoms(f)),
            Node::Power(b, _) => b.visit_atoms(f),
        }
    }

    fn derive(
        &self,
        d: &mut dyn FnMut(&Atom) -> Result<Expr, KernelError>,
    ) -> Result<Expr, KernelError> {
        Ok(match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Atom(a) => d(a)?,
            Node::Sum(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for t in ts {
                    out.push(t.derive(d)?);
                }
                Expr::sum(out)
            }
            Node::Product(fs) => {
                let mut out = Vec::new();
                for i in 0..fs.len() {
                    let di = fs[i].derive(d)?;
                    if di.is_const_zero() {
                        continue;
                    }
                    let mut fac: Vec<Expr> = fs.to_vec();
                    fac[i] = di;
                    out.push(Expr::product(fac));
                }
                Expr::sum(out)
            }
            Node::Power(b, e) => {
                let db = b.derive(d)?;
                if db.is_const_zero() {
                    Expr::zero()
                } else {
                    let k = Q::new((*e.numer()).into(), (*e.denom()).into());
                    Expr::product([
                        Expr::constant(k),
                        b.pow(*e - Exponent::one()),
                        db,
                    ])
                }
            }
        })
    }

    /// Total derivative in base variable `v`, honouring the derivative cap.
    pub fn total_derivative(&self, v: &Symbol, cap: usize) -> Result<Expr, KernelError> {
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        self.derive(&mut |a| {
            if let Some(e) = cache.get(a) {
                return Ok(e.clone());
            }
            let r = super::poly::atom_total_derivative(a, v, cap)?;
            let e = Expr::from_poly(&r);
            cache.insert(a.clone(), e.clone());
            Ok(e)
        })
    }

    pub fn partial_derivative(&self, x: &Atom) -> Expr {
        self.derive(&mut |a| Ok(if a == x { Expr::one() } else { Expr::zero() }))
            .expect("partial derivative is infallible")
    }

    /// Exact canonical form.
    pub fn canonicalize(&self) -> Result<RatFn, KernelError> {
        Ok(match self.node() {
            Node::Const(c) => RatFn::constant(c.clone()),
            Node::Atom(a) => RatFn::atom(a.clone()),
            Node::Sum(ts) => {
                let mut acc = RatFn::zero();
                for t in ts {
                    acc = acc.add(&t.canonicalize()?);
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = RatFn::one();
                for f in fs {
                    acc = acc.mul(&f.canonicalize()?);
                }
                acc
            }
            Node::Power(b, e) => b.canonicalize()?.pow(*e)?,
        })
    }

    pub fn is_zero(&self) -> Result<bool, KernelError> {
        Ok(self.canonicalize()?.is_zero())
    }

    /// Canonicalize, then rebuild a tree from the canonical form.
    pub fn normalize(&self) -> Result<Expr, KernelError> {
        Ok(Expr::from_ratfn(&self.canonicalize()?))
    }

    pub fn from_poly(p: &Poly) -> Expr {
        Expr::sum(
            p.terms()
                .map(|(m, c)| Expr::from_monomial(c, m))
                .collect::<Vec<_>>(),
        )
    }

    pub fn from_monomial(c: &Q, m: &Monomial) -> Expr {
        let mut fs = vec![Expr::constant(c.clone())];
        for (a, e) in m.pairs() {
            fs.push(Expr::atom(a.clone()).pow(*e));
        }
        Expr::product(fs)
    }

    pub fn from_ratfn(r: &RatFn) -> Expr {
        let mut fs = vec![Expr::from_poly(r.numerator())];
        for (p, k) in r.denominator_factors() {
            fs.push(Expr::from_poly(p).powi(-(*k as i64)));
        }
        Expr::product(fs)
    }

    /// Floating-point evaluation; constants are converted at their own node.
    pub fn eval<F: Float + FromPrimitive>(
        &self,
        lookup: &dyn Fn(&Atom) -> Option<F>,
    ) -> Result<F, KernelError> {
        Ok(match self.node() {
            Node::Const(c) => q_to_float(c),
            Node::Atom(a) => lookup(a).ok_or_else(|| KernelError::UnboundAtom(a.to_string()))?,
            Node::Sum(ts) => {
                let mut acc = F::zero();
                for t in ts {
                    acc = acc + t.eval(lookup)?;
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = F::one();
                for f in fs {
                    acc = acc * f.eval(lookup)?;
                }
                acc
            }
            Node::Power(b, e) => float_pow(b.eval(lookup)?, *e)?,
        })
    }

    /// Evaluation against an explicit binding map.
    pub fn eval_numeric<F: Float + FromPrimitive>(
        &self,
        bindings: &BTreeMap<Atom, F>,
    ) -> Result<F, KernelError> {
        self.eval(&|a| bindings.get(a).copied())
    }

    pub fn is_negative_term(&self) -> bool {
        self.split_coeff().0.is_negative()
    }
}

/// Total degree of a term, used for the graded ordering of sums.
fn degree(e: &Expr) -> Exponent {
    match e.node() {
        Node::Const(_) => Exponent::zero(),
        Node::Atom(_) => Exponent::one(),
        Node::Sum(ts) => ts.iter().map(degree).max().unwrap_or_default(),
        Node::Product(fs) => fs.iter().map(degree).fold(Exponent::zero(), |a, b| a + b),
        Node::Power(b, k) => degree(b) * *k,
    }
}

fn term_key(e: &Expr) -> (Exponent, Option<Expr>) {
    let (_, rest) = e.split_coeff();
    (degree(e), rest)
}

fn factor_key(e: &Expr) -> (Expr, Exponent) {
    e.split_power()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::atom(Atom::base("x"))
    }

    #[test]
    fn like_terms_and_factors_combine() {
        let e = x().add(&x());
        assert_eq!(e, x().scale(&Q::from_integer(2.into())));
        let p = x().mul(&x().powi(2));
        assert_eq!(p, x().powi(3));
        assert_eq!(x().mul(&x().recip()), Expr::one());
    }

    #[test]
    fn nested_powers_collapse() {
        let t = Expr::atom(Atom::base("t"));
        let e = t.pow(Exponent::new(1, 3)).powi(3);
        assert_eq!(e, t);
    }

    #[test]
    fn product_rule() {
        let ux = Expr::atom(Atom::jet("u", &["x"]));
        let uy = Expr::atom(Atom::jet("u", &["y"]));
        let d = ux.mul(&uy).total_derivative(&Symbol::new("x"), 8).unwrap();
        let expect = Expr::atom(Atom::jet("u", &["x", "x"]))
            .mul(&uy)
            .add(&ux.mul(&Expr::atom(Atom::jet("u", &["x", "y"]))));
        assert_eq!(d, expect);
    }
}
