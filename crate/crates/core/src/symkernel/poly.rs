//! Sparse Laurent–Puiseux polynomials over the rationals.
//!
//! Atoms may carry negative or fractional exponents: `t^(1/3)` is the
//! indeterminate `t^(1/L)` raised to an integer power, so every identity
//! holds in `Q[atoms^(±1/L)]` and zero testing stays exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::atom::{Atom, FuncArg, Symbol};
use super::KernelError;

pub type Q = BigRational;
pub type Exponent = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Product of atom powers, sorted by atom, exponents nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, Exponent::one())])
    }

    pub fn power(a: Atom, e: Exponent) -> Self {
        if e.is_zero() {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn from_pairs(mut v: Vec<(Atom, Exponent)>) -> Self {
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, Exponent)> = Vec::with_capacity(v.len());
        for (a, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == a => last.1 += e,
                _ => out.push((a, e)),
            }
        }
        out.retain(|(_, e)| !e.is_zero());
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Atom, Exponent)] {
        &self.0
    }

    pub fn exponent(&self, a: &Atom) -> Exponent {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or_else(|_| Exponent::zero())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if !e.is_zero() {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn pow(&self, e: Exponent) -> Monomial {
        if e.is_zero() {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(a, x)| (a.clone(), *x * e)).collect())
    }

    pub fn inv(&self) -> Monomial {
        self.pow(-Exponent::one())
    }

    /// `self / other` as a Laurent monomial.
    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    /// True when every exponent of `self / other` is nonnegative.
    pub fn divisible_by(&self, other: &Monomial) -> bool {
        self.div(other)
            .0
            .iter()
            .all(|(_, e)| *e >= Exponent::zero())
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> Exponent {
        self.0.iter().fold(Exponent::zero(), |acc, (_, e)| acc + e)
    }

    /// Splits into the parts whose atoms do / do not satisfy `pred`.
    pub fn split(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter().map(|(a, _)| a)
    }

    /// Formal partial derivative: `(coefficient, monomial)` of d/d`a`.
    fn partial(&self, a: &Atom) -> Option<(Exponent, Monomial)> {
        let e = self.exponent(a);
        if e.is_zero() {
            return None;
        }
        Some((e, self.mul(&Monomial::power(a.clone(), -Exponent::one()))))
    }
}

/// Lexicographic monomial order over the atom order; compatible with multiplication.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let zero = Exponent::zero();
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, ea)), None) => return ea.cmp(&zero),
                (None, Some((_, eb))) => return zero.cmp(eb),
                (Some((xa, ea)), Some((xb, eb))) => match xa.cmp(xb) {
                    Ordering::Less => return ea.cmp(&zero),
                    Ordering::Greater => return zero.cmp(eb),
                    Ordering::Equal => {
                        let c = ea.cmp(eb);
                        if c != Ordering::Equal {
                            return c;
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (a, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e.is_one() {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^({e})")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial; the map key order is the lex monomial order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m:?}")?;
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Q::one(), Monomial::atom(a))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Q)> {
        self.terms.into_iter()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Constant value, if the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The single term, if there is exactly one.
    pub fn as_term(&self) -> Option<(&Monomial, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in small.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, k: &Q, mono: &Monomial) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.atoms().cloned())
            .collect()
    }

    pub fn contains_atom(&self, pred: impl Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| m.atoms().any(&pred))
    }

    /// Per-atom minimum exponent over all terms (absent atoms count as 0).
    pub fn min_monomial(&self) -> Monomial {
        let mut pairs = Vec::new();
        for a in self.atoms() {
            let min = self
                .terms
                .keys()
                .map(|m| m.exponent(&a))
                .min()
                .unwrap_or_else(Exponent::zero);
            if !min.is_zero() {
                pairs.push((a, min));
            }
        }
        Monomial::from_pairs(pairs)
    }

    /// `(content, monomial content, primitive part)` with `self = content * mono * prim`
    /// and `prim` having nonnegative exponents, no monomial content, and leading coefficient 1.
    pub fn primitive_decomposition(&self) -> (Q, Monomial, Poly) {
        if self.is_zero() {
            return (Q::zero(), Monomial::one(), Poly::zero());
        }
        let mono = self.min_monomial();
        let lead = self.leading().map(|(_, c)| c.clone()).unwrap();
        let inv_mono = mono.inv();
        let inv_lead = Q::one() / &lead;
        let prim = self.mul_term(&inv_lead, &inv_mono);
        (lead, mono, prim)
    }

    /// Exact quotient `self / f`, if `f` divides `self` in the Laurent ring.
    /// `f` must be primitive (no monomial content, nonnegative exponents).
    pub fn div_exact(&self, f: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (fm, fc) = f.leading()?;
        if let Some(c) = f.as_constant() {
            return Some(self.scale(&(Q::one() / c)));
        }
        let shift = {
            let m = self.min_monomial();
            Monomial::from_pairs(
                m.pairs()
                    .iter()
                    .filter(|(_, e)| *e < Exponent::zero())
                    .cloned()
                    .collect(),
            )
        };
        let mut rem = self.mul_term(&Q::one(), &shift.inv());
        let mut quot = Poly::zero();
        let fc_inv = Q::one() / fc;
        // bounded: each step removes the current leading monomial
        let mut guard = 0usize;
        while let Some((rm, rc)) = rem.leading() {
            guard += 1;
            if guard > 200_000 {
                return None;
            }
            if !rm.divisible_by(fm) {
                return None;
            }
            let tm = rm.div(fm);
            let tc = rc * &fc_inv;
            rem = rem.sub(&f.mul_term(&tc, &tm));
            quot.add_term(tm, tc);
        }
        Some(quot.mul_term(&Q::one(), &shift))
    }

    /// Formal partial derivative with respect to one atom.
    pub fn partial(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms.iter() {
            if let Some((e, m2)) = m.partial(a) {
                out.add_term(m2, c * exp_to_q(e));
            }
        }
        out
    }

    /// Total derivative in base variable `v` (jet chain rule).
    pub fn total_derivative(&self, v: &Symbol, cap: usize) -> Result<Poly, KernelError> {
        let mut out = Poly::zero();
        let mut cache: BTreeMap<Atom, Poly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            for (a, e) in m.pairs() {
                let da = match cache.get(a) {
                    Some(p) => p.clone(),
                    None => {
                        let p = atom_total_derivative(a, v, cap)?;
                        cache.insert(a.clone(), p.clone());
                        p
                    }
                };
                if da.is_zero() {
                    continue;
                }
                let rest = m.mul(&Monomial::power(a.clone(), -Exponent::one()));
                let k = c * exp_to_q(*e);
                out.add_assign(&da.mul_term(&k, &rest));
            }
        }
        Ok(out)
    }

    /// Groups terms by the part of each monomial whose atoms satisfy `pred`.
    pub fn split_by(&self, pred: impl Fn(&Atom) -> bool) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let (key, rest) = m.split(&pred);
            out.entry(key).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Degree in one atom, as (min exponent, max exponent).
    pub fn exponent_range(&self, a: &Atom) -> (Exponent, Exponent) {
        let mut lo = None::<Exponent>;
        let mut hi = None::<Exponent>;
        for m in self.terms.keys() {
            let e = m.exponent(a);
            lo = Some(lo.map_or(e, |x| x.min(e)));
            hi = Some(hi.map_or(e, |x| x.max(e)));
        }
        (lo.unwrap_or_default(), hi.unwrap_or_default())
    }

    /// Coefficient of `a^k` viewing the polynomial as a polynomial in `a`.
    pub fn coefficient_of(&self, a: &Atom, k: Exponent) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms.iter() {
            if m.exponent(a) == k {
                out.add_term(m.mul(&Monomial::power(a.clone(), -k)), c.clone());
            }
        }
        out
    }
}

/// D_v of a single atom.
pub fn atom_total_derivative(a: &Atom, v: &Symbol, cap: usize) -> Result<Poly, KernelError> {
    match a {
        Atom::Param(_) => Ok(Poly::zero()),
        Atom::Base(s) => Ok(if s == v { Poly::one() } else { Poly::zero() }),
        Atom::Jet { .. } => Ok(Poly::atom(a.jet_with(v, cap)?)),
        Atom::Func { args, .. } => {
            let mut out = Poly::zero();
            for arg in args.iter() {
                match arg {
                    FuncArg::Base(s) => {
                        if s == v {
                            out.add_term(Monomial::atom(a.jet_with(s, cap)?), Q::one());
                        }
                    }
                    FuncArg::Dep(d) => {
                        let f = a.jet_with(d, cap)?;
                        let du = Atom::Jet {
                            dep: d.clone(),
                            index: super::atom::JetIndex::from_symbols([v.clone()]),
                        };
                        du.check_cap(cap)?;
                        out.add_term(Monomial::from_pairs(vec![(f, Exponent::one()), (du, Exponent::one())]), Q::one());
                    }
                }
            }
            Ok(out)
        }
    }
}

pub fn exp_to_q(e: Exponent) -> Q {
    Q::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
}

/// Converts a rational to a small exponent; `None` if it does not fit.
pub fn q_to_exp(x: &Q) -> Option<Exponent> {
    Some(Exponent::new(x.numer().to_i64()?, x.denom().to_i64()?))
}

/// Exact `c^(p/q)` for rational `c`, if it is rational.
pub fn rational_root_pow(c: &Q, e: Exponent) -> Option<Q> {
    if e.is_integer() {
        let n = *e.numer();
        if c.is_zero() {
            return if n > 0 { Some(Q::zero()) } else { None };
        }
        let p = num_traits::pow::pow(c.clone(), n.unsigned_abs() as usize);
        return Some(if n < 0 { Q::one() / p } else { p });
    }
    if c.is_negative() {
        return None;
    }
    let d = *e.denom() as u32;
    let rn = int_root(c.numer(), d)?;
    let rd = int_root(c.denom(), d)?;
    let base = Q::new(rn, rd);
    rational_root_pow(&base, Exponent::from_integer(*e.numer()))
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Atom {
        Atom::base("x")
    }
    fn y() -> Atom {
        Atom::base("y")
    }

    #[test]
    fn lex_order_is_multiplicative() {
        let a = Monomial::atom(x());
        let b = Monomial::atom(y());
        let c = Monomial::power(y(), Exponent::new(2, 1));
        assert_eq!(a.cmp(&b), a.mul(&c).cmp(&b.mul(&c)));
        assert!(Monomial::power(x(), Exponent::new(1, 3)) > Monomial::one());
    }

    #[test]
    fn exact_division() {
        let px = Poly::atom(x());
        let py = Poly::atom(y());
        let f = px.add(&py);
        let g = px.sub(&py);
        let prod = f.mul(&g);
        assert_eq!(prod.div_exact(&f).unwrap(), g);
        assert!(prod.add(&Poly::one()).div_exact(&f).is_none());
    }

    #[test]
    fn decomposition_removes_content() {
        let p = Poly::atom(x()).mul(&Poly::atom(y())).scale(&q(6)).add(&Poly::atom(x()).scale(&q(4)));
        let (c, m, prim) = p.primitive_decomposition();
        assert_eq!(m, Monomial::atom(x()));
        assert_eq!(prim.leading().unwrap().1, &Q::one());
        assert_eq!(prim.mul_term(&c, &m), p);
    }

    #[test]
    fn roots() {
        assert_eq!(rational_root_pow(&q(8), Exponent::new(1, 3)), Some(q(2)));
        assert_eq!(rational_root_pow(&qr(4, 9), Exponent::new(-1, 2)), Some(qr(3, 2)));
        assert_eq!(rational_root_pow(&q(2), Exponent::new(1, 2)), None);
    }
}
