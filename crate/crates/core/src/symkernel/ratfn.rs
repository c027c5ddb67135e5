//! Canonical rational functions: a Laurent numerator over a factored denominator.
//!
//! Monomial denominators live in negative exponents of the numerator. The
//! remaining denominator is a list of primitive, monic, multi-term factors
//! with multiplicities, so common denominators are computed by taking the
//! maximum multiplicity per factor and no multivariate GCD is needed.
//! Zero testing is exact: a value is zero iff its numerator is empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};

use super::atom::{Atom, Symbol};
use super::poly::{exp_to_q, Exponent, Monomial, Poly, Q};
use super::KernelError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RatFn {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

/// The exact canonical form used for all equality decisions.
pub type CanonicalForm = RatFn;

impl std::fmt::Debug for RatFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?})", self.num)?;
        for (p, k) in &self.den {
            write!(f, " / ({p:?})^{k}")?;
        }
        Ok(())
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn { num: p, den: vec![] }
    }
}

impl From<Atom> for RatFn {
    fn from(a: Atom) -> Self {
        RatFn::from(Poly::atom(a))
    }
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn::default()
    }

    pub fn one() -> Self {
        RatFn::from(Poly::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFn::from(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        RatFn::constant(super::poly::q(n))
    }

    pub fn atom(a: Atom) -> Self {
        RatFn::from(a)
    }

    pub fn monomial(c: Q, m: Monomial) -> Self {
        RatFn::from(Poly::term(c, m))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    /// Rational constant value, if the function has no atoms.
    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Single `c * monomial` value (no factored denominator).
    pub fn as_monomial(&self) -> Option<(Q, Monomial)> {
        if !self.den.is_empty() {
            return None;
        }
        if self.num.is_zero() {
            return Some((Q::zero(), Monomial::one()));
        }
        self.num.as_term().map(|(m, c)| (c.clone(), m.clone()))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.num.atoms();
        for (p, _) in &self.den {
            s.extend(p.atoms());
        }
        s
    }

    pub fn contains_atom(&self, pred: impl Fn(&Atom) -> bool + Copy) -> bool {
        self.num.contains_atom(pred) || self.den.iter().any(|(p, _)| p.contains_atom(pred))
    }

    fn den_product(factors: &[(Poly, u32)]) -> Poly {
        factors
            .iter()
            .fold(Poly::one(), |acc, (p, k)| acc.mul(&p.pow(*k)))
    }

    /// Builds `num / prod(den)`, absorbing monomial and rational content of
    /// `den` into `num` and cancelling exact factors.
    fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> RatFn {
        let mut r = RatFn { num, den };
        r.cancel();
        r
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
    }

    fn merge_den(a: &[(Poly, u32)], b: &[(Poly, u32)], f: impl Fn(u32, u32) -> u32) -> Vec<(Poly, u32)> {
        let mut m: BTreeMap<&Poly, (u32, u32)> = BTreeMap::new();
        for (p, k) in a {
            m.entry(p).or_default().0 += k;
        }
        for (p, k) in b {
            m.entry(p).or_default().1 += k;
        }
        m.into_iter()
            .map(|(p, (x, y))| (p.clone(), f(x, y)))
            .filter(|(_, k)| *k > 0)
            .collect()
    }

    /// Multiplier turning `den` into `lcm`.
    fn cofactor(den: &[(Poly, u32)], lcm: &[(Poly, u32)]) -> Poly {
        let mut acc = Poly::one();
        for (p, k) in lcm {
            let have = den.iter().find(|(q, _)| q == p).map_or(0, |(_, j)| *j);
            if *k > have {
                acc = acc.mul(&p.pow(*k - have));
            }
        }
        acc
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return RatFn::from_parts(self.num.add(&other.num), self.den.clone());
        }
        let lcm = Self::merge_den(&self.den, &other.den, u32::max);
        let a = self.num.mul(&Self::cofactor(&self.den, &lcm));
        let b = other.num.mul(&Self::cofactor(&other.den, &lcm));
        RatFn::from_parts(a.add(&b), lcm)
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return RatFn::from(self.num.mul(&other.num));
        }
        let den = Self::merge_den(&self.den, &other.den, |x, y| x + y);
        RatFn::from_parts(self.num.mul(&other.num), den)
    }

    pub fn scale(&self, k: &Q) -> RatFn {
        RatFn {
            num: self.num.scale(k),
            den: if k.is_zero() { vec![] } else { self.den.clone() },
        }
    }

    pub fn recip(&self) -> Result<RatFn, KernelError> {
        if self.num.is_zero() {
            return Err(KernelError::ZeroDenominator);
        }
        let (c, m, prim) = self.num.primitive_decomposition();
        let mut num = Self::den_product(&self.den).mul_term(&(Q::one() / c), &m.inv());
        let mut den = Vec::new();
        if prim.as_constant().is_none() {
            den.push((prim, 1));
        } else {
            num = num.scale(&(Q::one() / prim.as_constant().unwrap()));
        }
        Ok(RatFn::from_parts(num, den))
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn, KernelError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: i64) -> Result<RatFn, KernelError> {
        if n == 0 {
            return Ok(RatFn::one());
        }
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        if base.den.is_empty() {
            return Ok(RatFn::from(base.num.pow(k)));
        }
        Ok(RatFn {
            num: base.num.pow(k),
            den: base.den.iter().map(|(p, j)| (p.clone(), j * k)).collect(),
        })
    }

    /// Rational power. Fractional exponents require a single positive-coefficient
    /// monomial (bases are assumed positive).
    pub fn pow(&self, e: Exponent) -> Result<RatFn, KernelError> {
        if e.is_integer() {
            return self.powi(*e.numer());
        }
        match self.as_monomial() {
            Some((c, m)) if !c.is_zero() => {
                let c2 = super::poly::rational_root_pow(&c, e).ok_or_else(|| {
                    KernelError::Unsupported(format!("irrational constant power ({c})^({e})"))
                })?;
                Ok(RatFn::monomial(c2, m.pow(e)))
            }
            Some(_) => {
                if e > Exponent::zero() {
                    Ok(RatFn::zero())
                } else {
                    Err(KernelError::ZeroDenominator)
                }
            }
            None => Err(KernelError::Unsupported(
                "fractional power of a multi-term expression".into(),
            )),
        }
    }

    /// Formal partial derivative with respect to one atom.
    pub fn partial(&self, a: &Atom) -> RatFn {
        self.derive(|p| Ok(p.partial(a))).expect("partial derivative is infallible")
    }

    /// Total derivative in base variable `v`.
    pub fn total_derivative(&self, v: &Symbol, cap: usize) -> Result<RatFn, KernelError> {
        self.derive(|p| p.total_derivative(v, cap))
    }

    /// Quotient rule for any derivation `d` on polynomials.
    fn derive(&self, d: impl Fn(&Poly) -> Result<Poly, KernelError>) -> Result<RatFn, KernelError> {
        let dn = d(&self.num)?;
        if self.den.is_empty() {
            return Ok(RatFn::from(dn));
        }
        // d(N / prod f^k) = (dN * prod f - N * sum k_i df_i prod_{j != i} f_j) / prod f^(k+1)
        let all: Poly = self.den.iter().fold(Poly::one(), |acc, (f, _)| acc.mul(f));
        let mut num = dn.mul(&all);
        for (i, (f, k)) in self.den.iter().enumerate() {
            let df = d(f)?;
            if df.is_zero() {
                continue;
            }
            let others = self
                .den
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Poly::one(), |acc, (_, (g, _))| acc.mul(g));
            let term = self.num.mul(&df).mul(&others).scale(&super::poly::q(*k as i64));
            num = num.sub(&term);
        }
        let den = self.den.iter().map(|(f, k)| (f.clone(), k + 1)).collect();
        Ok(RatFn::from_parts(num, den))
    }

    /// Simultaneous substitution of atoms; `f` returns the image of an atom or `None`.
    pub fn substitute_with(
        &self,
        f: &mut dyn FnMut(&Atom) -> Result<Option<RatFn>, KernelError>,
    ) -> Result<RatFn, KernelError> {
        let mut images: HashMap<Atom, Option<RatFn>> = HashMap::new();
        let mut powers: HashMap<(Atom, Exponent), RatFn> = HashMap::new();
        let num = subst_poly(&self.num, f, &mut images, &mut powers)?;
        let mut out = num;
        for (p, k) in &self.den {
            let g = subst_poly(p, f, &mut images, &mut powers)?;
            out = out.mul(&g.powi(-(*k as i64))?);
        }
        Ok(out)
    }

    pub fn substitute(&self, bindings: &BTreeMap<Atom, RatFn>) -> Result<RatFn, KernelError> {
        self.substitute_with(&mut |a| Ok(bindings.get(a).cloned()))
    }

    /// Numeric evaluation; `lookup` supplies a value for every atom.
    pub fn eval<F: Float + FromPrimitive>(
        &self,
        lookup: &dyn Fn(&Atom) -> Option<F>,
    ) -> Result<F, KernelError> {
        let n = eval_poly(&self.num, lookup)?;
        let mut d = F::one();
        for (p, k) in &self.den {
            d = d * eval_poly(p, lookup)?.powi(*k as i32);
        }
        Ok(n / d)
    }

    /// Numerator and denominator as ordinary polynomials (nonnegative exponents).
    pub fn numerator_denominator(&self) -> (Poly, Poly) {
        let shift = self.num.min_monomial();
        let neg = Monomial::from_pairs(
            shift
                .pairs()
                .iter()
                .filter(|(_, e)| *e < Exponent::zero())
                .cloned()
                .collect(),
        );
        let num = self.num.mul_term(&Q::one(), &neg.inv());
        let den = Self::den_product(&self.den).mul_term(&Q::one(), &neg.inv());
        (num, den)
    }

    /// True when the numerator is affine in `a` and the denominator is free of it.
    pub fn affine_in(&self, a: &Atom) -> Option<(RatFn, RatFn)> {
        if self.den.iter().any(|(p, _)| p.contains_atom(|x| x == a)) {
            return None;
        }
        let (lo, hi) = self.num.exponent_range(a);
        if lo < Exponent::zero() || hi > Exponent::one() || !lo.is_integer() {
            return None;
        }
        if self.num.terms().any(|(m, _)| {
            let e = m.exponent(a);
            !(e.is_zero() || e.is_one())
        }) {
            return None;
        }
        let den_only = RatFn {
            num: Poly::one(),
            den: self.den.clone(),
        };
        let c1 = RatFn::from(self.num.coefficient_of(a, Exponent::one())).mul(&den_only);
        let c0 = RatFn::from(self.num.coefficient_of(a, Exponent::zero())).mul(&den_only);
        Some((c1, c0))
    }
}

fn subst_poly(
    p: &Poly,
    f: &mut dyn FnMut(&Atom) -> Result<Option<RatFn>, KernelError>,
    images: &mut HashMap<Atom, Option<RatFn>>,
    powers: &mut HashMap<(Atom, Exponent), RatFn>,
) -> Result<RatFn, KernelError> {
    // terms with identical substituted denominators are summed as polynomials first
    let mut plain = Poly::zero();
    let mut groups: BTreeMap<Vec<(Poly, u32)>, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut acc = RatFn::constant(c.clone());
        for (a, e) in m.pairs() {
            if !images.contains_key(a) {
                let img = f(a)?;
                images.insert(a.clone(), img);
            }
            match &images[a] {
                None => kept.push((a.clone(), *e)),
                Some(img) => {
                    let key = (a.clone(), *e);
                    let pw = match powers.get(&key) {
                        Some(x) => x.clone(),
                        None => {
                            let x = img.pow(*e)?;
                            powers.insert(key, x.clone());
                            x
                        }
                    };
                    acc = acc.mul(&pw);
                    if acc.is_zero() {
                        break;
                    }
                }
            }
        }
        if acc.is_zero() {
            continue;
        }
        let mono = Monomial::from_pairs(kept);
        let term_num = acc.num.mul_term(&Q::one(), &mono);
        if acc.den.is_empty() {
            plain.add_assign(&term_num);
        } else {
            groups.entry(acc.den).or_default().add_assign(&term_num);
        }
    }
    let mut out = RatFn::from(plain);
    for (den, num) in groups {
        out = out.add(&RatFn::from_parts(num, den));
    }
    Ok(out)
}

fn eval_poly<F: Float + FromPrimitive>(
    p: &Poly,
    lookup: &dyn Fn(&Atom) -> Option<F>,
) -> Result<F, KernelError> {
    let mut total = F::zero();
    for (m, c) in p.terms() {
        let mut v = q_to_float::<F>(c);
        for (a, e) in m.pairs() {
            let x = lookup(a).ok_or_else(|| KernelError::UnboundAtom(a.to_string()))?;
            v = v * float_pow(x, *e)?;
        }
        total = total + v;
    }
    Ok(total)
}

pub(crate) fn q_to_float<F: Float + FromPrimitive>(c: &Q) -> F {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => F::from_f64(n / d).unwrap(),
        _ => F::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap(),
    }
}

pub(crate) fn float_pow<F: Float + FromPrimitive>(x: F, e: Exponent) -> Result<F, KernelError> {
    if e.is_integer() {
        return Ok(x.powi(*e.numer() as i32));
    }
    if x < F::zero() {
        return Err(KernelError::NegativeFractionalBase);
    }
    let ef = F::from_f64(exp_to_q(e).to_f64().unwrap()).unwrap();
    Ok(x.powf(ef))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::poly::{q, qr};

    fn a(n: &str) -> RatFn {
        RatFn::atom(Atom::param(n))
    }

    #[test]
    fn difference_of_squares_cancels() {
        let (al, be) = (a("alpha"), a("beta"));
        let num = al.mul(&al).sub(&be.mul(&be));
        let r = num.div(&al.sub(&be)).unwrap();
        assert!(r.sub(&al.add(&be)).is_zero());
        assert!(r.denominator_factors().is_empty());
    }

    #[test]
    fn reciprocal_round_trip() {
        let s = a("alpha").add(&a("beta")).scale(&q(3));
        let r = s.recip().unwrap();
        assert!(r.mul(&s).is_one());
        assert!(RatFn::zero().recip().is_err());
    }

    #[test]
    fn quotient_rule() {
        let x = Atom::base("x");
        let fx = RatFn::atom(x.clone());
        // d/dx 1/(x+1) = -1/(x+1)^2
        let g = fx.add(&RatFn::one()).recip().unwrap();
        let dg = g.partial(&x);
        let expect = g.mul(&g).neg();
        assert!(dg.sub(&expect).is_zero());
    }

    #[test]
    fn fractional_powers_multiply_exactly() {
        let t = RatFn::atom(Atom::base("t"));
        let c = t.pow(Exponent::new(1, 3)).unwrap();
        assert!(c.powi(3).unwrap().sub(&t).is_zero());
        let e = RatFn::constant(qr(8, 27)).pow(Exponent::new(2, 3)).unwrap();
        assert_eq!(e.as_constant().unwrap(), qr(4, 9));
    }
}
