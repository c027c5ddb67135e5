//! Lie's linearization test for `y'' + A y'^3 + B y'^2 + C y' + D = 0`.

use thiserror::Error;

use crate::symkernel::{Atom, Exponent, Expr, KernelError, RatFn, Symbol};

#[derive(Debug, Error)]
pub enum LinearizationError {
    #[error("equation is not of second order")]
    NotSecondOrder,
    #[error("equation is not cubic in the first derivative")]
    NotCubic,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Coefficients of `y'' + A y'^3 + B y'^2 + C y' + D = 0`.
#[derive(Clone, Debug)]
pub struct Cubic {
    pub x: Atom,
    pub y: Atom,
    pub a: RatFn,
    pub b: RatFn,
    pub c: RatFn,
    pub d: RatFn,
}

fn den_only(r: &RatFn) -> RatFn {
    let mut out = RatFn::one();
    for (p, k) in r.denominator_factors() {
        out = out.mul(&RatFn::from(p.clone()).powi(-(*k as i64)).expect("nonzero factor"));
    }
    out
}

impl Cubic {
    pub fn from_expr(e: &Expr, base: &str, dep: &str) -> Result<Self, LinearizationError> {
        let r = e.canonicalize()?;
        let b = Symbol::new(base);
        let y2 = Atom::jet(dep, &[base, base]);
        let y1 = Atom::jet(dep, &[base]);
        let top = r
            .atoms()
            .iter()
            .filter(|a| a.is_jet_of(&Symbol::new(dep)))
            .map(|a| a.order())
            .max()
            .unwrap_or(0);
        if top != 2 || r.atoms().iter().any(|a| a.is_jet() && a.order() == 2 && *a != y2) {
            return Err(LinearizationError::NotSecondOrder);
        }
        let (c1, c0) = r.affine_in(&y2).ok_or(LinearizationError::NotCubic)?;
        if c1.is_zero() || c1.contains_atom(|a| *a == y1) {
            return Err(LinearizationError::NotCubic);
        }
        let rhs = c0.neg().div(&c1)?;
        if rhs.denominator_factors().iter().any(|(p, _)| p.contains_atom(|a| *a == y1)) {
            return Err(LinearizationError::NotCubic);
        }
        let (lo, hi) = rhs.numerator().exponent_range(&y1);
        if lo < Exponent::from_integer(0) || hi > Exponent::from_integer(3) || rhs.numerator().terms().any(|(m, _)| !m.exponent(&y1).is_integer()) {
            return Err(LinearizationError::NotCubic);
        }
        let den = den_only(&rhs);
        let coeff = |k: i64| RatFn::from(rhs.numerator().coefficient_of(&y1, Exponent::from_integer(k))).mul(&den).neg();
        Ok(Cubic {
            x: Atom::Base(b),
            y: Atom::jet(dep, &[]),
            a: coeff(3),
            b: coeff(2),
            c: coeff(1),
            d: coeff(0),
        })
    }
}

/// The two relative invariants; both vanish iff the equation is linearizable.
pub fn lie_tresse(q: &Cubic) -> (RatFn, RatFn) {
    let dx = |f: &RatFn| f.partial(&q.x);
    let dy = |f: &RatFn| f.partial(&q.y);
    let (a, b, c, d) = (&q.a, &q.b, &q.c, &q.d);
    let k = |n: i64| RatFn::int(n);
    let l1 = [
        k(3).mul(&dx(&dx(a))),
        k(-2).mul(&dx(&dy(b))),
        dy(&dy(c)),
        k(-3).mul(a).mul(&dx(c)),
        k(6).mul(a).mul(&dy(d)),
        k(2).mul(b).mul(&dx(b)),
        k(-1).mul(b).mul(&dy(c)),
        k(-3).mul(c).mul(&dx(a)),
        k(3).mul(d).mul(&dy(a)),
    ];
    let l2 = [
        dx(&dx(b)),
        k(-2).mul(&dx(&dy(c))),
        k(3).mul(&dy(&dy(d))),
        k(-3).mul(a).mul(&dx(d)),
        k(3).mul(b).mul(&dy(d)),
        c.mul(&dx(b)),
        k(-2).mul(c).mul(&dy(c)),
        k(-6).mul(d).mul(&dx(a)),
        k(3).mul(d).mul(&dy(b)),
    ];
    let sum = |ts: &[RatFn]| ts.iter().fold(RatFn::zero(), |acc, t| acc.add(t));
    (sum(&l1), sum(&l2))
}

pub fn lie_linearization_test(e: &Expr, base: &str, dep: &str) -> Result<bool, LinearizationError> {
    let (l1, l2) = lie_tresse(&Cubic::from_expr(e, base, dep)?);
    Ok(l1.is_zero() && l2.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{parse, SymbolTable};

    fn ode(text: &str) -> Expr {
        parse(text, &SymbolTable::ode("x", "y")).unwrap()
    }

    #[test]
    fn classical_cases() {
        assert!(lie_linearization_test(&ode("y[x,x]"), "x", "y").unwrap());
        assert!(lie_linearization_test(&ode("y[x,x] - y[x]^2/y"), "x", "y").unwrap());
        assert!(lie_linearization_test(&ode("y[x,x] + 3*y*y[x] + y^3"), "x", "y").unwrap());
        assert!(!lie_linearization_test(&ode("y[x,x] - 6*y^2"), "x", "y").unwrap());
        assert!(!lie_linearization_test(&ode("y[x,x] - y^2 - x"), "x", "y").unwrap());
    }

    #[test]
    fn rejects_other_shapes() {
        assert!(matches!(lie_linearization_test(&ode("y[x] + y"), "x", "y"), Err(LinearizationError::NotSecondOrder)));
        assert!(matches!(lie_linearization_test(&ode("y[x,x] - y[x]^4"), "x", "y"), Err(LinearizationError::NotCubic)));
    }
}
