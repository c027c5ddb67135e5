//! Changes of variables, mechanical pullbacks and the certification of
//! reduced equations.

mod catalog;
mod linearize;

pub use catalog::{catalog_reductions, ode_symmetry_claims, parse_printed, printed_equation, OdeSymmetryClaim};
pub use linearize::{lie_tresse, lie_linearization_test, Cubic, LinearizationError};

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::rref;
use crate::prolong::{check_symmetry, determining_system, polynomial_basis, solve, Ansatz, OnShell, SymmetryVerdict, VectorField};
use crate::symkernel::{emit, parse, Atom, Expr, JetIndex, KernelError, Poly, RatFn, Symbol, SymbolTable, DEFAULT_DERIVATIVE_CAP};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("new independents are functionally dependent at a sample point")]
    SingularJacobian,
    #[error("inverse map does not invert the change: {0}")]
    BadInverse(String),
    #[error("{0} does not cancel from the pullback")]
    Leftover(String),
}

fn syms(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|s| Symbol::new(s)).collect()
}

fn params(t: SymbolTable) -> SymbolTable {
    t.param("alpha").param("beta").param("c")
}

/// New independents as functions of the old ones, with the old dependent
/// given through the new one.
#[derive(Clone, Debug)]
pub struct PointChange {
    pub old_bases: Vec<Symbol>,
    pub old_dep: Symbol,
    pub new_bases: Vec<(Symbol, Expr)>,
    pub new_dep: Symbol,
    /// New dependent in old variables.
    pub forward: Expr,
    /// Old dependent in old variables and the new dependent.
    pub inverse: Expr,
    /// Old variables removed after substitution, in new variables and leftovers.
    pub eliminate: Vec<(Symbol, Expr)>,
    pub assumptions: Vec<String>,
}

/// `r = R(s, w)`, `v = V(s, w, w')`, inverted with one leftover old variable.
#[derive(Clone, Debug)]
pub struct Jet1Change {
    pub old_base: Symbol,
    pub old_dep: Symbol,
    pub new_base: Symbol,
    pub new_dep: Symbol,
    pub new_indep: Expr,
    pub new_value: Expr,
    /// `s` or `w[]`.
    pub leftover: Atom,
    /// `s`, `w`, `w'` in terms of the leftover, `r` and `v`.
    pub inverse: [Expr; 3],
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum ChangeOfVariables {
    Point(PointChange),
    Jet1(Jet1Change),
}

impl PointChange {
    pub fn table(old_bases: &[&str], old_dep: &str, new_bases: &[&str], new_dep: &str) -> SymbolTable {
        let mut t = params(SymbolTable::new()).dep(old_dep).dep(new_dep);
        for b in old_bases.iter().chain(new_bases) {
            t = t.base(b);
        }
        t
    }

    /// Builds the change from text; `new` lists `(name, expression)` pairs.
    pub fn parse(
        old_bases: &[&str],
        old_dep: &str,
        new: &[(&str, &str)],
        new_dep: &str,
        forward: &str,
        inverse: &str,
        eliminate: &[(&str, &str)],
    ) -> Result<Self, KernelError> {
        let names: Vec<&str> = new.iter().map(|(n, _)| *n).collect();
        let t = Self::table(old_bases, old_dep, &names, new_dep);
        let p = |s: &str| parse(s, &t);
        Ok(PointChange {
            old_bases: syms(old_bases),
            old_dep: Symbol::new(old_dep),
            new_bases: new.iter().map(|(n, e)| Ok((Symbol::new(n), p(e)?))).collect::<Result<_, KernelError>>()?,
            new_dep: Symbol::new(new_dep),
            forward: p(forward)?,
            inverse: p(inverse)?,
            eliminate: eliminate.iter().map(|(n, e)| Ok((Symbol::new(n), p(e)?))).collect::<Result<_, KernelError>>()?,
            assumptions: Vec::new(),
        })
    }

    pub fn leftovers(&self) -> Vec<Atom> {
        self.old_bases
            .iter()
            .filter(|b| !self.eliminate.iter().any(|(n, _)| n == *b) && !self.new_bases.iter().any(|(n, _)| n == *b))
            .map(|b| Atom::Base(b.clone()))
            .collect()
    }

    fn new_value(&self) -> Atom {
        Atom::Jet {
            dep: self.new_dep.clone(),
            index: JetIndex::empty(),
        }
    }

    /// Every old jet atom of `eq` in old variables and new jets.
    fn images(&self, eq: &RatFn) -> Result<HashMap<Atom, RatFn>, KernelError> {
        let grads: Vec<Vec<RatFn>> = self
            .old_bases
            .iter()
            .map(|x| {
                self.new_bases
                    .iter()
                    .map(|(_, z)| Ok(z.canonicalize()?.partial(&Atom::Base(x.clone()))))
                    .collect::<Result<Vec<_>, KernelError>>()
            })
            .collect::<Result<_, _>>()?;
        let new_bases: Vec<Symbol> = self.new_bases.iter().map(|(n, _)| n.clone()).collect();
        let d = |f: &RatFn, i: usize| -> Result<RatFn, KernelError> {
            let mut acc = RatFn::zero();
            for a in f.atoms() {
                let da = match &a {
                    Atom::Base(b) if *b == self.old_bases[i] => RatFn::one(),
                    Atom::Jet { dep, index } if *dep == self.new_dep => {
                        let mut s = RatFn::zero();
                        for (zb, g) in new_bases.iter().zip(&grads[i]) {
                            if !g.is_zero() {
                                let next = Atom::Jet {
                                    dep: dep.clone(),
                                    index: index.with(zb),
                                };
                                next.check_cap(DEFAULT_DERIVATIVE_CAP + 2)?;
                                s = s.add(&g.mul(&RatFn::atom(next)));
                            }
                        }
                        s
                    }
                    _ => continue,
                };
                if !da.is_zero() {
                    acc = acc.add(&f.partial(&a).mul(&da));
                }
            }
            Ok(acc)
        };
        let mut memo: HashMap<JetIndex, RatFn> = HashMap::new();
        memo.insert(JetIndex::empty(), self.inverse.canonicalize()?);
        let mut out = HashMap::new();
        let mut wanted: Vec<JetIndex> = eq
            .atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Jet { dep, index } if dep == self.old_dep => Some(index),
                _ => None,
            })
            .collect();
        wanted.sort_by_key(|s| s.order());
        for s in wanted {
            let img = self.image_of(&s, &mut memo, &d)?;
            out.insert(
                Atom::Jet {
                    dep: self.old_dep.clone(),
                    index: s,
                },
                img,
            );
        }
        Ok(out)
    }

    fn image_of(
        &self,
        s: &JetIndex,
        memo: &mut HashMap<JetIndex, RatFn>,
        d: &dyn Fn(&RatFn, usize) -> Result<RatFn, KernelError>,
    ) -> Result<RatFn, KernelError> {
        if let Some(r) = memo.get(s) {
            return Ok(r.clone());
        }
        let v = s.as_slice().last().unwrap().clone();
        let prev = self.image_of(&s.without(&v).unwrap(), memo, d)?;
        let i = self.old_bases.iter().position(|b| *b == v).unwrap();
        let r = d(&prev, i)?;
        memo.insert(s.clone(), r.clone());
        Ok(r)
    }
}

impl Jet1Change {
    pub fn table(old_base: &str, old_dep: &str, new_base: &str, new_dep: &str) -> SymbolTable {
        params(SymbolTable::new()).base(old_base).base(new_base).dep(old_dep).dep(new_dep)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn parse(
        old_base: &str,
        old_dep: &str,
        new_base: &str,
        new_dep: &str,
        new_indep: &str,
        new_value: &str,
        leftover: &str,
        inverse: [&str; 3],
    ) -> Result<Self, KernelError> {
        let t = Self::table(old_base, old_dep, new_base, new_dep);
        let p = |s: &str| parse(s, &t);
        let leftover = p(leftover)?.as_atom().cloned().ok_or_else(|| KernelError::Unsupported("leftover must be an atom".into()))?;
        Ok(Jet1Change {
            old_base: Symbol::new(old_base),
            old_dep: Symbol::new(old_dep),
            new_base: Symbol::new(new_base),
            new_dep: Symbol::new(new_dep),
            new_indep: p(new_indep)?,
            new_value: p(new_value)?,
            leftover,
            inverse: [p(inverse[0])?, p(inverse[1])?, p(inverse[2])?],
            assumptions: Vec::new(),
        })
    }

    fn old_jet(&self, k: usize) -> Atom {
        Atom::Jet {
            dep: self.old_dep.clone(),
            index: JetIndex::from_symbols(std::iter::repeat_n(self.old_base.clone(), k)),
        }
    }

    fn new_jet(&self, k: usize) -> Atom {
        Atom::Jet {
            dep: self.new_dep.clone(),
            index: JetIndex::from_symbols(std::iter::repeat_n(self.new_base.clone(), k)),
        }
    }

    fn inverse_bindings(&self) -> Result<BTreeMap<Atom, RatFn>, KernelError> {
        let mut m = BTreeMap::new();
        m.insert(Atom::Base(self.old_base.clone()), self.inverse[0].canonicalize()?);
        m.insert(self.old_jet(0), self.inverse[1].canonicalize()?);
        m.insert(self.old_jet(1), self.inverse[2].canonicalize()?);
        Ok(m)
    }

    fn check_inverse(&self) -> Result<(), ReduceError> {
        let b = self.inverse_bindings()?;
        let r = self.new_indep.canonicalize()?.substitute(&b)?;
        if !r.sub(&RatFn::atom(Atom::Base(self.new_base.clone()))).is_zero() {
            return Err(ReduceError::BadInverse(format!("{} != {}", emit(&Expr::from_ratfn(&r)), self.new_base)));
        }
        let v = self.new_value.canonicalize()?.substitute(&b)?;
        if !v.sub(&RatFn::atom(self.new_jet(0))).is_zero() {
            return Err(ReduceError::BadInverse(format!("{} != {}", emit(&Expr::from_ratfn(&v)), self.new_dep)));
        }
        Ok(())
    }

    /// D_s R in new variables.
    fn rho(&self) -> Result<RatFn, KernelError> {
        let r = self.new_indep.canonicalize()?;
        if r.contains_atom(|a| a.is_jet() && a.order() > 0) {
            return Err(KernelError::Unsupported("new independent must not involve derivatives".into()));
        }
        r.total_derivative(&self.old_base, DEFAULT_DERIVATIVE_CAP)?
            .substitute(&self.inverse_bindings()?)
    }

    fn d_old(&self, f: &RatFn, rho: &RatFn, w1: &RatFn) -> Result<RatFn, KernelError> {
        let mut acc = RatFn::zero();
        for a in f.atoms() {
            let da = match &a {
                Atom::Base(b) if *b == self.old_base => RatFn::one(),
                Atom::Base(b) if *b == self.new_base => rho.clone(),
                Atom::Jet { dep, index } if *dep == self.new_dep => {
                    let n = Atom::Jet {
                        dep: dep.clone(),
                        index: index.with(&self.new_base),
                    };
                    n.check_cap(DEFAULT_DERIVATIVE_CAP + 2)?;
                    rho.mul(&RatFn::atom(n))
                }
                Atom::Jet { dep, index } if *dep == self.old_dep && index.order() == 0 => w1.clone(),
                _ => continue,
            };
            acc = acc.add(&f.partial(&a).mul(&da));
        }
        Ok(acc)
    }

    fn images(&self, eq: &RatFn) -> Result<HashMap<Atom, RatFn>, KernelError> {
        let rho = self.rho()?;
        let w1 = self.inverse[2].canonicalize()?;
        let top = eq
            .atoms()
            .iter()
            .filter(|a| a.is_jet_of(&self.old_dep))
            .map(|a| a.order())
            .max()
            .unwrap_or(0);
        let mut out = HashMap::new();
        out.insert(Atom::Base(self.old_base.clone()), self.inverse[0].canonicalize()?);
        out.insert(self.old_jet(0), self.inverse[1].canonicalize()?);
        let mut cur = w1.clone();
        for k in 1..=top {
            if k > 1 {
                cur = self.d_old(&cur, &rho, &w1)?;
            }
            out.insert(self.old_jet(k), cur.clone());
        }
        Ok(out)
    }

    /// New jets in old variables, `v^(k) = D_s v^(k-1) / D_s R`.
    pub fn forward_jets(&self, order: usize) -> Result<Vec<RatFn>, KernelError> {
        let r = self.new_indep.canonicalize()?;
        let dr = r.total_derivative(&self.old_base, DEFAULT_DERIVATIVE_CAP + 2)?;
        let mut out = vec![self.new_value.canonicalize()?];
        for _ in 0..order {
            let next = out.last().unwrap().total_derivative(&self.old_base, DEFAULT_DERIVATIVE_CAP + 2)?.div(&dr)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// The old equation rewritten in new variables.
#[derive(Clone, Debug)]
pub struct Pullback {
    /// After jet substitution, before removing old variables.
    pub mixed: RatFn,
    /// In new variables and leftovers.
    pub full: RatFn,
    /// Primitive numerator, free of leftovers.
    pub target: RatFn,
    /// `full = factor * target`.
    pub factor: RatFn,
}

impl ChangeOfVariables {
    pub fn old_table(&self) -> SymbolTable {
        match self {
            ChangeOfVariables::Point(p) => {
                let mut t = params(SymbolTable::new()).dep(p.old_dep.as_str()).func("a", &["t"]).func("b", &["t"]);
                for b in &p.old_bases {
                    t = t.base(b.as_str());
                }
                t
            }
            ChangeOfVariables::Jet1(j) => SymbolTable::ode(j.old_base.as_str(), j.old_dep.as_str()),
        }
    }

    pub fn new_table(&self) -> SymbolTable {
        match self {
            ChangeOfVariables::Point(p) => {
                let mut t = params(SymbolTable::new()).dep(p.new_dep.as_str());
                for (b, _) in &p.new_bases {
                    t = t.base(b.as_str());
                }
                t
            }
            ChangeOfVariables::Jet1(j) => SymbolTable::ode(j.new_base.as_str(), j.new_dep.as_str()),
        }
    }

    pub fn new_bases(&self) -> Vec<Symbol> {
        match self {
            ChangeOfVariables::Point(p) => p.new_bases.iter().map(|(n, _)| n.clone()).collect(),
            ChangeOfVariables::Jet1(j) => vec![j.new_base.clone()],
        }
    }

    pub fn new_dep(&self) -> &Symbol {
        match self {
            ChangeOfVariables::Point(p) => &p.new_dep,
            ChangeOfVariables::Jet1(j) => &j.new_dep,
        }
    }

    pub fn assumptions(&self) -> &[String] {
        match self {
            ChangeOfVariables::Point(p) => &p.assumptions,
            ChangeOfVariables::Jet1(j) => &j.assumptions,
        }
    }

    pub fn leftovers(&self) -> Vec<Atom> {
        match self {
            ChangeOfVariables::Point(p) => p.leftovers(),
            ChangeOfVariables::Jet1(j) => vec![j.leftover.clone()],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ChangeOfVariables::Point(p) => {
                let mut parts: Vec<String> = p.new_bases.iter().map(|(n, e)| format!("{n} = {}", emit(e))).collect();
                parts.push(format!("{} = {}", p.new_dep, emit(&p.forward)));
                parts.push(format!("{} = {}", p.old_dep, emit(&p.inverse)));
                parts.join("; ")
            }
            ChangeOfVariables::Jet1(j) => format!(
                "{} = {}; {} = {}",
                j.new_base,
                emit(&j.new_indep),
                j.new_dep,
                emit(&j.new_value)
            ),
        }
    }

    /// Numeric rank check of the new independents at `samples` random points.
    pub fn check_jacobian(&self, samples: usize, seed: u64) -> Result<(), ReduceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (funcs, vars): (Vec<RatFn>, Vec<Atom>) = match self {
            ChangeOfVariables::Point(p) => (
                p.new_bases.iter().map(|(_, z)| z.canonicalize()).collect::<Result<_, _>>()?,
                p.old_bases.iter().map(|b| Atom::Base(b.clone())).collect(),
            ),
            ChangeOfVariables::Jet1(j) => (
                vec![j.new_indep.canonicalize()?, j.new_value.canonicalize()?],
                vec![Atom::Base(j.old_base.clone()), j.old_jet(0), j.old_jet(1)],
            ),
        };
        let grads: Vec<Vec<RatFn>> = funcs.iter().map(|f| vars.iter().map(|v| f.partial(v)).collect()).collect();
        for _ in 0..samples {
            let mut vals: BTreeMap<Atom, f64> = BTreeMap::new();
            let point = |a: &Atom, vals: &mut BTreeMap<Atom, f64>, rng: &mut ChaCha8Rng| {
                *vals.entry(a.clone()).or_insert_with(|| rng.gen_range(0.5..2.0))
            };
            let mut rows = Vec::new();
            for g in &grads {
                let mut row = Vec::new();
                for e in g {
                    for a in e.atoms() {
                        point(&a, &mut vals, &mut rng);
                    }
                    row.push(e.eval(&|a| vals.get(a).copied())?);
                }
                rows.push(row);
            }
            let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
            for r in rows.iter_mut() {
                for x in r.iter_mut() {
                    *x /= scale;
                }
            }
            let n = vars.len();
            if rref(&mut rows, n).len() < funcs.len() {
                return Err(ReduceError::SingularJacobian);
            }
        }
        Ok(())
    }

    /// Max deviation of forward followed by inverse from the identity at random points.
    pub fn round_trip_error(&self, samples: usize, seed: u64) -> Result<f64, ReduceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        match self {
            ChangeOfVariables::Point(p) => {
                let mut z = BTreeMap::new();
                for (n, e) in &p.new_bases {
                    z.insert(Atom::Base(n.clone()), e.clone());
                }
                let u = Atom::Jet {
                    dep: p.old_dep.clone(),
                    index: JetIndex::empty(),
                };
                let mut pv = z.clone();
                pv.insert(p.new_value(), p.forward.clone());
                let back_u = p.inverse.substitute(&pv);
                for _ in 0..samples {
                    let mut vals: BTreeMap<Atom, f64> = BTreeMap::new();
                    for b in &p.old_bases {
                        vals.insert(Atom::Base(b.clone()), rng.gen_range(0.5..2.0));
                    }
                    for s in ["alpha", "beta", "c"] {
                        vals.insert(Atom::param(s), rng.gen_range(0.5..2.0));
                    }
                    vals.insert(u.clone(), rng.gen_range(0.5..2.0));
                    for (n, e) in &p.eliminate {
                        let got = e.substitute(&z).eval_numeric(&vals)?;
                        worst = worst.max((got - vals[&Atom::Base(n.clone())]).abs());
                    }
                    worst = worst.max((back_u.eval_numeric(&vals)? - vals[&u]).abs());
                }
            }
            ChangeOfVariables::Jet1(j) => {
                j.check_inverse()?;
            }
        }
        Ok(worst)
    }
}

/// Drops leftover-dependent factors; fails if a leftover survives in a
/// jet-dependent part.
fn strip(full: &RatFn, leftovers: &[Atom]) -> Result<(RatFn, RatFn), ReduceError> {
    let is_left = |a: &Atom| leftovers.contains(a);
    let mut factor = RatFn::one();
    for (f, k) in full.denominator_factors() {
        let fr = RatFn::from(f.clone()).powi(-(*k as i64))?;
        if f.contains_atom(|a| a.is_jet()) {
            if f.contains_atom(is_left) {
                return Err(ReduceError::Leftover(leftover_names(leftovers)));
            }
        } else {
            factor = factor.mul(&fr);
        }
    }
    let groups = full.numerator().split_by(is_left);
    let mut iter = groups.iter();
    let (m0, p0) = iter.next().ok_or_else(|| ReduceError::Leftover("empty pullback".into()))?;
    let (c, mono, prim) = p0.primitive_decomposition();
    let mut left = Poly::term(c.clone(), m0.clone());
    for (m, p) in iter {
        let q = p
            .mul_term(&(num_rational::Ratio::from_integer(1.into()) / c.clone()), &mono.inv())
            .div_exact(&prim)
            .and_then(|q| q.as_constant())
            .ok_or_else(|| ReduceError::Leftover(leftover_names(leftovers)))?;
        left.add_term(m.clone(), q * c.clone());
    }
    factor = factor.mul(&RatFn::from(left)).mul(&RatFn::monomial(num_rational::Ratio::from_integer(1.into()), mono));
    Ok((RatFn::from(prim), factor))
}

fn leftover_names(l: &[Atom]) -> String {
    l.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn pullback(eq: &Expr, cv: &ChangeOfVariables) -> Result<Pullback, ReduceError> {
    let e = eq.canonicalize()?;
    let (mixed, full) = match cv {
        ChangeOfVariables::Point(p) => {
            let img = p.images(&e)?;
            let mixed = e.substitute_with(&mut |a| Ok(img.get(a).cloned()))?;
            let mut elim = BTreeMap::new();
            for (n, ex) in &p.eliminate {
                elim.insert(Atom::Base(n.clone()), ex.canonicalize()?);
            }
            let full = mixed.substitute(&elim)?;
            (mixed, full)
        }
        ChangeOfVariables::Jet1(j) => {
            j.check_inverse()?;
            let img = j.images(&e)?;
            let full = e.substitute_with(&mut |a| Ok(img.get(a).cloned()))?;
            (full.clone(), full)
        }
    };
    let stray: Vec<Atom> = match cv {
        ChangeOfVariables::Point(p) => p
            .eliminate
            .iter()
            .map(|(n, _)| Atom::Base(n.clone()))
            .filter(|a| p.new_bases.iter().all(|(n, _)| Atom::Base(n.clone()) != *a))
            .collect(),
        ChangeOfVariables::Jet1(_) => Vec::new(),
    };
    if full.contains_atom(|a| stray.contains(a)) {
        return Err(ReduceError::Leftover(leftover_names(&stray)));
    }
    let (target, factor) = strip(&full, &cv.leftovers())?;
    Ok(Pullback {
        mixed,
        full,
        target,
        factor,
    })
}

/// Max relative mismatch between the source equation on an explicit test
/// function and its pullback, for point changes.
pub fn pullback_sample_error(eq: &Expr, cv: &ChangeOfVariables, points: usize, seed: u64) -> Result<f64, ReduceError> {
    let pb = pullback(eq, cv)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    match cv {
        ChangeOfVariables::Point(p) => {
            let zs: Vec<Atom> = p.new_bases.iter().map(|(n, _)| Atom::Base(n.clone())).collect();
            let coeffs: Vec<(Expr, Expr)> = polynomial_basis(&zs, 4)
                .into_iter()
                .map(|m| (Expr::rational(rng.gen_range(-9..=9), rng.gen_range(1..=9)), m))
                .collect();
            let f = Expr::sum(coeffs.iter().map(|(c, m)| c.mul(m)));
            let mut zsub = BTreeMap::new();
            for (n, e) in &p.new_bases {
                zsub.insert(Atom::Base(n.clone()), e.clone());
            }
            let mut usub = BTreeMap::new();
            usub.insert(p.new_value(), f.substitute(&zsub));
            let u = p.inverse.substitute(&usub);
            let src = eq.canonicalize()?;
            let explicit = src.substitute_with(&mut |a| match a {
                Atom::Jet { dep, index } if *dep == p.old_dep => {
                    let mut d = u.canonicalize()?;
                    for v in index.iter() {
                        d = d.partial(&Atom::Base(v.clone()));
                    }
                    Ok(Some(d))
                }
                _ => Ok(None),
            })?;
            let fr = f.canonicalize()?;
            for _ in 0..points {
                let mut vals: BTreeMap<Atom, f64> = BTreeMap::new();
                for b in &p.old_bases {
                    vals.insert(Atom::Base(b.clone()), rng.gen_range(0.5..2.0));
                }
                for s in ["alpha", "beta", "c"] {
                    vals.insert(Atom::param(s), rng.gen_range(0.5..2.0));
                }
                let mut zvals = vals.clone();
                for (n, e) in &p.new_bases {
                    zvals.insert(Atom::Base(n.clone()), e.eval_numeric(&vals)?);
                }
                let lhs = explicit.eval(&|a| vals.get(a).copied())?;
                let rhs = pb.mixed.eval(&|a| match a {
                    Atom::Jet { dep, index } if *dep == p.new_dep => {
                        let mut d = fr.clone();
                        for v in index.iter() {
                            d = d.partial(&Atom::Base(v.clone()));
                        }
                        d.eval(&|b| zvals.get(b).copied()).ok()
                    }
                    _ => vals.get(a).copied(),
                })?;
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
            }
        }
        ChangeOfVariables::Jet1(j) => {
            let order = pb.full.atoms().iter().filter(|a| a.is_jet_of(&j.new_dep)).map(|a| a.order()).max().unwrap_or(0);
            let fw = j.forward_jets(order)?;
            let w: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let src = eq.canonicalize()?;
            for _ in 0..points {
                let s = rng.gen_range(0.5..2.0);
                let mut vals: BTreeMap<Atom, f64> = BTreeMap::new();
                vals.insert(Atom::Base(j.old_base.clone()), s);
                for k in 0..=6 {
                    let mut acc = 0.0;
                    for (i, c) in w.iter().enumerate().skip(k) {
                        let fall: f64 = ((i - k + 1)..=i).map(|x| x as f64).product();
                        acc += c * fall * s.powi((i - k) as i32);
                    }
                    vals.insert(j.old_jet(k), acc + if k == 0 { 2.0 } else { 0.0 });
                }
                for p in ["alpha", "beta", "c"] {
                    vals.insert(Atom::param(p), 1.0 + 0.25 * p.len() as f64);
                }
                let lhs = src.eval(&|a| vals.get(a).copied())?;
                let mut nv = BTreeMap::new();
                nv.insert(Atom::Base(j.new_base.clone()), j.new_indep.eval_numeric(&vals)?);
                for (k, f) in fw.iter().enumerate() {
                    nv.insert(j.new_jet(k), f.eval(&|a| vals.get(a).copied())?);
                }
                nv.insert(j.leftover.clone(), vals[&j.leftover]);
                for p in ["alpha", "beta", "c"] {
                    nv.insert(Atom::param(p), vals[&Atom::param(p)]);
                }
                let rhs = pb.full.eval(&|a| nv.get(a).copied())?;
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Verified,
    Corrected,
    Failed,
}

#[derive(Clone, Debug)]
pub enum SourceEquation {
    Printed(String),
    /// The computed target of another record.
    Computed(String),
}

/// One way of reading the printed change and target.
#[derive(Clone, Debug)]
pub struct Reading {
    pub label: String,
    pub change: ChangeOfVariables,
    pub claimed: String,
}

#[derive(Clone, Debug)]
pub struct ReductionRecord {
    pub name: String,
    pub anchor: String,
    pub source: SourceEquation,
    /// Leading atom of the source; defaults to its highest derivative.
    pub source_leading: Option<Atom>,
    pub generators: Vec<VectorField>,
    pub readings: Vec<Reading>,
    /// Leading atom of the target; defaults to its highest derivative.
    pub target_leading: Option<Atom>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReadingOutcome {
    pub label: String,
    pub change: String,
    pub claimed: String,
    /// Parse error of the claimed text, if any.
    pub claim_error: Option<String>,
    pub computed: Option<String>,
    pub computed_solved: Option<String>,
    pub matches: bool,
    pub factor: Option<String>,
    pub diff: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionOutcome {
    pub name: String,
    pub status: RecordStatus,
    pub source: String,
    pub generators_verified: Vec<bool>,
    pub readings: Vec<ReadingOutcome>,
    pub notes: Vec<String>,
}

impl ReductionOutcome {
    /// The first reading with a computed target.
    pub fn computed(&self) -> Option<&ReadingOutcome> {
        self.readings.iter().find(|r| r.matches).or_else(|| self.readings.iter().find(|r| r.computed.is_some() && r.error.is_none()))
    }
}

fn highest_jet(e: &RatFn, dep: &Symbol) -> Option<Atom> {
    e.atoms()
        .into_iter()
        .filter(|a| a.is_jet_of(dep))
        .max_by(|a, b| a.order().cmp(&b.order()).then_with(|| b.cmp(a)))
}

/// Shell of an equation solved for its highest derivative of `dep`.
pub fn shell_on_highest(e: &Expr, dep: &str) -> Result<OnShell, KernelError> {
    let r = e.canonicalize()?;
    let lead = highest_jet(&r, &Symbol::new(dep)).ok_or_else(|| KernelError::Unsupported(format!("no derivatives of {dep}")))?;
    OnShell::new(r, lead, DEFAULT_DERIVATIVE_CAP)
}

/// Leading atom and solved right-hand side.
pub fn solved(e: &RatFn, leading: &Atom) -> Option<RatFn> {
    let (c1, c0) = e.affine_in(leading)?;
    if c1.is_zero() {
        return None;
    }
    c0.neg().div(&c1).ok()
}

fn compare(computed: &RatFn, claimed: &RatFn, leading: &Atom) -> (bool, Option<RatFn>, Option<RatFn>) {
    let (_, _, cp) = claimed.numerator_denominator().0.primitive_decomposition();
    let (_, _, tp) = computed.numerator_denominator().0.primitive_decomposition();
    if let Some(q) = tp.div_exact(&cp) {
        if !q.contains_atom(|a| a.is_jet()) && !q.is_zero() {
            return (true, Some(RatFn::from(q)), Some(RatFn::zero()));
        }
    }
    match (solved(computed, leading), solved(claimed, leading)) {
        (Some(a), Some(b)) => {
            let d = a.sub(&b);
            if d.is_zero() {
                let (c1a, _) = computed.affine_in(leading).unwrap();
                let (c1b, _) = claimed.affine_in(leading).unwrap();
                (true, c1a.div(&c1b).ok(), Some(d))
            } else {
                (false, None, Some(d))
            }
        }
        _ => (false, None, None),
    }
}

fn text(r: &RatFn) -> String {
    emit(&Expr::from_ratfn(r))
}

impl ReductionRecord {
    pub fn first_change(&self) -> &ChangeOfVariables {
        &self.readings[0].change
    }

    /// The source equation, resolving computed sources through the catalog.
    pub fn source_expr(&self, catalog: &[ReductionRecord]) -> Result<Expr, ReduceError> {
        match &self.source {
            SourceEquation::Printed(t) => Ok(parse(t, &self.first_change().old_table())?),
            SourceEquation::Computed(name) => {
                let parent = catalog
                    .iter()
                    .find(|r| &r.name == name)
                    .ok_or_else(|| ReduceError::BadInverse(format!("unknown record {name}")))?;
                let src = parent.source_expr(catalog)?;
                let pb = pullback(&src, parent.first_change())?;
                Ok(Expr::from_ratfn(&pb.target))
            }
        }
    }

    pub fn source_shell(&self, catalog: &[ReductionRecord]) -> Result<OnShell, ReduceError> {
        let src = self.source_expr(catalog)?.canonicalize()?;
        let dep = match self.first_change() {
            ChangeOfVariables::Point(p) => p.old_dep.clone(),
            ChangeOfVariables::Jet1(j) => j.old_dep.clone(),
        };
        let lead = match &self.source_leading {
            Some(a) => a.clone(),
            None => highest_jet(&src, &dep).ok_or_else(|| KernelError::Unsupported("source has no jets".into()))?,
        };
        Ok(OnShell::new(src, lead, DEFAULT_DERIVATIVE_CAP)?)
    }

    fn run_reading(&self, src: &Expr, r: &Reading) -> ReadingOutcome {
        let mut out = ReadingOutcome {
            label: r.label.clone(),
            change: r.change.describe(),
            claimed: r.claimed.clone(),
            claim_error: None,
            computed: None,
            computed_solved: None,
            matches: false,
            factor: None,
            diff: None,
            error: None,
        };
        let claimed = if r.claimed.trim().is_empty() {
            Err(String::new())
        } else {
            parse(&r.claimed, &r.change.new_table()).map_err(|e| e.to_string()).and_then(|e| e.canonicalize().map_err(|e| e.to_string()))
        };
        if let Err(e) = &claimed {
            if !e.is_empty() {
                out.claim_error = Some(e.clone());
            }
        }
        if let Err(e) = r.change.check_jacobian(10, 7) {
            out.error = Some(e.to_string());
            return out;
        }
        let pb = match pullback(src, &r.change) {
            Ok(pb) => pb,
            Err(e) => {
                out.error = Some(e.to_string());
                return out;
            }
        };
        out.computed = Some(text(&pb.target));
        if highest_jet(&pb.target, r.change.new_dep()).is_none() {
            out.error = Some("the pullback does not involve the new unknown, so no invariant solutions exist".into());
            return out;
        }
        let lead = self
            .target_leading
            .clone()
            .or_else(|| highest_jet(&pb.target, r.change.new_dep()));
        if let Some(l) = &lead {
            if let Some(rhs) = solved(&pb.target, l) {
                out.computed_solved = Some(format!("{l} = {}", text(&rhs)));
            }
            if let Ok(c) = &claimed {
                let (m, factor, diff) = compare(&pb.target, c, l);
                out.matches = m;
                out.factor = factor.map(|f| text(&f));
                out.diff = diff.map(|d| text(&d));
            }
        }
        out
    }
}

pub fn verify_reduction(rec: &ReductionRecord, catalog: &[ReductionRecord]) -> ReductionOutcome {
    let src = rec.source_expr(catalog);
    let source = match (&rec.source, &src) {
        (SourceEquation::Printed(t), _) => t.clone(),
        (SourceEquation::Computed(n), Ok(e)) => format!("computed target of {n}: {}", emit(e)),
        (SourceEquation::Computed(n), Err(e)) => format!("computed target of {n}: {e}"),
    };
    let Ok(src) = src else {
        return ReductionOutcome {
            name: rec.name.clone(),
            status: RecordStatus::Failed,
            source,
            generators_verified: Vec::new(),
            readings: Vec::new(),
            notes: rec.notes.clone(),
        };
    };
    let generators_verified = match rec.source_shell(catalog) {
        Ok(sh) => rec
            .generators
            .iter()
            .map(|g| check_symmetry(g, &sh).map(|v| v.pass).unwrap_or(false))
            .collect(),
        Err(_) => vec![false; rec.generators.len()],
    };
    let readings: Vec<ReadingOutcome> = rec.readings.par_iter().map(|r| rec.run_reading(&src, r)).collect();
    let status = if readings.iter().any(|r| r.matches) && generators_verified.iter().all(|g| *g) {
        RecordStatus::Verified
    } else if readings.iter().any(|r| r.computed.is_some() && r.error.is_none()) {
        RecordStatus::Corrected
    } else {
        RecordStatus::Failed
    };
    ReductionOutcome {
        name: rec.name.clone(),
        status,
        source,
        generators_verified,
        readings,
        notes: rec.notes.clone(),
    }
}

pub fn verify_all(catalog: &[ReductionRecord]) -> Vec<ReductionOutcome> {
    catalog.par_iter().map(|r| verify_reduction(r, catalog)).collect()
}

#[derive(Clone, Debug)]
pub struct NoSymmetryCheck {
    pub dimension: usize,
    pub unknowns: usize,
    pub basis: Vec<VectorField>,
}

impl NoSymmetryCheck {
    pub fn consistent(&self) -> bool {
        self.dimension == 0
    }
}

/// Determining solve with polynomial ansatz of degree `deg` in the base and dependent value.
pub fn bounded_symmetry_search(shell: &OnShell, base: &str, dep: &str, deg: usize) -> Result<NoSymmetryCheck, KernelError> {
    let vars = [Atom::base(base), Atom::jet(dep, &[])];
    let ansatz = Ansatz::uniform(&[base], dep, &polynomial_basis(&vars, deg));
    let sys = determining_system(shell, &ansatz)?;
    let alg = solve(&sys);
    Ok(NoSymmetryCheck {
        dimension: alg.dimension,
        unknowns: sys.unknowns(),
        basis: alg.basis,
    })
}

/// Verdict of one generator on one reduced equation.
#[derive(Clone, Debug)]
pub struct OdeSymmetryVerdict {
    pub name: String,
    pub field: VectorField,
    pub verdict: SymmetryVerdict,
}

pub fn check_ode_symmetry(claim: &OdeSymmetryClaim) -> Result<Vec<OdeSymmetryVerdict>, ReduceError> {
    let shell = claim.shell()?;
    claim
        .generators
        .par_iter()
        .map(|(name, f)| {
            Ok(OdeSymmetryVerdict {
                name: name.clone(),
                field: f.clone(),
                verdict: check_symmetry(f, &shell)?,
            })
        })
        .collect()
}

