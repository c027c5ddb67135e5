//! Point vector fields, jet prolongation and the symmetry condition.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{solve_affine, solve_homogeneous, Field};
use crate::symkernel::{
    parse, Atom, Expr, JetIndex, KernelError, Monomial, RatFn, Symbol, SymbolTable, Q,
};

/// Generator `sum xi^i d/dx^i + eta d/du` on one dependent variable.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    pub bases: Vec<Symbol>,
    pub dep: Symbol,
    pub xi: Vec<Expr>,
    pub eta: Expr,
}

impl VectorField {
    pub fn zero(bases: &[&str], dep: &str) -> Self {
        VectorField {
            bases: bases.iter().map(|b| Symbol::new(b)).collect(),
            dep: Symbol::new(dep),
            xi: vec![Expr::zero(); bases.len()],
            eta: Expr::zero(),
        }
    }

    /// Field on (t, x, y; u).
    pub fn bk() -> Self {
        Self::zero(&["t", "x", "y"], "u")
    }

    pub fn with_xi(mut self, base: &str, e: Expr) -> Self {
        let i = self.index_of(base).expect("unknown base variable");
        self.xi[i] = e;
        self
    }

    pub fn with_eta(mut self, e: Expr) -> Self {
        self.eta = e;
        self
    }

    fn index_of(&self, base: &str) -> Option<usize> {
        self.bases.iter().position(|b| b.as_str() == base)
    }

    pub fn xi_of(&self, base: &str) -> &Expr {
        &self.xi[self.index_of(base).expect("unknown base variable")]
    }

    /// Parses `xi_t = ...; xi_x = ...; eta = ...` (missing components are zero).
    pub fn parse(
        text: &str,
        table: &SymbolTable,
        bases: &[&str],
        dep: &str,
    ) -> Result<Self, KernelError> {
        let mut v = VectorField::zero(bases, dep);
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, rhs) = part.split_once('=').ok_or_else(|| KernelError::Syntax {
                offset: 0,
                expected: vec!["xi_<var> = expr".into(), "eta = expr".into()],
                found: part.to_string(),
            })?;
            let e = parse(rhs.trim(), table)?;
            match lhs.trim() {
                "eta" => v.eta = e,
                l => {
                    let b = l.strip_prefix("xi_").unwrap_or("");
                    let i = v.index_of(b).ok_or_else(|| KernelError::Syntax {
                        offset: 0,
                        expected: bases.iter().map(|b| format!("xi_{b}")).collect(),
                        found: l.to_string(),
                    })?;
                    v.xi[i] = e;
                }
            }
        }
        Ok(v)
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField {
            bases: self.bases.clone(),
            dep: self.dep.clone(),
            xi: self.xi.iter().zip(&o.xi).map(|(a, b)| a.add(b)).collect(),
            eta: self.eta.add(&o.eta),
        }
    }

    pub fn scale(&self, k: &Q) -> VectorField {
        VectorField {
            bases: self.bases.clone(),
            dep: self.dep.clone(),
            xi: self.xi.iter().map(|a| a.scale(k)).collect(),
            eta: self.eta.scale(k),
        }
    }

    /// Normalized components.
    pub fn normalized(&self) -> Result<VectorField, KernelError> {
        Ok(VectorField {
            bases: self.bases.clone(),
            dep: self.dep.clone(),
            xi: self
                .xi
                .iter()
                .map(|e| e.normalize())
                .collect::<Result<_, _>>()?,
            eta: self.eta.normalize()?,
        })
    }

    pub fn dep_atom(&self) -> Atom {
        Atom::Jet {
            dep: self.dep.clone(),
            index: JetIndex::empty(),
        }
    }

    fn jet1(&self, i: usize) -> Atom {
        Atom::Jet {
            dep: self.dep.clone(),
            index: JetIndex::from_symbols([self.bases[i].clone()]),
        }
    }

    /// True when no coefficient involves a derivative of the dependent variable.
    pub fn is_point(&self) -> bool {
        self.xi
            .iter()
            .chain(std::iter::once(&self.eta))
            .all(|e| e.atoms().iter().all(|a| !a.is_jet() || a.order() == 0))
    }

    /// Text in the declaration grammar.
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (b, e) in self.bases.iter().zip(&self.xi) {
            if !e.is_const_zero() {
                parts.push(format!("xi_{b} = {}", crate::symkernel::emit(e)));
            }
        }
        if !self.eta.is_const_zero() {
            parts.push(format!("eta = {}", crate::symkernel::emit(&self.eta)));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("; ")
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `W = eta - xi^i u_i`.
pub fn characteristic(v: &VectorField) -> Expr {
    let mut terms = vec![v.eta.clone()];
    for (i, xi) in v.xi.iter().enumerate() {
        terms.push(xi.mul(&Expr::atom(v.jet1(i))).neg());
    }
    Expr::sum(terms)
}

/// Canonical components of a field.
#[derive(Clone, Debug)]
struct FieldForms {
    xi: Vec<RatFn>,
    eta: RatFn,
}

fn forms(v: &VectorField) -> Result<FieldForms, KernelError> {
    Ok(FieldForms {
        xi: v
            .xi
            .iter()
            .map(|e| e.canonicalize())
            .collect::<Result<_, _>>()?,
        eta: v.eta.canonicalize()?,
    })
}

#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub base: VectorField,
    pub order: usize,
    /// Coefficient of d/du_S for every jet atom with `1 <= |S| <= order`.
    pub coefficients: BTreeMap<Atom, RatFn>,
}

fn multisets(bases: &[Symbol], order: usize) -> Vec<JetIndex> {
    let mut out = vec![JetIndex::empty()];
    let mut frontier = vec![JetIndex::empty()];
    for _ in 0..order {
        let mut next = Vec::new();
        for s in &frontier {
            let last = s.as_slice().last();
            for b in bases {
                if last.is_none_or(|l| l <= b) {
                    next.push(s.with(b));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Prolongation by `eta^{S,i} = D_i eta^S - sum_j D_i xi^j u_{S,j}`.
pub fn prolong(v: &VectorField, order: usize, cap: usize) -> Result<ProlongedField, KernelError> {
    if order > cap {
        return Err(KernelError::DerivativeCap {
            atom: format!("prolongation of order {order}"),
            cap,
        });
    }
    let f = forms(v)?;
    let mut dxi: HashMap<(usize, usize), RatFn> = HashMap::new();
    for (j, xi) in f.xi.iter().enumerate() {
        for (i, b) in v.bases.iter().enumerate() {
            dxi.insert((i, j), xi.total_derivative(b, cap)?);
        }
    }
    let mut coeffs: BTreeMap<JetIndex, RatFn> = BTreeMap::new();
    coeffs.insert(JetIndex::empty(), f.eta.clone());
    for s in multisets(&v.bases, order).into_iter().skip(1) {
        // s = prev ∪ {b_i} with b_i the largest symbol of s
        let last = s.as_slice().last().unwrap().clone();
        let i = v.bases.iter().position(|b| *b == last).unwrap();
        let prev = s.without(&last).unwrap();
        let mut c = coeffs[&prev].total_derivative(&last, cap)?;
        for (j, bj) in v.bases.iter().enumerate() {
            let d = &dxi[&(i, j)];
            if d.is_zero() {
                continue;
            }
            let a = Atom::Jet {
                dep: v.dep.clone(),
                index: prev.with(bj),
            };
            a.check_cap(cap)?;
            c = c.sub(&d.mul(&RatFn::atom(a)));
        }
        coeffs.insert(s, c);
    }
    Ok(ProlongedField {
        base: v.clone(),
        order,
        coefficients: coeffs
            .into_iter()
            .filter(|(s, _)| s.order() > 0)
            .map(|(s, c)| {
                (
                    Atom::Jet {
                        dep: v.dep.clone(),
                        index: s,
                    },
                    c,
                )
            })
            .collect(),
    })
}

/// Second route to the prolonged coefficients: `eta^S = D_S W + xi^i u_{S,i}`.
pub fn prolong_via_characteristic(
    v: &VectorField,
    order: usize,
    cap: usize,
) -> Result<BTreeMap<Atom, RatFn>, KernelError> {
    let f = forms(v)?;
    let w = characteristic(v).canonicalize()?;
    let mut dw: BTreeMap<JetIndex, RatFn> = BTreeMap::new();
    dw.insert(JetIndex::empty(), w);
    let mut out = BTreeMap::new();
    for s in multisets(&v.bases, order).into_iter().skip(1) {
        let last = s.as_slice().last().unwrap().clone();
        let prev = s.without(&last).unwrap();
        let d = dw[&prev].total_derivative(&last, cap)?;
        let mut c = d.clone();
        for (i, b) in v.bases.iter().enumerate() {
            let a = Atom::Jet {
                dep: v.dep.clone(),
                index: s.with(b),
            };
            c = c.add(&f.xi[i].mul(&RatFn::atom(a)));
        }
        dw.insert(s.clone(), d);
        out.insert(
            Atom::Jet {
                dep: v.dep.clone(),
                index: s,
            },
            c,
        );
    }
    Ok(out)
}

/// `pr V (eq)`.
pub fn apply_prolonged(p: &ProlongedField, eq: &RatFn) -> Result<RatFn, KernelError> {
    let f = forms(&p.base)?;
    let mut acc = RatFn::zero();
    for (i, b) in p.base.bases.iter().enumerate() {
        if !f.xi[i].is_zero() {
            acc = acc.add(&f.xi[i].mul(&eq.partial(&Atom::Base(b.clone()))));
        }
    }
    if !f.eta.is_zero() {
        acc = acc.add(&f.eta.mul(&eq.partial(&p.base.dep_atom())));
    }
    for a in eq.atoms() {
        if let Some(c) = p.coefficients.get(&a) {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&eq.partial(&a)));
            }
        }
    }
    Ok(acc)
}

/// An equation solved for one leading jet atom, and the reduction modulo it.
#[derive(Clone, Debug)]
pub struct OnShell {
    pub eq: RatFn,
    pub leading: Atom,
    pub rhs: RatFn,
    pub cap: usize,
    leading_index: JetIndex,
    dep: Symbol,
}

impl OnShell {
    /// The leading coefficient must be nonzero and free of the leading atom and its derivatives.
    pub fn new(eq: RatFn, leading: Atom, cap: usize) -> Result<Self, KernelError> {
        let Atom::Jet { dep, index } = &leading else {
            return Err(KernelError::Unsupported("leading atom must be a jet".into()));
        };
        let (c1, c0) = eq.affine_in(&leading).ok_or_else(|| {
            KernelError::Unsupported(format!("equation is not affine in {leading}"))
        })?;
        let principal = |a: &Atom| matches!(a, Atom::Jet { dep: d, index: i } if d == dep && i.contains(index));
        if c1.is_zero() || c1.contains_atom(principal) {
            return Err(KernelError::Unsupported(format!(
                "coefficient of {leading} vanishes or involves its derivatives"
            )));
        }
        let rhs = c0.neg().div(&c1)?;
        Ok(OnShell {
            eq,
            leading: leading.clone(),
            rhs,
            cap,
            leading_index: index.clone(),
            dep: dep.clone(),
        })
    }

    pub fn from_expr(eq: &Expr, leading: Atom, cap: usize) -> Result<Self, KernelError> {
        Self::new(eq.canonicalize()?, leading, cap)
    }

    fn is_principal(&self, a: &Atom) -> bool {
        matches!(a, Atom::Jet { dep, index } if *dep == self.dep && index.contains(&self.leading_index))
    }

    /// Replaces every derivative of the leading atom by the matching derivative
    /// of the right-hand side, to a fixed point.
    pub fn reduce(&self, e: &RatFn) -> Result<RatFn, KernelError> {
        let mut memo: HashMap<Atom, RatFn> = HashMap::new();
        self.reduce_with(e, &mut memo, 0)
    }

    fn reduce_with(
        &self,
        e: &RatFn,
        memo: &mut HashMap<Atom, RatFn>,
        depth: usize,
    ) -> Result<RatFn, KernelError> {
        let mut cur = e.clone();
        for _ in 0..64 {
            let pending: Vec<Atom> = cur.atoms().into_iter().filter(|a| self.is_principal(a)).collect();
            if pending.is_empty() {
                return Ok(cur);
            }
            for a in &pending {
                self.image(a, memo, depth)?;
            }
            cur = cur.substitute_with(&mut |a| Ok(memo.get(a).cloned()))?;
        }
        Err(KernelError::Unsupported("on-shell reduction did not terminate".into()))
    }

    fn image(
        &self,
        a: &Atom,
        memo: &mut HashMap<Atom, RatFn>,
        depth: usize,
    ) -> Result<RatFn, KernelError> {
        if let Some(r) = memo.get(a) {
            return Ok(r.clone());
        }
        if depth > 4 * self.cap {
            return Err(KernelError::Unsupported("on-shell reduction recursion too deep".into()));
        }
        let Atom::Jet { index, .. } = a else { unreachable!() };
        let rest = index.minus(&self.leading_index).unwrap();
        let raw = if rest.order() == 0 {
            self.rhs.clone()
        } else {
            let v = rest.as_slice().last().unwrap().clone();
            let prev = Atom::Jet {
                dep: self.dep.clone(),
                index: index.without(&v).unwrap(),
            };
            let p = self.image(&prev, memo, depth + 1)?;
            p.total_derivative(&v, self.cap)?
        };
        let r = self.reduce_with(&raw, memo, depth + 1)?;
        memo.insert(a.clone(), r.clone());
        Ok(r)
    }

    /// Highest jet order appearing in the equation.
    pub fn order(&self) -> usize {
        self.eq.atoms().iter().filter(|a| a.is_jet()).map(|a| a.order()).max().unwrap_or(0)
    }
}

pub fn reduce_on_shell(e: &Expr, eq: &Expr, leading: &Atom, cap: usize) -> Result<Expr, KernelError> {
    let sh = OnShell::from_expr(eq, leading.clone(), cap)?;
    Ok(Expr::from_ratfn(&sh.reduce(&e.canonicalize()?)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualTerm {
    pub monomial: String,
    pub coefficient: String,
}

#[derive(Clone, Debug)]
pub struct SymmetryVerdict {
    pub residual: RatFn,
    pub pass: bool,
    pub residual_terms: Vec<ResidualTerm>,
}

impl SymmetryVerdict {
    pub fn from_residual(residual: RatFn) -> Self {
        let pass = residual.is_zero();
        let residual_terms = residual_terms(&residual);
        SymmetryVerdict {
            residual,
            pass,
            residual_terms,
        }
    }

    pub fn residual_text(&self) -> String {
        crate::symkernel::emit::print(&Expr::from_ratfn(&self.residual))
    }
}

/// Numerator terms grouped by their jet monomial.
pub fn residual_terms(r: &RatFn) -> Vec<ResidualTerm> {
    let groups = r.numerator().split_by(|a| a.is_jet());
    let mut den_only = RatFn::one();
    for (p, k) in r.denominator_factors() {
        den_only = den_only.mul(&RatFn::from(p.clone()).powi(-(*k as i64)).expect("nonzero factor"));
    }
    groups
        .into_iter()
        .map(|(m, p)| ResidualTerm {
            monomial: crate::symkernel::emit::print(&Expr::from_monomial(&Q::from_integer(1.into()), &m)),
            coefficient: crate::symkernel::emit::print(&Expr::from_ratfn(&RatFn::from(p).mul(&den_only))),
        })
        .collect()
}

pub fn check_symmetry(v: &VectorField, shell: &OnShell) -> Result<SymmetryVerdict, KernelError> {
    Ok(SymmetryVerdict::from_residual(symmetry_residual(v, shell)?))
}

pub fn symmetry_residual(v: &VectorField, shell: &OnShell) -> Result<RatFn, KernelError> {
    let p = prolong(v, shell.order().max(1), shell.cap)?;
    let r = apply_prolonged(&p, &shell.eq)?;
    shell.reduce(&r)
}

/// One ansatz direction: the basis function placed in one component.
#[derive(Clone, Debug)]
pub struct AnsatzTerm {
    /// Index into `bases`, or `bases.len()` for eta.
    pub component: usize,
    pub function: Expr,
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    pub bases: Vec<Symbol>,
    pub dep: Symbol,
    pub terms: Vec<AnsatzTerm>,
}

impl Ansatz {
    /// The same list of basis functions in every component.
    pub fn uniform(bases: &[&str], dep: &str, functions: &[Expr]) -> Self {
        let mut terms = Vec::new();
        for component in 0..=bases.len() {
            for f in functions {
                terms.push(AnsatzTerm {
                    component,
                    function: f.clone(),
                });
            }
        }
        Ansatz {
            bases: bases.iter().map(|b| Symbol::new(b)).collect(),
            dep: Symbol::new(dep),
            terms,
        }
    }

    pub fn field(&self, k: usize) -> VectorField {
        let t = &self.terms[k];
        let mut v = VectorField {
            bases: self.bases.clone(),
            dep: self.dep.clone(),
            xi: vec![Expr::zero(); self.bases.len()],
            eta: Expr::zero(),
        };
        if t.component == self.bases.len() {
            v.eta = t.function.clone();
        } else {
            v.xi[t.component] = t.function.clone();
        }
        v
    }

    /// Field with the given coordinates.
    pub fn combine(&self, coords: &[RatFn]) -> VectorField {
        let mut xi: Vec<Vec<Expr>> = vec![Vec::new(); self.bases.len() + 1];
        for (t, c) in self.terms.iter().zip(coords) {
            if c.is_zero() {
                continue;
            }
            xi[t.component].push(Expr::from_ratfn(c).mul(&t.function));
        }
        let eta = Expr::sum(xi.pop().unwrap());
        VectorField {
            bases: self.bases.clone(),
            dep: self.dep.clone(),
            xi: xi.into_iter().map(Expr::sum).collect(),
            eta,
        }
    }

    /// Coordinates of `v`, if every component lies in the span of the ansatz.
    /// Basis functions must be distinct monomials (times rational constants).
    pub fn coordinates(&self, v: &VectorField) -> Result<Option<Vec<RatFn>>, KernelError> {
        let mut coords = vec![RatFn::zero(); self.terms.len()];
        let comps: Vec<&Expr> = v.xi.iter().chain(std::iter::once(&v.eta)).collect();
        for (ci, comp) in comps.iter().enumerate() {
            let mut rest = comp.canonicalize()?;
            for (k, t) in self.terms.iter().enumerate() {
                if t.component != ci {
                    continue;
                }
                let (c, m) = t
                    .function
                    .canonicalize()?
                    .as_monomial()
                    .ok_or_else(|| KernelError::Unsupported("ansatz function is not a monomial".into()))?;
                let coeff = monomial_coefficient(&rest, &m).scale(&(Q::from_integer(1.into()) / c.clone()));
                if !coeff.is_zero() {
                    rest = rest.sub(&coeff.mul(&t.function.canonicalize()?));
                    coords[k] = coeff;
                }
            }
            if !rest.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(coords))
    }
}

/// Coefficient (in the parameters) of the non-parameter monomial `m` in `r`.
fn monomial_coefficient(r: &RatFn, m: &Monomial) -> RatFn {
    let groups = r.numerator().split_by(|a| !a.is_param());
    let Some(p) = groups.get(m) else {
        return RatFn::zero();
    };
    let mut out = RatFn::from(p.clone());
    for (f, k) in r.denominator_factors() {
        if f.contains_atom(|a| !a.is_param()) {
            return RatFn::zero();
        }
        out = out.mul(&RatFn::from(f.clone()).powi(-(*k as i64)).expect("nonzero factor"));
    }
    out
}

/// Linear system obtained from an ansatz: one row per coefficient equation.
#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub ansatz: Ansatz,
    pub rows: Vec<Vec<RatFn>>,
}

impl DeterminingSystem {
    pub fn unknowns(&self) -> usize {
        self.ansatz.terms.len()
    }
}

fn unknown_atom(k: usize) -> Atom {
    Atom::Param(Symbol::new(&format!("_c{k}")))
}

fn is_unknown(a: &Atom) -> bool {
    matches!(a, Atom::Param(s) if s.as_str().starts_with("_c"))
}

/// Residuals computed per basis element in parallel, then collected by the
/// monomials in everything except parameters.
pub fn determining_system(shell: &OnShell, ansatz: &Ansatz) -> Result<DeterminingSystem, KernelError> {
    let residuals: Vec<RatFn> = (0..ansatz.terms.len())
        .into_par_iter()
        .map(|k| symmetry_residual(&ansatz.field(k), shell))
        .collect::<Result<_, _>>()?;
    let mut total = RatFn::zero();
    for (k, r) in residuals.iter().enumerate() {
        if !r.is_zero() {
            total = total.add(&r.mul(&RatFn::atom(unknown_atom(k))));
        }
    }
    let n = ansatz.terms.len();
    let groups = total.numerator().split_by(|a| !a.is_param());
    let mut rows: Vec<Vec<RatFn>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (_, p) in groups {
        let mut row = vec![RatFn::zero(); n];
        let by_unknown = p.split_by(is_unknown);
        for (m, coeff) in by_unknown {
            let pairs = m.pairs();
            if pairs.len() != 1 || !pairs[0].1.is_one() {
                return Err(KernelError::Unsupported(
                    "determining equations are not linear in the unknowns".into(),
                ));
            }
            let Atom::Param(s) = &pairs[0].0 else { unreachable!() };
            let k: usize = s.as_str()[2..].parse().unwrap();
            row[k] = RatFn::from(coeff);
        }
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    }
    Ok(DeterminingSystem {
        ansatz: ansatz.clone(),
        rows,
    })
}

#[derive(Clone, Debug)]
pub struct SymmetryAlgebra {
    pub dimension: usize,
    pub basis: Vec<VectorField>,
    pub coordinates: Vec<Vec<RatFn>>,
}

pub fn solve(system: &DeterminingSystem) -> SymmetryAlgebra {
    let sol = solve_homogeneous(system.rows.clone(), system.unknowns());
    SymmetryAlgebra {
        dimension: sol.dimension,
        basis: sol.basis.iter().map(|c| system.ansatz.combine(c)).collect(),
        coordinates: sol.basis,
    }
}

/// Searches the solution space for a field agreeing with the claim on as many
/// coordinates as possible, taking xi coordinates in base order before eta.
pub fn correct_claim(
    algebra: &SymmetryAlgebra,
    ansatz: &Ansatz,
    claim: &VectorField,
) -> Result<Option<VectorField>, KernelError> {
    if algebra.dimension == 0 {
        return Ok(None);
    }
    let Some(target) = ansatz.coordinates(claim)? else {
        return Ok(None);
    };
    let n = ansatz.terms.len();
    let d = algebra.dimension;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (ansatz.terms[k].component, target[k].is_zero()));
    let mut rows: Vec<Vec<RatFn>> = Vec::new();
    let mut rhs: Vec<RatFn> = Vec::new();
    for k in order {
        let row: Vec<RatFn> = (0..d).map(|j| algebra.coordinates[j][k].clone()).collect();
        rows.push(row);
        rhs.push(target[k].clone());
        if solve_affine(&rows, &rhs, d).is_none() {
            rows.pop();
            rhs.pop();
        }
    }
    let z = solve_affine(&rows, &rhs, d).expect("kept constraints are consistent");
    let mut coords = vec![RatFn::zero(); n];
    for (j, zj) in z.iter().enumerate() {
        if zj.is_zero() {
            continue;
        }
        for (c, b) in coords.iter_mut().zip(&algebra.coordinates[j]) {
            *c = Field::add(c, &zj.mul(b));
        }
    }
    if coords.iter().all(|c| c.is_zero()) {
        return Ok(None);
    }
    Ok(Some(ansatz.combine(&coords)))
}

/// Monomials `t^i x^j y^k u^l` of total degree at most `deg`.
pub fn polynomial_basis(vars: &[Atom], deg: usize) -> Vec<Expr> {
    let mut out = vec![Expr::one()];
    let mut frontier: Vec<(Expr, usize)> = vec![(Expr::one(), 0)];
    for _ in 0..deg {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                let e = m.mul(&Expr::atom(v.clone()));
                out.push(e.clone());
                next.push((e, i));
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::bk;

    fn tx_field(eta: &str) -> VectorField {
        VectorField::bk().with_eta(bk(eta))
    }

    #[test]
    fn characteristic_of_translations() {
        let v = VectorField::bk().with_xi("t", Expr::one());
        assert_eq!(characteristic(&v), bk("-u[t]"));
        assert_eq!(characteristic(&tx_field("1")), Expr::one());
    }

    #[test]
    fn prolong_simple_fields() {
        let v = VectorField::bk().with_xi("t", Expr::one());
        let p = prolong(&v, 3, 8).unwrap();
        assert!(p.coefficients.values().all(|c| c.is_zero()));
        let p = prolong(&tx_field("x"), 2, 8).unwrap();
        assert!(p.coefficients[&Atom::jet("u", &["x"])].is_one());
        assert!(p.coefficients[&Atom::jet("u", &["x", "x"])].is_zero());
    }

    #[test]
    fn both_prolongation_routes_agree() {
        let v = VectorField::parse(
            "xi_t = t^2; xi_x = x*y; xi_y = u; eta = x*u^2 + a(t)",
            &SymbolTable::bk(),
            &["t", "x", "y"],
            "u",
        )
        .unwrap();
        let p = prolong(&v, 3, 8).unwrap();
        let q = prolong_via_characteristic(&v, 3, 8).unwrap();
        for (a, c) in &p.coefficients {
            assert!(c.sub(&q[a]).is_zero(), "{a}");
        }
    }

    #[test]
    fn parse_declaration() {
        let v = VectorField::parse(
            "xi_t = t; xi_x = y*alpha/beta; eta = 5*y^2*alpha/(16*t*beta^2) - x*y/(4*t*beta)",
            &SymbolTable::bk(),
            &["t", "x", "y"],
            "u",
        )
        .unwrap();
        assert_eq!(v.xi_of("t"), &bk("t"));
        assert!(v.xi_of("y").is_const_zero());
        assert!(v.is_point());
    }
}
