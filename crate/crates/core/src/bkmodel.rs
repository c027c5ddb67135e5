//! The potential BK equation, its symmetry and flux catalogs, the adjoint
//! equation and Ibragimov's conserved vectors.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::prolong::{
    characteristic, correct_claim, determining_system, polynomial_basis, residual_terms, solve, Ansatz, OnShell, ResidualTerm,
    SymmetryAlgebra, SymmetryVerdict, VectorField,
};
use crate::symkernel::{
    bk, emit, parse, Atom, Expr, JetIndex, KernelError, RatFn, Symbol, SymbolTable, DEFAULT_DERIVATIVE_CAP, Q,
};

pub const BK_TEXT: &str = "u[x,t] + alpha*u[x,x,x,x] + beta*u[x,x,x,y] + 6*alpha*u[x,x]*u[x] + 4*beta*u[x,y]*u[x] + 4*beta*u[x,x]*u[y]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Paper,
    Derived,
    Trivial,
}

/// Optional numeric bindings of the parameters; `None` keeps them symbolic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub alpha: Option<Q>,
    pub beta: Option<Q>,
    pub c: Option<Q>,
}

impl Params {
    pub fn symbolic() -> Self {
        Self::default()
    }

    pub fn bindings(&self) -> BTreeMap<Atom, Expr> {
        let mut m = BTreeMap::new();
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("c", &self.c)] {
            if let Some(v) = v {
                m.insert(Atom::param(name), Expr::constant(v.clone()));
            }
        }
        m
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        e.substitute(&self.bindings())
    }

    pub fn apply_field(&self, v: &VectorField) -> VectorField {
        VectorField {
            xi: v.xi.iter().map(|e| self.apply(e)).collect(),
            eta: self.apply(&v.eta),
            ..v.clone()
        }
    }

    pub fn apply_fluxes(&self, f: &ConservationFluxes) -> ConservationFluxes {
        ConservationFluxes {
            generator: f.generator.as_ref().map(|g| self.apply_field(g)),
            phi: self.apply(&f.phi),
            ct: self.apply(&f.ct),
            cx: self.apply(&f.cx),
            cy: self.apply(&f.cy),
        }
    }

    /// Parses `alpha=1,beta=1/2,c=3`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut p = Params::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, found `{part}`"))?;
            let val = parse(v.trim(), &SymbolTable::new())
                .ok()
                .and_then(|e| e.as_const().cloned())
                .ok_or_else(|| format!("`{v}` is not a rational number"))?;
            match k.trim() {
                "alpha" | "a" => p.alpha = Some(val),
                "beta" | "b" => p.beta = Some(val),
                "c" => p.c = Some(val),
                other => return Err(format!("unknown parameter `{other}`")),
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug)]
pub struct BkEquation {
    pub expr: Expr,
    pub leading: Atom,
    pub params: Params,
    pub assumptions: Vec<String>,
}

impl BkEquation {
    pub fn shell(&self) -> OnShell {
        OnShell::from_expr(&self.expr, self.leading.clone(), DEFAULT_DERIVATIVE_CAP)
            .expect("the BK equation is solvable for u[x,t]")
    }
}

pub fn bk_equation(params: &Params) -> BkEquation {
    BkEquation {
        expr: params.apply(&bk(BK_TEXT)),
        leading: Atom::jet("u", &["x", "t"]),
        params: params.clone(),
        assumptions: vec!["beta != 0".into(), "t != 0".into()],
    }
}

fn flux_table() -> SymbolTable {
    SymbolTable::bk().func("phi", &["t", "x", "y", "u"]).param("A5")
}

fn field(text: &str) -> VectorField {
    VectorField::parse(text, &flux_table(), &["t", "x", "y"], "u")
        .unwrap_or_else(|e| panic!("{text}: {e}"))
}

#[derive(Clone, Debug)]
pub struct CatalogSymmetry {
    pub name: String,
    pub field: VectorField,
    pub source: Source,
    pub anchor: String,
}

fn entry(name: &str, text: &str, source: Source, anchor: &str) -> CatalogSymmetry {
    CatalogSymmetry {
        name: name.into(),
        field: field(text),
        source,
        anchor: anchor.into(),
    }
}

pub fn catalog_symmetries() -> Vec<CatalogSymmetry> {
    vec![
        entry("G1a", "xi_t = 1", Source::Paper, "Gamma_1a = d_t"),
        entry(
            "G2a",
            "xi_t = t; xi_x = y*alpha/beta; eta = 5*y^2*alpha/(16*t*beta^2) - x*y/(4*t*beta)",
            Source::Paper,
            "Gamma_2a = t d_t + (y alpha/beta) d_x + ...",
        ),
        entry(
            "G3a",
            "xi_t = -t; xi_x = -(x - 2*y*alpha/beta); xi_y = -y; eta = u + 5*y^2*alpha/(8*t*beta^2) - x*y/(2*t*beta)",
            Source::Paper,
            "Gamma_3a = -t d_t - (x - 2y alpha/beta) d_x - y d_y + ...",
        ),
        entry(
            "G4a",
            "xi_y = 4*t*beta; eta = x - 3*y*alpha/(2*beta)",
            Source::Paper,
            "Gamma_4a = 4t beta d_y + (x - 3y alpha/(2 beta)) d_u",
        ),
        entry("G5a", "xi_y = 1", Source::Paper, "Gamma_5a = d_y"),
        entry(
            "G6a",
            "xi_x = b(t); eta = a(t) + y*b'(t)/beta",
            Source::Paper,
            "Gamma_6a = b(t) d_x + (a(t) + y b'(t)/beta) d_u",
        ),
        entry(
            "G7a",
            "xi_t = -3*t/2; xi_x = -x/2; xi_y = -y/2; eta = u/2",
            Source::Derived,
            "Gamma_7a used for the conserved vectors; scaling t->l^3 t, x->l x, y->l y, u->u/l",
        ),
    ]
}

/// Entries checked alongside the catalog: the two constant instances of the
/// function family and the family as it appears in the generic field.
pub fn auxiliary_symmetries() -> Vec<CatalogSymmetry> {
    vec![
        entry("G6a[b=1,a=0]", "xi_x = 1", Source::Trivial, "Gamma_6a with b = 1, a = 0"),
        entry("G6a[b=0,a=1]", "eta = 1", Source::Trivial, "Gamma_6a with b = 0, a = 1"),
        entry(
            "G6a(generic)",
            "xi_x = b(t); eta = a(t) + y*b'(t)/(4*beta)",
            Source::Paper,
            "generic field: b(t) d_x and a(t) + 2 t y beta b'(t)/(8 t beta^2) in d_u",
        ),
    ]
}

/// Constant coefficients in every component.
pub fn constant_ansatz() -> Ansatz {
    Ansatz::uniform(&["t", "x", "y"], "u", &[Expr::one()])
}

/// Polynomials of degree at most 2 in (t, x, y, u) plus y/t, x/t, y^2/t, xy/t.
pub fn extended_ansatz() -> Ansatz {
    let vars = [Atom::base("t"), Atom::base("x"), Atom::base("y"), Atom::jet("u", &[])];
    let mut fs = polynomial_basis(&vars, 2);
    fs.extend(["y/t", "x/t", "y^2/t", "x*y/t"].map(bk));
    Ansatz::uniform(&["t", "x", "y"], "u", &fs)
}

#[derive(Clone, Debug)]
pub struct DeterminingSolve {
    pub unknowns: usize,
    pub equations: usize,
    pub algebra: SymmetryAlgebra,
}

pub fn determining_solve(eq: &BkEquation, ansatz: &Ansatz) -> Result<DeterminingSolve, KernelError> {
    let sys = determining_system(&eq.shell(), ansatz)?;
    Ok(DeterminingSolve {
        unknowns: sys.unknowns(),
        equations: sys.rows.len(),
        algebra: solve(&sys),
    })
}

/// Closest member of the extended solution space to a failing claim.
pub fn corrected_generator(solved: &DeterminingSolve, claim: &VectorField) -> Result<Option<VectorField>, KernelError> {
    correct_claim(&solved.algebra, &extended_ansatz(), claim)
}

#[derive(Clone, Debug)]
pub struct AdjointProblem {
    pub lagrangian: RatFn,
    pub adjoint: RatFn,
}

pub fn v_atom(index: &[&str]) -> Atom {
    Atom::jet("v", index)
}

fn multisets(bases: &[Symbol], max: usize) -> Vec<JetIndex> {
    let mut out = vec![JetIndex::empty()];
    let mut frontier = vec![JetIndex::empty()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            for b in bases {
                if s.as_slice().last().is_none_or(|l| l <= b) {
                    next.push(s.with(b));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn bases() -> Vec<Symbol> {
    ["t", "x", "y"].iter().map(|s| Symbol::new(s)).collect()
}

fn d_index(e: &RatFn, s: &JetIndex) -> Result<RatFn, KernelError> {
    let mut r = e.clone();
    for v in s.iter() {
        r = r.total_derivative(v, DEFAULT_DERIVATIVE_CAP + 2)?;
    }
    Ok(r)
}

fn u_jet(s: &JetIndex) -> Atom {
    Atom::Jet {
        dep: Symbol::new("u"),
        index: s.clone(),
    }
}

/// Variational derivative in `u`, summing each multi-index once.
pub fn variational_derivative(l: &RatFn, order: usize) -> Result<RatFn, KernelError> {
    let mut acc = RatFn::zero();
    for s in multisets(&bases(), order) {
        let p = l.partial(&u_jet(&s));
        if p.is_zero() {
            continue;
        }
        let term = d_index(&p, &s)?;
        acc = if s.order() % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(acc)
}

pub fn adjoint_equation(eq: &BkEquation) -> AdjointProblem {
    let l = RatFn::atom(v_atom(&[])).mul(&eq.expr.canonicalize().unwrap());
    let adjoint = variational_derivative(&l, 4).expect("within derivative cap");
    AdjointProblem { lagrangian: l, adjoint }
}

/// The adjoint as printed, with `u-{xx}` read as `u[x,x]`.
pub const PRINTED_ADJOINT: &str = "6*alpha*u[x]*v[x,x] + 4*beta*u[y]*v[x,x] + 6*alpha*u[x,x]*v[x] + 4*beta*u[y,y] + v[x,t] + 4*beta*u[x]*v[x,y] + 4*beta*v[x]*u[x,y] + alpha*v[x,x,x,x] + beta*v[x,x,x,y]";

fn adjoint_table() -> SymbolTable {
    SymbolTable::bk().dep("v")
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointDiff {
    pub computed: String,
    pub printed: String,
    /// computed - printed
    pub difference: String,
    pub difference_terms: Vec<String>,
    pub typo_terms: Vec<String>,
    pub only_typos: bool,
}

/// Terms of the computed-minus-printed difference that trace to the two
/// malformed spots of the printed display.
pub fn adjoint_diff(eq: &BkEquation) -> AdjointDiff {
    let computed = adjoint_equation(eq).adjoint;
    let printed = eq
        .params
        .apply(&parse(PRINTED_ADJOINT, &adjoint_table()).unwrap())
        .canonicalize()
        .unwrap();
    let diff = computed.sub(&printed);
    let typo = eq
        .params
        .apply(&parse("4*beta*u[x,y]*v[x] - 4*beta*u[y,y]", &adjoint_table()).unwrap())
        .canonicalize()
        .unwrap();
    let terms: Vec<String> = diff
        .numerator()
        .terms()
        .map(|(m, c)| emit(&Expr::from_monomial(c, m)))
        .collect();
    AdjointDiff {
        computed: emit(&Expr::from_ratfn(&computed)),
        printed: emit(&Expr::from_ratfn(&printed)),
        difference: emit(&Expr::from_ratfn(&diff)),
        difference_terms: terms,
        typo_terms: vec![
            "6 alpha u-{xx} v_x (read as 6*alpha*u[x,x]*v[x])".into(),
            "4 beta u_yy (carries no v; the matching v-term is 4*beta*u[x,y]*v[x])".into(),
        ],
        only_typos: diff.sub(&typo).is_zero(),
    }
}

/// Replaces `v` and its derivatives by total derivatives of `phi`.
pub fn substitute_v(e: &RatFn, phi: &RatFn) -> Result<RatFn, KernelError> {
    let mut memo: BTreeMap<JetIndex, RatFn> = BTreeMap::new();
    e.substitute_with(&mut |a| match a {
        Atom::Jet { dep, index } if dep.as_str() == "v" => {
            if let Some(r) = memo.get(index) {
                return Ok(Some(r.clone()));
            }
            let r = d_index(phi, index)?;
            memo.insert(index.clone(), r.clone());
            Ok(Some(r))
        }
        _ => Ok(None),
    })
}

#[derive(Clone, Debug)]
pub struct SelfAdjointness {
    /// `None` when the substituted adjoint is not a multiple of the equation alone.
    pub lambda: Option<RatFn>,
    pub constraints: Vec<ResidualTerm>,
}

impl SelfAdjointness {
    pub fn holds(&self) -> bool {
        self.constraints.is_empty()
    }
}

pub fn self_adjointness_check(eq: &BkEquation, phi: &Expr) -> Result<SelfAdjointness, KernelError> {
    let phi = phi.canonicalize()?;
    if phi.is_zero() {
        return Err(KernelError::Unsupported("phi must be nonzero".into()));
    }
    let adj = adjoint_equation(eq).adjoint;
    let sub = substitute_v(&adj, &phi)?;
    let shell = eq.shell();
    let reduced = shell.reduce(&sub)?;
    let constraints: Vec<ResidualTerm> = residual_terms(&reduced);
    let lambda = if reduced.is_zero() {
        let l = sub.div(&eq.expr.canonicalize()?)?;
        let jet_free = l.denominator_factors().iter().all(|(f, _)| !f.contains_atom(|a| a.is_jet()));
        jet_free.then_some(l)
    } else {
        None
    };
    Ok(SelfAdjointness { lambda, constraints })
}

#[derive(Clone, Debug)]
pub struct ConservationFluxes {
    pub generator: Option<VectorField>,
    pub phi: Expr,
    pub ct: Expr,
    pub cx: Expr,
    pub cy: Expr,
}

impl ConservationFluxes {
    pub fn components(&self) -> [&Expr; 3] {
        [&self.ct, &self.cx, &self.cy]
    }
}

fn multinomial(s: &JetIndex) -> u64 {
    let n = s.order() as u64;
    let mut out: u64 = (1..=n).product();
    let mut i = 0;
    let sl = s.as_slice();
    while i < sl.len() {
        let mut j = i;
        while j < sl.len() && sl[j] == sl[i] {
            j += 1;
        }
        out /= (1..=(j - i) as u64).product::<u64>();
        i = j;
    }
    out
}

/// Conserved vector of Ibragimov's theorem for `L = v E`, with `v` replaced by `phi`.
pub fn ibragimov_fluxes(eq: &BkEquation, v: &VectorField, phi: &Expr) -> Result<ConservationFluxes, KernelError> {
    let l = adjoint_equation(eq).lagrangian;
    let w = characteristic(v).canonicalize()?;
    let phi_f = phi.canonicalize()?;
    let bs = bases();
    let all = multisets(&bs, 4);
    // L-derivatives in ordered-tuple convention
    let dl: BTreeMap<JetIndex, RatFn> = all
        .iter()
        .filter(|s| s.order() > 0)
        .map(|s| {
            let p = l.partial(&u_jet(s));
            (s.clone(), p.scale(&Q::new(1.into(), multinomial(s).into())))
        })
        .filter(|(_, p)| !p.is_zero())
        .collect();
    let mut dw: BTreeMap<JetIndex, RatFn> = BTreeMap::new();
    for s in multisets(&bs, 3) {
        dw.insert(s.clone(), d_index(&w, &s)?);
    }
    let comps: Vec<RatFn> = bs
        .par_iter()
        .enumerate()
        .map(|(i, b)| -> Result<RatFn, KernelError> {
            let xi = v.xi[i].canonicalize()?;
            let mut c = xi.mul(&l);
            for jset in multisets(&bs, 3) {
                let n_j = Q::from_integer(multinomial(&jset).into());
                let mut bracket = RatFn::zero();
                for kset in multisets(&bs, 3 - jset.order()) {
                    let mut full = jset.with(b);
                    for k in kset.iter() {
                        full = full.with(k);
                    }
                    let Some(p) = dl.get(&full) else { continue };
                    let n_k = Q::from_integer(multinomial(&kset).into());
                    let term = d_index(p, &kset)?.scale(&n_k);
                    bracket = if kset.order() % 2 == 0 { bracket.add(&term) } else { bracket.sub(&term) };
                }
                if bracket.is_zero() {
                    continue;
                }
                c = c.add(&dw[&jset].mul(&bracket).scale(&n_j));
            }
            substitute_v(&c, &phi_f)
        })
        .collect::<Result<_, _>>()?;
    Ok(ConservationFluxes {
        generator: Some(v.clone()),
        phi: phi.clone(),
        ct: Expr::from_ratfn(&comps[0]),
        cx: Expr::from_ratfn(&comps[1]),
        cy: Expr::from_ratfn(&comps[2]),
    })
}

/// `D_t ct + D_x cx + D_y cy` before on-shell reduction.
pub fn divergence(f: &ConservationFluxes) -> Result<RatFn, KernelError> {
    let mut acc = RatFn::zero();
    for (c, b) in f.components().iter().zip(bases()) {
        acc = acc.add(&c.canonicalize()?.total_derivative(&b, DEFAULT_DERIVATIVE_CAP)?);
    }
    Ok(acc)
}

pub fn verify_conservation(eq: &BkEquation, f: &ConservationFluxes) -> Result<SymmetryVerdict, KernelError> {
    let d = divergence(f)?;
    Ok(SymmetryVerdict::from_residual(eq.shell().reduce(&d)?))
}

pub const PHI: &str = "phi(t,x,y,u)";

/// The default multiplier: the constant `A5`.
pub fn phi_constant() -> Expr {
    Expr::atom(Atom::param("A5"))
}

fn flux_expr(text: &str) -> Expr {
    let full = text.replace("E", &format!("({BK_TEXT})")).replace("P", PHI);
    parse(&full, &flux_table()).unwrap_or_else(|e| panic!("{full}: {e}"))
}

#[derive(Clone, Debug)]
pub struct CatalogFlux {
    pub name: String,
    pub fluxes: ConservationFluxes,
    pub source: Source,
    pub anchor: String,
}

fn flux_entry(name: &str, ct: &str, cx: &str, cy: &str, anchor: &str) -> CatalogFlux {
    let generator = catalog_symmetries()
        .into_iter()
        .find(|s| s.name == name)
        .map(|s| s.field);
    CatalogFlux {
        name: name.into(),
        fluxes: ConservationFluxes {
            generator,
            phi: flux_expr("P"),
            ct: flux_expr(ct),
            cx: flux_expr(cx),
            cy: flux_expr(cy),
        },
        source: Source::Paper,
        anchor: anchor.into(),
    }
}

/// Printed flux triples. `E` stands for the left-hand side of the equation and
/// `P` for the multiplier `phi(t,x,y,u)`; `u-{y}` is read as `u[y]`.
pub fn catalog_fluxes() -> Vec<CatalogFlux> {
    let g = "(6*alpha*u[x] + 4*beta*u[y])";
    vec![
        flux_entry(
            "G1a",
            "P*E",
            &format!("-P*u[x,t]*{g}"),
            "-P*u[t]*4*beta*u[x,x]",
            "For Gamma_1a the conserved fluxes are",
        ),
        flux_entry(
            "G2a",
            "t*P*E",
            &format!("y*alpha/beta*P*E - P*(y/(4*t*beta) + t*u[x,t] + y*alpha/beta*u[x,x])*{g}"),
            "4*P*beta*u[x,x]*(5*y^2*alpha/(16*t*beta^2) - x*y/(4*t*beta) - t*u[t] - y*alpha/beta*u[x])",
            "For Gamma_2a the conserved fluxes are",
        ),
        flux_entry(
            "G3a",
            "-t*P*E",
            &format!("(2*y*alpha/beta - x)*P*E + (y*u[x,y] + t*u[x,t] + x*u[x,x] + 2*u[x] - y/(2*t*beta))*P*{g}"),
            "-y*P*E + 4*beta*P*u[x,x]*(u + 5*y^2*alpha/(8*t*beta^2) - x*y/(2*t*beta) + t*u[t] + x*u[x] - 2*y*alpha/beta*u[x] + y*u[y])",
            "For Gamma_3a the conserved fluxes are",
        ),
        flux_entry(
            "G4a",
            "0",
            &format!("P*(1 - 4*t*beta*u[x,y])*{g}"),
            "4*t*beta*P*E + (x - 3*y*alpha/(2*beta) - 4*t*beta*u[y])*4*beta*P*u[x,x]",
            "For Gamma_4a the nonzero conserved fluxes are",
        ),
        flux_entry(
            "G5a",
            "0",
            &format!("-u[x,y]*P*{g}"),
            "P*E - u[y]*P*4*beta*u[x,x]",
            "For Gamma_5a the nonzero conserved fluxes are",
        ),
        flux_entry(
            "G6a",
            "0",
            &format!("b(t)*P*E - b(t)*P*u[x,x]*{g}"),
            "4*beta*P*u[x,x]*(a(t) + y*b'(t)/(4*beta) - b(t)*u[x])",
            "For Gamma_6a the nonzero conserved fluxes are",
        ),
        flux_entry(
            "G7a",
            "-3*t/2*P*E",
            &format!("-x/2*P*E + (u[x] + x*u[x,x]/2 + y*u[x,y]/2 + 3*t*u[x,t]/2)*P*{g}"),
            "-y/2*P*E + 4*beta*P*u[x,x]*(u/2 + x*u[x]/2 + y*u[y]/2 + 3*t*u[t]/2)",
            "For Gamma_7a, the nonzero conserved vectors are",
        ),
    ]
}

/// Replaces the multiplier `phi(t,x,y,u)` and its derivatives by an explicit expression
/// (default: the constant `A5`).
pub fn bind_phi(f: &ConservationFluxes, phi: &Expr) -> ConservationFluxes {
    let table = flux_table();
    let sub = |e: &Expr| {
        e.map_atoms(&mut |a| match a {
            Atom::Func { name, index, .. } if name.as_str() == "phi" => Some(index.iter().fold(phi.clone(), |acc, v| {
                let x = if table.is_dep(v.as_str()) { Atom::jet(v.as_str(), &[]) } else { Atom::Base(v.clone()) };
                acc.partial_derivative(&x)
            })),
            _ => None,
        })
    };
    ConservationFluxes {
        generator: f.generator.clone(),
        phi: phi.clone(),
        ct: sub(&f.ct),
        cx: sub(&f.cx),
        cy: sub(&f.cy),
    }
}

/// `phi(t,x,y,u)` as an opaque function atom.
pub fn phi_opaque() -> Expr {
    flux_expr("P")
}

/// `phi(t,y)` as an opaque function atom.
pub fn phi_ty() -> Expr {
    parse("phi(t,y)", &SymbolTable::bk().func("phi", &["t", "y"])).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equation_has_six_terms() {
        let e = bk_equation(&Params::symbolic()).expr.canonicalize().unwrap();
        assert_eq!(e.numerator().len(), 6);
        let p = Params::parse("alpha=1,beta=1").unwrap();
        let e1 = bk_equation(&p).expr;
        assert_eq!(
            e1,
            bk("u[x,t]+u[x,x,x,x]+u[x,x,x,y]+6*u[x,x]*u[x]+4*u[x,y]*u[x]+4*u[x,x]*u[y]")
        );
    }

    #[test]
    fn adjoint_coefficients() {
        let eq = bk_equation(&Params::symbolic());
        let adj = adjoint_equation(&eq).adjoint;
        assert!(adj.partial(&v_atom(&["x", "t"])).is_one());
        assert_eq!(
            Expr::from_ratfn(&adj.partial(&v_atom(&["x", "x", "x", "x"]))),
            bk("alpha")
        );
        for a in adj.atoms() {
            if a.is_jet_of(&Symbol::new("v")) {
                assert!(adj.partial(&a).partial(&a).is_zero());
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&JetIndex::parse_list(&["x", "x", "y"])), 3);
        assert_eq!(multinomial(&JetIndex::parse_list(&["x", "t"])), 2);
        assert_eq!(multinomial(&JetIndex::parse_list(&["x", "x"])), 1);
    }
}
