use super::*;
use crate::bkmodel::{catalog_symmetries, BK_TEXT};
use crate::symkernel::poly::qr;

const EQ_3_2: &str = "(alpha+beta)*w[s,s,s,s] + 8*beta*w[s]*w[s,s] + 6*alpha*w[s]*w[s,s] - c*w[s,s]";
const EQ_3_4: &str =
    "v[r,r,r] - (10*v[r]*v[r,r]/v - 15*v[r]^3/v^2 + (c*v^2/(alpha+beta) - 14*v/(alpha+beta))*v[r])";
const EQ_3_7: &str = "g[h,h] - (3*g[h]^2/g + 10*g[h]/h + (14*h - h^2*c)*g^3/(alpha+beta) + 15*g/h^2)";
const EQ_3_9: &str = "m[n,n,n] - m[n]*(-14*m/(alpha+beta) + c/(alpha+beta))";
const EQ_3_11: &str = "p[j,j] - (3*p[j]^2/p - (c - 14*j)*p^3/(alpha+beta))";
const EQ_3_12: &str = "k[l,l] - (3*k[l]^2/k + 9*k*k[l] + (26*alpha + 26*beta + 14*l)*k^3/(alpha+beta) - (24*alpha*l + 24*beta*l + 28*l^2)*k^4/(alpha+beta))";
const EQ_3_14: &str = "d*beta*p[d,d,d,d] - 3*e*beta*p[d,d,d,e] - alpha*p[d,d,d,d] + 4*beta*p[d,d,d] + c4^2*p[d,e] + 4*beta*p*p[d,d] - 12*e*beta*p[e]*p[d,d] - 2*p[d]*(6*e*beta*p[d,e] + (3*alpha - 4*d*beta)*p[d,d]) + 8*beta*p[d]^2";
const EQ_3_16: &str = "r*beta^3*v*v[r] - r*beta*v[r] - beta*v + beta^3*v^2/3";
const EQ_3_18: &str = "alpha*p[d,d,d,d] + 6*alpha*p[d]*p[d,d] + p[d]/e + p[d,e] + d*p[d,d]/e";
const EQ_3_20: &str = "9*r*alpha*(3*r*v[r,r,r,r] + 8*v[r,r,r] - 54*r^2*alpha*v[r,r]) + r*(v[r]*(r - 24*alpha + 162*r^2*alpha*v[r,r])) + 3*r*(2*(r + 12*alpha)*v[r,r] - 12*alpha*v^2) + v*(r + 24*alpha + 36*r*alpha*v[r])";
const EQ_3_21: &str = "m[n,n,n] - (-4*m[n,n]/n - (2*m/n^(2/3) + (6*n^(8/3) + 180*n^(5/3)*alpha)/(n^(11/3)*alpha))*m[n] - 4*m^2/(3*n^(5/3)) - 5*m/(81*n^2*alpha))";
const EQ_3_22: &str = "alpha*v[r,r,r,r] + 6*alpha*v[r]*v[r,r]";
const EQ_3_24: &str = "m[n,n,n] - (-6*m[n]*m + 10*m[n]*m[n,n]/m - 15*m[n]^3/m^2)";
const EQ_3_25: &str = "b[a,a] + 3*b[a]^2/b + 10*b[a]/a + 15*b/a^2";
const EQ_POST_3_25: &str = "b[a,a] - (3*b[a]^2/b + (10/a - 11*b)*b[a] + 15*b/a^2 - 40*b^2/a + (6*a^3 + 46*a^2)*b^3/a^2 - (12*a^4 + 24*a^3)*b^4/a^2)";
const EQ_3_27: &str = "m[n,n,n] + 6*m[n]*m";
const EQ_3_28: &str = "b + 3*b[a]^2/b";

/// Printed equations by label, with their independent variables and dependent variable.
pub fn printed_equation(label: &str) -> Option<(&'static str, &'static [&'static str], &'static str)> {
    Some(match label {
        "1.2" => (BK_TEXT, &["t", "x", "y"], "u"),
        "3.2" => (EQ_3_2, &["s"], "w"),
        "3.4" => (EQ_3_4, &["r"], "v"),
        "3.7" => (EQ_3_7, &["h"], "g"),
        "3.9" => (EQ_3_9, &["n"], "m"),
        "3.11" => (EQ_3_11, &["j"], "p"),
        "3.12" => (EQ_3_12, &["l"], "k"),
        "3.14" => (EQ_3_14, &["d", "e"], "p"),
        "3.16" => (EQ_3_16, &["r"], "v"),
        "3.18" => (EQ_3_18, &["d", "e"], "p"),
        "3.20" => (EQ_3_20, &["r"], "v"),
        "3.21" => (EQ_3_21, &["n"], "m"),
        "3.22" => (EQ_3_22, &["r"], "v"),
        "3.24" => (EQ_3_24, &["n"], "m"),
        "3.25" => (EQ_3_25, &["a"], "b"),
        "post-3.25" => (EQ_POST_3_25, &["a"], "b"),
        "3.27" => (EQ_3_27, &["n"], "m"),
        "3.28" => (EQ_3_28, &["a"], "b"),
        _ => return None,
    })
}

pub fn equation_table(bases: &[&str], dep: &str) -> SymbolTable {
    let mut t = params(SymbolTable::new()).dep(dep);
    for b in bases {
        t = t.base(b);
    }
    if bases == ["t", "x", "y"] {
        t = t.func("a", &["t"]).func("b", &["t"]);
    }
    t
}

pub fn parse_printed(label: &str) -> Result<Expr, KernelError> {
    let (text, bases, dep) = printed_equation(label).ok_or_else(|| KernelError::Unsupported(format!("unknown equation {label}")))?;
    parse(text, &equation_table(bases, dep))
}

fn field(text: &str, bases: &[&str], dep: &str) -> VectorField {
    VectorField::parse(text, &equation_table(bases, dep), bases, dep).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn jet1(
    old: (&str, &str),
    new: (&str, &str),
    r: &str,
    v: &str,
    leftover: &str,
    inverse: [&str; 3],
) -> ChangeOfVariables {
    ChangeOfVariables::Jet1(
        Jet1Change::parse(old.0, old.1, new.0, new.1, r, v, leftover, inverse).unwrap_or_else(|e| panic!("{r}, {v}: {e}")),
    )
}

fn reading(label: &str, change: ChangeOfVariables, claimed: &str) -> Reading {
    Reading {
        label: label.into(),
        change,
        claimed: claimed.into(),
    }
}

#[allow(clippy::too_many_arguments)]
fn record(
    name: &str,
    anchor: &str,
    source: SourceEquation,
    source_leading: Option<Atom>,
    generators: Vec<VectorField>,
    readings: Vec<Reading>,
    target_leading: Option<Atom>,
    notes: &[&str],
) -> ReductionRecord {
    ReductionRecord {
        name: name.into(),
        anchor: anchor.into(),
        source,
        source_leading,
        generators,
        readings,
        target_leading,
        notes: notes.iter().map(|s| s.to_string()).collect(),
    }
}

fn printed(label: &str) -> SourceEquation {
    SourceEquation::Printed(printed_equation(label).unwrap().0.into())
}

fn bk_field(name: &str) -> VectorField {
    catalog_symmetries().into_iter().find(|s| s.name == name).unwrap().field
}

pub fn catalog_reductions() -> Vec<ReductionRecord> {
    let kappa = "c/(6*alpha+8*beta)";
    let mut g2a_g3a = bk_field("G2a").add(&bk_field("G3a").scale(&qr(-1, 2)));
    g2a_g3a.eta = g2a_g3a.eta.normalize().unwrap();
    let u_shift = "(x*y - 3*alpha*y^2/(4*beta))/(4*t*beta)";
    let g = |t: &str, b: &[&str], d: &str| field(t, b, d);
    vec![
        record(
            "1.2->3.2",
            "reduced to the ordinary differential equation",
            printed("1.2"),
            Some(Atom::jet("u", &["x", "t"])),
            vec![g("xi_t = 1; xi_x = c", &["t", "x", "y"], "u"), g("xi_x = 1; xi_y = -1", &["t", "x", "y"], "u")],
            vec![reading(
                "printed",
                ChangeOfVariables::Point(
                    PointChange::parse(&["t", "x", "y"], "u", &[("s", "x + y - c*t")], "w", "u", "w", &[("x", "s - y + c*t")]).unwrap(),
                ),
                EQ_3_2,
            )],
            None,
            &["the two generators d_t + c d_x and d_x - d_y annihilate s = x + y - ct"],
        ),
        record(
            "3.2->3.4",
            "to one of third order",
            printed("3.2"),
            None,
            vec![g("xi_s = 1", &["s"], "w")],
            vec![reading("printed", jet1(("s", "w"), ("r", "v"), "w", "1/w[s]", "s", ["s", "r", "1/v"]), EQ_3_4)],
            None,
            &[],
        ),
        record(
            "3.4->3.7",
            "maximally symmetric and is easily integrated",
            printed("3.4"),
            None,
            vec![g("xi_r = 1", &["r"], "v")],
            vec![reading("printed", jet1(("r", "v"), ("h", "g"), "v", "1/v[r]", "r", ["r", "h", "1/g"]), EQ_3_7)],
            None,
            &["source is the printed third-order equation"],
        ),
        record(
            "3.2->3.9",
            "The reduced third-order equation is",
            printed("3.2"),
            None,
            vec![g("eta = 1", &["s"], "w")],
            vec![reading("printed", jet1(("s", "w"), ("n", "m"), "s", "w[s]", "w", ["n", "w", "m"]), EQ_3_9)],
            None,
            &[],
        ),
        record(
            "3.9->3.11",
            "which is also maximally symmetric",
            printed("3.9"),
            None,
            vec![g("xi_n = 1", &["n"], "m")],
            vec![reading("printed", jet1(("n", "m"), ("j", "p"), "m", "1/m[n]", "n", ["n", "j", "1/p"]), EQ_3_11)],
            None,
            &["q in the printed target is read as the new independent j"],
        ),
        record(
            "3.9->3.12",
            "second-order equation with no point symmetries",
            printed("3.9"),
            None,
            vec![g("xi_n = n; eta = c/7 - 2*m", &["n"], "m")],
            vec![
                reading(
                    "k = 7/(n^2 (7 n m' - c + 14 m))",
                    jet1(
                        ("n", "m"),
                        ("l", "k"),
                        "(14*m - c)*n^2/14",
                        "7/(n^2*(7*n*m[n] - c + 14*m))",
                        "n",
                        ["n", "l/n^2 + c/14", "(1/k - 2*l)/n^3"],
                    ),
                    EQ_3_12,
                ),
                reading(
                    "k = 7/(7 n^3 m' - c + 14 m)",
                    jet1(
                        ("n", "m"),
                        ("l", "k"),
                        "(14*m - c)*n^2/14",
                        "7/(7*n^3*m[n] - c + 14*m)",
                        "n",
                        ["n", "l/n^2 + c/14", "(1/k - 2*l/n^2)/n^3"],
                    ),
                    EQ_3_12,
                ),
            ],
            None,
            &["the grouping of the printed k(l) is ambiguous; both readings are tried"],
        ),
        record(
            "3.2->G3b",
            "leads to a third-order equation with zero point symmetries",
            printed("3.2"),
            None,
            vec![
                g("xi_s = 1; eta = c*s/7 - w", &["s"], "w"),
                g("xi_s = s; eta = c*s/(3*alpha+4*beta) - w", &["s"], "w"),
            ],
            vec![reading(
                "invariants of s d_s + (cs/(3 alpha + 4 beta) - w) d_w",
                jet1(
                    ("s", "w"),
                    ("r", "q"),
                    &format!("s*(w - {kappa}*s)"),
                    &format!("s^2*(w[s] - {kappa})"),
                    "s",
                    ["s", &format!("r/s + {kappa}*s"), &format!("q/s^2 + {kappa}")],
                ),
                "",
            )],
            None,
            &[
                "the printed generator is not a symmetry of the source; the reduction uses the corrected scaling generator",
                "no target is printed; the zero-symmetry claim is tested by a bounded ansatz solve",
            ],
        ),
        record(
            "1.2->3.14",
            "The reduced PDE is",
            printed("1.2"),
            Some(Atom::jet("u", &["x", "t"])),
            vec![g2a_g3a],
            vec![reading(
                "printed",
                ChangeOfVariables::Point(
                    PointChange::parse(
                        &["t", "x", "y"],
                        "u",
                        &[("d", "x/y"), ("e", "y^3/t")],
                        "p",
                        "y*u",
                        "p/y",
                        &[("x", "d*y"), ("t", "y^3/e")],
                    )
                    .unwrap(),
                ),
                EQ_3_14,
            )],
            Some(Atom::jet("p", &["d", "d", "d", "e"])),
            &["the printed target contains the token c4^2"],
        ),
        record(
            "3.14->3.16",
            "Reduction with respect to Gamma_2d",
            SourceEquation::Computed("1.2->3.14".into()),
            Some(Atom::jet("p", &["d", "d", "d", "e"])),
            vec![g("xi_d = e^(-1/3); eta = e^(2/3)/(12*beta)", &["d", "e"], "p")],
            vec![
                reading(
                    "v = 12 beta p/(e d)",
                    ChangeOfVariables::Point(
                        PointChange::parse(&["d", "e"], "p", &[("r", "e")], "v", "12*beta*p/(e*d)", "e*d*v/(12*beta)", &[("e", "r")])
                            .unwrap(),
                    ),
                    EQ_3_16,
                ),
                reading(
                    "p = e d/(12 beta) + v (invariants of Gamma_2d)",
                    ChangeOfVariables::Point(
                        PointChange::parse(&["d", "e"], "p", &[("r", "e")], "v", "p - e*d/(12*beta)", "v + e*d/(12*beta)", &[("e", "r")])
                            .unwrap(),
                    ),
                    EQ_3_16,
                ),
            ],
            None,
            &["source is the computed reduced PDE because the printed one does not parse"],
        ),
        record(
            "1.2->3.18",
            "leads to the PDE",
            printed("1.2"),
            Some(Atom::jet("u", &["x", "t"])),
            vec![bk_field("G4a")],
            vec![reading(
                "printed",
                ChangeOfVariables::Point(
                    PointChange::parse(
                        &["t", "x", "y"],
                        "u",
                        &[("d", "x"), ("e", "t")],
                        "p",
                        &format!("u - {u_shift}"),
                        &format!("p + {u_shift}"),
                        &[("x", "d"), ("t", "e")],
                    )
                    .unwrap(),
                ),
                EQ_3_18,
            )],
            Some(Atom::jet("p", &["d", "e"])),
            &[],
        ),
        record(
            "3.18->3.20",
            "leads to the fourth-order ode",
            printed("3.18"),
            Some(Atom::jet("p", &["d", "e"])),
            vec![g("xi_d = d/3; xi_e = e; eta = -p/3", &["d", "e"], "p")],
            vec![reading(
                "printed",
                ChangeOfVariables::Point(
                    PointChange::parse(&["d", "e"], "p", &[("r", "d^3/e")], "v", "d*p", "v/d", &[("e", "d^3/r")]).unwrap(),
                ),
                EQ_3_20,
            )],
            None,
            &[],
        ),
        record(
            "3.20->3.21",
            "with zero Lie point symmetry",
            SourceEquation::Computed("3.18->3.20".into()),
            None,
            vec![g("eta = r^(1/3)", &["r"], "v")],
            vec![reading(
                "invariants of r^(1/3) d_v",
                jet1(
                    ("r", "v"),
                    ("n", "m"),
                    "r",
                    "r^(-1/3)*v[r] - v*r^(-4/3)/3",
                    "v",
                    ["n", "v", "n^(1/3)*m + v/(3*n)"],
                ),
                EQ_3_21,
            )],
            None,
            &[
                "the printed fourth-order equation does not admit r^(1/3) d_v; the computed one does",
                "the change of variables is not printed; it is built from the invariants of the stated symmetry",
            ],
        ),
        record(
            "3.18->3.22",
            "the reduced ODE is",
            printed("3.18"),
            Some(Atom::jet("p", &["d", "e"])),
            vec![g("xi_e = 1; eta = d^2/(12*e^2*alpha)", &["d", "e"], "p")],
            vec![reading(
                "printed",
                ChangeOfVariables::Point(
                    PointChange::parse(
                        &["d", "e"],
                        "p",
                        &[("r", "d")],
                        "v",
                        "p + d^2/(12*e*alpha)",
                        "v - d^2/(12*e*alpha)",
                        &[("d", "r")],
                    )
                    .unwrap(),
                ),
                EQ_3_22,
            )],
            None,
            &[],
        ),
        record(
            "3.22->3.24",
            "third-order equation with two symmetries",
            printed("3.22"),
            None,
            vec![g("xi_r = 1", &["r"], "v")],
            vec![reading("m = 1/v'", jet1(("r", "v"), ("n", "m"), "v", "1/v[r]", "r", ["r", "n", "1/m"]), EQ_3_24)],
            None,
            &["the printed change m = 1/v(r) is read as m = 1/v'(r)"],
        ),
        record(
            "3.24->3.25",
            "maximally symmetric second-order equation",
            printed("3.24"),
            None,
            vec![g("xi_n = 1", &["n"], "m")],
            vec![reading("printed", jet1(("n", "m"), ("a", "b"), "m", "1/m[n]", "n", ["n", "a", "1/b"]), EQ_3_25)],
            None,
            &[],
        ),
        record(
            "3.24->post-3.25",
            "reduced to a second-order equation with no Lie point symmetries",
            printed("3.24"),
            None,
            vec![g("xi_n = n; eta = -2*m", &["n"], "m")],
            vec![reading(
                "invariants of n d_n - 2m d_m",
                jet1(
                    ("n", "m"),
                    ("a", "b"),
                    "n^2*m",
                    "1/(n^3*m[n] + 2*n^2*m)",
                    "n",
                    ["n", "a/n^2", "(1/b - 2*a)/n^3"],
                ),
                EQ_POST_3_25,
            )],
            None,
            &["the change of variables is not printed; it is built from the invariants of the stated symmetry"],
        ),
        record(
            "3.22->3.27",
            "leads to the equation",
            printed("3.22"),
            None,
            vec![g("eta = 1", &["r"], "v")],
            vec![reading("printed", jet1(("r", "v"), ("n", "m"), "r", "v[r]", "v", ["n", "v", "m"]), EQ_3_27)],
            None,
            &[],
        ),
        record(
            "3.27->3.28",
            "which is linearisable",
            printed("3.27"),
            None,
            vec![g("xi_n = 1", &["n"], "m")],
            vec![reading("printed", jet1(("n", "m"), ("a", "b"), "m", "1/m[n]", "n", ["n", "a", "1/b"]), EQ_3_28)],
            None,
            &["the printed target has no second derivative"],
        ),
    ]
}

/// Generators claimed for one reduced equation.
#[derive(Clone, Debug)]
pub struct OdeSymmetryClaim {
    pub name: String,
    pub equation: Expr,
    pub equation_label: String,
    pub leading: Option<Atom>,
    pub bases: Vec<String>,
    pub dep: String,
    pub generators: Vec<(String, VectorField)>,
    pub statement: String,
}

impl OdeSymmetryClaim {
    pub fn shell(&self) -> Result<OnShell, ReduceError> {
        let e = self.equation.canonicalize()?;
        let lead = match &self.leading {
            Some(a) => a.clone(),
            None => highest_jet(&e, &Symbol::new(&self.dep)).ok_or_else(|| KernelError::Unsupported("no jets".into()))?,
        };
        Ok(OnShell::new(e, lead, DEFAULT_DERIVATIVE_CAP)?)
    }
}

pub fn ode_symmetry_claims() -> Vec<OdeSymmetryClaim> {
    let catalog = catalog_reductions();
    let computed_3_14 = catalog
        .iter()
        .find(|r| r.name == "3.14->3.16")
        .unwrap()
        .source_expr(&catalog)
        .expect("the BK pullback to 3.14 succeeds");
    let computed_3_20 = catalog
        .iter()
        .find(|r| r.name == "3.20->3.21")
        .unwrap()
        .source_expr(&catalog)
        .expect("the pullback to 3.20 succeeds");
    let claim = |name: &str, label: &str, eq: Expr, leading: Option<Atom>, bases: &[&str], dep: &str, gens: &[(&str, &str)], statement: &str| {
        OdeSymmetryClaim {
            name: name.into(),
            equation: eq,
            equation_label: label.into(),
            leading,
            bases: bases.iter().map(|s| s.to_string()).collect(),
            dep: dep.into(),
            generators: gens.iter().map(|(n, t)| (n.to_string(), field(t, bases, dep))).collect(),
            statement: statement.into(),
        }
    };
    let p = |l: &str| parse_printed(l).unwrap();
    vec![
        claim(
            "3.3",
            "3.2",
            p("3.2"),
            None,
            &["s"],
            "w",
            &[("G1b", "xi_s = 1"), ("G2b", "eta = 1"), ("G3b", "xi_s = 1; eta = c*s/7 - w")],
            "The Lie point symmetries of this equation are",
        ),
        claim(
            "3.10",
            "3.9",
            p("3.9"),
            None,
            &["n"],
            "m",
            &[("G1c", "xi_n = 1"), ("G2c", "xi_n = n; eta = c/7 - 2*m")],
            "This equation has two symmetries which are",
        ),
        claim(
            "3.15",
            "3.14 (computed)",
            computed_3_14,
            Some(Atom::jet("p", &["d", "d", "d", "e"])),
            &["d", "e"],
            "p",
            &[("G1d", "eta = e^(1/3)"), ("G2d", "xi_d = e^(-1/3); eta = e^(2/3)/(12*beta)")],
            "The Lie point symmetries are",
        ),
        claim(
            "3.19",
            "3.18",
            p("3.18"),
            Some(Atom::jet("p", &["d", "e"])),
            &["d", "e"],
            "p",
            &[
                ("G1e", "xi_d = d/3; xi_e = e; eta = -p/3"),
                ("G2e", "xi_e = 1; eta = d^2/(12*e^2*alpha)"),
                ("G3e", "xi_e = 4*e^(3/2)/3; eta = -2*e^(1/2)*p/3"),
                ("G4e", "xi_d = -6*alpha; eta = d/e"),
                ("G5e", "xi_d = e"),
            ],
            "The Lie point symmetries for the latter equation (3.18) are determined to be",
        ),
        claim(
            "3.20",
            "3.20",
            p("3.20"),
            None,
            &["r"],
            "v",
            &[("r^(1/3) d_v", "eta = r^(1/3)")],
            "The sole Lie point symmetry is",
        ),
        claim(
            "3.20",
            "3.20 (computed)",
            computed_3_20,
            None,
            &["r"],
            "v",
            &[("r^(1/3) d_v", "eta = r^(1/3)")],
            "The sole Lie point symmetry is",
        ),
        claim(
            "3.23",
            "3.22",
            p("3.22"),
            None,
            &["r"],
            "v",
            &[("G1f", "xi_r = 1"), ("G2f", "eta = 1"), ("G3f", "xi_r = r; eta = -v")],
            "The Lie point symmetries are",
        ),
        claim(
            "3.24",
            "3.24",
            p("3.24"),
            None,
            &["n"],
            "m",
            &[("d_n", "xi_n = 1"), ("n d_n - 2m d_m", "xi_n = n; eta = -2*m")],
            "the two symmetries are",
        ),
        claim(
            "3.27",
            "3.27",
            p("3.27"),
            None,
            &["n"],
            "m",
            &[("d_n", "xi_n = 1"), ("n d_n - 2m d_m", "xi_n = n; eta = -2*m")],
            "The symmetries are",
        ),
    ]
}
