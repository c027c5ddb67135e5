use bk_core::bkmodel::*;
use bk_core::numerix::{numeric_divergence, sample_points, soliton, SolitonLift};
use bk_core::prolong::VectorField;
use bk_core::symkernel::{bk, emit, Atom, Expr, Symbol, DEFAULT_DERIVATIVE_CAP, Q};
use proptest::prelude::*;

fn eq() -> BkEquation {
    bk_equation(&Params::symbolic())
}

fn generators() -> Vec<CatalogSymmetry> {
    let aux = auxiliary_symmetries();
    catalog_symmetries()
        .into_iter()
        .map(|s| match aux.iter().find(|a| a.name == format!("{}(generic)", s.name)) {
            Some(a) => CatalogSymmetry { field: a.field.clone(), ..s },
            None => s,
        })
        .filter(|s| !matches!(s.name.as_str(), "G2a" | "G3a"))
        .collect()
}

fn extra(a: &Atom, p: [f64; 3]) -> Option<f64> {
    let t = p[0];
    match a {
        Atom::Param(n) if n.as_str() == "A5" => Some(1.0),
        Atom::Func { name, index, .. } => Some(match (name.as_str(), index.order()) {
            ("a", 0) => t * t,
            ("a", 1) => 2.0 * t,
            ("a", 2) => 2.0,
            ("b", 0) => t * t * t,
            ("b", 1) => 3.0 * t * t,
            ("b", 2) => 6.0 * t,
            ("b", 3) => 6.0,
            _ => 0.0,
        }),
        _ => None,
    }
}

#[test]
fn adjoint_matches_oracle() {
    let d = adjoint_diff(&eq());
    assert_eq!(
        d.computed,
        "v[t,x] + alpha*v[x,x,x,x] + beta*v[x,x,x,y] + 6*alpha*u[x]*v[x,x] + 6*alpha*u[x,x]*v[x] \
         + 4*beta*u[x]*v[x,y] + 8*beta*u[x,y]*v[x] + 4*beta*u[y]*v[x,x]"
    );
    assert_eq!(d.difference, "-4*beta*u[y,y] + 4*beta*u[x,y]*v[x]");
    assert!(d.only_typos);
}

#[test]
fn self_adjointness() {
    let e = eq();
    for phi in [phi_constant(), phi_ty(), bk("t^2 + y")] {
        let r = self_adjointness_check(&e, &phi).unwrap();
        assert!(r.holds(), "{}", emit(&phi));
        assert!(r.lambda.unwrap().is_zero());
    }
    let u = self_adjointness_check(&e, &bk("u[]")).unwrap();
    assert!(!u.holds());
    assert!(!self_adjointness_check(&e, &phi_opaque()).unwrap().holds());
}

#[test]
fn constructed_fluxes_are_conserved() {
    let e = eq();
    for s in generators() {
        for phi in [phi_constant(), bk("t^2 + y")] {
            let f = ibragimov_fluxes(&e, &s.field, &phi).unwrap();
            assert!(verify_conservation(&e, &f).unwrap().pass, "{} {}", s.name, emit(&phi));
        }
    }
}

#[test]
fn printed_fluxes_fail() {
    let e = eq();
    for f in catalog_fluxes() {
        let b = bind_phi(&f.fluxes, &phi_constant());
        assert!(!verify_conservation(&e, &b).unwrap().pass, "{}", f.name);
    }
}

#[test]
fn printed_fluxes_fail_numerically() {
    let lift = SolitonLift::new(soliton(1.0, 1.0, 1.0).unwrap());
    let pts = sample_points::<f64>(200, 7, 1.0, 10.0);
    for f in catalog_fluxes() {
        let d = numeric_divergence(&bind_phi(&f.fluxes, &phi_constant()), &lift, &pts, &extra).unwrap();
        assert!(d.max > 1e-2, "{} {}", f.name, d.max);
    }
}

#[test]
fn constructed_fluxes_vanish_on_the_soliton() {
    let e = eq();
    let lift = SolitonLift::new(soliton(1.0, 1.0, 1.0).unwrap());
    let pts = sample_points::<f64>(200, 7, 1.0, 10.0);
    for s in generators() {
        let f = ibragimov_fluxes(&e, &s.field, &bk("t^2 + y")).unwrap();
        let d = numeric_divergence(&f, &lift, &pts, &extra).unwrap();
        assert!(d.max < 1e-8, "{} {}", s.name, d.max);
    }
}

#[test]
fn off_shell_terms_are_detected() {
    let e = eq();
    let mut f = ibragimov_fluxes(&e, &VectorField::bk().with_xi("x", Expr::one()), &phi_constant()).unwrap();
    f.cy = f.cy.add(&bk("u[x]"));
    assert!(!verify_conservation(&e, &f).unwrap().pass);
}

#[test]
fn bind_phi_differentiates() {
    let phi = phi_opaque();
    let f = ConservationFluxes {
        generator: None,
        phi: phi.clone(),
        ct: phi.add(&phi.total_derivative(&Symbol::new("t"), DEFAULT_DERIVATIVE_CAP).unwrap()),
        cx: phi.total_derivative(&Symbol::new("y"), DEFAULT_DERIVATIVE_CAP).unwrap(),
        cy: Expr::zero(),
    };
    let b = bind_phi(&f, &bk("t^2 + y"));
    assert!(b.ct.sub(&bk("t^2 + y + 2*t")).is_zero().unwrap(), "{}", emit(&b.ct));
    assert!(b.cx.sub(&Expr::one()).is_zero().unwrap(), "{}", emit(&b.cx));
}

fn same(a: &ConservationFluxes, b: &ConservationFluxes) -> bool {
    a.components().iter().zip(b.components()).all(|(x, y)| x.sub(y).is_zero().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fluxes_are_bilinear(i in 0usize..7, j in 0usize..7, a in -3i64..=3, b in 1i64..=3) {
        let e = eq();
        let gens = generators();
        let (v, w) = (&gens[i % gens.len()].field, &gens[j % gens.len()].field);
        let k = Q::new(a.into(), b.into());
        let phi = phi_constant();
        let lhs = ibragimov_fluxes(&e, &v.scale(&k).add(w), &phi).unwrap();
        let fv = ibragimov_fluxes(&e, v, &phi).unwrap();
        let fw = ibragimov_fluxes(&e, w, &phi).unwrap();
        let rhs = ConservationFluxes {
            generator: None,
            phi: phi.clone(),
            ct: fv.ct.scale(&k).add(&fw.ct),
            cx: fv.cx.scale(&k).add(&fw.cx),
            cy: fv.cy.scale(&k).add(&fw.cy),
        };
        prop_assert!(same(&lhs, &rhs));
        let phi2 = bk(&format!("{a}*t^2 + {b}*y"));
        let f2 = ibragimov_fluxes(&e, v, &phi2).unwrap();
        let f2a = ibragimov_fluxes(&e, v, &bk("t^2")).unwrap();
        let f2b = ibragimov_fluxes(&e, v, &bk("y")).unwrap();
        let ka = Q::from_integer(a.into());
        let kb = Q::from_integer(b.into());
        let sum = ConservationFluxes {
            generator: None,
            phi: phi2.clone(),
            ct: f2a.ct.scale(&ka).add(&f2b.ct.scale(&kb)),
            cx: f2a.cx.scale(&ka).add(&f2b.cx.scale(&kb)),
            cy: f2a.cy.scale(&ka).add(&f2b.cy.scale(&kb)),
        };
        prop_assert!(same(&f2, &sum));
    }
}
