use bk_core::bkmodel::Params;
use bk_core::numerix::*;
use bk_core::symkernel::bk;
use proptest::prelude::*;

fn unit() -> Params {
    Params::parse("alpha=1,beta=1,c=1").unwrap()
}

#[test]
fn soliton_constants_match_oracle() {
    let w = soliton(1.0f64, 1.0, 1.0).unwrap();
    assert!((w.amplitude - 3.0 / 14.0).abs() < 1e-16);
    assert!((w.width - 0.353_553_390_593_273_8).abs() < 1e-16);
    let w = soliton(2.0f64, 0.5, 3.0).unwrap();
    assert!((w.amplitude - 0.5625).abs() < 1e-16);
    assert!((w.width - 0.547_722_557_505_166_1).abs() < 1e-15);
    assert!((w.profile(0, 0.0) - w.amplitude).abs() < 1e-15, "{}", w.profile(0, 0.0));
}

#[test]
fn soliton_domain() {
    assert!(soliton(1.0f64, -0.75, 1.0).is_err());
    assert!(soliton(1.0f64, 1.0, -1.0).is_err());
}

#[test]
fn soliton_solves_the_pde() {
    let lift = SolitonLift::new(soliton(1.0, 1.0, 1.0).unwrap());
    let r = pde_residual(&lift, &sample_points::<f64>(500, 7, 1.0, 10.0)).unwrap();
    assert!(r.max < 1e-12, "{}", r.max);
}

#[test]
fn single_precision() {
    let lift = SolitonLift::new(soliton(1.0f32, 1.0, 1.0).unwrap());
    let r = pde_residual(&lift, &sample_points::<f32>(200, 7, 1.0, 10.0)).unwrap();
    assert!(r.max < 1e-4, "{}", r.max);
}

#[test]
fn trivial_solutions() {
    for u in ["0", "x", "t + y"] {
        let l = PolynomialLift { u: bk(u).canonicalize().unwrap(), alpha: 1.0, beta: 1.0 };
        assert_eq!(pde_residual(&l, &sample_points::<f64>(20, 3, 1.0, 10.0)).unwrap().max, 0.0, "{u}");
    }
    let l = PolynomialLift { u: bk("x^2*y").canonicalize().unwrap(), alpha: 1.0, beta: 1.0 };
    assert!(pde_residual(&l, &sample_points::<f64>(20, 3, 1.0, 10.0)).unwrap().max > 1.0);
}

#[test]
fn reduced_equations_track_the_wave() {
    let p = unit();
    let w = soliton(1.0, 1.0, 1.0).unwrap();
    for (label, bound) in [("3.2", 1e-6), ("3.9", 1e-6), ("3.22", 1e-6), ("3.27", 1e-7), ("first-integral", 1e-6)] {
        let prob = ode_problem(label, &p, 0.0).unwrap().with_initial(-10.0, wave_state(label, &w, -10.0).unwrap()).unwrap();
        let sol = integrate_ode::<f64>(&prob, 10.0, 1e-10).unwrap();
        let err = wave_error(label, &w, &sol).unwrap();
        assert!(err < bound, "{label}: {err}");
    }
}

#[test]
fn fourth_order_convergence() {
    let c = convergence_study("3.27", &unit(), -10.0, 10.0, 100, 5).unwrap();
    for r in &c.ratios[2..] {
        assert!((12.0..20.0).contains(r), "{:?}", c.ratios);
    }
}

#[test]
fn singular_span_is_rejected() {
    let mut p = ode_problem("3.27", &unit(), 0.0).unwrap();
    p.excluded.push(1.0);
    assert!(matches!(integrate_ode::<f64>(&p, 2.0, 1e-10), Err(NumerixError::Domain(_))));
    assert!(matches!(ode_problem("3.21", &unit(), 0.0), Err(NumerixError::UnknownProblem(_))));
}

#[test]
fn numeric_lift_solves_the_pde() {
    let p = unit();
    let w = soliton(1.0, 1.0, 1.0).unwrap();
    let prob = ode_problem("first-integral", &p, 0.0).unwrap().with_initial(-12.0, wave_state("first-integral", &w, -12.0).unwrap()).unwrap();
    let sol = integrate_ode::<f64>(&prob, 12.0, 1e-10).unwrap();
    let nl = NumericLift::new(&sol, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    let r = pde_residual(&nl, &sample_points::<f64>(300, 7, 1.0, 10.0)).unwrap();
    assert!(r.max < 1e-6, "{}", r.max);
    let mut m: f64 = 0.0;
    for s in sol.grid.iter().skip(1).take(sol.grid.len() - 2) {
        m = m.max((nl.value(0, *s).unwrap() - w.w(0, *s)).abs());
    }
    assert!(m < 5e-6, "{m}");
    let far = nl.value(0, 20.0);
    assert!(far.is_err(), "{far:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn soliton_family(alpha in 0.2f64..3.0, beta in 0.2f64..3.0, c in 0.2f64..3.0) {
        let w = soliton(alpha, beta, c).unwrap();
        for i in 0..50 {
            prop_assert!(w.first_integral_residual(-10.0 + 0.4 * i as f64).abs() < 1e-12);
        }
        let r = pde_residual(&SolitonLift::new(w), &sample_points::<f64>(50, 1, c, 10.0)).unwrap();
        prop_assert!(r.max < 1e-10, "{}", r.max);
    }

    #[test]
    fn translations_and_shifts(shift in -5.0f64..5.0, offset in -5.0f64..5.0, seed in 0u64..100) {
        let lift = SolitonLift::new(soliton(1.0, 1.0, 1.0).unwrap());
        let mut moved = lift;
        moved.shift = shift;
        moved.offset = offset;
        let pts = sample_points::<f64>(40, seed, 1.0, 10.0);
        prop_assert!(pde_residual(&moved, &pts).unwrap().max < 1e-12);
        let base: [f64; 3] = pts[0];
        let back = [base[0], base[1] - shift, base[2]];
        let idx = bk_core::symkernel::JetIndex::parse_list(&["x", "y"]);
        prop_assert!((lift.jet(&idx, base).unwrap() - moved.jet(&idx, back).unwrap()).abs() < 1e-14);
    }
}
