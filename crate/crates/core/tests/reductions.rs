use std::collections::BTreeMap;

use bk_core::reduce::*;
use bk_core::symkernel::{parse, Atom, Expr, SymbolTable, Q};
use proptest::prelude::*;

fn outcomes() -> Vec<ReductionOutcome> {
    verify_all(&catalog_reductions())
}

#[test]
fn record_statuses() {
    let want = BTreeMap::from([
        ("1.2->3.2", RecordStatus::Verified),
        ("3.2->3.4", RecordStatus::Corrected),
        ("3.4->3.7", RecordStatus::Verified),
        ("3.2->3.9", RecordStatus::Corrected),
        ("3.9->3.11", RecordStatus::Verified),
        ("3.9->3.12", RecordStatus::Verified),
        ("3.2->G3b", RecordStatus::Corrected),
        ("1.2->3.14", RecordStatus::Corrected),
        ("3.14->3.16", RecordStatus::Corrected),
        ("1.2->3.18", RecordStatus::Verified),
        ("3.18->3.20", RecordStatus::Corrected),
        ("3.20->3.21", RecordStatus::Corrected),
        ("3.18->3.22", RecordStatus::Verified),
        ("3.22->3.24", RecordStatus::Verified),
        ("3.24->3.25", RecordStatus::Corrected),
        ("3.24->post-3.25", RecordStatus::Verified),
        ("3.22->3.27", RecordStatus::Verified),
        ("3.27->3.28", RecordStatus::Corrected),
    ]);
    let got = outcomes();
    assert_eq!(got.len(), want.len());
    for o in &got {
        assert_eq!(o.status, want[o.name.as_str()], "{}", o.name);
        assert!(o.computed().is_some(), "{}", o.name);
    }
}

#[test]
fn travelling_wave_coefficient() {
    let got = outcomes();
    let o = got.iter().find(|o| o.name == "3.2->3.4").unwrap();
    let r = &o.readings[0];
    assert_eq!(r.diff.as_deref(), Some("(14*v[]*v[r] - 6*alpha*v[]*v[r] - 8*beta*v[]*v[r])/(alpha + beta)"));
}

#[test]
fn second_reading_of_3_16_has_no_invariant_solutions() {
    let got = outcomes();
    let o = got.iter().find(|o| o.name == "3.14->3.16").unwrap();
    assert_eq!(o.readings.len(), 2);
    assert!(o.readings[1].error.as_deref().unwrap().contains("no invariant solutions"));
}

fn computed(name: &str, base: &str, dep: &str) -> Expr {
    let got = outcomes();
    let o = got.iter().find(|o| o.name == name).unwrap();
    parse(o.computed().unwrap().computed.as_ref().unwrap(), &SymbolTable::ode(base, dep)).unwrap()
}

#[test]
fn linearization_verdicts() {
    for (label, base, dep, want) in [("3.25", "a", "b", true), ("3.12", "l", "k", false), ("post-3.25", "a", "b", false), ("3.7", "h", "g", true), ("3.11", "j", "p", true)] {
        assert_eq!(lie_linearization_test(&parse_printed(label).unwrap(), base, dep).unwrap(), want, "{label}");
    }
    assert!(lie_linearization_test(&parse_printed("3.28").unwrap(), "a", "b").is_err());
    for (name, base, dep, want) in [("3.24->3.25", "a", "b", true), ("3.27->3.28", "a", "b", true), ("3.24->post-3.25", "a", "b", false), ("3.9->3.12", "l", "k", false)] {
        assert_eq!(lie_linearization_test(&computed(name, base, dep), base, dep).unwrap(), want, "{name}");
    }
}

#[test]
fn bounded_search_finds_no_symmetries() {
    for (label, base, dep) in [("3.12", "l", "k"), ("3.21", "n", "m"), ("post-3.25", "a", "b")] {
        let e = parse_printed(label).unwrap();
        let c = bounded_symmetry_search(&shell_on_highest(&e, dep).unwrap(), base, dep, 3).unwrap();
        assert!(c.consistent(), "{label}");
        assert_eq!(c.unknowns, 20);
    }
    for (label, dim) in [("3.27", 2), ("3.22", 3), ("3.9", 2)] {
        let dep = if label == "3.22" { "v" } else { "m" };
        let base = if label == "3.22" { "r" } else { "n" };
        let e = parse_printed(label).unwrap();
        assert_eq!(bounded_symmetry_search(&shell_on_highest(&e, dep).unwrap(), base, dep, 3).unwrap().dimension, dim, "{label}");
    }
}

#[test]
fn ode_symmetry_verdicts() {
    let mut failing = Vec::new();
    for c in ode_symmetry_claims() {
        for v in check_ode_symmetry(&c).unwrap() {
            if !v.verdict.pass {
                failing.push(format!("{}/{}", c.equation_label, v.name));
            }
        }
    }
    failing.sort();
    assert_eq!(failing, ["3.18/G3e", "3.2/G3b", "3.20/r^(1/3) d_v"]);
}

fn affine(e: &Expr, base: &str, dep: &str, k: [i64; 4]) -> Expr {
    let q = |n: i64| Expr::int(n);
    let [a, b, c, d] = k;
    e.map_atoms(&mut |atom| match atom {
        Atom::Base(x) if x.as_str() == base => Some(Expr::atom(atom.clone()).sub(&q(b)).div(&q(a))),
        Atom::Jet { dep: y, index } if y.as_str() == dep => {
            let n = index.order() as i64;
            let scaled = Expr::atom(atom.clone()).mul(&Expr::constant(Q::new(a.pow(n as u32).into(), c.into())));
            Some(if n == 0 { scaled.sub(&Expr::constant(Q::new(d.into(), c.into()))) } else { scaled })
        }
        _ => None,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linearization_is_affine_invariant(a in 1i64..=4, b in -3i64..=3, c in 1i64..=4, d in -3i64..=3, pick in 0usize..5) {
        let (label, base, dep) = [("3.25", "a", "b"), ("3.12", "l", "k"), ("post-3.25", "a", "b"), ("3.7", "h", "g"), ("3.11", "j", "p")][pick];
        let e = parse_printed(label).unwrap();
        let before = lie_linearization_test(&e, base, dep).unwrap();
        let after = lie_linearization_test(&affine(&e, base, dep, [a, b, c, d]), base, dep).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn pullback_sampling_agrees(seed in 0u64..1000, pick in 0usize..4) {
        let name = ["1.2->3.2", "1.2->3.18", "3.18->3.22", "3.22->3.27"][pick];
        let cat = catalog_reductions();
        let rec = cat.iter().find(|r| r.name == name).unwrap();
        let src = rec.source_expr(&cat).unwrap();
        let err = pullback_sample_error(&src, rec.first_change(), 8, seed).unwrap();
        prop_assert!(err < 1e-9, "{} {}", name, err);
    }
}

