use std::time::Instant;

use bk_cli::report::{Claim, Report, Status};
use bk_cli::suites::{self, FluxMode, NumericOptions, SymmetryTable};
use bk_core::bkmodel::{bk_equation, Params};
use bk_core::reduce::{catalog_reductions, verify_all, RecordStatus};
use bk_core::symkernel::{parse, Atom, SymbolTable};

struct Verdict {
    ok: bool,
    detail: String,
}

fn status(r: &Report, id: &str) -> Status {
    r.get(id).unwrap_or_else(|| panic!("missing claim {id}")).status
}

fn claims(r: &Report, prefix: &str) -> Vec<Claim> {
    r.claims.iter().filter(|c| c.id.starts_with(prefix)).cloned().collect()
}

fn criterion_1(table: &SymmetryTable, secs: f64) -> Verdict {
    let r = Report::new(suites::symmetry_claims(table), Vec::new());
    let exact = ["G1a", "G4a", "G5a", "G6a[b=1,a=0]", "G6a[b=0,a=1]", "G6a(generic)"];
    let exact_ok = exact.iter().all(|n| status(&r, &format!("symmetry/{n}")) == Status::Pass);
    let leading_ok = ["G2a", "G3a"].iter().all(|n| {
        let row = table.rows.iter().find(|row| row.entry.name == *n).unwrap();
        match (&row.corrected, row.verdict.pass) {
            (_, true) => true,
            (Some((field, v)), false) => v.pass && field.xi_of("t") == row.entry.field.xi_of("t"),
            (None, false) => false,
        }
    });
    Verdict {
        ok: exact_ok && leading_ok && secs < 30.0,
        detail: format!(
            "exact: {}; G2a/G3a corrected with the printed xi_t: {}; printed G6a (y b'/beta) {}; {secs:.2}s",
            exact_ok,
            leading_ok,
            status(&r, "symmetry/G6a").label()
        ),
    }
}

fn criterion_2(table: &SymmetryTable, secs: f64) -> Verdict {
    let (c, e) = (table.constants.algebra.dimension, table.extended.algebra.dimension);
    Verdict { ok: c == 4 && e >= 5 && secs < 60.0, detail: format!("constants {c}, extended {e}; {secs:.2}s") }
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let out = verify_all(&catalog_reductions());
    let secs = t.elapsed().as_secs_f64();
    let get = |n: &str| out.iter().find(|o| o.name == n).unwrap();
    let first = get("1.2->3.2");
    let coefficient_ok = first.status == RecordStatus::Verified && {
        let text = first.computed().unwrap().computed.clone().unwrap();
        let e = parse(&text, &SymbolTable::ode("s", "w")).unwrap().canonicalize().unwrap();
        let lead = e.partial(&Atom::jet("w", &["s", "s", "s", "s"]));
        let mixed = e.partial(&Atom::jet("w", &["s"])).partial(&Atom::jet("w", &["s", "s"]));
        let want = parse("(6*alpha + 8*beta)/(alpha + beta)", &SymbolTable::ode("s", "w")).unwrap().canonicalize().unwrap();
        mixed.div(&lead).unwrap().sub(&want).is_zero()
    };
    let named = ["3.2->3.9", "3.22->3.24", "3.22->3.27", "3.24->3.25"];
    let not_verified: Vec<&str> = named.iter().copied().filter(|n| get(n).status != RecordStatus::Verified).collect();
    let none_failed = out.iter().all(|o| o.status != RecordStatus::Failed);
    let corrected_attached = out.iter().filter(|o| o.status == RecordStatus::Corrected).all(|o| o.computed().and_then(|r| r.computed.as_ref()).is_some());
    Verdict {
        ok: coefficient_ok && not_verified.is_empty() && none_failed && corrected_attached && secs < 120.0,
        detail: format!(
            "1.2->3.2 with 6 alpha + 8 beta: {coefficient_ok}; not verified as printed: {not_verified:?} (corrected); \
             none failed: {none_failed}; computed targets attached: {corrected_attached}; {secs:.2}s"
        ),
    }
}

fn criterion_4(r: &Report) -> Verdict {
    let exact = ["3.2/G1b", "3.2/G2b", "3.9/G1c", "3.22/G1f", "3.22/G2f"];
    let exact_ok = exact.iter().all(|n| status(r, &format!("ode-symmetry/{n}")) == Status::Pass);
    let emitted = ["3.2/G3b", "3.9/G2c", "3.22/G3f", "3.14-computed/G1d", "3.18/G1e", "3.18/G3e"]
        .iter()
        .all(|n| {
            let c = r.get(&format!("ode-symmetry/{n}")).unwrap();
            c.status == Status::Pass || c.residual.is_some()
        });
    let failing: Vec<String> = claims(r, "ode-symmetry/").into_iter().filter(|c| c.status == Status::Fail).map(|c| c.id).collect();
    Verdict { ok: exact_ok && emitted, detail: format!("exact: {exact_ok}; verdicts emitted: {emitted}; printed failures {failing:?}") }
}

fn criterion_5(r: &Report) -> Verdict {
    let want = [
        ("linearization/3.25", Status::Pass),
        ("linearization/w''=0", Status::Pass),
        ("linearization/3.12", Status::ConsistentWithClaim),
        ("linearization/post-3.25", Status::ConsistentWithClaim),
        ("linearization/post-3.25-computed", Status::ConsistentWithClaim),
    ];
    let bad: Vec<&str> = want.iter().filter(|(id, s)| status(r, id) != *s).map(|(id, _)| *id).collect();
    Verdict { ok: bad.is_empty(), detail: format!("3.25 and w''=0 linearizable, 3.12 and both post-3.25 readings not; mismatches {bad:?}") }
}

fn criterion_6(r: &Report) -> Verdict {
    let a5 = status(r, "self-adjoint/phi=A5") == Status::Pass;
    let display = r.get("adjoint/printed-display").unwrap();
    let typos_only = display.details["only_typos"] == serde_json::Value::Bool(true) && display.residual.is_some();
    Verdict { ok: a5 && typos_only, detail: format!("phi = A5: {a5}; printed display differs only in flagged terms: {typos_only}") }
}

fn criterion_7(r: &Report) -> Verdict {
    let ids = suites::FLUX_IDS;
    let constructed = ids.iter().all(|n| status(r, &format!("conservation/{n}/constructed")) == Status::Pass);
    let printed = ids.iter().all(|n| status(r, &format!("conservation/{n}/printed")) != Status::Skipped);
    let worst = ids.iter().map(|n| r.get(&format!("conservation/{n}/numeric")).unwrap().metric.unwrap()).fold(0.0, f64::max);
    Verdict {
        ok: constructed && printed && worst < 1e-8,
        detail: format!("constructed triples conserved: {constructed}; printed triples judged: {printed}; max numeric divergence {worst:.2e}"),
    }
}

fn criterion_8(r: &Report, secs: f64) -> Verdict {
    let res = r.get("numeric/soliton-residual").unwrap();
    let conv = r.get("numeric/convergence-3.27").unwrap();
    let ok = res.status == Status::Pass && res.metric.unwrap() < 1e-10 && conv.status == Status::Pass && secs < 60.0;
    Verdict {
        ok,
        detail: format!("soliton residual {:.2e}; convergence ratio {:.2}; {secs:.2}s", res.metric.unwrap(), conv.metric.unwrap()),
    }
}

fn main() {
    let params = Params::symbolic();
    let num = NumericOptions { points: 1000, seed: 7 };
    let t = Instant::now();
    let table = SymmetryTable::new(&params);
    let table_secs = t.elapsed().as_secs_f64();

    let cons = suites::conservation_claims(&table, &suites::parse_which(None).unwrap(), FluxMode::Both, &num);
    let t = Instant::now();
    let numeric = suites::numeric_claims(&Params::parse("alpha=1,beta=1,c=1").unwrap(), &num);
    let numeric_secs = t.elapsed().as_secs_f64();
    let all: Vec<Claim> = [cons, suites::adjoint_claims(&params), suites::reduction_claims(), numeric].concat();
    let report = Report::new(all, bk_equation(&params).assumptions);

    let verdicts = [
        criterion_1(&table, table_secs),
        criterion_2(&table, table_secs),
        criterion_3(),
        criterion_4(&report),
        criterion_5(&report),
        criterion_6(&report),
        criterion_7(&report),
        criterion_8(&report, numeric_secs),
    ];
    for (i, v) in verdicts.iter().enumerate() {
        println!("criterion {}: {}  {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
    }
    // Records 3.2->3.9 and 3.24->3.25 only verify after correction, so criterion 3 stays red.
    let expected = [true, true, false, true, true, true, true, true];
    let got: Vec<bool> = verdicts.iter().map(|v| v.ok).collect();
    assert_eq!(got, expected);
}
