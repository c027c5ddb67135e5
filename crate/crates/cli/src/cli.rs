use std::fs;
use std::io::Write;
use std::path::PathBuf;

use bk_core::bkmodel::{Params, Source};
use bk_core::numerix::{integrate_ode, numeric_params, ode_problem, soliton, wave_error, wave_state, NumericSolution, PROBLEMS};
use bk_core::reduce::{catalog_reductions, verify_reduction};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::{timed, Claim, Report, Status, EXIT_CLAIM_FAILED, EXIT_OK, EXIT_USAGE};
use crate::suites::{self, FluxMode, NumericOptions, SymmetryTable};

#[derive(Parser, Debug)]
#[command(name = "bk", version, about = "Verify symmetries, reductions and conservation laws of the Bogoyavlensky-Konopelchenko equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write the JSON report to this file (`-` for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for sampled points.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Parameter bindings, e.g. `alpha=1,beta=1/2,c=1`.
    #[arg(long, global = true, value_name = "LIST")]
    pub params: Option<String>,
    /// Include wall times in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Number of sampled points for numeric checks.
    #[arg(long, global = true, default_value_t = 1000)]
    pub points: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check catalog claims against the equation.
    Verify {
        #[arg(value_enum)]
        suite: VerifySuite,
        /// Comma-separated generators (conservation only).
        #[arg(long)]
        which: Option<String>,
        /// Only the constructed conserved vectors.
        #[arg(long, conflicts_with = "printed")]
        construct: bool,
        /// Only the printed conserved vectors.
        #[arg(long)]
        printed: bool,
    },
    /// Similarity reductions.
    Reduce {
        /// List the records.
        #[arg(long, conflicts_with_all = ["verify", "show"])]
        list: bool,
        /// Verify all records, or one if a name is given.
        #[arg(long, num_args = 0..=1, value_name = "NAME", default_missing_value = "")]
        verify: Option<String>,
        /// Print one record in full.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Integrate a reduced equation.
    Solve {
        /// One of 3.2, 3.9, 3.22, 3.27, first-integral, linear.
        #[arg(long)]
        ode: String,
        /// File of initial values, or `soliton` for the travelling wave.
        #[arg(long, default_value = "soliton")]
        ic: String,
        #[arg(long, default_value = "-10,10", allow_hyphen_values = true)]
        span: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Integration constant of the first integral.
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        /// Write s, state and local error per step.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Lift the travelling wave to (t, x, y) and check it.
    Lift {
        /// `alpha,beta,c`.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        wave: String,
        /// Number of random points for the residual.
        #[arg(long, value_name = "N")]
        check_residual: Option<usize>,
        /// Also lift the numerically integrated first integral.
        #[arg(long)]
        numeric: bool,
    },
    /// Run every suite.
    Report {
        #[arg(long)]
        all: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum VerifySuite {
    Symmetries,
    Conservation,
    Adjoint,
}

struct Usage(String);

impl From<String> for Usage {
    fn from(s: String) -> Self {
        Usage(s)
    }
}

fn params(g: &Global) -> Result<Params, Usage> {
    Ok(match &g.params {
        Some(p) => Params::parse(p)?,
        None => Params::symbolic(),
    })
}

fn numeric(g: &Global) -> NumericOptions {
    NumericOptions { points: g.points.max(1), seed: g.seed }
}

fn floats(text: &str, n: Option<usize>, what: &str) -> Result<Vec<f64>, Usage> {
    let v: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Usage(format!("{what}: `{s}` is not a number"))))
        .collect::<Result<_, _>>()?;
    if let Some(n) = n {
        if v.len() != n {
            return Err(Usage(format!("{what}: expected {n} numbers, got {}", v.len())));
        }
    }
    Ok(v)
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "\nFor more information, try '--help'.");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let g = &cli.global;
    match &cli.command {
        Command::Verify { suite, which, construct, printed } => {
            let p = params(g)?;
            let (claims, mut assumptions) = match suite {
                VerifySuite::Symmetries => {
                    if which.is_some() || *construct || *printed {
                        return Err(Usage("--which, --construct and --printed apply to `verify conservation`".into()));
                    }
                    (timed(|| suites::symmetry_claims(&SymmetryTable::new(&p))), Vec::new())
                }
                VerifySuite::Conservation => {
                    let ids = suites::parse_which(which.as_deref())?;
                    let mode = if *construct {
                        FluxMode::Construct
                    } else if *printed {
                        FluxMode::Printed
                    } else {
                        FluxMode::Both
                    };
                    let num = numeric(g);
                    (timed(|| suites::conservation_claims(&SymmetryTable::new(&p), &ids, mode, &num)), Vec::new())
                }
                VerifySuite::Adjoint => {
                    if which.is_some() || *construct || *printed {
                        return Err(Usage("--which, --construct and --printed apply to `verify conservation`".into()));
                    }
                    (timed(|| suites::adjoint_claims(&p)), Vec::new())
                }
            };
            assumptions.extend(suites::base_assumptions());
            assumptions.extend(bk_core::bkmodel::bk_equation(&p).assumptions);
            emit_report(Report::new(claims, assumptions), g, out, err)
        }
        Command::Reduce { verify, show, .. } => reduce(verify.as_deref(), show.as_deref(), g, out, err),
        Command::Solve { ode, ic, span, tol, k, csv } => solve(ode, ic, span, *tol, *k, csv.as_ref(), g, out, err),
        Command::Lift { wave, check_residual, numeric } => lift(wave, *check_residual, *numeric, g, out, err),
        Command::Report { all } => {
            if !all {
                return Err(Usage("nothing selected; use `bk report --all`".into()));
            }
            let p = params(g)?;
            let claims = suites::all_claims(&p, &numeric(g));
            emit_report(Report::new(claims, suites::all_assumptions(&p)), g, out, err)
        }
    }
}

fn emit_report(report: Report, g: &Global, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let report = if g.timings { report } else { report.without_timings() };
    let to_stdout = g.json.as_ref().is_some_and(|p| p.as_os_str() == "-");
    {
        let human: &mut dyn Write = if to_stdout { &mut *err } else { &mut *out };
        let _ = write!(human, "{}", report.summary());
    }
    match &g.json {
        Some(_) if to_stdout => {
            let _ = write!(out, "{}", report.to_json());
        }
        Some(p) => fs::write(p, report.to_json()).map_err(|e| Usage(format!("cannot write {}: {e}", p.display())))?,
        None => {}
    }
    let corrected = report.claims.iter().filter(|c| c.status == Status::Corrected).count();
    if corrected > 0 {
        let _ = writeln!(err, "warning: {corrected} printed claims fail as printed but pass after correction");
    }
    Ok(report.exit_code())
}

fn reduce(verify: Option<&str>, show: Option<&str>, g: &Global, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let cat = catalog_reductions();
    let find = |name: &str| {
        cat.iter().find(|r| r.name == name).ok_or_else(|| {
            Usage(format!("unknown record `{name}`; known: {}", cat.iter().map(|r| r.name.as_str()).collect::<Vec<_>>().join(", ")))
        })
    };
    if let Some(name) = show {
        let rec = find(name)?;
        let o = verify_reduction(rec, &cat);
        let _ = writeln!(out, "{}  [{}]", o.name, format!("{:?}", o.status).to_lowercase());
        let _ = writeln!(out, "anchor: {}", rec.anchor);
        let _ = writeln!(out, "source: {}", o.source);
        for (g, ok) in rec.generators.iter().zip(&o.generators_verified) {
            let _ = writeln!(out, "generator: {}  ({})", g.to_text(), if *ok { "verified" } else { "fails" });
        }
        for r in &o.readings {
            let _ = writeln!(out, "reading {}:", r.label);
            let _ = writeln!(out, "  change:   {}", r.change);
            let _ = writeln!(out, "  claimed:  {}", r.claimed);
            if let Some(c) = &r.computed {
                let _ = writeln!(out, "  computed: {c}");
            }
            if let Some(s) = &r.computed_solved {
                let _ = writeln!(out, "  solved:   {s}");
            }
            let _ = writeln!(out, "  matches:  {}", r.matches);
            for (k, v) in [("factor", &r.factor), ("diff", &r.diff), ("error", &r.error), ("claim error", &r.claim_error)] {
                if let Some(v) = v {
                    let _ = writeln!(out, "  {k}: {v}");
                }
            }
        }
        for n in &o.notes {
            let _ = writeln!(out, "note: {n}");
        }
        return Ok(if o.status == bk_core::reduce::RecordStatus::Failed { EXIT_CLAIM_FAILED } else { EXIT_OK });
    }
    match verify {
        Some("") => {
            let claims = suites::reduction_claims();
            emit_report(Report::new(claims, suites::reduction_assumptions()), g, out, err)
        }
        Some(name) => {
            let o = verify_reduction(find(name)?, &cat);
            let claims = suites::reduction_records(&[o]);
            emit_report(Report::new(claims, suites::reduction_assumptions()), g, out, err)
        }
        None => {
            for r in &cat {
                let _ = writeln!(out, "{:<18} {}", r.name, r.anchor);
            }
            Ok(EXIT_OK)
        }
    }
}

fn state_names(base: &str, dep: &str, order: usize) -> Vec<String> {
    (0..order).map(|k| if k == 0 { dep.to_string() } else { format!("{dep}_{}", base.repeat(k)) }).collect()
}

fn write_csv(path: &PathBuf, names: &[String], sol: &NumericSolution<f64>) -> Result<(), Usage> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?;
    let mut header = vec!["s".to_string()];
    header.extend(names.iter().cloned());
    header.push("local_error".into());
    let fail = |e: csv::Error| Usage(format!("cannot write {}: {e}", path.display()));
    w.write_record(&header).map_err(fail)?;
    for ((s, v), e) in sol.grid.iter().zip(&sol.values).zip(&sol.error_estimate) {
        let mut row = vec![format!("{s:.17e}")];
        row.extend(v.iter().map(|x| format!("{x:.17e}")));
        row.push(format!("{e:.6e}"));
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn solve(label: &str, ic: &str, span: &str, tol: f64, k: f64, csv: Option<&PathBuf>, g: &Global, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    if !PROBLEMS.contains(&label) {
        return Err(Usage(format!("unknown problem `{label}`; known: {}", PROBLEMS.join(", "))));
    }
    let p = params(g)?;
    let s = floats(span, Some(2), "--span")?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Usage("--tol must be positive".into()));
    }
    let (a, b, c) = numeric_params(&p);
    let problem = ode_problem(label, &p, k).map_err(|e| Usage(e.to_string()))?;
    let wave = soliton(a, b, c).ok();
    let y0 = if ic == "soliton" {
        let w = wave.as_ref().ok_or_else(|| Usage(format!("no travelling wave for alpha={a}, beta={b}, c={c}")))?;
        wave_state(label, w, s[0]).ok_or_else(|| Usage(format!("`{label}` has no soliton initial data; pass --ic FILE")))?
    } else {
        let text = fs::read_to_string(ic).map_err(|e| Usage(format!("cannot read {ic}: {e}")))?;
        floats(&text, Some(problem.order), ic)?
    };
    let problem = problem.with_initial(s[0], y0).map_err(|e| Usage(e.to_string()))?;
    let t = std::time::Instant::now();
    let sol = match integrate_ode::<f64>(&problem, s[1], tol) {
        Ok(sol) => sol,
        Err(e) => {
            let _ = writeln!(err, "integration failed: {e}");
            return Ok(EXIT_CLAIM_FAILED);
        }
    };
    let elapsed = t.elapsed().as_secs_f64();
    if let Some(path) = csv {
        write_csv(path, &state_names(&problem.base, &problem.dep, problem.order), &sol)?;
    }
    let local = sol.error_estimate.iter().cloned().fold(0.0, f64::max);
    let mut claim = Claim::pass_if(format!("solve/{label}"), format!("integration of {label}"), Source::Trivial, local <= tol)
        .details(serde_json::json!({
            "span": s,
            "tolerance": tol,
            "steps": sol.grid.len() - 1,
            "final_state": sol.last().1,
            "max_local_error": local,
            "initial_values": ic,
        }));
    if ic == "soliton" {
        if let Some(e) = wave.as_ref().and_then(|w| wave_error(label, w, &sol)) {
            claim = claim.metric(e).note("metric: max error against the closed-form wave");
        }
    }
    claim.wall_time_s = Some(elapsed);
    emit_report(Report::new(vec![claim], suites::base_assumptions()), g, out, err)
}

fn lift(wave: &str, check: Option<usize>, numeric_lift: bool, g: &Global, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Usage> {
    let v = floats(wave, Some(3), "--wave")?;
    let w = soliton(v[0], v[1], v[2]).map_err(|e| Usage(e.to_string()))?;
    let num = NumericOptions { points: check.unwrap_or(g.points).max(1), seed: g.seed };
    let mut claims = timed(|| suites::wave_claims(&w, &num));
    if numeric_lift {
        claims.extend(timed(|| suites::numeric_lift_claims(&w, &num)));
    }
    emit_report(Report::new(claims, suites::base_assumptions()), g, out, err)
}
