//! Numerical integration of the reduced equations, the travelling wave and its lifts.

mod rk;
mod wave;

use std::collections::BTreeMap;

use num_traits::{Float, FromPrimitive};
use thiserror::Error;

pub use rk::{integrate_adaptive, integrate_fixed, rkf45_step, NumericSolution, Tolerance};
pub use wave::{
    eval_on_lift, numeric_divergence, pde_residual, sample_points, soliton, Lift, NumericLift, PolynomialLift, ResidualStats,
    SolitonLift, TravellingWave,
};

use crate::bkmodel::Params;
use crate::reduce::{catalog_reductions, parse_printed, verify_reduction};
use crate::symkernel::{parse, Atom, Expr, RatFn, Symbol, SymbolTable, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumerixError {
    #[error("step size underflow at s = {at}")]
    StepUnderflow { at: f64 },
    #[error("non-finite state at s = {at}")]
    NonFinite { at: f64 },
    #[error("step limit reached")]
    TooManySteps,
    #[error("s = {at} is outside the solved span")]
    OutsideSpan { at: f64 },
    #[error("derivatives of order {0} are not available from this lift")]
    OrderUnsupported(usize),
    #[error("{0}")]
    Domain(String),
    #[error("unknown problem `{0}`; known: 3.2, 3.9, 3.22, 3.27, first-integral, linear")]
    UnknownProblem(String),
    #[error("{0}")]
    Kernel(String),
}

/// An ODE solved for its highest derivative, with numeric parameter values.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    pub label: String,
    pub base: String,
    pub dep: String,
    pub equation: Expr,
    pub rhs: RatFn,
    pub order: usize,
    pub bindings: BTreeMap<String, f64>,
    pub s0: f64,
    pub y0: Vec<f64>,
    /// Points where the right-hand side is singular.
    pub excluded: Vec<f64>,
}

pub const PROBLEMS: [&str; 6] = ["3.2", "3.9", "3.22", "3.27", "first-integral", "linear"];

fn q_f64(q: &Option<Q>, default: f64) -> f64 {
    q.as_ref().map(crate::symkernel::ratfn::q_to_float).unwrap_or(default)
}

/// Numeric values of alpha, beta, c; unset parameters default to 1.
pub fn numeric_params(p: &Params) -> (f64, f64, f64) {
    (q_f64(&p.alpha, 1.0), q_f64(&p.beta, 1.0), q_f64(&p.c, 1.0))
}

fn equation(label: &str) -> Result<(Expr, &'static str, &'static str), NumerixError> {
    Ok(match label {
        "3.2" | "3.22" | "3.27" => {
            let (b, d) = match label {
                "3.2" => ("s", "w"),
                "3.22" => ("r", "v"),
                _ => ("n", "m"),
            };
            (parse_printed(label)?, b, d)
        }
        "3.9" => {
            let cat = catalog_reductions();
            let rec = cat.iter().find(|r| r.name == "3.2->3.9").unwrap();
            let text = verify_reduction(rec, &cat)
                .computed()
                .and_then(|r| r.computed.clone())
                .ok_or_else(|| NumerixError::Kernel("the pullback to 3.9 failed".into()))?;
            (parse(&text, &SymbolTable::ode("n", "m"))?, "n", "m")
        }
        "first-integral" => (
            parse(
                "(alpha+beta)*W[s,s] + (3*alpha+4*beta)*W^2 - c*W - K",
                &SymbolTable::ode("s", "W").param("K"),
            )?,
            "s",
            "W",
        ),
        "linear" => (parse("w[s,s]", &SymbolTable::ode("s", "w"))?, "s", "w"),
        other => return Err(NumerixError::UnknownProblem(other.into())),
    })
}

/// Builds a catalog problem; `k` is the integration constant of the first integral.
pub fn ode_problem(label: &str, params: &Params, k: f64) -> Result<OdeProblem, NumerixError> {
    let (eq, base, dep) = equation(label)?;
    let r = eq.canonicalize()?;
    let top = r
        .atoms()
        .into_iter()
        .filter(|a| a.is_jet_of(&Symbol::new(dep)))
        .map(|a| a.order())
        .max()
        .unwrap_or(0);
    let lead = Atom::jet(dep, &vec![base; top]);
    let rhs = crate::reduce::solved(&r, &lead).ok_or_else(|| NumerixError::Kernel(format!("{label} is not solvable for {lead}")))?;
    let (a, b, c) = numeric_params(params);
    let bindings = BTreeMap::from([("alpha".to_string(), a), ("beta".to_string(), b), ("c".to_string(), c), ("K".to_string(), k)]);
    Ok(OdeProblem {
        label: label.into(),
        base: base.into(),
        dep: dep.into(),
        equation: eq,
        rhs,
        order: top,
        bindings,
        s0: 0.0,
        y0: vec![0.0; top],
        excluded: Vec::new(),
    })
}

impl OdeProblem {
    pub fn with_initial(mut self, s0: f64, y0: Vec<f64>) -> Result<Self, NumerixError> {
        if y0.len() != self.order {
            return Err(NumerixError::Domain(format!("{} needs {} initial values, got {}", self.label, self.order, y0.len())));
        }
        self.s0 = s0;
        self.y0 = y0;
        Ok(self)
    }

    /// First-order system `y' = f(s, y)` for the state `(u, u', ..., u^(n-1))`.
    pub fn system<'a, T: Float + FromPrimitive + 'a>(&'a self) -> impl Fn(T, &[T], &mut [T]) -> Result<(), NumerixError> + 'a {
        let dep = Symbol::new(&self.dep);
        let params: BTreeMap<String, T> = self.bindings.iter().map(|(k, v)| (k.clone(), T::from_f64(*v).unwrap())).collect();
        move |s: T, y: &[T], out: &mut [T]| {
            let n = y.len();
            out[..n - 1].copy_from_slice(&y[1..]);
            let v = self.rhs.eval(&|a: &Atom| match a {
                Atom::Jet { dep: d, index } if *d == dep => y.get(index.order()).copied(),
                Atom::Base(_) => Some(s),
                Atom::Param(p) => params.get(p.as_str()).copied(),
                _ => None,
            })?;
            if !v.is_finite() {
                return Err(NumerixError::NonFinite { at: s.to_f64().unwrap_or(f64::NAN) });
            }
            out[n - 1] = v;
            Ok(())
        }
    }
}

/// Adaptive integration of `p` from its initial point to `s1`.
pub fn integrate_ode<T: Float + FromPrimitive>(p: &OdeProblem, s1: f64, tol: f64) -> Result<NumericSolution<T>, NumerixError> {
    let (lo, hi) = (p.s0.min(s1), p.s0.max(s1));
    if let Some(x) = p.excluded.iter().find(|x| **x >= lo && **x <= hi) {
        return Err(NumerixError::Domain(format!("the span contains the singular point {x}")));
    }
    let y0: Vec<T> = p.y0.iter().map(|v| T::from_f64(*v).unwrap()).collect();
    let t = |v: f64| T::from_f64(v).unwrap();
    integrate_adaptive(&p.system::<T>(), t(p.s0), &y0, t(s1), &Tolerance::new(t(tol)))
}

/// Exact state of a catalog problem along the travelling wave (`None` if it has none).
/// 3.22 and 3.27 carry the affine image `a W + b` of the profile that solves
/// `m''' = -6 m m'`.
pub fn wave_state<T: Float + FromPrimitive>(label: &str, wave: &TravellingWave<T>, s: T) -> Option<Vec<T>> {
    let t = |v: f64| T::from_f64(v).unwrap();
    let (al, be, c) = (wave.alpha, wave.beta, wave.speed);
    let a = (t(3.0) * al + t(4.0) * be) / (t(3.0) * (al + be));
    let b = -c / (t(6.0) * (al + be));
    Some(match label {
        "3.2" => (0..4).map(|k| wave.w(k, s)).collect(),
        "3.9" => (0..3).map(|k| wave.profile(k, s)).collect(),
        "first-integral" => (0..2).map(|k| wave.profile(k, s)).collect(),
        "3.27" => {
            let mut v: Vec<T> = (0..3).map(|k| a * wave.profile(k, s)).collect();
            v[0] = v[0] + b;
            v
        }
        "3.22" => {
            let mut v: Vec<T> = (0..4).map(|k| a * wave.w(k, s)).collect();
            v[0] = v[0] + b * s;
            v[1] = v[1] + b;
            v
        }
        _ => return None,
    })
}

/// Max-norm error against the exact wave state over the grid.
pub fn wave_error<T: Float + FromPrimitive>(label: &str, wave: &TravellingWave<T>, sol: &NumericSolution<T>) -> Option<T> {
    let mut m = T::zero();
    for (s, v) in sol.grid.iter().zip(&sol.values) {
        let e = wave_state(label, wave, *s)?;
        for (a, b) in v.iter().zip(&e) {
            m = m.max((*a - *b).abs());
        }
    }
    Some(m)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Convergence {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Fixed-step errors for `n, 2n, 4n, ...` steps on `[s0, s1]`, started on the wave.
pub fn convergence_study(label: &str, params: &Params, s0: f64, s1: f64, n: usize, levels: usize) -> Result<Convergence, NumerixError> {
    let (a, b, c) = numeric_params(params);
    let wave = soliton(a, b, c)?;
    let y0 = wave_state(label, &wave, s0).ok_or_else(|| NumerixError::UnknownProblem(label.into()))?;
    let p = ode_problem(label, params, 0.0)?.with_initial(s0, y0.clone())?;
    let f = p.system::<f64>();
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for l in 0..levels {
        let m = n << l;
        let sol = integrate_fixed(&f, s0, &y0, s1, m)?;
        steps.push(m);
        errors.push(wave_error(label, &wave, &sol).unwrap());
    }
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(Convergence { steps, errors, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_problem_is_exact() {
        let p = ode_problem("linear", &Params::symbolic(), 0.0).unwrap().with_initial(0.0, vec![0.0, 1.0]).unwrap();
        let sol = integrate_ode::<f64>(&p, 3.0, 1e-10).unwrap();
        for (s, v) in sol.grid.iter().zip(&sol.values) {
            assert!((v[0] - s).abs() < 1e-10);
        }
    }

    #[test]
    fn initial_value_count() {
        let p = ode_problem("3.27", &Params::symbolic(), 0.0).unwrap();
        assert_eq!(p.order, 3);
        assert!(p.with_initial(0.0, vec![1.0]).is_err());
    }
}
