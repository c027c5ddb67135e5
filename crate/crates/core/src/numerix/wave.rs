//! The sech^2 travelling wave, lifts to (t, x, y) and pointwise checks on them.

use num_traits::{Float, FromPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rk::NumericSolution;
use super::NumerixError;
use crate::bkmodel::{divergence, ConservationFluxes};
use crate::symkernel::{bk, Atom, JetIndex, KernelError, RatFn, Symbol};
use crate::bkmodel::BK_TEXT;

fn c<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

/// `W(s) = amplitude * sech^2(width * s)` solves `(a+b) W'' + (3a+4b) W^2 - c W = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TravellingWave<T> {
    pub amplitude: T,
    pub width: T,
    pub speed: T,
    pub alpha: T,
    pub beta: T,
}

pub fn soliton<T: Float + FromPrimitive>(alpha: T, beta: T, speed: T) -> Result<TravellingWave<T>, NumerixError> {
    let k = c::<T>(3.0) * alpha + c::<T>(4.0) * beta;
    let r = speed / (alpha + beta);
    if k == T::zero() || r.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) || !r.is_finite() {
        return Err(NumerixError::Domain(format!(
            "need c/(alpha+beta) > 0 and 3 alpha + 4 beta != 0, got alpha={:?}, beta={:?}, c={:?}",
            alpha.to_f64(),
            beta.to_f64(),
            speed.to_f64()
        )));
    }
    Ok(TravellingWave {
        amplitude: c::<T>(3.0) * speed / (c::<T>(2.0) * k),
        width: r.sqrt() / c(2.0),
        speed,
        alpha,
        beta,
    })
}

impl<T: Float + FromPrimitive> TravellingWave<T> {
    /// Coefficients in `tanh(width s)` of `w^(k)`, where `w = amplitude/width * tanh`.
    fn tanh_poly(&self, k: usize) -> Vec<T> {
        let mut p = vec![T::zero(), self.amplitude / self.width];
        for _ in 0..k {
            // d/ds P(T) = width (1 - T^2) P'(T)
            let dp: Vec<T> = (1..p.len()).map(|i| p[i] * T::from_usize(i).unwrap()).collect();
            let mut out = vec![T::zero(); dp.len() + 2];
            for (i, a) in dp.iter().enumerate() {
                out[i] = out[i] + *a * self.width;
                out[i + 2] = out[i + 2] - *a * self.width;
            }
            p = out;
        }
        p
    }

    /// `w^(k)(s)`, with `w(0) = 0`.
    pub fn w(&self, k: usize, s: T) -> T {
        let t = (self.width * s).tanh();
        self.tanh_poly(k).iter().rev().fold(T::zero(), |acc, a| acc * t + *a)
    }

    /// `W^(k)(s)` for the profile `W = w'`.
    pub fn profile(&self, k: usize, s: T) -> T {
        self.w(k + 1, s)
    }

    /// Residual of the once-integrated travelling-wave equation at `s`.
    pub fn first_integral_residual(&self, s: T) -> T {
        let w0 = self.profile(0, s);
        let w2 = self.profile(2, s);
        (self.alpha + self.beta) * w2 + (c::<T>(3.0) * self.alpha + c::<T>(4.0) * self.beta) * w0 * w0 - self.speed * w0
    }
}

/// Values of `u` and its jets on (t, x, y)-space, together with the parameter values.
pub trait Lift<T> {
    fn jet(&self, index: &JetIndex, point: [T; 3]) -> Result<T, NumerixError>;
    /// Highest jet order available, `None` when unbounded.
    fn max_order(&self) -> Option<usize>;
    fn approximate(&self) -> bool;
    fn param(&self, name: &str) -> Option<T>;
}

fn travelling_jet<T: Float + FromPrimitive>(index: &JetIndex, point: [T; 3], speed: T, w: impl Fn(usize, T) -> Result<T, NumerixError>) -> Result<T, NumerixError> {
    let [t, x, y] = point;
    let s = x + y - speed * t;
    let nt = index.count(&Symbol::new("t"));
    let v = w(index.order(), s)?;
    Ok(if nt == 0 { v } else { v * (-speed).powi(nt as i32) })
}

/// `u(t, x, y) = w(x + y - ct)` with closed-form derivatives of every order.
#[derive(Clone, Copy, Debug)]
pub struct SolitonLift<T> {
    pub wave: TravellingWave<T>,
    /// Added to `u`, which leaves every equation in the catalog unchanged.
    pub offset: T,
    /// Shift of x, for translation checks.
    pub shift: T,
}

impl<T: Float + FromPrimitive> SolitonLift<T> {
    pub fn new(wave: TravellingWave<T>) -> Self {
        SolitonLift {
            wave,
            offset: T::zero(),
            shift: T::zero(),
        }
    }
}

impl<T: Float + FromPrimitive> Lift<T> for SolitonLift<T> {
    fn jet(&self, index: &JetIndex, point: [T; 3]) -> Result<T, NumerixError> {
        let p = [point[0], point[1] + self.shift, point[2]];
        let v = travelling_jet(index, p, self.wave.speed, |k, s| Ok(self.wave.w(k, s)))?;
        Ok(if index.order() == 0 { v + self.offset } else { v })
    }

    fn max_order(&self) -> Option<usize> {
        None
    }

    fn approximate(&self) -> bool {
        false
    }

    fn param(&self, name: &str) -> Option<T> {
        match name {
            "alpha" => Some(self.wave.alpha),
            "beta" => Some(self.wave.beta),
            "c" => Some(self.wave.speed),
            _ => None,
        }
    }
}

/// A closed-form lift of a polynomial `u`, used for trivial solutions.
#[derive(Clone, Debug)]
pub struct PolynomialLift<T> {
    pub u: RatFn,
    pub alpha: T,
    pub beta: T,
}

impl<T: Float + FromPrimitive> Lift<T> for PolynomialLift<T> {
    fn jet(&self, index: &JetIndex, point: [T; 3]) -> Result<T, NumerixError> {
        let mut d = self.u.clone();
        for v in index.iter() {
            d = d.partial(&Atom::Base(v.clone()));
        }
        let names = ["t", "x", "y"];
        Ok(d.eval(&|a| match a {
            Atom::Base(b) => names.iter().position(|n| *n == b.as_str()).map(|i| point[i]),
            _ => None,
        })?)
    }

    fn max_order(&self) -> Option<usize> {
        None
    }

    fn approximate(&self) -> bool {
        false
    }

    fn param(&self, name: &str) -> Option<T> {
        match name {
            "alpha" => Some(self.alpha),
            "beta" => Some(self.beta),
            _ => None,
        }
    }
}

/// Lift of a numerical solution of the first integral, state `(W, W')`.
/// `w` comes from Hermite quadrature of `W`; `w''' = W''` and `w'''' = W'''`
/// come from the equation itself.
#[derive(Clone, Debug)]
pub struct NumericLift<T> {
    pub grid: Vec<T>,
    pub big_w: Vec<T>,
    pub big_w1: Vec<T>,
    pub w: Vec<T>,
    pub alpha: T,
    pub beta: T,
    pub speed: T,
    pub k: T,
}

impl<T: Float + FromPrimitive> NumericLift<T> {
    /// The solution must have state `(W, W')`; `w` vanishes at `s = anchor` (or the first grid point).
    pub fn new(sol: &NumericSolution<T>, alpha: T, beta: T, speed: T, k: T, anchor: T) -> Result<Self, NumerixError> {
        if sol.values.first().map(|v| v.len()) != Some(2) {
            return Err(NumerixError::Domain("expected a state (W, W')".into()));
        }
        let big_w: Vec<T> = sol.values.iter().map(|v| v[0]).collect();
        let big_w1: Vec<T> = sol.values.iter().map(|v| v[1]).collect();
        let mut w = vec![T::zero(); sol.grid.len()];
        for i in 1..sol.grid.len() {
            let h = sol.grid[i] - sol.grid[i - 1];
            w[i] = w[i - 1] + h / c(2.0) * (big_w[i - 1] + big_w[i]) + h * h / c(12.0) * (big_w1[i - 1] - big_w1[i]);
        }
        let mut lift = NumericLift {
            grid: sol.grid.clone(),
            big_w,
            big_w1,
            w,
            alpha,
            beta,
            speed,
            k,
        };
        let a0 = if anchor >= lift.grid[0] && anchor <= *lift.grid.last().unwrap() {
            lift.value(0, anchor)?
        } else {
            T::zero()
        };
        for v in lift.w.iter_mut() {
            *v = *v - a0;
        }
        Ok(lift)
    }

    fn rhs(&self, w0: T, w1: T) -> (T, T) {
        let k3 = c::<T>(3.0) * self.alpha + c::<T>(4.0) * self.beta;
        let ab = self.alpha + self.beta;
        let w2 = (self.speed * w0 + self.k - k3 * w0 * w0) / ab;
        let w3 = (self.speed - c::<T>(2.0) * k3 * w0) * w1 / ab;
        (w2, w3)
    }

    /// `w^(k)(s)` for `k <= 4`, by cubic Hermite interpolation on each step.
    pub fn value(&self, k: usize, s: T) -> Result<T, NumerixError> {
        if k > 4 {
            return Err(NumerixError::OrderUnsupported(k));
        }
        let n = self.grid.len();
        if s < self.grid[0] || s > self.grid[n - 1] {
            return Err(NumerixError::OutsideSpan { at: s.to_f64().unwrap_or(f64::NAN) });
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let (s0, s1) = (self.grid[i], self.grid[i + 1]);
        let h = s1 - s0;
        let th = (s - s0) / h;
        let (f0, f1, d0, d1) = (self.big_w[i], self.big_w[i + 1], self.big_w1[i], self.big_w1[i + 1]);
        let one = T::one();
        let two = c::<T>(2.0);
        let three = c::<T>(3.0);
        let h00 = two * th.powi(3) - three * th * th + one;
        let h10 = th.powi(3) - two * th * th + th;
        let h01 = -two * th.powi(3) + three * th * th;
        let h11 = th.powi(3) - th * th;
        let big_w = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
        let dth = |a: T, b: T, cc: T, d: T| a * f0 + b * h * d0 + cc * f1 + d * h * d1;
        let big_w1 = dth(
            c::<T>(6.0) * th * th - c::<T>(6.0) * th,
            three * th * th - c::<T>(4.0) * th + one,
            -c::<T>(6.0) * th * th + c::<T>(6.0) * th,
            three * th * th - two * th,
        ) / h;
        Ok(match k {
            0 => {
                // integral of the Hermite cubic from s0 to s
                let q = |a: T, b: T, cc: T, d: T| a * f0 + b * h * d0 + cc * f1 + d * h * d1;
                let i00 = th.powi(4) / two - th.powi(3) + th;
                let i10 = th.powi(4) / c(4.0) - two * th.powi(3) / three + th * th / two;
                let i01 = -th.powi(4) / two + th.powi(3);
                let i11 = th.powi(4) / c(4.0) - th.powi(3) / three;
                self.w[i] + h * q(i00, i10, i01, i11)
            }
            1 => big_w,
            2 => big_w1,
            3 => self.rhs(big_w, big_w1).0,
            _ => self.rhs(big_w, big_w1).1,
        })
    }
}

impl<T: Float + FromPrimitive> Lift<T> for NumericLift<T> {
    fn jet(&self, index: &JetIndex, point: [T; 3]) -> Result<T, NumerixError> {
        travelling_jet(index, point, self.speed, |k, s| self.value(k, s))
    }

    fn max_order(&self) -> Option<usize> {
        Some(4)
    }

    fn approximate(&self) -> bool {
        true
    }

    fn param(&self, name: &str) -> Option<T> {
        match name {
            "alpha" => Some(self.alpha),
            "beta" => Some(self.beta),
            "c" => Some(self.speed),
            _ => None,
        }
    }
}

/// Evaluates `r` on a lift; `extra` supplies anything else (e.g. opaque functions).
pub fn eval_on_lift<T, L>(r: &RatFn, lift: &L, point: [T; 3], extra: &dyn Fn(&Atom, [T; 3]) -> Option<T>) -> Result<T, NumerixError>
where
    T: Float + FromPrimitive,
    L: Lift<T> + ?Sized,
{
    if let Some(m) = lift.max_order() {
        if let Some(a) = r.atoms().iter().filter(|a| a.is_jet()).max_by_key(|a| a.order()) {
            if a.order() > m {
                return Err(NumerixError::OrderUnsupported(a.order()));
            }
        }
    }
    let names = ["t", "x", "y"];
    let failure = std::cell::RefCell::new(None);
    let v = r.eval(&|a: &Atom| match a {
        Atom::Jet { index, .. } => match lift.jet(index, point) {
            Ok(v) => Some(v),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Some(T::nan())
            }
        },
        Atom::Base(b) => names.iter().position(|n| *n == b.as_str()).map(|i| point[i]),
        Atom::Param(p) => lift.param(p.as_str()).or_else(|| extra(a, point)),
        _ => extra(a, point),
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v?)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub points: usize,
}

fn stats<T: Float>(vals: &[T]) -> ResidualStats {
    let abs: Vec<f64> = vals.iter().map(|v| v.abs().to_f64().unwrap_or(f64::NAN)).collect();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let mean = if abs.is_empty() { 0.0 } else { abs.iter().sum::<f64>() / abs.len() as f64 };
    ResidualStats {
        max,
        mean,
        points: abs.len(),
    }
}

/// `n` points in `[-5, 5]^3` with `|x + y - ct| <= s_max`, deterministic in the seed.
pub fn sample_points<T: Float + FromPrimitive>(n: usize, seed: u64, speed: f64, s_max: f64) -> Vec<[T; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p: [f64; 3] = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        if (p[1] + p[2] - speed * p[0]).abs() <= s_max {
            out.push(p.map(|v| c(v)));
        }
    }
    out
}

/// Max and mean of `|BK(u)|` over the points.
pub fn pde_residual<T, L>(lift: &L, points: &[[T; 3]]) -> Result<ResidualStats, NumerixError>
where
    T: Float + FromPrimitive,
    L: Lift<T> + ?Sized,
{
    let e = bk(BK_TEXT).canonicalize()?;
    let vals = points
        .iter()
        .map(|p| eval_on_lift(&e, lift, *p, &|_, _| None))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(stats(&vals))
}

/// Max and mean of `|D_t ct + D_x cx + D_y cy|`; needs jets one order above the fluxes.
pub fn numeric_divergence<T, L>(
    f: &ConservationFluxes,
    lift: &L,
    points: &[[T; 3]],
    extra: &dyn Fn(&Atom, [T; 3]) -> Option<T>,
) -> Result<ResidualStats, NumerixError>
where
    T: Float + FromPrimitive,
    L: Lift<T> + ?Sized,
{
    let d = divergence(f)?;
    let vals = points
        .iter()
        .map(|p| eval_on_lift(&d, lift, *p, extra))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(stats(&vals))
}

impl From<KernelError> for NumerixError {
    fn from(e: KernelError) -> Self {
        NumerixError::Kernel(e.to_string())
    }
}
