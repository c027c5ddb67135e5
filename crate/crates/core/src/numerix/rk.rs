//! Runge-Kutta-Fehlberg 4(5) with the fourth-order solution propagated.

use num_traits::{Float, FromPrimitive};

use super::NumerixError;

#[derive(Clone, Copy, Debug)]
pub struct Tolerance<T> {
    /// Bound on the max-norm of the local error estimate.
    pub tol: T,
    pub h0: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Float + FromPrimitive> Tolerance<T> {
    pub fn new(tol: T) -> Self {
        Tolerance {
            tol,
            h0: T::from_f64(1e-3).unwrap(),
            h_min: T::from_f64(1e-12).unwrap(),
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NumericSolution<T> {
    pub grid: Vec<T>,
    pub values: Vec<Vec<T>>,
    /// Local error estimate of the step ending at each grid point (zero at the start).
    pub error_estimate: Vec<T>,
    pub method_order: usize,
}

impl<T: Float> NumericSolution<T> {
    pub fn last(&self) -> (&T, &[T]) {
        (self.grid.last().unwrap(), self.values.last().unwrap())
    }
}

fn c<T: FromPrimitive>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

fn axpy<T: Float>(y: &[T], terms: &[(T, &[T])], h: T) -> Vec<T> {
    let mut out = y.to_vec();
    for (a, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o = *o + h * *a * *ki;
        }
    }
    out
}

/// One step; returns the fourth-order update and the max-norm of `y5 - y4`.
pub fn rkf45_step<T, F>(f: &F, s: T, y: &[T], h: T) -> Result<(Vec<T>, T), NumerixError>
where
    T: Float + FromPrimitive,
    F: Fn(T, &[T], &mut [T]) -> Result<(), NumerixError>,
{
    let n = y.len();
    let mut k = vec![vec![T::zero(); n]; 6];
    f(s, y, &mut k[0])?;
    let y1 = axpy(y, &[(c(0.25), &k[0])], h);
    f(s + h * c(0.25), &y1, &mut k[1])?;
    let y2 = axpy(y, &[(c(3.0 / 32.0), &k[0]), (c(9.0 / 32.0), &k[1])], h);
    f(s + h * c(0.375), &y2, &mut k[2])?;
    let y3 = axpy(
        y,
        &[(c(1932.0 / 2197.0), &k[0]), (c(-7200.0 / 2197.0), &k[1]), (c(7296.0 / 2197.0), &k[2])],
        h,
    );
    f(s + h * c(12.0 / 13.0), &y3, &mut k[3])?;
    let y4 = axpy(
        y,
        &[
            (c(439.0 / 216.0), &k[0]),
            (c(-8.0), &k[1]),
            (c(3680.0 / 513.0), &k[2]),
            (c(-845.0 / 4104.0), &k[3]),
        ],
        h,
    );
    f(s + h, &y4, &mut k[4])?;
    let y5 = axpy(
        y,
        &[
            (c(-8.0 / 27.0), &k[0]),
            (c(2.0), &k[1]),
            (c(-3544.0 / 2565.0), &k[2]),
            (c(1859.0 / 4104.0), &k[3]),
            (c(-11.0 / 40.0), &k[4]),
        ],
        h,
    );
    f(s + h * c(0.5), &y5, &mut k[5])?;
    let low = axpy(
        y,
        &[
            (c(25.0 / 216.0), &k[0]),
            (c(1408.0 / 2565.0), &k[2]),
            (c(2197.0 / 4104.0), &k[3]),
            (c(-0.2), &k[4]),
        ],
        h,
    );
    let high = axpy(
        y,
        &[
            (c(16.0 / 135.0), &k[0]),
            (c(6656.0 / 12825.0), &k[2]),
            (c(28561.0 / 56430.0), &k[3]),
            (c(-9.0 / 50.0), &k[4]),
            (c(2.0 / 55.0), &k[5]),
        ],
        h,
    );
    let err = low.iter().zip(&high).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    if low.iter().any(|v| !v.is_finite()) || !err.is_finite() {
        return Err(NumerixError::NonFinite { at: s.to_f64().unwrap_or(f64::NAN) });
    }
    Ok((low, err))
}

/// Adaptive integration from `s0` to `s1`; a backward run is returned on an increasing grid.
pub fn integrate_adaptive<T, F>(f: &F, s0: T, y0: &[T], s1: T, tol: &Tolerance<T>) -> Result<NumericSolution<T>, NumerixError>
where
    T: Float + FromPrimitive,
    F: Fn(T, &[T], &mut [T]) -> Result<(), NumerixError>,
{
    let dir = if s1 >= s0 { T::one() } else { -T::one() };
    let mut sol = NumericSolution {
        grid: vec![s0],
        values: vec![y0.to_vec()],
        error_estimate: vec![T::zero()],
        method_order: 4,
    };
    let (mut s, mut y) = (s0, y0.to_vec());
    let mut h = tol.h0.min((s1 - s0).abs());
    let fifth = c::<T>(0.2);
    let mut steps = 0;
    while (s1 - s) * dir > T::zero() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(NumerixError::TooManySteps);
        }
        h = h.min((s1 - s).abs());
        let (next, err) = rkf45_step(f, s, &y, h * dir)?;
        if err <= tol.tol {
            s = if (s1 - s).abs() <= h { s1 } else { s + h * dir };
            y = next;
            sol.grid.push(s);
            sol.values.push(y.clone());
            sol.error_estimate.push(err);
        }
        let scale = if err == T::zero() {
            c(4.0)
        } else {
            (c::<T>(0.9) * (tol.tol / err).powf(fifth)).max(c(0.2)).min(c(4.0))
        };
        h = h * scale;
        if h < tol.h_min {
            return Err(NumerixError::StepUnderflow { at: s.to_f64().unwrap_or(f64::NAN) });
        }
    }
    if dir < T::zero() {
        sol.grid.reverse();
        sol.values.reverse();
        sol.error_estimate.reverse();
        sol.error_estimate.rotate_right(1);
    }
    Ok(sol)
}

/// `n` equal steps from `s0` to `s1`.
pub fn integrate_fixed<T, F>(f: &F, s0: T, y0: &[T], s1: T, n: usize) -> Result<NumericSolution<T>, NumerixError>
where
    T: Float + FromPrimitive,
    F: Fn(T, &[T], &mut [T]) -> Result<(), NumerixError>,
{
    let h = (s1 - s0) / T::from_usize(n).unwrap();
    let mut sol = NumericSolution {
        grid: vec![s0],
        values: vec![y0.to_vec()],
        error_estimate: vec![T::zero()],
        method_order: 4,
    };
    let mut y = y0.to_vec();
    for i in 0..n {
        let s = s0 + h * T::from_usize(i).unwrap();
        let (next, err) = rkf45_step(f, s, &y, h)?;
        y = next;
        sol.grid.push(s0 + h * T::from_usize(i + 1).unwrap());
        sol.values.push(y.clone());
        sol.error_estimate.push(err);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_: f64, y: &[f64], out: &mut [f64]) -> Result<(), NumerixError> {
        out[0] = -y[0];
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let sol = integrate_adaptive(&decay, 0.0, &[1.0], 2.0, &Tolerance::new(1e-10)).unwrap();
        let (s, y) = sol.last();
        assert_eq!(*s, 2.0);
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-8);
        assert!(sol.grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn backwards() {
        let sol = integrate_adaptive(&decay, 0.0, &[1.0], -1.0, &Tolerance::new(1e-10)).unwrap();
        assert_eq!(sol.grid[0], -1.0);
        assert!((sol.values[0][0] - 1f64.exp()).abs() < 1e-8);
        assert!(sol.grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_precision() {
        let f = |_: f32, y: &[f32], out: &mut [f32]| -> Result<(), NumerixError> {
            out[0] = y[1];
            out[1] = -y[0];
            Ok(())
        };
        let sol = integrate_adaptive(&f, 0.0f32, &[0.0, 1.0], 1.0, &Tolerance::new(1e-5)).unwrap();
        assert!((sol.last().1[0] - 1f32.sin()).abs() < 1e-4);
    }
}
