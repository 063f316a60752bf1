//! Composite Simpson rules and Gauss–Legendre nodes.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use crate::error::{invalid, Error, Result};
use crate::math::{abs, cos, PI};
use crate::Complex;

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        abs(self)
    }
}

impl Integrand for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Composite Simpson rule on uniformly spaced samples with spacing `h`.
///
/// An even number of samples is handled with a closing 3/8 panel; two
/// samples fall back to the trapezoid rule.
pub fn simpson<T: Integrand>(values: &[T], h: f64) -> T {
    let n = values.len();
    match n {
        0 | 1 => T::zero(),
        2 => (values[0] + values[1]) * (0.5 * h),
        3 => (values[0] + values[1] * 4.0 + values[2]) * (h / 3.0),
        _ if n % 2 == 1 => simpson_odd(values, h),
        _ => {
            let head = if n - 3 >= 3 {
                simpson_odd(&values[..n - 3], h)
            } else {
                T::zero()
            };
            let t = &values[n - 4..];
            head + (t[0] + t[1] * 3.0 + t[2] * 3.0 + t[3]) * (3.0 * h / 8.0)
        }
    }
}

/// Composite Boole rule; `values.len() - 1` must be a multiple of four.
pub fn boole<T: Integrand>(values: &[T], h: f64) -> T {
    let n = values.len();
    debug_assert!(n >= 5 && (n - 1).is_multiple_of(4));
    let mut acc = T::zero();
    let mut i = 0;
    while i + 4 < n {
        acc = acc
            + (values[i] * 7.0 + values[i + 1] * 32.0 + values[i + 2] * 12.0 + values[i + 3] * 32.0 + values[i + 4] * 7.0);
        i += 4;
    }
    acc * (2.0 * h / 45.0)
}

fn simpson_odd<T: Integrand>(values: &[T], h: f64) -> T {
    let n = values.len();
    let mut odd = T::zero();
    let mut even = T::zero();
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd = odd + *v;
        } else {
            even = even + *v;
        }
    }
    (values[0] + values[n - 1] + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Simpson integration of `f` over `[lo, hi]`, doubling the number of
/// intervals (starting from `intervals`) until two successive estimates
/// agree to `rtol` relative. Returns the Richardson-corrected estimate.
pub fn adaptive_simpson<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    lo: f64,
    hi: f64,
    rtol: f64,
    intervals: usize,
) -> Result<T> {
    if !(rtol > 0.0) {
        return Err(invalid("rtol", "tolerance must be positive"));
    }
    if hi == lo {
        return Ok(T::zero());
    }
    const MAX_INTERVALS: usize = 1 << 22;
    let mut n = intervals.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let mut h = (hi - lo) / n as f64;
    let mut values: Vec<T> = (0..=n).map(|i| f(lo + h * i as f64)).collect();
    let mut prev = simpson(&values, h);
    loop {
        let mut next = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            next.push(values[i]);
            next.push(f(lo + h * (i as f64 + 0.5)));
        }
        next.push(values[n]);
        values = next;
        n *= 2;
        h *= 0.5;
        let cur = simpson(&values, h);
        let change = (cur - prev).magnitude();
        let scale = cur.magnitude().max(f64::MIN_POSITIVE);
        if change <= rtol * scale || change <= 1e-300 {
            return Ok(cur + (cur - prev) * (1.0 / 15.0));
        }
        if n >= MAX_INTERVALS {
            return Err(Error::QuadratureDiverged {
                tolerance: rtol,
                change: change / scale,
            });
        }
        prev = cur;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if abs(dx) < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre_interval(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| half * v).collect(),
    )
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
