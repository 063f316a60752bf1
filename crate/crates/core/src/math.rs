//! Thin wrappers over `libm` so the crate builds without `std`, plus the
//! entire functions that keep rectangular-barrier formulas regular across
//! the `E = V0` point.

pub(crate) use core::f64::consts::{FRAC_PI_2, PI};

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub(crate) fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}
#[inline]
pub(crate) fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x - two_pi * floor((x + PI) / two_pi);
    if y <= -PI {
        y += two_pi;
    }
    y
}

const SERIES_LIMIT: f64 = 1.0;
const SERIES_TERMS: i32 = 14;

/// `sinh(sqrt(w))/sqrt(w)`, continued to `sin(sqrt(-w))/sqrt(-w)` for `w < 0`.
pub(crate) fn sinhc(w: f64) -> f64 {
    if abs(w) < SERIES_LIMIT {
        // sum w^n / (2n+1)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..SERIES_TERMS {
            term *= w / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
        }
        sum
    } else if w > 0.0 {
        let r = sqrt(w);
        sinh(r) / r
    } else {
        let r = sqrt(-w);
        sin(r) / r
    }
}

/// `cosh(sqrt(w))`, continued to `cos(sqrt(-w))` for `w < 0`.
pub(crate) fn coshc(w: f64) -> f64 {
    if w >= 0.0 {
        cosh(sqrt(w))
    } else {
        cos(sqrt(-w))
    }
}

/// `(sinhc(w) - 1)/w`, regular at `w = 0` where it equals `1/6`.
pub(crate) fn sinhc_m1(w: f64) -> f64 {
    if abs(w) < SERIES_LIMIT {
        // sum w^n / (2n+3)!
        let mut term = 1.0 / 6.0;
        let mut sum = term;
        for n in 1..SERIES_TERMS {
            term *= w / ((2 * n + 2) as f64 * (2 * n + 3) as f64);
            sum += term;
        }
        sum
    } else {
        (sinhc(w) - 1.0) / w
    }
}

/// `(coshc(w) - sinhc(w))/w`, regular at `w = 0` where it equals `1/3`.
pub(crate) fn cosh_minus_sinhc(w: f64) -> f64 {
    if abs(w) < SERIES_LIMIT {
        // sum w^n (2n+2) / (2n+3)!
        let mut fact = 6.0; // (2n+3)! at n = 0
        let mut pow = 1.0;
        let mut sum = 2.0 / 6.0;
        for n in 1..SERIES_TERMS {
            fact *= (2 * n + 2) as f64 * (2 * n + 3) as f64;
            pow *= w;
            sum += pow * (2 * n + 2) as f64 / fact;
        }
        sum
    } else {
        (coshc(w) - sinhc(w)) / w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entire_functions_match_closed_forms_across_switch() {
        for &w in &[-3.0, -1.0001, -0.9999, -0.3, 0.2, 0.9999, 1.0001, 4.0] {
            let (s, c) = if w > 0.0 {
                (sinh(sqrt(w)) / sqrt(w), cosh(sqrt(w)))
            } else {
                (sin(sqrt(-w)) / sqrt(-w), cos(sqrt(-w)))
            };
            assert!((sinhc(w) - s).abs() < 1e-15);
            assert!((coshc(w) - c).abs() < 1e-15);
            assert!((sinhc_m1(w) - (s - 1.0) / w).abs() < 1e-13);
            assert!((cosh_minus_sinhc(w) - (c - s) / w).abs() < 1e-13);
        }
        assert_eq!(sinhc_m1(0.0), 1.0 / 6.0);
        assert_eq!(cosh_minus_sinhc(0.0), 1.0 / 3.0);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
        assert!((wrap_angle(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-12);
    }
}
