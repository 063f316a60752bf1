//! Adaptive Dormand–Prince 5(4) integration for small real systems.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{abs, pow, sqrt};

/// Step control for the interior ODE integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step as a fraction of the integration interval.
    pub max_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step_fraction: 1.0 / 400.0,
            max_steps: 2_000_000,
        }
    }
}

impl OdeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(invalid("ode tolerance", "tolerances must be positive"));
        }
        if !(self.max_step_fraction > 0.0 && self.max_step_fraction <= 1.0) {
            return Err(invalid("max_step_fraction", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x1 > x0`, restarting at every
/// breakpoint in `breaks` so that no step straddles a kink of `f`.
/// Returns every accepted point including both ends.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    y0: [f64; N],
    x1: f64,
    breaks: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<(f64, [f64; N])>> {
    settings.validate()?;
    if !(x1 > x0) {
        return Err(invalid("interval", "integration interval must be non-empty"));
    }
    let h_max = (x1 - x0) * settings.max_step_fraction;
    let mut stops: Vec<f64> = breaks.iter().copied().filter(|b| *b > x0 && *b < x1).collect();
    stops.push(x1);

    let mut out = Vec::new();
    out.push((x0, y0));
    let mut x = x0;
    let mut y = y0;
    let mut h = h_max;
    let mut steps = 0usize;
    let mut k1 = f(x, &y);
    for stop in stops {
        while x < stop {
            steps += 1;
            if steps > settings.max_steps {
                return Err(Error::OdeFailure {
                    position: x,
                    reason: "step budget exhausted",
                });
            }
            let last = x + h >= stop;
            let step = if last { stop - x } else { h };
            let k2 = f(x + C2 * step, &axpy(&y, &[(A21, &k1)], step));
            let k3 = f(x + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = f(x + C4 * step, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = f(
                x + C5 * step,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step),
            );
            let k6 = f(
                x + step,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let x_new = if last { stop } else { x + step };
            let k7 = f(x_new, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = settings.atol + settings.rtol * abs(y[i]).max(abs(y_new[i]));
                err += (e / sc) * (e / sc);
            }
            let err = sqrt(err / N as f64);
            if !err.is_finite() {
                return Err(Error::OdeFailure {
                    position: x,
                    reason: "non-finite solution",
                });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * pow(err, -0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                x = x_new;
                y = y_new;
                k1 = k7;
                out.push((x, y));
                // a step clipped to a breakpoint says little about the next one
                h = if last { h.max(step * factor) } else { step * factor }.min(h_max);
            } else {
                h = step * factor;
                if h < 1e-14 * (abs(x) + (x1 - x0)) {
                    return Err(Error::OdeFailure {
                        position: x,
                        reason: "step size underflow",
                    });
                }
            }
        }
        k1 = f(x, &y);
    }
    Ok(out)
}
