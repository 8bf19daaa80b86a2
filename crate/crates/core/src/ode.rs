//! Dormand-Prince 5(4) stepper for autonomous planar systems.

pub type Vec2 = [f64; 2];

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
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;


#[inline]
fn axpy(y: Vec2, terms: &[(f64, Vec2)], h: f64) -> Vec2 {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Accepted {
    pub y: Vec2,
    /// Field at the new point (first stage of the next step).
    pub f: Vec2,
    pub h: f64,
    pub h_next: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64, h_max: f64) -> Self {
        Self {
            rtol,
            atol,
            h_max,
            h_min: 1e-14,
        }
    }

    /// Starting step from the local scale of the solution and the field.
    pub fn initial_step(&self, y: Vec2, f: Vec2) -> f64 {
        let sc = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = ((y[0] / sc(0)).powi(2) + (y[1] / sc(1)).powi(2)).sqrt();
        let d1 = ((f[0] / sc(0)).powi(2) + (f[1] / sc(1)).powi(2)).sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h.min(self.h_max).max(self.h_min)
    }

    /// One accepted step of size at most `h`, retrying on rejection.
    /// `None` when the step size underflows or the field stops being finite.
    pub fn step<F: Fn(Vec2) -> Vec2>(&self, f: &F, y: Vec2, k1: Vec2, mut h: f64) -> Option<Accepted> {
        h = h.min(self.h_max);
        loop {
            if !(h >= self.h_min) {
                return None;
            }
            let k2 = f(axpy(y, &[(A21, k1)], h));
            let k3 = f(axpy(y, &[(A31, k1), (A32, k2)], h));
            let k4 = f(axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h));
            let k5 = f(axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
            let k6 = f(axpy(
                y,
                &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
                h,
            ));
            let y5 = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
            let k7 = f(y5);
            let mut err = 0.0;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / 2.0).sqrt();
            let finite = y5[0].is_finite() && y5[1].is_finite() && k7[0].is_finite() && k7[1].is_finite();
            if finite && err <= 1.0 {
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                return Some(Accepted {
                    y: y5,
                    f: k7,
                    h,
                    h_next: (h * fac).min(self.h_max),
                });
            }
            let fac = if finite {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= fac;
        }
    }
}

/// Cubic Hermite interpolant on `[0, h]` through `(y0, d0)` and `(y1, d1)`,
/// evaluated at `t * h`.
#[inline]
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

#[inline]
pub fn hermite_deriv(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * y0 + (6.0 * t - 6.0 * t2) * y1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (3.0 * t2 - 2.0 * t) * d1
}
