//! Dormand–Prince 5(4) stepping for a single complex unknown.

use num_complex::Complex64 as C64;

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

/// One step of size `h` from `(t, y)`. Returns the fifth order solution and
/// the embedded error estimate. `None` if the right-hand side failed.
pub fn dopri_step<F: FnMut(f64, C64) -> Option<C64>>(f: &mut F, t: f64, y: C64, h: f64) -> Option<(C64, f64)> {
    let k1 = f(t, y)?;
    let k2 = f(t + C2 * h, y + k1 * (h * A21))?;
    let k3 = f(t + C3 * h, y + (k1 * A31 + k2 * A32) * h)?;
    let k4 = f(t + C4 * h, y + (k1 * A41 + k2 * A42 + k3 * A43) * h)?;
    let k5 = f(t + C5 * h, y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h)?;
    let k6 = f(t + h, y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h)?;
    let y5 = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
    let k7 = f(t + h, y5)?;
    let err = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
    Some((y5, err.norm()))
}

/// Step size update from an error ratio `err / tol`.
pub fn next_step(h: f64, ratio: f64) -> f64 {
    let factor = if ratio <= 1e-12 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
    h * factor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut f = |_t: f64, y: C64| Some(y * C64::new(0.0, 1.0));
        let (mut t, mut y, mut h) = (0.0f64, C64::new(1.0, 0.0), 0.1f64);
        while t < 1.0 {
            h = h.min(1.0 - t);
            let (y1, err) = dopri_step(&mut f, t, y, h).unwrap();
            let ratio = err / 1e-12;
            if ratio <= 1.0 {
                t += h;
                y = y1;
            }
            h = next_step(h, ratio);
        }
        assert!((y - C64::from_polar(1.0, 1.0)).norm() < 1e-10);
    }
}
