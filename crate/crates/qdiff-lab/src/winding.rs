//! Angle change and winding numbers of a coefficient along closed loops.
//!
//! For a coefficient `f` of `f(z) dz^2` and a loop `z(t)`,
//! `AC = 1/2 Im ∮ (f'/f) ż dt + Im ∮ (z̈/ż) dt` and `wind = AC / pi`. Only
//! `f'/f` enters, so multivalued coefficients such as `z^{s-2}` need no
//! branch bookkeeping when their logarithmic derivative is supplied.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hurwitz::QDifferential;
use crate::quad::{composite_gauss, periodic_trapezoid};

pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum WindingError {
    #[error("coefficient is too close to zero or a pole near {0} for the loop resolution")]
    NearSingularity(C64),
    #[error("polyline loop needs at least three distinct vertices")]
    DegenerateLoop,
    #[error("Re(s) = {0} must exceed 2")]
    SBound(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LoopSpec {
    Circle { center: C64, radius: f64, samples: usize },
    /// Vertices in order; the closing edge back to the first vertex is implied.
    Polyline { vertices: Vec<C64>, samples_per_edge: usize },
}

impl LoopSpec {
    pub fn circle(center: C64, radius: f64) -> Self {
        LoopSpec::Circle {
            center,
            radius,
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn polygon(vertices: Vec<C64>) -> Self {
        LoopSpec::Polyline {
            vertices,
            samples_per_edge: 64,
        }
    }

    /// The same loop with doubled resolution.
    pub fn refined(&self) -> Self {
        match self {
            LoopSpec::Circle { center, radius, samples } => LoopSpec::Circle {
                center: *center,
                radius: *radius,
                samples: samples * 2,
            },
            LoopSpec::Polyline { vertices, samples_per_edge } => LoopSpec::Polyline {
                vertices: vertices.clone(),
                samples_per_edge: samples_per_edge * 2,
            },
        }
    }

    /// Signed area; positive for counterclockwise loops.
    pub fn signed_area(&self) -> f64 {
        match self {
            LoopSpec::Circle { radius, .. } => PI * radius * radius,
            LoopSpec::Polyline { vertices, .. } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        a.re * b.im - a.im * b.re
                    })
                    .sum::<f64>()
                    / 2.0
            }
        }
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area() > 0.0
    }
}

/// A coefficient known through its logarithmic derivative, its values, or both.
pub struct Coefficient<'a> {
    pub value: Option<Box<dyn Fn(C64) -> C64 + 'a>>,
    pub log_derivative: Option<Box<dyn Fn(C64) -> C64 + 'a>>,
}

impl<'a> Coefficient<'a> {
    pub fn from_log_derivative(g: impl Fn(C64) -> C64 + 'a) -> Self {
        Coefficient {
            value: None,
            log_derivative: Some(Box::new(g)),
        }
    }

    /// Values only; `f'/f` comes from central differences.
    pub fn from_values(f: impl Fn(C64) -> C64 + 'a) -> Self {
        Coefficient {
            value: Some(Box::new(f)),
            log_derivative: None,
        }
    }

    /// `prod (z - c_j)^{e_j}` with complex exponents.
    pub fn power_product(factors: Vec<(C64, C64)>) -> Self {
        Coefficient::from_log_derivative(move |z| factors.iter().map(|(c, e)| e / (z - c)).sum())
    }

    pub fn of(q: &'a QDifferential) -> Self {
        Coefficient::from_log_derivative(move |z| q.log_derivative(z))
    }

    fn eval_log_derivative(&self, z: C64, h: f64) -> Result<C64, WindingError> {
        if let Some(g) = &self.log_derivative {
            let v = g(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(WindingError::NearSingularity(z));
            }
            return Ok(v);
        }
        let f = self.value.as_ref().expect("coefficient has neither values nor derivative");
        let (a, b, c) = (f(z + h), f(z - h), f(z));
        if c.norm() < 1e-300 || a.norm() < 1e-300 || b.norm() < 1e-300 {
            return Err(WindingError::NearSingularity(z));
        }
        // the ratio is near 1, so its principal logarithm is safe
        Ok((a / b).ln() / (2.0 * h))
    }
}

/// Angle change of the horizontal direction field along a loop.
pub fn angle_change(f: &Coefficient, lp: &LoopSpec) -> Result<f64, WindingError> {
    match lp {
        LoopSpec::Circle { center, radius, samples } => {
            let n = *samples;
            let dt = 2.0 * PI / n as f64;
            let h = 1e-5 * radius;
            let mut err = None;
            let first = periodic_trapezoid(
                |t| {
                    let e = C64::from_polar(1.0, t);
                    let z = center + e * radius;
                    let zdot = C64::new(0.0, 1.0) * e * radius;
                    match f.eval_log_derivative(z, h) {
                        Ok(g) => {
                            if (g * zdot).norm() * dt > 0.5 {
                                err.get_or_insert(z);
                            }
                            g * zdot
                        }
                        Err(_) => {
                            err.get_or_insert(z);
                            C64::new(0.0, 0.0)
                        }
                    }
                },
                n,
            );
            if let Some(z) = err {
                return Err(WindingError::NearSingularity(z));
            }
            // z̈/ż = i on a circle
            Ok(0.5 * first.im + 2.0 * PI)
        }
        LoopSpec::Polyline { vertices, samples_per_edge } => {
            let mut v: Vec<C64> = vertices.clone();
            if v.len() > 1 && (v[0] - v[v.len() - 1]).norm() == 0.0 {
                v.pop();
            }
            if v.len() < 3 {
                return Err(WindingError::DegenerateLoop);
            }
            let n = v.len();
            let mut total = C64::new(0.0, 0.0);
            let mut err = None;
            for i in 0..n {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let d = b - a;
                let h = 1e-6 * d.norm();
                let panels = (*samples_per_edge / 8).max(1);
                total += composite_gauss(
                    |t| match f.eval_log_derivative(a + d * t, h) {
                        Ok(g) => {
                            if g.norm() * d.norm() / *samples_per_edge as f64 > 0.5 {
                                err.get_or_insert(a + d * t);
                            }
                            g * d
                        }
                        Err(_) => {
                            err.get_or_insert(a + d * t);
                            C64::new(0.0, 0.0)
                        }
                    },
                    0.0,
                    1.0,
                    panels,
                    8,
                );
            }
            if let Some(z) = err {
                return Err(WindingError::NearSingularity(z));
            }
            // the tangent turns only at the corners
            let turning: f64 = (0..n)
                .map(|i| {
                    let d0 = v[(i + 1) % n] - v[i];
                    let d1 = v[(i + 2) % n] - v[(i + 1) % n];
                    (d1 / d0).arg()
                })
                .sum();
            Ok(0.5 * total.im + turning)
        }
    }
}

pub fn winding_number(f: &Coefficient, lp: &LoopSpec) -> Result<f64, WindingError> {
    Ok(angle_change(f, lp)? / PI)
}

/// Closed forms for a small loop around one singularity.
pub fn wind_at_zero(s: C64) -> f64 {
    s.re
}

pub fn wind_at_pole(k: u32, l: i64, s: C64) -> f64 {
    -(k as f64) * (s.re - 2.0) - l as f64 + 2.0
}

pub fn wind_exp_type(l: i64) -> f64 {
    2.0 - l as f64
}

/// Whether `k > k_i - (k_i + 3 - l_i) / Re(s)`.
pub fn estimate_bound_check(k_i: u32, l_i: i64, s: C64, k: u32) -> Result<bool, WindingError> {
    if s.re <= 2.0 {
        return Err(WindingError::SBound(s.re));
    }
    Ok(k as f64 > estimate_threshold(k_i, l_i, s))
}

pub fn estimate_threshold(k_i: u32, l_i: i64, s: C64) -> f64 {
    k_i as f64 - (k_i as f64 + 3.0 - l_i as f64) / s.re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_coefficient() {
        let f = Coefficient::from_values(|_| c(1.0, 0.0));
        let ac = angle_change(&f, &LoopSpec::circle(c(0.0, 0.0), 1.0)).unwrap();
        assert!((ac - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn simple_zero_closed_form() {
        let s = c(3.7, 0.0);
        let f = Coefficient::power_product(vec![(c(0.0, 0.0), s - 2.0)]);
        let ac = angle_change(&f, &LoopSpec::circle(c(0.0, 0.0), 1.0)).unwrap();
        assert!((ac - PI * 3.7).abs() < 1e-6);
    }

    #[test]
    fn pole_closed_form() {
        let (k, l, s) = (2u32, 3i64, c(3.5, 0.2));
        let f = Coefficient::power_product(vec![(c(0.0, 0.0), -(s - 2.0) * k as f64 - l as f64)]);
        let w = winding_number(&f, &LoopSpec::circle(c(0.0, 0.0), 1.0)).unwrap();
        assert!((w - -4.0).abs() < 1e-6);
        assert!((w - wind_at_pole(k, l, s)).abs() < 1e-6);
    }

    #[test]
    fn exponential_type() {
        // e^{1/z^2} z^{-3}
        let f = Coefficient::from_log_derivative(|z: C64| -2.0 / z.powi(3) - 3.0 / z);
        let w = winding_number(&f, &LoopSpec::circle(c(0.0, 0.0), 0.5)).unwrap();
        assert!((w + 1.0).abs() < 1e-6);
    }

    #[test]
    fn central_differences_match() {
        let f = Coefficient::from_values(|z: C64| (z - 0.2).powi(2) / (z + c(0.1, 0.3)));
        let w = winding_number(&f, &LoopSpec::circle(c(0.0, 0.0), 1.0)).unwrap();
        // (1/2)(2 - 1)(2 pi) + 2 pi = 3 pi
        assert!((w - 3.0).abs() < 1e-6);
    }

    #[test]
    fn polyline_square_matches_circle() {
        let s = c(4.2, -0.3);
        let f = Coefficient::power_product(vec![(c(0.1, 0.0), s - 2.0), (c(-0.2, 0.1), s - 2.0)]);
        let sq = LoopSpec::polygon(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]);
        let a = winding_number(&f, &sq).unwrap();
        let b = winding_number(&f, &LoopSpec::circle(c(0.0, 0.0), 0.9)).unwrap();
        assert!((a - b).abs() < 1e-8);
        assert!((a - (2.0 * (s.re - 2.0) + 2.0)).abs() < 1e-8);
    }

    #[test]
    fn bound_examples() {
        assert!(estimate_bound_check(3, 4, c(5.0, 0.0), 3).unwrap());
        assert!(!estimate_bound_check(3, 4, c(5.0, 0.0), 2).unwrap());
        // Re(s) = k_i + 3 - l_i puts the threshold at k_i - 1
        assert!((estimate_threshold(3, 1, c(5.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn loop_through_zero_is_rejected() {
        let f = Coefficient::power_product(vec![(c(1.0, 0.0), c(1.5, 0.0))]);
        assert!(angle_change(&f, &LoopSpec::circle(c(0.0, 0.0), 1.0)).is_err());
    }
}
