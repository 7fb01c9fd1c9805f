//! Horizontal foliations of single-valued differentials `g(z) dz^2` on the
//! sphere: trajectory tracing, separatrices, the strip decomposition and
//! saddle connections.
//!
//! Trajectories at phase `theta` satisfy `sqrt(g) dz ∈ e^{i theta} R`. They
//! are integrated in Euclidean arclength along the unit field
//! `e^{i theta} / sqrt(g)`, with the flat coordinate `w = ∫ sqrt(g) dz`
//! tracked by quadrature on each step chord. After every step the point is
//! pushed back onto its leaf `Im(e^{-i theta} w) = const`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hurwitz::{Flavor, PoleLoc, QDifferential};
use crate::ode::{dopri_step, next_step};
use crate::poly::{cluster_roots, Poly};
use crate::quad::gauss_legendre;

#[derive(Debug, Error, PartialEq)]
pub enum FlatError {
    #[error("local orders are not integers (s = {0}); trace a plain restriction instead")]
    NonIntegerOrder(C64),
    #[error("the differential vanishes at infinity")]
    ZeroAtInfinity,
    #[error("path comes within the clearance margin of a singularity near {0}")]
    Clearance(C64),
    #[error("closed trajectory through {0}: ring domain")]
    RingDomain(C64),
    #[error("separatrix {ray} of zero {zero} exhausted its budget (recurrent trajectory suspected)")]
    Recurrent { zero: usize, ray: usize },
    #[error("poles of order {0} are not handled by the strip decomposition")]
    UnsupportedPole(u32),
    #[error("strip assembly is inconsistent: {0}")]
    Assembly(String),
    #[error("differential has no singularities")]
    Empty,
}

/// `g(z) = scale · prod (z - c_i)^{e_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlainDifferential {
    pub scale: C64,
    pub factors: Vec<(C64, i32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleData {
    pub at: PoleLoc,
    pub order: u32,
}

impl PlainDifferential {
    pub fn new(scale: C64, factors: Vec<(C64, i32)>) -> Result<Self, FlatError> {
        let mut merged: Vec<(C64, i32)> = Vec::new();
        for (c, e) in factors {
            match merged.iter_mut().find(|(d, _)| (*d - c).norm() <= 1e-12 * (1.0 + c.norm())) {
                Some(entry) => entry.1 += e,
                None => merged.push((c, e)),
            }
        }
        merged.retain(|f| f.1 != 0);
        let pd = PlainDifferential { scale, factors: merged };
        if pd.infinity_order() < 0 {
            return Err(FlatError::ZeroAtInfinity);
        }
        Ok(pd)
    }

    pub fn from_rational(num: &Poly, den: &Poly) -> Result<Self, FlatError> {
        let mut factors: Vec<(C64, i32)> = cluster_roots(&num.roots(), 1e-7)
            .into_iter()
            .map(|(c, m)| (c, m as i32))
            .collect();
        factors.extend(cluster_roots(&den.roots(), 1e-7).into_iter().map(|(c, m)| (c, -(m as i32))));
        PlainDifferential::new(num.leading() / den.leading(), factors)
    }

    /// The single-valued differential of a plain (or integer-`s`) cover.
    pub fn from_qdiff(q: &QDifferential) -> Result<Self, FlatError> {
        let s = q.s;
        let integral = s.im == 0.0 && s.re.fract() == 0.0;
        if q.flavor == Flavor::ExpType || !integral {
            return Err(FlatError::NonIntegerOrder(s));
        }
        let e = s.re as i32 - 2;
        let cover = &q.cover;
        let lead = cover.num.leading() / cover.den.leading();
        let mut factors: Vec<(C64, i32)> = cluster_roots(&cover.zeros, 1e-8)
            .into_iter()
            .map(|(c, m)| (c, m as i32 * e))
            .collect();
        for (p, &l) in cover.poles.iter().zip(&q.l) {
            if let Some(z) = p.at.finite() {
                factors.push((z, -(p.k as i32) * e - l as i32));
            }
        }
        PlainDifferential::new(lead.powi(e), factors)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.factors.iter().fold(self.scale, |acc, (c, e)| acc * (z - c).powi(*e))
    }

    pub fn log_derivative(&self, z: C64) -> C64 {
        self.factors.iter().map(|(c, e)| *e as f64 / (z - c)).sum()
    }

    /// Pole order at infinity (negative for a zero there).
    pub fn infinity_order(&self) -> i32 {
        self.factors.iter().map(|f| f.1).sum::<i32>() + 4
    }

    pub fn zeros(&self) -> Vec<(C64, u32)> {
        self.factors.iter().filter(|f| f.1 > 0).map(|&(c, e)| (c, e as u32)).collect()
    }

    /// Finite poles first, then infinity when it is a pole.
    pub fn poles(&self) -> Vec<PoleData> {
        let mut out: Vec<PoleData> = self
            .factors
            .iter()
            .filter(|f| f.1 < 0)
            .map(|&(c, e)| PoleData {
                at: PoleLoc::Finite(c),
                order: (-e) as u32,
            })
            .collect();
        let m = self.infinity_order();
        if m > 0 {
            out.push(PoleData {
                at: PoleLoc::INF,
                order: m as u32,
            });
        }
        out
    }

    /// Distance to the nearest finite singularity.
    pub fn clearance(&self, z: C64) -> f64 {
        self.factors.iter().map(|(c, _)| (z - c).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Length scale for step control: distance to the nearest finite
    /// singularity, but never more than `|z|` plus the singularity radius.
    fn local_scale(&self, z: C64) -> f64 {
        self.clearance(z).min(z.norm() + self.radius()).max(1e-300)
    }

    fn radius(&self) -> f64 {
        self.factors.iter().map(|(c, _)| c.norm()).fold(1.0, f64::max)
    }

    /// `g / (z - c_i)^{e_i}` with the `i`-th factor removed.
    fn reduced(&self, skip: usize, z: C64) -> C64 {
        self.factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .fold(self.scale, |acc, (_, (c, e))| acc * (z - c).powi(*e))
    }

    fn factor_index(&self, at: C64) -> Option<usize> {
        self.factors.iter().position(|(c, _)| (*c - at).norm() <= 1e-12 * (1.0 + at.norm()))
    }

    /// Nearest-other-singularity distance of factor `i`.
    fn isolation(&self, i: usize) -> f64 {
        let c = self.factors[i].0;
        self.factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (d, _))| (c - d).norm())
            .fold(2.0 * (1.0 + c.norm()), f64::min)
    }
}

fn align(v: C64, reference: C64) -> C64 {
    if (v * reference.conj()).re < 0.0 {
        -v
    } else {
        v
    }
}

fn finite(v: C64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// `∫ sqrt(g)` along a parametrized path with the branch continued from
/// `start` node by node. Returns the integral and the branch at the end.
fn integrate_branch<P: Fn(f64) -> (C64, C64)>(pd: &PlainDifferential, path: P, t0: f64, t1: f64, panels: usize, start: C64) -> (C64, C64) {
    let (x, w) = gauss_legendre(10);
    let h = (t1 - t0) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    let mut s = start;
    for p in 0..panels {
        let c = t0 + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let (z, dz) = path(c + 0.5 * h * xi);
            s = align(pd.eval(z).sqrt(), s);
            total += s * dz * (wi * 0.5 * h);
        }
    }
    let (zend, _) = path(t1);
    (total, align(pd.eval(zend).sqrt(), s))
}

fn chord(pd: &PlainDifferential, a: C64, b: C64, start: C64) -> (C64, C64) {
    integrate_branch(pd, |t| (a + (b - a) * t, b - a), 0.0, 1.0, 1, start)
}

/// `∫_{zero}^{z} sqrt(g)` from the zero at factor `i`, with the branch at `z`
/// aligned to `reference`. Returns the integral and `sqrt(g(z))`.
fn from_zero(pd: &PlainDifferential, i: usize, z: C64, reference: C64) -> (C64, C64) {
    let (a, m) = pd.factors[i];
    let m = m as f64;
    let sh0 = pd.reduced(i, a).sqrt();
    let d = z - a;
    let (x, w) = gauss_legendre(24);
    let mut acc = C64::new(0.0, 0.0);
    let mut s = sh0;
    for (xi, wi) in x.iter().zip(&w) {
        let u = 0.5 * (xi + 1.0);
        s = align(pd.reduced(i, a + d * u * u).sqrt(), s);
        acc += s * u.powf(m + 1.0) * (0.5 * wi);
    }
    let sz = align(pd.reduced(i, z).sqrt(), s);
    let l = d.ln();
    let big_w = (l * ((m + 2.0) / 2.0)).exp() * acc * 2.0;
    let sq = sz * (l * (m / 2.0)).exp();
    if (sq * reference.conj()).re < 0.0 {
        (-big_w, -sq)
    } else {
        (big_w, sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Termination {
    HitsZero(usize),
    EscapesToPole(usize),
    /// Simple poles sit at finite distance and absorb trajectories.
    HitsPole(usize),
    LengthBudget,
    Closed,
}

/// Where a trajectory crossed the ordering circle of a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub pole: usize,
    pub z: C64,
    /// Flat coordinate relative to the trajectory origin.
    pub w: C64,
    pub sqrt: C64,
    /// Angle used for cyclic ordering around the pole.
    pub key: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<C64>,
    pub phase: f64,
    pub termination: Termination,
    /// Length in the flat metric.
    pub arc_length: f64,
    /// `(zero index, ray index)` for rays emitted from zeros.
    pub origin: Option<(usize, usize)>,
    /// Asymptotic direction index at the terminal pole.
    pub direction: Option<usize>,
    /// Flat coordinate of the end point relative to the origin.
    pub end_w: C64,
    #[serde(skip)]
    pub crossings: Vec<Crossing>,
    /// Largest `|Im(e^{-i theta} Δw)|` removed by the leaf projection.
    pub max_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Local error tolerance relative to the distance to singularities.
    pub tol: f64,
    /// Capture radius around zeros in flat units.
    pub capture: f64,
    pub max_steps: usize,
    /// Budget in flat length.
    pub budget: f64,
    pub threads: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            tol: 1e-10,
            capture: 1e-5,
            max_steps: 200_000,
            budget: f64::INFINITY,
            threads: 1,
        }
    }
}

/// Geometry shared by all traces of one differential.
pub struct Foliation<'a> {
    pub pd: &'a PlainDifferential,
    pub zeros: Vec<usize>,
    pub poles: Vec<PoleData>,
    pole_factor: Vec<Option<usize>>,
    order_radius: Vec<f64>,
    opts: TraceOptions,
}

impl<'a> Foliation<'a> {
    pub fn new(pd: &'a PlainDifferential, opts: TraceOptions) -> Self {
        let zeros: Vec<usize> = (0..pd.factors.len()).filter(|&i| pd.factors[i].1 > 0).collect();
        let poles = pd.poles();
        let pole_factor: Vec<Option<usize>> = poles.iter().map(|p| p.at.finite().and_then(|z| pd.factor_index(z))).collect();
        let big = 2.0 * (1.0 + pd.radius());
        let order_radius = pole_factor
            .iter()
            .map(|f| match f {
                Some(i) => 0.25 * pd.isolation(*i),
                None => big,
            })
            .collect();
        Foliation {
            pd,
            zeros,
            poles,
            pole_factor,
            order_radius,
            opts,
        }
    }

    pub fn zero_point(&self, zero: usize) -> C64 {
        self.pd.factors[self.zeros[zero]].0
    }

    pub fn zero_order(&self, zero: usize) -> u32 {
        self.pd.factors[self.zeros[zero]].1 as u32
    }

    /// Leading coefficient `c` with `g ~ c t^order` at a singularity.
    fn leading(&self, factor: usize) -> C64 {
        self.pd.reduced(factor, self.pd.factors[factor].0)
    }

    /// Initial angle of ray `j` at phase `theta` from a zero.
    pub fn ray_angle(&self, zero: usize, j: usize, theta: f64) -> f64 {
        let f = self.zeros[zero];
        let m = self.pd.factors[f].1 as f64;
        let arg = self.leading(f).sqrt().arg();
        2.0 * (theta - arg + j as f64 * PI) / (m + 2.0)
    }

    /// Asymptotic direction angles at a pole of order at least 3.
    pub fn pole_directions(&self, pole: usize, theta: f64) -> Vec<f64> {
        let m = self.poles[pole].order as f64;
        let k = (m - 2.0).round() as usize;
        match self.pole_factor[pole] {
            None => {
                let arg = self.pd.scale.sqrt().arg();
                (0..k).map(|j| 2.0 * (theta - arg + j as f64 * PI) / (m - 2.0)).collect()
            }
            Some(f) => {
                let arg = self.leading(f).sqrt().arg();
                (0..k).map(|j| -2.0 * (theta - arg + j as f64 * PI) / (m - 2.0)).collect()
            }
        }
    }

    /// Ordering keys halfway between consecutive asymptotic directions; a
    /// gap between separatrices containing one of them lies in a half-plane.
    fn direction_bisectors(&self, pole: usize, theta: f64) -> Vec<f64> {
        let mut keys: Vec<f64> = self
            .pole_directions(pole, theta)
            .into_iter()
            .map(|a| match self.pole_factor[pole] {
                None => a.rem_euclid(2.0 * PI),
                Some(_) => (-a).rem_euclid(2.0 * PI),
            })
            .collect();
        keys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = keys.len();
        (0..n)
            .map(|j| {
                let gap = if n == 1 { 2.0 * PI } else { (keys[(j + 1) % n] - keys[j]).rem_euclid(2.0 * PI) };
                (keys[j] + 0.5 * gap).rem_euclid(2.0 * PI)
            })
            .collect()
    }

    /// Index of the asymptotic direction nearest to `z` and the fit residual
    /// in units of half the direction spacing.
    fn direction_of(&self, pole: usize, z: C64, theta: f64) -> (usize, f64) {
        let m = self.poles[pole].order as f64;
        let k = m - 2.0;
        let t = match self.pole_factor[pole] {
            None => (0.5 * k * z.arg() + self.pd.scale.sqrt().arg() - theta) / PI,
            Some(f) => {
                let u = z - self.pd.factors[f].0;
                (-0.5 * k * u.arg() + self.leading(f).sqrt().arg() - theta) / PI
            }
        };
        let j = t.round();
        ((j as i64).rem_euclid(k as i64) as usize, (t - j).abs())
    }

    fn crossing_key(&self, pole: usize, z: C64) -> f64 {
        match self.pole_factor[pole] {
            None => z.arg().rem_euclid(2.0 * PI),
            Some(f) => (-(z - self.pd.factors[f].0).arg()).rem_euclid(2.0 * PI),
        }
    }

    fn circle_point(&self, pole: usize, key: f64) -> (C64, C64) {
        let r = self.order_radius[pole];
        match self.pole_factor[pole] {
            None => {
                let e = C64::from_polar(1.0, key);
                (e * r, C64::new(0.0, 1.0) * e * r)
            }
            Some(f) => {
                let e = C64::from_polar(1.0, -key);
                (self.pd.factors[f].0 + e * r, C64::new(0.0, -1.0) * e * r)
            }
        }
    }

    fn outside_order_circle(&self, pole: usize, z: C64) -> bool {
        match self.pole_factor[pole] {
            None => z.norm() > self.order_radius[pole],
            Some(f) => (z - self.pd.factors[f].0).norm() < self.order_radius[pole],
        }
    }

    /// Start of ray `j` from `zero`: a point at a fixed small flat distance,
    /// the branch there, and the flat coordinate.
    fn ray_start(&self, zero: usize, j: usize, theta: f64) -> (C64, C64, C64) {
        let f = self.zeros[zero];
        let (a, m) = self.pd.factors[f];
        let rot = C64::from_polar(1.0, theta);
        let beta = self.ray_angle(zero, j, theta);
        let u = C64::from_polar(1.0, beta);
        let r0 = 0.02 * self.pd.isolation(f);
        let mut z = a + u * r0;
        let mut s = self.pd.eval(z).sqrt();
        if ((rot / s) * u.conj()).re < 0.0 {
            s = -s;
        }
        let (w_guess, s_guess) = from_zero(self.pd, f, z, s);
        s = s_guess;
        let tau0 = (rot.conj() * w_guess).re;
        let target = rot * tau0;
        let mut w = w_guess;
        for _ in 0..12 {
            let step = (w - target) / s;
            z -= step;
            let (w1, s1) = from_zero(self.pd, f, z, s);
            w = w1;
            s = s1;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let _ = m;
        (z, s, w)
    }

    /// Flat distance from `z` to the zero at factor `f`, when `z` is close.
    fn flat_distance_to_zero(&self, f: usize, z: C64) -> Option<f64> {
        let a = self.pd.factors[f].0;
        if (z - a).norm() > 0.5 * self.pd.isolation(f) {
            return None;
        }
        Some(from_zero(self.pd, f, z, C64::new(1.0, 0.0)).0.norm())
    }

    /// Traces a leaf from `start` with branch `sqrt0`, moving along
    /// `e^{i theta} / sqrt0`.
    pub fn trace(&self, theta: f64, start: C64, sqrt0: C64, w0: C64, origin: Option<(usize, usize)>, tau0: f64, budget: f64) -> Trajectory {
        let pd = self.pd;
        let rot = C64::from_polar(1.0, theta);
        let leaf = (rot.conj() * w0).im;
        let mut z = start;
        let mut s = sqrt0;
        let mut w = w0;
        let mut tau = tau0;
        let mut travelled = 0.0;
        let mut points = vec![z];
        let mut crossings: Vec<Crossing> = Vec::new();
        let mut max_drift: f64 = 0.0;
        let mut h = 0.05 * pd.local_scale(z);
        let start_scale = pd.local_scale(start);
        let tol = self.opts.tol;
        let mut termination = Termination::LengthBudget;
        let mut direction = None;
        let mut end_w = w;
        let mut steps = 0;
        'outer: while steps < self.opts.max_steps {
            steps += 1;
            let rho = pd.local_scale(z);
            h = h.min(0.1 * rho).max(1e-14 * (1.0 + z.norm()));
            let sref = s;
            let mut field = |_t: f64, y: C64| -> Option<C64> {
                let g = pd.eval(y);
                if !finite(g) || g.norm() == 0.0 {
                    return None;
                }
                let v = rot / align(g.sqrt(), sref);
                Some(v / v.norm())
            };
            let Some((z1, err)) = dopri_step(&mut field, 0.0, z, h) else {
                h *= 0.25;
                continue;
            };
            let ratio = err / (tol * rho);
            if ratio > 1.0 {
                h = next_step(h, ratio);
                continue;
            }
            let (dw, s1) = chord(pd, z, z1, s);
            let mut z1 = z1;
            let mut w1 = w + dw;
            let mut s1 = s1;
            let drift = (rot.conj() * w1).im - leaf;
            max_drift = max_drift.max(drift.abs());
            let shift = C64::new(0.0, 1.0) * rot * drift;
            z1 -= shift / s1;
            w1 -= shift;
            s1 = align(pd.eval(z1).sqrt(), s1);
            tau += (rot.conj() * (w1 - w)).re;
            travelled += (z1 - z).norm();

            // ordering circles
            for (pole, _) in self.poles.iter().enumerate() {
                if self.poles[pole].order < 3 {
                    continue;
                }
                let was = self.outside_order_circle(pole, z);
                let now = self.outside_order_circle(pole, z1);
                if !was && now {
                    if let Some(c) = self.refine_crossing(pole, z, w, s, z1, rot, leaf) {
                        crossings.push(c);
                    }
                }
            }
            // closed leaves
            if origin.is_none() && travelled > 2.0 * start_scale {
                let d = z1 - z;
                let t = ((start - z) * d.conj()).re / d.norm_sqr();
                let nearest = z + d * t.clamp(0.0, 1.0);
                if (nearest - start).norm() < 1e-5 * start_scale {
                    points.push(z1);
                    termination = Termination::Closed;
                    end_w = w1;
                    break 'outer;
                }
            }
            z = z1;
            w = w1;
            s = s1;
            points.push(z);
            end_w = w;
            h = next_step(h, ratio);

            // zeros
            for (zi, &f) in self.zeros.iter().enumerate() {
                if let Some((oz, _)) = origin {
                    if oz == zi && tau < 4.0 * tau0.max(1e-300) {
                        continue;
                    }
                }
                if let Some(d) = self.flat_distance_to_zero(f, z) {
                    if d < self.opts.capture {
                        let (wb, _) = from_zero(pd, f, z, s);
                        end_w = w - wb;
                        tau += d;
                        points.push(pd.factors[f].0);
                        termination = Termination::HitsZero(zi);
                        break 'outer;
                    }
                }
            }
            // poles
            let moving = z - points[points.len().saturating_sub(2)];
            for (pi, p) in self.poles.iter().enumerate() {
                match self.pole_factor[pi] {
                    Some(f) => {
                        let c = pd.factors[f].0;
                        let u = z - c;
                        if p.order == 1 {
                            if u.norm() < 1e-9 * pd.isolation(f) {
                                termination = Termination::HitsPole(pi);
                                break 'outer;
                            }
                        } else if u.norm() < 0.25 * self.order_radius[pi] && (moving * u.conj()).re < 0.0 {
                            if p.order >= 3 {
                                let (j, fit) = self.direction_of(pi, z, theta);
                                if fit > 0.2 {
                                    continue;
                                }
                                direction = Some(j);
                            }
                            termination = Termination::EscapesToPole(pi);
                            break 'outer;
                        }
                    }
                    None => {
                        if z.norm() > 2.0 * self.order_radius[pi] && (moving * z.conj()).re > 0.0 {
                            if p.order >= 3 {
                                let (j, fit) = self.direction_of(pi, z, theta);
                                if fit > 0.2 {
                                    continue;
                                }
                                direction = Some(j);
                            }
                            termination = Termination::EscapesToPole(pi);
                            break 'outer;
                        }
                    }
                }
            }
            if tau > budget || z.norm() > 1e12 {
                break;
            }
        }
        Trajectory {
            points,
            phase: theta,
            termination,
            arc_length: tau,
            origin,
            direction,
            end_w,
            crossings,
            max_drift,
        }
    }

    /// Point where the leaf meets the ordering circle, by Newton on the
    /// circle angle.
    #[allow(clippy::too_many_arguments)]
    fn refine_crossing(&self, pole: usize, z0: C64, w0: C64, s0: C64, z1: C64, rot: C64, leaf: f64) -> Option<Crossing> {
        let pd = self.pd;
        // chord intersection as the first guess
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.outside_order_circle(pole, z0 + (z1 - z0) * mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut key = self.crossing_key(pole, z0 + (z1 - z0) * hi);
        for _ in 0..20 {
            let (z, dz) = self.circle_point(pole, key);
            let (dw, s) = chord(pd, z0, z, s0);
            let f = (rot.conj() * (w0 + dw)).im - leaf;
            let df = (rot.conj() * s * dz).im;
            if df == 0.0 || !df.is_finite() {
                return None;
            }
            let step = f / df;
            key -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (z, _) = self.circle_point(pole, key);
        let (dw, s) = chord(pd, z0, z, s0);
        Some(Crossing {
            pole,
            z,
            w: w0 + dw,
            sqrt: s,
            key: key.rem_euclid(2.0 * PI),
        })
    }

    pub fn separatrix(&self, zero: usize, j: usize, theta: f64, budget: f64) -> Trajectory {
        let (z, s, w) = self.ray_start(zero, j, theta);
        let tau0 = (C64::from_polar(1.0, -theta) * w).re;
        let mut t = self.trace(theta, z, s, w, Some((zero, j)), tau0, budget);
        t.points.insert(0, self.zero_point(zero));
        t
    }

    /// All `m + 2` rays of every zero, in zero-major order.
    pub fn separatrices(&self, theta: f64) -> Vec<Trajectory> {
        let jobs: Vec<(usize, usize)> = (0..self.zeros.len())
            .flat_map(|z| (0..self.zero_order(z) as usize + 2).map(move |j| (z, j)))
            .collect();
        let budget = self.opts.budget;
        let threads = self.opts.threads.max(1).min(jobs.len().max(1));
        if threads == 1 {
            return jobs.iter().map(|&(z, j)| self.separatrix(z, j, theta, budget)).collect();
        }
        let mut out: Vec<Option<Trajectory>> = vec![None; jobs.len()];
        std::thread::scope(|scope| {
            let chunk = jobs.len().div_ceil(threads);
            for (slot, work) in out.chunks_mut(chunk).zip(jobs.chunks(chunk)) {
                scope.spawn(move || {
                    for (o, &(z, j)) in slot.iter_mut().zip(work) {
                        *o = Some(self.separatrix(z, j, theta, budget));
                    }
                });
            }
        });
        out.into_iter().map(Option::unwrap).collect()
    }

    /// A leaf through a regular point, traced both ways.
    pub fn leaf(&self, theta: f64, z: C64, budget: f64) -> (Trajectory, Trajectory) {
        let s = self.pd.eval(z).sqrt();
        let fwd = self.trace(theta, z, s, C64::new(0.0, 0.0), None, 0.0, budget);
        let back = self.trace(theta, z, -s, C64::new(0.0, 0.0), None, 0.0, budget);
        (fwd, back)
    }
}

/// Samples of a continuous branch of `sqrt(g)` and of `w` along a polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtSample {
    pub z: C64,
    pub sqrt: C64,
    pub w: C64,
}

pub fn sqrt_continuation(pd: &PlainDifferential, path: &[C64], initial_sign: f64, clearance: f64) -> Result<Vec<SqrtSample>, FlatError> {
    let Some(&first) = path.first() else { return Ok(Vec::new()) };
    if pd.clearance(first) < clearance {
        return Err(FlatError::Clearance(first));
    }
    let mut s = pd.eval(first).sqrt() * initial_sign.signum();
    let mut w = C64::new(0.0, 0.0);
    let mut out = vec![SqrtSample { z: first, sqrt: s, w }];
    for pair in path.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        // sub-chords no longer than a tenth of the clearance
        let mut t = 0.0;
        while t < 1.0 {
            let z = a + (b - a) * t;
            let rho = pd.clearance(z);
            if rho < clearance {
                return Err(FlatError::Clearance(z));
            }
            let dt = (0.1 * rho / (b - a).norm().max(1e-300)).min(1.0 - t);
            let z1 = a + (b - a) * (t + dt);
            if pd.clearance(z1) < clearance {
                return Err(FlatError::Clearance(z1));
            }
            let (dw, s1) = chord(pd, z, z1, s);
            w += dw;
            s = s1;
            t += dt;
        }
        out.push(SqrtSample { z: b, sqrt: s, w });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    /// `[σ_lo, next(σ_lo), prev(σ_hi), σ_hi]` as separatrix indices.
    pub boundary: [usize; 4],
    pub zeros: [usize; 2],
    pub period: C64,
    pub saddle_connection: Trajectory,
    /// The connection trace reached the second zero.
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub boundary: [usize; 2],
    pub pole: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripDecomposition {
    pub phase: f64,
    pub separatrices: Vec<Trajectory>,
    pub strips: Vec<Strip>,
    pub half_planes: Vec<HalfPlane>,
    pub saddle_free: bool,
}

impl StripDecomposition {
    /// Terminal `(pole, direction)` or zero of every separatrix.
    pub fn signature(&self) -> Vec<Termination> {
        self.separatrices.iter().map(|t| t.termination).collect()
    }
}

fn probe_ring(fol: &Foliation, theta: f64) -> Option<C64> {
    let r = 0.5 * (1.0 + fol.pd.radius());
    for k in 0..6 {
        let z = C64::from_polar(r * (0.7 + 0.1 * k as f64), 0.61 + 1.1 * k as f64);
        if fol.pd.clearance(z) < 1e-3 * r {
            continue;
        }
        let s = fol.pd.eval(z).sqrt();
        let t = fol.trace(theta, z, s, C64::new(0.0, 0.0), None, 0.0, f64::INFINITY);
        if t.termination == Termination::Closed {
            return Some(z);
        }
    }
    None
}

/// Separatrix graph, strips and half-planes at phase `theta`.
pub fn strip_decomposition(pd: &PlainDifferential, theta: f64, opts: TraceOptions) -> Result<StripDecomposition, FlatError> {
    let fol = Foliation::new(pd, opts);
    if pd.factors.is_empty() && pd.infinity_order() <= 0 {
        return Err(FlatError::Empty);
    }
    if let Some(p) = fol.poles.iter().find(|p| p.order < 3).copied() {
        let mut probe = fol;
        probe.opts.max_steps = probe.opts.max_steps.min(20_000);
        if let Some(z) = probe_ring(&probe, theta) {
            return Err(FlatError::RingDomain(z));
        }
        return Err(FlatError::UnsupportedPole(p.order));
    }
    let seps = fol.separatrices(theta);
    for t in &seps {
        if t.termination == Termination::LengthBudget {
            let (zero, ray) = t.origin.unwrap();
            return Err(FlatError::Recurrent { zero, ray });
        }
        if t.termination == Termination::Closed {
            return Err(FlatError::RingDomain(t.points[0]));
        }
    }
    let saddle_free = seps.iter().all(|t| !matches!(t.termination, Termination::HitsZero(_)));
    let mut out = StripDecomposition {
        phase: theta,
        separatrices: seps,
        strips: Vec::new(),
        half_planes: Vec::new(),
        saddle_free,
    };
    if !saddle_free {
        return Ok(out);
    }
    assemble(&fol, &mut out)?;
    Ok(out)
}

fn assemble(fol: &Foliation, dec: &mut StripDecomposition) -> Result<(), FlatError> {
    let theta = dec.phase;
    let seps = &dec.separatrices;
    let mut offset = vec![0usize; fol.zeros.len() + 1];
    for z in 0..fol.zeros.len() {
        offset[z + 1] = offset[z] + fol.zero_order(z) as usize + 2;
    }
    let id = |zero: usize, j: usize| offset[zero] + j % (offset[zero + 1] - offset[zero]);
    let next = |sep: usize| {
        let (z, j) = seps[sep].origin.unwrap();
        id(z, j + 1)
    };
    let prev = |sep: usize| {
        let (z, j) = seps[sep].origin.unwrap();
        let n = offset[z + 1] - offset[z];
        id(z, j + n - 1)
    };
    let crossing = |sep: usize, pole: usize| -> Result<Crossing, FlatError> {
        seps[sep]
            .crossings
            .iter()
            .rev()
            .find(|c| c.pole == pole)
            .copied()
            .ok_or_else(|| FlatError::Assembly(format!("separatrix {sep} has no crossing at pole {pole}")))
    };

    let mut ends: Vec<(usize, usize, usize)> = Vec::new();
    for pole in 0..fol.poles.len() {
        let mut around: Vec<(f64, usize, usize)> = Vec::new();
        for (i, t) in seps.iter().enumerate() {
            if t.termination == Termination::EscapesToPole(pole) {
                let c = crossing(i, pole)?;
                around.push((c.key, i, t.direction.unwrap_or(0)));
            }
        }
        around.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let bisectors = fol.direction_bisectors(pole, theta);
        let n = around.len();
        for k in 0..n {
            let (lo, hi) = (around[k], around[(k + 1) % n]);
            let width = if n == 1 { 2.0 * PI } else { (hi.0 - lo.0).rem_euclid(2.0 * PI) };
            let spans_bisector = bisectors.iter().any(|b| (b - lo.0).rem_euclid(2.0 * PI) < width);
            if lo.2 != hi.2 && !spans_bisector {
                return Err(FlatError::Assembly(format!("gap ({}, {}) changes direction without a half-plane", lo.1, hi.1)));
            }
            if !spans_bisector {
                ends.push((pole, lo.1, hi.1));
            } else {
                dec.half_planes.push(HalfPlane {
                    boundary: [lo.1, hi.1],
                    pole,
                });
            }
        }
    }

    let mut seen: Vec<[usize; 4]> = Vec::new();
    for &(pole, lo, hi) in &ends {
        let boundary = [lo, next(lo), prev(hi), hi];
        let mut key = boundary;
        key.sort();
        if seen.contains(&key) {
            continue;
        }
        let partner = (prev(hi), next(lo));
        if !ends.iter().any(|&(_, a, b)| (a, b) == partner) {
            return Err(FlatError::Assembly(format!("strip end ({lo}, {hi}) has no partner end")));
        }
        seen.push(key);
        let c_lo = crossing(lo, pole)?;
        let c_hi = crossing(hi, pole)?;
        let mut k_hi = c_hi.key;
        if k_hi < c_lo.key {
            k_hi += 2.0 * PI;
        }
        let span = k_hi - c_lo.key;
        let panels = (span * 50.0).ceil().max(4.0) as usize;
        let (arc, s_end) = integrate_branch(fol.pd, |t| fol.circle_point(pole, t), c_lo.key, k_hi, panels, c_lo.sqrt);
        let sign = if (s_end * c_hi.sqrt.conj()).re < 0.0 { -1.0 } else { 1.0 };
        let mut period = c_lo.w + arc - c_hi.w * sign;
        let rot = C64::from_polar(1.0, theta);
        if (rot.conj() * period).im < 0.0 {
            period = -period;
        }
        let zero_lo = seps[lo].origin.unwrap().0;
        let zero_hi = seps[hi].origin.unwrap().0;
        let psi = period.arg();
        let (_, j_lo) = seps[lo].origin.unwrap();
        let m = fol.zero_order(zero_lo) as usize;
        let beta_lo = fol.ray_angle(zero_lo, j_lo, theta);
        let width = 2.0 * PI / (m + 2) as f64;
        let k = (0..m + 2)
            .min_by(|&a, &b| {
                let da = ((fol.ray_angle(zero_lo, a, psi) - beta_lo).rem_euclid(2.0 * PI) - 0.5 * width).abs();
                let db = ((fol.ray_angle(zero_lo, b, psi) - beta_lo).rem_euclid(2.0 * PI) - 0.5 * width).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let conn = fol.separatrix(zero_lo, k, psi, 1.5 * period.norm() + 1.0);
        let connected = conn.termination == Termination::HitsZero(zero_hi);
        dec.strips.push(Strip {
            boundary,
            zeros: [zero_lo, zero_hi],
            period,
            saddle_connection: conn,
            connected,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleConnection {
    pub phase: f64,
    pub zeros: [usize; 2],
    pub period: C64,
    pub trajectory: Trajectory,
}

/// Shoots rays from every zero over a phase grid in `[lo, hi]` and refines
/// sign changes of the transverse offset at other zeros by bisection.
pub fn find_saddle_connections(pd: &PlainDifferential, window: (f64, f64), length: f64, opts: TraceOptions) -> Vec<SaddleConnection> {
    let fol = Foliation::new(pd, opts);
    let (lo, hi) = window;
    // transverse resolution: the flat size of a zero neighbourhood
    let delta = fol
        .zeros
        .iter()
        .map(|&f| {
            let a = pd.factors[f].0;
            let r = 0.25 * pd.isolation(f);
            from_zero(pd, f, a + r, C64::new(1.0, 0.0)).0.norm()
        })
        .fold(f64::INFINITY, f64::min);
    let n = ((hi - lo) * length / (0.25 * delta)).ceil().clamp(16.0, 4000.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();

    // offset of zero `b` as seen from the ray, at its closest approach
    let probe = |zero: usize, j: usize, psi: f64| -> (Trajectory, Vec<Option<(f64, f64)>>) {
        let t = fol.separatrix(zero, j, psi, length);
        let rot = C64::from_polar(1.0, psi);
        let mut best: Vec<Option<(f64, f64)>> = vec![None; fol.zeros.len()];
        let mut s = pd.eval(t.points[1]).sqrt();
        let (_, s0, _) = fol.ray_start(zero, j, psi);
        s = align(s, s0);
        for &z in t.points.iter().skip(1) {
            let g = pd.eval(z);
            if !finite(g) || g.norm() == 0.0 {
                continue;
            }
            s = align(g.sqrt(), s);
            for (b, &f) in fol.zeros.iter().enumerate() {
                if b == zero {
                    continue;
                }
                let a = pd.factors[f].0;
                if (z - a).norm() > 0.5 * pd.isolation(f) {
                    continue;
                }
                let (wb, _) = from_zero(pd, f, z, s);
                let d = -wb;
                let ahead = (rot.conj() * d).re;
                let off = (rot.conj() * d).im;
                if ahead >= -1e-12 && best[b].is_none_or(|(_, o)| off.abs() < o.abs()) {
                    best[b] = Some((ahead, off));
                }
            }
        }
        (t, best)
    };

    let mut found: Vec<SaddleConnection> = Vec::new();
    for zero in 0..fol.zeros.len() {
        let rays = fol.zero_order(zero) as usize + 2;
        for j in 0..rays {
            let samples: Vec<Vec<Option<(f64, f64)>>> = grid.iter().map(|&psi| probe(zero, j, psi).1).collect();
            for k in 0..n {
                for b in 0..fol.zeros.len() {
                    let (Some((_, o0)), Some((_, o1))) = (samples[k][b], samples[k + 1][b]) else { continue };
                    if o0.signum() == o1.signum() || o0.abs() > delta || o1.abs() > delta {
                        continue;
                    }
                    let (mut a, mut c) = (grid[k], grid[k + 1]);
                    let mut sa = o0.signum();
                    for _ in 0..60 {
                        let mid = 0.5 * (a + c);
                        match probe(zero, j, mid).1[b] {
                            Some((_, o)) if o.signum() == sa => {
                                a = mid;
                                sa = o.signum();
                            }
                            Some(_) => c = mid,
                            None => break,
                        }
                        if c - a < 1e-14 {
                            break;
                        }
                    }
                    let psi = 0.5 * (a + c);
                    let t = fol.separatrix(zero, j, psi, length);
                    let hit = t.termination == Termination::HitsZero(b);
                    let period = if hit { t.end_w } else { continue };
                    let dup = found.iter().any(|f| {
                        let same_pair = (f.zeros == [zero, b]) || (f.zeros == [b, zero]);
                        let dphase = (f.phase - psi).rem_euclid(PI);
                        same_pair && (dphase.min(PI - dphase) < 1e-6) && (f.period.norm() - period.norm()).abs() < 1e-6 * period.norm()
                    });
                    if !dup {
                        found.push(SaddleConnection {
                            phase: psi,
                            zeros: [zero, b],
                            period,
                            trajectory: t,
                        });
                    }
                }
            }
        }
    }
    found
}

/// Signatures of the separatrices just below and above `theta_wall`
/// differ iff a saddle trajectory appears there. Returns the phase located
/// by bisection between `a` and `b` where the signature changes.
pub fn locate_wall(pd: &PlainDifferential, a: f64, b: f64, opts: TraceOptions, iterations: usize) -> Option<f64> {
    let fol = Foliation::new(pd, opts);
    let sig = |theta: f64| -> Vec<(Termination, Option<usize>)> {
        fol.separatrices(theta).iter().map(|t| (t.termination, t.direction)).collect()
    };
    let (mut lo, mut hi) = (a, b);
    let s_lo = sig(lo);
    if s_lo == sig(hi) {
        return None;
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let s = sig(mid);
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
