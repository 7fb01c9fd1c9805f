//! Genus-zero Hurwitz covers and the quadratic differentials built on them.
//!
//! A cover is a rational function `f = num / den` on the sphere. Its poles
//! carry orders `k_i`; a pole at infinity is declared explicitly. The primary
//! differential `Omega_l = prod (z - z_i)^{-l_i} dz^2` puts a pole of order
//! `l_i` at each pole of `f`, with `sum l_i = 4`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{cluster_roots, min_relative_separation, Poly};

/// Relative separation below which two roots count as one.
pub const SIMPLE_ROOT_SEPARATION: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum HurwitzError {
    #[error("the l-vector sums to {0}, expected 4")]
    LSum(i64),
    #[error("{got} l-entries for {poles} poles")]
    LLength { got: usize, poles: usize },
    #[error("declared poles do not match the denominator: {0}")]
    PoleMismatch(String),
    #[error("f vanishes at infinity; put a pole or a regular point there")]
    ZeroAtInfinity,
    #[error("numerator and denominator share the root {0}")]
    CommonRoot(C64),
    #[error("cover is not regular: zeros closer than {sep:.3e} (relative)")]
    NotRegular { sep: f64 },
    #[error("Re(s) = {0} must exceed 2")]
    SBound(f64),
    #[error("pole {index}: Re(k(s-2) + l) = {value} must exceed 2")]
    HigherOrder { index: usize, value: f64 },
    #[error("the plain flavor needs an integer s >= 3, got {0}")]
    PlainNeedsInteger(C64),
    #[error("{0}")]
    NotTypeA(String),
    #[error("branch continuation is ambiguous near {0}")]
    Continuation(C64),
    #[error("declared polar type is inconsistent with the samples: {0}")]
    PolarType(String),
    #[error("operation needs the cy_s flavor")]
    NeedsCyS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfTag {
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoleLoc {
    Finite(C64),
    Infinity(InfTag),
}

impl PoleLoc {
    pub const INF: PoleLoc = PoleLoc::Infinity(InfTag::Inf);

    pub fn finite(&self) -> Option<C64> {
        match self {
            PoleLoc::Finite(z) => Some(*z),
            PoleLoc::Infinity(_) => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PoleLoc::Infinity(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub at: PoleLoc,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzCover {
    pub num: Poly,
    pub den: Poly,
    pub poles: Vec<Pole>,
    /// Zeros of `f` (roots of the numerator).
    pub zeros: Vec<C64>,
    /// Infinity is a pole and `f ~ z^k` there.
    pub normalized: bool,
    /// All zeros simple.
    pub regular: bool,
}

impl HurwitzCover {
    pub fn new(num: Poly, den: Poly, poles: Vec<Pole>) -> Result<Self, HurwitzError> {
        let dn = num.degree() as i64;
        let dd = den.degree() as i64;
        if dn < dd {
            return Err(HurwitzError::ZeroAtInfinity);
        }
        let scale = |z: C64| 1.0f64.max(z.norm());
        // finite poles from the denominator
        let den_roots = cluster_roots(&den.roots(), 1e-6);
        let mut declared: Vec<(C64, u32)> = poles.iter().filter_map(|p| p.at.finite().map(|z| (z, p.k))).collect();
        for &(r, m) in &den_roots {
            let pos = declared.iter().position(|(z, _)| (*z - r).norm() <= 1e-6 * scale(r));
            match pos {
                Some(i) if declared[i].1 as usize == m => {
                    declared.remove(i);
                }
                Some(i) => {
                    return Err(HurwitzError::PoleMismatch(format!(
                        "pole at {r} has order {m}, declared {}",
                        declared[i].1
                    )))
                }
                None => return Err(HurwitzError::PoleMismatch(format!("undeclared pole at {r} of order {m}"))),
            }
        }
        if let Some((z, _)) = declared.first() {
            return Err(HurwitzError::PoleMismatch(format!("declared pole at {z} is not a root of den")));
        }
        let inf_order = dn - dd;
        let declared_inf: Vec<u32> = poles.iter().filter(|p| p.at.is_infinity()).map(|p| p.k).collect();
        match (inf_order, declared_inf.as_slice()) {
            (0, []) => {}
            (o, [k]) if o == *k as i64 => {}
            (o, d) => {
                return Err(HurwitzError::PoleMismatch(format!(
                    "order at infinity is {o}, declared {d:?}"
                )))
            }
        }
        for &(r, _) in &den_roots {
            let v = num.eval(r);
            if v.norm() <= 1e-9 * num.norm_inf() * scale(r).powi(dn as i32) {
                return Err(HurwitzError::CommonRoot(r));
            }
        }
        let zeros = num.roots();
        let total_k: i64 = poles.iter().map(|p| p.k as i64).sum();
        if zeros.len() as i64 != total_k {
            return Err(HurwitzError::PoleMismatch(format!(
                "{} zeros but pole orders sum to {total_k}",
                zeros.len()
            )));
        }
        let regular = min_relative_separation(&zeros).is_none_or(|s| s > SIMPLE_ROOT_SEPARATION);
        let normalized = inf_order > 0 && (num.leading() / den.leading() - C64::new(1.0, 0.0)).norm() < 1e-12;
        Ok(HurwitzCover {
            num,
            den,
            poles,
            zeros,
            normalized,
            regular,
        })
    }

    /// Monic polynomial cover with a single pole at infinity.
    pub fn polynomial(coef: Vec<C64>) -> Result<Self, HurwitzError> {
        let num = Poly::new(coef);
        let k = num.degree() as u32;
        HurwitzCover::new(
            num,
            Poly::constant(C64::new(1.0, 0.0)),
            vec![Pole { at: PoleLoc::INF, k }],
        )
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `f'/f`.
    pub fn log_derivative(&self, z: C64) -> C64 {
        let (n, dn) = self.num.eval_d(z);
        let (d, dd) = self.den.eval_d(z);
        dn / n - dd / d
    }

    pub fn k_vector(&self) -> Vec<u32> {
        self.poles.iter().map(|p| p.k).collect()
    }

    /// Largest modulus among finite zeros and poles.
    pub fn scale(&self) -> f64 {
        self.zeros
            .iter()
            .copied()
            .chain(self.poles.iter().filter_map(|p| p.at.finite()))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Monic centered polynomial `z^{n+1} + a_1 z^{n-1} + ... + a_n`.
    pub fn is_type_a(&self) -> bool {
        let n1 = self.num.degree();
        self.den.degree() == 0
            && (self.den.coef[0] - C64::new(1.0, 0.0)).norm() < 1e-14
            && n1 >= 2
            && (self.num.leading() - C64::new(1.0, 0.0)).norm() < 1e-12
            && self.num.coef[n1 - 1].norm() < 1e-12
    }

    /// Coefficients `a_1 .. a_n` of a type-A cover.
    pub fn type_a_coefficients(&self) -> Result<Vec<C64>, HurwitzError> {
        if !self.is_type_a() {
            return Err(HurwitzError::NotTypeA("expected a monic centered polynomial".into()));
        }
        let n1 = self.num.degree();
        Ok((1..n1).map(|i| self.num.coef[n1 - 1 - i]).collect())
    }
}

/// `2g - 2 + b + sum k`.
pub fn hurwitz_dimension(genus: u32, k: &[u32]) -> i64 {
    2 * genus as i64 - 2 + k.len() as i64 + k.iter().map(|&x| x as i64).sum::<i64>()
}

/// `(omega f)(z) = f(omega^{-1} z)` with `omega = exp(2 pi i m / (n+1))`.
pub fn cyclic_action(cover: &HurwitzCover, m: i64) -> Result<HurwitzCover, HurwitzError> {
    let a = cover.type_a_coefficients()?;
    let n1 = cover.num.degree();
    let mut coef = vec![C64::new(0.0, 0.0); n1 + 1];
    coef[n1] = C64::new(1.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        let power = (i as i64 + 2) * m;
        let w = C64::from_polar(1.0, 2.0 * PI * power.rem_euclid(n1 as i64) as f64 / n1 as f64);
        coef[n1 - 2 - i] = ai * w;
    }
    HurwitzCover::polynomial(coef)
}

/// Evaluator for the coefficient of `Omega_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryDifferential {
    pub poles: Vec<(PoleLoc, i64)>,
}

impl PrimaryDifferential {
    pub fn new(poles: Vec<(PoleLoc, i64)>) -> Result<Self, HurwitzError> {
        let sum: i64 = poles.iter().map(|p| p.1).sum();
        if sum != 4 {
            return Err(HurwitzError::LSum(sum));
        }
        Ok(PrimaryDifferential { poles })
    }

    /// Coefficient in the `z` chart.
    pub fn eval(&self, z: C64) -> C64 {
        self.poles.iter().fold(C64::new(1.0, 0.0), |acc, (at, l)| match at.finite() {
            Some(zi) => acc * (z - zi).powi(-(*l as i32)),
            None => acc,
        })
    }

    /// Coefficient in the chart `w = 1/z` at infinity.
    pub fn eval_at_infinity_chart(&self, w: C64) -> C64 {
        self.eval(C64::new(1.0, 0.0) / w) / w.powi(4)
    }

    /// `Omega'/Omega`.
    pub fn log_derivative(&self, z: C64) -> C64 {
        self.poles.iter().fold(C64::new(0.0, 0.0), |acc, (at, l)| match at.finite() {
            Some(zi) => acc - *l as f64 / (z - zi),
            None => acc,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `xi = f^{s-2} Omega_l`.
    CyS,
    /// `phi = e^f Omega_l`.
    ExpType,
    /// Single-valued `f^{s-2} Omega_l` for integer `s`.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Zero,
    Pole,
}

/// A zero or pole of the differential with its local exponent: the
/// coefficient behaves like `t^exponent dt^2` in a local coordinate `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub at: PoleLoc,
    pub kind: SingularityKind,
    pub exponent: C64,
    /// `(k, l)` for poles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl: Option<(u32, i64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseBranch {
    pub point: C64,
    /// Value of `log f` at `point`.
    pub log: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDifferential {
    pub cover: HurwitzCover,
    pub l: Vec<i64>,
    pub s: C64,
    pub flavor: Flavor,
    pub base: BaseBranch,
    pub singularities: Vec<Singularity>,
    #[serde(skip)]
    omega: Option<PrimaryDifferential>,
}

impl QDifferential {
    pub fn omega(&self) -> PrimaryDifferential {
        self.omega.clone().unwrap_or_else(|| {
            PrimaryDifferential::new(self.cover.poles.iter().zip(&self.l).map(|(p, &l)| (p.at, l)).collect())
                .expect("validated at construction")
        })
    }

    pub fn omega_eval(&self, z: C64) -> C64 {
        match &self.omega {
            Some(o) => o.eval(z),
            None => self.omega().eval(z),
        }
    }

    pub fn zeros(&self) -> Vec<C64> {
        self.singularities
            .iter()
            .filter(|s| s.kind == SingularityKind::Zero)
            .filter_map(|s| s.at.finite())
            .collect()
    }

    /// `q_s = e^{i pi s}`.
    pub fn q_s(&self) -> C64 {
        (C64::new(0.0, PI) * self.s).exp()
    }

    /// The coefficient with `log f` supplied by the caller.
    pub fn coefficient_with_log(&self, z: C64, log_f: C64) -> C64 {
        let om = self.omega_eval(z);
        match self.flavor {
            Flavor::CyS => ((self.s - 2.0) * log_f).exp() * om,
            Flavor::ExpType => self.cover.eval(z).exp() * om,
            Flavor::Plain => self.cover.eval(z).powi(self.s.re.round() as i32 - 2) * om,
        }
    }

    /// Coefficient on the principal branch of `log f`.
    pub fn coefficient(&self, z: C64) -> C64 {
        self.coefficient_with_log(z, self.cover.eval(z).ln())
    }

    /// `xi'/xi`, single valued on every branch.
    pub fn log_derivative(&self, z: C64) -> C64 {
        let om = self.omega().log_derivative(z);
        match self.flavor {
            Flavor::CyS => (self.s - 2.0) * self.cover.log_derivative(z) + om,
            Flavor::Plain => (self.s.re.round() - 2.0) * self.cover.log_derivative(z) + om,
            Flavor::ExpType => {
                let (n, dn) = self.cover.num.eval_d(z);
                let (d, dd) = self.cover.den.eval_d(z);
                (dn * d - n * dd) / (d * d) + om
            }
        }
    }

    /// Rational coefficient `(num, den)` of a plain differential.
    pub fn plain_rational(&self) -> Option<(Poly, Poly)> {
        if self.flavor != Flavor::Plain {
            return None;
        }
        let e = self.s.re.round() as usize - 2;
        let mut num = Poly::constant(C64::new(1.0, 0.0));
        let mut den = Poly::constant(C64::new(1.0, 0.0));
        for _ in 0..e {
            num = num.mul(&self.cover.num);
            den = den.mul(&self.cover.den);
        }
        for (p, &l) in self.cover.poles.iter().zip(&self.l) {
            if let Some(z) = p.at.finite() {
                let lin = Poly::new(vec![-z, C64::new(1.0, 0.0)]);
                for _ in 0..l.unsigned_abs() {
                    if l > 0 {
                        den = den.mul(&lin);
                    } else {
                        num = num.mul(&lin);
                    }
                }
            }
        }
        Some((num, den))
    }
}

fn default_base_point(cover: &HurwitzCover) -> C64 {
    let r = 1.0 + cover.scale();
    let pts: Vec<C64> = cover
        .zeros
        .iter()
        .copied()
        .chain(cover.poles.iter().filter_map(|p| p.at.finite()))
        .collect();
    let mut best = C64::new(0.0, 0.0);
    let mut best_d = -1.0;
    for k in 0..16 {
        let c = C64::from_polar(0.5 * r, 0.37 + 2.0 * PI * k as f64 / 16.0);
        let d = pts.iter().map(|p| (p - c).norm()).fold(f64::INFINITY, f64::min);
        if d > best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Validated differential with local exponents filled in.
pub fn make_qdiff(cover: HurwitzCover, l: Vec<i64>, s: C64, flavor: Flavor) -> Result<QDifferential, HurwitzError> {
    if l.len() != cover.poles.len() {
        return Err(HurwitzError::LLength {
            got: l.len(),
            poles: cover.poles.len(),
        });
    }
    let omega = PrimaryDifferential::new(cover.poles.iter().zip(&l).map(|(p, &l)| (p.at, l)).collect())?;
    let mut singularities = Vec::new();
    match flavor {
        Flavor::CyS | Flavor::Plain => {
            if flavor == Flavor::Plain && ((s.re - s.re.round()).abs() > 1e-12 || s.im != 0.0 || s.re.round() < 3.0) {
                return Err(HurwitzError::PlainNeedsInteger(s));
            }
            if s.re <= 2.0 {
                return Err(HurwitzError::SBound(s.re));
            }
            if !cover.regular {
                let sep = min_relative_separation(&cover.zeros).unwrap_or(0.0);
                return Err(HurwitzError::NotRegular { sep });
            }
            for z in &cover.zeros {
                singularities.push(Singularity {
                    at: PoleLoc::Finite(*z),
                    kind: SingularityKind::Zero,
                    exponent: s - 2.0,
                    kl: None,
                });
            }
            for (index, (p, &li)) in cover.poles.iter().zip(&l).enumerate() {
                let order = (s - 2.0) * p.k as f64 + li as f64;
                if order.re <= 2.0 {
                    return Err(HurwitzError::HigherOrder { index, value: order.re });
                }
                singularities.push(Singularity {
                    at: p.at,
                    kind: SingularityKind::Pole,
                    exponent: -order,
                    kl: Some((p.k, li)),
                });
            }
        }
        Flavor::ExpType => {
            for (p, &li) in cover.poles.iter().zip(&l) {
                singularities.push(Singularity {
                    at: p.at,
                    kind: SingularityKind::Pole,
                    exponent: C64::new(-(li as f64), 0.0),
                    kl: Some((p.k, li)),
                });
            }
        }
    }
    let point = default_base_point(&cover);
    let base = BaseBranch {
        point,
        log: cover.eval(point).ln(),
    };
    Ok(QDifferential {
        cover,
        l,
        s,
        flavor,
        base,
        singularities,
        omega: Some(omega),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountReport {
    pub simple_roots: usize,
    pub argument_principle: i64,
    pub expected: i64,
    pub ok: bool,
}

/// Counts the zeros of `f` twice: as simple numerator roots and by the
/// argument principle on a circle enclosing all finite singularities.
pub fn zero_count_check(q: &QDifferential) -> Result<ZeroCountReport, HurwitzError> {
    if q.flavor == Flavor::ExpType {
        return Err(HurwitzError::NeedsCyS);
    }
    let cover = &q.cover;
    let clusters = cluster_roots(&cover.zeros, SIMPLE_ROOT_SEPARATION);
    let simple_roots = clusters.iter().filter(|(_, m)| *m == 1).count();
    let r = 2.0 * (1.0 + cover.scale());
    let n = 4096;
    let integral = crate::quad::periodic_trapezoid(
        |t| {
            let z = C64::from_polar(r, t);
            let dz = C64::new(0.0, 1.0) * z;
            cover.log_derivative(z) * dz
        },
        n,
    );
    let winding = (integral / C64::new(0.0, 2.0 * PI)).re.round() as i64;
    let finite_pole_order: i64 = cover
        .poles
        .iter()
        .filter(|p| !p.at.is_infinity())
        .map(|p| p.k as i64)
        .sum();
    let argument_principle = winding + finite_pole_order;
    let expected: i64 = cover.poles.iter().map(|p| p.k as i64).sum();
    Ok(ZeroCountReport {
        simple_roots,
        argument_principle,
        expected,
        ok: simple_roots as i64 == expected && argument_principle == expected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovered {
    pub cover: HurwitzCover,
    /// `f_recovered = omega^m f_true`-style phase that was divided out.
    pub phase_power: i64,
    /// Distance of the leading coefficient from 1 after normalization.
    pub normalization_residual: f64,
}

/// Rebuilds `f = (xi / Omega)^{1/(s-2)}` from an evaluator of `xi` on any
/// branch. Poles and orders are declared; the branch is fixed by continuing
/// from `base` when given, otherwise by normalizing at infinity.
pub fn recover_cover<X: Fn(C64) -> C64>(
    xi: X,
    poles: &[Pole],
    l: &[i64],
    s: C64,
    base: Option<BaseBranch>,
) -> Result<Recovered, HurwitzError> {
    if s.re <= 2.0 {
        return Err(HurwitzError::SBound(s.re));
    }
    if l.len() != poles.len() {
        return Err(HurwitzError::LLength {
            got: l.len(),
            poles: poles.len(),
        });
    }
    let omega = PrimaryDifferential::new(poles.iter().zip(l).map(|(p, &l)| (p.at, l)).collect())?;
    let e = s - 2.0;
    let root_of_unity = (C64::new(0.0, 2.0 * PI) / e).exp();
    let degree: usize = poles.iter().map(|p| p.k as usize).sum();
    let finite: Vec<(C64, u32)> = poles.iter().filter_map(|p| p.at.finite().map(|z| (z, p.k))).collect();
    let scale = finite.iter().map(|(z, _)| z.norm()).fold(1.0, f64::max);

    // candidate values of f at z, given a reference value nearby
    let branch_near = |z: C64, reference: Option<C64>| -> Result<C64, HurwitzError> {
        let base_value = ((xi(z) / omega.eval(z)).ln() / e).exp();
        let Some(r) = reference else { return Ok(base_value) };
        let turns = (e.re.abs().ceil() as i64 + 2).max(3);
        let mut best = (f64::INFINITY, base_value);
        let mut second = f64::INFINITY;
        for j in -turns..=turns {
            let cand = base_value * root_of_unity.powi(j as i32);
            let d = (cand - r).norm();
            if d < best.0 {
                second = best.0;
                best = (d, cand);
            } else if d < second {
                second = d;
            }
        }
        if best.0 > 0.25 * second {
            return Err(HurwitzError::Continuation(z));
        }
        Ok(best.1)
    };

    // continue along a circle enclosing the finite poles and, hopefully,
    // the zeros; the circle radius is chosen away from the poles
    let radius = 1.5 * scale + 0.5;
    let m = (8 * (degree + 1)).max(256);
    let start = match base {
        Some(b) => {
            // walk from the base point to the circle
            let target = C64::from_polar(radius, 0.0);
            let steps = 400;
            let mut value = b.log.exp();
            for i in 1..=steps {
                let z = b.point + (target - b.point) * (i as f64 / steps as f64);
                value = branch_near(z, Some(value))?;
            }
            Some(value)
        }
        None => None,
    };
    let substeps = 16;
    let mut samples = Vec::with_capacity(m);
    let mut value = match start {
        Some(v) => v,
        None => branch_near(C64::from_polar(radius, 0.0), None)?,
    };
    samples.push(value);
    for k in 1..=m {
        for j in 1..=substeps {
            let t = 2.0 * PI * ((k - 1) as f64 + j as f64 / substeps as f64) / m as f64;
            value = branch_near(C64::from_polar(radius, t), Some(value))?;
        }
        if k < m {
            samples.push(value);
        }
    }
    let closure = (value - samples[0]).norm() / samples[0].norm().max(1e-300);
    if closure > 1e-6 {
        return Err(HurwitzError::PolarType(format!(
            "continuation around |z| = {radius:.3} does not close (relative mismatch {closure:.2e})"
        )));
    }
    // P(z) = f(z) * prod (z - z_i)^{k_i} is a polynomial of degree sum k
    let pvals: Vec<C64> = samples
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let z = C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64);
            finite.iter().fold(f, |acc, (zi, ki)| acc * (z - zi).powi(*ki as i32))
        })
        .collect();
    let mut coef = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in pvals.iter().enumerate() {
            acc += v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / m as f64);
        }
        coef.push(acc / m as f64 / radius.powi(j as i32));
    }
    let tail = coef[degree + 1..m / 2]
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() * radius.powi((degree + 1 + i) as i32))
        .fold(0.0, f64::max);
    let head_scale = coef[..=degree]
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() * radius.powi(i as i32))
        .fold(0.0, f64::max);
    if tail > 1e-7 * head_scale {
        return Err(HurwitzError::PolarType(format!(
            "samples are not a rational function of the declared pole orders (tail {:.2e})",
            tail / head_scale
        )));
    }
    let mut num: Vec<C64> = coef[..=degree].to_vec();
    let den = Poly::from_roots(
        &finite
            .iter()
            .flat_map(|(z, k)| std::iter::repeat_n(*z, *k as usize))
            .collect::<Vec<_>>(),
    );
    let inf_pole = poles.iter().any(|p| p.at.is_infinity());
    let (phase_power, normalization_residual) = if base.is_none() && inf_pole {
        // divide the leading coefficient by the nearest power of the root of unity
        let lead = num[degree];
        let turns = (e.re.abs().ceil() as i64 + 2).max(3) * 4;
        let mut best = (f64::INFINITY, 0i64);
        for j in -turns..=turns {
            let d = (lead / root_of_unity.powi(j as i32) - C64::new(1.0, 0.0)).norm();
            if d < best.0 {
                best = (d, j);
            }
        }
        let w = root_of_unity.powi(best.1 as i32);
        for c in num.iter_mut() {
            *c /= w;
        }
        (best.1, best.0)
    } else {
        (0, 0.0)
    };
    // snap noise-level coefficients so degrees stay exact
    let noise = 1e-12 * num.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in num.iter_mut() {
        if c.norm() < noise {
            *c = C64::new(0.0, 0.0);
        }
    }
    if inf_pole {
        num[degree] = if base.is_none() { C64::new(1.0, 0.0) } else { num[degree] };
    }
    let cover = HurwitzCover::new(Poly::new(num), den, poles.to_vec())?;
    Ok(Recovered {
        cover,
        phase_power,
        normalization_residual,
    })
}

/// Fitted real growth exponent of the coefficient along a ray into a finite
/// singularity: slope of `log |xi|` against `log r` for small `r`.
pub fn fitted_exponent(q: &QDifferential, at: C64, direction: f64) -> f64 {
    let (r1, r2) = (1e-5, 1e-4);
    let u = C64::from_polar(1.0, direction);
    let v1 = q.coefficient(at + u * r1).norm().ln();
    let v2 = q.coefficient(at + u * r2).norm().ln();
    (v2 - v1) / (r2.ln() - r1.ln())
}

/// The same at infinity, in the chart `w = 1/z`.
pub fn fitted_exponent_at_infinity(q: &QDifferential, direction: f64) -> f64 {
    let (r1, r2) = (1e-4, 1e-3);
    let u = C64::from_polar(1.0, direction);
    let chart = |w: C64| q.coefficient(C64::new(1.0, 0.0) / w) / w.powi(4);
    let v1 = chart(u * r1).norm().ln();
    let v2 = chart(u * r2).norm().ln();
    (v2 - v1) / (r2.ln() - r1.ln())
}

/// On-disk cover with its differential data. Coefficients are ascending;
/// an empty pole list means a polynomial with its pole at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverFile {
    pub num: Vec<C64>,
    #[serde(default = "unit_den")]
    pub den: Vec<C64>,
    #[serde(default)]
    pub poles: Vec<Pole>,
    pub l: Vec<i64>,
    pub s: C64,
    pub flavor: Flavor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseBranch>,
}

fn unit_den() -> Vec<C64> {
    vec![C64::new(1.0, 0.0)]
}

impl CoverFile {
    pub fn cover(&self) -> Result<HurwitzCover, HurwitzError> {
        let den = Poly::new(self.den.clone());
        if self.poles.is_empty() && den.degree() == 0 {
            let lead = den.coef[0];
            return HurwitzCover::polynomial(self.num.iter().map(|c| c / lead).collect());
        }
        HurwitzCover::new(Poly::new(self.num.clone()), den, self.poles.clone())
    }

    pub fn qdiff(&self) -> Result<QDifferential, HurwitzError> {
        let mut q = make_qdiff(self.cover()?, self.l.clone(), self.s, self.flavor)?;
        if let Some(b) = self.base {
            q.base = b;
        }
        Ok(q)
    }

    pub fn from_qdiff(q: &QDifferential) -> Self {
        CoverFile {
            num: q.cover.num.coef.clone(),
            den: q.cover.den.coef.clone(),
            poles: q.cover.poles.clone(),
            l: q.l.clone(),
            s: q.s,
            flavor: q.flavor,
            base: Some(q.base),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn a2() -> HurwitzCover {
        HurwitzCover::polynomial(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn primary_examples() {
        let o = PrimaryDifferential::new(vec![(PoleLoc::INF, 4)]).unwrap();
        assert_eq!(o.eval(c(0.3, 0.2)), c(1.0, 0.0));
        let o = PrimaryDifferential::new(vec![(PoleLoc::Finite(c(0.0, 0.0)), 2), (PoleLoc::INF, 2)]).unwrap();
        let z = c(0.7, -0.4);
        assert!((o.eval(z) - z.powi(-2)).norm() < 1e-14);
        let o = PrimaryDifferential::new(vec![(PoleLoc::Finite(c(0.0, 0.0)), 3), (PoleLoc::Finite(c(1.0, 0.0)), 1)]).unwrap();
        assert!((o.eval(z) - z.powi(-3) / (z - 1.0)).norm() < 1e-12);
        assert_eq!(PrimaryDifferential::new(vec![(PoleLoc::INF, 3)]), Err(HurwitzError::LSum(3)));
    }

    #[test]
    fn plain_a2_profile() {
        let q = make_qdiff(a2(), vec![4], c(3.0, 0.0), Flavor::Plain).unwrap();
        let zeros = q.singularities.iter().filter(|s| s.kind == SingularityKind::Zero).count();
        assert_eq!(zeros, 3);
        let pole = q.singularities.iter().find(|s| s.kind == SingularityKind::Pole).unwrap();
        assert_eq!(pole.exponent, c(-7.0, 0.0));
    }

    #[test]
    fn double_zero_not_regular() {
        let cover = HurwitzCover::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!cover.regular);
        assert!(matches!(
            make_qdiff(cover, vec![4], c(3.0, 0.0), Flavor::CyS),
            Err(HurwitzError::NotRegular { .. })
        ));
    }

    #[test]
    fn rational_cover_zero_count() {
        // (z^2 - 1)/z with simple poles at 0 and infinity
        let cover = HurwitzCover::new(
            Poly::real(&[-1.0, 0.0, 1.0]),
            Poly::real(&[0.0, 1.0]),
            vec![Pole { at: PoleLoc::Finite(c(0.0, 0.0)), k: 1 }, Pole { at: PoleLoc::INF, k: 1 }],
        )
        .unwrap();
        let q = make_qdiff(cover, vec![2, 2], c(5.0, 0.0), Flavor::CyS).unwrap();
        let r = zero_count_check(&q).unwrap();
        assert_eq!(r.expected, 2);
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn higher_order_condition() {
        let cover = HurwitzCover::polynomial(vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        // k = 1, l = 4: Re(s - 2 + 4) > 2 always; a negative l breaks it
        assert!(make_qdiff(cover.clone(), vec![4], c(2.5, 0.0), Flavor::CyS).is_ok());
        let cover2 = HurwitzCover::new(
            Poly::real(&[-1.0, 0.0, 1.0]),
            Poly::real(&[0.0, 1.0]),
            vec![Pole { at: PoleLoc::Finite(c(0.0, 0.0)), k: 1 }, Pole { at: PoleLoc::INF, k: 1 }],
        )
        .unwrap();
        assert!(matches!(
            make_qdiff(cover2, vec![0, 4], c(2.5, 0.0), Flavor::CyS),
            Err(HurwitzError::HigherOrder { index: 0, .. })
        ));
    }

    #[test]
    fn cyclic_action_rule() {
        let f = a2();
        let g = cyclic_action(&f, 1).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((g.num.coef[1] - w * w * -3.0).norm() < 1e-12);
        let id = cyclic_action(&f, 3).unwrap();
        assert!((id.num.coef[1] - f.num.coef[1]).norm() < 1e-12);
        // f(omega^{-1} z) agrees with the transformed cover
        let z = c(0.4, 1.1);
        assert!((g.eval(z) - f.eval(z / w)).norm() < 1e-12);
    }

    #[test]
    fn recover_linear() {
        let s = c(3.7, 0.2);
        let xi = |z: C64| (z.ln() * (s - 2.0)).exp();
        let r = recover_cover(xi, &[Pole { at: PoleLoc::INF, k: 1 }], &[4], s, None).unwrap();
        assert!((r.cover.num.coef[0]).norm() < 1e-9);
        assert!((r.cover.num.coef[1] - 1.0).norm() < 1e-9);
    }

    #[test]
    fn recover_rejects_wrong_l() {
        let f = a2();
        let q = make_qdiff(f.clone(), vec![4], c(3.5, 0.0), Flavor::CyS).unwrap();
        let xi = |z: C64| q.coefficient(z);
        let poles = f.poles.clone();
        // pretend the poles are at 0 and infinity with l = (1, 3)
        let mut wrong = poles.clone();
        wrong.insert(0, Pole { at: PoleLoc::Finite(c(0.0, 0.0)), k: 1 });
        wrong[1].k = 2;
        assert!(recover_cover(xi, &wrong, &[1, 3], c(3.5, 0.0), None).is_err());
    }

    #[test]
    fn exponents_match_declared() {
        let q = make_qdiff(a2(), vec![4], c(3.5, 0.0), Flavor::CyS).unwrap();
        let z0 = q.zeros()[0];
        assert!((fitted_exponent(&q, z0, 0.3) - 1.5).abs() < 1e-3);
        // in the chart at infinity the pole order is k(s-2)+l = 3*1.5+4
        assert!((fitted_exponent_at_infinity(&q, 0.3) + 8.5).abs() < 1e-2);
    }
}
