//! Complex polynomials in ascending coefficient order and their roots.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    /// `coef[i]` multiplies `z^i`.
    pub coef: Vec<C64>,
}

impl Poly {
    pub fn new(mut coef: Vec<C64>) -> Self {
        while coef.len() > 1 && *coef.last().unwrap() == C64::new(0.0, 0.0) {
            coef.pop();
        }
        if coef.is_empty() {
            coef.push(C64::new(0.0, 0.0));
        }
        Poly { coef }
    }

    pub fn real(coef: &[f64]) -> Self {
        Poly::new(coef.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Poly::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coef.len() == 1 && self.coef[0] == C64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> C64 {
        *self.coef.last().unwrap()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coef.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative.
    pub fn eval_d(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coef.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Value, first and second derivative.
    pub fn eval_d2(&self, z: C64) -> (C64, C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let (mut p, mut dp, mut ddp) = (zero, zero, zero);
        for &c in self.coef.iter().rev() {
            ddp = ddp * z + dp * 2.0;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, ddp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coef.len() <= 1 {
            return Poly::constant(C64::new(0.0, 0.0));
        }
        Poly::new(
            self.coef
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coef.len() + other.coef.len() - 1];
        for (i, &a) in self.coef.iter().enumerate() {
            for (j, &b) in other.coef.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: C64) -> Poly {
        Poly::new(self.coef.iter().map(|&x| x * c).collect())
    }

    /// Largest coefficient modulus, used as a scale for tolerances.
    pub fn norm_inf(&self) -> f64 {
        self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Cauchy bound on root moduli.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().norm();
        1.0 + self.coef[..self.degree()]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max)
    }

    /// All roots with multiplicity, by Aberth–Ehrlich iteration polished with
    /// Newton steps. Falls back to Newton with deflation if the simultaneous
    /// iteration stalls.
    pub fn roots(&self) -> Vec<C64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![-self.coef[0] / self.coef[1]];
        }
        match aberth(self, 500) {
            Some(r) => r,
            None => deflation_roots(self),
        }
    }
}

fn aberth(p: &Poly, max_iter: usize) -> Option<Vec<C64>> {
    let n = p.degree();
    let dp = p.derivative();
    let radius = p.root_bound().min(1e6);
    let centroid = -p.coef[n - 1] / (p.coef[n] * n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            centroid + C64::from_polar(0.5 * radius, ang)
        })
        .collect();
    let scale = p.norm_inf();
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let pv = p.eval(z[i]);
            if pv.norm() <= 1e-300 {
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += C64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // a final residual check against the polynomial scale
    for &r in &z {
        let bound = scale * (1.0 + r.norm()).powi(n as i32) * 1e-9;
        if p.eval(r).norm() > bound {
            return None;
        }
    }
    Some(z)
}

fn deflation_roots(p: &Poly) -> Vec<C64> {
    let mut q = p.clone();
    let mut out = Vec::with_capacity(p.degree());
    while q.degree() > 0 {
        let mut z = C64::new(0.4, 0.9);
        for _ in 0..200 {
            let (v, d) = q.eval_d(z);
            if d.norm() == 0.0 {
                z += C64::new(1e-3, 1e-3);
                continue;
            }
            let step = v / d;
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        // polish against the original polynomial
        for _ in 0..5 {
            let (v, d) = p.eval_d(z);
            if d.norm() > 0.0 {
                z -= v / d;
            }
        }
        out.push(z);
        // synthetic division by (x - z)
        let n = q.degree();
        let mut nc = vec![C64::new(0.0, 0.0); n];
        let mut acc = C64::new(0.0, 0.0);
        for i in (0..=n).rev() {
            let c = q.coef[i] + acc * z;
            if i > 0 {
                nc[i - 1] = c;
            }
            acc = c;
        }
        q = Poly::new(nc);
    }
    out
}

/// Smallest pairwise distance relative to the root scale; `None` for fewer
/// than two roots.
pub fn min_relative_separation(roots: &[C64]) -> Option<f64> {
    if roots.len() < 2 {
        return None;
    }
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    Some(best)
}

/// Groups numerically equal roots. Returns `(representative, multiplicity)`.
pub fn cluster_roots(roots: &[C64], rel_tol: f64) -> Vec<(C64, usize)> {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut out: Vec<(C64, usize, C64)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(c, _, _)| (*c - r).norm() <= rel_tol * scale) {
            Some(entry) => {
                entry.1 += 1;
                entry.2 += r;
                entry.0 = entry.2 / entry.1 as f64;
            }
            None => out.push((r, 1, r)),
        }
    }
    out.into_iter().map(|(c, m, _)| (c, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        let p = Poly::real(&[0.0, -3.0, 0.0, 1.0]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s3 = 3f64.sqrt();
        for (a, b) in r.iter().zip([-s3, 0.0, s3]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_roundtrip() {
        let roots = [
            C64::new(1.0, 2.0),
            C64::new(-0.5, 0.1),
            C64::new(3.0, -1.0),
            C64::new(0.0, 0.0),
            C64::new(-2.0, -2.0),
        ];
        let p = Poly::from_roots(&roots);
        let found = p.roots();
        for r in roots {
            assert!(found.iter().any(|f| (f - r).norm() < 1e-10));
        }
    }

    #[test]
    fn derivative_and_eval_agree() {
        let p = Poly::new(vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0), C64::new(-1.0, 0.5), C64::new(2.0, 0.0)]);
        let z = C64::new(0.3, -0.7);
        let (v, d, dd) = p.eval_d2(z);
        assert!((v - p.eval(z)).norm() < 1e-14);
        assert!((d - p.derivative().eval(z)).norm() < 1e-14);
        assert!((dd - p.derivative().derivative().eval(z)).norm() < 1e-13);
    }

    #[test]
    fn double_root_clusters() {
        let p = Poly::from_roots(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let c = cluster_roots(&p.roots(), 1e-5);
        assert_eq!(c.len(), 2);
        assert!(c.iter().any(|(_, m)| *m == 2));
    }
}
