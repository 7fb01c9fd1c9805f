//! Quadrature rules for complex-valued integrands on real intervals.

use num_complex::Complex64 as C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Adaptive Gauss–Kronrod (7, 15) on `[a, b]` to absolute tolerance `abs_tol`
/// or relative tolerance `rel_tol`, whichever is looser.
pub fn adaptive<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> QuadResult {
    let (v0, e0) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let total: C64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(rel_tol * total.norm());
        if err <= tol || pieces.len() >= max_intervals {
            return QuadResult {
                value: total,
                error: err,
                evaluations,
                converged: err <= tol,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval cannot be split further in double precision
            return QuadResult {
                value: total,
                error: err,
                evaluations,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        evaluations += 30;
        pieces.push((pa, mid, v1, e1));
        pieces.push((mid, pb, v2, e2));
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` points.
pub fn composite_gauss<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> C64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            total += f(c + 0.5 * h * xi) * (*wi * 0.5 * h);
        }
    }
    total
}

/// Trapezoid rule on a closed period `[0, 2 pi)` with `n` samples.
pub fn periodic_trapezoid<F: FnMut(f64) -> C64>(mut f: F, n: usize) -> C64 {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut total = C64::new(0.0, 0.0);
    for k in 0..n {
        total += f(k as f64 * h);
    }
    total * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn adaptive_sqrt_singularity() {
        let r = adaptive(|t| C64::new(t.sqrt(), 0.0), 0.0, 1.0, 1e-12, 1e-12, 200);
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_is_spectral_on_periodic() {
        let v = periodic_trapezoid(|t| C64::new((t.cos()).exp(), 0.0), 64);
        // 2 pi I_0(1)
        assert!((v.re - 7.954926521012845).abs() < 1e-12);
    }
}
