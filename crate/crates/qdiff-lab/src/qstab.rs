//! Finite stability data read off strip decompositions, and the q-stability
//! data they induce.
//!
//! Nothing categorical is built. An object is a label with a charge `Z` and
//! a phase `φ` with `Z = |Z| e^{iπφ}`; morphisms are a sparse table of
//! nonvanishing `Hom(E_i, E_j[shift] X^x)` entries.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flatgeo::StripDecomposition;
use crate::periods::{specialize_charge, Laurent, LaurentLattice};

#[derive(Debug, Error, PartialEq)]
pub enum QStabError {
    #[error("strip decomposition is not saddle free")]
    NotSaddleFree,
    #[error("{mode:?} inducing needs gldim + 1 {} Re(s), got gldim = {gldim}, Re(s) = {s_re}", if *mode == Mode::Open { "<" } else { "<=" })]
    Inequality { gldim: f64, s_re: f64, mode: Mode },
    #[error("object {0} has zero charge")]
    ZeroCharge(usize),
    #[error("phase of object {0} does not match its charge")]
    PhaseMismatch(usize),
    #[error("hom entry {0} refers to a missing object")]
    BadEntry(usize),
    #[error("objects, charges and phases differ in length")]
    LengthMismatch,
    #[error("empty k window")]
    EmptyWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Open,
    Closed,
}

/// `Hom(E_source, E_target[shift] X^x) != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomEntry {
    pub source: usize,
    pub target: usize,
    pub shift: i64,
    #[serde(default)]
    pub x: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityDatum {
    pub objects: Vec<String>,
    pub charges: Vec<C64>,
    pub phases: Vec<f64>,
    #[serde(default)]
    pub hom_degrees: Vec<HomEntry>,
}

fn phase_in_branch(z: C64, lower: f64) -> f64 {
    // representative in (lower, lower + 2]
    let phi = z.arg() / PI;
    phi + 2.0 * (((lower - phi) / 2.0).floor() + 1.0)
}

impl StabilityDatum {
    /// Phases are taken in `(branch, branch + 2]`; charges in the half plane
    /// above the branch line land in `(branch, branch + 1]`.
    pub fn from_charges(objects: Vec<String>, charges: Vec<C64>, hom_degrees: Vec<HomEntry>, branch: f64) -> Result<Self, QStabError> {
        let phases = charges.iter().map(|&z| phase_in_branch(z, branch)).collect();
        let d = StabilityDatum {
            objects,
            charges,
            phases,
            hom_degrees,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), QStabError> {
        let n = self.objects.len();
        if self.charges.len() != n || self.phases.len() != n {
            return Err(QStabError::LengthMismatch);
        }
        for (i, (&z, &phi)) in self.charges.iter().zip(&self.phases).enumerate() {
            if z.norm() == 0.0 {
                return Err(QStabError::ZeroCharge(i));
            }
            let r = C64::from_polar(z.norm(), PI * phi);
            if (r - z).norm() > 1e-9 * z.norm() {
                return Err(QStabError::PhaseMismatch(i));
            }
        }
        for (e, h) in self.hom_degrees.iter().enumerate() {
            if h.source >= n || h.target >= n {
                return Err(QStabError::BadEntry(e));
            }
        }
        Ok(())
    }

    /// Largest phase gap carried by a recorded Hom with no `X` power;
    /// `-inf` for an empty table.
    pub fn gldim(&self) -> f64 {
        self.hom_degrees
            .iter()
            .filter(|h| h.x == 0)
            .map(|h| self.phases[h.target] + h.shift as f64 - self.phases[h.source])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The `C` action `Z -> e^{iπt} Z`, `φ -> φ + t`.
    pub fn rotate(&self, t: f64) -> Self {
        let rot = C64::from_polar(1.0, PI * t);
        StabilityDatum {
            objects: self.objects.clone(),
            charges: self.charges.iter().map(|z| z * rot).collect(),
            phases: self.phases.iter().map(|p| p + t).collect(),
            hom_degrees: self.hom_degrees.clone(),
        }
    }
}

/// `(zero, sector)` pairs occupied by a strip; sector `j` lies between rays
/// `j` and `j + 1`.
fn strip_sectors(dec: &StripDecomposition, strip: usize, rays: &[usize]) -> [(usize, usize); 2] {
    let b = dec.strips[strip].boundary;
    let (z0, j0) = dec.separatrices[b[0]].origin.expect("separatrix origin");
    let (z1, j1) = dec.separatrices[b[3]].origin.expect("separatrix origin");
    [(z0, j0 % rays[z0]), (z1, (j1 + rays[z1] - 1) % rays[z1])]
}

/// One object per strip with its period as charge. Strips occupying adjacent
/// sectors at a zero, i.e. sharing a separatrix, give a degree-one Hom from
/// the clockwise strip to the counterclockwise one.
pub fn from_strips(dec: &StripDecomposition) -> Result<StabilityDatum, QStabError> {
    if !dec.saddle_free {
        return Err(QStabError::NotSaddleFree);
    }
    let nz = dec.separatrices.iter().filter_map(|t| t.origin).map(|o| o.0 + 1).max().unwrap_or(0);
    let mut rays = vec![0usize; nz];
    for t in &dec.separatrices {
        if let Some((z, _)) = t.origin {
            rays[z] += 1;
        }
    }
    let sectors: Vec<[(usize, usize); 2]> = (0..dec.strips.len()).map(|i| strip_sectors(dec, i, &rays)).collect();
    let mut hom = Vec::new();
    for (i, si) in sectors.iter().enumerate() {
        for (j, sj) in sectors.iter().enumerate() {
            if i == j {
                continue;
            }
            let adjacent = si.iter().any(|&(z, a)| sj.iter().any(|&(w, b)| w == z && b == (a + 1) % rays[z]));
            if adjacent {
                hom.push(HomEntry {
                    source: i,
                    target: j,
                    shift: 1,
                    x: 0,
                });
            }
        }
    }
    StabilityDatum::from_charges(
        (0..dec.strips.len()).map(|i| format!("strip-{i}")).collect(),
        dec.strips.iter().map(|s| s.period).collect(),
        hom,
        dec.phase / PI,
    )
}

pub fn induce_gate(gldim: f64, s: C64, mode: Mode) -> bool {
    match mode {
        Mode::Open => gldim + 1.0 < s.re,
        Mode::Closed => gldim + 1.0 <= s.re,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedPhase {
    pub object: usize,
    pub k: i64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QStabilityDatum {
    pub base: StabilityDatum,
    pub s: C64,
    pub mode: Mode,
    pub gldim: f64,
    /// Inclusive range of `X` powers.
    pub window: (i64, i64),
    pub induced_phases: Vec<InducedPhase>,
    pub lattice: LaurentLattice,
    /// Class of `X^k E_i` in the Laurent lattice, in `induced_phases` order.
    pub classes: Vec<Vec<Laurent>>,
    /// Specialized charges of the recorded classes.
    pub charges: Vec<C64>,
    pub support_constant: f64,
    pub support_holds: bool,
}

fn sup_norm(v: &[Laurent]) -> f64 {
    v.iter()
        .flat_map(|c| c.terms.values())
        .map(|c| c.unsigned_abs() as f64)
        .fold(0.0, f64::max)
}

pub fn induce(d: &StabilityDatum, s: C64, mode: Mode, window: (i64, i64)) -> Result<QStabilityDatum, QStabError> {
    d.validate()?;
    if window.0 > window.1 {
        return Err(QStabError::EmptyWindow);
    }
    let gldim = d.gldim();
    if !induce_gate(gldim, s, mode) {
        return Err(QStabError::Inequality { gldim, s_re: s.re, mode });
    }
    let lattice = LaurentLattice {
        labels: d.objects.clone(),
    };
    let mut induced_phases = Vec::new();
    let mut classes = Vec::new();
    let mut charges = Vec::new();
    for k in window.0..=window.1 {
        for i in 0..d.objects.len() {
            induced_phases.push(InducedPhase {
                object: i,
                k,
                phase: d.phases[i] + k as f64 * s.re,
            });
            let v: Vec<Laurent> = lattice.basis_vector(i).iter().map(|c| c.shift(k)).collect();
            charges.push(specialize_charge(&v, &d.charges, s));
            classes.push(v);
        }
    }
    let max_norm = classes.iter().map(|v| sup_norm(v)).fold(0.0, f64::max);
    let min_charge = charges.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let support_constant = 2.0 * max_norm / min_charge;
    let support_holds = classes.iter().zip(&charges).all(|(v, z)| support_constant * z.norm() > sup_norm(v));
    Ok(QStabilityDatum {
        base: d.clone(),
        s,
        mode,
        gldim,
        window,
        induced_phases,
        lattice,
        classes,
        charges,
        support_constant,
        support_holds,
    })
}

impl QStabilityDatum {
    /// Smallest gap between the phases of consecutive `X`-blocks.
    pub fn block_gap(&self) -> f64 {
        let (lo, hi) = self
            .base
            .phases
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
        self.s.re - (hi - lo)
    }

    /// Smallest `N0` with every recorded Hom inside `|x| <= N0`.
    pub fn minimal_xhom_bound(&self) -> i64 {
        self.base.hom_degrees.iter().map(|h| h.x.abs()).max().unwrap_or(0)
    }
}

pub fn xhom_bounded_check(d: &QStabilityDatum, n0: i64) -> bool {
    d.base.hom_degrees.iter().all(|h| h.x.abs() <= n0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatgeo::{strip_decomposition, PlainDifferential, TraceOptions};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn a2_heart(eps: f64) -> StabilityDatum {
        StabilityDatum::from_charges(
            vec!["S1".into(), "S2".into()],
            vec![C64::from_polar(1.0, PI * (0.5 + eps)), C64::from_polar(2.0, PI * (0.5 - eps))],
            vec![HomEntry {
                source: 0,
                target: 1,
                shift: 1,
                x: 0,
            }],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn gldim_examples() {
        let one = StabilityDatum::from_charges(
            vec!["E".into()],
            vec![c(0.0, 1.0)],
            vec![HomEntry {
                source: 0,
                target: 0,
                shift: 0,
                x: 0,
            }],
            0.0,
        )
        .unwrap();
        assert_eq!(one.gldim(), 0.0);
        let d = a2_heart(0.1);
        assert!((d.gldim() - 0.8).abs() < 1e-12);
        assert!((d.rotate(0.37).gldim() - 0.8).abs() < 1e-12);
        let empty = StabilityDatum::from_charges(vec![], vec![], vec![], 0.0).unwrap();
        assert_eq!(empty.gldim(), f64::NEG_INFINITY);
    }

    #[test]
    fn gate_examples() {
        assert!(induce_gate(1.0, c(3.0, 0.0), Mode::Open));
        assert!(induce_gate(1.0, c(2.0, 0.0), Mode::Closed));
        assert!(!induce_gate(1.0, c(2.0, 0.0), Mode::Open));
        assert!(!induce_gate(1.0, c(1.9, 0.0), Mode::Closed));
    }

    #[test]
    fn induced_phases_are_translates() {
        let d = a2_heart(0.1);
        let s = c(3.4, 0.2);
        let q = induce(&d, s, Mode::Open, (-1, 1)).unwrap();
        for ip in &q.induced_phases {
            assert_eq!(ip.phase, d.phases[ip.object] + ip.k as f64 * s.re);
        }
        assert_eq!(q.induced_phases.len(), 6);
        assert!(q.support_holds);
        for (ip, z) in q.induced_phases.iter().zip(&q.charges) {
            let expect = C64::from_polar(1.0, PI * ip.phase) * d.charges[ip.object].norm() * (-PI * ip.k as f64 * s.im).exp();
            assert!((z - expect).norm() < 1e-12 * expect.norm());
        }
    }

    #[test]
    fn integer_s_specializes_to_signs() {
        let d = a2_heart(0.05);
        for n in 2..6 {
            let q = induce(&d, c(n as f64, 0.0), Mode::Closed, (-2, 2)).unwrap();
            for (ip, z) in q.induced_phases.iter().zip(&q.charges) {
                let sign = if (n * ip.k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                assert_eq!(*z, d.charges[ip.object] * sign);
            }
        }
    }

    #[test]
    fn xhom_bounds() {
        let mut d = a2_heart(0.0);
        d.hom_degrees.push(HomEntry {
            source: 1,
            target: 0,
            shift: 0,
            x: 1,
        });
        let q = induce(&d, c(3.0, 0.0), Mode::Open, (0, 0)).unwrap();
        assert!(xhom_bounded_check(&q, 1));
        d.hom_degrees.push(HomEntry {
            source: 0,
            target: 0,
            shift: -3,
            x: 2,
        });
        let q = induce(&d, c(3.0, 0.0), Mode::Open, (0, 0)).unwrap();
        assert!(!xhom_bounded_check(&q, 1));
        assert_eq!(q.minimal_xhom_bound(), 2);
    }

    fn a2() -> PlainDifferential {
        let (a, b) = (c(-1.3, 0.4), c(0.6, -0.2));
        let roots = crate::poly::Poly::new(vec![b, a, c(0.0, 0.0), c(1.0, 0.0)]).roots();
        PlainDifferential::new(c(1.0, 0.0), roots.into_iter().map(|r| (r, 1)).collect()).unwrap()
    }

    #[test]
    fn a2_strips_give_a_rank_two_heart() {
        let dec = strip_decomposition(&a2(), 0.0, TraceOptions::default()).unwrap();
        let d = from_strips(&dec).unwrap();
        assert_eq!(d.objects.len(), 2);
        let (z1, z2) = (d.charges[0], d.charges[1]);
        assert!((z1.conj() * z2).im.abs() > 1e-3 * z1.norm() * z2.norm());
        assert!(d.phases.iter().all(|&p| p > 0.0 && p <= 1.0));
        assert_eq!(d.hom_degrees.len(), 1);
        assert!(d.gldim() < 1.0);
    }

    #[test]
    fn rotation_and_scaling_act_on_charges() {
        let pd = a2();
        let base = from_strips(&strip_decomposition(&pd, 0.0, TraceOptions::default()).unwrap()).unwrap();
        let t = 0.23;
        let mut rotated = pd.clone();
        rotated.scale *= C64::from_polar(1.0, 2.0 * PI * t);
        let d = from_strips(&strip_decomposition(&rotated, PI * t, TraceOptions::default()).unwrap()).unwrap();
        for i in 0..2 {
            assert!((d.phases[i] - base.phases[i] - t).abs() < 1e-7);
        }
        assert!((d.gldim() - base.gldim()).abs() < 1e-7);
        let mut scaled = pd;
        scaled.scale *= 4.0;
        let d = from_strips(&strip_decomposition(&scaled, 0.0, TraceOptions::default()).unwrap()).unwrap();
        for i in 0..2 {
            assert!((d.phases[i] - base.phases[i]).abs() < 1e-7);
            assert!((d.charges[i].norm() - 2.0 * base.charges[i].norm()).abs() < 1e-6);
        }
    }
}
