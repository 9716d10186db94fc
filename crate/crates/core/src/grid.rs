//! Rectangular sampling grids, admissibility masks and scalar fields.
//!
//! Points are stored row-major over `v` then `u`: index `j * nu + i` is the
//! point `(u0 + i*hu, v0 + j*hv)`. Endpoints are inclusive.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cx, Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid bounds must satisfy u0 < u1 and v0 < v1")]
    Bounds,
    #[error("grid needs at least 3 points per axis, got {nu}x{nv}")]
    TooFewPoints { nu: usize, nv: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub u0: T,
    pub u1: T,
    pub v0: T,
    pub v1: T,
    pub nu: usize,
    pub nv: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(u0: T, u1: T, v0: T, v1: T, nu: usize, nv: usize) -> Result<Self, GridError> {
        // Also rejects NaN bounds.
        if !(u0 < u1 && v0 < v1) {
            return Err(GridError::Bounds);
        }
        if nu < 3 || nv < 3 {
            return Err(GridError::TooFewPoints { nu, nv });
        }
        Ok(Self { u0, u1, v0, v1, nu, nv })
    }

    pub fn square(lo: T, hi: T, n: usize) -> Result<Self, GridError> {
        Self::new(lo, hi, lo, hi, n, n)
    }

    /// Same bounds, different point counts.
    pub fn with_counts(&self, nu: usize, nv: usize) -> Result<Self, GridError> {
        Self::new(self.u0, self.u1, self.v0, self.v1, nu, nv)
    }

    pub fn hu(&self) -> T {
        (self.u1 - self.u0) / T::lit((self.nu - 1) as f64)
    }

    pub fn hv(&self) -> T {
        (self.v1 - self.v0) / T::lit((self.nv - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nu, idx / self.nu)
    }

    pub fn u(&self, i: usize) -> T {
        if i + 1 == self.nu {
            self.u1
        } else {
            self.u0 + self.hu() * T::lit(i as f64)
        }
    }

    pub fn v(&self, j: usize) -> T {
        if j + 1 == self.nv {
            self.v1
        } else {
            self.v0 + self.hv() * T::lit(j as f64)
        }
    }

    pub fn uv(&self, idx: usize) -> (T, T) {
        let (i, j) = self.ij(idx);
        (self.u(i), self.v(j))
    }

    /// The point as `z = u + iv`.
    pub fn z(&self, idx: usize) -> Cx<T> {
        let (u, v) = self.uv(idx);
        cx(u, v)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.ij(idx);
        i == 0 || j == 0 || i + 1 == self.nu || j + 1 == self.nv
    }

    /// 4-neighbours, u-direction first.
    pub fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> {
        let (i, j) = self.ij(idx);
        let (nu, nv) = (self.nu, self.nv);
        let cand = [
            (i > 0).then(|| idx - 1),
            (i + 1 < nu).then(|| idx + 1),
            (j > 0).then(|| idx - nu),
            (j + 1 < nv).then(|| idx + nu),
        ];
        cand.into_iter().flatten()
    }

    /// Index of the grid point nearest the rectangle centre.
    pub fn centre(&self) -> usize {
        self.index(self.nu / 2, self.nv / 2)
    }

    /// Index of the grid point nearest `(u, v)`, clamped to the grid.
    pub fn nearest(&self, u: T, v: T) -> usize {
        let clamp = |x: T, n: usize| -> usize {
            let k = x.round().to_f64_lossy();
            if k.is_nan() || k < 0.0 {
                0
            } else {
                (k as usize).min(n - 1)
            }
        };
        let i = clamp((u - self.u0) / self.hu(), self.nu);
        let j = clamp((v - self.v0) / self.hv(), self.nv);
        self.index(i, j)
    }
}

/// Why a grid point was excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    DerivativeZero,
    DenominatorDegenerate,
    Pole,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::DerivativeZero => "derivative-zero",
            Reason::DenominatorDegenerate => "denominator-degenerate",
            Reason::Pole => "pole",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "derivative-zero" => Reason::DerivativeZero,
            "denominator-degenerate" => Reason::DenominatorDegenerate,
            "pole" => Reason::Pole,
            _ => return None,
        })
    }
}

/// Per-point admissibility; `None` means admissible.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityMask<T> {
    pub grid: GridSpec<T>,
    pub reasons: Vec<Option<Reason>>,
}

impl<T: Real> AdmissibilityMask<T> {
    pub fn all_admissible(grid: GridSpec<T>) -> Self {
        Self { grid, reasons: vec![None; grid.len()] }
    }

    #[inline]
    pub fn ok(&self, idx: usize) -> bool {
        self.reasons[idx].is_none()
    }

    pub fn count(&self) -> usize {
        self.reasons.iter().filter(|r| r.is_none()).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.reasons.len() as f64
    }

    pub fn admissible_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.reasons.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(i, _)| i)
    }

    /// Interior point whose full 5-point stencil is admissible.
    pub fn stencil_ok(&self, idx: usize) -> bool {
        !self.grid.is_boundary(idx) && self.ok(idx) && self.grid.neighbours(idx).all(|n| self.ok(n))
    }

    /// Intersection of two masks on the same grid; the first failure reason wins.
    pub fn and(&self, other: &Self) -> Self {
        let reasons = self.reasons.iter().zip(&other.reasons).map(|(a, b)| a.or(*b)).collect();
        Self { grid: self.grid, reasons }
    }

    /// Points reachable from `start` through admissible 4-neighbours, in
    /// breadth-first order, each paired with the neighbour it was reached from.
    pub fn bfs(&self, start: usize) -> Vec<(usize, Option<usize>)> {
        let mut seen = vec![false; self.grid.len()];
        let mut order = Vec::new();
        if !self.ok(start) {
            return order;
        }
        let mut queue = VecDeque::from([(start, None)]);
        seen[start] = true;
        while let Some((idx, parent)) = queue.pop_front() {
            order.push((idx, parent));
            for n in self.grid.neighbours(idx) {
                if !seen[n] && self.ok(n) {
                    seen[n] = true;
                    queue.push_back((n, Some(idx)));
                }
            }
        }
        order
    }

    /// Connected admissible components. The component containing `base` (if
    /// admissible) comes first; the rest follow in order of their lowest index.
    pub fn components(&self, base: Option<usize>) -> Vec<Vec<(usize, Option<usize>)>> {
        let mut label = vec![false; self.grid.len()];
        let mut out = Vec::new();
        let seeds = base.into_iter().chain(0..self.grid.len());
        for seed in seeds {
            if label[seed] || !self.ok(seed) {
                continue;
            }
            let comp = self.bfs(seed);
            for &(i, _) in &comp {
                label[i] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Admissible point nearest the grid centre (ties broken by lowest index).
    pub fn basepoint(&self) -> Option<usize> {
        let (ci, cj) = self.grid.ij(self.grid.centre());
        self.admissible_indices().min_by_key(|&idx| {
            let (i, j) = self.grid.ij(idx);
            let di = i.abs_diff(ci);
            let dj = j.abs_diff(cj);
            (di * di + dj * dj, idx)
        })
    }

    /// CSV with columns `u,v,admissible,reason`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,v,admissible,reason\n");
        for (idx, r) in self.reasons.iter().enumerate() {
            let (u, v) = self.grid.uv(idx);
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt17(u),
                fmt17(v),
                u8::from(r.is_none()),
                r.map(Reason::as_str).unwrap_or("")
            );
        }
        s
    }
}

/// Real-valued samples on a grid; `None` at excluded points.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<Option<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn sample(grid: GridSpec<T>, mut f: impl FnMut(T, T) -> Option<T>) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (u, v) = grid.uv(idx);
                f(u, v).filter(|x| x.is_finite())
            })
            .collect();
        Self { grid, values }
    }

    pub fn get(&self, idx: usize) -> Option<T> {
        self.values[idx]
    }

    /// Mask of points carrying a value (excluded points reported as poles).
    pub fn mask(&self) -> AdmissibilityMask<T> {
        let reasons = self.values.iter().map(|v| if v.is_some() { None } else { Some(Reason::Pole) }).collect();
        AdmissibilityMask { grid: self.grid, reasons }
    }

    pub fn max_abs(&self) -> Option<T> {
        self.values.iter().flatten().map(|x| x.abs()).fold(None, |m, x| Some(m.map_or(x, |m: T| m.max(x))))
    }
}

/// Float formatting used by every text artifact: 17 significant digits.
pub fn fmt17<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_indexing() {
        let g = GridSpec::new(-1.0, 1.0, 0.0, 2.0, 5, 3).unwrap();
        assert_eq!(g.hu(), 0.5);
        assert_eq!(g.hv(), 1.0);
        assert_eq!(g.len(), 15);
        assert_eq!(g.uv(g.index(4, 2)), (1.0, 2.0));
        assert_eq!(g.ij(7), (2, 1));
        assert_eq!(g.centre(), g.index(2, 1));
        assert!(g.is_boundary(0) && !g.is_boundary(7));
        assert_eq!(g.neighbours(7).collect::<Vec<_>>(), vec![6, 8, 2, 12]);
    }

    #[test]
    fn invalid_grids() {
        assert_eq!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 3, 3), Err(GridError::Bounds));
        assert_eq!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 2, 3), Err(GridError::TooFewPoints { nu: 2, nv: 3 }));
        assert!(GridSpec::new(f64::NAN, 1.0, 0.0, 1.0, 3, 3).is_err());
    }

    #[test]
    fn components_and_basepoint() {
        let g = GridSpec::square(0.0, 1.0, 5).unwrap();
        let mut m = AdmissibilityMask::all_admissible(g);
        // wall along i = 2 splits the grid in two
        for j in 0..5 {
            m.reasons[g.index(2, j)] = Some(Reason::Pole);
        }
        let base = m.basepoint().unwrap();
        assert_eq!(m.grid.ij(base), (1, 2));
        let comps = m.components(Some(base));
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0][0], (base, None));
        assert_eq!(comps[0].len(), 10);
        assert_eq!(comps[1].len(), 10);
        assert!(!m.stencil_ok(g.index(1, 2)));
        assert!(!m.stencil_ok(g.index(3, 0)));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1f64), "1.0000000000000001e-1");
        assert_eq!(fmt17(-16.0f64), "-1.6000000000000000e1");
        let x: f64 = fmt17(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }
}
