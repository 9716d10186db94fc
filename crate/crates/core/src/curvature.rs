//! The complex field α and the curvatures `K = |α| Re α`, `κ = |α| Im α`.
//!
//! α has one closed form per representation:
//!
//! | form  | α                                              |
//! |-------|------------------------------------------------|
//! | g     | `-4 g1' conj(g2') / (1 + g1 conj(g2))²`        |
//! | w     | `-w1' conj(w2') / cosh²((w1 + conj(w2))/2)`    |
//! | h     | w-form applied to `(h1 + h2, h1 - h2)`         |
//! | ξ     | `4 ξ1' conj(ξ2') / (ξ1 + conj(ξ2))²`           |
//! | θ     | `-(θ_u² + θ_v²) / cosh²θ`                      |
//! | η     | `(η_u² + η_v²) / η²`                           |
//!
//! Each is evaluated as numerator first, then a single division.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{fmt17, AdmissibilityMask, GridError, GridSpec, Reason};
use crate::representations::{
    CheckedPoint, Generator, HarmonicScalar, PairG, PairH, PairW, PairXi, Prepared, Rep,
};
use crate::scalar::{cx, is_finite, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaField<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<Option<Cx<T>>>,
    pub mask: AdmissibilityMask<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField<T> {
    pub grid: GridSpec<T>,
    pub k: Vec<Option<T>>,
    pub kappa: Vec<Option<T>>,
    pub mask: AdmissibilityMask<T>,
}

/// Pointwise α for one generator.
#[derive(Debug, Clone)]
pub struct AlphaEvaluator<T> {
    rep: Rep,
    prepared: Prepared<T>,
}

impl<T: Real> AlphaEvaluator<T> {
    pub fn new(g: &Generator<T>) -> Self {
        Self { rep: g.rep(), prepared: Prepared::new(g) }
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    /// α at `z`, or the reason the point is excluded.
    pub fn at(&self, z: Cx<T>, tol: T) -> Result<Cx<T>, Reason> {
        let point = self.prepared.check(z, tol)?;
        let one = cx(T::one(), T::zero());
        let half = T::lit(0.5);
        let (num, den) = match (self.rep, point) {
            (Rep::G, CheckedPoint::Pair(q)) => {
                let d = one + q.f1 * q.f2.conj();
                (q.d1 * q.d2.conj() * T::lit(-4.0), d * d)
            }
            (Rep::W, CheckedPoint::Pair(q)) => {
                let c = ((q.f1 + q.f2.conj()) * half).cosh();
                (-(q.d1 * q.d2.conj()), c * c)
            }
            (Rep::H, CheckedPoint::Pair(q)) => {
                let (dw1, dw2) = (q.d1 + q.d2, q.d1 - q.d2);
                let w1 = q.f1 + q.f2;
                let w2 = q.f1 - q.f2;
                let c = ((w1 + w2.conj()) * half).cosh();
                (-(dw1 * dw2.conj()), c * c)
            }
            (Rep::Xi, CheckedPoint::Pair(q)) => {
                let d = q.f1 + q.f2.conj();
                (q.d1 * q.d2.conj() * T::lit(4.0), d * d)
            }
            (Rep::Theta, CheckedPoint::Harmonic(q)) => {
                let c = q.value.cosh();
                (-q.grad_sq(), c * c)
            }
            (Rep::Eta, CheckedPoint::Harmonic(q)) => (q.grad_sq(), q.value * q.value),
            _ => unreachable!("prepared point kind matches its representation"),
        };
        let alpha = num / den;
        if !is_finite(alpha) {
            return Err(Reason::Pole);
        }
        if !(alpha.norm() >= tol) {
            return Err(Reason::DerivativeZero);
        }
        Ok(alpha)
    }
}

/// α sampled on a grid; the mask combines the representation's conditions
/// with finiteness and non-vanishing of α.
pub fn alpha_field<T: Real>(g: &Generator<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    let eval = AlphaEvaluator::new(g);
    let results: Vec<Result<Cx<T>, Reason>> = (0..grid.len()).map(|idx| eval.at(grid.z(idx), tol)).collect();
    let reasons = results.iter().map(|r| r.err()).collect();
    let values = results.into_iter().map(Result::ok).collect();
    AlphaField { grid: *grid, values, mask: AdmissibilityMask { grid: *grid, reasons } }
}

pub fn alpha_from_g<T: Real>(p: &PairG<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::G(p.clone()), grid, tol)
}

pub fn alpha_from_w<T: Real>(p: &PairW<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::W(p.clone()), grid, tol)
}

pub fn alpha_from_h<T: Real>(p: &PairH<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::H(p.clone()), grid, tol)
}

pub fn alpha_from_xi<T: Real>(p: &PairXi<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::Xi(p.clone()), grid, tol)
}

pub fn alpha_from_theta<T: Real>(t: &HarmonicScalar<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::Theta(t.clone()), grid, tol)
}

pub fn alpha_from_eta<T: Real>(e: &HarmonicScalar<T>, grid: &GridSpec<T>, tol: T) -> AlphaField<T> {
    alpha_field(&Generator::Eta(e.clone()), grid, tol)
}

/// `(K, κ) = |α| (Re α, Im α)`.
#[inline]
pub fn curvature_of<T: Real>(alpha: Cx<T>) -> (T, T) {
    let r = alpha.norm();
    (r * alpha.re, r * alpha.im)
}

pub fn curvatures<T: Real>(a: &AlphaField<T>) -> CurvatureField<T> {
    let pairs: Vec<Option<(T, T)>> = a.values.iter().map(|v| v.map(curvature_of)).collect();
    CurvatureField {
        grid: a.grid,
        k: pairs.iter().map(|p| p.map(|(k, _)| k)).collect(),
        kappa: pairs.iter().map(|p| p.map(|(_, q)| q)).collect(),
        mask: a.mask.clone(),
    }
}

/// α recovered from `(K, κ)`: `|α| = (K² + κ²)^¼`, `α = (K + iκ) / |α|`.
/// Points with `|α| < tol` are masked as derivative-zero.
pub fn alpha_from_curvatures<T: Real>(c: &CurvatureField<T>, tol: T) -> AlphaField<T> {
    let mut reasons = c.mask.reasons.clone();
    let values = (0..c.grid.len())
        .map(|idx| {
            let (k, q) = (c.k[idx]?, c.kappa[idx]?);
            let r = (k * k + q * q).sqrt().sqrt();
            if !(r >= tol) || !r.is_finite() {
                reasons[idx].get_or_insert(Reason::DerivativeZero);
                return None;
            }
            Some(cx(k / r, q / r))
        })
        .collect();
    AlphaField { grid: c.grid, values, mask: AdmissibilityMask { grid: c.grid, reasons } }
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both vanish.
pub fn rel_diff<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    let scale = a.norm().max(b.norm());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).norm() / scale
    }
}

pub const FIELD_COLUMNS: [&str; 7] = ["u", "v", "K", "kappa", "re_alpha", "im_alpha", "admissible"];

/// JSON header written next to a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader<T> {
    pub format: String,
    pub rep: Option<Rep>,
    pub f1: Option<String>,
    pub f2: Option<String>,
    pub grid: GridSpec<T>,
    pub tol: T,
    pub admissible: usize,
    pub total: usize,
    pub columns: Vec<String>,
    pub payload: String,
}

impl<T: Real> FieldHeader<T> {
    pub fn new(a: &AlphaField<T>, generator: Option<&Generator<T>>, tol: T, payload: &str) -> Self {
        let spec = generator.map(Generator::to_spec);
        Self {
            format: "spacelike-field/1".to_string(),
            rep: spec.as_ref().map(|s| s.rep),
            f1: spec.as_ref().map(|s| s.f1.clone()),
            f2: spec.as_ref().map(|s| s.f2.clone()),
            grid: a.grid,
            tol,
            admissible: a.mask.count(),
            total: a.grid.len(),
            columns: FIELD_COLUMNS.iter().map(|s| s.to_string()).collect(),
            payload: payload.to_string(),
        }
    }
}

fn opt17<T: Real>(x: Option<T>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// CSV with columns `u,v,K,kappa,re_alpha,im_alpha,admissible`; masked
/// points have empty value cells.
pub fn field_csv<T: Real>(a: &AlphaField<T>) -> String {
    let c = curvatures(a);
    let mut s = FIELD_COLUMNS.join(",");
    s.push('\n');
    for idx in 0..a.grid.len() {
        let (u, v) = a.grid.uv(idx);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt17(u),
            fmt17(v),
            opt17(c.k[idx]),
            opt17(c.kappa[idx]),
            opt17(a.values[idx].map(|z| z.re)),
            opt17(a.values[idx].map(|z| z.im)),
            u8::from(a.mask.ok(idx))
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldIoError {
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("samples do not form a row-major rectangular grid: {0}")]
    NotAGrid(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl<T: Real> CurvatureField<T> {
    /// Reads a CSV with at least the columns `u, v, K, kappa` (others are
    /// ignored). Rows must be row-major over `v` then `u` on a uniform grid.
    /// Empty `K`/`kappa` cells or `admissible = 0` mark excluded points.
    pub fn from_csv(text: &str) -> Result<Self, FieldIoError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(FieldIoError::MissingColumn("u"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let find = |name: &'static str| cols.iter().position(|c| *c == name).ok_or(FieldIoError::MissingColumn(name));
        let (cu, cv, ck, cq) = (find("u")?, find("v")?, find("K")?, find("kappa")?);
        let cadm = cols.iter().position(|c| *c == "admissible");

        let mut rows: Vec<(f64, f64, Option<T>, Option<T>)> = Vec::new();
        for (n, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let err = |message: String| FieldIoError::Line { line: n + 1, message };
            let cell = |c: usize| cells.get(c).copied().ok_or_else(|| err(format!("missing cell {c}")));
            let num = |c: usize| -> Result<Option<f64>, FieldIoError> {
                let s = cell(c)?;
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>().map(Some).map_err(|_| err(format!("bad number `{s}`")))
            };
            let u = num(cu)?.ok_or_else(|| err("empty u".into()))?;
            let v = num(cv)?.ok_or_else(|| err("empty v".into()))?;
            let admissible = match cadm {
                Some(c) => cell(c)? != "0",
                None => true,
            };
            let (k, q) = (num(ck)?, num(cq)?);
            let (k, q) = match (admissible, k, q) {
                (true, Some(k), Some(q)) => (Some(T::lit(k)), Some(T::lit(q))),
                _ => (None, None),
            };
            rows.push((u, v, k, q));
        }
        if rows.is_empty() {
            return Err(FieldIoError::NotAGrid("no rows".into()));
        }
        let v0 = rows[0].1;
        let nu = rows.iter().take_while(|r| r.1 == v0).count();
        if nu == 0 || !rows.len().is_multiple_of(nu) {
            return Err(FieldIoError::NotAGrid(format!("{} rows, first row has {nu} points", rows.len())));
        }
        let nv = rows.len() / nu;
        let last = rows[rows.len() - 1];
        let grid = GridSpec::new(T::lit(rows[0].0), T::lit(last.0), T::lit(v0), T::lit(last.1), nu, nv)?;
        let tol = 1e-9 * (1.0 + last.0.abs().max(last.1.abs()));
        for (idx, r) in rows.iter().enumerate() {
            let (u, v) = grid.uv(idx);
            if (u.to_f64_lossy() - r.0).abs() > tol || (v.to_f64_lossy() - r.1).abs() > tol {
                return Err(FieldIoError::NotAGrid(format!("row {} at ({}, {}) is off-grid", idx + 1, r.0, r.1)));
            }
        }
        let reasons = rows.iter().map(|r| if r.2.is_some() { None } else { Some(Reason::Pole) }).collect();
        Ok(Self {
            grid,
            k: rows.iter().map(|r| r.2).collect(),
            kappa: rows.iter().map(|r| r.3).collect(),
            mask: AdmissibilityMask { grid, reasons },
        })
    }
}
