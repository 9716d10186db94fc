//! Finite-difference checks of the natural equations.
//!
//! Three equivalent forms are checked on a grid:
//!
//! * `k-kappa`: `(K²+κ²)^¼ Δ ln (K²+κ²)^¼ = 2K`, `(K²+κ²)^¼ Δ atan2(κ, K) = 2κ`
//! * `x-y`: `ΔX = 2 e^X cos Y`, `ΔY = 2 e^X sin Y`
//! * `log-alpha`: `Δ log α = 2α`
//!
//! where `α = e^{X+iY}`. Residuals are taken only at interior points whose
//! whole 5-point stencil is admissible.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curvature::{AlphaField, CurvatureField};
use crate::grid::{fmt17, AdmissibilityMask, GridSpec, ScalarField};
use crate::representations::HarmonicScalar;
use crate::scalar::{principal_arg, Real};

/// Equation tag for the `(K, κ)` system.
pub const EQ_K_KAPPA: &str = "k-kappa";
/// Equation tag for the log-polar `(X, Y)` system.
pub const EQ_XY: &str = "x-y";
/// Equation tag for the complex form `Δ log α = 2α`.
pub const EQ_LOG_ALPHA: &str = "log-alpha";
pub const EQ_HARMONIC: &str = "harmonic";

/// Anisotropic 5-point Laplacian. Defined only where the stencil is complete.
pub fn laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let grid = f.grid;
    let mask = f.mask();
    let (hu2, hv2) = (grid.hu() * grid.hu(), grid.hv() * grid.hv());
    let two = T::lit(2.0);
    let values = (0..grid.len())
        .map(|idx| {
            if grid.nu < 3 || grid.nv < 3 || !mask.stencil_ok(idx) {
                return None;
            }
            let c = f.values[idx]?;
            let l = f.values[idx - 1]?;
            let r = f.values[idx + 1]?;
            let d = f.values[idx - grid.nu]?;
            let u = f.values[idx + grid.nu]?;
            Some((l + r - two * c) / hu2 + (d + u - two * c) / hv2)
        })
        .collect();
    ScalarField { grid, values }
}

/// `α = e^{X+iY}` with `Y` continued across each admissible component.
#[derive(Debug, Clone)]
pub struct LogPolarField<T> {
    pub x: ScalarField<T>,
    pub y: ScalarField<T>,
    /// Seed index of every component whose phase could not be made
    /// continuous. `y` is `None` on those components.
    pub non_unwrappable: Vec<usize>,
}

impl<T: Real> LogPolarField<T> {
    pub fn is_unwrapped(&self) -> bool {
        self.non_unwrappable.is_empty()
    }
}

/// Continue a field of angles breadth-first from the mask's basepoint,
/// shifting each value by multiples of 2π towards its parent. A component
/// where some admissible neighbour pair still differs by `>= π` is cleared
/// and reported by its seed index.
pub fn unwrap_phase<T: Real>(mask: &AdmissibilityMask<T>, angles: &[Option<T>]) -> (Vec<Option<T>>, Vec<usize>) {
    let grid = mask.grid;
    let tau = T::lit(2.0 * PI);
    let pi = T::lit(PI);
    let mut out: Vec<Option<T>> = vec![None; grid.len()];
    let mut failed = Vec::new();
    for comp in mask.components(mask.basepoint()) {
        for &(idx, parent) in &comp {
            let Some(a) = angles[idx] else { continue };
            out[idx] = Some(match parent.and_then(|p| out[p]) {
                None => a,
                Some(ref_) => a - tau * ((a - ref_) / tau).round(),
            });
        }
        let broken = comp.iter().any(|&(idx, _)| {
            let Some(a) = out[idx] else { return true };
            grid.neighbours(idx).any(|n| mask.ok(n) && out[n].is_some_and(|b| (a - b).abs() >= pi))
        });
        if broken {
            failed.push(comp[0].0);
            for &(idx, _) in &comp {
                out[idx] = None;
            }
        }
    }
    (out, failed)
}

pub fn log_polar<T: Real>(a: &AlphaField<T>) -> LogPolarField<T> {
    let x = a.values.iter().map(|v| v.map(|z| z.norm().ln())).collect();
    let args: Vec<Option<T>> = a.values.iter().map(|v| v.map(principal_arg)).collect();
    let mask = a.mask.and(&ScalarField { grid: a.grid, values: args.clone() }.mask());
    let (y, non_unwrappable) = unwrap_phase(&mask, &args);
    LogPolarField { x: ScalarField { grid: a.grid, values: x }, y: ScalarField { grid: a.grid, values: y }, non_unwrappable }
}

/// Summary of a two-component residual over interior admissible points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub max_abs: f64,
    pub l2: f64,
    pub n_interior: usize,
    pub h_u: f64,
    pub h_v: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slope: Option<f64>,
}

impl ResidualReport {
    pub fn h(&self) -> f64 {
        (self.h_u * self.h_v).sqrt()
    }
}

/// Residual fields of the two real equations of a system, plus their summary.
#[derive(Debug, Clone)]
pub struct Residual<T> {
    pub report: ResidualReport,
    pub first: ScalarField<T>,
    pub second: ScalarField<T>,
}

impl<T: Real> Residual<T> {
    fn new(equation: &str, first: ScalarField<T>, second: ScalarField<T>) -> Self {
        let grid = first.grid;
        let mut max_abs = 0.0f64;
        let mut sum = 0.0f64;
        let mut n = 0;
        for idx in 0..grid.len() {
            let (Some(a), Some(b)) = (first.values[idx], second.values[idx]) else { continue };
            let m = a.hypot(b).to_f64_lossy();
            max_abs = max_abs.max(m);
            sum += m * m;
            n += 1;
        }
        let (h_u, h_v) = (grid.hu().to_f64_lossy(), grid.hv().to_f64_lossy());
        let report = ResidualReport {
            equation: equation.to_string(),
            max_abs,
            l2: (sum * h_u * h_v).sqrt(),
            n_interior: n,
            h_u,
            h_v,
            slope: None,
        };
        Self { report, first, second }
    }

    /// Pointwise magnitude `hypot(first, second)`.
    pub fn magnitude(&self, idx: usize) -> Option<T> {
        Some(self.first.values[idx]?.hypot(self.second.values[idx]?))
    }

    /// CSV with columns `u,v,r1,r2`; blank cells outside the interior.
    pub fn to_csv(&self) -> String {
        let grid = self.first.grid;
        let mut s = String::from("u,v,r1,r2\n");
        let opt = |x: Option<T>| x.map(fmt17).unwrap_or_default();
        for idx in 0..grid.len() {
            let (u, v) = grid.uv(idx);
            let _ = writeln!(s, "{},{},{},{}", fmt17(u), fmt17(v), opt(self.first.values[idx]), opt(self.second.values[idx]));
        }
        s
    }
}

fn combine<T: Real>(
    lap: &ScalarField<T>,
    mut f: impl FnMut(usize, T) -> Option<T>,
) -> ScalarField<T> {
    let values = lap.values.iter().enumerate().map(|(idx, l)| l.and_then(|l| f(idx, l))).collect();
    ScalarField { grid: lap.grid, values }
}

/// `(ΔX − 2 Re α, ΔY − 2 Im α)`.
pub fn residual_complex<T: Real>(a: &AlphaField<T>) -> Residual<T> {
    let lp = log_polar(a);
    let two = T::lit(2.0);
    let r1 = combine(&laplacian(&lp.x), |idx, l| Some(l - two * a.values[idx]?.re));
    let r2 = combine(&laplacian(&lp.y), |idx, l| Some(l - two * a.values[idx]?.im));
    Residual::new(EQ_LOG_ALPHA, r1, r2)
}

/// `(ΔX − 2 e^X cos Y, ΔY − 2 e^X sin Y)`.
pub fn residual_system_xy<T: Real>(lp: &LogPolarField<T>) -> Residual<T> {
    let two = T::lit(2.0);
    let (x, y) = (&lp.x.values, &lp.y.values);
    let r1 = combine(&laplacian(&lp.x), |idx, l| Some(l - two * x[idx]?.exp() * y[idx]?.cos()));
    let r2 = combine(&laplacian(&lp.y), |idx, l| Some(l - two * x[idx]?.exp() * y[idx]?.sin()));
    Residual::new(EQ_XY, r1, r2)
}

/// Residuals of the `(K, κ)` system. Points with `K² + κ² <= tol⁴` are
/// excluded; the angle `atan2(κ, K)` is unwrapped like `Y`. Also returns the
/// seeds of components whose angle could not be unwrapped.
pub fn residual_system1<T: Real>(c: &CurvatureField<T>, tol: T) -> (Residual<T>, Vec<usize>) {
    let grid = c.grid;
    let floor = tol.powi(4);
    let quarter = T::lit(0.25);
    let mut s = vec![None; grid.len()];
    let mut angle = vec![None; grid.len()];
    for idx in 0..grid.len() {
        let (Some(k), Some(q)) = (c.k[idx], c.kappa[idx]) else { continue };
        let r2 = k * k + q * q;
        if r2 > floor && r2.is_finite() {
            s[idx] = Some(r2.powf(quarter));
            angle[idx] = Some((q + T::zero()).atan2(k));
        }
    }
    let mask = c.mask.and(&ScalarField { grid, values: s.clone() }.mask());
    let (theta, failed) = unwrap_phase(&mask, &angle);
    let log_s = ScalarField { grid, values: s.iter().map(|v| v.map(|x| x.ln())).collect() };
    let theta = ScalarField { grid, values: theta };
    let two = T::lit(2.0);
    let r1 = combine(&laplacian(&log_s), |idx, l| Some(s[idx]? * l - two * c.k[idx]?));
    let r2 = combine(&laplacian(&theta), |idx, l| Some(s[idx]? * l - two * c.kappa[idx]?));
    (Residual::new(EQ_K_KAPPA, r1, r2), failed)
}

/// `(Δ Re f, Δ Im f)` for sampled real and imaginary parts.
pub fn harmonic_residual<T: Real>(re: &ScalarField<T>, im: &ScalarField<T>) -> Residual<T> {
    Residual::new(EQ_HARMONIC, laplacian(re), laplacian(im))
}

pub fn check_harmonic<T: Real>(s: &HarmonicScalar<T>, grid: &GridSpec<T>) -> Residual<T> {
    let values: Vec<_> = (0..grid.len()).map(|idx| s.value(grid.z(idx)).ok()).collect();
    let re = ScalarField { grid: *grid, values: values.iter().map(|v| v.map(|z| z.re).filter(|x| x.is_finite())).collect() };
    let im = ScalarField { grid: *grid, values: values.iter().map(|v| v.map(|z| z.im).filter(|x| x.is_finite())).collect() };
    harmonic_residual(&re, &im)
}

/// Least-squares slope of `ln err` against `ln h`. `None` with fewer than two
/// usable points.
pub fn convergence_slope(h: &[f64], err: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        h.iter().zip(err).filter(|(h, e)| **h > 0.0 && **e > 0.0).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `k` grids over the same rectangle, each halving the spacing of the last.
pub fn refinements<T: Real>(base: &GridSpec<T>, k: usize) -> Vec<GridSpec<T>> {
    (0..k)
        .map(|level| {
            let f = 1usize << level;
            base.with_counts((base.nu - 1) * f + 1, (base.nv - 1) * f + 1).expect("refined grid valid")
        })
        .collect()
}

/// Fit the max-abs convergence slope across `reports` and store it in each.
pub fn attach_slope(reports: &mut [ResidualReport]) -> Option<f64> {
    let h: Vec<f64> = reports.iter().map(ResidualReport::h).collect();
    let e: Vec<f64> = reports.iter().map(|r| r.max_abs).collect();
    let slope = convergence_slope(&h, &e);
    for r in reports.iter_mut() {
        r.slope = slope;
    }
    slope
}
