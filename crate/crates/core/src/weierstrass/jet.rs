use crate::curvature::CurvatureField;
use crate::grid::{AdmissibilityMask, GridSpec, Reason};
use crate::holoexpr::HoloExpr;
use crate::representations::PairW;
use crate::scalar::{cx, Real};

use super::{axpy, det4, im4, minkowski, neg4, re4, scale4, PhiFrame, Vec4};

/// Global sign applied to the raw normal-curvature expression so that the
/// extrinsic κ agrees with `|α| Im α`. See [`calibrate_kappa_sign`].
pub const KAPPA_SIGN: f64 = -1.0;

/// First and second partial derivatives of the immersion at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetPoint<T> {
    pub xu: Vec4<T>,
    pub xv: Vec4<T>,
    pub xuu: Vec4<T>,
    pub xuv: Vec4<T>,
    pub xvv: Vec4<T>,
    /// `⟨x_u, x_u⟩`.
    pub e: T,
}

impl<T: Real> JetPoint<T> {
    /// `(⟨x_u, x_v⟩, ⟨x_u, x_u⟩ − ⟨x_v, x_v⟩)`; both vanish for a conformal chart.
    pub fn conformality(&self) -> (T, T) {
        (minkowski(&self.xu, &self.xv), self.e - minkowski(&self.xv, &self.xv))
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceJet<T> {
    pub grid: GridSpec<T>,
    pub mask: AdmissibilityMask<T>,
    pub points: Vec<Option<JetPoint<T>>>,
}

/// Surface jet from a frame. Points where `E <= tol` are masked.
pub fn jet<T: Real>(frame: &PhiFrame<T>, tol: T) -> SurfaceJet<T> {
    let grid = frame.grid;
    let mut reasons = frame.mask.reasons.clone();
    let mut points = vec![None; grid.len()];
    for idx in 0..grid.len() {
        let (Some(phi), Some(dphi)) = (&frame.phi[idx], &frame.dphi[idx]) else { continue };
        let xu = re4(phi);
        let xv = neg4(&im4(phi));
        let xuu = re4(dphi);
        let xuv = neg4(&im4(dphi));
        let xvv = neg4(&xuu);
        let e = minkowski(&xu, &xu);
        if !(e > tol) {
            reasons[idx] = Some(Reason::DerivativeZero);
            continue;
        }
        points[idx] = Some(JetPoint { xu, xv, xuu, xuv, xvv, e });
    }
    SurfaceJet { grid, mask: AdmissibilityMask { grid, reasons }, points }
}

/// Oriented Lorentz-orthonormal basis of the normal plane: `n1` space-like,
/// `n2` time-like, with `det(x_u, x_v, n1, n2) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFrame<T> {
    pub n1: Vec4<T>,
    pub n2: Vec4<T>,
}

fn axis<T: Real>(k: usize) -> Vec4<T> {
    let mut e = [T::zero(); 4];
    e[k] = T::one();
    e
}

impl<T: Real> NormalFrame<T> {
    pub fn new(j: &JetPoint<T>) -> Option<Self> {
        let tangent = |x: &Vec4<T>| -> Vec4<T> {
            let a = minkowski(x, &j.xu) / j.e;
            let b = minkowski(x, &j.xv) / j.e;
            axpy(-b, &j.xv, &axpy(-a, &j.xu, x))
        };
        let first = Self::pick(&[3, 2, 1, 0], |e| tangent(e))?;
        let second = Self::pick(&[2, 1, 0, 3], |e| {
            let q = tangent(e);
            let s = minkowski(&q, &first) / minkowski(&first, &first);
            axpy(-s, &first, &q)
        })?;
        let (mut n1, mut n2) = if minkowski(&first, &first) > T::zero() { (first, second) } else { (second, first) };
        if !(minkowski(&n1, &n1) > T::zero() && minkowski(&n2, &n2) < T::zero()) {
            return None;
        }
        n1 = scale4(T::one() / minkowski(&n1, &n1).sqrt(), &n1);
        n2 = scale4(T::one() / (-minkowski(&n2, &n2)).sqrt(), &n2);
        if det4([&j.xu, &j.xv, &n1, &n2]) < T::zero() {
            n2 = neg4(&n2);
        }
        Some(Self { n1, n2 })
    }

    // First candidate whose projection has |⟨q, q⟩| >= 0.05, else the largest.
    fn pick(order: &[usize], project: impl Fn(&Vec4<T>) -> Vec4<T>) -> Option<Vec4<T>> {
        let mut best: Option<(T, Vec4<T>)> = None;
        for &k in order {
            let q = project(&axis(k));
            let m = minkowski(&q, &q).abs();
            if m >= T::lit(0.05) {
                return Some(q);
            }
            if best.is_none_or(|(b, _)| m > b) {
                best = Some((m, q));
            }
        }
        best.filter(|(m, _)| *m > T::lit(1e-12)).map(|(_, q)| q)
    }
}

/// Normal parts of the second derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFundamentalPoint<T> {
    pub s11: Vec4<T>,
    pub s12: Vec4<T>,
    pub s22: Vec4<T>,
    pub e: T,
    pub normal: Option<NormalFrame<T>>,
}

impl<T: Real> SecondFundamentalPoint<T> {
    /// `(⟨σ11, σ12⟩, ⟨σ11, σ11⟩ − ⟨σ12, σ12⟩)`; canonical coordinates give `(0, 1)`.
    pub fn canonicity(&self) -> (T, T) {
        (minkowski(&self.s11, &self.s12), minkowski(&self.s11, &self.s11) - minkowski(&self.s12, &self.s12))
    }

    pub fn gauss(&self) -> T {
        (minkowski(&self.s11, &self.s22) - minkowski(&self.s12, &self.s12)) / (self.e * self.e)
    }

    /// Normal curvature before the global sign correction.
    pub fn normal_raw(&self) -> Option<T> {
        let n = self.normal?;
        let two = T::lit(2.0);
        let a11 = minkowski(&self.s11, &n.n1);
        let b11 = minkowski(&self.s11, &n.n2);
        let a12 = minkowski(&self.s12, &n.n1);
        let b12 = minkowski(&self.s12, &n.n2);
        Some(two * (a12 * b11 - a11 * b12) / (self.e * self.e))
    }
}

#[derive(Debug, Clone)]
pub struct SecondFundamentalData<T> {
    pub grid: GridSpec<T>,
    pub mask: AdmissibilityMask<T>,
    pub points: Vec<Option<SecondFundamentalPoint<T>>>,
}

pub fn second_fundamental<T: Real>(j: &SurfaceJet<T>) -> SecondFundamentalData<T> {
    let points = j
        .points
        .iter()
        .map(|p| {
            p.as_ref().map(|p| {
                let normal_part = |x: &Vec4<T>| {
                    let a = minkowski(x, &p.xu) / p.e;
                    let b = minkowski(x, &p.xv) / p.e;
                    axpy(-b, &p.xv, &axpy(-a, &p.xu, x))
                };
                SecondFundamentalPoint {
                    s11: normal_part(&p.xuu),
                    s12: normal_part(&p.xuv),
                    s22: normal_part(&p.xvv),
                    e: p.e,
                    normal: NormalFrame::new(p),
                }
            })
        })
        .collect();
    SecondFundamentalData { grid: j.grid, mask: j.mask.clone(), points }
}

/// K and κ computed from the second fundamental form. Points without a
/// normal frame keep K but have no κ.
pub fn curvatures_extrinsic<T: Real>(s: &SecondFundamentalData<T>) -> CurvatureField<T> {
    let sign = T::lit(KAPPA_SIGN);
    let k = s.points.iter().map(|p| p.as_ref().map(|p| p.gauss()).filter(|x| x.is_finite())).collect();
    let kappa = s
        .points
        .iter()
        .map(|p| p.as_ref().and_then(|p| p.normal_raw()).map(|x| sign * x).filter(|x| x.is_finite()))
        .collect();
    CurvatureField { grid: s.grid, k, kappa, mask: s.mask.clone() }
}

/// Ratio of `|α| Im α` to the raw extrinsic normal curvature on θ = u + iu
/// at the origin, where α = −2i. Returns ±1.
pub fn calibrate_kappa_sign() -> f64 {
    let w = PairW {
        w1: HoloExpr::<f64>::z().scale(cx(1.0, 1.0)),
        w2: HoloExpr::<f64>::z().scale(cx(1.0, -1.0)),
    };
    let grid = GridSpec::square(-0.1, 0.1, 3).expect("valid grid");
    let frame = super::phi_from_w(&w, &grid, 1e-9);
    let sf = second_fundamental(&jet(&frame, 1e-9));
    let raw = sf.points[grid.centre()].and_then(|p| p.normal_raw()).expect("regular point");
    let intrinsic = -4.0;
    (intrinsic / raw).signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{alpha_field, curvatures};
    use crate::representations::{Generator, Rep, DEFAULT_TOL};
    use crate::weierstrass::phi_frame;

    fn extrinsic(g: &Generator<f64>, grid: &GridSpec<f64>) -> (SurfaceJet<f64>, SecondFundamentalData<f64>, CurvatureField<f64>) {
        let f = phi_frame(g, grid, DEFAULT_TOL).unwrap();
        let j = jet(&f, DEFAULT_TOL);
        let s = second_fundamental(&j);
        let c = curvatures_extrinsic(&s);
        (j, s, c)
    }

    #[test]
    fn sign_constant_is_calibrated() {
        assert_eq!(calibrate_kappa_sign(), KAPPA_SIGN);
    }

    #[test]
    fn unit_metric_at_origin() {
        let g = Generator::parse(Rep::W, "z", "z").unwrap();
        let grid = GridSpec::square(-0.1, 0.1, 3).unwrap();
        let (j, _, _) = extrinsic(&g, &grid);
        let p = j.points[grid.centre()].unwrap();
        assert!((p.e - 1.0).abs() < 1e-15);
        let (f, d) = p.conformality();
        assert!(f.abs() < 1e-15 && d.abs() < 1e-15);
    }

    #[test]
    fn gauss_curvature_at_origin() {
        let g = Generator::parse(Rep::G, "z", "z").unwrap();
        let grid = GridSpec::square(-0.1, 0.1, 3).unwrap();
        let (_, s, c) = extrinsic(&g, &grid);
        let idx = grid.centre();
        assert!((c.k[idx].unwrap() + 16.0).abs() < 1e-12);
        let (c1, c2) = s.points[idx].unwrap().canonicity();
        assert!(c1.abs() < 1e-12);
        assert!((c2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_intrinsic_on_generic_pair() {
        let g = Generator::parse(Rep::G, "z + 0.3*z^2 + 0.2", "exp(0.5*i*z) - 0.4*z").unwrap();
        let grid = GridSpec::square(-0.5, 0.5, 11).unwrap();
        let (_, s, c) = extrinsic(&g, &grid);
        let intr = curvatures(&alpha_field(&g, &grid, DEFAULT_TOL));
        let mut n = 0;
        for idx in 0..grid.len() {
            let (Some(k), Some(kk), Some(ki), Some(kki)) = (c.k[idx], c.kappa[idx], intr.k[idx], intr.kappa[idx]) else {
                continue;
            };
            let scale = ki.abs().max(kki.abs()).max(1.0);
            assert!((k - ki).abs() < 1e-9 * scale, "K at {idx}: {k} vs {ki}");
            assert!((kk - kki).abs() < 1e-9 * scale, "kappa at {idx}: {kk} vs {kki}");
            let (c1, c2) = s.points[idx].unwrap().canonicity();
            assert!(c1.abs() < 1e-9 && (c2 - 1.0).abs() < 1e-9);
            n += 1;
        }
        assert!(n > 100);
    }

    #[test]
    fn normal_frame_is_orthonormal() {
        let g = Generator::parse(Rep::H, "z + 0.1*z^2", "0.5*i*z").unwrap();
        let grid = GridSpec::square(-0.4, 0.4, 5).unwrap();
        let (j, s, _) = extrinsic(&g, &grid);
        for idx in 0..grid.len() {
            let (Some(p), Some(q)) = (j.points[idx], s.points[idx]) else { continue };
            let n = q.normal.unwrap();
            assert!((minkowski(&n.n1, &n.n1) - 1.0).abs() < 1e-12);
            assert!((minkowski(&n.n2, &n.n2) + 1.0).abs() < 1e-12);
            assert!(minkowski(&n.n1, &n.n2).abs() < 1e-12);
            for t in [&p.xu, &p.xv] {
                assert!(minkowski(&n.n1, t).abs() < 1e-9 * p.e.sqrt());
                assert!(minkowski(&n.n2, t).abs() < 1e-9 * p.e.sqrt());
            }
            assert!(det4([&p.xu, &p.xv, &n.n1, &n.n2]) > 0.0);
        }
    }
}
