use crate::grid::{AdmissibilityMask, GridSpec, Reason};
use crate::holoexpr::{Differentiated, HoloExpr};
use crate::representations::{admissibility, xi_to_g, Generator, PairG, PairH, PairW, Rep, RepError};
use crate::scalar::{cx, is_finite, Cx, Real};

/// Φ and its z-derivative sampled on a grid.
///
/// Every component has the form `scale · N_k(z) / √D(z)`. The square root is
/// taken on the principal branch at the seed of each connected admissible
/// component and continued along breadth-first paths, so Φ is continuous on
/// each component. `branch[idx]` records the sign applied to the principal
/// root (`0` at masked points); `branch_conflicts` counts admissible
/// neighbour pairs whose roots still disagree (a loop around a branch point).
#[derive(Debug, Clone)]
pub struct PhiFrame<T> {
    pub rep: Rep,
    pub grid: GridSpec<T>,
    pub mask: AdmissibilityMask<T>,
    pub phi: Vec<Option<[Cx<T>; 4]>>,
    pub dphi: Vec<Option<[Cx<T>; 4]>>,
    pub branch: Vec<i8>,
    pub branch_conflicts: usize,
    pub basepoint: Option<usize>,
}

struct FrameExprs<T> {
    numerators: [Differentiated<T>; 4],
    radicand: Differentiated<T>,
    scale: T,
}

struct RawPoint<T> {
    n: [Cx<T>; 4],
    dn: [Cx<T>; 4],
    d: Cx<T>,
    dd: Cx<T>,
}

impl<T: Real> FrameExprs<T> {
    fn new(numerators: [HoloExpr<T>; 4], radicand: HoloExpr<T>, scale: T) -> Self {
        Self {
            numerators: numerators.map(|e| Differentiated::new(&e)),
            radicand: Differentiated::new(&radicand),
            scale,
        }
    }

    fn eval(&self, z: Cx<T>) -> Option<RawPoint<T>> {
        let mut n = [Cx::default(); 4];
        let mut dn = [Cx::default(); 4];
        for k in 0..4 {
            let (f, df) = self.numerators[k].eval(z).ok()?;
            n[k] = f;
            dn[k] = df;
        }
        let (d, dd) = self.radicand.eval(z).ok()?;
        Some(RawPoint { n, dn, d, dd })
    }
}

fn i_times<T: Real>(e: HoloExpr<T>) -> HoloExpr<T> {
    e.scale(cx(T::zero(), T::one()))
}

fn h_exprs<T: Real>(p: &PairH<T>) -> FrameExprs<T> {
    let (dh1, dh2) = (p.h1.differentiate(), p.h2.differentiate());
    let radicand = dh1.clone() * dh1 - dh2.clone() * dh2;
    let n = [i_times(p.h1.clone().cosh()), p.h1.clone().sinh(), p.h2.clone().cosh(), p.h2.clone().sinh()];
    FrameExprs::new(n, radicand, T::one())
}

fn w_exprs<T: Real>(p: &PairW<T>) -> FrameExprs<T> {
    let half = cx(T::lit(0.5), T::zero());
    let sum = (p.w1.clone() + p.w2.clone()).scale(half);
    let diff = (p.w1.clone() - p.w2.clone()).scale(half);
    let radicand = p.w1.differentiate() * p.w2.differentiate();
    let n = [i_times(sum.clone().cosh()), sum.sinh(), diff.clone().cosh(), diff.sinh()];
    FrameExprs::new(n, radicand, T::one())
}

fn g_exprs<T: Real>(p: &PairG<T>) -> FrameExprs<T> {
    let prod = p.g1.clone() * p.g2.clone();
    let radicand = p.g1.differentiate() * p.g2.differentiate();
    let n = [
        i_times(prod.clone() + HoloExpr::one()),
        prod - HoloExpr::one(),
        p.g1.clone() + p.g2.clone(),
        p.g1.clone() - p.g2.clone(),
    ];
    FrameExprs::new(n, radicand, T::lit(0.5))
}

fn build<T: Real>(rep: Rep, exprs: FrameExprs<T>, base_mask: AdmissibilityMask<T>) -> PhiFrame<T> {
    let grid = base_mask.grid;
    let mut reasons = base_mask.reasons.clone();
    let mut raw: Vec<Option<RawPoint<T>>> = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        if reasons[idx].is_some() {
            raw.push(None);
            continue;
        }
        match exprs.eval(grid.z(idx)) {
            Some(p) if p.d != Cx::default() => raw.push(Some(p)),
            _ => {
                reasons[idx] = Some(Reason::Pole);
                raw.push(None);
            }
        }
    }
    let mask = AdmissibilityMask { grid, reasons };

    // Branch continuation of √D.
    let roots: Vec<Option<Cx<T>>> = raw.iter().map(|r| r.as_ref().map(|p| p.d.sqrt())).collect();
    let mut branch = vec![0i8; grid.len()];
    let basepoint = mask.basepoint();
    for comp in mask.components(basepoint) {
        for (idx, parent) in comp {
            let s = roots[idx].expect("admissible point has a root");
            branch[idx] = match parent {
                None => 1,
                Some(par) => {
                    let sp = roots[par].expect("admissible parent") * T::lit(branch[par] as f64);
                    if (s - sp).norm() <= (s + sp).norm() {
                        1
                    } else {
                        -1
                    }
                }
            };
        }
    }
    let mut branch_conflicts = 0;
    for idx in mask.admissible_indices() {
        let s = roots[idx].unwrap() * T::lit(branch[idx] as f64);
        for n in grid.neighbours(idx).filter(|&n| n > idx && mask.ok(n)) {
            let t = roots[n].unwrap() * T::lit(branch[n] as f64);
            if (s - t).norm() > (s + t).norm() {
                branch_conflicts += 1;
            }
        }
    }

    let mut phi = vec![None; grid.len()];
    let mut dphi = vec![None; grid.len()];
    let mut reasons = mask.reasons.clone();
    for idx in 0..grid.len() {
        let Some(p) = &raw[idx] else { continue };
        let root = roots[idx].unwrap() * T::lit(branch[idx] as f64);
        // q = D^{-1/2}, q' = -D' q / (2D)
        let q = cx(exprs.scale, T::zero()) / root;
        let dq = -(p.dd * q) / (p.d * T::lit(2.0));
        let mut f = [Cx::default(); 4];
        let mut df = [Cx::default(); 4];
        for k in 0..4 {
            f[k] = p.n[k] * q;
            df[k] = p.dn[k] * q + p.n[k] * dq;
        }
        if f.iter().chain(df.iter()).all(|c| is_finite(*c)) {
            phi[idx] = Some(f);
            dphi[idx] = Some(df);
        } else {
            reasons[idx] = Some(Reason::Pole);
            branch[idx] = 0;
        }
    }

    PhiFrame {
        rep,
        grid,
        mask: AdmissibilityMask { grid, reasons },
        phi,
        dphi,
        branch,
        branch_conflicts,
        basepoint,
    }
}

pub fn phi_from_h<T: Real>(p: &PairH<T>, grid: &GridSpec<T>, tol: T) -> PhiFrame<T> {
    let mask = admissibility(&Generator::H(p.clone()), grid, tol);
    build(Rep::H, h_exprs(p), mask)
}

pub fn phi_from_w<T: Real>(p: &PairW<T>, grid: &GridSpec<T>, tol: T) -> PhiFrame<T> {
    let mask = admissibility(&Generator::W(p.clone()), grid, tol);
    build(Rep::W, w_exprs(p), mask)
}

pub fn phi_from_g<T: Real>(p: &PairG<T>, grid: &GridSpec<T>, tol: T) -> PhiFrame<T> {
    let mask = admissibility(&Generator::G(p.clone()), grid, tol);
    build(Rep::G, g_exprs(p), mask)
}

/// Frame for any generator with a Weierstrass representation. ξ-pairs are
/// converted to g-pairs first; θ and η carry no frame.
pub fn phi_frame<T: Real>(g: &Generator<T>, grid: &GridSpec<T>, tol: T) -> Result<PhiFrame<T>, RepError> {
    match g {
        Generator::H(p) => Ok(phi_from_h(p, grid, tol)),
        Generator::W(p) => Ok(phi_from_w(p, grid, tol)),
        Generator::G(p) => Ok(phi_from_g(p, grid, tol)),
        Generator::Xi(p) => {
            let g = xi_to_g(p);
            let mut frame = phi_from_g(&g, grid, tol);
            // ξ conditions as well, so the frame mask matches the ξ α-field.
            frame.mask = frame.mask.and(&admissibility(&Generator::Xi(p.clone()), grid, tol));
            for idx in 0..grid.len() {
                if !frame.mask.ok(idx) {
                    frame.phi[idx] = None;
                    frame.dphi[idx] = None;
                    frame.branch[idx] = 0;
                }
            }
            Ok(frame)
        }
        Generator::Theta(_) | Generator::Eta(_) => Err(RepError::NoFrame(g.rep())),
    }
}

impl<T: Real> PhiFrame<T> {
    /// A frame with prescribed values and zero derivative, bypassing any
    /// generator. Points with `None` are masked.
    pub fn from_values(grid: GridSpec<T>, phi: Vec<Option<[Cx<T>; 4]>>) -> Self {
        let reasons = phi.iter().map(|p| if p.is_some() { None } else { Some(Reason::Pole) }).collect();
        let mask = AdmissibilityMask { grid, reasons };
        let dphi = phi.iter().map(|p| p.map(|_| [Cx::default(); 4])).collect();
        let branch = phi.iter().map(|p| i8::from(p.is_some())).collect();
        let basepoint = mask.basepoint();
        Self { rep: Rep::G, grid, mask, phi, dphi, branch, branch_conflicts: 0, basepoint }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{h_to_w, DEFAULT_TOL};
    use crate::weierstrass::{hermitian_norm, isotropy};

    type E = HoloExpr<f64>;

    fn p(s: &str) -> E {
        E::parse(s).unwrap()
    }

    fn close(a: Cx<f64>, b: Cx<f64>) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn h_frame_at_origin() {
        // D = 1 - 4 = -3, √D = i√3
        let grid = GridSpec::square(-0.1, 0.1, 3).unwrap();
        let f = phi_from_h(&PairH { h1: p("z"), h2: p("2*z") }, &grid, DEFAULT_TOL);
        let phi = f.phi[grid.centre()].unwrap();
        let s3 = 3f64.sqrt();
        assert!(close(phi[0], cx(1.0 / s3, 0.0)));
        assert!(close(phi[1], cx(0.0, 0.0)));
        assert!(close(phi[2], cx(0.0, -1.0 / s3)));
        assert!(close(phi[3], cx(0.0, 0.0)));
        assert!(isotropy(&phi).norm() < 1e-15);
        assert!((hermitian_norm(&phi) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn w_frame_at_origin() {
        let grid = GridSpec::square(-0.1, 0.1, 3).unwrap();
        let f = phi_from_w(&PairW { w1: p("z"), w2: p("z") }, &grid, DEFAULT_TOL);
        let phi = f.phi[grid.centre()].unwrap();
        assert!(close(phi[0], cx(0.0, 1.0)));
        assert!(close(phi[1], cx(0.0, 0.0)));
        assert!(close(phi[2], cx(1.0, 0.0)));
        assert!(close(phi[3], cx(0.0, 0.0)));
        assert!(isotropy(&phi).norm() < 1e-15);
    }

    #[test]
    fn g_frame_at_one() {
        let grid = GridSpec::new(0.9, 1.1, -0.1, 0.1, 3, 3).unwrap();
        let f = phi_from_g(&PairG { g1: p("z"), g2: p("z") }, &grid, DEFAULT_TOL);
        let phi = f.phi[grid.centre()].unwrap();
        assert!(close(phi[0], cx(0.0, 1.0)));
        assert!(close(phi[1], cx(0.0, 0.0)));
        assert!(close(phi[2], cx(1.0, 0.0)));
        assert!(close(phi[3], cx(0.0, 0.0)));
        assert!((hermitian_norm(&phi) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn h_and_w_frames_agree_up_to_sign() {
        let h = PairH { h1: p("z + 0.2*z^2"), h2: p("0.5*i*z + 0.1") };
        let grid = GridSpec::square(-0.6, 0.6, 21).unwrap();
        let fh = phi_from_h(&h, &grid, DEFAULT_TOL);
        let fw = phi_from_w(&h_to_w(&h), &grid, DEFAULT_TOL);
        let base = fh.basepoint.unwrap();
        let a = fh.phi[base].unwrap();
        let b = fw.phi[base].unwrap();
        let sign = if (a[0] - b[0]).norm() < (a[0] + b[0]).norm() { 1.0 } else { -1.0 };
        let mut checked = 0;
        for idx in (0..grid.len()).step_by(grid.len() / 20) {
            if let (Some(a), Some(b)) = (fh.phi[idx], fw.phi[idx]) {
                for k in 0..4 {
                    assert!((a[k] - b[k] * sign).norm() < 1e-12);
                }
                checked += 1;
            }
        }
        assert!(checked >= 20);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = PairG { g1: p("z + 0.3*z^2"), g2: p("exp(0.5*i*z) + z") };
        let grid = GridSpec::square(-0.3, 0.3, 7).unwrap();
        let f = phi_from_g(&g, &grid, DEFAULT_TOL);
        let idx = grid.centre();
        let (i, j) = grid.ij(idx);
        let h = grid.hu();
        let l = f.phi[grid.index(i - 1, j)].unwrap();
        let r = f.phi[grid.index(i + 1, j)].unwrap();
        let d = f.dphi[idx].unwrap();
        for k in 0..4 {
            let fd = (r[k] - l[k]) / (2.0 * h);
            assert!((fd - d[k]).norm() < 1e-2 * d[k].norm().max(1.0), "k={k}");
        }
    }

    #[test]
    fn theta_has_no_frame() {
        let grid = GridSpec::square(-1.0, 1.0, 3).unwrap();
        let th = Generator::Theta(crate::representations::HarmonicScalar { holo: p("z"), antiholo_source: p("z") });
        assert!(matches!(phi_frame(&th, &grid, DEFAULT_TOL), Err(RepError::NoFrame(Rep::Theta))));
    }
}
