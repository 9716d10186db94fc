//! Canonical Weierstrass frames Φ = (φ1, φ2, φ3, φ4), the surface jet they
//! induce, the second fundamental form, extrinsic curvatures and surface
//! integration.
//!
//! Ambient space is ℝ⁴ with the Lorentzian form
//! `⟨x, y⟩ = x1 y1 + x2 y2 + x3 y3 − x4 y4`; the fourth axis is time-like.
//! The immersion is normalised by `Φ = x_u − i x_v`, i.e. `x = Re ∫ Φ dz`.
//! With this normalisation the generated coordinates are canonical: the
//! second fundamental form satisfies `⟨σ11, σ12⟩ = 0` and
//! `⟨σ11, σ11⟩ − ⟨σ12, σ12⟩ = 1`.

mod frame;
mod jet;
mod mesh;

pub use frame::{phi_frame, phi_from_g, phi_from_h, phi_from_w, PhiFrame};
pub use jet::{
    calibrate_kappa_sign, curvatures_extrinsic, jet, second_fundamental, JetPoint, NormalFrame, SecondFundamentalData,
    SecondFundamentalPoint, SurfaceJet, KAPPA_SIGN,
};
pub use mesh::{
    export_mesh, integrate_along, integrate_surface, obj_string, read_sidecar, sidecar_csv, MeshError, PathOrder, Projection, SidecarRow,
    SurfaceMesh,
};

use crate::scalar::{Cx, Real};

/// Real 4-vector in ambient coordinates `(x1, x2, x3, x4)`.
pub type Vec4<T> = [T; 4];

/// Lorentzian inner product with signature `(+, +, +, −)`.
#[inline]
pub fn minkowski<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// Complex bilinear extension `φ1² + φ2² + φ3² − φ4²` (no conjugation).
#[inline]
pub fn isotropy<T: Real>(phi: &[Cx<T>; 4]) -> Cx<T> {
    phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2] - phi[3] * phi[3]
}

/// Hermitian norm `⟨Φ, conj Φ⟩ = |φ1|² + |φ2|² + |φ3|² − |φ4|²`.
#[inline]
pub fn hermitian_norm<T: Real>(phi: &[Cx<T>; 4]) -> T {
    phi[0].norm_sqr() + phi[1].norm_sqr() + phi[2].norm_sqr() - phi[3].norm_sqr()
}

#[inline]
pub(crate) fn re4<T: Real>(phi: &[Cx<T>; 4]) -> Vec4<T> {
    [phi[0].re, phi[1].re, phi[2].re, phi[3].re]
}

#[inline]
pub(crate) fn im4<T: Real>(phi: &[Cx<T>; 4]) -> Vec4<T> {
    [phi[0].im, phi[1].im, phi[2].im, phi[3].im]
}

#[inline]
pub(crate) fn axpy<T: Real>(a: T, x: &Vec4<T>, y: &Vec4<T>) -> Vec4<T> {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2], a * x[3] + y[3]]
}

#[inline]
pub(crate) fn scale4<T: Real>(a: T, x: &Vec4<T>) -> Vec4<T> {
    [a * x[0], a * x[1], a * x[2], a * x[3]]
}

#[inline]
pub(crate) fn neg4<T: Real>(x: &Vec4<T>) -> Vec4<T> {
    [-x[0], -x[1], -x[2], -x[3]]
}

/// Euclidean distance between two 4-vectors.
#[inline]
pub fn dist4<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    let mut s = T::zero();
    for k in 0..4 {
        s = s + (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Determinant of the 4×4 matrix with the given rows.
pub(crate) fn det4<T: Real>(m: [&Vec4<T>; 4]) -> T {
    let minor = |r0: usize, r1: usize, r2: usize, c: [usize; 3]| -> T {
        let a = m[r0];
        let b = m[r1];
        let d = m[r2];
        a[c[0]] * (b[c[1]] * d[c[2]] - b[c[2]] * d[c[1]]) - a[c[1]] * (b[c[0]] * d[c[2]] - b[c[2]] * d[c[0]])
            + a[c[2]] * (b[c[0]] * d[c[1]] - b[c[1]] * d[c[0]])
    };
    let cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    let mut det = T::zero();
    for (k, c) in cols.iter().enumerate() {
        let term = m[0][k] * minor(1, 2, 3, *c);
        det = if k % 2 == 0 { det + term } else { det - term };
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant() {
        let id: [Vec4<f64>; 4] = [[1., 0., 0., 0.], [0., 1., 0., 0.], [0., 0., 1., 0.], [0., 0., 0., 1.]];
        assert_eq!(det4([&id[0], &id[1], &id[2], &id[3]]), 1.0);
        assert_eq!(det4([&id[1], &id[0], &id[2], &id[3]]), -1.0);
        let m: [Vec4<f64>; 4] = [[2., 1., 0., 3.], [0., 1., 4., 1.], [1., 0., 1., 0.], [3., 2., 0., 1.]];
        // reference value from LU factorisation: -28
        assert!((det4([&m[0], &m[1], &m[2], &m[3]]) + 28.0).abs() < 1e-12);
    }

    #[test]
    fn metric_signature() {
        let t = [0.0, 0.0, 0.0, 1.0];
        let s = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(minkowski(&t, &t), -1.0);
        assert_eq!(minkowski(&s, &s), 1.0);
        assert_eq!(minkowski(&s, &t), 0.0);
    }
}
