//! Fractional-linear action on g-pairs.
//!
//! A matrix `[[a, b], [c, d]]` with `ad − bc ≠ 0` sends `(g1, g2)` to
//!
//! ```text
//! ĝ1 = (a g1 + b) / (c g1 + d)
//! ĝ2 = (conj(d) g2 − conj(c)) / (−conj(b) g2 + conj(a))
//! ```
//!
//! and leaves α (hence K and κ) unchanged. The second map is the action of
//! `conj(M⁻¹)ᵀ`, so composing transformations multiplies their matrices.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::curvature::{alpha_field, rel_diff};
use crate::grid::GridSpec;
use crate::holoexpr::HoloExpr;
use crate::representations::{Generator, PairG};
use crate::scalar::{cx, Cx, Real};

/// Threshold on `|ad − bc|` after scaling the largest coefficient to 1.
pub const DET_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("singular parameters: normalised |ad - bc| = {0:e}")]
    Singular(f64),
    #[error("the two pairs have no common admissible point")]
    EmptyOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusParams<T> {
    a: Cx<T>,
    b: Cx<T>,
    c: Cx<T>,
    d: Cx<T>,
}

fn normalised_det<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> T {
    let m = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
    if !(m > T::zero()) || !m.is_finite() {
        return T::zero();
    }
    (a * d - b * c).norm() / (m * m)
}

impl<T: Real> MoebiusParams<T> {
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Result<Self, MoebiusError> {
        let det = normalised_det(a, b, c, d);
        if det > T::lit(DET_THRESHOLD) {
            Ok(Self { a, b, c, d })
        } else {
            Err(MoebiusError::Singular(det.to_f64_lossy()))
        }
    }

    pub fn identity() -> Self {
        let (o, l) = (Cx::default(), cx(T::one(), T::zero()));
        Self { a: l, b: o, c: o, d: l }
    }

    /// `z ↦ 1/z`.
    pub fn inversion() -> Self {
        let (o, l) = (Cx::default(), cx(T::one(), T::zero()));
        Self { a: o, b: l, c: l, d: o }
    }

    /// Coefficients with real and imaginary parts uniform in `[-1, 1]`,
    /// redrawn until non-singular.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut draw = || cx(T::lit(rng.gen_range(-1.0..=1.0)), T::lit(rng.gen_range(-1.0..=1.0)));
            let (a, b, c, d) = (draw(), draw(), draw(), draw());
            if let Ok(m) = Self::new(a, b, c, d) {
                return m;
            }
        }
    }

    pub fn coefficients(&self) -> [Cx<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Cx<T> {
        self.a * self.d - self.b * self.c
    }

    /// Same transformation with every coefficient multiplied by `lambda`.
    pub fn scaled(&self, lambda: Cx<T>) -> Result<Self, MoebiusError> {
        Self::new(self.a * lambda, self.b * lambda, self.c * lambda, self.d * lambda)
    }

    /// Matrix product `self · other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self, MoebiusError> {
        let (p, q) = (self, other);
        Self::new(
            p.a * q.a + p.b * q.c,
            p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d,
        )
    }

    /// `(d, −b, −c, a)`, the inverse up to the factor `ad − bc`.
    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `(a w + b) / (c w + d)` for a numeric argument.
    pub fn apply(&self, w: Cx<T>) -> Cx<T> {
        (self.a * w + self.b) / (self.c * w + self.d)
    }

    /// Parameters acting on the second generator.
    pub fn dual(&self) -> Self {
        Self { a: self.d.conj(), b: -self.c.conj(), c: -self.b.conj(), d: self.a.conj() }
    }

    pub fn transform(&self, p: &PairG<T>) -> PairG<T> {
        transform(p, self)
    }
}

fn is<T: Real>(c: Cx<T>, v: f64) -> bool {
    c == cx(T::lit(v), T::zero())
}

// `k·e + m`, dropping unit and zero coefficients.
fn affine<T: Real>(k: Cx<T>, e: &HoloExpr<T>, m: Cx<T>) -> HoloExpr<T> {
    let lin = if is(k, 0.0) {
        return HoloExpr::constant(m);
    } else if is(k, 1.0) {
        e.clone()
    } else if is(k, -1.0) {
        -e.clone()
    } else {
        e.clone().scale(k)
    };
    if is(m, 0.0) {
        lin
    } else {
        lin + HoloExpr::constant(m)
    }
}

fn fractional<T: Real>(m: &MoebiusParams<T>, g: &HoloExpr<T>) -> HoloExpr<T> {
    let num = affine(m.a, g, m.b);
    if is(m.c, 0.0) {
        if is(m.d, 1.0) {
            num
        } else {
            num / HoloExpr::constant(m.d)
        }
    } else {
        num / affine(m.c, g, m.d)
    }
}

/// The transformed pair, as expression trees.
pub fn transform<T: Real>(p: &PairG<T>, m: &MoebiusParams<T>) -> PairG<T> {
    PairG { g1: fractional(m, &p.g1), g2: fractional(&m.dual(), &p.g2) }
}

#[derive(Serialize, Deserialize)]
struct RawParams<T> {
    a: [T; 2],
    b: [T; 2],
    c: [T; 2],
    d: [T; 2],
}

impl<T: Real> Serialize for MoebiusParams<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let f = |z: Cx<T>| [z.re, z.im];
        RawParams { a: f(self.a), b: f(self.b), c: f(self.c), d: f(self.d) }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for MoebiusParams<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RawParams::<T>::deserialize(d)?;
        let f = |v: [T; 2]| cx(v[0], v[1]);
        MoebiusParams::new(f(r.a), f(r.b), f(r.c), f(r.d)).map_err(D::Error::custom)
    }
}

/// Outcome of comparing the α fields of two g-pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub same: bool,
    /// Largest `|α_p − α_q| / max(|α_p|, |α_q|)` over the common set.
    pub max_rel_deviation: f64,
    /// `(u, v)` where the largest deviation occurs.
    pub worst_point: [f64; 2],
    pub n_common: usize,
    pub n_total: usize,
    pub rel_tol: f64,
}

/// Whether `p` and `q` generate the same `(K, κ)` on `grid`, judged by
/// comparing α on the points admissible for both.
pub fn same_solution<T: Real>(
    p: &PairG<T>,
    q: &PairG<T>,
    grid: &GridSpec<T>,
    mask_tol: T,
    rel_tol: T,
) -> Result<Evidence, MoebiusError> {
    let ap = alpha_field(&Generator::G(p.clone()), grid, mask_tol);
    let aq = alpha_field(&Generator::G(q.clone()), grid, mask_tol);
    let mut worst = (T::zero(), 0usize);
    let mut n = 0;
    for idx in 0..grid.len() {
        let (Some(x), Some(y)) = (ap.values[idx], aq.values[idx]) else { continue };
        let r = rel_diff(x, y);
        if n == 0 || r > worst.0 {
            worst = (r, idx);
        }
        n += 1;
    }
    if n == 0 {
        return Err(MoebiusError::EmptyOverlap);
    }
    let (u, v) = grid.uv(worst.1);
    Ok(Evidence {
        same: worst.0 <= rel_tol,
        max_rel_deviation: worst.0.to_f64_lossy(),
        worst_point: [u.to_f64_lossy(), v.to_f64_lossy()],
        n_common: n,
        n_total: grid.len(),
        rel_tol: rel_tol.to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::AlphaEvaluator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type P = MoebiusParams<f64>;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    fn pair(a: &str, b: &str) -> PairG<f64> {
        PairG { g1: HoloExpr::parse(a).unwrap(), g2: HoloExpr::parse(b).unwrap() }
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(P::new(c(1., 0.), c(2., 0.), c(2., 0.), c(4., 0.)), Err(MoebiusError::Singular(_))));
        assert!(P::new(c(0., 0.), c(0., 0.), c(0., 0.), c(0., 0.)).is_err());
        // scale-free: tiny but regular matrices are accepted
        assert!(P::new(c(1e-9, 0.), c(0., 0.), c(0., 0.), c(1e-9, 0.)).is_ok());
    }

    #[test]
    fn identity_returns_pair() {
        let p = pair("z + 0.5*z^2", "exp(z)");
        assert_eq!(transform(&p, &P::identity()), p);
    }

    #[test]
    fn inversion_preserves_alpha() {
        let p = pair("z", "z");
        let q = transform(&p, &P::inversion());
        assert_eq!(q.g1.to_string(), "(1 / z)");
        let (ep, eq) = (AlphaEvaluator::new(&Generator::G(p)), AlphaEvaluator::new(&Generator::G(q)));
        for z in [c(0.3, 0.1), c(-0.7, 0.4), c(1.5, -2.0), c(0.1, 0.9)] {
            let a = ep.at(z, 1e-9).unwrap();
            let b = eq.at(z, 1e-9).unwrap();
            assert!(rel_diff(a, b) < 1e-12);
        }
    }

    #[test]
    fn dual_is_contragredient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = P::random(&mut rng);
        let n = P::random(&mut rng);
        let lhs = m.compose(&n).unwrap().dual();
        let rhs = m.dual().compose(&n.dual()).unwrap();
        let w = c(0.3, -0.2);
        assert!((lhs.apply(w) - rhs.apply(w)).norm() < 1e-12);
    }

    #[test]
    fn inverse_of_diagonal() {
        let m = P::new(c(2., 0.), c(0., 0.), c(0., 0.), c(1., 0.)).unwrap();
        let inv = m.inverse();
        assert_eq!(inv.coefficients(), [c(1., 0.), c(0., 0.), c(0., 0.), c(2., 0.)]);
        assert_eq!(P::identity().inverse(), P::identity());
        let g = pair("z", "z");
        let back = transform(&transform(&g, &m), &inv);
        for k in 0..10 {
            let z = c(0.1 * k as f64 - 0.4, 0.05 * k as f64);
            assert!((back.g1.eval(z).unwrap() - z).norm() < 1e-13);
        }
    }

    #[test]
    fn json_shape() {
        let m = P::new(c(1., 2.), c(0., 0.), c(0., -1.), c(1., 0.)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"a":[1.0,2.0],"b":[0.0,0.0],"c":[0.0,-1.0],"d":[1.0,0.0]}"#);
        assert_eq!(serde_json::from_str::<P>(&s).unwrap(), m);
        assert!(serde_json::from_str::<P>(r#"{"a":[1,0],"b":[1,0],"c":[1,0],"d":[1,0]}"#).is_err());
    }

    #[test]
    fn negative_control() {
        let grid = GridSpec::square(-1.0, 1.0, 21).unwrap();
        let e = same_solution(&pair("z", "z"), &pair("2*z", "2*z"), &grid, 1e-9, 1e-9).unwrap();
        assert!(!e.same);
        assert!((e.max_rel_deviation - 0.75).abs() < 1e-12);
        assert_eq!(e.worst_point, [0.0, 0.0]);
        let e = same_solution(&pair("z", "z"), &pair("z", "z"), &grid, 1e-9, 1e-9).unwrap();
        assert!(e.same);
        assert_eq!(e.max_rel_deviation, 0.0);
    }

    #[test]
    fn empty_overlap() {
        let grid = GridSpec::square(-1.0, 1.0, 5).unwrap();
        assert_eq!(same_solution(&pair("z", "1"), &pair("z", "z"), &grid, 1e-9, 1e-9), Err(MoebiusError::EmptyOverlap));
    }
}
