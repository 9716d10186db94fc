//! Generator pairs in the h-, w-, g- and ξ-representations, the harmonic
//! scalars θ and η, the conversions between them, and pointwise
//! admissibility.
//!
//! Conversions, all as expression trees:
//!
//! ```text
//! h -> w :  w1 = h1 + h2,      w2 = h1 - h2
//! w -> g :  g1 = exp(w1),      g2 = exp(w2)
//! g -> ξ :  ξ1 = 1 / g1,       ξ2 = g2
//! w -> θ :  θ  = w1/2 + conj(w2/2)     (= Re h1 + i Im h2)
//! ξ -> η :  η  = ξ1/2 + conj(ξ2/2)
//! ```
//!
//! Every "≠ 0" condition becomes a magnitude test against a tolerance. The
//! `(2k+1)πi` conditions of the h- and w-forms are tested through
//! `|cosh(·)|`, which vanishes exactly on those lattices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{AdmissibilityMask, GridSpec, Reason};
use crate::holoexpr::{Differentiated, EvalFlag, HoloExpr, ParseError};
use crate::scalar::{cx, Cx, Real};

/// Default absolute tolerance for the non-degeneracy conditions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("g1 is identically zero; 1/g1 is undefined")]
    IdenticallyZero,
    #[error("representation `{0}` has no Weierstrass frame")]
    NoFrame(Rep),
    #[error("failed to parse {which}: {source}")]
    Parse {
        which: &'static str,
        #[source]
        source: ParseError,
    },
}

/// Representation tag, as used in pair JSON and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rep {
    H,
    W,
    G,
    Xi,
    Theta,
    Eta,
}

impl Rep {
    pub fn as_str(self) -> &'static str {
        match self {
            Rep::H => "h",
            Rep::W => "w",
            Rep::G => "g",
            Rep::Xi => "xi",
            Rep::Theta => "theta",
            Rep::Eta => "eta",
        }
    }
}

impl std::fmt::Display for Rep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Rep {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "h" => Rep::H,
            "w" => Rep::W,
            "g" => Rep::G,
            "xi" => Rep::Xi,
            "theta" => Rep::Theta,
            "eta" => Rep::Eta,
            _ => return Err(format!("unknown representation `{s}` (expected h, w, g, xi, theta or eta)")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairH<T> {
    pub h1: HoloExpr<T>,
    pub h2: HoloExpr<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairW<T> {
    pub w1: HoloExpr<T>,
    pub w2: HoloExpr<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairG<T> {
    pub g1: HoloExpr<T>,
    pub g2: HoloExpr<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairXi<T> {
    pub xi1: HoloExpr<T>,
    pub xi2: HoloExpr<T>,
}

/// The harmonic function `A(z) + conj(B(z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicScalar<T> {
    pub holo: HoloExpr<T>,
    pub antiholo_source: HoloExpr<T>,
}

fn half<T: Real>(e: &HoloExpr<T>) -> HoloExpr<T> {
    e.clone().scale(cx(T::lit(0.5), T::zero()))
}

pub fn h_to_w<T: Real>(p: &PairH<T>) -> PairW<T> {
    PairW { w1: p.h1.clone() + p.h2.clone(), w2: p.h1.clone() - p.h2.clone() }
}

/// Inverse of [`h_to_w`].
pub fn w_to_h<T: Real>(p: &PairW<T>) -> PairH<T> {
    PairH { h1: half(&(p.w1.clone() + p.w2.clone())), h2: half(&(p.w1.clone() - p.w2.clone())) }
}

pub fn w_to_g<T: Real>(p: &PairW<T>) -> PairG<T> {
    PairG { g1: p.w1.clone().exp(), g2: p.w2.clone().exp() }
}

/// `ξ1 = 1/g1, ξ2 = g2`. Zeros of `g1` become poles of `ξ1` and are masked
/// downstream.
pub fn g_to_xi<T: Real>(p: &PairG<T>) -> Result<PairXi<T>, RepError> {
    if p.g1.is_zero() {
        return Err(RepError::IdenticallyZero);
    }
    Ok(PairXi { xi1: HoloExpr::one() / p.g1.clone(), xi2: p.g2.clone() })
}

/// Inverse of [`g_to_xi`].
pub fn xi_to_g<T: Real>(p: &PairXi<T>) -> PairG<T> {
    PairG { g1: HoloExpr::one() / p.xi1.clone(), g2: p.xi2.clone() }
}

/// `θ = (w1 + conj w2)/2`.
pub fn theta_from_w<T: Real>(p: &PairW<T>) -> HarmonicScalar<T> {
    HarmonicScalar { holo: half(&p.w1), antiholo_source: half(&p.w2) }
}

/// A random smooth w-pair `c0 + c1 z + c2 z² + c3 exp(c4 z)` with `|c1|` in
/// `[0.6, 1.2]` and small higher-order terms, so that `w1' w2'` stays away
/// from zero near the origin.
pub fn sample_w<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> PairW<T> {
    let mut one = || {
        let mut c = |r: f64| HoloExpr::constant(cx(T::lit(rng.gen_range(-r..=r)), T::lit(rng.gen_range(-r..=r))));
        let (c0, c2, c3, c4) = (c(0.3), c(0.15), c(0.1), c(1.0));
        let m = rng.gen_range(0.6..=1.2);
        let ph = rng.gen_range(0.0..std::f64::consts::TAU);
        let c1 = HoloExpr::constant(cx(T::lit(m * ph.cos()), T::lit(m * ph.sin())));
        let z = HoloExpr::z();
        c0 + c1 * z.clone() + c2 * z.clone().powi(2) + c3 * (c4 * z).exp()
    };
    let w1 = one();
    PairW { w1, w2: one() }
}

/// `η = (ξ1 + conj ξ2)/2`.
pub fn eta_from_xi<T: Real>(p: &PairXi<T>) -> HarmonicScalar<T> {
    HarmonicScalar { holo: half(&p.xi1), antiholo_source: half(&p.xi2) }
}

impl<T: Real> HarmonicScalar<T> {
    pub fn prepare(&self) -> PreparedHarmonic<T> {
        PreparedHarmonic { a: Differentiated::new(&self.holo), b: Differentiated::new(&self.antiholo_source) }
    }

    pub fn value(&self, z: Cx<T>) -> Result<Cx<T>, EvalFlag> {
        Ok(self.holo.eval(z)? + self.antiholo_source.eval(z)?.conj())
    }
}

/// Value and exact first partials of a harmonic scalar at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPoint<T> {
    pub value: Cx<T>,
    pub du: Cx<T>,
    pub dv: Cx<T>,
}

impl<T: Real> HarmonicPoint<T> {
    /// `f_u² + f_v²`.
    pub fn grad_sq(&self) -> Cx<T> {
        self.du * self.du + self.dv * self.dv
    }
}

/// A harmonic scalar with symbolic derivatives of both halves.
#[derive(Debug, Clone)]
pub struct PreparedHarmonic<T> {
    a: Differentiated<T>,
    b: Differentiated<T>,
}

impl<T: Real> PreparedHarmonic<T> {
    /// `f_u = A' + conj(B')`, `f_v = i(A' - conj(B'))`.
    pub fn eval(&self, z: Cx<T>) -> Result<HarmonicPoint<T>, EvalFlag> {
        let (a, da) = self.a.eval(z)?;
        let (b, db) = self.b.eval(z)?;
        let i = cx(T::zero(), T::one());
        Ok(HarmonicPoint { value: a + b.conj(), du: da + db.conj(), dv: i * (da - db.conj()) })
    }
}

/// Values and first derivatives of two holomorphic generators at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPoint<T> {
    pub f1: Cx<T>,
    pub f2: Cx<T>,
    pub d1: Cx<T>,
    pub d2: Cx<T>,
}

/// Any of the supported generator descriptions.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator<T> {
    H(PairH<T>),
    W(PairW<T>),
    G(PairG<T>),
    Xi(PairXi<T>),
    Theta(HarmonicScalar<T>),
    Eta(HarmonicScalar<T>),
}

impl<T: Real> Generator<T> {
    /// Builds a generator from two parsed expressions. For `theta` and `eta`
    /// the expressions are the halves `A`, `B` of `A + conj(B)`.
    pub fn from_exprs(rep: Rep, f1: HoloExpr<T>, f2: HoloExpr<T>) -> Self {
        match rep {
            Rep::H => Generator::H(PairH { h1: f1, h2: f2 }),
            Rep::W => Generator::W(PairW { w1: f1, w2: f2 }),
            Rep::G => Generator::G(PairG { g1: f1, g2: f2 }),
            Rep::Xi => Generator::Xi(PairXi { xi1: f1, xi2: f2 }),
            Rep::Theta => Generator::Theta(HarmonicScalar { holo: f1, antiholo_source: f2 }),
            Rep::Eta => Generator::Eta(HarmonicScalar { holo: f1, antiholo_source: f2 }),
        }
    }

    pub fn parse(rep: Rep, f1: &str, f2: &str) -> Result<Self, RepError> {
        let a = HoloExpr::parse(f1).map_err(|source| RepError::Parse { which: "f1", source })?;
        let b = HoloExpr::parse(f2).map_err(|source| RepError::Parse { which: "f2", source })?;
        Ok(Self::from_exprs(rep, a, b))
    }

    pub fn rep(&self) -> Rep {
        match self {
            Generator::H(_) => Rep::H,
            Generator::W(_) => Rep::W,
            Generator::G(_) => Rep::G,
            Generator::Xi(_) => Rep::Xi,
            Generator::Theta(_) => Rep::Theta,
            Generator::Eta(_) => Rep::Eta,
        }
    }

    pub fn exprs(&self) -> (&HoloExpr<T>, &HoloExpr<T>) {
        match self {
            Generator::H(p) => (&p.h1, &p.h2),
            Generator::W(p) => (&p.w1, &p.w2),
            Generator::G(p) => (&p.g1, &p.g2),
            Generator::Xi(p) => (&p.xi1, &p.xi2),
            Generator::Theta(s) | Generator::Eta(s) => (&s.holo, &s.antiholo_source),
        }
    }

    pub fn to_spec(&self) -> PairSpec {
        let (a, b) = self.exprs();
        PairSpec { rep: self.rep(), f1: a.to_string(), f2: b.to_string() }
    }
}

/// JSON form of a generator: `{"rep": "g", "f1": "z", "f2": "z"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    pub rep: Rep,
    pub f1: String,
    pub f2: String,
}

impl PairSpec {
    pub fn build<T: Real>(&self) -> Result<Generator<T>, RepError> {
        Generator::parse(self.rep, &self.f1, &self.f2)
    }
}

/// Pointwise evaluation of a pair with its derivatives.
#[derive(Debug, Clone)]
pub(crate) struct PreparedPair<T> {
    f1: Differentiated<T>,
    f2: Differentiated<T>,
}

impl<T: Real> PreparedPair<T> {
    pub(crate) fn new(f1: &HoloExpr<T>, f2: &HoloExpr<T>) -> Self {
        Self { f1: Differentiated::new(f1), f2: Differentiated::new(f2) }
    }

    pub(crate) fn eval(&self, z: Cx<T>) -> Result<PairPoint<T>, Reason> {
        let (f1, d1) = self.f1.eval(z).map_err(|_| Reason::Pole)?;
        let (f2, d2) = self.f2.eval(z).map_err(|_| Reason::Pole)?;
        Ok(PairPoint { f1, f2, d1, d2 })
    }
}

fn require<T: Real>(magnitude: T, tol: T, reason: Reason) -> Result<(), Reason> {
    // `!(m >= tol)` also rejects NaN.
    if magnitude >= tol {
        Ok(())
    } else {
        Err(reason)
    }
}

/// Values needed downstream once a point has passed its conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CheckedPoint<T> {
    Pair(PairPoint<T>),
    Harmonic(HarmonicPoint<T>),
}

/// A generator prepared for pointwise condition checks.
#[derive(Debug, Clone)]
pub(crate) enum Prepared<T> {
    H(PreparedPair<T>),
    W(PreparedPair<T>),
    G(PreparedPair<T>),
    Xi(PreparedPair<T>),
    Theta(PreparedHarmonic<T>),
    Eta(PreparedHarmonic<T>),
}

impl<T: Real> Prepared<T> {
    pub(crate) fn new(g: &Generator<T>) -> Self {
        match g {
            Generator::H(p) => Prepared::H(PreparedPair::new(&p.h1, &p.h2)),
            Generator::W(p) => Prepared::W(PreparedPair::new(&p.w1, &p.w2)),
            Generator::G(p) => Prepared::G(PreparedPair::new(&p.g1, &p.g2)),
            Generator::Xi(p) => Prepared::Xi(PreparedPair::new(&p.xi1, &p.xi2)),
            Generator::Theta(s) => Prepared::Theta(s.prepare()),
            Generator::Eta(s) => Prepared::Eta(s.prepare()),
        }
    }

    /// Evaluates the representation's own conditions at `z`.
    pub(crate) fn check(&self, z: Cx<T>, tol: T) -> Result<CheckedPoint<T>, Reason> {
        let half = T::lit(0.5);
        match self {
            Prepared::H(p) => {
                let q = p.eval(z)?;
                require((q.d1 * q.d1 - q.d2 * q.d2).norm(), tol, Reason::DerivativeZero)?;
                let theta = cx(q.f1.re, q.f2.im);
                require(theta.cosh().norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Pair(q))
            }
            Prepared::W(p) => {
                let q = p.eval(z)?;
                require((q.d1 * q.d2).norm(), tol, Reason::DerivativeZero)?;
                let c = ((q.f1 + q.f2.conj()) * half).cosh();
                require(c.norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Pair(q))
            }
            Prepared::G(p) => {
                let q = p.eval(z)?;
                require((q.d1 * q.d2).norm(), tol, Reason::DerivativeZero)?;
                let one = cx(T::one(), T::zero());
                require((one + q.f1 * q.f2.conj()).norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Pair(q))
            }
            Prepared::Xi(p) => {
                let q = p.eval(z)?;
                require((q.d1 * q.d2).norm(), tol, Reason::DerivativeZero)?;
                require((q.f1 + q.f2.conj()).norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Pair(q))
            }
            Prepared::Theta(s) => {
                let q = s.eval(z).map_err(|_| Reason::Pole)?;
                require(q.grad_sq().norm(), tol, Reason::DerivativeZero)?;
                require(q.value.cosh().norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Harmonic(q))
            }
            Prepared::Eta(s) => {
                let q = s.eval(z).map_err(|_| Reason::Pole)?;
                require(q.grad_sq().norm(), tol, Reason::DerivativeZero)?;
                require(q.value.norm(), tol, Reason::DenominatorDegenerate)?;
                Ok(CheckedPoint::Harmonic(q))
            }
        }
    }
}

/// Per-point admissibility of a generator on a grid.
pub fn admissibility<T: Real>(rep: &Generator<T>, grid: &GridSpec<T>, tol: T) -> AdmissibilityMask<T> {
    let prepared = Prepared::new(rep);
    let reasons = (0..grid.len()).map(|idx| prepared.check(grid.z(idx), tol).err()).collect();
    AdmissibilityMask { grid: *grid, reasons }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = HoloExpr<f64>;

    fn p(s: &str) -> E {
        E::parse(s).unwrap()
    }

    fn pts() -> Vec<Cx<f64>> {
        (0..20).map(|k| cx(-0.9 + 0.09 * k as f64, 0.8 - 0.083 * k as f64)).collect()
    }

    #[test]
    fn h_to_w_examples() {
        let w = h_to_w(&PairH { h1: p("z"), h2: p("0") });
        let z = cx(0.3, 0.7);
        assert_eq!(w.w1.eval(z).unwrap(), z);
        assert_eq!(w.w2.eval(z).unwrap(), z);
        let w = h_to_w(&PairH { h1: p("z"), h2: p("2*z") });
        assert_eq!(w.w1.eval(z).unwrap(), 3.0 * z);
        assert_eq!(w.w2.eval(z).unwrap(), -z);
    }

    #[test]
    fn h_w_round_trip() {
        let h = PairH { h1: p("z^2 + 0.3*exp(i*z)"), h2: p("sinh(z) - 2*i*z") };
        let back = w_to_h(&h_to_w(&h));
        for z in pts().into_iter().take(10) {
            assert!((back.h1.eval(z).unwrap() - h.h1.eval(z).unwrap()).norm() < 1e-12);
            assert!((back.h2.eval(z).unwrap() - h.h2.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn w_to_g_and_constant_pair_is_masked() {
        let g = w_to_g(&PairW { w1: p("z"), w2: p("z") });
        let z = cx(0.2, -0.4);
        assert_eq!(g.g1.eval(z).unwrap(), z.exp());
        let g = w_to_g(&PairW { w1: p("0"), w2: p("0") });
        assert_eq!(g.g1.eval(z).unwrap(), cx(1.0, 0.0));
        let grid = GridSpec::square(-1.0, 1.0, 11).unwrap();
        let m = admissibility(&Generator::G(g), &grid, DEFAULT_TOL);
        assert_eq!(m.count(), 0);
        assert!(m.reasons.iter().all(|r| *r == Some(Reason::DerivativeZero)));
    }

    #[test]
    fn g_to_xi_examples() {
        let xi = g_to_xi(&PairG { g1: p("z"), g2: p("z") }).unwrap();
        let z = cx(0.5, 0.5);
        assert!((xi.xi1.eval(z).unwrap() - 1.0 / z).norm() < 1e-15);
        assert_eq!(xi.xi1.eval(cx(0.0, 0.0)), Err(EvalFlag::Pole));
        let xi = g_to_xi(&PairG { g1: p("exp(z)"), g2: p("exp(z)") }).unwrap();
        assert!((xi.xi1.eval(z).unwrap() - (-z).exp()).norm() < 1e-15);
        assert_eq!(g_to_xi(&PairG { g1: p("0"), g2: p("z") }), Err(RepError::IdenticallyZero));
    }

    #[test]
    fn xi_condition_transport() {
        // 1 + g1 conj(g2) = (ξ1 + conj ξ2)/ξ1 wherever ξ1 ≠ 0.
        let g = PairG { g1: p("z + 0.5"), g2: p("exp(z) - 0.2*i") };
        let xi = g_to_xi(&g).unwrap();
        for z in pts() {
            let (g1, g2) = (g.g1.eval(z).unwrap(), g.g2.eval(z).unwrap());
            let (x1, x2) = (xi.xi1.eval(z).unwrap(), xi.xi2.eval(z).unwrap());
            let lhs = 1.0 + g1 * g2.conj();
            let rhs = (x1 + x2.conj()) / x1;
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn theta_examples() {
        let th = theta_from_w(&PairW { w1: p("z"), w2: p("z") });
        let z = cx(0.7, -0.3);
        assert!((th.value(z).unwrap() - cx(0.7, 0.0)).norm() < 1e-15);
        // h1 = z, h2 = iz: θ = Re z + i Im(iz) = u + iu
        let th = theta_from_w(&h_to_w(&PairH { h1: p("z"), h2: p("i*z") }));
        assert!((th.value(z).unwrap() - cx(0.7, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn theta_identity_against_h() {
        let h = PairH { h1: p("z^2 - i*z"), h2: p("0.5*exp(z) + z") };
        let th = theta_from_w(&h_to_w(&h));
        for z in pts() {
            let expected = cx(h.h1.eval(z).unwrap().re, h.h2.eval(z).unwrap().im);
            assert!((th.value(z).unwrap() - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn eta_identity_and_holomorphic_degeneracy() {
        let xi = PairXi { xi1: p("z^2 + 1"), xi2: p("exp(i*z)") };
        let eta = eta_from_xi(&xi).prepare();
        let (d1, d2) = (xi.xi1.differentiate(), xi.xi2.differentiate());
        for z in pts() {
            let q = eta.eval(z).unwrap();
            let expected = d1.eval(z).unwrap() * d2.eval(z).unwrap().conj();
            assert!((q.grad_sq() - expected).norm() < 1e-12);
        }
        // η = z²/2 is holomorphic: η_u² + η_v² ≡ 0, fully masked.
        let eta = Generator::Eta(eta_from_xi(&PairXi { xi1: p("z^2"), xi2: p("0") }));
        let grid = GridSpec::square(-1.0, 1.0, 9).unwrap();
        let m = admissibility(&eta, &grid, DEFAULT_TOL);
        assert_eq!(m.count(), 0);
        let xi_eta = eta_from_xi(&PairXi { xi1: p("z"), xi2: p("z") });
        assert!((xi_eta.value(cx(0.4, 0.9)).unwrap() - cx(0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn admissibility_examples() {
        let grid = GridSpec::square(-1.0, 1.0, 21).unwrap();
        let g = Generator::G(PairG { g1: p("z"), g2: p("z") });
        assert_eq!(admissibility(&g, &grid, DEFAULT_TOL).count(), grid.len());

        let g = Generator::G(PairG { g1: p("z"), g2: p("1") });
        // g2 = 1 has zero derivative, so everything is masked. A slightly
        // non-constant g2 leaves only the degenerate point z = -1.
        assert_eq!(admissibility(&g, &grid, DEFAULT_TOL).count(), 0);
        let g = Generator::G(PairG { g1: p("z"), g2: p("1 + 0.001*(z + 1)") });
        let m = admissibility(&g, &grid, 1e-4);
        let minus_one = grid.nearest(-1.0, 0.0);
        assert_eq!(m.reasons[minus_one], Some(Reason::DenominatorDegenerate));
        assert_eq!(m.count(), grid.len() - 1);

        let w = Generator::W(PairW { w1: p("z"), w2: p("z") });
        let big = GridSpec::square(-3.0, 3.0, 31).unwrap();
        assert_eq!(admissibility(&w, &big, DEFAULT_TOL).count(), big.len());
    }

    #[test]
    fn h_form_second_condition() {
        // Re h1 = -v and Im h2 = v + π/2, so Re h1 = 0 and Im h2 = π/2 on the
        // whole row v = 0.
        let h = Generator::H(PairH { h1: p("i*z"), h2: p("z + 1.5707963267948966*i") });
        let grid = GridSpec::square(-0.5, 0.5, 11).unwrap();
        let m = admissibility(&h, &grid, 1e-6);
        for i in 0..grid.nu {
            assert_eq!(m.reasons[grid.index(i, 5)], Some(Reason::DenominatorDegenerate));
        }
        assert_eq!(m.count(), grid.len() - grid.nu);
    }

    #[test]
    fn pair_spec_json() {
        let spec: PairSpec = serde_json::from_str(r#"{"rep":"xi","f1":"1/z","f2":"z"}"#).unwrap();
        assert_eq!(spec.rep, Rep::Xi);
        let g: Generator<f64> = spec.build().unwrap();
        assert_eq!(g.rep(), Rep::Xi);
        let back = serde_json::to_string(&g.to_spec()).unwrap();
        assert_eq!(back, r#"{"rep":"xi","f1":"(1 / z)","f2":"z"}"#);
        let bad = PairSpec { rep: Rep::G, f1: "z^^2".into(), f2: "z".into() };
        assert!(matches!(bad.build::<f64>(), Err(RepError::Parse { which: "f1", .. })));
    }
}
