//! The explicit analytic ingredients of the strong asymptotics: the branch
//! w(z) = sqrt(z^2-1), the conformal map phi(z) = z + w(z) onto the exterior
//! of the unit disk, the Szego function S(z) of a density rho with its phase
//! theta(x), and the closed-form Szego functions S_i / phases theta_i of the
//! four endpoint factors.
//!
//! S and theta are both evaluated from one shared Chebyshev expansion of
//! log rho: with log rho = sum c_k T_k,
//!
//!   S(z)    = exp(-1/2 sum c_k phi(z)^-k),
//!   theta(x) = 1/2 sum_{k>=1} c_k sin(k arccos x),
//!
//! which reproduces the defining Cauchy/principal-value integrals; those
//! integrals survive only as test oracles.

use num_complex::Complex64;

use crate::cheb::ChebSeries;
use crate::error::{Error, Result};
use crate::weights::{Kind, WeightSpec};

/// Which side of the cut [-1, 1] a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

pub(crate) fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 1.0
}

fn require_off_cut(z: Complex64, what: &str) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("{what}: non-finite argument {z}")));
    }
    if on_cut(z) {
        return Err(Error::InvalidArgument(format!(
            "{what} is undefined on [-1,1] (z = {z}); use the boundary-side variants"
        )));
    }
    Ok(())
}

/// w(z) = sqrt(z^2 - 1), the branch analytic off [-1, 1] with w(z)/z -> 1 at
/// infinity. Computed as sqrt(z-1)*sqrt(z+1) with principal roots, which
/// realizes exactly that branch.
pub fn sqrt_w(z: Complex64) -> Result<Complex64> {
    require_off_cut(z, "sqrt_w")?;
    Ok((z - 1.0).sqrt() * (z + 1.0).sqrt())
}

/// Boundary values w_+/-(x) = +/- i sqrt(1-x^2) on [-1, 1].
pub fn sqrt_w_boundary(x: f64, side: Side) -> Result<Complex64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("boundary value needs |x| <= 1, got {x}")));
    }
    let root = ((1.0 - x) * (1.0 + x)).sqrt();
    Ok(Complex64::new(0.0, side.sign() * root))
}

/// phi(z) = z + w(z): the conformal map of the exterior of [-1, 1] onto the
/// exterior of the unit disk, phi(z)/z -> 2 at infinity, |phi| > 1.
pub fn phi(z: Complex64) -> Result<Complex64> {
    Ok(z + sqrt_w(z)?)
}

/// Boundary values phi_+/-(x) = x +/- i sqrt(1-x^2) = exp(+/- i arccos x).
pub fn phi_boundary(x: f64, side: Side) -> Result<Complex64> {
    Ok(x + sqrt_w_boundary(x, side)?)
}

/// |phi(z)| extended continuously by 1 on the cut; level sets are the
/// Bernstein ellipses with foci +/-1.
pub fn phi_abs_extended(z: Complex64) -> f64 {
    if on_cut(z) {
        1.0
    } else {
        (z + (z - 1.0).sqrt() * (z + 1.0).sqrt()).norm()
    }
}

/// Largest degree attempted when resolving log rho.
const MAX_LOG_DEGREE: usize = 8192;
/// Tail acceptance: trailing coefficients at or below this fraction of the
/// largest coefficient.
const TAIL_REL: f64 = 1e-13;

/// The Szego data of a density: a resolved Chebyshev expansion of log rho and
/// the value S at infinity.
#[derive(Debug, Clone)]
pub struct SzegoData {
    logrho: ChebSeries,
    s_inf: f64,
}

impl SzegoData {
    /// Expand log rho adaptively (doubling N up to 8192) until the tail
    /// criterion max(|c_{N-1}|, |c_{N-2}|) <= 1e-13 max|c_k| holds.
    pub fn build(w: &WeightSpec) -> Result<Self> {
        Self::build_with_limit(w, MAX_LOG_DEGREE)
    }

    /// Same as [`build`](Self::build) with an explicit resolution cap; fails
    /// with an under-resolution diagnostic when the cap is insufficient.
    pub fn build_with_limit(w: &WeightSpec, max_n: usize) -> Result<Self> {
        let mut n = 64.min(max_n.max(2));
        loop {
            let series = ChebSeries::interpolate(|x| w.rho(x).ln(), n)?;
            let c = series.coeffs();
            let max = c.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            // check the last two coefficients so parity zeros cannot fake convergence
            let tail = c[c.len() - 1].abs().max(c[c.len().saturating_sub(2)].abs());
            if tail <= TAIL_REL * max.max(1e-300) || max == 0.0 {
                let s_inf = (-0.5 * c[0]).exp();
                return Ok(SzegoData { logrho: series, s_inf });
            }
            if n >= max_n {
                return Err(Error::UnderResolved(format!(
                    "log rho for '{}' does not meet the 1e-13 tail criterion at N = {n} \
                     (tail {tail:.2e}, max {max:.2e})",
                    w.label()
                )));
            }
            n = (2 * n).min(max_n);
        }
    }

    /// S at infinity: exp(-c_0/2) where c_0 is the mean of log rho against
    /// the Chebyshev weight.
    pub fn s_inf(&self) -> f64 {
        self.s_inf
    }

    /// Degree of the resolved log rho expansion.
    pub fn degree(&self) -> usize {
        self.logrho.degree()
    }

    /// S(z) = exp(-1/2 sum c_k phi(z)^-k) off the cut; analytic and
    /// non-vanishing, S(infinity) = s_inf.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        require_off_cut(z, "szego_S")?;
        let u = phi(z)?.inv();
        Ok((-0.5 * horner_complex(self.logrho.coeffs(), u)).exp())
    }

    /// Boundary values S_+/-(x) = exp(-1/2 sum c_k e^{-/+ i k arccos x}).
    pub fn boundary(&self, x: f64, side: Side) -> Result<Complex64> {
        if !(x.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("boundary value needs |x| <= 1, got {x}")));
        }
        let psi = x.acos();
        let u = Complex64::from_polar(1.0, -side.sign() * psi);
        Ok((-0.5 * horner_complex(self.logrho.coeffs(), u)).exp())
    }

    /// The phase theta(x) with sqrt(rho) S_+/- = e^{+/- i theta}: the
    /// conjugate series 1/2 sum_{k>=1} c_k sin(k arccos x). Vanishes at the
    /// endpoints.
    pub fn theta(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("theta needs |x| <= 1, got {x}")));
        }
        if x == 1.0 || x == -1.0 {
            return Ok(0.0);
        }
        let u = Complex64::from_polar(1.0, x.acos());
        Ok(0.5 * horner_complex(self.logrho.coeffs(), u).im)
    }
}

fn horner_complex(coeffs: &[f64], u: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// Closed-form Szego functions of the endpoint factors |v_i|:
/// S_1 = 1, S_2 = phi/w, S_3 = (phi/(z+1))^{1/2}, S_4 = (phi/(z-1))^{1/2}.
///
/// The square roots are taken as principal roots of (z+/-1)/phi, whose image
/// is conjugation-symmetric and meets the real axis in (0, 2), then inverted.
pub fn si(kind: Kind, z: Complex64) -> Result<Complex64> {
    match kind {
        Kind::First => {
            require_off_cut(z, "szego_Si")?;
            Ok(Complex64::new(1.0, 0.0))
        }
        Kind::Second => Ok(phi(z)? / sqrt_w(z)?),
        Kind::Third => {
            let ratio = (z + 1.0) / phi(z)?;
            Ok(ratio.sqrt().inv())
        }
        Kind::Fourth => {
            let ratio = (z - 1.0) / phi(z)?;
            Ok(ratio.sqrt().inv())
        }
    }
}

/// Boundary values of S_i on the open interval (-1, 1), via phi_+/-.
pub fn si_boundary(kind: Kind, x: f64, side: Side) -> Result<Complex64> {
    if !(x.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "S_i boundary values need |x| < 1, got {x}"
        )));
    }
    let ph = phi_boundary(x, side)?;
    match kind {
        Kind::First => Ok(Complex64::new(1.0, 0.0)),
        Kind::Second => Ok(ph / sqrt_w_boundary(x, side)?),
        Kind::Third => Ok(((x + 1.0) / ph).sqrt().inv()),
        Kind::Fourth => Ok(((x - 1.0) / ph).sqrt().inv()),
    }
}

/// Closed-form phases: theta_1 = 0, theta_2 = arccos x - pi/2,
/// theta_3 = arccos(x)/2, theta_4 = arccos(x)/2 - pi/2.
pub fn theta_i(kind: Kind, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta_i needs |x| <= 1, got {x}")));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    Ok(match kind {
        Kind::First => 0.0,
        Kind::Second => x.acos() - half_pi,
        Kind::Third => 0.5 * x.acos(),
        Kind::Fourth => 0.5 * x.acos() - half_pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_w_branch() {
        let w2 = sqrt_w(c(2.0, 0.0)).unwrap();
        assert!((w2 - 3.0f64.sqrt()).norm() < 1e-15);

        // continuity along |z| = 2 from z = 2, consistent with w(z)/z -> 1
        let wm2 = sqrt_w(c(-2.0, 0.0)).unwrap();
        assert!((wm2 + 3.0f64.sqrt()).norm() < 1e-15);

        // upper limit at 0 is +i
        let wu = sqrt_w(c(0.0, 1e-8)).unwrap();
        assert!((wu - c(0.0, 1.0)).norm() < 1e-7);
        let wl = sqrt_w(c(0.0, -1e-8)).unwrap();
        assert!((wl + c(0.0, 1.0)).norm() < 1e-7);
    }

    #[test]
    fn sqrt_w_rejects_cut() {
        assert!(sqrt_w(c(0.5, 0.0)).is_err());
        assert!(sqrt_w(c(1.0, 0.0)).is_err());
        assert!(sqrt_w(c(-1.0, 0.0)).is_err());
        assert!(sqrt_w(c(2.0, 0.0)).is_ok());
        assert!(sqrt_w(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn boundary_w_values() {
        let w = sqrt_w_boundary(0.0, Side::Upper).unwrap();
        assert_eq!(w, c(0.0, 1.0));
        let w = sqrt_w_boundary(0.0, Side::Lower).unwrap();
        assert_eq!(w, c(0.0, -1.0));
        let w = sqrt_w_boundary(1.0, Side::Upper).unwrap();
        assert_eq!(w, c(0.0, 0.0));
        assert!(sqrt_w_boundary(1.5, Side::Upper).is_err());
    }

    #[test]
    fn phi_values() {
        let p = phi(c(2.0, 0.0)).unwrap();
        assert!((p - (2.0 + 3.0f64.sqrt())).norm() < 1e-15);

        let p1000 = phi(c(1000.0, 0.0)).unwrap();
        assert!((p1000.re / 1999.999499999875 - 1.0).abs() < 1e-12);

        let pb = phi_boundary(0.0, Side::Upper).unwrap();
        assert!((pb - c(0.0, 1.0)).norm() < 1e-15);
        let pb = phi_boundary(0.0, Side::Lower).unwrap();
        assert!((pb - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_modulus_exceeds_one() {
        for &z in &[c(1.2, 0.0), c(0.0, 0.3), c(-0.7, -0.01), c(5.0, 5.0)] {
            assert!(phi(z).unwrap().norm() > 1.0);
        }
        assert_eq!(phi_abs_extended(c(0.4, 0.0)), 1.0);
        assert!(phi_abs_extended(c(0.4, 0.1)) > 1.0);
    }

    #[test]
    fn szego_of_unit_weight_is_one() {
        let w = WeightSpec::constant(1.0, 3).unwrap();
        let sd = SzegoData::build(&w).unwrap();
        assert!((sd.s_inf() - 1.0).abs() < 1e-14);
        for &z in &[c(2.0, 0.0), c(0.0, 2.0), c(-1.5, 0.7)] {
            assert!((sd.eval(z).unwrap() - 1.0).norm() < 1e-14);
        }
        for x in [-0.9, 0.0, 0.4, 1.0] {
            assert!(sd.theta(x).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn szego_constant_weight() {
        let w = WeightSpec::constant(4.0, 3).unwrap();
        let sd = SzegoData::build(&w).unwrap();
        // S = c^{-1/2} everywhere
        assert!((sd.s_inf() - 0.5).abs() < 1e-14);
        assert!((sd.eval(c(3.0, 1.0)).unwrap() - 0.5).norm() < 1e-13);
    }

    #[test]
    fn exponential_weight_s_inf_is_one() {
        // the odd density log rho = alpha x has zero Chebyshev mean
        let w = WeightSpec::exponential(1.0, 3).unwrap();
        let sd = SzegoData::build(&w).unwrap();
        assert!((sd.s_inf() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_phase_closed_form() {
        // theta(x) = alpha sqrt(1-x^2)/2
        let w = WeightSpec::exponential(1.0, 3).unwrap();
        let sd = SzegoData::build(&w).unwrap();
        assert!((sd.theta(0.0).unwrap() - 0.5).abs() < 1e-13);
        for x in [-0.8, -0.3, 0.2, 0.9] {
            let expect = 0.5 * (1.0 - x * x as f64).sqrt();
            assert!((sd.theta(x).unwrap() - expect).abs() < 1e-13);
        }
        assert_eq!(sd.theta(1.0).unwrap(), 0.0);
        assert_eq!(sd.theta(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn under_resolution_is_reported() {
        // a slowly-resolving density with a tight cap
        let w = WeightSpec::holder(2.0, 0.5, 0.0, 3).unwrap();
        let err = SzegoData::build_with_limit(&w, 64).unwrap_err();
        assert!(matches!(err, Error::UnderResolved(_)));
        assert!(SzegoData::build(&w).is_ok());
    }

    #[test]
    fn si_closed_forms() {
        let z = c(2.0, 0.0);
        assert_eq!(si(Kind::First, z).unwrap(), c(1.0, 0.0));
        let s2 = si(Kind::Second, z).unwrap();
        assert!((s2 - (2.0 + 3.0f64.sqrt()) / 3.0f64.sqrt()).norm() < 1e-14);

        // S_3, S_4 tend to sqrt(2) far away
        let far = c(1e8, 0.0);
        assert!((si(Kind::Third, far).unwrap() - std::f64::consts::SQRT_2).norm() < 1e-6);
        assert!((si(Kind::Fourth, far).unwrap() - std::f64::consts::SQRT_2).norm() < 1e-6);

        assert!(si(Kind::Second, c(0.3, 0.0)).is_err());
    }

    #[test]
    fn theta_i_closed_forms() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((theta_i(Kind::Second, 1.0).unwrap() + half_pi).abs() < 1e-15);
        assert!((theta_i(Kind::Third, -1.0).unwrap() - half_pi).abs() < 1e-15);
        for x in [-1.0, -0.2, 0.5, 1.0] {
            assert_eq!(theta_i(Kind::First, x).unwrap(), 0.0);
        }
        // theta_2 vanishes at 0 and is odd about it
        assert!(theta_i(Kind::Second, 0.0).unwrap().abs() < 1e-15);
        for x in [0.1, 0.45, 0.99] {
            let plus = theta_i(Kind::Second, x).unwrap();
            let minus = theta_i(Kind::Second, -x).unwrap();
            assert!((plus + minus).abs() < 1e-14);
        }
        assert!(theta_i(Kind::Second, 1.2).is_err());
    }

    #[test]
    fn phase_is_unimodular() {
        let w = WeightSpec::exponential(0.8, 3).unwrap();
        let sd = SzegoData::build(&w).unwrap();
        for x in [-0.99, -0.5, 0.0, 0.7] {
            let th = sd.theta(x).unwrap();
            assert!(th.is_finite());
            let e = Complex64::from_polar(1.0, th);
            assert!((e.norm() - 1.0).abs() < 1e-15);
        }
    }
}
