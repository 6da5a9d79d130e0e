//! Chebyshev-grid function representation on [-1, 1]: first-kind nodes,
//! coefficient transforms, and stable Clenshaw evaluation.
//!
//! All series are plain truncations; choosing the degree is the caller's job.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// First-kind (open) Chebyshev nodes x_j = cos((2j+1)pi/(2N)), j = 0..N-1,
/// strictly decreasing, all in (-1, 1). These double as Gauss-Chebyshev
/// quadrature nodes.
pub fn cheb_nodes(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("cheb_nodes requires N >= 1".into()));
    }
    let scale = std::f64::consts::PI / (2.0 * n as f64);
    Ok((0..n).map(|j| ((2 * j + 1) as f64 * scale).cos()).collect())
}

/// A finite Chebyshev series sum c_k T_k(x) on [-1, 1].
///
/// An empty coefficient vector represents the zero function.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebSeries { coeffs }
    }

    pub fn zero() -> Self {
        ChebSeries { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree bound: number of coefficients minus one (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Interpolate `f` on the `n`-point first-kind node grid; returns the
    /// degree-(n-1) interpolant coefficients via the discrete cosine relation.
    ///
    /// Cosine arguments are reduced with exact integer arithmetic modulo 4N so
    /// large k*j products do not lose precision.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("interpolation grid must have N >= 1 points".into()));
        }
        let nodes = cheb_nodes(n)?;
        let mut fx = Vec::with_capacity(n);
        for (j, &x) in nodes.iter().enumerate() {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    index: j,
                    x,
                    context: "interpolation sample".into(),
                });
            }
            fx.push(v);
        }
        let four_n = 4 * n as u64;
        let half_step = std::f64::consts::PI / (2.0 * n as f64);
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n as u64 {
            let mut acc = KahanSum::new();
            for j in 0..n as u64 {
                let arg = (k * (2 * j + 1)) % four_n;
                acc.add(fx[j as usize] * (arg as f64 * half_step).cos());
            }
            let norm = if k == 0 { 1.0 / n as f64 } else { 2.0 / n as f64 };
            coeffs.push(acc.value() * norm);
        }
        Ok(ChebSeries { coeffs })
    }

    /// Clenshaw evaluation of the series at x in [-1, 1].
    ///
    /// Exterior evaluation is rejected; analytic continuation off the interval
    /// is the job of the conformal-map machinery.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Clenshaw evaluation requires |x| <= 1, got {x}"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Clenshaw evaluation without the domain check (used internally where the
    /// argument is known to lie in [-1, 1]).
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        if c.is_empty() {
            return 0.0;
        }
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &ck in c[1..].iter().rev() {
            let b0 = ck + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + x * b1 - b2
    }

    /// Clenshaw evaluation at a complex argument. Intended for polynomials of
    /// moderate degree evaluated off the interval; no domain check.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let c = &self.coeffs;
        if c.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for &ck in c[1..].iter().rev() {
            let b0 = ck + 2.0 * z * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + z * b1 - b2
    }

    /// Truncation keeping coefficients 0..=deg (returns a copy).
    pub fn truncated(&self, deg: usize) -> Self {
        let k = (deg + 1).min(self.coeffs.len());
        ChebSeries { coeffs: self.coeffs[..k].to_vec() }
    }

    /// Drop trailing coefficients below `rel_tol * max|c_k|`.
    pub fn chopped(&self, rel_tol: f64) -> Self {
        let max = self.coeffs.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
        let thr = rel_tol * max;
        let mut len = self.coeffs.len();
        while len > 0 && self.coeffs[len - 1].abs() < thr {
            len -= 1;
        }
        ChebSeries { coeffs: self.coeffs[..len].to_vec() }
    }

    /// Sum of |c_k|, an upper bound for the series on [-1, 1].
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// Neumaier-compensated accumulator; keeps long quadrature sums at a few ulp.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum { sum: 0.0, comp: 0.0 }
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2_OVER_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn nodes_small_cases() {
        let n1 = cheb_nodes(1).unwrap();
        assert_eq!(n1.len(), 1);
        assert!(n1[0].abs() < 1e-16);

        let n2 = cheb_nodes(2).unwrap();
        assert!((n2[0] - SQRT2_OVER_2).abs() < 1e-15);
        assert!((n2[1] + SQRT2_OVER_2).abs() < 1e-15);

        let n4 = cheb_nodes(4).unwrap();
        assert!((n4[0] - (std::f64::consts::PI / 8.0).cos()).abs() < 1e-15);
        for j in 0..4 {
            assert!((n4[j] + n4[3 - j]).abs() < 1e-15, "cosine grid symmetric about 0");
        }
    }

    #[test]
    fn nodes_strictly_decreasing_in_open_interval() {
        let xs = cheb_nodes(37).unwrap();
        for w in xs.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(xs.iter().all(|x| x.abs() < 1.0));
    }

    #[test]
    fn nodes_zero_is_an_error() {
        assert!(matches!(cheb_nodes(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn interpolate_x_squared() {
        let s = ChebSeries::interpolate(|x| x * x, 3).unwrap();
        assert!((s.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!(s.coeffs()[1].abs() < 1e-15);
        assert!((s.coeffs()[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolate_constant() {
        let s = ChebSeries::interpolate(|_| 7.0, 5).unwrap();
        assert!((s.coeffs()[0] - 7.0).abs() < 1e-14);
        for &c in &s.coeffs()[1..] {
            assert!(c.abs() < 1e-14);
        }
    }

    #[test]
    fn interpolate_t3_is_exact() {
        let t3 = |x: f64| 4.0 * x * x * x - 3.0 * x;
        let s = ChebSeries::interpolate(t3, 6).unwrap();
        for (k, &c) in s.coeffs().iter().enumerate() {
            if k == 3 {
                assert!((c - 1.0).abs() < 1e-14);
            } else {
                assert!(c.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interpolate_rejects_non_finite_sample() {
        let nodes = cheb_nodes(8).unwrap();
        let bad = nodes[3];
        let err = ChebSeries::interpolate(|x| 1.0 / (x - bad), 8).unwrap_err();
        match err {
            Error::NonFiniteSample { index, x, .. } => {
                assert_eq!(index, 3);
                assert_eq!(x, bad);
            }
            other => panic!("expected NonFiniteSample, got {other:?}"),
        }
    }

    #[test]
    fn clenshaw_examples() {
        let s = ChebSeries::new(vec![0.5, 0.0, 0.5]);
        assert!((s.eval(1.0).unwrap() - 1.0).abs() < 1e-15);

        let t1 = ChebSeries::new(vec![0.0, 1.0]);
        assert!((t1.eval(0.3).unwrap() - 0.3).abs() < 1e-15);

        let exp32 = ChebSeries::interpolate(|x: f64| x.exp(), 32).unwrap();
        assert!((exp32.eval(0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clenshaw_rejects_exterior_points() {
        let s = ChebSeries::new(vec![1.0, 2.0]);
        assert!(matches!(s.eval(1.0 + 1e-12), Err(Error::InvalidArgument(_))));
        assert!(matches!(s.eval(-3.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(s.eval(f64::NAN), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_series_evaluates_to_zero() {
        let z = ChebSeries::zero();
        assert_eq!(z.eval(0.4).unwrap(), 0.0);
        assert_eq!(z.eval_complex(Complex64::new(2.0, 1.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chop_drops_trailing_noise_only() {
        let s = ChebSeries::new(vec![1.0, 0.5, 1e-20, 2e-20]);
        let c = s.chopped(1e-14);
        assert_eq!(c.coeffs(), &[1.0, 0.5]);
        // interior tiny coefficients are kept when followed by a large one
        let s2 = ChebSeries::new(vec![1.0, 1e-20, 0.5]);
        assert_eq!(s2.chopped(1e-14).coeffs().len(), 3);
    }

    #[test]
    fn roundtrip_reproduces_coefficients() {
        let c0 = vec![0.3, -1.2, 0.07, 0.9, -0.004, 0.25];
        let s = ChebSeries::new(c0.clone());
        let rt = ChebSeries::interpolate(|x| s.eval_unchecked(x), 6).unwrap();
        for (a, b) in c0.iter().zip(rt.coeffs()) {
            assert!((a - b).abs() < 1e-13 * (1.0 + a.abs()));
        }
    }
}
