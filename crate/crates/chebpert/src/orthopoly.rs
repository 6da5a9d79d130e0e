//! Ground truth for the asymptotic formulas: recurrence coefficients and
//! polynomial values for the measure rho(x)|v_i(x)| dx / sqrt(1-x^2),
//! computed by the quadrature-discretized Stieltjes procedure, plus the
//! associated function of the second kind.
//!
//! Monic values P_n underflow like 4^-n on the interval, so everything is
//! carried in the scaled form pi_n = 2^n P_n, whose on-interval size stays
//! O(1) once the recurrence coefficients are near their limits.
//!
//! A remark on normalization: the standard large-z expansion of the second
//! kind function under the orthogonality relations starts at z^-(n+1) with
//! coefficient h_n/(2 pi i)-type size; the squared norms h_n are what this
//! module exposes. No attempt is made to attach a constant to a z^-n leading
//! order.

use num_complex::Complex64;

use crate::cheb::{cheb_nodes, KahanSum};
use crate::error::{Error, Result};
use crate::szego::phi;
use crate::weights::{Kind, WeightSpec};

/// Gauss-Chebyshev quadrature: (pi/N) sum f(x_j) over the N first-kind nodes;
/// integrates f(x)/sqrt(1-x^2) exactly for polynomial f of degree <= 2N-1.
pub fn gauss_chebyshev<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature size must be >= 1".into()));
    }
    let nodes = cheb_nodes(n)?;
    let mut acc = KahanSum::new();
    for (j, &x) in nodes.iter().enumerate() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: j, x, context: "quadrature sample".into() });
        }
        acc.add(v);
    }
    Ok(std::f64::consts::PI / n as f64 * acc.value())
}

/// Monic three-term recurrence data for one (weight, kind) pair:
/// x P_n = P_{n+1} + b_n P_n + a_n^2 P_{n-1}.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    /// a_n^2 for n = 1..=n_max (index n-1)
    a_sq: Vec<f64>,
    /// b_n for n = 0..=n_max
    b: Vec<f64>,
    /// squared norms h_n = integral of P_n^2 dmu for n = 0..=n_max
    h: Vec<f64>,
    n_max: usize,
    n_quad: usize,
    weight_label: String,
    kind: Kind,
}

/// Squared-norm cancellation floor: h_n below 1e-6 * h_0 * 4^-n means at
/// least six digits were lost and the discretized measure cannot support the
/// requested degrees.
const NORM_FLOOR: f64 = 1e-6;

impl RecurrenceTable {
    /// Discretized Stieltjes procedure. `n_quad` defaults to 8 n_max rounded
    /// up to a power of two, at least 1024; an explicit value must still be
    /// >= 8 n_max.
    pub fn build(w: &WeightSpec, kind: Kind, n_max: usize, n_quad: Option<usize>) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be >= 1".into()));
        }
        let n_quad = match n_quad {
            Some(q) => {
                if q < 8 * n_max {
                    return Err(Error::InvalidArgument(format!(
                        "quadrature size {q} is below 8*n_max = {}",
                        8 * n_max
                    )));
                }
                q
            }
            None => (8 * n_max).next_power_of_two().max(1024),
        };

        let nodes = cheb_nodes(n_quad)?;
        let scale = std::f64::consts::PI / n_quad as f64;
        let mut wq = Vec::with_capacity(n_quad);
        for (j, &x) in nodes.iter().enumerate() {
            let v = scale * w.rho(x) * kind.v_abs(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index: j, x, context: "measure sample".into() });
            }
            wq.push(v);
        }

        // scaled iteration: q_n(x) = 2^n P_n(x), Q_n = sum w_j q_n^2 = 4^n h_n
        let mut q_prev = vec![0.0f64; n_quad];
        let mut q_cur = vec![1.0f64; n_quad];
        let mut big_q_cur = {
            let mut s = KahanSum::new();
            wq.iter().for_each(|&v| s.add(v));
            s.value()
        };
        let big_q0 = big_q_cur;
        let mut b = Vec::with_capacity(n_max + 1);
        let mut a_sq = Vec::with_capacity(n_max);
        let mut h = Vec::with_capacity(n_max + 1);
        {
            let mut s = KahanSum::new();
            for j in 0..n_quad {
                s.add(wq[j] * nodes[j]);
            }
            b.push(s.value() / big_q_cur);
        }
        h.push(big_q_cur);

        for n in 1..=n_max {
            let bn_prev = b[n - 1];
            let a_factor = if n == 1 { 0.0 } else { 4.0 * a_sq[n - 2] };
            let mut big_q = KahanSum::new();
            let mut big_qx = KahanSum::new();
            for j in 0..n_quad {
                let next = 2.0 * (nodes[j] - bn_prev) * q_cur[j] - a_factor * q_prev[j];
                q_prev[j] = q_cur[j];
                q_cur[j] = next;
                let t = wq[j] * next * next;
                big_q.add(t);
                big_qx.add(t * nodes[j]);
            }
            let big_q_next = big_q.value();
            if big_q_next <= NORM_FLOOR * big_q0 {
                return Err(Error::PrecisionLoss {
                    n,
                    detail: format!(
                        "squared norm h_{n} fell below 1e-6 h_0 4^-{n} ({:.3e} of h_0 scale) \
                         for weight '{}' kind {}",
                        big_q_next / big_q0,
                        w.label(),
                        kind
                    ),
                });
            }
            a_sq.push(big_q_next / (4.0 * big_q_cur));
            b.push(big_qx.value() / big_q_next);
            h.push(big_q_next);
            big_q_cur = big_q_next;
        }

        // convert scaled norms 4^n h_n back to h_n
        for (n, v) in h.iter_mut().enumerate() {
            *v *= 4.0f64.powi(-(n as i32));
        }

        Ok(RecurrenceTable {
            a_sq,
            b,
            h,
            n_max,
            n_quad,
            weight_label: w.label().to_string(),
            kind,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn weight_label(&self) -> &str {
        &self.weight_label
    }

    /// a_n^2 for 1 <= n <= n_max.
    pub fn a_sq(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "a_n^2 is stored for 1 <= n <= {}, got {n}",
                self.n_max
            )));
        }
        Ok(self.a_sq[n - 1])
    }

    /// a_n = sqrt(a_n^2).
    pub fn a(&self, n: usize) -> Result<f64> {
        Ok(self.a_sq(n)?.sqrt())
    }

    /// b_n for 0 <= n <= n_max.
    pub fn b(&self, n: usize) -> Result<f64> {
        self.b
            .get(n)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("b_n is stored for n <= {}", self.n_max)))
    }

    /// Squared norm h_n for 0 <= n <= n_max.
    pub fn h(&self, n: usize) -> Result<f64> {
        self.h
            .get(n)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("h_n is stored for n <= {}", self.n_max)))
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "degree {n} exceeds the table's n_max = {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// pi_n(x) = 2^n P_n(x) by the scaled recurrence
    /// pi_{n+1} = 2(x - b_n) pi_n - 4 a_n^2 pi_{n-1}; O(1) on the interval
    /// when the coefficients sit near their limits.
    pub fn scaled_monic(&self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        if n == 0 {
            return Ok(1.0);
        }
        let mut prev = 1.0;
        let mut cur = 2.0 * (x - self.b[0]);
        for k in 1..n {
            let next = 2.0 * (x - self.b[k]) * cur - 4.0 * self.a_sq[k - 1] * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Complex-argument variant of [`scaled_monic`](Self::scaled_monic).
    pub fn scaled_monic_complex(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.check_degree(n)?;
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let mut prev = Complex64::new(1.0, 0.0);
        let mut cur = 2.0 * (z - self.b[0]);
        for k in 1..n {
            let next = 2.0 * (z - self.b[k]) * cur - 4.0 * self.a_sq[k - 1] * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// pi_n(z)/phi(z)^n = P_n(z) (2/phi(z))^n by the ratio recurrence;
    /// bounded in n for fixed z off the interval, so no overflow at large
    /// degree.
    pub fn exterior_ratio(&self, n: usize, z: Complex64) -> Result<Complex64> {
        self.check_degree(n)?;
        let ph = phi(z)?;
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let inv = ph.inv();
        let inv2 = inv * inv;
        let mut prev = Complex64::new(1.0, 0.0);
        let mut cur = 2.0 * (z - self.b[0]) * inv;
        for k in 1..n {
            let next = 2.0 * (z - self.b[k]) * inv * cur - 4.0 * self.a_sq[k - 1] * inv2 * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}

fn dist_to_interval(z: Complex64) -> f64 {
    if z.re.abs() <= 1.0 {
        z.im.abs()
    } else if z.re > 1.0 {
        ((z.re - 1.0).powi(2) + z.im * z.im).sqrt()
    } else {
        ((z.re + 1.0).powi(2) + z.im * z.im).sqrt()
    }
}

/// Function of the second kind: the Cauchy transform
/// (1/2 pi i) integral of P_n(x) rho(x) v_i(x) / ((x - z) w_+(x)) dx,
/// evaluated by Gauss-Chebyshev quadrature with the 1/w_+ factor absorbed into
/// the Chebyshev weight. Restricted to dist(z, [-1,1]) >= 0.1 where the fixed
/// rule has converged.
pub fn second_kind(
    w: &WeightSpec,
    kind: Kind,
    table: &RecurrenceTable,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    if n > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds the table's n_max = {}",
            table.n_max()
        )));
    }
    let d = dist_to_interval(z);
    if !(d >= 0.1) {
        return Err(Error::AccuracyDomain(format!(
            "second-kind evaluation needs dist(z, [-1,1]) >= 0.1, got {d:.3e}"
        )));
    }
    let n_quad = table.n_quad();
    let nodes = cheb_nodes(n_quad)?;
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for &x in &nodes {
        let pin = table.scaled_monic(n, x)?;
        let g = pin * w.rho(x) * kind.v_real(x);
        let term = g / (z - x);
        re.add(term.re);
        im.add(term.im);
    }
    // (1/2pi) * (pi/N) * sum, and undo the 2^n scaling of pi_n
    let factor = 2.0f64.powi(-(n as i32)) / (2.0 * n_quad as f64);
    Ok(Complex64::new(re.value(), im.value()) * factor)
}
