//! Shared test oracles: independent quadrature routes for the defining
//! integrals, an exact rational Gram-orthogonalization for the classical
//! families, and brute-force estimators. Everything here deliberately avoids
//! the series/recurrence code paths it is used to check.

#![allow(dead_code)]

use num::{BigInt, BigRational, ToPrimitive};
use num_complex::Complex64;

use chebpert::orthopoly::RecurrenceTable;
use chebpert::weights::Kind;
use chebpert::WeightSpec;

// ---------------------------------------------------------------------------
// adaptive Simpson quadrature (real and complex integrands)

pub fn simpson_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_real_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_real_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_real_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_real_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

pub fn simpson_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let re = simpson_real(&|t| f(t).re, a, b, tol, depth);
    let im = simpson_real(&|t| f(t).im, a, b, tol, depth);
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// direct-integral oracles for the Szego function and its phase

/// The branch sqrt(z^2-1) with w(z)/z -> 1, written independently.
pub fn w_branch(z: Complex64) -> Complex64 {
    (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// Direct quadrature of the defining Cauchy integral:
/// S(z) = exp( -(w(z)/2pi) int_0^pi log rho(cos psi) / (z - cos psi) dpsi ).
pub fn szego_s_oracle(w: &WeightSpec, z: Complex64) -> Complex64 {
    let integrand = |psi: f64| {
        let x = psi.cos();
        w.rho(x).ln() / (z - x)
    };
    // coarse magnitude estimate to scale the absolute tolerance
    let mut scale = 0.0f64;
    for k in 0..32 {
        let psi = std::f64::consts::PI * (k as f64 + 0.5) / 32.0;
        scale = scale.max(integrand(psi).norm());
    }
    let tol = 1e-12 * std::f64::consts::PI * scale.max(1e-30);
    let integral = simpson_complex(&integrand, 0.0, std::f64::consts::PI, tol, 42);
    (-w_branch(z) / (2.0 * std::f64::consts::PI) * integral).exp()
}

/// Principal-value oracle for the phase: regularize by subtracting
/// log rho(x) (the Cauchy kernel of the Chebyshev weight has zero principal
/// value) and integrate the continuous remainder with 4096-point
/// Gauss-Chebyshev.
pub fn theta_pv_oracle(w: &WeightSpec, x: f64) -> f64 {
    if x == 1.0 || x == -1.0 {
        return 0.0;
    }
    let n = 4096usize;
    let log_at_x = w.rho(x).ln();
    let mut acc = 0.0;
    for j in 0..n {
        let t = ((2 * j + 1) as f64 * std::f64::consts::PI / (2.0 * n as f64)).cos();
        let g = if (t - x).abs() < 1e-13 {
            // derivative limit of the regularized integrand
            let h = 1e-6;
            (w.rho(t + h).ln() - w.rho(t - h).ln()) / (2.0 * h)
        } else {
            (w.rho(t).ln() - log_at_x) / (t - x)
        };
        acc += g;
    }
    let integral = std::f64::consts::PI / n as f64 * acc;
    (1.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI) * integral
}

/// Independent route for the second-kind function: adaptive Simpson in the
/// angle variable of (1/2pi) int_0^pi P_n(cos psi) rho v_i / (z - cos psi) dpsi.
pub fn second_kind_oracle(
    w: &WeightSpec,
    kind: Kind,
    table: &RecurrenceTable,
    n: usize,
    z: Complex64,
) -> Complex64 {
    let integrand = |psi: f64| {
        let x = psi.cos();
        let pin = table.scaled_monic(n, x).unwrap();
        pin * w.rho(x) * kind.v_real(x) / (z - x)
    };
    let tol = 1e-14 * (1.0 + z.norm());
    let integral = simpson_complex(&integrand, 0.0, std::f64::consts::PI, tol, 40);
    integral * 2.0f64.powi(-(n as i32)) / (2.0 * std::f64::consts::PI)
}

// ---------------------------------------------------------------------------
// brute-force modulus of continuity on a uniform grid

pub fn brute_modulus<F: Fn(f64) -> f64>(f: F, h: f64, grid: usize) -> f64 {
    let step = 2.0 / (grid as f64 - 1.0);
    let xs: Vec<f64> = (0..grid).map(|i| -1.0 + i as f64 * step).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let k = (h / step).floor() as usize;
    let mut best = 0.0f64;
    for i in 0..grid {
        for j in (i + 1)..=(i + k).min(grid - 1) {
            best = best.max((fs[j] - fs[i]).abs());
        }
    }
    best
}

// ---------------------------------------------------------------------------
// exact rational Gram orthogonalization for rho = 1 (classical families)

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Moments of the normalized measure |v_i| dx / (pi sqrt(1-x^2)) as exact
/// rationals, k = 0..=k_max.
pub fn classical_moments(kind: Kind, k_max: usize) -> Vec<BigRational> {
    // first-kind moments: M_0 = 1, M_{2j} = M_{2j-2} (2j-1)/(2j), odd zero
    let mut m1 = vec![big(0); k_max + 3];
    m1[0] = big(1);
    let mut j = 1usize;
    while 2 * j < k_max + 3 {
        let prev = m1[2 * j - 2].clone();
        m1[2 * j] = prev * big(2 * j as i64 - 1) / big(2 * j as i64);
        j += 1;
    }
    match kind {
        Kind::First => m1[..=k_max].to_vec(),
        Kind::Second => {
            // M_{2j} = (2j-1)!!/(2j+2)!!: M_0 = 1/2, ratio (2j-1)/(2j+2)
            let mut m2 = vec![big(0); k_max + 1];
            m2[0] = big(1) / big(2);
            let mut j = 1usize;
            while 2 * j <= k_max {
                let prev = m2[2 * j - 2].clone();
                m2[2 * j] = prev * big(2 * j as i64 - 1) / big(2 * j as i64 + 2);
                j += 1;
            }
            m2
        }
        Kind::Third => (0..=k_max).map(|k| m1[k].clone() + m1[k + 1].clone()).collect(),
        Kind::Fourth => (0..=k_max).map(|k| m1[k].clone() - m1[k + 1].clone()).collect(),
    }
}

/// Exact monic recurrence coefficients (a_n^2 for n = 1.., b_n for n = 0..)
/// from the moments, by rational Gram-Schmidt on the monomial basis.
pub fn gram_rational(kind: Kind, n_max: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let moments = classical_moments(kind, 2 * n_max + 2);
    let inner = |p: &[BigRational], q: &[BigRational], shift: usize| -> BigRational {
        let mut acc = big(0);
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                acc += pi * qj * &moments[i + j + shift];
            }
        }
        acc
    };
    let mut p_prev: Vec<BigRational> = vec![];
    let mut p_cur: Vec<BigRational> = vec![big(1)];
    let mut h_cur = inner(&p_cur, &p_cur, 0);
    let mut b = vec![inner(&p_cur, &p_cur, 1) / h_cur.clone()];
    let mut a_sq: Vec<BigRational> = Vec::new();
    for n in 1..=n_max {
        // P_{n} = x P_{n-1} - b_{n-1} P_{n-1} - a_{n-1}^2 P_{n-2}
        let mut next = vec![big(0); p_cur.len() + 1];
        for (i, c) in p_cur.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= &b[n - 1] * c;
        }
        if n >= 2 {
            for (i, c) in p_prev.iter().enumerate() {
                next[i] -= &a_sq[n - 2] * c;
            }
        }
        p_prev = std::mem::replace(&mut p_cur, next);
        let h_prev = std::mem::replace(&mut h_cur, inner(&p_cur, &p_cur, 0));
        a_sq.push(h_cur.clone() / h_prev);
        b.push(inner(&p_cur, &p_cur, 1) / h_cur.clone());
    }
    (a_sq, b)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

// ---------------------------------------------------------------------------
// deterministic pseudo-random numbers for spot checks

pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn index(&mut self, len: usize) -> usize {
        (self.next_u64() % len as u64) as usize
    }
}
