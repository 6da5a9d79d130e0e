//! The weight family: densities rho on [-1, 1], the four endpoint factors
//! v_i, smoothness metadata, the modulus of continuity, and the error scale
//! eps_n = (log n / n^m) * omega((1/rho)^(m); 1/n) that governs all
//! asymptotic error terms.

use std::collections::VecDeque;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::cheb::cheb_nodes;
use crate::error::{Error, Result};

/// Grid size for the reproducible modulus-of-continuity estimator used by
/// `epsilon_n`.
pub const EPS_OMEGA_GRID: usize = 8192;

/// Step used when an m-th derivative of 1/rho is built by iterated central
/// differences: eps^(1/(m+2)) balances the h^2 truncation error against the
/// eps/h^m roundoff amplification, floored at the 8192-grid spacing.
pub fn fd_step(m: u32) -> f64 {
    f64::EPSILON.powf(1.0 / (m as f64 + 2.0)).max(2.44140625e-4)
}

/// The four endpoint factors: v_1 = 1, v_2 = z^2-1, v_3 = z+1, v_4 = z-1,
/// selecting among the perturbed first/second/third/fourth-kind families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    First = 1,
    Second = 2,
    Third = 3,
    Fourth = 4,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::First, Kind::Second, Kind::Third, Kind::Fourth];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Result<Kind> {
        match i {
            1 => Ok(Kind::First),
            2 => Ok(Kind::Second),
            3 => Ok(Kind::Third),
            4 => Ok(Kind::Fourth),
            _ => Err(Error::InvalidArgument(format!("kind index must be 1..=4, got {i}"))),
        }
    }

    /// |v_i(x)| on [-1, 1], evaluated in factored form so endpoint zeros are
    /// exact rather than the result of cancellation.
    pub fn v_abs(self, x: f64) -> f64 {
        match self {
            Kind::First => 1.0,
            Kind::Second => (1.0 - x) * (1.0 + x),
            Kind::Third => 1.0 + x,
            Kind::Fourth => 1.0 - x,
        }
    }

    /// The signed polynomial v_i at a complex argument.
    pub fn v_complex(self, z: Complex64) -> Complex64 {
        match self {
            Kind::First => Complex64::new(1.0, 0.0),
            Kind::Second => z * z - 1.0,
            Kind::Third => z + 1.0,
            Kind::Fourth => z - 1.0,
        }
    }

    /// The signed v_i restricted to the interval.
    pub fn v_real(self, x: f64) -> f64 {
        match self {
            Kind::First => 1.0,
            Kind::Second => x * x - 1.0,
            Kind::Third => x + 1.0,
            Kind::Fourth => x - 1.0,
        }
    }

    /// S_i at infinity: 1, 2, sqrt(2), sqrt(2).
    pub fn s_inf(self) -> f64 {
        match self {
            Kind::First => 1.0,
            Kind::Second => 2.0,
            Kind::Third | Kind::Fourth => std::f64::consts::SQRT_2,
        }
    }

    /// Exponent k_i in v_i S_i^2 = (-1)^(i-1) phi^{k_i}: 0, 2, 1, 1.
    pub fn phi_exponent(self) -> u32 {
        match self {
            Kind::First => 0,
            Kind::Second => 2,
            Kind::Third | Kind::Fourth => 1,
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone)]
enum Family {
    /// rho = c
    Const { c: f64 },
    /// rho = exp(alpha x)
    Exp { alpha: f64 },
    /// rho = 1/p(x), p given by power-basis coefficients, positive on [-1, 1]
    RecipPoly { p: Vec<f64> },
    /// rho = c + |x - x0|^(m + beta), beta in (0, 1): exactly m continuous
    /// derivatives of 1/rho with a Holder-beta m-th derivative
    Holder { c: f64, beta: f64, x0: f64 },
}

/// A strictly positive density on [-1, 1] with smoothness metadata.
///
/// Built-in families carry closed-form m-th derivatives of 1/rho; a
/// finite-difference fallback is available through [`fd_m_deriv`].
#[derive(Debug)]
pub struct WeightSpec {
    family: Family,
    m: u32,
    label: String,
    /// Whether 1/rho has only finitely many derivatives (true for the Holder
    /// family); reports use this to decide if rate bands apply.
    finite_smoothness: bool,
    /// Cached samples of (1/rho)^(m) on the uniform EPS_OMEGA_GRID.
    deriv_samples: OnceLock<Vec<f64>>,
    /// Faa di Bruno partition table for the Holder family.
    partitions: Vec<Partition>,
}

#[derive(Debug, Clone)]
struct Partition {
    /// multiplicity[i] = number of parts equal to i+1
    mult: Vec<u32>,
    /// m! / prod_i ((i!)^{mult_i} mult_i!)
    coeff: f64,
    /// total number of parts
    order: u32,
}

impl Clone for WeightSpec {
    fn clone(&self) -> Self {
        WeightSpec {
            family: self.family.clone(),
            m: self.m,
            label: self.label.clone(),
            finite_smoothness: self.finite_smoothness,
            deriv_samples: OnceLock::new(),
            partitions: self.partitions.clone(),
        }
    }
}

impl WeightSpec {
    /// rho = c, c > 0.
    pub fn constant(c: f64, m: u32) -> Result<Self> {
        Self::build(Family::Const { c }, m, format!("const:c={c}"))
    }

    /// rho = exp(alpha x).
    pub fn exponential(alpha: f64, m: u32) -> Result<Self> {
        Self::build(Family::Exp { alpha }, m, format!("exp:alpha={alpha}"))
    }

    /// rho = 1/p(x) for a polynomial p (power-basis coefficients, constant
    /// first) that is positive on [-1, 1].
    pub fn recip_poly(p: Vec<f64>, m: u32) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("recip-poly needs at least one coefficient".into()));
        }
        let label = format!(
            "recip-poly:c={}",
            p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::build(Family::RecipPoly { p }, m, label)
    }

    /// rho = c + |x - x0|^(m + beta), beta in (0, 1).
    pub fn holder(c: f64, beta: f64, x0: f64, m: u32) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidArgument(format!("holder beta must lie in (0,1), got {beta}")));
        }
        let label = format!("holder:c={c},beta={beta},x0={x0},m={m}");
        Self::build(Family::Holder { c, beta, x0 }, m, label)
    }

    /// Parse the textual weight form:
    /// `const:c=<real>`, `exp:alpha=<real>`, `recip-poly:c=<c0>,<c1>,...`,
    /// `holder:c=<real>,beta=<real>,x0=<real>,m=<int>`.
    ///
    /// `default_m` supplies the smoothness order for families that do not
    /// carry one in their textual form.
    pub fn parse(text: &str, default_m: u32) -> Result<Self> {
        let text = text.trim();
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("weight '{text}': expected '<family>:<params>'")))?;
        let kv = parse_kv(rest)?;
        let get = |key: &str| -> Result<&str> {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("weight '{text}': missing parameter '{key}'")))
        };
        let num = |key: &str| -> Result<f64> {
            get(key)?
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("weight '{text}': parameter '{key}' is not a number")))
        };
        match head {
            "const" => Self::constant(num("c")?, default_m),
            "exp" => Self::exponential(num("alpha")?, default_m),
            "recip-poly" => {
                let coeffs = get("c")?
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            Error::Parse(format!("weight '{text}': bad coefficient '{s}'"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Self::recip_poly(coeffs, default_m)
            }
            "holder" => {
                let m: u32 = get("m")?
                    .parse()
                    .map_err(|_| Error::Parse(format!("weight '{text}': bad m")))?;
                Self::holder(num("c")?, num("beta")?, num("x0")?, m)
            }
            other => Err(Error::Parse(format!("unknown weight family '{other}'"))),
        }
    }

    fn build(family: Family, m: u32, label: String) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidArgument(format!(
                "smoothness order m must be >= 3, got {m}"
            )));
        }
        let finite_smoothness = matches!(family, Family::Holder { .. });
        let partitions = if finite_smoothness { enumerate_partitions(m) } else { Vec::new() };
        let w = WeightSpec {
            family,
            m,
            label,
            finite_smoothness,
            deriv_samples: OnceLock::new(),
            partitions,
        };
        w.check_positive()?;
        Ok(w)
    }

    /// Strict positivity on a 4097-point Chebyshev grid plus the endpoints.
    fn check_positive(&self) -> Result<()> {
        let mut pts = cheb_nodes(4097)?;
        pts.push(1.0);
        pts.push(-1.0);
        for x in pts {
            let r = self.rho(x);
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "weight '{}' is not strictly positive on [-1,1]: rho({x}) = {r}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// True when 1/rho has exactly m continuous derivatives (Holder family);
    /// analytic families return false.
    pub fn finite_smoothness(&self) -> bool {
        self.finite_smoothness
    }

    pub fn rho(&self, x: f64) -> f64 {
        match &self.family {
            Family::Const { c } => *c,
            Family::Exp { alpha } => (alpha * x).exp(),
            Family::RecipPoly { p } => 1.0 / horner(p, x),
            Family::Holder { c, beta, x0 } => c + (x - x0).abs().powf(self.m as f64 + beta),
        }
    }

    pub fn inv_rho(&self, x: f64) -> f64 {
        match &self.family {
            Family::Const { c } => 1.0 / c,
            Family::Exp { alpha } => (-alpha * x).exp(),
            Family::RecipPoly { p } => horner(p, x),
            Family::Holder { c, beta, x0 } => 1.0 / (c + (x - x0).abs().powf(self.m as f64 + beta)),
        }
    }

    /// Closed-form m-th derivative of 1/rho.
    pub fn inv_rho_m_deriv(&self, x: f64) -> f64 {
        let m = self.m;
        match &self.family {
            Family::Const { .. } => 0.0,
            Family::Exp { alpha } => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * alpha.powi(m as i32) * (-alpha * x).exp()
            }
            Family::RecipPoly { p } => {
                // m-fold derivative of the power-basis polynomial
                let mut q = p.clone();
                for _ in 0..m {
                    q = q
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, c)| i as f64 * c)
                        .collect();
                    if q.is_empty() {
                        return 0.0;
                    }
                }
                horner(&q, x)
            }
            Family::Holder { c, beta, x0 } => {
                // Faa di Bruno for f(u) = 1/(c+u), u = |t|^s, t = x-x0, s = m+beta.
                let s = m as f64 + beta;
                let t = x - x0;
                let at = t.abs();
                let sg = if t >= 0.0 { 1.0 } else { -1.0 };
                // u^(i)(x) = s(s-1)...(s-i+1) |t|^(s-i) sgn(t)^i; 0 at t = 0 since s-i > 0
                let mut u_deriv = vec![0.0; m as usize + 1];
                let u0 = at.powf(s);
                let mut fall = 1.0;
                for i in 1..=m as usize {
                    fall *= s - (i as f64 - 1.0);
                    u_deriv[i] = if at == 0.0 {
                        0.0
                    } else {
                        fall * at.powf(s - i as f64) * if i % 2 == 0 { 1.0 } else { sg }
                    };
                }
                let d = c + u0;
                let mut total = 0.0;
                for part in &self.partitions {
                    // f^(k)(u) = (-1)^k k! / (c+u)^(k+1)
                    let k = part.order;
                    let mut fk = factorial(k) / d.powi(k as i32 + 1);
                    if k % 2 == 1 {
                        fk = -fk;
                    }
                    let mut prod = 1.0;
                    for (i, &cnt) in part.mult.iter().enumerate() {
                        for _ in 0..cnt {
                            prod *= u_deriv[i + 1];
                        }
                    }
                    total += part.coeff * fk * prod;
                }
                total
            }
        }
    }

    fn deriv_samples(&self) -> &[f64] {
        self.deriv_samples.get_or_init(|| {
            uniform_grid(EPS_OMEGA_GRID)
                .map(|x| self.inv_rho_m_deriv(x))
                .collect()
        })
    }

    /// The error scale of the asymptotic theory:
    /// eps_n = (log n / n^m) * omega((1/rho)^(m); 1/n), with the modulus
    /// estimated on the fixed 8192-point uniform grid.
    pub fn epsilon_n(&self, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("epsilon_n requires n >= 2, got {n}")));
        }
        let omega = omega_from_samples(self.deriv_samples(), 1.0 / n as f64, EPS_OMEGA_GRID);
        let nf = n as f64;
        Ok(nf.ln() / nf.powi(self.m as i32) * omega)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// All partitions of m as multiplicity vectors, with Faa di Bruno weights.
fn enumerate_partitions(m: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut mult = vec![0u32; m as usize];
    fn rec(remaining: u32, max_part: u32, mult: &mut Vec<u32>, out: &mut Vec<Partition>, m: u32) {
        if remaining == 0 {
            let order: u32 = mult.iter().sum();
            let mut denom = 1.0;
            for (i, &cnt) in mult.iter().enumerate() {
                denom *= factorial(i as u32 + 1).powi(cnt as i32) * factorial(cnt);
            }
            out.push(Partition { mult: mult.clone(), coeff: factorial(m) / denom, order });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            mult[part as usize - 1] += 1;
            rec(remaining - part, part, mult, out, m);
            mult[part as usize - 1] -= 1;
        }
    }
    rec(m, m, &mut mult, &mut out, m);
    out
}

fn uniform_grid(g: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 / (g as f64 - 1.0);
    (0..g).map(move |i| -1.0 + i as f64 * step)
}

/// Modulus of continuity of `f` estimated on a uniform `grid`-point grid over
/// [-1, 1]: the maximum |f(x) - f(y)| over grid pairs with |x - y| <= h.
/// Monotone nondecreasing in h by construction.
pub fn modulus_of_continuity<F: Fn(f64) -> f64>(f: F, h: f64, grid: usize) -> Result<f64> {
    if !(h > 0.0 && h <= 2.0) {
        return Err(Error::InvalidArgument(format!("modulus requires 0 < h <= 2, got {h}")));
    }
    if grid < 1024 {
        return Err(Error::InvalidArgument(format!("modulus grid must be >= 1024, got {grid}")));
    }
    let mut samples = Vec::with_capacity(grid);
    for (i, x) in uniform_grid(grid).enumerate() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { index: i, x, context: "modulus sample".into() });
        }
        samples.push(v);
    }
    Ok(omega_from_samples(&samples, h, grid))
}

/// Sliding-window max-min over all windows of width h; equals the brute-force
/// maximum over pairs because any pair within h sits inside the window
/// anchored at its left point.
fn omega_from_samples(samples: &[f64], h: f64, grid: usize) -> f64 {
    let step = 2.0 / (grid as f64 - 1.0);
    let k = (h / step).floor() as usize;
    if k == 0 {
        return 0.0;
    }
    let mut max_q: VecDeque<usize> = VecDeque::new();
    let mut min_q: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for i in 0..samples.len() {
        while max_q.back().is_some_and(|&j| samples[j] <= samples[i]) {
            max_q.pop_back();
        }
        max_q.push_back(i);
        while min_q.back().is_some_and(|&j| samples[j] >= samples[i]) {
            min_q.pop_back();
        }
        min_q.push_back(i);
        let lo = i.saturating_sub(k);
        while *max_q.front().unwrap() < lo {
            max_q.pop_front();
        }
        while *min_q.front().unwrap() < lo {
            min_q.pop_front();
        }
        if i >= k {
            best = best.max(samples[*max_q.front().unwrap()] - samples[*min_q.front().unwrap()]);
        }
    }
    best
}

/// m-fold iterated central difference of `f` at `x` with step [`fd_step`]:
/// the fallback for densities without a closed-form m-th derivative.
pub fn fd_m_deriv<F: Fn(f64) -> f64>(f: F, m: u32, x: f64) -> f64 {
    let h = fd_step(m);
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let offset = (m as f64 - 2.0 * j as f64) * h;
        acc += sign * binom * f(x + offset);
        binom *= (m - j) as f64 / (j as f64 + 1.0);
    }
    acc / (2.0 * h).powi(m as i32)
}

fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    // comma-separated key=value pairs, except that a value may itself contain
    // commas when it is the last `c=` list (recip-poly); handle by splitting
    // on commas that are followed by `key=`.
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let eq = rest
            .find('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in '{rest}'")))?;
        let key = rest[..eq].trim().to_string();
        let after = &rest[eq + 1..];
        // the value ends at the comma that starts the next key=... pair
        let mut end = after.len();
        let mut scan = 0;
        for (i, ch) in after.char_indices() {
            if ch == ',' {
                let tail = &after[i + 1..];
                if tail.split(',').next().is_some_and(|seg| seg.contains('=')) {
                    end = i;
                    break;
                }
            }
            scan = i;
        }
        let _ = scan;
        let value = after[..end].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse(format!("bad parameter syntax in '{text}'")));
        }
        pairs.push((key, value));
        rest = if end < after.len() { &after[end + 1..] } else { "" };
    }
    Ok(pairs)
}
