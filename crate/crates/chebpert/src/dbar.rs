//! Constructive continuous extension of 1/rho off the interval with a
//! pointwise-controlled dbar = (d_x + i d_y)/2 derivative.
//!
//! The pieces, for a degree budget n and an ellipse parameter r > 1:
//!
//! * `l_n`  - a degree <= n polynomial approximant of 1/rho: the machine-
//!   resolved Chebyshev expansion truncated at degree n, plus a cubic that
//!   matches the value and first derivative of the discarded tail at both
//!   endpoints. The endpoint matching makes the divided remainder below
//!   vanish at +-1 together with its first derivative, so lambda and
//!   lambda' stay bounded.
//! * `lambda_n(x) = (1/rho(x) - l_n(x)) / sqrt(1-x^2)`, evaluated from the
//!   remainder series itself (never by subtracting nearly equal numbers)
//!   and extended by zero outside the interval. When the expansion of
//!   1/rho is resolved to machine precision below degree n the remainder
//!   series is empty and lambda is the exact zero function.
//! * `Lambda_n(z)` - the horizontal average (1/|y|) int_0^{|y|}
//!   lambda_n(x+t) dt, continuous with |Lambda_n| <= sup|lambda_n|.
//! * `psi_r(z)` - a C^1 cutoff, 1 on [-1,1] and exactly 0 outside the
//!   ellipse E_r = { |phi| < r }, built from a quintic smoothstep in |phi|.
//! * `L_{n,r} = -+ i w(z) Lambda_n(z) psi_r(z)` (minus in the closed upper
//!   half-plane), so that l_n + L_{n,r} restricts to 1/rho on the interval
//!   and is supported by the closed ellipse.
//!
//! The field routine samples L on half-plane grids, takes central finite
//! differences for dbar L, and reports the ratio of |dbar L|/sqrt|1-z^2|
//! against the scale n eps_n / log n.

use num_complex::Complex64;

use crate::cheb::{cheb_nodes, ChebSeries};
use crate::error::{Error, Result};
use crate::numfmt::{fmt_f64, json_escape};
use crate::szego::{on_cut, phi_abs_extended, sqrt_w};
use crate::weights::WeightSpec;

/// Endpoint guard: lambda is taken as 0 for |x| > 1 - GUARD, avoiding 0/0 at
/// the endpoints. The remainder series vanishes to second order there, so the
/// discarded values are O(GUARD^(3/2)) of the remainder scale.
const GUARD: f64 = 1e-8;

/// Relative tail threshold for accepting the master expansion of 1/rho.
const TAIL_REL: f64 = 1e-13;
/// Relative chop threshold: trailing coefficients below this fraction of the
/// largest are rounding noise and are dropped, which is what makes machine-
/// analytic weights extend with an exactly-zero correction field.
const CHOP_REL: f64 = 1e-14;
const MAX_MASTER: usize = 8192;

/// Parameters of a field computation.
#[derive(Debug, Clone)]
pub struct ExtensionParams {
    /// approximant degree budget (must exceed 2m)
    pub n: usize,
    /// inner ellipse parameter, the support boundary of the correction
    pub r: f64,
    /// outer reporting parameter (> r); echoed into summaries
    pub big_r: f64,
    /// grid resolution in points per unit length (>= 64)
    pub grid: usize,
}

impl ExtensionParams {
    pub fn validate(&self, w: &WeightSpec) -> Result<()> {
        if self.n <= 2 * w.order() as usize {
            return Err(Error::InvalidArgument(format!(
                "extension degree n must exceed 2m = {}, got {}",
                2 * w.order(),
                self.n
            )));
        }
        if !(self.r > 1.0) {
            return Err(Error::InvalidArgument(format!("r must exceed 1, got {}", self.r)));
        }
        if !(self.big_r > self.r) {
            return Err(Error::InvalidArgument(format!(
                "R must exceed r, got R = {}, r = {}",
                self.big_r, self.r
            )));
        }
        if self.grid < 64 {
            return Err(Error::InvalidArgument(format!(
                "grid must be >= 64 points per unit, got {}",
                self.grid
            )));
        }
        Ok(())
    }
}

/// The (weight, degree) part of the construction: l_n and the remainder
/// series defining lambda_n.
#[derive(Debug, Clone)]
pub struct WeightExtension {
    l: ChebSeries,
    /// remainder series nu with 1/rho - l_n = sum nu_k T_k (empty = exact)
    nu: ChebSeries,
    nu_norm: f64,
    n: usize,
}

impl WeightExtension {
    pub fn build(w: &WeightSpec, n: usize) -> Result<Self> {
        if n <= 2 * w.order() as usize {
            return Err(Error::InvalidArgument(format!(
                "approximant degree must exceed 2m = {}, got {n}",
                2 * w.order()
            )));
        }
        let master = resolve_inv_rho(w)?;
        let c = master.coeffs();
        let keep = (n + 1).min(c.len());
        let mut l: Vec<f64> = c[..keep].to_vec();
        let nu = if keep == c.len() {
            ChebSeries::zero()
        } else {
            // endpoint data of the tail sum_{k>n} c_k T_k
            let mut v_plus = 0.0;
            let mut v_minus = 0.0;
            let mut d_plus = 0.0;
            let mut d_minus = 0.0;
            for (k, &ck) in c.iter().enumerate().skip(keep) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let k2 = (k * k) as f64;
                v_plus += ck;
                v_minus += ck * sign;
                d_plus += ck * k2;
                d_minus -= ck * sign * k2;
            }
            // cubic h with h(+-1) = t(+-1), h'(+-1) = t'(+-1)
            let sv = 0.5 * (v_plus + v_minus);
            let dv = 0.5 * (v_plus - v_minus);
            let sd = 0.5 * (d_plus + d_minus);
            let dd = 0.5 * (d_plus - d_minus);
            let a2 = 0.5 * dd;
            let a0 = sv - a2;
            let a3 = 0.5 * (sd - dv);
            let a1 = dv - a3;
            let h = [a0 + 0.5 * a2, a1 + 0.75 * a3, 0.5 * a2, 0.25 * a3];
            for (lk, hk) in l.iter_mut().zip(h) {
                *lk += hk;
            }
            let mut nu = vec![0.0; c.len()];
            nu[..4].copy_from_slice(&[-h[0], -h[1], -h[2], -h[3]]);
            nu[keep..].copy_from_slice(&c[keep..]);
            ChebSeries::new(nu)
        };
        let nu_norm = nu.coeff_norm();
        Ok(WeightExtension { l: ChebSeries::new(l), nu, nu_norm, n })
    }

    pub fn degree_budget(&self) -> usize {
        self.n
    }

    /// The polynomial approximant l_n (degree <= n).
    pub fn l(&self) -> &ChebSeries {
        &self.l
    }

    /// True when the remainder series is empty and the extension correction
    /// vanishes identically.
    pub fn is_exact(&self) -> bool {
        self.nu.is_zero()
    }

    /// lambda_n(x) = (1/rho - l_n)/sqrt(1-x^2) from the remainder series,
    /// extended by zero outside |x| <= 1 - 1e-8.
    pub fn lambda(&self, x: f64) -> f64 {
        if self.nu.is_zero() || x.abs() > 1.0 - GUARD {
            return 0.0;
        }
        self.nu.eval_unchecked(x) / ((1.0 - x) * (1.0 + x)).sqrt()
    }

    /// Lambda_n(z) = (1/|y|) int_0^{|y|} lambda_n(x+t) dt, with the limit
    /// value lambda_n(x) on the real axis. Satisfies |Lambda_n| <= sup|lambda|.
    pub fn vertical_average(&self, z: Complex64) -> f64 {
        let (x, y) = (z.re, z.im.abs());
        if y == 0.0 {
            return self.lambda(x);
        }
        if self.nu.is_zero() {
            return 0.0;
        }
        // split where x + t crosses the interval endpoints: lambda is zero
        // beyond them and only piecewise smooth across
        let mut cuts = vec![0.0, y];
        for endpoint in [-1.0, 1.0] {
            let t = endpoint - x;
            if t > 0.0 && t < y {
                cuts.push(t);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = 1e-8 * self.nu_norm.max(1e-300);
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b - a <= 0.0 {
                continue;
            }
            // skip segments entirely outside the support
            let (lo, hi) = (x + a, x + b);
            if hi <= -1.0 || lo >= 1.0 {
                continue;
            }
            total += adaptive_simpson(&|t| self.lambda(x + t), a, b, tol * (b - a) / y, 20);
        }
        total / y
    }

    /// Scale bound for |lambda| deduced from the remainder coefficients.
    pub fn remainder_norm(&self) -> f64 {
        self.nu_norm
    }
}

/// Resolve 1/rho into a Chebyshev expansion meeting the 1e-13 tail criterion,
/// then chop rounding-noise trailing coefficients.
fn resolve_inv_rho(w: &WeightSpec) -> Result<ChebSeries> {
    let mut n = 64;
    loop {
        let series = ChebSeries::interpolate(|x| w.inv_rho(x), n)?;
        let c = series.coeffs();
        let max = c.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let tail = c[c.len() - 1].abs().max(c[c.len() - 2].abs());
        if tail <= TAIL_REL * max.max(1e-300) {
            return Ok(series.chopped(CHOP_REL));
        }
        if n >= MAX_MASTER {
            return Err(Error::UnderResolved(format!(
                "1/rho for '{}' does not meet the tail criterion at N = {n}",
                w.label()
            )));
        }
        n *= 2;
    }
}

/// Degree <= n polynomial approximant of 1/rho on [-1, 1] (the l_n of the
/// extension construction).
pub fn build_l_n(w: &WeightSpec, n: usize) -> Result<ChebSeries> {
    Ok(WeightExtension::build(w, n)?.l.clone())
}

/// Direct-formula lambda: (1/rho(x) - l(x))/sqrt(1-x^2) with the same
/// endpoint guard. Agrees with [`WeightExtension::lambda`] up to rounding of
/// the explicit subtraction.
pub fn lambda_direct(w: &WeightSpec, l: &ChebSeries, x: f64) -> f64 {
    if x.abs() > 1.0 - GUARD {
        return 0.0;
    }
    (w.inv_rho(x) - l.eval_unchecked(x)) / ((1.0 - x) * (1.0 + x)).sqrt()
}

/// The cutoff psi_r: 1 on [-1,1], exactly 0 outside E_r, C^1 in between;
/// a quintic smoothstep in u = (|phi(z)| - 1)/(r - 1).
pub fn bump(r: f64, z: Complex64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::InvalidArgument(format!("bump parameter r must exceed 1, got {r}")));
    }
    let u = ((phi_abs_extended(z) - 1.0) / (r - 1.0)).clamp(0.0, 1.0);
    Ok(1.0 - u * u * u * (6.0 * u * u - 15.0 * u + 10.0))
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
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
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// One half-plane of field samples (row-major over ys then xs).
#[derive(Debug, Clone)]
pub struct HalfPlaneGrid {
    pub xs: Vec<f64>,
    /// ordered away from the axis: positive ascending (upper), negative
    /// descending (lower)
    pub ys: Vec<f64>,
    pub l_values: Vec<Complex64>,
    /// |dbar L| at interior points; None on the frame where central
    /// differences have no same-half-plane neighbors
    pub dbar_abs: Vec<Option<f64>>,
}

impl HalfPlaneGrid {
    fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.xs[ix], self.ys[iy])
    }

    pub fn l_at(&self, ix: usize, iy: usize) -> Complex64 {
        self.l_values[self.idx(ix, iy)]
    }

    pub fn dbar_at(&self, ix: usize, iy: usize) -> Option<f64> {
        self.dbar_abs[self.idx(ix, iy)]
    }
}

/// The sampled extension field with its bound diagnostics.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    pub params: ExtensionParams,
    pub weight_label: String,
    pub m: u32,
    pub upper: HalfPlaneGrid,
    pub lower: HalfPlaneGrid,
    /// n eps_n / log n, the proposition's dbar scale
    pub bound_scale: f64,
    /// max over both grids of |dbar L| / (sqrt|1-z^2| * bound_scale);
    /// exact zeros contribute 0 even when the scale vanishes
    pub bound_ratio: f64,
    /// max over [-1,1] of |l_n(x) + sqrt(1-x^2) lambda_n(x) - 1/rho(x)|
    pub interval_defect: f64,
    /// max |dbar L| over both grids
    pub dbar_max: f64,
}

/// Compute the field: L on upper and lower half-plane grids (the w branch
/// differs across the cut), central-difference dbar within each open
/// half-plane, and the bound diagnostics.
pub fn extension_field(w: &WeightSpec, params: &ExtensionParams) -> Result<ExtensionField> {
    params.validate(w)?;
    let r = params.r;
    // the cutoff transition annulus is thinnest along the imaginary axis,
    // where its width is the semi-minor axis (r - 1/r)/2; with fewer than 6
    // cells across it, central differences of the quintic profile carry more
    // than ~10% relative error
    let minor = 0.5 * (r - 1.0 / r);
    if params.grid as f64 * minor < 6.0 {
        return Err(Error::Resolution(format!(
            "grid resolution {} puts fewer than 6 cells across the cutoff \
             transition near the ellipse boundary (width {minor:.4}); finite \
             differences of dbar L would carry more than 10% noise",
            params.grid
        )));
    }
    let ext = WeightExtension::build(w, params.n)?;
    let step = 1.0 / params.grid as f64;
    let semi_major = 0.5 * (r + 1.0 / r);
    let semi_minor = 0.5 * (r - 1.0 / r);
    let pad = (4.0 * step).max(0.05);

    let x_lo = -(semi_major + pad);
    let nx = ((2.0 * (semi_major + pad)) / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..nx).map(|i| x_lo + i as f64 * step).collect();
    let ny = ((semi_minor + pad) / step).ceil() as usize;
    let ys_upper: Vec<f64> = (1..=ny).map(|i| i as f64 * step).collect();
    let ys_lower: Vec<f64> = ys_upper.iter().map(|y| -y).collect();

    let eval_l = |z: Complex64| -> Result<Complex64> {
        let psi = bump(r, z)?;
        if psi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let lam = ext.vertical_average(z);
        if lam == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let sign = if z.im >= 0.0 { -1.0 } else { 1.0 };
        Ok(Complex64::new(0.0, sign) * sqrt_w(z)? * lam * psi)
    };

    let mut grids = Vec::with_capacity(2);
    for ys in [&ys_upper, &ys_lower] {
        let mut l_values = Vec::with_capacity(xs.len() * ys.len());
        for &y in ys.iter() {
            for &x in &xs {
                l_values.push(eval_l(Complex64::new(x, y))?);
            }
        }
        let mut grid = HalfPlaneGrid {
            xs: xs.clone(),
            ys: ys.clone(),
            l_values,
            dbar_abs: vec![None; xs.len() * ys.len()],
        };
        // toward-axis neighbor sits at the previous row in both orderings
        for iy in 1..ys.len().saturating_sub(1) {
            for ix in 1..xs.len() - 1 {
                let dx = grid.l_at(ix + 1, iy) - grid.l_at(ix - 1, iy);
                let dy_pair = if ys[1] > ys[0] {
                    grid.l_at(ix, iy + 1) - grid.l_at(ix, iy - 1)
                } else {
                    grid.l_at(ix, iy - 1) - grid.l_at(ix, iy + 1)
                };
                let dbar = (dx + Complex64::new(0.0, 1.0) * dy_pair) / (4.0 * step);
                let k = grid.idx(ix, iy);
                grid.dbar_abs[k] = Some(dbar.norm());
            }
        }
        grids.push(grid);
    }
    let lower = grids.pop().unwrap();
    let upper = grids.pop().unwrap();

    let eps = w.epsilon_n(params.n.max(2))?;
    let bound_scale = params.n as f64 * eps / (params.n as f64).ln();

    let mut bound_ratio = 0.0f64;
    let mut dbar_max = 0.0f64;
    for grid in [&upper, &lower] {
        for iy in 0..grid.ys.len() {
            for ix in 0..grid.xs.len() {
                if let Some(d) = grid.dbar_at(ix, iy) {
                    dbar_max = dbar_max.max(d);
                    let ratio = local_ratio(d, grid.point(ix, iy), bound_scale);
                    if ratio > bound_ratio {
                        bound_ratio = ratio;
                    }
                }
            }
        }
    }

    // on-interval defect of ell = l_n + sqrt(1-x^2) lambda_n against 1/rho
    let mut probe = cheb_nodes(2049)?;
    probe.push(1.0);
    probe.push(-1.0);
    let mut interval_defect = 0.0f64;
    for x in probe {
        let ell = ext.l.eval_unchecked(x) + ((1.0 - x) * (1.0 + x)).sqrt() * ext.lambda(x);
        interval_defect = interval_defect.max((ell - w.inv_rho(x)).abs());
    }

    Ok(ExtensionField {
        params: params.clone(),
        weight_label: w.label().to_string(),
        m: w.order(),
        upper,
        lower,
        bound_scale,
        bound_ratio,
        interval_defect,
        dbar_max,
    })
}

fn local_ratio(dbar_abs: f64, z: Complex64, scale: f64) -> f64 {
    if dbar_abs == 0.0 {
        return 0.0;
    }
    let root = (Complex64::new(1.0, 0.0) - z * z).norm().sqrt();
    let denom = root * scale;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        dbar_abs / denom
    }
}

impl ExtensionField {
    /// CSV for one half-plane: re_z, im_z, re_L, im_L, abs_dbar_L,
    /// bound_ratio_local (the last two empty on the frame rows where no
    /// central difference exists).
    pub fn half_plane_csv(&self, grid: &HalfPlaneGrid) -> String {
        let mut out = String::from("re_z,im_z,re_L,im_L,abs_dbar_L,bound_ratio_local\n");
        for iy in 0..grid.ys.len() {
            for ix in 0..grid.xs.len() {
                let z = grid.point(ix, iy);
                let l = grid.l_at(ix, iy);
                out.push_str(&fmt_f64(z.re));
                out.push(',');
                out.push_str(&fmt_f64(z.im));
                out.push(',');
                out.push_str(&fmt_f64(l.re));
                out.push(',');
                out.push_str(&fmt_f64(l.im));
                out.push(',');
                match grid.dbar_at(ix, iy) {
                    Some(d) => {
                        out.push_str(&fmt_f64(d));
                        out.push(',');
                        out.push_str(&fmt_f64(local_ratio(d, z, self.bound_scale)));
                    }
                    None => out.push(','),
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = String::from("{\n");
        s.push_str(&format!("  \"weight\": {},\n", json_escape(&self.weight_label)));
        s.push_str(&format!("  \"m\": {},\n", self.m));
        s.push_str(&format!("  \"n\": {},\n", self.params.n));
        s.push_str(&format!("  \"r\": {},\n", fmt_f64(self.params.r)));
        s.push_str(&format!("  \"R\": {},\n", fmt_f64(self.params.big_r)));
        s.push_str(&format!("  \"grid\": {},\n", self.params.grid));
        s.push_str("  \"psi_profile\": \"quintic-smoothstep\",\n");
        s.push_str(&format!("  \"bound_scale\": {},\n", fmt_f64(self.bound_scale)));
        s.push_str(&format!(
            "  \"bound_ratio\": {},\n",
            if self.bound_ratio.is_finite() { fmt_f64(self.bound_ratio) } else { "null".into() }
        ));
        s.push_str(&format!("  \"dbar_max\": {},\n", fmt_f64(self.dbar_max)));
        s.push_str(&format!("  \"interval_defect\": {}\n", fmt_f64(self.interval_defect)));
        s.push_str("}\n");
        s
    }

    /// Write `<prefix>_upper.csv`, `<prefix>_lower.csv`, `<prefix>_summary.json`.
    pub fn write_files(&self, prefix: &str) -> Result<[std::path::PathBuf; 3]> {
        let upper = std::path::PathBuf::from(format!("{prefix}_upper.csv"));
        let lower = std::path::PathBuf::from(format!("{prefix}_lower.csv"));
        let summary = std::path::PathBuf::from(format!("{prefix}_summary.json"));
        std::fs::write(&upper, self.half_plane_csv(&self.upper))?;
        std::fs::write(&lower, self.half_plane_csv(&self.lower))?;
        std::fs::write(&summary, self.summary_json())?;
        Ok([upper, lower, summary])
    }
}

/// Horizontal-average extension of lambda for a caller-supplied build; the
/// free-function form of [`WeightExtension::vertical_average`].
pub fn lambda_average(ext: &WeightExtension, z: Complex64) -> f64 {
    ext.vertical_average(z)
}

/// True if z lies on [-1, 1] (where the field takes its boundary values).
pub fn is_on_interval(z: Complex64) -> bool {
    on_cut(z)
}
