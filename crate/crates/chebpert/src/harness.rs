//! End-to-end verification harness: compares computed polynomials and
//! recurrence coefficients against the explicit asymptotic formulas, fits
//! empirical convergence rates, and emits deterministic machine-readable
//! reports (17-significant-digit JSON and CSV on fixed grids).

use num_complex::Complex64;

use crate::cheb::cheb_nodes;
use crate::error::{Error, Result};
use crate::numfmt::{fmt_f64, json_escape};
use crate::orthopoly::RecurrenceTable;
use crate::szego::{self, SzegoData};
use crate::weights::{Kind, WeightSpec};

/// Errors at or below this size are treated as rounding-noise floor; slope
/// fits exclude them and report not-applicable when too few points remain.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Number of on-interval comparison points (a fixed Chebyshev grid).
pub const INTERVAL_GRID: usize = 512;
/// Number of exterior comparison points on the circle |z| = 2.
pub const EXTERIOR_POINTS: usize = 16;

/// Empirical two-sided band for err_interval / eps_n on finite-smoothness
/// weights: the max/min ratio across the run must stay within this factor.
pub const RATIO_BAND: f64 = 50.0;

/// On-interval comparison of the asymptotic formula at degree n and point x:
/// returns (predicted, actual) with
/// predicted = cos(n arccos x + theta(x) + theta_i(x)) and
/// actual    = pi_n(x) (S_i S)(inf) sqrt(rho |v_i|) / 2.
pub fn predict_interval(
    w: &WeightSpec,
    sd: &SzegoData,
    kind: Kind,
    table: &RecurrenceTable,
    n: usize,
    x: f64,
) -> Result<(f64, f64)> {
    if !(x.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!("interval prediction needs |x| <= 1, got {x}")));
    }
    let predicted = (n as f64 * x.acos() + sd.theta(x)? + szego::theta_i(kind, x)?).cos();
    let actual = table.scaled_monic(n, x)?
        * (kind.s_inf() * sd.s_inf())
        * (w.rho(x) * kind.v_abs(x)).sqrt()
        / 2.0;
    Ok((predicted, actual))
}

/// Exterior comparison at degree n and a point z with |phi(z)| >= 1.5:
/// predicted = (S_i S)(z) / (S_i S)(inf), actual = P_n(z) (2/phi(z))^n;
/// the theory asserts actual = predicted (1 + O(eps_n)).
pub fn predict_exterior(
    sd: &SzegoData,
    kind: Kind,
    table: &RecurrenceTable,
    n: usize,
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    let ph = szego::phi(z)?;
    if ph.norm() < 1.5 {
        return Err(Error::InvalidArgument(format!(
            "exterior prediction needs |phi(z)| >= 1.5, got {:.4} at z = {z}",
            ph.norm()
        )));
    }
    let predicted = szego::si(kind, z)? * sd.eval(z)? / (kind.s_inf() * sd.s_inf());
    let actual = table.exterior_ratio(n, z)?;
    Ok((predicted, actual))
}

/// Least-squares slope of log err against log n. Non-positive entries are
/// excluded; fewer than 4 surviving points is an error.
pub fn fit_rate(ns: &[usize], errs: &[f64]) -> Result<f64> {
    if ns.len() != errs.len() {
        return Err(Error::InvalidArgument("fit_rate needs equal-length inputs".into()));
    }
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errs)
        .filter(|&(_, &e)| e > 0.0)
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs >= 4 positive error points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// The 16 fixed exterior comparison points on |z| = 2.
pub fn exterior_circle() -> Vec<Complex64> {
    (0..EXTERIOR_POINTS)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / EXTERIOR_POINTS as f64;
            Complex64::from_polar(2.0, t)
        })
        .collect()
}

/// Per-degree error columns for one (weight, kind) pair.
#[derive(Debug, Clone)]
pub struct ErrorColumns {
    pub n_list: Vec<usize>,
    pub err_a: Vec<f64>,
    pub err_b: Vec<f64>,
    /// max(|a_n - 1/2|, |b_n|)
    pub err_recur: Vec<f64>,
    /// max |predicted - actual| on the 512-point interval grid
    pub err_interval: Vec<f64>,
    /// max |actual/predicted - 1| over the 16 circle points
    pub err_exterior: Vec<f64>,
    pub eps: Vec<f64>,
}

/// Evaluate every error column on the fixed grids.
pub fn compute_columns(
    w: &WeightSpec,
    sd: &SzegoData,
    kind: Kind,
    table: &RecurrenceTable,
    n_list: &[usize],
) -> Result<ErrorColumns> {
    let grid = cheb_nodes(INTERVAL_GRID)?;
    let circle = exterior_circle();
    let mut cols = ErrorColumns {
        n_list: n_list.to_vec(),
        err_a: Vec::with_capacity(n_list.len()),
        err_b: Vec::with_capacity(n_list.len()),
        err_recur: Vec::with_capacity(n_list.len()),
        err_interval: Vec::with_capacity(n_list.len()),
        err_exterior: Vec::with_capacity(n_list.len()),
        eps: Vec::with_capacity(n_list.len()),
    };
    for &n in n_list {
        let ea = (table.a(n)? - 0.5).abs();
        let eb = table.b(n)?.abs();
        cols.err_a.push(ea);
        cols.err_b.push(eb);
        cols.err_recur.push(ea.max(eb));

        let mut worst = 0.0f64;
        for &x in &grid {
            let (pred, act) = predict_interval(w, sd, kind, table, n, x)?;
            worst = worst.max((act - pred).abs());
        }
        cols.err_interval.push(worst);

        let mut worst = 0.0f64;
        for &z in &circle {
            let (pred, act) = predict_exterior(sd, kind, table, n, z)?;
            worst = worst.max((act / pred - 1.0).norm());
        }
        cols.err_exterior.push(worst);

        cols.eps.push(w.epsilon_n(n)?);
    }
    Ok(cols)
}

/// Full configuration of a verification run; every field round-trips into the
/// report so identical configs yield byte-identical output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub weight: String,
    pub kind: Kind,
    pub n_list: Vec<usize>,
    pub n_quad: Option<usize>,
    pub m: u32,
}

impl ExperimentConfig {
    /// Parse flat key-value text: one `key=value` per line, keys matching the
    /// CLI flags (`weight`, `kind`, `n`, `nquad`, `m`); `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut weight: Option<String> = None;
        let mut kind: Option<Kind> = None;
        let mut n_list: Option<Vec<usize>> = None;
        let mut n_quad: Option<usize> = None;
        let mut m: u32 = 3;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "weight" => weight = Some(value.to_string()),
                "kind" => {
                    let idx: u8 = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("config: bad kind '{value}'")))?;
                    kind = Some(Kind::from_index(idx)?);
                }
                "n" => {
                    let list = value
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<usize>()
                                .map_err(|_| Error::Parse(format!("config: bad degree '{s}'")))
                        })
                        .collect::<Result<Vec<usize>>>()?;
                    n_list = Some(list);
                }
                "nquad" => {
                    n_quad = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("config: bad nquad '{value}'")))?,
                    );
                }
                "m" => {
                    m = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("config: bad m '{value}'")))?;
                }
                other => return Err(Error::Parse(format!("config: unknown key '{other}'"))),
            }
        }
        let config = ExperimentConfig {
            weight: weight.ok_or_else(|| Error::Parse("config: missing 'weight'".into()))?,
            kind: kind.ok_or_else(|| Error::Parse("config: missing 'kind'".into()))?,
            n_list: n_list.ok_or_else(|| Error::Parse("config: missing 'n'".into()))?,
            n_quad,
            m,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidArgument("degree list must be nonempty".into()));
        }
        if self.n_list[0] < 2 {
            return Err(Error::InvalidArgument("degrees must be >= 2".into()));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("degree list must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Fitted slopes per error column; None marks a column at the noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Slopes {
    pub err_recur: Option<f64>,
    pub err_interval: Option<f64>,
    pub err_exterior: Option<f64>,
    pub eps: Option<f64>,
}

/// The result of one verification run.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub weight_label: String,
    pub columns: ErrorColumns,
    pub slopes: Slopes,
    pub pass: bool,
}

fn slope_or_na(ns: &[usize], errs: &[f64]) -> Option<f64> {
    let surviving: Vec<(usize, f64)> = ns
        .iter()
        .zip(errs)
        .filter(|&(_, &e)| e > NOISE_FLOOR)
        .map(|(&n, &e)| (n, e))
        .collect();
    if surviving.len() < 4 {
        return None;
    }
    let (ns, es): (Vec<usize>, Vec<f64>) = surviving.into_iter().unzip();
    fit_rate(&ns, &es).ok()
}

/// Run one experiment end to end: build the Szego data and recurrence table
/// once, populate every error column, fit slopes, and evaluate the pass band.
/// Deterministic: identical configs produce byte-identical reports.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let w = WeightSpec::parse(&config.weight, config.m)?;
    let sd = SzegoData::build(&w)?;
    let n_max = *config.n_list.last().unwrap();
    let table = RecurrenceTable::build(&w, config.kind, n_max, config.n_quad)?;
    let columns = compute_columns(&w, &sd, config.kind, &table, &config.n_list)?;

    let slopes = Slopes {
        err_recur: slope_or_na(&columns.n_list, &columns.err_recur),
        err_interval: slope_or_na(&columns.n_list, &columns.err_interval),
        err_exterior: slope_or_na(&columns.n_list, &columns.err_exterior),
        eps: slope_or_na(&columns.n_list, &columns.eps),
    };

    let finite = columns
        .err_recur
        .iter()
        .chain(&columns.err_interval)
        .chain(&columns.err_exterior)
        .chain(&columns.eps)
        .all(|e| e.is_finite() && *e >= 0.0);

    // the O(eps_n) band is a meaningful two-sided check only when the weight
    // has finite smoothness and the errors sit above the rounding floor
    let mut pass = finite;
    if finite
        && w.finite_smoothness()
        && columns.eps.iter().all(|&e| e > 0.0)
        && columns.err_interval.iter().all(|&e| e > NOISE_FLOOR)
    {
        let ratios: Vec<f64> = columns
            .err_interval
            .iter()
            .zip(&columns.eps)
            .map(|(&e, &eps)| e / eps)
            .collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        pass = pass && hi / lo <= RATIO_BAND;
    }

    Ok(ExperimentReport {
        config: config.clone(),
        weight_label: w.label().to_string(),
        columns,
        slopes,
        pass,
    })
}

fn json_f64_array(vals: &[f64]) -> String {
    let body: Vec<String> = vals
        .iter()
        .map(|&v| if v.is_finite() { fmt_f64(v) } else { "null".into() })
        .collect();
    format!("[{}]", body.join(", "))
}

fn json_usize_array(vals: &[usize]) -> String {
    let body: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
    format!("[{}]", body.join(", "))
}

fn json_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt_f64(x),
        _ => "null".into(),
    }
}

impl ExperimentReport {
    /// The report document: top-level keys config, columns, slopes, pass;
    /// numbers carry 17 significant digits.
    pub fn to_json(&self) -> String {
        let c = &self.config;
        let mut s = String::from("{\n  \"config\": {\n");
        s.push_str(&format!("    \"weight\": {},\n", json_escape(&c.weight)));
        s.push_str(&format!("    \"kind\": {},\n", c.kind.index()));
        s.push_str(&format!("    \"m\": {},\n", c.m));
        s.push_str(&format!("    \"n\": {},\n", json_usize_array(&c.n_list)));
        s.push_str(&format!(
            "    \"nquad\": {}\n",
            c.n_quad.map_or("null".to_string(), |q| q.to_string())
        ));
        s.push_str("  },\n  \"columns\": {\n");
        s.push_str(&format!("    \"n\": {},\n", json_usize_array(&self.columns.n_list)));
        s.push_str(&format!("    \"err_recur\": {},\n", json_f64_array(&self.columns.err_recur)));
        s.push_str(&format!(
            "    \"err_interval\": {},\n",
            json_f64_array(&self.columns.err_interval)
        ));
        s.push_str(&format!(
            "    \"err_exterior\": {},\n",
            json_f64_array(&self.columns.err_exterior)
        ));
        s.push_str(&format!("    \"eps\": {}\n", json_f64_array(&self.columns.eps)));
        s.push_str("  },\n  \"slopes\": {\n");
        s.push_str(&format!("    \"err_recur\": {},\n", json_opt(self.slopes.err_recur)));
        s.push_str(&format!("    \"err_interval\": {},\n", json_opt(self.slopes.err_interval)));
        s.push_str(&format!("    \"err_exterior\": {},\n", json_opt(self.slopes.err_exterior)));
        s.push_str(&format!("    \"eps\": {}\n", json_opt(self.slopes.eps)));
        s.push_str(&format!("  }},\n  \"pass\": {}\n}}\n", self.pass));
        s
    }

    /// Plot-ready CSV of the error columns.
    pub fn columns_csv(&self) -> String {
        let mut out = String::from("n,err_recur,err_interval,err_exterior,eps\n");
        for (i, &n) in self.columns.n_list.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                n,
                fmt_f64(self.columns.err_recur[i]),
                fmt_f64(self.columns.err_interval[i]),
                fmt_f64(self.columns.err_exterior[i]),
                fmt_f64(self.columns.eps[i]),
            ));
        }
        out
    }
}

/// Parse a complex number in the forms `a`, `bi`, `a+bi`, `a-bi`
/// (exponents allowed, e.g. `1e-3+2.5e-4i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let parse_part = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad complex component '{p}' in '{text}'"))),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        // find the sign separating real and imaginary parts (skip leading
        // sign and exponent signs)
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => Ok(Complex64::new(parse_part(&body[..i])?, parse_part(&body[i..])?)),
            None => Ok(Complex64::new(0.0, parse_part(body)?)),
        }
    } else {
        Ok(Complex64::new(parse_part(&s)?, 0.0))
    }
}
