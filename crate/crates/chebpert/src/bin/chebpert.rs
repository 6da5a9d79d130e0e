//! Command-line harness: recurrence tables, Szego values, asymptotic error
//! columns, configured verification runs, and extension fields, all as
//! deterministic CSV/JSON.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use chebpert::dbar::{extension_field, ExtensionParams};
use chebpert::harness::{
    compute_columns, parse_complex, run_experiment, ExperimentConfig,
};
use chebpert::orthopoly::RecurrenceTable;
use chebpert::szego::{Side, SzegoData};
use chebpert::{Error, Kind, Result, WeightSpec};

#[derive(Parser)]
#[command(
    name = "chebpert",
    version,
    about = "Orthogonal polynomials for smoothly perturbed Chebyshev weights: \
             recurrence tables, Szego data, asymptotic verification, and \
             dbar-extension fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monic recurrence coefficients a_n, b_n and squared norms h_n (CSV)
    Recurrence {
        /// Weight DSL: const:c=..., exp:alpha=..., recip-poly:c=...,
        /// holder:c=...,beta=...,x0=...,m=...
        #[arg(long)]
        weight: String,
        /// Endpoint-factor kind 1..=4 (Chebyshev T/U/V/W when rho = 1)
        #[arg(long)]
        kind: u8,
        /// Largest degree in the table
        #[arg(long)]
        nmax: usize,
        /// Quadrature size (default: 8*nmax rounded up to a power of two, min 1024)
        #[arg(long)]
        nquad: Option<usize>,
        /// Smoothness order for families that do not carry one
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Szego function and phase values (CSV)
    Szego {
        #[arg(long)]
        weight: String,
        /// Comma-separated complex points off [-1,1], e.g. "2,0.5+1.2i"
        #[arg(long, conflicts_with = "interval_grid")]
        at: Option<String>,
        /// Evaluate theta and the upper boundary values of S on a uniform
        /// G-point grid over [-1,1]
        #[arg(long)]
        interval_grid: Option<usize>,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-degree error columns of the asymptotic formulas vs eps_n (CSV)
    Asymptotics {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        kind: u8,
        /// Comma-separated strictly increasing degree list, e.g. "32,64,128"
        #[arg(long)]
        n: String,
        #[arg(long)]
        nquad: Option<usize>,
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured experiment; writes report.json and columns.csv
    Verify {
        /// Flat key=value config file (keys: weight, kind, n, nquad, m)
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and columns.csv
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Sample the dbar-extension field on half-plane grids
    Extension {
        #[arg(long)]
        weight: String,
        /// Approximant degree (must exceed 2m)
        #[arg(long)]
        n: usize,
        /// Inner ellipse parameter (> 1): support boundary of the correction
        #[arg(long)]
        r: f64,
        /// Outer reporting parameter (> r)
        #[arg(long = "R")]
        big_r: f64,
        /// Grid resolution in points per unit (>= 64)
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Prefix for <prefix>_upper.csv, <prefix>_lower.csv,
        /// <prefix>_summary.json
        #[arg(long, default_value = "extension")]
        out_prefix: String,
    },
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_degree_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree '{s}'")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Recurrence { weight, kind, nmax, nquad, m, out } => {
            let w = WeightSpec::parse(&weight, m)?;
            let kind = Kind::from_index(kind)?;
            let table = RecurrenceTable::build(&w, kind, nmax, nquad)?;
            let mut csv = String::from("n,a_n,b_n,h_n\n");
            for n in 0..=table.n_max() {
                let a = if n == 0 { String::new() } else { fmt17(table.a(n)?) };
                csv.push_str(&format!(
                    "{n},{a},{},{}\n",
                    fmt17(table.b(n)?),
                    fmt17(table.h(n)?)
                ));
            }
            emit(&csv, out)
        }
        Cmd::Szego { weight, at, interval_grid, m, out } => {
            let w = WeightSpec::parse(&weight, m)?;
            let sd = SzegoData::build(&w)?;
            let csv = match (at, interval_grid) {
                (Some(points), None) => {
                    let mut csv = String::from("re_z,im_z,re_S,im_S\n");
                    for tok in points.split(',') {
                        let z = parse_complex(tok)?;
                        let s = sd.eval(z)?;
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            fmt17(z.re),
                            fmt17(z.im),
                            fmt17(s.re),
                            fmt17(s.im)
                        ));
                    }
                    csv
                }
                (None, Some(g)) => {
                    if g < 2 {
                        return Err(Error::InvalidArgument("interval grid needs >= 2 points".into()));
                    }
                    let mut csv = String::from("x,theta,re_S_plus,im_S_plus\n");
                    for i in 0..g {
                        let x = -1.0 + 2.0 * i as f64 / (g as f64 - 1.0);
                        let th = sd.theta(x)?;
                        let sp = sd.boundary(x, Side::Upper)?;
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            fmt17(x),
                            fmt17(th),
                            fmt17(sp.re),
                            fmt17(sp.im)
                        ));
                    }
                    csv
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "szego needs exactly one of --at or --interval-grid".into(),
                    ))
                }
            };
            emit(&csv, out)
        }
        Cmd::Asymptotics { weight, kind, n, nquad, m, out } => {
            let w = WeightSpec::parse(&weight, m)?;
            let kind = Kind::from_index(kind)?;
            let n_list = parse_degree_list(&n)?;
            let cfg = ExperimentConfig {
                weight: weight.clone(),
                kind,
                n_list: n_list.clone(),
                n_quad: nquad,
                m,
            };
            cfg.validate()?;
            let sd = SzegoData::build(&w)?;
            let table = RecurrenceTable::build(&w, kind, *n_list.last().unwrap(), nquad)?;
            let cols = compute_columns(&w, &sd, kind, &table, &n_list)?;
            let mut csv = String::from("n,err_interval,err_exterior,err_a,err_b,eps_n\n");
            for (i, &deg) in cols.n_list.iter().enumerate() {
                csv.push_str(&format!(
                    "{deg},{},{},{},{},{}\n",
                    fmt17(cols.err_interval[i]),
                    fmt17(cols.err_exterior[i]),
                    fmt17(cols.err_a[i]),
                    fmt17(cols.err_b[i]),
                    fmt17(cols.eps[i]),
                ));
            }
            emit(&csv, out)
        }
        Cmd::Verify { config, out_dir } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let report = run_experiment(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            let json_path = out_dir.join("report.json");
            let csv_path = out_dir.join("columns.csv");
            std::fs::write(&json_path, report.to_json())?;
            std::fs::write(&csv_path, report.columns_csv())?;
            println!(
                "verify: weight {} kind {} pass={} -> {}, {}",
                report.weight_label,
                report.config.kind,
                report.pass,
                json_path.display(),
                csv_path.display()
            );
            Ok(())
        }
        Cmd::Extension { weight, n, r, big_r, grid, m, out_prefix } => {
            let w = WeightSpec::parse(&weight, m)?;
            let params = ExtensionParams { n, r, big_r, grid };
            let field = extension_field(&w, &params)?;
            let files = field.write_files(&out_prefix)?;
            println!(
                "extension: bound_ratio={} interval_defect={} -> {}, {}, {}",
                fmt17(field.bound_ratio),
                fmt17(field.interval_defect),
                files[0].display(),
                files[1].display(),
                files[2].display()
            );
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
