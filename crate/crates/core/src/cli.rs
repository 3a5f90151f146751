//! Batch command-line front end.
//!
//! Each run writes one JSON or CSV artifact that embeds its [`RunConfig`] and
//! the library version; `--replay FILE` re-executes an embedded config and
//! reproduces the artifact byte for byte. Exit codes: 0 success, 1 usage or
//! domain error, 2 hypothesis rejection, 3 budget or cap exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dimension::{
    covering_counts, covering_exponent, dim_2d, dim_3d_block, dim_3d_example, generic_upper_bound,
    hausdorff_partial_sum, strategies_for, LogConvention, Strategy,
};
use crate::equidist::{
    badly_approximable_constant, continued_fraction, counting_function, liminf_proxy, separation_constant,
    star_discrepancy,
};
use crate::error::{Error, Result};
use crate::estimators::{box_count, measure_scan, BoxCountConfig, Centers, MeasureScanConfig, Occupancy};
use crate::geometry::{
    circumscribed_disjoint, component_geometry, min_disjoint_n, separation_profile, ComponentShape,
};
use crate::matrix::IntMatrix;
use crate::periodic::{brute_force_periodic, enumerate_periodic, DEFAULT_CAP};
use crate::spectral::{classify, validate_hyperbolic, Hyperbolic};
use crate::surd::QuadraticSurd;

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "TORREC_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "torrec",
    version,
    about = "Recurrence sets of hyperbolic toral endomorphisms",
    args_conflicts_with_subcommands = true,
    subcommand_required = false
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; never changes numeric results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Re-run the configuration embedded in an earlier artifact.
    #[arg(long)]
    replay: Option<PathBuf>,
}

/// Everything that determines an artifact's contents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
    pub format: Format,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the hyperbolicity hypotheses and print exact spectral data.
    Validate(MatrixArgs),
    /// List the n-periodic points exactly.
    Periodic(PeriodicArgs),
    /// Component shapes, separation profile and disjointness of R_n.
    Geometry(GeometryArgs),
    /// Closed-form dimension of R_tau.
    Dim(DimArgs),
    /// Dimension for the diag(m, B) family.
    Dim3d(Dim3dArgs),
    /// Generic upper bound from eigenvalue logarithms.
    UpperBound(UpperBoundArgs),
    /// Covering counts and fitted covering exponents.
    Cover(CoverArgs),
    /// Partial Hausdorff sums and tail classification.
    Sum(SumArgs),
    /// Box-counting slope of a finite union of R_n.
    Boxcount(BoxcountArgs),
    /// Monte-Carlo estimates of mu_n on balls.
    Measure(MeasureArgs),
    /// Equidistribution and Diophantine constants.
    Equidist(EquidistArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct MatrixArgs {
    /// Integer matrix, "a,b;c,d" or [[a,b],[c,d]].
    #[arg(long)]
    pub matrix: IntMatrix,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub n: u32,
    /// Refuse to list more points than this.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Cross-check against the brute-force oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct GeometryArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub n: u32,
    /// Which periodic point to centre the reported component on.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct DimArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Dim3dArgs {
    /// A 3x3 matrix diag(m, B); alternative to --m and --log-lambda.
    #[arg(long, conflicts_with_all = ["m", "log_lambda"])]
    pub matrix: Option<IntMatrix>,
    #[arg(long, requires = "log_lambda")]
    pub m: Option<u64>,
    #[arg(long, requires = "m")]
    pub log_lambda: Option<f64>,
    #[arg(long)]
    pub tau: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct UpperBoundArgs {
    /// Comma-separated exponents; alternative to --matrix.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "matrix")]
    pub ells: Option<Vec<f64>>,
    /// Take the exponents from log|eigenvalue| of this matrix.
    #[arg(long)]
    pub matrix: Option<IntMatrix>,
    #[arg(long)]
    pub tau: f64,
    /// Use raw logarithms instead of max(0, log|lambda_i|).
    #[arg(long)]
    pub raw: bool,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 10)]
    pub n_min: u32,
    #[arg(long, default_value_t = 30)]
    pub n_max: u32,
    /// Strategies (major-axis, minor-axis, k1, k2, k3); all applicable by default.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Option<Vec<String>>,
    /// Exponent for the per-n Hausdorff term count * radius^s.
    #[arg(long)]
    pub s: Option<f64>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SumArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 10)]
    pub n_min: u32,
    #[arg(long, default_value_t = 40)]
    pub n_max: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OccupancyArg {
    Probes,
    Exact,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BoxcountArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub n_min: u32,
    #[arg(long)]
    pub n_max: u32,
    #[arg(long, default_value_t = 4)]
    pub jmin: u32,
    #[arg(long, default_value_t = 11)]
    pub jmax: u32,
    /// Fit levels "a:b"; defaults to dropping the two coarsest and the finest.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, value_enum, default_value_t = OccupancyArg::Probes)]
    pub occupancy: OccupancyArg,
    /// Probes per box edge.
    #[arg(long, default_value_t = 3)]
    pub probes: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CenterArg {
    Uniform,
    Support,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[arg(long)]
    pub matrix: IntMatrix,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = CenterArg::Uniform)]
    pub centers: CenterArg,
    #[arg(long, default_value_t = 50)]
    pub balls: usize,
    /// Explicit comma-separated radii; otherwise log-spaced from --rmin to --rmax.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.02)]
    pub rmin: f64,
    #[arg(long, default_value_t = 0.2)]
    pub rmax: f64,
    #[arg(long, default_value_t = 6)]
    pub nr: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct EquidistArgs {
    /// alpha = (p + q sqrt(r)) / den given as "p,q,r,den".
    #[arg(long, conflicts_with = "matrix", allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Use gamma = (lambda_2 - a) / b of this matrix.
    #[arg(long)]
    pub matrix: Option<IntMatrix>,
    /// Number of terms of (n alpha).
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    /// Counting interval "a,b".
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
    #[arg(long, default_value_t = crate::equidist::DEFAULT_DEPTH)]
    pub depth: usize,
    /// Scan bound for q ||q alpha||.
    #[arg(long, default_value_t = 1_000_000)]
    pub q_max: u64,
}

/// A result as JSON plus the rows of its CSV form.
struct Artifact {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Rejected(_)
        | Error::Hypothesis(_)
        | Error::Singular { .. }
        | Error::OddPowerWithNegativeEigenvalue { .. }
        | Error::RationalInput
        | Error::Regime(_) => 2,
        Error::CapExceeded { .. }
        | Error::OracleTooLarge { .. }
        | Error::BudgetExceeded(_)
        | Error::InsufficientSamples(_) => 3,
        Error::Domain(_) | Error::Parse(_) | Error::Internal(_) => 1,
    }
}

fn num(x: f64) -> String {
    // shortest round-trip form, matching the JSON output
    serde_json::to_string(&x).unwrap_or_else(|_| "NaN".into())
}

fn parse_pair(s: &str, sep: char) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| Error::Parse(format!("expected two values separated by {sep:?} in {s:?}")))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}")));
    Ok((p(a)?, p(b)?))
}

fn parse_alpha(s: &str) -> Result<QuadraticSurd> {
    let parts: Vec<num_bigint::BigInt> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|e| Error::Parse(format!("bad alpha entry {x:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [p, q, r, d] = <[_; 4]>::try_from(parts)
        .map_err(|_| Error::Parse("alpha needs four integers p,q,r,den".into()))?;
    if d == 0.into() || r < 0.into() {
        return Err(Error::Parse("alpha needs den != 0 and r >= 0".into()));
    }
    Ok(QuadraticSurd::new(p, q, r, d))
}

fn execute(cfg: &RunConfig) -> Result<Artifact> {
    match &cfg.command {
        Command::Validate(a) => {
            let h = classify(&a.matrix)?;
            let rows = match &h {
                Hyperbolic::Planar(s) => vec![
                    vec!["kind".into(), "planar".into()],
                    vec!["lambda1".into(), s.lambda1.to_string()],
                    vec!["lambda2".into(), s.lambda2.to_string()],
                    vec!["gamma".into(), s.gamma.to_string()],
                    vec!["c1".into(), num(s.c1)],
                    vec!["log_abs_lambda2".into(), num(s.log_abs_lambda2)],
                ],
                Hyperbolic::Block3d(b) => vec![
                    vec!["kind".into(), "block3d".into()],
                    vec!["m".into(), b.m.to_string()],
                    vec!["lambda".into(), b.lambda.to_string()],
                    vec!["log_m".into(), num(b.log_m)],
                    vec!["log_lambda".into(), num(b.log_lambda)],
                ],
            };
            Ok(Artifact { json: serde_json::to_value(&h).map_err(internal)?, header: vec!["field", "value"], rows })
        }
        Command::Periodic(a) => {
            let set = enumerate_periodic(&a.matrix, a.n, a.cap)?;
            let oracle = if a.oracle {
                Some(brute_force_periodic(&a.matrix, a.n)?.same_points(&set))
            } else {
                None
            };
            let points: Vec<Vec<String>> = (0..set.len()).map(|i| set.point_strings(i)).collect();
            let json = json!({
                "n": a.n,
                "count": set.count.to_string(),
                "invariants": set.invariants.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "denominator": set.denominator,
                "verified": set.verify(&a.matrix),
                "oracle_agrees": oracle,
                "points": points,
            });
            let header = match set.dim {
                2 => vec!["index", "x", "y"],
                _ => vec!["index", "x", "y", "z"],
            };
            let rows = points
                .into_iter()
                .enumerate()
                .map(|(i, p)| std::iter::once(i.to_string()).chain(p).collect())
                .collect();
            Ok(Artifact { json, header, rows })
        }
        Command::Geometry(a) => {
            let s = validate_hyperbolic(&a.matrix)?;
            let set = enumerate_periodic(&a.matrix, a.n, DEFAULT_CAP)?;
            if a.index >= set.len() {
                return Err(Error::Domain(format!("index {} out of range for {} points", a.index, set.len())));
            }
            let comp = component_geometry(&s, a.tau, a.n, &set.rational_point(a.index))?;
            let c2 = separation_constant(&s)?;
            let profile = separation_profile(&s, a.tau, a.n, c2)?;
            let shape = ComponentShape::new(&s, a.tau, a.n)?;
            let json = json!({
                "min_disjoint_n": min_disjoint_n(a.tau),
                "component": comp,
                "separation": profile,
                "circumscribed_disjoint": circumscribed_disjoint(&shape),
            });
            let mut rows = Vec::new();
            for (kind, vs) in [("inscribed", &comp.inscribed), ("circumscribed", &comp.circumscribed)] {
                for (k, v) in vs.iter().enumerate() {
                    rows.push(vec![kind.to_string(), k.to_string(), num(v[0]), num(v[1])]);
                }
            }
            Ok(Artifact { json, header: vec!["parallelogram", "vertex", "x", "y"], rows })
        }
        Command::Dim(a) => {
            let v = match classify(&a.matrix)? {
                Hyperbolic::Planar(s) => dim_2d(s.log_abs_lambda2, a.tau)?,
                Hyperbolic::Block3d(b) => dim_3d_block(&b, a.tau)?,
            };
            Ok(dimension_artifact(&v))
        }
        Command::Dim3d(a) => {
            let v = match (&a.matrix, a.m, a.log_lambda) {
                (Some(m), _, _) => match classify(m)? {
                    Hyperbolic::Block3d(b) => dim_3d_block(&b, a.tau)?,
                    Hyperbolic::Planar(_) => {
                        return Err(Error::Domain("dim3d needs a 3x3 matrix diag(m, B)".into()))
                    }
                },
                (None, Some(m), Some(l)) => dim_3d_example(m, l, a.tau)?,
                _ => return Err(Error::Domain("give --matrix, or --m with --log-lambda".into())),
            };
            Ok(dimension_artifact(&v))
        }
        Command::UpperBound(a) => {
            let ells = match (&a.ells, &a.matrix) {
                (Some(e), _) => e.clone(),
                (None, Some(m)) => match classify(m)? {
                    Hyperbolic::Planar(s) => vec![s.lambda1.to_f64().abs().ln(), s.log_abs_lambda2],
                    Hyperbolic::Block3d(b) => vec![-b.log_lambda, b.log_lambda, b.log_m],
                },
                (None, None) => return Err(Error::Domain("give --ells or --matrix".into())),
            };
            let conv = if a.raw { LogConvention::Raw } else { LogConvention::Growth };
            Ok(dimension_artifact(&generic_upper_bound(&ells, a.tau, conv)?))
        }
        Command::Cover(a) => {
            let h = classify(&a.matrix)?;
            if a.n_min == 0 || a.n_min > a.n_max {
                return Err(Error::Domain("need 1 <= n-min <= n-max".into()));
            }
            let strategies = match &a.strategy {
                Some(v) => v.iter().map(|s| s.parse()).collect::<Result<Vec<Strategy>>>()?,
                None => strategies_for(&h),
            };
            let mut rows = Vec::new();
            let mut table = Vec::new();
            let mut exponents = serde_json::Map::new();
            for st in &strategies {
                for n in a.n_min..=a.n_max {
                    let r = covering_counts(&h, a.tau, n, *st)?;
                    let term = a.s.map(|s| r.log_term(s).exp());
                    rows.push(vec![
                        n.to_string(),
                        st.name().to_string(),
                        num(r.radius()),
                        r.count_exact.clone().unwrap_or_else(|| num(r.count())),
                        term.map(num).unwrap_or_default(),
                    ]);
                    table.push(json!({ "row": r, "term": term }));
                }
                if a.n_max > a.n_min {
                    let e = covering_exponent(&h, a.tau, *st, a.n_min, a.n_max)?;
                    exponents.insert(st.name().to_string(), json!(e));
                }
            }
            let json = json!({ "rows": table, "fitted_exponents": exponents });
            Ok(Artifact { json, header: vec!["n", "strategy", "radius", "count", "term"], rows })
        }
        Command::Sum(a) => {
            let h = classify(&a.matrix)?;
            let rep = hausdorff_partial_sum(&h, a.tau, a.s, a.n_min, a.n_max)?;
            let rows = rep
                .terms
                .iter()
                .map(|t| vec![t.n.to_string(), t.strategy.name().into(), num(t.log_radius), num(t.log_count), num(t.log_term)])
                .collect();
            Ok(Artifact {
                json: serde_json::to_value(&rep).map_err(internal)?,
                header: vec!["n", "strategy", "log_radius", "log_count", "log_term"],
                rows,
            })
        }
        Command::Boxcount(a) => {
            let window = a.window.as_deref().map(|w| parse_pair(w, ':')).transpose()?;
            let occupancy = match a.occupancy {
                OccupancyArg::Probes => Occupancy::Probes { per_axis: a.probes },
                OccupancyArg::Exact => Occupancy::Exact,
            };
            let cfg = BoxCountConfig {
                n_start: a.n_min,
                n_end: a.n_max,
                j_min: a.jmin,
                j_max: a.jmax,
                window: window.map(|(x, y)| (x as u32, y as u32)),
                occupancy,
            };
            let rep = box_count(&a.matrix, a.tau, &cfg)?;
            let rows = rep
                .levels
                .iter()
                .zip(&rep.scales)
                .zip(&rep.counts)
                .map(|((j, s), c)| vec![j.to_string(), num(*s), c.to_string()])
                .collect();
            Ok(Artifact { json: serde_json::to_value(&rep).map_err(internal)?, header: vec!["level", "scale", "count"], rows })
        }
        Command::Measure(a) => {
            let radii = match &a.radii {
                Some(r) => r.clone(),
                None => log_spaced(a.rmin, a.rmax, a.nr)?,
            };
            let centers = match a.centers {
                CenterArg::Uniform => Centers::Uniform { count: a.balls },
                CenterArg::Support => Centers::OnSupport { count: a.balls },
            };
            let cfg = MeasureScanConfig { centers, radii, samples: a.samples, seed: cfg.seed };
            let rep = measure_scan(&a.matrix, a.tau, a.n, &cfg)?;
            let rows = rep
                .balls
                .iter()
                .map(|b| {
                    vec![
                        num(b.center[0]),
                        num(b.center[1]),
                        num(b.radius),
                        num(b.mu.value),
                        num(b.mu.stderr),
                        num(b.lebesgue),
                        num(b.ratio),
                    ]
                })
                .collect();
            Ok(Artifact {
                json: serde_json::to_value(&rep).map_err(internal)?,
                header: vec!["x", "y", "r", "mu", "stderr", "lebesgue", "ratio"],
                rows,
            })
        }
        Command::Equidist(a) => {
            let alpha = match (&a.alpha, &a.matrix) {
                (Some(s), _) => parse_alpha(s)?,
                (None, Some(m)) => validate_hyperbolic(m)?.gamma,
                (None, None) => return Err(Error::Domain("give --alpha or --matrix".into())),
            };
            let profile = continued_fraction(&alpha, a.depth.max(1))?;
            let disc = star_discrepancy(&alpha, a.horizon)?;
            let counting = match &a.interval {
                Some(iv) => {
                    let (lo, hi) = parse_pair(iv, ',')?;
                    Some(counting_function(&alpha, lo, hi, a.horizon)?)
                }
                None => None,
            };
            let c_star = badly_approximable_constant(&alpha, a.q_max)?;
            let liminf = liminf_proxy(&alpha, a.q_max)?;
            let c2 = match &a.matrix {
                Some(m) => Some(separation_constant(&validate_hyperbolic(m)?)?),
                None => None,
            };
            let rows = profile
                .convergents
                .iter()
                .zip(&profile.partial_quotients)
                .enumerate()
                .map(|(k, (c, q))| vec![k.to_string(), q.to_string(), c.p.to_string(), c.q.to_string()])
                .collect();
            let json = json!({
                "profile": profile,
                "horizon": a.horizon,
                "star_discrepancy": disc,
                "scaled_discrepancy": a.horizon as f64 * disc / (a.horizon as f64).ln(),
                "counting": counting,
                "q_max": a.q_max,
                "badly_approximable_constant": c_star,
                "liminf_proxy": liminf,
                "c2": c2,
            });
            Ok(Artifact { json, header: vec!["k", "quotient", "p", "q"], rows })
        }
    }
}

fn internal(e: serde_json::Error) -> Error {
    Error::Internal(e.to_string())
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || count == 0 {
        return Err(Error::Domain(format!("need 0 < rmin <= rmax and nr >= 1, got {lo}, {hi}, {count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect())
}

fn dimension_artifact(v: &crate::dimension::DimensionValue) -> Artifact {
    Artifact {
        json: serde_json::to_value(v).expect("plain data"),
        header: vec!["candidate", "value", "attains_min"],
        rows: v
            .candidates
            .iter()
            .map(|c| vec![c.label.clone(), num(c.value), v.attained_by.contains(&c.label).to_string()])
            .collect(),
    }
}

fn render(cfg: &RunConfig, art: Artifact) -> Result<Vec<u8>> {
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "version": VERSION,
                "config": cfg,
                "result": art.json,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(internal)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let provenance = json!({ "schema": SCHEMA, "version": VERSION, "config": cfg });
            let mut out = format!("# {}\n", serde_json::to_string(&provenance).map_err(internal)?).into_bytes();
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| Error::Internal(e.to_string());
            w.write_record(&art.header).map_err(io)?;
            for r in &art.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush().map_err(|e| Error::Internal(e.to_string()))?;
            drop(w);
            Ok(out)
        }
    }
}

/// Recovers the [`RunConfig`] embedded in an artifact.
pub fn embedded_config(text: &str) -> Result<RunConfig> {
    let doc: Value = if let Some(rest) = text.strip_prefix("# ") {
        let line = rest.lines().next().unwrap_or_default();
        serde_json::from_str(line).map_err(|e| Error::Parse(format!("bad provenance line: {e}")))?
    } else {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad artifact: {e}")))?
    };
    let cfg = doc.get("config").ok_or_else(|| Error::Parse("artifact has no config block".into()))?;
    serde_json::from_value(cfg.clone()).map_err(|e| Error::Parse(format!("bad config block: {e}")))
}

/// Runs one configuration and returns the artifact bytes.
pub fn run_config(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<u8>> {
    let threads = threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    let go = || execute(cfg).and_then(|art| render(cfg, art));
    match threads {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(go),
        _ => go(),
    }
}

/// Parses `argv` (program name first), writes the artifact and returns the
/// process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let cfg = match (&cli.replay, cli.command) {
        (Some(path), _) => {
            match std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
                .and_then(|t| embedded_config(&t))
            {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return 1;
                }
            }
        }
        (None, Some(command)) => RunConfig { command, seed: cli.seed, format: cli.format },
        (None, None) => {
            let _ = writeln!(stderr, "error: a subcommand or --replay is required; see --help");
            return 1;
        }
    };
    match run_config(&cfg, cli.threads) {
        Ok(bytes) => {
            let written = match &cli.output {
                Some(p) => std::fs::write(p, &bytes),
                None => stdout.write_all(&bytes),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write output: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
