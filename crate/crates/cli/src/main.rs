//! betaxp: experiments with binary expansions in non-integer bases.
//!
//! Each subcommand maps onto one library operation. The primary artifact —
//! a CSV table for curve-like results, a JSON report otherwise — goes to
//! stdout; with `--out DIR` (or `BETAXP_OUT_DIR`) all artifacts land in the
//! directory next to a `manifest.json` describing the run.

mod emit;

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use betaxp_core::{
    box_dimension, branching_profile, classify, classify_series, coverage, enumerate_sums,
    enumerate_sums_with_multiplicity, exact_histogram, greedy_expand, grid_scan,
    kappa_lower_bound, komornik_loreti, lazy_expand, mc_histogram, membership, multinacci_value,
    optimal_chain_search, pair_statistics, BaseValue, Error, IntegerPolynomial, RateFunction,
    RateSequence, SetVariant, StageWindow, ToleranceConfig,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use emit::{fmt_real, RunContext};

#[derive(Parser)]
#[command(
    name = "betaxp",
    version,
    about = "Experiments with binary expansions in bases 1 < beta < 2"
)]
struct Cli {
    /// Directory for output files and the run manifest (falls back to
    /// BETAXP_OUT_DIR; stdout only when neither is set)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for grid and sampling subcommands (0 = all cores)
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,

    /// Absolute tolerance for merging nearby level sums
    #[arg(long, global = true, default_value_t = 1e-12)]
    dedup_tol: f64,

    /// Margin around the unit circle where conjugate moduli stay undecided
    #[arg(long, global = true, default_value_t = 1e-6)]
    root_margin: f64,

    /// Slack for interval membership and measure comparisons
    #[arg(long, global = true, default_value_t = 1e-9)]
    measure_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct GridSpec {
    lo: f64,
    hi: f64,
    count: u32,
}

fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err("expected lo,hi,count".into());
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|e| format!("lo: {e}"))?;
    let hi = parts[1].trim().parse::<f64>().map_err(|e| format!("hi: {e}"))?;
    let count = parts[2]
        .trim()
        .parse::<u32>()
        .map_err(|e| format!("count: {e}"))?;
    Ok(GridSpec { lo, hi, count })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    /// Raw-sum anchors, windows to the right
    OneSided,
    /// Normalized anchors in [0, 1], windows to the right
    Normalized,
    /// Normalized anchors, windows on both sides
    TwoSided,
}

impl From<VariantArg> for SetVariant {
    fn from(v: VariantArg) -> SetVariant {
        match v {
            VariantArg::OneSided => SetVariant::OneSided,
            VariantArg::Normalized => SetVariant::Normalized,
            VariantArg::TwoSided => SetVariant::TwoSided,
        }
    }
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::OneSided => "one-sided",
            VariantArg::Normalized => "normalized",
            VariantArg::TwoSided => "two-sided",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    /// Largest admissible digit at every step
    Greedy,
    /// Smallest admissible digit at every step
    Lazy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HistArg {
    /// Exact digit-word enumeration
    Exact,
    /// Seeded word sampling
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// List the distinct level-n sums in increasing order
    Sums {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: u32,
        /// Scale sums by (beta - 1) into [0, 1]
        #[arg(long)]
        normalized: bool,
        /// Track how many digit words collide on each value
        #[arg(long)]
        multiplicity: bool,
    },
    /// Count ordered close pairs and crowded points at one (beta, s, n)
    Pairs {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: u32,
        /// Window scale: two sums are close when within s / 2^n
        #[arg(long)]
        s: f64,
    },
    /// Pair statistics across a midpoint grid of bases
    Scan {
        /// Base grid as lo,hi,count
        #[arg(long, value_parser = parse_grid, default_value = "1.497,2,64")]
        grid: GridSpec,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: f64,
    },
    /// Expand a point digit by digit
    Expand {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Greedy)]
        method: MethodArg,
    },
    /// Branching profile: how long the expansion digits stay forced
    Unique {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        horizon: u32,
    },
    /// Search for a digit word that is best at every depth
    Optimal {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        horizon: u32,
    },
    /// Stage-by-stage coverage of the anchor-window construction
    Coverage {
        #[arg(long)]
        beta: f64,
        /// Window width per stage: power:<alpha>, geometric, log, linear,
        /// or const:<c> (the last three scale by 2^-n)
        #[arg(long)]
        rate: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Normalized)]
        variant: VariantArg,
        /// First stage
        #[arg(long)]
        from: u32,
        /// Last stage
        #[arg(long)]
        to: u32,
    },
    /// Which stages place an anchor window around a point
    Member {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        rate: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Normalized)]
        variant: VariantArg,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    /// Box-count slope of the power-rate construction
    Dimension {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        alpha: f64,
        /// Deepest stage entering the union
        #[arg(long)]
        depth: u32,
        /// Coarsest grid exponent (boxes of side 2^-k)
        #[arg(long)]
        scale_lo: u32,
        /// Finest grid exponent
        #[arg(long)]
        scale_hi: u32,
    },
    /// Root analysis of a monic integer polynomial
    Classify {
        /// Integer coefficients, leading first (e.g. 1,0,-2)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        poly: Vec<i64>,
    },
    /// The base in (1, 2) whose first k+1 digit collisions are exact
    Multinacci {
        #[arg(long)]
        order: u32,
    },
    /// Smallest base in (1, 2) admitting a nontrivial unique expansion
    Kl {
        #[arg(long, default_value_t = 1e-10)]
        precision: f64,
    },
    /// Histogram of the normalized coin-toss value distribution at level n
    Bernoulli {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 64)]
        bins: u32,
        #[arg(long, value_enum, default_value_t = HistArg::Exact)]
        method: HistArg,
        /// Sample count (mc method)
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// RNG seed (mc method)
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convergence verdict for the volume series sum 2^n psi(n)^s
    Series {
        /// Shorthand for --rate power:<alpha>
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        rate: Option<String>,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 50)]
        terms: u32,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            // Valid request, but the machine or a guard said no.
            Failure::Lib(Error::Resource(_)) | Failure::Io(_) => 4,
            // The request itself was malformed.
            Failure::Lib(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => e.fmt(f),
            Failure::Io(e) => e.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let tol = ToleranceConfig::new(cli.dedup_tol, cli.root_margin, cli.measure_tol)?;
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("BETAXP_OUT_DIR").map(PathBuf::from));
    let ctx = RunContext::new(out_dir)?;
    match cli.jobs {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Resource(format!("worker pool: {e}")))?;
            pool.install(|| run_command(cli.command, ctx, &tol))
        }
        None => run_command(cli.command, ctx, &tol),
    }
}

fn run_command(command: Command, mut ctx: RunContext, tol: &ToleranceConfig) -> Result<(), Failure> {
    let mut seeds: Vec<u64> = Vec::new();
    let params = match command {
        Command::Sums {
            beta,
            n,
            normalized,
            multiplicity,
        } => {
            let base = BaseValue::new(beta)?;
            let sums = if multiplicity {
                enumerate_sums_with_multiplicity(&base, n, normalized, tol)?
            } else {
                enumerate_sums(&base, n, normalized, tol)?
            };
            let values = sums.values();
            let (header, rows) = match sums.multiplicities() {
                Some(mult) => (
                    "index,value,multiplicity",
                    values
                        .iter()
                        .zip(mult)
                        .enumerate()
                        .map(|(i, (v, m))| format!("{i},{},{m}", fmt_real(*v)))
                        .collect::<Vec<_>>(),
                ),
                None => (
                    "index,value",
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| format!("{i},{}", fmt_real(*v)))
                        .collect(),
                ),
            };
            ctx.table("sums", header, &rows)?;
            ctx.summary(&json!({
                "beta": beta,
                "n": n,
                "normalized": normalized,
                "distinct": sums.distinct_count(),
                "words": sums.word_count(),
            }))?;
            json!({
                "beta": beta, "n": n,
                "normalized": normalized, "multiplicity": multiplicity,
            })
        }

        Command::Pairs { beta, n, s } => {
            let base = BaseValue::new(beta)?;
            let stats = pair_statistics(&base, s, n, tol)?;
            let row = format!(
                "{},{},{},{},{},{}",
                fmt_real(stats.beta),
                stats.n,
                fmt_real(stats.s),
                stats.p_count,
                stats.t_count,
                fmt_real(stats.density),
            );
            ctx.table("pairs", "beta,n,s,p_count,t_count,density", &[row])?;
            ctx.summary(&serde_json::to_value(stats).map_err(io::Error::from)?)?;
            json!({"beta": beta, "n": n, "s": s})
        }

        Command::Scan { grid, n, s } => {
            let scan = grid_scan(grid.lo, grid.hi, grid.count, s, n, tol)?;
            let rows: Vec<String> = scan
                .per_beta
                .iter()
                .map(|st| {
                    format!(
                        "{},{},{},{},{},{}",
                        fmt_real(st.beta),
                        st.n,
                        fmt_real(st.s),
                        st.p_count,
                        st.t_count,
                        fmt_real(st.density),
                    )
                })
                .collect();
            ctx.table("scan", "beta,n,s,p_count,t_count,density", &rows)?;
            ctx.summary(&json!({
                "lo": scan.lo,
                "hi": scan.hi,
                "grid_size": scan.grid_size,
                "n": scan.n,
                "s": scan.s,
                "mean_density": scan.mean_density,
                "fitted_c": scan.fitted_c,
                "crowded_fraction": scan.crowded_fraction,
            }))?;
            json!({"grid": [grid.lo, grid.hi, grid.count], "n": n, "s": s})
        }

        Command::Expand {
            beta,
            x,
            depth,
            method,
        } => {
            let base = BaseValue::new(beta)?;
            let seq = match method {
                MethodArg::Greedy => greedy_expand(x, &base, depth, tol)?,
                MethodArg::Lazy => lazy_expand(x, &base, depth, tol)?,
            };
            let b = base.value();
            let mut rows = Vec::with_capacity(seq.len());
            let mut remainder = x;
            let mut power = 1.0;
            for (i, &d) in seq.digits().iter().enumerate() {
                power /= b;
                let tail = power / (b - 1.0);
                let allow_zero =
                    remainder >= -tol.measure_tol && remainder <= tail + tol.measure_tol;
                let shifted = remainder - power;
                let allow_one = shifted >= -tol.measure_tol && shifted <= tail + tol.measure_tol;
                if d == 1 {
                    remainder = shifted;
                }
                rows.push(format!(
                    "{},{},{},{},{}",
                    i + 1,
                    d,
                    fmt_real(remainder),
                    allow_zero,
                    allow_one,
                ));
            }
            let method_name = match method {
                MethodArg::Greedy => "greedy",
                MethodArg::Lazy => "lazy",
            };
            ctx.table("expand", "step,digit,remainder,allow_zero,allow_one", &rows)?;
            ctx.summary(&json!({
                "beta": beta,
                "x": x,
                "depth": depth,
                "method": method_name,
                "digits": seq.digits(),
                "value": seq.value(),
            }))?;
            json!({"beta": beta, "x": x, "depth": depth, "method": method_name})
        }

        Command::Unique { beta, x, horizon } => {
            let base = BaseValue::new(beta)?;
            let profile = branching_profile(x, &base, horizon, tol)?;
            let kappa = if profile.is_unique_to_horizon() {
                Some(kappa_lower_bound(x, &base, horizon, tol)?)
            } else {
                None
            };
            let rows: Vec<String> = profile
                .allowed
                .iter()
                .zip(&profile.followed)
                .enumerate()
                .map(|(i, (&(zero_ok, one_ok), &d))| {
                    format!("{},{zero_ok},{one_ok},{d}", i + 1)
                })
                .collect();
            ctx.table("unique", "depth,allow_zero,allow_one,followed", &rows)?;
            ctx.summary(&json!({
                "beta": beta,
                "x": x,
                "horizon": horizon,
                "first_branch": profile.first_branch,
                "unique_up_to": profile.unique_up_to,
                "kappa": kappa,
            }))?;
            json!({"beta": beta, "x": x, "horizon": horizon})
        }

        Command::Optimal { beta, x, horizon } => {
            let base = BaseValue::new(beta)?;
            let report = optimal_chain_search(x, &base, horizon, tol)?;
            let rows: Vec<String> = report
                .best_values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let digit = report
                        .chain
                        .as_ref()
                        .map(|c| c[i].to_string())
                        .unwrap_or_default();
                    format!("{},{},{digit}", i + 1, fmt_real(*v))
                })
                .collect();
            ctx.side_table("optimal", "depth,best_value,chain_digit", &rows)?;
            ctx.report(&serde_json::to_value(&report).map_err(io::Error::from)?)?;
            json!({"beta": beta, "x": x, "horizon": horizon})
        }

        Command::Coverage {
            beta,
            rate,
            variant,
            from,
            to,
        } => {
            let base = BaseValue::new(beta)?;
            let psi = parse_rate(&rate, Some(&base))?;
            let window = StageWindow::new(from, to)?;
            let report = coverage(&base, &psi, variant.into(), window, tol)?;
            let rows: Vec<String> = report
                .stages
                .iter()
                .map(|st| {
                    format!(
                        "{},{},{},{},{}",
                        st.n,
                        st.interval_count,
                        fmt_real(st.stage_measure),
                        fmt_real(st.cumulative_measure),
                        fmt_real(st.coverage_fraction),
                    )
                })
                .collect();
            ctx.table(
                "coverage",
                "n,interval_count,stage_measure,cumulative_measure,coverage_fraction",
                &rows,
            )?;
            ctx.summary(&json!({
                "beta": beta,
                "rate": report.psi,
                "variant": variant.name(),
                "from": from,
                "to": to,
                "domain_length": report.domain_length,
                "window_measure": report.window_measure,
                "coverage_fraction": report.coverage_fraction,
            }))?;
            json!({
                "beta": beta, "rate": rate, "variant": variant.name(),
                "from": from, "to": to,
            })
        }

        Command::Member {
            beta,
            x,
            rate,
            variant,
            from,
            to,
        } => {
            let base = BaseValue::new(beta)?;
            let psi = parse_rate(&rate, Some(&base))?;
            let window = StageWindow::new(from, to)?;
            let report = membership(x, &base, &psi, variant.into(), window, tol)?;
            ctx.report(&serde_json::to_value(&report).map_err(io::Error::from)?)?;
            json!({
                "beta": beta, "x": x, "rate": rate, "variant": variant.name(),
                "from": from, "to": to,
            })
        }

        Command::Dimension {
            beta,
            alpha,
            depth,
            scale_lo,
            scale_hi,
        } => {
            let base = BaseValue::new(beta)?;
            let estimate = box_dimension(&base, alpha, depth, scale_lo, scale_hi, tol)?;
            let rows: Vec<String> = estimate
                .scale_exponents
                .iter()
                .zip(&estimate.counts)
                .map(|(k, c)| format!("{k},{c}"))
                .collect();
            ctx.table("dimension", "scale_exponent,count", &rows)?;
            ctx.summary(&serde_json::to_value(&estimate).map_err(io::Error::from)?)?;
            json!({
                "beta": beta, "alpha": alpha, "depth": depth,
                "scale_lo": scale_lo, "scale_hi": scale_hi,
            })
        }

        Command::Classify { poly } => {
            let polynomial = IntegerPolynomial::new(poly.clone())?;
            let report = classify(&polynomial, tol)?;
            let rows: Vec<String> = report
                .roots
                .iter()
                .zip(&report.root_moduli)
                .map(|(&(re, im), m)| {
                    format!("{},{},{}", fmt_real(re), fmt_real(im), fmt_real(*m))
                })
                .collect();
            ctx.side_table("roots", "re,im,modulus", &rows)?;
            ctx.report(&serde_json::to_value(&report).map_err(io::Error::from)?)?;
            json!({"poly": poly})
        }

        Command::Multinacci { order } => {
            let value = multinacci_value(order)?;
            // x^{k+1} - x^k - ... - x - 1: leading 1 then k+1 coefficients -1.
            let mut coefficients = vec![1i64];
            coefficients.extend(std::iter::repeat(-1).take(order as usize + 1));
            ctx.report(&json!({
                "order": order,
                "value": value.value(),
                "polynomial": coefficients,
            }))?;
            json!({"order": order})
        }

        Command::Kl { precision } => {
            let value = komornik_loreti(precision)?;
            ctx.report(&json!({"value": value, "precision": precision}))?;
            json!({"precision": precision})
        }

        Command::Bernoulli {
            beta,
            n,
            bins,
            method,
            samples,
            seed,
        } => {
            let base = BaseValue::new(beta)?;
            let hist = match method {
                HistArg::Exact => exact_histogram(&base, n, bins, tol)?,
                HistArg::Mc => {
                    seeds.push(seed);
                    mc_histogram(&base, n, samples, seed, bins)?
                }
            };
            let width = 1.0 / bins as f64;
            let rows: Vec<String> = hist
                .weights()
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    format!(
                        "{i},{},{},{},{}",
                        fmt_real(i as f64 * width),
                        fmt_real((i + 1) as f64 * width),
                        fmt_real(*w),
                        fmt_real(w * bins as f64),
                    )
                })
                .collect();
            ctx.table("bernoulli", "bin,lo,hi,weight,density", &rows)?;
            ctx.summary(&json!({
                "beta": beta,
                "n": n,
                "bins": bins,
                "method": serde_json::to_value(hist.method()).map_err(io::Error::from)?,
                "mass": hist.weights().iter().sum::<f64>(),
                "sup_density": hist.sup_density(),
            }))?;
            let method_name = match method {
                HistArg::Exact => "exact",
                HistArg::Mc => "mc",
            };
            json!({
                "beta": beta, "n": n, "bins": bins, "method": method_name,
                "samples": samples, "seed": seed,
            })
        }

        Command::Series {
            alpha,
            rate,
            s,
            terms,
        } => {
            let psi = match (alpha, &rate) {
                (Some(a), None) => RateFunction::power(a)?,
                (None, Some(spec)) => parse_rate(spec, None)?,
                (Some(_), Some(_)) => {
                    return Err(Error::Domain(
                        "pass either --alpha or --rate, not both".into(),
                    )
                    .into())
                }
                (None, None) => {
                    return Err(Error::Domain("series needs --alpha or --rate".into()).into())
                }
            };
            let report = classify_series(&psi, s, terms)?;
            ctx.report(&json!({
                "rate": psi.describe(),
                "s": report.s,
                "terms": report.terms,
                "partial_sum": report.partial_sum,
                "verdict": serde_json::to_value(report.verdict).map_err(io::Error::from)?,
            }))?;
            json!({"alpha": alpha, "rate": rate, "s": s, "terms": terms})
        }
    };
    ctx.finish(params, &seeds, tol)?;
    Ok(())
}

/// Rate grammar shared by coverage, member, and series: `power:<alpha>`
/// for width 2^{-alpha n}; `geometric` for the exact-tiling width (needs a
/// base); `log`, `linear`, and `const:<c>` for sequences scaled by 2^{-n}.
fn parse_rate(spec: &str, beta: Option<&BaseValue>) -> Result<RateFunction, Error> {
    if let Some(text) = spec.strip_prefix("power:") {
        let alpha: f64 = text
            .parse()
            .map_err(|e| Error::Domain(format!("power exponent: {e}")))?;
        return RateFunction::power(alpha);
    }
    if let Some(text) = spec.strip_prefix("const:") {
        let c: f64 = text
            .parse()
            .map_err(|e| Error::Domain(format!("constant rate: {e}")))?;
        return Ok(RateFunction::scaled(RateSequence::constant(c)?));
    }
    match spec {
        "geometric" => match beta {
            Some(base) => Ok(RateFunction::geometric(base)),
            None => Err(Error::Domain(
                "the geometric rate needs a base to scale by".into(),
            )),
        },
        "log" => Ok(RateFunction::scaled(RateSequence::log())),
        "linear" => Ok(RateFunction::scaled(RateSequence::linear())),
        other => Err(Error::Domain(format!(
            "unknown rate '{other}'; use power:<alpha>, geometric, log, linear, or const:<c>"
        ))),
    }
}
